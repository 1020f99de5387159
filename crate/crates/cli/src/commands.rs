//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qdarwin_core::branch::DecoherenceProfile;
use qdarwin_core::ensembles::{
    bimodal_average_pip, empirical_average_pip, pip_integral, poisson_average_pip, sample_profile,
    unimodal_pip, DDistribution, EmpiricalMode,
};
use qdarwin_core::haar::{
    haar_average_pip, sampled_average_pip, stream_rng, RngSeed, DEFAULT_SUBSET_BUDGET,
};
use qdarwin_core::pip::Provenance;
use qdarwin_core::redundancy::redundancy_partition;
use qdarwin_core::PipCurve;
use serde_json::{json, Value};

use crate::args::{DistKind, FigureArgs, FigureId, PipArgs, PipKind, RedundancyArgs, OUT_DIR_ENV};
use crate::output::{curve_csv, fmt_num, json_num, write_atomic, RunManifest};
use crate::CliError;

const FIG3_TOTALS: [f64; 4] = [2.0, 8.0, 32.0, 128.0];
const FIG5_SIZES: [usize; 4] = [4, 8, 16, 32];
const FIG6_SIZES: [usize; 5] = [8, 9, 12, 16, 64];
const FIG6_USEFUL: usize = 8;

struct Series {
    file: String,
    curve: PipCurve,
    rescaled: bool,
}

impl Series {
    fn new(file: String, curve: PipCurve) -> Self {
        Series {
            file,
            curve,
            rescaled: false,
        }
    }
}

pub fn figure(args: &FigureArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let n = args.n_env as usize;
    let p0 = args.p0;
    let series = match args.id {
        FigureId::Fig2 => {
            let mut out = Vec::new();
            for n in 2..=9 {
                out.push(Series::new(
                    format!("fig2_N{n}_analytic.csv"),
                    haar_average_pip(n)?,
                ));
                let sampled = sampled_average_pip(
                    n,
                    args.samples as usize,
                    RngSeed(args.seed),
                    DEFAULT_SUBSET_BUDGET,
                )?;
                out.push(Series::new(format!("fig2_N{n}_sampled.csv"), sampled));
            }
            out
        }
        FigureId::Fig3 => FIG3_TOTALS
            .iter()
            .map(|&ds| {
                let curve = unimodal_pip(n, ds / n as f64, p0)?;
                Ok(Series::new(format!("fig3_dS{}.csv", fmt_num(ds)), curve))
            })
            .collect::<Result<_, CliError>>()?,
        FigureId::Fig4 => {
            for n_useful in [16, 6] {
                if n_useful > n {
                    return Err(CliError::Usage(format!(
                        "fig4 needs --n-env ≥ 16 (its bimodal series has {n_useful} useful environments), got {n}"
                    )));
                }
            }
            vec![
                Series::new(
                    "fig4_bimodal_nu16_d1.5.csv".into(),
                    bimodal_average_pip(n, 16, 1.5, p0)?,
                ),
                Series::new(
                    "fig4_bimodal_nu6_d3.csv".into(),
                    bimodal_average_pip(n, 6, 3.0, p0)?,
                ),
                Series::new("fig4_uniform_d0.75.csv".into(), unimodal_pip(n, 0.75, p0)?),
                Series::new(
                    "fig4_uniform_d0.5625.csv".into(),
                    unimodal_pip(n, 0.5625, p0)?,
                ),
            ]
        }
        FigureId::Fig5 => {
            let mut out = Vec::new();
            for n in FIG5_SIZES {
                let poisson = exponential_curve(n, p0)?;
                out.push(Series {
                    file: format!("fig5_poisson_N{n}.csv"),
                    curve: poisson,
                    rescaled: true,
                });
                out.push(Series {
                    file: format!("fig5_unimodal_N{n}.csv"),
                    curve: unimodal_pip(n, 1.0, p0)?,
                    rescaled: true,
                });
            }
            out
        }
        FigureId::Fig6 => FIG6_SIZES
            .iter()
            .map(|&n| {
                let curve = bimodal_average_pip(n, FIG6_USEFUL, f64::INFINITY, p0)?;
                Ok(Series::new(format!("fig6_N{n}.csv"), curve))
            })
            .collect::<Result<_, CliError>>()?,
    };

    let mut params = BTreeMap::new();
    params.insert("figure".into(), json!(args.id.name()));
    params.insert("p0".into(), json!(p0));
    match args.id {
        FigureId::Fig2 => {
            params.insert("samples".into(), json!(args.samples));
            params.insert("subset_budget".into(), json!(DEFAULT_SUBSET_BUDGET));
        }
        FigureId::Fig3 | FigureId::Fig4 => {
            params.insert("n_env".into(), json!(n));
        }
        _ => {}
    }
    let mut manifest = RunManifest::new(args.seed, params);
    for s in &series {
        let path = args.out.join(&s.file);
        write_atomic(&path, &curve_csv(&s.curve, s.rescaled))?;
        manifest.outputs.push(s.file.clone());
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&args.out.join(format!("{}_manifest.json", args.id.name())))
}

// Bloch-uniform environments: closed form at P0 = 1/2, quadrature otherwise.
fn exponential_curve(n: usize, p0: f64) -> Result<PipCurve, CliError> {
    if p0 == 0.5 {
        return Ok(poisson_average_pip(n)?);
    }
    let values = (0..=n)
        .map(|m| Ok(pip_integral(&DDistribution::Exponential, n, m, p0)?.bits()))
        .collect::<Result<Vec<f64>, CliError>>()?;
    Ok(PipCurve::exact(Provenance::Quadrature, values))
}

fn need<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("`{kind}` requires {flag}")))
}

fn reject(present: bool, flag: &str, kind: &str) -> Result<(), CliError> {
    if present {
        return Err(CliError::Usage(format!(
            "{flag} does not apply to `{kind}`"
        )));
    }
    Ok(())
}

fn default_path(file: &str) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
        .join(file)
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

pub fn pip(args: &PipArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let kind = args.kind.name();
    let mut params = BTreeMap::new();
    params.insert("kind".into(), json!(kind));
    params.insert("p0".into(), json!(args.p0));

    let n_useful_ok = matches!(args.kind, PipKind::Bimodal);
    let d0_ok = matches!(args.kind, PipKind::Unimodal | PipKind::Bimodal);
    let list_ok = matches!(args.kind, PipKind::Empirical);
    let samples_ok = matches!(args.kind, PipKind::Haar | PipKind::Empirical);
    reject(args.n_useful.is_some() && !n_useful_ok, "--n-useful", kind)?;
    reject(args.d0.is_some() && !d0_ok, "--d0", kind)?;
    reject(args.d_list.is_some() && !list_ok, "--d-list", kind)?;
    reject(args.samples.is_some() && !samples_ok, "--samples", kind)?;
    reject(args.n_env.is_some() && list_ok, "--n-env", kind)?;
    if matches!(args.kind, PipKind::Haar) && args.p0 != 0.5 {
        return Err(CliError::Usage("--p0 does not apply to `haar`".into()));
    }

    let curve = match args.kind {
        PipKind::Haar => {
            let n = need(args.n_env, "--n-env", kind)? as usize;
            params.insert("n_env".into(), json!(n));
            match args.samples {
                Some(samples) => {
                    params.insert("samples".into(), json!(samples));
                    params.insert("subset_budget".into(), json!(DEFAULT_SUBSET_BUDGET));
                    sampled_average_pip(
                        n,
                        samples as usize,
                        RngSeed(args.seed),
                        DEFAULT_SUBSET_BUDGET,
                    )?
                }
                None => haar_average_pip(n)?,
            }
        }
        PipKind::Unimodal => {
            let n = need(args.n_env, "--n-env", kind)? as usize;
            let d0 = need(args.d0, "--d0", kind)?;
            params.insert("n_env".into(), json!(n));
            params.insert("d0".into(), json_num(d0));
            unimodal_pip(n, d0, args.p0)?
        }
        PipKind::Bimodal => {
            let n = need(args.n_env, "--n-env", kind)? as usize;
            let d0 = need(args.d0, "--d0", kind)?;
            let n_useful = need(args.n_useful, "--n-useful", kind)? as usize;
            if n_useful > n {
                return Err(CliError::Usage(format!(
                    "--n-useful must lie in 0..={n}, got {n_useful}"
                )));
            }
            params.insert("n_env".into(), json!(n));
            params.insert("n_useful".into(), json!(n_useful));
            params.insert("d0".into(), json_num(d0));
            bimodal_average_pip(n, n_useful, d0, args.p0)?
        }
        PipKind::Poisson => {
            let n = need(args.n_env, "--n-env", kind)? as usize;
            params.insert("n_env".into(), json!(n));
            exponential_curve(n, args.p0)?
        }
        PipKind::Empirical => {
            let d = args
                .d_list
                .clone()
                .ok_or_else(|| CliError::Usage("`empirical` requires --d-list".into()))?
                .0;
            params.insert(
                "d".into(),
                Value::Array(d.iter().map(|&v| json_num(v)).collect()),
            );
            let profile = DecoherenceProfile::new(args.p0, d)?;
            let mode = match args.samples {
                Some(samples) => {
                    params.insert("samples".into(), json!(samples));
                    params.insert("subset_budget".into(), json!(DEFAULT_SUBSET_BUDGET));
                    EmpiricalMode::monte_carlo(samples as usize, args.seed)
                }
                None => EmpiricalMode::Exact,
            };
            empirical_average_pip(&profile, mode)?
        }
    };
    params.insert("provenance".into(), json!(curve.provenance));

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_path(&format!("pip_{kind}.csv")));
    write_atomic(&out, &curve_csv(&curve, false))?;
    let mut manifest = RunManifest::new(args.seed, params);
    manifest.outputs.push(out.display().to_string());
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&manifest_path(&out))
}

pub fn redundancy(args: &RedundancyArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut params = BTreeMap::new();
    params.insert("delta".into(), json!(args.delta));
    params.insert("p0".into(), json!(args.p0));
    let profile = match (&args.d_list, args.dist) {
        (Some(list), _) => {
            reject(args.d0.is_some(), "--d0", "redundancy --d-list")?;
            reject(args.n_useful.is_some(), "--n-useful", "redundancy --d-list")?;
            reject(args.n_env.is_some(), "--n-env", "redundancy --d-list")?;
            DecoherenceProfile::new(args.p0, list.0.clone())?
        }
        (None, Some(dist)) => {
            let n = need(args.n_env, "--n-env", "redundancy --dist")? as usize;
            let spec = match dist {
                DistKind::Unimodal => DDistribution::Unimodal {
                    d0: need(args.d0, "--d0", "redundancy --dist unimodal")?,
                },
                DistKind::Bimodal => {
                    let n_useful =
                        need(args.n_useful, "--n-useful", "redundancy --dist bimodal")? as usize;
                    if n_useful > n {
                        return Err(CliError::Usage(format!(
                            "--n-useful must lie in 0..={n}, got {n_useful}"
                        )));
                    }
                    DDistribution::Bimodal {
                        n_useful,
                        d0: need(args.d0, "--d0", "redundancy --dist bimodal")?,
                        n_total: n,
                    }
                }
                DistKind::Exponential => {
                    reject(args.d0.is_some(), "--d0", "redundancy --dist exponential")?;
                    DDistribution::Exponential
                }
            };
            params.insert(
                "distribution".into(),
                serde_json::to_value(&spec).expect("serializable"),
            );
            params.insert("n_env".into(), json!(n));
            let mut rng = stream_rng(RngSeed(args.seed), 0);
            sample_profile(&spec, n, args.p0, &mut rng)?
        }
        (None, None) => unreachable!("clap requires --d-list or --dist"),
    };
    let report = redundancy_partition(&profile, args.delta)?;
    let body = json!({
        "delta": args.delta,
        "p0": args.p0,
        "d": profile.d().iter().map(|&v| json_num(v)).collect::<Vec<_>>(),
        "d_total": json_num(profile.d_total()),
        "d_r": json_num(report.d_r),
        "r_infdiv": json_num(report.r_infdiv),
        "r_partition": report.r_partition,
        "redundancy": report.redundancy(),
        "parts": report.parts,
    });
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&body).expect("report serializes")
    );
    print!("{text}");

    let out = args.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join("redundancy.json"))
    });
    if let Some(out) = out {
        write_atomic(&out, &text)?;
        let mut manifest = RunManifest::new(args.seed, params);
        manifest.outputs.push(out.display().to_string());
        manifest.wall_time_s = start.elapsed().as_secs_f64();
        manifest.write(&manifest_path(&out))?;
    }
    Ok(())
}
