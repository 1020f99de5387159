//! Partial information plots averaged over distributions of d-factors.
//!
//! With `P0` and `d_S` fixed, the mutual information of a captured set
//! depends only on its summed d-factor, so
//!
//! ```text
//! Ī(m) = ∫ f_m(d) I(d) dd
//! ```
//!
//! where `f_m` is the distribution of the summed d-factor of `m` randomly
//! chosen environments. Discrete distributions give exact sums
//! (hypergeometric for two-valued profiles, enumeration for arbitrary
//! ones); the Bloch-uniform ensemble gives Erlang `f_m` and the closed form
//! in [`poisson_mean_entropy`].

use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{check_p0, entropy_h_unchecked, mi_from_factors, DecoherenceProfile};
use crate::error::{invalid, Error, Result};
use crate::haar::{stream_rng, RngSeed, DEFAULT_SUBSET_BUDGET};
use crate::pip::{AveragedPip, PipCurve, PipPoint, Provenance};
use crate::qkernel::Entropy;
use crate::quad;
use crate::special::{binomial, ln_factorial, zeta};
use crate::subsets::{random_subset, FixedSizeSubsets};

/// Hard cap on subsets enumerated for a single m.
pub const ENUMERATION_CAP: f64 = 1e6;
/// Beyond this d the Erlang tail is integrated analytically.
pub const QUADRATURE_SPLIT: f64 = 40.0;
/// Default absolute tolerance of [`pip_integral`].
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Distribution of single-environment d-factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DDistribution {
    /// Every environment has `d0`.
    Unimodal { d0: f64 },
    /// `n_useful` of `n_total` environments have `d0`, the rest 0.
    Bimodal {
        n_useful: usize,
        d0: f64,
        n_total: usize,
    },
    /// An explicit list of d-factors.
    Empirical(Vec<f64>),
    /// `f_1(d) = e^{−d}`, from Bloch-uniform environment states.
    Exponential,
}

impl DDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |d: f64| d.is_nan() || d < 0.0;
        match self {
            DDistribution::Unimodal { d0 } if bad(*d0) => Err(invalid("d0 must be nonnegative")),
            DDistribution::Bimodal { d0, .. } if bad(*d0) => Err(invalid("d0 must be nonnegative")),
            DDistribution::Bimodal {
                n_useful, n_total, ..
            } if n_useful > n_total => Err(invalid("n_useful exceeds n_total")),
            DDistribution::Empirical(d) if d.iter().any(|v| bad(*v)) => {
                Err(invalid("d-factors must be nonnegative"))
            }
            _ => Ok(()),
        }
    }
}

// k · d0 with 0 · ∞ = 0.
fn scaled(k: usize, d0: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * d0
    }
}

fn check_d(d: f64, what: &str) -> Result<()> {
    if d.is_nan() || d < 0.0 {
        return Err(invalid(format!("{what} must be nonnegative, got {d}")));
    }
    Ok(())
}

fn bits(nats: f64) -> f64 {
    nats / LN_2
}

/// Ī(m) when every environment has the same `d0`; no averaging needed.
pub fn unimodal_pip(n_env: usize, d0: f64, p0: f64) -> Result<AveragedPip> {
    check_d(d0, "d0")?;
    let p0 = check_p0(p0)?;
    let d_total = scaled(n_env, d0);
    let values = (0..=n_env)
        .map(|m| {
            bits(mi_from_factors(
                p0,
                d_total,
                scaled(m, d0),
                scaled(n_env - m, d0),
            ))
        })
        .collect();
    Ok(PipCurve::exact(Provenance::Analytic, values))
}

/// Probability that `m` environments drawn without replacement from
/// `n_total` include exactly `m_u` of the `n_useful` useful ones.
pub fn hypergeometric_weight(n_total: usize, n_useful: usize, m: usize, m_u: usize) -> f64 {
    if n_useful > n_total || m > n_total || m_u > m || m_u > n_useful {
        return 0.0;
    }
    if m - m_u > n_total - n_useful {
        return 0.0;
    }
    let (n, u) = (n_total as u64, n_useful as u64);
    binomial(u, m_u as u64) * binomial(n - u, (m - m_u) as u64) / binomial(n, m as u64)
}

/// Support `[max(0, m + n_useful − n_total), min(m, n_useful)]`.
pub fn hypergeometric_support(
    n_total: usize,
    n_useful: usize,
    m: usize,
) -> std::ops::RangeInclusive<usize> {
    (m + n_useful).saturating_sub(n_total)..=m.min(n_useful)
}

fn bimodal_point(n_total: usize, n_useful: usize, d0: f64, p0: f64, m: usize) -> f64 {
    let d_total = scaled(n_useful, d0);
    hypergeometric_support(n_total, n_useful, m)
        .map(|k| {
            hypergeometric_weight(n_total, n_useful, m, k)
                * mi_from_factors(p0, d_total, scaled(k, d0), scaled(n_useful - k, d0))
        })
        .sum()
}

/// Ī(m) for `n_useful` environments with `d0` among `n_total`, the rest useless.
pub fn bimodal_average_pip(
    n_total: usize,
    n_useful: usize,
    d0: f64,
    p0: f64,
) -> Result<AveragedPip> {
    check_d(d0, "d0")?;
    if n_useful > n_total {
        return Err(invalid("n_useful exceeds n_total"));
    }
    let p0 = check_p0(p0)?;
    let values = (0..=n_total)
        .map(|m| bits(bimodal_point(n_total, n_useful, d0, p0, m)))
        .collect();
    Ok(PipCurve::exact(Provenance::Analytic, values))
}

/// How [`empirical_average_pip`] covers the subsets of each size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalMode {
    /// Enumerate every subset; fails above [`ENUMERATION_CAP`].
    Exact,
    /// Enumerate when `C(N, m) ≤ budget`, otherwise average `samples`
    /// uniformly drawn subsets.
    MonteCarlo {
        samples: usize,
        seed: RngSeed,
        budget: usize,
    },
}

impl EmpiricalMode {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        EmpiricalMode::MonteCarlo {
            samples,
            seed: RngSeed(seed),
            budget: DEFAULT_SUBSET_BUDGET,
        }
    }
}

fn subset_mi(profile: &DecoherenceProfile, d_total: f64, env: u128) -> f64 {
    mi_from_factors(
        profile.p0(),
        d_total,
        profile.d_of(env),
        profile.d_outside(env),
    )
}

fn enumerate_mean(profile: &DecoherenceProfile, m: usize) -> f64 {
    let d_total = profile.d_total();
    let n = profile.n_env();
    let (sum, count) = FixedSizeSubsets::new(n, m).fold((0.0, 0usize), |(s, c), env| {
        (s + subset_mi(profile, d_total, env), c + 1)
    });
    sum / count as f64
}

/// Ī(m) for an explicit profile, averaging over sub-environments of each size.
pub fn empirical_average_pip(
    profile: &DecoherenceProfile,
    mode: EmpiricalMode,
) -> Result<AveragedPip> {
    let n = profile.n_env();
    if n > 127 {
        return Err(invalid("at most 127 environments are supported"));
    }
    if let EmpiricalMode::Exact = mode {
        if let Some(m) = (0..=n).find(|&m| binomial(n as u64, m as u64) > ENUMERATION_CAP) {
            return Err(Error::EnumerationTooLarge {
                count: binomial(n as u64, m as u64),
                cap: ENUMERATION_CAP,
            });
        }
    }
    if let EmpiricalMode::MonteCarlo { samples: 0, .. } = mode {
        return Err(invalid("need at least one sample"));
    }
    let d_total = profile.d_total();
    let points: Vec<(PipPoint, bool)> = (0..=n)
        .into_par_iter()
        .map(|m| {
            let count = binomial(n as u64, m as u64);
            match mode {
                EmpiricalMode::MonteCarlo {
                    samples,
                    seed,
                    budget,
                } if count > budget as f64 => {
                    let mut rng = stream_rng(seed, m as u64);
                    let draws: Vec<f64> = (0..samples)
                        .map(|_| bits(subset_mi(profile, d_total, random_subset(&mut rng, n, m))))
                        .collect();
                    let (mean, stderr) = mean_and_stderr(&draws);
                    let point = PipPoint {
                        m,
                        mean_bits: mean,
                        stderr_bits: stderr,
                    };
                    (point, true)
                }
                _ => {
                    let point = PipPoint {
                        m,
                        mean_bits: bits(enumerate_mean(profile, m)),
                        stderr_bits: None,
                    };
                    (point, false)
                }
            }
        })
        .collect();
    let sampled = points.iter().any(|(_, s)| *s);
    Ok(PipCurve {
        n_env: n,
        provenance: if sampled {
            Provenance::MonteCarlo
        } else {
            Provenance::Enumeration
        },
        points: points.into_iter().map(|(p, _)| p).collect(),
    })
}

fn mean_and_stderr(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let (sum, sum_sq) = values
        .iter()
        .fold((0.0, 0.0), |(s, q), v| (s + v, q + v * v));
    let mean = sum / n;
    let stderr = (values.len() > 1).then(|| {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    });
    (mean, stderr)
}

/// Mean and width of the summed d-factor of `m` environments drawn without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltMoments {
    pub mean: f64,
    pub width: f64,
}

/// `mean = m·d̄`, `width = √(m(1 − (m−1)/(N−1)))·Δd` with population statistics of the profile.
pub fn clt_moments(profile: &DecoherenceProfile, m: usize) -> Result<CltMoments> {
    let d = profile.d();
    let n = d.len();
    if d.iter().any(|v| v.is_infinite()) {
        return Err(Error::MomentsUndefined);
    }
    if m == 0 || m > n {
        return Err(invalid(format!("m must lie in 1..={n}, got {m}")));
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let shrink = if n == 1 {
        0.0
    } else {
        m as f64 * (1.0 - (m - 1) as f64 / (n - 1) as f64)
    };
    Ok(CltMoments {
        mean: m as f64 * mean,
        width: (shrink.max(0.0) * var).sqrt(),
    })
}

/// Erlang density `d^{m−1} e^{−d} / (m−1)!`: the sum of `m` unit exponentials.
pub fn erlang_pdf(m: usize, d: f64) -> Result<f64> {
    if m == 0 {
        return Err(invalid(
            "erlang_pdf needs m >= 1; m = 0 is a point mass at d = 0",
        ));
    }
    if d.is_nan() || d < 0.0 {
        return Err(invalid(format!("d must be nonnegative, got {d}")));
    }
    Ok(erlang_unchecked(m, d))
}

fn erlang_unchecked(m: usize, d: f64) -> f64 {
    if d == 0.0 {
        return if m == 1 { 1.0 } else { 0.0 };
    }
    if d.is_infinite() {
        return 0.0;
    }
    ((m - 1) as f64 * d.ln() - d - ln_factorial(m as u64 - 1)).exp()
}

/// P(Erlang(m) > x) = e^{−x} Σ_{k<m} x^k / k!.
fn erlang_survival(m: usize, x: f64) -> f64 {
    (0..m)
        .map(|k| (k as f64 * x.ln() - x - ln_factorial(k as u64)).exp())
        .sum()
}

/// ∫ f_m(d) H(P0, d) dd by adaptive quadrature, in nats.
///
/// `[0, 40]` is integrated adaptively; beyond it `H(P0, d)` differs from
/// `H(P0, ∞)` by less than `e^{−40}`, so the tail is `H(P0, ∞)·P(D > 40)`.
pub fn erlang_mean_entropy_quadrature(m: usize, p0: f64, tol: f64) -> Result<f64> {
    let p0 = check_p0(p0)?;
    if m == 0 {
        return Ok(0.0);
    }
    let mut breaks = vec![0.0, 1.0, 4.0, 10.0, 20.0, QUADRATURE_SPLIT];
    let mode = (m - 1) as f64;
    if mode > 0.0 && mode < QUADRATURE_SPLIT {
        breaks.push(mode);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let body = quad::integrate_pieces(
        |d| erlang_unchecked(m, d) * entropy_h_unchecked(p0, d),
        &breaks,
        tol,
    )?;
    let tail = entropy_h_unchecked(p0, f64::INFINITY) * erlang_survival(m, QUADRATURE_SPLIT);
    Ok(body + tail)
}

/// Mean entropy of a qubit (P0 = 1/2) decohered by `m` Bloch-uniform
/// environments, in closed form:
///
/// ```text
/// H̄_m = (1 − (2/3)^m)(ln 2 − 1) + m/2 − ½ Σ_{j=2}^{m} (1 − (2/3)^{m+1−j}) ζ(j)
/// ```
pub fn poisson_mean_entropy(m: usize) -> Entropy {
    if m == 0 {
        return Entropy::ZERO;
    }
    let frac = |k: usize| -((k as f64) * (2.0f64 / 3.0).ln()).exp_m1();
    let zeta_sum: f64 = (2..=m)
        .rev()
        .map(|j| frac(m + 1 - j) * zeta(j as u32))
        .sum();
    Entropy::from_nats(frac(m) * (LN_2 - 1.0) + 0.5 * m as f64 - 0.5 * zeta_sum)
}

/// Ī(m) averaged over all branch states with Bloch-uniform environments
/// (P0 = 1/2): `H̄_N + H̄_m − H̄_{N−m}`.
pub fn poisson_average_pip(n_env: usize) -> Result<AveragedPip> {
    if n_env == 0 {
        return Err(invalid("need at least one environment"));
    }
    let h: Vec<f64> = (0..=n_env)
        .map(|k| poisson_mean_entropy(k).nats())
        .collect();
    let values = (0..=n_env)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                bits(h[n_env] + h[m] - h[n_env - m])
            }
        })
        .collect();
    Ok(PipCurve::exact(Provenance::Analytic, values))
}

/// One point of `∫ f_m(d) I(d) dd`, in nats, for `n_env` environments.
///
/// Discrete distributions sum exactly; the total `d_S` follows from the
/// distribution. For `Exponential` the total is itself random, so the three
/// entropies of `I` are averaged separately against `f_N`, `f_m` and
/// `f_{N−m}` by quadrature.
pub fn pip_integral(dist: &DDistribution, n_env: usize, m: usize, p0: f64) -> Result<Entropy> {
    dist.validate()?;
    let p0 = check_p0(p0)?;
    if m > n_env {
        return Err(invalid(format!("m = {m} exceeds n_env = {n_env}")));
    }
    let nats = match dist {
        DDistribution::Unimodal { d0 } => mi_from_factors(
            p0,
            scaled(n_env, *d0),
            scaled(m, *d0),
            scaled(n_env - m, *d0),
        ),
        DDistribution::Bimodal {
            n_useful,
            d0,
            n_total,
        } => {
            if *n_total != n_env {
                return Err(invalid("bimodal n_total must equal n_env"));
            }
            bimodal_point(*n_total, *n_useful, *d0, p0, m)
        }
        DDistribution::Empirical(d) => {
            if d.len() != n_env {
                return Err(invalid("empirical profile length must equal n_env"));
            }
            if binomial(n_env as u64, m as u64) > ENUMERATION_CAP {
                return Err(Error::EnumerationTooLarge {
                    count: binomial(n_env as u64, m as u64),
                    cap: ENUMERATION_CAP,
                });
            }
            enumerate_mean(&DecoherenceProfile::new(p0, d.clone())?, m)
        }
        DDistribution::Exponential => {
            let tol = QUADRATURE_TOL / 3.0;
            let part = |k: usize| erlang_mean_entropy_quadrature(k, p0, tol);
            if m == 0 {
                0.0
            } else {
                part(n_env)? + part(m)? - part(n_env - m)?
            }
        }
    };
    Ok(Entropy::from_nats(nats))
}

/// Draws d-factors from `dist` for `n_env` environments.
pub fn sample_profile<R: Rng + ?Sized>(
    dist: &DDistribution,
    n_env: usize,
    p0: f64,
    rng: &mut R,
) -> Result<DecoherenceProfile> {
    dist.validate()?;
    let d = match dist {
        DDistribution::Unimodal { d0 } => vec![*d0; n_env],
        DDistribution::Bimodal {
            n_useful,
            d0,
            n_total,
        } => {
            if *n_total != n_env {
                return Err(invalid("bimodal n_total must equal n_env"));
            }
            let mut d = vec![*d0; *n_useful];
            d.resize(n_env, 0.0);
            d
        }
        DDistribution::Empirical(d) => d.clone(),
        // |γ|² uniform on (0, 1] ⇒ d = −ln|γ|² ~ Exp(1)
        DDistribution::Exponential => (0..n_env)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect(),
    };
    DecoherenceProfile::new(p0, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodal_limits() {
        let flat = unimodal_pip(6, 0.0, 0.5).unwrap();
        assert!(flat.values().iter().all(|v| *v == 0.0));
        let ghz = unimodal_pip(5, f64::INFINITY, 0.5).unwrap();
        assert_eq!(ghz.values(), vec![0.0, 1.0, 1.0, 1.0, 1.0, 2.0]);
        assert!(unimodal_pip(3, -1.0, 0.5).is_err());
    }

    #[test]
    fn hypergeometric_examples() {
        assert!((hypergeometric_weight(12, 4, 6, 2) - 6.0 * 70.0 / 924.0).abs() < 1e-15);
        for m in 0..=32 {
            let total: f64 = hypergeometric_support(32, 16, m)
                .map(|k| hypergeometric_weight(32, 16, m, k))
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "m = {m}");
            assert_eq!(hypergeometric_weight(32, 32, m, m), 1.0);
        }
        assert_eq!(hypergeometric_weight(10, 3, 2, 3), 0.0);
        assert_eq!(hypergeometric_weight(10, 8, 5, 1), 0.0);
    }

    #[test]
    fn bimodal_reduces_to_unimodal() {
        let a = bimodal_average_pip(10, 10, 0.7, 0.5).unwrap();
        let b = unimodal_pip(10, 0.7, 0.5).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn jensen_drag_on_diluted_ghz() {
        // N = 8, four perfect records: Ī(2) = 1 − P(no useful) bits
        let c = bimodal_average_pip(8, 4, f64::INFINITY, 0.5).unwrap();
        let miss = 6.0 / 28.0;
        assert!((c.value(2) - (1.0 - miss)).abs() < 1e-14);
        // I at the mean captured d (infinite) is a full bit
        assert!(c.value(2) < 1.0);
    }

    #[test]
    fn empirical_matches_unimodal() {
        let p = DecoherenceProfile::unimodal(7, 0.4, 0.5).unwrap();
        let e = empirical_average_pip(&p, EmpiricalMode::Exact).unwrap();
        let u = unimodal_pip(7, 0.4, 0.5).unwrap();
        assert_eq!(e.provenance, Provenance::Enumeration);
        for (x, y) in e.values().iter().zip(u.values()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn empirical_exact_cap() {
        let p = DecoherenceProfile::unimodal(40, 0.1, 0.5).unwrap();
        assert!(matches!(
            empirical_average_pip(&p, EmpiricalMode::Exact).unwrap_err(),
            Error::EnumerationTooLarge { .. }
        ));
        let mc = empirical_average_pip(&p, EmpiricalMode::monte_carlo(200, 4)).unwrap();
        assert_eq!(mc.provenance, Provenance::MonteCarlo);
        // every subset of a unimodal profile has the same value
        let u = unimodal_pip(40, 0.1, 0.5).unwrap();
        for (x, y) in mc.values().iter().zip(u.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn clt_examples() {
        let p = DecoherenceProfile::new(0.5, vec![0.2, 0.5, 1.0, 1.7, 3.0]).unwrap();
        let one = clt_moments(&p, 1).unwrap();
        let mean = 6.4 / 5.0;
        assert!((one.mean - mean).abs() < 1e-15);
        let sd = (p.d().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0).sqrt();
        assert!((one.width - sd).abs() < 1e-15);
        let all = clt_moments(&p, 5).unwrap();
        assert_eq!(all.width, 0.0);
        assert!((all.mean - 6.4).abs() < 1e-14);
        let inf = DecoherenceProfile::new(0.5, vec![1.0, f64::INFINITY]).unwrap();
        assert_eq!(clt_moments(&inf, 1).unwrap_err(), Error::MomentsUndefined);
    }

    #[test]
    fn clt_width_peaks_at_half() {
        let d: Vec<f64> = (0..10).map(|i| 0.1 + 0.37 * i as f64).collect();
        let p = DecoherenceProfile::new(0.5, d).unwrap();
        let widths: Vec<f64> = (1..=10)
            .map(|m| clt_moments(&p, m).unwrap().width)
            .collect();
        let argmax = widths
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0
            + 1;
        assert_eq!(argmax, 5);
    }

    #[test]
    fn erlang_basics() {
        for d in [0.0, 0.3, 2.0, 11.0] {
            assert!((erlang_pdf(1, d).unwrap() - (-d).exp()).abs() < 1e-15);
        }
        assert!(erlang_pdf(0, 1.0).is_err());
        assert!(erlang_pdf(2, -1.0).is_err());
        assert!((erlang_pdf(3, 2.0).unwrap() - 4.0 * (-2f64).exp() / 2.0).abs() < 1e-15);
        assert!((erlang_survival(1, 3.0) - (-3f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn poisson_entropy_values() {
        assert_eq!(poisson_mean_entropy(0).nats(), 0.0);
        assert!((poisson_mean_entropy(1).nats() - 0.397_715_726_853_315).abs() < 1e-14);
        assert!((poisson_mean_entropy(2).nats() - 0.555_370_533_614_154).abs() < 1e-14);
        assert!((poisson_mean_entropy(32).nats() - 0.693_147_180_443_53).abs() < 1e-13);
        assert!(poisson_mean_entropy(32).nats() < LN_2);
    }

    #[test]
    fn pip_integral_discrete_variants() {
        let u = unimodal_pip(9, 0.3, 0.6).unwrap();
        let b = bimodal_average_pip(9, 4, 1.2, 0.6).unwrap();
        for m in 0..=9 {
            let pu = pip_integral(&DDistribution::Unimodal { d0: 0.3 }, 9, m, 0.6).unwrap();
            assert_eq!(pu.bits(), u.value(m));
            let dist = DDistribution::Bimodal {
                n_useful: 4,
                d0: 1.2,
                n_total: 9,
            };
            assert_eq!(pip_integral(&dist, 9, m, 0.6).unwrap().bits(), b.value(m));
        }
        let ghz = DDistribution::Unimodal { d0: f64::INFINITY };
        assert_eq!(pip_integral(&ghz, 4, 2, 0.5).unwrap().bits(), 1.0);
        assert_eq!(pip_integral(&ghz, 4, 4, 0.5).unwrap().bits(), 2.0);
    }
}
