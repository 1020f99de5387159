//! Redundancy of the environmental record.
//!
//! A sub-environment *qualifies* when it holds at least `(1−δ)/2` of the
//! total mutual information `I_total = 2 H(P0, d_S)`. The information is
//! `R_δ`-fold redundant when the environment splits into `R_δ + 1`
//! qualifying parts. For branch states a part qualifies exactly when its
//! summed d-factor reaches the critical value `d_r`.

use serde::{Deserialize, Serialize};

use crate::branch::{check_p0, entropy_h_unchecked, mi_from_factors, DecoherenceProfile};
use crate::error::{invalid, Result};

const RELATIVE_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 2000;

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

// Smallest d in [lo, hi] with f(d) ≥ target, for increasing f; returns the upper bracket.
fn bisect<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= RELATIVE_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest captured d-factor whose mutual information reaches
/// `(1−δ)/2 · I_total`, for a system decohered by a total `d_S`.
///
/// For `d_S = +∞` this solves `H(P0, d_r) = (1−δ) H(P0, ∞)`.
pub fn critical_d(p0: f64, d_total: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let p0 = check_p0(p0)?;
    if d_total.is_nan() || d_total <= 0.0 {
        return Err(invalid(format!("d_S must be positive, got {d_total}")));
    }
    let h_total = entropy_h_unchecked(p0, d_total);
    if h_total <= 0.0 {
        return Err(invalid("system carries no entropy (P0 = 1)"));
    }
    let target = (1.0 - delta) * h_total;
    if d_total.is_infinite() {
        let h = |d: f64| entropy_h_unchecked(p0, d);
        let mut hi = 1.0;
        while h(hi) < target {
            hi *= 2.0;
        }
        return Ok(bisect(h, target, 0.0, hi));
    }
    // I(d) = H(d_S) + H(d) − H(d_S − d) against (1−δ)/2 · 2H(d_S)
    let info = |d: f64| mi_from_factors(p0, d_total, d, (d_total - d).max(0.0));
    Ok(bisect(info, target, 0.0, d_total))
}

/// Idealized redundancy with a given critical d-factor.
///
/// Finite profiles give `Σd_i / d_r − 1`. Each infinite d-factor anchors one
/// part on its own and the finite remainder contributes
/// `floor(Σ_finite d_i / d_r)` further parts.
pub fn infdiv_with_critical(d: &[f64], d_r: f64) -> f64 {
    let infinite = d.iter().filter(|v| v.is_infinite()).count();
    let finite: f64 = d.iter().filter(|v| v.is_finite()).sum();
    if infinite == 0 {
        finite / d_r - 1.0
    } else {
        (infinite as f64 - 1.0) + (finite / d_r).floor()
    }
}

fn no_information(profile: &DecoherenceProfile) -> bool {
    profile.d_total() == 0.0 || entropy_h_unchecked(profile.p0(), f64::INFINITY) == 0.0
}

/// `R = d_E / d_r − 1` under infinite divisibility of the environment.
///
/// A profile with no decoherence has no qualifying parts and returns −1.
pub fn redundancy_infdiv(profile: &DecoherenceProfile, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if no_information(profile) {
        return Ok(-1.0);
    }
    let d_r = critical_d(profile.p0(), profile.d_total(), delta)?;
    Ok(infdiv_with_critical(profile.d(), d_r))
}

/// Greedy disjoint parts whose d-factors each reach `d_r`.
///
/// Environments are taken in descending d order and a part closes as soon as
/// it reaches `d_r`. Leftovers that cannot complete a part are appended to
/// the last complete part. Returns zero-based environment indices.
pub fn greedy_partition(d: &[f64], d_r: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut acc = 0.0;
    for i in order {
        current.push(i);
        acc += d[i];
        if acc >= d_r {
            parts.push(std::mem::take(&mut current));
            acc = 0.0;
        }
    }
    if let Some(last) = parts.last_mut() {
        last.extend(current);
        last.sort_unstable();
    }
    parts
}

/// Redundancy estimates for one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub delta: f64,
    /// Critical captured d-factor; `+∞` when no information is stored.
    pub d_r: f64,
    /// Idealized `R`, infinite divisibility assumed.
    pub r_infdiv: f64,
    /// Number of qualifying parts found by the greedy partition.
    pub r_partition: usize,
    /// Witness parts as register indices (environments are 1..=N).
    pub parts: Vec<Vec<usize>>,
}

impl RedundancyReport {
    /// `R_δ = parts − 1` from the greedy witness.
    pub fn redundancy(&self) -> i64 {
        self.r_partition as i64 - 1
    }

    /// Parts count under infinite divisibility, `r_infdiv + 1`.
    pub fn ideal_parts(&self) -> f64 {
        self.r_infdiv + 1.0
    }
}

/// Critical d, idealized redundancy and a greedy witness partition.
pub fn redundancy_partition(profile: &DecoherenceProfile, delta: f64) -> Result<RedundancyReport> {
    check_delta(delta)?;
    if no_information(profile) {
        return Ok(RedundancyReport {
            delta,
            d_r: f64::INFINITY,
            r_infdiv: -1.0,
            r_partition: 0,
            parts: Vec::new(),
        });
    }
    let d_r = critical_d(profile.p0(), profile.d_total(), delta)?;
    let parts: Vec<Vec<usize>> = greedy_partition(profile.d(), d_r)
        .into_iter()
        .map(|part| part.into_iter().map(|i| i + 1).collect())
        .collect();
    Ok(RedundancyReport {
        delta,
        d_r,
        r_infdiv: infdiv_with_critical(profile.d(), d_r),
        r_partition: parts.len(),
        parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::entropy_h;
    use std::f64::consts::LN_2;

    #[test]
    fn critical_d_infinite_total() {
        let d_r = critical_d(0.5, f64::INFINITY, 0.5).unwrap();
        assert!((entropy_h(0.5, d_r).unwrap().nats() - LN_2 / 2.0).abs() < 1e-10);
        assert!((d_r - 0.497_065_618_257_646).abs() < 1e-9);
    }

    #[test]
    fn critical_d_residual() {
        let d_r = critical_d(0.5, 10.0, 0.1).unwrap();
        let info = mi_from_factors(0.5, 10.0, d_r, 10.0 - d_r);
        let target = 0.9 * entropy_h(0.5, 10.0).unwrap().nats();
        assert!((info - target).abs() < 1e-9);
        assert!(info >= target);
    }

    #[test]
    fn critical_d_finite_oracle() {
        // independent root-finding at 40 digits
        for (p0, ds, delta, want) in [
            (0.5, 10.0, 0.1, 1.997_234_683_261_357_6),
            (0.5, 3.0, 0.5, 0.435_158_404_362_693_4),
            (0.7, 1.5, 0.2, 0.556_703_507_814_930_7),
        ] {
            let got = critical_d(p0, ds, delta).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn critical_d_shrinks_as_delta_grows() {
        let mut prev = f64::INFINITY;
        for delta in [0.01, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9] {
            let d_r = critical_d(0.5, 6.0, delta).unwrap();
            assert!(d_r < prev);
            prev = d_r;
        }
        assert!(prev < 1e-6);
        assert!(critical_d(0.5, 6.0, 0.0).is_err());
        assert!(critical_d(0.5, 6.0, 1.0).is_err());
        assert!(critical_d(0.5, 0.0, 0.5).is_err());
        assert!(critical_d(1.0, 6.0, 0.5).is_err());
    }

    #[test]
    fn worked_example_eleven_environments() {
        let d = vec![10.0 / 11.0; 11];
        assert!((infdiv_with_critical(&d, 1.0) - 9.0).abs() < 1e-12);
        let parts = greedy_partition(&d, 1.0);
        assert_eq!(parts.len(), 5);
        assert!(parts.iter().take(4).all(|p| p.len() == 2));
        assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), 11);
    }

    #[test]
    fn greedy_edge_cases() {
        let parts = greedy_partition(&[0.7; 6], 0.7);
        assert_eq!(parts.len(), 6);
        assert!(parts.iter().all(|p| p.len() == 1));
        let parts = greedy_partition(&[2.0, 0.0, 0.0, 0.0], 1.0);
        assert_eq!(parts, vec![vec![0, 1, 2, 3]]);
        assert!(greedy_partition(&[0.1, 0.2], 1.0).is_empty());
    }

    #[test]
    fn ghz_and_diluted_reports() {
        let ghz = DecoherenceProfile::unimodal(6, f64::INFINITY, 0.5).unwrap();
        let r = redundancy_partition(&ghz, 0.1).unwrap();
        assert_eq!(r.r_partition, 6);
        assert_eq!(r.r_infdiv, 5.0);
        assert_eq!(r.redundancy(), 5);

        let diluted = DecoherenceProfile::bimodal(20, 8, f64::INFINITY, 0.5).unwrap();
        let r = redundancy_partition(&diluted, 0.1).unwrap();
        assert_eq!(r.r_partition, 8);
        assert_eq!(r.ideal_parts(), 8.0);
        let covered: usize = r.parts.iter().map(Vec::len).sum();
        assert_eq!(covered, 20);
    }

    #[test]
    fn no_information_profile() {
        let p = DecoherenceProfile::new(0.5, vec![0.0; 3]).unwrap();
        let r = redundancy_partition(&p, 0.3).unwrap();
        assert_eq!(r.r_partition, 0);
        assert!(r.parts.is_empty());
        assert_eq!(redundancy_infdiv(&p, 0.3).unwrap(), -1.0);
        assert!(redundancy_partition(&p, 1.5).is_err());
    }
}
