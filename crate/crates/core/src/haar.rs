//! Haar-random pure states and the uniform-ensemble partial information plot.
//!
//! The analytic curve is assembled from mean subsystem entropies,
//!
//! ```text
//! H̄(m, n)   = Σ_{k=n+1}^{mn} 1/k − (m−1)/(2n)                    (m ≤ n)
//! H̄_{k;N}   = Ψ(2^N + 1) − Ψ(2^{N−k} + 1) − 2^{k−N−1}(2^k − 1)    (k ≤ N/2)
//! Ī(m)      = H̄_{1;N+1} + H̄_{m;N+1} − H̄_{m+1;N+1}
//! ```
//!
//! with the k > N/2 case folded onto N − k, since a pure universe gives a
//! subsystem and its complement the same entropy.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pip::{PipCurve, PipPoint, Provenance};
use crate::qkernel::{check_register, Entropy, MarginalEntropies, PureState, QubitMask};
use crate::special::{binomial, harmonic_difference};
use crate::subsets::{random_subset, FixedSizeSubsets};

/// Default number of Haar states per sampled curve.
pub const DEFAULT_SAMPLES: usize = 500;
/// Above this many subsets of a given size, subsets are sampled instead of enumerated.
pub const DEFAULT_SUBSET_BUDGET: usize = 10_000;

/// Seed for reproducible Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

/// Independent, reproducible generator for work item `stream` under `seed`.
///
/// ChaCha is counter based, so each (seed, stream) pair addresses its own
/// keystream regardless of how work is scheduled.
pub fn stream_rng(seed: RngSeed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

fn gaussian_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    check_register(n_qubits)?;
    let amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::normalized(amplitudes)
}

/// Unitarily invariant random state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn haar_random_pure_state(n_qubits: usize, seed: RngSeed, stream: u64) -> Result<PureState> {
    if n_qubits == 0 {
        return Err(crate::error::invalid("need at least one qubit"));
    }
    gaussian_state(n_qubits, &mut stream_rng(seed, stream))
}

/// Page's mean entropy of an `m_dim`-dimensional subsystem of an
/// `m_dim · n_dim`-dimensional pure system.
pub fn page_mean_entropy(m_dim: u64, n_dim: u64) -> Result<Entropy> {
    if m_dim > n_dim {
        return Err(Error::SubsystemLargerThanComplement { m: m_dim, n: n_dim });
    }
    if m_dim == 0 {
        return Err(crate::error::invalid(
            "subsystem dimension must be positive",
        ));
    }
    let sum = harmonic_difference(m_dim * n_dim, n_dim);
    Ok(Entropy::from_nats(
        sum - (m_dim - 1) as f64 / (2 * n_dim) as f64,
    ))
}

/// Mean entropy of `k` qubits of a Haar-random `n_total`-qubit state.
pub fn mean_qubit_entropy(k: u32, n_total: u32) -> Result<Entropy> {
    if k > n_total {
        return Err(crate::error::invalid(format!(
            "subsystem of {k} qubits exceeds universe of {n_total}"
        )));
    }
    if n_total > 62 {
        return Err(crate::error::invalid("universe larger than 62 qubits"));
    }
    let k = k.min(n_total - k);
    if k == 0 {
        return Ok(Entropy::ZERO);
    }
    // Ψ(2^N + 1) − Ψ(2^{N−k} + 1) as one harmonic block.
    let psi_diff = harmonic_difference(1u64 << n_total, 1u64 << (n_total - k));
    let correction = ((1u64 << k) - 1) as f64 * (2f64).powi(k as i32 - n_total as i32 - 1);
    Ok(Entropy::from_nats(psi_diff - correction))
}

/// Analytic Haar-average PIP for one system qubit and `n_env` environment qubits.
pub fn haar_average_pip(n_env: usize) -> Result<PipCurve> {
    if n_env == 0 {
        return Err(crate::error::invalid("need at least one environment"));
    }
    let universe = n_env as u32 + 1;
    let h = |k: usize| mean_qubit_entropy(k as u32, universe).map(Entropy::nats);
    let h_sys = h(1)?;
    let values = (0..=n_env)
        .map(|m| {
            if m == 0 {
                return Ok(0.0);
            }
            Ok(Entropy::from_nats(h_sys + h(m)? - h(m + 1)?).bits())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PipCurve::exact(Provenance::Analytic, values))
}

// Per-sample Ī(m) in nats, averaged over the environment subsets of each size.
fn single_state_pip(
    n_env: usize,
    seed: RngSeed,
    stream: u64,
    subset_budget: usize,
) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, stream);
    let state = gaussian_state(n_env + 1, &mut rng)?;
    let mut entropies = MarginalEntropies::new(&state);
    let system = QubitMask::single(0);
    let mut out = vec![0.0; n_env + 1];
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let count = binomial(n_env as u64, m as u64);
        let mut acc = 0.0;
        let mut used = 0usize;
        let mut visit = |env: u128| -> Result<()> {
            acc += entropies.mutual_information(system, QubitMask::from_env_bits(env))?;
            used += 1;
            Ok(())
        };
        if count <= subset_budget as f64 {
            for env in FixedSizeSubsets::new(n_env, m) {
                visit(env)?;
            }
        } else {
            for _ in 0..subset_budget {
                visit(random_subset(&mut rng, n_env, m))?;
            }
        }
        *slot = acc / used as f64;
    }
    Ok(out)
}

/// Monte Carlo PIP over `samples` Haar-random universes of `n_env + 1` qubits.
///
/// Sample `s` draws from stream `s` of `seed`; per-sample curves are reduced
/// in sample order, so results do not depend on the thread count.
pub fn sampled_average_pip(
    n_env: usize,
    samples: usize,
    seed: RngSeed,
    subset_budget: usize,
) -> Result<PipCurve> {
    if samples == 0 {
        return Err(crate::error::invalid("need at least one sample"));
    }
    if n_env == 0 {
        return Err(crate::error::invalid("need at least one environment"));
    }
    if subset_budget == 0 {
        return Err(crate::error::invalid("subset budget must be positive"));
    }
    check_register(n_env + 1)?;
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| single_state_pip(n_env, seed, s, subset_budget))
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let points = (0..=n_env)
        .map(|m| {
            let (sum, sum_sq) = per_sample.iter().fold((0.0, 0.0), |(s, q), curve| {
                let bits = Entropy::from_nats(curve[m]).bits();
                (s + bits, q + bits * bits)
            });
            let mean = sum / n;
            let stderr = (samples > 1).then(|| {
                let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            });
            PipPoint {
                m,
                mean_bits: mean,
                stderr_bits: stderr,
            }
        })
        .collect();
    Ok(PipCurve {
        n_env,
        provenance: Provenance::MonteCarlo,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a = haar_random_pure_state(5, RngSeed(42), 7).unwrap();
        let b = haar_random_pure_state(5, RngSeed(42), 7).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let c = haar_random_pure_state(5, RngSeed(42), 8).unwrap();
        assert_ne!(a.amplitudes(), c.amplitudes());
        assert!((a.squared_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn page_values() {
        for n in 1..20 {
            assert_eq!(page_mean_entropy(1, n).unwrap().nats(), 0.0);
        }
        assert!((page_mean_entropy(2, 2).unwrap().nats() - 1.0 / 3.0).abs() < 1e-15);
        assert!((page_mean_entropy(2, 4).unwrap().nats() - 0.509_523_809_523_809_5).abs() < 1e-15);
        assert!(matches!(
            page_mean_entropy(4, 2).unwrap_err(),
            Error::SubsystemLargerThanComplement { .. }
        ));
    }

    #[test]
    fn qubit_entropy_matches_page() {
        assert_eq!(mean_qubit_entropy(0, 5).unwrap().nats(), 0.0);
        assert!((mean_qubit_entropy(1, 2).unwrap().nats() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(mean_qubit_entropy(2, 2).unwrap().nats(), 0.0);
        for n in 1..=16u32 {
            for k in 0..=n {
                let small = k.min(n - k);
                let page = page_mean_entropy(1 << small, 1 << (n - small))
                    .unwrap()
                    .nats();
                let h = mean_qubit_entropy(k, n).unwrap().nats();
                assert!((page - h).abs() < 1e-13, "k={k} n={n}");
            }
        }
        assert!(mean_qubit_entropy(3, 2).is_err());
    }

    #[test]
    fn analytic_curve_identities() {
        for n in 1..=20 {
            let c = haar_average_pip(n).unwrap();
            assert_eq!(c.value(0), 0.0);
            let h1 = mean_qubit_entropy(1, n as u32 + 1).unwrap().bits();
            assert!((c.total() - 2.0 * h1).abs() < 1e-12);
            assert!(c.antisymmetry_defect() < 1e-10);
            assert!(c.values().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn sampled_curve_basics() {
        let c = sampled_average_pip(3, 20, RngSeed(1), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(c.value(0), 0.0);
        assert_eq!(c.provenance, Provenance::MonteCarlo);
        assert!(c.points[1].stderr_bits.unwrap() > 0.0);
        // pure universes satisfy the complement identity sample by sample
        assert!(c.antisymmetry_defect() < 1e-10);
        let again = sampled_average_pip(3, 20, RngSeed(1), DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn sampled_subsets_when_over_budget() {
        let c = sampled_average_pip(6, 4, RngSeed(9), 5).unwrap();
        assert_eq!(c.points.len(), 7);
        assert_eq!(c.value(0), 0.0);
        assert!(sampled_average_pip(3, 0, RngSeed(0), 10).is_err());
    }
}
