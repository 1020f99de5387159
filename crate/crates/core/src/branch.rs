//! Branch states `α|0>⊗ψ_i + β|1>⊗ψ'_i` and their decoherence-factor algebra.
//!
//! Every reduced state that matters here is supported on two vectors, so it
//! is summarized by a virtual qubit with population `x` and overlap `γ`.
//! Writing `P0 = x² + (1−x)²` and `d = −ln|γ|²` gives
//!
//! ```text
//! H(P0, d) = ln 2 − ½[(1+z) ln(1+z) + (1−z) ln(1−z)],  z² = 1 − 2(1−P0)(1−e^{−d})
//! ```
//!
//! and d-factors add over environments, so subset mutual information only
//! needs `P0`, the total `d_S`, the captured `d` and the uncaptured `d`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qkernel::{check_register, entropy_from_spectrum, Entropy, PureState, QubitMask};

const NORM_TOL: f64 = 1e-12;
const P0_TOL: f64 = 1e-12;

/// Single-qubit pure state.
pub type Qubit = [Complex64; 2];

fn qubit_norm(q: &Qubit) -> f64 {
    q[0].norm_sqr() + q[1].norm_sqr()
}

/// `<a|b>`.
pub fn overlap(a: &Qubit, b: &Qubit) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Uniform point on the Bloch sphere.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> Qubit {
    loop {
        let mut draw = || {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        };
        let q = [draw(), draw()];
        let norm = qubit_norm(&q).sqrt();
        if norm > 1e-8 {
            return [q[0] / norm, q[1] / norm];
        }
    }
}

/// Amplitudes and conditional environment states of a branch state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpec {
    alpha: Complex64,
    beta: Complex64,
    env_pairs: Vec<(Qubit, Qubit)>,
}

impl BranchSpec {
    pub fn new(alpha: Complex64, beta: Complex64, env_pairs: Vec<(Qubit, Qubit)>) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        for (psi, psi_prime) in &env_pairs {
            for q in [psi, psi_prime] {
                let n = qubit_norm(q);
                if (n - 1.0).abs() > NORM_TOL {
                    return Err(Error::NotNormalized(n));
                }
            }
        }
        Ok(BranchSpec {
            alpha,
            beta,
            env_pairs,
        })
    }

    /// GHZ-like spec: every environment records the pointer state perfectly.
    pub fn ghz(n_env: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let one = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        Self::new(alpha, beta, vec![(zero, one); n_env])
    }

    /// Random spec with Bloch-uniform system amplitudes and environment states.
    pub fn random<R: Rng + ?Sized>(n_env: usize, rng: &mut R) -> Self {
        let [alpha, beta] = random_qubit(rng);
        let env_pairs = (0..n_env)
            .map(|_| (random_qubit(rng), random_qubit(rng)))
            .collect();
        BranchSpec {
            alpha,
            beta,
            env_pairs,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn env_pairs(&self) -> &[(Qubit, Qubit)] {
        &self.env_pairs
    }

    pub fn n_env(&self) -> usize {
        self.env_pairs.len()
    }

    /// γ_i = <ψ_i|ψ'_i> for every environment.
    pub fn gammas(&self) -> Vec<Complex64> {
        self.env_pairs.iter().map(|(a, b)| overlap(a, b)).collect()
    }
}

fn kron_qubits<'a>(qubits: impl Iterator<Item = &'a Qubit>) -> Vec<Complex64> {
    qubits.fold(vec![Complex64::new(1.0, 0.0)], |acc, q| {
        acc.iter().flat_map(|a| [a * q[0], a * q[1]]).collect()
    })
}

/// Expands a branch spec into an explicit `(N+1)`-qubit state, system at qubit 0.
pub fn branch_to_state_vector(spec: &BranchSpec) -> Result<PureState> {
    check_register(spec.n_env() + 1)?;
    let left = kron_qubits(spec.env_pairs.iter().map(|(a, _)| a));
    let right = kron_qubits(spec.env_pairs.iter().map(|(_, b)| b));
    let amplitudes = left
        .iter()
        .map(|a| spec.alpha * a)
        .chain(right.iter().map(|b| spec.beta * b))
        .collect();
    PureState::normalized(amplitudes)
}

/// Base purity and per-environment d-factors (natural-log units, `+∞` allowed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceProfile {
    p0: f64,
    d: Vec<f64>,
}

impl DecoherenceProfile {
    pub fn new(p0: f64, d: Vec<f64>) -> Result<Self> {
        let p0 = check_p0(p0)?;
        if let Some(bad) = d.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(invalid(format!("d-factors must be nonnegative, got {bad}")));
        }
        Ok(DecoherenceProfile { p0, d })
    }

    /// Every environment carries `d0`.
    pub fn unimodal(n_env: usize, d0: f64, p0: f64) -> Result<Self> {
        Self::new(p0, vec![d0; n_env])
    }

    /// `n_useful` environments with `d0`, the rest useless (`d = 0`).
    pub fn bimodal(n_env: usize, n_useful: usize, d0: f64, p0: f64) -> Result<Self> {
        if n_useful > n_env {
            return Err(invalid("n_useful exceeds n_env"));
        }
        let mut d = vec![d0; n_useful];
        d.resize(n_env, 0.0);
        Self::new(p0, d)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn n_env(&self) -> usize {
        self.d.len()
    }

    /// d_S, the decoherence of the system by the whole environment.
    pub fn d_total(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Σ d_i over zero-based environment bits.
    pub fn d_of(&self, env_bits: u128) -> f64 {
        sum_selected(&self.d, env_bits)
    }

    /// Σ d_i over the environments not in `env_bits`.
    pub fn d_outside(&self, env_bits: u128) -> f64 {
        sum_selected(&self.d, !env_bits)
    }

    /// Maps a register mask (environments at 1..=N) to zero-based environment bits.
    pub fn env_bits_of(&self, mask: QubitMask) -> Result<u128> {
        if mask.contains(0) {
            return Err(Error::SystemNotEnvironment);
        }
        if let Some(bit) = mask.highest() {
            if bit > self.n_env() {
                return Err(Error::MaskOutOfRange {
                    bit,
                    n_qubits: self.n_env() + 1,
                });
            }
        }
        Ok(mask.env_bits())
    }
}

pub(crate) fn sum_selected(d: &[f64], bits: u128) -> f64 {
    d.iter()
        .enumerate()
        .filter(|(i, _)| bits >> i & 1 == 1)
        .map(|(_, v)| v)
        .sum()
}

pub(crate) fn check_p0(p0: f64) -> Result<f64> {
    if !(0.5 - P0_TOL..=1.0 + P0_TOL).contains(&p0) {
        return Err(invalid(format!(
            "base purity must lie in [1/2, 1], got {p0}"
        )));
    }
    Ok(p0.clamp(0.5, 1.0))
}

/// (P0, d) of a branch spec: `P0 = |α|⁴ + |β|⁴`, `d_i = −ln|γ_i|²`.
pub fn profile_from_branch(spec: &BranchSpec) -> DecoherenceProfile {
    let x = spec.alpha.norm_sqr();
    let p0 = (x * x + (1.0 - x) * (1.0 - x)).clamp(0.5, 1.0);
    let d = spec
        .gammas()
        .iter()
        .map(|g| {
            let g2 = g.norm_sqr();
            if g2 == 0.0 {
                f64::INFINITY
            } else {
                (-g2.ln()).max(0.0)
            }
        })
        .collect();
    DecoherenceProfile { p0, d }
}

/// Rank-≤2 state `[[x, √(x(1−x))γ], [√(x(1−x))γ*, 1−x]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualQubit {
    pub x: f64,
    pub gamma: Complex64,
}

impl VirtualQubit {
    pub fn new(x: f64, gamma: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid(format!("population must lie in [0, 1], got {x}")));
        }
        if gamma.norm() > 1.0 + 1e-12 {
            return Err(invalid(format!(
                "|gamma| must not exceed 1, got {}",
                gamma.norm()
            )));
        }
        Ok(VirtualQubit { x, gamma })
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let off = self.gamma * (self.x * (1.0 - self.x)).sqrt();
        [
            [Complex64::new(self.x, 0.0), off],
            [off.conj(), Complex64::new(1.0 - self.x, 0.0)],
        ]
    }

    pub fn base_purity(&self) -> f64 {
        self.x * self.x + (1.0 - self.x) * (1.0 - self.x)
    }

    pub fn d_factor(&self) -> f64 {
        let g2 = self.gamma.norm_sqr();
        if g2 == 0.0 {
            f64::INFINITY
        } else {
            (-g2.ln()).max(0.0)
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let w = 4.0 * self.x * (1.0 - self.x) * (1.0 - self.gamma.norm_sqr().min(1.0));
        let lower = small_eigenvalue(w);
        [lower, 1.0 - lower]
    }

    pub fn entropy(&self) -> Entropy {
        entropy_from_spectrum(&self.eigenvalues()).unwrap_or(Entropy::ZERO)
    }
}

// (1 − √(1 − w)) / 2 without cancellation.
fn small_eigenvalue(w: f64) -> f64 {
    let z = (1.0 - w).max(0.0).sqrt();
    0.5 * w / (1.0 + z)
}

/// Which reduced state of a branch state to summarize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduced {
    /// The system alone.
    System,
    /// A set of environments (register indices 1..=N).
    Environments(QubitMask),
    /// The system together with a set of environments.
    SystemAndEnvironments(QubitMask),
}

/// Virtual-qubit form of a reduced density matrix of a branch state.
///
/// The off-diagonal entry is `α*β Π γ_i` over the environments *not* held
/// (system plus environments), all environments (system alone), or the held
/// environments (environments alone).
pub fn reduced_density_matrix(spec: &BranchSpec, which: Reduced) -> Result<VirtualQubit> {
    let n = spec.n_env();
    let check = |mask: QubitMask| -> Result<u128> {
        if mask.contains(0) {
            return Err(Error::SystemNotEnvironment);
        }
        match mask.highest() {
            Some(bit) if bit > n => Err(Error::MaskOutOfRange {
                bit,
                n_qubits: n + 1,
            }),
            _ => Ok(mask.env_bits()),
        }
    };
    let selected: u128 = match which {
        Reduced::System => QubitMask::full(n).0,
        Reduced::Environments(mask) => check(mask)?,
        Reduced::SystemAndEnvironments(mask) => !check(mask)? & QubitMask::full(n).0,
    };
    let product = spec
        .gammas()
        .iter()
        .enumerate()
        .filter(|(i, _)| selected >> i & 1 == 1)
        .fold(Complex64::new(1.0, 0.0), |acc, (_, g)| acc * g);
    let x = spec.alpha.norm_sqr().clamp(0.0, 1.0);
    let scale = spec.alpha.norm() * spec.beta.norm();
    let phase = if scale > 0.0 {
        spec.alpha.conj() * spec.beta / scale
    } else {
        Complex64::new(1.0, 0.0)
    };
    VirtualQubit::new(x, phase * product)
}

/// H(P0, d) in nats; `d = +∞` means complete decoherence.
pub fn entropy_h(p0: f64, d: f64) -> Result<Entropy> {
    let p0 = check_p0(p0)?;
    if d.is_nan() || d < 0.0 {
        return Err(invalid(format!("d must be nonnegative, got {d}")));
    }
    Ok(Entropy::from_nats(entropy_h_unchecked(p0, d)))
}

pub(crate) fn entropy_h_unchecked(p0: f64, d: f64) -> f64 {
    // 1 − z² = 2(1−P0)(1−e^{−d})
    let w = 2.0 * (1.0 - p0) * -(-d).exp_m1();
    let lower = small_eigenvalue(w);
    if lower <= 0.0 {
        return 0.0;
    }
    if lower >= 0.5 {
        return LN_2;
    }
    -lower * lower.ln() - (1.0 - lower) * (-lower).ln_1p()
}

/// I(S : E_m) = H(P0, d_S) + H(P0, d_m) − H(P0, d_rest), in nats.
pub fn mi_from_factors(p0: f64, d_total: f64, d_held: f64, d_rest: f64) -> f64 {
    entropy_h_unchecked(p0, d_total) + entropy_h_unchecked(p0, d_held)
        - entropy_h_unchecked(p0, d_rest)
}

/// Mutual information between the system and the environments in `mask`
/// (register indices 1..=N). The uncaptured d-factor is summed directly over
/// the complement, so infinite factors never meet a subtraction.
pub fn subset_mutual_information(profile: &DecoherenceProfile, mask: QubitMask) -> Result<Entropy> {
    let bits = profile.env_bits_of(mask)?;
    Ok(Entropy::from_nats(mi_from_factors(
        profile.p0,
        profile.d_total(),
        profile.d_of(bits),
        profile.d_outside(bits),
    )))
}
