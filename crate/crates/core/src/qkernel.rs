//! Dense qubit-register kernel: pure states, density matrices, partial
//! traces, von Neumann entropy and quantum mutual information.
//!
//! Register convention: qubit 0 is the system, qubits 1..=N are the
//! environments. Basis indices are big-endian, so qubit 0 is the most
//! significant bit and `|q0 q1 .. q_{n-1}>` reads left to right.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsets::FixedSizeSubsets;

/// Default soft limit on dense register size.
pub const DEFAULT_MAX_QUBITS: usize = 14;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Current soft limit on the number of qubits a dense state may hold.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Raises or lowers the soft register limit. Values above 30 are clamped.
pub fn set_max_qubits(limit: usize) {
    MAX_QUBITS.store(limit.clamp(1, 30), Ordering::Relaxed);
}

pub(crate) fn check_register(n_qubits: usize) -> Result<()> {
    let limit = max_qubits();
    if n_qubits > limit {
        return Err(Error::RegisterTooLarge { n_qubits, limit });
    }
    Ok(())
}

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues below this are a genuine PSD violation.
pub const PSD_TOL: f64 = 1e-10;

/// Bitset over register qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QubitMask(pub u128);

impl QubitMask {
    pub const EMPTY: QubitMask = QubitMask(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        QubitMask(indices.into_iter().fold(0, |acc, i| acc | (1u128 << i)))
    }

    pub fn single(index: usize) -> Self {
        QubitMask(1u128 << index)
    }

    /// Mask with qubits `0..n` set.
    pub fn full(n: usize) -> Self {
        if n >= 128 {
            QubitMask(u128::MAX)
        } else {
            QubitMask((1u128 << n) - 1)
        }
    }

    /// Environment qubits `1..=n_env`.
    pub fn all_environments(n_env: usize) -> Self {
        QubitMask(Self::full(n_env).0 << 1)
    }

    /// Lifts a zero-based environment subset (bit i = environment i+1) into register indexing.
    pub fn from_env_bits(env_bits: u128) -> Self {
        QubitMask(env_bits << 1)
    }

    /// Zero-based environment bits (drops the system qubit).
    pub fn env_bits(self) -> u128 {
        self.0 >> 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 128 && self.0 >> index & 1 == 1
    }

    pub fn union(self, other: QubitMask) -> QubitMask {
        QubitMask(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: QubitMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement within an `n_qubits` register.
    pub fn complement(self, n_qubits: usize) -> QubitMask {
        QubitMask(!self.0 & Self::full(n_qubits).0)
    }

    /// Set indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..128).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn highest(self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    /// Ensures the mask is non-empty and fits in an `n_qubits` register.
    pub fn validate(self, n_qubits: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        match self.highest() {
            Some(bit) if bit >= n_qubits => Err(Error::MaskOutOfRange { bit, n_qubits }),
            _ => Ok(()),
        }
    }
}

/// Entropy stored in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Entropy(f64);

impl Entropy {
    pub const ZERO: Entropy = Entropy(0.0);

    pub fn from_nats(nats: f64) -> Self {
        Entropy(nats)
    }

    pub fn from_bits(bits: f64) -> Self {
        Entropy(bits * LN_2)
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / LN_2
    }
}

impl std::ops::Add for Entropy {
    type Output = Entropy;
    fn add(self, rhs: Entropy) -> Entropy {
        Entropy(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Entropy {
    type Output = Entropy;
    fn sub(self, rhs: Entropy) -> Entropy {
        Entropy(self.0 - rhs.0)
    }
}

/// Normalized amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes, checking length and normalization.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadDimension { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_register(n_qubits)?;
        let norm = squared_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState {
            n_qubits,
            amplitudes,
        })
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = squared_norm(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        *amplitudes
            .get_mut(index)
            .ok_or_else(|| crate::error::invalid("basis index out of range"))? =
            Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the low qubit indices.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        PureState::normalized(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn squared_norm(&self) -> f64 {
        squared_norm(&self.amplitudes)
    }

    /// `|ψ><ψ|` as a density matrix.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let dim = self.amplitudes.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries,
        }
    }
}

fn squared_norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Hermitian, unit-trace matrix over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity and trace. Positivity is checked lazily by
    /// [`von_neumann_entropy`].
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim != entries.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::BadDimension { len: dim });
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_register(n_qubits)?;
        let mut asym = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                asym = asym.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(trace));
        }
        Ok(DensityMatrix { n_qubits, entries })
    }

    /// Diagonal density matrix from probabilities.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let dim = probabilities.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(probabilities[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(entries)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.entries.clone())
    }
}

fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = if m.nrows() == 1 {
        vec![m[(0, 0)].re]
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// Either kind of state accepted by [`partial_trace`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(s: &'a PureState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.n_qubits,
            StateRef::Mixed(s) => s.n_qubits,
        }
    }
}

/// Full-register offsets for every local basis index of `mask`.
///
/// Local indices are big-endian over the mask's qubits in ascending order.
fn scatter_offsets(mask: QubitMask, n_qubits: usize) -> Vec<usize> {
    let qubits: Vec<usize> = mask.indices().collect();
    let k = qubits.len();
    (0..1usize << k)
        .map(|local| {
            qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if local >> (k - 1 - pos) & 1 == 1 {
                    acc | 1 << (n_qubits - 1 - q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Reduced density matrix on `keep`, with kept qubits in ascending order.
pub fn partial_trace<'a>(state: impl Into<StateRef<'a>>, keep: QubitMask) -> Result<DensityMatrix> {
    let state = state.into();
    let n = state.n_qubits();
    keep.validate(n)?;
    let kept = scatter_offsets(keep, n);
    let traced = scatter_offsets(keep.complement(n), n);
    let dim = kept.len();
    let entries = match state {
        StateRef::Pure(psi) => {
            let amps = &psi.amplitudes;
            let block = DMatrix::from_fn(dim, traced.len(), |i, t| amps[kept[i] | traced[t]]);
            &block * block.adjoint()
        }
        StateRef::Mixed(rho) => DMatrix::from_fn(dim, dim, |i, j| {
            traced
                .iter()
                .map(|&t| rho.entries[(kept[i] | t, kept[j] | t)])
                .sum()
        }),
    };
    Ok(DensityMatrix {
        n_qubits: keep.len(),
        entries,
    })
}

/// −Σ λ ln λ over the eigenvalues of `rho`, in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<Entropy> {
    entropy_from_spectrum(&rho.eigenvalues())
}

/// −Σ p ln p with `0 ln 0 = 0`; small negative values from round-off are
/// clipped, anything below `-PSD_TOL` is rejected.
pub fn entropy_from_spectrum(eigenvalues: &[f64]) -> Result<Entropy> {
    let mut h = 0.0;
    for &p in eigenvalues {
        if p < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(p));
        }
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    Ok(Entropy(h.max(0.0)))
}

/// Entropy of the marginal of a pure state on `mask`.
///
/// Uses whichever of `mask` and its complement is smaller; their spectra
/// coincide for a globally pure state.
pub fn marginal_entropy(state: &PureState, mask: QubitMask) -> Result<Entropy> {
    let n = state.n_qubits;
    if mask.is_empty() {
        return Ok(Entropy::ZERO);
    }
    mask.validate(n)?;
    let complement = mask.complement(n);
    if complement.is_empty() {
        return Ok(Entropy::ZERO);
    }
    let side = if complement.len() < mask.len() {
        complement
    } else {
        mask
    };
    von_neumann_entropy(&partial_trace(state, side)?)
}

/// Quantum mutual information H(a) + H(b) − H(a ∪ b), in nats.
pub fn mutual_information(state: &PureState, a: QubitMask, b: QubitMask) -> Result<Entropy> {
    let n = state.n_qubits;
    a.validate(n)?;
    b.validate(n)?;
    if !a.is_disjoint(b) {
        return Err(Error::SubsystemsOverlap);
    }
    let joint = marginal_entropy(state, a.union(b))?;
    Ok(marginal_entropy(state, a)? + marginal_entropy(state, b)? - joint)
}

/// Memoizes marginal entropies of one pure state by mask.
#[derive(Debug)]
pub struct MarginalEntropies<'a> {
    state: &'a PureState,
    cache: HashMap<u128, f64>,
}

impl<'a> MarginalEntropies<'a> {
    pub fn new(state: &'a PureState) -> Self {
        Self {
            state,
            cache: HashMap::new(),
        }
    }

    /// Entropy of `mask` in nats.
    pub fn get(&mut self, mask: QubitMask) -> Result<f64> {
        if let Some(&h) = self.cache.get(&mask.0) {
            return Ok(h);
        }
        let h = marginal_entropy(self.state, mask)?.nats();
        self.cache.insert(mask.0, h);
        self.cache.insert(mask.complement(self.state.n_qubits).0, h);
        Ok(h)
    }

    /// I(a : b) in nats for disjoint masks.
    pub fn mutual_information(&mut self, a: QubitMask, b: QubitMask) -> Result<f64> {
        if !a.is_disjoint(b) {
            return Err(Error::SubsystemsOverlap);
        }
        Ok(self.get(a)? + self.get(b)? - self.get(a.union(b))?)
    }
}

/// True when every bipartition (A, Ā) with |A| ≤ n/2 has H(A) = |A| ln 2
/// within 1e-9.
pub fn all_bipartitions_maximally_entangled(state: &PureState) -> Result<bool> {
    let n = state.n_qubits;
    if n < 2 {
        return Err(crate::error::invalid("need at least two qubits"));
    }
    for k in 1..=n / 2 {
        for bits in FixedSizeSubsets::new(n, k) {
            let h = marginal_entropy(state, QubitMask(bits))?.nats();
            if (h - k as f64 * LN_2).abs() > 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// (|0..0> + |1..1>)/√2 on `n` qubits.
pub fn ghz_state(n_qubits: usize) -> Result<PureState> {
    let dim = 1usize << n_qubits;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[dim - 1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(amplitudes)
}
