//! Partial information plot curves.

use serde::{Deserialize, Serialize};

/// How a curve's values were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Quadrature,
    Enumeration,
    MonteCarlo,
}

impl Provenance {
    /// True for provenances whose values carry no sampling noise.
    pub fn is_exact(self) -> bool {
        !matches!(self, Provenance::MonteCarlo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipPoint {
    /// Number of environments captured.
    pub m: usize,
    /// Average mutual information in bits.
    pub mean_bits: f64,
    /// Standard error of `mean_bits`, when sampled.
    pub stderr_bits: Option<f64>,
}

/// Ī(m) for m = 0..=N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipCurve {
    pub n_env: usize,
    pub provenance: Provenance,
    pub points: Vec<PipPoint>,
}

/// Alias used by the ensemble module; same shape as a Haar curve.
pub type AveragedPip = PipCurve;

impl PipCurve {
    /// Exact curve from values in bits indexed by m.
    pub fn exact(provenance: Provenance, values_bits: Vec<f64>) -> Self {
        let n_env = values_bits.len().saturating_sub(1);
        let points = values_bits
            .into_iter()
            .enumerate()
            .map(|(m, mean_bits)| PipPoint {
                m,
                mean_bits,
                stderr_bits: None,
            })
            .collect();
        PipCurve {
            n_env,
            provenance,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_bits).collect()
    }

    pub fn value(&self, m: usize) -> f64 {
        self.points[m].mean_bits
    }

    /// Ī(N), the information held by the whole environment.
    pub fn total(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.mean_bits)
    }

    /// Largest |Ī(m) + Ī(N−m) − Ī(N)| over m, in bits.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.n_env;
        let total = self.total();
        (0..=n)
            .map(|m| (self.value(m) + self.value(n - m) - total).abs())
            .fold(0.0, f64::max)
    }

    /// Values divided by Ī(N); the last point becomes exactly 1.
    pub fn rescaled_by_total(&self) -> Vec<f64> {
        let total = self.total();
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == self.n_env {
                    1.0
                } else {
                    p.mean_bits / total
                }
            })
            .collect()
    }
}
