//! Qudit dimension and the two state-vector types: the input state |φ⟩ and
//! the Schmidt-form channel state Σ γ_k |kk⟩.

use std::fmt;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, C64};
use crate::tol;

/// Default cap on the single-qudit dimension for closed-form work.
pub const MAX_DIM: usize = 64;

/// Dimension of one qudit, d ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_max(d, MAX_DIM)
    }

    /// Same as [`Dim::new`] with a caller-chosen upper bound.
    pub fn with_max(d: usize, max: usize) -> Result<Self> {
        if d < 2 || d > max {
            return Err(Error::DimensionOutOfRange { d, min: 2, max });
        }
        Ok(Dim(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// ω_d^k where ω_d = exp(2πi/d).
    pub fn omega(self, k: i64) -> C64 {
        root_of_unity(self.0, k)
    }

    /// a ⊕ b (sum modulo d).
    pub fn add(self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }

    /// a ⊖ b (difference modulo d).
    pub fn sub(self, a: usize, b: usize) -> usize {
        (a + self.0 - b % self.0) % self.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_normalized(amps: &Array1<C64>, tolerance: f64) -> Result<()> {
    let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let dev = (norm_sq - 1.0).abs();
    if dev > tolerance {
        return Err(Error::NotNormalized(dev));
    }
    Ok(())
}

/// Pure single-qudit state |φ⟩ = Σ_j α_j |j⟩, normalized.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Array1<C64>,
    d: Dim,
}

impl PureState {
    pub fn new(amps: Array1<C64>) -> Result<Self> {
        Self::with_tolerance(amps, tol::CONSTRUCTION)
    }

    pub fn with_tolerance(amps: Array1<C64>, tolerance: f64) -> Result<Self> {
        let d = Dim::new(amps.len())?;
        check_normalized(&amps, tolerance)?;
        Ok(Self { amps, d })
    }

    /// Computational basis state |j⟩.
    pub fn basis_state(d: Dim, j: usize) -> Result<Self> {
        if j >= d.get() {
            return Err(Error::ParameterOutOfRange(format!(
                "basis index {j} out of range for d = {d}"
            )));
        }
        let mut amps = Array1::zeros(d.get());
        amps[j] = C64::new(1.0, 0.0);
        Ok(Self { amps, d })
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn amp(&self, j: usize) -> C64 {
        self.amps[j]
    }
}

/// Schmidt coefficients γ of the pure two-qudit channel state Σ_k γ_k |kk⟩.
///
/// Complex coefficients are accepted; every analytic expression in the crate
/// handles them. Real nonnegative γ is the canonical Schmidt form and the
/// default produced by the samplers.
#[derive(Debug, Clone)]
pub struct SchmidtChannel {
    gamma: Array1<C64>,
    d: Dim,
}

impl SchmidtChannel {
    pub fn new(gamma: Array1<C64>) -> Result<Self> {
        Self::with_tolerance(gamma, tol::CONSTRUCTION)
    }

    pub fn with_tolerance(gamma: Array1<C64>, tolerance: f64) -> Result<Self> {
        let d = Dim::new(gamma.len())?;
        check_normalized(&gamma, tolerance)?;
        Ok(Self { gamma, d })
    }

    /// Maximally entangled channel, γ_k = 1/√d.
    pub fn maximally_entangled(d: Dim) -> Self {
        let g = 1.0 / (d.get() as f64).sqrt();
        Self {
            gamma: Array1::from_elem(d.get(), C64::new(g, 0.0)),
            d,
        }
    }

    pub fn from_real(gamma: &[f64]) -> Result<Self> {
        Self::new(gamma.iter().map(|&g| C64::new(g, 0.0)).collect())
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn gamma(&self) -> &Array1<C64> {
        &self.gamma
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.gamma[k]
    }

    /// Entanglement entropy of the channel state, normalized to log d so the
    /// result lies in [0, 1]; the 0·log 0 terms are taken as 0 by continuity.
    pub fn entanglement_entropy(&self) -> f64 {
        let mut s = 0.0;
        for g in &self.gamma {
            let p = g.norm_sqr();
            if p > 0.0 {
                s -= p * p.ln();
            }
        }
        s / (self.d.get() as f64).ln()
    }

    /// Whether γ is the maximally entangled vector 1/√d, entrywise within tol.
    pub fn is_maximally_entangled(&self, tolerance: f64) -> bool {
        let g = 1.0 / (self.d.get() as f64).sqrt();
        self.gamma
            .iter()
            .all(|z| (z - C64::new(g, 0.0)).norm() <= tolerance)
    }
}
