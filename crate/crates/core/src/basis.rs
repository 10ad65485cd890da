//! Weyl operators and the generalized Bell measurement basis.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{random_unitary, C64};
use crate::state::Dim;
use crate::tol;

/// Label (m, n) of a Weyl operator or Bell-basis element, both reduced mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    pub m: usize,
    pub n: usize,
}

impl WeylIndex {
    pub fn new(d: Dim, m: usize, n: usize) -> Self {
        Self {
            m: m % d.get(),
            n: n % d.get(),
        }
    }

    /// All d² indices in (m, n)-lexicographic order.
    pub fn all(d: Dim) -> impl Iterator<Item = WeylIndex> {
        let n = d.get();
        (0..n).flat_map(move |m| (0..n).map(move |k| WeylIndex { m, n: k }))
    }
}

/// Weyl operator U_mn = Σ_j ω_d^{jm} |j⟩⟨j⊕n|.
///
/// The d² of them are unitary, pairwise Hilbert–Schmidt orthogonal, and span
/// the d×d matrix space; for d = 2 they reduce to the Pauli set.
pub fn weyl_operator(d: Dim, idx: WeylIndex) -> Array2<C64> {
    let n = d.get();
    let mut u = Array2::zeros((n, n));
    for j in 0..n {
        u[[j, d.add(j, idx.n)]] = d.omega((j * idx.m) as i64);
    }
    u
}

/// Measurement basis for Alice's joint measurement.
///
/// Stores the d×d coefficient matrix β; element (m, n) of the basis is the
/// two-qudit state Σ_k β_{km} |k, k⊕n⟩. The columns of β are orthonormal,
/// which makes the d² basis states orthonormal as well.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    beta: Array2<C64>,
    d: Dim,
    phases: Option<Vec<f64>>,
}

impl MeasurementBasis {
    /// Standard maximally entangled basis, β_km = ω_d^{km}/√d.
    pub fn max_entangled(d: Dim) -> Self {
        let n = d.get();
        let s = 1.0 / (n as f64).sqrt();
        let beta = Array2::from_shape_fn((n, n), |(k, m)| d.omega((k * m) as i64) * s);
        Self {
            beta,
            d,
            phases: None,
        }
    }

    /// Maximally entangled basis with row phases: β_jm = e^{iφ_j} ω_d^{jm}/√d,
    /// with φ_0 fixed to 0 and `phases` supplying φ_1..φ_{d−1}.
    pub fn phased(d: Dim, phases: &[f64]) -> Result<Self> {
        let n = d.get();
        if phases.len() != n - 1 {
            return Err(Error::ParameterOutOfRange(format!(
                "expected {} phases for d = {}, got {}",
                n - 1,
                n,
                phases.len()
            )));
        }
        let s = 1.0 / (n as f64).sqrt();
        let beta = Array2::from_shape_fn((n, n), |(j, m)| {
            let phase = if j == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::from_polar(1.0, phases[j - 1])
            };
            phase * d.omega((j * m) as i64) * s
        });
        Ok(Self {
            beta,
            d,
            phases: Some(phases.to_vec()),
        })
    }

    /// Arbitrary coefficient matrix; rejected unless the columns are
    /// orthonormal within the construction tolerance.
    pub fn from_matrix(beta: Array2<C64>) -> Result<Self> {
        Self::from_matrix_with_tolerance(beta, tol::CONSTRUCTION)
    }

    pub fn from_matrix_with_tolerance(beta: Array2<C64>, tolerance: f64) -> Result<Self> {
        if beta.nrows() != beta.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "basis matrix must be square, got {}×{}",
                beta.nrows(),
                beta.ncols()
            )));
        }
        let d = Dim::new(beta.nrows())?;
        let dev = orthonormality_error(&beta);
        if dev > tolerance {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self {
            beta,
            d,
            phases: None,
        })
    }

    /// Haar-random unitary coefficient matrix (useful for cross-checks).
    pub fn random<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> Self {
        Self {
            beta: random_unitary(d.get(), rng),
            d,
            phases: None,
        }
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn beta(&self) -> &Array2<C64> {
        &self.beta
    }

    /// β_{km}.
    pub fn entry(&self, k: usize, m: usize) -> C64 {
        self.beta[[k, m]]
    }

    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }

    /// Whether β equals the plain Fourier matrix entrywise within `tolerance`.
    pub fn is_max_entangled(&self, tolerance: f64) -> bool {
        let n = self.d.get();
        let s = 1.0 / (n as f64).sqrt();
        for k in 0..n {
            for m in 0..n {
                if (self.beta[[k, m]] - self.d.omega((k * m) as i64) * s).norm() > tolerance {
                    return false;
                }
            }
        }
        true
    }

    /// Basis element Φ_mn = Σ_k β_{km} |k, k⊕n⟩ as a length-d² vector over
    /// the two measured registers (I, A), index k·d + a.
    pub fn bell_state(&self, idx: WeylIndex) -> Array1<C64> {
        let n = self.d.get();
        let mut v = Array1::zeros(n * n);
        for k in 0..n {
            v[k * n + self.d.add(k, idx.n)] = self.beta[[k, idx.m]];
        }
        v
    }
}

/// Largest deviation of β†β from the identity.
pub fn orthonormality_error(beta: &Array2<C64>) -> f64 {
    let n = beta.ncols();
    let mut worst = 0.0f64;
    for m in 0..n {
        for mp in 0..n {
            let dot: C64 = (0..beta.nrows())
                .map(|k| beta[[k, m]] * beta[[k, mp]].conj())
                .sum();
            let want = if m == mp { 1.0 } else { 0.0 };
            worst = worst.max((dot - C64::new(want, 0.0)).norm());
        }
    }
    worst
}
