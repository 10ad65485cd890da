//! Density matrices on one to three qudit registers.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_error, min_eigenvalue_hermitian, outer, C64};
use crate::state::Dim;
use crate::tol;

/// Hermitian matrix on `registers` qudits of dimension d each.
///
/// Unit trace is enforced at construction unless the value is explicitly
/// created as unnormalized (post-measurement states carry their outcome
/// probability in the trace).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: Array2<C64>,
    d: Dim,
    registers: usize,
    normalized: bool,
}

impl DensityMatrix {
    pub fn new(mat: Array2<C64>, d: Dim, registers: usize) -> Result<Self> {
        let rho = Self::new_unnormalized(mat, d, registers)?;
        let t = rho.trace();
        let dev = (t - 1.0).abs();
        if dev > tol::DERIVED {
            return Err(Error::NotUnitTrace(dev));
        }
        Ok(Self {
            normalized: true,
            ..rho
        })
    }

    /// Hermiticity is still required; the trace may be anything.
    pub fn new_unnormalized(mat: Array2<C64>, d: Dim, registers: usize) -> Result<Self> {
        if registers == 0 || registers > 3 {
            return Err(Error::InvalidRegisterSubset(format!(
                "register count {registers} not in 1..=3"
            )));
        }
        let dim_total = d.get().pow(registers as u32);
        if mat.nrows() != dim_total || mat.ncols() != dim_total {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim_total}×{dim_total} matrix for d = {d}, r = {registers}; got {}×{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = hermiticity_error(&mat);
        if dev > tol::DERIVED {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            mat,
            d,
            registers,
            normalized: false,
        })
    }

    pub(crate) fn from_parts_unchecked(
        mat: Array2<C64>,
        d: Dim,
        registers: usize,
        normalized: bool,
    ) -> Self {
        Self {
            mat,
            d,
            registers,
            normalized,
        }
    }

    /// |v⟩⟨v| for a normalized state vector on the given registers.
    pub fn from_pure(v: &Array1<C64>, d: Dim, registers: usize) -> Result<Self> {
        Self::new(outer(v), d, registers)
    }

    pub fn maximally_mixed(d: Dim, registers: usize) -> Self {
        let dim_total = d.get().pow(registers as u32);
        let x = C64::new(1.0 / dim_total as f64, 0.0);
        let mut mat = Array2::zeros((dim_total, dim_total));
        for i in 0..dim_total {
            mat[[i, i]] = x;
        }
        Self {
            mat,
            d,
            registers,
            normalized: true,
        }
    }

    /// ρ_a ⊗ ρ_b, registers concatenated in order.
    pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::DimensionMismatch(format!(
                "tensor factors have d = {} and d = {}",
                a.d, b.d
            )));
        }
        let registers = a.registers + b.registers;
        if registers > 3 {
            return Err(Error::InvalidRegisterSubset(format!(
                "register count {registers} not in 1..=3"
            )));
        }
        Ok(Self {
            mat: crate::linalg::kron(&a.mat, &b.mat),
            d: a.d,
            registers,
            normalized: a.normalized && b.normalized,
        })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        (0..self.mat.nrows()).map(|i| self.mat[[i, i]].re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_hermitian(&self.mat)
    }

    /// Partial trace keeping the listed registers (0-based, strictly
    /// increasing). Register order among the kept ones is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() || keep.len() >= self.registers {
            if keep.len() == self.registers && keep.iter().copied().eq(0..self.registers) {
                return Ok(self.clone());
            }
            return Err(Error::InvalidRegisterSubset(format!(
                "keep = {keep:?} with {} registers",
                self.registers
            )));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= self.registers {
            return Err(Error::InvalidRegisterSubset(format!(
                "keep = {keep:?} must be strictly increasing and within range"
            )));
        }

        let d = self.d.get();
        let traced: Vec<usize> = (0..self.registers).filter(|r| !keep.contains(r)).collect();
        let dim_keep = d.pow(keep.len() as u32);
        let dim_traced = d.pow(traced.len() as u32);

        // Stride of each register in the original flat index (big-endian).
        let stride = |r: usize| d.pow((self.registers - 1 - r) as u32);

        // Flat source index from (kept multi-index, traced multi-index).
        let compose = |ki: usize, ti: usize| -> usize {
            let mut idx = 0;
            let mut k = ki;
            for (pos, &r) in keep.iter().enumerate().rev() {
                let _ = pos;
                idx += (k % d) * stride(r);
                k /= d;
            }
            let mut t = ti;
            for &r in traced.iter().rev() {
                idx += (t % d) * stride(r);
                t /= d;
            }
            idx
        };

        let mut out = Array2::zeros((dim_keep, dim_keep));
        for ki in 0..dim_keep {
            for kj in 0..dim_keep {
                let mut acc = C64::new(0.0, 0.0);
                for ti in 0..dim_traced {
                    acc += self.mat[[compose(ki, ti), compose(kj, ti)]];
                }
                out[[ki, kj]] = acc;
            }
        }
        Ok(DensityMatrix {
            mat: out,
            d: self.d,
            registers: keep.len(),
            normalized: self.normalized,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_density};
    use ndarray::Array1;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let mut v = Array1::zeros(4);
        v[0] = C64::new(s, 0.0);
        v[3] = C64::new(s, 0.0);
        let rho = DensityMatrix::from_pure(&v, dim(2), 2).unwrap();
        for keep in [[0usize], [1usize]] {
            let red = rho.partial_trace(&keep).unwrap();
            let mixed = DensityMatrix::maximally_mixed(dim(2), 1);
            assert!(max_abs_diff(red.matrix(), mixed.matrix()) < 1e-14);
        }
    }

    #[test]
    fn product_state_marginal_recovers_factor() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let d = dim(3);
        let a = DensityMatrix::new(random_density(3, &mut rng), d, 1).unwrap();
        let b = DensityMatrix::new(random_density(3, &mut rng), d, 1).unwrap();
        let ab = DensityMatrix::tensor(&a, &b).unwrap();
        let red = ab.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), a.matrix()) < 1e-12);
        let red_b = ab.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(red_b.matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let d = dim(3);
        let rho = DensityMatrix::new(random_density(27, &mut rng), d, 3).unwrap();
        for keep in [vec![0usize], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
            let red = rho.partial_trace(&keep).unwrap();
            assert!((red.trace() - 1.0).abs() < 1e-12);
            assert!(hermiticity_error(red.matrix()) < 1e-12);
        }
    }

    #[test]
    fn invalid_subsets_rejected() {
        let rho = DensityMatrix::maximally_mixed(dim(2), 2);
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[1, 0]).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(0.5, 0.0);
        m[[1, 1]] = C64::new(0.5, 0.0);
        m[[0, 1]] = C64::new(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(m, dim(2), 1),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn wrong_trace_rejected_unless_flagged() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(0.7, 0.0);
        m[[1, 1]] = C64::new(0.7, 0.0);
        assert!(matches!(
            DensityMatrix::new(m.clone(), dim(2), 1),
            Err(Error::NotUnitTrace(_))
        ));
        let rho = DensityMatrix::new_unnormalized(m, dim(2), 1).unwrap();
        assert!(!rho.is_normalized());
        assert!((rho.trace() - 1.4).abs() < 1e-15);
    }
}
