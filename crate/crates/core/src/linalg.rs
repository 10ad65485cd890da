//! Dense complex linear-algebra helpers.
//!
//! Everything here operates on `ndarray` arrays of `Complex64`. Matrices stay
//! small (at most d³×d³ with d ≤ 10), so all routines are straightforward
//! dense loops.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;

pub const TAU: f64 = std::f64::consts::TAU;

/// exp(2πik/n) with the exponent reduced modulo n first, so `k = 0` is exact.
pub fn root_of_unity(n: usize, k: i64) -> C64 {
    let k = k.rem_euclid(n as i64);
    if k == 0 {
        C64::new(1.0, 0.0)
    } else {
        C64::from_polar(1.0, TAU * k as f64 / n as f64)
    }
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[[j, i]].conj())
}

/// Outer product v v†.
pub fn outer(v: &Array1<C64>) -> Array2<C64> {
    let n = v.len();
    Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj())
}

pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b)
}

pub fn trace(a: &Array2<C64>) -> C64 {
    (0..a.nrows()).map(|i| a[[i, i]]).sum()
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest |a[i,j] − conj(a[j,i])| over all entries.
pub fn hermiticity_error(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Deterministic pairwise summation; the result does not depend on how the
/// slice was produced (worker count, chunking), only on its order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// Works on the real-symmetric embedding [[X, −Y], [Y, X]] of H = X + iY,
/// whose spectrum is that of H doubled, and runs cyclic Jacobi sweeps on it.
pub fn min_eigenvalue_hermitian(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = a[[i, j]];
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    jacobi_min_eigenvalue(&mut s, m)
}

fn jacobi_min_eigenvalue(s: &mut [f64], n: usize) -> f64 {
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(s[i * n + j].abs());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q * n + q] - s[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = s[k * n + p];
                    let akq = s[k * n + q];
                    s[k * n + p] = c * akp - sn * akq;
                    s[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = s[p * n + k];
                    let aqk = s[q * n + k];
                    s[p * n + k] = c * apk - sn * aqk;
                    s[q * n + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i * n + i]).fold(f64::INFINITY, f64::min)
}

/// Unit-norm complex vector of independent standard Gaussians.
pub fn random_state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array1<C64> {
    let mut v = Array1::zeros(n);
    loop {
        for x in v.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *x = C64::new(re, im);
        }
        let norm = v.iter().map(|z: &C64| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-100 {
            v.mapv_inplace(|z| z / norm);
            return v;
        }
    }
}

/// Haar-distributed unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array2<C64> {
    let mut cols: Vec<Array1<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = Array1::<C64>::zeros(n);
        for x in v.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *x = C64::new(re, im);
        }
        for c in &cols {
            let overlap: C64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c.iter()) {
                *x -= overlap * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.mapv_inplace(|z| z / norm);
            cols.push(v);
        }
    }
    let mut u = Array2::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            u[[i, j]] = c[i];
        }
    }
    u
}

/// Random density matrix G G† / tr(G G†) with Gaussian G.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array2<C64> {
    let g = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let m = matmul(&g, &dagger(&g));
    let t = trace(&m).re;
    m.mapv(|z| z / t)
}
