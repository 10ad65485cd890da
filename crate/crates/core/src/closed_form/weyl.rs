//! The two Weyl-route evaluations of the noisy average fidelity.

use ndarray::Array2;
use num_complex::Complex64;

use crate::basis::MeasurementBasis;
use crate::error::{Error, Result};
use crate::noise::WeylCoefficients;
use crate::state::{Dim, SchmidtChannel};

/// Average fidelity from the squared-coefficient matrices of the three
/// channels (input, Alice's channel qudit, Bob's channel qudit), by the
/// direct sum
///
/// ⟨F⟩ = (1/(d+1)) {1 + (1/d) Σ β_jμ β*_kμ ω^{(k−j)(μ+p₁+p₂+p₃)}
///        γ_{k⊕ν⊕q₂} γ*_{j⊕ν⊕q₂} a²_{p₁q₁} b²_{p₂q₂} c²_{p₃q₃} δ_{q₂,q₁⊕q₃}}.
///
/// The delta is hoisted (q₂ is never looped over) and zero channel entries
/// are skipped; otherwise the nested sum is evaluated literally. Coefficient
/// matrices must come from Weyl-form channels — amplitude damping has none.
pub fn fidelity_weyl_raw(
    basis: &MeasurementBasis,
    gamma: &SchmidtChannel,
    a_sq: &Array2<f64>,
    b_sq: &Array2<f64>,
    c_sq: &Array2<f64>,
) -> Result<f64> {
    let d = basis.dim();
    let n = d.get();
    if gamma.dim() != d {
        return Err(Error::DimensionMismatch(
            "channel dimension differs from basis".into(),
        ));
    }
    for m in [a_sq, b_sq, c_sq] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(
                "coefficient matrix must be d×d".into(),
            ));
        }
    }

    // Channel part: weight w[P][q2] accumulated over the six channel indices
    // with P = p1 + p2 + p3 (mod d) and the delta fixing q2 = q1 ⊕ q3.
    let mut w = vec![vec![0.0f64; n]; n];
    for p1 in 0..n {
        for q1 in 0..n {
            let a2 = a_sq[[p1, q1]];
            if a2 == 0.0 {
                continue;
            }
            for p3 in 0..n {
                for q3 in 0..n {
                    let c2 = c_sq[[p3, q3]];
                    if c2 == 0.0 {
                        continue;
                    }
                    let q2 = d.add(q1, q3);
                    for p2 in 0..n {
                        let b2 = b_sq[[p2, q2]];
                        if b2 == 0.0 {
                            continue;
                        }
                        w[(p1 + p2 + p3) % n][q2] += a2 * b2 * c2;
                    }
                }
            }
        }
    }

    // State part for each (P, q2), evaluated literally.
    let mut s = 0.0f64;
    for (big_p, row) in w.iter().enumerate() {
        for (q2, &weight) in row.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let mut t = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    let mut gpair = Complex64::new(0.0, 0.0);
                    for nu in 0..n {
                        let shift = d.add(nu, q2);
                        gpair +=
                            gamma.coeff(d.add(k, shift)) * gamma.coeff(d.add(j, shift)).conj();
                    }
                    let kj = k as i64 - j as i64;
                    for mu in 0..n {
                        t += basis.entry(j, mu)
                            * basis.entry(k, mu).conj()
                            * d.omega(kj * (mu + big_p) as i64)
                            * gpair;
                    }
                }
            }
            s += weight * t.re;
        }
    }

    let dd = n as f64;
    Ok((1.0 + s / dd) / (dd + 1.0))
}

/// Average fidelity as the closed polynomial in the region coefficients of
/// the three channels, with the channel/basis dependence condensed into f_Q
/// and f̃. Coefficients follow the (input, Alice, Bob) = (a, b, c) order.
pub fn fidelity_weyl_closed(
    d: Dim,
    f_q: f64,
    tilde_f: f64,
    a: &WeylCoefficients,
    b: &WeylCoefficients,
    c: &WeylCoefficients,
) -> f64 {
    let dd = d.get() as f64;
    let (a0, af, ap, ac) = a.squares();
    let (b0, bf, bp, bc) = b.squares();
    let (c0, cf, cp, cc) = c.squares();

    let unital = bp * (a0 * c0 + (dd - 1.0) * af * cf)
        + (b0 + (dd - 2.0) * bp)
            * (ap * c0 + a0 * cp + (dd - 1.0) * (af * cc + ac * cf))
        + ((dd - 2.0) * b0 + (dd * dd - 3.0 * dd + 3.0) * bp)
            * (ap * cp + (dd - 1.0) * ac * cc);

    let flip = ((dd - 2.0) * bf + (dd * dd - 3.0 * dd + 3.0) * bc)
        * (ap * cc + ac * cp + (dd - 2.0) * ac * cc)
        + bc * (af * c0 + a0 * cf + (dd - 2.0) * af * cf)
        + (bf + (dd - 2.0) * bc)
            * (ac * c0 + a0 * cc + af * cp + ap * cf + (dd - 2.0) * (af * cc + ac * cf));

    let coherent = (b0 - bp)
        * ((a0 - ap) * (c0 - cp) + (dd - 1.0) * (af - ac) * (cf - cc))
        * (1.0 + (dd + 1.0) * f_q);

    let shifted = (bf - bc)
        * ((a0 - ap) * (cf - cc) + (af - ac) * (c0 - cp) + (dd - 2.0) * (af - ac) * (cf - cc))
        * tilde_f;

    (1.0 + dd * unital + dd * (dd - 1.0) * flip + coherent + shifted) / (dd + 1.0)
}
