//! Computational-basis evaluation of the noisy average fidelity.
//!
//! Works for arbitrary Kraus channels on the three qudits, in particular
//! amplitude damping, which has no Weyl-coefficient form. The double-Kraus
//! sum is contracted through per-channel pair tensors
//! T[x, u, y, v] = Σ_k E_k[x, u] E_k*[y, v] so the remaining explicit sum has
//! seven free indices.

use ndarray::Array2;

use crate::basis::MeasurementBasis;
use crate::linalg::C64;
use crate::noise::KrausChannel;
use crate::state::SchmidtChannel;

/// Pair tensor Σ_k E_k[x, u] ⊗ conj(E_k[y, v]), flattened to (x·d+u, y·d+v).
fn pair_tensor(channel: &KrausChannel, n: usize) -> Array2<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut t = Array2::zeros((n * n, n * n));
    for e in channel.operators() {
        for x in 0..n {
            for u in 0..n {
                let exu = e[[x, u]];
                if exu == zero {
                    continue;
                }
                for y in 0..n {
                    for v in 0..n {
                        let eyv = e[[y, v]];
                        if eyv == zero {
                            continue;
                        }
                        t[[x * n + u, y * n + v]] += exu * eyv.conj();
                    }
                }
            }
        }
    }
    t
}

/// Average teleportation fidelity with channels `chan_input`, `chan_alice`,
/// `chan_bob` acting on qudits (I, A, B), for a pure Schmidt-form channel
/// state and arbitrary measurement basis:
///
/// ⟨F⟩ = (1/(d(d+1))) Σ β_jμ β*_kμ γ_n₂ γ*_p₂ a⁽ᵏ¹⁾_{k,n₁} b⁽ᵏ²⁾_{k⊕ν,n₂}
///        b⁽ᵏ²⁾*_{j⊕ν,p₂} c⁽ᵏ³⁾*_{m⊕ν,p₂}
///        [a⁽ᵏ¹⁾*_{j,n₁} c⁽ᵏ³⁾_{m⊕ν,n₂} + ω^{μ(n₁−m)} a⁽ᵏ¹⁾*_{j,m} c⁽ᵏ³⁾_{n₁⊕ν,n₂}].
pub fn fidelity_computational(
    basis: &MeasurementBasis,
    gamma: &SchmidtChannel,
    chan_input: &KrausChannel,
    chan_alice: &KrausChannel,
    chan_bob: &KrausChannel,
) -> f64 {
    let d = basis.dim();
    let n = d.get();
    let zero = C64::new(0.0, 0.0);

    let ta = pair_tensor(chan_input, n);
    let tb = pair_tensor(chan_alice, n);
    let tc = pair_tensor(chan_bob, n);

    // W[j, k, s] = Σ_μ β_jμ β*_kμ ω^{μ s}
    let mut w = vec![zero; n * n * n];
    for j in 0..n {
        for k in 0..n {
            for s in 0..n {
                let mut acc = zero;
                for mu in 0..n {
                    acc += basis.entry(j, mu)
                        * basis.entry(k, mu).conj()
                        * d.omega((mu * s) as i64);
                }
                w[(j * n + k) * n + s] = acc;
            }
        }
    }

    // Traces of the pair tensors used by the first bracket term:
    // atr[k, j] = Σ_{n₁} Ta[k,n₁; j,n₁],  ctr[n₂, p₂] = Σ_u Tc[u,n₂; u,p₂]
    let mut atr = vec![zero; n * n];
    for k in 0..n {
        for j in 0..n {
            let mut acc = zero;
            for n1 in 0..n {
                acc += ta[[k * n + n1, j * n + n1]];
            }
            atr[k * n + j] = acc;
        }
    }
    let mut ctr = vec![zero; n * n];
    for n2 in 0..n {
        for p2 in 0..n {
            let mut acc = zero;
            for u in 0..n {
                acc += tc[[u * n + n2, u * n + p2]];
            }
            ctr[n2 * n + p2] = acc;
        }
    }

    let g = |k: usize| gamma.coeff(k);

    // First bracket term: no ω factor, a-pair diagonal in n₁, c-pair diagonal
    // in its first index summed over m.
    let mut term1 = zero;
    for j in 0..n {
        for k in 0..n {
            let wjk0 = w[(j * n + k) * n];
            if wjk0 == zero {
                continue;
            }
            let at = atr[k * n + j];
            if at == zero {
                continue;
            }
            for nu in 0..n {
                let ka = d.add(k, nu);
                let ja = d.add(j, nu);
                for n2 in 0..n {
                    let b_row = ka * n + n2;
                    let gn2 = g(n2);
                    for p2 in 0..n {
                        let tb_v = tb[[b_row, ja * n + p2]];
                        if tb_v == zero {
                            continue;
                        }
                        term1 += wjk0 * at * gn2 * g(p2).conj() * tb_v * ctr[n2 * n + p2];
                    }
                }
            }
        }
    }

    // Second bracket term: seven free indices (j, k, m, ν, n₁, n₂, p₂).
    let mut term2 = zero;
    for j in 0..n {
        for k in 0..n {
            for n1 in 0..n {
                for m in 0..n {
                    let a_pair = ta[[k * n + n1, j * n + m]];
                    if a_pair == zero {
                        continue;
                    }
                    let wjk = w[(j * n + k) * n + d.sub(n1, m)];
                    if wjk == zero {
                        continue;
                    }
                    let front = wjk * a_pair;
                    for nu in 0..n {
                        let ka = d.add(k, nu);
                        let ja = d.add(j, nu);
                        let ma = d.add(m, nu);
                        let n1a = d.add(n1, nu);
                        for n2 in 0..n {
                            let gn2 = g(n2);
                            let b_row = ka * n + n2;
                            let c_row = n1a * n + n2;
                            for p2 in 0..n {
                                let tb_v = tb[[b_row, ja * n + p2]];
                                if tb_v == zero {
                                    continue;
                                }
                                term2 += front
                                    * gn2
                                    * g(p2).conj()
                                    * tb_v
                                    * tc[[c_row, ma * n + p2]];
                            }
                        }
                    }
                }
            }
        }
    }

    let dd = n as f64;
    ((term1 + term2) / (dd * (dd + 1.0))).re
}
