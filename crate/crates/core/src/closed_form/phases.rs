//! Measurement-phase optimization for single-qudit phase-flip noise.
//!
//! With maximal entanglement in channel and basis, adding phases φ_j to the
//! basis rows turns the fidelity into a cosine sum over the (d−1)-torus.
//! Below the threshold p* = (d−1)/d the optimum is the plain basis; above it
//! flipping to equally spaced phases recovers part of the fidelity.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::state::Dim;

/// Fidelity under single-qudit phase-flip noise with fraction p and a
/// maximally entangled phased basis:
///
/// (2/(d+1)) {1 + (1/d)(1 − pd/(d−1)) [Σ_k cos φ_k + Σ_{k>l} cos(φ_l − φ_k)]}
///
/// `phases` supplies φ_1..φ_{d−1} (φ_0 = 0).
pub fn phase_fidelity(d: Dim, p: f64, phases: &[f64]) -> f64 {
    let n = d.get();
    assert_eq!(phases.len(), n - 1, "expected d−1 phases");
    let dd = n as f64;
    let mut g = 0.0;
    for (k, &ph) in phases.iter().enumerate() {
        g += ph.cos();
        for &ph_l in &phases[..k] {
            g += (ph_l - ph).cos();
        }
    }
    2.0 / (dd + 1.0) * (1.0 + (1.0 - p * dd / (dd - 1.0)) * g / dd)
}

/// Maximize [`phase_fidelity`] over the (d−1)-torus by multi-start
/// Nelder–Mead with a fixed internal seed, so results are reproducible.
///
/// Returns the canonical optimizer (phases wrapped into [0, 2π) and sorted
/// ascending, which quotients out the permutation and conjugation
/// degeneracies) together with the optimal fidelity.
pub fn optimize_phases(d: Dim, p: f64) -> (Vec<f64>, f64) {
    let n = d.get() - 1;
    let objective = |x: &[f64]| -phase_fidelity(d, p, x);

    let mut rng = ChaCha12Rng::seed_from_u64(0x0f1d_e11e);
    let starts = (8 * n).max(8);
    let mut best_x = vec![0.0; n];
    let mut best_f = objective(&best_x);
    for _ in 0..starts {
        let x0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
        let (x, f) = nelder_mead(&objective, &x0, 1.0, 2000, 1e-12);
        if f < best_f {
            best_f = f;
            best_x = x;
        }
    }
    // polish the winner from a tight simplex
    let (x, f) = nelder_mead(&objective, &best_x, 1e-4, 2000, 1e-15);
    if f < best_f {
        best_f = f;
        best_x = x;
    }

    let mut canonical: Vec<f64> = best_x.iter().map(|&x| x.rem_euclid(TAU)).collect();
    // values within numerical noise of a full turn are the same as zero
    for x in canonical.iter_mut() {
        if TAU - *x < 1e-9 {
            *x = 0.0;
        }
    }
    canonical.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (canonical, -best_f)
}

/// Plain Nelder–Mead on R^n; good enough for smooth periodic objectives of a
/// few variables. Returns the best vertex and its value.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if (values[worst] - values[best]).abs() < tol {
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for (i, v) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for (c, &x) in centroid.iter_mut().zip(v.iter()) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(simplex[worst].iter())
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let reflected = blend(alpha);
        let f_r = f(&reflected);
        if f_r < values[best] {
            let expanded = blend(gamma);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
        } else if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
        } else {
            let contracted = blend(-rho);
            let f_c = f(&contracted);
            if f_c < values[worst] {
                simplex[worst] = contracted;
                values[worst] = f_c;
            } else {
                // shrink toward the best vertex
                let best_v = simplex[best].clone();
                for (i, v) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for (x, &b) in v.iter_mut().zip(best_v.iter()) {
                        *x = b + sigma * (*x - b);
                    }
                    values[i] = f(v);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Piecewise optimum of the phased fidelity: 1 − dp/(d+1) below the
/// threshold p* = (d−1)/d, (dp + d − 1)/(d² − 1) above it.
pub fn optimal_phase_fidelity(d: Dim, p: f64) -> f64 {
    let dd = d.get() as f64;
    let below = 1.0 - dd * p / (dd + 1.0);
    let above = (dd * p + dd - 1.0) / (dd * dd - 1.0);
    below.max(above)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::single_qudit_fidelity;
    use crate::basis::MeasurementBasis;
    use crate::noise::NoiseKind;
    use crate::state::SchmidtChannel;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn zero_phases_reproduce_plain_fidelity() {
        for d in 2..=6usize {
            let dd = d as f64;
            for p in [0.0, 0.3, 0.9] {
                let f = phase_fidelity(dim(d), p, &vec![0.0; d - 1]);
                assert!((f - (1.0 - dd * p / (dd + 1.0))).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phase_formula_matches_general_machinery() {
        // the cosine-sum formula must agree with the single-qudit phase-flip
        // fidelity evaluated on an explicitly phased basis
        let d = dim(3);
        let gamma = SchmidtChannel::maximally_entangled(d);
        for phases in [[0.7, 2.1], [3.3, 5.9], [TAU / 3.0, 2.0 * TAU / 3.0]] {
            let basis = MeasurementBasis::phased(d, &phases).unwrap();
            for p in [0.2, 0.8] {
                let direct =
                    single_qudit_fidelity(NoiseKind::DPhaseFlip, p, d, &basis, &gamma).unwrap();
                let formula = phase_fidelity(d, p, &phases);
                assert!(
                    (direct - formula).abs() < 1e-12,
                    "phases={phases:?} p={p}: {direct} vs {formula}"
                );
            }
        }
    }

    #[test]
    fn optimizer_below_threshold_keeps_zero_phases() {
        let d = dim(3);
        let p = 0.5; // p* = 2/3
        let (phases, value) = optimize_phases(d, p);
        assert!((value - (1.0 - 3.0 * p / 4.0)).abs() < 1e-9);
        for ph in phases {
            assert!(ph < 1e-3 || TAU - ph < 1e-3, "phase {ph} not ~0");
        }
    }

    #[test]
    fn optimizer_above_threshold_finds_balanced_phases() {
        let d = dim(2);
        let (phases, value) = optimize_phases(d, 0.9);
        assert!((value - (2.0 * 0.9 + 1.0) / 3.0).abs() < 1e-9);
        assert!((phases[0] - std::f64::consts::PI).abs() < 1e-4);

        let d = dim(3);
        let (phases, value) = optimize_phases(d, 0.9);
        assert!((value - optimal_phase_fidelity(d, 0.9)).abs() < 1e-9);
        assert!((phases[0] - TAU / 3.0).abs() < 1e-3);
        assert!((phases[1] - 2.0 * TAU / 3.0).abs() < 1e-3);
    }

    #[test]
    fn optimum_beats_random_phase_choices() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let d = dim(4);
        for p in [0.3, 0.85] {
            let (_, value) = optimize_phases(d, p);
            for _ in 0..100 {
                let phases: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
                assert!(phase_fidelity(d, p, &phases) <= value + 1e-9);
            }
        }
    }
}
