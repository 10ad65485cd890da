//! Definition-level simulation of the teleportation protocol.
//!
//! One run: Alice holds the input qudit I in state |φ⟩ and shares the channel
//! pair (A, B) with Bob; noise may act on each qudit; Alice projects (I, A)
//! onto a Bell-like basis element Φ_mn; Bob applies the Weyl correction U_mn.
//! The mean fidelity over outcomes is F = Σ_mn ⟨φ| ρ_mn |φ⟩ with ρ_mn kept
//! unnormalized (its trace is the outcome probability), so zero-probability
//! outcomes contribute zero without any 0/0.
//!
//! This module is the ground truth the closed forms are validated against.
//! Everything is computed from dense 3-register density matrices; the cost
//! cap keeps them below d⁶ entries.

use ndarray::{Array1, Array2};

use crate::basis::MeasurementBasis;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::noise::{apply_channel, kraus_operators, ScenarioSpec};
use crate::state::{Dim, PureState, SchmidtChannel};

/// Cap on d for 3-register simulation (d⁶ matrix entries).
pub const DIM_CAP: usize = 10;

pub(crate) fn check_dim(d: Dim) -> Result<()> {
    if d.get() > DIM_CAP {
        return Err(Error::OracleDimensionCap {
            d: d.get(),
            cap: DIM_CAP,
        });
    }
    Ok(())
}

/// One measurement outcome (m, n) with its probability and the fidelity of
/// Bob's corrected state conditioned on that outcome.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolOutcome {
    pub m: usize,
    pub n: usize,
    pub probability: f64,
    pub conditional_fidelity: f64,
}

/// |φ⟩⟨φ| ⊗ |ψ⟩⟨ψ| on registers (I, A, B) for a Schmidt-form channel state
/// |ψ⟩ = Σ_k γ_k |kk⟩.
pub fn assemble_initial(phi: &PureState, gamma: &SchmidtChannel) -> Result<DensityMatrix> {
    if phi.dim() != gamma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "input state d = {} vs channel d = {}",
            phi.dim(),
            gamma.dim()
        )));
    }
    let d = phi.dim();
    check_dim(d)?;
    let n = d.get();
    let mut v = Array1::zeros(n * n * n);
    for i in 0..n {
        for k in 0..n {
            v[(i * n + k) * n + k] = phi.amp(i) * gamma.coeff(k);
        }
    }
    DensityMatrix::from_pure(&v, d, 3)
}

/// |φ⟩⟨φ| ⊗ ρ_ch for an arbitrary two-register channel state.
pub fn assemble_with_channel(phi: &PureState, rho_ch: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_ch.registers() != 2 {
        return Err(Error::InvalidRegisterSubset(
            "channel state must live on 2 registers".into(),
        ));
    }
    if phi.dim() != rho_ch.dim() {
        return Err(Error::DimensionMismatch(format!(
            "input state d = {} vs channel d = {}",
            phi.dim(),
            rho_ch.dim()
        )));
    }
    check_dim(phi.dim())?;
    let rho_in = DensityMatrix::from_pure(phi.amplitudes(), phi.dim(), 1)?;
    DensityMatrix::tensor(&rho_in, rho_ch)
}

/// Apply each qudit's noise channel to its register of the 3-register state.
pub fn apply_scenario(rho: &DensityMatrix, scenario: &ScenarioSpec) -> Result<DensityMatrix> {
    if rho.registers() != 3 {
        return Err(Error::InvalidRegisterSubset(
            "scenario application expects 3 registers".into(),
        ));
    }
    let mut out = rho.clone();
    for (target, spec) in scenario.specs().iter().enumerate() {
        if spec.is_none() {
            continue;
        }
        let ch = kraus_operators(spec, rho.dim())?;
        out = apply_channel(&out, &ch, target)?;
    }
    Ok(out)
}

/// Run the measurement-and-correction stage on a prepared 3-register state.
///
/// Returns all d² outcomes plus the mean fidelity F = Σ_mn ⟨φ|ρ_mn|φ⟩.
pub fn run_protocol(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
    phi_ref: &PureState,
) -> Result<(Vec<ProtocolOutcome>, f64)> {
    if rho.registers() != 3 {
        return Err(Error::InvalidRegisterSubset(
            "protocol expects 3 registers".into(),
        ));
    }
    let d = rho.dim();
    if basis.dim() != d || phi_ref.dim() != d {
        return Err(Error::DimensionMismatch(
            "basis/reference dimension differs from the state".into(),
        ));
    }
    let n = d.get();
    let mat = rho.matrix();
    let lookup = |i: usize, a: usize, b: usize, j: usize, ap: usize, bp: usize| -> C64 {
        mat[[(i * n + a) * n + b, (j * n + ap) * n + bp]]
    };

    let mut outcomes = Vec::with_capacity(n * n);
    let mut total = 0.0;
    for m in 0..n {
        for nn in 0..n {
            // Bob's unnormalized post-measurement state, traced over (I, A):
            // σ[b, c] = Σ_{k,k'} β_{km} β*_{k'm} ρ[(k', k'⊕n, b), (k, k⊕n, c)]
            let mut sigma = Array2::<C64>::zeros((n, n));
            for k in 0..n {
                let bk = basis.entry(k, m);
                if bk == C64::new(0.0, 0.0) {
                    continue;
                }
                let ka = d.add(k, nn);
                for kp in 0..n {
                    let w = bk * basis.entry(kp, m).conj();
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let kpa = d.add(kp, nn);
                    for b in 0..n {
                        for c in 0..n {
                            sigma[[b, c]] += w * lookup(kp, kpa, b, k, ka, c);
                        }
                    }
                }
            }
            // Correction U_mn: ρ_mn[b, c] = ω^{bm} σ[b⊕n, c⊕n] ω^{-cm}
            let mut prob = 0.0;
            let mut fid_unnorm = C64::new(0.0, 0.0);
            for b in 0..n {
                prob += sigma[[d.add(b, nn), d.add(b, nn)]].re;
            }
            for b in 0..n {
                let wb = d.omega((b * m) as i64) * phi_ref.amp(b).conj();
                for c in 0..n {
                    let wc = d.omega(-((c * m) as i64)) * phi_ref.amp(c);
                    fid_unnorm += wb * wc * sigma[[d.add(b, nn), d.add(c, nn)]];
                }
            }
            let fid_unnorm = fid_unnorm.re;
            total += fid_unnorm;
            let conditional = if prob > 1e-14 { fid_unnorm / prob } else { 0.0 };
            outcomes.push(ProtocolOutcome {
                m,
                n: nn,
                probability: prob,
                conditional_fidelity: conditional,
            });
        }
    }
    Ok((outcomes, total))
}

/// Same contraction as [`run_protocol`], specialized to a product state
/// ρ_I ⊗ ρ_ch so the 3-register matrix is never materialized. Local noise on
/// different registers factors through the tensor product, which makes this
/// exactly equal to the full pipeline; the Monte Carlo driver leans on it.
pub(crate) fn run_protocol_product(
    rho_input: &Array2<C64>,
    rho_channel: &Array2<C64>,
    basis: &MeasurementBasis,
    phi_ref: &PureState,
) -> f64 {
    let d = phi_ref.dim();
    let n = d.get();
    let zero = C64::new(0.0, 0.0);
    let mut total = 0.0;
    let mut sigma = Array2::<C64>::zeros((n, n));
    for m in 0..n {
        for nn in 0..n {
            sigma.fill(zero);
            for k in 0..n {
                let bk = basis.entry(k, m);
                if bk == zero {
                    continue;
                }
                let ka = d.add(k, nn);
                for kp in 0..n {
                    let w = bk * basis.entry(kp, m).conj();
                    if w == zero {
                        continue;
                    }
                    let kpa = d.add(kp, nn);
                    let w = w * rho_input[[kp, k]];
                    for b in 0..n {
                        for c in 0..n {
                            sigma[[b, c]] += w * rho_channel[[kpa * n + b, ka * n + c]];
                        }
                    }
                }
            }
            let mut fid_unnorm = C64::new(0.0, 0.0);
            for b in 0..n {
                let wb = d.omega((b * m) as i64) * phi_ref.amp(b).conj();
                for c in 0..n {
                    let wc = d.omega(-((c * m) as i64)) * phi_ref.amp(c);
                    fid_unnorm += wb * wc * sigma[[d.add(b, nn), d.add(c, nn)]];
                }
            }
            total += fid_unnorm.re;
        }
    }
    total
}

/// Full pipeline for one input state: assemble, apply noise, run the
/// protocol, and return the mean fidelity.
pub fn fidelity_for_input(
    phi: &PureState,
    gamma: &SchmidtChannel,
    basis: &MeasurementBasis,
    scenario: &ScenarioSpec,
) -> Result<f64> {
    let rho = assemble_initial(phi, gamma)?;
    let noisy = apply_scenario(&rho, scenario)?;
    let (_, f) = run_protocol(&noisy, basis, phi)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_abs_diff, outer, random_state_vector};
    use crate::noise::{NoiseKind, NoiseSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    fn random_phi(d: Dim, rng: &mut ChaCha12Rng) -> PureState {
        PureState::new(random_state_vector(d.get(), rng)).unwrap()
    }

    #[test]
    fn assembled_state_is_pure_and_traces_back() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let d = dim(2);
        let phi = PureState::basis_state(d, 0).unwrap();
        let gamma = SchmidtChannel::maximally_entangled(d);
        let rho = assemble_initial(&phi, &gamma).unwrap();
        assert_eq!(rho.registers(), 3);
        assert!((rho.trace() - 1.0).abs() < 1e-14);

        // rank 1: tr(ρ²) = 1
        let sq = crate::linalg::matmul(rho.matrix(), rho.matrix());
        assert!((crate::linalg::trace(&sq).re - 1.0).abs() < 1e-12);

        // partial trace onto the input register returns |φ⟩⟨φ|
        let d3 = dim(3);
        let phi = random_phi(d3, &mut rng);
        let gamma = SchmidtChannel::maximally_entangled(d3);
        let rho = assemble_initial(&phi, &gamma).unwrap();
        let red = rho.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), &outer(phi.amplitudes())) < 1e-13);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let phi = PureState::basis_state(dim(2), 0).unwrap();
        let gamma = SchmidtChannel::maximally_entangled(dim(3));
        assert!(assemble_initial(&phi, &gamma).is_err());
    }

    #[test]
    fn oracle_cap_enforced() {
        let d = Dim::new(11).unwrap();
        let phi = PureState::basis_state(d, 0).unwrap();
        let gamma = SchmidtChannel::maximally_entangled(d);
        assert!(matches!(
            assemble_initial(&phi, &gamma),
            Err(Error::OracleDimensionCap { .. })
        ));
    }

    #[test]
    fn noiseless_scenario_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let d = dim(3);
        let phi = random_phi(d, &mut rng);
        let gamma = SchmidtChannel::maximally_entangled(d);
        let rho = assemble_initial(&phi, &gamma).unwrap();
        let out = apply_scenario(&rho, &ScenarioSpec::noiseless()).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) == 0.0);
    }

    #[test]
    fn full_damping_on_bob_grounds_his_register() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let d = dim(3);
        let phi = random_phi(d, &mut rng);
        let gamma = SchmidtChannel::maximally_entangled(d);
        let rho = assemble_initial(&phi, &gamma).unwrap();
        let scenario = ScenarioSpec::new(
            NoiseSpec::none(),
            NoiseSpec::none(),
            NoiseSpec::new(NoiseKind::AmplitudeDamping, 1.0).unwrap(),
        );
        let out = apply_scenario(&rho, &scenario).unwrap();
        let bob = out.partial_trace(&[2]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((bob.matrix()[[i, j]] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn application_order_across_registers_is_irrelevant() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let d = dim(3);
        let phi = random_phi(d, &mut rng);
        let gamma = SchmidtChannel::maximally_entangled(d);
        let rho = assemble_initial(&phi, &gamma).unwrap();

        let spec_a = NoiseSpec::new(NoiseKind::DitFlip, 0.3).unwrap();
        let spec_b = NoiseSpec::new(NoiseKind::AmplitudeDamping, 0.6).unwrap();
        let ch_a = kraus_operators(&spec_a, d).unwrap();
        let ch_b = kraus_operators(&spec_b, d).unwrap();

        let ab = apply_channel(&apply_channel(&rho, &ch_a, 1).unwrap(), &ch_b, 2).unwrap();
        let ba = apply_channel(&apply_channel(&rho, &ch_b, 2).unwrap(), &ch_a, 1).unwrap();
        assert!(max_abs_diff(ab.matrix(), ba.matrix()) < 1e-12);
    }

    #[test]
    fn noiseless_maximal_protocol_is_perfect() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for dd in [2usize, 3, 5] {
            let d = dim(dd);
            let phi = random_phi(d, &mut rng);
            let gamma = SchmidtChannel::maximally_entangled(d);
            let basis = MeasurementBasis::max_entangled(d);
            let rho = assemble_initial(&phi, &gamma).unwrap();
            let (outcomes, f) = run_protocol(&rho, &basis, &phi).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "d={dd}: F={f}");
            for o in &outcomes {
                assert!((o.probability - 1.0 / (dd * dd) as f64).abs() < 1e-12);
                assert!((o.conditional_fidelity - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one_under_noise() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let d = dim(3);
        let phi = random_phi(d, &mut rng);
        let gamma = SchmidtChannel::maximally_entangled(d);
        let basis = MeasurementBasis::max_entangled(d);
        let scenario = ScenarioSpec::new(
            NoiseSpec::new(NoiseKind::Depolarizing, 0.35).unwrap(),
            NoiseSpec::new(NoiseKind::DPhaseFlip, 0.2).unwrap(),
            NoiseSpec::new(NoiseKind::AmplitudeDamping, 0.7).unwrap(),
        );
        let rho = apply_scenario(&assemble_initial(&phi, &gamma).unwrap(), &scenario).unwrap();
        let (outcomes, f) = run_protocol(&rho, &basis, &phi).unwrap();
        let total_p: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((total_p - 1.0).abs() < 1e-10);
        assert!((0.0..=1.0 + 1e-10).contains(&f));
        for o in &outcomes {
            assert!(o.conditional_fidelity <= 1.0 + 1e-10);
            assert!(o.conditional_fidelity >= -1e-12);
        }
    }

    #[test]
    fn full_flip_noise_on_both_channel_qudits_restores_fidelity_at_d2() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let d = dim(2);
        let gamma = SchmidtChannel::maximally_entangled(d);
        let basis = MeasurementBasis::max_entangled(d);
        let scenario = ScenarioSpec::new(
            NoiseSpec::none(),
            NoiseSpec::new(NoiseKind::DitFlip, 1.0).unwrap(),
            NoiseSpec::new(NoiseKind::DitFlip, 1.0).unwrap(),
        );
        for _ in 0..5 {
            let phi = random_phi(d, &mut rng);
            let f = fidelity_for_input(&phi, &gamma, &basis, &scenario).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_path_matches_full_pipeline() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let d = dim(3);
        let basis = MeasurementBasis::random(d, &mut rng);
        let gamma = SchmidtChannel::new(random_state_vector(3, &mut rng)).unwrap();
        let scenario = ScenarioSpec::new(
            NoiseSpec::new(NoiseKind::DPhaseFlip, 0.45).unwrap(),
            NoiseSpec::new(NoiseKind::AmplitudeDamping, 0.3).unwrap(),
            NoiseSpec::new(NoiseKind::DitFlip, 0.8).unwrap(),
        );

        // channel state with its two local channels pre-applied
        let n = d.get();
        let mut psi = Array1::<C64>::zeros(n * n);
        for k in 0..n {
            psi[k * n + k] = gamma.coeff(k);
        }
        let mut rho_ch = DensityMatrix::from_pure(&psi, d, 2).unwrap();
        rho_ch = apply_channel(
            &rho_ch,
            &kraus_operators(&scenario.alice, d).unwrap(),
            0,
        )
        .unwrap();
        rho_ch = apply_channel(&rho_ch, &kraus_operators(&scenario.bob, d).unwrap(), 1).unwrap();

        for _ in 0..4 {
            let phi = random_phi(d, &mut rng);
            let full = fidelity_for_input(&phi, &gamma, &basis, &scenario).unwrap();

            let rho_i = outer(phi.amplitudes());
            let rho_i = crate::noise::apply_kraus_one_register(
                &rho_i,
                kraus_operators(&scenario.input, d).unwrap().operators(),
                n,
                1,
                0,
            );
            let fast = run_protocol_product(&rho_i, rho_ch.matrix(), &basis, &phi);
            assert!((full - fast).abs() < 1e-12, "full={full} fast={fast}");
        }
    }

    #[test]
    fn fidelity_is_affine_in_channel_mixing() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let d = dim(2);
        let basis = MeasurementBasis::max_entangled(d);
        let phi = random_phi(d, &mut rng);

        let psi1 = random_state_vector(4, &mut rng);
        let psi2 = random_state_vector(4, &mut rng);
        let rho1 = DensityMatrix::from_pure(&psi1, d, 2).unwrap();
        let rho2 = DensityMatrix::from_pure(&psi2, d, 2).unwrap();

        let fid_of = |rho_ch: &DensityMatrix| {
            let rho = assemble_with_channel(&phi, rho_ch).unwrap();
            run_protocol(&rho, &basis, &phi).unwrap().1
        };

        let lambda = 0.3;
        let mixed_mat = rho1.matrix() * C64::new(lambda, 0.0)
            + rho2.matrix() * C64::new(1.0 - lambda, 0.0);
        let mixed = DensityMatrix::new(mixed_mat, d, 2).unwrap();
        let lhs = fid_of(&mixed);
        let rhs = lambda * fid_of(&rho1) + (1.0 - lambda) * fid_of(&rho2);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn product_channel_conditional_outputs_follow_projection() {
        // γ = (1, 0): Bob's qudit stays |0⟩, so each outcome's conditional
        // fidelity is |⟨φ|U_mn|0⟩|² regardless of n.
        let d = dim(2);
        let gamma = SchmidtChannel::from_real(&[1.0, 0.0]).unwrap();
        let basis = MeasurementBasis::max_entangled(d);
        let phi = PureState::basis_state(d, 0).unwrap();
        let rho = assemble_initial(&phi, &gamma).unwrap();
        let (outcomes, f) = run_protocol(&rho, &basis, &phi).unwrap();
        let total_p: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((total_p - 1.0).abs() < 1e-12);
        assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn assemble_with_channel_matches_schmidt_assembly() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let d = dim(3);
        let phi = random_phi(d, &mut rng);
        let gamma = SchmidtChannel::new(random_state_vector(3, &mut rng)).unwrap();
        let direct = assemble_initial(&phi, &gamma).unwrap();

        let n = d.get();
        let mut psi = Array1::<C64>::zeros(n * n);
        for k in 0..n {
            psi[k * n + k] = gamma.coeff(k);
        }
        let rho_ch = DensityMatrix::from_pure(&psi, d, 2).unwrap();
        let via_channel = assemble_with_channel(&phi, &rho_ch).unwrap();
        assert!(max_abs_diff(direct.matrix(), via_channel.matrix()) < 1e-14);

        // and both equal |φ⟩⟨φ| ⊗ ρ_ch built by hand
        let by_hand = kron(&outer(phi.amplitudes()), rho_ch.matrix());
        assert!(max_abs_diff(direct.matrix(), &by_hand) < 1e-14);
    }
}
