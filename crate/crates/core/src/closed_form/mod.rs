//! Analytic average-fidelity expressions, thresholds, boundary-state
//! families, and measurement-phase optimization.
//!
//! Three independent routes compute the average fidelity of the noisy
//! protocol, and they are cross-checked against each other and against the
//! Monte Carlo oracle:
//!
//! * [`fidelity_weyl_raw`] — direct nested sum over the squared Weyl
//!   coefficients of all three channels;
//! * [`fidelity_weyl_closed`] — closed form in the region coefficients
//!   (a_0, a_f, a_p, a_c) of each channel, plus the two channel/basis
//!   functionals f_Q and f̃;
//! * [`fidelity_computational`] — double-Kraus sum in the computational
//!   basis, the only route that accepts amplitude damping.

mod computational;
mod phases;
mod region;
mod weyl;

pub use computational::fidelity_computational;
pub use phases::{optimal_phase_fidelity, optimize_phases, phase_fidelity};
pub use region::region_fraction_below_classical;
pub use weyl::{fidelity_weyl_closed, fidelity_weyl_raw};

use crate::basis::MeasurementBasis;
use crate::error::{Error, Result};
use crate::noise::{kraus_operators, weyl_coefficients, NoiseKind, ScenarioSpec};
use crate::state::{Dim, SchmidtChannel};
use crate::tol;

/// Noiseless fidelity split into its classical and quantum parts.
#[derive(Debug, Clone, Copy)]
pub struct FidelityBreakdown {
    pub total: f64,
    /// f_C = 2/(d+1).
    pub classical_part: f64,
    /// f_Q, the entanglement-dependent part; (d−1)/(d+1) at maximal
    /// entanglement.
    pub quantum_part: f64,
    /// f̃, the second channel/basis functional entering the noisy closed
    /// form; d(d−1) at maximal entanglement.
    pub tilde_f: f64,
}

/// Critical noise fraction above which the fidelity drops below f_C.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdReport {
    pub kind: NoiseKind,
    pub d: Dim,
    pub p_star: f64,
}

/// Best fidelity achievable by classical measure-and-guess strategies,
/// f_C = 2/(d+1).
pub fn classical_fidelity(d: Dim) -> f64 {
    2.0 / (d.get() as f64 + 1.0)
}

/// Σ_{m,n; j>k} Re[ω_d^{m(k−j)} β_jm β*_km γ_{k⊕n} γ*_{j⊕n}], the raw sum
/// both f_Q and the noiseless fidelity are built from.
fn quantum_sum(basis: &MeasurementBasis, gamma: &SchmidtChannel) -> f64 {
    let d = basis.dim();
    let n = d.get();
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..j {
            // γ pair summed over the shift n first
            let mut gpair = num_complex::Complex64::new(0.0, 0.0);
            for nn in 0..n {
                gpair += gamma.coeff(d.add(k, nn)) * gamma.coeff(d.add(j, nn)).conj();
            }
            let mut bpair = num_complex::Complex64::new(0.0, 0.0);
            for m in 0..n {
                bpair += d.omega((m * k) as i64 - (m * j) as i64)
                    * basis.entry(j, m)
                    * basis.entry(k, m).conj();
            }
            s += (bpair * gpair).re;
        }
    }
    s
}

/// Quantum contribution f_Q to the noiseless fidelity.
pub fn quantum_contribution(basis: &MeasurementBasis, gamma: &SchmidtChannel) -> f64 {
    let dd = basis.dim().get() as f64;
    2.0 / (dd * (dd + 1.0)) * quantum_sum(basis, gamma)
}

/// f_Q normalized to [0, 1]: f'_Q = (d+1) f_Q / (d−1).
pub fn normalized_quantum_contribution(basis: &MeasurementBasis, gamma: &SchmidtChannel) -> f64 {
    let dd = basis.dim().get() as f64;
    (dd + 1.0) / (dd - 1.0) * quantum_contribution(basis, gamma)
}

/// f̃ = (1/d) Σ_{j,k,μ,ν; q≥1} β_jμ β*_kμ ω^{μ(k−j)} γ_{k⊕ν⊕q} γ*_{j⊕ν⊕q}.
///
/// The sum is real by (j, k) exchange symmetry; the imaginary residue is
/// checked in the tests rather than silently discarded here.
pub fn tilde_f(basis: &MeasurementBasis, gamma: &SchmidtChannel) -> f64 {
    let d = basis.dim();
    let n = d.get();
    let mut s = num_complex::Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            // Σ_{ν; q≥1} γ_{k⊕ν⊕q} γ*_{j⊕ν⊕q}
            let mut gpair = num_complex::Complex64::new(0.0, 0.0);
            for nu in 0..n {
                for q in 1..n {
                    let shift = d.add(nu, q);
                    gpair += gamma.coeff(d.add(k, shift)) * gamma.coeff(d.add(j, shift)).conj();
                }
            }
            let mut bpair = num_complex::Complex64::new(0.0, 0.0);
            for mu in 0..n {
                bpair += basis.entry(j, mu)
                    * basis.entry(k, mu).conj()
                    * d.omega((mu * k) as i64 - (mu * j) as i64);
            }
            s += bpair * gpair;
        }
    }
    s.re / n as f64
}

/// Noiseless average fidelity f_C·{1 + (1/d) Σ Re[…]} for a pure Schmidt
/// channel and arbitrary measurement basis.
pub fn noiseless_fidelity(basis: &MeasurementBasis, gamma: &SchmidtChannel) -> FidelityBreakdown {
    let d = basis.dim();
    let dd = d.get() as f64;
    let f_c = classical_fidelity(d);
    let s = quantum_sum(basis, gamma);
    FidelityBreakdown {
        total: f_c * (1.0 + s / dd),
        classical_part: f_c,
        quantum_part: 2.0 / (dd * (dd + 1.0)) * s,
        tilde_f: tilde_f(basis, gamma),
    }
}

/// Boundary-family channel state: γ_0 = a, γ_k = √((1−a²)/μ) for 1 ≤ k ≤ μ.
///
/// Valid for 1 ≤ μ ≤ d−1 with a ∈ [0, 1/√(μ+1)] when μ < d−1 and a ∈ [0, 1]
/// for μ = d−1. Together the d−1 families trace the boundary of the
/// attainable (entanglement, f'_Q) region.
pub fn boundary_state(d: Dim, mu: usize, a: f64) -> Result<SchmidtChannel> {
    let n = d.get();
    if mu == 0 || mu > n - 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "family index μ = {mu} not in 1..={}",
            n - 1
        )));
    }
    let a_max = if mu < n - 1 {
        1.0 / ((mu + 1) as f64).sqrt()
    } else {
        1.0
    };
    if !(0.0..=a_max + 1e-12).contains(&a) {
        return Err(Error::ParameterOutOfRange(format!(
            "a = {a} outside [0, {a_max:.6}] for μ = {mu}"
        )));
    }
    let mut gamma = vec![0.0; n];
    gamma[0] = a;
    let rest = ((1.0 - a * a).max(0.0) / mu as f64).sqrt();
    for g in gamma.iter_mut().take(mu + 1).skip(1) {
        *g = rest;
    }
    SchmidtChannel::from_real(&gamma)
}

/// Maximally symmetric rank-ν state γ_k = 1/√ν for k < ν, with ν ≤ d−1.
pub fn rank_state(d: Dim, nu: usize) -> Result<SchmidtChannel> {
    let n = d.get();
    if nu == 0 || nu > n - 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "rank ν = {nu} not in 1..={}",
            n - 1
        )));
    }
    let mut gamma = vec![0.0; n];
    let g = 1.0 / (nu as f64).sqrt();
    for x in gamma.iter_mut().take(nu) {
        *x = g;
    }
    SchmidtChannel::from_real(&gamma)
}

/// Average fidelity with noise on exactly one qudit.
///
/// The Weyl kinds admit closed forms in f_Q valid for any basis and channel
/// entanglement; they do not depend on which qudit carries the noise.
/// Amplitude damping has a closed form only for maximal entanglement in both
/// basis and channel — anything else must go through
/// [`fidelity_computational`].
pub fn single_qudit_fidelity(
    kind: NoiseKind,
    p: f64,
    d: Dim,
    basis: &MeasurementBasis,
    gamma: &SchmidtChannel,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidNoiseFraction(p));
    }
    if basis.dim() != d || gamma.dim() != d {
        return Err(Error::DimensionMismatch(
            "basis/channel dimension differs from d".into(),
        ));
    }
    let dd = d.get() as f64;
    let f_c = classical_fidelity(d);
    let f_q = quantum_contribution(basis, gamma);
    match kind {
        NoiseKind::None => Err(Error::NoiselessKindUnsupported("single-qudit fidelity")),
        NoiseKind::DitFlip | NoiseKind::DitPhaseFlip => {
            Ok(f_c * (1.0 - p / 2.0) + f_q * (1.0 - p))
        }
        NoiseKind::DPhaseFlip => Ok(f_c + f_q * (1.0 - dd / (dd - 1.0) * p)),
        NoiseKind::Depolarizing => {
            Ok(f_c * (1.0 - (dd - 1.0) / (2.0 * dd) * p) + f_q * (1.0 - p))
        }
        NoiseKind::AmplitudeDamping => {
            if !basis.is_max_entangled(tol::DERIVED)
                || !gamma.is_maximally_entangled(tol::DERIVED)
            {
                return Err(Error::ParameterOutOfRange(
                    "amplitude-damping closed form requires maximal entanglement; \
                     use the computational-basis route otherwise"
                        .into(),
                ));
            }
            Ok(f_c
                * ((dd * dd - dd + 2.0) / (2.0 * dd) - (dd - 1.0) * (dd - 1.0) / (2.0 * dd) * p
                    + (dd - 1.0) / dd * (1.0 - p).sqrt()))
        }
    }
}

/// Critical noise fraction for single-qudit noise at maximal entanglement.
pub fn threshold(kind: NoiseKind, d: Dim) -> Result<ThresholdReport> {
    let dd = d.get() as f64;
    let p_star = match kind {
        NoiseKind::None => return Err(Error::NoiselessKindUnsupported("threshold")),
        NoiseKind::DitFlip | NoiseKind::DPhaseFlip | NoiseKind::DitPhaseFlip => (dd - 1.0) / dd,
        NoiseKind::Depolarizing => dd / (dd + 1.0),
        NoiseKind::AmplitudeDamping => {
            let r = dd.sqrt();
            (dd + 2.0 * r) / ((r + 1.0) * (r + 1.0))
        }
    };
    Ok(ThresholdReport { kind, d, p_star })
}

/// Average fidelity of an arbitrary noise scenario, dispatched to the
/// cheapest applicable closed route: the region-coefficient form for
/// Weyl-only scenarios, the computational-basis sum when amplitude damping
/// is present.
pub fn scenario_fidelity(
    basis: &MeasurementBasis,
    gamma: &SchmidtChannel,
    scenario: &ScenarioSpec,
) -> Result<f64> {
    let d = basis.dim();
    if gamma.dim() != d {
        return Err(Error::DimensionMismatch(
            "basis/channel dimension mismatch".into(),
        ));
    }
    if scenario.is_weyl_only() {
        let f_q = quantum_contribution(basis, gamma);
        let tf = tilde_f(basis, gamma);
        let a = weyl_coefficients(scenario.input.kind, scenario.input.p, d)?;
        let b = weyl_coefficients(scenario.alice.kind, scenario.alice.p, d)?;
        let c = weyl_coefficients(scenario.bob.kind, scenario.bob.p, d)?;
        Ok(fidelity_weyl_closed(d, f_q, tf, &a, &b, &c))
    } else {
        let chans = [
            kraus_operators(&scenario.input, d)?,
            kraus_operators(&scenario.alice, d)?,
            kraus_operators(&scenario.bob, d)?,
        ];
        Ok(fidelity_computational(
            basis, gamma, &chans[0], &chans[1], &chans[2],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_state_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    fn maximal(d: Dim) -> (MeasurementBasis, SchmidtChannel) {
        (
            MeasurementBasis::max_entangled(d),
            SchmidtChannel::maximally_entangled(d),
        )
    }

    #[test]
    fn classical_fidelity_values() {
        assert!((classical_fidelity(dim(2)) - 2.0 / 3.0).abs() < 1e-15);
        assert!((classical_fidelity(dim(3)) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for d in 2..=64 {
            let f = classical_fidelity(dim(d));
            assert!(f < prev);
            prev = f;
        }
        // ~O(1/d) decay
        assert!(classical_fidelity(dim(64)) < 0.04);
    }

    #[test]
    fn quantum_contribution_at_maximal_entanglement() {
        for d in 2..=8 {
            let (basis, gamma) = maximal(dim(d));
            let f_q = quantum_contribution(&basis, &gamma);
            let want = (d as f64 - 1.0) / (d as f64 + 1.0);
            assert!((f_q - want).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn quantum_contribution_vanishes_for_product_channel() {
        for d in 2..=6 {
            let basis = MeasurementBasis::max_entangled(dim(d));
            let mut g = vec![0.0; d];
            g[0] = 1.0;
            let gamma = SchmidtChannel::from_real(&g).unwrap();
            assert!(quantum_contribution(&basis, &gamma).abs() < 1e-14);
        }
    }

    #[test]
    fn quantum_contribution_matches_bruteforce_loop() {
        // term-by-term evaluation with no index tricks, random β and γ
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        let d = dim(4);
        let basis = MeasurementBasis::random(d, &mut rng);
        let gamma = SchmidtChannel::new(random_state_vector(4, &mut rng)).unwrap();
        let n = d.get();
        let mut s = 0.0;
        for m in 0..n {
            for nn in 0..n {
                for j in 0..n {
                    for k in 0..j {
                        let term = d.omega((m * k) as i64 - (m * j) as i64)
                            * basis.entry(j, m)
                            * basis.entry(k, m).conj()
                            * gamma.coeff(d.add(k, nn))
                            * gamma.coeff(d.add(j, nn)).conj();
                        s += term.re;
                    }
                }
            }
        }
        let dd = n as f64;
        let want = 2.0 / (dd * (dd + 1.0)) * s;
        assert!((quantum_contribution(&basis, &gamma) - want).abs() < 1e-13);
    }

    #[test]
    fn noiseless_fidelity_is_classical_plus_quantum() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for d in [2usize, 3, 5] {
            let basis = MeasurementBasis::random(dim(d), &mut rng);
            let gamma = SchmidtChannel::new(random_state_vector(d, &mut rng)).unwrap();
            let b = noiseless_fidelity(&basis, &gamma);
            assert!((b.total - (b.classical_part + b.quantum_part)).abs() < 1e-13);
        }
    }

    #[test]
    fn noiseless_fidelity_extremes() {
        for d in 2..=8 {
            let (basis, gamma) = maximal(dim(d));
            let b = noiseless_fidelity(&basis, &gamma);
            assert!((b.total - 1.0).abs() < 1e-12, "d={d}");
            assert!((b.tilde_f - (d * (d - 1)) as f64).abs() < 1e-11, "d={d}");
        }
        // product channel: fidelity collapses to f_C
        let d = dim(3);
        let basis = MeasurementBasis::max_entangled(d);
        let gamma = SchmidtChannel::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let b = noiseless_fidelity(&basis, &gamma);
        assert!((b.total - classical_fidelity(d)).abs() < 1e-14);
    }

    #[test]
    fn partially_entangled_channel_sits_between_extremes() {
        let d = dim(2);
        let basis = MeasurementBasis::max_entangled(d);
        let gamma = SchmidtChannel::from_real(&[0.9f64.sqrt(), 0.1f64.sqrt()]).unwrap();
        let b = noiseless_fidelity(&basis, &gamma);
        assert!(b.total > classical_fidelity(d) && b.total < 1.0);
    }

    #[test]
    fn tilde_f_values() {
        let d = dim(3);
        let (basis, gamma) = maximal(d);
        assert!((tilde_f(&basis, &gamma) - 6.0).abs() < 1e-12);

        let gamma = SchmidtChannel::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!((tilde_f(&basis, &gamma) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tilde_f_matches_bruteforce_and_is_real() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let d = dim(3);
        let basis = MeasurementBasis::random(d, &mut rng);
        let gamma = SchmidtChannel::new(random_state_vector(3, &mut rng)).unwrap();
        let n = d.get();
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                for mu in 0..n {
                    for nu in 0..n {
                        for q in 1..n {
                            s += basis.entry(j, mu)
                                * basis.entry(k, mu).conj()
                                * d.omega((mu * k) as i64 - (mu * j) as i64)
                                * gamma.coeff(d.add(k, d.add(nu, q)))
                                * gamma.coeff(d.add(j, d.add(nu, q))).conj();
                        }
                    }
                }
            }
        }
        assert!(s.im.abs() < 1e-12);
        assert!((tilde_f(&basis, &gamma) - s.re / n as f64).abs() < 1e-12);
    }

    #[test]
    fn boundary_family_endpoints_are_rank_states() {
        for d in 3..=6 {
            let dd = dim(d);
            for mu in 1..d - 1 {
                let a = 1.0 / ((mu + 1) as f64).sqrt();
                let fam = boundary_state(dd, mu, a).unwrap();
                let rank = rank_state(dd, mu + 1).unwrap();
                for k in 0..d {
                    assert!((fam.coeff(k) - rank.coeff(k)).norm() < 1e-12);
                }
            }
            // a = 0 puts the weight evenly on levels 1..μ
            let fam = boundary_state(dd, 2, 0.0).unwrap();
            assert!(fam.coeff(0).norm() < 1e-15);
            assert!((fam.coeff(1).re - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_state_bounds() {
        let d = dim(4);
        let r1 = rank_state(d, 1).unwrap();
        assert!((r1.coeff(0).re - 1.0).abs() < 1e-15);
        assert!(rank_state(d, 4).is_err());
        assert!(rank_state(d, 0).is_err());
        assert!(boundary_state(d, 1, 0.9).is_err());
        assert!(boundary_state(d, 3, 0.9).is_ok());
    }

    #[test]
    fn single_qudit_formulas_at_maximal_entanglement() {
        for d in 2..=8 {
            let dd = d as f64;
            let (basis, gamma) = maximal(dim(d));
            for p in [0.0, 0.3, 0.7, 1.0] {
                for kind in [
                    NoiseKind::DitFlip,
                    NoiseKind::DPhaseFlip,
                    NoiseKind::DitPhaseFlip,
                ] {
                    let f = single_qudit_fidelity(kind, p, dim(d), &basis, &gamma).unwrap();
                    assert!((f - (1.0 - dd / (dd + 1.0) * p)).abs() < 1e-12);
                }
                let f = single_qudit_fidelity(NoiseKind::Depolarizing, p, dim(d), &basis, &gamma)
                    .unwrap();
                assert!((f - (1.0 - (dd - 1.0) / dd * p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_example_value() {
        let d = dim(3);
        let (basis, gamma) = maximal(d);
        let f =
            single_qudit_fidelity(NoiseKind::Depolarizing, 0.3, d, &basis, &gamma).unwrap();
        assert!((f - 0.8).abs() < 1e-12);
    }

    #[test]
    fn amplitude_damping_closed_form() {
        for d in 2..=8 {
            let (basis, gamma) = maximal(dim(d));
            let f0 =
                single_qudit_fidelity(NoiseKind::AmplitudeDamping, 0.0, dim(d), &basis, &gamma)
                    .unwrap();
            assert!((f0 - 1.0).abs() < 1e-12, "d={d}");
        }
        // rejected away from maximal entanglement
        let d = dim(3);
        let basis = MeasurementBasis::max_entangled(d);
        let gamma = SchmidtChannel::from_real(&[0.8, 0.6, 0.0]).unwrap();
        assert!(
            single_qudit_fidelity(NoiseKind::AmplitudeDamping, 0.5, d, &basis, &gamma).is_err()
        );
    }

    #[test]
    fn thresholds_and_fidelity_at_threshold() {
        for d in 2..=8 {
            let dd = d as f64;
            let (basis, gamma) = maximal(dim(d));
            for kind in [
                NoiseKind::DitFlip,
                NoiseKind::DPhaseFlip,
                NoiseKind::DitPhaseFlip,
                NoiseKind::Depolarizing,
                NoiseKind::AmplitudeDamping,
            ] {
                let t = threshold(kind, dim(d)).unwrap();
                let want = match kind {
                    NoiseKind::Depolarizing => dd / (dd + 1.0),
                    NoiseKind::AmplitudeDamping => {
                        (dd + 2.0 * dd.sqrt()) / (dd.sqrt() + 1.0).powi(2)
                    }
                    _ => (dd - 1.0) / dd,
                };
                assert!((t.p_star - want).abs() < 1e-15);
                let f = single_qudit_fidelity(kind, t.p_star, dim(d), &basis, &gamma).unwrap();
                assert!(
                    (f - classical_fidelity(dim(d))).abs() < 1e-12,
                    "{kind} d={d}: F(p*) = {f}"
                );
            }
        }
        // quoted d = 2 amplitude-damping threshold
        let t = threshold(NoiseKind::AmplitudeDamping, dim(2)).unwrap();
        assert!((t.p_star - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!(threshold(NoiseKind::None, dim(2)).is_err());
    }
}
