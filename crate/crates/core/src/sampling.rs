//! Random-state generation, Monte Carlo fidelity averaging, and the
//! entanglement-scatter experiment.
//!
//! All randomness is ChaCha12 keyed by a user seed, with one dedicated
//! stream per sample index. Parallel and serial runs therefore draw exactly
//! the same numbers, and reductions use pairwise summation, so results are
//! bit-identical regardless of worker count.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::basis::MeasurementBasis;
use crate::closed_form::{boundary_state, normalized_quantum_contribution};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{outer, pairwise_sum, random_state_vector, C64};
use crate::noise::{apply_kraus_one_register, kraus_operators, ScenarioSpec};
use crate::oracle;
use crate::state::{Dim, PureState, SchmidtChannel};

/// Seed for a reproducible sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// ChaCha12 generator on the stream dedicated to one sample index.
pub fn stream_rng(seed: RngSeed, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.0);
    rng.set_stream(index);
    rng
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// One scatter point: channel entanglement against the normalized quantum
/// contribution f'_Q = (d+1) f_Q / (d−1).
#[derive(Debug, Clone, Copy)]
pub struct ScatterRecord {
    pub entanglement: f64,
    pub fq_normalized: f64,
}

/// Boundary-family curve sampled along its parameter a.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub mu: usize,
    /// (a, entanglement, f'_Q) triples in increasing a.
    pub points: Vec<(f64, f64, f64)>,
}

/// Scatter samples plus the boundary-family curves for the same dimension.
#[derive(Debug, Clone)]
pub struct ScatterData {
    pub d: Dim,
    pub seed: RngSeed,
    pub records: Vec<ScatterRecord>,
    pub boundaries: Vec<BoundaryCurve>,
}

/// Input state drawn from the unitarily invariant measure: a normalized
/// vector of independent standard complex Gaussians.
pub fn sample_input_state<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> PureState {
    PureState::with_tolerance(random_state_vector(d.get(), rng), 1e-9)
        .expect("normalized by construction")
}

/// Input state drawn through the angular parametrization
/// α_j = (Π_{i<j} sin θ_i) cos θ_j e^{iφ_j} (cos θ_{d−1} ≡ 1), with each
/// u_j = sin²θ_j a Beta(d−1−j, 1) draw so the density matches the invariant
/// volume element, and uniform phases.
///
/// Statistically interchangeable with [`sample_input_state`]; kept as an
/// independent validation of the measure.
pub fn sample_input_state_angular<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> PureState {
    let n = d.get();
    let mut amps: Array1<C64> = Array1::zeros(n);
    let mut sin_prod = 1.0f64;
    for j in 0..n - 1 {
        // u = sin²θ_j with density ∝ u^{d−j−2} on [0, 1]
        let exponent = 1.0 / (n - 1 - j) as f64;
        let u: f64 = rng.gen::<f64>().powf(exponent);
        let (sin_t, cos_t) = (u.sqrt(), (1.0 - u).sqrt());
        let phase = if j == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, rng.gen::<f64>() * crate::linalg::TAU)
        };
        // α_0 is real-positive in this parametrization; the overall phase is
        // unphysical, so the measure is unaffected.
        amps[j] = phase * cos_t * sin_prod;
        sin_prod *= sin_t;
    }
    let phase = C64::from_polar(1.0, rng.gen::<f64>() * crate::linalg::TAU);
    amps[n - 1] = phase * sin_prod;
    PureState::with_tolerance(amps, 1e-9).expect("normalized by construction")
}

/// Channel state drawn uniformly over the Schmidt-form slice: moduli of a
/// normalized complex Gaussian vector, i.e. squared coefficients jointly
/// flat on the probability simplex. Canonical (real nonnegative) Schmidt
/// coefficients are returned.
pub fn sample_schmidt_channel<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> SchmidtChannel {
    let v = random_state_vector(d.get(), rng);
    let gamma: Array1<C64> = v.mapv(|z| C64::new(z.norm(), 0.0));
    SchmidtChannel::with_tolerance(gamma, 1e-9).expect("normalized by construction")
}

/// Total volume of pure-state space under the invariant measure,
/// V_d = π^{d−1}/(d−1)!.
pub fn volume(d: Dim) -> f64 {
    let n = d.get();
    let mut v = 1.0f64;
    for k in 1..n {
        v *= std::f64::consts::PI / k as f64;
    }
    v
}

/// Average the protocol fidelity over `n` random input states.
///
/// The channel-qudit noise is applied to the channel state once; per sample
/// only the input-qudit channel and the protocol contraction run. This is
/// algebraically identical to the full three-register pipeline (local
/// channels on disjoint registers commute and factor through the tensor
/// product), which unit tests assert at machine precision.
pub fn mc_average_fidelity(
    gamma: &SchmidtChannel,
    basis: &MeasurementBasis,
    scenario: &ScenarioSpec,
    n: usize,
    seed: RngSeed,
) -> Result<McEstimate> {
    if n < 100 {
        return Err(Error::ParameterOutOfRange(format!(
            "need at least 100 samples, got {n}"
        )));
    }
    let d = gamma.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(
            "basis/channel dimension mismatch".into(),
        ));
    }
    oracle::check_dim(d)?;
    let nd = d.get();

    // channel state with its two local channels pre-applied
    let mut psi: Array1<C64> = Array1::zeros(nd * nd);
    for k in 0..nd {
        psi[k * nd + k] = gamma.coeff(k);
    }
    let mut rho_ch = DensityMatrix::from_pure(&psi, d, 2)?;
    if !scenario.alice.is_none() {
        rho_ch = crate::noise::apply_channel(&rho_ch, &kraus_operators(&scenario.alice, d)?, 0)?;
    }
    if !scenario.bob.is_none() {
        rho_ch = crate::noise::apply_channel(&rho_ch, &kraus_operators(&scenario.bob, d)?, 1)?;
    }
    let input_ops = if scenario.input.is_none() {
        None
    } else {
        Some(kraus_operators(&scenario.input, d)?)
    };

    let fids: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let phi = sample_input_state(d, &mut rng);
            let mut rho_i = outer(phi.amplitudes());
            if let Some(ops) = &input_ops {
                rho_i = apply_kraus_one_register(&rho_i, ops.operators(), nd, 1, 0);
            }
            oracle::run_protocol_product(&rho_i, rho_ch.matrix(), basis, &phi)
        })
        .collect();

    Ok(estimate(&fids))
}

/// Mean and standard error with deterministic pairwise reductions.
pub fn estimate(samples: &[f64]) -> McEstimate {
    let n = samples.len();
    let mean = pairwise_sum(samples) / n as f64;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n as f64 - 1.0);
    McEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n_samples: n,
    }
}

/// Scatter of (entanglement, f'_Q) over random Schmidt channels at maximal
/// measurement entanglement, plus the d−1 boundary-family curves, each
/// sampled along its full parameter range.
pub fn scatter_experiment(
    d: Dim,
    n: usize,
    seed: RngSeed,
    curve_points: usize,
) -> Result<ScatterData> {
    if n == 0 || curve_points < 2 {
        return Err(Error::ParameterOutOfRange(
            "need n ≥ 1 samples and ≥ 2 curve points".into(),
        ));
    }
    let basis = MeasurementBasis::max_entangled(d);
    let records: Vec<ScatterRecord> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let gamma = sample_schmidt_channel(d, &mut rng);
            ScatterRecord {
                entanglement: gamma.entanglement_entropy(),
                fq_normalized: normalized_quantum_contribution(&basis, &gamma),
            }
        })
        .collect();

    let mut boundaries = Vec::new();
    for mu in 1..d.get() {
        let a_max = if mu < d.get() - 1 {
            1.0 / ((mu + 1) as f64).sqrt()
        } else {
            1.0
        };
        let mut points = Vec::with_capacity(curve_points);
        for i in 0..curve_points {
            let a = a_max * i as f64 / (curve_points - 1) as f64;
            let gamma = boundary_state(d, mu, a)?;
            points.push((
                a,
                gamma.entanglement_entropy(),
                normalized_quantum_contribution(&basis, &gamma),
            ));
        }
        boundaries.push(BoundaryCurve { mu, points });
    }

    Ok(ScatterData {
        d,
        seed,
        records,
        boundaries,
    })
}

/// Envelope of the attainable (entanglement, f'_Q) region at entanglement
/// `e`, as (lower, upper).
///
/// The upper bound follows the symmetric family μ = d−1 on its descending
/// branch a ∈ [1/√d, 1]; the lower bound follows the family chain between
/// consecutive rank states. Both are solved by bisection on the (monotone)
/// entanglement along the branch.
pub fn envelope_bounds(d: Dim, e: f64) -> (f64, f64) {
    let n = d.get();
    let basis = MeasurementBasis::max_entangled(d);
    let fq_of = |gamma: &SchmidtChannel| normalized_quantum_contribution(&basis, gamma);
    let ent_of = |mu: usize, a: f64| {
        boundary_state(d, mu, a)
            .expect("family parameter in range")
            .entanglement_entropy()
    };
    let e = e.clamp(0.0, 1.0);

    // upper: μ = d−1, a from 1/√d (E = 1) down to 1 (E = 0); E decreasing
    let upper = {
        let mu = n - 1;
        let (mut lo, mut hi) = (1.0 / (n as f64).sqrt(), 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ent_of(mu, mid) > e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        fq_of(&boundary_state(d, mu, a).expect("in range"))
    };

    // lower: family μ with E between the rank-μ and rank-(μ+1) entropies,
    // ascending in a from 0 to 1/√(μ+1)
    let lower = {
        let log_d = (n as f64).ln();
        let mut mu = n - 1;
        for cand in 1..n {
            let e_lo = (cand as f64).ln() / log_d;
            let e_hi = ((cand + 1) as f64).ln() / log_d;
            if e >= e_lo - 1e-12 && e <= e_hi + 1e-12 {
                mu = cand;
                break;
            }
        }
        let a_top = 1.0 / ((mu + 1) as f64).sqrt();
        let (mut lo, mut hi) = (0.0f64, a_top);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ent_of(mu, mid) < e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        fq_of(&boundary_state(d, mu, a).expect("in range"))
    };

    (lower, upper)
}
