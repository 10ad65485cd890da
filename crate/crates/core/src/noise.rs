//! The five noise channels as Kraus maps.
//!
//! The four Weyl-type kinds (dit-flip, d-phase-flip, dit-phase-flip,
//! depolarizing) have Kraus operators proportional to Weyl operators and are
//! kept in two interchangeable representations: explicit matrices and the d×d
//! matrix of squared coefficients multiplying each U_mn. Amplitude damping is
//! not of Weyl form and exists only as computational-basis matrices.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::basis::{weyl_operator, WeylIndex};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::state::Dim;
use crate::tol;

/// Closed enumeration of the supported noise kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// No noise.
    None,
    /// Dit-flip (F): |j⟩ → |j⊕1⟩, …, |j⊕(d−1)⟩ with equal weight.
    DitFlip,
    /// d-phase-flip (P): one of the d−1 phase shifts ω_d^m |j⟩.
    DPhaseFlip,
    /// Dit-phase-flip (FP): a flip and a phase shift at once.
    DitPhaseFlip,
    /// Depolarizing (D): relaxes toward the maximally mixed state.
    Depolarizing,
    /// Amplitude damping (AD): population drains into |0⟩.
    AmplitudeDamping,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 6] = [
        NoiseKind::None,
        NoiseKind::DitFlip,
        NoiseKind::DPhaseFlip,
        NoiseKind::DitPhaseFlip,
        NoiseKind::Depolarizing,
        NoiseKind::AmplitudeDamping,
    ];

    pub fn is_weyl(self) -> bool {
        !matches!(self, NoiseKind::AmplitudeDamping)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoiseKind::None => "none",
            NoiseKind::DitFlip => "F",
            NoiseKind::DPhaseFlip => "P",
            NoiseKind::DitPhaseFlip => "FP",
            NoiseKind::Depolarizing => "D",
            NoiseKind::AmplitudeDamping => "AD",
        };
        write!(f, "{s}")
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "NONE" | "∅" => Ok(NoiseKind::None),
            "F" => Ok(NoiseKind::DitFlip),
            "P" => Ok(NoiseKind::DPhaseFlip),
            "FP" => Ok(NoiseKind::DitPhaseFlip),
            "D" => Ok(NoiseKind::Depolarizing),
            "AD" => Ok(NoiseKind::AmplitudeDamping),
            other => Err(Error::ParameterOutOfRange(format!(
                "unknown noise kind '{other}' (expected none, F, P, FP, D, AD)"
            ))),
        }
    }
}

/// A noise kind with its fraction p ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidNoiseFraction(p));
        }
        Ok(Self { kind, p })
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            p: 0.0,
        }
    }

    pub fn is_none(&self) -> bool {
        self.kind == NoiseKind::None
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_none() {
            write!(f, "none")
        } else {
            write!(f, "{}:{}", self.kind, self.p)
        }
    }
}

/// Noise acting on the input qudit and the two channel qudits (I, A, B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub input: NoiseSpec,
    pub alice: NoiseSpec,
    pub bob: NoiseSpec,
}

impl ScenarioSpec {
    pub fn new(input: NoiseSpec, alice: NoiseSpec, bob: NoiseSpec) -> Self {
        Self { input, alice, bob }
    }

    pub fn noiseless() -> Self {
        Self {
            input: NoiseSpec::none(),
            alice: NoiseSpec::none(),
            bob: NoiseSpec::none(),
        }
    }

    /// Specs in register order (I, A, B).
    pub fn specs(&self) -> [NoiseSpec; 3] {
        [self.input, self.alice, self.bob]
    }

    pub fn is_weyl_only(&self) -> bool {
        self.specs().iter().all(|s| s.kind.is_weyl())
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(I={}, A={}, B={})", self.input, self.alice, self.bob)
    }
}

/// Region amplitudes (a_0, a_f, a_p, a_c) of a Weyl-kind channel: the common
/// coefficient on the identity, the flip row (m = 0, n ≥ 1), the phase column
/// (m ≥ 1, n = 0) and the combined block (m, n ≥ 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCoefficients {
    pub a0: f64,
    pub af: f64,
    pub ap: f64,
    pub ac: f64,
}

impl WeylCoefficients {
    /// Squared amplitudes (a_0², a_f², a_p², a_c²).
    pub fn squares(&self) -> (f64, f64, f64, f64) {
        (
            self.a0 * self.a0,
            self.af * self.af,
            self.ap * self.ap,
            self.ac * self.ac,
        )
    }

    /// |a_0² + (d−1)a_f² + (d−1)a_p² + (d−1)²a_c² − 1|.
    pub fn normalization_error(&self, d: Dim) -> f64 {
        let (a0, af, ap, ac) = self.squares();
        let dm1 = (d.get() - 1) as f64;
        (a0 + dm1 * af + dm1 * ap + dm1 * dm1 * ac - 1.0).abs()
    }
}

/// Region amplitudes for a Weyl-kind noise spec; amplitude damping has no
/// Weyl decomposition and is rejected.
pub fn weyl_coefficients(kind: NoiseKind, p: f64, d: Dim) -> Result<WeylCoefficients> {
    let spec = NoiseSpec::new(kind, p)?;
    let dd = d.get() as f64;
    let c = match spec.kind {
        NoiseKind::None => WeylCoefficients {
            a0: 1.0,
            af: 0.0,
            ap: 0.0,
            ac: 0.0,
        },
        NoiseKind::DitFlip => WeylCoefficients {
            a0: (1.0 - p).sqrt(),
            af: (p / (dd - 1.0)).sqrt(),
            ap: 0.0,
            ac: 0.0,
        },
        NoiseKind::DPhaseFlip => WeylCoefficients {
            a0: (1.0 - p).sqrt(),
            af: 0.0,
            ap: (p / (dd - 1.0)).sqrt(),
            ac: 0.0,
        },
        NoiseKind::DitPhaseFlip => WeylCoefficients {
            a0: (1.0 - p).sqrt(),
            af: 0.0,
            ap: 0.0,
            ac: p.sqrt() / (dd - 1.0),
        },
        NoiseKind::Depolarizing => {
            let e = p.sqrt() / dd;
            WeylCoefficients {
                a0: (1.0 - (dd * dd - 1.0) / (dd * dd) * p).sqrt(),
                af: e,
                ap: e,
                ac: e,
            }
        }
        NoiseKind::AmplitudeDamping => {
            return Err(Error::AmplitudeDampingUnsupported("Weyl decomposition"))
        }
    };
    Ok(c)
}

/// d×d matrix of squared coefficients a²_{mn} multiplying U_mn, row m (phase
/// index), column n (flip index). Entries sum to 1.
pub fn coefficient_matrix(spec: &NoiseSpec, d: Dim) -> Result<Array2<f64>> {
    let c = weyl_coefficients(spec.kind, spec.p, d)?;
    let (a0, af, ap, ac) = c.squares();
    let n = d.get();
    Ok(Array2::from_shape_fn((n, n), |(m, k)| match (m, k) {
        (0, 0) => a0,
        (0, _) => af,
        (_, 0) => ap,
        _ => ac,
    }))
}

/// A completely positive trace-preserving map as explicit Kraus matrices.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<Array2<C64>>,
    d: Dim,
}

impl KrausChannel {
    /// Completeness Σ E†E = 1 is enforced at construction.
    pub fn new(ops: Vec<Array2<C64>>, d: Dim) -> Result<Self> {
        let ch = Self { ops, d };
        let dev = ch.completeness_error();
        if dev > tol::CONSTRUCTION {
            return Err(Error::ParameterOutOfRange(format!(
                "Kraus operators violate completeness by {dev:.3e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(d: Dim) -> Self {
        let n = d.get();
        let mut e = Array2::zeros((n, n));
        for i in 0..n {
            e[[i, i]] = C64::new(1.0, 0.0);
        }
        Self { ops: vec![e], d }
    }

    pub fn operators(&self) -> &[Array2<C64>] {
        &self.ops
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    /// Largest deviation of Σ E†E from the identity.
    pub fn completeness_error(&self) -> f64 {
        let n = self.d.get();
        let mut acc = Array2::<C64>::zeros((n, n));
        for e in &self.ops {
            for i in 0..n {
                for j in 0..n {
                    let mut s = C64::new(0.0, 0.0);
                    for k in 0..n {
                        s += e[[k, i]].conj() * e[[k, j]];
                    }
                    acc[[i, j]] += s;
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[[i, j]] - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// Explicit Kraus operators for a noise spec.
///
/// Weyl kinds produce `a_mn U_mn` in (m, n)-lexicographic order, skipping
/// zero coefficients; amplitude damping produces `E_0 = |0⟩⟨0| +
/// √(1−p) Σ_{j≥1} |j⟩⟨j|` followed by `E_j = √p |0⟩⟨j|` for j = 1..d−1.
/// The ordering is canonical so serialized channels are stable.
pub fn kraus_operators(spec: &NoiseSpec, d: Dim) -> Result<KrausChannel> {
    let spec = NoiseSpec::new(spec.kind, spec.p)?;
    let n = d.get();
    let ops = match spec.kind {
        NoiseKind::AmplitudeDamping => {
            let p = spec.p;
            let mut ops = Vec::with_capacity(n);
            let mut e0 = Array2::zeros((n, n));
            e0[[0, 0]] = C64::new(1.0, 0.0);
            let damp = C64::new((1.0 - p).sqrt(), 0.0);
            for j in 1..n {
                e0[[j, j]] = damp;
            }
            ops.push(e0);
            let jump = C64::new(p.sqrt(), 0.0);
            for j in 1..n {
                let mut ej = Array2::zeros((n, n));
                ej[[0, j]] = jump;
                ops.push(ej);
            }
            ops
        }
        _ => {
            let coeff = coefficient_matrix(&spec, d)?;
            let mut ops = Vec::new();
            for idx in WeylIndex::all(d) {
                let a2 = coeff[[idx.m, idx.n]];
                if a2 > 0.0 {
                    let scale = C64::new(a2.sqrt(), 0.0);
                    ops.push(weyl_operator(d, idx).mapv(|z| z * scale));
                }
            }
            ops
        }
    };
    KrausChannel::new(ops, d)
}

/// Apply a single-qudit channel to one register of a density matrix, acting
/// as the identity on the others.
pub fn apply_channel(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    target: usize,
) -> Result<DensityMatrix> {
    if target >= rho.registers() {
        return Err(Error::RegisterOutOfRange {
            index: target,
            registers: rho.registers(),
        });
    }
    if channel.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel d = {} vs state d = {}",
            channel.dim(),
            rho.dim()
        )));
    }
    let out = apply_kraus_one_register(
        rho.matrix(),
        channel.operators(),
        rho.dim().get(),
        rho.registers(),
        target,
    );
    Ok(DensityMatrix::from_parts_unchecked(
        out,
        rho.dim(),
        rho.registers(),
        rho.is_normalized(),
    ))
}

/// Σ_k (1⊗E_k⊗1) ρ (1⊗E_k⊗1)† with E acting on `target`.
pub(crate) fn apply_kraus_one_register(
    mat: &Array2<C64>,
    ops: &[Array2<C64>],
    d: usize,
    registers: usize,
    target: usize,
) -> Array2<C64> {
    let dim_total = mat.nrows();
    let right = d.pow((registers - 1 - target) as u32);
    let left = dim_total / (d * right);
    let zero = C64::new(0.0, 0.0);
    let mut out = Array2::zeros((dim_total, dim_total));
    let mut tmp = Array2::zeros((dim_total, dim_total));
    for e in ops {
        // tmp = (1 ⊗ E ⊗ 1) ρ
        tmp.fill(zero);
        for a in 0..d {
            for b in 0..d {
                let eab = e[[a, b]];
                if eab == zero {
                    continue;
                }
                for l in 0..left {
                    for r in 0..right {
                        let dst = (l * d + a) * right + r;
                        let src = (l * d + b) * right + r;
                        for col in 0..dim_total {
                            tmp[[dst, col]] += eab * mat[[src, col]];
                        }
                    }
                }
            }
        }
        // out += tmp (1 ⊗ E† ⊗ 1)
        for a in 0..d {
            for b in 0..d {
                let eab = e[[a, b]].conj();
                if eab == zero {
                    continue;
                }
                for l in 0..left {
                    for r in 0..right {
                        let dst = (l * d + a) * right + r;
                        let src = (l * d + b) * right + r;
                        for row in 0..dim_total {
                            out[[row, dst]] += tmp[[row, src]] * eab;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Coefficient-form update for a single qudit under a Weyl-kind channel:
/// ρ'_{mn} = Σ_{k,l} ω_d^{k(m−n)} ρ_{m⊕l, n⊕l} a²_{kl}.
///
/// Independent of the explicit-matrix path in [`apply_channel`]; the two are
/// cross-checked against each other permanently.
pub fn apply_weyl_coefficients(
    rho: &Array2<C64>,
    coeff_sq: &Array2<f64>,
    d: Dim,
) -> Array2<C64> {
    let n = d.get();
    assert_eq!(rho.nrows(), n, "single-qudit density matrix expected");
    let mut out = Array2::zeros((n, n));
    for m in 0..n {
        for nn in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let phase = d.omega(k as i64 * (m as i64 - nn as i64));
                for l in 0..n {
                    let a2 = coeff_sq[[k, l]];
                    if a2 == 0.0 {
                        continue;
                    }
                    acc += phase * rho[[d.add(m, l), d.add(nn, l)]] * a2;
                }
            }
            out[[m, nn]] = acc;
        }
    }
    out
}
