//! Fraction of two-qudit noise configurations that fall below the classical
//! fidelity.

use rayon::prelude::*;

use crate::basis::MeasurementBasis;
use crate::closed_form::{classical_fidelity, fidelity_computational, fidelity_weyl_closed};
use crate::error::{Error, Result};
use crate::noise::{kraus_operators, weyl_coefficients, NoiseKind, NoiseSpec};
use crate::state::{Dim, SchmidtChannel};

/// Fraction of the (p_A, p_B) unit square on a `steps`×`steps` uniform grid
/// where the scenario (∅, kind_a(p_A), kind_b(p_B)) at maximal entanglement
/// yields a fidelity strictly below f_C.
///
/// Grid nodes sit at i/(steps−1), endpoints included. The count is an exact
/// integer reduction, so the result is independent of the worker count.
pub fn region_fraction_below_classical(
    d: Dim,
    kind_a: NoiseKind,
    kind_b: NoiseKind,
    steps: usize,
) -> Result<f64> {
    if steps < 2 {
        return Err(Error::ParameterOutOfRange(
            "grid needs at least 2 steps per axis".into(),
        ));
    }
    if kind_a == NoiseKind::None || kind_b == NoiseKind::None {
        return Err(Error::NoiselessKindUnsupported("region fraction"));
    }
    let basis = MeasurementBasis::max_entangled(d);
    let gamma = SchmidtChannel::maximally_entangled(d);
    let f_c = classical_fidelity(d);
    let dd = d.get() as f64;
    let f_q = (dd - 1.0) / (dd + 1.0);
    let tf = dd * (dd - 1.0);
    let weyl_only = kind_a.is_weyl() && kind_b.is_weyl();
    let id_coeff = weyl_coefficients(NoiseKind::None, 0.0, d)?;
    let id_chan = kraus_operators(&NoiseSpec::none(), d)?;

    let p_at = |i: usize| i as f64 / (steps - 1) as f64;

    let below: usize = (0..steps)
        .into_par_iter()
        .map(|ia| {
            let pa = p_at(ia);
            let mut count = 0usize;
            if weyl_only {
                let ca = weyl_coefficients(kind_a, pa, d).expect("weyl kind");
                for ib in 0..steps {
                    let cb = weyl_coefficients(kind_b, p_at(ib), d).expect("weyl kind");
                    if fidelity_weyl_closed(d, f_q, tf, &id_coeff, &ca, &cb) < f_c {
                        count += 1;
                    }
                }
            } else {
                let ch_a =
                    kraus_operators(&NoiseSpec::new(kind_a, pa).expect("p in range"), d)
                        .expect("channel");
                for ib in 0..steps {
                    let ch_b = kraus_operators(
                        &NoiseSpec::new(kind_b, p_at(ib)).expect("p in range"),
                        d,
                    )
                    .expect("channel");
                    if fidelity_computational(&basis, &gamma, &id_chan, &ch_a, &ch_b) < f_c {
                        count += 1;
                    }
                }
            }
            count
        })
        .sum();

    Ok(below as f64 / (steps * steps) as f64)
}
