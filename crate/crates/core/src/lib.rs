//! Qudit teleportation under noise.
//!
//! The crate computes the average fidelity of the standard d-dimensional
//! teleportation protocol when any subset of the three qudits involved is
//! subjected to noise, by three mutually cross-checking routes:
//!
//! * [`oracle`] — brute-force density-matrix simulation of the protocol for a
//!   fixed input state, the ground truth everything else is validated against;
//! * [`sampling`] — Monte Carlo averaging of the oracle over random input
//!   states drawn with the unitarily invariant measure;
//! * [`closed_form`] — analytic expressions for the average fidelity, noise
//!   thresholds, and measurement-phase optimization.
//!
//! Register order is fixed as (I, A, B): the input qudit, Alice's half of the
//! entangled channel, and Bob's half, with flat index `j = i_I·d² + i_A·d + i_B`.
//! All values are immutable after construction and safe to share across
//! threads; every public function is a pure function of its inputs.

pub mod basis;
pub mod closed_form;
pub mod density;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod sampling;
pub mod state;
pub mod tol;

pub use basis::{weyl_operator, MeasurementBasis, WeylIndex};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use noise::{
    apply_channel, kraus_operators, KrausChannel, NoiseKind, NoiseSpec, ScenarioSpec,
    WeylCoefficients,
};
pub use state::{Dim, PureState, SchmidtChannel};
