//! Level-index magnitudes, growth models of entire functions, and numerical
//! checks of the regularity conditions that decide whether escaping points
//! which outrun `mu_{2,eps}` iterates must also outrun `M` iterates.
//!
//! Values such as `exp(exp(exp(2.5)))` are carried as [`Magnitude`]s, a
//! level and an `f64` mantissa. A [`GrowthModel`] supplies
//! `psi(t) = log M(e^t)`, and the checkers in [`regularity`] scan a window of
//! `t` and return a [`RegularityReport`] whose verdict is one of
//! holds-on-window, fails (with a witness) or inconclusive.

pub mod acceptance;
pub mod classify;
pub mod construction;
pub mod error;
pub mod growth;
pub mod magnitude;
pub mod regularity;
pub mod report;

pub use classify::{
    classify_orbit, q2_not_a_witness, real_axis_orbit, threshold_sequence, ClassificationParams,
    OrbitRecord, SpeedVerdict,
};
pub use construction::{build_phi, PhiConstruction, SeparationParams};
pub use error::{Error, Result};
pub use growth::{GrowthModel, PiecewiseLinear, Step};
pub use magnitude::{Comparison, Magnitude, Tolerance};
pub use regularity::RegularityParams;
pub use report::{Condition, RegularityReport, ScanConfig, Strictness, Verdict, Window};
