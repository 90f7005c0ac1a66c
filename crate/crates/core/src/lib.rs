//! Operator-splitting time integrators for semilinear dissipative evolution
//! equations u' = (A + F)u on periodic 2-D domains.
//!
//! The linear part A (diffusion) is handled spectrally per Fourier mode; the
//! nonlinear part F is handled pointwise through closed-form resolvents that
//! reduce to scalar cubic equations. Two concrete models are provided: the
//! Caginalp solidification system and the Gray-Scott pattern formation system.

pub mod cubic;
pub mod error;
pub mod grid;
pub mod harness;
pub mod integrators;
pub mod models;
pub mod norms;
pub mod oracle;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec, LinearSymbol, State};
pub use integrators::{Scheme, StepperConfig};
pub use models::{CaginalpParams, CaginalpProblem, GrayScottParams, GrayScottProblem, SplitProblem};
pub use norms::NormKind;
