//! Controlled continuous frames on finite-dimensional Hilbert spaces,
//! discretized over weighted parameter samples.
//!
//! ```
//! use cframe::controlled::{controlled_analyze, tight_controller};
//! use cframe::frame::analyze;
//! use cframe::linalg::real_vector;
//! use cframe::measure::gauss_legendre;
//! use cframe::{ControlledClass, ControlledFrame, Mode, SampledFrame};
//!
//! let space = gauss_legendre(0.0, 1.0, 8)?;
//! let frame = SampledFrame::from_fn(space, 2, |s| real_vector(&[1.0, s]))?;
//! let a = analyze(&frame)?;
//! assert!((a.lower_bound - (4.0 - 13f64.sqrt()) / 6.0).abs() < 1e-12);
//!
//! let v = tight_controller(&frame, 1.0)?;
//! let ca = controlled_analyze(&ControlledFrame::new(frame, v)?, Mode::Strict)?;
//! assert_eq!(ca.classification, ControlledClass::Parseval);
//! # Ok::<(), cframe::Error>(())
//! ```

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controlled;
pub mod error;
pub mod frame;
pub mod framespec;
pub mod linalg;
pub mod measure;
pub mod tol;

pub use controlled::{ControlledClass, ControlledFrame, Mode};
pub use error::{Error, Result};
pub use frame::{FrameClass, SampledFrame};
pub use linalg::{Field, Operator, Scalar, Vector};
pub use measure::MeasureSpace;
