//! Named tolerances shared across the crate.
//!
//! Scale-dependent tolerances are functions of the max-norm of the operand.

pub const EIG_TOL: f64 = 1e-9;
pub const POWER_TOL: f64 = 1e-8;
pub const QUAD_TOL: f64 = 1e-12;

/// Relative rank test on the lower frame bound: `A > FRAME_TOL * B`.
pub const FRAME_TOL: f64 = 1e-10;
pub const TIGHT_TOL: f64 = 1e-8;
pub const RECON_TOL: f64 = 1e-8;
pub const DECOMP_TOL: f64 = 1e-7;

pub const COMMUTE_TOL: f64 = 1e-9;
pub const NORMAL_TOL: f64 = 1e-8;
pub const PROJ_TOL: f64 = 1e-8;
pub const GRAM_TOL: f64 = 1e-8;
pub const TRANSFER_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-8;
pub const EQUIV_TOL: f64 = 1e-8;

/// Self-adjointness tolerance; also used as the PSD tolerance.
pub fn hermitian_tol(max_norm: f64) -> f64 {
    1e-10 * max_norm.max(1.0)
}

pub fn psd_tol(max_norm: f64) -> f64 {
    hermitian_tol(max_norm)
}

pub fn singular_tol(max_norm: f64) -> f64 {
    1e-12 * max_norm
}
