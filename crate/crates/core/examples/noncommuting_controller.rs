//! A controller that does not commute with the frame operator.
//!
//! For the moment frame and `V = [[1, 1], [-1, 1]]`, the controlled
//! operator `V S_F = [[3/2, 5/6], [-1/2, -1/6]]` is not self-adjoint and its
//! Hermitian part `[[3/2, 1/6], [1/6, -1/6]]` has a negative eigenvalue, so
//! `F` is not a controlled frame for this `V` in either mode.

use cframe::controlled::{controlled_analyze, duality_symmetry_gap, ControlledFrame, Mode};
use cframe::frame::SampledFrame;
use cframe::linalg::{fmt_sig, real_vector, Operator};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 8)?, 2, |s| real_vector(&[1.0, s]))?;
    let v = Operator::from_real_rows(&[[1.0, 1.0], [-1.0, 1.0]]);
    let cf = ControlledFrame::new(frame, v)?;

    for mode in [Mode::Strict, Mode::Lenient] {
        let a = controlled_analyze(&cf, mode)?;
        println!("{mode:?}:");
        print!("S_VF =\n{}", a.controlled_operator);
        println!(
            "  Hermitian part spectrum [{}, {}], form real: {}, skew norm {}",
            fmt_sig(a.lower_bound, 6),
            fmt_sig(a.upper_bound, 6),
            a.quadratic_form_real,
            fmt_sig(a.skew_norm, 6)
        );
        println!("  classification: {}, V commutes with S_F: {}", a.classification, a.commutes_with_s);
    }

    // Σ w ⟨f,F⟩ V F and Σ w ⟨f, V F⟩ F differ as operators.
    println!("max |V S_F - S_F V*| = {}", fmt_sig(duality_symmetry_gap(&cf), 6));
    Ok(())
}
