//! For a Parseval controlled frame, `Σ w ⟨V F, F⟩ = N` and
//! `Σ w ⟨G V F, F⟩ = tr G`; for positive `V`,
//! `tr S_VF <= tr V Σ w ‖F‖²`.

use cframe::controlled::{tight_controller, trace_bound_check, trace_identity_check, trace_of_operator_via_frame, ControlledFrame};
use cframe::frame::SampledFrame;
use cframe::linalg::{real_vector, Operator};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(-1.0, 1.0, 10)?, 3, |s| real_vector(&[1.0, s.sin(), s * s]))?;
    let v = tight_controller(&frame, 1.0)?;
    let cf = ControlledFrame::new(frame.clone(), v)?;

    let t = trace_identity_check(&cf)?;
    println!("sum w <V F, F> = {} (N = {}), residual {:e}", t.lhs, t.expected, t.residual);

    let g = Operator::from_real_rows(&[[1.0, 2.0, 0.0], [0.0, -3.0, 1.0], [4.0, 0.0, 0.5]]);
    println!("tr G via frame = {}, tr G = {}", trace_of_operator_via_frame(&cf, &g)?, g.trace());

    let positive = Operator::from_real_rows(&[[2.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 0.1]]);
    let b = trace_bound_check(&ControlledFrame::new(frame, positive)?)?;
    println!("tr S_VF = {:.6} <= {:.6}: {}", b.lhs, b.rhs, b.holds);
    Ok(())
}
