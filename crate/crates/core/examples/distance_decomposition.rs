//! Distance from a frame to a Parseval frame, split into the distance to its
//! canonical Parseval frame and a nonnegative remainder.
//!
//! Exact for plain Parseval `G` and `V` commuting with `S_F`; with a
//! `V`-controlled Parseval `G` and `V ≠ I` the residual is generally nonzero.

use cframe::controlled::controlled_from_spectrum;
use cframe::frame::{parseval_distance_decomposition, parsevalize, frame_operator, SampledFrame};
use cframe::linalg::{operator_power, real_vector, Operator};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 8)?, 2, |s| real_vector(&[1.0 + s, s * s]))?;
    let g = parsevalize(&frame)?;
    let v = controlled_from_spectrum(&frame, &[1.5, 0.5])?.controller().clone();

    for (name, v) in [("V = I", Operator::identity(2)), ("V commuting", v.clone())] {
        let d = parseval_distance_decomposition(&frame, &g, &v)?;
        println!("{name}: lhs {:.10} term1 {:.10} term2 {:.3e} residual {:.3e}", d.lhs, d.term1, d.term2, d.residual);
    }

    // V-controlled Parseval: V S_G = I.
    let gv = frame.map(&(&operator_power(&v, -0.5)? * &operator_power(&frame_operator(&frame), -0.5)?));
    let d = parseval_distance_decomposition(&frame, &gv, &v)?;
    println!("controlled Parseval G: residual {:.3e}", d.residual);
    Ok(())
}
