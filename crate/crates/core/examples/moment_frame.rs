//! The frame `F(s) = (1, s)` on `[0, 1]` with Lebesgue measure.
//!
//! Its frame operator is the moment matrix `[[1, 1/2], [1/2, 1/3]]`, so the
//! optimal bounds are `(4 ∓ √13) / 6`. Gauss–Legendre rules of every order
//! `>= 2` reproduce it exactly.

use cframe::frame::{analyze, frame_operator, SampledFrame};
use cframe::linalg::{fmt_sig, real_vector};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    for order in [1, 2, 8] {
        let space = gauss_legendre(0.0, 1.0, order)?;
        let frame = SampledFrame::from_fn(space, 2, |s| real_vector(&[1.0, s]))?;
        println!("order {order}:\n{}", frame_operator(&frame));
    }

    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 8)?, 2, |s| real_vector(&[1.0, s]))?;
    let a = analyze(&frame)?;
    let root = 13f64.sqrt();
    println!("A = {}  (closed form {})", fmt_sig(a.lower_bound, 12), fmt_sig((4.0 - root) / 6.0, 12));
    println!("B = {}  (closed form {})", fmt_sig(a.upper_bound, 12), fmt_sig((4.0 + root) / 6.0, 12));
    println!("condition B/A = {}", fmt_sig(a.condition, 6));
    println!("classification: {}", a.classification);
    Ok(())
}
