//! Two families `F`, `G` on the same samples are equivalent when
//! `F = P G` for an invertible `P`; the controlled dual is equivalent to the
//! frame itself with `P = S_VF⁻¹ V`.

use cframe::controlled::{controlled_dual, controlled_from_spectrum, controlled_operator, frame_equivalent, Mode};
use cframe::frame::SampledFrame;
use cframe::linalg::real_vector;
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let g = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 6)?, 3, |s| real_vector(&[0.5, s / 2.0, s * s / 2.0]))?;
    let f = g.scaled(2.0 / 3.0);
    let e = frame_equivalent(&f, &g)?;
    println!("F = (2/3) G: equivalent {}, P =\n{}", e.equivalent, e.p.expect("equivalent"));

    let cf = controlled_from_spectrum(&g, &[1.0, 2.0, 5.0])?;
    let dual = controlled_dual(&cf, Mode::Strict)?;
    let e = frame_equivalent(&dual, &g)?;
    let expect = &controlled_operator(&cf).inverse()? * cf.controller();
    println!(
        "controlled dual: equivalent {}, max |P - S_VF^-1 V| = {:e}",
        e.equivalent,
        e.p.expect("equivalent").max_abs_diff(&expect)
    );
    Ok(())
}
