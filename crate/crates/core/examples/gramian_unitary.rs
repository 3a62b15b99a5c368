//! The weighted `V`-Gramian is unchanged by unitaries commuting with `V` and
//! changed by other invertible maps.

use cframe::controlled::{gramian, gramian_difference, ControlledFrame};
use cframe::frame::{parsevalize, SampledFrame};
use cframe::linalg::{real_vector, Operator};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 6)?, 2, |s| real_vector(&[1.0, s]))?;

    let p = ControlledFrame::new(parsevalize(&frame)?, Operator::identity(2))?;
    let g = gramian(&p);
    println!("Parseval frame: max |G^2 - G| = {:e}", (&g * &g).max_abs_diff(&g));

    let cf = ControlledFrame::new(frame, Operator::identity(2))?;
    for theta in [0.3f64, 1.0, 2.5] {
        let rot = Operator::from_real_rows(&[[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]);
        println!("rotation {theta}: difference {:e}", gramian_difference(&cf, &rot));
    }
    let shear = Operator::from_real_rows(&[[1.0, 0.5], [0.0, 1.0]]);
    println!("shear: difference {:e}", gramian_difference(&cf, &shear));
    Ok(())
}
