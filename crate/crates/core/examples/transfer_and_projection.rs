//! Moving a controlled frame by `L = S_F^p`, and restricting it to the range
//! of a projection that commutes with `V`.

use cframe::controlled::{controlled_analyze, controlled_from_spectrum, controlled_operator, project, transfer, Mode};
use cframe::frame::{frame_operator, SampledFrame};
use cframe::linalg::{operator_power, real_vector, Operator};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(-1.0, 1.0, 8)?, 3, |s| real_vector(&[1.0, s, s * s]))?;
    let cf = controlled_from_spectrum(&frame, &[2.0, 1.0, 3.0])?;
    let s = frame_operator(&frame);
    let s_vf = controlled_operator(&cf);

    for beta in [-1.0, 0.0, 1.0, 2.0, 3.0] {
        let l = operator_power(&s, (beta - 1.0) / 2.0)?;
        let moved = transfer(&cf, &l)?;
        let expect = &(&l * &s_vf) * &l;
        let got = controlled_operator(&moved);
        let a = controlled_analyze(&moved, Mode::Strict)?;
        println!(
            "beta {beta:>4}: relative defect {:e}, {}",
            got.max_abs_diff(&expect) / expect.max_norm(),
            a.classification
        );
    }

    // Projections built from eigenvectors of V commute with it.
    let eig = cframe::linalg::hermitian_eig(cf.controller())?;
    let q = eig.vector(2);
    let u = &Operator::identity(3) - &Operator::outer(&q, &q);
    let p = project(&cf, &u, Mode::Strict)?;
    let r = p.restricted.expect("rank 2");
    println!("projected onto rank {}: bounds [{:.6}, {:.6}], {}", p.basis.len(), r.lower_bound, r.upper_bound, r.classification);
    Ok(())
}
