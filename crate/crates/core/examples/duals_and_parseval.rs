//! Canonical dual `S⁻¹F`, reconstruction, and the Parseval frame `S^{-1/2}F`.

use cframe::frame::{analyze, canonical_dual, parsevalize, reconstruct, SampledFrame};
use cframe::linalg::{fmt_scalar, norm_sq, real_vector, Vector};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 8)?, 2, |s| real_vector(&[1.0, s]))?;
    let dual = canonical_dual(&frame)?;

    println!("node        dual sample        (4 - 6s, -6 + 12s)");
    for (s, g) in frame.space().nodes().iter().zip(dual.samples()) {
        println!(
            "{s:.6}  ({}, {})  ({:.6}, {:.6})",
            fmt_scalar(g[0], 6),
            fmt_scalar(g[1], 6),
            4.0 - 6.0 * s,
            -6.0 + 12.0 * s
        );
    }

    let f: Vector = real_vector(&[0.3, -1.7]);
    let back = reconstruct(&frame, &dual, &f)?;
    println!("reconstruction error: {:e}", norm_sq(&(back - &f)).sqrt());

    let p = parsevalize(&frame)?;
    let pa = analyze(&p)?;
    println!("S^-1/2 F: bounds [{}, {}], {}", pa.lower_bound, pa.upper_bound, pa.classification);
    Ok(())
}
