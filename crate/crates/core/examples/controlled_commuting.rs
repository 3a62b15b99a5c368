//! Controllers built on the eigenbasis of `S_F`.
//!
//! With `V = Σ α_k e_k e_k*` the controlled operator `V S_F` has spectrum
//! `{α_k β_k}`, and `V` can be recovered from `S_VF` and `S_F` alone.

use cframe::controlled::{controlled_analyze, controlled_from_spectrum, positivity_from_normality, Mode};
use cframe::frame::{frame_operator, SampledFrame};
use cframe::linalg::{fmt_sig, hermitian_eig, real_vector};
use cframe::measure::gauss_legendre;

fn main() -> cframe::Result<()> {
    let frame = SampledFrame::from_fn(gauss_legendre(0.0, 1.0, 8)?, 3, |s| real_vector(&[1.0, s, s * s]))?;
    let betas = hermitian_eig(&frame_operator(&frame))?.eigenvalues;
    let alphas = [4.0, 1.0, 0.25];

    let cf = controlled_from_spectrum(&frame, &alphas)?;
    let a = controlled_analyze(&cf, Mode::Strict)?;
    println!("V =\n{}", cf.controller());
    println!("classification: {}, V commutes with S_F: {}", a.classification, a.commutes_with_s);

    let mut expect: Vec<f64> = alphas.iter().zip(&betas).map(|(a, b)| a * b).collect();
    expect.sort_by(f64::total_cmp);
    let got = hermitian_eig(&a.controlled_operator)?.eigenvalues;
    for (g, e) in got.iter().zip(&expect) {
        println!("  eigenvalue {}   alpha*beta {}", fmt_sig(*g, 10), fmt_sig(*e, 10));
    }

    let r = positivity_from_normality(&cf)?;
    let ratios: Vec<String> = r.ratios.iter().map(|z| fmt_sig(z.re, 8)).collect();
    let max_im = r.ratios.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    println!("recovered ratios {ratios:?} (max |imag| {max_im:e}), positive: {}", r.positive);
    println!("max |V_recovered - V| = {:e}", r.reconstruction_error);
    Ok(())
}
