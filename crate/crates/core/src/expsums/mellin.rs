use num_complex::Complex64;
use rustfft::FftPlanner;

use super::family::{FamilyKind, SumFamily};
use crate::error::{Error, Result};
use crate::ff::{FieldContext, MultiplicativeCharacter};

fn check(ctx: &FieldContext) -> Result<()> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if ctx.degree() != 1 {
        return Err(Error::InvalidInput("Mellin sums are over prime fields".into()));
    }
    ctx.require_tables()
}

/// ψ((x+1)/(x-1)) for x ≠ 0, 1.
fn mobius_phase(ctx: &FieldContext, x: u64) -> Complex64 {
    let num = ctx.add(x, 1);
    let den = ctx.sub(x, 1);
    let t = ctx.mul(num, ctx.inv(den).expect("x != 1"));
    ctx.additive_character().eval(t)
}

/// R(χ_j; p) = p^{-1/2} Σ_{x ∉ {0,1}} χ_j(x) ψ((x+1)/(x-1)) for the p - 2
/// nontrivial characters j = 1, …, p - 2, via one FFT of length p - 1.
pub fn mellin_family(ctx: &FieldContext) -> Result<SumFamily> {
    check(ctx)?;
    let p = ctx.p();
    let len = (p - 1) as usize;
    let mut buf: Vec<Complex64> = (0..len as u64)
        .map(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0) // x = g^0 = 1 is the pole
            } else {
                mobius_phase(ctx, ctx.exp(k))
            }
        })
        .collect();
    // Σ_k e(jk/(p-1)) h(k) is the unnormalized inverse DFT
    FftPlanner::<f64>::new().plan_fft_inverse(len).process(&mut buf);
    let norm = 1.0 / (p as f64).sqrt();
    let values = buf[1..].iter().map(|z| z * norm).collect();
    Ok(SumFamily {
        q: p,
        kind: FamilyKind::Mellin,
        first_index: 1,
        values,
        normalization: norm,
    })
}

/// Direct summation of R(χ_j; p); oracle for [`mellin_family`].
pub fn mellin_direct(ctx: &FieldContext, j: u64) -> Result<Complex64> {
    check(ctx)?;
    let chi = MultiplicativeCharacter { index: j };
    let mut total = Complex64::new(0.0, 0.0);
    for x in 2..ctx.p() {
        let c = chi.eval(ctx, x)?.expect("x != 0");
        total += c * mobius_phase(ctx, x);
    }
    Ok(total / (ctx.p() as f64).sqrt())
}
