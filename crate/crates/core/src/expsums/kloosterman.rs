use num_complex::Complex64;
use rustfft::FftPlanner;

use super::family::{FamilyKind, SumFamily};
use crate::error::{Error, Result};
use crate::ff::FieldContext;

/// Maximum number of tuples the brute-force oracle will enumerate.
pub const DIRECT_COST_LIMIT: f64 = 1e8;

/// Normalized hyper-Kloosterman sums Kl_r(a; F_q) for every a.
///
/// With f(k) = ψ(g^k), the unnormalized sum at a = g^m is the r-fold cyclic
/// convolution f * … * f evaluated at m, computed with one FFT of length
/// q - 1. Index 0 holds 0: no tuple of units has product 0, and that slot
/// is dropped from every empirical measure.
pub fn kloosterman_family(ctx: &FieldContext, r: u32) -> Result<SumFamily> {
    if r < 2 {
        return Err(Error::InvalidInput("Kloosterman rank must be >= 2".into()));
    }
    ctx.require_tables()?;
    let q = ctx.q();
    let len = (q - 1) as usize;
    let psi = ctx.additive_character();
    let mut buf: Vec<Complex64> = (0..len as u64).map(|k| psi.eval(ctx.exp(k))).collect();

    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for z in buf.iter_mut() {
        *z = z.powu(r);
    }
    planner.plan_fft_inverse(len).process(&mut buf);

    let norm = 1.0 / (q as f64).powf((r as f64 - 1.0) / 2.0);
    let scale = norm / len as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
    for (m, z) in buf.into_iter().enumerate() {
        values[ctx.exp(m as u64) as usize] = z * scale;
    }
    Ok(SumFamily {
        q,
        kind: FamilyKind::HyperKloosterman { r },
        first_index: 0,
        values,
        normalization: norm,
    })
}

/// Literal (r-1)-fold sum, x_r = a / (x_1 ⋯ x_{r-1}); brute-force oracle.
pub fn kloosterman_direct(ctx: &FieldContext, r: u32, a: u64) -> Result<Complex64> {
    if r < 2 {
        return Err(Error::InvalidInput("Kloosterman rank must be >= 2".into()));
    }
    let q = ctx.q();
    let needed = ((q - 1) as f64).powi(r as i32 - 1);
    if needed > DIRECT_COST_LIMIT {
        return Err(Error::CostGuard {
            needed,
            limit: DIRECT_COST_LIMIT,
        });
    }
    let norm = 1.0 / (q as f64).powf((r as f64 - 1.0) / 2.0);
    if a == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let psi = ctx.additive_character();
    let free = (r - 1) as usize;
    let mut xs = vec![1u64; free];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let (sum, prod) = xs
            .iter()
            .fold((0u64, 1u64), |(s, p), &x| (ctx.add(s, x), ctx.mul(p, x)));
        let last = ctx.mul(a, ctx.inv(prod).expect("units have inverses"));
        total += psi.eval(ctx.add(sum, last));
        // odometer over (F_q^×)^{r-1}
        let mut i = 0;
        loop {
            if i == free {
                return Ok(total * norm);
            }
            xs[i] += 1;
            if xs[i] < q {
                break;
            }
            xs[i] = 1;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;
    use std::f64::consts::PI;

    #[test]
    fn f5_rank2_value() {
        let ctx = build_field(5, 1).unwrap();
        let expected = (2.0 + 2.0 * (4.0 * PI / 5.0).cos()) / 5f64.sqrt();
        let fam = kloosterman_family(&ctx, 2).unwrap();
        assert!((fam.values[1].re - expected).abs() < 1e-12);
        assert!((expected - 0.170820).abs() < 1e-6);
        let direct = kloosterman_direct(&ctx, 2, 1).unwrap();
        assert!((direct.re - expected).abs() < 1e-12);
    }

    #[test]
    fn f3_rank2_value() {
        let ctx = build_field(3, 1).unwrap();
        // tuples (1, 1) and (2, 2): ψ(2) + ψ(4) = e(2/3) + e(1/3) = -1
        let v = kloosterman_direct(&ctx, 2, 1).unwrap();
        assert!((v - Complex64::new(-1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-12);
        let fam = kloosterman_family(&ctx, 2).unwrap();
        assert!((fam.values[1] - v).norm() < 1e-12);
    }

    #[test]
    fn fft_agrees_with_direct() {
        for q in [5u64, 7, 11, 13, 31, 61] {
            let ctx = build_field(q, 1).unwrap();
            for r in [2u32, 3] {
                let fam = kloosterman_family(&ctx, r).unwrap();
                for a in 1..q {
                    let d = kloosterman_direct(&ctx, r, a).unwrap();
                    assert!((fam.values[a as usize] - d).norm() <= 1e-8, "q={q} r={r} a={a}");
                }
            }
        }
    }

    #[test]
    fn extension_field_agrees_with_direct() {
        for (p, n) in [(3u64, 2u32), (2, 4), (5, 2)] {
            let ctx = build_field(p, n).unwrap();
            let fam = kloosterman_family(&ctx, 2).unwrap();
            for a in 1..ctx.q() {
                let d = kloosterman_direct(&ctx, 2, a).unwrap();
                assert!((fam.values[a as usize] - d).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn rank2_real_and_bounded_and_mean() {
        for q in [101u64, 1009] {
            let ctx = build_field(q, 1).unwrap();
            let fam = kloosterman_family(&ctx, 2).unwrap();
            assert!(fam.max_imag() <= 1e-9);
            assert!(fam.values[1..].iter().all(|v| v.re.abs() <= 2.0 + 1e-9));
            let mean: f64 = fam.values[1..].iter().map(|v| v.re).sum::<f64>() / (q - 1) as f64;
            let expected = 1.0 / ((q as f64).sqrt() * (q - 1) as f64);
            assert!((mean - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let ctx = build_field(23, 1).unwrap();
        for a in 1..23 {
            let v = kloosterman_direct(&ctx, 2, a).unwrap();
            assert!((v - v.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn guards() {
        let ctx = build_field(1009, 1).unwrap();
        assert!(matches!(kloosterman_direct(&ctx, 4, 1), Err(Error::CostGuard { .. })));
        let big = crate::ff::FieldContext::new(101, 1, crate::ff::FieldOptions { table_cap: 10 }).unwrap();
        assert!(matches!(kloosterman_family(&big, 2), Err(Error::FieldTooLarge(_))));
        assert_eq!(kloosterman_direct(&ctx, 2, 0).unwrap(), Complex64::new(0.0, 0.0));
    }
}
