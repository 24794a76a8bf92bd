use crate::error::{Error, Result};

const RANGE_SLACK: f64 = 1e-9;

/// Character of the n-th symmetric power of SU(2) at trace t = 2cos θ:
/// sin((n+1)θ)/sin θ, continuously extended to ±(n+1)·(±1)^n at θ ∈ {0, π}.
/// Evaluated by the Chebyshev recurrence χ_{k+1} = t χ_k - χ_{k-1}, which
/// has no removable singularity.
pub fn su2_character(t: f64, n: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Mean of χ_n over a family of traces in [-2, 2].
pub fn su2_weyl_diagnostic(values: &[f64], n: u32) -> Result<f64> {
    if let Some(&v) = values.iter().find(|v| v.abs() > 2.0 + RANGE_SLACK) {
        return Err(Error::ValueOutOfRange { value: v });
    }
    if values.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let total: f64 = values.iter().map(|&v| su2_character(v.clamp(-2.0, 2.0), n)).sum();
    Ok(total / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_sine_ratio_away_from_poles() {
        for n in 0..8 {
            for k in 1..50 {
                let th = PI * k as f64 / 50.0;
                let expected = ((n + 1) as f64 * th).sin() / th.sin();
                assert!((su2_character(2.0 * th.cos(), n) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn limits_at_identity_and_minus_identity() {
        for n in 0..10u32 {
            assert_eq!(su2_weyl_diagnostic(&[2.0, 2.0], n).unwrap(), (n + 1) as f64);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((su2_character(-2.0, n) - sign * (n + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn n2_equally_spaced_two_ways() {
        for m in [4usize, 5, 7, 12] {
            let th: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
            let vals: Vec<f64> = th.iter().map(|t| 2.0 * t.cos()).collect();
            let got = su2_weyl_diagnostic(&vals, 2).unwrap();
            // χ_2(θ) = 1 + 2cos 2θ
            let oracle: f64 = th.iter().map(|t| 1.0 + 2.0 * (2.0 * t).cos()).sum::<f64>() / m as f64;
            assert!((got - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            su2_weyl_diagnostic(&[0.0, 2.1], 1),
            Err(Error::ValueOutOfRange { .. })
        ));
    }
}
