use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// (4√3·√|Z|·(|Z|+1)·C_Z^{1/deg}, 1/deg): W1(ν_p, μ_Z) ≤ constant · |p|^{-exponent}.
pub fn rate_bound_constant(z_size: usize, field_degree: u32, c_z: f64) -> Result<(f64, f64)> {
    if z_size == 0 || field_degree == 0 || !(c_z > 0.0) {
        return Err(Error::InvalidInput(
            "need |Z| >= 1, degree >= 1 and C_Z > 0".into(),
        ));
    }
    let z = z_size as f64;
    let deg = field_degree as f64;
    Ok((4.0 * 3f64.sqrt() * z.sqrt() * (z + 1.0) * c_z.powf(1.0 / deg), 1.0 / deg))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Diagnostic {
    pub value: f64,
    #[serde(rename = "T")]
    pub t: u32,
    pub label: &'static str,
}

/// 1/T + (Σ_{n=1}^{T} |Ŵ_n|² / (n(n+2)))^{1/2} for Weyl sums Ŵ_n of the
/// symmetric-power characters. The constant is not certified.
pub fn su2_borda_diagnostic(weyl_values: &[Complex64], t: u32) -> Result<Su2Diagnostic> {
    if t == 0 || weyl_values.len() < t as usize {
        return Err(Error::InvalidInput(format!(
            "need Weyl sums for n = 1..{t}"
        )));
    }
    let s: f64 = weyl_values[..t as usize]
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let n = (k + 1) as f64;
            w.norm_sqr() / (n * (n + 2.0))
        })
        .sum();
    Ok(Su2Diagnostic {
        value: 1.0 / t as f64 + s.sqrt(),
        t,
        label: "diagnostic, constant not certified",
    })
}
