use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::empirical::{Empirical1D, Empirical2D, EmpiricalCircle, EmpiricalTorus, Measure};
use crate::error::{Error, Result};
use crate::numeric::e;
use crate::rng::sample_blocks;
use crate::zlattice::{sigma_pushforward_sample, TorusSubgroupSampler};

/// Density (1/π)√(1 - x²/4) on [-2, 2] (trace of a Haar element of SU(2)).
pub fn sato_tate_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (1.0 - x * x / 4.0).sqrt() / PI
    }
}

pub fn sato_tate_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
    v.clamp(0.0, 1.0)
}

/// Φ with Φ' = sato_tate_cdf on [-2, 2] and Φ(-2) = 0.
pub fn sato_tate_antiderivative(x: f64) -> f64 {
    let g = |x: f64| {
        let s = (4.0 - x * x).max(0.0);
        x / 2.0 - s.powf(1.5) / (12.0 * PI) + (x * (x / 2.0).asin() + s.sqrt()) / PI
    };
    let x2 = x.clamp(-2.0, 2.0);
    g(x2) - g(-2.0) + (x - x2).max(0.0)
}

/// Law of 2cos(2πu), u uniform.
pub fn arcsine_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    (0.5 + (x / 2.0).asin() / PI).clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub enum ReferenceMeasure {
    SatoTate,
    ArcSine2cos,
    /// Complex normal with Re, Im independent of variance 1/2.
    ComplexGaussianHalfId,
    /// σ_* of Haar measure on H_Z, scaled.
    HaarPushforward { sampler: TorusSubgroupSampler, scale: f64 },
    LebesgueCircle,
    LebesgueTorus(usize),
}

impl ReferenceMeasure {
    pub fn name(&self) -> &'static str {
        match self {
            ReferenceMeasure::SatoTate => "SatoTate",
            ReferenceMeasure::ArcSine2cos => "ArcSine2cos",
            ReferenceMeasure::ComplexGaussianHalfId => "ComplexGaussianHalfId",
            ReferenceMeasure::HaarPushforward { .. } => "HaarPushforward",
            ReferenceMeasure::LebesgueCircle => "LebesgueCircle",
            ReferenceMeasure::LebesgueTorus(_) => "LebesgueTorus",
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            ReferenceMeasure::SatoTate => Some(sato_tate_cdf(x)),
            ReferenceMeasure::ArcSine2cos => Some(arcsine_cdf(x)),
            ReferenceMeasure::LebesgueCircle => Some(x.clamp(0.0, 1.0)),
            _ => None,
        }
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            ReferenceMeasure::SatoTate => Some(sato_tate_density(x)),
            ReferenceMeasure::ArcSine2cos => Some(if x.abs() < 2.0 {
                1.0 / (PI * (4.0 - x * x).sqrt())
            } else {
                0.0
            }),
            ReferenceMeasure::LebesgueCircle => Some(if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    /// Compact support on the line, when the measure lives there.
    pub fn line_support(&self) -> Option<(f64, f64)> {
        match self {
            ReferenceMeasure::SatoTate | ReferenceMeasure::ArcSine2cos => Some((-2.0, 2.0)),
            _ => None,
        }
    }

    /// `m` uniform-weight samples, reproducible from `seed`.
    pub fn sample(&self, m: usize, seed: u64) -> Result<Measure> {
        if m == 0 {
            return Err(Error::InvalidInput("sample size must be positive".into()));
        }
        Ok(match self {
            // trace of a Haar element of SU(2) = 2 × a coordinate of a uniform point of S³
            ReferenceMeasure::SatoTate => Measure::Line(Empirical1D::uniform(sample_blocks(
                seed,
                m,
                |r| {
                    let g: [f64; 4] = std::array::from_fn(|_| r.sample(StandardNormal));
                    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    2.0 * g[0] / n
                },
            ))?),
            ReferenceMeasure::ArcSine2cos => Measure::Line(Empirical1D::uniform(sample_blocks(
                seed,
                m,
                |r| 2.0 * (TAU * r.gen::<f64>()).cos(),
            ))?),
            ReferenceMeasure::ComplexGaussianHalfId => {
                let s = 0.5f64.sqrt();
                Measure::Plane(Empirical2D::uniform(sample_blocks(seed, m, |r| {
                    let a: f64 = r.sample(StandardNormal);
                    let b: f64 = r.sample(StandardNormal);
                    Complex64::new(a * s, b * s)
                }))?)
            }
            ReferenceMeasure::HaarPushforward { sampler, scale } => {
                let mut s = sampler.clone();
                s.seed = seed;
                let pts: Vec<Complex64> = sigma_pushforward_sample(&s, m)
                    .into_iter()
                    .map(|z| z * *scale)
                    .collect();
                Measure::Plane(Empirical2D::uniform(pts)?)
            }
            ReferenceMeasure::LebesgueCircle => Measure::Circle(EmpiricalCircle::new(
                sample_blocks(seed, m, |r| r.gen::<f64>()),
                None,
            )?),
            ReferenceMeasure::LebesgueTorus(k) => Measure::Torus(EmpiricalTorus::new(
                *k,
                sample_blocks(seed, m, |r| (0..*k).map(|_| r.gen::<f64>()).collect()),
                None,
            )?),
        })
    }
}

/// `m` samples of d^{-1/2}(z_1 + … + z_{d-1} + 1/(z_1⋯z_{d-1})), z_i
/// independent and uniform on the unit circle.
pub fn gamma_d_sampler(d: usize, seed: u64, m: usize) -> Result<Empirical2D> {
    if d < 2 {
        return Err(Error::InvalidInput("γ_d needs d >= 2".into()));
    }
    let s = 1.0 / (d as f64).sqrt();
    Empirical2D::uniform(sample_blocks(seed, m, |r| {
        let mut total = 0.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..d - 1 {
            let u: f64 = r.gen();
            sum += e(u);
            total += u;
        }
        (sum + e(-total)) * s
    }))
}
