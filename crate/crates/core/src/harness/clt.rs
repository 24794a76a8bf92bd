use serde::{Deserialize, Serialize};

use super::sweep::planar_with_allowance;
use crate::error::{Error, Result};
use crate::expsums::subgroup_family_normalized;
use crate::ff::build_field;
use crate::measures::{empirical_from_family, gamma_d_sampler, Measure, ReferenceMeasure};
use crate::rng::sub_seed;
use crate::wasserstein::{rate_bound_constant, w1_planar, PlanarMethod};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltOptions {
    /// Reference samples per atom of the family measure.
    pub sample_factor: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub method: PlanarMethod,
    pub allowance_factor: f64,
}

impl Default for CltOptions {
    fn default() -> Self {
        CltOptions {
            sample_factor: 2,
            bootstrap: 5,
            seed: 0,
            method: PlanarMethod::Exact,
            allowance_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltRecord {
    pub q: u64,
    pub d: u64,
    pub atoms: usize,
    pub w1_gaussian: f64,
    pub allowance_gaussian: Option<f64>,
    pub w1_gamma: f64,
    pub allowance_gamma: Option<f64>,
    /// 4√3·√d·(d+1)·q^{-1/(d-1)}.
    pub gamma_bound: f64,
    /// w1_gamma ≤ gamma_bound + allowance_factor·allowance_gamma.
    pub within_bound: bool,
}

fn planar_family(q: u64, d: u64) -> Result<crate::measures::Empirical2D> {
    let ctx = build_field(q, 1)?;
    let fam = subgroup_family_normalized(&ctx, d)?;
    match empirical_from_family(&fam, false, 1.0, 0.0)? {
        Measure::Plane(p) => Ok(p),
        _ => Err(Error::InvalidInput("family unexpectedly real".into())),
    }
}

fn as_plane(m: Measure) -> Result<crate::measures::Empirical2D> {
    match m {
        Measure::Plane(p) => Ok(p),
        _ => Err(Error::InvalidInput("expected a planar sample".into())),
    }
}

/// For each (q, d), the normalized subgroup sums over a ∈ F_q against the
/// complex Gaussian and against γ_d, both sampled.
pub fn clt_regime_sweep(pairs: &[(u64, u64)], opts: &CltOptions) -> Result<Vec<CltRecord>> {
    pairs
        .iter()
        .map(|&(q, d)| {
            let mu = planar_family(q, d)?;
            let m = opts.sample_factor * mu.len();
            let seed = sub_seed(opts.seed, q);
            let (w_g, a_g, _, _) = planar_with_allowance(
                &mu,
                |s| as_plane(ReferenceMeasure::ComplexGaussianHalfId.sample(m, s)?),
                opts.method,
                seed,
                opts.bootstrap,
            )?;
            let (w_d, a_d, _, _) = planar_with_allowance(
                &mu,
                |s| gamma_d_sampler(d as usize, s, m),
                opts.method,
                sub_seed(seed, 1 << 32),
                opts.bootstrap,
            )?;
            let (c, e) = rate_bound_constant(d as usize, (d - 1) as u32, 1.0)?;
            let bound = c * (q as f64).powf(-e);
            Ok(CltRecord {
                q,
                d,
                atoms: mu.len(),
                w1_gaussian: w_g,
                allowance_gaussian: a_g,
                w1_gamma: w_d,
                allowance_gamma: a_d,
                gamma_bound: bound,
                within_bound: w_d <= bound + opts.allowance_factor * a_d.unwrap_or(0.0),
            })
        })
        .collect()
}

/// W1 between m samples of γ_d and m samples of the complex Gaussian.
pub fn gamma_to_gaussian(d: usize, m: usize, seed: u64) -> Result<f64> {
    let g = gamma_d_sampler(d, sub_seed(seed, d as u64), m)?;
    let n = as_plane(ReferenceMeasure::ComplexGaussianHalfId.sample(m, sub_seed(seed, 1 << 40))?)?;
    Ok(w1_planar(&g, &n, PlanarMethod::Exact)?.value)
}
