use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DistanceMethod, ExperimentConfig, FamilySpec, RateSpec};
use crate::error::{Error, Result};
use crate::expsums::{torus_orbit, FamilyKind};
use crate::ff::{build_field, is_prime};
use crate::measures::{
    circle_grid, empirical_from_family, Empirical2D, EmpiricalTorus, Measure, REAL_TOLERANCE,
};
use crate::numeric::least_squares;
use crate::rng::sub_seed;
use crate::wasserstein::{
    fourier_bound_scan, log_grid, w1_circle_lebesgue, w1_line_reference, w1_planar, PlanarMethod,
    TorusTarget, LATTICE_LIMIT,
};

/// Outcome for one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub q: u64,
    /// W1, or the Fourier-side upper bound for the `fourier` method.
    pub w1: Option<f64>,
    /// Standard deviation of W1 over the bootstrap resamples.
    pub allowance: Option<f64>,
    pub atoms: usize,
    pub reference_atoms: usize,
    pub solver: Option<String>,
    pub fourier_t: Option<u32>,
    pub error: Option<String>,
    /// Wall time; not serialized so that outputs are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl PrimeRecord {
    fn empty(q: u64) -> Self {
        PrimeRecord {
            q,
            w1: None,
            allowance: None,
            atoms: 0,
            reference_atoms: 0,
            solver: None,
            fourier_t: None,
            error: None,
            seconds: 0.0,
        }
    }

    fn failed(q: u64, e: &Error) -> Self {
        PrimeRecord {
            error: Some(e.to_string()),
            ..PrimeRecord::empty(q)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub pairs: Vec<(u64, f64)>,
    /// Least squares of log W1 against log q.
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// max W1·q^exponent / constant over the pairs.
    pub bound_check: Option<f64>,
    /// q with W1 > constant·q^{-exponent} + allowance_factor·allowance.
    pub bound_violations: Vec<u64>,
}

/// Fit log W1 = slope·log q + intercept over records with positive W1.
pub fn fit_rate(records: &[PrimeRecord], rate: Option<RateSpec>, allowance_factor: f64) -> Result<RateFit> {
    let ok: Vec<&PrimeRecord> = records
        .iter()
        .filter(|r| r.w1.is_some_and(|w| w > 0.0))
        .collect();
    if ok.len() < 3 {
        return Err(Error::InsufficientData(ok.len()));
    }
    let xs: Vec<f64> = ok.iter().map(|r| (r.q as f64).ln()).collect();
    let ys: Vec<f64> = ok.iter().map(|r| r.w1.unwrap().ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let (bound_check, bound_violations) = match rate {
        Some(RateSpec { constant, exponent }) => {
            let worst = ok
                .iter()
                .map(|r| r.w1.unwrap() * (r.q as f64).powf(exponent) / constant)
                .fold(f64::NEG_INFINITY, f64::max);
            let bad = ok
                .iter()
                .filter(|r| {
                    let limit = constant * (r.q as f64).powf(-exponent)
                        + allowance_factor * r.allowance.unwrap_or(0.0);
                    r.w1.unwrap() > limit
                })
                .map(|r| r.q)
                .collect();
            (Some(worst), bad)
        }
        None => (None, Vec::new()),
    };
    Ok(RateFit {
        pairs: ok.iter().map(|r| (r.q, r.w1.unwrap())).collect(),
        slope,
        intercept,
        residuals,
        bound_check,
        bound_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub records: Vec<PrimeRecord>,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    pub checks: Vec<CheckOutcome>,
}

impl SweepReport {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn to_plane(m: Measure) -> Result<Empirical2D> {
    match m {
        Measure::Plane(p) => Ok(p),
        Measure::Line(l) => Empirical2D::new(
            l.atoms.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Some(l.weights),
        ),
        other => Err(Error::InvalidInput(format!(
            "{} cannot be placed in the plane",
            other.type_name()
        ))),
    }
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// W1 against `samples(seed)` for the main seed, plus the spread over
/// `bootstrap` further seeds.
pub fn planar_with_allowance<F>(
    mu: &Empirical2D,
    samples: F,
    method: PlanarMethod,
    seed: u64,
    bootstrap: usize,
) -> Result<(f64, Option<f64>, usize, String)>
where
    F: Fn(u64) -> Result<Empirical2D>,
{
    let nu = samples(seed)?;
    let main = w1_planar(mu, &nu, method)?;
    let solver = serde_json::to_value(main.method)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    let allowance = if bootstrap >= 2 {
        let vals = (1..=bootstrap as u64)
            .map(|k| Ok(w1_planar(mu, &samples(sub_seed(seed, k))?, method)?.value))
            .collect::<Result<Vec<f64>>>()?;
        Some(std_dev(&vals))
    } else {
        None
    };
    Ok((main.value, allowance, nu.len(), solver))
}

fn family_measure(cfg: &ExperimentConfig, q: u64) -> Result<Measure> {
    if cfg.family == FamilySpec::CircleGrid {
        return Ok(Measure::Circle(circle_grid(q as usize)?));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let ctx = build_field(q, 1)?;
    let fam = cfg.family.build(&ctx)?;
    // Kl_r(0) is a placeholder; every other family averages over all of F_q
    let drop_zero = matches!(fam.kind, FamilyKind::HyperKloosterman { .. });
    empirical_from_family(&fam, drop_zero, 1.0, REAL_TOLERANCE)
}

/// Largest T ≤ t_max whose lattice fits under the guard (at least 1).
fn fourier_t_cap(k: usize, t_max: u32) -> u32 {
    (1..=t_max)
        .rev()
        .find(|&t| k as f64 * (2.0 * t as f64 + 1.0).powi(k as i32) <= LATTICE_LIMIT)
        .unwrap_or(1)
}

fn compute_one(cfg: &ExperimentConfig, q: u64) -> Result<PrimeRecord> {
    let seed = sub_seed(cfg.seed, q);
    let mut rec = PrimeRecord::empty(q);
    match cfg.method {
        DistanceMethod::Fourier => {
            let FamilySpec::GaussianPeriod { d } = cfg.family else {
                return Err(Error::Config("fourier needs a gaussian_period family".into()));
            };
            if !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
            let ctx = build_field(q, 1)?;
            let orbit = torus_orbit(&ctx, &ctx.cyclic_roots(d)?)?;
            let mu = EmpiricalTorus::from_orbit(&orbit)?;
            let sampler = cfg.reference.sampler(seed)?;
            let target = match &sampler {
                Some(s) => TorusTarget::Haar(s),
                None => TorusTarget::Lebesgue,
            };
            let grid = log_grid(fourier_t_cap(mu.dim, cfg.fourier_t_max), 4);
            let r = fourier_bound_scan(&mu, target, &grid)?;
            rec.w1 = Some(r.bound);
            rec.fourier_t = r.optimal_t;
            rec.atoms = mu.len();
            rec.solver = Some("fourier".into());
        }
        DistanceMethod::Line => {
            let Measure::Line(mu) = family_measure(cfg, q)? else {
                return Err(Error::InvalidInput("family values are not real".into()));
            };
            let reference = cfg.reference.measure()?.expect("line reference");
            rec.w1 = Some(w1_line_reference(&mu, &reference)?);
            rec.atoms = mu.len();
            rec.solver = Some("line".into());
        }
        DistanceMethod::Circle => {
            let Measure::Circle(mu) = family_measure(cfg, q)? else {
                return Err(Error::InvalidInput("not a circle measure".into()));
            };
            rec.w1 = Some(w1_circle_lebesgue(&mu));
            rec.atoms = mu.len();
            rec.solver = Some("circle".into());
        }
        DistanceMethod::Exact2d | DistanceMethod::Sinkhorn => {
            let mu = to_plane(family_measure(cfg, q)?)?;
            let m = cfg.sample_factor * mu.len();
            let method = if cfg.method == DistanceMethod::Exact2d {
                PlanarMethod::Exact
            } else {
                PlanarMethod::Sinkhorn
            };
            let (w, allowance, n_ref, solver) = planar_with_allowance(
                &mu,
                |s| to_plane(cfg.reference.sample(m, s)?),
                method,
                seed,
                cfg.bootstrap,
            )?;
            rec.w1 = Some(w);
            rec.allowance = allowance;
            rec.atoms = mu.len();
            rec.reference_atoms = n_ref;
            rec.solver = Some(solver);
        }
    }
    Ok(rec)
}

fn evaluate_checks(cfg: &ExperimentConfig, records: &[PrimeRecord], fit: Option<&RateFit>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    if let Some(max) = cfg.check.max_slope {
        out.push(match fit {
            Some(f) => CheckOutcome {
                name: "max_slope".into(),
                passed: f.slope <= max,
                detail: format!("slope {:.4} vs {max}", f.slope),
            },
            None => CheckOutcome {
                name: "max_slope".into(),
                passed: false,
                detail: "no fit".into(),
            },
        });
    }
    if cfg.check.rate_bound {
        let failed: Vec<u64> = records.iter().filter(|r| r.w1.is_none()).map(|r| r.q).collect();
        let violations = fit.map(|f| f.bound_violations.clone()).unwrap_or_default();
        out.push(CheckOutcome {
            name: "rate_bound".into(),
            passed: fit.is_some() && violations.is_empty() && failed.is_empty(),
            detail: format!("violations {violations:?}, failed {failed:?}"),
        });
    }
    out
}

/// Run a configured sweep. Records come back in ascending q whatever the
/// thread count; a prime that runs over `max_seconds_per_prime` aborts the
/// sweep.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let values = cfg.primes.values()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let abort = AtomicBool::new(false);
    let results: Vec<Option<Result<PrimeRecord>>> = pool.install(|| {
        values
            .par_iter()
            .map(|&q| {
                if abort.load(Ordering::Relaxed) {
                    return None;
                }
                let start = Instant::now();
                let mut rec = compute_one(cfg, q).unwrap_or_else(|e| PrimeRecord::failed(q, &e));
                rec.seconds = start.elapsed().as_secs_f64();
                if cfg.max_seconds_per_prime.is_some_and(|lim| rec.seconds > lim) {
                    abort.store(true, Ordering::Relaxed);
                    return Some(Err(Error::WallTime { q, secs: rec.seconds }));
                }
                Some(Ok(rec))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    for r in results.into_iter().flatten() {
        records.push(r?);
    }
    let (fit, fit_error) = match fit_rate(&records, cfg.rate, cfg.allowance_factor) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let checks = evaluate_checks(cfg, &records, fit.as_ref());
    Ok(SweepReport {
        config: cfg.clone(),
        records,
        fit,
        fit_error,
        checks,
    })
}
