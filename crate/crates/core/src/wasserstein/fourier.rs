use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::EmpiricalTorus;
use crate::numeric::{e, pairwise_sum};
use crate::zlattice::TorusSubgroupSampler;

/// Largest k·(2T+1)^k lattice enumeration accepted.
pub const LATTICE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierBoundReport {
    #[serde(rename = "T")]
    pub t: u32,
    pub dim: usize,
    pub head_term: f64,
    pub tail_term: f64,
    pub bound: f64,
    /// Minimizing truncation when a scan was requested.
    pub optimal_t: Option<u32>,
}

/// Second argument of [`fourier_bound_torus`].
#[derive(Debug, Clone, Copy)]
pub enum TorusTarget<'a> {
    Empirical(&'a EmpiricalTorus),
    Lebesgue,
    /// Haar measure on the subgroup H_Z; its coefficient at h is 1 when h is
    /// a relation and 0 otherwise.
    Haar(&'a TorusSubgroupSampler),
}

/// Whether the character h is trivial on H_Z = {V s}: (hV)_i must be a
/// multiple of d_i on torsion coordinates and 0 on free ones.
fn is_relation(s: &TorusSubgroupSampler, h: &[i64]) -> bool {
    let r = s.torsion_divisors.len();
    (0..s.z_size).all(|i| {
        let c: i128 = h.iter().zip(&s.v).map(|(&hj, row)| hj as i128 * row[i] as i128).sum();
        if i < r {
            c.rem_euclid(s.torsion_divisors[i] as i128) == 0
        } else {
            c == 0
        }
    })
}

fn coefficient(m: &EmpiricalTorus, h: &[i64]) -> Complex64 {
    m.points
        .iter()
        .zip(&m.weights)
        .map(|(x, &w)| {
            let phase: f64 = h
                .iter()
                .zip(x)
                .map(|(&hj, &xj)| (hj as f64 * xj).rem_euclid(1.0))
                .sum();
            e(phase) * w
        })
        .sum()
}

fn lattice(k: usize, t: u32) -> Vec<Vec<i64>> {
    let side = 2 * t as usize + 1;
    let total = side.pow(k as u32);
    (0..total)
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let c = (idx % side) as i64 - t as i64;
                    idx /= side;
                    c
                })
                .collect::<Vec<i64>>()
        })
        .filter(|h| h.iter().any(|&c| c != 0))
        .collect()
}

/// 4√3√k/T + (Σ_{1 ≤ ‖h‖∞ ≤ T} |μ̂(h) - ν̂(h)|² / ‖h‖²)^{1/2}, an upper bound on
/// W1 between measures on (R/Z)^k.
pub fn fourier_bound_torus(
    mu: &EmpiricalTorus,
    nu: TorusTarget<'_>,
    t: u32,
) -> Result<FourierBoundReport> {
    let k = mu.dim;
    let other_dim = match nu {
        TorusTarget::Empirical(n) => n.dim,
        TorusTarget::Haar(s) => s.z_size,
        TorusTarget::Lebesgue => k,
    };
    if other_dim != k {
        return Err(Error::InvalidInput("measures live on different tori".into()));
    }
    if t == 0 {
        return Err(Error::InvalidInput("truncation T must be positive".into()));
    }
    let size = k as f64 * (2.0 * t as f64 + 1.0).powi(k as i32);
    if size > LATTICE_LIMIT {
        return Err(Error::LatticeGuard {
            size,
            limit: LATTICE_LIMIT,
        });
    }
    let terms: Vec<f64> = lattice(k, t)
        .par_iter()
        .map(|h| {
            let a = coefficient(mu, h);
            let b = match nu {
                TorusTarget::Empirical(n) => coefficient(n, h),
                TorusTarget::Lebesgue => Complex64::new(0.0, 0.0),
                TorusTarget::Haar(s) => Complex64::new(if is_relation(s, h) { 1.0 } else { 0.0 }, 0.0),
            };
            let norm2: f64 = h.iter().map(|&c| (c * c) as f64).sum();
            (a - b).norm_sqr() / norm2
        })
        .collect();
    let head = 4.0 * 3f64.sqrt() * (k as f64).sqrt() / t as f64;
    let tail = pairwise_sum(&terms).sqrt();
    Ok(FourierBoundReport {
        t,
        dim: k,
        head_term: head,
        tail_term: tail,
        bound: head + tail,
        optimal_t: None,
    })
}

/// Evaluate the bound on each T of `grid` and keep the smallest.
pub fn fourier_bound_scan(
    mu: &EmpiricalTorus,
    nu: TorusTarget<'_>,
    grid: &[u32],
) -> Result<FourierBoundReport> {
    let mut best: Option<FourierBoundReport> = None;
    for &t in grid {
        let r = fourier_bound_torus(mu, nu, t)?;
        if best.as_ref().is_none_or(|b| r.bound < b.bound) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or_else(|| Error::InvalidInput("empty T grid".into()))?;
    best.optimal_t = Some(best.t);
    Ok(best)
}

/// Roughly log-spaced truncations 1..=t_max.
pub fn log_grid(t_max: u32, per_decade: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0..=((t_max as f64).log10() * per_decade as f64).ceil() as usize)
        .map(|k| 10f64.powf(k as f64 / per_decade as f64).round() as u32)
        .filter(|&t| t >= 1 && t <= t_max)
        .collect();
    out.push(t_max);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{circle_grid, EmpiricalCircle};
    use crate::wasserstein::{w1_circle, w1_circle_lebesgue};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn as_torus(c: &EmpiricalCircle) -> EmpiricalTorus {
        EmpiricalTorus::new(1, c.atoms.iter().map(|&x| vec![x]).collect(), Some(c.weights.clone())).unwrap()
    }

    #[test]
    fn equal_measures_give_head_only() {
        let m = EmpiricalTorus::new(2, vec![vec![0.1, 0.2], vec![0.7, 0.4]], None).unwrap();
        let r = fourier_bound_torus(&m, TorusTarget::Empirical(&m), 5).unwrap();
        assert_eq!(r.tail_term, 0.0);
        assert!((r.bound - 4.0 * 6f64.sqrt() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn grid_at_t_equals_n() {
        for n in [2usize, 10, 100] {
            let g = as_torus(&circle_grid(n).unwrap());
            let r = fourier_bound_torus(&g, TorusTarget::Lebesgue, n as u32).unwrap();
            let nf = n as f64;
            // only h = ±N survive
            assert!((r.tail_term - 2f64.sqrt() / nf).abs() < 1e-9);
            assert!(r.bound <= 9.0 / nf);
            assert!(r.bound >= 0.25 / nf);
        }
    }

    #[test]
    fn dominates_exact_circle_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = EmpiricalCircle::new((0..4).map(|_| rng.gen()).collect(), None).unwrap();
            let b = EmpiricalCircle::new((0..4).map(|_| rng.gen()).collect(), None).unwrap();
            let w = w1_circle(&a, &b);
            let r = fourier_bound_scan(&as_torus(&a), TorusTarget::Empirical(&as_torus(&b)), &log_grid(200, 4)).unwrap();
            assert!(r.bound >= w);
            let l = fourier_bound_torus(&as_torus(&a), TorusTarget::Lebesgue, 30).unwrap();
            assert!(l.bound >= w1_circle_lebesgue(&a));
        }
    }

    #[test]
    fn gaussian_period_orbit_against_subgroup() {
        use crate::expsums::torus_orbit;
        use crate::ff::build_field;
        use crate::zlattice::{build_sampler, relation_preset_prime};
        let s = build_sampler(&relation_preset_prime(3).unwrap(), 0).unwrap();
        assert!(is_relation(&s, &[2, 2, 2]) && is_relation(&s, &[-1, -1, -1]));
        assert!(!is_relation(&s, &[1, 0, 0]) && !is_relation(&s, &[1, 1, 0]));
        let mut prev = f64::INFINITY;
        for q in [7u64, 31, 103] {
            let ctx = build_field(q, 1).unwrap();
            let orbit = torus_orbit(&ctx, &ctx.cyclic_roots(3).unwrap()).unwrap();
            let m = EmpiricalTorus::from_orbit(&orbit).unwrap();
            let r = fourier_bound_scan(&m, TorusTarget::Haar(&s), &log_grid(12, 4)).unwrap();
            assert!(r.bound < prev);
            prev = r.bound;
        }
    }

    #[test]
    fn lattice_guard() {
        let m = EmpiricalTorus::new(3, vec![vec![0.0; 3]], None).unwrap();
        assert!(matches!(
            fourier_bound_torus(&m, TorusTarget::Lebesgue, 200),
            Err(Error::LatticeGuard { .. })
        ));
        assert_eq!(lattice(2, 1).len(), 8);
    }
}
