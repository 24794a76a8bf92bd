use num_complex::Complex64;

use super::auction::w1_auction_planar;
use super::cost::CostMatrix;
use super::result::TransportResult;
use super::simplex::{w1_exact_discrete, EXACT_SIZE_LIMIT};
use super::sinkhorn::{w1_sinkhorn, EpsSchedule};
use crate::error::{Error, Result};
use crate::measures::Empirical2D;

/// Which planar solver [`w1_planar`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarMethod {
    /// Network simplex up to the size guard, then the auction for uniform
    /// measures whose sizes divide, then Sinkhorn.
    Exact,
    Sinkhorn,
}

/// Largest n·m handed to the dense Sinkhorn solver.
pub const SINKHORN_SIZE_LIMIT: usize = 25_000_000;

/// Target ε for the auction, relative to the diameter of the point cloud.
pub const AUCTION_RELATIVE_EPS: f64 = 1e-7;

/// Group bit-identical points; returns the distinct points and their counts.
fn merge_duplicates(points: &[Complex64]) -> (Vec<Complex64>, Vec<usize>) {
    let mut keys: Vec<(u64, u64)> = points
        .iter()
        .map(|z| (z.re.to_bits(), z.im.to_bits()))
        .collect();
    keys.sort_unstable();
    let mut pts = Vec::new();
    let mut counts = Vec::new();
    for g in keys.chunk_by(|a, b| a == b) {
        pts.push(Complex64::new(f64::from_bits(g[0].0), f64::from_bits(g[0].1)));
        counts.push(g.len());
    }
    (pts, counts)
}

fn diameter(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for z in a.iter().chain(b) {
        lo = [lo[0].min(z.re), lo[1].min(z.im)];
        hi = [hi[0].max(z.re), hi[1].max(z.im)];
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

/// W1 between two planar measures with the solver chosen by size.
pub fn w1_planar(mu: &Empirical2D, nu: &Empirical2D, method: PlanarMethod) -> Result<TransportResult> {
    let (n, m) = (mu.len(), nu.len());
    if method == PlanarMethod::Exact && n * m <= EXACT_SIZE_LIMIT {
        let c = CostMatrix::euclidean(&mu.points, &nu.points);
        return w1_exact_discrete(&mu.weights, &nu.weights, &c);
    }
    if method == PlanarMethod::Exact && mu.is_uniform() && nu.is_uniform() {
        // persons: the larger uniform cloud; objects: the smaller one, each
        // carrying ratio × multiplicity slots
        let (big, small, swapped) = if m >= n { (nu, mu, false) } else { (mu, nu, true) };
        if big.len() % small.len() == 0 {
            let ratio = big.len() / small.len();
            let (objects, counts) = merge_duplicates(&small.points);
            let cap: Vec<usize> = counts.iter().map(|c| c * ratio).collect();
            let eps = AUCTION_RELATIVE_EPS * diameter(&big.points, &objects).max(f64::MIN_POSITIVE);
            let mut r = w1_auction_planar(&big.points, &objects, &cap, eps)?;
            if !swapped {
                // report potentials in (mu, nu) order
                std::mem::swap(&mut r.dual_u, &mut r.dual_v);
            }
            r.plan = None;
            return Ok(r);
        }
    }
    if n * m > SINKHORN_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: n * m,
            limit: SINKHORN_SIZE_LIMIT,
        });
    }
    let c = CostMatrix::euclidean(&mu.points, &nu.points);
    w1_sinkhorn(&mu.weights, &nu.weights, &c, &EpsSchedule::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn auction_route_matches_simplex_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<Complex64> = (0..700).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let mut b: Vec<Complex64> = (0..70).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        b.extend(b.clone());
        let mu = Empirical2D::uniform(a).unwrap();
        let nu = Empirical2D::uniform(b.clone()).unwrap();
        let exact = w1_planar(&mu, &nu, PlanarMethod::Exact).unwrap();
        let (objects, counts) = merge_duplicates(&b);
        assert_eq!(counts, vec![2; 70]);
        let cap: Vec<usize> = counts.iter().map(|c| c * 5).collect();
        let auc = w1_auction_planar(&mu.points, &objects, &cap, 1e-10).unwrap();
        assert!((exact.value - auc.value).abs() < 1e-8);
    }
}
