use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{smith_normal_form, RelationModule};
use crate::error::{Error, Result};
use crate::numeric::e;
use crate::rng::sample_blocks;

/// Free coordinates are drawn on the dyadic grid 2^-FREE_BITS Z so that
/// t = V·s mod 1 is computed exactly in integers.
const FREE_BITS: u32 = 52;

/// Haar sampler on H_Z = {t ∈ (R/Z)^Z : α·t ∈ Z for every relation α}.
#[derive(Debug, Clone)]
pub struct TorusSubgroupSampler {
    pub z_size: usize,
    /// Unimodular change of basis, row-major.
    pub v: Vec<Vec<i64>>,
    /// Nonzero Smith invariants d_1 | … | d_r.
    pub torsion_divisors: Vec<u64>,
    pub free_rank: usize,
    pub seed: u64,
    lcm: u64,
}

pub fn build_sampler(module: &RelationModule, seed: u64) -> Result<TorusSubgroupSampler> {
    if module.z_size == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let snf = smith_normal_form(&module.generators)?;
    let torsion: Vec<u64> = snf
        .diagonal()
        .iter()
        .take(snf.rank())
        .map(|d| d.to_u64().ok_or(Error::Overflow { bits: 64 }))
        .collect::<Result<_>>()?;
    let lcm = torsion
        .iter()
        .try_fold(1u64, |l, &d| {
            let g = l.gcd(&d);
            (l / g).checked_mul(d)
        })
        .filter(|&l| l < 1 << 62)
        .ok_or(Error::Overflow { bits: 62 })?;
    let v = snf.v.to_i64_rows().ok_or(Error::Overflow { bits: 64 })?;
    Ok(TorusSubgroupSampler {
        z_size: module.z_size,
        free_rank: module.z_size - torsion.len(),
        torsion_divisors: torsion,
        v,
        seed,
        lcm,
    })
}

impl TorusSubgroupSampler {
    fn point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let r = self.torsion_divisors.len();
        let s_tor: Vec<u128> = self
            .torsion_divisors
            .iter()
            .map(|&d| rng.gen_range(0..d) as u128 * (self.lcm / d) as u128)
            .collect();
        let s_free: Vec<i128> = (0..self.free_rank)
            .map(|_| rng.gen_range(0..1u64 << FREE_BITS) as i128)
            .collect();
        let l = self.lcm as i128;
        let g = 1i128 << FREE_BITS;
        self.v
            .iter()
            .map(|row| {
                let tor = row[..r]
                    .iter()
                    .zip(&s_tor)
                    .fold(0i128, |acc, (&c, &s)| (acc + (c as i128).rem_euclid(l) * s as i128).rem_euclid(l));
                let free = row[r..]
                    .iter()
                    .zip(&s_free)
                    .fold(0i128, |acc, (&c, &s)| (acc + (c as i128).rem_euclid(g) * s).rem_euclid(g));
                let t = tor as f64 / l as f64 + free as f64 / g as f64;
                if t >= 1.0 {
                    t - 1.0
                } else {
                    t
                }
            })
            .collect()
    }

    /// `m` points of H_Z; reproducible for a fixed seed and any thread count.
    pub fn sample(&self, m: usize) -> Vec<Vec<f64>> {
        sample_blocks(self.seed, m, |rng| self.point(rng))
    }

    /// Largest distance to Z of α·t over the generators α of `module` and
    /// the given points.
    pub fn max_character_defect(module: &RelationModule, points: &[Vec<f64>]) -> f64 {
        let rows = module.rows();
        points
            .iter()
            .flat_map(|t| {
                rows.iter().map(move |a| {
                    let s: f64 = a.iter().zip(t).map(|(&c, &x)| c as f64 * x).sum();
                    (s - s.round()).abs()
                })
            })
            .fold(0.0, f64::max)
    }
}

/// σ(t) = Σ_j e(t_j) for `m` Haar samples.
pub fn sigma_pushforward_sample(sampler: &TorusSubgroupSampler, m: usize) -> Vec<Complex64> {
    sample_blocks(sampler.seed, m, |rng| {
        sampler.point(rng).into_iter().map(e).sum()
    })
}

/// V as a BigInt matrix, for callers that want to re-verify unimodularity.
impl TorusSubgroupSampler {
    pub fn v_matrix(&self) -> super::IntMatrix {
        let mut m = super::IntMatrix::zeros(self.z_size, self.z_size);
        for (i, row) in self.v.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(c));
            }
        }
        m
    }
}
