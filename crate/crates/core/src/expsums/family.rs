use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{is_prime, FieldContext};
use crate::numeric::{fmt17, unit_root};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    GaussianPeriod { d: u64 },
    RootSet { poly: Vec<i64> },
    HyperKloosterman { r: u32 },
    Mellin,
    SubgroupNormalized { d: u64 },
}

impl FamilyKind {
    /// Families indexed by a ∈ F_q (as opposed to characters).
    pub fn is_additive(&self) -> bool {
        !matches!(self, FamilyKind::Mellin)
    }
}

/// The values {S(a)} of one family of sums, indexed by
/// `first_index, first_index + 1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumFamily {
    pub q: u64,
    pub kind: FamilyKind,
    pub first_index: u64,
    pub values: Vec<Complex64>,
    /// Scalar already applied to every value.
    pub normalization: f64,
}

impl SumFamily {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn indexed(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first_index + i as u64, v))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `index,re,im`, one row per parameter, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, v) in self.indexed() {
            writeln!(w, "{},{},{}", i, fmt17(v.re), fmt17(v.im))?;
        }
        Ok(())
    }
}

fn require_prime_field(ctx: &FieldContext) -> Result<()> {
    if ctx.degree() != 1 {
        return Err(Error::InvalidInput(
            "sums e(ax/q) need a prime field (n = 1)".into(),
        ));
    }
    Ok(())
}

/// Σ_x e(a x / q) with the residues a·x mod q summed in ascending order, so
/// the value depends only on the multiset of residues.
fn residue_sum(a: u64, set: &[u64], q: u64) -> Complex64 {
    let mut r: Vec<u64> = set
        .iter()
        .map(|&x| ((a as u128 * x as u128) % q as u128) as u64)
        .collect();
    r.sort_unstable();
    r.into_iter().map(|k| unit_root(k, q)).sum()
}

/// S_d(q, a) = Σ_{x ∈ μ_d} e(ax/q) for every a ∈ F_q.
pub fn gaussian_period_family(ctx: &FieldContext, d: u64) -> Result<SumFamily> {
    require_prime_field(ctx)?;
    let q = ctx.q();
    let mu = ctx.roots_of_unity(d)?;
    let values = if ctx.has_tables() {
        // S_d(q, aζ) = S_d(q, a): evaluate once per coset of μ_d.
        let cosets = (q - 1) / d;
        let reps: Vec<Complex64> = (0..cosets)
            .into_par_iter()
            .map(|c| residue_sum(ctx.exp(c), &mu, q))
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        values[0] = Complex64::new(d as f64, 0.0);
        for a in 1..q {
            let k = ctx.dlog(a)?;
            values[a as usize] = reps[(k % cosets) as usize];
        }
        values
    } else {
        (0..q).into_par_iter().map(|a| residue_sum(a, &mu, q)).collect()
    };
    Ok(SumFamily {
        q,
        kind: FamilyKind::GaussianPeriod { d },
        first_index: 0,
        values,
        normalization: 1.0,
    })
}

/// S_g(q, a) = Σ_{g(x) ≡ 0} e(ax/q) for a monic g that splits into distinct
/// linear factors mod q.
pub fn rootset_family(ctx: &FieldContext, g: &[i64]) -> Result<SumFamily> {
    require_prime_field(ctx)?;
    let q = ctx.q();
    let scan = ctx.poly_roots_mod(g, true)?;
    if !scan.distinct {
        return Err(Error::NotTotallySplit {
            q,
            found: scan.roots.len(),
            degree: g.len() - 1,
        });
    }
    let values = (0..q)
        .into_par_iter()
        .map(|a| residue_sum(a, &scan.roots, q))
        .collect();
    Ok(SumFamily {
        q,
        kind: FamilyKind::RootSet { poly: g.to_vec() },
        first_index: 0,
        values,
        normalization: 1.0,
    })
}

/// d^{-1/2} Σ_{x ∈ μ_d} e(ax/q) for a prime d.
pub fn subgroup_family_normalized(ctx: &FieldContext, d: u64) -> Result<SumFamily> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let mut fam = gaussian_period_family(ctx, d)?;
    let s = 1.0 / (d as f64).sqrt();
    fam.values.iter_mut().for_each(|v| *v *= s);
    fam.kind = FamilyKind::SubgroupNormalized { d };
    fam.normalization = s;
    Ok(fam)
}
