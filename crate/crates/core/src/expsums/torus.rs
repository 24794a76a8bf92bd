use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ff::FieldContext;
use crate::numeric::{pairwise_sum_c, unit_root};

/// The orbit a ↦ (a·x/q mod 1)_{x ∈ Z} for a ∈ F_q, kept as residues so
/// phases are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusOrbit {
    pub q: u64,
    /// Coordinate order of Z.
    pub residues: Vec<u64>,
}

/// Orbit for the residue set `z`, coordinates in the order given. Pass
/// residues sorted ascending for the default convention, or ζ, ζ², …, ζ^d
/// to match the cyclotomic relation presets.
pub fn torus_orbit(ctx: &FieldContext, z: &[u64]) -> Result<TorusOrbit> {
    if ctx.degree() != 1 {
        return Err(Error::InvalidInput("torus orbits need a prime field".into()));
    }
    let q = ctx.q();
    if z.iter().any(|&x| x >= q) {
        return Err(Error::InvalidInput("residues must lie in [0, q)".into()));
    }
    Ok(TorusOrbit {
        q,
        residues: z.to_vec(),
    })
}

impl TorusOrbit {
    pub fn dim(&self) -> usize {
        self.residues.len()
    }

    pub fn point(&self, a: u64) -> Vec<f64> {
        self.residues
            .iter()
            .map(|&x| ((a as u128 * x as u128) % self.q as u128) as f64 / self.q as f64)
            .collect()
    }

    /// All q points, row-major (q × |Z|).
    pub fn points(&self) -> Vec<f64> {
        (0..self.q).flat_map(|a| self.point(a)).collect()
    }

    /// (1/q) Σ_a e(α · point_a).
    pub fn weyl_sum(&self, alpha: &[i64]) -> Result<Complex64> {
        if alpha.len() != self.dim() {
            return Err(Error::InvalidInput("α has the wrong length".into()));
        }
        let q = self.q as i128;
        let s = alpha
            .iter()
            .zip(&self.residues)
            .fold(0i128, |acc, (&c, &x)| (acc + c as i128 * x as i128).rem_euclid(q)) as u64;
        let terms: Vec<Complex64> = (0..self.q)
            .map(|a| unit_root(((a as u128 * s as u128) % self.q as u128) as u64, self.q))
            .collect();
        Ok(pairwise_sum_c(&terms) / self.q as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;

    #[test]
    fn points() {
        let f5 = build_field(5, 1).unwrap();
        let orb = torus_orbit(&f5, &[1, 4]).unwrap();
        assert_eq!(orb.point(0), vec![0.0, 0.0]);
        assert_eq!(orb.point(1), vec![0.2, 0.8]);
        for a in 0..5 {
            let s: f64 = orb.point(a).iter().sum();
            let expected = ((a * 5) % 5) as f64 / 5.0;
            assert!((s.fract() - expected).abs() < 1e-12);
            assert!(orb.point(a).iter().all(|&c| (0.0..1.0).contains(&c)));
        }
    }

    #[test]
    fn weyl_dichotomy_on_roots_of_unity() {
        let ctx = build_field(31, 1).unwrap();
        let mu = ctx.roots_of_unity(5).unwrap();
        let orb = torus_orbit(&ctx, &mu).unwrap();
        assert!((orb.weyl_sum(&[1; 5]).unwrap() - 1.0).norm() < 1e-9);
        assert!((orb.weyl_sum(&[0; 5]).unwrap() - 1.0).norm() < 1e-9);
        assert!(orb.weyl_sum(&[0, 0, 1, 0, 0]).unwrap().norm() < 1e-9);
        assert!(orb.weyl_sum(&[1, 2]).is_err());
    }
}
