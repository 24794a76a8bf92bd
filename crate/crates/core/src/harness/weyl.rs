use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsums::torus_orbit;
use crate::ff::{build_field, is_prime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylException {
    pub alpha: Vec<i64>,
    pub l1: u64,
    /// q ≤ ‖α‖₁^{d-1}.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSweep {
    pub q: u64,
    pub d: u64,
    pub checked: usize,
    /// Largest distance from a Weyl sum to {0, 1}.
    pub max_deviation: f64,
    /// Relations that should have given 1 but did not.
    pub missed_relations: usize,
    /// α off the line of all-ones whose Weyl sum is 1.
    pub exceptions: Vec<WeylException>,
}

impl WeylSweep {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_deviation <= tol
            && self.missed_relations == 0
            && self.exceptions.iter().all(|e| e.within_bound)
    }
}

/// Weyl sums of the μ_d orbit over F_q for every α with ‖α‖∞ ≤ max_norm.
pub fn weyl_vanishing_sweep(q: u64, d: u64, max_norm: i64) -> Result<WeylSweep> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if max_norm < 0 {
        return Err(Error::InvalidInput("max_norm must be >= 0".into()));
    }
    let ctx = build_field(q, 1)?;
    let orbit = torus_orbit(&ctx, &ctx.cyclic_roots(d)?)?;
    let side = (2 * max_norm + 1) as usize;
    let total = side.pow(d as u32);
    let mut out = WeylSweep {
        q,
        d,
        checked: total,
        max_deviation: 0.0,
        missed_relations: 0,
        exceptions: Vec::new(),
    };
    for mut idx in 0..total {
        let alpha: Vec<i64> = (0..d)
            .map(|_| {
                let c = (idx % side) as i64 - max_norm;
                idx /= side;
                c
            })
            .collect();
        let w = orbit.weyl_sum(&alpha)?;
        let dev = w.norm().min((w - 1.0).norm());
        out.max_deviation = out.max_deviation.max(dev);
        let one = (w - 1.0).norm() < 0.5;
        let relation = alpha.iter().all(|&c| c == alpha[0]);
        if relation && !one {
            out.missed_relations += 1;
        }
        if one && !relation {
            let l1: u64 = alpha.iter().map(|c| c.unsigned_abs()).sum();
            out.exceptions.push(WeylException {
                within_bound: (q as f64) <= (l1 as f64).powi(d as i32 - 1),
                alpha,
                l1,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_field() {
        let s = weyl_vanishing_sweep(7, 3, 1).unwrap();
        assert_eq!(s.checked, 27);
        assert!(s.holds(1e-9));
        // no accidental relations in the unit box
        assert!(s.exceptions.is_empty());
        let s = weyl_vanishing_sweep(7, 3, 2).unwrap();
        assert!(s.holds(1e-9));
    }
}
