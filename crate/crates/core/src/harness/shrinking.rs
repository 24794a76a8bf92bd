use num_complex::Complex64;

use crate::expsums::SumFamily;

/// #{a : |S(a) - t| ≤ ε} over every stored value of the family.
pub fn shrinking_target_count(family: &SumFamily, t: Complex64, eps: f64) -> usize {
    family.values.iter().filter(|v| (*v - t).norm() <= eps).count()
}
