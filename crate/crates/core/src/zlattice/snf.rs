use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Entry size (bits) past which the reduction gives up.
pub const DEFAULT_BIT_CAP: u64 = 4096;

/// D = U·A·V with U, V unimodular and D diagonal, d_1 | d_2 | … | d_r, then
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|v| !v.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Result<SnfDecomposition> {
    smith_normal_form_capped(a, DEFAULT_BIT_CAP)
}

/// Smallest nonzero |entry| in the trailing block from (t, t); ties go to the
/// lowest row, then the lowest column.
fn pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = d.get(i, j).abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| v < *b) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form_capped(a: &IntMatrix, bit_cap: u64) -> Result<SnfDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = pivot(&d, t) else {
                return Ok(SnfDecomposition { u, v, d });
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let f = -d.get(i, t).div_floor(&p);
                if !f.is_zero() {
                    d.add_row_multiple(i, t, &f);
                    u.add_row_multiple(i, t, &f);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let f = -d.get(t, j).div_floor(&p);
                if !f.is_zero() {
                    d.add_col_multiple(j, t, &f);
                    v.add_col_multiple(j, t, &f);
                }
                clean &= d.get(t, j).is_zero();
            }
            if d.max_bits().max(u.max_bits()).max(v.max_bits()) > bit_cap {
                return Err(Error::Overflow { bits: bit_cap });
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Ok(SnfDecomposition { u, v, d })
}
