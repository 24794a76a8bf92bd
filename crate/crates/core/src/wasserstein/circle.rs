use crate::measures::EmpiricalCircle;

/// W1 on R/Z between two atomic measures: min_c ∫_0^1 |F_μ - F_ν - c|, the
/// minimum attained at a weighted median of the step function F_μ - F_ν.
pub fn w1_circle(mu: &EmpiricalCircle, nu: &EmpiricalCircle) -> f64 {
    let mut events: Vec<(f64, f64)> = mu
        .atoms
        .iter()
        .zip(&mu.weights)
        .map(|(&x, &w)| (x, w))
        .chain(nu.atoms.iter().zip(&nu.weights).map(|(&x, &w)| (x, -w)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    // (value of D on the piece, length of the piece)
    let mut pieces = Vec::with_capacity(events.len() + 1);
    let mut d = 0.0;
    let mut x = 0.0;
    for (pos, w) in events {
        if pos > x {
            pieces.push((d, pos - x));
            x = pos;
        }
        d += w;
    }
    pieces.push((d, 1.0 - x));
    let mut sorted = pieces.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut c = sorted[0].0;
    for &(v, len) in &sorted {
        acc += len;
        c = v;
        if acc >= 0.5 {
            break;
        }
    }
    pieces.iter().map(|&(v, len)| (v - c).abs() * len).sum()
}

/// ∫_a^b |t - x| dx
fn abs_linear(t: f64, a: f64, b: f64) -> f64 {
    if t <= a {
        ((b - t).powi(2) - (a - t).powi(2)) / 2.0
    } else if t >= b {
        ((t - a).powi(2) - (t - b).powi(2)) / 2.0
    } else {
        ((t - a).powi(2) + (b - t).powi(2)) / 2.0
    }
}

/// W1 on R/Z from an atomic measure to Lebesgue measure. Here
/// D(x) = F_μ(x) - x is piecewise linear; the optimal shift c is the median of
/// D under Lebesgue measure, found by bisection.
pub fn w1_circle_lebesgue(mu: &EmpiricalCircle) -> f64 {
    // pieces [a, b) on which F_μ = s
    let mut pieces = Vec::with_capacity(mu.len() + 1);
    let mut s = 0.0;
    let mut x = 0.0;
    for (&pos, &w) in mu.atoms.iter().zip(&mu.weights) {
        if pos > x {
            pieces.push((s, x, pos));
            x = pos;
        }
        s += w;
    }
    pieces.push((s, x, 1.0));
    // |{x : s - x <= c}| is nondecreasing in c
    let below = |c: f64| -> f64 {
        pieces
            .iter()
            .map(|&(s, a, b)| (b - (s - c).max(a)).clamp(0.0, b - a))
            .sum()
    };
    let (mut lo, mut hi) = (-1.0 - 1e-9, 1.0 + 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    pieces.iter().map(|&(s, a, b)| abs_linear(s - c, a, b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::circle_grid;

    fn c(xs: &[f64]) -> EmpiricalCircle {
        EmpiricalCircle::new(xs.to_vec(), None).unwrap()
    }

    #[test]
    fn grid_value() {
        for n in [1usize, 2, 10, 100, 1000] {
            let v = w1_circle_lebesgue(&circle_grid(n).unwrap());
            assert!((v - 0.25 / n as f64).abs() < 1e-12, "n={n} v={v}");
        }
    }

    #[test]
    fn examples() {
        assert!((w1_circle_lebesgue(&c(&[0.0])) - 0.25).abs() < 1e-12);
        assert!((w1_circle(&c(&[0.0, 0.5]), &c(&[0.25, 0.75])) - 0.25).abs() < 1e-15);
        assert!((w1_circle(&c(&[0.05]), &c(&[0.95])) - 0.1).abs() < 1e-12);
        assert_eq!(w1_circle(&c(&[0.1, 0.7]), &c(&[0.7, 0.1])), 0.0);
    }
}
