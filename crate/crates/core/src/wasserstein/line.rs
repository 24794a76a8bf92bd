use crate::error::{Error, Result};
use crate::measures::{
    arcsine_cdf, sato_tate_antiderivative, sato_tate_cdf, Empirical1D, ReferenceMeasure,
};

/// ∫|F_μ - F_ν| between two atomic measures, exact up to rounding.
pub fn w1_line(mu: &Empirical1D, nu: &Empirical1D) -> f64 {
    let (a, b) = (&mu.atoms, &nu.atoms);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut x = f64::NEG_INFINITY;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        if x.is_finite() {
            total += (fa - fb).abs() * (next - x);
        }
        while i < a.len() && a[i] == next {
            fa += mu.weights[i];
            i += 1;
        }
        while j < b.len() && b[j] == next {
            fb += nu.weights[j];
            j += 1;
        }
        x = next;
    }
    total
}

/// (∫_0^1 |F_μ^{-1} - F_ν^{-1}|^p)^{1/p} over the merged grid of cumulative
/// weights.
pub fn wp_line(mu: &Empirical1D, nu: &Empirical1D, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput("p must be >= 1".into()));
    }
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (mu.weights[0], nu.weights[0]);
    let mut t = 0.0;
    let mut total = 0.0;
    loop {
        let next = ca.min(cb);
        total += (next - t).max(0.0) * (mu.atoms[i] - nu.atoms[j]).abs().powf(p);
        t = next;
        let last_a = i + 1 == mu.len();
        let last_b = j + 1 == nu.len();
        if last_a && last_b {
            break;
        }
        // advance whichever quantile block ends first; ties advance both
        let adv_a = !last_a && (ca <= cb || last_b);
        let adv_b = !last_b && (cb <= ca || last_a);
        if adv_a {
            i += 1;
            ca += mu.weights[i];
        }
        if adv_b {
            j += 1;
            cb += nu.weights[j];
        }
    }
    Ok(total.powf(1.0 / p))
}

/// A reference law on the line with compact support and an exact or
/// numerically integrable CDF.
pub trait LineReference {
    fn cdf(&self, x: f64) -> f64;
    /// ∫_{lo}^x F, if known in closed form.
    fn cdf_integral(&self, _x: f64) -> Option<f64> {
        None
    }
    fn support(&self) -> (f64, f64);
}

struct SatoTateLaw;
struct ArcSineLaw;

impl LineReference for SatoTateLaw {
    fn cdf(&self, x: f64) -> f64 {
        sato_tate_cdf(x)
    }
    fn cdf_integral(&self, x: f64) -> Option<f64> {
        Some(sato_tate_antiderivative(x))
    }
    fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }
}

fn arcsine_antiderivative(x: f64) -> f64 {
    let g = |x: f64| x / 2.0 + (x * (x / 2.0).asin() + (4.0 - x * x).max(0.0).sqrt()) / std::f64::consts::PI;
    let x2 = x.clamp(-2.0, 2.0);
    g(x2) - g(-2.0) + (x - x2).max(0.0)
}

impl LineReference for ArcSineLaw {
    fn cdf(&self, x: f64) -> f64 {
        arcsine_cdf(x)
    }
    fn cdf_integral(&self, x: f64) -> Option<f64> {
        Some(arcsine_antiderivative(x))
    }
    fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }
}

const QUAD_TOL: f64 = 1e-12;

/// ∫_a^b |s - F(x)| dx for a nondecreasing F.
fn piece<R: LineReference + ?Sized>(r: &R, s: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let integral = |lo: f64, hi: f64| -> f64 {
        match (r.cdf_integral(lo), r.cdf_integral(hi)) {
            (Some(x), Some(y)) => y - x,
            _ => crate::numeric::adaptive_simpson(&|x| r.cdf(x), lo, hi, QUAD_TOL),
        }
    };
    let (fa, fb) = (r.cdf(a), r.cdf(b));
    let cross = if fa >= s {
        a
    } else if fb <= s {
        b
    } else {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if r.cdf(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let below = s * (cross - a) - integral(a, cross);
    let above = integral(cross, b) - s * (b - cross);
    below.max(0.0) + above.max(0.0)
}

/// ∫|F_μ - F| against an analytic law with compact support.
pub fn w1_line_analytic<R: LineReference + ?Sized>(mu: &Empirical1D, r: &R) -> f64 {
    let (lo, hi) = r.support();
    let start = lo.min(mu.atoms[0]);
    let end = hi.max(*mu.atoms.last().expect("nonempty"));
    let mut total = 0.0;
    let mut x = start;
    let mut s = 0.0;
    for (&a, &w) in mu.atoms.iter().zip(&mu.weights) {
        total += piece(r, s, x, a);
        s += w;
        x = a;
    }
    total + piece(r, s.min(1.0), x, end)
}

/// W1 from an atomic measure to a 1-D reference measure.
pub fn w1_line_reference(mu: &Empirical1D, reference: &ReferenceMeasure) -> Result<f64> {
    match reference {
        ReferenceMeasure::SatoTate => Ok(w1_line_analytic(mu, &SatoTateLaw)),
        ReferenceMeasure::ArcSine2cos => Ok(w1_line_analytic(mu, &ArcSineLaw)),
        ReferenceMeasure::ComplexGaussianHalfId => Err(Error::UnboundedSupport),
        other => Err(Error::InvalidInput(format!(
            "{} is not a measure on the line",
            other.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_simpson;

    fn m(xs: &[f64]) -> Empirical1D {
        Empirical1D::uniform(xs.to_vec()).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(w1_line(&m(&[0.0]), &m(&[1.0])), 1.0);
        assert_eq!(w1_line(&m(&[0.0, 1.0]), &m(&[0.5])), 0.5);
        assert_eq!(wp_line(&m(&[0.0]), &m(&[1.0]), 2.0).unwrap(), 1.0);
        assert_eq!(wp_line(&m(&[0.0, 1.0]), &m(&[0.5]), 1.0).unwrap(), 0.5);
        assert_eq!(w1_line(&m(&[1.0, 2.0, 2.0]), &m(&[2.0, 1.0, 2.0])), 0.0);
    }

    #[test]
    fn weighted_quantile_grid() {
        let a = Empirical1D::new(vec![0.0, 1.0], Some(vec![0.3, 0.7])).unwrap();
        let b = Empirical1D::new(vec![0.0, 2.0, 3.0], Some(vec![0.5, 0.25, 0.25])).unwrap();
        let v = w1_line(&a, &b);
        // |F_a - F_b| = 0.2 on [0,1), 0.5 on [1,2), 0.25 on [2,3)
        assert!((v - 0.95).abs() < 1e-15);
        assert!((wp_line(&a, &b, 1.0).unwrap() - v).abs() < 1e-14);
    }

    #[test]
    fn analytic_matches_quadrature() {
        let mu = m(&[-1.7, -0.4, 0.0, 0.3, 1.9]);
        let fmu = |x: f64| mu.cdf(x);
        let q: f64 = [-2.0, -1.7, -0.4, 0.0, 0.3, 1.9, 2.0]
            .windows(2)
            .map(|w| adaptive_simpson(&|x| (fmu(x) - sato_tate_cdf(x)).abs(), w[0], w[1], 1e-13))
            .sum();
        let v = w1_line_reference(&mu, &ReferenceMeasure::SatoTate).unwrap();
        assert!((v - q).abs() < 1e-9, "{v} {q}");
        // atoms outside the support
        let far = m(&[3.0]);
        let v = w1_line_reference(&far, &ReferenceMeasure::SatoTate).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_antiderivative_ok() {
        for k in 0..=20 {
            let x = -2.0 + 0.2 * k as f64;
            let q = adaptive_simpson(&arcsine_cdf, -2.0, x, 1e-13);
            assert!((q - arcsine_antiderivative(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_planar_reference() {
        assert!(matches!(
            w1_line_reference(&m(&[0.0]), &ReferenceMeasure::ComplexGaussianHalfId),
            Err(Error::UnboundedSupport)
        ));
    }
}
