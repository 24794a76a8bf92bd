use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expsums::{SumFamily, TorusOrbit};
use crate::numeric::fmt17;

/// Values with |Im| below this on every atom make a family real.
pub const REAL_TOLERANCE: f64 = 1e-9;

fn normalize(weights: Option<Vec<f64>>, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("a measure needs at least one atom".into()));
    }
    match weights {
        None => Ok(vec![1.0 / n as f64; n]),
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidInput("weights and atoms differ in length".into()));
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(Error::InvalidInput("weights must be positive".into()));
            }
            let total: f64 = w.iter().sum();
            Ok(w.into_iter().map(|x| x / total).collect())
        }
    }
}

fn check_finite(xs: impl IntoIterator<Item = f64>) -> Result<()> {
    if xs.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite atom".into()))
    }
}

/// Atoms on the line, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical1D {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Empirical1D {
    pub fn new(atoms: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        check_finite(atoms.iter().copied())?;
        let w = normalize(weights, atoms.len())?;
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(w).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (atoms, weights) = pairs.into_iter().unzip();
        Ok(Empirical1D { atoms, weights })
    }

    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|&a| a <= x);
        self.weights[..k].iter().sum::<f64>().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

/// Atoms on R/Z, reduced into [0, 1) and sorted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCircle {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EmpiricalCircle {
    pub fn new(atoms: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        let reduced: Vec<f64> = atoms
            .into_iter()
            .map(|x| {
                let r = x.rem_euclid(1.0);
                if r >= 1.0 {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        let line = Empirical1D::new(reduced, weights)?;
        Ok(EmpiricalCircle {
            atoms: line.atoms,
            weights: line.weights,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// ℓ(x, y) = min(|x - y|, 1 - |x - y|) on R/Z.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Points of (R/Z)^k with the product metric (Σ ℓ(x_j, y_j)²)^{1/2}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTorus {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl EmpiricalTorus {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidInput(format!("points must have {dim} coordinates")));
        }
        check_finite(points.iter().flatten().copied())?;
        let weights = normalize(weights, points.len())?;
        let points = points
            .into_iter()
            .map(|p| p.into_iter().map(|x| x.rem_euclid(1.0) % 1.0).collect())
            .collect();
        Ok(EmpiricalTorus { dim, points, weights })
    }

    pub fn from_orbit(orbit: &TorusOrbit) -> Result<Self> {
        Self::new(orbit.dim(), (0..orbit.q).map(|a| orbit.point(a)).collect(), None)
    }

    pub fn distance(x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| circle_distance(a, b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Points of the complex plane with the Euclidean metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical2D {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl Empirical2D {
    pub fn new(points: Vec<Complex64>, weights: Option<Vec<f64>>) -> Result<Self> {
        check_finite(points.iter().flat_map(|z| [z.re, z.im]))?;
        let weights = normalize(weights, points.len())?;
        Ok(Empirical2D { points, weights })
    }

    pub fn uniform(points: Vec<Complex64>) -> Result<Self> {
        Self::new(points, None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| (x - w).abs() <= 1e-15)
    }

    pub fn mean(&self) -> Complex64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| z * w).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Line(Empirical1D),
    Circle(EmpiricalCircle),
    Torus(EmpiricalTorus),
    Plane(Empirical2D),
}

impl Measure {
    pub fn type_name(&self) -> &'static str {
        match self {
            Measure::Line(_) => "Empirical1D",
            Measure::Circle(_) => "EmpiricalCircle",
            Measure::Torus(_) => "EmpiricalTorus",
            Measure::Plane(_) => "Empirical2D",
        }
    }

    pub fn metric_name(&self) -> &'static str {
        match self {
            Measure::Line(_) => "abs",
            Measure::Circle(_) => "circle",
            Measure::Torus(_) => "torus_l2",
            Measure::Plane(_) => "euclidean",
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            Measure::Line(m) => &m.weights,
            Measure::Circle(m) => &m.weights,
            Measure::Torus(m) => &m.weights,
            Measure::Plane(m) => &m.weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights().len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights().is_empty()
    }

    /// CSV rows `index,re,im` (torus: `index,x1,…,xk`), 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match self {
            Measure::Line(m) => write_real(&mut w, &m.atoms),
            Measure::Circle(m) => write_real(&mut w, &m.atoms),
            Measure::Plane(m) => {
                writeln!(w, "index,re,im")?;
                for (i, z) in m.points.iter().enumerate() {
                    writeln!(w, "{},{},{}", i, fmt17(z.re), fmt17(z.im))?;
                }
                Ok(())
            }
            Measure::Torus(m) => {
                let head: Vec<String> = (1..=m.dim).map(|j| format!("x{j}")).collect();
                writeln!(w, "index,{}", head.join(","))?;
                for (i, p) in m.points.iter().enumerate() {
                    let row: Vec<String> = p.iter().map(|&x| fmt17(x)).collect();
                    writeln!(w, "{},{}", i, row.join(","))?;
                }
                Ok(())
            }
        }
    }

    pub fn sidecar(&self, source: &str) -> serde_json::Value {
        let w = self.weights();
        let u = 1.0 / w.len() as f64;
        json!({
            "type": self.type_name(),
            "metric": self.metric_name(),
            "weights_uniform": w.iter().all(|&x| (x - u).abs() <= 1e-15),
            "source": source,
        })
    }
}

fn write_real<W: Write>(w: &mut W, xs: &[f64]) -> std::io::Result<()> {
    writeln!(w, "index,re,im")?;
    for (i, &x) in xs.iter().enumerate() {
        writeln!(w, "{},{},{}", i, fmt17(x), fmt17(0.0))?;
    }
    Ok(())
}

/// Uniform measure on the (scaled) values of a family. Real families become
/// [`Empirical1D`], the rest [`Empirical2D`].
pub fn empirical_from_family(
    family: &SumFamily,
    exclude_zero_index: bool,
    scale: f64,
    real_tol: f64,
) -> Result<Measure> {
    let vals: Vec<Complex64> = family
        .indexed()
        .filter(|&(i, _)| !(exclude_zero_index && i == 0))
        .map(|(_, v)| v * scale)
        .collect();
    if vals.iter().all(|v| v.im.abs() <= real_tol) {
        Ok(Measure::Line(Empirical1D::uniform(
            vals.iter().map(|v| v.re).collect(),
        )?))
    } else {
        Ok(Measure::Plane(Empirical2D::uniform(vals)?))
    }
}

/// N equally spaced atoms {0, 1/N, …, (N-1)/N}.
pub fn circle_grid(n: usize) -> Result<EmpiricalCircle> {
    if n == 0 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    EmpiricalCircle::new((0..n).map(|i| i as f64 / n as f64).collect(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsums::{gaussian_period_family, kloosterman_family, mellin_family};
    use crate::ff::build_field;

    #[test]
    fn grid() {
        assert_eq!(circle_grid(1).unwrap().atoms, vec![0.0]);
        assert_eq!(circle_grid(4).unwrap().atoms, vec![0.0, 0.25, 0.5, 0.75]);
        let s: f64 = circle_grid(7).unwrap().weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construction_normalizes_and_sorts() {
        let m = Empirical1D::new(vec![3.0, 1.0, 2.0], Some(vec![1.0, 2.0, 1.0])).unwrap();
        assert_eq!(m.atoms, vec![1.0, 2.0, 3.0]);
        assert_eq!(m.weights, vec![0.5, 0.25, 0.25]);
        assert_eq!(m.cdf(1.5), 0.5);
        assert_eq!(m.cdf(3.0), 1.0);
        assert!(Empirical1D::uniform(vec![]).is_err());
        assert!(Empirical1D::new(vec![1.0], Some(vec![-1.0])).is_err());
        let c = EmpiricalCircle::new(vec![-0.25, 1.5], None).unwrap();
        assert_eq!(c.atoms, vec![0.5, 0.75]);
    }

    #[test]
    fn family_measures() {
        let ctx = build_field(101, 1).unwrap();
        let kl = kloosterman_family(&ctx, 2).unwrap();
        match empirical_from_family(&kl, true, 1.0, REAL_TOLERANCE).unwrap() {
            Measure::Line(m) => {
                assert_eq!(m.len(), 100);
                assert!(m.atoms[0] >= -2.0 && m.atoms[99] <= 2.0);
            }
            other => panic!("expected 1-D, got {}", other.type_name()),
        }
        let g = gaussian_period_family(&ctx, 5).unwrap();
        let m = empirical_from_family(&g, false, 1.0, REAL_TOLERANCE).unwrap();
        assert_eq!(m.type_name(), "Empirical2D");
        assert_eq!(m.len(), 101);
        let mel = mellin_family(&ctx).unwrap();
        let m = empirical_from_family(&mel, true, 1.0, REAL_TOLERANCE).unwrap();
        assert_eq!(m.len(), 99);
        // the x -> 1/x symmetry makes every Mellin value real
        assert_eq!(m.type_name(), "Empirical1D");
        let s: f64 = m.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sidecar_and_csv() {
        let m = Measure::Circle(circle_grid(3).unwrap());
        let side = m.sidecar("grid");
        assert_eq!(side["type"], "EmpiricalCircle");
        assert_eq!(side["weights_uniform"], true);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }

    #[test]
    fn torus_metric() {
        assert!((EmpiricalTorus::distance(&[0.1, 0.9], &[0.9, 0.1]) - (0.08f64).sqrt()).abs() < 1e-12);
        assert!((circle_distance(0.95, 0.05) - 0.1).abs() < 1e-12);
    }
}
