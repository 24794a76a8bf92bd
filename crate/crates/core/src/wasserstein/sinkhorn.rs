use super::cost::CostMatrix;
use super::result::{Method, TransportResult};
use super::simplex::MASS_TOLERANCE;
use crate::error::{Error, Result};

/// Geometric ε schedule and stopping rule for [`w1_sinkhorn`].
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSchedule {
    /// First and last ε as fractions of the mean cost.
    pub start: f64,
    pub end: f64,
    pub stages: usize,
    /// L1 marginal violation at which the last stage stops.
    pub tol: f64,
    pub max_iter_per_stage: usize,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule {
            start: 0.5,
            end: 0.005,
            stages: 8,
            tol: 1e-6,
            max_iter_per_stage: 20_000,
        }
    }
}

impl EpsSchedule {
    pub fn epsilons(&self, mean_cost: f64) -> Vec<f64> {
        if self.stages <= 1 {
            return vec![self.end * mean_cost];
        }
        let r = (self.end / self.start).powf(1.0 / (self.stages - 1) as f64);
        (0..self.stages)
            .map(|k| self.start * r.powi(k as i32) * mean_cost)
            .collect()
    }
}

/// K_ij = exp((f_i + g_j - C_ij)/ε)
fn kernel(c: &CostMatrix, f: &[f64], g: &[f64], eps: f64) -> Vec<f64> {
    let m = c.cols;
    let mut k = vec![0.0; c.data.len()];
    for i in 0..c.rows {
        let row = &c.data[i * m..(i + 1) * m];
        let out = &mut k[i * m..(i + 1) * m];
        for j in 0..m {
            out[j] = ((f[i] + g[j] - row[j]) / eps).exp();
        }
    }
    k
}

fn mat_vec(k: &[f64], v: &[f64], out: &mut [f64]) {
    let m = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = k[i * m..(i + 1) * m].iter().zip(v).map(|(x, y)| x * y).sum();
    }
}

fn mat_t_vec(k: &[f64], u: &[f64], out: &mut [f64]) {
    let m = out.len();
    out.iter_mut().for_each(|o| *o = 0.0);
    for (i, &ui) in u.iter().enumerate() {
        for (o, x) in out.iter_mut().zip(&k[i * m..(i + 1) * m]) {
            *o += x * ui;
        }
    }
}

/// Project a nonnegative matrix onto the transport polytope (Altschuler,
/// Weed and Rigollet, rounding step).
fn round_to_marginals(p: &mut [f64], a: &[f64], b: &[f64], m: usize) {
    let n = a.len();
    for i in 0..n {
        let r: f64 = p[i * m..(i + 1) * m].iter().sum();
        if r > a[i] {
            let s = a[i] / r;
            p[i * m..(i + 1) * m].iter_mut().for_each(|x| *x *= s);
        }
    }
    for j in 0..m {
        let c: f64 = (0..n).map(|i| p[i * m + j]).sum();
        if c > b[j] {
            let s = b[j] / c;
            (0..n).for_each(|i| p[i * m + j] *= s);
        }
    }
    let err_r: Vec<f64> = (0..n)
        .map(|i| a[i] - p[i * m..(i + 1) * m].iter().sum::<f64>())
        .collect();
    let err_c: Vec<f64> = (0..m)
        .map(|j| b[j] - (0..n).map(|i| p[i * m + j]).sum::<f64>())
        .collect();
    let total: f64 = err_r.iter().sum();
    if total > 0.0 {
        for i in 0..n {
            for j in 0..m {
                p[i * m + j] += err_r[i] * err_c[j] / total;
            }
        }
    }
}

/// Entropic transport with ε annealing in the log domain. The value is the
/// cost of the rounded (exactly feasible) plan, an upper bound on W1; the
/// c-transformed potentials give a lower bound, and the difference is the
/// reported gap.
pub fn w1_sinkhorn(
    a: &[f64],
    b: &[f64],
    cost: &CostMatrix,
    schedule: &EpsSchedule,
) -> Result<TransportResult> {
    let (n, m) = (a.len(), b.len());
    if cost.rows != n || cost.cols != m || n == 0 || m == 0 {
        return Err(Error::InvalidInput("cost matrix shape does not match the weights".into()));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch(sa, sb));
    }
    let mean = cost.mean().max(f64::MIN_POSITIVE);
    // P = diag(u) K diag(v); u and v are folded into the log potentials f, g
    // whenever they leave [e^-ABSORB, e^ABSORB].
    const ABSORB: f64 = 50.0;
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; m];
    let mut ku = vec![0.0; n];
    let mut kv = vec![0.0; m];
    let mut iterations = 0u64;
    let mut stage_values = Vec::new();
    let mut converged = true;
    let eps_list = schedule.epsilons(mean);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (stage, &eps) in eps_list.iter().enumerate() {
        let last = stage + 1 == eps_list.len();
        let tol = if last { schedule.tol } else { schedule.tol.max(1e-3) };
        let mut k = kernel(cost, &f, &g, eps);
        let mut it = 0;
        loop {
            mat_vec(&k, &v, &mut ku);
            for i in 0..n {
                u[i] = a[i] / ku[i];
            }
            mat_t_vec(&k, &u, &mut kv);
            for j in 0..m {
                v[j] = b[j] / kv[j];
            }
            it += 1;
            let blown = u.iter().chain(&v).any(|x| !x.is_finite() || x.ln().abs() > ABSORB);
            if blown {
                for i in 0..n {
                    f[i] += eps * u[i].ln();
                    u[i] = 1.0;
                }
                for j in 0..m {
                    g[j] += eps * v[j].ln();
                    v[j] = 1.0;
                }
                k = kernel(cost, &f, &g, eps);
            }
            // columns are exact after the v-update; check the rows
            if it % 10 == 0 || it >= schedule.max_iter_per_stage {
                mat_vec(&k, &v, &mut ku);
                let viol: f64 = (0..n).map(|i| (u[i] * ku[i] - a[i]).abs()).sum();
                if viol <= tol {
                    break;
                }
                if it >= schedule.max_iter_per_stage {
                    converged &= !last;
                    break;
                }
            }
        }
        for i in 0..n {
            f[i] += eps * u[i].ln();
            u[i] = 1.0;
        }
        for j in 0..m {
            g[j] += eps * v[j].ln();
            v[j] = 1.0;
        }
        iterations += it as u64;
        let mut p = kernel(cost, &f, &g, eps);
        round_to_marginals(&mut p, a, b, m);
        let val: f64 = p.iter().zip(&cost.data).map(|(x, c)| x * c).sum();
        stage_values.push(val);
        best = Some((val, p));
    }
    let (value, p) = best.expect("at least one stage");
    // c-transforms of g give a feasible dual pair
    let u: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|j| cost.at(i, j) - g[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let v: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| cost.at(i, j) - u[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let dual: f64 = u.iter().zip(a).map(|(x, w)| x * w).sum::<f64>()
        + v.iter().zip(b).map(|(x, w)| x * w).sum::<f64>();
    let support: Vec<(usize, usize, f64)> = p
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 1e-12)
        .map(|(k, &x)| (k / m, k % m, x))
        .collect();
    Ok(TransportResult {
        value,
        method: Method::Sinkhorn,
        dual_u: Some(u),
        dual_v: Some(v),
        duality_gap: (value - dual).max(0.0),
        iterations,
        plan: Some(support),
        converged,
        stage_values,
    })
}
