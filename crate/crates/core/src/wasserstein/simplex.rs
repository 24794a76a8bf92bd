//! Primal network simplex for the transportation problem on a complete
//! bipartite graph, with block-search pivoting and a thread-indexed spanning
//! tree.

use super::cost::CostMatrix;
use super::result::{Method, TransportResult};
use crate::error::{Error, Result};

/// Largest n·m accepted by [`w1_exact_discrete`].
pub const EXACT_SIZE_LIMIT: usize = 4_000_000;
pub const MASS_TOLERANCE: f64 = 1e-9;

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const UP: i8 = 1;
const DOWN: i8 = -1;

struct Simplex<'a> {
    cost: &'a CostMatrix,
    n: usize,
    m: usize,
    arc_num: usize,
    max_cost: f64,
    // artificial arcs (one per node) live after the real ones
    art_source: Vec<usize>,
    art_target: Vec<usize>,
    art_cost_v: Vec<f64>,
    flow: Vec<f64>,
    state: Vec<i8>,
    pi: Vec<f64>,
    parent: Vec<isize>,
    pred: Vec<usize>,
    pred_dir: Vec<i8>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    dirty: Vec<usize>,
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
    next_arc: usize,
    block: usize,
}

impl<'a> Simplex<'a> {
    fn new(a: &[f64], b: &[f64], cost: &'a CostMatrix) -> Self {
        let (n, m) = (a.len(), b.len());
        let node_num = n + m;
        let arc_num = n * m;
        let all = arc_num + node_num;
        let root = node_num;
        let max_cost = cost.max();
        let art_cost = (max_cost + 1.0) * node_num as f64;
        let mut s = Simplex {
            cost,
            n,
            m,
            arc_num,
            max_cost,
            art_source: vec![0; node_num],
            art_target: vec![0; node_num],
            art_cost_v: vec![0.0; node_num],
            flow: vec![0.0; all],
            state: vec![STATE_LOWER; all],
            pi: vec![0.0; node_num + 1],
            parent: vec![0; node_num + 1],
            pred: vec![0; node_num + 1],
            pred_dir: vec![UP; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            dirty: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
            next_arc: 0,
            block: ((arc_num as f64).sqrt() as usize).max(10),
        };
        s.parent[root] = -1;
        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        for u in 0..node_num {
            let e = arc_num + u;
            s.parent[u] = root as isize;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            let supply = if u < n { a[u] } else { -b[u - n] };
            if supply >= 0.0 {
                s.pred_dir[u] = UP;
                s.art_source[u] = u;
                s.art_target[u] = root;
                s.flow[e] = supply;
                s.art_cost_v[u] = 0.0;
            } else {
                s.pred_dir[u] = DOWN;
                s.pi[u] = art_cost;
                s.art_source[u] = root;
                s.art_target[u] = u;
                s.flow[e] = -supply;
                s.art_cost_v[u] = art_cost;
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arc_num {
            e / self.m
        } else {
            self.art_source[e - self.arc_num]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arc_num {
            self.n + e % self.m
        } else {
            self.art_target[e - self.arc_num]
        }
    }

    #[inline]
    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.arc_num {
            self.cost.data[e]
        } else {
            self.art_cost_v[e - self.arc_num]
        }
    }

    /// Block search over the real arcs, walked row by row.
    fn find_entering(&mut self) -> bool {
        let (n, m) = (self.n, self.m);
        let tol = -1e-12 * (1.0 + self.max_cost);
        let mut min = 0.0;
        let mut found = usize::MAX;
        let mut cnt = self.block;
        let mut i = self.next_arc / m;
        let mut j = self.next_arc % m;
        let mut remaining = self.arc_num;
        let (pi_src, pi_dst) = self.pi.split_at(n);
        while remaining > 0 {
            let take = (m - j).min(cnt).min(remaining);
            let base = i * m;
            let row = &self.cost.data[base + j..base + j + take];
            let st = &self.state[base + j..base + j + take];
            let pd = &pi_dst[j..j + take];
            let pi_i = pi_src[i];
            for k in 0..take {
                let c = st[k] as f64 * (row[k] + pi_i - pd[k]);
                if c < min {
                    min = c;
                    found = base + j + k;
                }
            }
            j += take;
            cnt -= take;
            remaining -= take;
            if j == m {
                j = 0;
                i += 1;
                if i == n {
                    i = 0;
                }
            }
            if cnt == 0 {
                if min < tol {
                    break;
                }
                cnt = self.block;
            }
        }
        if min < tol {
            self.in_arc = found;
            self.next_arc = i * m + j;
            true
        } else {
            false
        }
    }

    fn find_join(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u] as usize;
            } else {
                v = self.parent[v] as usize;
            }
        }
        self.join = u;
    }

    /// All capacities are infinite, so only arcs oriented against the cycle
    /// can block.
    fn find_leaving(&mut self) {
        let (first, second) = if self.state[self.in_arc] == STATE_LOWER {
            (self.source(self.in_arc), self.target(self.in_arc))
        } else {
            (self.target(self.in_arc), self.source(self.in_arc))
        };
        self.delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            if self.pred_dir[u] == UP {
                let d = self.flow[self.pred[u]];
                if d < self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 1;
                }
            }
            u = self.parent[u] as usize;
        }
        let mut u = second;
        while u != self.join {
            if self.pred_dir[u] == DOWN {
                let d = self.flow[self.pred[u]];
                if d <= self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 2;
                }
            }
            u = self.parent[u] as usize;
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
    }

    fn change_flow(&mut self) {
        if self.delta > 0.0 {
            let val = self.state[self.in_arc] as f64 * self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                self.flow[self.pred[u]] -= self.pred_dir[u] as f64 * val;
                u = self.parent[u] as usize;
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                self.flow[self.pred[u]] += self.pred_dir[u] as f64 * val;
                u = self.parent[u] as usize;
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        self.flow[out] = 0.0;
        self.state[out] = STATE_LOWER;
    }

    fn update_tree(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out] as usize;

        if u_in == u_out {
            self.parent[u_in] = v_in as isize;
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source(self.in_arc) { UP } else { DOWN };
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty.clear();
            self.dirty.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem] as usize;
                self.thread[last] = next_stem;
                self.dirty.push(last);
                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;
                self.parent[stem] = par_stem as isize;
                par_stem = stem;
                stem = next_stem;
                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem as isize;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;
            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }
            for k in 0..self.dirty.len() {
                let u = self.dirty[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }
            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u] as usize;
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source(self.in_arc) { UP } else { DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out: isize = if self.last_succ[join] == v_in { join as isize } else { -1 };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in as isize;
        while u != -1 && self.last_succ[u as usize] == v_in {
            self.last_succ[u as usize] = last_succ_out;
            u = self.parent[u as usize];
        }
        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out as isize;
            while u != up_limit_out && self.last_succ[u as usize] == old_last_succ {
                self.last_succ[u as usize] = old_rev_thread;
                u = self.parent[u as usize];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out as isize;
            while u != up_limit_out && self.last_succ[u as usize] == old_last_succ {
                self.last_succ[u as usize] = last_succ_out;
                u = self.parent[u as usize];
            }
        }
        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u] as usize;
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u] as usize;
        }
    }

    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in]
            - self.pi[self.u_in]
            - self.pred_dir[self.u_in] as f64 * self.arc_cost(self.in_arc);
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self, max_pivots: u64) -> u64 {
        let mut pivots = 0;
        while pivots < max_pivots && self.find_entering() {
            self.find_join();
            self.find_leaving();
            self.change_flow();
            self.update_tree();
            self.update_potential();
            pivots += 1;
        }
        pivots
    }
}

/// Exact W1 between weighted atom sets a (sources) and b (targets) under the
/// given cost matrix, with dual potentials and duality gap.
pub fn w1_exact_discrete(a: &[f64], b: &[f64], cost: &CostMatrix) -> Result<TransportResult> {
    let (n, m) = (a.len(), b.len());
    if cost.rows != n || cost.cols != m {
        return Err(Error::InvalidInput("cost matrix shape does not match the weights".into()));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput("empty measure".into()));
    }
    if n * m > EXACT_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: n * m,
            limit: EXACT_SIZE_LIMIT,
        });
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch(sa, sb));
    }
    let mut s = Simplex::new(a, b, cost);
    let limit = 1000 * (n * m) as u64 + 10_000;
    let pivots = s.run(limit);
    let converged = pivots < limit;
    let mut value = 0.0;
    let mut plan = Vec::new();
    for e in 0..s.arc_num {
        let f = s.flow[e];
        if f > 0.0 {
            value += f * cost.data[e];
            plan.push((e / m, e % m, f));
        }
    }
    // u_i + v_j <= c_ij with u = -π on sources, v = π on targets; then
    // tighten u by the c-transform so feasibility holds exactly.
    let v: Vec<f64> = (0..m).map(|j| s.pi[n + j] - s.pi[0]).collect();
    let u: Vec<f64> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| cost.at(i, j) - v[j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let dual: f64 = u.iter().zip(a).map(|(x, w)| x * w).sum::<f64>()
        + v.iter().zip(b).map(|(x, w)| x * w).sum::<f64>();
    Ok(TransportResult {
        value,
        method: Method::NetworkSimplex,
        duality_gap: (value - dual).max(0.0),
        dual_u: Some(u),
        dual_v: Some(v),
        iterations: pivots,
        plan: Some(plan),
        converged,
        stage_values: Vec::new(),
    })
}
