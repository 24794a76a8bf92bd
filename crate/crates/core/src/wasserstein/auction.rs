//! ε-scaling forward auction for planar transport between a uniform measure
//! on `persons` and objects with integer capacities, the total capacity being
//! the number of persons. Best-and-second-best bids are found with a kd-tree
//! over the objects whose nodes carry the smallest slot price below them.

use num_complex::Complex64;

use super::result::{Method, TransportResult};
use crate::error::{Error, Result};

const LEAF: usize = 8;
const SHRINK: f64 = 3.0;
const START_FRACTION: f64 = 0.01;

struct Node {
    lo: [f64; 2],
    hi: [f64; 2],
    /// children, or a leaf range into `order`
    left: usize,
    right: usize,
    start: usize,
    end: usize,
    parent: usize,
    key: f64,
}

struct KdTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
    leaf_of: Vec<usize>,
}

impl KdTree {
    fn build(pts: &[Complex64]) -> Self {
        let mut t = KdTree {
            nodes: Vec::new(),
            order: (0..pts.len()).collect(),
            leaf_of: vec![0; pts.len()],
        };
        t.split(pts, 0, pts.len(), usize::MAX);
        t
    }

    fn split(&mut self, pts: &[Complex64], start: usize, end: usize, parent: usize) -> usize {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &k in &self.order[start..end] {
            let z = pts[k];
            lo[0] = lo[0].min(z.re);
            lo[1] = lo[1].min(z.im);
            hi[0] = hi[0].max(z.re);
            hi[1] = hi[1].max(z.im);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            left: usize::MAX,
            right: usize::MAX,
            start,
            end,
            parent,
            key: 0.0,
        });
        if end - start <= LEAF {
            for &k in &self.order[start..end] {
                self.leaf_of[k] = id;
            }
            return id;
        }
        let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
        let mid = (start + end) / 2;
        let coord = |z: &Complex64| if axis == 0 { z.re } else { z.im };
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coord(&pts[a]).total_cmp(&coord(&pts[b])).then(a.cmp(&b))
        });
        let l = self.split(pts, start, mid, id);
        let r = self.split(pts, mid, end, id);
        self.nodes[id].left = l;
        self.nodes[id].right = r;
        id
    }

    fn box_dist(&self, id: usize, z: Complex64) -> f64 {
        let n = &self.nodes[id];
        let dx = (n.lo[0] - z.re).max(0.0).max(z.re - n.hi[0]);
        let dy = (n.lo[1] - z.im).max(0.0).max(z.im - n.hi[1]);
        dx.hypot(dy)
    }

    /// Recompute node keys as the minimum of `key` over the objects below.
    fn refresh_all(&mut self, key: &[f64]) {
        for id in (0..self.nodes.len()).rev() {
            let n = &self.nodes[id];
            let v = if n.left == usize::MAX {
                self.order[n.start..n.end].iter().map(|&k| key[k]).fold(f64::INFINITY, f64::min)
            } else {
                self.nodes[n.left].key.min(self.nodes[n.right].key)
            };
            self.nodes[id].key = v;
        }
    }

    fn refresh_object(&mut self, obj: usize, key: &[f64]) {
        let mut id = self.leaf_of[obj];
        let n = &self.nodes[id];
        let mut v = self.order[n.start..n.end].iter().map(|&k| key[k]).fold(f64::INFINITY, f64::min);
        loop {
            self.nodes[id].key = v;
            let p = self.nodes[id].parent;
            if p == usize::MAX {
                break;
            }
            let (l, r) = (self.nodes[p].left, self.nodes[p].right);
            let nv = self.nodes[l].key.min(self.nodes[r].key);
            if nv == self.nodes[p].key {
                break;
            }
            v = nv;
            id = p;
        }
    }

    /// Smallest and second smallest of |z - x_j| + key(j) (with `second(j)`
    /// standing in for j's own runner-up), and the minimizing j.
    fn best_two<F: Fn(usize) -> f64>(
        &self,
        pts: &[Complex64],
        z: Complex64,
        key: &[f64],
        second: F,
    ) -> (usize, f64, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut runner = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            if self.box_dist(id, z) + n.key >= runner {
                continue;
            }
            if n.left == usize::MAX {
                for &k in &self.order[n.start..n.end] {
                    let c = (pts[k] - z).norm();
                    let v = c + key[k];
                    if v < best.1 {
                        runner = best.1.min(c + second(k));
                        best = (k, v);
                    } else if v < runner {
                        runner = v;
                    }
                }
            } else {
                let dl = self.box_dist(n.left, z) + self.nodes[n.left].key;
                let dr = self.box_dist(n.right, z) + self.nodes[n.right].key;
                if dl <= dr {
                    stack.push(n.right);
                    stack.push(n.left);
                } else {
                    stack.push(n.left);
                    stack.push(n.right);
                }
            }
        }
        (best.0, best.1, runner)
    }
}

/// Exact-up-to-ε W1 between the uniform measure on `persons` and the measure
/// on `objects` with masses capacity/Σcapacity. The value is within
/// `eps_final` of optimal; the returned dual certificate makes the gap
/// explicit.
pub fn w1_auction_planar(
    persons: &[Complex64],
    objects: &[Complex64],
    capacity: &[usize],
    eps_final: f64,
) -> Result<TransportResult> {
    let m = persons.len();
    let n = objects.len();
    if m == 0 || n == 0 || capacity.len() != n {
        return Err(Error::InvalidInput("empty measure or capacity mismatch".into()));
    }
    if capacity.iter().sum::<usize>() != m || capacity.contains(&0) {
        return Err(Error::MassMismatch(m as f64, capacity.iter().sum::<usize>() as f64));
    }
    let first_slot: Vec<usize> = capacity
        .iter()
        .scan(0, |acc, &c| {
            let s = *acc;
            *acc += c;
            Some(s)
        })
        .collect();
    let slots = m;
    let mut slot_price = vec![0.0f64; slots];
    let mut slot_owner = vec![usize::MAX; slots];
    let mut assigned = vec![usize::MAX; m];
    // cheapest and second cheapest slot price per object
    let mut p1 = vec![0.0f64; n];
    let mut p2 = vec![0.0f64; n];
    let mut tree = KdTree::build(objects);

    let span = {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for z in persons.iter().chain(objects) {
            lo = [lo[0].min(z.re), lo[1].min(z.im)];
            hi = [hi[0].max(z.re), hi[1].max(z.im)];
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1]).max(f64::MIN_POSITIVE)
    };
    let eps_final = eps_final.max(span * 1e-13);
    let mut eps = (span * START_FRACTION).max(eps_final);
    let mut bids = 0u64;
    loop {
        slot_owner.iter_mut().for_each(|o| *o = usize::MAX);
        assigned.iter_mut().for_each(|a| *a = usize::MAX);
        for j in 0..n {
            refresh_prices(j, &first_slot, capacity, &slot_price, &mut p1, &mut p2);
        }
        tree.refresh_all(&p1);
        let mut queue: std::collections::VecDeque<usize> = (0..m).collect();
        while let Some(i) = queue.pop_front() {
            let z = persons[i];
            let (j, w1, w2) = tree.best_two(objects, z, &p1, |k| p2[k]);
            let s0 = first_slot[j];
            let slot = (s0..s0 + capacity[j])
                .min_by(|&a, &b| slot_price[a].total_cmp(&slot_price[b]).then(a.cmp(&b)))
                .expect("capacity >= 1");
            let raise = if w2.is_finite() { w2 - w1 } else { 0.0 };
            slot_price[slot] += raise + eps;
            let prev = slot_owner[slot];
            slot_owner[slot] = i;
            assigned[i] = slot;
            if prev != usize::MAX {
                assigned[prev] = usize::MAX;
                queue.push_back(prev);
            }
            refresh_prices(j, &first_slot, capacity, &slot_price, &mut p1, &mut p2);
            tree.refresh_object(j, &p1);
            bids += 1;
        }
        if eps <= eps_final {
            break;
        }
        eps = (eps / SHRINK).max(eps_final);
    }

    let owner_obj: Vec<usize> = {
        let mut v = vec![0; slots];
        for j in 0..n {
            for s in first_slot[j]..first_slot[j] + capacity[j] {
                v[s] = j;
            }
        }
        v
    };
    let mut value = 0.0;
    let mut plan_counts = std::collections::BTreeMap::new();
    for i in 0..m {
        let j = owner_obj[assigned[i]];
        value += (persons[i] - objects[j]).norm();
        *plan_counts.entry((i, j)).or_insert(0usize) += 1;
    }
    value /= m as f64;

    // dual: v_j = -max slot price, u_i = min_j (c_ij - v_j)
    let pmax: Vec<f64> = (0..n)
        .map(|j| {
            slot_price[first_slot[j]..first_slot[j] + capacity[j]]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    tree.refresh_all(&pmax);
    let u: Vec<f64> = persons
        .iter()
        .map(|&z| tree.best_two(objects, z, &pmax, |_| f64::INFINITY).1)
        .collect();
    let v: Vec<f64> = pmax.iter().map(|p| -p).collect();
    let dual = u.iter().sum::<f64>() / m as f64
        + v.iter().zip(capacity).map(|(x, &c)| x * c as f64).sum::<f64>() / m as f64;
    let w = 1.0 / m as f64;
    Ok(TransportResult {
        value,
        method: Method::Auction,
        duality_gap: (value - dual).max(0.0),
        dual_u: Some(u),
        dual_v: Some(v),
        iterations: bids,
        plan: Some(plan_counts.into_iter().map(|((i, j), c)| (i, j, c as f64 * w)).collect()),
        converged: true,
        stage_values: Vec::new(),
    })
}

fn refresh_prices(
    j: usize,
    first: &[usize],
    cap: &[usize],
    price: &[f64],
    p1: &mut [f64],
    p2: &mut [f64],
) {
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    for &p in &price[first[j]..first[j] + cap[j]] {
        if p < a {
            b = a;
            a = p;
        } else if p < b {
            b = p;
        }
    }
    p1[j] = a;
    p2[j] = b;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wasserstein::{w1_exact_discrete, CostMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_network_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n, k) in [(1usize, 3usize), (5, 1), (20, 1), (30, 4), (50, 10)] {
            let objects: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let persons: Vec<Complex64> = (0..n * k).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let r = w1_auction_planar(&persons, &objects, &vec![k; n], 1e-10).unwrap();
            let c = CostMatrix::euclidean(&persons, &objects);
            let exact = w1_exact_discrete(&vec![1.0 / (n * k) as f64; n * k], &vec![1.0 / n as f64; n], &c)
                .unwrap()
                .value;
            assert!((r.value - exact).abs() <= 1e-9, "n={n} k={k}: {} vs {exact}", r.value);
            assert!(r.duality_gap <= 1e-7 * (1.0 + r.value), "gap {}", r.duality_gap);
            // the dual pair is feasible
            let (u, v) = (r.dual_u.unwrap(), r.dual_v.unwrap());
            for i in 0..n * k {
                for j in 0..n {
                    assert!(u[i] + v[j] <= c.at(i, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn duplicate_objects() {
        let objects = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let persons = vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)];
        let r = w1_auction_planar(&persons, &objects, &[1, 1, 1], 1e-12).unwrap();
        let c = CostMatrix::euclidean(&persons, &objects);
        let exact = w1_exact_discrete(&[1.0 / 3.0; 3], &[1.0 / 3.0; 3], &c).unwrap().value;
        assert!((r.value - exact).abs() < 1e-9);
    }
}
