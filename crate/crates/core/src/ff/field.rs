use std::sync::Arc;

use num_complex::Complex64;

use super::poly::{self, Poly};
use super::primes::{is_prime, pow_mod, prime_factors};
use crate::error::{Error, Result};
use crate::numeric::unit_root;

/// Largest field for which exp/log tables are built.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;
/// Largest q accepted at all: q - 1 is factored by trial division.
pub const MAX_FIELD_ORDER: u64 = 1 << 50;

/// Construction knobs for [`FieldContext`].
#[derive(Debug, Clone, Copy)]
pub struct FieldOptions {
    pub table_cap: u64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            table_cap: DEFAULT_TABLE_CAP,
        }
    }
}

#[derive(Debug)]
struct Tables {
    /// exp[k] = generator^k, k in [0, q-2]
    exp: Vec<u32>,
    /// log[x] for x != 0; log[0] is unused
    log: Vec<u32>,
}

/// The finite field F_q, q = p^n.
///
/// Elements are encoded as integers in `[0, q)`: the element
/// Σ c_i t^i of F_p[t]/(modulus) has index Σ c_i p^i. For n = 1 the index is
/// the residue itself. The context is immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    n: u32,
    q: u64,
    modulus: Option<Poly>,
    generator: u64,
    order_factors: Vec<u64>,
    trace_basis: Vec<u64>,
    tables: Option<Arc<Tables>>,
}

pub fn build_field(p: u64, n: u32) -> Result<FieldContext> {
    FieldContext::new(p, n, FieldOptions::default())
}

impl FieldContext {
    pub fn new(p: u64, n: u32, opts: FieldOptions) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(n).filter(|&q| q <= MAX_FIELD_ORDER as u128);
        let q = match q {
            Some(q) => q as u64,
            None => {
                return Err(Error::FieldTooLarge(format!(
                    "{p}^{n} exceeds {MAX_FIELD_ORDER}"
                )))
            }
        };
        let modulus = if n > 1 {
            Some(poly::first_irreducible(p, n).ok_or(Error::NoIrreducibleFound { p, degree: n })?)
        } else {
            None
        };
        let mut ctx = FieldContext {
            p,
            n,
            q,
            modulus,
            generator: 1,
            order_factors: prime_factors(q - 1),
            trace_basis: Vec::new(),
            tables: None,
        };
        ctx.generator = ctx.find_generator();
        ctx.trace_basis = (0..n)
            .map(|i| {
                let ti = ctx.encode(&basis_vector(i as usize, n as usize));
                let mut acc = 0u64;
                let mut x = ti;
                for _ in 0..n {
                    acc = ctx.add(acc, x);
                    x = ctx.pow(x, p);
                }
                debug_assert!(acc < p, "trace must land in the prime field");
                acc
            })
            .collect();
        if q <= opts.table_cap {
            ctx.tables = Some(Arc::new(ctx.build_tables()));
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn modulus_poly(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    fn find_generator(&self) -> u64 {
        (1..self.q)
            .find(|&c| {
                self.order_factors
                    .iter()
                    .all(|&l| self.pow_slow(c, (self.q - 1) / l) != 1)
            })
            .expect("the multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let order = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u64;
        for k in 0..order {
            exp.push(x as u32);
            log[x as usize] = k as u32;
            x = self.mul_slow(x, self.generator);
        }
        Tables { exp, log }
    }

    fn decode(&self, x: u64) -> Poly {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut k = x;
        for _ in 0..self.n {
            out.push(k % self.p);
            k /= self.p;
        }
        out
    }

    fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0u64, |acc, &ci| acc * self.p + ci)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let (ca, cb) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.n == 1 {
            return (self.p - a) % self.p;
        }
        let c: Vec<u64> = self.decode(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.encode(&c)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        match &self.modulus {
            None => ((a as u128 * b as u128) % self.p as u128) as u64,
            Some(m) => {
                let r = poly::mulmod(&self.decode(a), &self.decode(b), m, self.p);
                let mut c = r;
                c.resize(self.n as usize, 0);
                self.encode(&c)
            }
        }
    }

    fn pow_slow(&self, mut b: u64, mut e: u64) -> u64 {
        if self.n == 1 {
            return pow_mod(b, e, self.p);
        }
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_slow(r, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        r
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) if self.n > 1 => {
                let k = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % (self.q - 1);
                t.exp[k as usize] as u64
            }
            _ => self.mul_slow(a, b),
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        match &self.tables {
            Some(t) => {
                let k = ((t.log[a as usize] as u128 * e as u128) % (self.q - 1) as u128) as usize;
                t.exp[k] as u64
            }
            None => self.pow_slow(a, e),
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// generator^k.
    pub fn exp(&self, k: u64) -> u64 {
        let k = k % (self.q - 1);
        match &self.tables {
            Some(t) => t.exp[k as usize] as u64,
            None => self.pow_slow(self.generator, k),
        }
    }

    /// Discrete logarithm to base `generator`, in [0, q-2].
    pub fn dlog(&self, x: u64) -> Result<u64> {
        if x == 0 || x >= self.q {
            return Err(Error::InvalidInput(format!("dlog of {x}")));
        }
        match &self.tables {
            Some(t) => Ok(t.log[x as usize] as u64),
            None => Err(Error::FieldTooLarge(format!(
                "q = {} has no discrete-log table",
                self.q
            ))),
        }
    }

    pub fn require_tables(&self) -> Result<()> {
        if self.has_tables() {
            Ok(())
        } else {
            Err(Error::FieldTooLarge(format!("q = {} exceeds the table cap", self.q)))
        }
    }

    /// Absolute trace Tr_{F_q/F_p}(x), as a residue in [0, p).
    pub fn trace(&self, x: u64) -> u64 {
        if self.n == 1 {
            return x;
        }
        let c = self.decode(x);
        c.iter()
            .zip(&self.trace_basis)
            .fold(0u64, |acc, (&ci, &ti)| ((acc as u128 + ci as u128 * ti as u128) % self.p as u128) as u64)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn additive_character(&self) -> AdditiveCharacter<'_> {
        AdditiveCharacter { ctx: self }
    }

    fn check_divides(&self, d: u64) -> Result<()> {
        if d == 0 || (self.q - 1) % d != 0 {
            return Err(Error::OrderDoesNotDivide {
                d,
                q_minus_one: self.q - 1,
            });
        }
        Ok(())
    }

    /// The subgroup μ_d of F_q^×, sorted by element index.
    pub fn roots_of_unity(&self, d: u64) -> Result<Vec<u64>> {
        let mut out = self.cyclic_roots(d)?;
        out.sort_unstable();
        Ok(out)
    }

    /// μ_d listed as ζ, ζ², …, ζ^d = 1 with ζ = generator^((q-1)/d).
    pub fn cyclic_roots(&self, d: u64) -> Result<Vec<u64>> {
        self.check_divides(d)?;
        let zeta = self.exp((self.q - 1) / d);
        let mut out = Vec::with_capacity(d as usize);
        let mut x = 1u64;
        for _ in 0..d {
            x = self.mul(x, zeta);
            out.push(x);
        }
        Ok(out)
    }

    /// The unique subgroup of prime order d.
    pub fn find_subgroup_prime_order(&self, d: u64) -> Result<Vec<u64>> {
        if !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        self.roots_of_unity(d)
    }

    fn eval_poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Roots in F_q of a monic integer polynomial (coefficients low degree
    /// first), by exhaustive scan.
    pub fn poly_roots_mod(&self, g: &[i64], require_split: bool) -> Result<RootScan> {
        let deg = g.len().checked_sub(1).filter(|&d| d >= 1);
        let deg = match deg {
            Some(d) if g[d] == 1 => d,
            _ => return Err(Error::InvalidInput("polynomial must be monic of degree >= 1".into())),
        };
        if self.q > DEFAULT_TABLE_CAP {
            return Err(Error::FieldTooLarge(format!("root scan over q = {}", self.q)));
        }
        let coeffs: Vec<u64> = g.iter().map(|&c| self.from_int(c)).collect();
        let mut roots = Vec::new();
        let mut multiplicities = Vec::new();
        for x in 0..self.q {
            if self.eval_poly(&coeffs, x) != 0 {
                continue;
            }
            // divide out (X - x) as often as possible
            let mut cur = coeffs.clone();
            let mut mult = 0;
            loop {
                let (quot, r) = self.synthetic_div(&cur, x);
                if r != 0 {
                    break;
                }
                mult += 1;
                cur = quot;
                if cur.len() == 1 {
                    break;
                }
            }
            roots.push(x);
            multiplicities.push(mult);
        }
        let total: usize = multiplicities.iter().sum();
        let distinct = multiplicities.iter().all(|&m| m == 1);
        if require_split && total != deg {
            return Err(Error::NotTotallySplit {
                q: self.q,
                found: total,
                degree: deg,
            });
        }
        Ok(RootScan {
            roots,
            multiplicities,
            distinct,
            split: total == deg,
        })
    }

    fn synthetic_div(&self, coeffs: &[u64], x: u64) -> (Vec<u64>, u64) {
        let n = coeffs.len() - 1;
        let mut quot = vec![0u64; n];
        let mut carry = 0u64;
        for i in (0..=n).rev() {
            let v = self.add(coeffs[i], self.mul(carry, x));
            if i == 0 {
                return (quot, v);
            }
            quot[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }
}

fn basis_vector(i: usize, n: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    v[i] = 1;
    v
}

/// Result of [`FieldContext::poly_roots_mod`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootScan {
    pub roots: Vec<u64>,
    pub multiplicities: Vec<usize>,
    /// No repeated root: no two elements of the root set collide mod p.
    pub distinct: bool,
    pub split: bool,
}

/// x ↦ e(Tr(x)/p).
#[derive(Debug, Clone, Copy)]
pub struct AdditiveCharacter<'a> {
    ctx: &'a FieldContext,
}

impl AdditiveCharacter<'_> {
    pub fn eval(&self, x: u64) -> Complex64 {
        unit_root(self.ctx.trace(x), self.ctx.p)
    }
}

/// χ_j(generator^k) = e(jk/(q-1)); undefined at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplicativeCharacter {
    pub index: u64,
}

impl MultiplicativeCharacter {
    pub fn eval(&self, ctx: &FieldContext, x: u64) -> Result<Option<Complex64>> {
        if x == 0 {
            return Ok(None);
        }
        let k = ctx.dlog(x)?;
        let m = ctx.q() - 1;
        Ok(Some(unit_root(
            ((self.index % m) as u128 * k as u128 % m as u128) as u64,
            m,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(ctx: &FieldContext, x: u64) -> u64 {
        let mut y = x;
        let mut k = 1;
        while y != 1 {
            y = ctx.mul(y, x);
            k += 1;
        }
        k
    }

    #[test]
    fn generators_small_primes() {
        assert_eq!(build_field(5, 1).unwrap().generator(), 2);
        assert_eq!(build_field(2, 1).unwrap().generator(), 1);
        assert_eq!(build_field(13, 1).unwrap().generator(), 2);
        // exhaustive-power oracle: the smallest element of full order
        for p in [3u64, 7, 11, 23, 31, 61, 101] {
            let ctx = build_field(p, 1).unwrap();
            let expected = (1..p).find(|&x| order(&ctx, x) == p - 1).unwrap();
            assert_eq!(ctx.generator(), expected);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_field(15, 1), Err(Error::NotPrime(15))));
        assert!(matches!(build_field(1_000_003, 3), Err(Error::FieldTooLarge(_))));
    }

    #[test]
    fn extension_fields_generator_and_tables() {
        for (p, n) in [(2u64, 3u32), (3, 2), (2, 8), (5, 3), (7, 2)] {
            let ctx = build_field(p, n).unwrap();
            let q = ctx.q();
            assert!(poly::is_irreducible(&ctx.modulus_poly().unwrap().to_vec(), p));
            assert_eq!(order(&ctx, ctx.generator()), q - 1);
            for x in 1..q {
                assert_eq!(ctx.exp(ctx.dlog(x).unwrap()), x);
                assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), 1);
            }
            // trace lands in F_p and is additive
            for x in 0..q.min(200) {
                for y in 0..q.min(50) {
                    assert_eq!(
                        ctx.trace(ctx.add(x, y)),
                        (ctx.trace(x) + ctx.trace(y)) % p
                    );
                }
            }
        }
    }

    #[test]
    fn dlog_round_trip_exhaustive() {
        for p in [2u64, 3, 5, 101, 1009, 9973] {
            let ctx = build_field(p, 1).unwrap();
            for x in 1..p {
                let k = ctx.dlog(x).unwrap();
                assert!(k <= p - 2);
                assert_eq!(ctx.exp(k), x);
            }
        }
    }

    #[test]
    fn roots_of_unity_examples() {
        let f13 = build_field(13, 1).unwrap();
        assert_eq!(f13.roots_of_unity(4).unwrap(), vec![1, 5, 8, 12]);
        assert_eq!(f13.roots_of_unity(1).unwrap(), vec![1]);
        let f5 = build_field(5, 1).unwrap();
        assert_eq!(f5.roots_of_unity(2).unwrap(), vec![1, 4]);
        let f11 = build_field(11, 1).unwrap();
        assert_eq!(f11.find_subgroup_prime_order(5).unwrap(), vec![1, 3, 4, 5, 9]);
        assert!(matches!(
            f11.find_subgroup_prime_order(7),
            Err(Error::OrderDoesNotDivide { .. })
        ));
        assert!(matches!(f13.roots_of_unity(5), Err(Error::OrderDoesNotDivide { .. })));
    }

    #[test]
    fn sum_of_roots_of_unity() {
        for (p, n) in [(13u64, 1u32), (31, 1), (7, 2), (2, 4)] {
            let ctx = build_field(p, n).unwrap();
            let q = ctx.q();
            for d in 1..q {
                if (q - 1) % d != 0 {
                    continue;
                }
                let mu = ctx.roots_of_unity(d).unwrap();
                assert_eq!(mu.len() as u64, d);
                let s = mu.iter().fold(0, |acc, &x| ctx.add(acc, x));
                assert_eq!(s, if d == 1 { 1 } else { 0 }, "q={q} d={d}");
                for &x in &mu {
                    for &y in &mu {
                        assert!(mu.contains(&ctx.mul(x, y)));
                    }
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        for (p, n) in [(7u64, 1u32), (3, 3), (2, 5), (101, 1)] {
            let ctx = build_field(p, n).unwrap();
            let psi = ctx.additive_character();
            let s: Complex64 = (0..ctx.q()).map(|x| psi.eval(x)).sum();
            assert!(s.norm() < 1e-9);
            assert!((psi.eval(0) - 1.0).norm() < 1e-15);
            for j in 0..ctx.q() - 1 {
                let chi = MultiplicativeCharacter { index: j };
                let s: Complex64 = (1..ctx.q())
                    .map(|x| chi.eval(&ctx, x).unwrap().unwrap())
                    .sum();
                let expected = if j == 0 { (ctx.q() - 1) as f64 } else { 0.0 };
                assert!((s - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn multiplicative_character_is_multiplicative() {
        let ctx = build_field(31, 1).unwrap();
        for j in [1u64, 5, 29] {
            let chi = MultiplicativeCharacter { index: j };
            for x in 1..31 {
                for y in 1..31 {
                    let lhs = chi.eval(&ctx, ctx.mul(x, y)).unwrap().unwrap();
                    let rhs = chi.eval(&ctx, x).unwrap().unwrap() * chi.eval(&ctx, y).unwrap().unwrap();
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
        assert_eq!(MultiplicativeCharacter { index: 3 }.eval(&ctx, 0).unwrap(), None);
    }

    #[test]
    fn polynomial_roots() {
        let f13 = build_field(13, 1).unwrap();
        let r = f13.poly_roots_mod(&[1, 0, 1], true).unwrap();
        assert_eq!(r.roots, vec![5, 8]);
        assert!(r.distinct);
        let f5 = build_field(5, 1).unwrap();
        assert_eq!(f5.poly_roots_mod(&[-1, 1], false).unwrap().roots, vec![1]);
        let f7 = build_field(7, 1).unwrap();
        assert!(matches!(
            f7.poly_roots_mod(&[1, 0, 1], true),
            Err(Error::NotTotallySplit { .. })
        ));
        // (X - 1)^2 = X^2 - 2X + 1 splits with a repeated root
        let r = f7.poly_roots_mod(&[1, -2, 1], true).unwrap();
        assert_eq!(r.roots, vec![1]);
        assert_eq!(r.multiplicities, vec![2]);
        assert!(!r.distinct);
    }
}
