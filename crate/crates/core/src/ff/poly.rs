//! Dense polynomials over F_p, coefficients low degree first. Enough to find
//! irreducible moduli and multiply in F_p[t]/(f).

use super::primes::pow_mod;

pub type Poly = Vec<u64>;

pub fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

fn is_zero(a: &Poly) -> bool {
    a.iter().all(|&c| c == 0)
}

pub fn degree(a: &Poly) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub fn mul(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo `m` (m nonzero).
pub fn rem(a: &Poly, m: &Poly, p: u64) -> Poly {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = pow_mod(m[dm], p - 2, p);
    let mut r = trim(a.clone());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = ((r[dr] as u128 * lead_inv as u128) % p as u128) as u64;
        let shift = dr - dm;
        for (i, &mi) in m.iter().enumerate() {
            let t = ((c as u128 * mi as u128) % p as u128) as u64;
            r[i + shift] = (r[i + shift] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

pub fn mulmod(a: &Poly, b: &Poly, m: &Poly, p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut x = trim(a.clone());
    let mut y = trim(b.clone());
    while !is_zero(&y) {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// a^e mod m.
pub fn powmod(a: &Poly, mut e: u128, m: &Poly, p: u64) -> Poly {
    let mut base = rem(a, m, p);
    let mut acc: Poly = vec![1];
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

/// Ben-Or / Rabin test: a monic f of degree n is irreducible iff
/// gcd(f, t^{p^i} - t) = 1 for every i ≤ n/2.
pub fn is_irreducible(f: &Poly, p: u64) -> bool {
    let n = match degree(f) {
        Some(d) => d,
        None => return false,
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let t: Poly = vec![0, 1];
    let mut frob = t.clone();
    for _ in 1..=n / 2 {
        frob = powmod(&frob, p as u128, f, p);
        let g = gcd(f, &sub(&frob, &t, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `n` when the lower coefficients
/// (c_0, …, c_{n-1}) are enumerated as the base-p integer Σ c_i p^i.
pub fn first_irreducible(p: u64, n: u32) -> Option<Poly> {
    let n = n as usize;
    let total = (p as u128).checked_pow(n as u32)?;
    let mut idx: u128 = 0;
    while idx < total {
        let mut f = Vec::with_capacity(n + 1);
        let mut k = idx;
        for _ in 0..n {
            f.push((k % p as u128) as u64);
            k /= p as u128;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return Some(f);
        }
        idx += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibles_over_f2() {
        // t^2 + t + 1 is the only irreducible quadratic over F_2.
        assert_eq!(first_irreducible(2, 2), Some(vec![1, 1, 1]));
        assert_eq!(first_irreducible(2, 3), Some(vec![1, 1, 0, 1]));
        assert!(!is_irreducible(&vec![1, 0, 1], 2)); // (t+1)^2
    }

    #[test]
    fn count_irreducible_quadratics() {
        // (p^2 - p)/2 monic irreducible quadratics over F_p.
        for p in [3u64, 5, 7] {
            let mut count = 0;
            for c0 in 0..p {
                for c1 in 0..p {
                    if is_irreducible(&vec![c0, c1, 1], p) {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, (p * p - p) / 2);
        }
    }
}
