//! Dense polynomials over GF(p), little-endian coefficient vectors.
//!
//! Only what field construction needs: reduction, modular products and
//! powers, gcd and the Rabin irreducibility test.

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod_u64(a, p - 2, p)
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Remainder of `a` modulo the monic-or-not nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = inv_mod(m[dm], p);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = r[dr] * lead_inv % p;
        let shift = dr - dm;
        for (i, &mi) in m.iter().enumerate().take(dm + 1) {
            let sub = c * mi % p;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem(&prod, m, p)
}

pub(crate) fn pow_mod(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Poly {
    let mut acc: Poly = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        exp >>= 1;
        if exp > 0 {
            b = mul_mod(&b, &b, m, p);
        }
    }
    acc
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn distinct_prime_factors(n: u64) -> Vec<u64> {
    prime_factors(n)
}

/// Rabin's test: a monic `f` of degree r is irreducible over GF(p) iff
/// X^(p^r) = X mod f and gcd(X^(p^(r/l)) - X, f) = 1 for every prime l | r.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let r = match degree(f) {
        Some(0) | None => return false,
        Some(r) => r,
    };
    if r == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    // frob[k] = X^(p^k) mod f for k = 0..=r
    let mut frob = Vec::with_capacity(r + 1);
    let mut cur = rem(&x, f, p);
    frob.push(cur.clone());
    for _ in 0..r {
        cur = pow_mod(&cur, p as u128, f, p);
        frob.push(cur.clone());
    }
    if sub(&frob[r], &x, p).iter().any(|&c| c != 0) {
        return false;
    }
    for l in prime_factors(r as u64) {
        let k = r / l as usize;
        let g = gcd(f, &sub(&frob[k], &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabin_matches_small_cases() {
        // x^2 + 1 is irreducible over GF(3), x^2 + 2 = (x+1)(x+2) is not.
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[2, 0, 1], 3));
        // x^2 + x + 1 over GF(2)
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        // x^4 + x + 1 over GF(2)
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
        // (x^2+x+1)^2 = x^4 + x^2 + 1 over GF(2)
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        // brute force: a monic cubic/quartic over GF(3) is irreducible iff it
        // has no monic factor of degree 1 or 2
        let p = 3u64;
        let monics = |deg: usize| -> Vec<Poly> {
            (0..p.pow(deg as u32))
                .map(|n| {
                    let mut v: Poly = (0..deg).map(|i| n / p.pow(i as u32) % p).collect();
                    v.push(1);
                    v
                })
                .collect()
        };
        let small: Vec<Poly> = monics(1).into_iter().chain(monics(2)).collect();
        for deg in 3..=4 {
            for f in monics(deg) {
                let has_factor = small.iter().any(|g| rem(&f, g, p).is_empty());
                assert_eq!(is_irreducible(&f, p), !has_factor, "{f:?}");
            }
        }
    }
}
