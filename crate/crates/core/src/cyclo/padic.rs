//! Valuations of cyclotomic integers above p.
//!
//! `p_adic_ord` works at one fixed place. The field K = GF(p^f) determines
//! the Galois ring W = (Z/p^M)[X]/(F) where F lifts K's modulus, and the
//! embedding `zeta_n -> T(g)^(-(q-1)/n)`, with T the Teichmuller lift and
//! g the generator of K. With this choice the character `chi_e(x) =
//! zeta_{q-1}^(e dlog x)` reduces to `x -> x^(-e)` on residues, so Gauss sums
//! get the valuation predicted by the digit sum of e.
//!
//! Over W the element `zeta_p` is `1 + pi` with `pi` a uniformizer of a
//! totally ramified extension of degree p - 1, so a value written as
//! `sum b_k pi^k`, k < p - 1, has valuation `min (k + (p-1) v_p(b_k))`.

use num_rational::Ratio;

use super::{cyclotomic_polynomial, CycloError, GroupRingElement, QRational, Result};
use crate::field::FiniteField;

/// Elements of the Galois ring as coefficient vectors of length f.
struct GaloisRing {
    modulus: Vec<u128>,
    pm: u128,
    f: usize,
}

impl GaloisRing {
    fn reduce(&self, mut a: Vec<u128>) -> Vec<u128> {
        let f = self.f;
        for top in (f..a.len()).rev() {
            let c = a[top] % self.pm;
            if c == 0 {
                continue;
            }
            let shift = top - f;
            for k in 0..f {
                let sub = c * self.modulus[k] % self.pm;
                a[shift + k] = (a[shift + k] + self.pm - sub) % self.pm;
            }
            a[top] = 0;
        }
        a.truncate(f);
        a.resize(f, 0);
        a
    }

    fn mul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let mut prod = vec![0u128; 2 * self.f];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y % self.pm) % self.pm;
            }
        }
        self.reduce(prod)
    }

    fn one(&self) -> Vec<u128> {
        let mut v = vec![0u128; self.f];
        v[0] = 1 % self.pm;
        v
    }

    fn pow(&self, base: &[u128], mut e: u128) -> Vec<u128> {
        let mut acc = self.one();
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn add_scaled(&self, acc: &mut [u128], x: &[u128], c: u128) {
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = (*a + v * c % self.pm) % self.pm;
        }
    }
}

fn vp(mut c: u128, p: u128, cap: u32) -> u32 {
    if c == 0 {
        return cap;
    }
    let mut v = 0;
    while c.is_multiple_of(p) && v < cap {
        c /= p;
        v += 1;
    }
    v
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn check_level(v: &GroupRingElement, k: &FiniteField) -> Result<()> {
    if v.p() != k.p() {
        return Err(CycloError::MismatchedRing { p1: v.p(), n1: v.level(), p2: k.p(), n2: k.group_order() });
    }
    if !k.group_order().is_multiple_of(v.level()) {
        return Err(CycloError::LevelNotSplit { n: v.level(), group_order: k.group_order() });
    }
    Ok(())
}

/// Valuation at the place fixed by K's model, normalized so that ord(q) = 1.
pub fn p_adic_ord(v: &GroupRingElement, k: &FiniteField) -> Result<QRational> {
    check_level(v, k)?;
    if v.is_zero_value() {
        return Err(CycloError::ZeroValue);
    }
    let p = k.p() as u128;
    let mut cap = 1u32;
    while p.pow(cap + 1) < 1 << 62 {
        cap += 1;
    }
    let mut m = 4.min(cap);
    loop {
        if let Some(r0) = ord_pi_at_precision(v, k, m) {
            let denom = (k.r() as i64) * (k.p() as i64 - 1);
            return Ok(Ratio::new(r0 as i64, denom));
        }
        if m == cap {
            return Err(CycloError::PrecisionExhausted);
        }
        m = (2 * m).min(cap);
    }
}

fn ord_pi_at_precision(v: &GroupRingElement, k: &FiniteField, m: u32) -> Option<u64> {
    let p = k.p() as u128;
    let pm = p.pow(m);
    let f = k.r() as usize;
    let ring = GaloisRing { modulus: k.modulus().iter().map(|&c| c as u128).collect(), pm, f };
    let q = k.q() as u128;

    let mut g: Vec<u128> = k.coeffs(k.generator()).into_iter().map(u128::from).collect();
    g.resize(f, 0);
    // g^(q^m) agrees with the Teichmuller lift to precision p^(m+1)
    let mut teich = g;
    for _ in 0..m {
        teich = ring.pow(&teich, q);
    }
    let n = v.level() as u128;
    let group = q - 1;
    let omega = ring.pow(&teich, group - group / n);
    let mut omega_pows = Vec::with_capacity(n as usize);
    let mut cur = ring.one();
    for _ in 0..n {
        omega_pows.push(cur.clone());
        cur = ring.mul(&cur, &omega);
    }

    let pp = k.p() as usize;
    let a: Vec<Vec<u128>> = (0..pp)
        .map(|i| {
            let mut acc = vec![0u128; f];
            for j in 0..n as u64 {
                let c = v.coeff(i as u32, j);
                if c != 0 {
                    let c = c.rem_euclid(pm as i128) as u128;
                    ring.add_scaled(&mut acc, &omega_pows[j as usize], c);
                }
            }
            acc
        })
        .collect();

    // zeta^i = (1 + pi)^i
    let mut b = vec![vec![0u128; f]; pp];
    for (i, ai) in a.iter().enumerate() {
        for (kk, bk) in b.iter_mut().enumerate().take(i + 1) {
            ring.add_scaled(bk, ai, binomial(i as u128, kk as u128) % pm);
        }
    }
    // pi^(p-1) = -sum_{k < p-1} C(p, k+1) pi^k
    let top = b[pp - 1].clone();
    for (kk, bk) in b.iter_mut().enumerate().take(pp - 1) {
        let c = binomial(p, kk as u128 + 1) % pm;
        ring.add_scaled(bk, &top, (pm - c) % pm);
    }

    let r0 = (0..pp - 1)
        .map(|kk| {
            let val = b[kk].iter().map(|&c| vp(c, p, m)).min().unwrap_or(m);
            kk as u64 + (p as u64 - 1) * val as u64
        })
        .min()
        .expect("p >= 2");
    (r0 < (p as u64 - 1) * m as u64).then_some(r0)
}

/// Minimum of the valuation over all places above p, by repeated exact
/// division by `1 - zeta_p`. Same normalization as [`p_adic_ord`].
pub fn min_place_ord(v: &GroupRingElement, k: &FiniteField) -> Result<QRational> {
    check_level(v, k)?;
    if v.is_zero_value() {
        return Err(CycloError::ZeroValue);
    }
    let p = v.p() as usize;
    let n = v.level();
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    // rows a_i in Z[zeta_n], reduced modulo Phi_n
    let mut rows: Vec<Vec<i128>> = (0..p)
        .map(|i| {
            let mut row: Vec<i128> = (0..n).map(|j| v.coeff(i as u32, j)).collect();
            for top in (deg..n as usize).rev() {
                let c = row[top];
                if c != 0 {
                    for (kk, &pk) in phi.iter().enumerate() {
                        row[top - deg + kk] -= c * pk;
                    }
                }
            }
            row.truncate(deg);
            row
        })
        .collect();
    let mut count = 0i64;
    loop {
        let total: Vec<i128> = (0..deg).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
        if total.iter().any(|&c| c % p as i128 != 0) {
            break;
        }
        let s: Vec<i128> = total.iter().map(|&c| c / p as i128).collect();
        let mut prefix = vec![0i128; deg];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..deg {
                prefix[j] += row[j];
                row[j] = prefix[j] - (i as i128 + 1) * s[j];
            }
        }
        count += 1;
    }
    Ok(Ratio::new(count, k.r() as i64 * (k.p() as i64 - 1)))
}
