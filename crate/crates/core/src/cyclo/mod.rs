//! Exact sums of roots of unity.
//!
//! [`RouCounts`] is an element of Z[zeta_p] written as multiplicities of the
//! p-th roots of unity; every exponential sum in the crate lands here.
//! [`GroupRingElement`] is an element of the group ring Z[mu_p x mu_n], which
//! surjects onto Z[zeta_{pn}]; Gauss sums and their products live there.
//! Neither type reduces during arithmetic. Reduction to a basis happens only
//! when values are compared, converted or valued.

mod padic;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use padic::{min_place_ord, p_adic_ord};

pub type QRational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("value is not a rational integer")]
    NotRational,
    #[error("ring mismatch: Z[mu_{p1} x mu_{n1}] vs Z[mu_{p2} x mu_{n2}]")]
    MismatchedRing { p1: u32, n1: u64, p2: u32, n2: u64 },
    #[error("the zero value has no valuation")]
    ZeroValue,
    #[error("level {n} does not divide q - 1 = {group_order}")]
    LevelNotSplit { n: u64, group_order: u64 },
    #[error("level {n} must be prime to p = {p}")]
    LevelNotPrimeToP { n: u64, p: u32 },
    #[error("valuation exceeds the working precision")]
    PrecisionExhausted,
    #[error("coefficient overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, CycloError>;

/// A complex value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedded {
    pub value: Complex64,
    pub error: f64,
}

impl Embedded {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

/// e^(2 pi i k / m) with k reduced exactly before the float conversion.
fn root_of_unity(k: u128, m: u128) -> Complex64 {
    let k = k % m;
    let theta = std::f64::consts::TAU * (k as f64) / (m as f64);
    Complex64::new(theta.cos(), theta.sin())
}

fn embed_terms(terms: impl Iterator<Item = (u128, u128, f64)>) -> Embedded {
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    let mut mass = 0.0f64;
    let mut count = 0usize;
    for (k, m, c) in terms {
        if c == 0.0 {
            continue;
        }
        let z = root_of_unity(k, m);
        re.add(c * z.re);
        im.add(c * z.im);
        mass += c.abs();
        count += 1;
    }
    // each root is accurate to a few ulps; the compensated sum adds O(eps)
    let error = mass * 4.0 * f64::EPSILON + count as f64 * f64::EPSILON;
    Embedded { value: Complex64::new(re.total(), im.total()), error }
}

/// An element of Z[zeta_p] as signed multiplicities of `zeta_p^i`.
#[derive(Clone, Serialize, Deserialize)]
pub struct RouCounts {
    p: u32,
    counts: Vec<i64>,
}

impl fmt::Debug for RouCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RouCounts(p={}, {:?})", self.p, self.counts)
    }
}

impl RouCounts {
    pub fn zero(p: u32) -> Self {
        RouCounts { p, counts: vec![0; p as usize] }
    }

    pub fn integer(p: u32, n: i64) -> Self {
        let mut v = Self::zero(p);
        v.counts[0] = n;
        v
    }

    pub fn root(p: u32, i: u32) -> Self {
        let mut v = Self::zero(p);
        v.counts[(i % p) as usize] = 1;
        v
    }

    /// Panics if `counts.len()` is not p.
    pub fn from_counts(p: u32, counts: Vec<i64>) -> Self {
        assert_eq!(counts.len(), p as usize, "need exactly p counts");
        RouCounts { p, counts }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Adds one occurrence of `zeta_p^i`.
    #[inline]
    pub fn bump(&mut self, i: u32) {
        self.counts[i as usize] += 1;
    }

    #[inline]
    pub fn bump_by(&mut self, i: u32, n: i64) {
        self.counts[i as usize] += n;
    }

    /// Counts with the last coordinate eliminated via `1 + zeta + ... + zeta^(p-1) = 0`.
    pub fn canonical(&self) -> Vec<i64> {
        let last = self.counts[self.p as usize - 1];
        self.counts.iter().map(|&c| c - last).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|&c| c == 0)
    }

    /// The integer represented, if the value lies in Z.
    pub fn to_exact_integer(&self) -> Result<i64> {
        let c = self.canonical();
        if c[1..].iter().any(|&x| x != 0) {
            return Err(CycloError::NotRational);
        }
        Ok(c[0])
    }

    /// Invariant under every automorphism `zeta -> zeta^a`; equivalent to being rational.
    pub fn is_galois_invariant(&self) -> bool {
        self.to_exact_integer().is_ok()
    }

    /// Image under `zeta -> zeta^a`, a prime to p.
    pub fn galois(&self, a: u32) -> Self {
        let p = self.p as u64;
        let mut out = Self::zero(self.p);
        for (i, &c) in self.counts.iter().enumerate() {
            out.counts[(i as u64 * a as u64 % p) as usize] += c;
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.galois(self.p - 1)
    }

    pub fn scale(&self, k: i64) -> Self {
        RouCounts { p: self.p, counts: self.counts.iter().map(|&c| c * k).collect() }
    }

    pub fn complex_embed(&self) -> Embedded {
        let p = self.p as u128;
        embed_terms(self.counts.iter().enumerate().map(|(i, &c)| (i as u128, p, c as f64)))
    }

    /// As an element of Z[mu_p x mu_n] with trivial mu_n part.
    pub fn to_group_ring(&self, n: u64) -> GroupRingElement {
        let mut g = GroupRingElement::zero(self.p, n);
        for (i, &c) in self.counts.iter().enumerate() {
            g.coeffs[i * n as usize] = c as i128;
        }
        g
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "RouCounts over different primes");
    }
}

impl PartialEq for RouCounts {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.canonical() == other.canonical()
    }
}

impl Eq for RouCounts {}

impl AddAssign<&RouCounts> for RouCounts {
    fn add_assign(&mut self, rhs: &RouCounts) {
        self.check(rhs);
        for (a, b) in self.counts.iter_mut().zip(&rhs.counts) {
            *a += b;
        }
    }
}

impl Add for &RouCounts {
    type Output = RouCounts;
    fn add(self, rhs: &RouCounts) -> RouCounts {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &RouCounts {
    type Output = RouCounts;
    fn neg(self) -> RouCounts {
        self.scale(-1)
    }
}

impl Sub for &RouCounts {
    type Output = RouCounts;
    fn sub(self, rhs: &RouCounts) -> RouCounts {
        self + &(-rhs)
    }
}

impl Mul for &RouCounts {
    type Output = RouCounts;
    fn mul(self, rhs: &RouCounts) -> RouCounts {
        self.check(rhs);
        let p = self.p as usize;
        let mut out = RouCounts::zero(self.p);
        for (i, &a) in self.counts.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.counts.iter().enumerate() {
                out.counts[(i + j) % p] += a * b;
            }
        }
        out
    }
}

/// Coefficients of the n-th cyclotomic polynomial, little-endian.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let phi = cyclotomic_polynomial(d);
        num = exact_div(&num, &phi);
    }
    num
}

fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    // b monic
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i128; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db];
        q[k] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[k + i] -= c * bi;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// An element of the group ring Z[mu_p x mu_n]; the coefficient of
/// `zeta_p^i zeta_n^j` sits at index `i * n + j`.
#[derive(Clone)]
pub struct GroupRingElement {
    p: u32,
    n: u64,
    coeffs: Vec<i128>,
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElement(p={}, n={}, [", self.p, self.n)?;
        let mut first = true;
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let (i, j) = (idx as u64 / self.n, idx as u64 % self.n);
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{c}*z{i}w{j}")?;
                first = false;
            }
        }
        write!(f, "])")
    }
}

impl GroupRingElement {
    /// Panics if n is zero or divisible by p; callers validate levels first.
    pub fn zero(p: u32, n: u64) -> Self {
        assert!(n > 0 && !n.is_multiple_of(p as u64), "level must be positive and prime to p");
        GroupRingElement { p, n, coeffs: vec![0; p as usize * n as usize] }
    }

    pub fn integer(p: u32, n: u64, c: i128) -> Self {
        let mut g = Self::zero(p, n);
        g.coeffs[0] = c;
        g
    }

    pub fn one(p: u32, n: u64) -> Self {
        Self::integer(p, n, 1)
    }

    /// `zeta_p^i zeta_n^j`.
    pub fn root(p: u32, n: u64, i: u32, j: u64) -> Self {
        let mut g = Self::zero(p, n);
        g.coeffs[((i % p) as u64 * n + j % n) as usize] = 1;
        g
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn coeff(&self, i: u32, j: u64) -> i128 {
        self.coeffs[(i as u64 * self.n + j) as usize]
    }

    #[inline]
    pub fn bump(&mut self, i: u32, j: u64, c: i128) {
        self.coeffs[(i as u64 * self.n + j) as usize] += c;
    }

    /// Reinterprets at level `m`, a multiple of the current level.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m.is_multiple_of(self.n), "lift target must be a multiple of the level");
        let step = m / self.n;
        let mut out = Self::zero(self.p, m);
        for i in 0..self.p as u64 {
            for j in 0..self.n {
                let c = self.coeffs[(i * self.n + j) as usize];
                if c != 0 {
                    out.coeffs[(i * m + j * step) as usize] = c;
                }
            }
        }
        out
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(CycloError::MismatchedRing { p1: self.p, n1: self.n, p2: other.p, n2: other.n });
        }
        Ok(())
    }

    /// Convolution product over Z/p x Z/n.
    pub fn gr_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let (p, n) = (self.p as usize, self.n as usize);
        let mut out = Self::zero(self.p, self.n);
        let nz: Vec<(usize, usize, i128)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(idx, &c)| (idx / n, idx % n, c))
            .collect();
        for (idx, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let (i, j) = (idx / n, idx % n);
            for &(k, l, b) in &nz {
                let slot = &mut out.coeffs[((i + k) % p) * n + (j + l) % n];
                *slot = a.checked_mul(b).and_then(|x| slot.checked_add(x)).ok_or(CycloError::Overflow)?;
            }
        }
        Ok(out.normalized())
    }

    /// The same value written in the reduced basis, which keeps
    /// coefficients small across long products.
    pub fn normalized(&self) -> Self {
        let n = self.n as usize;
        let red = self.reduced();
        let deg = red.len() / (self.p as usize - 1).max(1);
        let mut out = Self::zero(self.p, self.n);
        for (idx, c) in red.into_iter().enumerate() {
            out.coeffs[(idx / deg) * n + idx % deg] = c;
        }
        out
    }

    pub fn gr_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn gr_sub(&self, other: &Self) -> Result<Self> {
        self.gr_add(&other.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Self {
        GroupRingElement { p: self.p, n: self.n, coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    /// Image under complex conjugation, `(i, j) -> (-i, -j)`.
    pub fn conj(&self) -> Self {
        let (p, n) = (self.p as u64, self.n);
        let mut out = Self::zero(self.p, self.n);
        for i in 0..p {
            for j in 0..n {
                let c = self.coeffs[(i * n + j) as usize];
                if c != 0 {
                    out.coeffs[(((p - i) % p) * n + (n - j) % n) as usize] = c;
                }
            }
        }
        out
    }

    /// Unique coordinates in the basis `zeta_p^i zeta_n^j`, i < p - 1, j < phi(n).
    ///
    /// Returned as a (p - 1) x phi(n) row-major vector.
    pub fn reduced(&self) -> Vec<i128> {
        let (p, n) = (self.p as usize, self.n as usize);
        let phi = cyclotomic_polynomial(self.n);
        let deg = phi.len() - 1;
        let mut out = Vec::with_capacity((p - 1) * deg);
        let last = &self.coeffs[(p - 1) * n..p * n];
        for i in 0..p - 1 {
            let mut row: Vec<i128> = (0..n).map(|j| self.coeffs[i * n + j] - last[j]).collect();
            for top in (deg..n).rev() {
                let c = row[top];
                if c == 0 {
                    continue;
                }
                let shift = top - deg;
                for (k, &pk) in phi.iter().enumerate() {
                    row[shift + k] -= c * pk;
                }
            }
            out.extend_from_slice(&row[..deg]);
        }
        out
    }

    pub fn is_zero_value(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    /// Do the two elements represent the same cyclotomic integer.
    /// Elements at different levels are compared at the lcm level.
    pub fn represents_same(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let m = num_integer::lcm(self.n, other.n);
        let (a, b) = (self.lift(m), other.lift(m));
        a.gr_sub(&b).map(|d| d.is_zero_value()).unwrap_or(false)
    }

    /// The integer represented, if the value lies in Z.
    pub fn to_exact_integer(&self) -> Result<i128> {
        let r = self.reduced();
        if r[1..].iter().any(|&c| c != 0) {
            return Err(CycloError::NotRational);
        }
        Ok(r[0])
    }

    /// Complex value under `zeta_p -> e^(2 pi i/p)`, `zeta_n -> e^(2 pi i/n)`.
    pub fn complex_embed(&self) -> Embedded {
        self.complex_embed_with(1, 1)
    }

    /// Complex value under `zeta_p -> e^(2 pi i a/p)`, `zeta_n -> e^(2 pi i b/n)`.
    pub fn complex_embed_with(&self, a: u32, b: u64) -> Embedded {
        let (p, n) = (self.p as u128, self.n as u128);
        let m = p * n;
        let reduced = self.normalized();
        embed_terms(reduced.coeffs.iter().enumerate().map(|(idx, &c)| {
            let (i, j) = (idx as u128 / n, idx as u128 % n);
            // zeta_p^i zeta_n^j = e^(2 pi i (i n + j p) / pn)
            let k = (i * a as u128 % p) * n + (j * b as u128 % n) * p;
            (k, m, c as f64)
        }))
    }
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        self.represents_same(other)
    }
}
