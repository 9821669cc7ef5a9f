//! Finite fields GF(p^r) in a polynomial basis.
//!
//! Elements are stored as their base-p encoding `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`
//! of the coefficient vector, so an element is a single `u64` and the prime
//! field GF(p) sits inside every extension as the indices `0..p`.
//!
//! Fields up to [`DEFAULT_TABLE_LIMIT`] elements carry exponential and
//! discrete-log tables relative to a fixed generator; larger fields fall back
//! to polynomial arithmetic and baby-step/giant-step logarithms.

mod poly;

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

pub(crate) use poly::{distinct_prime_factors, pow_mod_u64};

/// Fields with at most this many elements get exp/log tables.
pub const DEFAULT_TABLE_LIMIT: u64 = 1 << 25;

/// Hard cap on field size; indices and exponents must stay well inside `u64`.
const MAX_FIELD_SIZE: u128 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected} with coefficients below {p}")]
    MalformedModulus { expected: u32, p: u32 },
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u32 },
    #[error("field of size {p}^{r} is too large")]
    TooLarge { p: u32, r: u32 },
    #[error("element {0} does not generate the multiplicative group")]
    NotAGenerator(u64),
    #[error("zero has no discrete logarithm or character value")]
    ZeroArgument,
    #[error("element index {index} is outside a field of size {q}")]
    OutOfRange { index: u64, q: u64 },
    #[error("no embedding of GF({p}^{small}) into GF({p}^{large})")]
    NoEmbedding { p: u32, small: u32, large: u32 },
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// An element of a [`FiniteField`], encoded in base p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u64);

impl FieldElement {
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A nontrivial additive character of GF(p): `a -> zeta_p^(scale * a)`.
///
/// The fixed character of the crate sends 1 to `zeta_p` (`scale = 1`);
/// the conjugate character has `scale = p - 1`. On an extension the
/// character is composed with the field trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Psi {
    scale: u32,
}

impl Psi {
    pub const STANDARD: Psi = Psi { scale: 1 };

    /// `x -> psi(alpha * x)`; `alpha` must be nonzero mod p.
    pub fn scaled(alpha: u32) -> Psi {
        Psi { scale: alpha }
    }

    pub fn conjugate(self, p: u32) -> Psi {
        Psi { scale: (p - self.scale % p) % p }
    }

    pub fn scale(self) -> u32 {
        self.scale
    }

    /// Exponent of `zeta_p` for a trace value in GF(p).
    #[inline]
    pub fn apply(self, trace: u32, p: u32) -> u32 {
        ((self.scale as u64 * trace as u64) % p as u64) as u32
    }
}

impl Default for Psi {
    fn default() -> Self {
        Psi::STANDARD
    }
}

struct Tables {
    /// exp[k] = index of g^k, k in [0, q-1)
    exp: Vec<u32>,
    /// log[index] = k; log[0] is unused
    log: Vec<u32>,
    /// exp_trace[k] = Tr(g^k)
    exp_trace: Vec<u32>,
}

/// GF(p^r) = GF(p)[X]/(modulus) with a distinguished generator.
pub struct FiniteField {
    p: u32,
    r: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: FieldElement,
    /// Tr(X^i) for the power basis, i in [0, r)
    basis_traces: Vec<u32>,
    group_order_factors: Vec<u64>,
    tables: Option<Tables>,
    bsgs: OnceLock<BabySteps>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

struct BabySteps {
    step: u64,
    table: HashMap<u64, u64>,
    /// g^(-step)
    giant: FieldElement,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds GF(p^r). Without an explicit modulus the smallest monic
/// irreducible polynomial of degree r is used, where polynomials are
/// ordered by the base-p integer encoding of their non-leading coefficients.
pub fn build_field(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<FiniteField> {
    let mut b = FieldBuilder::new(p, r);
    if let Some(m) = modulus {
        b = b.modulus(m);
    }
    b.build()
}

/// Finer control over the model of a field: modulus, generator and the
/// size threshold for exp/log tables.
#[derive(Debug, Clone)]
pub struct FieldBuilder {
    p: u32,
    r: u32,
    modulus: Option<Vec<u32>>,
    generator: Option<u64>,
    table_limit: u64,
}

impl FieldBuilder {
    pub fn new(p: u32, r: u32) -> Self {
        FieldBuilder { p, r, modulus: None, generator: None, table_limit: DEFAULT_TABLE_LIMIT }
    }

    /// Monic modulus as little-endian coefficients, length r + 1.
    pub fn modulus(mut self, m: &[u32]) -> Self {
        self.modulus = Some(m.to_vec());
        self
    }

    /// Generator given by element index; verified at build time.
    pub fn generator(mut self, index: u64) -> Self {
        self.generator = Some(index);
        self
    }

    pub fn table_limit(mut self, limit: u64) -> Self {
        self.table_limit = limit;
        self
    }

    pub fn build(self) -> Result<FiniteField> {
        let FieldBuilder { p, r, modulus, generator, table_limit } = self;
        if !is_prime(p as u64) || p as u64 >= 1 << 31 {
            return Err(FieldError::NonPrime(p as u64));
        }
        if r == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q128 = (p as u128).checked_pow(r).filter(|&q| q <= MAX_FIELD_SIZE);
        let q = match q128 {
            Some(q) => q as u64,
            None => return Err(FieldError::TooLarge { p, r }),
        };
        let pp = p as u64;
        let modulus: Vec<u64> = match modulus {
            Some(m) => {
                if m.len() != r as usize + 1 || m[r as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::MalformedModulus { expected: r, p });
                }
                let m: Vec<u64> = m.iter().map(|&c| c as u64).collect();
                if !poly::is_irreducible(&m, pp) {
                    return Err(FieldError::ReducibleModulus { p });
                }
                m
            }
            None => smallest_irreducible(pp, r as usize),
        };
        let group_order_factors = distinct_prime_factors(q - 1);
        let mut field = FiniteField {
            p,
            r,
            q,
            modulus,
            generator: FieldElement(0),
            basis_traces: Vec::new(),
            group_order_factors,
            tables: None,
            bsgs: OnceLock::new(),
        };
        field.basis_traces = field.compute_basis_traces();
        field.generator = match generator {
            Some(g) => {
                if g == 0 || g >= q || !field.has_full_order_slow(FieldElement(g)) {
                    return Err(FieldError::NotAGenerator(g));
                }
                FieldElement(g)
            }
            None => (1..q)
                .map(FieldElement)
                .find(|&g| field.has_full_order_slow(g))
                .expect("a finite field has a cyclic multiplicative group"),
        };
        if q <= table_limit {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }
}

/// Is the monic polynomial with little-endian `coeffs` irreducible over GF(p).
pub fn is_irreducible(p: u32, coeffs: &[u32]) -> bool {
    if coeffs.last() != Some(&1) || coeffs.iter().any(|&c| c >= p) {
        return false;
    }
    let f: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
    poly::is_irreducible(&f, p as u64)
}

fn smallest_irreducible(p: u64, r: usize) -> Vec<u64> {
    let count = p.pow(r as u32);
    for n in 0..count {
        let mut f: Vec<u64> = (0..r).map(|i| n / p.pow(i as u32) % p).collect();
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the multiplicative group, q - 1.
    pub fn group_order(&self) -> u64 {
        self.q - 1
    }

    /// Monic modulus, little-endian, length r + 1.
    pub fn modulus(&self) -> Vec<u32> {
        self.modulus.iter().map(|&c| c as u32).collect()
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Does x have multiplicative order q - 1.
    pub fn is_generator(&self, x: FieldElement) -> bool {
        x.0 != 0 && x.0 < self.q && self.has_full_order_slow(x)
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q {
            return Err(FieldError::OutOfRange { index, q: self.q });
        }
        Ok(FieldElement(index))
    }

    /// The image of an integer under Z -> GF(p) -> GF(p^r).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::OutOfRange { index: u64::MAX, q: self.q });
        }
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p as u64 + c as u64;
        }
        Ok(FieldElement(idx))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let p = self.p as u64;
        let mut n = x.0;
        (0..self.r)
            .map(|_| {
                let c = n % p;
                n /= p;
                c as u32
            })
            .collect()
    }

    fn to_poly(&self, x: FieldElement) -> Vec<u64> {
        let mut v: Vec<u64> = self.coeffs(x).into_iter().map(u64::from).collect();
        poly::trim(&mut v);
        v
    }

    fn element_of_poly(&self, v: &[u64]) -> FieldElement {
        let mut idx = 0u64;
        for &c in v.iter().rev() {
            idx = idx * self.p as u64 + c;
        }
        FieldElement(idx)
    }

    /// Every element, in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        while x > 0 || y > 0 {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while x > 0 {
            out += (p - x % p) % p * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Multiplication by an element of the prime field.
    pub fn scale(&self, c: i64, a: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let c = c.rem_euclid(self.p as i64) as u64;
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while x > 0 {
            out += (x % p) * c % p * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => {
                let k = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % (self.q - 1);
                FieldElement(t.exp[k as usize] as u64)
            }
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let prod = poly::mul_mod(&self.to_poly(a), &self.to_poly(b), &self.modulus, self.p as u64);
        self.element_of_poly(&prod)
    }

    fn pow_slow(&self, a: FieldElement, e: u128) -> FieldElement {
        let r = poly::pow_mod(&self.to_poly(a), e, &self.modulus, self.p as u64);
        self.element_of_poly(&r)
    }

    /// `a^e`; negative exponents invert (and `0^e` with e < 0 is zero).
    pub fn pow(&self, a: FieldElement, e: i64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 { FieldElement(1) } else { FieldElement(0) };
        }
        let m = self.q - 1;
        let e = e.rem_euclid(m as i64) as u64;
        match &self.tables {
            Some(t) => {
                let k = (t.log[a.0 as usize] as u128 * e as u128 % m as u128) as usize;
                FieldElement(t.exp[k] as u64)
            }
            None => self.pow_slow(a, e as u128),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        Ok(self.pow(a, -1))
    }

    /// `g^k` for the distinguished generator g.
    pub fn exp(&self, k: u64) -> FieldElement {
        let k = k % (self.q - 1);
        match &self.tables {
            Some(t) => FieldElement(t.exp[k as usize] as u64),
            None => self.pow_slow(self.generator, k as u128),
        }
    }

    /// Exponent k in [0, q-1) with g^k = x.
    pub fn discrete_log(&self, x: FieldElement) -> Result<u64> {
        if x.0 == 0 {
            return Err(FieldError::ZeroArgument);
        }
        if x.0 >= self.q {
            return Err(FieldError::OutOfRange { index: x.0, q: self.q });
        }
        match &self.tables {
            Some(t) => Ok(t.log[x.0 as usize] as u64),
            None => Ok(self.bsgs_log(x)),
        }
    }

    fn bsgs_log(&self, x: FieldElement) -> u64 {
        let m = self.q - 1;
        let bs = self.bsgs.get_or_init(|| {
            let step = (m as f64).sqrt().ceil() as u64 + 1;
            let mut table = HashMap::with_capacity(step as usize);
            let mut cur = FieldElement(1);
            for j in 0..step {
                table.entry(cur.0).or_insert(j);
                cur = self.mul_slow(cur, self.generator);
            }
            let giant = self.pow_slow(self.generator, (m - step % m) as u128);
            BabySteps { step, table, giant }
        });
        let mut gamma = x;
        let mut i = 0u64;
        loop {
            if let Some(&j) = bs.table.get(&gamma.0) {
                return (i * bs.step + j) % m;
            }
            gamma = self.mul_slow(gamma, bs.giant);
            i += 1;
            assert!(i <= bs.step + 1, "baby-step giant-step failed: generator invalid");
        }
    }

    /// Tr_{K/F_p}(x) as an element of [0, p), via the traces of the power basis.
    pub fn trace_to_base(&self, x: FieldElement) -> u32 {
        let p = self.p as u64;
        let mut n = x.0;
        let mut acc = 0u64;
        for &t in &self.basis_traces {
            acc += (n % p) * t as u64;
            n /= p;
        }
        (acc % p) as u32
    }

    /// Exponent of `zeta_p` in psi_K(x) for the standard character.
    pub fn additive_char_index(&self, x: FieldElement) -> u32 {
        self.trace_to_base(x)
    }

    /// `e * dlog(x) mod (q - 1)`: the exponent of `zeta_{q-1}` in chi_e(x).
    pub fn mult_char_value(&self, e: u64, x: FieldElement) -> Result<u64> {
        let m = self.q - 1;
        let l = self.discrete_log(x)?;
        Ok(((e % m) as u128 * l as u128 % m as u128) as u64)
    }

    /// x^p.
    pub fn frobenius(&self, x: FieldElement) -> FieldElement {
        self.pow(x, self.p as i64)
    }

    /// Tr(g^k) for every k in [0, q-1). Cached for tabled fields.
    pub fn exp_traces(&self) -> std::borrow::Cow<'_, [u32]> {
        match &self.tables {
            Some(t) => std::borrow::Cow::Borrowed(&t.exp_trace),
            None => {
                let mut out = Vec::with_capacity((self.q - 1) as usize);
                let mut cur = FieldElement(1);
                for _ in 0..self.q - 1 {
                    out.push(self.trace_to_base(cur));
                    cur = self.mul_slow(cur, self.generator);
                }
                std::borrow::Cow::Owned(out)
            }
        }
    }

    /// Is `n` a multiple of the order of a subgroup of K^x, i.e. n | q - 1.
    pub fn contains_roots_of_unity(&self, n: u64) -> bool {
        n != 0 && (self.q - 1).is_multiple_of(n)
    }

    /// Image of `x` (an element of `small`) under an embedding small -> self.
    ///
    /// The embedding sends the class of X in `small` to the smallest-index
    /// root of `small`'s modulus in `self`. Any root gives a valid embedding;
    /// the sums computed in this crate are invariant under the choice.
    pub fn embed_from(&self, small: &FiniteField, x: FieldElement) -> Result<FieldElement> {
        let no = FieldError::NoEmbedding { p: small.p, small: small.r, large: self.r };
        if small.p != self.p || !self.r.is_multiple_of(small.r) {
            return Err(no);
        }
        if small.r == 1 || x.0 < self.p as u64 {
            return Ok(FieldElement(x.0));
        }
        let root = self.find_root(&small.modulus).ok_or(no)?;
        let mut acc = FieldElement(0);
        let mut power = FieldElement(1);
        for c in small.coeffs(x) {
            acc = self.add(acc, self.scale(c as i64, power));
            power = self.mul(power, root);
        }
        Ok(acc)
    }

    fn find_root(&self, f: &[u64]) -> Option<FieldElement> {
        // roots of an irreducible of degree s | r lie in the subfield of order p^s
        let s = f.len() as u32 - 1;
        let m = self.q - 1;
        let sub = (self.p as u64).pow(s) - 1;
        let step = m / sub;
        let mut candidates: Vec<FieldElement> = (0..sub).map(|k| self.exp(k * step)).collect();
        candidates.sort();
        candidates.into_iter().find(|&z| {
            let mut acc = FieldElement(0);
            for &c in f.iter().rev() {
                acc = self.add(self.mul(acc, z), FieldElement(c));
            }
            acc.0 == 0
        })
    }

    fn compute_basis_traces(&self) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.r)
            .map(|i| {
                let mut basis = vec![0u64; i as usize + 1];
                basis[i as usize] = 1;
                let mut y = poly::rem(&basis, &self.modulus, p);
                let mut acc = 0u64;
                for _ in 0..self.r {
                    acc += y.first().copied().unwrap_or(0);
                    y = poly::pow_mod(&y, p as u128, &self.modulus, p);
                }
                // the trace is a constant polynomial
                (acc % p) as u32
            })
            .collect()
    }

    fn has_full_order_slow(&self, g: FieldElement) -> bool {
        let m = self.q - 1;
        let gp = self.to_poly(g);
        if gp.is_empty() {
            return false;
        }
        let is_one = |v: &[u64]| v.len() == 1 && v[0] == 1;
        if m == 1 {
            return is_one(&gp);
        }
        self.group_order_factors.iter().all(|&l| {
            let r = poly::pow_mod(&gp, (m / l) as u128, &self.modulus, self.p as u64);
            !is_one(&r)
        })
    }

    fn build_tables(&self) -> Tables {
        let m = (self.q - 1) as usize;
        let p = self.p as u64;
        let mut exp = Vec::with_capacity(m);
        let mut log = vec![0u32; self.q as usize];
        let mut exp_trace = Vec::with_capacity(m);
        let g = self.to_poly(self.generator);
        let mut cur: Vec<u64> = vec![1];
        for k in 0..m {
            let idx = self.element_of_poly(&cur);
            exp.push(idx.0 as u32);
            log[idx.0 as usize] = k as u32;
            exp_trace.push(self.trace_to_base(idx));
            cur = poly::mul_mod(&cur, &g, &self.modulus, p);
        }
        Tables { exp, log, exp_trace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// x + x^p + ... + x^(p^(r-1)) by repeated Frobenius, no linearity used.
    fn trace_by_frobenius(k: &FiniteField, x: FieldElement) -> u32 {
        let mut acc = k.zero();
        let mut y = x;
        for _ in 0..k.r() {
            acc = k.add(acc, y);
            y = k.pow_slow(y, k.p() as u128);
        }
        assert!(acc.index() < k.p() as u64, "trace must land in the prime field");
        acc.index() as u32
    }

    #[test]
    fn prime_field_three() {
        let k = build_field(3, 1, None).unwrap();
        assert_eq!(k.q(), 3);
        assert_eq!(k.generator().index(), 2);
        assert_eq!(k.trace_to_base(k.from_int(2)), 2);
        assert_eq!(k.discrete_log(k.from_int(2)).unwrap(), 1);
        assert_eq!(k.additive_char_index(k.zero()), 0);
        assert_eq!(k.additive_char_index(k.one()), 1);
    }

    #[test]
    fn nonprime_rejected() {
        assert_eq!(build_field(4, 2, None).unwrap_err(), FieldError::NonPrime(4));
        assert_eq!(build_field(1, 1, None).unwrap_err(), FieldError::NonPrime(1));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 2 = (x + 1)(x + 2) over GF(3)
        let err = build_field(3, 2, Some(&[2, 0, 1])).unwrap_err();
        assert_eq!(err, FieldError::ReducibleModulus { p: 3 });
        let err = build_field(3, 2, Some(&[1, 0, 2])).unwrap_err();
        assert!(matches!(err, FieldError::MalformedModulus { .. }));
    }

    #[test]
    fn gf9_trace_of_one_is_two() {
        let k = build_field(3, 2, None).unwrap();
        assert_eq!(k.trace_to_base(k.one()), 2);
    }

    #[test]
    fn gf_3_11_is_built() {
        let k = build_field(3, 11, None).unwrap();
        assert_eq!(k.q(), 177_147);
        assert!(k.contains_roots_of_unity(23));
        assert!(!build_field(3, 10, None).unwrap().contains_roots_of_unity(23));
    }

    #[test]
    fn linear_trace_matches_frobenius_sum() {
        for (p, r) in [(3, 2), (3, 3), (3, 4), (2, 5), (5, 2), (7, 2)] {
            let k = build_field(p, r, None).unwrap();
            for x in k.elements() {
                assert_eq!(k.trace_to_base(x), trace_by_frobenius(&k, x), "GF({p}^{r}) x={x:?}");
            }
        }
    }

    #[test]
    fn trace_is_linear_and_surjective() {
        let k = build_field(3, 3, None).unwrap();
        let mut hit = [false; 3];
        for x in k.elements() {
            hit[k.trace_to_base(x) as usize] = true;
            for y in k.elements() {
                let lhs = k.trace_to_base(k.add(x, y));
                let rhs = (k.trace_to_base(x) + k.trace_to_base(y)) % 3;
                assert_eq!(lhs, rhs);
            }
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn gf9_generator_trace() {
        let k = build_field(3, 2, None).unwrap();
        let g = k.generator();
        assert_eq!(k.trace_to_base(g), trace_by_frobenius(&k, g));
        assert_eq!(k.discrete_log(g).unwrap(), 1);
        assert_eq!(k.discrete_log(k.one()).unwrap(), 0);
    }

    #[test]
    fn dlog_is_a_homomorphism_bijection() {
        let k = build_field(5, 3, None).unwrap();
        let m = k.group_order();
        let mut seen = vec![false; m as usize];
        for x in k.elements().skip(1) {
            let l = k.discrete_log(x).unwrap();
            assert!(!seen[l as usize]);
            seen[l as usize] = true;
            assert_eq!(k.exp(l), x);
        }
        let (a, b) = (k.element(17).unwrap(), k.element(88).unwrap());
        let lhs = k.discrete_log(k.mul(a, b)).unwrap();
        assert_eq!(lhs, (k.discrete_log(a).unwrap() + k.discrete_log(b).unwrap()) % m);
        assert_eq!(k.discrete_log(k.zero()), Err(FieldError::ZeroArgument));
    }

    #[test]
    fn untabled_field_agrees_with_tabled() {
        let big = FieldBuilder::new(3, 5).table_limit(0).build().unwrap();
        let small = build_field(3, 5, None).unwrap();
        assert!(!big.has_tables() && small.has_tables());
        assert_eq!(big.generator(), small.generator());
        for idx in [1u64, 2, 5, 77, 100, 242] {
            let x = small.element(idx).unwrap();
            assert_eq!(big.discrete_log(x).unwrap(), small.discrete_log(x).unwrap());
            let y = small.element(idx * 7 % 243).unwrap();
            assert_eq!(big.mul(x, y), small.mul(x, y));
            assert_eq!(big.pow(x, -3), small.pow(x, -3));
        }
        assert_eq!(big.exp_traces().as_ref(), small.exp_traces().as_ref());
    }

    #[test]
    fn bsgs_above_table_cutoff() {
        let k = build_field(3, 17, None).unwrap();
        assert!(!k.has_tables());
        for e in [0u64, 1, 12345, 98_765_432, k.group_order() - 1] {
            let x = k.exp(e);
            assert_eq!(k.discrete_log(x).unwrap(), e);
        }
    }

    #[test]
    fn multiplicative_characters() {
        let k = build_field(3, 2, None).unwrap();
        let g = k.generator();
        let x = k.element(5).unwrap();
        assert_eq!(k.mult_char_value(0, x).unwrap(), 0);
        assert_eq!(k.mult_char_value(4, g).unwrap(), 4);
        assert_eq!(k.mult_char_value(4, k.mul(g, g)).unwrap(), 0);
        assert_eq!(k.mult_char_value(1, k.zero()), Err(FieldError::ZeroArgument));
    }

    #[test]
    fn character_orthogonality() {
        // sum over x != 0 of zeta_{q-1}^{e dlog x} vanishes for e != 0:
        // the exponents e*k are equidistributed over the subgroup they generate
        for (p, r) in [(3, 2), (3, 3), (5, 2), (3, 4), (3, 7)] {
            let k = build_field(p, r, None).unwrap();
            let m = k.group_order();
            for e in 1..m {
                let mut hist = vec![0u64; m as usize];
                for x in k.elements().skip(1) {
                    hist[k.mult_char_value(e, x).unwrap() as usize] += 1;
                }
                let step = num_integer::gcd(e, m);
                let expected = step;
                for (j, &h) in hist.iter().enumerate() {
                    let want = if (j as u64).is_multiple_of(step) { expected } else { 0 };
                    assert_eq!(h, want);
                }
            }
        }
    }

    #[test]
    fn additive_orthogonality() {
        let k = build_field(3, 4, None).unwrap();
        let mut counts = [0u64; 3];
        for x in k.elements() {
            counts[k.additive_char_index(x) as usize] += 1;
        }
        assert_eq!(counts, [27, 27, 27]);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = build_field(3, 2, None).unwrap();
        let large = build_field(3, 4, None).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let (ea, eb) = (large.embed_from(&small, a).unwrap(), large.embed_from(&small, b).unwrap());
                assert_eq!(large.embed_from(&small, small.add(a, b)).unwrap(), large.add(ea, eb));
                assert_eq!(large.embed_from(&small, small.mul(a, b)).unwrap(), large.mul(ea, eb));
            }
        }
        assert!(build_field(3, 3, None).unwrap().embed_from(&small, small.one()).is_err());
    }

    #[test]
    fn explicit_generator_checked() {
        let k = FieldBuilder::new(3, 2).generator(5).build();
        // 5 = 2 + X; check it against a brute-force order computation
        let std = build_field(3, 2, None).unwrap();
        let x = std.element(5).unwrap();
        let order = (1..=8).find(|&n| std.pow(x, n) == std.one()).unwrap();
        assert_eq!(k.is_ok(), order == 8);
        assert!(FieldBuilder::new(3, 2).generator(1).build().is_err());
    }
}
