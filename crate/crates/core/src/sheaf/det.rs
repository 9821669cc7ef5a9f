//! Frobenius eigenvalues at t = 0 and the sign of the determinant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss::gauss_sum_at_level;
use super::{trace_f, Result, SheafError, SheafParams};
use crate::cyclo::GroupRingElement;
use crate::field::{build_field, pow_mod_u64, FiniteField, Psi};

/// numerator / denominator, numerator exact at level N.
#[derive(Debug, Clone)]
pub struct Eigenvalue {
    pub numerator: GroupRingElement,
    pub denominator: u64,
}

impl Eigenvalue {
    pub fn complex(&self) -> Complex64 {
        self.numerator.complex_embed().value / self.denominator as f64
    }

    pub fn is_exactly_one(&self) -> bool {
        self.numerator.represents_same(&GroupRingElement::integer(
            self.numerator.p(),
            self.numerator.level(),
            self.denominator as i128,
        ))
    }
}

/// The eigenvalues of Frobenius over GF(p^d) on the fiber at 0.
#[derive(Debug, Clone)]
pub struct EigenvalueList {
    pub params: SheafParams,
    pub d: u32,
    pub values: Vec<Eigenvalue>,
}

impl EigenvalueList {
    /// Product of the complex values, accumulated in log-polar form.
    pub fn product(&self) -> Complex64 {
        let (mut log_abs, mut arg) = (0.0f64, 0.0f64);
        for v in &self.values {
            let z = v.complex();
            log_abs += z.norm().ln();
            arg += z.arg();
        }
        Complex64::from_polar(log_abs.exp(), arg)
    }

    /// Exact sum of the numerators over the common denominator q:
    /// this is the trace of Frobenius at 0 times q.
    pub fn scaled_sum(&self) -> Result<GroupRingElement> {
        let q = self.values.iter().map(|v| v.denominator).max().unwrap_or(1);
        let mut acc = GroupRingElement::zero(self.params.p(), self.params.N());
        for v in &self.values {
            let scaled = v.numerator.scale((q / v.denominator) as i128);
            acc = acc.gr_add(&scaled)?;
        }
        Ok(acc)
    }
}

/// The multiplicative order of p modulo n.
pub fn multiplicative_order(p: u64, n: u64) -> Option<u32> {
    if num_integer::gcd(p, n) != 1 {
        return None;
    }
    let mut x = p % n;
    let mut d = 1u32;
    while x != 1 % n {
        x = (x as u128 * p as u128 % n as u128) as u64;
        d += 1;
    }
    Some(d)
}

fn check_d(params: &SheafParams, k: &FiniteField) -> Result<()> {
    if !k.group_order().is_multiple_of(params.N()) {
        return Err(SheafError::OrderNotSplit { m: params.N(), group_order: k.group_order() });
    }
    Ok(())
}

/// {1} together with rho^D(D) Gauss(conj psi, conj rho^D) Gauss(psi, rho) / p^d
/// for the N - 1 nontrivial rho with rho^N trivial, over K = GF(p^d).
pub fn frob_zero_eigenvalues(params: &SheafParams, d: u32) -> Result<EigenvalueList> {
    let k = build_field(params.p(), d, None)?;
    check_d(params, &k)?;
    let (n, dd) = (params.N(), params.D());
    let m = k.group_order();
    let step = m / n;
    let psi = Psi::STANDARD;
    let psi_bar = psi.conjugate(k.p());
    let q = k.q();
    let log_d = k.discrete_log(k.from_int(dd as i64))?;
    let mut values = vec![Eigenvalue { numerator: GroupRingElement::one(k.p(), n), denominator: 1 }];
    for j in 1..n {
        let e = j * step;
        // rho^D(D) = zeta_N^(j D dlog D)
        let w = (j as u128 * dd as u128 % n as u128 * log_d as u128 % n as u128) as u64;
        let root = GroupRingElement::root(k.p(), n, 0, w);
        let g1 = gauss_sum_at_level(&k, (m - (e * dd) % m) % m, psi_bar, n);
        let g2 = gauss_sum_at_level(&k, e, psi, n);
        let numerator = root.gr_mul(&g1)?.gr_mul(&g2)?;
        values.push(Eigenvalue { numerator, denominator: q });
    }
    Ok(EigenvalueList { params: *params, d, values })
}

/// The eigenvalue sum checked against the trace of F at 0 over GF(p^d).
pub fn eigenvalue_sum_matches_trace(list: &EigenvalueList) -> Result<bool> {
    let k = build_field(list.params.p(), list.d, None)?;
    let direct = trace_f(&k, &list.params, k.zero())?.to_group_ring(list.params.N());
    Ok(list.scaled_sum()?.represents_same(&direct))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetSign {
    Plus,
    Minus,
    NotCovered,
}

impl DetSign {
    pub fn as_int(self) -> Option<i32> {
        match self {
            DetSign::Plus => Some(1),
            DetSign::Minus => Some(-1),
            DetSign::NotCovered => None,
        }
    }
}

/// Sign of the determinant over GF(p^d), d the degree of F_p(mu_N), when
/// D = N + 1 mod p - 1. N odd gives +1; N even gives -1 exactly when D is a
/// nonsquare in GF(p^d).
pub fn determinant_sign(params: &SheafParams) -> DetSign {
    let p = params.p() as u64;
    let (n, d) = (params.N(), params.D());
    let pm1 = p - 1;
    if d % pm1 != (n + 1) % pm1 {
        return DetSign::NotCovered;
    }
    if n % 2 == 1 {
        return DetSign::Plus;
    }
    let deg = multiplicative_order(p, n).expect("N is prime to p");
    // D in F_p is a square in F_{p^deg} iff D^((p^deg - 1)/2) = 1; the
    // exponent is (p-1)/2 * (1 + p + ... + p^(deg-1)) and D^p = D
    let euler = pow_mod_u64(d % p, pm1 / 2 * deg as u64, p);
    if p == 2 || euler == 1 {
        DetSign::Plus
    } else {
        DetSign::Minus
    }
}
