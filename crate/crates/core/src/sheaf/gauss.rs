use num_integer::{gcd, lcm};

use super::table::{TraceKind, TraceTable};
use super::{Result, SheafError, SheafParams};
use crate::cyclo::{p_adic_ord, GroupRingElement, QRational, RouCounts};
use crate::field::{FiniteField, Psi};

/// Order of chi_e in the character group of K^x.
fn char_order(k: &FiniteField, e: u64) -> u64 {
    let m = k.group_order();
    m / gcd(e % m, m)
}

/// Sum over x in K^x of psi_K(x) chi_e(x), at level ord(chi_e).
pub fn gauss_sum(k: &FiniteField, e: u64, psi: Psi) -> GroupRingElement {
    let m = k.group_order();
    let e = e % m;
    let n = char_order(k, e);
    let step = m / n;
    let p = k.p();
    let trexp = k.exp_traces();
    let mut counts = vec![0i128; p as usize * n as usize];
    let mut j = 0u64;
    // chi_e(g^l) = zeta_n^(e l / step)
    let inc = e / step;
    for &tr in trexp.iter() {
        counts[(psi.apply(tr, p) as u64 * n + j) as usize] += 1;
        j += inc;
        if j >= n {
            j %= n;
        }
    }
    let mut g = GroupRingElement::zero(p, n);
    for (idx, c) in counts.into_iter().enumerate() {
        if c != 0 {
            g.bump((idx as u64 / n) as u32, idx as u64 % n, c);
        }
    }
    g
}

/// [`gauss_sum`] written at `level`, a multiple of ord(chi_e).
pub fn gauss_sum_at_level(k: &FiniteField, e: u64, psi: Psi, level: u64) -> GroupRingElement {
    gauss_sum(k, e, psi).lift(level)
}

fn check_split(k: &FiniteField, m: u64) -> Result<()> {
    if m == 0 || !k.group_order().is_multiple_of(m) {
        return Err(SheafError::OrderNotSplit { m, group_order: k.group_order() });
    }
    Ok(())
}

/// Product over characters rho with rho^M trivial (optionally excluding the
/// trivial one) of -Gauss(psi, rho), at level M.
pub fn twisting_factor(k: &FiniteField, m: u64, psi: Psi, exclude_trivial: bool) -> Result<GroupRingElement> {
    check_split(k, m)?;
    let step = k.group_order() / m;
    let start = if exclude_trivial { 1 } else { 0 };
    let mut acc = GroupRingElement::one(k.p(), m);
    for j in start..m {
        let g = gauss_sum_at_level(k, j * step, psi, m).scale(-1);
        acc = acc.gr_mul(&g)?;
    }
    Ok(acc)
}

/// Sum over t in K^x of table(t) chi_e(t), at level ord(chi_e).
pub fn mellin_value(k: &FiniteField, table: &TraceTable<RouCounts>, e: u64) -> Result<GroupRingElement> {
    if table.header.kind != TraceKind::H {
        return Err(SheafError::IncompleteTable("Mellin transform needs a kind-H table".into()));
    }
    if !table.is_complete() || table.by_log.len() as u64 != k.group_order() || table.header.p != k.p() {
        return Err(SheafError::IncompleteTable("table does not cover K^x".into()));
    }
    let m = k.group_order();
    let e = e % m;
    let n = char_order(k, e);
    let inc = e / (m / n);
    let mut out = GroupRingElement::zero(k.p(), n);
    for (l, v) in table.by_log.iter().enumerate() {
        let j = (inc as u128 * l as u128 % n as u128) as u64;
        for (i, &c) in v.counts().iter().enumerate() {
            if c != 0 {
                out.bump(i as u32, j, c as i128);
            }
        }
    }
    Ok(out)
}

/// (-1)^(N-D) prod_{rho^N = 1} Gauss(psi, chi rho) prod_{sigma^D = 1, sigma != 1}
/// Gauss(conj psi, conj(chi sigma)), at level lcm(ord chi, N, D).
pub fn mellin_product_formula(k: &FiniteField, params: &SheafParams, e: u64, psi: Psi) -> Result<GroupRingElement> {
    let (n, d) = (params.N(), params.D());
    check_split(k, n * d)?;
    let m = k.group_order();
    let e = e % m;
    let level = lcm(lcm(char_order(k, e), n), d);
    let psi_bar = psi.conjugate(k.p());
    let mut acc = GroupRingElement::one(k.p(), level);
    for j in 0..n {
        let g = gauss_sum_at_level(k, (e + j * (m / n)) % m, psi, level);
        acc = acc.gr_mul(&g)?;
    }
    for j in 1..d {
        let chi_sigma = (e + j * (m / d)) % m;
        let g = gauss_sum_at_level(k, (m - chi_sigma) % m, psi_bar, level);
        acc = acc.gr_mul(&g)?;
    }
    if (n + d) % 2 == 1 {
        acc = acc.scale(-1);
    }
    Ok(acc)
}

/// mellin_value(H) A(psi, N, K) A(conj psi, D, K), at level lcm(ord chi, N, D).
/// Dividing by q gives the Mellin transform of the normalized sheaf.
pub fn twisted_mellin(
    k: &FiniteField,
    params: &SheafParams,
    table: &TraceTable<RouCounts>,
    e: u64,
) -> Result<GroupRingElement> {
    let (n, d) = (params.N(), params.D());
    check_split(k, n * d)?;
    let level = lcm(lcm(char_order(k, e), n), d);
    let psi = Psi::STANDARD;
    let mv = mellin_value(k, table, e)?.lift(level);
    let an = twisting_factor(k, n, psi, false)?.lift(level);
    let ad = twisting_factor(k, d, psi.conjugate(k.p()), true)?.lift(level);
    Ok(mv.gr_mul(&an)?.gr_mul(&ad)?)
}

/// Moduli and valuations of the two sides of the Mellin identity at chi_e.
#[derive(Debug, Clone)]
pub struct MellinComparison {
    pub e: u64,
    /// |twisted_mellin| / q
    pub twisted_modulus: f64,
    pub product_modulus: f64,
    /// ord(twisted_mellin) - 1, the valuation of the normalized Mellin value
    pub twisted_ord: QRational,
    pub product_ord: QRational,
    /// ord(A(psi, N, K) A(conj psi, D, K))
    pub twisting_ord: QRational,
}

impl MellinComparison {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.product_modulus.abs().max(self.twisted_modulus.abs()).max(1e-300);
        (self.twisted_modulus - self.product_modulus).abs() / scale
    }

    /// The valuation inequality of the integrality criterion, on both sides.
    pub fn integral(&self) -> bool {
        self.twisted_ord >= self.twisting_ord && self.product_ord >= self.twisting_ord
    }
}

pub fn compare_mellin(
    k: &FiniteField,
    params: &SheafParams,
    table: &TraceTable<RouCounts>,
    e: u64,
) -> Result<MellinComparison> {
    let psi = Psi::STANDARD;
    let q = k.q() as f64;
    let tw = twisted_mellin(k, params, table, e)?;
    let prod = mellin_product_formula(k, params, e, psi)?;
    let an = twisting_factor(k, params.N(), psi, false)?;
    let ad = twisting_factor(k, params.D(), psi.conjugate(k.p()), true)?;
    let level = lcm(params.N(), params.D());
    let a = an.lift(level).gr_mul(&ad.lift(level))?;
    let one = QRational::from_integer(1);
    Ok(MellinComparison {
        e,
        twisted_modulus: tw.complex_embed().norm() / q,
        product_modulus: prod.complex_embed().norm(),
        twisted_ord: p_adic_ord(&tw, k)? - one,
        product_ord: p_adic_ord(&prod, k)?,
        twisting_ord: p_adic_ord(&a, k)?,
    })
}

#[cfg(test)]
/// |z| for a Gauss sum: sqrt(q) unless the character is trivial.
fn weil_modulus(k: &FiniteField, e: u64) -> f64 {
    if e.is_multiple_of(k.group_order()) {
        1.0
    } else {
        (k.q() as f64).sqrt()
    }
}
