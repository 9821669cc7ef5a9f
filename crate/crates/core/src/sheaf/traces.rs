use num_rational::Ratio;
use rayon::prelude::*;

use super::table::{TableHeader, TraceKind, TraceTable};
use super::{Result, SheafError, SheafParams};
use crate::cyclo::{QRational, RouCounts};
use crate::field::{build_field, FieldElement, FieldError, FiniteField, Psi};

impl TableHeader {
    pub fn for_field(k: &FiniteField, kind: TraceKind, params: Option<&SheafParams>) -> Self {
        TableHeader {
            p: k.p(),
            r: k.r(),
            modulus: k.modulus(),
            generator: k.coeffs(k.generator()),
            kind,
            n: params.map(|p| p.N()),
            d: params.map(|p| p.D()),
        }
    }
}

fn check_char(k: &FiniteField, params: &SheafParams) -> Result<()> {
    if k.p() != params.p() {
        return Err(SheafError::WrongCharacteristic { field: k.p(), params: params.p() });
    }
    Ok(())
}

fn nonzero_log(k: &FiniteField, t: FieldElement) -> Result<u64> {
    if t.is_zero() {
        return Err(SheafError::ZeroPoint);
    }
    Ok(k.discrete_log(t)?)
}

/// Precomputed data shared by every evaluation over one field.
struct Kernel<'a> {
    p: u64,
    m: u64,
    trexp: std::borrow::Cow<'a, [u32]>,
    psi: Psi,
}

impl<'a> Kernel<'a> {
    fn new(k: &'a FiniteField, psi: Psi) -> Self {
        Kernel { p: k.p() as u64, m: k.group_order(), trexp: k.exp_traces(), psi }
    }

    /// Adds Tr(g^(start - step_back l)) + offset + y_term[l] for l = 0..m.
    #[inline]
    fn inner_sum(&self, counts: &mut [i64], start: u64, step_back: u64, offset: u64, y_term: &[u32]) {
        let (p, m) = (self.p, self.m as usize);
        let step_back = step_back as usize % m;
        let mut idx = start as usize % m;
        for &yt in y_term.iter() {
            let tr = (self.trexp[idx] as u64 + offset + yt as u64) % p;
            counts[tr as usize] += 1;
            idx = if idx >= step_back { idx - step_back } else { idx + m - step_back };
        }
    }

    fn finish(&self, counts: Vec<i64>) -> RouCounts {
        let p = self.p as u32;
        let mut out = RouCounts::zero(p);
        for (i, c) in counts.into_iter().enumerate() {
            out.bump_by(self.psi.apply(i as u32, p), c);
        }
        out
    }
}

/// Sum over x in K and y in K^x of psi(c x^D / y^N - D x + N u y) with
/// c = g^lc and u = g^lu: the common shape of trace_H and trace_F.
fn double_sum(k: &FiniteField, params: &SheafParams, lc: u64, lu: u64, psi: Psi) -> RouCounts {
    let ker = Kernel::new(k, psi);
    let (p, m) = (ker.p, ker.m);
    let n_mod = params.N() % p;
    let d_mod = params.D() % p;
    // Tr(N u y) for y = g^l
    let y_term: Vec<u32> = (0..m).map(|l| (n_mod * ker.trexp[((lu + l) % m) as usize] as u64 % p) as u32).collect();
    // x = 0
    let mut counts = vec![0i64; p as usize];
    for &yt in &y_term {
        counts[yt as usize] += 1;
    }
    let nstep = params.N() % m;
    let dstep = params.D() % m;
    let rest = (0..m)
        .into_par_iter()
        .fold(
            || vec![0i64; p as usize],
            |mut acc, lx| {
                let start = (lc + dstep * lx) % m;
                let offset = (p - d_mod) * ker.trexp[lx as usize] as u64 % p;
                ker.inner_sum(&mut acc, start, nstep, offset, &y_term);
                acc
            },
        )
        .reduce(
            || vec![0i64; p as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    for (c, r) in counts.iter_mut().zip(rest) {
        *c += r;
    }
    ker.finish(counts)
}

/// Sum over x in K, y in K^x of psi_K(t x^D / y^N - D x + N y).
pub fn trace_h(k: &FiniteField, params: &SheafParams, t: FieldElement) -> Result<RouCounts> {
    trace_h_with(k, params, t, Psi::STANDARD)
}

pub fn trace_h_with(k: &FiniteField, params: &SheafParams, t: FieldElement, psi: Psi) -> Result<RouCounts> {
    check_char(k, params)?;
    let lt = nonzero_log(k, t)?;
    Ok(double_sum(k, params, lt, 0, psi))
}

/// Sum over x in K, y in K^x of psi_K(x^D / y^N - D x + u N y); u = 0 allowed.
pub fn trace_f(k: &FiniteField, params: &SheafParams, u: FieldElement) -> Result<RouCounts> {
    trace_f_with(k, params, u, Psi::STANDARD)
}

pub fn trace_f_with(k: &FiniteField, params: &SheafParams, u: FieldElement, psi: Psi) -> Result<RouCounts> {
    check_char(k, params)?;
    if u.is_zero() {
        return Ok(trace_f_at_zero(k, params, psi));
    }
    let lu = k.discrete_log(u)?;
    Ok(double_sum(k, params, 0, lu, psi))
}

/// u = 0: the y-sum of psi(x^D y^(-N)) depends only on the coset of D dlog(x)
/// modulo gcd(N, q - 1), which makes the whole sum O(q).
fn trace_f_at_zero(k: &FiniteField, params: &SheafParams, psi: Psi) -> RouCounts {
    let ker = Kernel::new(k, psi);
    let (p, m) = (ker.p as usize, ker.m);
    let g = num_integer::gcd(params.N(), m);
    let mult = g as i64;
    // bucket[c][i] = #{j = c mod g : Tr(g^j) = i}
    let mut bucket = vec![vec![0i64; p]; g as usize];
    for (j, &tr) in ker.trexp.iter().enumerate() {
        bucket[j % g as usize][tr as usize] += 1;
    }
    let d_mod = params.D() % ker.p;
    let mut counts = vec![0i64; p];
    // x = 0
    counts[0] += m as i64;
    for lx in 0..m {
        let c = (params.D() % m * lx % m % g) as usize;
        let off = ((ker.p - d_mod) * ker.trexp[lx as usize] as u64 % ker.p) as usize;
        for (i, &b) in bucket[c].iter().enumerate() {
            counts[(i + off) % p] += mult * b;
        }
    }
    ker.finish(counts)
}

/// The H trace at every point of K^x.
pub fn trace_h_table(k: &FiniteField, params: &SheafParams, psi: Psi) -> Result<TraceTable<RouCounts>> {
    check_char(k, params)?;
    let by_log: Vec<RouCounts> =
        (0..k.group_order()).into_par_iter().map(|lt| double_sum(k, params, lt, 0, psi)).collect();
    Ok(TraceTable { header: TableHeader::for_field(k, TraceKind::H, Some(params)), at_zero: None, by_log })
}

/// to_exact_integer(v) / q^twists.
pub fn normalized_trace(v: &RouCounts, q: u64, twists: u32) -> Result<QRational> {
    let n = v.to_exact_integer()?;
    let den = (q as i64).checked_pow(twists).ok_or(SheafError::Overflow)?;
    Ok(Ratio::new(n, den))
}

/// Normalized traces of H at t over GF(p^(mk)), k = 1..=kmax, where t lies in
/// `base` = GF(p^m).
pub fn frobenius_trace_sequence(
    params: &SheafParams,
    base: &FiniteField,
    t: FieldElement,
    kmax: u32,
) -> Result<Vec<QRational>> {
    frobenius_trace_sequence_with(params, base, t, kmax, Psi::STANDARD, |r| build_field(base.p(), r, None))
}

/// As [`frobenius_trace_sequence`] with a chosen character and field models.
pub fn frobenius_trace_sequence_with(
    params: &SheafParams,
    base: &FiniteField,
    t: FieldElement,
    kmax: u32,
    psi: Psi,
    make_field: impl Fn(u32) -> std::result::Result<FiniteField, FieldError>,
) -> Result<Vec<QRational>> {
    check_char(base, params)?;
    if t.is_zero() {
        return Err(SheafError::ZeroPoint);
    }
    (1..=kmax)
        .map(|j| {
            let k = make_field(base.r() * j)?;
            let tk = k.embed_from(base, t)?;
            let v = trace_h_with(&k, params, tk, psi)?;
            normalized_trace(&v, k.q(), 1)
        })
        .collect()
}

/// Sum of psi_K(N y) over the y with y^N = t.
pub fn kloosterman_a0_trace(k: &FiniteField, n: u64, t: FieldElement, psi: Psi) -> Result<RouCounts> {
    let lt = nonzero_log(k, t)?;
    let m = k.group_order();
    let p = k.p();
    let mut out = RouCounts::zero(p);
    let g = num_integer::gcd(n, m);
    if lt % g != 0 {
        return Ok(out);
    }
    let trexp = k.exp_traces();
    let n_mod = (n % p as u64) as u32;
    let (mr, nr) = (m / g, n / g % (m / g));
    let base = if mr == 1 { 0 } else { (lt / g) * modinv(nr, mr) % mr };
    for j in 0..g {
        let ly = base + j * mr;
        let tr = (n_mod as u64 * trexp[ly as usize] as u64 % p as u64) as u32;
        out.bump(psi.apply(tr, p));
    }
    Ok(out)
}

fn modinv(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// -sum over x in K of psi_K(x^D / t - D x).
pub fn kloosterman_b0_trace(k: &FiniteField, d: u64, t: FieldElement, psi: Psi) -> Result<RouCounts> {
    let lt = nonzero_log(k, t)?;
    Ok(b0_at_log(k, d, (k.group_order() - lt) % k.group_order(), psi))
}

/// -sum_x psi(c x^D - D x) with c = g^lc.
fn b0_at_log(k: &FiniteField, d: u64, lc: u64, psi: Psi) -> RouCounts {
    let m = k.group_order();
    let p = k.p() as u64;
    let trexp = k.exp_traces();
    let d_mod = d % p;
    let mut counts = vec![0i64; p as usize];
    counts[0] -= 1;
    for lx in 0..m {
        let a = trexp[((lc + d % m * lx) % m) as usize] as u64;
        let b = (p - d_mod) * trexp[lx as usize] as u64;
        counts[((a + b) % p) as usize] -= 1;
    }
    let mut out = RouCounts::zero(p as u32);
    for (i, c) in counts.into_iter().enumerate() {
        out.bump_by(psi.apply(i as u32, p as u32), c);
    }
    out
}

fn a0_by_log(k: &FiniteField, n: u64, psi: Psi) -> Vec<RouCounts> {
    (0..k.group_order()).map(|l| kloosterman_a0_trace(k, n, k.exp(l), psi).expect("nonzero point")).collect()
}

fn convolution_from(a0: &[RouCounts], b0_inv: &[RouCounts], lu: u64) -> RouCounts {
    let m = a0.len() as u64;
    let p = a0[0].p();
    let mut out = RouCounts::zero(p);
    for ls in 0..m {
        let a = &a0[ls as usize];
        if a.counts().iter().all(|&c| c == 0) {
            continue;
        }
        let lt = (lu + m - ls) % m;
        out += &(a * &b0_inv[lt as usize]);
    }
    -&out
}

/// -(sum over st = u of A0(s) B0(1/t)); equals trace_H(u).
pub fn convolution_trace(k: &FiniteField, params: &SheafParams, u: FieldElement) -> Result<RouCounts> {
    check_char(k, params)?;
    let lu = nonzero_log(k, u)?;
    let m = k.group_order();
    let psi = Psi::STANDARD;
    let a0 = a0_by_log(k, params.N(), psi);
    // B0(1/t) at t = g^l is -sum_x psi(g^l x^D - D x)
    let b0_inv: Vec<RouCounts> = (0..m).map(|l| b0_at_log(k, params.D(), l, psi)).collect();
    Ok(convolution_from(&a0, &b0_inv, lu))
}

/// The convolution trace at every point of K^x.
pub fn convolution_table(k: &FiniteField, params: &SheafParams) -> Result<TraceTable<RouCounts>> {
    check_char(k, params)?;
    let m = k.group_order();
    let psi = Psi::STANDARD;
    let a0 = a0_by_log(k, params.N(), psi);
    let b0_inv: Vec<RouCounts> = (0..m).into_par_iter().map(|l| b0_at_log(k, params.D(), l, psi)).collect();
    let by_log: Vec<RouCounts> = (0..m).into_par_iter().map(|lu| convolution_from(&a0, &b0_inv, lu)).collect();
    Ok(TraceTable { header: TableHeader::for_field(k, TraceKind::Convolution, Some(params)), at_zero: None, by_log })
}
