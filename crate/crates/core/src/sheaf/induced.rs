//! Pushforwards of rank-one systems along the maps that make H induced for
//! D = 3 and D = 4, and a matcher for multiplicative translates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::{TableHeader, TraceKind, TraceTable, TraceValue};
use super::{Result, SheafError};
use crate::cyclo::{GroupRingElement, RouCounts};
use crate::field::{FieldElement, FiniteField};

/// The D = 3 candidates chi_3^a(u) chi_3^b(u - 1), as (a, b).
pub const D3_CHARACTERS: [(u64, u64); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InducedCase {
    /// N = q0 + 1, D = 3, pi(u) = 1/(u^q0 (u - 1)), chi_3^a(u) chi_3^b(u - 1)
    D3 { a: u64, b: u64 },
    /// N = 2 q0 + 1, D = 4, pi(u) = 1/(u^(2 q0) (u - 1)), chi_2(u (u - 1))
    D4a,
    /// N = q0 + 2, D = 4, pi(u) = 1/(u^q0 (u - 1)^2), chi_2(u (u - 1))
    D4b,
}

impl InducedCase {
    /// (N, D) for this case at q0.
    pub fn params(self, q0: u64) -> (u64, u64) {
        match self {
            InducedCase::D3 { .. } => (q0 + 1, 3),
            InducedCase::D4a => (2 * q0 + 1, 4),
            InducedCase::D4b => (q0 + 2, 4),
        }
    }

    fn exponents(self, q0: u64) -> (u64, u64) {
        match self {
            InducedCase::D3 { .. } => (q0, 1),
            InducedCase::D4a => (2 * q0, 1),
            InducedCase::D4b => (q0, 2),
        }
    }

    fn char_order(self) -> u64 {
        match self {
            InducedCase::D3 { .. } => 3,
            _ => 2,
        }
    }

    fn char_exponents(self) -> (u64, u64) {
        match self {
            InducedCase::D3 { a, b } => (a, b),
            _ => (1, 1),
        }
    }
}

fn validate(k: &FiniteField, case: InducedCase, q0: u64) -> Result<()> {
    let bad = |m: String| Err(SheafError::BadCaseParameters(m));
    let p = k.p() as u64;
    let mut x = q0;
    while x > 1 && x.is_multiple_of(p) {
        x /= p;
    }
    if q0 < p || x != 1 {
        return bad(format!("q0 = {q0} is not a power of p = {p}"));
    }
    match case {
        InducedCase::D3 { a, b } => {
            if q0 % 3 != 1 {
                return bad("D = 3 needs q0 = 1 mod 3".into());
            }
            if !(1..=2).contains(&a) || !(1..=2).contains(&b) {
                return bad("cubic character exponents must be 1 or 2".into());
            }
        }
        _ => {
            if p == 2 {
                return bad("D = 4 needs odd characteristic".into());
            }
        }
    }
    if !k.group_order().is_multiple_of(case.char_order()) {
        return bad(format!("K has no character of order {}", case.char_order()));
    }
    Ok(())
}

/// log of pi(u) = 1/(u^A (u-1)^B), and the character exponent of u, at
/// level 2 or 3; None for u in {0, 1}.
fn point_data(k: &FiniteField, case: InducedCase, q0: u64, u: FieldElement) -> Option<(u64, u64)> {
    if u.is_zero() || u == k.one() {
        return None;
    }
    let m = k.group_order();
    let (ea, eb) = case.exponents(q0);
    let (ca, cb) = case.char_exponents();
    let n = case.char_order();
    let lu = k.discrete_log(u).ok()?;
    let lv = k.discrete_log(k.sub(u, k.one())).ok()?;
    let denom = ((ea % m) as u128 * lu as u128 + (eb % m) as u128 * lv as u128) % m as u128;
    let lpi = (m - denom as u64) % m;
    // chi_n(g^l) = zeta_n^l
    let j = (ca * (lu % n) + cb * (lv % n)) % n;
    Some((lpi, j))
}

/// Sum over u outside {0, 1} with pi(u) = t of the rank-one character at u.
pub fn induced_pushforward_trace(
    k: &FiniteField,
    case: InducedCase,
    q0: u64,
    t: FieldElement,
) -> Result<GroupRingElement> {
    validate(k, case, q0)?;
    if t.is_zero() {
        return Err(SheafError::ZeroPoint);
    }
    let lt = k.discrete_log(t)?;
    let n = case.char_order();
    let mut out = GroupRingElement::zero(k.p(), n);
    for u in k.elements() {
        if let Some((lpi, j)) = point_data(k, case, q0, u) {
            if lpi == lt {
                out.bump(0, j, 1);
            }
        }
    }
    Ok(out)
}

/// The pushforward trace at every point of K^x, in one pass over K.
pub fn induced_pushforward_table(
    k: &FiniteField,
    case: InducedCase,
    q0: u64,
) -> Result<TraceTable<GroupRingElement>> {
    validate(k, case, q0)?;
    let n = case.char_order();
    let mut by_log = vec![GroupRingElement::zero(k.p(), n); k.group_order() as usize];
    for u in k.elements() {
        if let Some((lpi, j)) = point_data(k, case, q0, u) {
            by_log[lpi as usize].bump(0, j, 1);
        }
    }
    let (big_n, big_d) = case.params(q0);
    let mut header = TableHeader::for_field(k, TraceKind::Pushforward, None);
    header.n = Some(big_n);
    header.d = Some(big_d);
    Ok(TraceTable { header, at_zero: None, by_log })
}

/// A(t) = alpha B(s t) for all t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    /// s = g^translate_log
    pub translate_log: u64,
    pub alpha: Complex64,
    pub residual: f64,
}

const ZERO_EPS: f64 = 1e-9;
const MATCH_TOL: f64 = 1e-6;

/// Searches s = g^k, k = 0, 1, ..., for a constant alpha with
/// A(t) = alpha B(s t) on all of K^x, within 1e-6 in the complex embedding.
pub fn match_up_to_translate_twist<V: TraceValue, W: TraceValue>(
    a: &TraceTable<V>,
    b: &TraceTable<W>,
) -> Option<Match> {
    if a.by_log.len() != b.by_log.len() || a.header.p != b.header.p || a.header.r != b.header.r {
        return None;
    }
    let m = a.by_log.len();
    let av: Vec<Complex64> = a.by_log.iter().map(TraceValue::embed).collect();
    let bv: Vec<Complex64> = b.by_log.iter().map(TraceValue::embed).collect();
    'outer: for s in 0..m {
        let at = |l: usize| bv[(l + s) % m];
        let first = (0..m).find(|&l| av[l].norm() > ZERO_EPS && at(l).norm() > ZERO_EPS);
        let alpha = match first {
            Some(l) => av[l] / at(l),
            None => {
                if av.iter().chain(bv.iter()).all(|z| z.norm() <= ZERO_EPS) {
                    return Some(Match { translate_log: s as u64, alpha: Complex64::new(1.0, 0.0), residual: 0.0 });
                }
                continue;
            }
        };
        let mut residual = 0.0f64;
        for (l, &a) in av.iter().enumerate() {
            let r = (a - alpha * at(l)).norm();
            if r > MATCH_TOL {
                continue 'outer;
            }
            residual = residual.max(r);
        }
        return Some(Match { translate_log: s as u64, alpha, residual });
    }
    None
}

/// A table of random sums of p-th roots of unity with the given header,
/// for negative controls. Deterministic in `seed`.
pub fn random_control_table(header: &TableHeader, seed: u64) -> TraceTable<RouCounts> {
    let q = (header.p as u64).pow(header.r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_log = (0..q - 1)
        .map(|_| {
            let counts = (0..header.p).map(|_| rng.gen_range(-(q as i64)..=q as i64)).collect();
            RouCounts::from_counts(header.p, counts)
        })
        .collect();
    let mut h = header.clone();
    h.kind = TraceKind::H;
    TraceTable { header: h, at_zero: None, by_log }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, Psi};
    use crate::sheaf::{trace_h_table, SheafParams};

    #[test]
    fn fiber_sizes_add_up() {
        let k = build_field(3, 4, None).unwrap();
        for case in [InducedCase::D4a, InducedCase::D4b] {
            let mut total = 0u64;
            for u in k.elements() {
                if point_data(&k, case, 3, u).is_some() {
                    total += 1;
                }
            }
            assert_eq!(total, k.q() - 2);
        }
    }

    #[test]
    fn single_point_agrees_with_table() {
        let k = build_field(3, 4, None).unwrap();
        let table = induced_pushforward_table(&k, InducedCase::D4a, 3).unwrap();
        for l in [0u64, 1, 17, 40, 79] {
            let v = induced_pushforward_trace(&k, InducedCase::D4a, 3, k.exp(l)).unwrap();
            assert_eq!(&v, table.at_log(l));
        }
    }

    #[test]
    fn bad_parameters() {
        let k = build_field(3, 4, None).unwrap();
        assert!(induced_pushforward_table(&k, InducedCase::D4a, 4).is_err());
        assert!(induced_pushforward_table(&k, InducedCase::D3 { a: 1, b: 1 }, 3).is_err());
        let k7 = build_field(7, 2, None).unwrap();
        assert!(induced_pushforward_table(&k7, InducedCase::D3 { a: 3, b: 1 }, 7).is_err());
        assert!(matches!(
            induced_pushforward_trace(&k, InducedCase::D4a, 3, k.zero()),
            Err(SheafError::ZeroPoint)
        ));
    }

    #[test]
    fn identical_and_shifted_tables() {
        let k = build_field(3, 3, None).unwrap();
        let params = SheafParams::new(3, 5, 2).unwrap();
        let a = trace_h_table(&k, &params, Psi::STANDARD).unwrap();
        let m = match_up_to_translate_twist(&a, &a).unwrap();
        assert_eq!(m.translate_log, 0);
        assert!((m.alpha - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(m.residual, 0.0);
        let mut b = a.clone();
        b.by_log.rotate_right(7);
        let m = match_up_to_translate_twist(&a, &b).unwrap();
        assert_eq!(m.translate_log, 7);
    }

    #[test]
    fn random_tables_do_not_match() {
        let k = build_field(3, 3, None).unwrap();
        let params = SheafParams::new(3, 5, 2).unwrap();
        let a = trace_h_table(&k, &params, Psi::STANDARD).unwrap();
        for seed in 0..4 {
            let r = random_control_table(&a.header, seed);
            assert!(match_up_to_translate_twist(&r, &a).is_none());
        }
        let r0 = random_control_table(&a.header, 0);
        assert_eq!(r0.by_log, random_control_table(&a.header, 0).by_log);
    }

    fn h_table(p: u32, r: u32, n: u64, d: u64) -> TraceTable<RouCounts> {
        let k = build_field(p, r, None).unwrap();
        trace_h_table(&k, &SheafParams::new(p, n, d).unwrap(), Psi::STANDARD).unwrap()
    }

    #[test]
    fn d4_cases_match_h() {
        let k = build_field(3, 4, None).unwrap();
        for (case, n) in [(InducedCase::D4a, 7), (InducedCase::D4b, 5)] {
            let push = induced_pushforward_table(&k, case, 3).unwrap();
            let h = h_table(3, 4, n, 4);
            let m = match_up_to_translate_twist(&push, &h).expect("match");
            // t -> -t, and the Tate twist by q
            assert_eq!(m.translate_log, 40);
            assert!((m.alpha - Complex64::new(1.0 / 81.0, 0.0)).norm() < 1e-12);
            assert!(m.residual < 1e-9);
        }
    }

    #[test]
    fn d3_case_matches_h() {
        let k = build_field(7, 2, None).unwrap();
        let h = h_table(7, 2, 8, 3);
        for (a, b) in D3_CHARACTERS {
            let push = induced_pushforward_table(&k, InducedCase::D3 { a, b }, 7).unwrap();
            let m = match_up_to_translate_twist(&push, &h);
            if a == b {
                assert!(m.is_none());
            } else {
                let m = m.expect("match");
                assert_eq!(m.translate_log, 24);
                assert!((m.alpha - Complex64::new(1.0 / 49.0, 0.0)).norm() < 1e-12);
            }
        }
    }
}
