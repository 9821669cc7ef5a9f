//! Base-p digit sums, brackets and Kubert's V function, with exhaustive
//! checkers for the finite-monodromy inequality.
//!
//! For x = k/(p^r - 1) with 0 < k < p^r - 1 we use
//! `V(x) = s(k) / (r (p - 1))`, s the base-p digit sum, and V(0) = 0.
//! Every check below is phrased in integer digit sums so that no rational
//! arithmetic happens in the scans.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::QRational;
use crate::sheaf::{ParamsError, SheafParams};

/// Levels beyond this make p^r - 1 overflow the scans' u64 arithmetic for p = 3.
pub const MAX_LEVEL: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KubertError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("level {r} is outside the supported range 1..={max} with p^r <= 2^40")]
    LevelOutOfRange { r: u32, max: u32 },
    #[error("p must be odd")]
    EvenPrime,
    #[error("bracket and V forms disagree at r={r}, x={x}")]
    FormsDisagree { r: u32, x: u64 },
    #[error("malformed report: {0}")]
    Report(String),
    #[error("no level r <= {max} has {den} dividing p^r - 1")]
    NoLevel { den: i64, max: u32 },
}

pub type Result<T> = std::result::Result<T, KubertError>;

pub fn digit_sum(mut n: u128, p: u32) -> u32 {
    let p = p as u128;
    let mut s = 0u32;
    while n > 0 {
        s += (n % p) as u32;
        n /= p;
    }
    s
}

fn level_modulus(p: u32, r: u32) -> u64 {
    (p as u64).pow(r) - 1
}

/// Digit sum of the representative of x mod (p^r - 1) in [1, p^r - 1].
pub fn bracket_r(x: i128, p: u32, r: u32) -> u32 {
    let m = level_modulus(p, r) as i128;
    let rep = x.rem_euclid(m);
    let rep = if rep == 0 { m } else { rep };
    digit_sum(rep as u128, p)
}

/// x = k / (p^r - 1) in (Q/Z) prime to p.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QZElement {
    pub p: u32,
    pub r: u32,
    pub k: u64,
}

impl QZElement {
    pub fn new(p: u32, r: u32, k: i128) -> Self {
        let m = level_modulus(p, r) as i128;
        QZElement { p, r, k: k.rem_euclid(m) as u64 }
    }

    pub fn modulus(&self) -> u64 {
        level_modulus(self.p, self.r)
    }

    /// As a rational in [0, 1).
    pub fn to_rational(&self) -> QRational {
        Ratio::new(self.k as i64, self.modulus() as i64)
    }

    /// The same point written at the smallest level that contains it.
    pub fn minimal_level(&self) -> QZElement {
        let x = self.to_rational();
        (1..=self.r)
            .filter(|s| self.r.is_multiple_of(*s))
            .find_map(|s| {
                let m = level_modulus(self.p, s) as i64;
                (m % x.denom() == 0).then(|| QZElement { p: self.p, r: s, k: (x.numer() * (m / x.denom())) as u64 })
            })
            .expect("the element's own level always works")
    }

    /// Written at level `s`, a multiple of the current level.
    pub fn at_level(&self, s: u32) -> QZElement {
        assert!(s.is_multiple_of(self.r), "target level must be a multiple");
        let factor = level_modulus(self.p, s) / self.modulus();
        QZElement { p: self.p, r: s, k: self.k * factor }
    }

    pub fn neg(&self) -> QZElement {
        QZElement::new(self.p, self.r, -(self.k as i128))
    }

    pub fn add(&self, other: &QZElement) -> QZElement {
        assert_eq!((self.p, self.r), (other.p, other.r), "add at a common level");
        QZElement::new(self.p, self.r, self.k as i128 + other.k as i128)
    }

    pub fn scale(&self, c: i128) -> QZElement {
        QZElement::new(self.p, self.r, self.k as i128 * c)
    }
}

impl PartialEq for QZElement {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k as u128 * other.modulus() as u128 == other.k as u128 * self.modulus() as u128
    }
}

impl Eq for QZElement {}

pub fn kubert_v(x: &QZElement) -> QRational {
    if x.k == 0 {
        return Ratio::from_integer(0);
    }
    let b = bracket_r(-(x.k as i128), x.p, x.r) as i64;
    let denom = x.r as i64 * (x.p as i64 - 1);
    Ratio::from_integer(1) - Ratio::new(b, denom)
}

/// V at a rational point whose denominator is prime to p.
pub fn kubert_v_rational(p: u32, x: QRational) -> Result<QRational> {
    let den = *x.denom();
    for r in 1..=MAX_LEVEL {
        let m = level_modulus(p, r) as i64;
        if m % den == 0 {
            let k = x.numer() * (m / den);
            return Ok(kubert_v(&QZElement::new(p, r, k as i128)));
        }
    }
    Err(KubertError::NoLevel { den, max: MAX_LEVEL })
}

/// Largest p^r an exhaustive scan will accept.
const MAX_LEVEL_SIZE: u64 = 1 << 40;

fn check_level(p: u32, r: u32) -> Result<()> {
    let fits = (p as u64).checked_pow(r).is_some_and(|q| q <= MAX_LEVEL_SIZE);
    if r == 0 || r > MAX_LEVEL || !fits {
        return Err(KubertError::LevelOutOfRange { r, max: MAX_LEVEL });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A point k/(p^r - 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub r: u32,
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub r_max: u32,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl CriterionReport {
    /// Parses and validates a report: admissible parameters, violations at
    /// levels within range, and a verdict consistent with them.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: CriterionReport =
            serde_json::from_str(text).map_err(|e| KubertError::Report(e.to_string()))?;
        SheafParams::new(report.p, report.n, report.d)?;
        check_level(report.p, report.r_max)?;
        for v in &report.violations {
            if v.r == 0 || v.r > report.r_max || v.k == 0 || v.k >= level_modulus(report.p, v.r) {
                return Err(KubertError::Report(format!("violation {v:?} is out of range")));
            }
        }
        let verdict = if report.violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
        if verdict != report.verdict {
            return Err(KubertError::Report("verdict does not match the violations".into()));
        }
        Ok(report)
    }
}

/// Is k the smallest element of its orbit under multiplication by p mod m.
fn is_orbit_min(k: u64, p: u64, r: u32, m: u64) -> bool {
    let mut j = k;
    for _ in 1..r {
        j = (j as u128 * p as u128 % m as u128) as u64;
        if j < k {
            return false;
        }
    }
    true
}

/// Integer form of V(Nx) + V(-Dx) + V(x) >= 1 at x = k/m.
#[inline]
fn criterion_holds(k: u64, n: u64, d: u64, p: u32, r: u32, m: u64) -> bool {
    let nk = (n as u128 * k as u128 % m as u128) as u64;
    let dk = (d as u128 * k as u128 % m as u128) as u64;
    let minus_dk = if dk == 0 { 0 } else { m - dk };
    let total = digit_sum(nk as u128, p) + digit_sum(minus_dk as u128, p) + digit_sum(k as u128, p);
    total >= r * (p - 1)
}

/// Violations of the criterion at level r, one orbit representative each.
pub fn criterion_violations_at_level(params: &SheafParams, r: u32) -> Vec<Violation> {
    let (p, n, d) = (params.p(), params.N(), params.D());
    let m = level_modulus(p, r);
    (1..m)
        .into_par_iter()
        .filter(|&k| is_orbit_min(k, p as u64, r, m) && !criterion_holds(k, n, d, p, r, m))
        .map(|k| Violation { r, k })
        .collect()
}

/// Exhaustive test of V(Nx) + V(-Dx) + V(x) >= 1 over every nonzero x of
/// level at most `r_max`, one representative per orbit of x -> px.
///
/// For (3, 23, 4) the bracket form of the inequality is evaluated as well,
/// and a pointwise disagreement between the two is reported as an error.
pub fn check_criterion(p: u32, n: u64, d: u64, r_max: u32) -> Result<CriterionReport> {
    let params = SheafParams::new(p, n, d)?;
    check_level(p, r_max)?;
    let mut violations = Vec::new();
    for r in 1..=r_max {
        violations.extend(criterion_violations_at_level(&params, r));
    }
    if (p, n, d) == (3, 23, 4) {
        for r in 1..=r_max {
            if let Some(x) = bracket_form_disagreement(r) {
                return Err(KubertError::FormsDisagree { r, x });
            }
        }
    }
    let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(CriterionReport { p, n, d, r_max, verdict, violations })
}

/// `[23x + h]_r <= [x]_r + [2x + h]_r` with h = (3^r - 1)/2.
pub fn bracket_form_holds(r: u32, x: u64) -> bool {
    let m = level_modulus(3, r) as i128;
    let h = m / 2;
    let x = x as i128;
    bracket_r(23 * x + h, 3, r) <= bracket_r(x, 3, r) + bracket_r(2 * x + h, 3, r)
}

/// First X in (0, 3^r - 1) where the bracket form and the V form at the
/// corresponding point k = -(X + h) disagree. Points with 2X + h = 0 are
/// skipped: there the bracket of the zero class is r(p-1) while V(0) = 0.
pub fn bracket_form_disagreement(r: u32) -> Option<u64> {
    let m = level_modulus(3, r);
    let h = m / 2;
    (1..m).into_par_iter().find_first(|&x| {
        if (2 * x as u128 + h as u128).is_multiple_of(m as u128) {
            return false;
        }
        let k = (2 * m - (x + h) % m) % m;
        let v_form = k == 0 || criterion_holds(k, 23, 4, 3, r, m);
        v_form != bracket_form_holds(r, x)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub r: u32,
    pub x: u64,
    pub bound: Bound,
}

/// Leading three base-3 digits of x written with exactly r digits.
fn leading_digits(x: u64, r: u32) -> [u32; 3] {
    let mut out = [0u32; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let pos = r - 1 - i as u32;
        *slot = (x / 3u64.pow(pos) % 3) as u32;
    }
    out
}

/// Whether x is exempt from the strong form of the bound.
pub fn strong_bound_exempt(r: u32, x: u64) -> bool {
    match r {
        1 => x == 1,
        2 => x == 3,
        _ => matches!(leading_digits(x, r), [1, 0, 0] | [2, 0, 2]),
    }
}

/// Checks `s(23x + h) <= s(x) + s(2x + h) + 2` for all 0 <= x < 3^r and
/// the same without the `+ 2` off the exempt set, for every r <= r_max.
/// Digit sums here are of plain integers, with no reduction.
pub fn check_lemma_bound(r_max: u32) -> Result<Vec<BoundViolation>> {
    check_level(3, r_max)?;
    let mut out = Vec::new();
    for r in 1..=r_max {
        let top = 3u64.pow(r);
        let h = (top - 1) / 2;
        let found: Vec<BoundViolation> = (0..top)
            .into_par_iter()
            .flat_map_iter(|x| {
                let lhs = digit_sum(23 * x as u128 + h as u128, 3);
                let rhs = digit_sum(x as u128, 3) + digit_sum(2 * x as u128 + h as u128, 3);
                let mut v = Vec::new();
                if lhs > rhs + 2 {
                    v.push(BoundViolation { r, x, bound: Bound::Weak });
                }
                if lhs > rhs && !strong_bound_exempt(r, x) {
                    v.push(BoundViolation { r, x, bound: Bound::Strong });
                }
                v
            })
            .collect();
        out.extend(found);
    }
    Ok(out)
}

/// Checks `s(23x + h) <= s(x) + s(2x + 2 + h) + 2` for 2 <= r <= r_max and
/// 0 <= x < 3^r with x not 2 or 6 mod 9.
pub fn check_corollary(r_max: u32) -> Result<Vec<BoundViolation>> {
    check_level(3, r_max)?;
    let mut out = Vec::new();
    for r in 2..=r_max {
        let top = 3u64.pow(r);
        let h = (top - 1) / 2;
        let found: Vec<BoundViolation> = (0..top)
            .into_par_iter()
            .filter(|x| !matches!(x % 9, 2 | 6))
            .filter(|&x| {
                let lhs = digit_sum(23 * x as u128 + h as u128, 3);
                let rhs = digit_sum(x as u128, 3) + digit_sum(2 * x as u128 + 2 + h as u128, 3);
                lhs > rhs + 2
            })
            .map(|x| BoundViolation { r, x, bound: Bound::Weak })
            .collect();
        out.extend(found);
    }
    Ok(out)
}

/// `1 - V(-23x - 1/2) = V(2x + 1/2) + V(x)` at x = 1/4 and x = 3/4 (p = 3).
pub fn corollary_special_points() -> Vec<(QRational, bool)> {
    let half = Ratio::new(1, 2);
    [Ratio::new(1, 4), Ratio::new(3, 4)]
        .into_iter()
        .map(|x: QRational| {
            let v = |y: QRational| kubert_v_rational(3, fract(y)).expect("denominator 4 splits at r = 2");
            let lhs = Ratio::from_integer(1) - v(-x * 23 - half);
            let rhs = v(x * 2 + half) + v(x);
            (x, lhs == rhs)
        })
        .collect()
}

fn fract(x: QRational) -> QRational {
    x - x.floor()
}

/// Points of level r <= r_max violating V(x) + V(x + 1/2) = V(2x) + 1/2.
pub fn duplication_check(p: u32, r_max: u32) -> Result<Vec<Violation>> {
    if p == 2 {
        return Err(KubertError::EvenPrime);
    }
    check_level(p, r_max)?;
    let half = Ratio::new(1, 2);
    let mut out = Vec::new();
    for r in 1..=r_max {
        let m = level_modulus(p, r);
        let h = QZElement::new(p, r, (m / 2) as i128);
        out.extend((0..m).into_par_iter().filter_map(|k| {
            let x = QZElement::new(p, r, k as i128);
            let lhs = kubert_v(&x) + kubert_v(&x.add(&h));
            let rhs = kubert_v(&x.scale(2)) + half;
            (lhs != rhs).then_some(Violation { r, k })
        }).collect::<Vec<_>>());
    }
    Ok(out)
}

/// Points of level r <= r_max violating V(x) + V(-x) = 1 (x != 0) or V(px) = V(x).
pub fn reflection_check(p: u32, r_max: u32) -> Result<Vec<Violation>> {
    check_level(p, r_max)?;
    let one = Ratio::from_integer(1);
    let mut out = Vec::new();
    for r in 1..=r_max {
        let m = level_modulus(p, r);
        out.extend((1..m).into_par_iter().filter_map(|k| {
            let x = QZElement::new(p, r, k as i128);
            let v = kubert_v(&x);
            let ok = v + kubert_v(&x.neg()) == one
                && kubert_v(&x.scale(p as i128)) == v
                && v >= Ratio::from_integer(0)
                && v < one;
            (!ok).then_some(Violation { r, k })
        }).collect::<Vec<_>>());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "family Dq-1")]
    FamilyDqMinus1,
    #[serde(rename = "induced D=3")]
    InducedD3,
    #[serde(rename = "induced D=4")]
    InducedD4,
    #[serde(rename = "UNEXPLAINED")]
    Unexplained,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excluded {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub witness: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: u32,
    pub n_max: u64,
    pub d_max: u64,
    pub r_max: u32,
    pub survivors: Vec<Candidate>,
    pub excluded: Vec<Excluded>,
}

fn powers_of(p: u32, limit: u64) -> impl Iterator<Item = u64> {
    std::iter::successors(Some(p as u64), move |&q| q.checked_mul(p as u64)).take_while(move |&q| q <= limit)
}

/// Which of the known finite-monodromy families (p, N, D) belongs to.
pub fn classify(p: u32, n: u64, d: u64) -> Classification {
    let limit = 2 * n + 2;
    if powers_of(p, limit).any(|q| d * q - 1 == n) {
        Classification::FamilyDqMinus1
    } else if d == 3 && powers_of(p, limit).any(|q| q % 3 == 1 && q + 1 == n) {
        Classification::InducedD3
    } else if d == 4 && powers_of(p, limit).any(|q| q + 2 == n || 2 * q + 1 == n) {
        Classification::InducedD4
    } else {
        Classification::Unexplained
    }
}

/// Scans every admissible (N, D) with N <= n_max, D <= d_max, keeping the
/// pairs with no violation up to r_max and recording a witness for the rest.
pub fn search_candidates(p: u32, n_max: u64, d_max: u64, r_max: u32) -> Result<SearchReport> {
    check_level(p, r_max)?;
    let mut survivors = Vec::new();
    let mut excluded = Vec::new();
    for d in 2..=d_max {
        for n in d + 1..=n_max {
            if SheafParams::new(p, n, d).is_err() {
                continue;
            }
            let witness = (1..=r_max).find_map(|r| {
                let m = level_modulus(p, r);
                (1..m)
                    .into_par_iter()
                    .find_first(|&k| !criterion_holds(k, n, d, p, r, m))
                    .map(|k| Violation { r, k })
            });
            match witness {
                Some(w) => excluded.push(Excluded { n, d, witness: w }),
                None => survivors.push(Candidate { n, d, classification: classify(p, n, d) }),
            }
        }
    }
    survivors.sort_by_key(|c| (c.n, c.d));
    excluded.sort_by_key(|c| (c.n, c.d));
    Ok(SearchReport { p, n_max, d_max, r_max, survivors, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(0, 3), 0);
        assert_eq!(digit_sum(23, 3), 5);
        assert_eq!(digit_sum(460, 3), 6); // 460 = 122001 in base 3
    }

    #[test]
    fn subadditivity_up_to_3_pow_6() {
        for x in 0..729u128 {
            for y in 0..729u128 {
                assert!(digit_sum(x + y, 3) <= digit_sum(x, 3) + digit_sum(y, 3));
            }
        }
    }

    #[test]
    fn brackets() {
        assert_eq!(bracket_r(10, 3, 2), 2);
        assert_eq!(bracket_r(8, 3, 2), 4);
        assert_eq!(bracket_r(0, 3, 2), 4);
        for r in 1..6 {
            for x in -300i128..300 {
                assert_eq!(bracket_r(3 * x, 3, r), bracket_r(x, 3, r));
            }
        }
    }

    #[test]
    fn bracket_at_most_plain_digit_sum() {
        for r in 1..6 {
            for x in 1..3u128.pow(r + 1) {
                let b = bracket_r(x as i128, 3, r);
                assert!(b <= digit_sum(x, 3));
                if x < 3u128.pow(r) {
                    assert_eq!(b, digit_sum(x, 3));
                }
            }
        }
    }

    #[test]
    fn v_values() {
        assert_eq!(kubert_v(&QZElement::new(3, 1, 0)), Ratio::from_integer(0));
        assert_eq!(kubert_v(&QZElement::new(3, 1, 1)), Ratio::new(1, 2));
        assert_eq!(kubert_v(&QZElement::new(3, 2, 1)), Ratio::new(1, 4));
        assert_eq!(kubert_v_rational(3, Ratio::new(1, 8)).unwrap(), Ratio::new(1, 4));
        assert_eq!(kubert_v_rational(3, Ratio::new(1, 23)).unwrap(), kubert_v(&QZElement::new(3, 11, 7702)));
    }

    #[test]
    fn v_is_the_normalized_digit_sum() {
        for r in 1..5 {
            let m = 3i128.pow(r) - 1;
            for k in 1..m {
                let v = kubert_v(&QZElement::new(3, r, k));
                assert_eq!(v, Ratio::new(digit_sum(k as u128, 3) as i64, 2 * r as i64));
            }
        }
    }

    #[test]
    fn level_changes_preserve_value() {
        let x = QZElement::new(3, 2, 2);
        assert_eq!(x.minimal_level(), QZElement::new(3, 2, 2));
        let y = QZElement::new(3, 4, 40);
        assert_eq!(y.minimal_level().r, 1);
        assert_eq!(y, QZElement::new(3, 1, 1));
        assert_eq!(kubert_v(&x.at_level(4)), kubert_v(&x));
    }

    #[test]
    fn criterion_for_small_levels() {
        let rep = check_criterion(3, 23, 4, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(check_criterion(3, 23, 4, 6).unwrap().violations.is_empty());
        assert_eq!(
            check_criterion(3, 22, 4, 3),
            Err(KubertError::Params(ParamsError::NotCoprime))
        );
    }

    #[test]
    fn single_orbit_at_level_one_is_tight() {
        // V(23/2) = 1/2, V(-4/2) = 0, V(1/2) = 1/2
        let x = QZElement::new(3, 1, 1);
        let total = kubert_v(&x.scale(23)) + kubert_v(&x.scale(-4)) + kubert_v(&x);
        assert_eq!(total, Ratio::from_integer(1));
    }

    #[test]
    fn failing_pair_has_witness() {
        let rep = check_criterion(3, 13, 2, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        let w = rep.violations[0];
        let x = QZElement::new(3, w.r, w.k as i128);
        let total = kubert_v(&x.scale(13)) + kubert_v(&x.scale(-2)) + kubert_v(&x);
        assert!(total < Ratio::from_integer(1));
    }

    #[test]
    fn orbit_reduction_matches_full_scan() {
        for (n, d) in [(7u64, 2u64), (11, 4), (13, 5)] {
            for r in 1..6 {
                let m = level_modulus(3, r);
                let full: Vec<u64> = (1..m).filter(|&k| !criterion_holds(k, n, d, 3, r, m)).collect();
                let reps = criterion_violations_at_level(&SheafParams::new(3, n, d).unwrap(), r);
                // every failing point's orbit minimum is reported and vice versa
                for &k in &full {
                    let mut orbit_min = k;
                    let mut j = k;
                    for _ in 1..r {
                        j = j * 3 % m;
                        orbit_min = orbit_min.min(j);
                    }
                    assert!(reps.contains(&Violation { r, k: orbit_min }));
                }
                assert!(reps.iter().all(|v| full.contains(&v.k)));
            }
        }
    }

    #[test]
    fn bracket_form_agrees_up_to_level_8() {
        for r in 1..=8 {
            assert_eq!(bracket_form_disagreement(r), None, "r={r}");
        }
    }

    #[test]
    fn lemma_exemptions() {
        assert!(strong_bound_exempt(1, 1));
        assert!(!strong_bound_exempt(1, 2));
        assert!(strong_bound_exempt(3, 20)); // 202
        assert!(strong_bound_exempt(4, 27)); // 1000
        assert!(strong_bound_exempt(4, 28)); // 1001
        assert!(!strong_bound_exempt(4, 36)); // 1100
        // the exempt points really need the slack
        let h = 1u128;
        assert!(digit_sum(23 + h, 3) > digit_sum(1, 3) + digit_sum(2 + h, 3));
        assert!(check_lemma_bound(8).unwrap().is_empty());
    }

    #[test]
    fn corollary_small() {
        assert!(check_corollary(8).unwrap().is_empty());
        assert!(corollary_special_points().iter().all(|&(_, ok)| ok));
    }

    #[test]
    fn duplication_and_reflection() {
        assert!(duplication_check(3, 5).unwrap().is_empty());
        assert!(duplication_check(5, 3).unwrap().is_empty());
        assert!(reflection_check(3, 5).unwrap().is_empty());
        assert_eq!(duplication_check(2, 3), Err(KubertError::EvenPrime));
    }

    #[test]
    fn classification() {
        assert_eq!(classify(3, 5, 2), Classification::FamilyDqMinus1);
        assert_eq!(classify(3, 23, 4), Classification::Unexplained);
        assert_eq!(classify(7, 8, 3), Classification::InducedD3);
        assert_eq!(classify(3, 7, 4), Classification::InducedD4);
        assert_eq!(classify(3, 5, 4), Classification::InducedD4);
    }

    #[test]
    fn report_json_shape() {
        let rep = check_criterion(3, 5, 2, 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["N"], 5);
        assert_eq!(v["verdict"], "pass");
        assert!(v["violations"].as_array().unwrap().is_empty());
    }

    #[test]
    fn report_round_trip() {
        let r = check_criterion(3, 13, 2, 4).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(CriterionReport::from_json(&text).unwrap(), r);
        let forged = text.replace("\"fail\"", "\"pass\"");
        assert!(matches!(CriterionReport::from_json(&forged), Err(KubertError::Report(_))));
        let bad = r#"{"p":3,"N":22,"D":4,"r_max":3,"verdict":"pass","violations":[]}"#;
        assert!(matches!(CriterionReport::from_json(bad), Err(KubertError::Params(_))));
        assert!(check_criterion(101, 200, 3, 20).is_err());
    }
}
