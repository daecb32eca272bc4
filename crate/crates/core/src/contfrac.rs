//! Continued fractions of `e` and `e^(1/k)`, convergents, and the certified
//! remainders of the `p_{3k+2}/q_{3k+2}` subsequence.
//!
//! Partial quotients are 1-based with `a_1 = 2` for `e`, and convergents use
//! the seeds `p_0 = 1, q_0 = 0` (with `p_{-1} = 0, q_{-1} = 1`), so
//! `p_1/q_1 = 2/1` and the subsequence index `k = 0` is `p_2/q_2 = 3/1`.

use std::cmp::Ordering;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{const_e, escalate, Ball, PrecisionPolicy, Rat};

/// Partial quotient `a_i` of `e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`.
pub fn e_cf_coeff(i: u64) -> Result<u64> {
    match i {
        0 => Err(Error::Index("partial quotients start at index 1".into())),
        1 => Ok(2),
        i if i % 3 == 0 => Ok(2 * (i / 3)),
        _ => Ok(1),
    }
}

/// Partial quotient `a_i` of `e^(1/kdenom) = [1; kdenom-1, 1, 1, 3 kdenom-1, 1, 1, ...]`,
/// the periodic triple `1, (2j+1) kdenom - 1, 1` for `j = 0, 1, ...`.
pub fn exp_recip_cf_coeff(kdenom: u64, i: u64) -> Result<u64> {
    if kdenom < 2 {
        return Err(Error::Domain(format!("e^(1/k) needs k >= 2, got {kdenom}")));
    }
    match i {
        0 => Err(Error::Index("partial quotients start at index 1".into())),
        i if i % 3 == 2 => Ok((2 * (i / 3) + 1) * kdenom - 1),
        _ => Ok(1),
    }
}

/// A source of partial quotients.
pub trait CoeffSource {
    fn coeff(&self, i: u64) -> Result<u64>;
}

/// Continued fraction of `e`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EulerE;

/// Continued fraction of `e^(1/k)`.
#[derive(Clone, Copy, Debug)]
pub struct ExpRecip(pub u64);

/// Complete quotient of `e` starting at a given index: `[a_s; a_{s+1}, ...]`.
#[derive(Clone, Copy, Debug)]
pub struct ETail(pub u64);

impl CoeffSource for EulerE {
    fn coeff(&self, i: u64) -> Result<u64> {
        e_cf_coeff(i)
    }
}

impl CoeffSource for ExpRecip {
    fn coeff(&self, i: u64) -> Result<u64> {
        exp_recip_cf_coeff(self.0, i)
    }
}

impl CoeffSource for ETail {
    fn coeff(&self, i: u64) -> Result<u64> {
        if i == 0 {
            return Err(Error::Index("partial quotients start at index 1".into()));
        }
        e_cf_coeff(self.0 + i - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub i: u64,
    pub a: u64,
    #[serde(serialize_with = "crate::oracle::output::ser_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::oracle::output::ser_bigint")]
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Rat {
        Rat::new(self.p.clone(), self.q.clone())
    }
}

/// First `count` convergents of the continued fraction given by `source`.
pub fn convergents(source: &impl CoeffSource, count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one convergent".into()));
    }
    let mut out = Vec::with_capacity(count);
    extend_convergents(source, &mut out, count)?;
    Ok(out)
}

fn extend_convergents(
    source: &impl CoeffSource,
    out: &mut Vec<Convergent>,
    count: usize,
) -> Result<()> {
    let (mut p2, mut q2, mut p1, mut q1) = match out.len() {
        0 => (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero()),
        1 => (BigInt::one(), BigInt::zero(), out[0].p.clone(), out[0].q.clone()),
        n => (
            out[n - 2].p.clone(),
            out[n - 2].q.clone(),
            out[n - 1].p.clone(),
            out[n - 1].q.clone(),
        ),
    };
    for i in (out.len() as u64 + 1)..=(count as u64) {
        let a = source.coeff(i)?;
        let p = &p1 * a + &p2;
        let q = &q1 * a + &q2;
        out.push(Convergent {
            i,
            a,
            p: p.clone(),
            q: q.clone(),
        });
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(())
}

fn e_cache() -> &'static RwLock<Vec<Convergent>> {
    static CACHE: OnceLock<RwLock<Vec<Convergent>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// First `count` convergents of `e`, memoized process-wide.
///
/// `q_i` grows faster than exponentially; indices up to a few thousand are
/// practical.
pub fn e_convergents(count: usize) -> Vec<Convergent> {
    {
        let cache = e_cache().read().expect("convergent cache poisoned");
        if cache.len() >= count {
            return cache[..count].to_vec();
        }
    }
    let mut cache = e_cache().write().expect("convergent cache poisoned");
    if cache.len() < count {
        extend_convergents(&EulerE, &mut cache, count).expect("e coefficients are total");
    }
    cache[..count].to_vec()
}

/// The `i`-th convergent of `e` (1-based).
pub fn e_convergent(i: u64) -> Result<Convergent> {
    if i == 0 {
        return Err(Error::Index("convergents start at index 1".into()));
    }
    {
        let cache = e_cache().read().expect("convergent cache poisoned");
        if let Some(c) = cache.get(i as usize - 1) {
            return Ok(c.clone());
        }
    }
    Ok(e_convergents(i as usize).pop().expect("nonempty"))
}

fn e_pq(i: u64) -> (BigInt, BigInt) {
    let c = e_convergent(i).expect("index >= 1");
    (c.p, c.q)
}

/// Whether `p/q` equals a convergent `p_i/q_i` of `e` with `i <= max_index`.
pub fn is_convergent(p: &BigInt, q: &BigInt, max_index: u64) -> bool {
    if !q.is_positive() {
        return false;
    }
    // q_i is nondecreasing, so stop once it passes q
    let mut i = 1;
    while i <= max_index {
        let c = e_convergent(i).expect("index >= 1");
        match c.q.cmp(q) {
            Ordering::Equal if &c.p == p => return true,
            Ordering::Greater => return false,
            _ => {}
        }
        i += 1;
    }
    false
}

/// Member `k` of the subsequence `p_{3k+2}/q_{3k+2}` with its certified
/// normalized remainder `r = |e - p/q| q^2`.
#[derive(Clone, Debug)]
pub struct SubseqEntry {
    pub k: u64,
    pub p: BigInt,
    pub q: BigInt,
    pub r: Ball,
    /// Sign of `e - p/q`, equal to `(-1)^(k+1)`.
    pub sign: i8,
}

/// Outcome of checking the subsequence lemma for one entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub both_odd: bool,
    pub sign_matches: bool,
    /// `r >= 1/(2k+4)`, decided.
    pub lower: bool,
    /// `r <= 1/(2k+2)`, decided.
    pub upper: bool,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.both_odd && self.sign_matches && self.lower && self.upper
    }
}

impl SubseqEntry {
    pub fn index(&self) -> u64 {
        3 * self.k + 2
    }

    pub fn expected_sign(&self) -> i8 {
        if self.k % 2 == 0 {
            -1
        } else {
            1
        }
    }

    /// Bounds `[1/(2k+4), 1/(2k+2)]` on `r`.
    pub fn r_bounds(&self) -> (Rat, Rat) {
        let k = BigInt::from(self.k);
        (
            Rat::new(BigInt::one(), &k * 2 + 4),
            Rat::new(BigInt::one(), &k * 2 + 2),
        )
    }

    /// Evaluates the lemma; `None` if a bound is undecided at this precision.
    pub fn check(&self) -> Option<LemmaCheck> {
        let (lo, hi) = self.r_bounds();
        let lower = self.r.cmp_rat(&lo).map(|o| o != Ordering::Less)?;
        let upper = self.r.cmp_rat(&hi).map(|o| o != Ordering::Greater)?;
        Some(LemmaCheck {
            both_odd: self.p.is_odd() && self.q.is_odd(),
            sign_matches: self.sign == self.expected_sign(),
            lower,
            upper,
        })
    }
}

/// Signed `e - p/q` scaled by `q^2`, at working precision `wp`.
fn scaled_error(p: &BigInt, q: &BigInt, wp: u32) -> Ball {
    let e = const_e(wp).with_prec(wp);
    (&e.mul_int(q) - &Ball::from_int(p.clone(), wp)).mul_int(q)
}

fn working_prec(prec: u32, q: &BigInt) -> u32 {
    prec + 2 * q.bits() as u32 + 16
}

/// Subsequence entry `k` with `r` certified to width `2^(4 - prec)` and the
/// lemma's sign and bounds decided.
pub fn subseq_entry(k: u64, prec: u32) -> Result<SubseqEntry> {
    subseq_entry_with(k, prec, PrecisionPolicy::default())
}

pub fn subseq_entry_with(k: u64, prec: u32, policy: PrecisionPolicy) -> Result<SubseqEntry> {
    let (p, q) = e_pq(3 * k + 2);
    let policy = PrecisionPolicy {
        start: prec.max(crate::exactnum::MIN_PREC),
        max: policy.max.max(prec),
    };
    escalate(policy, |prec| {
        let wp = working_prec(prec, &q);
        let err = scaled_error(&p, &q, wp);
        let sign = match err.sign() {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => return Err(Error::undecidable(format!("sign of e - p/q at k={k}"), prec)),
        };
        let r = err.abs().relabel(prec);
        let width_ok = r
            .width()
            .magnitude_exp()
            .is_none_or(|e| e <= 4 - prec as i64);
        let entry = SubseqEntry {
            k,
            p: p.clone(),
            q: q.clone(),
            r,
            sign,
        };
        if !width_ok || entry.check().is_none() {
            return Err(Error::undecidable(format!("remainder bounds at k={k}"), prec));
        }
        Ok(entry)
    })
}

/// Certified `r_i = |e - p_i/q_i| q_i^2` for any convergent index.
pub fn remainder(i: u64, prec: u32) -> Ball {
    let (p, q) = e_pq(i);
    scaled_error(&p, &q, working_prec(prec, &q)).abs().relabel(prec)
}

/// Certified signed error `e - p_i/q_i`.
pub fn signed_error(i: u64, prec: u32) -> Ball {
    let (p, q) = e_pq(i);
    let wp = working_prec(prec, &q);
    let e = const_e(wp).with_prec(wp);
    &e - &Ball::from_rat(&Rat::new(p, q), wp)
}

/// Legendre's sufficient condition `|alpha - p/q| <= 1/(2 q^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendreOutcome {
    Passes,
    Fails,
    Undecidable,
}

pub fn legendre_test(p: &BigInt, q: &BigInt, alpha: &Ball) -> LegendreOutcome {
    assert!(q.is_positive(), "legendre_test needs q >= 1");
    let prec = alpha.prec() + 2 * q.bits() as u32;
    let diff = (alpha.with_prec(prec) - Ball::from_rat(&Rat::new(p.clone(), q.clone()), prec))
        .abs();
    let threshold = Rat::new(BigInt::one(), q * q * 2);
    match diff.le_rat(&threshold) {
        Some(true) => LegendreOutcome::Passes,
        Some(false) => LegendreOutcome::Fails,
        None => LegendreOutcome::Undecidable,
    }
}

/// `c_k = q_{3k+1} / q_{3k+2}` from the convergents.
pub fn ck_sequence(k: u64) -> Rat {
    let (_, q1) = e_pq(3 * k + 1);
    let (_, q2) = e_pq(3 * k + 2);
    Rat::new(q1, q2)
}

/// `c_k` from `c_0 = 1` and `c_{k+1} = 1/2 + 1/(2 (4k + 5 + 2 c_k))`.
pub fn ck_recurrence(k: u64) -> Rat {
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let mut c = Rat::one();
    for j in 0..k {
        let denom = (Rat::from_integer(BigInt::from(4 * j + 5)) + &c * BigInt::from(2))
            * BigInt::from(2);
        c = &half + denom.recip();
    }
    c
}

/// Certified `w_k = [2k+2; 1, 1, 2k+4, 1, 1, 2k+6, ...]`, bracketed between
/// consecutive truncations whose depth doubles until the gap is below
/// `2^-prec`.
pub fn tail_value(k: u64, prec: u32) -> Result<Ball> {
    tail_value_with(k, prec, PrecisionPolicy::default())
}

pub fn tail_value_with(k: u64, prec: u32, policy: PrecisionPolicy) -> Result<Ball> {
    let source = ETail(3 * k + 3);
    let target = Rat::new(BigInt::one(), BigInt::one() << prec as u64);
    let max_depth = 4 * policy.max as usize;
    let mut depth = 8usize;
    loop {
        let cs = convergents(&source, depth + 1)?;
        let a = cs[depth - 1].value();
        let b = cs[depth].value();
        let gap = (&b - &a).abs();
        if gap <= target {
            return Ok(Ball::hull_rat(&a, &b, prec + 8).relabel(prec));
        }
        if depth >= max_depth {
            return Err(Error::undecidable(format!("tail w_{k} bracket"), prec));
        }
        depth *= 2;
    }
}

/// Both sides of `1/r_{3k+2} = c_k + w_k`.
pub fn remainder_identity(k: u64, prec: u32) -> Result<(Ball, Ball)> {
    let entry = subseq_entry(k, prec)?;
    let r_inv = entry.r.with_prec(prec + 8).recip()?;
    let ck = Ball::from_rat(&ck_sequence(k), prec + 8);
    let w = tail_value(k, prec + 8)?;
    Ok((r_inv, &ck + &w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq(c: &Convergent) -> (i64, i64) {
        (
            (&c.p).try_into().unwrap(),
            (&c.q).try_into().unwrap(),
        )
    }

    #[test]
    fn e_coefficients() {
        assert_eq!(e_cf_coeff(1).unwrap(), 2);
        assert_eq!(e_cf_coeff(6).unwrap(), 4);
        assert_eq!(e_cf_coeff(9).unwrap(), 6);
        let first: Vec<u64> = (1..=14).map(|i| e_cf_coeff(i).unwrap()).collect();
        assert_eq!(first, vec![2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8, 1, 1]);
        assert!(matches!(e_cf_coeff(0), Err(Error::Index(_))));
    }

    #[test]
    fn exp_recip_coefficients() {
        let take = |k, n| -> Vec<u64> { (1..=n).map(|i| exp_recip_cf_coeff(k, i).unwrap()).collect() };
        assert_eq!(take(2, 8), vec![1, 1, 1, 1, 5, 1, 1, 9]);
        assert_eq!(take(3, 11), vec![1, 2, 1, 1, 8, 1, 1, 14, 1, 1, 20]);
        assert_eq!(take(4, 11), vec![1, 3, 1, 1, 11, 1, 1, 19, 1, 1, 27]);
        assert!(matches!(exp_recip_cf_coeff(1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_recip_convergents_approach_root() {
        // e^(1/2) = 1.6487212707001282
        let cs = convergents(&ExpRecip(2), 20).unwrap();
        let v = cs.last().unwrap().value();
        let approx = v.numer().to_string().parse::<f64>().unwrap()
            / v.denom().to_string().parse::<f64>().unwrap();
        assert!((approx - 1.6487212707001282).abs() < 1e-14);
    }

    #[test]
    fn first_convergents() {
        let cs = convergents(&EulerE, 8).unwrap();
        let got: Vec<_> = cs.iter().map(pq).collect();
        assert_eq!(
            got,
            vec![(2, 1), (3, 1), (8, 3), (11, 4), (19, 7), (87, 32), (106, 39), (193, 71)]
        );
        assert_eq!(pq(&e_convergent(11).unwrap()), (2721, 1001));
        assert!(convergents(&EulerE, 0).is_err());
    }

    #[test]
    fn membership() {
        let b = |x: i64| BigInt::from(x);
        assert!(is_convergent(&b(193), &b(71), 50));
        assert!(is_convergent(&b(11), &b(4), 50));
        assert!(!is_convergent(&b(7), &b(3), 50));
        assert!(!is_convergent(&b(193), &b(71), 7));
    }

    #[test]
    fn legendre_examples() {
        let e = const_e(64);
        let b = |x: i64| BigInt::from(x);
        assert_eq!(legendre_test(&b(19), &b(7), &e), LegendreOutcome::Passes);
        assert_eq!(legendre_test(&b(11), &b(4), &e), LegendreOutcome::Fails);
        assert_eq!(legendre_test(&b(3), &b(1), &e), LegendreOutcome::Passes);
        let wide = Ball::hull_rat(
            &Rat::new(b(27), b(10)),
            &Rat::new(b(28), b(10)),
            64,
        );
        assert_eq!(legendre_test(&b(11), &b(4), &wide), LegendreOutcome::Undecidable);
    }

    #[test]
    fn subsequence_small_k() {
        let e0 = subseq_entry(0, 64).unwrap();
        assert_eq!((e0.p.clone(), e0.q.clone()), (BigInt::from(3), BigInt::from(1)));
        assert_eq!(e0.sign, -1);
        assert!(e0.check().unwrap().holds());
        assert!((e0.r.to_f64() - (3.0 - std::f64::consts::E)).abs() < 1e-15);

        let e2 = subseq_entry(2, 64).unwrap();
        assert_eq!((e2.p.clone(), e2.q.clone()), (BigInt::from(193), BigInt::from(71)));
        assert!((e2.r.to_f64() - 0.14134).abs() < 1e-4);
        assert!(e2.check().unwrap().holds());

        let e3 = subseq_entry(3, 64).unwrap();
        assert_eq!((e3.p, e3.q), (BigInt::from(2721), BigInt::from(1001)));
    }

    #[test]
    fn ck_two_ways() {
        assert_eq!(ck_sequence(0), Rat::one());
        for k in 0..=100 {
            assert_eq!(ck_sequence(k), ck_recurrence(k), "k={k}");
        }
    }

    #[test]
    fn tail_in_expected_window() {
        for k in [0, 1, 5, 50, 100] {
            let w = tail_value(k, 128).unwrap();
            let lo = Rat::from_integer(BigInt::from(2 * k + 2));
            let hi = Rat::from_integer(BigInt::from(2 * k + 3));
            assert_eq!(w.cmp_rat(&lo), Some(Ordering::Greater));
            assert_eq!(w.cmp_rat(&hi), Some(Ordering::Less));
        }
    }

    #[test]
    fn identity_small_k() {
        for k in 0..10 {
            let (a, b) = remainder_identity(k, 128).unwrap();
            assert!(a.overlaps(&b), "k={k}");
        }
    }
}
