//! The explicit construction: scale a subsequence convergent `p/q` of `e` by an
//! odd `d` so that `2m+1 = d p`, `2n-1 = d q`, then certify how close
//! `sum_{l=n}^{m} 1/l` lands to 1.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::contfrac::{subseq_entry, SubseqEntry};
use crate::error::{Error, Result};
use crate::exactnum::{ln_ball, Ball, Constants, PrecisionPolicy, Rat};
use crate::harmonic::{hdiff_ball, hdiff_exact, y_unchecked};
use crate::oracle::output::{ser_ball, ser_bigint};
use crate::par;

/// Largest `m` certified by exact summation.
pub const EXACT_LIMIT: u64 = 10_000_000;

/// Constant in the bound `n^2 eps sqrt(k) <= 1001`.
pub const QUALITY_BOUND: u64 = 1001;

#[derive(Clone, Debug, Serialize)]
pub struct CandidatePair {
    pub k: u64,
    pub d: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub m: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub n: BigInt,
    #[serde(serialize_with = "ser_ball")]
    pub y: Ball,
    #[serde(serialize_with = "ser_ball")]
    pub eps: Ball,
    /// `n^2 eps`.
    #[serde(serialize_with = "ser_ball")]
    pub quality: Ball,
    /// `n^2 |eps| (ln n)^{5/4}`.
    #[serde(serialize_with = "ser_ball")]
    pub scaled_quality: Ball,
    /// Whether `eps` came from an exact sum.
    pub exact: bool,
    /// Decided sign of `eps` (`None`: the ball straddles zero).
    pub eps_positive: Option<bool>,
    /// `1 <= sum <= 1 + 1001/(sqrt(k) n^2)`, when `k >= 2`.
    pub within_bound: Option<bool>,
    /// Whether `d = choose_d(k)`, i.e. the bound is claimed rather than reported.
    pub claimed: bool,
}

impl CandidatePair {
    /// `(2m+1)/(2n-1)` in lowest terms.
    pub fn reduced(&self) -> (BigInt, BigInt) {
        let r = Rat::new(&self.m * 2 + 1, &self.n * 2 - 1);
        (r.numer().clone(), r.denom().clone())
    }

    pub fn abs_quality(&self) -> Ball {
        self.quality.abs()
    }
}

fn check_even(k: u64) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::Parity(format!("k must be even, got {k}")));
    }
    Ok(())
}

/// Closest odd integer to `x + 2`, ties upward; `None` if undecided.
fn odd_above(x: &Ball) -> Option<BigInt> {
    Some(x.mul_pow2(-1).floor_decided()? * 2 + 3)
}

fn n_of(d: &BigInt, q: &BigInt) -> BigInt {
    (d * q + 1u32) / 2u32
}

fn d_star_from(entry: &SubseqEntry, consts: &Constants) -> Result<Ball> {
    let quot = consts.target.div(&entry.r)?;
    let approx = quot.mul_pow2(1).sqrt()?;
    // starting d from (2n-1)/n -> 2; the rounding need not be certified
    let mid = Ball::point(approx.mid(), approx.prec());
    let d0 = odd_above(&mid).unwrap_or_else(|| approx.mid().floor() | BigInt::one());
    let n0 = n_of(&d0, &entry.q);
    let factor = Rat::new(&n0 * 2 - 1, n0);
    quot.mul_rat(&factor).sqrt()
}

/// Certified optimal real multiplier `d*` for subsequence entry `k`.
pub fn d_star(k: u64, prec: u32) -> Result<Ball> {
    check_even(k)?;
    let entry = subseq_entry(k, prec + 16)?;
    let consts = Constants::new(prec + 16);
    Ok(d_star_from(&entry, &consts)?.with_prec(prec))
}

/// Closest odd integer to `d* + 2`, ties broken upward.
pub fn choose_d(k: u64) -> Result<u64> {
    check_even(k)?;
    let policy = PrecisionPolicy::default();
    crate::exactnum::escalate(policy, |prec| {
        let d = d_star(k, prec)?;
        match odd_above(&d) {
            Some(v) => v
                .to_u64()
                .ok_or_else(|| Error::Domain(format!("d too large at k={k}"))),
            None => Err(Error::undecidable(format!("rounding of d* at k={k}"), prec)),
        }
    })
}

/// `m = (d p - 1)/2`, `n = (d q + 1)/2` for subsequence entry `k`.
pub fn build_pair(k: u64, d: u64) -> Result<(BigInt, BigInt)> {
    if d % 2 == 0 {
        return Err(Error::Parity(format!("d must be odd, got {d}")));
    }
    let c = crate::contfrac::e_convergent(3 * k + 2)?;
    let d = BigInt::from(d);
    Ok(((&d * &c.p - 1u32) / 2u32, n_of(&d, &c.q)))
}

/// `(ln n)^{5/4}` for `n >= 1`.
fn log_factor(n: &BigInt, prec: u32) -> Result<Ball> {
    let ln = ln_ball(&Rat::from_integer(n.clone()), prec)?;
    let ln = ln.max(&Ball::zero(prec));
    let fifth = ln.sqr().sqr() * ln;
    fifth.sqrt()?.sqrt()
}

/// Decides `quality * sqrt(k) <= 1001`.
fn bound_check(quality: &Ball, k: u64, prec: u32) -> Result<Option<bool>> {
    let root = Ball::from_int(k, prec).sqrt()?;
    Ok((&root * quality).le_rat(&Rat::from_integer(QUALITY_BOUND.into())))
}

/// Sum, sign and bound for the pair built from `(k, d)`.
pub fn certify(k: u64, d: u64, prec: u32) -> Result<CandidatePair> {
    let claimed = k >= 2 && k % 2 == 0 && choose_d(k)? == d;
    certify_claimed(k, d, prec, claimed)
}

fn certify_claimed(k: u64, d: u64, prec: u32, claimed: bool) -> Result<CandidatePair> {
    let (m, n) = build_pair(k, d)?;
    let n2 = &n * &n;
    let (eps, exact) = match (n.to_u64(), m.to_u64()) {
        (Some(nn), Some(mm)) if mm <= EXACT_LIMIT => {
            let e = hdiff_exact(nn, mm)? - Rat::one();
            let bits = e.numer().bits().max(e.denom().bits()) as u32;
            (Ball::from_rat(&e, prec + bits), true)
        }
        _ => (certified_eps(k, &n, &m, prec, claimed)?, false),
    };
    let quality = eps.mul_int(&n2);
    let eps_positive = eps.sign().and_then(|o| match o {
        Ordering::Greater => Some(true),
        Ordering::Less => Some(false),
        Ordering::Equal => None,
    });
    let eps_positive = if eps.is_zero() { Some(false) } else { eps_positive };
    let within_bound = match (k >= 2, eps_positive) {
        (false, _) => None,
        (true, Some(false)) => Some(false),
        (true, _) => bound_check(&quality, k, prec)?,
    };
    if claimed && (eps_positive.is_none() || within_bound.is_none()) {
        return Err(Error::undecidable(format!("certification at k={k} d={d}"), prec));
    }
    let scaled_quality = quality.abs() * log_factor(&n, prec)?;
    let y = y_unchecked(&n, &m, prec);
    Ok(CandidatePair {
        k,
        d,
        m,
        n,
        y,
        eps: eps.relabel(prec),
        quality: quality.relabel(prec),
        scaled_quality: scaled_quality.relabel(prec),
        exact,
        eps_positive,
        within_bound,
        claimed,
    })
}

/// Interval evaluation of `eps`, narrowing until sign (and bound) are decided.
fn certified_eps(k: u64, n: &BigInt, m: &BigInt, prec: u32, claimed: bool) -> Result<Ball> {
    let n2 = n * n;
    let mut shift = 8u64;
    let mut last = None;
    while shift <= 4096 {
        let width = Rat::new(BigInt::one(), &n2 << shift);
        let sum = match hdiff_ball(n, m, &width) {
            Ok(s) => s,
            Err(e) if e.is_undecidable() => {
                last = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let eps = &sum - &Ball::one(sum.prec());
        let decided = eps.sign().is_some_and(|o| o != Ordering::Equal)
            && (!claimed || bound_check(&eps.mul_int(&n2), k, prec)?.is_some());
        if decided {
            return Ok(eps);
        }
        last = Some(Error::undecidable(format!("sign of eps at k={k}"), prec));
        shift *= 2;
    }
    // a narrow ball around zero is still a valid enclosure for unclaimed pairs
    if !claimed {
        let width = Rat::new(BigInt::one(), &n2 << 4096u64);
        if let Ok(sum) = hdiff_ball(n, m, &width) {
            return Ok(&sum - &Ball::one(sum.prec()));
        }
    }
    Err(last.unwrap_or_else(|| Error::undecidable("eps", prec)))
}

/// Bracket `d* r / 2 <= r d^2 n/(2n-1) - sinh(1)/6 <= 7 d* r` for `d = choose_d(k)`.
#[derive(Clone, Debug)]
pub struct BracketCheck {
    pub k: u64,
    pub d: u64,
    pub gap: Ball,
    pub lower: Option<bool>,
    pub upper: Option<bool>,
}

impl BracketCheck {
    pub fn holds(&self) -> bool {
        self.lower == Some(true) && self.upper == Some(true)
    }
}

pub fn d_choice_bracket(k: u64, prec: u32) -> Result<BracketCheck> {
    check_even(k)?;
    let d = choose_d(k)?;
    let wp = prec + 16;
    let entry = subseq_entry(k, wp)?;
    let consts = Constants::new(wp);
    let ds = d_star_from(&entry, &consts)?;
    let (_, n) = build_pair(k, d)?;
    let db = BigInt::from(d);
    let ratio = Rat::new(n.clone(), &n * 2 - 1);
    let gap = &entry.r.mul_int(&(&db * &db)).mul_rat(&ratio) - &consts.target;
    let dr = &ds * &entry.r;
    let lower = dr.mul_pow2(-1).le(&gap);
    let upper = gap.le(&dr.mul_int(&BigInt::from(7)));
    Ok(BracketCheck {
        k,
        d,
        gap: gap.relabel(prec),
        lower,
        upper,
    })
}

/// Where the joint search centers its window of odd multipliers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Center {
    /// The real minimizer `d*`.
    #[default]
    DStar,
    /// `d* + 2`, the positivity-forcing shift.
    DStarPlus2,
}

#[derive(Clone, Debug, Serialize)]
pub struct JointSearch {
    /// Sorted by `|quality|`, then `k`, then `d`.
    pub pairs: Vec<CandidatePair>,
    /// `(k, d)` entries whose certification was undecidable.
    pub skipped: Vec<(u64, u64)>,
}

impl JointSearch {
    /// Smallest `|quality|` seen for subsequence index `k`.
    pub fn best_for(&self, k: u64) -> Option<&CandidatePair> {
        self.pairs.iter().find(|p| p.k == k)
    }
}

/// Odd `d >= 1` with `|d - c| <= window`.
fn odd_window(c: &Ball, window: u64) -> Vec<u64> {
    let lo = (c.lo().to_f64() - window as f64).ceil().max(1.0) as u64;
    let hi = (c.hi().to_f64() + window as f64).floor().max(0.0) as u64;
    (lo..=hi).filter(|d| d % 2 == 1).collect()
}

fn quality_order(a: &CandidatePair, b: &CandidatePair) -> Ordering {
    a.abs_quality()
        .mid()
        .cmp(&b.abs_quality().mid())
        .then(a.k.cmp(&b.k))
        .then(a.d.cmp(&b.d))
}

/// Certifies every odd `d` within `window` of the center for each even
/// `2 <= k <= k_max`, ranked by `|quality|`.
pub fn joint_search(k_max: u64, window: u64, prec: u32, center: Center) -> Result<JointSearch> {
    check_even(k_max)?;
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let ks: Vec<u64> = (2..=k_max).step_by(2).collect();
    type PerK = (Vec<CandidatePair>, Vec<(u64, u64)>);
    let per_k = par::map(&ks, |&k| -> Result<PerK> {
        let ds = d_star(k, prec)?;
        let c = match center {
            Center::DStar => ds,
            Center::DStarPlus2 => ds.add_rat(&Rat::from_integer(2.into())),
        };
        let chosen = choose_d(k)?;
        let mut pairs = Vec::new();
        let mut skipped = Vec::new();
        for d in odd_window(&c, window) {
            match certify_claimed(k, d, prec, d == chosen) {
                Ok(p) => pairs.push(p),
                Err(e) if e.is_undecidable() => skipped.push((k, d)),
                Err(e) => return Err(e),
            }
        }
        Ok((pairs, skipped))
    });
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for r in per_k {
        let (p, s) = r?;
        pairs.extend(p);
        skipped.extend(s);
    }
    pairs.sort_by(quality_order);
    Ok(JointSearch { pairs, skipped })
}

/// `|sum - (f(m) - f(n-1))|` bound check for exact pairs: returns the ball of
/// the difference.
pub fn f_consistency(pair: &CandidatePair, prec: u32) -> Result<Option<Ball>> {
    let (Some(n), Some(m)) = (pair.n.to_u64(), pair.m.to_u64()) else {
        return Ok(None);
    };
    if n < 2 || m > EXACT_LIMIT {
        return Ok(None);
    }
    let sum = hdiff_exact(n, m)?;
    let f = crate::harmonic::f_diff(&pair.m, &(&pair.n - 1u32), prec)?;
    Ok(Some(f.add_rat(&-sum).abs()))
}
