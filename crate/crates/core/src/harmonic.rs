//! Harmonic differences `H_m - H_{n-1}`: exact sums, certified enclosures via
//! Euler–Maclaurin, the crossing index `t(n)`, and the second-order prediction
//! of the overshoot.
//!
//! With `f(N) = ln N + gamma + 1/(2N) - 1/(12 N^2)` the remainder
//! `H_N - f(N)` lies in `(0, 1/(120 N^4))` for every `N >= 1`, so a difference
//! `f(m) - f(N0)` encloses `H_m - H_{N0}` with both remainders accounted for.
//! `gamma` cancels and is never evaluated.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{const_e, exp_ball, ln_ball, Ball, Dyadic, PrecisionPolicy, Rat};
use crate::oracle::output::ser_rat;
use crate::par;

/// Default limit on the number of terms summed exactly.
pub const DEFAULT_EXACT_CAP: u64 = 10_000_000;

/// Ranges shorter than this are summed exactly even on the certified path.
const SHORT_RANGE: u64 = 64;

/// Ranges longer than this are split across threads.
const PAR_SPLIT: u64 = 4096;

/// A harmonic difference, exact or certified.
#[derive(Clone, Debug)]
pub enum HarmonicValue {
    Exact(Rat),
    Certified(Ball),
}

#[derive(Clone, Debug)]
pub struct HarmonicDiff {
    pub n: BigInt,
    pub m: BigInt,
    pub value: HarmonicValue,
}

impl HarmonicDiff {
    pub fn exact(n: u64, m: u64) -> Result<Self> {
        Ok(HarmonicDiff {
            n: n.into(),
            m: m.into(),
            value: HarmonicValue::Exact(hdiff_exact(n, m)?),
        })
    }

    pub fn certified(n: &BigInt, m: &BigInt, target_width: &Rat) -> Result<Self> {
        Ok(HarmonicDiff {
            n: n.clone(),
            m: m.clone(),
            value: HarmonicValue::Certified(hdiff_ball(n, m, target_width)?),
        })
    }

    /// Whether the stored value is consistent with an exact rational.
    pub fn admits(&self, r: &Rat) -> bool {
        match &self.value {
            HarmonicValue::Exact(x) => x == r,
            HarmonicValue::Certified(b) => b.contains_rat(r),
        }
    }
}

/// `sum_{k=lo}^{hi} 1/k` as `(numerator, lcm(lo..=hi))`, unreduced numerator.
fn recip_sum(lo: u64, hi: u64) -> (BigInt, BigInt) {
    if hi - lo < 8 {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for k in lo..=hi {
            let k = BigInt::from(k);
            let g = den.gcd(&k);
            let scale = &k / &g;
            num = num * &scale + &den / &g;
            den *= scale;
        }
        return (num, den);
    }
    let mid = lo + (hi - lo) / 2;
    let ((a, b), (c, d)) = if hi - lo > PAR_SPLIT {
        par::join(|| recip_sum(lo, mid), || recip_sum(mid + 1, hi))
    } else {
        (recip_sum(lo, mid), recip_sum(mid + 1, hi))
    };
    let g = b.gcd(&d);
    let (b_g, d_g) = (&b / &g, &d / &g);
    (a * &d_g + c * &b_g, b_g * d)
}

/// Exact `sum_{l=n}^{m} 1/l` by balanced combination.
pub fn hdiff_exact(n: u64, m: u64) -> Result<Rat> {
    hdiff_exact_capped(n, m, DEFAULT_EXACT_CAP)
}

pub fn hdiff_exact_capped(n: u64, m: u64, cap: u64) -> Result<Rat> {
    if n == 0 || m < n {
        return Err(Error::InvalidArgument(format!(
            "harmonic difference needs 1 <= n <= m, got n={n} m={m}"
        )));
    }
    let len = m - n + 1;
    if len > cap {
        return Err(Error::Capacity { len, cap });
    }
    let (num, den) = recip_sum(n, m);
    Ok(Rat::new(num, den))
}

fn rat_of(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// `1/(2N) - 1/(12 N^2)`, the rational part of `f(N)` without `ln N + gamma`.
fn f_rational(n: &BigInt) -> Rat {
    let n = rat_of(n);
    (&n * BigInt::from(2)).recip() - (&n * &n * BigInt::from(12)).recip()
}

/// `1/(120 N^4)`.
fn em_remainder(n: &BigInt) -> Rat {
    let n2 = n * n;
    Rat::new(BigInt::one(), n2.clone() * n2 * 120)
}

/// `f(m) - f(n0)` as a ball; `gamma` cancels.
pub fn f_diff(m: &BigInt, n0: &BigInt, prec: u32) -> Result<Ball> {
    if !n0.is_positive() || !m.is_positive() {
        return Err(Error::Domain("f needs positive arguments".into()));
    }
    let ln = ln_ball(&Rat::new(m.clone(), n0.clone()), prec)?;
    Ok(ln.add_rat(&(f_rational(m) - f_rational(n0))))
}

/// Interval `[-1/(120 n0^4), 1/(120 m^4)]` with `H_m - H_{n0} - (f(m) - f(n0))` inside.
pub fn f_remainder_hull(m: &BigInt, n0: &BigInt, prec: u32) -> Ball {
    Ball::hull_rat(&-em_remainder(n0), &em_remainder(m), prec)
}

fn rat_width_exp(target: &Rat) -> i64 {
    // 2^e <= target roughly; conservative by one bit
    target.numer().bits() as i64 - target.denom().bits() as i64 - 1
}

/// Certified `sum_{l=n}^{m} 1/l` of width at most `target_width`.
pub fn hdiff_ball(n: &BigInt, m: &BigInt, target_width: &Rat) -> Result<Ball> {
    hdiff_ball_with(n, m, target_width, PrecisionPolicy::default())
}

pub fn hdiff_ball_with(
    n: &BigInt,
    m: &BigInt,
    target_width: &Rat,
    policy: PrecisionPolicy,
) -> Result<Ball> {
    if n < &BigInt::from(2) || m < n {
        return Err(Error::InvalidArgument(format!(
            "certified harmonic difference needs 2 <= n <= m, got n={n} m={m}"
        )));
    }
    if !target_width.is_positive() {
        return Err(Error::InvalidArgument("target width must be positive".into()));
    }
    let w_exp = rat_width_exp(target_width);
    let start = policy.start.max((-w_exp).max(0) as u32 + 16);
    let exact_ball = |n: u64, m: u64| -> Result<Ball> {
        let r = hdiff_exact(n, m)?;
        let prec = start.max(64);
        Ok(Ball::from_rat(&r, prec + r.numer().bits().max(r.denom().bits()) as u32))
    };
    let len = m - n + 1u32;
    if len <= BigInt::from(SHORT_RANGE) {
        return exact_ball(n.to_u64().expect("small"), m.to_u64().expect("small"));
    }
    // endpoint n0 = n - 1 + s with 2/(120 n0^4) <= target/4
    let need = (Rat::from_integer(BigInt::from(240)) * target_width / BigInt::from(4)).recip();
    let mut n0 = n - 1u32;
    let n0_min = {
        // smallest N with N^4 >= need
        let approx = need.ceil().to_integer();
        let mut r = num_integer::Roots::nth_root(&approx, 4);
        while Rat::from_integer(num_traits::pow(r.clone(), 4)) < need {
            r += 1;
        }
        r
    };
    let mut head: Option<Ball> = None;
    if n0 < n0_min {
        n0 = n0_min.min(m.clone());
        let (a, b) = (n.to_u64(), n0.to_u64());
        let (a, b) = a.zip(b).ok_or_else(|| {
            Error::InvalidArgument("exact head of harmonic range too large".into())
        })?;
        let h = exact_ball(a, b)?;
        if &n0 == m {
            return Ok(h);
        }
        head = Some(h);
    }
    let tail_lo = em_remainder(&n0);
    let tail_hi = em_remainder(m);
    let rational = f_rational(m) - f_rational(&n0);
    let ratio = Rat::new(m.clone(), n0.clone());
    let mut last = None;
    for prec in policy.ladder().filter(|&p| p >= start).chain(
        // make sure at least one attempt happens when start exceeds max
        (start > policy.max).then_some(start),
    ) {
        let ln = ln_ball(&ratio, prec + 8)?;
        let core = ln.add_rat(&rational);
        let em = &core
            + &Ball::hull_rat(&-tail_lo.clone(), &tail_hi, prec + 8);
        let total = match &head {
            Some(h) => h + &em,
            None => em,
        };
        if total.width().cmp_rat(target_width) != Ordering::Greater {
            return Ok(total.relabel(prec));
        }
        last = Some(prec);
    }
    Err(Error::undecidable(
        format!("harmonic enclosure of width {target_width}"),
        last.unwrap_or(policy.max),
    ))
}

/// `t(n)` with its exact overshoot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonRecord {
    pub n: u64,
    pub t: u64,
    /// `sum_{k=n}^{t} 1/k - 1 >= 0`.
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rat,
    /// `n^2 eps`.
    #[serde(serialize_with = "ser_rat")]
    pub scaled: Rat,
}

impl EpsilonRecord {
    pub fn from_exact(n: u64, t: u64, eps: Rat) -> Self {
        let n2 = BigInt::from(n) * BigInt::from(n);
        let scaled = &eps * n2;
        EpsilonRecord { n, t, eps, scaled }
    }
}

/// First guess `round(e n - (1+e)/2)` for the crossing index.
pub fn crossing_estimate(n: u64) -> u64 {
    let prec = 64 + 2 * (64 - n.leading_zeros());
    let e = const_e(prec).with_prec(prec);
    let nb = BigInt::from(n);
    let one = Ball::one(prec);
    let est = &e.mul_int(&nb) - &(&one + &e).mul_pow2(-1);
    let d = est.mid();
    let r = d.add(&Dyadic::new(BigInt::one(), -1)).floor();
    r.to_u64().unwrap_or(n).max(n)
}

/// Decides `sum_{k=n}^{m} 1/k >= 1`, falling back to exact arithmetic.
fn reaches_one(n: u64, m: u64, ball: Option<&Ball>) -> Result<bool> {
    if let Some(b) = ball {
        match b.cmp_rat(&Rat::one()) {
            Some(Ordering::Less) => return Ok(false),
            Some(_) => return Ok(true),
            None => {}
        }
    }
    Ok(hdiff_exact(n, m)? >= Rat::one())
}

/// Least `t` with `sum_{k=n}^{t} 1/k >= 1`, decided with certified sums.
pub fn crossing(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("t(n) needs n >= 1".into()));
    }
    if n == 1 {
        return Ok(1);
    }
    if n < 64 {
        let mut s = Rat::zero();
        let mut t = n - 1;
        while s < Rat::one() {
            t += 1;
            s += Rat::new(BigInt::one(), BigInt::from(t));
        }
        return Ok(t);
    }
    let bits = 64 - n.leading_zeros() as i64;
    let width = Rat::new(BigInt::one(), BigInt::one() << (2 * bits + 16) as u64);
    let nb = BigInt::from(n);
    let mut t = crossing_estimate(n);
    let mut sum = hdiff_ball(&nb, &BigInt::from(t), &width)?;
    let prec = sum.prec();
    let recip = |k: u64| Ball::from_rat(&Rat::new(BigInt::one(), BigInt::from(k)), prec);
    if reaches_one(n, t, Some(&sum))? {
        // walk down while the shorter sum still reaches 1
        loop {
            let shorter = &sum - &recip(t);
            if t > n && reaches_one(n, t - 1, Some(&shorter))? {
                t -= 1;
                sum = shorter;
            } else {
                return Ok(t);
            }
        }
    } else {
        loop {
            t += 1;
            sum = &sum + &recip(t);
            if reaches_one(n, t, Some(&sum))? {
                return Ok(t);
            }
        }
    }
}

/// `t(n)` and the exact overshoot `eps_n`.
pub fn t_of_n(n: u64) -> Result<EpsilonRecord> {
    let t = crossing(n)?;
    let eps = hdiff_exact(n, t)? - Rat::one();
    debug_assert!(!eps.is_negative());
    Ok(EpsilonRecord::from_exact(n, t, eps))
}

/// Upper end `log((3 + sqrt 13)/2)` of the admissible `x` range, as a ball.
pub fn x_upper_bound(prec: u32) -> Result<Ball> {
    // (3 + sqrt 13)/2 lies between consecutive dyadics; bracket ln over both
    let s = Ball::from_int(13, prec + 16).sqrt()?;
    let arg = (&s + &Ball::from_int(3, prec + 16)).mul_pow2(-1);
    let lo = ln_ball(&arg.lo().to_rat(), prec + 8)?;
    let hi = ln_ball(&arg.hi().to_rat(), prec + 8)?;
    Ok(lo.union(&hi).relabel(prec))
}

/// Second-order prediction `(24 e^{-x} y + e^{-2x} - 1) / (24 n^2)` of
/// `sum - x` for `m = e^x n - (1+e^x)/2 + y/n`.
pub fn predict_epsilon(n: u64, y: &Ball, x: &Ball, prec: u32) -> Result<Ball> {
    if n < 2 {
        return Err(Error::InvalidArgument("prediction needs n >= 2".into()));
    }
    if x.sign() != Some(Ordering::Greater) || x.lt(&x_upper_bound(prec)?) != Some(true) {
        return Err(Error::Domain(
            "x must lie in (0, log((3 + sqrt 13)/2))".into(),
        ));
    }
    let wp = prec + 16;
    let em = exp_ball(&-x, wp)?;
    let numer = &(&em * &y.with_prec(wp)).mul_int(&BigInt::from(24)) + &em.sqr();
    let numer = &numer - &Ball::one(wp);
    let n2 = BigInt::from(n) * BigInt::from(n) * 24;
    Ok(numer.div_int(n2)?.with_prec(prec))
}

/// Certified `y = n (m - e n + (1+e)/2)`.
pub fn y_of_pair(n: &BigInt, m: &BigInt, prec: u32) -> Result<Ball> {
    if n < &BigInt::from(2) {
        return Err(Error::InvalidArgument("y needs n >= 2".into()));
    }
    Ok(y_unchecked(n, m, prec))
}

pub(crate) fn y_unchecked(n: &BigInt, m: &BigInt, prec: u32) -> Ball {
    let wp = prec + 2 * n.bits().max(m.bits()) as u32 + 16;
    let e = const_e(wp).with_prec(wp);
    let one = Ball::one(wp);
    let s = &(&Ball::from_int(m.clone(), wp) - &e.mul_int(n)) + &(&one + &e).mul_pow2(-1);
    s.mul_int(n).relabel(prec)
}
