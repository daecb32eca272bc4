//! Exact rationals and certified ball arithmetic.
//!
//! [`Rat`] carries every exact quantity (convergent ratios, harmonic sums,
//! overshoots). [`Ball`] carries every irrational one. The transcendental
//! kernels here are deliberately few: `ln` of a positive rational, `e`, and
//! constants derived from `e` by ball arithmetic. Euler's constant is never
//! evaluated; it cancels in every harmonic difference this crate computes.

mod ball;
mod dyadic;
mod precision;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use ball::{Ball, MIN_PREC};
pub use dyadic::{Dyadic, Round};
pub use precision::{escalate, PrecisionPolicy};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat_reduce(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat> {
    let den = den.into();
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rat::new(num.into(), den))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.3"` exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        return rat_reduce(n, d);
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let all: BigInt = format!("{int_digits}{frac}").parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(all, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(rat_int(n))
}

/// Binary operations dispatched by name; `sqrt` ignores `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
}

pub fn ball_op(op: BallOp, a: &Ball, b: Option<&Ball>, prec: u32) -> Result<Ball> {
    let a = a.with_prec(prec);
    let rhs = || {
        b.map(|b| b.with_prec(prec))
            .ok_or_else(|| Error::InvalidArgument(format!("{op:?} needs two operands")))
    };
    Ok(match op {
        BallOp::Add => &a + &rhs()?,
        BallOp::Sub => &a - &rhs()?,
        BallOp::Mul => &a * &rhs()?,
        BallOp::Div => a.div(&rhs()?)?,
        BallOp::Sqrt => a.sqrt()?,
    })
}

/// `2 * atanh(z)` for `|z| <= 1/3`, enclosing the series tail geometrically.
fn two_atanh(z: &Rat, prec: u32) -> Ball {
    debug_assert!(z.abs() <= Rat::new(1.into(), 3.into()));
    if z.is_zero() {
        return Ball::zero(prec);
    }
    // |z|^(2K+1)/(2K+1) / (1 - z^2) <= 2^-(prec+4) once |z|^(2K) <= 2^-(prec+4)
    let wp = prec + 24;
    let zb = Ball::from_rat(z, wp);
    let z2 = zb.sqr();
    let mut term = zb.clone();
    let mut sum = zb;
    let bound_exp = -(prec as i64) - 6;
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = &term * &z2;
        let t = term.div_int(2 * k + 1).expect("odd denominator");
        sum = &sum + &t;
        match term.mag().magnitude_exp() {
            Some(e) if e > bound_exp => {}
            _ => break,
        }
    }
    // remaining tail: |z|^(2k+3)/((2k+3)(1 - z^2)) <= 2 * |term| * z^2 since z^2 <= 1/9
    let tail = (&term.abs() * &z2).mul_int(&BigInt::from(2));
    let tail_hi = tail.hi().clone();
    let tail = Ball::from_endpoints(tail_hi.neg(), tail_hi, wp);
    (&sum + &tail).mul_int(&BigInt::from(2))
}

/// Enclosure of `ln 2` as `2 atanh(1/3)`.
pub fn ln2_ball(prec: u32) -> Ball {
    two_atanh(&Rat::new(1.into(), 3.into()), prec).relabel(prec)
}

/// Certified `ln(r)` for rational `r > 0`, width at most `2^(4 - prec)`.
pub fn ln_ball(r: &Rat, prec: u32) -> Result<Ball> {
    if !r.is_positive() {
        return Err(Error::Domain(format!("ln of non-positive {r}")));
    }
    if r.is_one() {
        return Ok(Ball::zero(prec));
    }
    let prec = prec.max(MIN_PREC);
    // r = x * 2^j with x in [2/3, 4/3]
    let mut j = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scale = |j: i64| -> Rat {
        if j >= 0 {
            r / Rat::from_integer(BigInt::one() << j as u64)
        } else {
            r * Rat::from_integer(BigInt::one() << (-j) as u64)
        }
    };
    let lower = Rat::new(2.into(), 3.into());
    let upper = Rat::new(4.into(), 3.into());
    let mut x = scale(j);
    while x > upper {
        j += 1;
        x = scale(j);
    }
    while x < lower {
        j -= 1;
        x = scale(j);
    }
    let wp = prec + 8 + (64 - j.unsigned_abs().leading_zeros());
    let z = (&x - Rat::one()) / (&x + Rat::one());
    let mut out = two_atanh(&z, wp);
    if j != 0 {
        out = &out + &ln2_ball(wp).mul_int(&BigInt::from(j));
    }
    Ok(out.relabel(prec))
}

/// Certified `e`.
///
/// Taylor series `sum 1/k!` with tail below `2/(K+1)!`. The result is padded
/// by one unit at `prec + 2` bits on each side so that enclosures computed at
/// precisions eight or more bits apart are nested.
pub fn const_e(prec: u32) -> Ball {
    let prec = prec.max(MIN_PREC);
    let wp = prec + 16;
    // K with (K+1)! > 2^(wp + 2)
    let mut fact = BigInt::one();
    let mut numer = BigInt::one(); // sum_{j<=k} k!/j!
    let mut k: u64 = 0;
    loop {
        k += 1;
        fact *= k;
        numer = numer * k + 1u32;
        if (&fact * (k + 1)).bits() > wp as u64 + 3 {
            break;
        }
    }
    let partial = Rat::new(numer.clone(), fact.clone());
    let tail = Rat::new(BigInt::from(2), &fact * (k + 1));
    let lo = Dyadic::from_rat(&partial, prec + 2, Round::Down);
    let hi = Dyadic::from_rat(&(partial + tail), prec + 2, Round::Up);
    let pad = Dyadic::new(BigInt::one(), -(prec as i64));
    Ball::from_endpoints(lo.sub(&pad), hi.add(&pad), prec)
}

/// `sinh(1) = (e - 1/e) / 2`.
pub fn const_sinh1(prec: u32) -> Ball {
    let e = const_e(prec + 8).with_prec(prec + 8);
    let inv = e.recip().expect("e > 0");
    (&e - &inv).mul_pow2(-1).relabel(prec)
}

/// `exp` of a dyadic point, Taylor series with a geometric tail bound.
fn exp_point(x: &Dyadic, prec: u32) -> Ball {
    let wp = prec + 24;
    let xb = Ball::point(x.clone(), wp);
    let mut term = Ball::one(wp);
    let mut sum = Ball::one(wp);
    let mag = x.abs().to_f64();
    let mut j: u64 = 0;
    loop {
        j += 1;
        term = (&term * &xb).div_int(j).expect("nonzero");
        sum = &sum + &term;
        // once j + 1 > 2|x| every later term at most halves
        let small = term
            .mag()
            .magnitude_exp()
            .is_none_or(|e| e < -(wp as i64) - 4);
        if (j + 1) as f64 > 2.0 * mag + 1.0 && small {
            break;
        }
    }
    let t = term.mag().mul_pow2(1);
    &sum + &Ball::from_endpoints(t.neg(), t, wp)
}

/// Certified `exp(x)` for a ball with `|x| <= 64`.
pub fn exp_ball(x: &Ball, prec: u32) -> Result<Ball> {
    if x.mag().magnitude_exp().is_some_and(|e| e > 6) {
        return Err(Error::Domain("exp argument too large".into()));
    }
    let lo = exp_point(x.lo(), prec);
    let hi = exp_point(x.hi(), prec);
    Ok(Ball::from_endpoints(lo.lo().clone(), hi.hi().clone(), prec).with_prec(prec))
}

/// Positive rational power `base^exp` for rational `base > 0`.
pub fn pow_rat(base: &Rat, exp: &Rat, prec: u32) -> Result<Ball> {
    if !base.is_positive() {
        return Err(Error::Domain(format!("pow_rat of non-positive base {base}")));
    }
    let prec = prec.max(MIN_PREC);
    let a: i64 = exp
        .numer()
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("exponent numerator too large: {exp}")))?;
    let b: u32 = exp
        .denom()
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("exponent denominator too large: {exp}")))?;
    let mut x = num_traits::pow(base.clone(), a.unsigned_abs() as usize);
    if a < 0 {
        x = x.recip();
    }
    if b == 1 {
        return Ok(Ball::from_rat(&x, prec));
    }
    // root of x * 2^(b*s), with s chosen so the root carries prec + 2 bits
    let log2_x = x.numer().bits() as i64 - x.denom().bits() as i64;
    let s = prec as i64 + 2 - log2_x.div_euclid(b as i64);
    let shift = b as i64 * s;
    let scaled = if shift >= 0 {
        x * Rat::from_integer(BigInt::one() << shift as u64)
    } else {
        x / Rat::from_integer(BigInt::one() << (-shift) as u64)
    };
    let lo_int = scaled.floor().to_integer();
    let hi_int = scaled.ceil().to_integer();
    let lo_root = lo_int.nth_root(b);
    let mut hi_root = hi_int.nth_root(b);
    if num_traits::pow(hi_root.clone(), b as usize) < hi_int {
        hi_root += 1;
    }
    Ok(Ball::from_endpoints(
        Dyadic::new(lo_root, -s).round(prec, Round::Down),
        Dyadic::new(hi_root, -s).round(prec, Round::Up),
        prec,
    ))
}

/// Constants used throughout the construction, all at one precision.
#[derive(Clone, Debug)]
pub struct Constants {
    pub e: Ball,
    pub sinh1: Ball,
    /// `sinh(1)/12`, the offset that cancels the second-order term.
    pub y_star: Ball,
    /// `sinh(1)/6 = 2 y*`, the value `r d^2 n/(2n-1)` must approach.
    pub target: Ball,
    /// `3/sinh(1)`.
    pub alpha: Ball,
}

impl Constants {
    pub fn new(prec: u32) -> Self {
        let wp = prec.max(MIN_PREC) + 8;
        let e = const_e(wp);
        let sinh1 = const_sinh1(wp);
        let y_star = sinh1.div_int(12).expect("nonzero");
        let target = sinh1.div_int(6).expect("nonzero");
        let alpha = Ball::from_int(3, wp).div(&sinh1).expect("sinh(1) > 0");
        let at = |b: Ball| b.relabel(prec);
        Constants {
            e: at(e),
            sinh1: at(sinh1),
            y_star: at(y_star),
            target: at(target),
            alpha: at(alpha),
        }
    }
}
