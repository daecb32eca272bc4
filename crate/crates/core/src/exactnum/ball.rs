//! Closed intervals with dyadic endpoints and outward rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Round};
use super::Rat;
use crate::error::{Error, Result};

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PREC: u32 = 32;

/// A certified enclosure `[lo, hi]` of a real number.
///
/// Every operation rounds `lo` toward `-inf` and `hi` toward `+inf`, so the
/// true result of an operation on any members of the inputs lies inside the
/// output. `prec` is the mantissa length used when rounding results.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Ball {
    /// Builds a ball from already-ordered endpoints.
    pub fn from_endpoints(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "ball endpoints out of order: {lo} > {hi}");
        Ball {
            lo,
            hi,
            prec: prec.max(MIN_PREC),
        }
    }

    fn rounded(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        Ball {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        Self::rounded(d.clone(), d, prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::point(Dyadic::from_int(n), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        Ball {
            lo: Dyadic::from_rat(r, prec, Round::Down),
            hi: Dyadic::from_rat(r, prec, Round::Up),
            prec,
        }
    }

    /// Smallest ball containing both `lo` and `hi`.
    pub fn hull_rat(lo: &Rat, hi: &Rat, prec: u32) -> Self {
        let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let prec = prec.max(MIN_PREC);
        Ball {
            lo: Dyadic::from_rat(a, prec, Round::Down),
            hi: Dyadic::from_rat(b, prec, Round::Up),
            prec,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same value, rounding precision changed for later operations.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::rounded(self.lo.clone(), self.hi.clone(), prec)
    }

    /// Same endpoints, different rounding precision for later operations.
    pub fn relabel(&self, prec: u32) -> Self {
        Ball {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            prec: prec.max(MIN_PREC),
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// `max(|lo|, |hi|)`.
    pub fn mag(&self) -> Dyadic {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_rat(&self, r: &Rat) -> bool {
        self.lo.cmp_rat(r) != Ordering::Greater && self.hi.cmp_rat(r) != Ordering::Less
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ball) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Decided sign: `Some(Greater)` if wholly positive, `Some(Less)` if
    /// wholly negative, `Some(Equal)` only for the exact point zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decided comparison with another ball; `None` when the balls overlap
    /// (unless both are the same exact point).
    pub fn cmp_ball(&self, other: &Ball) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decided comparison with an exact rational.
    pub fn cmp_rat(&self, r: &Rat) -> Option<Ordering> {
        let lo = self.lo.cmp_rat(r);
        let hi = self.hi.cmp_rat(r);
        match (lo, hi) {
            (Ordering::Greater, _) => Some(Ordering::Greater),
            (_, Ordering::Less) => Some(Ordering::Less),
            (Ordering::Equal, Ordering::Equal) => Some(Ordering::Equal),
            _ => None,
        }
    }

    /// Decided `self <= r` (`None` when `r` lies strictly inside).
    pub fn le_rat(&self, r: &Rat) -> Option<bool> {
        if self.hi.cmp_rat(r) != Ordering::Greater {
            Some(true)
        } else if self.lo.cmp_rat(r) == Ordering::Greater {
            Some(false)
        } else {
            None
        }
    }

    /// Decided `self < r`.
    pub fn lt_rat(&self, r: &Rat) -> Option<bool> {
        if self.hi.cmp_rat(r) == Ordering::Less {
            Some(true)
        } else if self.lo.cmp_rat(r) != Ordering::Less {
            Some(false)
        } else {
            None
        }
    }

    /// Decided `self <= other`.
    pub fn le(&self, other: &Ball) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Decided `self < other`.
    pub fn lt(&self, other: &Ball) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Ball {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            Ball {
                lo: Dyadic::zero(),
                hi: self.mag(),
                prec: self.prec,
            }
        }
    }

    pub fn sqr(&self) -> Ball {
        let a = self.abs();
        Self::rounded(a.lo.mul(&a.lo), a.hi.mul(&a.hi), self.prec)
    }

    pub fn mul_int(&self, n: &BigInt) -> Ball {
        let d = Dyadic::from_int(n.clone());
        let (a, b) = (self.lo.mul(&d), self.hi.mul(&d));
        if n.is_negative() {
            Self::rounded(b, a, self.prec)
        } else {
            Self::rounded(a, b, self.prec)
        }
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Ball {
        Ball {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn add_rat(&self, r: &Rat) -> Ball {
        self + &Ball::from_rat(r, self.prec)
    }

    pub fn mul_rat(&self, r: &Rat) -> Ball {
        self * &Ball::from_rat(r, self.prec)
    }

    /// Quotient; fails when the divisor contains zero.
    pub fn div(&self, other: &Ball) -> Result<Ball> {
        let prec = self.prec.max(other.prec);
        if other.contains_zero() {
            return Err(Error::undecidable("divisor ball contains zero", prec));
        }
        let corners = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = corners
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Down))
            .min()
            .expect("four corners");
        let hi = corners
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Up))
            .max()
            .expect("four corners");
        Ok(Ball { lo, hi, prec })
    }

    pub fn div_int(&self, n: impl Into<BigInt>) -> Result<Ball> {
        self.div(&Ball::from_int(n, self.prec))
    }

    pub fn recip(&self) -> Result<Ball> {
        Ball::one(self.prec).div(self)
    }

    pub fn sqrt(&self) -> Result<Ball> {
        if self.lo.is_negative() {
            return Err(Error::Domain(format!(
                "sqrt of ball with negative lower endpoint {}",
                self.lo.to_f64()
            )));
        }
        Ok(Ball {
            lo: self.lo.sqrt(self.prec, Round::Down),
            hi: self.hi.sqrt(self.prec, Round::Up),
            prec: self.prec,
        })
    }

    /// Floor, when it is the same integer across the whole ball.
    pub fn floor_decided(&self) -> Option<BigInt> {
        let f = self.lo.floor();
        (self.hi.floor() == f).then_some(f)
    }

    /// Nearest integer (ties upward), when decided across the ball.
    pub fn round_decided(&self) -> Option<BigInt> {
        let half = Dyadic::new(BigInt::one(), -1);
        let f = self.lo.add(&half).floor();
        (self.hi.add(&half).floor() == f).then_some(f)
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        if !self.overlaps(other) {
            return None;
        }
        Some(Ball {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            prec: self.prec.max(other.prec),
        })
    }

    /// Convex hull.
    pub fn union(&self, other: &Ball) -> Ball {
        Ball {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn max(&self, other: &Ball) -> Ball {
        Ball {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn min(&self, other: &Ball) -> Ball {
        Ball {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    /// Decimal bounds with `digits` significant digits, `lo` rounded down and
    /// `hi` rounded up, in scientific notation.
    pub fn to_decimal_bounds(&self, digits: usize) -> (String, String) {
        (
            decimal(&self.lo, digits, Round::Down),
            decimal(&self.hi, digits, Round::Up),
        )
    }
}

/// Scientific-notation decimal string of `d` rounded in direction `dir`.
fn decimal(d: &Dyadic, digits: usize, dir: Round) -> String {
    if d.is_zero() {
        return "0".to_string();
    }
    let r = d.to_rat();
    let neg = r.is_negative();
    let a = r.abs();
    // decimal exponent estimate from the binary magnitude, then corrected
    let e2 = d.magnitude_exp().expect("nonzero");
    let mut e10 = ((e2 - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rat {
        if k >= 0 {
            Rat::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Rat::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    loop {
        let lower = pow10(e10);
        if a < lower {
            e10 -= 1;
        } else if a >= pow10(e10 + 1) {
            e10 += 1;
        } else {
            break;
        }
    }
    // rounding magnitude: away from zero for the outward side
    let away = matches!((dir, neg), (Round::Up, false) | (Round::Down, true));
    let digits_at = |e10: i64| {
        let scaled = &a * pow10(digits as i64 - 1 - e10);
        if away { scaled.ceil() } else { scaled.floor() }.to_integer()
    };
    let mut m = digits_at(e10);
    if m.to_string().len() > digits {
        // carried into a new decade, e.g. 9.99 -> 10.0
        e10 += 1;
        m = digits_at(e10);
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_bounds(12);
        write!(f, "[{lo}, {hi}]")
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        Ball::rounded(
            self.lo.add(&rhs.lo),
            self.hi.add(&rhs.hi),
            self.prec.max(rhs.prec),
        )
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        Ball::rounded(
            self.lo.sub(&rhs.hi),
            self.hi.sub(&rhs.lo),
            self.prec.max(rhs.prec),
        )
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        let prec = self.prec.max(rhs.prec);
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return Ball::rounded(self.lo.mul(&rhs.lo), self.hi.mul(&rhs.hi), prec);
        }
        let p = [
            self.lo.mul(&rhs.lo),
            self.lo.mul(&rhs.hi),
            self.hi.mul(&rhs.lo),
            self.hi.mul(&rhs.hi),
        ];
        let lo = p.iter().min().expect("four products").clone();
        let hi = p.iter().max().expect("four products").clone();
        Ball::rounded(lo, hi, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Ball> for Ball {
            type Output = Ball;
            fn $m(self, rhs: &Ball) -> Ball {
                (&self).$m(rhs)
            }
        }
        impl $tr<Ball> for &Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Zero for Ball {
    fn zero() -> Self {
        Ball::zero(MIN_PREC)
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn one_plus_one_is_exactly_two() {
        let two = &Ball::one(64) + &Ball::one(64);
        assert!(two.is_exact());
        assert!(two.contains_rat(&rat(2, 1)));
    }

    #[test]
    fn sqrt_of_four() {
        let r = Ball::from_int(4, 64).sqrt().unwrap();
        assert!(r.contains_rat(&rat(2, 1)));
        let bound = Dyadic::new(BigInt::from(2), 1 - 64);
        assert!(r.width() <= bound);
    }

    #[test]
    fn one_third_at_64_bits() {
        let third = Ball::one(64).div(&Ball::from_int(3, 64)).unwrap();
        assert!(third.contains_rat(&rat(1, 3)));
        assert!(third.width() <= Dyadic::new(BigInt::one(), -62));
    }

    #[test]
    fn division_by_ball_with_zero_is_undecidable() {
        let z = Ball::hull_rat(&rat(-1, 10), &rat(1, 10), 64);
        assert!(Ball::one(64).div(&z).unwrap_err().is_undecidable());
    }

    #[test]
    fn sqrt_negative_is_domain_error() {
        let err = Ball::from_int(-1, 64).sqrt().unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn mixed_sign_product() {
        let a = Ball::hull_rat(&rat(-2, 1), &rat(3, 1), 64);
        let b = Ball::hull_rat(&rat(-5, 1), &rat(1, 1), 64);
        let p = &a * &b;
        assert!(p.contains_rat(&rat(10, 1)));
        assert!(p.contains_rat(&rat(-15, 1)));
        assert_eq!(p.sqr().lo(), &Dyadic::zero());
    }

    #[test]
    fn decimal_bounds_are_outward() {
        let third = Ball::from_rat(&rat(1, 3), 64);
        let (lo, hi) = third.to_decimal_bounds(5);
        assert_eq!(lo, "3.3333e-1");
        assert_eq!(hi, "3.3334e-1");
        let neg = -&third;
        let (lo, hi) = neg.to_decimal_bounds(5);
        assert_eq!(lo, "-3.3334e-1");
        assert_eq!(hi, "-3.3333e-1");
        let (lo, hi) = Ball::from_int(100, 64).to_decimal_bounds(3);
        assert_eq!((lo.as_str(), hi.as_str()), ("1e2", "1e2"));
    }

    #[test]
    fn decided_comparisons() {
        let x = Ball::hull_rat(&rat(1, 3), &rat(1, 2), 64);
        assert_eq!(x.cmp_rat(&rat(1, 4)), Some(Ordering::Greater));
        assert_eq!(x.cmp_rat(&rat(2, 5)), None);
        assert_eq!(x.lt_rat(&rat(1, 1)), Some(true));
        assert_eq!(x.le_rat(&rat(1, 2)), Some(true));
        assert_eq!(x.round_decided(), None);
        assert_eq!(Ball::from_rat(&rat(7, 3), 64).round_decided(), Some(BigInt::from(2)));
    }
}
