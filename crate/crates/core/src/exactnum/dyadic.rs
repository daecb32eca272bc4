//! Dyadic rationals `mantissa * 2^exponent` with directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rat;

/// Rounding direction for a single endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// Exact dyadic number. Zero is always stored as `0 * 2^0`; nonzero values
/// keep an odd mantissa so equal values compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    if m.sign() == Sign::Minus {
        -ceil_shr(&-m, s)
    } else {
        m >> s
    }
}

fn ceil_shr(m: &BigInt, s: u64) -> BigInt {
    if m.sign() == Sign::Minus {
        -floor_shr(&-m, s)
    } else {
        let q: BigInt = m >> s;
        if (&q << s) == *m {
            q
        } else {
            q + 1
        }
    }
}

fn div_round(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { man, exp }
        } else {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Position just above the leading bit: `|x| < 2^top`.
    fn top(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    /// Exponent `e` such that `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn magnitude_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.top())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let man = match dir {
            Round::Down => floor_shr(&self.man, s),
            Round::Up => ceil_shr(&self.man, s),
        };
        Self::new(man, self.exp + s as i64)
    }

    /// `num / den` rounded to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        // quotient gets at least prec + 1 bits
        let shift = prec as i64 + 1 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if shift >= 0 {
            (num << shift as u64, den)
        } else {
            (num, den << (-shift) as u64)
        };
        Self::new(div_round(&n, &d, dir), -shift).round(prec, dir)
    }

    pub fn from_rat(r: &Rat, prec: u32, dir: Round) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec, dir)
    }

    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let q = Self::from_ratio(&self.man, &other.man, prec, dir);
        q.mul_pow2(self.exp - other.exp)
    }

    /// Square root of a nonnegative value rounded to `prec` bits.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        // scale mantissa so the root has about prec + 1 bits and the exponent is even
        let mut shift = 2 * (prec as i64 + 1) - self.man.bits() as i64;
        if shift < 0 {
            shift = 0;
        }
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m: BigUint = (&self.man << shift as u64).to_biguint().expect("nonnegative");
        let r = m.sqrt();
        let exact = &r * &r == m;
        let r = BigInt::from(r);
        let r = match dir {
            Round::Up if !exact => r + 1,
            _ => r,
        };
        Self::new(r, (self.exp - shift) / 2).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            floor_shr(&self.man, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            ceil_shr(&self.man, (-self.exp) as u64)
        }
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.man << self.exp as u64)
        } else {
            Rat::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        // self = man * 2^exp vs num / den with den > 0
        let (lhs, rhs) = if self.exp >= 0 {
            ((&self.man << self.exp as u64) * r.denom(), r.numer().clone())
        } else {
            (
                &self.man * r.denom(),
                r.numer() << (-self.exp) as u64,
            )
        };
        lhs.cmp(&rhs)
    }

    /// Nearest `f64`; display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let keep = bits.min(60);
        let m = floor_shr(&self.man, (bits - keep) as u64);
        let m: i64 = m.try_into().expect("fits in 60 bits");
        (m as f64) * 2f64.powi((self.exp + bits - keep).clamp(-1100, 1100) as i32)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.man.sign(), other.man.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = self.top().cmp(&other.top());
        if mag != Ordering::Equal {
            return if sa == Sign::Plus { mag } else { mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalizes_trailing_zeros() {
        assert_eq!(d(12, 0), d(3, 2));
        assert_eq!(d(0, 17), Dyadic::zero());
    }

    #[test]
    fn directed_rounding() {
        let x = d(0b1011, 0);
        assert_eq!(x.round(2, Round::Down), d(0b10, 2));
        assert_eq!(x.round(2, Round::Up), d(0b11, 2));
        assert_eq!(x.neg().round(2, Round::Down), d(-0b11, 2));
        assert_eq!(x.neg().round(2, Round::Up), d(-0b10, 2));
    }

    #[test]
    fn ratio_brackets_value() {
        let third = Rat::new(1.into(), 3.into());
        let lo = Dyadic::from_rat(&third, 64, Round::Down);
        let hi = Dyadic::from_rat(&third, 64, Round::Up);
        assert_eq!(lo.cmp_rat(&third), Ordering::Less);
        assert_eq!(hi.cmp_rat(&third), Ordering::Greater);
        assert!(hi.sub(&lo).magnitude_exp().unwrap() <= -63);
    }

    #[test]
    fn sqrt_exact_and_inexact() {
        assert_eq!(d(16, 0).sqrt(32, Round::Down), d(4, 0));
        let lo = d(2, 0).sqrt(64, Round::Down);
        let hi = d(2, 0).sqrt(64, Round::Up);
        assert!(lo.mul(&lo) < d(2, 0));
        assert!(hi.mul(&hi) > d(2, 0));
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d(1, -100) < d(1, 0));
        assert!(d(-1, 10) < d(-1, 0));
        assert!(d(3, -1) > d(1, 0));
        assert_eq!(d(5, -3).floor(), BigInt::from(0));
        assert_eq!(d(-5, -3).floor(), BigInt::from(-1));
        assert_eq!(d(-5, -3).ceil(), BigInt::from(0));
    }
}
