//! `pi` and the unit-circle phase `e(t) = exp(2 pi i t)` in ball arithmetic.

use num_bigint::BigInt;
use num_traits::One;

use crate::exactnum::{Ball, Dyadic, Rat};

/// `atan(1/x)` for an integer `x >= 2`; alternating series with the first
/// omitted term as tail bound.
fn atan_recip(x: u64, wp: u32) -> Ball {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut pow = BigInt::from(x);
    let mut sum = Ball::zero(wp);
    let mut j: u64 = 0;
    loop {
        let den = &pow * (2 * j + 1);
        let term = Ball::from_rat(&Rat::new(BigInt::one(), den.clone()), wp);
        if den.bits() > wp as u64 + 8 {
            let t = term.hi().clone();
            return &sum + &Ball::from_endpoints(t.neg(), t, wp);
        }
        sum = if j % 2 == 0 { &sum + &term } else { &sum - &term };
        pow *= &x2;
        j += 1;
    }
}

/// Certified `pi = 16 atan(1/5) - 4 atan(1/239)`.
pub fn pi_ball(prec: u32) -> Ball {
    let wp = prec + 16;
    let a = atan_recip(5, wp).mul_int(&BigInt::from(16));
    let b = atan_recip(239, wp).mul_int(&BigInt::from(4));
    (&a - &b).with_prec(prec)
}

/// `(cos x, sin x)` at a dyadic point with `|x| <= 4`.
fn cos_sin_point(x: &Dyadic, wp: u32) -> (Ball, Ball) {
    let xb = Ball::point(x.clone(), wp);
    let x2 = xb.sqr();
    let mut c_term = Ball::one(wp);
    let mut s_term = xb.clone();
    let mut c = c_term.clone();
    let mut s = s_term.clone();
    let mut j: u64 = 1;
    loop {
        // terms x^(2j)/(2j)! and x^(2j+1)/(2j+1)!
        c_term = (&c_term * &x2).div_int(BigInt::from((2 * j - 1) * (2 * j))).expect("nonzero");
        s_term = (&s_term * &x2).div_int(BigInt::from((2 * j) * (2 * j + 1))).expect("nonzero");
        if j % 2 == 1 {
            c = &c - &c_term;
            s = &s - &s_term;
        } else {
            c = &c + &c_term;
            s = &s + &s_term;
        }
        let tiny = |b: &Ball| b.mag().magnitude_exp().is_none_or(|e| e < -(wp as i64) - 2);
        if j >= 4 && tiny(&c_term) && tiny(&s_term) {
            break;
        }
        j += 1;
    }
    // alternating with decreasing terms once 2j > |x|: the next term bounds the tail
    let pad = |b: &Ball| {
        let t = b.mag();
        Ball::from_endpoints(t.neg(), t, wp)
    };
    (&c + &pad(&c_term), &s + &pad(&s_term))
}

fn clamp_unit(b: Ball) -> Ball {
    let prec = b.prec();
    b.intersect(&Ball::from_endpoints(Dyadic::from_int(-1), Dyadic::from_int(1), prec))
        .unwrap_or(b)
}

/// `(cos 2 pi t, sin 2 pi t)`.
pub fn unit_phase(t: &Ball, prec: u32) -> (Ball, Ball) {
    let wp = prec + 16;
    // shift to [-1/2, 1/2]; integer shifts are exact
    let shift = t.mid().add(&Dyadic::new(BigInt::one(), -1)).floor();
    let t = &t.with_prec(wp) - &Ball::from_int(shift, wp);
    let theta = &pi_ball(wp).mul_pow2(1) * &t;
    let mid = theta.mid();
    let rad = theta.width().mul_pow2(-1);
    let (c, s) = cos_sin_point(&mid, wp);
    let widen = |b: Ball| {
        Ball::from_endpoints(b.lo().sub(&rad), b.hi().add(&rad), wp)
    };
    (
        clamp_unit(widen(c)).with_prec(prec),
        clamp_unit(widen(s)).with_prec(prec),
    )
}

/// `e(r)` for a rational, reduced exactly mod 1 first.
pub fn unit_phase_rat(r: &Rat, prec: u32) -> (Ball, Ball) {
    let frac = r - r.floor();
    unit_phase(&Ball::from_rat(&frac, prec + 16), prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi_ball(128);
        assert!((p.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.width().magnitude_exp().unwrap() < -120);
    }

    #[test]
    fn phase_values() {
        let q = |n: i64, d: i64| Rat::new(n.into(), d.into());
        let (c, s) = unit_phase_rat(&q(1, 4), 64);
        assert!(c.contains_zero() && (s.to_f64() - 1.0).abs() < 1e-15);
        let (c, s) = unit_phase_rat(&q(1, 2), 64);
        assert!((c.to_f64() + 1.0).abs() < 1e-15 && s.contains_zero());
        let (c, _) = unit_phase_rat(&q(7, 3), 64);
        assert!((c.to_f64() + 0.5).abs() < 1e-15);
        for k in 0..50 {
            let t = q(k, 37);
            let (c, s) = unit_phase_rat(&t, 80);
            let a = 2.0 * std::f64::consts::PI * k as f64 / 37.0;
            assert!((c.to_f64() - a.cos()).abs() < 1e-14);
            assert!((s.to_f64() - a.sin()).abs() < 1e-14);
            assert!(c.width().magnitude_exp().is_none_or(|e| e < -70));
        }
    }
}
