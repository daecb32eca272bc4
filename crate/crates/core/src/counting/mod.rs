//! Exponential sums, the Erdős–Turán inequality, the quadratic counting lemma
//! and the search for approximations `|alpha - m/n^2| < n^{-s}`.

pub mod phase;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contfrac::subseq_entry;
use crate::error::{Error, Result};
use crate::exactnum::{ln_ball, pow_rat, Ball, Constants, Dyadic, PrecisionPolicy, Rat};
use crate::oracle::output::{ser_ball, ser_bigint, ser_rat};
use crate::par;

pub use phase::{pi_ball, unit_phase, unit_phase_rat};

/// Points per block in parallel reductions; fixed so that results do not
/// depend on the thread count.
const BLOCK: usize = 256;

/// A point mod 1, exact or enclosed.
#[derive(Clone, Debug)]
pub enum Point {
    Exact(Rat),
    Approx(Ball),
}

impl Point {
    /// Whether the point lies in `[a, b]` mod 1; `None` if undecided.
    fn in_interval(&self, a: &Rat, b: &Rat) -> Option<bool> {
        match self {
            Point::Exact(x) => Some(rat_in_interval(x, a, b)),
            Point::Approx(x) => {
                let lo = rat_in_interval(&x.lo().to_rat(), a, b);
                let hi = rat_in_interval(&x.hi().to_rat(), a, b);
                // inside at both ends and narrower than the complement, or
                // outside at both ends and narrower than the interval
                let room = if lo { Rat::one() - (b - a) } else { b - a };
                (lo == hi && x.width().cmp_rat(&room) == Ordering::Less).then_some(lo)
            }
        }
    }

    fn phase(&self, prec: u32) -> (Ball, Ball) {
        match self {
            Point::Exact(x) => unit_phase_rat(x, prec),
            Point::Approx(x) => unit_phase(x, prec),
        }
    }
}

fn rat_in_interval(x: &Rat, a: &Rat, b: &Rat) -> bool {
    let j = (a - x).ceil();
    x + j <= *b
}

/// A finite list of points reduced to `[0, 1)`.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn from_rats(xs: impl IntoIterator<Item = Rat>) -> Self {
        PointSet {
            points: xs
                .into_iter()
                .map(|x| Point::Exact(&x - x.floor()))
                .collect(),
        }
    }

    /// Ball points; each is shifted by an integer when that shift is decided.
    pub fn from_balls(xs: impl IntoIterator<Item = Ball>) -> Self {
        PointSet {
            points: xs
                .into_iter()
                .map(|x| {
                    let f = x.floor_decided().unwrap_or_else(|| x.mid().floor());
                    let prec = x.prec();
                    Point::Approx(&x - &Ball::from_int(f, prec))
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `1 - x` mod 1 for each point.
    pub fn reflected(&self) -> Self {
        PointSet {
            points: self
                .points
                .iter()
                .map(|p| match p {
                    Point::Exact(x) => {
                        let y = Rat::one() - x;
                        Point::Exact(&y - y.floor())
                    }
                    Point::Approx(x) => Point::Approx(&Ball::one(x.prec()) - x),
                })
                .collect(),
        }
    }
}

fn complex_mul(a: &(Ball, Ball), b: &(Ball, Ball)) -> (Ball, Ball) {
    (&(&a.0 * &b.0) - &(&a.1 * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

fn modulus(re: &Ball, im: &Ball, n: usize) -> Result<Ball> {
    let m = (&re.sqr() + &im.sqr()).sqrt()?;
    let cap = Ball::from_endpoints(Dyadic::zero(), Dyadic::from_int(n as u64), m.prec());
    Ok(m.intersect(&cap).unwrap_or(m))
}

/// Certified `|S_m| = |sum_n e(m x_n)|`.
pub fn exp_sum(ps: &PointSet, m: u64, prec: u32) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("exp_sum needs m >= 1".into()));
    }
    let wp = prec + 16;
    let mb = BigInt::from(m);
    let blocks: Vec<&[Point]> = ps.points.chunks(BLOCK).collect();
    let partial = par::map(&blocks, |block| {
        let mut re = Ball::zero(wp);
        let mut im = Ball::zero(wp);
        for p in block.iter() {
            let (c, s) = match p {
                Point::Exact(x) => unit_phase_rat(&(x * &mb), wp),
                Point::Approx(x) => unit_phase(&x.mul_int(&mb), wp),
            };
            re = &re + &c;
            im = &im + &s;
        }
        (re, im)
    });
    let (re, im) = partial.into_iter().fold(
        (Ball::zero(wp), Ball::zero(wp)),
        |(r, i), (a, b)| (&r + &a, &i + &b),
    );
    Ok(modulus(&re, &im, ps.len())?.with_prec(prec))
}

/// `|S_1|, ..., |S_L|` via powers of each point's phase.
pub fn exp_sums(ps: &PointSet, l: u64, prec: u32) -> Result<Vec<Ball>> {
    let wp = prec + 16 + (64 - l.leading_zeros());
    let l = l as usize;
    let blocks: Vec<&[Point]> = ps.points.chunks(BLOCK).collect();
    let partial = par::map(&blocks, |block| {
        let mut acc = vec![(Ball::zero(wp), Ball::zero(wp)); l];
        for p in block.iter() {
            let z = p.phase(wp);
            let mut pw = z.clone();
            for slot in acc.iter_mut() {
                slot.0 = &slot.0 + &pw.0;
                slot.1 = &slot.1 + &pw.1;
                pw = complex_mul(&pw, &z);
            }
        }
        acc
    });
    let mut total = vec![(Ball::zero(wp), Ball::zero(wp)); l];
    for block in partial {
        for (t, b) in total.iter_mut().zip(block) {
            t.0 = &t.0 + &b.0;
            t.1 = &t.1 + &b.1;
        }
    }
    total
        .iter()
        .map(|(re, im)| Ok(modulus(re, im, ps.len())?.with_prec(prec)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ETReport {
    pub n_points: usize,
    #[serde(serialize_with = "ser_rat")]
    pub a: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub b: Rat,
    /// Points of the set lying in `[a, b]` mod 1.
    pub count: u64,
    #[serde(serialize_with = "ser_rat")]
    pub expected: Rat,
    /// `|count - N delta|`.
    #[serde(serialize_with = "ser_rat")]
    pub lhs: Rat,
    /// `N/(L+1) + 2 (1/(L+1) + delta) sum_m |S_m|`.
    #[serde(serialize_with = "ser_ball")]
    pub rhs: Ball,
    #[serde(serialize_with = "ser_ball")]
    pub sum_abs: Ball,
    pub l: u64,
    pub holds: bool,
}

/// Evaluates both sides of the Erdős–Turán inequality on `[a, b]`.
pub fn et_check(ps: &PointSet, a: &Rat, b: &Rat, l: u64, prec: u32) -> Result<ETReport> {
    let delta = b - a;
    if !delta.is_positive() || delta >= Rat::one() {
        return Err(Error::InvalidArgument(format!("need 0 < b - a < 1, got [{a}, {b}]")));
    }
    if l == 0 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    let mut count = 0u64;
    for p in &ps.points {
        match p.in_interval(a, b) {
            Some(true) => count += 1,
            Some(false) => {}
            None => return Err(Error::undecidable("point membership near an endpoint", prec)),
        }
    }
    let n = Rat::from_integer(ps.len().into());
    let expected = &n * &delta;
    let lhs = (Rat::from_integer(count.into()) - &expected).abs();
    let l1 = Rat::new(BigInt::one(), BigInt::from(l + 1));
    let policy = PrecisionPolicy { start: prec.max(64), max: PrecisionPolicy::default().max };
    crate::exactnum::escalate(policy, |wp| {
        let sums = exp_sums(ps, l, wp)?;
        let sum_abs = sums
            .iter()
            .fold(Ball::zero(wp), |s, x| &s + x);
        let weight = (&l1 + &delta) * BigInt::from(2);
        let rhs = sum_abs.mul_rat(&weight).add_rat(&(&n * &l1));
        let holds = match rhs.cmp_rat(&lhs) {
            Some(o) => o != Ordering::Less,
            None => return Err(Error::undecidable("Erdős–Turán comparison", wp)),
        };
        Ok(ETReport {
            n_points: ps.len(),
            a: a.clone(),
            b: b.clone(),
            count,
            expected: expected.clone(),
            lhs: lhs.clone(),
            rhs: rhs.with_prec(prec),
            sum_abs: sum_abs.with_prec(prec),
            l,
            holds,
        })
    })
}

/// Parameters of one seeded random instance.
#[derive(Clone, Debug)]
pub struct EtInstance {
    pub points: PointSet,
    pub a: Rat,
    pub b: Rat,
    pub l: u64,
}

/// Random instance `trial` of the stream seeded by `seed`: `N <= 1000`
/// rational points, `L <= 50`, an interval of length `k/1000`.
pub fn et_instance(seed: u64, trial: u64) -> EtInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let n = rng.gen_range(1..=1000usize);
    let l = rng.gen_range(1..=50u64);
    let xs: Vec<Rat> = (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=1_000_000u64);
            let num = rng.gen_range(0..den);
            Rat::new(num.into(), den.into())
        })
        .collect();
    let a_den = 1000u64;
    let a = Rat::new(rng.gen_range(0..a_den).into(), a_den.into());
    let len = Rat::new(rng.gen_range(1..1000u64).into(), 1000.into());
    let b = &a + len;
    EtInstance { points: PointSet::from_rats(xs), a, b, l }
}

/// Runs `trials` seeded random instances.
pub fn et_random_trials(seed: u64, trials: u64, prec: u32) -> Result<Vec<ETReport>> {
    let ids: Vec<u64> = (0..trials).collect();
    par::map(&ids, |&t| {
        let inst = et_instance(seed, t);
        et_check(&inst.points, &inst.a, &inst.b, inst.l, prec)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    #[serde(serialize_with = "ser_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub q: BigInt,
    #[serde(serialize_with = "ser_rat")]
    pub r: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub delta: Rat,
    pub n_max: u64,
    pub a: i64,
    pub b: u64,
    /// `n` with `||p n^2/q - r|| < delta`.
    pub count: u64,
    /// `n` with `||p n^2/q - r|| = delta` exactly, excluded from `count`.
    pub ties: u64,
    /// Count from the direct rational evaluation.
    pub count_direct: u64,
    /// `2 N delta / b`.
    #[serde(serialize_with = "ser_rat")]
    pub main_term: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub eta: Rat,
    /// Error expression with all implied constants set to 1.
    #[serde(serialize_with = "ser_ball")]
    pub error_bound: Ball,
    pub multiplier: u64,
    /// `|count - main| <= multiplier * error_bound`, decided.
    pub within: Option<bool>,
}

impl CountReport {
    pub fn paths_agree(&self) -> bool {
        self.count == self.count_direct
    }
}

/// Parameters for [`count_quadratic`].
#[derive(Clone, Debug)]
pub struct CountParams {
    pub p: BigInt,
    pub q: BigInt,
    pub r: Rat,
    pub delta: Rat,
    pub n_max: u64,
    pub a: i64,
    pub b: u64,
    pub eta: Rat,
    pub multiplier: u64,
}

impl CountParams {
    pub fn new(p: i64, q: u64, r: Rat, delta: Rat, n_max: u64, a: i64, b: u64) -> Self {
        CountParams {
            p: p.into(),
            q: q.into(),
            r,
            delta,
            n_max,
            a,
            b,
            eta: Rat::new(1.into(), 10.into()),
            multiplier: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        let half = Rat::new(1.into(), 2.into());
        if !self.q.is_positive() || !self.p.gcd(&self.q).is_one() {
            return Err(Error::InvalidArgument(format!(
                "need q >= 1 and gcd(p, q) = 1, got p={} q={}",
                self.p, self.q
            )));
        }
        if !self.delta.is_positive() || self.delta >= half {
            return Err(Error::InvalidArgument(format!("need 0 < delta < 1/2, got {}", self.delta)));
        }
        if self.b == 0 || !self.eta.is_positive() {
            return Err(Error::InvalidArgument("need b >= 1 and eta > 0".into()));
        }
        Ok(())
    }

    fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        let start = (self.a.rem_euclid(self.b as i64)) as u64;
        let start = if start == 0 { self.b } else { start };
        (start..=self.n_max).step_by(self.b as usize)
    }
}

/// Counts by residues `p n^2 mod q` over the common denominator `q * den(r)`.
fn count_modular(cp: &CountParams) -> (u64, u64) {
    let rn = cp.r.numer();
    let rd = cp.r.denom();
    let big_q = &cp.q * rd;
    let target = (rn * &cp.q).mod_floor(&big_q);
    let (dn, dd) = (cp.delta.numer(), cp.delta.denom());
    let limit = dn * &big_q;
    let idx: Vec<u64> = cp.indices().collect();
    let blocks: Vec<&[u64]> = idx.chunks(4096).collect();
    let parts = par::map(&blocks, |block| {
        let (mut hits, mut ties) = (0u64, 0u64);
        for &n in block.iter() {
            let nb = BigInt::from(n);
            let s = (&cp.p * &nb * &nb).mod_floor(&cp.q) * rd;
            let t = (s - &target).mod_floor(&big_q);
            let dist = (&big_q - &t).min(t);
            match (dist * dd).cmp(&limit) {
                Ordering::Less => hits += 1,
                Ordering::Equal => ties += 1,
                Ordering::Greater => {}
            }
        }
        (hits, ties)
    });
    parts.into_iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d))
}

/// Counts by evaluating `||p n^2/q - r||` as a rational.
fn count_direct(cp: &CountParams) -> (u64, u64) {
    let half = Rat::new(1.into(), 2.into());
    let mut hits = 0;
    let mut ties = 0;
    for n in cp.indices() {
        let nb = BigInt::from(n);
        let x = Rat::new(&cp.p * &nb * &nb, cp.q.clone()) - &cp.r;
        let frac = &x - x.floor();
        let dist = if frac > half { Rat::one() - frac } else { frac };
        match dist.cmp(&cp.delta) {
            Ordering::Less => hits += 1,
            Ordering::Equal => ties += 1,
            Ordering::Greater => {}
        }
    }
    (hits, ties)
}

/// `main N^-eta + N^{1+2 eta} delta^-eta (log q/N + 1/q + q delta log q/N^2)^{1/2}`.
fn counting_error(cp: &CountParams, main: &Rat, prec: u32) -> Result<Ball> {
    let wp = prec + 16;
    let n = Rat::from_integer(cp.n_max.into());
    let q = Rat::from_integer(cp.q.clone());
    let log_q = ln_ball(&q, wp)?;
    let first = pow_rat(&n, &-cp.eta.clone(), wp)?.mul_rat(main);
    let lead = pow_rat(&n, &(Rat::one() + &cp.eta * BigInt::from(2)), wp)?;
    let dpow = pow_rat(&cp.delta, &-cp.eta.clone(), wp)?;
    let inner = &(&log_q.mul_rat(&n.recip()) + &Ball::from_rat(&q.recip(), wp))
        + &log_q.mul_rat(&(&q * &cp.delta / (&n * &n)));
    let root = inner.max(&Ball::zero(wp)).sqrt()?;
    Ok((&first + &(&(&lead * &dpow) * &root)).with_prec(prec))
}

/// Exact count of `n <= N`, `n = a (mod b)` with `||p n^2/q - r|| < delta`,
/// with the main term and error expression.
pub fn count_quadratic(cp: &CountParams, prec: u32) -> Result<CountReport> {
    cp.validate()?;
    if cp.n_max == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let (count, ties) = count_modular(cp);
    let (count_direct, _) = count_direct(cp);
    let main = Rat::from_integer(BigInt::from(2 * cp.n_max)) * &cp.delta / BigInt::from(cp.b);
    let err = counting_error(cp, &main, prec)?;
    let dev = (Rat::from_integer(count.into()) - &main).abs();
    let within = err
        .mul_int(&BigInt::from(cp.multiplier))
        .cmp_rat(&dev)
        .map(|o| o != Ordering::Less);
    Ok(CountReport {
        p: cp.p.clone(),
        q: cp.q.clone(),
        r: cp.r.clone(),
        delta: cp.delta.clone(),
        n_max: cp.n_max,
        a: cp.a,
        b: cp.b,
        count,
        ties,
        count_direct,
        main_term: main,
        eta: cp.eta.clone(),
        error_bound: err,
        multiplier: cp.multiplier,
        within,
    })
}

/// An accepted approximation `m/n^2`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxPair {
    #[serde(serialize_with = "ser_bigint")]
    pub m: BigInt,
    pub n: u64,
    /// `|alpha - m/n^2|`.
    #[serde(serialize_with = "ser_ball")]
    pub error: Ball,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxSearch {
    pub pairs: Vec<ApproxPair>,
    /// `n` whose rounding or threshold comparison was undecided.
    pub skipped: Vec<u64>,
}

/// Residue constraint `x = a (mod b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub a: i64,
    pub b: u64,
}

impl Congruence {
    pub const ANY: Congruence = Congruence { a: 0, b: 1 };

    pub fn new(a: i64, b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        Ok(Congruence { a: a.rem_euclid(b as i64), b })
    }

    pub fn admits(&self, x: &BigInt) -> bool {
        x.mod_floor(&BigInt::from(self.b)) == BigInt::from(self.a)
    }
}

/// Decision for one `n`: `Some(Some(pair))` accepted, `Some(None)` rejected,
/// `None` undecided.
fn approx_at(
    alpha: &Ball,
    exponent: &Rat,
    n: u64,
    mc: Congruence,
    prec: u32,
) -> Result<Option<Option<ApproxPair>>> {
    let nb = BigInt::from(n);
    let n2 = &nb * &nb;
    let target = alpha.mul_int(&n2);
    let shifted = target.add_rat(&Rat::from_integer((-mc.a).into())).div_int(mc.b)?;
    let Some(k) = shifted.round_decided() else {
        return Ok(None);
    };
    let m = k * mc.b + mc.a;
    if !m.is_positive() {
        return Ok(Some(None));
    }
    Ok(check_pair(alpha, exponent, &m, n, prec)?.map(|(ok, error)| ok.then_some(ApproxPair { m, n, error })))
}

/// Decides `|alpha - m/n^2| < n^{-exponent}`.
pub fn check_pair(
    alpha: &Ball,
    exponent: &Rat,
    m: &BigInt,
    n: u64,
    prec: u32,
) -> Result<Option<(bool, Ball)>> {
    let nb = BigInt::from(n);
    let ratio = Rat::new(m.clone(), &nb * &nb);
    let error = alpha.add_rat(&-ratio).abs();
    let bound = pow_rat(&Rat::from_integer(nb), &-exponent.clone(), prec + 16)?;
    Ok(error.lt(&bound).map(|ok| (ok, error.with_prec(prec))))
}

/// All `n <= n_max` in the class `nc` whose nearest `m` in the class `mc`
/// satisfies `|alpha - m/n^2| < n^{-exponent}`.
pub fn search_m_over_nsq(
    alpha: &Ball,
    exponent: &Rat,
    n_max: u64,
    nc: Congruence,
    mc: Congruence,
    prec: u32,
) -> Result<ApproxSearch> {
    if alpha.sign() != Some(Ordering::Greater) {
        return Err(Error::Domain("alpha must be decided positive".into()));
    }
    if *exponent > Rat::new(5.into(), 2.into()) {
        return Err(Error::InvalidArgument("exponent must be at most 5/2".into()));
    }
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let ns: Vec<u64> = (1..=n_max).filter(|&n| nc.admits(&BigInt::from(n))).collect();
    let blocks: Vec<&[u64]> = ns.chunks(512).collect();
    let parts = par::map(&blocks, |block| -> Result<(Vec<ApproxPair>, Vec<u64>)> {
        let mut pairs = Vec::new();
        let mut skipped = Vec::new();
        for &n in block.iter() {
            match approx_at(alpha, exponent, n, mc, prec)? {
                Some(Some(p)) => pairs.push(p),
                Some(None) => {}
                None => skipped.push(n),
            }
        }
        Ok((pairs, skipped))
    });
    let mut out = ApproxSearch { pairs: Vec::new(), skipped: Vec::new() };
    for part in parts {
        let (p, s) = part?;
        out.pairs.extend(p);
        out.skipped.extend(s);
    }
    Ok(out)
}

/// Link between an approximation `k'/d^2` of `3/sinh(1)` and the construction:
/// with `k = (k'-3)/2`, the deviation `|r_{3k+2} d^2 - sinh(1)/3|`.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionLink {
    pub k: u64,
    pub d: u64,
    #[serde(serialize_with = "ser_ball")]
    pub deviation: Ball,
    /// `deviation <= 2/d^2`, decided.
    pub small: Option<bool>,
}

/// `None` unless `m = 3 (mod 4)`, `n` odd and `k <= k_cap`.
pub fn construction_link(pair: &ApproxPair, k_cap: u64, prec: u32) -> Result<Option<ConstructionLink>> {
    if pair.n % 2 == 0 || !(Congruence { a: 3, b: 4 }).admits(&pair.m) {
        return Ok(None);
    }
    let k = ((&pair.m - 3u32) / 2u32).to_u64();
    let Some(k) = k.filter(|&k| k <= k_cap) else {
        return Ok(None);
    };
    let entry = subseq_entry(k, prec)?;
    let consts = Constants::new(prec);
    let d2 = BigInt::from(pair.n) * BigInt::from(pair.n);
    let third = consts.sinh1.div_int(3)?;
    let deviation = (&entry.r.mul_int(&d2) - &third).abs();
    let bound = Rat::new(BigInt::from(2), d2);
    Ok(Some(ConstructionLink {
        k,
        d: pair.n,
        small: deviation.le_rat(&bound),
        deviation,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn exp_sum_examples() {
        let zeros = PointSet::from_rats(vec![Rat::zero(); 7]);
        for m in 1..5 {
            let s = exp_sum(&zeros, m, 64).unwrap();
            assert!(s.contains_rat(&q(7, 1)));
        }
        let halves = PointSet::from_rats(vec![Rat::zero(), q(1, 2)]);
        assert!(exp_sum(&halves, 1, 64).unwrap().mag().to_f64() < 1e-15);

        let phi = (&Ball::from_int(5, 128).sqrt().unwrap() + &Ball::one(128)).mul_pow2(-1);
        let pts = PointSet::from_balls((1..=100).map(|k| phi.mul_int(&BigInt::from(k))));
        let s = exp_sum(&pts, 1, 64).unwrap();
        assert_eq!(s.le_rat(&q(3, 1)), Some(true));
    }

    #[test]
    fn exp_sums_match_single() {
        let pts = PointSet::from_rats((1..200).map(|k| q(k * k, 997)));
        let all = exp_sums(&pts, 12, 64).unwrap();
        for (i, s) in all.iter().enumerate() {
            let one = exp_sum(&pts, i as u64 + 1, 64).unwrap();
            assert!(s.overlaps(&one), "m={}", i + 1);
        }
        let refl = exp_sums(&pts.reflected(), 12, 64).unwrap();
        for (a, b) in all.iter().zip(&refl) {
            assert!(a.overlaps(b));
        }
    }

    #[test]
    fn et_examples() {
        let one = PointSet::from_rats([q(1, 2)]);
        let r = et_check(&one, &q(2, 5), &q(3, 5), 1, 64).unwrap();
        assert_eq!(r.lhs, q(4, 5));
        assert!((r.rhs.to_f64() - 1.9).abs() < 1e-12);
        assert!(r.holds);

        let n = 60;
        let eq = PointSet::from_rats((1..=n).map(|k| q(k, n)));
        let r = et_check(&eq, &Rat::zero(), &q(1, 2), 40, 64).unwrap();
        assert!(r.lhs <= Rat::one() && r.holds);

        assert!(et_check(&eq, &Rat::zero(), &Rat::one(), 3, 64).is_err());
    }

    #[test]
    fn et_wraparound() {
        let pts = PointSet::from_rats([q(19, 20), q(1, 20), q(1, 2)]);
        let r = et_check(&pts, &q(-1, 10), &q(1, 10), 5, 64).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn et_trials_are_seeded() {
        let a = et_random_trials(7, 3, 64).unwrap();
        let b = et_random_trials(7, 3, 64).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.count, x.l, &x.lhs), (y.count, y.l, &y.lhs));
            assert!(x.holds);
        }
    }

    #[test]
    fn count_examples() {
        let cp = CountParams::new(1, 2, Rat::zero(), q(3, 10), 10, 0, 1);
        let r = count_quadratic(&cp, 64).unwrap();
        assert_eq!((r.count, r.count_direct, r.ties), (5, 5, 0));

        let cp = CountParams::new(1, 1, Rat::zero(), q(49, 100), 37, 0, 1);
        assert_eq!(count_quadratic(&cp, 64).unwrap().count, 37);

        let cp = CountParams::new(3, 10007, Rat::zero(), q(1, 20), 2000, 1, 1);
        let r = count_quadratic(&cp, 64).unwrap();
        assert!(r.paths_agree());
        assert_eq!(r.main_term, q(200, 1));
        assert_eq!(r.within, Some(true));
        assert!((r.error_bound.to_f64() - 1037.0).abs() < 10.0, "{}", r.error_bound.to_f64());

        // ||n^2/4|| = 1/4 for odd n: ties, not hits
        let cp = CountParams::new(1, 4, Rat::zero(), q(1, 4), 10, 1, 2);
        let r = count_quadratic(&cp, 64).unwrap();
        assert_eq!((r.count, r.ties), (0, 5));

        assert!(count_quadratic(&CountParams::new(2, 4, Rat::zero(), q(1, 4), 10, 0, 1), 64).is_err());
    }

    #[test]
    fn approx_examples() {
        let c = Constants::new(128);
        let odd = Congruence::new(1, 2).unwrap();
        let m3 = Congruence::new(3, 4).unwrap();
        let s = search_m_over_nsq(&c.alpha, &q(9, 4), 100, odd, m3, 128).unwrap();
        assert!(s.pairs.iter().any(|p| p.n == 3 && p.m == BigInt::from(23)));
        assert!(s.skipped.is_empty());
        let link = construction_link(s.pairs.iter().find(|p| p.n == 3).unwrap(), 200, 128)
            .unwrap()
            .unwrap();
        assert_eq!((link.k, link.d, link.small), (10, 3, Some(true)));

        let four = Ball::from_int(4, 64);
        let s = search_m_over_nsq(&four, &q(9, 4), 20, Congruence::ANY, Congruence::ANY, 64).unwrap();
        assert_eq!(s.pairs.len(), 20);
        assert!(s.pairs.iter().all(|p| p.m == BigInt::from(4 * p.n * p.n)));
    }
}
