//! Exhaustive record search for `n^2 eps_n` and the link between small
//! overshoots and convergents of `e`.

pub mod checkpoint;
pub mod output;
pub mod scan;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::contfrac::is_convergent;
use crate::error::{Error, Result};
use crate::exactnum::{const_e, pow_rat, Ball, Rat};
use crate::harmonic::{y_of_pair, EpsilonRecord};
use output::{ser_ball, ser_bigint};

pub use scan::{scan_records, scan_with, ScanOptions};

/// Reduction of `(2m+1)/(2n-1)` and its membership among convergents of `e`.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionReport {
    pub n: u64,
    pub m: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub reduced_p: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub reduced_q: BigInt,
    /// `gcd(2m+1, 2n-1)`.
    pub d: u64,
    pub is_convergent: bool,
    #[serde(serialize_with = "ser_ball")]
    pub y: Ball,
}

/// Convergent indices needed to reach denominators of `q`: `q_i >= F_i`.
fn index_cap(q: &BigInt) -> u64 {
    (3 * q.bits() + 6) / 2 + 2
}

pub fn convergent_connection(n: u64, m: u64, k_cap: Option<u64>, prec: u32) -> Result<ConnectionReport> {
    if n < 2 || m < n {
        return Err(Error::InvalidArgument(format!("need m >= n >= 2, got n={n} m={m}")));
    }
    let num: BigInt = BigInt::from(m) * 2 + 1;
    let den: BigInt = BigInt::from(n) * 2 - 1;
    let g = num.gcd(&den);
    let (p, q) = (&num / &g, &den / &g);
    let cap = k_cap.unwrap_or_else(|| index_cap(&q));
    Ok(ConnectionReport {
        n,
        m,
        is_convergent: is_convergent(&p, &q, cap),
        reduced_p: p,
        reduced_q: q,
        d: g.to_u64().expect("divides 2n-1"),
        y: y_of_pair(&n.into(), &m.into(), prec)?,
    })
}

/// `tau = (3/e + e^{-2} - 1)/24`: the value of `n^2` times the second-order
/// prediction at `y = 1/8`, `x = 1`. Below it `|y| < 1/8` asymptotically.
pub fn legendre_threshold(prec: u32) -> Ball {
    let wp = prec + 16;
    let e = const_e(wp).with_prec(wp);
    let inv = e.recip().expect("e > 0");
    let s = &(&inv.mul_int(&BigInt::from(3)) + &inv.sqr()) - &Ball::one(wp);
    s.div_int(24).expect("nonzero").relabel(prec)
}

/// Record minima of `n^2 eps_n` up to a horizon.
#[derive(Clone, Debug, Serialize)]
pub struct RecordTable {
    pub horizon: u64,
    pub records: Vec<RecordRow>,
    /// `n` with `eps_n = 0`.
    pub exact_hits: Vec<u64>,
    /// Scanned `n` with `n^2 eps_n < tau (1 - 10/n)`.
    pub below_threshold: Vec<ConnectionReport>,
    /// Entries of `below_threshold` whose reduction is not a convergent.
    pub violations: Vec<u64>,
    /// Cursor the scan resumed from, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resumed_from: Option<u64>,
}

/// A record with its convergent connection.
#[derive(Clone, Debug, Serialize)]
pub struct RecordRow {
    #[serde(flatten)]
    pub record: EpsilonRecord,
    #[serde(serialize_with = "ser_bigint")]
    pub reduced_p: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub reduced_q: BigInt,
    pub d: u64,
    pub is_convergent: bool,
}

impl RecordRow {
    pub fn new(record: EpsilonRecord) -> Self {
        let num: BigInt = BigInt::from(record.t) * 2 + 1;
        let den: BigInt = BigInt::from(record.n) * 2 - 1;
        let g = num.gcd(&den);
        let (p, q) = (&num / &g, &den / &g);
        let cap = index_cap(&q);
        RecordRow {
            is_convergent: is_convergent(&p, &q, cap),
            reduced_p: p,
            reduced_q: q,
            d: g.to_u64().expect("divides 2n-1"),
            record,
        }
    }
}

impl RecordTable {
    pub fn last(&self) -> Option<&EpsilonRecord> {
        self.records.last().map(|r| &r.record)
    }

    /// `n^{2+delta} eps_n` for each record.
    pub fn profile(&self, delta: &Rat, prec: u32) -> Result<Vec<(u64, Ball)>> {
        self.records
            .iter()
            .map(|r| {
                let nd = pow_rat(&Rat::from_integer(r.record.n.into()), delta, prec)?;
                Ok((r.record.n, nd.mul_rat(&r.record.scaled)))
            })
            .collect()
    }

    /// Records strictly decrease in `n^2 eps` as `n` increases.
    pub fn is_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[0].record.n < w[1].record.n && w[1].record.scaled < w[0].record.scaled)
    }
}

/// `1 - 10/n` as a rational, the finite-`n` margin on `tau`.
pub(crate) fn threshold_margin(n: u64) -> Rat {
    Rat::one() - Rat::new(BigInt::from(10), BigInt::from(n))
}
