//! Block-parallel scan of `t(n)` and `eps_n`.
//!
//! Each block walks `n` upward keeping `sum_{k=n}^{t} 1/k` between two
//! fixed-point accumulators (terms rounded down and up). Record candidates are
//! screened in `f64` with conservative slack and confirmed with exact rationals.

use std::cmp::Ordering;
use std::path::PathBuf;

use num_traits::{One, Zero};

use super::checkpoint::{Checkpoint, FORMAT_VERSION};
use super::{convergent_connection, legendre_threshold, threshold_margin, RecordRow, RecordTable};
use crate::error::{Error, Result};
use crate::harmonic::{hdiff_exact, EpsilonRecord};
use crate::{par, Rat};

/// Fractional bits of the accumulators.
const FRAC: u32 = 125;
const ONE: u128 = 1 << FRAC;
/// Relative slack applied to each `f64` rounding step.
const SLACK: f64 = 1.0 / (1u64 << 48) as f64;

/// Precision of the `y` balls in threshold reports.
const REPORT_PREC: u32 = 64;

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub n_max: u64,
    pub checkpoint: Option<PathBuf>,
    /// Stop (after checkpointing) once this `n` has been scanned.
    pub stop_after: Option<u64>,
    /// Values of `n` per parallel block.
    pub block: u64,
    /// Blocks per checkpoint interval.
    pub wave: u64,
}

impl ScanOptions {
    pub fn new(n_max: u64) -> Self {
        ScanOptions {
            n_max,
            checkpoint: None,
            stop_after: None,
            block: 4096,
            wave: 64,
        }
    }
}

/// Record table for `2 <= n <= n_max`.
pub fn scan_records(n_max: u64, checkpoint: Option<PathBuf>) -> Result<RecordTable> {
    let mut opts = ScanOptions::new(n_max);
    opts.checkpoint = checkpoint;
    scan_with(&opts)
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    n: u64,
    t: u64,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Default)]
struct BlockOut {
    candidates: Vec<Candidate>,
    below: Vec<(u64, u64)>,
    hits: Vec<u64>,
    last: (u64, u64),
}

fn term_down(k: u64) -> u128 {
    ONE / k as u128
}

fn term_up(k: u64) -> u128 {
    ONE.div_ceil(k as u128)
}

fn fixed_to_f64(x: u128) -> f64 {
    x as f64 / ONE as f64
}

/// Walks `n` over `[lo, hi]`, returning screened candidates.
fn scan_block(lo: u64, hi: u64, tau_hi: f64) -> Result<BlockOut> {
    let mut out = BlockOut::default();
    let (mut down, mut up) = (0u128, 0u128);
    let mut t = lo - 1;
    let mut best_hi = f64::INFINITY;
    for n in lo..=hi {
        if n > lo {
            down -= term_up(n - 1);
            up -= term_down(n - 1);
        }
        let mut exact_eps: Option<Rat> = None;
        loop {
            if t >= n && down >= ONE {
                break;
            }
            if t >= n && up >= ONE {
                let s = hdiff_exact(n, t)?;
                if s >= Rat::one() {
                    exact_eps = Some(s - Rat::one());
                    break;
                }
            }
            t += 1;
            down += term_down(t);
            up += term_up(t);
        }
        let n2 = (n as f64) * (n as f64);
        let (lo_f, hi_f) = match &exact_eps {
            Some(e) if e.is_zero() => {
                out.hits.push(n);
                (0.0, 0.0)
            }
            _ => {
                let e_lo = fixed_to_f64(down.max(ONE) - ONE) * n2 * (1.0 - SLACK).powi(3);
                let e_hi = fixed_to_f64(up - ONE) * n2 * (1.0 + SLACK).powi(3);
                (e_lo, e_hi)
            }
        };
        if lo_f < best_hi {
            out.candidates.push(Candidate { n, t, lo: lo_f, hi: hi_f });
            best_hi = best_hi.min(hi_f);
        }
        let margin = 1.0 - 10.0 / n as f64;
        if lo_f < tau_hi * margin.max(0.0) * (1.0 + SLACK) {
            out.below.push((n, t));
        }
        out.last = (n, t);
    }
    Ok(out)
}

/// Scan state carried between waves.
struct State {
    records: Vec<EpsilonRecord>,
    below: Vec<(u64, u64)>,
    hits: Vec<u64>,
    cursor: (u64, u64),
}

impl State {
    fn best_hi(&self) -> f64 {
        self.records
            .last()
            .map(|r| num_traits::ToPrimitive::to_f64(&r.scaled).unwrap_or(f64::INFINITY) * (1.0 + SLACK))
            .unwrap_or(f64::INFINITY)
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: FORMAT_VERSION,
            cursor: self.cursor,
            records: self.records.iter().map(|r| (r.n, r.t)).collect(),
            below: self.below.clone(),
            hits: self.hits.clone(),
        }
    }

    /// Folds blocks in order, confirming surviving candidates exactly.
    fn absorb(&mut self, blocks: Vec<BlockOut>, tau: &crate::Ball) -> Result<()> {
        let mut best_hi = self.best_hi();
        for b in blocks {
            for c in b.candidates {
                if c.lo >= best_hi {
                    continue;
                }
                best_hi = best_hi.min(c.hi);
                let eps = hdiff_exact(c.n, c.t)? - Rat::one();
                debug_assert!(eps >= Rat::zero());
                let rec = EpsilonRecord::from_exact(c.n, c.t, eps);
                let improves = self.records.last().is_none_or(|r| rec.scaled < r.scaled);
                if improves {
                    self.records.push(rec);
                }
            }
            for (n, t) in b.below {
                let eps = hdiff_exact(n, t)? - Rat::one();
                let scaled = eps * Rat::from_integer((n as u128 * n as u128).into());
                let bound = tau.mul_rat(&threshold_margin(n));
                // undecided comparisons are kept
                if matches!(bound.cmp_rat(&scaled), Some(Ordering::Greater) | None) {
                    self.below.push((n, t));
                }
            }
            self.hits.extend(b.hits);
            self.cursor = b.last;
        }
        Ok(())
    }
}

fn finish(state: State, horizon: u64, resumed_from: Option<u64>) -> Result<RecordTable> {
    let mut below = Vec::with_capacity(state.below.len());
    let mut violations = Vec::new();
    for &(n, t) in &state.below {
        let c = convergent_connection(n, t, None, REPORT_PREC)?;
        if !c.is_convergent {
            violations.push(n);
        }
        below.push(c);
    }
    Ok(RecordTable {
        horizon,
        records: state.records.into_iter().map(RecordRow::new).collect(),
        exact_hits: state.hits,
        below_threshold: below,
        violations,
        resumed_from,
    })
}

/// Scan with explicit options.
pub fn scan_with(opts: &ScanOptions) -> Result<RecordTable> {
    if opts.n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {}", opts.n_max)));
    }
    if opts.block == 0 || opts.wave == 0 {
        return Err(Error::InvalidArgument("block and wave must be positive".into()));
    }
    let tau = legendre_threshold(REPORT_PREC);
    let tau_hi = tau.hi().to_f64();
    let mut state = State {
        records: Vec::new(),
        below: Vec::new(),
        hits: Vec::new(),
        cursor: (1, 1),
    };
    let mut resumed_from = None;
    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = Checkpoint::load(path)? {
            if cp.cursor.0 > opts.n_max {
                return Err(Error::InvalidArgument(format!(
                    "checkpoint cursor {} is beyond n_max {}",
                    cp.cursor.0, opts.n_max
                )));
            }
            state.records = cp.exact_records()?;
            state.below = cp.below.clone();
            state.hits = cp.hits.clone();
            state.cursor = cp.cursor;
            resumed_from = Some(cp.cursor.0);
        }
    }
    let stop = opts.stop_after.unwrap_or(opts.n_max).min(opts.n_max);
    while state.cursor.0 < stop {
        let start = state.cursor.0 + 1;
        let end = stop.min(start.saturating_add(opts.block * opts.wave) - 1);
        let starts: Vec<u64> = (start..=end).step_by(opts.block as usize).collect();
        let blocks = par::map(&starts, |&lo| scan_block(lo, end.min(lo + opts.block - 1), tau_hi));
        let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
        state.absorb(blocks, &tau)?;
        if let Some(path) = &opts.checkpoint {
            state.checkpoint().save(path)?;
        }
    }
    finish(state, stop, resumed_from)
}
