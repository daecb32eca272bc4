//! Serialization helpers and record-table writers.

use std::io::Write;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use super::RecordTable;
use crate::error::Result;

/// Significant digits printed for ball bounds.
pub const BALL_DIGITS: usize = 12;

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "t",
    "eps_num",
    "eps_den",
    "scaled_num",
    "scaled_den",
    "reduced_p",
    "reduced_q",
    "d",
    "is_convergent",
];

/// Serializes a big integer as a decimal string.
pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Serializes a rational as `"p/q"`.
pub fn ser_rat<S: Serializer>(x: &crate::Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Serializes a ball as its outward-rounded decimal bounds.
pub fn ser_ball<S: Serializer>(x: &crate::Ball, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let (lo, hi) = x.to_decimal_bounds(BALL_DIGITS);
    let mut st = s.serialize_struct("Ball", 2)?;
    st.serialize_field("lo", &lo)?;
    st.serialize_field("hi", &hi)?;
    st.end()
}

fn row(r: &super::RecordRow) -> [String; 10] {
    let e = &r.record;
    [
        e.n.to_string(),
        e.t.to_string(),
        e.eps.numer().to_string(),
        e.eps.denom().to_string(),
        e.scaled.numer().to_string(),
        e.scaled.denom().to_string(),
        r.reduced_p.to_string(),
        r.reduced_q.to_string(),
        r.d.to_string(),
        r.is_convergent.to_string(),
    ]
}

pub fn write_records_csv(table: &RecordTable, w: impl Write) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in &table.records {
        out.write_record(row(r))?;
    }
    out.flush()?;
    Ok(())
}

/// Plain-text table; `n^2 eps` is shown as a rational and a 6-digit decimal.
pub fn write_records_table(table: &RecordTable, mut w: impl Write) -> Result<()> {
    writeln!(w, "{:>10} {:>10} {:>14} {:>10} {:>3} conv", "n", "t", "n^2 eps", "reduced", "d")?;
    for r in &table.records {
        let e = &r.record;
        let approx = crate::Ball::from_rat(&e.scaled, 64).to_decimal_bounds(6).0;
        writeln!(
            w,
            "{:>10} {:>10} {:>14} {:>10} {:>3} {}",
            e.n,
            e.t,
            approx,
            format!("{}/{}", r.reduced_p, r.reduced_q),
            r.d,
            if r.is_convergent { "yes" } else { "no" }
        )?;
    }
    writeln!(
        w,
        "horizon {}  exact hits {}  below threshold {}  violations {}",
        table.horizon,
        table.exact_hits.len(),
        table.below_threshold.len(),
        table.violations.len()
    )?;
    Ok(())
}

#[derive(Serialize)]
struct JsonTable<'a> {
    version: &'a str,
    wall_time_ms: u128,
    #[serde(flatten)]
    table: &'a RecordTable,
}

/// JSON with scan metadata.
pub fn write_records_json(table: &RecordTable, wall_time_ms: u128, mut w: impl Write) -> Result<()> {
    let doc = JsonTable {
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms,
        table,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(())
}
