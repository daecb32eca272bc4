use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use harmonic_gap::construct::{self, Center};
use harmonic_gap::contfrac;
use harmonic_gap::counting::{self, Congruence, CountParams};
use harmonic_gap::exactnum::{parse_rat, Constants, MIN_PREC};
use harmonic_gap::oracle::{self, output, ScanOptions};
use harmonic_gap::{par, Ball, Error, Rat};

#[derive(Debug, Parser)]
#[command(name = "hgap", version, about = "Harmonic sums close to 1: construction, certification and search")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "HGAP_PREC", default_value_t = 128)]
    prec: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convergents of e, or the subsequence p_{3k+2}/q_{3k+2}.
    Convergents(ConvergentsArgs),
    /// Build and certify the pair for subsequence index k.
    Construct(ConstructArgs),
    /// Record minima of n^2 eps_n.
    Scan(ScanArgs),
    /// Count n with ||p n^2/q - r|| < delta.
    Count(CountArgs),
    /// Approximations |alpha - m/n^2| < n^-s with congruence constraints.
    Approx(ApproxArgs),
    /// Randomized Erdős–Turán checks.
    Et(EtArgs),
}

#[derive(Debug, Args)]
struct ConvergentsArgs {
    #[arg(long, conflicts_with = "subseq")]
    count: Option<usize>,
    #[arg(long, requires = "k_max")]
    subseq: bool,
    #[arg(long)]
    k_max: Option<u64>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    k: u64,
    /// Odd multiplier (default: 2 floor(d*/2) + 3).
    #[arg(long, conflicts_with = "window")]
    d: Option<u64>,
    /// Search all odd d within this distance of the center, for every even k' <= k.
    #[arg(long)]
    window: Option<u64>,
    #[arg(long, value_enum, default_value_t = CenterArg::DStar)]
    center: CenterArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CenterArg {
    DStar,
    DStarPlus2,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    n_max: u64,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: i64,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value = "0")]
    r: String,
    #[arg(long)]
    delta: String,
    #[arg(long)]
    n_max: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a: i64,
    #[arg(long, default_value_t = 1)]
    b: u64,
    #[arg(long, default_value = "1/10")]
    eta: String,
    #[arg(long, default_value_t = 10)]
    multiplier: u64,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    /// `3-over-sinh1` or a rational such as `7/3`.
    #[arg(long, default_value = "3-over-sinh1")]
    alpha: String,
    #[arg(long, default_value = "9/4")]
    exponent: String,
    #[arg(long)]
    n_max: u64,
    /// Residue class `a,b` for n.
    #[arg(long)]
    n_mod: Option<String>,
    /// Residue class `a,b` for m.
    #[arg(long)]
    m_mod: Option<String>,
}

#[derive(Debug, Args)]
struct EtArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

/// Exit codes: 2 usage, 3 undecidable, 4 I/O.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Undecidable { .. } => 3,
        Error::Io(_) | Error::CorruptCheckpoint { .. } | Error::Json(_) | Error::Csv(_) => 4,
        _ => 2,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn congruence(s: &Option<String>) -> Result<Congruence, Error> {
    let Some(s) = s else {
        return Ok(Congruence::ANY);
    };
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("expected a,b but got {s:?}")))?;
    let a: i64 = a.trim().parse().map_err(|_| usage(format!("bad residue {a:?}")))?;
    let b: u64 = b.trim().parse().map_err(|_| usage(format!("bad modulus {b:?}")))?;
    Congruence::new(a, b)
}

fn bounds(b: &Ball) -> (String, String) {
    b.to_decimal_bounds(output::BALL_DIGITS)
}

fn opt_flag(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "true",
        Some(false) => "false",
        None => "undecided",
    }
}

fn to_json(x: &impl Serialize) -> Result<Vec<u8>, Error> {
    let mut v = serde_json::to_vec_pretty(x)?;
    v.push(b'\n');
    Ok(v)
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct SubseqRow {
    k: u64,
    p: String,
    q: String,
    r_lo: String,
    r_hi: String,
    sign: i8,
    both_odd: bool,
    lower: bool,
    upper: bool,
}

fn convergents(args: &ConvergentsArgs, cli: &Cli) -> Result<Vec<u8>, Error> {
    if args.subseq {
        let k_max = args.k_max.expect("required by clap");
        let ks: Vec<u64> = (0..=k_max).collect();
        let rows = par::map(&ks, |&k| -> Result<SubseqRow, Error> {
            let e = contfrac::subseq_entry(k, cli.prec)?;
            let c = e.check().ok_or_else(|| Error::Undecidable {
                what: format!("lemma bounds at k={k}"),
                prec: cli.prec,
            })?;
            let (r_lo, r_hi) = bounds(&e.r);
            Ok(SubseqRow {
                k,
                p: e.p.to_string(),
                q: e.q.to_string(),
                r_lo,
                r_hi,
                sign: e.sign,
                both_odd: c.both_odd,
                lower: c.lower,
                upper: c.upper,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        return Ok(match cli.format {
            Format::Json => to_json(&rows)?,
            Format::Csv => csv_rows(
                &["k", "p", "q", "r_lo", "r_hi", "sign", "both_odd", "lower", "upper"],
                rows.iter().map(|r| {
                    vec![
                        r.k.to_string(),
                        r.p.clone(),
                        r.q.clone(),
                        r.r_lo.clone(),
                        r.r_hi.clone(),
                        r.sign.to_string(),
                        r.both_odd.to_string(),
                        r.lower.to_string(),
                        r.upper.to_string(),
                    ]
                }),
            ),
            Format::Table => {
                let mut s = String::new();
                for r in &rows {
                    s.push_str(&format!(
                        "k={:<4} {}/{}  r in [{}, {}]  sign {:+}  odd {}  bounds {}\n",
                        r.k,
                        r.p,
                        r.q,
                        r.r_lo,
                        r.r_hi,
                        r.sign,
                        r.both_odd,
                        r.lower && r.upper
                    ));
                }
                s.into_bytes()
            }
        });
    }
    let count = args
        .count
        .ok_or_else(|| usage("give --count K or --subseq --k-max K"))?;
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let cs = contfrac::e_convergents(count);
    Ok(match cli.format {
        Format::Json => to_json(&cs)?,
        Format::Csv => csv_rows(
            &["i", "a", "p", "q"],
            cs.iter()
                .map(|c| vec![c.i.to_string(), c.a.to_string(), c.p.to_string(), c.q.to_string()]),
        ),
        Format::Table => cs
            .iter()
            .map(|c| format!("{:>4} {:>4} {}/{}\n", c.i, c.a, c.p, c.q))
            .collect::<String>()
            .into_bytes(),
    })
}

fn pair_row(p: &construct::CandidatePair) -> Vec<String> {
    let (e_lo, e_hi) = bounds(&p.eps);
    let (q_lo, q_hi) = bounds(&p.quality);
    let (s_lo, s_hi) = bounds(&p.scaled_quality);
    vec![
        p.k.to_string(),
        p.d.to_string(),
        p.m.to_string(),
        p.n.to_string(),
        e_lo,
        e_hi,
        q_lo,
        q_hi,
        s_lo,
        s_hi,
        opt_flag(p.eps_positive).into(),
        opt_flag(p.within_bound).into(),
    ]
}

const PAIR_HEADER: [&str; 12] = [
    "k",
    "d",
    "m",
    "n",
    "eps_lo",
    "eps_hi",
    "quality_lo",
    "quality_hi",
    "scaled_lo",
    "scaled_hi",
    "eps_positive",
    "within_bound",
];

fn pair_text(p: &construct::CandidatePair) -> String {
    let (e_lo, e_hi) = bounds(&p.eps);
    let (q_lo, q_hi) = bounds(&p.quality);
    format!(
        "k={} d={} m={} n={}\n  eps      in [{e_lo}, {e_hi}]\n  n^2 eps  in [{q_lo}, {q_hi}]\n  eps > 0: {}  within bound: {}{}\n",
        p.k,
        p.d,
        p.m,
        p.n,
        opt_flag(p.eps_positive),
        opt_flag(p.within_bound),
        if p.claimed { "" } else { " (not claimed)" }
    )
}

fn construct(args: &ConstructArgs, cli: &Cli) -> Result<Vec<u8>, Error> {
    if let Some(w) = args.window {
        let center = match args.center {
            CenterArg::DStar => Center::DStar,
            CenterArg::DStarPlus2 => Center::DStarPlus2,
        };
        let js = construct::joint_search(args.k, w, cli.prec, center)?;
        return Ok(match cli.format {
            Format::Json => to_json(&js)?,
            Format::Csv => csv_rows(&PAIR_HEADER, js.pairs.iter().map(pair_row)),
            Format::Table => {
                let mut s: String = js.pairs.iter().map(pair_text).collect();
                s.push_str(&format!("skipped {}\n", js.skipped.len()));
                s.into_bytes()
            }
        });
    }
    if args.k % 2 == 1 {
        return Err(Error::Parity(format!("k must be even, got {}", args.k)));
    }
    let d = match args.d {
        Some(d) => d,
        None => construct::choose_d(args.k)?,
    };
    let p = construct::certify(args.k, d, cli.prec)?;
    Ok(match cli.format {
        Format::Json => to_json(&p)?,
        Format::Csv => csv_rows(&PAIR_HEADER, [pair_row(&p)]),
        Format::Table => pair_text(&p).into_bytes(),
    })
}

fn scan(args: &ScanArgs, cli: &Cli) -> Result<Vec<u8>, Error> {
    let mut opts = ScanOptions::new(args.n_max);
    opts.checkpoint = args.checkpoint.clone();
    let start = Instant::now();
    let table = oracle::scan_with(&opts)?;
    let wall = start.elapsed().as_millis();
    let mut out = Vec::new();
    match cli.format {
        Format::Json => output::write_records_json(&table, wall, &mut out)?,
        Format::Csv => output::write_records_csv(&table, &mut out)?,
        Format::Table => output::write_records_table(&table, &mut out)?,
    }
    Ok(out)
}

fn count(args: &CountArgs, cli: &Cli) -> Result<Vec<u8>, Error> {
    let mut cp = CountParams::new(
        args.p,
        args.q,
        parse_rat(&args.r)?,
        parse_rat(&args.delta)?,
        args.n_max,
        args.a,
        args.b,
    );
    cp.eta = parse_rat(&args.eta)?;
    cp.multiplier = args.multiplier;
    let r = counting::count_quadratic(&cp, cli.prec)?;
    let (e_lo, e_hi) = bounds(&r.error_bound);
    Ok(match cli.format {
        Format::Json => to_json(&r)?,
        Format::Csv => csv_rows(
            &["count", "ties", "count_direct", "main_term", "error_lo", "error_hi", "multiplier", "within"],
            [vec![
                r.count.to_string(),
                r.ties.to_string(),
                r.count_direct.to_string(),
                r.main_term.to_string(),
                e_lo,
                e_hi,
                r.multiplier.to_string(),
                opt_flag(r.within).into(),
            ]],
        ),
        Format::Table => format!(
            "count={} (ties {}, direct path {})\nmain term {}\nerror expression in [{e_lo}, {e_hi}]\n|count - main| <= {} x error: {}\n",
            r.count,
            r.ties,
            r.count_direct,
            r.main_term,
            r.multiplier,
            opt_flag(r.within)
        )
        .into_bytes(),
    })
}

fn alpha(name: &str, prec: u32) -> Result<Ball, Error> {
    match name {
        "3-over-sinh1" => Ok(Constants::new(prec).alpha),
        other => {
            let r: Rat = parse_rat(other)?;
            Ok(Ball::from_rat(&r, prec))
        }
    }
}

#[derive(Serialize)]
struct ApproxReport {
    pairs: Vec<counting::ApproxPair>,
    skipped: Vec<u64>,
    /// Pairs whose acceptance repeats at doubled precision.
    reverified: usize,
}

fn approx(args: &ApproxArgs, cli: &Cli) -> Result<Vec<u8>, Error> {
    let exponent = parse_rat(&args.exponent)?;
    let a = alpha(&args.alpha, cli.prec)?;
    let nc = congruence(&args.n_mod)?;
    let mc = congruence(&args.m_mod)?;
    let found = counting::search_m_over_nsq(&a, &exponent, args.n_max, nc, mc, cli.prec)?;
    let a2 = alpha(&args.alpha, 2 * cli.prec)?;
    let mut reverified = 0;
    for p in &found.pairs {
        if let Some((true, _)) = counting::check_pair(&a2, &exponent, &p.m, p.n, 2 * cli.prec)? {
            reverified += 1;
        }
    }
    let report = ApproxReport {
        pairs: found.pairs,
        skipped: found.skipped,
        reverified,
    };
    Ok(match cli.format {
        Format::Json => to_json(&report)?,
        Format::Csv => csv_rows(
            &["m", "n", "error_lo", "error_hi"],
            report.pairs.iter().map(|p| {
                let (lo, hi) = bounds(&p.error);
                vec![p.m.to_string(), p.n.to_string(), lo, hi]
            }),
        ),
        Format::Table => {
            let mut s: String = report
                .pairs
                .iter()
                .map(|p| {
                    let (_, hi) = bounds(&p.error);
                    format!("(m, n) = ({}, {})  |alpha - m/n^2| <= {hi}\n", p.m, p.n)
                })
                .collect();
            s.push_str(&format!(
                "{} pairs, {} reverified at {} bits, {} skipped\n",
                report.pairs.len(),
                report.reverified,
                2 * cli.prec,
                report.skipped.len()
            ));
            s.into_bytes()
        }
    })
}

fn et(args: &EtArgs, cli: &Cli) -> Result<(Vec<u8>, bool), Error> {
    let reports = counting::et_random_trials(args.seed, args.trials, cli.prec.min(96))?;
    let held = reports.iter().filter(|r| r.holds).count();
    let all = held == reports.len();
    let out = match cli.format {
        Format::Json => to_json(&reports)?,
        Format::Csv => csv_rows(
            &["trial", "n_points", "l", "count", "lhs", "rhs_lo", "rhs_hi", "holds"],
            reports.iter().enumerate().map(|(i, r)| {
                let (lo, hi) = bounds(&r.rhs);
                vec![
                    i.to_string(),
                    r.n_points.to_string(),
                    r.l.to_string(),
                    r.count.to_string(),
                    r.lhs.to_string(),
                    lo,
                    hi,
                    r.holds.to_string(),
                ]
            }),
        ),
        Format::Table => format!("{held}/{} hold\n", reports.len()).into_bytes(),
    };
    Ok((out, all))
}

fn run(cli: &Cli) -> Result<(Vec<u8>, bool), Error> {
    if cli.prec < MIN_PREC {
        return Err(usage(format!("--prec must be at least {MIN_PREC}")));
    }
    if cli.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    let ok = |v: Vec<u8>| (v, true);
    match &cli.command {
        Command::Convergents(a) => convergents(a, cli).map(ok),
        Command::Construct(a) => construct(a, cli).map(ok),
        Command::Scan(a) => scan(a, cli).map(ok),
        Command::Count(a) => count(a, cli).map(ok),
        Command::Approx(a) => approx(a, cli).map(ok),
        Command::Et(a) => et(a, cli),
    }
}

fn emit(bytes: &[u8], path: &Option<PathBuf>) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = par::with_threads(cli.threads, || run(&cli));
    match result {
        Ok((bytes, all_ok)) => {
            if let Err(e) = emit(&bytes, &cli.output) {
                eprintln!("hgap: {e}");
                return ExitCode::from(4);
            }
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("hgap: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
