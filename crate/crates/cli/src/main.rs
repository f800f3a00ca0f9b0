//! `sumsq`: exact verification of interval statistics for representations
//! `B = E^2 + gamma*F^2` of monic polynomials over odd finite fields, plus
//! the Hankel-matrix, multiset, and character-sum machinery behind them.
//!
//! Exit codes: 0 when every requested comparison matched, 1 when any
//! comparison mismatched (offending parameters are in the report), 2 for
//! usage or configuration errors.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use report::{
    biguint_str, emit_csv, emit_json, emit_pretty_header, mismatches_first, rational_json, Format,
    RunConfig,
};
use sumsq_core::charsum::{
    pair_contribution, pair_contribution_direct, pair_contribution_formula, AlphaSequence,
};
use sumsq_core::field::{Field, FieldElement};
use sumsq_core::hankel::{reduce_with_certificate, HankelMatrix};
use sumsq_core::multiset::{closed_hankel, quadform_values_hankel, MultisetFq, QuadMode};
use sumsq_core::variance::{mean_closed, variance_brute, variance_closed};
use sumsq_core::verify;

#[derive(Parser)]
#[command(
    name = "sumsq",
    version,
    about = "Exact interval statistics for sums of two squares over F_q[T]",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Variance of interval representation counts: closed formula, brute
    /// force, or both
    Variance(VarianceArgs),
    /// Sweep all (n, m, h, gamma) up to --n-max and compare closed vs brute
    TheoremCheck(TheoremCheckArgs),
    /// Hankel matrix tools
    #[command(subcommand)]
    Hankel(HankelCommand),
    /// Value multiset of the quadratic form of a square Hankel matrix
    Multiset(MultisetArgs),
    /// Census of restricted sequences by the strict rho pair, closed table
    /// vs enumeration
    Ncount(NcountArgs),
    /// Paired character-sum contribution of a coefficient sequence
    Charsum(CharsumArgs),
    /// Run every closed-form-vs-oracle comparison and summarise
    VerifyAll(VerifyAllArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VarianceArgs {
    /// Field spec: `p` or `p^k:c0,c1,...,ck`
    #[arg(long)]
    field: String,
    /// Degree of E (half the target degree)
    #[arg(long)]
    n: usize,
    /// Degree of F
    #[arg(long)]
    m: usize,
    /// Interval radius
    #[arg(long)]
    h: usize,
    /// Nonzero field element (coefficients low-to-high)
    #[arg(long, default_value = "1")]
    gamma: String,
    /// Which side(s) to compute
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Closed,
    Brute,
    Both,
}

#[derive(Args)]
struct TheoremCheckArgs {
    #[arg(long)]
    field: String,
    /// Largest n in the sweep
    #[arg(long, default_value_t = 2)]
    n_max: usize,
    /// Output format (CSV by default for the sweep)
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HankelCommand {
    /// Reduce a square Hankel matrix and print the rendered reduced form,
    /// the block partition, the strict characteristic, and the rank
    Reduce(HankelReduceArgs),
}

#[derive(Args)]
struct HankelReduceArgs {
    #[arg(long)]
    field: String,
    /// Skew-diagonal sequence of odd length 2n-1 (elements separated by
    /// commas; use `;` between elements of extension fields)
    #[arg(long)]
    seq: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MultisetArgs {
    #[arg(long)]
    field: String,
    /// Skew-diagonal sequence of odd length 2n-1
    #[arg(long)]
    seq: String,
    /// Vector range of the quadratic form
    #[arg(long, value_enum, default_value_t = ModeArg::Monic)]
    mode: ModeArg,
    /// What to compare the enumeration against
    #[arg(long, value_enum, default_value_t = CompareArg::Auto)]
    compare: CompareArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum ModeArg {
    Full,
    Monic,
    Last1,
}

impl ModeArg {
    fn to_quad(self) -> QuadMode {
        match self {
            ModeArg::Full => QuadMode::Full,
            ModeArg::Monic => QuadMode::Monic,
            ModeArg::Last1 => QuadMode::LastNonzeroOne,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum CompareArg {
    /// Closed form for the pinned-last range, reduction invariance otherwise
    Auto,
    /// Closed form (pinned-last range only)
    Closed,
    /// Enumeration over the rendered reduced form
    Reduced,
    /// No comparison
    None,
}

#[derive(Args)]
struct NcountArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    h: usize,
    /// Which census route(s) to run
    #[arg(long, value_enum, default_value_t = NcountMode::Both)]
    mode: NcountMode,
    /// Threads for the enumeration scan
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum NcountMode {
    Closed,
    Enumerate,
    Both,
}

#[derive(Args)]
struct CharsumArgs {
    #[arg(long)]
    field: String,
    /// Coefficient sequence of odd length 2n+1
    #[arg(long)]
    seq: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyAllArgs {
    #[arg(long)]
    field: String,
    /// Largest n for the variance / census / square-sum grids
    #[arg(long, default_value_t = 2)]
    n_max: usize,
    /// Threads for the census enumeration
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Config(String),
    Io(std::io::Error),
}

impl From<sumsq_core::Error> for CliError {
    fn from(e: sumsq_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, result) = match &cli.command {
        Command::Variance(args) => (args.output.format, cmd_variance(args)),
        Command::TheoremCheck(args) => (args.format, cmd_theorem_check(args)),
        Command::Hankel(HankelCommand::Reduce(args)) => {
            (args.output.format, cmd_hankel_reduce(args))
        }
        Command::Multiset(args) => (args.output.format, cmd_multiset(args)),
        Command::Ncount(args) => (args.output.format, cmd_ncount(args)),
        Command::Charsum(args) => (args.output.format, cmd_charsum(args)),
        Command::VerifyAll(args) => (args.output.format, cmd_verify_all(args)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            if format == Format::Json {
                eprintln!("{}", json!({ "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            if format == Format::Json {
                eprintln!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("io error: {e}");
            }
            ExitCode::from(2)
        }
    }
}

fn write_report(
    out_path: &Option<PathBuf>,
    emit: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match out_path {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            emit(&mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(&mut lock)?;
        }
    }
    Ok(())
}

fn parse_field(spec: &str) -> Result<Field, CliError> {
    Ok(Field::parse_spec(spec)?)
}

/// Parses a sequence of field elements: `;`-separated elements when present,
/// otherwise one element per comma.
fn parse_seq(field: &Field, text: &str) -> Result<Vec<FieldElement>, CliError> {
    let parts: Vec<&str> =
        if text.contains(';') { text.split(';').collect() } else { text.split(',').collect() };
    parts.iter().map(|p| Ok(field.parse_element(p)?)).collect()
}

fn parse_square_seq(field: &Field, text: &str) -> Result<HankelMatrix, CliError> {
    let seq = parse_seq(field, text)?;
    if seq.len() % 2 == 0 {
        return Err(CliError::Config(format!(
            "a square Hankel matrix needs a sequence of odd length, got {}",
            seq.len()
        )));
    }
    Ok(HankelMatrix::square_from_seq(field, seq)?)
}

fn counts_json(ms: &MultisetFq) -> Value {
    json!(ms.counts().iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

#[derive(Serialize)]
struct VariancePayload {
    n: usize,
    m: usize,
    h: usize,
    gamma: String,
    mean: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subcase: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute: Option<Value>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    matched: Option<bool>,
    elapsed_ms: u128,
}

fn cmd_variance(args: &VarianceArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let gamma = field.parse_element(&args.gamma)?;
    if gamma == field.zero() {
        return Err(CliError::Config("gamma must be nonzero".into()));
    }
    let started = Instant::now();
    let closed = match args.method {
        Method::Brute => None,
        _ => Some(variance_closed(&field, args.n, args.m, args.h)?),
    };
    let brute = match args.method {
        Method::Closed => None,
        _ => Some(variance_brute(&field, args.n, args.m, args.h, gamma)?),
    };
    let matched = match (&closed, &brute) {
        (Some((c, _)), Some(b)) => Some(c == b),
        _ => None,
    };
    let elapsed_ms = started.elapsed().as_millis();

    let mut config = RunConfig::new("variance");
    config.set("field", field.spec_string());
    config.set("n", args.n as u64);
    config.set("m", args.m as u64);
    config.set("h", args.h as u64);
    config.set("gamma", field.element_string(gamma));
    config.set("method", format!("{:?}", args.method).to_lowercase());

    let payload = VariancePayload {
        n: args.n,
        m: args.m,
        h: args.h,
        gamma: field.element_string(gamma),
        mean: rational_json(&mean_closed(&field, args.n, args.m, args.h)?),
        case: closed.as_ref().map(|(_, c)| c.case_label.to_string()),
        subcase: closed.as_ref().map(|(_, c)| c.subcase_label.to_string()),
        closed: closed.as_ref().map(|(v, _)| rational_json(v)),
        brute: brute.as_ref().map(rational_json),
        matched,
        elapsed_ms,
    };
    let all_match = matched.unwrap_or(true);
    if !all_match {
        eprintln!(
            "mismatch: field={} n={} m={} h={} gamma={}",
            field.spec_string(),
            args.n,
            args.m,
            args.h,
            field.element_string(gamma)
        );
    }

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => {
            let closed_text =
                closed.as_ref().map(|(v, _)| v.to_string()).unwrap_or_default();
            let brute_text = brute.as_ref().map(|v| v.to_string()).unwrap_or_default();
            let rows = vec![vec![
                payload.n.to_string(),
                payload.m.to_string(),
                payload.h.to_string(),
                payload.gamma.clone(),
                closed_text,
                brute_text,
                payload.matched.map(|m| m.to_string()).unwrap_or_default(),
            ]];
            emit_csv(out, &config, &["n", "m", "h", "gamma", "closed", "brute", "match"], &rows)
        }
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            if let Some((v, case)) = &closed {
                writeln!(out, "closed:  {v}  [{} / {}]", case.case_label, case.subcase_label)?;
            }
            if let Some(v) = &brute {
                writeln!(out, "brute:   {v}")?;
            }
            if let Some(m) = matched {
                writeln!(out, "match:   {m}")?;
            }
            writeln!(out, "elapsed_ms: {elapsed_ms}")
        }
    })?;
    Ok(all_match)
}

fn cmd_theorem_check(args: &TheoremCheckArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let mut rows = verify::theorem_grid(&field, args.n_max)?;
    mismatches_first(&mut rows, |r| r.matched);
    let all_match = rows.iter().all(|r| r.matched);
    if !all_match {
        for row in rows.iter().filter(|r| !r.matched) {
            eprintln!(
                "mismatch: n={} m={} h={} gamma={} closed={} brute={}",
                row.n, row.m, row.h, row.gamma, row.closed, row.brute
            );
        }
    }

    let mut config = RunConfig::new("theorem-check");
    config.set("field", field.spec_string());
    config.set("n-max", args.n_max as u64);

    write_report(&args.out, |out| match args.format {
        Format::Csv => {
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.m.to_string(),
                        r.h.to_string(),
                        r.gamma.clone(),
                        r.case_label.to_string(),
                        r.subcase_label.to_string(),
                        r.closed.to_string(),
                        r.brute.to_string(),
                        r.matched.to_string(),
                    ]
                })
                .collect();
            emit_csv(
                out,
                &config,
                &["n", "m", "h", "gamma", "case", "subcase", "closed", "brute", "match"],
                &csv_rows,
            )
        }
        Format::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "m": r.m,
                        "h": r.h,
                        "gamma": r.gamma,
                        "case": r.case_label,
                        "subcase": r.subcase_label,
                        "closed": rational_json(&r.closed),
                        "brute": rational_json(&r.brute),
                        "match": r.matched,
                    })
                })
                .collect();
            emit_json(out, &config, &json!({ "rows": json_rows, "all_match": all_match }))
        }
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            for r in &rows {
                writeln!(
                    out,
                    "n={} m={} h={} gamma={}  {}  closed={} brute={}  {}",
                    r.n,
                    r.m,
                    r.h,
                    r.gamma,
                    r.subcase_label,
                    r.closed,
                    r.brute,
                    if r.matched { "ok" } else { "MISMATCH" }
                )?;
            }
            writeln!(out, "all_match: {all_match}")
        }
    })?;
    Ok(all_match)
}

fn cmd_hankel_reduce(args: &HankelReduceArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let h = parse_square_seq(&field, &args.seq)?;
    let (form, ops) = reduce_with_certificate(&h);
    let rendered = form.render();
    let certificate_ok = ops.matmul(&h.to_dense()).matmul(&ops.transpose()) == rendered;
    let (rho, pi) = h.strict_rho_pi();
    let p = form.partition();
    let matrix_rows: Vec<Vec<String>> = (0..rendered.rows())
        .map(|i| {
            (0..rendered.cols()).map(|j| field.element_string(rendered.entry(i, j))).collect()
        })
        .collect();

    let mut config = RunConfig::new("hankel reduce");
    config.set("field", field.spec_string());
    config.set("seq", args.seq.clone());

    let payload = json!({
        "n": h.rows(),
        "reduced": matrix_rows,
        "partition": {
            "p1_prime": p.p1_prime,
            "p1_dblprime": p.p1_dblprime,
            "tail": p.tail,
        },
        "rho_s": rho,
        "pi_s": pi,
        "rank": h.rank(),
        "certificate_ok": certificate_ok,
    });

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => Err(std::io::Error::other("hankel reduce has no CSV form")),
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            for row in &matrix_rows {
                writeln!(out, "  [{}]", row.join(" "))?;
            }
            writeln!(
                out,
                "partition: ({}, {}, {:?})  rho_s={rho} pi_s={pi} rank={}",
                p.p1_prime,
                p.p1_dblprime,
                p.tail,
                h.rank()
            )
        }
    })?;
    Ok(certificate_ok)
}

fn cmd_multiset(args: &MultisetArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let h = parse_square_seq(&field, &args.seq)?;
    let mode = args.mode.to_quad();
    let enumerated = quadform_values_hankel(&h, mode);
    let compare = match (args.compare, args.mode) {
        (CompareArg::Auto, ModeArg::Monic) => CompareArg::Closed,
        (CompareArg::Auto, _) => CompareArg::Reduced,
        (CompareArg::Closed, m) if m != ModeArg::Monic => {
            return Err(CliError::Config(
                "the closed form covers the pinned-last (monic) range only".into(),
            ));
        }
        (c, _) => c,
    };
    let reference = match compare {
        CompareArg::Closed => Some(("closed", closed_hankel(&h))),
        CompareArg::Reduced => {
            let rendered = sumsq_core::hankel::reduce(&h).render();
            Some(("reduced", sumsq_core::multiset::quadform_values(&rendered, mode)))
        }
        _ => None,
    };
    let matched = reference.as_ref().map(|(_, r)| *r == enumerated);

    let mut config = RunConfig::new("multiset");
    config.set("field", field.spec_string());
    config.set("seq", args.seq.clone());
    config.set("mode", format!("{:?}", args.mode).to_lowercase());
    config.set("compare", reference.as_ref().map(|(name, _)| *name).unwrap_or("none"));

    let payload = json!({
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "mass": biguint_str(&enumerated.mass()),
        "enumerated": counts_json(&enumerated),
        "reference": reference.as_ref().map(|(_, r)| counts_json(r)),
        "match": matched,
    });
    let all_match = matched.unwrap_or(true);
    if !all_match {
        eprintln!("mismatch: field={} seq={}", field.spec_string(), args.seq);
    }

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => Err(std::io::Error::other("multiset has no CSV form")),
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            writeln!(out, "enumerated: {:?}", enumerated)?;
            if let Some((name, r)) = &reference {
                writeln!(out, "{name}: {:?}", r)?;
                writeln!(out, "match: {}", matched.unwrap())?;
            }
            Ok(())
        }
    })?;
    Ok(all_match)
}

fn cmd_ncount(args: &NcountArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let mut config = RunConfig::new("ncount");
    config.set("field", field.spec_string());
    config.set("n", args.n as u64);
    config.set("m", args.m as u64);
    config.set("h", args.h as u64);
    config.set("mode", format!("{:?}", args.mode).to_lowercase());
    config.set("shards", args.shards as u64);

    let (cells, case, subcase, rejected, all_match) = match args.mode {
        NcountMode::Both => {
            let check = verify::census_check(&field, args.n, args.m, args.h, args.shards)?;
            let cells: Vec<Value> = check
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "rho2": c.rho2,
                        "rho1": c.rho1,
                        "closed": biguint_str(&c.closed),
                        "enumerated": biguint_str(&c.enumerated),
                        "match": c.matched,
                    })
                })
                .collect();
            (
                cells,
                check.case_label,
                check.subcase_label,
                Some(check.rejected.to_string()),
                Some(check.all_match),
            )
        }
        NcountMode::Closed => {
            let census = sumsq_core::charsum::census_closed(&field, args.n, args.m, args.h)?;
            let cells: Vec<Value> = census
                .cells
                .iter()
                .map(|(&(rho2, rho1), count)| {
                    json!({ "rho2": rho2, "rho1": rho1, "closed": biguint_str(count) })
                })
                .collect();
            (cells, census.case_label, census.subcase_label, None, None)
        }
        NcountMode::Enumerate => {
            let census = sumsq_core::charsum::census_enumerate(
                &field, args.n, args.m, args.h, args.shards,
            )?;
            let rejected = census.rejected.as_ref().map(|r| r.to_string());
            let cells: Vec<Value> = census
                .cells
                .iter()
                .map(|(&(rho2, rho1), count)| {
                    json!({ "rho2": rho2, "rho1": rho1, "enumerated": biguint_str(count) })
                })
                .collect();
            (cells, census.case_label, census.subcase_label, rejected, None)
        }
    };
    let ok = all_match.unwrap_or(true);
    if !ok {
        eprintln!(
            "mismatch: field={} n={} m={} h={}",
            field.spec_string(),
            args.n,
            args.m,
            args.h
        );
    }

    let payload = json!({
        "case": case,
        "subcase": subcase,
        "cells": cells,
        "rejected": rejected,
        "all_match": all_match,
    });

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => {
            let rows: Vec<Vec<String>> = payload["cells"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| {
                    vec![
                        c["rho2"].to_string(),
                        c["rho1"].to_string(),
                        c.get("closed").and_then(|v| v.as_str()).unwrap_or("").to_string(),
                        c.get("enumerated").and_then(|v| v.as_str()).unwrap_or("").to_string(),
                        c.get("match").map(|v| v.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            emit_csv(out, &config, &["rho2", "rho1", "closed", "enumerated", "match"], &rows)
        }
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            writeln!(out, "case: {case}  subcase: {subcase}")?;
            for c in payload["cells"].as_array().unwrap() {
                writeln!(out, "  {c}")?;
            }
            if let Some(r) = &rejected {
                writeln!(out, "rejected: {r}")?;
            }
            if let Some(m) = all_match {
                writeln!(out, "all_match: {m}")?;
            }
            Ok(())
        }
    })?;
    Ok(ok)
}

fn cmd_charsum(args: &CharsumArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let entries = parse_seq(&field, &args.seq)?;
    if entries.len() % 2 == 0 {
        return Err(CliError::Config(format!(
            "a paired contribution needs a sequence of odd length 2n+1, got {}",
            entries.len()
        )));
    }
    let alpha = AlphaSequence::new(&field, entries);
    let n = alpha.half_degree();
    let (rho, pi) = alpha.hankel(n + 1).strict_rho_pi();
    let closed = pair_contribution(&alpha);
    let formula = pair_contribution_formula(&alpha);
    let direct = pair_contribution_direct(&alpha);
    let matched = BigInt::from(closed.clone()) == direct && closed == formula;
    if !matched {
        eprintln!("mismatch: field={} seq={}", field.spec_string(), args.seq);
    }

    let mut config = RunConfig::new("charsum");
    config.set("field", field.spec_string());
    config.set("seq", args.seq.clone());

    let payload = json!({
        "n": n,
        "rho_s": rho,
        "pi_s": pi,
        "closed": closed.to_string(),
        "formula": formula.to_string(),
        "direct": direct.to_string(),
        "match": matched,
    });

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => Err(std::io::Error::other("charsum has no CSV form")),
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            writeln!(out, "n={n} rho_s={rho} pi_s={pi}")?;
            writeln!(out, "closed={closed} formula={formula} direct={direct} match={matched}")
        }
    })?;
    Ok(matched)
}

fn cmd_verify_all(args: &VerifyAllArgs) -> Result<bool, CliError> {
    let field = parse_field(&args.field)?;
    let report = verify::verify_all(&field, args.n_max, args.shards)?;
    let all_ok = report.all_ok();

    let mut failures: Vec<String> = Vec::new();
    for r in report.theorem.iter().filter(|r| !r.matched) {
        failures.push(format!("variance n={} m={} h={} gamma={}", r.n, r.m, r.h, r.gamma));
    }
    for c in report.census.iter().filter(|c| !c.all_match) {
        failures.push(format!("census n={} m={} h={}", c.n, c.m, c.h));
    }
    for r in report.square_sum.iter().filter(|r| !r.matched) {
        failures.push(format!("square-sum n={} m={} h={} gamma={}", r.n, r.m, r.h, r.gamma));
    }
    failures.extend(report.pair.failures.iter().cloned());
    failures.extend(report.reduction.failures.iter().cloned());
    failures.extend(report.counting.failures.iter().cloned());
    failures.extend(report.multisets.failures.iter().cloned());
    for s in report.spots.iter().filter(|s| !s.ok) {
        failures.push(format!("spot: {}", s.name));
    }
    if !all_ok {
        for f in failures.iter().take(20) {
            eprintln!("mismatch: {f}");
        }
    }

    let mut config = RunConfig::new("verify-all");
    config.set("field", field.spec_string());
    config.set("n-max", args.n_max as u64);
    config.set("shards", args.shards as u64);

    let spot_json: Vec<Value> =
        report.spots.iter().map(|s| json!({ "name": s.name, "ok": s.ok })).collect();
    let payload = json!({
        "theorem": {
            "rows": report.theorem.len(),
            "mismatches": report.theorem.iter().filter(|r| !r.matched).count(),
        },
        "census": {
            "tables": report.census.len(),
            "mismatches": report.census.iter().filter(|c| !c.all_match).count(),
        },
        "square_sum": {
            "rows": report.square_sum.len(),
            "mismatches": report.square_sum.iter().filter(|r| !r.matched).count(),
        },
        "pair_contributions": {
            "sequences": report.pair.sequences,
            "filtered": report.pair.filtered,
            "failures": report.pair.failures.len(),
        },
        "reduction": {
            "matrices": report.reduction.matrices,
            "failures": report.reduction.failures.len(),
        },
        "counting": {
            "fibers": report.counting.fibers,
            "partitions": report.counting.partitions,
            "failures": report.counting.failures.len(),
        },
        "multisets": {
            "hankel": report.multisets.hankel_checked,
            "triangular": report.multisets.triangular_checked,
            "failures": report.multisets.failures.len(),
        },
        "spot_checks": spot_json,
        "failures": failures,
        "all_ok": all_ok,
    });

    write_report(&args.output.out, |out| match args.output.format {
        Format::Json => emit_json(out, &config, &payload),
        Format::Csv => Err(std::io::Error::other("verify-all has no CSV form")),
        Format::Pretty => {
            emit_pretty_header(out, &config)?;
            let line = |out: &mut dyn Write, name: &str, ok: bool, detail: String| {
                writeln!(out, "{}  {name} ({detail})", if ok { "PASS" } else { "FAIL" })
            };
            line(
                out,
                "variance closed = brute",
                report.theorem.iter().all(|r| r.matched),
                format!("{} rows", report.theorem.len()),
            )?;
            line(
                out,
                "census closed = enumerated",
                report.census.iter().all(|c| c.all_match),
                format!("{} tables", report.census.len()),
            )?;
            line(
                out,
                "square sum via characters = brute",
                report.square_sum.iter().all(|r| r.matched),
                format!("{} rows", report.square_sum.len()),
            )?;
            line(
                out,
                "paired contributions closed = direct",
                report.pair.ok(),
                format!("{} sequences", report.pair.sequences),
            )?;
            line(
                out,
                "reduction certificates + invariance",
                report.reduction.ok(),
                format!("{} matrices", report.reduction.matrices),
            )?;
            line(
                out,
                "counting lemmas",
                report.counting.ok(),
                format!("{} fibers", report.counting.fibers),
            )?;
            line(
                out,
                "multiset closed forms",
                report.multisets.ok(),
                format!("{} matrices", report.multisets.hankel_checked),
            )?;
            for s in &report.spots {
                line(out, &s.name, s.ok, s.detail.clone())?;
            }
            writeln!(out, "all_ok: {all_ok}")
        }
    })?;
    Ok(all_ok)
}
