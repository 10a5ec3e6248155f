//! The `mixture` subcommand.

use std::path::Path;

use anyhow::{bail, Context};
use clap::Args;
use num_rational::BigRational;
use serde::Serialize;

use ranksum::numfmt::{format_doubled, format_rational, parse_rational, rational_to_f64};
use ranksum::{mix_streaming, symbolic_mix, PatternWeights, DEFAULT_PATTERN_CAP};

use crate::check_cap;

/// Label limit when `--force` is given.
const FORCED_CAP: usize = 64;

#[derive(Args)]
pub struct MixtureArgs {
    /// Total number of observations.
    #[arg(long = "N", id = "N")]
    n: usize,
    #[arg(long)]
    n1: usize,
    /// `uniform`, `one-hot:K`, `one-hot(K)`, or a JSON file holding an array
    /// of rational strings indexed by pattern label.
    #[arg(long, default_value = "uniform")]
    weights: String,
    /// Print each probability as a linear form in the pattern weights.
    #[arg(long)]
    symbolic: bool,
    #[arg(long)]
    json: bool,
    /// Raise the pattern cap from 24 to 64.
    #[arg(long)]
    force: bool,
}

#[derive(Serialize)]
struct MixRow {
    w: String,
    probability: String,
    probability_float: f64,
}

#[derive(Serialize)]
struct SymbolicRow {
    w: String,
    form: String,
    coefficients: Vec<(u64, String)>,
}

fn parse_weights(choice: &str, n: usize) -> anyhow::Result<PatternWeights> {
    if choice == "uniform" {
        return Ok(PatternWeights::uniform(n)?);
    }
    let label = choice.strip_prefix("one-hot:").or_else(|| {
        choice.strip_prefix("one-hot(")
            .and_then(|s| s.strip_suffix(')'))
    });
    if let Some(label) = label {
        let k: u64 = label
            .trim()
            .parse()
            .with_context(|| format!("bad pattern label in {choice:?}"))?;
        return Ok(PatternWeights::one_hot(n, k)?);
    }
    let path = Path::new(choice);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read weights file {}", path.display()))?;
    let raw: Vec<serde_json::Value> = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a JSON array", path.display()))?;
    let weights = raw
        .iter()
        .enumerate()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => Ok(parse_rational(s)?),
            serde_json::Value::Number(x) => Ok(parse_rational(&x.to_string())?),
            other => bail!("weight {k} must be a rational string, got {other}"),
        })
        .collect::<anyhow::Result<Vec<BigRational>>>()?;
    Ok(PatternWeights::new(n, weights)?)
}

pub fn run(args: MixtureArgs) -> anyhow::Result<()> {
    let cap = if args.force {
        FORCED_CAP
    } else {
        DEFAULT_PATTERN_CAP
    };
    check_cap(args.n, cap, false)?;
    if args.n < 2 || args.n1 == 0 || args.n1 >= args.n {
        bail!(
            "need N >= 2 and 1 <= n1 <= N - 1, got N = {}, n1 = {}",
            args.n,
            args.n1
        );
    }
    let mut out = std::io::stdout().lock();
    if args.symbolic {
        let rows: Vec<SymbolicRow> = symbolic_mix(args.n, args.n1, cap)?
            .into_iter()
            .map(|(w, form)| SymbolicRow {
                w: format_doubled(w as i64),
                form: form.to_string(),
                coefficients: form.terms().map(|(k, c)| (k, format_rational(c))).collect(),
            })
            .collect();
        if args.json {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            println!();
        } else {
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(["w", "probability"])?;
            for row in &rows {
                writer.write_record([&row.w, &row.form])?;
            }
            writer.flush()?;
        }
        return Ok(());
    }

    let weights = parse_weights(&args.weights, args.n)?;
    let mixed = mix_streaming(args.n, args.n1, &weights, cap)?;
    let rows: Vec<MixRow> = mixed
        .iter()
        .map(|(w, p)| MixRow {
            w: format_doubled(w as i64),
            probability: format_rational(p),
            probability_float: rational_to_f64(p),
        })
        .collect();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &rows)?;
        println!();
    } else {
        let mut writer = csv::Writer::from_writer(out);
        for row in &rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
    }
    Ok(())
}
