use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ranksum::cache::{CacheKey, DiskCache};
use ranksum::{
    coalesce_within, dist_from_ranks, dist_from_table, dist_no_ties, euler_expand, midranks,
    moments_closed_form, moments_no_ties, p_value, pattern_to_ranks, ranks_to_pattern, u_from_w,
    Alternative, ExactDist, RankMultiset, TiePattern, TwoSidedMode,
};

mod input;
mod mixture;
mod report;

use report::{PmfReport, TestReport};

/// Largest N handled by `test` and `pmf` without `--force`.
const N_CAP: usize = 400;

#[derive(Parser)]
#[command(
    name = "ranksum",
    version,
    about = "Exact Wilcoxon rank-sum tests, with or without ties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a two-sample rank-sum test on a CSV file.
    Test(TestArgs),
    /// Print the exact null distribution of W.
    Pmf(PmfArgs),
    /// Mix the conditional distributions over every tie pattern.
    Mixture(mixture::MixtureArgs),
}

#[derive(Args)]
struct TestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    group_col: String,
    #[arg(long)]
    value_col: String,
    #[arg(long, value_enum, default_value_t = AltArg::TwoSided)]
    alternative: AltArg,
    #[arg(long, value_enum, default_value_t = ModeArg::TwiceMin)]
    two_sided_mode: ModeArg,
    /// Treat values within this distance of their sorted predecessor as tied.
    #[arg(long)]
    tie_epsilon: Option<f64>,
    /// Label of sample 1 (default: the lexicographically smaller label).
    #[arg(long)]
    group1: Option<String>,
    #[arg(long)]
    json: bool,
    /// Lift the sample size cap.
    #[arg(long)]
    force: bool,
    /// Directory for cached coefficient tables.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct PmfArgs {
    /// Size of sample 1.
    #[arg(long)]
    n1: usize,
    /// Size of sample 2, for data without ties.
    #[arg(long, conflicts_with_all = ["ranks", "pattern"], required_unless_present_any = ["ranks", "pattern"])]
    n2: Option<usize>,
    /// Comma-separated midranks of the pooled sample, e.g. "1,2.5,2.5,4,5".
    #[arg(long, conflicts_with = "pattern")]
    ranks: Option<String>,
    /// Tie pattern bits; 1 separates neighbouring order statistics.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    Less,
    Greater,
    TwoSided,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    TwiceMin,
    Minlike,
}

impl From<AltArg> for Alternative {
    fn from(a: AltArg) -> Self {
        match a {
            AltArg::Less => Alternative::Less,
            AltArg::Greater => Alternative::Greater,
            AltArg::TwoSided => Alternative::TwoSided,
        }
    }
}

impl From<ModeArg> for TwoSidedMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::TwiceMin => TwoSidedMode::TwiceMin,
            ModeArg::Minlike => TwoSidedMode::MinLike,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Pmf(args) => cmd_pmf(args),
        Command::Mixture(args) => mixture::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_cap_error(&err) {
                eprintln!("rerun with --force to compute anyway");
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_cap_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<ranksum::Error>(),
            Some(ranksum::Error::CapExceeded { .. })
        )
    })
}

pub(crate) fn check_cap(n: usize, cap: usize, force: bool) -> anyhow::Result<()> {
    if n > cap && !force {
        return Err(anyhow::Error::new(ranksum::Error::CapExceeded {
            what: "N",
            value: n as u128,
            cap: cap as u128,
        }));
    }
    Ok(())
}

fn check_sizes(n1: usize, n: usize) -> anyhow::Result<()> {
    if n1 == 0 || n1 >= n {
        bail!("need 1 <= n1 <= N - 1 for a meaningful test, got n1 = {n1} with N = {n}");
    }
    Ok(())
}

/// Exact distribution of the rank sum of `n1` of the given ranks.
fn distribution(
    ranks: &RankMultiset,
    n1: usize,
    cache: Option<&PathBuf>,
) -> anyhow::Result<ExactDist> {
    if let Some(dir) = cache {
        let cache = DiskCache::open(dir)
            .with_context(|| format!("cannot open cache directory {}", dir.display()))?;
        let key = CacheKey::new(n1, ranks_to_pattern(ranks)?);
        let table = cache.get_or_insert_with(&key, || euler_expand(ranks, n1))?;
        return Ok(dist_from_table(&table, n1)?);
    }
    if ranks.has_ties() {
        Ok(dist_from_ranks(ranks, n1)?)
    } else {
        Ok(dist_no_ties(n1, ranks.len() - n1)?)
    }
}

fn cmd_test(args: TestArgs) -> anyhow::Result<()> {
    let samples = input::read_samples(&args.input, &args.group_col, &args.value_col)?;
    let (label1, label2, x, y) = input::split_groups(samples, args.group1.as_deref())?;
    let (n1, n2) = (x.len(), y.len());
    let n = n1 + n2;
    check_cap(n, N_CAP, args.force)?;

    let mut pooled = x;
    pooled.extend(y);
    if let Some(eps) = args.tie_epsilon {
        if !(eps >= 0.0 && eps.is_finite()) {
            bail!("--tie-epsilon must be a finite non-negative number, got {eps}");
        }
        pooled = coalesce_within(&pooled, eps);
    }
    let ranking = midranks(&pooled)?;
    let ranks = ranking.multiset;
    let w_obs: u64 = ranking.per_value[..n1].iter().sum();

    let dist = distribution(&ranks, n1, args.cache.as_ref())?;
    let moments = if ranks.has_ties() {
        moments_closed_form(&ranks, n1)?
    } else {
        moments_no_ties(n1, n2)
    };
    let mode: TwoSidedMode = args.two_sided_mode.into();
    let report = TestReport::new(
        (label1, label2),
        (n1, n2),
        &ranks,
        w_obs,
        u_from_w(w_obs as i64, n2, n1),
        [
            p_value(&dist, w_obs, Alternative::Less, mode),
            p_value(&dist, w_obs, Alternative::Greater, mode),
            p_value(&dist, w_obs, Alternative::TwoSided, mode),
        ],
        &moments,
        args.alternative.into(),
    );
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn parse_rank_list(text: &str) -> anyhow::Result<RankMultiset> {
    let doubled = text
        .split(',')
        .map(|s| {
            let d = ranksum::numfmt::parse_doubled(s.trim())?;
            u64::try_from(d).map_err(|_| anyhow::anyhow!("rank {} is negative", s.trim()))
        })
        .collect::<anyhow::Result<Vec<u64>>>()?;
    Ok(RankMultiset::from_doubled(doubled)?)
}

fn cmd_pmf(args: PmfArgs) -> anyhow::Result<()> {
    let ranks = match (&args.n2, &args.ranks, &args.pattern) {
        (Some(n2), None, None) => RankMultiset::untied(args.n1 + n2),
        (None, Some(list), None) => parse_rank_list(list)?,
        (None, None, Some(bits)) => pattern_to_ranks(&bits.parse::<TiePattern>()?),
        _ => bail!("give exactly one of --n2, --ranks, --pattern"),
    };
    let n = ranks.len();
    check_sizes(args.n1, n)?;
    check_cap(n, N_CAP, args.force)?;
    let dist = distribution(&ranks, args.n1, args.cache.as_ref())?;
    let report = PmfReport::new(&ranks, &dist);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        report.write_csv(std::io::stdout().lock())?;
    }
    Ok(())
}
