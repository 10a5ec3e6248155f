//! CSV ingestion: one row per observation, a group column and a value column.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};

/// Observations per group label, in file order.
pub type Samples = BTreeMap<String, Vec<f64>>;

pub fn read_samples(path: &Path, group_col: &str, value_col: &str) -> anyhow::Result<Samples> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers().context("missing header row")?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column named {name:?} in the header"))
    };
    let gi = column(group_col)?;
    let vi = column(value_col)?;

    let mut samples = Samples::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.with_context(|| format!("malformed CSV at line {line}"))?;
        let group = record.get(gi).unwrap_or_default();
        let raw = record.get(vi).unwrap_or_default();
        let value: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .with_context(|| format!("line {line}: {raw:?} is not a finite number"))?;
        samples.entry(group.to_string()).or_default().push(value);
    }
    Ok(samples)
}

/// Picks sample 1 and sample 2. Without `group1` the smaller label comes first.
pub fn split_groups(
    mut samples: Samples,
    group1: Option<&str>,
) -> anyhow::Result<(String, String, Vec<f64>, Vec<f64>)> {
    if samples.len() != 2 {
        let labels: Vec<&String> = samples.keys().collect();
        bail!(
            "expected exactly two groups, found {}: {labels:?}",
            samples.len()
        );
    }
    let first = match group1 {
        Some(label) if samples.contains_key(label) => label.to_string(),
        Some(label) => bail!("--group1 {label:?} is not one of the groups"),
        None => samples.keys().next().expect("two groups").clone(),
    };
    let x = samples.remove(&first).expect("present");
    let (second, y) = samples.pop_first().expect("two groups");
    if x.is_empty() || y.is_empty() {
        bail!("both groups need at least one observation");
    }
    Ok((first, second, x, y))
}
