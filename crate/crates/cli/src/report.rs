//! Output records. Probabilities are written both as exact `num/den`
//! strings and as the nearest `f64`.

use std::fmt::Write as _;
use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use ranksum::numfmt::{format_doubled, format_rational, rational_to_f64};
use ranksum::{Alternative, ExactDist, Moments, RankMultiset};

#[derive(Serialize)]
pub struct TestReport {
    pub group1: String,
    pub group2: String,
    pub n1: usize,
    pub n2: usize,
    pub ranks: Vec<String>,
    pub w_obs: String,
    pub u_obs: String,
    pub p_less: String,
    pub p_less_float: f64,
    pub p_greater: String,
    pub p_greater_float: f64,
    pub p_two_sided: String,
    pub p_two_sided_float: f64,
    pub alternative: &'static str,
    pub p_value: String,
    pub p_value_float: f64,
    pub mean: String,
    pub variance: String,
    pub ties_present: bool,
    pub method: &'static str,
}

impl TestReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        labels: (String, String),
        sizes: (usize, usize),
        ranks: &RankMultiset,
        w_obs: u64,
        u_obs: i64,
        [less, greater, two_sided]: [BigRational; 3],
        moments: &Moments,
        alternative: Alternative,
    ) -> Self {
        let (name, chosen) = match alternative {
            Alternative::Less => ("less", &less),
            Alternative::Greater => ("greater", &greater),
            Alternative::TwoSided => ("two-sided", &two_sided),
        };
        TestReport {
            group1: labels.0,
            group2: labels.1,
            n1: sizes.0,
            n2: sizes.1,
            ranks: ranks.to_decimal_strings(),
            w_obs: format_doubled(w_obs as i64),
            u_obs: format_doubled(u_obs),
            p_less: format_rational(&less),
            p_less_float: rational_to_f64(&less),
            p_greater: format_rational(&greater),
            p_greater_float: rational_to_f64(&greater),
            p_two_sided: format_rational(&two_sided),
            p_two_sided_float: rational_to_f64(&two_sided),
            alternative: name,
            p_value: format_rational(chosen),
            p_value_float: rational_to_f64(chosen),
            mean: format_rational(&moments.mean),
            variance: format_rational(&moments.variance),
            ties_present: ranks.has_ties(),
            method: "exact",
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| writeln!(out, "{k:<12} {v}").unwrap();
        line("sample 1", format!("{} (n1 = {})", self.group1, self.n1));
        line("sample 2", format!("{} (n2 = {})", self.group2, self.n2));
        line("ties", if self.ties_present { "yes" } else { "no" }.into());
        line("W", self.w_obs.clone());
        line("U", self.u_obs.clone());
        line("E[W]", self.mean.clone());
        line("Var[W]", self.variance.clone());
        line(
            "P(W <= w)",
            format!("{} ({})", self.p_less, self.p_less_float),
        );
        line(
            "P(W >= w)",
            format!("{} ({})", self.p_greater, self.p_greater_float),
        );
        line(
            "two-sided",
            format!("{} ({})", self.p_two_sided, self.p_two_sided_float),
        );
        line(
            "p-value",
            format!(
                "{} ({}, {})",
                self.p_value, self.p_value_float, self.alternative
            ),
        );
        out
    }
}

#[derive(Serialize)]
pub struct PmfRow {
    pub w: String,
    pub count: String,
    pub probability: String,
    pub probability_float: f64,
}

#[derive(Serialize)]
pub struct PmfReport {
    pub n1: usize,
    pub n2: usize,
    pub ranks: Vec<String>,
    pub denominator: String,
    pub rows: Vec<PmfRow>,
}

impl PmfReport {
    pub fn new(ranks: &RankMultiset, dist: &ExactDist) -> Self {
        let rows = dist
            .support()
            .iter()
            .zip(dist.counts())
            .map(|(&w, c)| {
                let p = dist.prob_at(w);
                PmfRow {
                    w: format_doubled(w as i64),
                    count: c.to_string(),
                    probability: format_rational(&p),
                    probability_float: rational_to_f64(&p),
                }
            })
            .collect();
        PmfReport {
            n1: dist.n1(),
            n2: dist.n2(),
            ranks: ranks.to_decimal_strings(),
            denominator: dist.denominator().to_string(),
            rows,
        }
    }

    pub fn write_csv(&self, out: impl Write) -> anyhow::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}
