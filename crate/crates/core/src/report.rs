//! Deterministic report records with CSV and JSON renderings.
//!
//! Every record embeds the spec echo, seed, depth and tool version. Output
//! is bit-stable for fixed inputs: field order is fixed by declaration,
//! rationals render as `num/den` strings, floats as shortest round-trip
//! decimal, and no locale formatting is involved. The CSV form carries the
//! per-level rows; the JSON mirror carries the same rows plus the header
//! metadata.

use serde::Serialize;

use crate::constructions::GroupSpec;
use crate::spectra::{
    frac_string, BadCosetAnalysis, ExactFraction, FppLevel, HdimPoint, MartingaleVerdict,
    MonodromyCheck, ProcessOutcome, SampledProportion,
};

/// Header shared by all reports.
#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub schema: String,
    pub tool_version: String,
    pub spec: GroupSpec,
    pub degree: usize,
    pub depth: usize,
    pub seed: u64,
}

impl ReportHeader {
    pub fn new(schema: &str, spec: &GroupSpec, depth: usize, seed: u64) -> Self {
        ReportHeader {
            schema: schema.to_string(),
            tool_version: crate::TOOL_VERSION.to_string(),
            spec: spec.clone(),
            degree: spec.degree().map(|d| d.get()).unwrap_or(0),
            depth,
            seed,
        }
    }
}

/// Fixed-point proportion report: one row per level.
#[derive(Debug, Clone, Serialize)]
pub struct FppReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    /// Declared lower bound and its source, when one applies.
    pub bound: Option<String>,
    pub bound_source: Option<String>,
    pub monotone: bool,
    pub rows: Vec<FppRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FppRow {
    pub level: usize,
    pub count_fixing: u64,
    pub order: u64,
    pub p_k: String,
    pub bound: String,
    pub pass: bool,
}

impl FppReport {
    pub fn from_series(
        header: ReportHeader,
        series: &[FppLevel],
        bound: Option<(&ExactFraction, &str)>,
    ) -> FppReport {
        let bound_string = bound.map(|(b, _)| frac_string(b));
        let rows = series
            .iter()
            .map(|lvl| FppRow {
                level: lvl.level,
                count_fixing: lvl.fixing,
                order: lvl.order,
                p_k: frac_string(&lvl.proportion),
                bound: bound_string.clone().unwrap_or_default(),
                pass: bound.map(|(b, _)| lvl.proportion >= *b).unwrap_or(true),
            })
            .collect();
        let monotone = series
            .windows(2)
            .all(|w| w[1].proportion <= w[0].proportion);
        FppReport {
            header,
            bound: bound_string,
            bound_source: bound.map(|(_, s)| s.to_string()),
            monotone,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,count_fixing,order,p_k,bound,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.level, r.count_fixing, r.order, r.p_k, r.bound, r.pass
            ));
        }
        out
    }
}

/// Sampled fixed-point proportion rows for groups beyond enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct SampledFppReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub rows: Vec<SampledFppRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledFppRow {
    pub level: usize,
    pub estimate: f64,
    pub sigma: f64,
    pub trials: u64,
    /// Always true for these rows; sampled values are never silent.
    pub sampled: bool,
}

impl SampledFppReport {
    pub fn new(header: ReportHeader, rows: &[(usize, SampledProportion)]) -> Self {
        SampledFppReport {
            header,
            rows: rows
                .iter()
                .map(|(level, s)| SampledFppRow {
                    level: *level,
                    estimate: s.estimate,
                    sigma: s.sigma,
                    trials: s.trials,
                    sampled: true,
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,estimate,sigma,trials,sampled\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.level, r.estimate, r.sigma, r.trials, r.sampled
            ));
        }
        out
    }
}

/// Bad-coset report: one row per coset of the first-level quotient.
#[derive(Debug, Clone, Serialize)]
pub struct BadCosetReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub q_size: u64,
    pub bad_count: u64,
    pub ratio: String,
    pub complete_monodromy: Option<bool>,
    pub rows: Vec<BadCosetRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BadCosetRow {
    pub coset: usize,
    pub representative: String,
    pub size: u64,
    pub all_fix: bool,
}

impl BadCosetReport {
    pub fn new(header: ReportHeader, analysis: &BadCosetAnalysis) -> Self {
        BadCosetReport {
            header,
            q_size: analysis.q_size,
            bad_count: analysis.bad_count,
            ratio: frac_string(&analysis.ratio),
            complete_monodromy: analysis.complete_monodromy,
            rows: analysis
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| BadCosetRow {
                    coset: i,
                    representative: r.representative.clone(),
                    size: r.size,
                    all_fix: r.all_fix,
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("coset,representative,size,all_fix\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.coset, r.representative, r.size, r.all_fix
            ));
        }
        out
    }
}

/// Monodromy-bound verification report.
#[derive(Debug, Clone, Serialize)]
pub struct MonodromyReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub bound: String,
    pub elements_over_bad_cosets: u64,
    pub all_witnessed: bool,
    /// Witness paths, truncated to the first `witness_limit` entries.
    pub witness_limit: usize,
    pub witnesses: Vec<WitnessRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub element_index: usize,
    pub fixed_path: String,
}

impl MonodromyReport {
    pub fn new(header: ReportHeader, check: &MonodromyCheck, witness_limit: usize) -> Self {
        MonodromyReport {
            header,
            bound: frac_string(&check.bound),
            elements_over_bad_cosets: check.over_bad,
            all_witnessed: check.witnesses.len() as u64 == check.over_bad,
            witness_limit,
            witnesses: check
                .witnesses
                .iter()
                .take(witness_limit)
                .map(|(i, p)| WitnessRow {
                    element_index: *i,
                    fixed_path: p.clone(),
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("element_index,fixed_path\n");
        for w in &self.witnesses {
            out.push_str(&format!("{},{}\n", w.element_index, w.fixed_path));
        }
        out
    }
}

/// Dimension ratio report: one row per level.
#[derive(Debug, Clone, Serialize)]
pub struct HdimReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub rows: Vec<HdimRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HdimRow {
    pub n: usize,
    pub log_group_expr: String,
    pub log_group: f64,
    pub log_full: f64,
    pub ratio: f64,
    pub exact_ratio: String,
}

impl HdimReport {
    pub fn new(header: ReportHeader, points: &[HdimPoint]) -> Self {
        HdimReport {
            header,
            rows: points
                .iter()
                .map(|p| HdimRow {
                    n: p.n,
                    log_group_expr: p.log_group_expr.clone(),
                    log_group: p.log_group,
                    log_full: p.log_full,
                    ratio: p.ratio,
                    exact_ratio: p
                        .exact_ratio
                        .as_ref()
                        .map(frac_string)
                        .unwrap_or_default(),
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,log_group_expr,log_group,log_full,ratio,exact_ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.log_group_expr, r.log_group, r.log_full, r.ratio, r.exact_ratio
            ));
        }
        out
    }
}

/// Fixed-point process report: per-level means plus the constancy event.
#[derive(Debug, Clone, Serialize)]
pub struct ProcessReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub trials: u64,
    pub target: u64,
    pub event_levels: usize,
    pub empirical_event: f64,
    pub exact_event: Option<String>,
    pub rows: Vec<ProcessRow>,
    /// Distinct trajectories and their multiplicities, comma-joined.
    pub trajectories: Vec<TrajectoryRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProcessRow {
    pub level: usize,
    pub mean_sampled: f64,
    pub mean_exact: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRow {
    pub trajectory: String,
    pub count: u64,
}

impl ProcessReport {
    pub fn new(header: ReportHeader, outcome: &ProcessOutcome) -> Self {
        let rows = (1..=outcome.depth)
            .map(|k| ProcessRow {
                level: k,
                mean_sampled: outcome.sampled_means[k - 1],
                mean_exact: outcome
                    .exact_means
                    .as_ref()
                    .map(|m| frac_string(&m[k - 1]))
                    .unwrap_or_default(),
            })
            .collect();
        let trajectories = outcome
            .trajectory_counts
            .iter()
            .map(|(t, c)| TrajectoryRow {
                trajectory: t
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                count: *c,
            })
            .collect();
        ProcessReport {
            header,
            trials: outcome.trials,
            target: outcome.target,
            event_levels: outcome.event_levels,
            empirical_event: outcome.empirical_event,
            exact_event: outcome.exact_event.as_ref().map(frac_string),
            rows,
            trajectories,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,mean_sampled,mean_exact\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                r.level, r.mean_sampled, r.mean_exact
            ));
        }
        out
    }
}

/// Martingale verdict report.
#[derive(Debug, Clone, Serialize)]
pub struct MartingaleReport {
    #[serde(flatten)]
    pub header: ReportHeader,
    pub holds: bool,
    pub subtree_transitive: Vec<bool>,
    pub rows: Vec<MartingaleRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MartingaleRow {
    pub k: usize,
    pub t: u64,
    pub conditional_mean: String,
    pub matches: bool,
}

impl MartingaleReport {
    pub fn new(header: ReportHeader, verdict: &MartingaleVerdict) -> Self {
        MartingaleReport {
            header,
            holds: verdict.holds,
            subtree_transitive: verdict.subtree_transitive.clone(),
            rows: verdict
                .conditional
                .as_ref()
                .map(|checks| {
                    checks
                        .iter()
                        .map(|c| MartingaleRow {
                            k: c.k,
                            t: c.t,
                            conditional_mean: frac_string(&c.expectation),
                            matches: c.matches,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t,conditional_mean,matches\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.k, r.t, r.conditional_mean, r.matches
            ));
        }
        out
    }
}

/// Renders any serializable report as a stable pretty JSON document with a
/// trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}

/// The supported output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(crate::error::Error::Unsupported(format!(
                "unknown report format {other:?} (expected csv or json)"
            ))),
        }
    }
}
