//! Report documents: the discovery report (JSON and line-oriented text), the
//! review file read back for enhancement, and the acquisition plan.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dataset::IndexedDataset;
use crate::discovery::{level_histogram, max_covered_level, Discovery};
use crate::enhance::{AcquisitionPlan, TargetSet, ValidationOracle};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::schema::Schema;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEcho {
    pub count: u64,
    /// `count / n`.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MupEntry {
    pub pattern: String,
    pub level: usize,
    pub coverage: u64,
    pub value_count: u64,
    pub labels: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub schema: Schema,
    pub n: u64,
    pub threshold: ThresholdEcho,
    pub algorithm: String,
    pub wall_time_ms: u64,
    pub complete: bool,
    pub max_level: Option<usize>,
    pub mups: Vec<MupEntry>,
    pub level_histogram: BTreeMap<usize, usize>,
    pub max_covered_level: i64,
}

impl RunReport {
    /// Summarizes a discovery. With an oracle each MUP is tagged with its
    /// validity, and `drop_invalid` removes the invalid ones.
    pub fn build(
        ds: &IndexedDataset,
        discovery: &Discovery,
        wall_time: Duration,
        oracle: Option<&ValidationOracle>,
        drop_invalid: bool,
    ) -> Result<Self> {
        let schema = ds.schema();
        let mut kept = Vec::new();
        let mut mups = Vec::new();
        for p in discovery.mups.sorted() {
            let valid = oracle.map(|o| o.validate(&p));
            if drop_invalid && valid == Some(false) {
                continue;
            }
            mups.push(MupEntry {
                pattern: p.render(schema),
                level: p.level(),
                coverage: ds.coverage(&p)?,
                value_count: p.value_count(schema),
                labels: p.describe(schema),
                valid,
            });
            kept.push(p);
        }
        Ok(RunReport {
            format_version: FORMAT_VERSION,
            schema: schema.clone(),
            n: ds.n(),
            threshold: ThresholdEcho {
                count: discovery.threshold,
                rate: discovery.threshold as f64 / ds.n() as f64,
            },
            algorithm: discovery.algorithm.name().to_string(),
            wall_time_ms: wall_time.as_millis() as u64,
            complete: discovery.complete,
            max_level: discovery.max_level,
            level_histogram: level_histogram(&kept),
            max_covered_level: max_covered_level(&kept, ds.d()),
            mups,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: RunReport = serde_json::from_str(s)?;
        if r.format_version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported report format_version {}",
                r.format_version
            )));
        }
        Ok(r)
    }

    pub fn patterns(&self) -> Result<Vec<Pattern>> {
        self.mups
            .iter()
            .map(|m| Pattern::parse(&m.pattern, &self.schema))
            .collect()
    }

    /// One pattern per line after a `#` header; the level histogram follows
    /// as comment lines with fixed-width bars.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let attrs: Vec<String> = self
            .schema
            .attributes()
            .iter()
            .map(|a| format!("{}({})", a.name, a.cardinality()))
            .collect();
        let _ = writeln!(s, "# mupcov report, format_version {}", self.format_version);
        let _ = writeln!(s, "# attributes: {}", attrs.join(" "));
        let _ = writeln!(s, "# rows: {}", self.n);
        let _ = writeln!(s, "# threshold: {}", self.threshold.count);
        let _ = writeln!(s, "# threshold_rate: {}", self.threshold.rate);
        let _ = writeln!(s, "# algorithm: {}", self.algorithm);
        let _ = writeln!(s, "# complete: {}", self.complete);
        if let Some(l) = self.max_level {
            let _ = writeln!(s, "# max_level: {l}");
        }
        let _ = writeln!(s, "# max_covered_level: {}", self.max_covered_level);
        let _ = writeln!(s, "# mups: {}", self.mups.len());
        for m in &self.mups {
            let _ = write!(s, "{}", m.pattern);
            let _ = write!(s, "  # level {} coverage {} {}", m.level, m.coverage, m.labels);
            if m.valid == Some(false) {
                let _ = write!(s, " [invalid]");
            }
            s.push('\n');
        }
        s.push_str("#\n# level histogram\n");
        s.push_str(&histogram_bars(&self.level_histogram));
        s
    }
}

const BAR_WIDTH: usize = 40;

fn histogram_bars(h: &BTreeMap<usize, usize>) -> String {
    let max = h.values().copied().max().unwrap_or(0);
    let mut s = String::new();
    for (level, &count) in h {
        let len = (count * BAR_WIDTH).div_ceil(max.max(1));
        let _ = writeln!(s, "# {level:>3} | {:<BAR_WIDTH$} {count}", "#".repeat(len));
    }
    s
}

/// MUPs read back for enhancement, from a JSON report or a line-oriented
/// review file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MupInput {
    pub patterns: Vec<Pattern>,
    /// Absolute threshold, if the input records one.
    pub threshold: Option<u64>,
    pub complete: bool,
    pub max_level: Option<usize>,
}

impl MupInput {
    /// Parses `text` against `schema`. JSON reports must carry the same
    /// schema. In a review file blank lines and `#` comments are skipped,
    /// except the header keys `threshold`, `complete` and `max_level`.
    pub fn parse(text: &str, schema: &Schema) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let r = RunReport::from_json(text)?;
            if &r.schema != schema {
                return Err(Error::Invalid(
                    "report schema does not match the dataset schema".into(),
                ));
            }
            return Ok(MupInput {
                patterns: r.patterns()?,
                threshold: Some(r.threshold.count),
                complete: r.complete,
                max_level: r.max_level,
            });
        }
        let mut input = MupInput {
            patterns: Vec::new(),
            threshold: None,
            complete: true,
            max_level: None,
        };
        for line in text.lines() {
            let (body, comment) = match line.find('#') {
                Some(i) => (&line[..i], Some(&line[i + 1..])),
                None => (line, None),
            };
            let body = body.trim();
            if !body.is_empty() {
                input.patterns.push(Pattern::parse(body, schema)?);
            } else if let Some((key, value)) = comment.and_then(|c| c.split_once(':')) {
                let value = value.trim();
                let bad = |k: &str| Error::Invalid(format!("bad `{k}` header value `{value}`"));
                match key.trim() {
                    "threshold" => input.threshold = Some(value.parse().map_err(|_| bad("threshold"))?),
                    "complete" => input.complete = value.parse().map_err(|_| bad("complete"))?,
                    "max_level" => input.max_level = Some(value.parse().map_err(|_| bad("max_level"))?),
                    _ => {}
                }
            }
        }
        Ok(input)
    }

    /// Whether every MUP up to `level` is known to be listed.
    pub fn complete_to(&self, level: usize) -> bool {
        self.complete && self.max_level.is_none_or(|l| l >= level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetMode {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value_count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanPick {
    /// Value labels in attribute order.
    pub combination: Vec<String>,
    pub codes: String,
    /// The pick with positions irrelevant to its hits relaxed to `X`.
    pub pattern: String,
    pub labels: String,
    pub hits: Vec<String>,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub format_version: u32,
    pub threshold: u64,
    pub target: TargetMode,
    pub targets: usize,
    pub picks: Vec<PlanPick>,
    pub total_tuples: u64,
    pub residual: Vec<String>,
}

impl PlanReport {
    pub fn build(schema: &Schema, ts: &TargetSet, plan: &AcquisitionPlan, target: TargetMode) -> Self {
        let render = |k: &usize| ts.patterns()[*k].render(schema);
        PlanReport {
            format_version: FORMAT_VERSION,
            threshold: ts.tau(),
            target,
            targets: ts.len(),
            picks: plan
                .picks
                .iter()
                .map(|p| PlanPick {
                    combination: p
                        .combination
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| schema.attribute(i).label(v).to_string())
                        .collect(),
                    codes: Pattern::from_combination(&p.combination).render(schema),
                    pattern: p.generalized.render(schema),
                    labels: p.generalized.describe(schema),
                    hits: p.hits.iter().map(render).collect(),
                    multiplicity: p.multiplicity,
                })
                .collect(),
            total_tuples: plan.total_tuples(),
            residual: plan.residual.iter().map(render).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# mupcov plan, format_version {}", self.format_version);
        let _ = writeln!(s, "# threshold: {}", self.threshold);
        if let Some(l) = self.target.lambda {
            let _ = writeln!(s, "# lambda: {l}");
        }
        if let Some(v) = self.target.min_value_count {
            let _ = writeln!(s, "# min_value_count: {v}");
        }
        let _ = writeln!(s, "# targets: {}", self.targets);
        let _ = writeln!(s, "# picks: {}  total tuples: {}", self.picks.len(), self.total_tuples);
        for p in &self.picks {
            let _ = writeln!(
                s,
                "{} x{}  # {} (hits {})",
                p.codes,
                p.multiplicity,
                p.labels,
                p.hits.len()
            );
        }
        for r in &self.residual {
            let _ = writeln!(s, "# unhittable: {r}");
        }
        s
    }
}
