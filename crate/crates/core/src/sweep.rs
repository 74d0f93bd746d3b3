//! Grid sweeps over (k, n, m) and their JSON / CSV reports.
//!
//! Grid points are evaluated as a pure parallel map; rows are always
//! emitted in (n, k, m) order so the rendered report does not depend on
//! the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::DEFAULT_RHO_SEED;
use crate::tower::{analyze, AnalysisReport, Branch, CaseTag, TowerSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "n,k,m,fn,expected_valuation,divisibility_ok,unit_residue,exact,case,predicted_residue,match,status";

/// Inclusive integer range written `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    #[serde(with = "crate::dec::int")]
    pub lo: u64,
    #[serde(with = "crate::dec::int")]
    pub hi: u64,
}

impl Span {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::PreconditionViolated(format!("empty range {lo}..{hi}")));
        }
        Ok(Span { lo, hi })
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::PreconditionViolated(format!("expected A..B, got {s:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Span::new(lo, hi)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub k: Span,
    pub n: Span,
    pub m: Span,
}

impl Grid {
    /// Grid points in report order: n, then k, then m.
    pub fn specs(&self) -> Result<Vec<TowerSpec>> {
        let mut out = Vec::new();
        for n in self.n.iter() {
            for k in self.k.iter() {
                for m in self.m.iter() {
                    out.push(TowerSpec::new(k, n, m)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Mismatch,
    BudgetExceeded,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Mismatch => "mismatch",
            Status::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spec: TowerSpec,
    pub status: Status,
    pub analysis: Option<AnalysisReport>,
    /// Error text for rows that could not be analyzed.
    pub detail: Option<String>,
}

impl SweepRow {
    fn evaluate(spec: TowerSpec) -> SweepRow {
        match analyze(&spec) {
            Ok(report) => SweepRow {
                spec,
                status: classify(&report),
                analysis: Some(report),
                detail: None,
            },
            Err(e) => SweepRow {
                spec,
                status: match e {
                    Error::FactorBudgetExceeded { .. } | Error::BudgetExceeded { .. } => {
                        Status::BudgetExceeded
                    }
                    _ => Status::Mismatch,
                },
                analysis: None,
                detail: Some(e.to_string()),
            },
        }
    }
}

/// A row is a mismatch if divisibility fails, the residue disagrees with
/// its closed form, a chain fails verification, or exactness fails where
/// it is promised (k ≥ 2, n ≥ 4).
pub fn classify(report: &AnalysisReport) -> Status {
    let spec = report.spec;
    let exact_promised = spec.k >= 2 && spec.n >= 4;
    if !report.divisibility_ok
        || report.matches == Some(false)
        || !report.chain.verified
        || (exact_promised && report.exact != Some(true))
    {
        Status::Mismatch
    } else {
        Status::Ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(with = "crate::dec::int")]
    pub rows: u64,
    #[serde(with = "crate::dec::int")]
    pub ok: u64,
    #[serde(with = "crate::dec::int")]
    pub mismatch: u64,
    #[serde(with = "crate::dec::int")]
    pub budget_exceeded: u64,
    /// Rows per closed-form case, every tag listed.
    pub by_case: BTreeMap<String, String>,
    /// Rows per individual hypothesis of the residue formula.
    pub by_branch: BTreeMap<String, String>,
}

impl Summary {
    fn tally(rows: &[SweepRow]) -> Summary {
        let mut by_case: BTreeMap<String, u64> =
            CaseTag::ALL.iter().map(|t| (t.as_str().to_owned(), 0)).collect();
        let mut by_branch: BTreeMap<String, u64> =
            Branch::ALL.iter().map(|b| (b.as_str().to_owned(), 0)).collect();
        let count = |s: Status| rows.iter().filter(|r| r.status == s).count() as u64;
        for report in rows.iter().filter_map(|r| r.analysis.as_ref()) {
            *by_case.get_mut(report.case.as_str()).expect("all tags") += 1;
            if let Some(b) = report.branch {
                *by_branch.get_mut(b.as_str()).expect("all branches") += 1;
            }
        }
        let stringify = |m: BTreeMap<String, u64>| {
            m.into_iter().map(|(k, v)| (k, v.to_string())).collect()
        };
        Summary {
            rows: rows.len() as u64,
            ok: count(Status::Ok),
            mismatch: count(Status::Mismatch),
            budget_exceeded: count(Status::BudgetExceeded),
            by_case: stringify(by_case),
            by_branch: stringify(by_branch),
        }
    }

    pub fn case_count(&self, tag: CaseTag) -> u64 {
        self.by_case[tag.as_str()].parse().expect("decimal")
    }

    pub fn branch_count(&self, branch: Branch) -> u64 {
        self.by_branch[branch.as_str()].parse().expect("decimal")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub tool_version: String,
    #[serde(with = "crate::dec::int")]
    pub seed: u64,
    pub grid: Grid,
    pub rows: Vec<SweepRow>,
    pub summary: Summary,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<SweepReport> {
        serde_json::from_str(text).map_err(|e| Error::PreconditionViolated(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<String>| v.unwrap_or_default();
        for row in &self.rows {
            let s = row.spec;
            let fields: Vec<String> = match &row.analysis {
                Some(a) => vec![
                    s.n.to_string(),
                    s.k.to_string(),
                    s.m.to_string(),
                    a.fn_value.to_string(),
                    a.expected_valuation.to_string(),
                    a.divisibility_ok.to_string(),
                    a.unit_residue.to_string(),
                    opt(a.exact.map(|b| b.to_string())),
                    a.case.to_string(),
                    opt(a.predicted_residue.as_ref().map(|p| p.to_string())),
                    opt(a.matches.map(|b| b.to_string())),
                    row.status.as_str().to_owned(),
                ],
                None => {
                    let mut f = vec![s.n.to_string(), s.k.to_string(), s.m.to_string()];
                    f.extend(std::iter::repeat_n(String::new(), 8));
                    f.push(row.status.as_str().to_owned());
                    f
                }
            };
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// True when no row is a mismatch.
    pub fn all_ok(&self) -> bool {
        self.summary.mismatch == 0
    }
}

/// Evaluates every grid point on a pool of `jobs` threads.
pub fn run_sweep(grid: &Grid, jobs: usize) -> Result<SweepReport> {
    let specs = grid.specs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        specs
            .into_par_iter()
            .map(SweepRow::evaluate)
            .collect()
    });
    let summary = Summary::tally(&rows);
    Ok(SweepReport {
        tool_version: TOOL_VERSION.to_owned(),
        seed: DEFAULT_RHO_SEED,
        grid: *grid,
        rows,
        summary,
    })
}
