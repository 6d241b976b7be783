//! Text serialization of sweep reports and campaign summaries.
//!
//! CSV sweep rows are `r_i,bound,tone,free_vertices` with 12 significant
//! digits and an empty `tone` field when the discrete tone is absent. JSON
//! mirrors the report structure with every real rounded to 12 significant
//! digits, so parsing it back reproduces the rounded report exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{CampaignSummary, SweepRecord, SweepReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown output format {other:?}, expected csv or json"),
            }),
        }
    }
}

pub const CSV_HEADER: &str = "r_i,bound,tone,free_vertices";

/// `x` with 12 significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        sig12(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

fn rounded_report(report: &SweepReport) -> SweepReport {
    let mut r = report.clone();
    r.profile.curvature.a = round12(r.profile.curvature.a);
    r.profile.curvature.b = round12(r.profile.curvature.b);
    r.profile.r = round12(r.profile.r);
    r.profile.sup_h = round12(r.profile.sup_h);
    for rec in &mut r.records {
        rec.r_i = round12(rec.r_i);
        rec.closed_form_bound = round12(rec.closed_form_bound);
        rec.discrete_tone = rec.discrete_tone.map(round12);
    }
    r
}

pub fn serialize_report(report: &SweepReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(CSV_HEADER);
            out.push('\n');
            for rec in &report.records {
                let tone = rec.discrete_tone.map(sig12).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{}",
                    sig12(rec.r_i),
                    sig12(rec.closed_form_bound),
                    tone,
                    rec.free_vertex_count
                )
                .expect("writing to a String cannot fail");
            }
            Ok(out)
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rounded_report(report))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn report_from_json(text: &str) -> Result<SweepReport> {
    Ok(serde_json::from_str(text)?)
}

/// Parses the CSV rows back into records (profile and name are not part of
/// the CSV).
pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected CSV header {CSV_HEADER:?}"),
            })
        }
    }
    let bad = |line: usize, what: &str| Error::Parse {
        line: line + 1,
        message: format!("bad {what} field"),
    };
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected 4 fields".into(),
            });
        }
        out.push(SweepRecord {
            r_i: f[0].parse().map_err(|_| bad(i, "r_i"))?,
            closed_form_bound: f[1].parse().map_err(|_| bad(i, "bound"))?,
            discrete_tone: if f[2].is_empty() {
                None
            } else {
                Some(f[2].parse().map_err(|_| bad(i, "tone"))?)
            },
            free_vertex_count: f[3].parse().map_err(|_| bad(i, "free_vertices"))?,
            note: None,
        });
    }
    Ok(out)
}

pub fn serialize_campaign(summary: &CampaignSummary, format: Format) -> Result<String> {
    let reals = [
        ("lambda1", summary.lambda1),
        ("radial_bound", summary.radial_bound),
        ("ground_state_bound", summary.ground_state_bound),
        ("best_random_bound", summary.best_random_bound),
        ("tightest_bound", summary.tightest_bound),
        ("violation_tol", summary.violation_tol),
    ];
    match format {
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in reals {
                writeln!(out, "{k},{}", sig12(v)).expect("writing to a String cannot fail");
            }
            writeln!(out, "m_matrix_ok,{}", summary.m_matrix_ok).expect("infallible");
            writeln!(out, "free_vertex_count,{}", summary.free_vertex_count).expect("infallible");
            writeln!(out, "trials,{}", summary.trials).expect("infallible");
            writeln!(out, "seed,{}", summary.seed).expect("infallible");
            writeln!(out, "violations,{}", summary.violations).expect("infallible");
            Ok(out)
        }
        Format::Json => {
            let mut s = summary.clone();
            s.lambda1 = round12(s.lambda1);
            s.radial_bound = round12(s.radial_bound);
            s.ground_state_bound = round12(s.ground_state_bound);
            s.best_random_bound = round12(s.best_random_bound);
            s.tightest_bound = round12(s.tightest_bound);
            let mut text = serde_json::to_string_pretty(&s)?;
            text.push('\n');
            Ok(text)
        }
    }
}
