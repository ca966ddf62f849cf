//! JSON form of a [`ScoreReport`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use rallykit_core::scoring::{RallyScore, ScoreReport, ShotScore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotJson {
    pub gated: bool,
    pub total: f64,
    pub terms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RallyJson {
    pub total: f64,
    pub count_gate: bool,
    pub ass: f64,
    pub shots: Vec<ShotJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub total: f64,
    pub rallies: BTreeMap<String, RallyJson>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl From<&ShotScore> for ShotJson {
    fn from(s: &ShotScore) -> Self {
        ShotJson {
            gated: s.gated,
            total: s.total,
            terms: s.terms.iter().map(|(c, w)| (c.name().to_string(), *w)).collect(),
        }
    }
}

impl From<&RallyScore> for RallyJson {
    fn from(r: &RallyScore) -> Self {
        RallyJson {
            total: r.total,
            count_gate: r.count_gate,
            ass: r.ass,
            shots: r.per_shot.iter().map(ShotJson::from).collect(),
        }
    }
}

impl From<&ScoreReport> for ReportJson {
    fn from(r: &ScoreReport) -> Self {
        ReportJson {
            total: r.total,
            rallies: r.per_rally.iter().map(|(id, s)| (id.clone(), s.into())).collect(),
            warnings: r.warnings.clone(),
        }
    }
}

pub fn to_json(report: &ScoreReport) -> String {
    let mut s = serde_json::to_string_pretty(&ReportJson::from(report))
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Console summary: one line per rally, then the dataset total. Scores show
/// four decimals; the total also carries twelve.
pub fn to_text(report: &ScoreReport) -> String {
    let mut out = String::new();
    for (id, r) in &report.per_rally {
        out.push_str(&format!(
            "{id} {:.4} shots={} count_gate={}\n",
            r.total,
            r.per_shot.len(),
            r.count_gate
        ));
    }
    out.push_str(&format!("total {:.4} [{:.12}]\n", report.total, report.total));
    out
}
