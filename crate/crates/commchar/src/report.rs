//! Report rendering: one JSON document per community and a plain-text
//! summary table.

use std::fmt::Write as _;

use commchar_core::{CommunityReport, DescriptorSet, DynamicNetwork, Growth, NodeSet, RankedPattern};
use serde::Serialize;

use crate::io::label;

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum GrowthValue {
    Finite(f64),
    /// Rendered as the string `"inf"`.
    Infinite(&'static str),
}

impl From<Growth> for GrowthValue {
    fn from(g: Growth) -> Self {
        match g {
            Growth::Infinite => GrowthValue::Infinite("inf"),
            finite => GrowthValue::Finite(finite.value()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PatternDoc {
    pub pattern: String,
    pub length: usize,
    pub count_in: usize,
    pub count_out: usize,
    pub sup_in: f64,
    pub sup_out: f64,
    pub growth: GrowthValue,
    pub supporters: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CoverageDoc {
    pub fraction: f64,
    pub nodes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AnomalyDoc {
    /// Members supporting none of the representative patterns.
    pub representatives: Vec<String>,
    pub most_supported: Vec<String>,
    pub combined: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub community: usize,
    pub size: usize,
    pub patterns: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    pub most_supported: Option<PatternDoc>,
    pub most_emerging: Option<PatternDoc>,
    pub supplementary: Vec<PatternDoc>,
    pub coverage: CoverageDoc,
    pub anomalies: AnomalyDoc,
}

pub const NO_PATTERNS: &str = "no characterization at this min_sup";
pub const NO_EMERGING: &str = "no emerging pattern (growth > 1) at this min_sup";

fn labels(net: &DynamicNetwork, set: &NodeSet) -> Vec<String> {
    set.iter().map(|v| label(net, v)).collect()
}

fn pattern_doc(r: &RankedPattern, net: &DynamicNetwork, specs: &DescriptorSet) -> PatternDoc {
    PatternDoc {
        pattern: specs.format_sequence(&r.pattern.sequence),
        length: r.pattern.sequence.len(),
        count_in: r.in_count,
        count_out: r.out_count,
        sup_in: r.sup_in(),
        sup_out: r.sup_out(),
        growth: r.growth.into(),
        supporters: labels(net, &r.supporters_in),
    }
}

pub fn report_doc(report: &CommunityReport, net: &DynamicNetwork, specs: &DescriptorSet) -> ReportDoc {
    let note = if !report.is_characterized() {
        Some(NO_PATTERNS)
    } else if report.most_emerging.is_none() {
        Some(NO_EMERGING)
    } else {
        None
    };
    ReportDoc {
        community: report.community,
        size: report.size(),
        patterns: report.pattern_count,
        note,
        most_supported: report.most_supported.as_ref().map(|r| pattern_doc(r, net, specs)),
        most_emerging: report.most_emerging.as_ref().map(|r| pattern_doc(r, net, specs)),
        supplementary: report
            .supplementary
            .iter()
            .map(|r| pattern_doc(r, net, specs))
            .collect(),
        coverage: CoverageDoc {
            fraction: report.coverage_fraction(),
            nodes: labels(net, &report.coverage),
        },
        anomalies: AnomalyDoc {
            representatives: labels(net, &report.anomalies),
            most_supported: labels(net, &report.anomalies_most_supported),
            combined: labels(net, &report.anomalies_combined),
        },
    }
}

pub fn to_json(doc: &ReportDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report documents always serialize");
    s.push('\n');
    s
}

fn growth_text(g: Growth) -> String {
    match g {
        Growth::Infinite => "inf".to_string(),
        finite => format!("{:.2}", finite.value()),
    }
}

/// Plain-text table: one block per community.
pub fn summary(reports: &[CommunityReport], net: &DynamicNetwork, specs: &DescriptorSet) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "community {}  size {}  patterns {}  coverage {:.1}%  anomalies {}",
            r.community,
            r.size(),
            r.pattern_count,
            100.0 * r.coverage_fraction(),
            r.anomalies.len()
        );
        if !r.is_characterized() {
            let _ = writeln!(out, "  {NO_PATTERNS}\n");
            continue;
        }
        let _ = writeln!(out, "  {:<14} {:>7} {:>7} {:>7}  pattern", "role", "sup_in", "sup_out", "growth");
        let mut row = |role: &str, p: &RankedPattern| {
            let _ = writeln!(
                out,
                "  {:<14} {:>7.3} {:>7.3} {:>7}  {}",
                role,
                p.sup_in(),
                p.sup_out(),
                growth_text(p.growth),
                specs.format_sequence(&p.pattern.sequence)
            );
        };
        if let Some(p) = &r.most_supported {
            row("most-supported", p);
        }
        if let Some(p) = &r.most_emerging {
            row("most-emerging", p);
        }
        for p in &r.supplementary {
            row("supplementary", p);
        }
        if r.most_emerging.is_none() {
            let _ = writeln!(out, "  {NO_EMERGING}");
        }
        if !r.anomalies.is_empty() {
            let names = labels(net, &r.anomalies);
            let shown = names.iter().take(20).cloned().collect::<Vec<_>>().join(", ");
            let more = if names.len() > 20 {
                format!(" (+{} more)", names.len() - 20)
            } else {
                String::new()
            };
            let _ = writeln!(out, "  anomalies: {shown}{more}");
        }
        out.push('\n');
    }
    out
}
