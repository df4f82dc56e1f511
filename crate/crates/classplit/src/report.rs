//! Human-readable and JSON renderings of analysis results.

use std::fmt::Write;

use classplit_core::cohesion::CohesionReport;
use classplit_core::pipeline::{RefactoringReport, ReportStatus, REPORT_SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report schema {0}")]
    Schema(u32),
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<RefactoringReport, ReportError> {
    let report: RefactoringReport = serde_json::from_str(text)?;
    if report.schema != REPORT_SCHEMA {
        return Err(ReportError::Schema(report.schema));
    }
    Ok(report)
}

fn fmt_tcc(tcc: Option<f64>) -> String {
    tcc.map_or_else(|| "undefined".to_string(), |t| format!("{t:.2}"))
}

pub fn cohesion_line(c: &CohesionReport) -> String {
    format!(
        "LCOM {}, TCC {}, {} methods, {}",
        c.lcom,
        fmt_tcc(c.tcc),
        c.method_count,
        c.verdict
    )
}

pub fn metrics_text(class_name: &str, c: &CohesionReport) -> String {
    format!(
        "class {class_name}\nLCOM: {}\nTCC: {}\nmethods: {}\nverdict: {}\n",
        c.lcom,
        fmt_tcc(c.tcc),
        c.method_count,
        c.verdict
    )
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

pub fn render_text(report: &RefactoringReport) -> String {
    let mut out = format!("class {}\n", report.class_name);
    if let Some(c) = &report.cohesion_before {
        let _ = writeln!(out, "cohesion: {}", cohesion_line(c));
    }
    if report.status == ReportStatus::NoRefactoringProposed {
        out.push_str("no refactoring proposed\n");
        return out;
    }
    if let Some(cut) = &report.cut {
        let _ = writeln!(
            out,
            "clusters at threshold {:.2} ({} linkage): {}",
            cut.threshold,
            cut.linkage,
            cut.clusters.len()
        );
        for c in &cut.clusters {
            let _ = writeln!(out, "  cluster {}: {}", c.id, c.members.join(", "));
        }
    }
    if !report.merge_log.is_empty() {
        out.push_str("merges:\n");
        for step in &report.merge_log {
            let dest = step.target.map_or_else(
                || "left unmerged".to_string(),
                |t| format!("-> cluster {t}"),
            );
            let tie = if step.tie { " [tie]" } else { "" };
            let _ = writeln!(
                out,
                "  cluster {} {{{}}}, {}: {dest}{tie}",
                step.source_id,
                step.source.join(", "),
                step.context
            );
            for score in &step.scores {
                let _ = writeln!(
                    out,
                    "    vs cluster {}: combined {:.2}",
                    score.target, score.combined
                );
                for m in &score.members {
                    let _ = writeln!(
                        out,
                        "      {}: CIM_V {} CIM_VR_M {} CIM_C_M {} CIM_I_M {}",
                        m.member,
                        opt(m.cim_v),
                        opt(m.cim_vr_m),
                        opt(m.cim_c_m),
                        opt(m.cim_i_m)
                    );
                }
            }
        }
    }
    if !report.proposed_classes.is_empty() {
        out.push_str("proposed classes:\n");
        for class in &report.proposed_classes {
            let _ = writeln!(out, "  {}: {}", class.name, class.members.join(", "));
            let _ = writeln!(out, "    {}", cohesion_line(&class.cohesion));
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
