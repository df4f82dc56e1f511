//! The two-stage analysis: screen the class, then decompose it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use serde::{Deserialize, Serialize};

use crate::clustering::{agglomerate, CutResult, Linkage, Merge};
use crate::cohesion::{assess, CohesionReport, CohesionThresholds, View};
use crate::error::{Error, Result};
use crate::merging::{merge_small_clusters, MergeContext, MergeLog, MergeOptions};
use crate::model::{ClassGraph, MemberId, Partition};
use crate::similarity::{similarity_matrix, SimilarityMatrix};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub threshold: f64,
    pub linkage: Linkage,
    pub merge: MergeOptions,
    pub cohesion: CohesionThresholds,
    /// Decompose even when the class passes the cohesion screen.
    pub force: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            threshold: 0.2,
            linkage: Linkage::Complete,
            merge: MergeOptions::default(),
            cohesion: CohesionThresholds::default(),
            force: false,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidThreshold(self.threshold));
        }
        if !(0.0..=1.0).contains(&self.cohesion.tcc) {
            return Err(Error::InvalidThreshold(self.cohesion.tcc));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    /// Clusters were found and are proposed as new classes.
    Proposed,
    /// The class passed the cohesion screen.
    NoRefactoringProposed,
    /// Input was a bare similarity matrix: only the cut is available.
    MatrixOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSummary {
    pub threshold: f64,
    pub linkage: Linkage,
    pub clusters: Vec<ClusterSummary>,
    /// Full merge sequence; node indices below the member count are leaves.
    pub merges: Vec<Merge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberScore {
    pub member: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cim_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cim_vr_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cim_c_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cim_i_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScore {
    pub target: usize,
    pub combined: f64,
    pub members: Vec<MemberScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub source_id: usize,
    pub source: Vec<String>,
    pub context: MergeContext,
    pub target: Option<usize>,
    pub tie: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tied_targets: Vec<usize>,
    pub scores: Vec<TargetScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposedClass {
    pub name: String,
    pub cluster_id: usize,
    pub members: Vec<String>,
    pub cohesion: CohesionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefactoringReport {
    pub schema: u32,
    pub class_name: String,
    pub status: ReportStatus,
    pub cohesion_before: Option<CohesionReport>,
    pub cut: Option<CutSummary>,
    pub merge_log: Vec<MergeRecord>,
    pub proposed_classes: Vec<ProposedClass>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Intermediate results of a full decomposition, for callers that need more
/// than the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub matrix: SimilarityMatrix,
    pub cut: CutResult,
    pub merged: Partition,
    pub log: MergeLog,
}

/// Similarity, clustering and merging, without the cohesion gate.
pub fn decompose(graph: &ClassGraph, config: &AnalysisConfig) -> Result<Decomposition> {
    config.validate()?;
    let matrix = similarity_matrix(graph)?;
    let cut = agglomerate(&matrix, config.linkage, config.threshold)?;
    let (merged, log) = merge_small_clusters(&cut.partition, graph, &config.merge)?;
    Ok(Decomposition {
        matrix,
        cut,
        merged,
        log,
    })
}

/// Screens `graph` and, when it is low-cohesive or `force` is set, proposes
/// one extracted class per final cluster.
pub fn run_pipeline(graph: &ClassGraph, config: &AnalysisConfig) -> Result<RefactoringReport> {
    config.validate()?;
    let before = assess(View::whole(graph), &config.cohesion);
    let mut report = RefactoringReport {
        schema: REPORT_SCHEMA,
        class_name: graph.class_name().to_string(),
        status: ReportStatus::NoRefactoringProposed,
        cohesion_before: Some(before.clone()),
        cut: None,
        merge_log: Vec::new(),
        proposed_classes: Vec::new(),
        warnings: Vec::new(),
    };
    if !before.is_low() && !config.force {
        return Ok(report);
    }

    let decomposition = decompose(graph, config)?;
    let name = |id: MemberId| graph.name(id).to_string();
    report.cut = Some(summarize_cut(&decomposition.cut, &|id| name(id)));
    report.merge_log = decomposition
        .log
        .steps
        .iter()
        .map(|step| MergeRecord {
            source_id: step.source.id,
            source: step.source.members.iter().map(|&m| name(m)).collect(),
            context: step.context,
            target: step.target,
            tie: step.tie,
            tied_targets: step.tied_targets.clone(),
            scores: step
                .scores
                .iter()
                .map(|s| TargetScore {
                    target: s.target,
                    combined: s.combined,
                    members: s
                        .members
                        .iter()
                        .map(|m| MemberScore {
                            member: name(m.member),
                            cim_v: m.cim_v,
                            cim_vr_m: m.cim_vr_m,
                            cim_c_m: m.cim_c_m,
                            cim_i_m: m.cim_i_m,
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    for step in decomposition.log.steps.iter().filter(|s| s.tie) {
        report.warnings.push(format!(
            "cluster {} tied between clusters {:?}; merged into {} (resolve with cross-class coupling)",
            step.source.id,
            step.tied_targets,
            step.target.unwrap_or_default()
        ));
    }
    for step in decomposition
        .log
        .steps
        .iter()
        .filter(|s| s.target.is_none())
    {
        report.warnings.push(format!(
            "cluster {} has no cluster with methods to merge into",
            step.source.id
        ));
    }
    report.proposed_classes = decomposition
        .merged
        .clusters()
        .iter()
        .enumerate()
        .map(|(i, c)| ProposedClass {
            name: format!("{}Part{}", graph.class_name(), i + 1),
            cluster_id: c.id,
            members: c.members.iter().map(|&m| name(m)).collect(),
            cohesion: assess(View::subset(graph, &c.members), &config.cohesion),
        })
        .collect();
    report.status = ReportStatus::Proposed;
    Ok(report)
}

/// Clustering only, for a bare similarity matrix. Merging and cohesion need
/// the member graph and are skipped.
pub fn run_matrix_pipeline(
    class_name: &str,
    matrix: &SimilarityMatrix,
    config: &AnalysisConfig,
) -> Result<RefactoringReport> {
    config.validate()?;
    let cut = agglomerate(matrix, config.linkage, config.threshold)?;
    let name = |id: MemberId| matrix.label(id).name.clone();
    Ok(RefactoringReport {
        schema: REPORT_SCHEMA,
        class_name: class_name.to_string(),
        status: ReportStatus::MatrixOnly,
        cohesion_before: None,
        cut: Some(summarize_cut(&cut, &name)),
        merge_log: Vec::new(),
        proposed_classes: Vec::new(),
        warnings: vec![
            "similarity matrix input: small-cluster merging and cohesion metrics need the member graph and were skipped"
                .to_string(),
        ],
    })
}

fn summarize_cut(cut: &CutResult, name: &dyn Fn(MemberId) -> String) -> CutSummary {
    CutSummary {
        threshold: cut.threshold,
        linkage: cut.linkage,
        clusters: cut
            .partition
            .clusters()
            .iter()
            .map(|c| ClusterSummary {
                id: c.id,
                members: c.members.iter().map(|&m| name(m)).collect(),
            })
            .collect(),
        merges: cut.dendrogram.merges().to_vec(),
    }
}
