//! Folding small clusters into their best host with the CIM metrics.
//!
//! A stray field is scored by how many of a target's methods reference it
//! (`CIM_V`). A stray method is scored by the share of the target's fields it
//! references (`CIM_VR_M`), the share of the target's methods it calls
//! (`CIM_C_M`) and the share of the target's methods that call it (`CIM_I_M`).

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassGraph, Cluster, MemberId, MemberKind, Partition};

/// Composition of a cluster that needs merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeContext {
    SingleVariable,
    SingleMethod,
    OnlyVariables,
    OnlyMethods,
    Mixed,
}

impl MergeContext {
    /// Context number, 1 through 5.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for MergeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MergeContext::SingleVariable => "single variable",
            MergeContext::SingleMethod => "single method",
            MergeContext::OnlyVariables => "only variables",
            MergeContext::OnlyMethods => "only methods",
            MergeContext::Mixed => "methods and variables",
        };
        write!(f, "context {} ({name})", self.number())
    }
}

pub fn classify_context(cluster: &Cluster, graph: &ClassGraph) -> Result<MergeContext> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster(cluster.id));
    }
    let methods = graph.methods_of(cluster)?.len();
    let fields = cluster.len() - methods;
    Ok(match (methods, fields) {
        (0, 1) => MergeContext::SingleVariable,
        (1, 0) => MergeContext::SingleMethod,
        (0, _) => MergeContext::OnlyVariables,
        (_, 0) => MergeContext::OnlyMethods,
        _ => MergeContext::Mixed,
    })
}

/// A cluster needs merging when it has no methods, a single member, or
/// fewer than `min_size` members.
pub fn is_mergeable(cluster: &Cluster, graph: &ClassGraph, min_size: usize) -> bool {
    let has_method = cluster
        .members
        .iter()
        .any(|&m| graph.contains(m) && graph.kind(m).is_method());
    !has_method || cluster.len() == 1 || cluster.len() < min_size
}

fn expect_kind(graph: &ClassGraph, id: MemberId, kind: MemberKind, target: &Cluster) -> Result<()> {
    let member = graph.member(id)?;
    if member.kind != kind {
        return Err(Error::kind_mismatch("cim", &member.name, "target"));
    }
    if target.contains(id) {
        return Err(Error::MemberInTarget {
            member: member.name.clone(),
            cluster: target.id,
        });
    }
    Ok(())
}

fn ratio(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn target_methods(target: &Cluster, graph: &ClassGraph) -> Result<BTreeSet<MemberId>> {
    let methods = graph.methods_of(target)?;
    if methods.is_empty() {
        return Err(Error::NoMethodsInTarget(target.id));
    }
    Ok(methods)
}

/// Share of the target's methods that reference `variable`.
pub fn cim_v(variable: MemberId, target: &Cluster, graph: &ClassGraph) -> Result<f64> {
    expect_kind(graph, variable, MemberKind::Field, target)?;
    let methods = target_methods(target, graph)?;
    let hits = methods
        .iter()
        .filter(|&&m| graph.references(m, variable))
        .count();
    Ok(ratio(hits, methods.len()))
}

/// Share of the target's fields referenced by `method`.
pub fn cim_vr_m(method: MemberId, target: &Cluster, graph: &ClassGraph) -> Result<f64> {
    expect_kind(graph, method, MemberKind::Method, target)?;
    let fields = graph.fields_of(target)?;
    if fields.is_empty() {
        return Err(Error::NoFieldsInTarget(target.id));
    }
    let hits = fields
        .iter()
        .filter(|&&f| graph.references(method, f))
        .count();
    Ok(ratio(hits, fields.len()))
}

/// Share of the target's methods called by `method`.
pub fn cim_c_m(method: MemberId, target: &Cluster, graph: &ClassGraph) -> Result<f64> {
    expect_kind(graph, method, MemberKind::Method, target)?;
    let methods = target_methods(target, graph)?;
    let hits = methods
        .iter()
        .filter(|&&n| graph.calls_method(method, n))
        .count();
    Ok(ratio(hits, methods.len()))
}

/// Share of the target's methods that call `method`.
pub fn cim_i_m(method: MemberId, target: &Cluster, graph: &ClassGraph) -> Result<f64> {
    expect_kind(graph, method, MemberKind::Method, target)?;
    let methods = target_methods(target, graph)?;
    let hits = methods
        .iter()
        .filter(|&&n| graph.calls_method(n, method))
        .count();
    Ok(ratio(hits, methods.len()))
}

/// Relative weight of each metric in the combined score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CimWeights {
    pub v: f64,
    pub vr_m: f64,
    pub c_m: f64,
    pub i_m: f64,
}

impl Default for CimWeights {
    fn default() -> Self {
        CimWeights {
            v: 1.0,
            vr_m: 1.0,
            c_m: 1.0,
            i_m: 1.0,
        }
    }
}

/// Metric values of one source member against one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberCim {
    pub member: MemberId,
    pub cim_v: Option<f64>,
    pub cim_vr_m: Option<f64>,
    pub cim_c_m: Option<f64>,
    pub cim_i_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CimScore {
    pub source: usize,
    pub target: usize,
    pub members: Vec<MemberCim>,
    /// Weighted mean of every computed metric; 0 when none applies.
    pub combined: f64,
}

/// Scores merging all of `source` into `target`.
pub fn score_merge(
    source: &Cluster,
    target: &Cluster,
    graph: &ClassGraph,
    weights: &CimWeights,
) -> Result<CimScore> {
    target_methods(target, graph)?;
    let target_has_fields = !graph.fields_of(target)?.is_empty();

    let mut members = Vec::with_capacity(source.len());
    let mut sum = 0.0;
    let mut weight = 0.0;
    let mut add = |value: f64, w: f64| {
        sum += w * value;
        weight += w;
        Some(value)
    };
    for &id in &source.members {
        let entry = match graph.member(id)?.kind {
            MemberKind::Field => MemberCim {
                member: id,
                cim_v: add(cim_v(id, target, graph)?, weights.v),
                cim_vr_m: None,
                cim_c_m: None,
                cim_i_m: None,
            },
            MemberKind::Method => MemberCim {
                member: id,
                cim_v: None,
                cim_vr_m: if target_has_fields {
                    add(cim_vr_m(id, target, graph)?, weights.vr_m)
                } else {
                    None
                },
                cim_c_m: add(cim_c_m(id, target, graph)?, weights.c_m),
                cim_i_m: add(cim_i_m(id, target, graph)?, weights.i_m),
            },
        };
        members.push(entry);
    }
    let combined = if weight > 0.0 { sum / weight } else { 0.0 };
    Ok(CimScore {
        source: source.id,
        target: target.id,
        members,
        combined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeOptions {
    pub min_size: usize,
    pub weights: CimWeights,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            min_size: 2,
            weights: CimWeights::default(),
        }
    }
}

/// What happened to one small cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub source: Cluster,
    pub context: MergeContext,
    /// `None` when there was no cluster to merge into.
    pub target: Option<usize>,
    pub scores: Vec<CimScore>,
    /// Two or more targets shared the best combined score.
    pub tie: bool,
    pub tied_targets: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeLog {
    pub steps: Vec<MergeStep>,
}

impl MergeLog {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.steps.iter().any(|s| s.tie)
    }
}

/// Merges every small cluster, whole, into the retained cluster with the
/// highest combined CIM score.
///
/// Sources are handled smallest first; equal sizes go by context (single
/// variables before single methods) and then by cluster id. Targets are
/// re-scored after every merge. An exact tie picks the lowest target id and
/// is flagged in the log.
pub fn merge_small_clusters(
    partition: &Partition,
    graph: &ClassGraph,
    options: &MergeOptions,
) -> Result<(Partition, MergeLog)> {
    if partition.member_count() != graph.len() {
        return Err(Error::InvalidPartition(alloc::format!(
            "partition covers {} members, graph has {}",
            partition.member_count(),
            graph.len()
        )));
    }

    let mut sources = Vec::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    for cluster in partition.clusters() {
        if is_mergeable(cluster, graph, options.min_size) {
            sources.push((
                cluster.len(),
                classify_context(cluster, graph)?,
                cluster.clone(),
            ));
        } else {
            clusters.push(cluster.clone());
        }
    }
    sources.sort_by_key(|s| (s.0, s.1, s.2.id));

    let mut log = MergeLog::default();
    let mut leftovers = Vec::new();
    for (_, context, source) in sources {
        let scores = clusters
            .iter()
            .map(|target| score_merge(&source, target, graph, &options.weights))
            .collect::<Result<Vec<_>>>()?;

        let best = scores
            .iter()
            .map(|s| s.combined)
            .fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = scores
            .iter()
            .filter(|s| s.combined == best)
            .map(|s| s.target)
            .collect();
        let target = tied.iter().copied().min();

        match target.and_then(|id| clusters.iter_mut().find(|c| c.id == id)) {
            Some(host) => host.members.extend(source.members.iter().copied()),
            None => leftovers.push(source.clone()),
        }
        log.steps.push(MergeStep {
            source,
            context,
            target,
            scores,
            tie: tied.len() > 1,
            tied_targets: if tied.len() > 1 { tied } else { Vec::new() },
        });
    }

    clusters.extend(leftovers);
    let merged = Partition::new(clusters, graph.len())
        .map_err(|e| Error::InvalidPartition(e.to_string()))?;
    Ok((merged, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ClassGraphBuilder;
    use std::vec;

    /// Example-1 shaped class: av2 is used by three of A1..A4 and by neither
    /// A5 nor A6.
    fn stray_field() -> ClassGraph {
        let mut b = ClassGraphBuilder::new("StrayField");
        for m in ["A1", "A2", "A3", "A4", "A5", "A6"] {
            b.add_member(m, MemberKind::Method);
        }
        for f in ["av1", "av2", "av3", "av4"] {
            b.add_member(f, MemberKind::Field);
        }
        for (m, f) in [
            ("A1", "av1"),
            ("A2", "av1"),
            ("A2", "av2"),
            ("A3", "av1"),
            ("A3", "av2"),
            ("A4", "av1"),
            ("A4", "av2"),
            ("A5", "av3"),
            ("A5", "av4"),
            ("A6", "av3"),
        ] {
            b.add_use(m, f);
        }
        b.build().unwrap()
    }

    fn cluster(g: &ClassGraph, id: usize, names: &[&str]) -> Cluster {
        Cluster::new(id, names.iter().map(|n| g.id_of(n).unwrap())).unwrap()
    }

    #[test]
    fn cim_v_counts_referencing_methods() {
        let g = stray_field();
        let av2 = g.id_of("av2").unwrap();
        let g1 = cluster(&g, 4, &["A5", "A6", "av3", "av4"]);
        let g3 = cluster(&g, 0, &["A1", "A2", "A3", "A4", "av1"]);
        assert_eq!(cim_v(av2, &g1, &g).unwrap(), 0.0);
        assert_eq!(cim_v(av2, &g3, &g).unwrap(), 0.75);
        let av1 = g.id_of("av1").unwrap();
        let all = cluster(&g, 0, &["A1", "A2", "A3", "A4"]);
        assert_eq!(cim_v(av1, &all, &g).unwrap(), 1.0);
    }

    #[test]
    fn cim_errors() {
        let g = stray_field();
        let av2 = g.id_of("av2").unwrap();
        let a1 = g.id_of("A1").unwrap();
        let fields_only = cluster(&g, 6, &["av1", "av3"]);
        assert_eq!(
            cim_v(av2, &fields_only, &g),
            Err(Error::NoMethodsInTarget(6))
        );
        let methods_only = cluster(&g, 1, &["A2", "A3"]);
        assert_eq!(
            cim_vr_m(a1, &methods_only, &g),
            Err(Error::NoFieldsInTarget(1))
        );
        assert!(matches!(
            cim_v(a1, &methods_only, &g),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            cim_c_m(av2, &methods_only, &g),
            Err(Error::KindMismatch { .. })
        ));
        let holding = cluster(&g, 1, &["A2", "av2"]);
        assert!(matches!(
            cim_v(av2, &holding, &g),
            Err(Error::MemberInTarget { .. })
        ));
    }

    #[test]
    fn method_metrics() {
        let g = ClassGraphBuilder::new("C")
            .method("m")
            .method("p")
            .method("q")
            .method("r")
            .method("s")
            .field("w")
            .field("x")
            .field("y")
            .field("z")
            .uses("m", "w")
            .uses("m", "x")
            .call("m", "p")
            .call("q", "m")
            .call("s", "m")
            .build()
            .unwrap();
        let m = g.id_of("m").unwrap();
        let four_fields = cluster(&g, 1, &["p", "w", "x", "y", "z"]);
        // m refers to 2 of 4 fields
        assert_eq!(cim_vr_m(m, &four_fields, &g).unwrap(), 0.5);
        let untouched = cluster(&g, 3, &["r", "y", "z"]);
        assert_eq!(cim_vr_m(m, &untouched, &g).unwrap(), 0.0);
        let pq = cluster(&g, 1, &["p", "q"]);
        // calls p but not q; q calls m but p does not
        assert_eq!(cim_c_m(m, &pq, &g).unwrap(), 0.5);
        assert_eq!(cim_c_m(m, &cluster(&g, 1, &["p"]), &g).unwrap(), 1.0);
        let pqrs = cluster(&g, 1, &["p", "q", "r", "s"]);
        assert_eq!(cim_i_m(m, &pqrs, &g).unwrap(), 0.5);
        assert_eq!(cim_i_m(m, &cluster(&g, 2, &["q", "s"]), &g).unwrap(), 1.0);
        assert_eq!(cim_i_m(m, &untouched, &g).unwrap(), 0.0);
    }

    #[test]
    fn contexts() {
        let g = stray_field();
        let ctx = |names: &[&str]| classify_context(&cluster(&g, 0, names), &g).unwrap();
        assert_eq!(ctx(&["av2"]), MergeContext::SingleVariable);
        assert_eq!(ctx(&["A2"]), MergeContext::SingleMethod);
        assert_eq!(ctx(&["av1", "av2", "av3"]), MergeContext::OnlyVariables);
        assert_eq!(ctx(&["A1", "A2"]), MergeContext::OnlyMethods);
        assert_eq!(ctx(&["A1", "av1"]), MergeContext::Mixed);
        assert_eq!(MergeContext::Mixed.number(), 5);
    }

    #[test]
    fn mergeable_rules() {
        let g = stray_field();
        assert!(is_mergeable(
            &cluster(&g, 6, &["av1", "av2", "av3", "av4"]),
            &g,
            2
        ));
        assert!(!is_mergeable(&cluster(&g, 0, &["A1", "A4", "A3"]), &g, 2));
        assert!(!is_mergeable(
            &cluster(&g, 4, &["A5", "A6", "av3", "av4"]),
            &g,
            2
        ));
        assert!(is_mergeable(&cluster(&g, 0, &["A1"]), &g, 2));
        assert!(is_mergeable(&cluster(&g, 0, &["A1", "A2", "A3"]), &g, 4));
    }

    #[test]
    fn score_combines_metrics() {
        let g = stray_field();
        let av2 = cluster(&g, 7, &["av2"]);
        let g3 = cluster(&g, 0, &["A1", "A2", "A3", "A4", "av1"]);
        let s = score_merge(&av2, &g3, &g, &CimWeights::default()).unwrap();
        assert_eq!(s.combined, 0.75);
        assert_eq!(s.members[0].cim_v, Some(0.75));

        let lonely = ClassGraphBuilder::new("C")
            .method("a")
            .method("b")
            .build()
            .unwrap();
        let s = score_merge(
            &Cluster::singleton(MemberId(0)),
            &Cluster::singleton(MemberId(1)),
            &lonely,
            &CimWeights::default(),
        )
        .unwrap();
        // c_m and i_m both 0, no fields so vr_m is skipped
        assert_eq!(s.combined, 0.0);
        assert_eq!(s.members[0].cim_vr_m, None);
    }

    #[test]
    fn stray_field_merge() {
        let g = stray_field();
        let p = Partition::new(
            vec![
                cluster(&g, 0, &["A1", "A2", "A3", "A4", "av1"]),
                cluster(&g, 4, &["A5", "A6", "av3", "av4"]),
                cluster(&g, 7, &["av2"]),
            ],
            g.len(),
        )
        .unwrap();
        let (merged, log) = merge_small_clusters(&p, &g, &MergeOptions::default()).unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(
            merged.cluster(0).unwrap().members,
            cluster(&g, 0, &["A1", "A2", "A3", "A4", "av1", "av2"]).members
        );
        assert_eq!(log.steps.len(), 1);
        assert_eq!(log.steps[0].target, Some(0));
        assert!(!log.steps[0].tie);

        let (again, log) = merge_small_clusters(&merged, &g, &MergeOptions::default()).unwrap();
        assert_eq!(again, merged);
        assert!(log.is_empty());
    }

    #[test]
    fn no_target_leaves_source() {
        let g = ClassGraphBuilder::new("C")
            .field("x")
            .field("y")
            .build()
            .unwrap();
        let p = Partition::singletons(2);
        let (merged, log) = merge_small_clusters(&p, &g, &MergeOptions::default()).unwrap();
        assert_eq!(merged, p);
        assert_eq!(log.steps.len(), 2);
        assert!(log.steps.iter().all(|s| s.target.is_none()));
    }

    #[test]
    fn partition_must_match_graph() {
        let g = stray_field();
        let p = Partition::singletons(3);
        assert!(merge_small_clusters(&p, &g, &MergeOptions::default()).is_err());
    }
}
