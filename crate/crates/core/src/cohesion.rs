//! LCOM and TCC over a whole class or an extracted subset of its members.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{ClassGraph, MemberId};

/// A class graph restricted to a member subset. Edges leaving the subset are
/// ignored.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    graph: &'a ClassGraph,
    subset: Option<&'a BTreeSet<MemberId>>,
}

impl<'a> View<'a> {
    pub fn whole(graph: &'a ClassGraph) -> Self {
        View {
            graph,
            subset: None,
        }
    }

    pub fn subset(graph: &'a ClassGraph, members: &'a BTreeSet<MemberId>) -> Self {
        View {
            graph,
            subset: Some(members),
        }
    }

    fn includes(&self, id: MemberId) -> bool {
        self.subset.is_none_or(|s| s.contains(&id))
    }

    pub fn methods(&self) -> Vec<MemberId> {
        self.graph.methods().filter(|&m| self.includes(m)).collect()
    }

    fn used_fields(&self, method: MemberId) -> BTreeSet<MemberId> {
        self.graph
            .field_refs(method)
            .iter()
            .copied()
            .filter(|&f| self.includes(f))
            .collect()
    }

    /// Fields reached from `method` directly or through in-view call chains.
    fn reachable_fields(&self, method: MemberId) -> BTreeSet<MemberId> {
        let mut seen = BTreeSet::from([method]);
        let mut stack = alloc::vec![method];
        let mut fields = BTreeSet::new();
        while let Some(m) = stack.pop() {
            fields.extend(self.used_fields(m));
            for &callee in self.graph.calls(m) {
                if self.includes(callee) && seen.insert(callee) {
                    stack.push(callee);
                }
            }
        }
        fields
    }
}

/// How TCC decides that two methods are connected.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TccMode {
    /// Shared directly referenced field.
    #[default]
    Direct,
    /// Shared field, counting fields reached through calls within the view.
    Closure,
}

impl FromStr for TccMode {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(TccMode::Direct),
            "closure" | "callclosure" => Ok(TccMode::Closure),
            _ => Err(alloc::format!("unknown TCC mode `{s}`")),
        }
    }
}

impl fmt::Display for TccMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TccMode::Direct => "direct",
            TccMode::Closure => "closure",
        })
    }
}

fn pair_counts(sets: &[BTreeSet<MemberId>]) -> (usize, usize) {
    let mut disjoint = 0;
    let mut sharing = 0;
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if a.is_disjoint(b) {
                disjoint += 1;
            } else {
                sharing += 1;
            }
        }
    }
    (disjoint, sharing)
}

/// Chidamber–Kemerer LCOM: pairs with disjoint field use minus pairs sharing
/// a field, floored at zero.
pub fn lcom(view: View<'_>) -> usize {
    let sets: Vec<_> = view
        .methods()
        .into_iter()
        .map(|m| view.used_fields(m))
        .collect();
    let (disjoint, sharing) = pair_counts(&sets);
    disjoint.saturating_sub(sharing)
}

/// Tight class cohesion: fraction of method pairs that share a field.
/// `None` with fewer than two methods.
pub fn tcc(view: View<'_>, mode: TccMode) -> Option<f64> {
    let sets: Vec<_> = view
        .methods()
        .into_iter()
        .map(|m| match mode {
            TccMode::Direct => view.used_fields(m),
            TccMode::Closure => view.reachable_fields(m),
        })
        .collect();
    let (disjoint, connected) = pair_counts(&sets);
    let pairs = disjoint + connected;
    (pairs > 0).then(|| connected as f64 / pairs as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    LowCohesion,
    Acceptable,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LowCohesion => "low-cohesion",
            Verdict::Acceptable => "acceptable",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohesionThresholds {
    /// LCOM strictly above this counts against the class.
    pub lcom: usize,
    /// TCC strictly below this counts against the class.
    pub tcc: f64,
    pub mode: TccMode,
}

impl Default for CohesionThresholds {
    fn default() -> Self {
        CohesionThresholds {
            lcom: 0,
            tcc: 0.5,
            mode: TccMode::Direct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohesionReport {
    pub lcom: usize,
    pub tcc: Option<f64>,
    pub method_count: usize,
    pub verdict: Verdict,
}

impl CohesionReport {
    pub fn is_low(&self) -> bool {
        self.verdict == Verdict::LowCohesion
    }
}

/// Low cohesion iff LCOM exceeds its threshold and TCC falls below its
/// threshold. Indeterminate when TCC is undefined.
pub fn assess(view: View<'_>, thresholds: &CohesionThresholds) -> CohesionReport {
    let lcom = lcom(view);
    let tcc = tcc(view, thresholds.mode);
    CohesionReport {
        lcom,
        tcc,
        method_count: view.methods().len(),
        verdict: verdict(lcom, tcc, thresholds),
    }
}

pub fn verdict(lcom: usize, tcc: Option<f64>, thresholds: &CohesionThresholds) -> Verdict {
    match tcc {
        None => Verdict::Indeterminate,
        Some(t) if lcom > thresholds.lcom && t < thresholds.tcc => Verdict::LowCohesion,
        Some(_) => Verdict::Acceptable,
    }
}
