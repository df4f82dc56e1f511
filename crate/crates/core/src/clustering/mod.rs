//! Hierarchical agglomerative clustering with a similarity cut-off.
//!
//! Clustering always runs to a single root so one [`Dendrogram`] can be cut
//! at any threshold, while the returned partition honors the requested cut.

mod dendrogram;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cluster, MemberId, Partition};
use crate::similarity::SimilarityMatrix;

pub use dendrogram::{render_dendrogram, Dendrogram, DendrogramFormat, Merge, Node};

/// Inter-cluster similarity rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Most similar cross pair.
    Single,
    /// Least similar cross pair.
    #[default]
    Complete,
    /// Mean over all cross pairs (UPGMA).
    Average,
    /// Mean of the two children's similarities to the other cluster (WPGMA).
    Weighted,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Weighted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Linkage {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Linkage::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| alloc::format!("unknown linkage `{s}`"))
    }
}

/// Similarity between two disjoint, non-empty member sets.
///
/// The result does not depend on argument order. For [`Linkage::Weighted`],
/// which depends on merge history, a set with no recorded history is treated
/// as built by adding its members one at a time in id order;
/// [`agglomerate`] uses the actual history instead.
pub fn cluster_similarity(
    a: &BTreeSet<MemberId>,
    b: &BTreeSet<MemberId>,
    matrix: &SimilarityMatrix,
    linkage: Linkage,
) -> f64 {
    // Canonical orientation keeps floating-point summation order fixed.
    let (a, b) = if a.first() <= b.first() {
        (a, b)
    } else {
        (b, a)
    };
    let cross = || {
        a.iter()
            .flat_map(|&i| b.iter().map(move |&j| matrix.get(i, j)))
    };
    match linkage {
        Linkage::Single => cross().fold(f64::NEG_INFINITY, f64::max),
        Linkage::Complete => cross().fold(f64::INFINITY, f64::min),
        Linkage::Average => cross().sum::<f64>() / (a.len() * b.len()) as f64,
        Linkage::Weighted => {
            let a: Vec<_> = a.iter().copied().collect();
            let b: Vec<_> = b.iter().copied().collect();
            weighted_fold(&a, &b, matrix)
        }
    }
}

fn weighted_fold(a: &[MemberId], b: &[MemberId], matrix: &SimilarityMatrix) -> f64 {
    match (a.len(), b.len()) {
        (1, 1) => matrix.get(a[0], b[0]),
        (n, _) if n > 1 => {
            (weighted_fold(&a[..n - 1], b, matrix) + weighted_fold(&a[n - 1..], b, matrix)) / 2.0
        }
        (_, n) => {
            (weighted_fold(a, &b[..n - 1], matrix) + weighted_fold(a, &b[n - 1..], matrix)) / 2.0
        }
    }
}

/// Partition at a threshold together with the full merge tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub partition: Partition,
    pub threshold: f64,
    pub linkage: Linkage,
    pub dendrogram: Dendrogram,
}

impl CutResult {
    /// Merges that were applied to build the partition, in order.
    pub fn merges_in_cut(&self) -> impl Iterator<Item = &Merge> {
        self.dendrogram.merges().iter().filter(|m| !m.below_cut)
    }
}

/// Clusters `matrix` bottom-up, merging the most similar pair while its
/// linkage similarity is at least `threshold`.
///
/// Ties on exactly equal similarity go to the pair with the lowest first
/// cluster id, then the lowest second id. A merged cluster takes the smaller
/// of its children's ids; singletons start with their member index.
pub fn agglomerate(
    matrix: &SimilarityMatrix,
    linkage: Linkage,
    threshold: f64,
) -> Result<CutResult> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let n = matrix.len();
    let names = matrix.labels().iter().map(|l| l.name.clone()).collect();

    // Slot i holds the active cluster whose id is i.
    let mut active = alloc::vec![true; n];
    let mut members: Vec<BTreeSet<MemberId>> =
        (0..n).map(|i| BTreeSet::from([MemberId(i)])).collect();
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut sims = matrix.values().to_vec();

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut partition = None;

    for _ in 1..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                let s = sims[i * n + j];
                if best.is_none_or(|(b, _, _)| s > b) {
                    best = Some((s, i, j));
                }
            }
        }
        let (s, i, j) = best.expect("at least two active clusters");

        if let (Linkage::Complete | Linkage::Single, Some(prev)) = (linkage, merges.last()) {
            let prev: &Merge = prev;
            debug_assert!(s <= prev.similarity, "merge similarities must not increase");
        }

        if partition.is_none() && s < threshold {
            partition = Some(snapshot(&active, &members, n));
        }

        merges.push(Merge {
            left: node_of[i],
            right: node_of[j],
            similarity: s,
            cluster_id: i,
            size: members[i].len() + members[j].len(),
            below_cut: partition.is_some(),
        });

        let absorbed = core::mem::take(&mut members[j]);
        members[i].extend(absorbed);
        active[j] = false;
        node_of[i] = n + merges.len() - 1;

        for k in (0..n).filter(|&k| active[k] && k != i) {
            let updated = match linkage {
                Linkage::Single => sims[i * n + k].max(sims[j * n + k]),
                Linkage::Complete => sims[i * n + k].min(sims[j * n + k]),
                Linkage::Average => cluster_similarity(&members[i], &members[k], matrix, linkage),
                Linkage::Weighted => (sims[i * n + k] + sims[j * n + k]) / 2.0,
            };
            sims[i * n + k] = updated;
            sims[k * n + i] = updated;
        }
    }

    let partition = partition.unwrap_or_else(|| snapshot(&active, &members, n));
    Ok(CutResult {
        partition,
        threshold,
        linkage,
        dendrogram: Dendrogram::new(names, merges),
    })
}

fn snapshot(active: &[bool], members: &[BTreeSet<MemberId>], n: usize) -> Partition {
    let clusters = (0..n)
        .filter(|&i| active[i])
        .map(|i| Cluster {
            id: i,
            members: members[i].clone(),
        })
        .collect();
    Partition::new(clusters, n).expect("agglomeration preserves the partition invariant")
}
