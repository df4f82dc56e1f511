use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::model::{Cluster, MemberId, Partition};

/// One internal node. `left` and `right` are node indices: leaves occupy
/// `0..leaf_count`, merge `k` is node `leaf_count + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub similarity: f64,
    /// Id of the cluster formed by this merge.
    pub cluster_id: usize,
    pub size: usize,
    /// Set when the merge happened after the threshold stopped the cut.
    pub below_cut: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node<'a> {
    Leaf(MemberId),
    Merge(&'a Merge),
}

/// Binary merge tree over the matrix members, built to a single root.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    names: Vec<String>,
    merges: Vec<Merge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DendrogramFormat {
    #[default]
    Text,
    Dot,
}

impl Dendrogram {
    pub(crate) fn new(names: Vec<String>, merges: Vec<Merge>) -> Self {
        Dendrogram { names, merges }
    }

    pub fn leaf_count(&self) -> usize {
        self.names.len()
    }

    pub fn node_count(&self) -> usize {
        self.names.len() + self.merges.len()
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn name(&self, member: MemberId) -> &str {
        &self.names[member.0]
    }

    pub fn node(&self, index: usize) -> Node<'_> {
        if index < self.names.len() {
            Node::Leaf(MemberId(index))
        } else {
            Node::Merge(&self.merges[index - self.names.len()])
        }
    }

    pub fn root(&self) -> Option<usize> {
        match self.node_count() {
            0 => None,
            count => Some(count - 1),
        }
    }

    /// Leaves under `index`, in left-to-right order.
    pub fn leaves_under(&self, index: usize) -> Vec<MemberId> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![index];
        while let Some(i) = stack.pop() {
            match self.node(i) {
                Node::Leaf(m) => out.push(m),
                Node::Merge(m) => {
                    stack.push(m.right);
                    stack.push(m.left);
                }
            }
        }
        out
    }

    /// Replays merges in order while their similarity is at least `threshold`.
    pub fn cut(&self, threshold: f64) -> Partition {
        let n = self.names.len();
        let applied = self
            .merges
            .iter()
            .position(|m| m.similarity < threshold)
            .unwrap_or(self.merges.len());
        let children: BTreeSet<usize> = self.merges[..applied]
            .iter()
            .flat_map(|m| [m.left, m.right])
            .collect();
        let clusters = (0..n + applied)
            .filter(|node| !children.contains(node))
            .map(|node| {
                let id = match self.node(node) {
                    Node::Leaf(m) => m.0,
                    Node::Merge(m) => m.cluster_id,
                };
                Cluster {
                    id,
                    members: self.leaves_under(node).into_iter().collect(),
                }
            })
            .collect();
        Partition::new(clusters, n).expect("dendrogram cut is a partition")
    }

    /// Copy with `below_cut` flags recomputed for `threshold`.
    pub fn with_cut(&self, threshold: f64) -> Self {
        let mut out = self.clone();
        let mut stopped = false;
        for m in &mut out.merges {
            stopped |= m.similarity < threshold;
            m.below_cut = stopped;
        }
        out
    }

    /// True when no merge is more similar than the one before it.
    pub fn is_monotone(&self) -> bool {
        self.merges
            .windows(2)
            .all(|w| w[1].similarity <= w[0].similarity)
    }
}

/// Renders the tree as indented text or as a Graphviz digraph.
///
/// Text lists children under their parent, two spaces per level, with
/// internal nodes written as `@ s=<similarity>`. In DOT, leaves are
/// `n<member index>` and merge `k` is `n<leaf count + k>`.
pub fn render_dendrogram(dendrogram: &Dendrogram, format: DendrogramFormat) -> String {
    match format {
        DendrogramFormat::Text => render_text(dendrogram),
        DendrogramFormat::Dot => render_dot(dendrogram),
    }
}

fn render_text(d: &Dendrogram) -> String {
    let mut out = String::new();
    let Some(root) = d.root() else {
        return out;
    };
    let mut stack = alloc::vec![(root, 0usize)];
    while let Some((index, depth)) = stack.pop() {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match d.node(index) {
            Node::Leaf(m) => {
                out.push_str(d.name(m));
                out.push('\n');
            }
            Node::Merge(m) => {
                let _ = write!(out, "@ s={:.2}", m.similarity);
                if m.below_cut {
                    out.push_str(" (below cut)");
                }
                out.push('\n');
                stack.push((m.right, depth + 1));
                stack.push((m.left, depth + 1));
            }
        }
    }
    out
}

fn render_dot(d: &Dendrogram) -> String {
    let mut out = String::from("digraph dendrogram {\n  rankdir=TB;\n  node [shape=box];\n");
    for (i, name) in d.names.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(name));
    }
    let n = d.names.len();
    for (k, m) in d.merges.iter().enumerate() {
        let style = if m.below_cut { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  n{} [label=\"{:.2}\", shape=ellipse{style}];",
            n + k,
            m.similarity
        );
    }
    for (k, m) in d.merges.iter().enumerate() {
        let _ = writeln!(out, "  n{} -> n{};", n + k, m.left);
        let _ = writeln!(out, "  n{} -> n{};", n + k, m.right);
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out
}
