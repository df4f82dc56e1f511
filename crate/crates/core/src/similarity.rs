//! Property sets and the Jaccard similarity matrix over class members.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassGraph, MemberId, MemberKind};

/// A member's dependency footprint. Always contains its owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySet {
    pub owner: MemberId,
    pub properties: BTreeSet<MemberId>,
}

impl PropertySet {
    pub fn jaccard(&self, other: &PropertySet) -> f64 {
        jaccard(&self.properties, &other.properties)
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }
}

/// Builds the property set of `member` from direct edges only.
///
/// A method owns itself, the fields it references and the methods it calls.
/// A field owns itself and the methods that reference it.
pub fn property_set(member: MemberId, graph: &ClassGraph) -> Result<PropertySet> {
    let kind = graph.member(member)?.kind;
    let mut properties = BTreeSet::from([member]);
    match kind {
        MemberKind::Method => {
            properties.extend(graph.field_refs(member));
            properties.extend(graph.calls(member));
        }
        MemberKind::Field => {
            properties.extend(graph.methods().filter(|&m| graph.references(m, member)));
        }
    }
    Ok(PropertySet {
        owner: member,
        properties,
    })
}

/// `|A ∩ B| / |A ∪ B|`. Two empty sets count as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let shared = a.intersection(b).count();
    let union = a.len() + b.len() - shared;
    if union == 0 {
        1.0
    } else {
        shared as f64 / union as f64
    }
}

/// Name and kind of one matrix row/column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub name: String,
    pub kind: MemberKind,
}

/// Symmetric m×m matrix of similarities in `[0, 1]` with a unit diagonal.
///
/// Row `i` corresponds to `MemberId(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<Label>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates a row-major matrix.
    pub fn new(labels: Vec<Label>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} labels but {} values",
                n,
                values.len()
            )));
        }
        let mut names = BTreeSet::new();
        for label in &labels {
            if !names.insert(label.name.as_str()) {
                return Err(Error::DuplicateMember(label.name.clone()));
            }
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry for `{}` is {}, expected 1",
                    labels[i].name,
                    values[i * n + i]
                )));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) = {} outside [0, 1]",
                        labels[i].name, labels[j].name, v
                    )));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) is not symmetric",
                        labels[i].name, labels[j].name
                    )));
                }
            }
        }
        Ok(SimilarityMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, id: MemberId) -> &Label {
        &self.labels[id.0]
    }

    pub fn get(&self, a: MemberId, b: MemberId) -> f64 {
        self.values[a.0 * self.labels.len() + b.0]
    }

    pub fn row(&self, a: MemberId) -> &[f64] {
        let n = self.labels.len();
        &self.values[a.0 * n..(a.0 + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index_of(&self, name: &str) -> Option<MemberId> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .map(MemberId)
    }

    /// Reorders rows and columns so that new row `i` is old row `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut check: Vec<usize> = order.to_vec();
        check.sort_unstable();
        if check.len() != n || check.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidMatrix("not a permutation".into()));
        }
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        let mut values = Vec::with_capacity(n * n);
        for &i in order {
            for &j in order {
                values.push(self.values[i * n + j]);
            }
        }
        Ok(SimilarityMatrix { labels, values })
    }
}

/// Jaccard similarity of every pair of member property sets.
pub fn similarity_matrix(graph: &ClassGraph) -> Result<SimilarityMatrix> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sets = graph
        .ids()
        .map(|id| property_set(id, graph))
        .collect::<Result<Vec<_>>>()?;
    let n = sets.len();
    let mut values = alloc::vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let s = sets[i].jaccard(&sets[j]);
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    let labels = graph
        .members()
        .iter()
        .map(|m| Label {
            name: m.name.clone(),
            kind: m.kind,
        })
        .collect();
    Ok(SimilarityMatrix { labels, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn isolated_field_is_self_only() {
        let g = ClassGraph::builder("C")
            .field("f")
            .method("m")
            .build()
            .unwrap();
        let ps = property_set(MemberId(0), &g).unwrap();
        assert_eq!(ps.properties, BTreeSet::from([MemberId(0)]));
    }

    #[test]
    fn method_set_is_direct_union() {
        let g = ClassGraph::builder("C")
            .method("m")
            .field("x")
            .method("n")
            .uses("m", "x")
            .call("m", "n")
            .build()
            .unwrap();
        let ps = property_set(MemberId(0), &g).unwrap();
        assert_eq!(
            ps.properties,
            BTreeSet::from([MemberId(0), MemberId(1), MemberId(2)])
        );
    }

    #[test]
    fn field_set_lists_referencing_methods() {
        let g = ClassGraph::builder("C")
            .method("m1")
            .method("m2")
            .field("x")
            .uses("m1", "x")
            .uses("m2", "x")
            .build()
            .unwrap();
        // x is referenced by m1 and m2: {x, m1, m2}
        let ps = property_set(MemberId(2), &g).unwrap();
        assert_eq!(
            ps.properties,
            BTreeSet::from([MemberId(0), MemberId(1), MemberId(2)])
        );
        assert!(property_set(MemberId(3), &g).is_err());
    }

    #[test]
    fn call_chains_are_not_followed() {
        let g = ClassGraph::builder("C")
            .method("a")
            .method("b")
            .field("x")
            .call("a", "b")
            .uses("b", "x")
            .build()
            .unwrap();
        let ps = property_set(MemberId(0), &g).unwrap();
        assert!(!ps.properties.contains(&MemberId(2)));
    }

    #[test]
    fn jaccard_values() {
        assert_eq!(jaccard(&set(&[1, 2]), &set(&[1, 2])), 1.0);
        assert_eq!(jaccard(&set(&[1]), &set(&[2])), 0.0);
        // p,q,r vs q,r,s: 2 shared of 4
        assert_eq!(jaccard(&set(&[1, 2, 3]), &set(&[2, 3, 4])), 0.5);
        assert_eq!(jaccard::<u32>(&set(&[]), &set(&[])), 1.0);
    }

    #[test]
    fn matrix_shapes() {
        let one = ClassGraph::builder("C").field("x").build().unwrap();
        let m = similarity_matrix(&one).unwrap();
        assert_eq!(m.values(), &[1.0]);

        let two = ClassGraph::builder("C")
            .field("x")
            .field("y")
            .build()
            .unwrap();
        let m = similarity_matrix(&two).unwrap();
        assert_eq!(m.get(MemberId(0), MemberId(1)), 0.0);

        let empty = ClassGraph::builder("C").build().unwrap();
        assert_eq!(similarity_matrix(&empty), Err(Error::EmptyGraph));
    }

    #[test]
    fn matrix_validation() {
        let labels = |n: usize| -> Vec<Label> {
            (0..n)
                .map(|i| Label {
                    name: format!("x{i}"),
                    kind: MemberKind::Field,
                })
                .collect()
        };
        assert!(SimilarityMatrix::new(labels(2), vec![1.0, 0.5, 0.5, 1.0]).is_ok());
        assert!(SimilarityMatrix::new(labels(2), vec![1.0, 0.5, 0.4, 1.0]).is_err());
        assert!(SimilarityMatrix::new(labels(2), vec![0.9, 0.5, 0.5, 1.0]).is_err());
        assert!(SimilarityMatrix::new(labels(2), vec![1.0, 1.5, 1.5, 1.0]).is_err());
        assert!(SimilarityMatrix::new(labels(2), vec![1.0, f64::NAN, f64::NAN, 1.0]).is_err());
        assert!(SimilarityMatrix::new(labels(2), vec![1.0]).is_err());
    }

    #[test]
    fn permutation_moves_entries() {
        let labels = ["a", "b", "c"]
            .iter()
            .map(|n| Label {
                name: (*n).into(),
                kind: MemberKind::Field,
            })
            .collect();
        let m = SimilarityMatrix::new(labels, vec![1.0, 0.1, 0.2, 0.1, 1.0, 0.3, 0.2, 0.3, 1.0])
            .unwrap();
        let p = m.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.label(MemberId(0)).name, "c");
        assert_eq!(p.get(MemberId(0), MemberId(2)), 0.3);
        assert!(m.permuted(&[0, 0, 1]).is_err());
    }
}
