//! Class member dependency graph and the cluster/partition types shared by
//! every stage.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a member inside one [`ClassGraph`], in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MemberId(pub usize);

impl MemberId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberKind {
    Method,
    Field,
}

impl MemberKind {
    pub fn is_method(self) -> bool {
        matches!(self, MemberKind::Method)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub id: MemberId,
    pub name: String,
    pub kind: MemberKind,
}

/// Returns true when `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A class's members and their intra-class reference and call edges.
///
/// Immutable once built. `field_refs` and `calls` are indexed by member; both
/// sets are empty for fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGraph {
    class_name: String,
    members: Vec<Member>,
    by_name: BTreeMap<String, MemberId>,
    field_refs: Vec<BTreeSet<MemberId>>,
    calls: Vec<BTreeSet<MemberId>>,
}

impl ClassGraph {
    pub fn builder(class_name: impl Into<String>) -> ClassGraphBuilder {
        ClassGraphBuilder::new(class_name)
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, id: MemberId) -> Result<&Member> {
        self.members
            .get(id.0)
            .ok_or_else(|| Error::UnknownMember(id.to_string()))
    }

    pub fn name(&self, id: MemberId) -> &str {
        &self.members[id.0].name
    }

    pub fn kind(&self, id: MemberId) -> MemberKind {
        self.members[id.0].kind
    }

    pub fn id_of(&self, name: &str) -> Option<MemberId> {
        self.by_name.get(name).copied()
    }

    pub fn contains(&self, id: MemberId) -> bool {
        id.0 < self.members.len()
    }

    pub fn methods(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.members
            .iter()
            .filter(|m| m.kind.is_method())
            .map(|m| m.id)
    }

    pub fn fields(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.members
            .iter()
            .filter(|m| !m.kind.is_method())
            .map(|m| m.id)
    }

    /// Fields directly referenced by `method`.
    pub fn field_refs(&self, method: MemberId) -> &BTreeSet<MemberId> {
        &self.field_refs[method.0]
    }

    /// Methods directly called by `method` (never contains `method` itself).
    pub fn calls(&self, method: MemberId) -> &BTreeSet<MemberId> {
        &self.calls[method.0]
    }

    pub fn references(&self, method: MemberId, field: MemberId) -> bool {
        self.field_refs[method.0].contains(&field)
    }

    pub fn calls_method(&self, caller: MemberId, callee: MemberId) -> bool {
        self.calls[caller.0].contains(&callee)
    }

    pub fn ref_edge_count(&self) -> usize {
        self.field_refs.iter().map(BTreeSet::len).sum()
    }

    pub fn call_edge_count(&self) -> usize {
        self.calls.iter().map(BTreeSet::len).sum()
    }

    /// Every member id, in declaration order.
    pub fn ids(&self) -> impl Iterator<Item = MemberId> + '_ {
        (0..self.members.len()).map(MemberId)
    }

    fn check(&self, id: MemberId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownMember(id.to_string()))
        }
    }

    /// Methods of `cluster`.
    pub fn methods_of(&self, cluster: &Cluster) -> Result<BTreeSet<MemberId>> {
        self.members_of_kind(cluster, MemberKind::Method)
    }

    /// Fields of `cluster`.
    pub fn fields_of(&self, cluster: &Cluster) -> Result<BTreeSet<MemberId>> {
        self.members_of_kind(cluster, MemberKind::Field)
    }

    fn members_of_kind(&self, cluster: &Cluster, kind: MemberKind) -> Result<BTreeSet<MemberId>> {
        let mut out = BTreeSet::new();
        for &id in &cluster.members {
            self.check(id)?;
            if self.kind(id) == kind {
                out.insert(id);
            }
        }
        Ok(out)
    }
}

/// Collects declarations by name and resolves them in [`ClassGraphBuilder::build`].
///
/// Edges may reference members declared later. Self-calls are dropped and
/// repeated edges collapse.
#[derive(Debug, Clone, Default)]
pub struct ClassGraphBuilder {
    class_name: String,
    members: Vec<(String, MemberKind)>,
    field_refs: Vec<(String, String)>,
    calls: Vec<(String, String)>,
}

impl ClassGraphBuilder {
    pub fn new(class_name: impl Into<String>) -> Self {
        Self {
            class_name: class_name.into(),
            ..Self::default()
        }
    }

    pub fn member(mut self, name: impl Into<String>, kind: MemberKind) -> Self {
        self.add_member(name, kind);
        self
    }

    pub fn field(self, name: impl Into<String>) -> Self {
        self.member(name, MemberKind::Field)
    }

    pub fn method(self, name: impl Into<String>) -> Self {
        self.member(name, MemberKind::Method)
    }

    pub fn uses(mut self, method: impl Into<String>, field: impl Into<String>) -> Self {
        self.add_use(method, field);
        self
    }

    pub fn call(mut self, caller: impl Into<String>, callee: impl Into<String>) -> Self {
        self.add_call(caller, callee);
        self
    }

    pub fn add_member(&mut self, name: impl Into<String>, kind: MemberKind) {
        self.members.push((name.into(), kind));
    }

    pub fn add_use(&mut self, method: impl Into<String>, field: impl Into<String>) {
        self.field_refs.push((method.into(), field.into()));
    }

    pub fn add_call(&mut self, caller: impl Into<String>, callee: impl Into<String>) {
        self.calls.push((caller.into(), callee.into()));
    }

    pub fn build(self) -> Result<ClassGraph> {
        let mut by_name = BTreeMap::new();
        let mut members = Vec::with_capacity(self.members.len());
        for (index, (name, kind)) in self.members.into_iter().enumerate() {
            if !is_identifier(&name) {
                return Err(Error::InvalidName(name));
            }
            if by_name.insert(name.clone(), MemberId(index)).is_some() {
                return Err(Error::DuplicateMember(name));
            }
            members.push(Member {
                id: MemberId(index),
                name,
                kind,
            });
        }

        let lookup = |name: &str| -> Result<MemberId> {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownMember(name.into()))
        };

        let mut field_refs = alloc::vec![BTreeSet::new(); members.len()];
        for (method, field) in &self.field_refs {
            let (m, f) = (lookup(method)?, lookup(field)?);
            if !members[m.0].kind.is_method() || members[f.0].kind.is_method() {
                return Err(Error::kind_mismatch("uses", method, field));
            }
            field_refs[m.0].insert(f);
        }

        let mut calls = alloc::vec![BTreeSet::new(); members.len()];
        for (caller, callee) in &self.calls {
            let (a, b) = (lookup(caller)?, lookup(callee)?);
            if !members[a.0].kind.is_method() || !members[b.0].kind.is_method() {
                return Err(Error::kind_mismatch("calls", caller, callee));
            }
            if a != b {
                calls[a.0].insert(b);
            }
        }

        Ok(ClassGraph {
            class_name: self.class_name,
            members,
            by_name,
            field_refs,
            calls,
        })
    }
}

/// A concept: a non-empty group of members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub members: BTreeSet<MemberId>,
}

impl Cluster {
    pub fn new(id: usize, members: impl IntoIterator<Item = MemberId>) -> Result<Self> {
        let members: BTreeSet<_> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptyCluster(id));
        }
        Ok(Cluster { id, members })
    }

    pub fn singleton(member: MemberId) -> Self {
        Cluster {
            id: member.0,
            members: BTreeSet::from([member]),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: MemberId) -> bool {
        self.members.contains(&id)
    }
}

/// Disjoint clusters that together cover every member `0..member_count`.
///
/// Clusters are kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    clusters: Vec<Cluster>,
    member_count: usize,
}

impl Partition {
    pub fn new(mut clusters: Vec<Cluster>, member_count: usize) -> Result<Self> {
        let mut seen = alloc::vec![false; member_count];
        let mut ids = BTreeSet::new();
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::EmptyCluster(cluster.id));
            }
            if !ids.insert(cluster.id) {
                return Err(Error::InvalidPartition(alloc::format!(
                    "cluster id {} used twice",
                    cluster.id
                )));
            }
            for &m in &cluster.members {
                let slot = seen.get_mut(m.0).ok_or_else(|| {
                    Error::InvalidPartition(alloc::format!("member {m} out of range"))
                })?;
                if *slot {
                    return Err(Error::InvalidPartition(alloc::format!(
                        "member {m} in more than one cluster"
                    )));
                }
                *slot = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(alloc::format!(
                "member {} not covered",
                MemberId(missing)
            )));
        }
        clusters.sort_by_key(|c| c.id);
        Ok(Partition {
            clusters,
            member_count,
        })
    }

    pub fn singletons(member_count: usize) -> Self {
        Partition {
            clusters: (0..member_count)
                .map(|i| Cluster::singleton(MemberId(i)))
                .collect(),
            member_count,
        }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster(&self, id: usize) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    pub fn cluster_of(&self, member: MemberId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.contains(member))
    }

    /// Member sets only, for comparisons that ignore cluster ids.
    pub fn member_sets(&self) -> BTreeSet<BTreeSet<MemberId>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    pub fn into_clusters(self) -> Vec<Cluster> {
        self.clusters
    }
}
