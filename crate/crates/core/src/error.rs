use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate member `{0}`")]
    DuplicateMember(String),
    #[error("unknown member `{0}`")]
    UnknownMember(String),
    #[error("{relation} edge `{from}` -> `{to}` connects members of the wrong kind")]
    KindMismatch {
        relation: &'static str,
        from: String,
        to: String,
    },
    #[error("invalid member name `{0}`")]
    InvalidName(String),
    #[error("class has no members")]
    EmptyGraph,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("target cluster {0} has no methods")]
    NoMethodsInTarget(usize),
    #[error("target cluster {0} has no fields")]
    NoFieldsInTarget(usize),
    #[error("member `{member}` already belongs to cluster {cluster}")]
    MemberInTarget { member: String, cluster: usize },
    #[error("invalid similarity matrix: {0}")]
    InvalidMatrix(String),
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
}

impl Error {
    pub(crate) fn kind_mismatch(relation: &'static str, from: &str, to: &str) -> Self {
        Error::KindMismatch {
            relation,
            from: from.into(),
            to: to.into(),
        }
    }
}
