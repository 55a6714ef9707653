use alloc::string::String;

/// Input and resource errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("atom {atom} is outside the universe of {universe} atoms")]
    AtomOutOfRange { atom: usize, universe: usize },

    #[error("universe of {requested} atoms exceeds the cap of {cap}")]
    UniverseTooLarge { requested: usize, cap: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("not a bijection on the atoms")]
    NotAPermutation,

    #[error("permutation acts on {perm} atoms but the universe has {universe}")]
    PermutationSize { perm: usize, universe: usize },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("no arrow between the given objects")]
    NoArrow,

    #[error("set {0} is not a member of the family")]
    NotAMember(String),

    #[error("enumeration would exceed the pool cap of {cap} families")]
    PoolCapExceeded { cap: usize },

    #[error("operation requires mode {expected}")]
    WrongMode { expected: &'static str },

    #[error("member of size {size} is not below the size bound {bound}")]
    OversizedMember { size: usize, bound: usize },

    #[error("invalid covering problem: {0}")]
    InvalidCovProblem(String),

    #[error("diagram edge {from} -> {to} is invalid: {reason}")]
    InvalidEdge { from: usize, to: usize, reason: &'static str },

    #[error("the diagram has no {0} in this mode")]
    LimitAbsent(&'static str),
}
