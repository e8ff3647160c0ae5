use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclic set description at node {0}")]
    CyclicSet(usize),
    #[error("set description refers to missing node {0}")]
    DanglingNode(usize),
    #[error("stage {k} exceeds the configured bound {bound}")]
    StageBound { k: usize, bound: usize },
    #[error("ground model is not transitive: {0}")]
    NotTransitive(String),
    #[error("ground model does not contain the empty set")]
    MissingEmpty,
    #[error("bad set literal: {0}")]
    SetLiteral(String),

    #[error("unknown condition {0}")]
    UnknownCondition(String),
    #[error("duplicate condition identifier {0}")]
    DuplicateLabel(String),
    #[error("invalid preorder: {0}")]
    InvalidPreorder(String),
    #[error("preorder is not separative")]
    NotSeparative,
    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("completions come from different preorders")]
    MismatchedSources,
    #[error("orders disagree: {0}")]
    OrderDisagreement(String),
    #[error("not a Boolean algebra: {0}")]
    NotBoolean(String),

    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("unbound variable v{0}")]
    UnboundVariable(usize),
    #[error("wrong free variables: {0}")]
    FreeVariables(String),
    #[error("sequence length mismatch: {0}")]
    LengthMismatch(String),
    #[error("sequence is not appropriate")]
    NotAppropriate,
    #[error("unsupported construct: {0}")]
    Unsupported(String),

    #[error("name pool is not closed under subnames")]
    PoolNotClosed,
    #[error("filter is not generic")]
    NotGeneric,
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("name mentions condition {0} outside the stratum")]
    OutOfStratum(String),

    #[error("bounds exceeded: {0}")]
    BoundExceeded(String),
    #[error("height overflow: value {value} does not fit below {height}")]
    HeightOverflow { value: usize, height: usize },
    #[error("no free slot left for value {0}")]
    NoFreeSlot(usize),
    #[error("no fresh index below {0}")]
    NoFreshIndex(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent filter: {0}")]
    InconsistentFilter(String),
    #[error("extender broke its contract: {0}")]
    ExtenderContract(String),
    #[error("condition {0} has no counterpart in the iteration")]
    NotRepresentable(String),
    #[error("iteration names do not describe a preorder: {0}")]
    NotPreorderName(String),
}
