use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("covers contain a directed cycle through `{0}`")]
    DirectedCycle(String),
    #[error("cover `{0} < {1}` is implied by other covers")]
    RedundantCover(String, String),
    #[error("posets are limited to 64 elements, got {0}")]
    TooLarge(usize),
    #[error("glued posets must share exactly one element, they share {0}")]
    BadIntersection(usize),
    #[error("enumeration exceeds the configured bound of {bound}")]
    SizeLimit { bound: usize },
    #[error("not a maximal bipartite subgraph of the Hasse diagram")]
    NotMaximalBipartite,
    #[error("total masses differ: {0} vs {1}")]
    MassMismatch(String, String),
    #[error("mixing weight {0} is outside (0, 1]")]
    ThetaOutOfRange(String),
    #[error("measure support does not match the poset")]
    SupportMismatch,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("uniformization rate {lambda} is below the maximal exit rate {exit}")]
    LambdaTooSmall { lambda: String, exit: String },
    #[error("poset is not acyclic")]
    NotAcyclic,
    #[error("poset is not connected")]
    NotConnected,
    #[error("system is not stochastically monotone")]
    NotStochasticallyMonotone,
    #[error("measures are not stochastically ordered")]
    NotOrdered,
    #[error("distribution on the index tree is not interlaced with the target")]
    NotInterlaced,
    #[error("poset is not in W-class")]
    NotWClass,
    #[error("index poset needs a minimum and a maximum element")]
    NoExtremes,
    #[error("poset is not a Y-glued bipartite")]
    NotYGluedBipartite,
    #[error("poset is not a W-glued diamond")]
    NotWGluedDiamond,
    #[error("no midpoint measure exists between the bipartite rows")]
    MidpointInfeasible,
    #[error("construction hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("marginals at the shared index differ")]
    MarginalMismatch,
    #[error("extension rule covers neither clause for `{0}`")]
    RuleGap(String),
    #[error("index {0} is not part of the plane tree")]
    BadIndex(usize),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
