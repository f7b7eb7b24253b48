use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not a usable prime modulus")]
    NotPrime(u64),
    #[error("denominator {0} vanishes in the ground field")]
    ZeroDenominator(String),
    #[error("malformed scalar literal `{0}`")]
    BadLiteral(String),
}

/// Failures while reading a presentation file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: relation mixes (source, target) pairs {first} and {second}")]
    NonHomogeneousRelation {
        line: usize,
        first: String,
        second: String,
    },
    #[error("line {line}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: path `{path}` is not composable")]
    NonComposablePath { line: usize, path: String },
    #[error("line {line}: {source}")]
    Scalar {
        line: usize,
        #[source]
        source: ScalarError,
    },
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("irreducible monomials of degree {bound} remain (e.g. `{witness}`); finiteness not established")]
    NotFiniteWithinBound { bound: usize, witness: String },
    #[error("completion exceeded the cap of {cap} rules")]
    CompletionOverflow { cap: usize },
    #[error("degree bound {bound} is below the maximal relation degree {needed}")]
    BoundTooSmall { bound: usize, needed: usize },
    #[error("expression is not composable: {0}")]
    NotComposable(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vector does not lie in the module")]
    VectorOutOfSpace,
    #[error("subspace is not stable under the action")]
    NotStable,
    #[error("algebra is not finite-dimensional within the degree bound")]
    NotFinite,
    #[error("modules live over different algebras or sides")]
    Incompatible,
    #[error("table invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StratError {
    #[error("poset has {0} elements; exhaustive enumeration is limited to 20")]
    TooLarge(usize),
    #[error("{0} is not an initial segment")]
    NotInitialSegment(String),
    #[error("order relation is cyclic through `{0}`")]
    CyclicOrder(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("no filtration found: {0}")]
    NoFiltrationFound(String),
    #[error("dim e_{vertex}V = {have} is not a multiple of dim e_{vertex}M_{vertex} = {unit}")]
    DivisibilityFailure {
        vertex: String,
        have: usize,
        unit: usize,
    },
    #[error("hypotheses violated: {0}")]
    HypothesisViolated(String),
    #[error("witness failure: {0}")]
    WitnessFailure(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologicalError {
    #[error("hypotheses violated: {0}")]
    HypothesisViolated(String),
    #[error("certificate failure at row {0}")]
    CertificateFailure(String),
    #[error("module support {support:?} is not contained in the segment {segment:?}")]
    NotTruncatedModule {
        support: Vec<String>,
        segment: Vec<String>,
    },
    #[error("resolution invariant violated: {0}")]
    Resolution(String),
    #[error(transparent)]
    Strat(#[from] StratError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Any error surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Strat(#[from] StratError),
    #[error(transparent)]
    Homological(#[from] HomologicalError),
}
