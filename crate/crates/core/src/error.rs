use thiserror::Error;

/// Errors raised by curve construction and the analyses built on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no vertices")]
    NoVertices,
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("the dual graph is disconnected")]
    Disconnected,
    #[error("curve has {count} vertices; at most {cap} are supported here")]
    TooManyVertices { count: usize, cap: usize },
    #[error("empty subcurve")]
    EmptySubcurve,
    #[error("subcurve must be proper")]
    NotProper,
    #[error("subcurve {0} is not connected")]
    SubcurveDisconnected(String),
    #[error("subcurve {0} is not a tail")]
    NotATail(String),
    #[error("subcurve {0} is not a spine")]
    NotSpine(String),
    #[error("bridge `{0}` is not a splitting node")]
    NotSplitting(String),
    #[error("curve is not G-stable")]
    NotGStable,
    #[error("curve has genus 0")]
    GenusZero,
    #[error("symbol `{symbol}` does not lie on vertex `{vertex}`")]
    MisplacedSymbol { symbol: String, vertex: String },
    #[error("expected a locally free sheaf")]
    NotLocallyFree,
    #[error("sheaves live on different curves")]
    DifferentCurves,
    #[error("the canonical polarization is only defined in degree 0 on genus-1 curves (got d={0})")]
    GenusOneDegree(i64),
    #[error("operation requires genus at least 2")]
    GenusTooSmall,
    #[error("a base point is required")]
    MissingBase,
    #[error("a base point must be a smooth point")]
    BaseNotSmooth,
    #[error("Seshadri weights are required")]
    MissingWeights,
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("sheaf is not locally free at crossing edge `{0}`")]
    NonfreeCrossing(String),
    #[error("pieces do not form a spine decomposition: {0}")]
    BadDecomposition(String),
    #[error("sheaf is not semistable")]
    NotSemistable,
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
