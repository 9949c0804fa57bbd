use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("vector length {got} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weights must be non-negative, found {value} at ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, value: f64 },

    #[error("weight matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("vertex {0} has no in- or outgoing edge")]
    NoEdges(usize),

    #[error("operation requires a symmetric weight matrix")]
    SymmetryRequired,

    #[error("zero degree at vertex {0}")]
    ZeroDegree(usize),

    #[error("vanishing vertex weight chi at vertex {0}")]
    ZeroChi(usize),

    #[error("edge function is missing a value on edge ({0}, {1})")]
    MissingEdgeValue(usize, usize),

    #[error("isolated vertex {index}: no sample within the kernel support")]
    IsolatedVertex { index: usize },

    #[error("empty neighborhood: no sample within the kernel support of the query point")]
    EmptyNeighborhood,

    #[error("unknown kernel '{name}'; registered kernels: {known}")]
    UnknownKernel { name: String, known: String },

    #[error("unknown model '{name}'; registered models: {known}")]
    UnknownModel { name: String, known: String },

    #[error("unknown function '{name}'; registered functions: {known}")]
    UnknownFunction { name: String, known: String },

    #[error("unknown Laplacian kind '{0}'; expected rw, unnorm or norm")]
    UnknownKind(String),

    #[error("point is not on the manifold: {0}")]
    OffManifold(String),

    #[error("finite-difference stencil leaves the chart domain")]
    ChartDomain,

    #[error("quadrature did not converge: coarse {coarse} vs refined {refined}")]
    QuadratureNotConverged { coarse: f64, refined: f64 },

    #[error("limit operator cross-check failed: composed {composed} vs expanded {expanded}")]
    OracleInconsistent { composed: f64, expanded: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rate fit needs at least 3 distinct sample sizes, got {0}")]
    TooFewSizes(usize),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
