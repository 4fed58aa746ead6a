use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix is empty")]
    EmptyMatrix,
    #[error("non-finite distance at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("negative distance at ({0}, {1})")]
    NegativeEntry(usize, usize),
    #[error("nonzero diagonal entry at index {0}")]
    NonzeroDiagonal(usize),
    #[error("asymmetric matrix: d({0}, {1}) != d({1}, {0})")]
    AsymmetricMatrix(usize, usize),
    #[error("distinct points {0} and {1} are at distance zero")]
    CoincidentPoints(usize, usize),
    #[error("triangle inequality violated: d({0}, {1}) > d({0}, {2}) + d({2}, {1})")]
    TriangleViolation(usize, usize, usize),
    #[error("label count {labels} does not match matrix size {size}")]
    LabelCount { labels: usize, size: usize },
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),
    #[error("seed point {0} lies outside the host ball")]
    SeedOutsideBall(usize),
    #[error("point {0} lies outside the host ball of the net")]
    PointOutsideBall(usize),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("{images} images supplied for {points} domain points")]
    LengthMismatch { points: usize, images: usize },
    #[error("pairing requires k >= 1, got {0}")]
    NonpositiveK(i64),
    #[error("block {0} has mismatched dimensions")]
    DimensionMismatch(u64),
    #[error("exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("block isomorphism bounds [{0}, {1}] are not a subinterval of (0, 1]")]
    InvalidIsoBounds(f64, f64),
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("argument must be positive, got {0}")]
    NonpositiveArgument(f64),
    #[error("annulus {needed} is outside the constructed range [{min}, {max}]")]
    AnnulusOutOfRange { needed: i32, min: i32, max: i32 },
    #[error("point of norm {0} lies inside the punctured unit ball")]
    NormBelowOne(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("point {index} has dimension {got}, expected {expected}")]
    PointDimension { index: usize, got: usize, expected: usize },
    #[error("requested {requested} points exceeds the size cap {cap}")]
    SizeCapExceeded { requested: u128, cap: u128 },
    #[error("mapping domain does not match the expected grid: {0}")]
    DomainMismatch(String),
    #[error("could not generate a connected graph after {0} attempts")]
    DisconnectedGraph(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown input format: {0}")]
    UnknownFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
