use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient size mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("label {label} outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("sets are not pairwise disjoint (label {0} repeated)")]
    NotDisjoint(usize),
    #[error("empty set where a nonempty one is required: {0}")]
    EmptySet(&'static str),
    #[error("R, S, T are not cyclically separated")]
    NotSeparated,
    #[error("a+b+c = {0} is odd")]
    Parity(usize),
    #[error("size mismatch: a+b+c+2d = {got}, expected 2k = {expected}")]
    Size { got: usize, expected: usize },
    #[error("box sizes would be negative (a={a}, b={b}, c={c})")]
    NegativeBox { a: usize, b: usize, c: usize },
    #[error("web is decomposable: box sizes ({0}, {1}, {2}) contain a zero")]
    Decomposable(usize, usize, usize),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("malformed profile: {0}")]
    MalformedProfile(String),
    #[error("profile has {0} boxes, expected 3")]
    NotThreeBoxes(usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("truncation order {0} too small for this computation")]
    TruncationTooSmall(usize),
    #[error("basis is not closed under multiplication")]
    NotClosed,
    #[error("no admissible V-assignment: white vertex capacity exhausted")]
    InvalidWeb,
    #[error("point is rank-degenerate")]
    DegeneratePoint,
    #[error("module relation fails: {0}")]
    Relation(String),
    #[error("modules live over different algebras: ({0},{1}) vs ({2},{3})")]
    SpecMismatch(usize, usize, usize, usize),
    #[error("not a two-contour module: {0}")]
    NotTwoContour(String),
    #[error("identity fails: {0}")]
    IdentityFailure(String),
    #[error("short exact sequence check failed: {0}")]
    Ses(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
