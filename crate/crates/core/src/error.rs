use thiserror::Error;

/// Errors raised by field construction, set algebra and the searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of size {q} exceeds the configured cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("encoding {value} is not an element of a field of size {q}")]
    ElementOutOfRange { value: u64, q: u64 },
    #[error("elements belong to different fields")]
    FieldMismatch,

    #[error("subgroup index {d} does not divide {order}")]
    IndexNotDividing { d: u64, order: u64 },
    #[error("coset index {d} does not divide q + 1 = {q_plus_one}")]
    IndexNotDividingQPlus1 { d: u64, q_plus_one: u64 },
    #[error("exponent set is empty")]
    EmptyExponentSet,
    #[error("exponent {m} is outside [0, {d})")]
    ExponentOutOfRange { m: u32, d: u32 },
    #[error("exponent {0} appears more than once")]
    DuplicateExponent(u32),

    #[error("a point set needs at least two points")]
    TooFewPoints,
    #[error("point set contains a repeated point")]
    DuplicatePoint,
    #[error("value table has length {got}, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("the set contains zero")]
    ZeroInSet,

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("search space of size {size} exceeds the cap {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not found: {0}")]
    NotFound(String),

    #[error("two clique points share the x-coordinate {x}")]
    NotAGraph { x: u32 },
    #[error("the basis vector v lies in S or is zero")]
    VInS,
}

pub type Result<T> = std::result::Result<T, Error>;
