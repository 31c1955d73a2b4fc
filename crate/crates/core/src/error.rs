use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus {0:?} is not irreducible over F_p")]
    NotIrreducible(Vec<u64>),
    #[error("modulus {0:?} is irreducible but not primitive")]
    NotPrimitive(Vec<u64>),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("field order {q} exceeds the table budget {budget} and streaming was not requested")]
    TableBudgetExceeded { q: u64, budget: u64 },
    #[error("field order p^f overflows the supported range (p={p}, f={f})")]
    FieldTooLarge { p: u64, f: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("{sub} does not divide the extension degree {f}")]
    BadSubfield { sub: u32, f: u32 },
    #[error("{n} does not divide {order}")]
    BadDivisor { n: u64, order: u64 },
    #[error("{p} is not semi-primitive modulo {n}: {reason}")]
    NotSemiprimitive { p: u64, n: u64, reason: String },
    #[error("degenerate character: {0}")]
    DegenerateCharacter(String),
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("character values are not two-valued: {0:?}")]
    NotTwoValued(Vec<String>),
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("congruence condition fails: {0}")]
    BadModulusCongruence(String),
    #[error("gcd condition violated: gcd({n}, {cofactor}) != 1")]
    GcdConditionViolated { n: u64, cofactor: u64 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("{0} is not an odd prime power")]
    NotOddPrimePower(u64),
    #[error("parameters must be odd: {0}")]
    EvenParameters(String),
    #[error("frame selection failed: {0}")]
    FrameSelectionFailed(String),
    #[error("{what} too large for a full sweep ({size} > {limit}); use the orbit-reduced path")]
    TooLargeForFullSweep { what: String, size: u128, limit: u128 },
    #[error("connection set is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("spectrum value is not a rational integer: {0}")]
    IrrationalSpectrumValue(String),
    #[error("inconsistent index sets: {0}")]
    InconsistentIndexSets(String),
    #[error("search space too large: 2^{size} candidates (limit 2^{limit})")]
    SearchSpaceTooLarge { size: usize, limit: usize },
    #[error("graph too large for export: {0} vertices")]
    TooLarge(u64),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
