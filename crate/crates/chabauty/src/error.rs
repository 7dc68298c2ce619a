use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate. Variants that carry a
/// prime or a polynomial string keep enough context to be actionable from
/// a config file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("polynomial is reducible over Q; witness factor: {witness}")]
    Reducible { witness: String },
    #[error("polynomial vanishes mod {p}")]
    ZeroModP { p: u64 },
    #[error("prime {p} divides disc of the defining polynomial; exact splitting unavailable")]
    IndexObstruction { p: u64 },
    #[error("declared embedding does not satisfy the subfield's defining polynomial")]
    InvalidEmbedding,
    #[error("relative polynomial is reducible over the base; witness: {witness}")]
    RelativeReducible { witness: String },
    #[error("no shift in 0..={max} made the norm polynomial squarefree")]
    ShiftExhausted { max: i64 },
    #[error("divisor polynomial is not squarefree over the base")]
    NotSquarefree,
    #[error("factorization over the base field failed: {detail}")]
    RelativeFactorizationFailed { detail: String },
    #[error("alpha is not an S-unit: {detail}")]
    NotAnSUnit { detail: String },
    #[error("q = {q} is not an odd prime")]
    QNotPrime { q: u64 },
    #[error("orbit {orbit} does not descend to the requested tower member")]
    NotDescendable { orbit: String },
    #[error("cover move must retain a proper nonempty orbit subset with at least 2 geometric punctures")]
    InvalidCoverMove,
    #[error("quotient parameter {delta} does not divide the geometric puncture count {punctures}")]
    DeltaDoesNotDivide { delta: u64, punctures: u64 },
    #[error("requested cover cannot exist: a degree-{delta} map of the line is totally ramified at at most 2 points")]
    RiemannHurwitzViolation { delta: u64 },
    #[error("representation multiplicities must be nonnegative")]
    NegativeMultiplicity,
    #[error("no CM pair among the listed subfields")]
    NotCmField,
    #[error("the {q}-th cyclotomic polynomial is not irreducible over the field")]
    CyclotomicNotDisjoint { q: u64 },
    #[error("extension must be declared abelian with its group structure")]
    NotAbelianDeclared,
    #[error("unsupported Galois shape for this operation: {detail}")]
    UnsupportedGaloisShape { detail: String },
    #[error("alpha is a q-th power in the base; use the unit-root model instead")]
    AlphaIsQthPower,
    #[error("p-adic log needs a one-unit; {value} is not congruent to 1 mod {p}")]
    NotOneUnit { value: String, p: u64 },
    #[error("p = 2 is not supported by the p-adic log")]
    EvenPrimeUnsupported,
    #[error("a completion above p = {p} has residue degree > 1; choose a split prime")]
    NonSplitCompletion { p: u64 },
    #[error("precision exhausted during p-adic elimination")]
    PrecisionExhausted,
    #[error("sieve generator {g} is not coprime to p = {p}")]
    GeneratorNotCoprime { g: String, p: u64 },
    #[error("exhaustive box too small: a surviving class has neither confirmation nor exclusion")]
    BoxTooSmall,
    #[error("alpha has nonzero valuation at a place of a proper base field; not supported")]
    RamifiedAlphaUnsupported,
    #[error("subgroup too large to enumerate at this precision")]
    SieveTooLarge,
    #[error("precision/modulus out of supported range: {detail}")]
    UnsupportedPrecision { detail: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("cache entry was corrupt and has been recomputed")]
    CacheCorrupt,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
