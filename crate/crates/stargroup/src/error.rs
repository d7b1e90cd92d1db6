use std::fmt;

use thiserror::Error;

/// A single violated semigroup axiom together with its least witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    Associativity(usize, usize, usize),
    Involution(usize),
    PartialIsometry(usize),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Associativity(x, y, z) => {
                write!(f, "associativity fails at ({x},{y},{z})")
            }
            AxiomViolation::Involution(x) => write!(f, "x** != x at {x}"),
            AxiomViolation::PartialIsometry(x) => write!(f, "x x* x != x at {x}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid *-semigroup: {}", join(.0))]
    Axioms(Vec<AxiomViolation>),
    #[error("element {0} is not idempotent")]
    NotIdempotent(usize),
    #[error("element {0} is not a projection")]
    NotProjection(usize),
    #[error("not locally involutive (witness {0:?})")]
    NotLocallyInvolutive(Vec<usize>),
    #[error("not quasi-involutive (witness {0:?})")]
    NotQuasiInvolutive(Vec<usize>),
    #[error("not left involutive (witness {0:?})")]
    NotLeftInvolutive(Vec<usize>),
    #[error("not an inverse semigroup (witness {0:?})")]
    NotInverse(Vec<usize>),
    #[error("left and right orders disagree at ({0},{1})")]
    OrderMismatch(usize, usize),
    #[error("map is not a *-morphism (witness {0:?})")]
    NotStarMorphism(Vec<usize>),
    #[error("map is not a left *-homomorphism (witness {0:?})")]
    NotLeftStarHom(Vec<usize>),
    #[error("map is not a *-homomorphism (witness {0:?})")]
    NotStarHom(Vec<usize>),
    #[error("map is not etale (witness {0})")]
    NotEtale(usize),
    #[error("no lift: {s} != f({p}) {s}")]
    NoLift { p: usize, s: usize },
    #[error("morphisms have mismatched carriers: {0}")]
    CarrierMismatch(String),
    #[error("{p} is not below {bound}")]
    NotBounded { p: usize, bound: usize },
    #[error("restriction of {x} to {p} is not unique")]
    NonUnique { x: usize, p: usize },
    #[error("objects of {0} and {1} are not comparable")]
    NotComparable(usize, usize),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("presheaf identity violated at idempotent {0}")]
    IdentityViolation(usize),
    #[error("presheaf composition violated for s={s}, t={t}")]
    CompositionViolation { s: usize, t: usize },
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("transformation not natural at morphism ({s},{e}), element {x}")]
    NotNatural { s: usize, e: usize, x: usize },
    #[error("search budget of {0} candidate extensions exceeded")]
    SearchBudgetExceeded(u64),
    #[error("unit component at {0} is not a bijection")]
    UnitNotIso(usize),
    #[error("equivalence broken: {0}")]
    EquivalenceBroken(String),
    #[error("invalid S-set: {0}")]
    InvalidSSet(String),
    #[error("module is not balanced: {0}")]
    NotBalanced(String),
    #[error("module axioms violated: {}", .0.join("; "))]
    ModuleAxioms(Vec<String>),
    #[error("addition is not idempotent at {0}")]
    AdditionNotIdempotent(String),
    #[error("addition across fibers {0} and {1}")]
    FiberMismatch(usize, usize),
    #[error("carrier of {size} elements exceeds cap {cap}")]
    CarrierTooLarge { size: u128, cap: usize },
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("unknown statement {0}")]
    UnknownStatement(String),
    #[error("enumeration budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("internal check failed: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn join(v: &[AxiomViolation]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
