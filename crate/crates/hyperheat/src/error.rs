use thiserror::Error;

#[derive(Debug, Error)]
pub enum HyperheatError {
    #[error("dimension parameter n must satisfy n >= 1, got {0}")]
    InvalidDimension(i64),

    #[error("operation requires even n (exact symbolic path), got n = {0}")]
    RequiresEvenN(u32),

    #[error("resolvent kernel for odd n >= 3 is unsupported (finite-part regularization out of scope), got n = {0}")]
    OddResolventUnsupported(u32),

    #[error("evaluation point rejected: {0}")]
    InvalidPoint(String),

    #[error("resolvent evaluation refused on the diagonal: r = {0} < 1e-8")]
    DiagonalSingularity(f64),

    #[error("quadrature failed to converge: achieved relative error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("region constants must satisfy C1 >= C^3: C = {c}, C1 = {c1}")]
    RegionConstants { c: f64, c1: f64 },

    #[error("non-finite value at node (r = {r}, t = {t}): {what}")]
    NonFiniteNode { r: f64, t: f64, what: String },

    #[error("growth declaration violated: {0}")]
    GrowthViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal algebra error: {0}")]
    Algebra(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, HyperheatError>;
