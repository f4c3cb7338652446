use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial is not primitive (content {content})")]
    NotPrimitive { content: String },
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial must be nonconstant")]
    ConstantPolynomial,
    #[error("delta_{n} vanishes: a root of unity of order dividing {n} is a root")]
    RootOfUnityDegeneracy { n: usize },
    #[error("root refinement did not certify below tolerance after {max_iterations} iterations")]
    NoConvergence { max_iterations: usize },
    #[error("root near {re}{im:+}i straddles the unit circle (radius {radius:e})")]
    UnresolvedBoundary { re: f64, im: f64, radius: f64 },
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("map is singular (determinant zero)")]
    SingularMap,
    #[error("operation not defined for domain {0}")]
    WrongDomain(String),
    #[error("element budget of {cap} exceeded")]
    BudgetExceeded { cap: usize },
    #[error("horizon {horizon} too short; at least {needed} steps needed")]
    HorizonTooShort { needed: usize, horizon: usize },
    #[error("invalid self-map: {}", .0.join("; "))]
    InvalidMap(Vec<String>),
    #[error("values are not comparable: certified intervals overlap")]
    Incomparable,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of numerical certification, as opposed to bad input.
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::UnresolvedBoundary { .. }
        )
    }

    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ZeroPolynomial
                | Error::NotPrimitive { .. }
                | Error::ZeroConstantTerm
                | Error::NotMonic
                | Error::ConstantPolynomial
                | Error::RankDeficient
                | Error::SingularMap
                | Error::WrongDomain(_)
                | Error::InvalidMap(_)
                | Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
        )
    }
}
