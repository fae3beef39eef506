use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Im(tau) = {im} is below the working minimum {min}")]
    BelowImMin { im: f64, min: f64 },
    #[error("{what}: series did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unsupported derivative order {order} for weight {weight}")]
    UnsupportedOrder { weight: u32, order: u32 },
    #[error("point lies {distance:.3e} from a pole, margin is {margin:.3e}")]
    PoleTooClose { distance: f64, margin: f64 },
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("contour radius {radius} reaches a critical point at distance {limit}")]
    ContourTooLarge { radius: f64, limit: f64 },
    #[error("Jacobian is degenerate (|det| = {0:.3e})")]
    DegenerateJacobian(f64),
    #[error("Newton iteration failed from every start")]
    NewtonDiverged,
    #[error("critical values nearly coincide")]
    DegenerateInput,
    #[error("matrix is not invertible over the integers")]
    NotInvertible,
    #[error("triple is not class-exceptional")]
    NotExceptional,
    #[error("class is not a real root")]
    NotARoot,
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("quadrature did not converge (last change {change:.3e})")]
    QuadratureUnconverged { change: f64 },
    #[error("design matrix is ill-conditioned (condition number {cond:.3e})")]
    IllConditioned { cond: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
