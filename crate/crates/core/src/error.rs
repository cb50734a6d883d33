use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as an exact rational")]
    BadRational(String),
    #[error("evaluation at x = 0 with negative exponents present")]
    ZeroArgument,
    #[error("jet requires A1 > 0 and A2 > 0, got A1 = {a1}, A2 = {a2}")]
    NonPositiveJet { a1: f64, a2: f64 },
    #[error("jet entries must be finite")]
    NonFiniteJet,
    #[error("all six family parameters are zero")]
    AllZeroParams,
    #[error("search bound must be at least 3, got {0}")]
    BoundTooSmall(i64),
    #[error("{form} parameter must be positive, got {value}")]
    NonPositiveFormParam { form: &'static str, value: f64 },
    #[error("coordinate {coord} outside the domain of {form}")]
    OutsideDomain { form: &'static str, coord: f64 },
    #[error("tolerance {0} outside [1e-14, 1e-3]")]
    InvalidTolerance(f64),
    #[error("initial state already violates the singularity thresholds")]
    ImmediateSingularity,
    #[error("trajectory did not terminate in a singular event")]
    NotSingular,
    #[error("fit window [{lo:.3e}, {hi:.3e}] not covered by trajectory samples")]
    InsufficientWindow { lo: f64, hi: f64 },
    #[error("trajectory tail too short for the infinity model (needs t >= {needed})")]
    TailTooShort { needed: f64 },
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
