use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("untrapped torsional mode: u1 must be positive")]
    UntrappedTorsion,

    #[error("{function}: argument {arg} outside the domain ({reason})")]
    Domain {
        function: &'static str,
        arg: f64,
        reason: &'static str,
    },

    #[error("step size underflow at t = {t} (h = {h:e}); last valid state {state:?}")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("below well minimum: E = {energy} < V(x±) = {minimum}")]
    BelowWellMinimum { energy: f64, minimum: f64 },

    #[error("angular momentum |l| = {l} does not exceed l_c = {lc}: no double well")]
    NoDoubleWell { l: f64, lc: f64 },

    #[error("no classical turning points: {0}")]
    NoTurningPoints(String),

    #[error("grid too small: level {level} at E = {energy} reaches x_max = {x_max}; enlarge x_max")]
    GridTooSmall { level: usize, energy: f64, x_max: f64 },

    #[error("l range too narrow: minimum at boundary l = {l} for phi = {phi}")]
    LRangeTooNarrow { l: i64, phi: f64 },

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("thin-shell approximation violated: thickness {thickness} m is not < radius/10 = {limit} m")]
    ThickShell { thickness: f64, limit: f64 },

    #[error("config: {0}")]
    Config(String),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
