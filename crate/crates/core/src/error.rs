use thiserror::Error;

pub type Result<T> = std::result::Result<T, OrbitError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("position vector has zero length")]
    ZeroRadius,

    #[error("gravitational parameter must be positive and finite, got {0}")]
    InvalidKappa2(f64),

    #[error("orbit constraints violated: c·e = {r4:e}, energy relation residual = {r5:e}")]
    ConstraintViolation { r4: f64, r5: f64 },

    #[error("invalid Kepler elements: {0}")]
    InvalidElements(String),

    #[error("invalid elliptic orbit: {0}")]
    InvalidOrbit(String),

    #[error("point outside chart domain: {0}")]
    ChartDomain(String),

    #[error("near collision at step {step}: |r| = {radius:e} below floor {floor:e}")]
    NearCollision {
        step: usize,
        radius: f64,
        floor: f64,
    },

    #[error("orbits use different gravitational parameters ({0} vs {1})")]
    Kappa2Mismatch(f64, f64),

    #[error("invalid metric configuration: {0}")]
    InvalidMetricSpec(String),

    #[error("degree sum {raw} is not within 0.01 of an integer, increase the subdivision depth")]
    NonIntegralDegree { raw: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
