use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("non-positive factor in generalized factorial at n = {n} (value {value})")]
    NonPositiveFactor { n: usize, value: f64 },

    #[error("pole of {function} at {location}")]
    Pole {
        function: &'static str,
        location: String,
    },

    #[error("series diverges: |z| = {abs_z} is not inside the radius {radius}")]
    Divergent { abs_z: f64, radius: f64 },

    #[error("no admissible Mellin–Barnes contour: {0}")]
    Contour(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("|zeta|^2 = {abs2} lies outside the disk of radius {radius}")]
    OutsideDisk { abs2: f64, radius: f64 },

    #[error("states are not comparable: {0}")]
    Mismatch(String),

    #[error("parameter condition violated: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
