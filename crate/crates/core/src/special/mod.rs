//! Special functions consumed by the algebra, coherent-state and weight
//! modules.

pub mod bessel;
pub mod gamma;
pub mod hypergeometric;
pub mod kummer;
pub mod meijer;
mod sum;

pub use bessel::{bessel_modified, BesselKind};
pub use gamma::{digamma, gamma, ln_gamma, ln_gamma_real, recip_gamma};
pub use hypergeometric::{pfq, pfq_complex, SeriesValue};
pub use kummer::{kummer_log_derivative, kummer_log_derivative_pair, kummer_m};
pub use meijer::{meijer_g, meijer_g_scaled, MeijerSpec, ScaledValue};
pub(crate) use sum::{CompensatedSum, ComplexCompensatedSum};
