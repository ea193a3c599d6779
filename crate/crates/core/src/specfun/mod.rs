//! Special functions: positive stable and inverse stable densities,
//! the generalized Mittag-Leffler function, and tail asymptotics.

pub mod gml;
pub mod stable;
pub mod tail;

pub use gml::{gml_mc, gml_posterior_norm, gml_series, GmlArgs, GmlEstimate, GmlMethod};
pub use stable::{inverse_stable_pdf, ln_inverse_stable_pdf, ln_stable_pdf, stable_pdf};
pub use tail::{is_tail_approx, ln_is_tail_approx};
