//! Special functions and quadrature primitives shared by the numerical modules.

mod gamma;
pub mod interp;
pub mod lowdisc;
mod profile;
pub mod quad;
mod sphere;

pub use gamma::{beta_fn, gamma_fn, ln_gamma};
pub use interp::CubicSpline;
pub use profile::{green_profile, green_profile_full, CachedProfile, GreenProfileArgs};
pub use quad::{adaptive, adaptive_power_endpoint, adaptive_split, gauss_legendre, QuadResult, QuadratureSpec};
pub use sphere::{sphere_measure, sphere_quadrature};
