//! Special functions and scalar solvers used by the closed forms.

mod bessel;
mod gamma;
mod lambert;
mod optimize;
mod poly;
mod quad;
mod roots;

pub use bessel::{bessel_j0, J0_SERIES_LIMIT};
pub use gamma::gamma_fn;
pub use lambert::{lambert_w, lambert_w0_of_exp, Branch, LAMBERT_RESIDUAL_TOL};
pub use optimize::{golden_section_max, GOLDEN_WIDTH};
pub use poly::{poly_real_roots, Polynomial, IMAG_TOL, ROOT_RESIDUAL_TOL};
pub use quad::{integrate, integrate_with, QuadOptions};
pub use roots::{find_root_bracketed, find_root_bracketed_with, RootOptions};
