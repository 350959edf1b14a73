//! Numerical building blocks shared by the geometric modules.

pub mod fit;
pub mod quad;
pub mod roots;

pub use fit::{least_squares, line_fit, polyfit, polyval, LinearFit};
pub use quad::{integrate, integrate_pieces, QuadConfig, QuadResult};
pub use roots::{brent, solve_increasing};
