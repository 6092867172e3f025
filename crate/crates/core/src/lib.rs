//! Numerical laboratory for smoothed rarefaction waves of the 1-D isentropic
//! system in Lagrangian coordinates with a Maxwell-type relaxed stress:
//!
//! ```text
//!   v_t = u_x
//!   u_t + p(v)_x = s_x,          p(v) = a v^{-gamma}
//!   tau s_t + s = mu u_x / v
//! ```
//!
//! The crate builds exact rarefaction fans, their Burgers-smoothed
//! approximations, a splitting finite-volume solver for the relaxed system
//! (and its tau = 0 classical limit), and the diagnostic functionals used to
//! check decay rates and energy balance at desk scale.

pub mod approx_wave;
pub mod burgers;
pub mod diagnostics;
pub mod error;
pub mod gaslaw;
mod quad;
pub mod riemann;
pub mod solver;

pub use error::{Error, Result};
pub use gaslaw::{Family, PressureLaw};
pub use riemann::{Classification, RiemannData, WaveFan};
pub use solver::{Grid1D, SolverConfig, State};
