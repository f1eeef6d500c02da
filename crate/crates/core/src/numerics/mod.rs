//! Deterministic numerical kernels: quadrature, the warping-function ODE,
//! the Gamma function and a simplex minimizer.

mod gamma;
mod ode;
mod quadrature;
mod simplex;

pub use gamma::{gamma, unit_ball_volume, unit_sphere_area};
pub use ode::{solve_h_ivp, IvpSolution};
pub use quadrature::{
    integrate_beyond, integrate_finite, integrate_from_origin, integrate_semi_infinite,
    integrate_semi_infinite_with, EndpointHints, QuadratureConfig, ORIGIN_CUT,
};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
