//! Generic numerical building blocks: polynomial roots, Runge-Kutta
//! integrators and adaptive quadrature.

pub mod ode;
pub mod poly;
pub mod quad;
