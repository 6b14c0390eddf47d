//! Truncated Taylor arithmetic: univariate jets, order-2 multivariate jets,
//! a finite-difference oracle and a Taylor-series solver for linear ODEs.

mod jet1;
mod mjet;
mod ode;
mod oracle;
mod scalar;

pub use jet1::{binomial, factorial, Jet1, MAX_ORDER};
pub use mjet::{MJet2, MAX_DIM};
pub use ode::solve_linear2;
pub use oracle::{derivative_oracle, oracle_step, ORACLE_MAX_ORDER};
pub use scalar::{rat, ratf, Scalar};
