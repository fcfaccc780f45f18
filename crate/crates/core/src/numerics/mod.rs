//! Special functions and quadrature used by the analytic formulas.

mod gamma;
mod quadrature;

pub(crate) use gamma::log_gamma_unchecked;
pub use gamma::{
    ln_1p_minus, log_gamma, reg_gamma_p, reg_gamma_pq, reg_gamma_q, LogRegularizedGamma,
};
pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_survival_squared,
    integrate_survival_squared_with, Quadrature, QuadratureConfig,
};
