//! Special functions: Gamma, Mittag-Leffler and the Wright-type function `M_alpha`.

pub mod gamma;
pub mod mittag_leffler;
pub mod wright;

pub use gamma::{gamma, ln_gamma, rgamma};
pub use mittag_leffler::{mittag_leffler, EvalPolicy, MLParams, MittagLeffler};
pub use wright::{wright_laplace_check, wright_m, wright_moment};
