//! Conformal maps of the sphere and the integral machinery built on them.
//!
//! A model hypersurface is sampled with a product quadrature rule; for a
//! ball point `g` the coordinates of `F_g` restricted to the samples become
//! test functions, and the identities and inequalities bounding their
//! Rayleigh quotients are evaluated by quadrature.

mod ball;
mod centering;
mod lemmas;
mod minmax;
mod sample;

pub use ball::{moebius_differential, moebius_map, BallPoint, BALL_MARGIN};
pub use centering::{centering_solve, Centering, BALL_CAP, JACOBIAN_STEP, MAX_ITERATIONS};
pub use lemmas::{
    lemma36_rhs, lemma37_gap, lemma38_integral, lemma38_integrand, rho_field, support_hessian_check,
    test_functions, Lemma37Gap, RhoPoint, HESSIAN_STEP,
};
pub use minmax::{minmax_chain_check, position_eigenfunction_check, ChainStep, MinMaxReport};
pub use sample::{sample_model, SampledHypersurface, Sample, MAX_SAMPLES};
