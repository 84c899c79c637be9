//! Mild-solution fixed-point map, damped Picard iteration and residual
//! certificates for the nonlocal Hilfer problem.

mod audit;
mod mnc;
mod picard;
mod problem;

pub use audit::{
    audit_ball_invariance, audit_continuity, audit_growth, audit_hypotheses, audit_nonlocal_bound,
    ball_bound_left_side, equicontinuity_probe, growth_convolution, random_ball_samples, weighted_difference,
    DefectTable, HypothesisCheck,
};
pub use mnc::{contraction_threshold, mnc_contraction_sequence, ContractionSequence};
pub use picard::{
    convolution_row_by_quadrature, modal_tail_estimate, solve, ConvolutionWeights, ResidualReport, SnappedPoint, Solver,
};
pub use problem::{GrowthBounds, Kernel, NonlocalPoint, PointwiseF, PointwiseG, ProblemSpec, SolverConfig, Trajectory};
