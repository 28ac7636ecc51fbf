//! Simulation and diagnostics for a pair of two-level systems driven by
//! a weak-coupling (Bloch-Redfield type) master equation. The single-site
//! map is positive on its admissible domain yet fails to be completely
//! positive, and the factorized pair dynamics exposes that failure on
//! entangled initial states. This crate provides the exact propagators,
//! the generators in their several equivalent forms, the positivity
//! diagnostics, and a stochastic-field Monte Carlo cross-check.

pub mod algebra;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod propagation;
pub mod stochastic;

pub use algebra::{
    anticommutator, bloch_compose, bloch_decompose, commutator, herm_eig, herm_eigvals,
    partial_trace, pauli, tensor, BlochVector, ComplexMatrix, Subsystem,
};
pub use diagnostics::{
    admissible_scan, choi_matrix, entropy, first_negative_time, lambda_closed_form,
    lambda_curvature_at_zero, lambda_from_state, measured_curvature_at_zero, purity,
    theta_threshold, theta_threshold_scan, tracked_sector_lambda, werner_lambda,
    werner_lambda_minimum, werner_threshold, werner_threshold_scan, Lambda, PositivityReport,
    ThetaThreshold, ThresholdReport, POSITIVITY_TOL,
};
pub use error::{Error, Result};
pub use generators::{
    bloch_generator, cross_site_rhs, markov_params, pair_rhs, redfield_rhs, redfield_rhs_split,
    rotation_matrix, single_site_rhs, CorrelationMatrixSet, DeltaVariant, GeneratorParams,
    PhysicalParams, RedfieldCoefficients,
};
pub use propagation::{
    bloch_propagator, evolve_singlet_closed_form, make_product, make_singlet, make_theta,
    make_werner, product_map, propagate_analytic_grid, propagate_bloch_analytic,
    propagate_numeric, Method, PairLabel, PairState, PropagatorResult,
};
pub use stochastic::{
    correlated_pair_paths, default_step, ensemble_average, markov_gap_report, ou_path,
    trajectory_evolve, EnsembleGrid, EnsembleResult, MarkovGapReport, NoiseKind, NoisePath,
};
