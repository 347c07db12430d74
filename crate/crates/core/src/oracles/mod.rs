//! Analytic and symbolic models that the tracer is checked against.

pub mod compare;
pub mod notched;
pub mod rotation;
pub mod unfolding;

pub use compare::{compare_notched, compare_rectangle, compare_triangle, transition_counts, OracleReport, TriangleReport};
pub use notched::{
    f_delta, f_delta_inv, geometric_pmf, incidence_to_lambda, lambda_to_incidence, notched_run, notched_step_map, zeta, zeta_inv,
    NotchedDynamics,
};
pub use rotation::{rotation_histogram, rotation_l, RotationHistogram, RotationProblem};
pub use unfolding::{rect_parity, rect_reflections, tri_unfold, triangle_chart, TriUnfold};
