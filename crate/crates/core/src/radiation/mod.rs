//! Steering vectors, beampattern evaluation, radiated power and pattern metrics.

mod covariance;
mod direction;
mod grid;
mod metrics;
mod sphere;
mod steering;

pub use covariance::{pattern_value, Covariance, DenseCovariance};
pub use direction::{Direction, UserSet, DEFAULT_USER_RANGE_M};
pub use grid::{
    axis_from_degrees, evaluate_grid, sphere_axes, PatternGrid, DEFAULT_PHI_STEP_DEG, DEFAULT_THETA_STEP_DEG,
};
pub use metrics::{
    local_maxima, pattern_metrics, to_db, user_powers, MetricsReport, DB_FLOOR, DEFAULT_RESOLVE_TOL_DEG,
};
pub use sphere::{integrate_grid, integrate_over_sphere};
pub use steering::{steering_vector, SteeringVector};
