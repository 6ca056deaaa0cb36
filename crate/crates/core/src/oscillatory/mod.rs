//! Stationary-phase prediction and direct oscillatory quadrature.

mod predict;
mod quadrature;
mod stationary;

pub use predict::{predict_afe_integral, PredictKind, PredictParams, Resonance};
pub use quadrature::{default_tol, integrate_oscillatory, integrate_with_breaks, panels, theta_rate};
pub use stationary::{stationary_phase, ConditionConstants, PhaseProblem, StationaryPhaseResult};
