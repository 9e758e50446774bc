//! The neural field equation `du/dt = -u + int cos(x - y) f(u(y)) dy`, its
//! flow and the two phase maps onto the circle of stationary bumps.
//!
//! The cosine kernel makes the nonlocal term two-dimensional, so the flow
//! from `rho` is `u_t = e^{-t} rho + a(t) cos + b(t) sin` and only `(a, b)`
//! is integrated.

mod flow;
mod phase;

use thiserror::Error;

use crate::field_ops::FieldOpsError;
use crate::model::ModelError;

pub use flow::{flow, FlowState, InitialCondition, DEFAULT_DT, MAX_DT};
pub use phase::{
    beta, d2theta, d2theta_unit_normalized, dtheta, isochronal_phase, isochronal_phase_with, manifold_distance,
    projection_radius, tangent_coordinate, variational_phase, IsochronOptions, IsochronResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfeError {
    #[error("time step must lie in (0, {max}], got {dt}")]
    InvalidStep { dt: f64, max: f64 },
    #[error("end time {t_end} is not after the current time {t}")]
    InvalidTime { t: f64, t_end: f64 },
    #[error("non-finite state at t = {0}")]
    NumericalBlowup(f64),
    #[error("distance {distance} to the bump circle exceeds the projection radius {radius}")]
    TooFarFromManifold { distance: f64, radius: f64 },
    #[error("flow does not approach the bump circle (distance {distance} at t = {t})")]
    OutsideBasin { t: f64, distance: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    FieldOps(#[from] FieldOpsError),
}
