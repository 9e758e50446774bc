//! Wandering bumps in a ring of interacting Hawkes neurons.
//!
//! `N` neurons sit on the circle and interact through a cosine kernel with
//! exponential memory. The crate covers both scales of the model:
//!
//! * [`hawkes`]: exact event-driven simulation of the finite network,
//! * [`stationary`], [`field_ops`], [`nfe`]: the limiting neural field
//!   equation, its circle of stationary bumps, the linearisation around a
//!   bump and the phase reductions onto the circle,
//! * [`analysis`]: long-time statistics tying the two together (distance to
//!   the bump manifold, phase traces, diffusion estimates, replica sweeps),
//! * [`cli`]: configuration, CSV/SVG output and figure recipes behind the
//!   `ringbumps` binary.

pub mod analysis;
pub mod cli;
pub mod field_ops;
pub mod hawkes;
pub mod model;
pub mod nfe;
pub mod stationary;

pub use model::{BinProfile, Field, FiringFunction, RingFunction, RingGrid};
pub use stationary::{solve_amplitude, Branch, BumpSolution};
