//! Hermite–Biehler functions, their phase and the phase metric.

mod phase;
mod space;

pub use phase::{Disk, Interval, PhasePoint, PhaseProfile};
pub use space::{SpaceDocument, SpaceSpec, DEFAULT_EPS};
