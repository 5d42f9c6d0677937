//! Constructive side: moment-matched point placement, the multiplier plan
//! and its log-potential, peak functions and Lagrange-type interpolation.

pub mod lagrange;
pub mod moment;
pub mod peak;
pub mod plan;
pub mod potential;

pub use moment::{moment_match, ContinuousPart, MomentProblem, MomentSolution};
pub use plan::{build_plan, MultiplierPlan, PlanOptions, SigmaPoint};
pub use potential::{verify_multiplier, MultiplierReport, PotentialField, VerifyOptions};
pub use peak::{decay_fit, peak_function, tail_check, DecayFit, DecayMetric, PeakFunction, TailReport};
pub use lagrange::{lagrange_interpolate, LagrangeInterpolant, Multiplier, NormReport};
