//! Experiment configuration: one JSON document per run, with optional
//! sections per command. Unknown fields are rejected.

use std::f64::consts::PI;
use std::path::Path;

use dblab_core::hb::{Interval, PhaseProfile, SpaceDocument};
use dblab_core::sequences::{generate_by_phase, RealSequence};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_space")]
    pub space: SpaceDocument,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSource>,
    #[serde(default)]
    pub phase: PhaseSection,
    #[serde(default)]
    pub doubling: DoublingSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default)]
    pub frame: FrameSection,
    #[serde(default)]
    pub interpolate: InterpolateSection,
    #[serde(default)]
    pub multiplier: MultiplierSection,
    #[serde(default)]
    pub peak: PeakSection,
}

fn default_space() -> SpaceDocument {
    SpaceDocument {
        kind: "pw".into(),
        a: Some(PI),
        zeros: None,
        base: None,
        depth: None,
        eps: None,
    }
}

fn default_seed() -> u64 {
    dblab_core::suite::SuiteOptions::default().seed
}

fn default_window() -> [f64; 2] {
    [-50.0, 50.0]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            space: default_space(),
            window: default_window(),
            seed: default_seed(),
            sequence: None,
            phase: PhaseSection::default(),
            doubling: DoublingSection::default(),
            density: DensitySection::default(),
            frame: FrameSection::default(),
            interpolate: InterpolateSection::default(),
            multiplier: MultiplierSection::default(),
            peak: PeakSection::default(),
        }
    }
}

/// Where a point sequence comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSource {
    /// `phi(x) = alpha + step * n` inside the window.
    PhaseStep {
        step: f64,
        #[serde(default)]
        alpha: f64,
    },
    /// `offset + spacing * k` inside the window.
    Lattice {
        spacing: f64,
        #[serde(default)]
        offset: f64,
    },
    Points { points: Vec<f64> },
    /// Whitespace-separated numbers in a text file.
    File { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseSection {
    pub points: usize,
}

impl Default for PhaseSection {
    fn default() -> Self {
        PhaseSection { points: 201 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DoublingSection {
    /// Interval half-lengths; by default powers of two up to a quarter of
    /// the window.
    pub scales: Option<Vec<f64>>,
    pub centers_per_scale: Option<usize>,
    pub grid: Option<usize>,
    pub pairs: Option<usize>,
    pub distortion_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySection {
    pub r: Vec<f64>,
}

impl Default for DensitySection {
    fn default() -> Self {
        DensitySection {
            r: vec![2.0 * PI, 4.0 * PI, 8.0 * PI, 16.0 * PI],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSection {
    pub alpha: f64,
    pub trim: usize,
    /// Window carrying the basis nodes; the run window by default.
    pub basis_window: Option<[f64; 2]>,
}

impl Default for FrameSection {
    fn default() -> Self {
        FrameSection {
            alpha: dblab_core::kernels::DEFAULT_ALPHA,
            trim: 4,
            basis_window: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMethod {
    MinNorm,
    /// Lagrange functions of the sine-type multiplier vanishing on
    /// `phi = alpha mod pi`.
    SineType,
    /// Lagrange functions of a multiplier plan built on the sequence.
    Plan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterpolateSection {
    pub method: InterpolationMethod,
    /// Data at the nodes; uniform random in `[-1, 1]` from the seed if absent.
    pub values: Option<Vec<f64>>,
    pub alpha: f64,
    pub epsilon: f64,
    /// Evaluation grid size across the window.
    pub probe_points: usize,
}

impl Default for InterpolateSection {
    fn default() -> Self {
        InterpolateSection {
            method: InterpolationMethod::MinNorm,
            values: None,
            alpha: 0.0,
            epsilon: 0.1,
            probe_points: 401,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierSection {
    pub epsilon: f64,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub grid_fraction: f64,
    pub samples_per_side: usize,
    pub radius_factor: f64,
}

impl Default for MultiplierSection {
    fn default() -> Self {
        let v = dblab_core::construct::VerifyOptions::default();
        MultiplierSection {
            epsilon: 0.5,
            n: None,
            m: None,
            gamma: None,
            eta: None,
            grid_fraction: v.grid_fraction,
            samples_per_side: v.samples_per_side,
            radius_factor: v.radius_factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeakSection {
    pub x0: f64,
    pub poles: usize,
    pub epsilon: f64,
    pub metric: dblab_core::construct::DecayMetric,
    pub d_range: [f64; 2],
    pub bins: usize,
    pub tail_reach: f64,
}

impl Default for PeakSection {
    fn default() -> Self {
        PeakSection {
            x0: 0.0,
            poles: 6,
            epsilon: 0.5,
            metric: dblab_core::construct::DecayMetric::Phi,
            d_range: [5.0, 50.0],
            bins: 20,
            tail_reach: 250.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn window(&self) -> Result<Interval, CliError> {
        Interval::new(self.window[0], self.window[1]).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn profile(&self) -> Result<PhaseProfile, CliError> {
        let (spec, eps) = self.space.to_spec().map_err(|e| CliError::Config(e.to_string()))?;
        PhaseProfile::with_eps(spec, eps).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The configured sequence restricted to the window.
    pub fn sequence(&self, profile: &PhaseProfile) -> Result<RealSequence, CliError> {
        let window = self.window()?;
        let source = self
            .sequence
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a 'sequence' section".into()))?;
        let seq = match source {
            SequenceSource::PhaseStep { step, alpha } => generate_by_phase(profile, window, *step, *alpha)?,
            SequenceSource::Lattice { spacing, offset } => {
                if !(spacing.is_finite() && *spacing > 0.0) {
                    return Err(CliError::Config(format!("lattice spacing must be positive, got {spacing}")));
                }
                let k0 = ((window.lo - offset) / spacing).ceil() as i64;
                let k1 = ((window.hi - offset) / spacing).floor() as i64;
                RealSequence::new((k0..=k1).map(|k| offset + spacing * k as f64).collect())?
            }
            SequenceSource::Points { points } => RealSequence::from_unsorted(points.clone())?.restrict(window),
            SequenceSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
                RealSequence::parse_text(&text)?.restrict(window)
            }
        };
        Ok(seq.with_separation(profile))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(serde_json::from_str::<ExperimentConfig>("{}").unwrap(), cfg);
    }

    #[test]
    fn unknown_nested_fields_are_rejected() {
        for text in [
            r#"{"frame": {"alpah": 0.0}}"#,
            r#"{"peak": {"metric": "psi", "bins": 4, "extra": 1}}"#,
            r#"{"sequence": {"kind": "spiral"}}"#,
        ] {
            assert!(serde_json::from_str::<ExperimentConfig>(text).is_err(), "{text}");
        }
    }

    #[test]
    fn lattice_is_cut_to_the_window() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"window": [-2.5, 3.0], "sequence": {"kind": "lattice", "spacing": 1.0, "offset": 0.5}}"#,
        )
        .unwrap();
        let p = cfg.profile().unwrap();
        assert_eq!(cfg.sequence(&p).unwrap().points(), &[-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]);
        let points: ExperimentConfig =
            serde_json::from_str(r#"{"window": [0, 1], "sequence": {"kind": "points", "points": [0.7, -3.0, 0.2]}}"#)
                .unwrap();
        assert_eq!(points.sequence(&p).unwrap().points(), &[0.2, 0.7]);
        let missing = ExperimentConfig::default();
        assert!(matches!(missing.sequence(&p), Err(CliError::Config(_))));
    }
}
