//! Hermite–Biehler functions described by their zero data.
//!
//! Every space has no singular mass at infinity: the phase derivative is the
//! Poisson sum over the (conjugated) zeros, or a constant for the
//! Paley–Wiener exponential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute accuracy for phase evaluations and inversions.
pub const DEFAULT_EPS: f64 = 1e-12;

/// The root object defining a de Branges space.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceSpec {
    /// `E(z) = exp(-i a z)`, so that `phi(x) = a x` and `|E(x)| = 1`.
    PaleyWiener { slope: f64 },
    /// `E(z) = prod (z - z_k)` with every `Im z_k < 0`.
    FiniteZeros { zeros: Vec<Complex64> },
    /// Zeros `z_n = -i base^n` for `n = 1..=depth`.
    GeometricChain { base: f64, depth: u32 },
}

impl SpaceSpec {
    pub fn paley_wiener(slope: f64) -> Result<Self> {
        let spec = SpaceSpec::PaleyWiener { slope };
        spec.validate()?;
        Ok(spec)
    }

    pub fn finite_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        let spec = SpaceSpec::FiniteZeros { zeros };
        spec.validate()?;
        Ok(spec)
    }

    pub fn geometric_chain(base: f64, depth: u32) -> Result<Self> {
        let spec = SpaceSpec::GeometricChain { base, depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::PaleyWiener { slope } => {
                if !(slope.is_finite() && *slope > 0.0) {
                    return Err(Error::InvalidSpace(format!(
                        "phase slope must be positive, got {slope}"
                    )));
                }
            }
            SpaceSpec::FiniteZeros { zeros } => {
                if zeros.is_empty() {
                    return Err(Error::InvalidSpace("zero list is empty".into()));
                }
                for (k, z) in zeros.iter().enumerate() {
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        return Err(Error::InvalidSpace(format!("zero {k} is not finite")));
                    }
                    if z.im >= 0.0 {
                        return Err(Error::InvalidSpace(format!(
                            "zero {k} = {} + {}i must lie in the lower half-plane",
                            z.re, z.im
                        )));
                    }
                }
            }
            SpaceSpec::GeometricChain { base, depth } => {
                if !(base.is_finite() && *base > 1.0) {
                    return Err(Error::InvalidSpace(format!("base must exceed 1, got {base}")));
                }
                if *depth < 1 {
                    return Err(Error::InvalidSpace("depth must be at least 1".into()));
                }
                if base.powi(*depth as i32).is_infinite() {
                    return Err(Error::InvalidSpace("base^depth overflows".into()));
                }
            }
        }
        Ok(())
    }

    /// Zeros as `(a_n, b_n)` pairs with `z_n = a_n - i b_n`, `b_n > 0`.
    /// Empty for the Paley–Wiener variant.
    pub fn poles(&self) -> Vec<(f64, f64)> {
        match self {
            SpaceSpec::PaleyWiener { .. } => Vec::new(),
            SpaceSpec::FiniteZeros { zeros } => zeros.iter().map(|z| (z.re, -z.im)).collect(),
            SpaceSpec::GeometricChain { base, depth } => {
                (1..=*depth).map(|n| (0.0, base.powi(n as i32))).collect()
            }
        }
    }

    /// Upper bound for the omitted tail `sum_{n > depth} b^n / (x^2 + b^{2n})`
    /// of an infinite geometric chain, uniformly in `x`.
    pub fn truncation_tail_bound(&self) -> f64 {
        match self {
            SpaceSpec::GeometricChain { base, depth } => {
                base.powi(-(*depth as i32)) / (base - 1.0)
            }
            _ => 0.0,
        }
    }

    /// Evaluates `E(z)`.
    pub fn eval_e(&self, z: Complex64) -> Complex64 {
        match self {
            SpaceSpec::PaleyWiener { slope } => (Complex64::new(0.0, -slope) * z).exp(),
            _ => self
                .poles()
                .iter()
                .map(|&(a, b)| z - Complex64::new(a, -b))
                .product(),
        }
    }

    /// `Phi(z) = log|E(z)|` in the closed upper half-plane and `log|E*(z)|`
    /// below it. Both factors are zero-free on their half-planes, so the
    /// value is finite; `-inf` would only appear for a zero on the real line,
    /// which validation rules out.
    pub fn eval_log_potential(&self, z: Complex64) -> f64 {
        let y = z.im.abs();
        match self {
            SpaceSpec::PaleyWiener { slope } => slope * y,
            _ => self
                .poles()
                .iter()
                .map(|&(a, b)| (z.re - a).hypot(y + b).ln())
                .sum(),
        }
    }

    /// `log|E(x)|` for real `x`.
    pub fn log_abs_e(&self, x: f64) -> f64 {
        match self {
            SpaceSpec::PaleyWiener { .. } => 0.0,
            _ => self
                .poles()
                .iter()
                .map(|&(a, b)| (x - a).hypot(b).ln())
                .sum(),
        }
    }
}

/// JSON form of a space: `{ "kind": "pw"|"zeros"|"geometric", ... }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl SpaceDocument {
    pub fn from_spec(spec: &SpaceSpec, eps: f64) -> Self {
        let mut doc = SpaceDocument {
            kind: String::new(),
            a: None,
            zeros: None,
            base: None,
            depth: None,
            eps: Some(eps),
        };
        match spec {
            SpaceSpec::PaleyWiener { slope } => {
                doc.kind = "pw".into();
                doc.a = Some(*slope);
            }
            SpaceSpec::FiniteZeros { zeros } => {
                doc.kind = "zeros".into();
                doc.zeros = Some(zeros.iter().map(|z| [z.re, z.im]).collect());
            }
            SpaceSpec::GeometricChain { base, depth } => {
                doc.kind = "geometric".into();
                doc.base = Some(*base);
                doc.depth = Some(*depth);
            }
        }
        doc
    }

    /// Validates the document and returns the space with its accuracy.
    pub fn to_spec(&self) -> Result<(SpaceSpec, f64)> {
        let missing = |field: &str| Error::InvalidSpace(format!("kind '{}' needs '{field}'", self.kind));
        let spec = match self.kind.as_str() {
            "pw" => SpaceSpec::paley_wiener(self.a.ok_or_else(|| missing("a"))?)?,
            "zeros" => {
                let zeros = self
                    .zeros
                    .as_ref()
                    .ok_or_else(|| missing("zeros"))?
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                SpaceSpec::finite_zeros(zeros)?
            }
            "geometric" => SpaceSpec::geometric_chain(
                self.base.ok_or_else(|| missing("base"))?,
                self.depth.ok_or_else(|| missing("depth"))?,
            )?,
            other => return Err(Error::InvalidSpace(format!("unknown kind '{other}'"))),
        };
        let eps = self.eps.unwrap_or(DEFAULT_EPS);
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidSpace(format!("eps must be positive, got {eps}")));
        }
        Ok((spec, eps))
    }
}
