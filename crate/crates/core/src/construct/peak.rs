//! Peak functions `h(x0, .)`: a multiplier vanishing on
//! `{lambda : d_psi(x0, lambda) = 4 pi k, k != 0}` divided by its zeros
//! nearest to `x0` and normalized so that `h(x0, x0) = 1`.
//!
//! Only the weighted modulus `|h(x0, y)| e^{-(Psi(y) - Psi(x0))}` is
//! realized, through `|f| e^{-Psi} = e^{-w}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{build_plan, MultiplierPlan, PlanOptions};
use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};
use crate::sequences::{generate_by_phase, RealSequence};

/// Weighted peak-function modulus centred at `x0`.
#[derive(Clone, Debug)]
pub struct PeakFunction {
    pub x0: f64,
    pub plan: MultiplierPlan,
    pub poles: Vec<f64>,
    field: PotentialField,
    log_scale: f64,
}

/// Builds the peak function with `m_poles` divided-out zeros.
pub fn peak_function(
    profile: &PhaseProfile,
    x0: f64,
    m_poles: usize,
    epsilon: f64,
    window: Interval,
) -> Result<PeakFunction> {
    if !window.contains(x0) {
        return Err(Error::InvalidArgument(format!("x0 = {x0} outside the window")));
    }
    let grid = generate_by_phase(profile, window, 2.0 * PI, profile.phase(x0))?;
    let lam: Vec<f64> = grid.points().iter().copied().filter(|&x| x != x0).collect();
    let lambda = RealSequence::new(lam)?;
    let mut opts = PlanOptions::with_epsilon(epsilon);
    opts.protected = vec![x0];
    let plan = build_plan(profile, &lambda, window, &opts)?;
    let mut candidates = plan.lambda();
    if candidates.len() < m_poles {
        return Err(Error::NotEnoughNodes {
            requested: m_poles,
            available: candidates.len(),
        });
    }
    candidates.sort_by(|a, b| profile.metric(*a, x0).total_cmp(&profile.metric(*b, x0)));
    let mut poles: Vec<f64> = candidates[..m_poles].to_vec();
    poles.sort_by(f64::total_cmp);
    let field = PotentialField::new(profile, &plan)?;
    let w0 = field.w_real(x0);
    let log_scale = w0 + poles.iter().map(|s| (x0 - s).abs().ln()).sum::<f64>();
    Ok(PeakFunction {
        x0,
        plan,
        poles,
        field,
        log_scale,
    })
}

impl PeakFunction {
    pub fn field(&self) -> &PotentialField {
        &self.field
    }

    /// `|h(x0, y)| e^{-(Psi(y) - Psi(x0))}`.
    pub fn modulus(&self, y: f64) -> f64 {
        if y == self.x0 {
            return 1.0;
        }
        let profile = self.field.profile();
        // At a divided-out zero the quotient is finite; step off it slightly.
        let y = if self.poles.contains(&y) {
            y + 1e-9 / profile.dphi(y)
        } else {
            y
        };
        let w = self.field.w_real(y);
        if w == f64::INFINITY {
            return 0.0;
        }
        let denom: f64 = self.poles.iter().map(|s| (y - s).abs().ln()).sum();
        (self.log_scale - w - denom).exp()
    }

    /// Distance from `x0` in the requested metric.
    pub fn distance(&self, y: f64, metric: DecayMetric) -> f64 {
        metric.factor() * self.field.profile().metric(self.x0, y)
    }

    /// Point at signed distance `d` from `x0`.
    fn point_at(&self, d: f64, metric: DecayMetric) -> Result<f64> {
        let p = self.field.profile();
        p.inverse_in(p.phase(self.x0) + d / metric.factor(), self.plan.window)
    }
}

/// Metric in which decay is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMetric {
    /// `d_psi = 2 d_phi`, the metric of the construction.
    Psi,
    Phi,
}

impl DecayMetric {
    fn factor(self) -> f64 {
        match self {
            DecayMetric::Psi => 2.0,
            DecayMetric::Phi => 1.0,
        }
    }
}

/// Log-log fit of the decay envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub metric: DecayMetric,
    pub d_lo: f64,
    pub d_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    /// `(d, envelope)` per logarithmic bin.
    pub envelope: Vec<(f64, f64)>,
}

/// Fits `log max_{bin} |h|` against `log d` over `[d_lo, d_hi]`, both sides
/// of `x0` pooled, with `bins` logarithmic bins.
pub fn decay_fit(
    peak: &PeakFunction,
    metric: DecayMetric,
    d_lo: f64,
    d_hi: f64,
    bins: usize,
    samples_per_bin: usize,
) -> Result<DecayFit> {
    if !(d_lo > 0.0 && d_hi > d_lo) || bins < 2 {
        return Err(Error::InvalidArgument("need 0 < d_lo < d_hi and two bins".into()));
    }
    let ratio = (d_hi / d_lo).ln();
    let envelope: Vec<(f64, f64)> = (0..bins)
        .into_par_iter()
        .map(|b| -> Result<(f64, f64)> {
            let mut best = (f64::NAN, 0.0);
            for i in 0..samples_per_bin {
                let frac = (b as f64 + (i as f64 + 0.5) / samples_per_bin as f64) / bins as f64;
                let d = d_lo * (ratio * frac).exp();
                for sign in [-1.0, 1.0] {
                    let y = peak.point_at(sign * d, metric)?;
                    let v = peak.modulus(y);
                    if v > best.1 {
                        best = (d, v);
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = envelope
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(d, v)| (d.ln(), v.ln()))
        .collect();
    let (slope, intercept) = linear_fit(&pts);
    Ok(DecayFit {
        metric,
        d_lo,
        d_hi,
        slope,
        intercept,
        envelope,
    })
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Convergence of `int |h(x0, y)|^2 dpsi(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub metric: DecayMetric,
    /// Integral over `d(x0, y) <= cut`.
    pub core: f64,
    /// Integral over `cut < d <= reach`, computed.
    pub computed_tail: f64,
    /// Power-law extrapolation beyond `reach`.
    pub extrapolated_tail: f64,
    pub cut: f64,
    pub reach: f64,
    pub tail_fraction: f64,
}

/// Integrates `|h|^2` against `dpsi` on both sides of `x0` in the variable
/// `s = psi(y) - psi(x0)` (composite Simpson, `steps_per_unit` nodes per
/// unit of `s`). `cut` and `reach` are distances in `metric`; beyond the
/// reach the envelope is continued with exponent `decay_slope`.
///
/// The center is held fixed and the second variable integrated; for a
/// translation-invariant phase this is the same integral as the one over
/// the first variable.
pub fn tail_check(
    peak: &PeakFunction,
    metric: DecayMetric,
    cut: f64,
    reach: f64,
    steps_per_unit: usize,
    decay_slope: f64,
) -> Result<TailReport> {
    if !(cut > 0.0 && reach > cut) {
        return Err(Error::InvalidArgument("need 0 < cut < reach".into()));
    }
    // Distances in `metric` converted to psi-units.
    let to_s = 2.0 / metric.factor();
    let integrate = |a: f64, b: f64| -> Result<f64> {
        let mut n = ((b - a) * steps_per_unit as f64).ceil() as usize;
        n += n % 2;
        let h = (b - a) / n as f64;
        let vals: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let s = a + h * i as f64;
                let mut acc = 0.0;
                for sign in [-1.0, 1.0] {
                    let y = peak.point_at(sign * s, DecayMetric::Psi)?;
                    acc += peak.modulus(y).powi(2);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sum = vals[0] + vals[n];
        for (i, v) in vals.iter().enumerate().take(n).skip(1) {
            sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        Ok(sum * h / 3.0)
    };
    let (s_cut, s_reach) = (cut * to_s, reach * to_s);
    let core = integrate(0.0, s_cut)?;
    let computed_tail = integrate(s_cut, s_reach)?;
    // Beyond the reach, |h|^2 <~ v (s / s_reach)^{2 slope}, with v the
    // envelope over the last unit of phase before the reach.
    let mut v: f64 = 0.0;
    for i in 0..=64 {
        let s = s_reach - 2.0 * PI * i as f64 / 64.0;
        for sign in [-1.0, 1.0] {
            v = v.max(peak.modulus(peak.point_at(sign * s, DecayMetric::Psi)?).powi(2));
        }
    }
    let p = 2.0 * decay_slope;
    let extrapolated_tail = if p < -1.0 {
        2.0 * v * s_reach / (-p - 1.0)
    } else {
        f64::INFINITY
    };
    let tail = computed_tail + extrapolated_tail;
    Ok(TailReport {
        metric,
        core,
        computed_tail,
        extrapolated_tail,
        cut,
        reach,
        tail_fraction: tail / (core + tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hb::SpaceSpec;

    #[test]
    fn peak_is_one_at_center_and_decays() {
        let p = PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap();
        let w = Interval::new(-60.0, 60.0).unwrap();
        let h = peak_function(&p, 0.0, 6, 0.5, w).unwrap();
        assert_eq!(h.modulus(0.0), 1.0);
        assert!((h.modulus(1e-7) - 1.0).abs() < 1e-5);
        assert_eq!(h.poles.len(), 6);
        assert!(h.modulus(30.0) < 1e-3);
        let res = peak_function(&p, 0.0, 500, 0.5, w);
        assert!(matches!(res, Err(Error::NotEnoughNodes { .. })));
    }
}
