use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::{SpaceSpec, DEFAULT_EPS};
use crate::error::{Error, Result};

/// A closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("bad interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Half-open membership `[lo, hi)`, the counting convention for densities.
    pub fn contains_half_open(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi
    }
}

/// Disk in the plane whose diameter is a real interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - Complex64::new(self.center, 0.0)).norm() < self.radius
    }
}

/// Cached phase data at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub phi: f64,
    pub dphi: f64,
}

/// Evaluators for the phase `phi`, its derivatives, its inverse and the
/// phase metric `d(x, y) = |phi(x) - phi(y)|`.
///
/// For zero lists the branch is fixed by `phi(0) = 0`.
#[derive(Clone, Debug)]
pub struct PhaseProfile {
    spec: SpaceSpec,
    poles: Vec<(f64, f64)>,
    offset: f64,
    eps: f64,
}

impl PhaseProfile {
    pub fn new(spec: SpaceSpec) -> Result<Self> {
        Self::with_eps(spec, DEFAULT_EPS)
    }

    pub fn with_eps(spec: SpaceSpec, eps: f64) -> Result<Self> {
        spec.validate()?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let poles = spec.poles();
        let offset = poles.iter().map(|&(a, b)| (a / b).atan()).sum();
        Ok(PhaseProfile {
            spec,
            poles,
            offset,
            eps,
        })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The additive branch constant `c0`.
    pub fn branch_constant(&self) -> f64 {
        self.offset
    }

    fn slope(&self) -> Option<f64> {
        match self.spec {
            SpaceSpec::PaleyWiener { slope } => Some(slope),
            _ => None,
        }
    }

    pub fn phase(&self, x: f64) -> f64 {
        match self.slope() {
            Some(a) => a * x,
            None => {
                self.poles
                    .iter()
                    .map(|&(a, b)| ((x - a) / b).atan())
                    .sum::<f64>()
                    + self.offset
            }
        }
    }

    /// `phi(x) - phi(y)` without cancellation: each arctan difference is
    /// formed as `atan2((x - y)/b, 1 + u v)`.
    pub fn phase_diff(&self, x: f64, y: f64) -> f64 {
        match self.slope() {
            Some(a) => a * (x - y),
            None => self
                .poles
                .iter()
                .map(|&(a, b)| {
                    let u = (x - a) / b;
                    let v = (y - a) / b;
                    ((x - y) / b).atan2(1.0 + u * v)
                })
                .sum(),
        }
    }

    /// `phi'(x)`, the Poisson sum `sum b_n / ((x - a_n)^2 + b_n^2)`.
    pub fn dphi(&self, x: f64) -> f64 {
        match self.slope() {
            Some(a) => a,
            None => self
                .poles
                .iter()
                .map(|&(a, b)| {
                    let d = x - a;
                    b / (d * d + b * b)
                })
                .sum(),
        }
    }

    /// `phi''(x) = -sum 2 b_n (x - a_n) / ((x - a_n)^2 + b_n^2)^2`.
    pub fn d2phi(&self, x: f64) -> f64 {
        match self.slope() {
            Some(_) => 0.0,
            None => self
                .poles
                .iter()
                .map(|&(a, b)| {
                    let d = x - a;
                    let q = d * d + b * b;
                    -2.0 * b * d / (q * q)
                })
                .sum(),
        }
    }

    pub fn point(&self, x: f64) -> PhasePoint {
        PhasePoint {
            x,
            phi: self.phase(x),
            dphi: self.dphi(x),
        }
    }

    /// Limits of `phi` at `-inf` and `+inf`.
    pub fn phase_range(&self) -> (f64, f64) {
        match self.slope() {
            Some(_) => (f64::NEG_INFINITY, f64::INFINITY),
            None => {
                let half = self.poles.len() as f64 * FRAC_PI_2;
                (self.offset - half, self.offset + half)
            }
        }
    }

    /// Total variation of `phi` over the real line.
    pub fn total_variation(&self) -> f64 {
        let (lo, hi) = self.phase_range();
        hi - lo
    }

    pub fn metric(&self, x: f64, y: f64) -> f64 {
        self.phase_diff(x, y).abs()
    }

    /// `log|E(x)|` on the real line.
    pub fn log_abs_e(&self, x: f64) -> f64 {
        self.spec.log_abs_e(x)
    }

    /// Solves `phi(x) = t` inside `bracket`.
    pub fn inverse_in(&self, t: f64, bracket: Interval) -> Result<f64> {
        let (mut lo, mut hi) = (bracket.lo, bracket.hi);
        let (plo, phi) = (self.phase(lo), self.phase(hi));
        let tol = self.eps;
        if !(t.is_finite() && t >= plo - tol && t <= phi + tol) {
            return Err(Error::PhaseRange {
                target: t,
                lo: plo,
                hi: phi,
            });
        }
        if let Some(a) = self.slope() {
            return Ok((t / a).clamp(lo, hi));
        }
        // Start from the linear interpolant in phase.
        let mut x = if phi > plo {
            lo + (t - plo) / (phi - plo) * (hi - lo)
        } else {
            0.5 * (lo + hi)
        };
        let mut width = hi - lo;
        for _ in 0..400 {
            let f = self.phase(x) - t;
            if f > 0.0 {
                hi = x;
            } else if f < 0.0 {
                lo = x;
            } else {
                return Ok(x);
            }
            let next = x - f / self.dphi(x);
            let inside = next > lo && next < hi;
            if f.abs() < tol {
                // One Newton polish of a point already within eps.
                return Ok(if inside { next } else { x });
            }
            // Newton steps that land inside the bracket may still shrink it
            // very slowly on arctan-shaped phases; bisect whenever the
            // bracket did not shrink by a fixed factor.
            let shrunk = hi - lo <= 0.75 * width;
            width = hi - lo;
            x = if inside && shrunk { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                return Ok(x);
            }
        }
        Ok(x)
    }

    /// Solves `phi(x) = t` on the whole line, growing a bracket as needed.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        let (rlo, rhi) = self.phase_range();
        if !(t > rlo && t < rhi) {
            return Err(Error::PhaseRange {
                target: t,
                lo: rlo,
                hi: rhi,
            });
        }
        if let Some(a) = self.slope() {
            return Ok(t / a);
        }
        let mut lo = -1.0;
        while self.phase(lo) > t {
            lo *= 2.0;
            if lo < -1e300 {
                return Err(Error::PhaseRange {
                    target: t,
                    lo: rlo,
                    hi: rhi,
                });
            }
        }
        let mut hi = 1.0;
        while self.phase(hi) < t {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::PhaseRange {
                    target: t,
                    lo: rlo,
                    hi: rhi,
                });
            }
        }
        self.inverse_in(t, Interval { lo, hi })
    }

    /// `I(x, r) = { y : |phi(x) - phi(y)| < r }`.
    pub fn interval(&self, x: f64, r: f64) -> Result<Interval> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        let (rlo, rhi) = self.phase_range();
        let t = self.phase(x);
        if t - r <= rlo {
            return Err(Error::UnboundedInterval {
                center: x,
                radius: r,
                side: "left",
            });
        }
        if t + r >= rhi {
            return Err(Error::UnboundedInterval {
                center: x,
                radius: r,
                side: "right",
            });
        }
        let lo = self.inverse(t - r)?.min(x);
        let hi = self.inverse(t + r)?.max(x);
        Ok(Interval { lo, hi })
    }

    /// The disk having `I(x, r)` as diameter.
    pub fn disk(&self, x: f64, r: f64) -> Result<Disk> {
        let iv = self.interval(x, r)?;
        Ok(Disk {
            center: iv.mid(),
            radius: 0.5 * iv.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    fn one_zero() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::finite_zeros(vec![Complex64::new(0.0, -1.0)]).unwrap())
            .unwrap()
    }

    #[test]
    fn phase_examples() {
        assert!((pw().phase(0.5) - PI / 2.0).abs() < 1e-15);
        assert_eq!(one_zero().phase(0.0), 0.0);
        assert!((one_zero().phase(1.0) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(pw().dphi(12.3), PI);
        assert_eq!(one_zero().dphi(0.0), 1.0);
        assert_eq!(pw().d2phi(-4.0), 0.0);
    }

    #[test]
    fn inverse_examples() {
        assert!((pw().inverse(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((one_zero().inverse(FRAC_PI_4).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            one_zero().inverse(2.0),
            Err(Error::PhaseRange { .. })
        ));
        let br = Interval::new(0.0, 1.0).unwrap();
        assert!(matches!(pw().inverse_in(4.0, br), Err(Error::PhaseRange { .. })));
    }

    #[test]
    fn metric_examples() {
        assert!((pw().metric(0.0, 1.0) - PI).abs() < 1e-15);
        assert_eq!(pw().metric(2.0, 2.0), 0.0);
        assert!((one_zero().metric(0.0, 1.0) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn interval_examples() {
        let iv = pw().interval(0.0, PI).unwrap();
        assert!((iv.lo + 1.0).abs() < 1e-15 && (iv.hi - 1.0).abs() < 1e-15);
        let iv = one_zero().interval(0.0, FRAC_PI_4).unwrap();
        assert!((iv.lo + 1.0).abs() < 1e-12 && (iv.hi - 1.0).abs() < 1e-12);
        let small = one_zero().interval(0.3, 1e-9).unwrap();
        assert!(small.len() < 1e-8);
        let disk = one_zero().disk(0.0, FRAC_PI_4).unwrap();
        assert!(disk.center.abs() < 1e-12 && (disk.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interval_beyond_phase_range_is_unbounded() {
        assert!(matches!(
            one_zero().interval(0.0, 2.0),
            Err(Error::UnboundedInterval { side: "left", .. })
        ));
    }

    #[test]
    fn phase_diff_is_accurate_near_diagonal() {
        let p = PhaseProfile::new(SpaceSpec::geometric_chain(2.0, 40).unwrap()).unwrap();
        let x = 1234.5;
        let h = 1e-9;
        let y = x + h;
        let d = p.phase_diff(y, x);
        assert!((d / (y - x) - p.dphi(x)).abs() / p.dphi(x) < 1e-9);
    }

    #[test]
    fn phase_range_of_single_zero() {
        let (lo, hi) = one_zero().phase_range();
        assert!((lo + FRAC_PI_2).abs() < 1e-15 && (hi - FRAC_PI_2).abs() < 1e-15);
        assert!((one_zero().total_variation() - PI).abs() < 1e-15);
    }

    #[test]
    fn inverse_converges_between_sharp_nearby_zeros() {
        // Narrow arctan steps near 6.2 and 7.4 on a wide bracket used to
        // stall the safeguarded Newton iteration.
        let zeros = [0.0, 6.220697857843851, 7.4394947331599495]
            .iter()
            .map(|&a| Complex64::new(a, -0.2))
            .collect();
        let p = PhaseProfile::new(SpaceSpec::finite_zeros(zeros).unwrap()).unwrap();
        let w = Interval::new(-60.0, 60.0).unwrap();
        let (t0, t1) = (p.phase(w.lo), p.phase(w.hi));
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=200 {
            let t = t0 + (t1 - t0) * k as f64 / 200.0;
            let x = p.inverse_in(t, w).unwrap();
            assert!((p.phase(x) - t).abs() < 1e-11, "t = {t}");
            assert!(x >= prev);
            prev = x;
        }
    }
}
