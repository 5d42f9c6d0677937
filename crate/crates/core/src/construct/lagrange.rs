//! Lagrange-type interpolation `F(z) = sum_lambda w_lambda f(z) / ((z - lambda) f'(lambda))`.
//!
//! Two multipliers are available. A sine-type multiplier `E e^{-i alpha} -
//! E^# e^{i alpha}` vanishes exactly on `{phi = alpha mod pi}`; its Lagrange
//! functions are normalized kernels `K(x, lambda) / K(lambda, lambda)`.
//!
//! A multiplier plan is realized on the real line through its potential:
//! `|f| = e^{-w} |E|`, and `f` changes sign exactly at its simple real zeros
//! (`Sigma` carries even multiplicity on the line or comes in conjugate
//! pairs). Then `|f'(lambda)| = e^{-w~(lambda)} |E(lambda)|` with
//! `w~(lambda) = lim (w(x) + log|x - lambda|)`. The finite product over the
//! windowed zeros is not used: without the continuous part of the potential
//! it is a polynomial of high degree and its Lagrange sum grows like a
//! Runge interpolant away from the nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::MultiplierPlan;
use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};
use crate::kernels::kernel;
use crate::numerics::quadrature::GaussLegendre;
use crate::sequences::RealSequence;

/// Smallest admissible `phi'(lambda) |lambda - zeta|` between a node and
/// another zero of the multiplier.
pub const MIN_NODE_GAP: f64 = 1e-12;

/// The function whose zeros carry the interpolation.
#[derive(Clone, Debug)]
pub enum Multiplier {
    SineType { alpha: f64 },
    Plan(MultiplierPlan),
}

#[derive(Clone, Debug)]
enum Basis {
    Kernel,
    Potential {
        field: PotentialField,
        /// Sorted simple real zeros of the multiplier.
        real: Vec<f64>,
        /// `log(e^{w~(lambda)} / |E(lambda)|)` and the sign of `f'(lambda)`.
        log_coeff: Vec<f64>,
        sign: Vec<f64>,
    },
}

/// Evaluator for the interpolant.
#[derive(Clone, Debug)]
pub struct LagrangeInterpolant {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    basis: Basis,
}

/// Window norm of the interpolant against the norm of its data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub window: Interval,
    /// `int_window |F/E|^2 dx`.
    pub norm_sq: f64,
    /// `pi sum |w|^2 / (|E(lambda)|^2 phi'(lambda))`.
    pub data_norm_sq: f64,
    pub ratio: f64,
}

/// Builds the interpolant of `values` at `nodes`.
pub fn lagrange_interpolate(
    profile: &PhaseProfile,
    multiplier: &Multiplier,
    nodes: &RealSequence,
    values: &[f64],
) -> Result<LagrangeInterpolant> {
    if values.len() != nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values for {} nodes",
            values.len(),
            nodes.len()
        )));
    }
    let basis = match multiplier {
        Multiplier::SineType { alpha } => {
            for &x in nodes.points() {
                let r = (profile.phase(x) - alpha) / PI;
                if (r - r.round()).abs() > 1e-9 * (1.0 + r.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "node {x} is not a zero of the sine-type multiplier"
                    )));
                }
            }
            Basis::Kernel
        }
        Multiplier::Plan(plan) => potential_basis(profile, plan, nodes.points())?,
    };
    Ok(LagrangeInterpolant {
        nodes: nodes.points().to_vec(),
        values: values.to_vec(),
        basis,
    })
}

fn potential_basis(profile: &PhaseProfile, plan: &MultiplierPlan, nodes: &[f64]) -> Result<Basis> {
    let real = plan.real_zeros();
    let field = PotentialField::new(profile, plan)?;
    let mut log_coeff = Vec::with_capacity(nodes.len());
    let mut sign = Vec::with_capacity(nodes.len());
    for &lam in nodes {
        let i = real.partition_point(|&z| z < lam);
        let own = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .find(|&j| real.get(j).is_some_and(|&z| (z - lam).abs() <= 1e-12 * (1.0 + lam.abs())));
        let Some(own) = own else {
            return Err(Error::InvalidArgument(format!("node {lam} is not a zero of the plan")));
        };
        let z = Complex64::new(lam, 0.0);
        let mut disc = 0.0;
        let mut skipped = false;
        for &(zeta, m) in field.zeros() {
            if !skipped && zeta.im == 0.0 && zeta.re == real[own] && m == 1.0 {
                skipped = true;
                continue;
            }
            let gap = (z - zeta).norm();
            if gap * profile.dphi(lam) < MIN_NODE_GAP {
                return Err(Error::IllConditioned(format!(
                    "zero {zeta} lies {gap:e} from node {lam}"
                )));
            }
            disc += m * gap.ln();
        }
        let w_reg = field.continuous(z) - disc;
        log_coeff.push(w_reg - profile.log_abs_e(lam));
        // Simple real zeros to the right of lambda each flip the sign of f'.
        let right = real.len() - own - 1;
        sign.push(if right % 2 == 0 { 1.0 } else { -1.0 });
    }
    Ok(Basis::Potential {
        field,
        real,
        log_coeff,
        sign,
    })
}

impl LagrangeInterpolant {
    pub fn eval(&self, profile: &PhaseProfile, x: f64) -> f64 {
        if let Ok(i) = self.nodes.binary_search_by(|v| v.total_cmp(&x)) {
            return self.values[i];
        }
        match &self.basis {
            Basis::Kernel => self
                .nodes
                .iter()
                .zip(&self.values)
                .map(|(&lam, &w)| {
                    let k = kernel(profile, x, lam);
                    w * k.k / k.norm_sq_y
                })
                .sum(),
            Basis::Potential {
                field,
                real,
                log_coeff,
                sign,
            } => {
                let w = field.w_real(x);
                if w == f64::INFINITY {
                    return 0.0;
                }
                let right = real.len() - real.partition_point(|&z| z < x);
                let s_x = if right % 2 == 0 { 1.0 } else { -1.0 };
                let base = profile.log_abs_e(x) - w;
                let sum: f64 = self
                    .nodes
                    .iter()
                    .zip(&self.values)
                    .enumerate()
                    .filter(|(_, (_, &v))| v != 0.0)
                    .map(|(i, (&lam, &v))| v * sign[i] * (base + log_coeff[i]).exp() / (x - lam))
                    .sum();
                s_x * sum
            }
        }
    }

    /// Gauss–Legendre quadrature of `|F/E|^2` over `window` on panels of
    /// phase measure `pi / 4`.
    pub fn norm_report(&self, profile: &PhaseProfile, window: Interval) -> Result<NormReport> {
        let t0 = profile.phase(window.lo);
        let t1 = profile.phase(window.hi);
        let panels = (((t1 - t0) / (0.25 * PI)).ceil() as usize).max(1);
        let mut edges = Vec::with_capacity(panels + 1);
        for k in 0..=panels {
            edges.push(profile.inverse_in(t0 + (t1 - t0) * k as f64 / panels as f64, window)?);
        }
        edges[0] = window.lo;
        edges[panels] = window.hi;
        let gl = GaussLegendre::sixteen();
        let norm_sq: f64 = edges
            .par_windows(2)
            .map(|e| {
                gl.integrate(e[0], e[1], |x| {
                    let f = self.eval(profile, x);
                    f * f * (-2.0 * profile.log_abs_e(x)).exp()
                })
            })
            .sum();
        let data_norm_sq: f64 = self
            .nodes
            .iter()
            .zip(&self.values)
            .filter(|(&x, _)| window.contains(x))
            .map(|(&x, &w)| PI * w * w * (-2.0 * profile.log_abs_e(x)).exp() / profile.dphi(x))
            .sum();
        Ok(NormReport {
            window,
            norm_sq,
            data_norm_sq,
            ratio: norm_sq / data_norm_sq,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::plan::{build_plan, PlanOptions};
    use crate::hb::SpaceSpec;

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    #[test]
    fn sine_type_on_integers_is_sinc() {
        let p = pw();
        let nodes = RealSequence::new((-20..=20).map(f64::from).collect()).unwrap();
        let mut values = vec![0.0; nodes.len()];
        values[20] = 1.0;
        let f = lagrange_interpolate(&p, &Multiplier::SineType { alpha: 0.0 }, &nodes, &values).unwrap();
        for x in [0.3, -1.7, 4.25] {
            let sinc = (PI * x).sin() / (PI * x);
            assert!((f.eval(&p, x) - sinc).abs() < 1e-13);
        }
        let half = RealSequence::new(vec![0.5]).unwrap();
        let res = lagrange_interpolate(&p, &Multiplier::SineType { alpha: 0.0 }, &half, &[1.0]);
        assert!(matches!(res, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn plan_interpolant_has_lagrange_property() {
        let p = pw();
        // Density 1/1.2 of the critical one leaves room for epsilon = 0.1.
        let w = Interval::new(-100.0, 100.0).unwrap();
        let lam = RealSequence::new((-83..=83).map(|k| 1.2 * k as f64).collect()).unwrap();
        let plan = build_plan(&p, &lam, w, &PlanOptions::with_epsilon(0.1)).unwrap();
        let nodes = RealSequence::from_unsorted(plan.lambda()).unwrap();
        let values: Vec<f64> = nodes.points().iter().map(|x| (0.3 * x).cos()).collect();
        let f = lagrange_interpolate(&p, &Multiplier::Plan(plan.clone()), &nodes, &values).unwrap();
        for (x, v) in nodes.points().iter().zip(&values) {
            assert_eq!(f.eval(&p, *x), *v);
        }
        // A single Lagrange function tends to 1 at its node from both sides,
        // i.e. the realized f'(lambda) matches the difference quotient of f.
        let i0 = nodes.points().partition_point(|&x| x < 0.0);
        let lam0 = nodes.points()[i0];
        let mut delta = vec![0.0; nodes.len()];
        delta[i0] = 1.0;
        let l0 = lagrange_interpolate(&p, &Multiplier::Plan(plan.clone()), &nodes, &delta).unwrap();
        for h in [-1e-6, 1e-6] {
            assert!((l0.eval(&p, lam0 + h) - 1.0).abs() < 1e-3);
        }
        assert!(l0.eval(&p, nodes.points()[i0 + 1] + 1e-9).abs() < 1e-5);
        let zero = lagrange_interpolate(&p, &Multiplier::Plan(plan.clone()), &nodes, &vec![0.0; nodes.len()]).unwrap();
        assert_eq!(zero.eval(&p, 0.37), 0.0);
        let r = f.norm_report(&p, plan.inner_window).unwrap();
        assert!(r.norm_sq.is_finite() && r.ratio > 0.0);
    }
}
