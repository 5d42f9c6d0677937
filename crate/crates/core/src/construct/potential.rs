//! The log-potential `w(z) = int log|z - t| dnu(t)` of a multiplier plan and
//! its verification: `e^{-w} = |f| e^{-Psi}` for the multiplier `f`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{rho, MultiplierPlan};
use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};
use crate::numerics::quadrature::GaussLegendre;

/// Largest phase measure of a base quadrature panel.
const PANEL_PHASE: f64 = 0.5;
/// Depth of geometric grading toward a log singularity.
// The innermost piece has relative length 2^-24; freezing the density there
// costs O(l^2 log l), far below double precision, while keeping every
// quadrature node many ulps away from the singularity.
const GRADING_LEVELS: usize = 24;

/// Evaluator for `w`, built from a plan.
#[derive(Clone, Debug)]
pub struct PotentialField {
    profile: PhaseProfile,
    panels: Vec<(f64, f64)>,
    /// `(point, weight)` with weight `+m` for a zero of multiplicity `m`.
    zeros: Vec<(Complex64, f64)>,
}

impl PotentialField {
    pub fn new(profile: &PhaseProfile, plan: &MultiplierPlan) -> Result<Self> {
        let mut panels = Vec::new();
        for b in &plan.blocks {
            let t0 = profile.phase(b.lo);
            let t1 = profile.phase(b.hi);
            let count = ((t1 - t0) / PANEL_PHASE).ceil().max(1.0) as usize;
            let bracket = Interval { lo: b.lo, hi: b.hi };
            let mut prev = b.lo;
            for j in 1..=count {
                let next = if j == count {
                    b.hi
                } else {
                    profile.inverse_in(t0 + (t1 - t0) * j as f64 / count as f64, bracket)?
                };
                panels.push((prev, next));
                prev = next;
            }
        }
        let mut zeros: Vec<(Complex64, f64)> = plan
            .real_zeros()
            .into_iter()
            .map(|x| (Complex64::new(x, 0.0), 1.0))
            .collect();
        zeros.extend(plan.sigma().iter().map(|s| (s.z, s.multiplicity as f64)));
        Ok(PotentialField {
            profile: profile.clone(),
            panels,
            zeros,
        })
    }

    /// An empty field (`nu = 0`).
    pub fn empty(profile: &PhaseProfile) -> Self {
        PotentialField {
            profile: profile.clone(),
            panels: Vec::new(),
            zeros: Vec::new(),
        }
    }

    pub fn profile(&self) -> &PhaseProfile {
        &self.profile
    }

    /// Zeros of the multiplier with multiplicities.
    pub fn zeros(&self) -> &[(Complex64, f64)] {
        &self.zeros
    }

    /// `w(z)`; `+inf` at a zero of the multiplier, where `e^{-w}` vanishes.
    pub fn w(&self, z: Complex64) -> f64 {
        let mut disc = 0.0;
        for &(zeta, m) in &self.zeros {
            let d = (z - zeta).norm();
            if d == 0.0 {
                return f64::INFINITY;
            }
            disc += m * d.ln();
        }
        self.continuous(z) - disc
    }

    pub fn w_real(&self, x: f64) -> f64 {
        self.w(Complex64::new(x, 0.0))
    }

    /// `int (phi'(t)/pi) log|z - t| dt` over the blocks.
    pub fn continuous(&self, z: Complex64) -> f64 {
        let gl = GaussLegendre::sixteen();
        let x = z.re;
        let y = z.im.abs();
        let mut total = 0.0;
        for &(a, b) in &self.panels {
            let h = b - a;
            let dist = (a - x).max(x - b).max(0.0).hypot(y);
            if dist > h {
                total += gl.integrate(a, b, |t| self.density(t) * log_abs(t - x, y));
            } else {
                let s = x.clamp(a, b);
                if s > a {
                    total += self.graded(s, a, x, y);
                }
                if s < b {
                    total += self.graded(s, b, x, y);
                }
            }
        }
        total
    }

    fn density(&self, t: f64) -> f64 {
        self.profile.dphi(t) / PI
    }

    /// Integral over the segment from `s0` to `s1`, graded geometrically
    /// toward `s0`; the innermost piece uses the exact antiderivative with
    /// the density frozen.
    fn graded(&self, s0: f64, s1: f64, x: f64, y: f64) -> f64 {
        let gl = GaussLegendre::sixteen();
        let len = s1 - s0;
        if len.abs() <= 1e-9 * (1.0 + s0.abs()) {
            let (p, q) = (s0.min(s1), s0.max(s1));
            return self.density(0.5 * (p + q)) * (log_antiderivative(q - x, y) - log_antiderivative(p - x, y));
        }
        let mut total = 0.0;
        let mut outer = 1.0;
        for _ in 0..GRADING_LEVELS {
            let inner = 0.5 * outer;
            let (p, q) = (s0 + len * inner, s0 + len * outer);
            total += gl.integrate(p.min(q), p.max(q), |t| self.density(t) * log_abs(t - x, y));
            outer = inner;
        }
        let end = s0 + len * outer;
        let (p, q) = (s0.min(end), s0.max(end));
        total + self.density(0.5 * (p + q)) * (log_antiderivative(q - x, y) - log_antiderivative(p - x, y))
    }
}

/// `log|u + i y|`.
fn log_abs(u: f64, y: f64) -> f64 {
    if y == 0.0 {
        u.abs().ln()
    } else {
        0.5 * (u * u + y * y).ln()
    }
}

/// Antiderivative in `u` of `log|u + i y|`.
fn log_antiderivative(u: f64, y: f64) -> f64 {
    if y == 0.0 {
        if u == 0.0 {
            0.0
        } else {
            u * u.abs().ln() - u
        }
    } else {
        0.5 * u * (u * u + y * y).ln() - u + y * (u / y).atan()
    }
}

/// Settings for [`verify_multiplier`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Grid step on the inner window as a fraction of `min rho`.
    pub grid_fraction: f64,
    /// Sample points per side in each interval around a zero.
    pub samples_per_side: usize,
    /// The comparison with `d_psi` is made on `I_psi(lambda, radius_factor
    /// eta)`. At `1/5` every other zero of the multiplier is at least
    /// `eta rho / 5` away; at the full radius a retained moment point or a
    /// replacement circle may touch the interval.
    pub radius_factor: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid_fraction: 0.1,
            samples_per_side: 24,
            radius_factor: 0.2,
        }
    }
}

/// Witnessed constants of a multiplier on the inner window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub inner_window: Interval,
    pub grid_points: usize,
    /// Grid points skipped because they coincide with a zero.
    pub skipped: usize,
    /// `sup -w` over the grid; `e^{-w} <= e^B` there.
    pub b: f64,
    pub b_witness: f64,
    pub lambdas_checked: usize,
    /// Radius (in the `psi` metric) of the comparison intervals.
    pub radius: f64,
    /// Range of `e^{-w(x)} / d_psi(x, lambda)` over all sampled `x` within
    /// `radius` of a zero.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_min_witness: (f64, f64),
    pub ratio_max_witness: (f64, f64),
    pub spread: f64,
    /// Largest spread within a single comparison interval.
    pub per_lambda_spread: f64,
    /// Largest per-zero spread over the full intervals `I_psi(lambda, eta)`
    /// (diagnostic).
    pub per_lambda_spread_full_radius: f64,
    /// Range of `lim e^{-w(x)}/(|x - lambda| phi'(lambda))` as `x -> lambda`.
    pub anchor_min: f64,
    pub anchor_max: f64,
}

/// Sweeps `-w` over the inner window and the ratio `e^{-w}/d_psi` near
/// every real zero inside it.
pub fn verify_multiplier(
    field: &PotentialField,
    plan: &MultiplierPlan,
    opts: &VerifyOptions,
) -> Result<MultiplierReport> {
    let profile = field.profile();
    let inner = plan.inner_window;
    let min_rho = (0..=200)
        .map(|i| rho(profile, inner.lo + inner.len() * i as f64 / 200.0))
        .fold(f64::INFINITY, f64::min);
    let step = opts.grid_fraction * min_rho;
    let count = (inner.len() / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|i| inner.lo + inner.len() * i as f64 / (count - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| field.w_real(x)).collect();
    let mut b = f64::NEG_INFINITY;
    let mut b_witness = f64::NAN;
    let mut skipped = 0;
    for (&x, &w) in grid.iter().zip(&values) {
        if !w.is_finite() {
            skipped += 1;
            continue;
        }
        if -w > b {
            b = -w;
            b_witness = x;
        }
    }
    if !b.is_finite() {
        return Err(Error::InvalidArgument("no admissible grid point".into()));
    }

    let lambdas: Vec<f64> = plan
        .real_zeros()
        .into_iter()
        .filter(|&l| inner.contains(l))
        .collect();
    let radius = opts.radius_factor * plan.eta;
    let m = opts.samples_per_side.max(1);
    let per = ratio_stats(field, plan, &lambdas, radius, m)?;
    let full = ratio_stats(field, plan, &lambdas, plan.eta, m)?;
    let mut rep = MultiplierReport {
        inner_window: inner,
        grid_points: grid.len(),
        skipped,
        b,
        b_witness,
        lambdas_checked: lambdas.len(),
        radius,
        ratio_min: f64::INFINITY,
        ratio_max: f64::NEG_INFINITY,
        ratio_min_witness: (f64::NAN, f64::NAN),
        ratio_max_witness: (f64::NAN, f64::NAN),
        spread: f64::NAN,
        per_lambda_spread: 0.0,
        per_lambda_spread_full_radius: f64::NAN,
        anchor_min: f64::INFINITY,
        anchor_max: f64::NEG_INFINITY,
    };
    for st in per {
        if st.min < rep.ratio_min {
            rep.ratio_min = st.min;
            rep.ratio_min_witness = (st.lambda, st.min_x);
        }
        if st.max > rep.ratio_max {
            rep.ratio_max = st.max;
            rep.ratio_max_witness = (st.lambda, st.max_x);
        }
        if st.min > 0.0 {
            rep.per_lambda_spread = rep.per_lambda_spread.max(st.max / st.min);
        }
        rep.anchor_min = rep.anchor_min.min(st.anchor_min);
        rep.anchor_max = rep.anchor_max.max(st.anchor_max);
    }
    if rep.lambdas_checked > 0 {
        rep.spread = rep.ratio_max / rep.ratio_min;
        rep.per_lambda_spread_full_radius = full
            .iter()
            .map(|s| s.max / s.min)
            .fold(0.0, f64::max);
    }
    Ok(rep)
}

/// Ratio statistics on `I_psi(lambda, radius)` for each zero.
fn ratio_stats(
    field: &PotentialField,
    plan: &MultiplierPlan,
    lambdas: &[f64],
    radius: f64,
    m: usize,
) -> Result<Vec<LambdaStats>> {
    let profile = field.profile();
    let half = 0.5 * radius; // psi radius in phase units
    lambdas
        .par_iter()
        .map(|&lam| {
            let t = profile.phase(lam);
            let mut st = LambdaStats::new(lam);
            for side in [-1.0, 1.0] {
                for i in 1..=m {
                    let u = side * half * i as f64 / (m as f64 + 1.0);
                    let x = profile.inverse_in(t + u, plan.window)?;
                    if x == lam {
                        continue;
                    }
                    let w = field.w_real(x);
                    if !w.is_finite() {
                        continue;
                    }
                    let d = 2.0 * profile.metric(x, lam);
                    st.push(x, (-w).exp() / d);
                }
            }
            let dl = profile.dphi(lam);
            let hx = 1e-6 * rho(profile, lam);
            for x in [lam - hx, lam + hx] {
                let v = (-field.w_real(x)).exp() / ((x - lam).abs() * dl);
                st.anchor_min = st.anchor_min.min(v);
                st.anchor_max = st.anchor_max.max(v);
            }
            Ok(st)
        })
        .collect()
}

struct LambdaStats {
    lambda: f64,
    min: f64,
    max: f64,
    min_x: f64,
    max_x: f64,
    anchor_min: f64,
    anchor_max: f64,
}

impl LambdaStats {
    fn new(lambda: f64) -> Self {
        LambdaStats {
            lambda,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            min_x: f64::NAN,
            max_x: f64::NAN,
            anchor_min: f64::INFINITY,
            anchor_max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, x: f64, v: f64) {
        if v < self.min {
            self.min = v;
            self.min_x = x;
        }
        if v > self.max {
            self.max = v;
            self.max_x = x;
        }
    }
}

/// `(x, y, w)` rows on a rectangular grid.
pub fn potential_csv(field: &PotentialField, xs: &[f64], ys: &[f64]) -> String {
    let rows: Vec<String> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(x, y)| format!("{x:.16e},{y:.16e},{:.16e}\n", field.w(Complex64::new(x, y))))
        .collect();
    let mut out = String::from("x,y,w\n");
    for r in rows {
        out.push_str(&r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::plan::{build_plan, PlanOptions};
    use crate::hb::SpaceSpec;
    use crate::sequences::RealSequence;

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    fn lattice_plan() -> (PhaseProfile, MultiplierPlan) {
        let p = pw();
        let lam = RealSequence::new((-20..=20).map(|k| k as f64 * 2.5).collect()).unwrap();
        let w = Interval::new(-50.0, 50.0).unwrap();
        let plan = build_plan(&p, &lam, w, &PlanOptions::with_epsilon(0.5)).unwrap();
        (p, plan)
    }

    #[test]
    fn empty_field_is_zero() {
        let f = PotentialField::empty(&pw());
        assert_eq!(f.w(Complex64::new(1.3, -0.4)), 0.0);
    }

    #[test]
    fn log_integral_against_closed_form() {
        // int_{-1}^{1} log|x - t| dt at x = 0.3 and off the axis.
        let u = |x: f64, y: f64| log_antiderivative(1.0 - x, y) - log_antiderivative(-1.0 - x, y);
        let p = pw();
        let mut plan = lattice_plan().1;
        plan.blocks.truncate(1);
        plan.blocks[0].lo = -1.0;
        plan.blocks[0].hi = 1.0;
        plan.blocks[0].lambda.clear();
        plan.blocks[0].padded.clear();
        plan.blocks[0].sigma.clear();
        let f = PotentialField::new(&p, &plan).unwrap();
        for (x, y) in [(0.3, 0.0), (0.3, 1e-7), (-1.0, 0.0), (2.0, 0.5), (0.999, 0.0)] {
            let got = f.continuous(Complex64::new(x, y));
            assert!((got - u(x, y)).abs() < 1e-12, "({x}, {y}): {got} vs {}", u(x, y));
        }
    }

    #[test]
    fn zeros_give_infinite_potential() {
        let (p, plan) = lattice_plan();
        let f = PotentialField::new(&p, &plan).unwrap();
        assert_eq!(f.w_real(2.5), f64::INFINITY);
        assert!(f.w_real(2.4).is_finite());
    }

    #[test]
    fn potential_is_harmonic_off_the_axis() {
        let (p, plan) = lattice_plan();
        let f = PotentialField::new(&p, &plan).unwrap();
        let h = 1e-2;
        for (x, y) in [(0.7, 0.8), (-13.1, 1.5), (20.2, -0.6)] {
            let w = |a: f64, b: f64| f.w(Complex64::new(a, b));
            let lap = (w(x + h, y) + w(x - h, y) + w(x, y + h) + w(x, y - h) - 4.0 * w(x, y)) / (h * h);
            assert!(lap.abs() < 1e-5 / h.powi(0) * 1e2, "laplacian {lap} at ({x},{y})");
        }
    }

    #[test]
    fn lattice_multiplier_is_bounded() {
        let (p, plan) = lattice_plan();
        let f = PotentialField::new(&p, &plan).unwrap();
        let rep = verify_multiplier(&f, &plan, &VerifyOptions::default()).unwrap();
        assert!(rep.b.is_finite());
        assert!(rep.per_lambda_spread <= 100.0, "{rep:?}");
        let again = f.w_real(rep.b_witness);
        assert!((-again - rep.b).abs() <= 1e-10 * rep.b.abs().max(1.0));
    }
}
