//! Moment matching: `n` complex points whose power sums reproduce the
//! normalized moments of a real measure on an interval.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hb::Interval;
use crate::numerics::poly::{
    companion_roots, elementary_from_power_sums, eval_with_derivative, monic_from_elementary, power_sums,
};
use crate::numerics::quadrature::GaussLegendre;

/// Largest normalized moment accepted before asking for a rescale.
pub const MOMENT_LIMIT: f64 = 1e12;

/// Absolutely continuous part of a moment problem.
#[derive(Clone, Default)]
pub enum ContinuousPart {
    #[default]
    None,
    /// Constant density on the interval.
    Uniform(f64),
    /// Density given pointwise.
    Density(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ContinuousPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousPart::None => write!(f, "None"),
            ContinuousPart::Uniform(c) => write!(f, "Uniform({c})"),
            ContinuousPart::Density(_) => write!(f, "Density(..)"),
        }
    }
}

impl ContinuousPart {
    fn density(&self, x: f64) -> f64 {
        match self {
            ContinuousPart::None => 0.0,
            ContinuousPart::Uniform(c) => *c,
            ContinuousPart::Density(f) => f(x),
        }
    }
}

/// A real measure on an interval: continuous density plus point masses.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub interval: Interval,
    pub continuous: ContinuousPart,
    pub masses: Vec<(f64, f64)>,
    pub order: usize,
}

/// Points solving a moment problem, in original and in scaled coordinates
/// (the interval mapped affinely onto `(-1, 1)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSolution {
    pub points: Vec<Complex64>,
    pub scaled: Vec<Complex64>,
    /// Targets `c_j = (n / tau(I)) int t^j dtau(t)` in scaled coordinates.
    pub targets: Vec<f64>,
    pub total_mass: f64,
    /// `max_j |p_j(scaled) - c_j| / (1 + |c_j|)`.
    pub residual: f64,
}

impl MomentProblem {
    fn center_radius(&self) -> (f64, f64) {
        (self.interval.mid(), 0.5 * self.interval.len())
    }

    /// `int t^j dtau` for `j = 0..=n` in scaled coordinates.
    pub fn scaled_moments(&self) -> Result<Vec<f64>> {
        let (c, r) = self.center_radius();
        let n = self.order;
        let mut mom = vec![0.0; n + 1];
        for &(x, w) in &self.masses {
            let t = (x - c) / r;
            let mut p = 1.0;
            for m in mom.iter_mut() {
                *m += w * p;
                p *= t;
            }
        }
        let cont = match &self.continuous {
            ContinuousPart::None => vec![0.0; n + 1],
            ContinuousPart::Uniform(d) => (0..=n)
                .map(|j| {
                    // int_{-1}^{1} t^j d * r dt
                    if j % 2 == 1 {
                        0.0
                    } else {
                        2.0 * d * r / (j as f64 + 1.0)
                    }
                })
                .collect(),
            ContinuousPart::Density(_) => self.continuous_moments_adaptive(c, r)?,
        };
        for (m, v) in mom.iter_mut().zip(cont) {
            *m += v;
        }
        Ok(mom)
    }

    fn continuous_moments_with(&self, c: f64, r: f64, panels: usize) -> Vec<f64> {
        let n = self.order;
        let gl = GaussLegendre::sixteen();
        let mut mom = vec![0.0; n + 1];
        let h = 2.0 / panels as f64;
        for k in 0..panels {
            let a = -1.0 + h * k as f64;
            for (&node, &wt) in gl.nodes().iter().zip(gl.weights()) {
                let t = a + 0.5 * h * (node + 1.0);
                let d = self.continuous.density(c + r * t) * r * wt * 0.5 * h;
                let mut p = 1.0;
                for m in mom.iter_mut() {
                    *m += d * p;
                    p *= t;
                }
            }
        }
        mom
    }

    fn continuous_moments_adaptive(&self, c: f64, r: f64) -> Result<Vec<f64>> {
        let mut panels = 4;
        let mut prev = self.continuous_moments_with(c, r, panels);
        while panels < 4096 {
            panels *= 2;
            let next = self.continuous_moments_with(c, r, panels);
            let ok = prev
                .iter()
                .zip(&next)
                .all(|(a, b)| (a - b).abs() <= 1e-13 * (1.0 + b.abs()));
            if ok {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNonConvergence(format!(
            "moments on ({}, {}) did not settle with {panels} panels",
            self.interval.lo, self.interval.hi
        )))
    }
}

/// Candidate distances at which computed roots are treated as one cluster.
const CLUSTER_RADII: [f64; 4] = [1e-5, 1e-4, 1e-3, 1e-2];

/// Solves `(1/tau(I)) int x^j dtau = (1/n) sum xi_k^j`, `j = 1..=n`, via
/// Newton's identities and the roots of the resulting monic polynomial.
pub fn moment_match(problem: &MomentProblem) -> Result<MomentSolution> {
    let n = problem.order;
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be positive".into()));
    }
    let mom = problem.scaled_moments()?;
    let total = mom[0];
    let variation: f64 = problem.masses.iter().map(|m| m.1.abs()).sum::<f64>() + mom[0].abs();
    if total == 0.0 || total.abs() < 1e-14 * variation {
        return Err(Error::InvalidArgument(format!(
            "total mass {total} is too small to normalize"
        )));
    }
    let targets: Vec<f64> = mom[1..].iter().map(|m| n as f64 * m / total).collect();
    for (j, &cj) in targets.iter().enumerate() {
        if !cj.is_finite() || cj.abs() > MOMENT_LIMIT {
            return Err(Error::MomentOverflow {
                order: j + 1,
                value: cj.abs(),
            });
        }
    }
    let p: Vec<Complex64> = targets.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let coeffs = monic_from_elementary(&elementary_from_power_sums(&p));
    let mut roots = companion_roots(&coeffs)?;
    let mut residual = power_residual(&roots, &targets);
    // A multiple root comes back from the eigensolver as a ring of radius
    // about eps^(1/m); merge such rings whenever the power sums stay within
    // round-off of the targets. Larger radii are tried first.
    let tolerance = residual.max(1e-12);
    for radius in CLUSTER_RADII.iter().rev() {
        if let Some(collapsed) = collapse_clusters(&roots, &coeffs, *radius) {
            let r2 = power_residual(&collapsed, &targets);
            if r2 <= tolerance {
                roots = collapsed;
                residual = r2;
                break;
            }
        }
    }
    sort_points(&mut roots);
    let (c, r) = problem.center_radius();
    let points = roots.iter().map(|z| z * r + c).collect();
    Ok(MomentSolution {
        points,
        scaled: roots,
        targets,
        total_mass: total,
        residual,
    })
}

/// `max_j |p_j(z) - c_j| / (1 + |c_j|)`.
pub fn power_residual(z: &[Complex64], targets: &[f64]) -> f64 {
    power_sums(z, targets.len())
        .iter()
        .zip(targets)
        .map(|(p, &c)| (p - c).norm() / (1.0 + c.abs()))
        .fold(0.0, f64::max)
}

/// Replaces each cluster of `m` nearby roots by an `m`-fold root located as
/// the simple zero of the `(m-1)`-th derivative near the cluster centroid.
/// Returns `None` when there is nothing to merge.
fn collapse_clusters(roots: &[Complex64], coeffs: &[Complex64], radius: f64) -> Option<Vec<Complex64>> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while l[i] != i {
            l[i] = l[l[i]];
            i = l[i];
        }
        i
    }
    let mut merged = false;
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                    merged = true;
                }
            }
        }
    }
    if !merged {
        return None;
    }
    let mut out = roots.to_vec();
    for i in 0..n {
        let root = find(&mut label, i);
        let members: Vec<usize> = (0..n).filter(|&k| find(&mut label, k) == root).collect();
        let mean: Complex64 = members.iter().map(|&k| roots[k]).sum::<Complex64>() / members.len() as f64;
        out[i] = multiple_root(coeffs, members.len(), mean);
    }
    Some(out)
}

/// Newton iteration on the `(m-1)`-th derivative of the polynomial.
fn multiple_root(coeffs: &[Complex64], m: usize, start: Complex64) -> Complex64 {
    let mut d = coeffs.to_vec();
    for _ in 1..m {
        let deg = d.len() - 1;
        d = d[..deg]
            .iter()
            .enumerate()
            .map(|(i, c)| c * (deg - i) as f64)
            .collect();
    }
    let mut z = start;
    for _ in 0..20 {
        let (p, dp) = eval_with_derivative(&d, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Orders points by real part, then imaginary part.
pub fn sort_points(z: &mut [Complex64]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn lebesgue_gives_gauss_nodes() {
        let sol = moment_match(&MomentProblem {
            interval: unit(),
            continuous: ContinuousPart::Uniform(1.0),
            masses: vec![],
            order: 2,
        })
        .unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((sol.points[0] - Complex64::new(-s, 0.0)).norm() < 1e-10);
        assert!((sol.points[1] - Complex64::new(s, 0.0)).norm() < 1e-10);

        let dens = moment_match(&MomentProblem {
            interval: unit(),
            continuous: ContinuousPart::Density(Arc::new(|_| 1.0)),
            masses: vec![],
            order: 2,
        })
        .unwrap();
        assert!((dens.points[0] - sol.points[0]).norm() < 1e-12);
    }

    #[test]
    fn point_mass_collapses_to_its_location() {
        for n in 1..=6 {
            let sol = moment_match(&MomentProblem {
                interval: unit(),
                continuous: ContinuousPart::None,
                masses: vec![(0.3, 1.0)],
                order: n,
            })
            .unwrap();
            for p in &sol.points {
                assert!((p - Complex64::new(0.3, 0.0)).norm() < 1e-9, "n={n}: {p}");
            }
        }
    }

    #[test]
    fn symmetric_pair() {
        let sol = moment_match(&MomentProblem {
            interval: unit(),
            continuous: ContinuousPart::None,
            masses: vec![(-1.0, 1.0), (1.0, 1.0)],
            order: 2,
        })
        .unwrap();
        assert!((sol.points[0] + 1.0).norm() < 1e-12);
        assert!((sol.points[1] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn zero_mass_and_overflow_are_rejected() {
        let zero = MomentProblem {
            interval: unit(),
            continuous: ContinuousPart::None,
            masses: vec![(0.5, 1.0), (-0.5, -1.0)],
            order: 2,
        };
        assert!(moment_match(&zero).is_err());
        let tiny = MomentProblem {
            interval: unit(),
            continuous: ContinuousPart::None,
            masses: vec![(0.9, 1.0), (-0.9, -1.0 + 1e-13)],
            order: 2,
        };
        assert!(matches!(moment_match(&tiny), Err(Error::MomentOverflow { .. })));
    }

    #[test]
    fn mapped_interval_moments() {
        let sol = moment_match(&MomentProblem {
            interval: Interval::new(2.0, 6.0).unwrap(),
            continuous: ContinuousPart::Uniform(0.5),
            masses: vec![(3.0, -0.25)],
            order: 3,
        })
        .unwrap();
        assert!(sol.residual < 1e-12);
        assert!(sol.points.iter().all(|z| (z.re - 4.0).abs() < 2.0 * 4.0));
    }
}
