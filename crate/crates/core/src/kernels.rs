//! Reproducing kernels of `H(E)` on the real line, orthonormal node sets,
//! Gram matrices with their Riesz and frame bounds, minimal-norm
//! interpolation, and empirical Bernstein and Carleson constants.
//!
//! On the real axis
//! `K(x, y) = |E(x)| |E(y)| sin(phi(x) - phi(y)) / (pi (x - y))`,
//! so every normalized quantity depends on the phase alone; the `|E|`
//! factors are only carried (in log form) where an unnormalized value is
//! requested.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};
use crate::numerics::quadrature::composite_weights;
use crate::numerics::symmetric_eigen;
use crate::sequences::{generate_by_phase, sliding_extremes, RealSequence, Witness};

/// Default angle for orthonormal nodes.
pub const DEFAULT_ALPHA: f64 = FRAC_PI_2;

/// Phase gap below which `sin(d)/(x - y)` switches to its Taylor form.
const TAYLOR_SWITCH: f64 = 1e-6;

/// `sin(phi(x) - phi(y)) / (x - y)`, with the diagonal limit `phi'(x)`.
pub fn sine_quotient(profile: &PhaseProfile, x: f64, y: f64) -> f64 {
    if x == y {
        return profile.dphi(x);
    }
    let d = profile.phase_diff(x, y);
    if d.abs() < TAYLOR_SWITCH {
        let d2 = d * d;
        d / (x - y) * (1.0 - d2 / 6.0 + d2 * d2 / 120.0)
    } else {
        d.sin() / (x - y)
    }
}

/// A kernel value together with the squared norms of both kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub k: f64,
    pub norm_sq_x: f64,
    pub norm_sq_y: f64,
}

impl KernelValue {
    /// `K(x, y) / sqrt(K(x, x) K(y, y))`.
    pub fn normalized(&self) -> f64 {
        self.k / (self.norm_sq_x * self.norm_sq_y).sqrt()
    }
}

/// `K(x, y)` for real `x, y`.
pub fn kernel(profile: &PhaseProfile, x: f64, y: f64) -> KernelValue {
    let lx = profile.log_abs_e(x);
    let ly = profile.log_abs_e(y);
    KernelValue {
        k: (lx + ly).exp() / PI * sine_quotient(profile, x, y),
        norm_sq_x: (2.0 * lx).exp() * profile.dphi(x) / PI,
        norm_sq_y: (2.0 * ly).exp() * profile.dphi(y) / PI,
    }
}

/// Normalized kernel `<K~_y, K~_x>` computed from the phase only.
pub fn normalized_kernel(profile: &PhaseProfile, x: f64, y: f64) -> f64 {
    if x == y {
        return 1.0;
    }
    sine_quotient(profile, x, y) / (profile.dphi(x) * profile.dphi(y)).sqrt()
}

/// Nodes `phi(w_n) = alpha + pi n` inside the window.
pub fn on_nodes(profile: &PhaseProfile, window: Interval, alpha: f64) -> Result<RealSequence> {
    generate_by_phase(profile, window, PI, alpha)
}

/// Normalized Gram matrix of the kernels at `points`.
pub fn gram(profile: &PhaseProfile, points: &[f64]) -> DMatrix<f64> {
    let n = points.len();
    let entries: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            if i == j {
                1.0
            } else {
                normalized_kernel(profile, points[i], points[j])
            }
        })
        .collect();
    DMatrix::from_vec(n, n, entries)
}

/// Cross matrix `M[g][n] = <K~_{w_n}, K~_g>` between samples and nodes.
pub fn cross_gram(profile: &PhaseProfile, samples: &[f64], nodes: &[f64]) -> DMatrix<f64> {
    let (r, c) = (samples.len(), nodes.len());
    let entries: Vec<f64> = (0..r * c)
        .into_par_iter()
        .map(|idx| normalized_kernel(profile, samples[idx % r], nodes[idx / r]))
        .collect();
    DMatrix::from_vec(r, c, entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramMode {
    Riesz,
    Frame,
}

/// Spectral summary of a Gram-type matrix.
///
/// In Riesz mode `lower`/`upper` are the extreme eigenvalues of the Gram
/// matrix; in frame mode they are the extreme squared singular values of the
/// cross matrix restricted to interior nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub mode: GramMode,
    pub shape: (usize, usize),
    pub lower: f64,
    pub upper: f64,
    pub condition: f64,
    pub window: Option<Interval>,
    pub trim_margin: usize,
    /// Unit vector attaining (approximately) the lower bound.
    pub witness: Vec<f64>,
}

impl GramReport {
    pub fn eig_min(&self) -> f64 {
        self.lower
    }

    pub fn eig_max(&self) -> f64 {
        self.upper
    }
}

fn condition(lower: f64, upper: f64) -> f64 {
    if lower > 0.0 {
        upper / lower
    } else {
        f64::INFINITY
    }
}

/// Extreme eigenvalues of the normalized Gram matrix.
pub fn riesz_bounds(profile: &PhaseProfile, seq: &RealSequence) -> Result<GramReport> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let g = gram(profile, seq.points());
    let (vals, vecs) = symmetric_eigen(&g)?;
    let lower = vals[0];
    let upper = *vals.last().unwrap();
    Ok(GramReport {
        mode: GramMode::Riesz,
        shape: (g.nrows(), g.ncols()),
        lower,
        upper,
        condition: condition(lower, upper),
        window: None,
        trim_margin: 0,
        witness: vecs.column(0).iter().copied().collect(),
    })
}

/// Empirical frame bounds of `samples` tested against the interior
/// orthonormal nodes of `basis_window`.
///
/// Coefficient vectors are supported on the nodes that remain after
/// dropping `trim_margin` nodes at each end. `A` is the smallest squared
/// singular value of the cross matrix (exactly zero when there are fewer
/// samples than interior nodes) and `B` the largest.
pub fn frame_bounds(
    profile: &PhaseProfile,
    samples: &RealSequence,
    basis_window: Interval,
    alpha: f64,
    trim_margin: usize,
) -> Result<GramReport> {
    let nodes = on_nodes(profile, basis_window, alpha)?;
    if 2 * trim_margin >= nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "trim margin {trim_margin} leaves no interior among {} nodes",
            nodes.len()
        )));
    }
    let interior = &nodes.points()[trim_margin..nodes.len() - trim_margin];
    frame_bounds_on(profile, samples.points(), interior, Some(basis_window), trim_margin)
}

/// Frame bounds for an explicit list of basis nodes.
pub fn frame_bounds_on(
    profile: &PhaseProfile,
    samples: &[f64],
    interior: &[f64],
    window: Option<Interval>,
    trim_margin: usize,
) -> Result<GramReport> {
    if interior.is_empty() {
        return Err(Error::InvalidArgument("no basis nodes".into()));
    }
    let m = cross_gram(profile, samples, interior);
    let (rows, cols) = (m.nrows(), m.ncols());
    let mtm = m.transpose() * &m;
    let (vals, vecs) = symmetric_eigen(&mtm)?;
    let (lower, upper) = if rows == 0 {
        (0.0, 0.0)
    } else {
        let sv = m
            .clone()
            .try_svd(false, false, f64::EPSILON, 100_000)
            .ok_or_else(|| Error::Eigensolver("SVD did not converge".into()))?
            .singular_values;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = if rows < cols {
            0.0
        } else {
            sv.iter().copied().fold(f64::INFINITY, f64::min)
        };
        (smin * smin, smax * smax)
    };
    debug_assert_eq!(vals.len(), cols);
    Ok(GramReport {
        mode: GramMode::Frame,
        shape: (rows, cols),
        lower,
        upper,
        condition: condition(lower, upper),
        window,
        trim_margin,
        witness: vecs.column(0).iter().copied().collect(),
    })
}

/// Gram or cross matrix as CSV.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Smallest Gram eigenvalue accepted by [`min_norm_interpolant`].
pub const MIN_GRAM_EIGENVALUE: f64 = 1e-10;

/// The minimal-norm element `f = sum c_k K_{g_k}` with prescribed values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinNormInterpolant {
    pub points: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub norm_sq: f64,
    pub gram_eig_min: f64,
}

impl MinNormInterpolant {
    pub fn eval(&self, profile: &PhaseProfile, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.coeffs)
            .map(|(&g, &c)| c * kernel(profile, x, g).k)
            .sum()
    }
}

/// Solves `K(g_j, g_k) c = v` through the normalized Gram matrix:
/// `c = D^-1 G^-1 D^-1 v` with `D = diag(||K_g||)`.
pub fn min_norm_interpolant(
    profile: &PhaseProfile,
    seq: &RealSequence,
    values: &[f64],
) -> Result<MinNormInterpolant> {
    let n = seq.len();
    if values.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} values for {n} points",
            values.len()
        )));
    }
    if n == 0 {
        return Ok(MinNormInterpolant {
            points: Vec::new(),
            coeffs: Vec::new(),
            norm_sq: 0.0,
            gram_eig_min: f64::NAN,
        });
    }
    let g = gram(profile, seq.points());
    let (vals, _) = symmetric_eigen(&g)?;
    if vals[0] <= MIN_GRAM_EIGENVALUE {
        return Err(Error::IllPosedWindow { eig_min: vals[0] });
    }
    let d: Vec<f64> = seq
        .points()
        .iter()
        .map(|&x| kernel(profile, x, x).norm_sq_x.sqrt())
        .collect();
    let rhs = DVector::from_iterator(n, values.iter().zip(&d).map(|(v, di)| v / di));
    let chol = g
        .cholesky()
        .ok_or(Error::IllPosedWindow { eig_min: vals[0] })?;
    let y = chol.solve(&rhs);
    let coeffs: Vec<f64> = y.iter().zip(&d).map(|(yi, di)| yi / di).collect();
    let norm_sq = coeffs.iter().zip(values).map(|(c, v)| c * v).sum();
    Ok(MinNormInterpolant {
        points: seq.points().to_vec(),
        coeffs,
        norm_sq,
        gram_eig_min: vals[0],
    })
}

/// Sixth-order central difference of `f` at `x` with step `h`.
pub fn central_difference6<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 3.0 * h) + 9.0 * f(x - 2.0 * h) - 45.0 * f(x - h) + 45.0 * f(x + h)
        - 9.0 * f(x + 2.0 * h)
        + f(x + 3.0 * h))
        / (60.0 * h)
}

/// The quadratic form of `c -> ||(f/|E|)'/phi'||^2` for
/// `f = sum c_n K~_{w_n}`, discretized on a uniform quadrature grid.
///
/// On the real line `K~_w(x)/|E(x)| = sin(phi(x) - phi(w)) / ((x - w)
/// sqrt(pi phi'(w)))`, so no `|E|` value is ever formed. Derivatives use
/// sixth-order central differences with step `1e-3/phi'(x)`.
#[derive(Clone, Debug)]
pub struct BernsteinOperator {
    nodes: Vec<f64>,
    form: DMatrix<f64>,
}

impl BernsteinOperator {
    pub fn new(profile: &PhaseProfile, nodes: &[f64], quad_grid: &[f64]) -> Result<Self> {
        if quad_grid.len() < 3 {
            return Err(Error::InvalidArgument("quadrature grid needs three points".into()));
        }
        let max_dphi = quad_grid
            .iter()
            .chain(nodes)
            .map(|&x| profile.dphi(x))
            .fold(0.0, f64::max);
        let limit = 0.1 / max_dphi;
        let step = quad_grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        if step > limit {
            return Err(Error::GridTooCoarse { step, limit });
        }
        let weights = composite_weights(quad_grid);
        let scale: Vec<f64> = nodes.iter().map(|&w| 1.0 / (PI * profile.dphi(w)).sqrt()).collect();
        let (rows, cols) = (quad_grid.len(), nodes.len());
        let entries: Vec<f64> = (0..rows * cols)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % rows, idx / rows);
                let x = quad_grid[i];
                let w = nodes[j];
                let dx = profile.dphi(x);
                let h = 1e-3 / dx;
                let deriv = central_difference6(|t| sine_quotient(profile, t, w), x, h);
                weights[i].sqrt() * scale[j] * deriv / dx
            })
            .collect();
        let wmat = DMatrix::from_vec(rows, cols, entries);
        Ok(BernsteinOperator {
            nodes: nodes.to_vec(),
            form: wmat.transpose() * wmat,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `||(f/|E|)'/phi'|| / ||f||`; zero for the zero vector.
    pub fn ratio(&self, coeffs: &[f64]) -> Result<f64> {
        if coeffs.len() != self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} nodes",
                coeffs.len(),
                self.nodes.len()
            )));
        }
        let c = DVector::from_column_slice(coeffs);
        let nn = c.norm_squared();
        if nn == 0.0 {
            return Ok(0.0);
        }
        let q = (c.transpose() * &self.form * &c)[(0, 0)];
        Ok((q.max(0.0) / nn).sqrt())
    }

    /// Ratio for the complex quotient `f/E`: since `f/|E|` is real on the
    /// line, `|(f/E)'|^2 = |(f/|E|)'|^2 + phi'^2 |f/|E||^2`, which adds one
    /// to the squared ratio for orthonormal coefficients.
    pub fn full_ratio(&self, coeffs: &[f64]) -> Result<f64> {
        let r = self.ratio(coeffs)?;
        if coeffs.iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        Ok((r * r + 1.0).sqrt())
    }

    /// Supremum of [`Self::ratio`] over all coefficient vectors.
    pub fn sup_ratio(&self) -> Result<f64> {
        let (vals, _) = symmetric_eigen(&self.form)?;
        Ok(vals.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }
}

/// One-shot Bernstein ratio.
pub fn bernstein_ratio(
    profile: &PhaseProfile,
    coeffs: &[f64],
    basis_nodes: &[f64],
    quad_grid: &[f64],
) -> Result<f64> {
    BernsteinOperator::new(profile, basis_nodes, quad_grid)?.ratio(coeffs)
}

/// Uniform grid with an odd number of points covering the window with step
/// at most `step`.
pub fn uniform_grid(window: Interval, step: f64) -> Vec<f64> {
    let mut n = (window.len() / step).ceil() as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    let h = window.len() / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { window.hi } else { window.lo + h * i as f64 })
        .collect()
}

/// `sup_I sum_{t in I} mass(t) phi'(t)` over intervals with `mu(I) = 1`.
pub fn carleson_constant(
    profile: &PhaseProfile,
    masses: &[(f64, f64)],
    window: Interval,
) -> Result<Witness> {
    let mut sorted: Vec<(f64, f64)> = masses
        .iter()
        .copied()
        .filter(|&(t, _)| window.contains(t))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let points: Vec<f64> = sorted.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = sorted.iter().map(|&(t, m)| m * profile.dphi(t)).collect();
    let (_, max) = sliding_extremes(profile, window, 1.0, &points, Some(&weights))?;
    Ok(max)
}
