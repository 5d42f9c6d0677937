//! The multiplier plan: an equal-measure partition of the window, padding
//! of `Lambda` to a fixed deficiency per block, moment-matched point sets
//! `Xi_k`, and the final mass sets `Sigma_k` after circle replacement.
//!
//! Throughout, `psi = 2 phi` and `mu = psi' dx`, so `rho_x = 1/(2 phi'(x))`
//! and `d_psi = 2 d_phi`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moment::{moment_match, ContinuousPart, MomentProblem};
use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile, SpaceSpec};
use crate::numerics::quadrature::GaussLegendre;
use crate::regularity::doubling_scan;
use crate::sequences::{check_separation, sliding_extremes, RealSequence};

/// `1/psi'(x)`.
pub fn rho(profile: &PhaseProfile, x: f64) -> f64 {
    0.5 / profile.dphi(x)
}

/// Settings for [`build_plan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Density margin: every block must satisfy `mu~(I_k) >= epsilon M`.
    pub epsilon: f64,
    /// Moment order; by default the smallest `n` with `n gamma > 1`.
    pub n: Option<usize>,
    /// Block mass parameter; by default `ceil(n^2 / epsilon)`.
    pub m: Option<usize>,
    /// Doubling exponent; by default estimated by a doubling scan.
    pub gamma: Option<f64>,
    /// Separation radius in the `psi` metric; by default half the
    /// `psi`-separation of the padded sequence.
    pub eta: Option<f64>,
    /// Points kept clear of padding and of `Sigma`, but not zeros.
    pub protected: Vec<f64>,
}

impl PlanOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        PlanOptions {
            epsilon,
            n: None,
            m: None,
            gamma: None,
            eta: None,
            protected: Vec::new(),
        }
    }
}

/// A point of `Sigma` with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub z: Complex64,
    pub multiplicity: u32,
}

/// One block `I_k` of the partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub lo: f64,
    pub hi: f64,
    /// Points of `Lambda` in `[lo, hi)`.
    pub lambda: Vec<f64>,
    /// Points added to reach the prescribed deficiency.
    pub padded: Vec<f64>,
    /// Moment-matched points, each of weight `n`.
    pub xi: Vec<Complex64>,
    /// Largest `|xi|` in coordinates where the block is `(-1, 1)`.
    pub max_scaled_xi: f64,
    pub sigma: Vec<SigmaPoint>,
    /// Number of `xi` replaced by a circle of `n` points.
    pub replaced: usize,
}

impl Block {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// `Lambda` and padding together, sorted.
    pub fn zeros_on_line(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.lambda.iter().chain(&self.padded).copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Moment residuals of the block measures `nu_k`, in scaled coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentAudit {
    /// `max |int t^j d(mu~_k - n sum_Xi delta)|` over `j = 1..=n`.
    pub before_replacement: f64,
    /// `max |int t^j d nu_k|` over `j = 0..n-1`.
    pub after_replacement: f64,
    /// `max |int t^j d nu_k|` over `j = 1..=n`.
    pub after_replacement_full: f64,
}

/// Everything needed to evaluate the potential `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierPlan {
    pub window: Interval,
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub eta: f64,
    pub blocks: Vec<Block>,
    pub protected: Vec<f64>,
    /// Points of the input sequence outside every block (ignored).
    pub lambda_outside: usize,
    pub inner_window: Interval,
    /// Smallest `R` with all `Sigma` of neighbouring blocks and the squares
    /// over them inside `D(x_k, R rho_k)`.
    pub r_const: f64,
    pub max_scaled_xi: f64,
    /// `min |sigma - lambda| / (eta rho_lambda)` over all pairs.
    pub separation_ratio: f64,
    pub moments: MomentAudit,
    pub flags: Vec<String>,
}

impl MultiplierPlan {
    /// All real zeros (`Lambda` and padding), sorted.
    pub fn real_zeros(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.zeros_on_line()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn lambda(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.lambda.iter().copied()).collect()
    }

    pub fn sigma(&self) -> Vec<SigmaPoint> {
        self.blocks.iter().flat_map(|b| b.sigma.iter().copied()).collect()
    }

    pub fn replacements(&self) -> usize {
        self.blocks.iter().map(|b| b.replaced).sum()
    }

    /// Total multiplicity of zeros per block, which equals `M` for every
    /// block by construction.
    pub fn zero_count(&self, k: usize) -> u32 {
        let b = &self.blocks[k];
        (b.lambda.len() + b.padded.len()) as u32 + b.sigma.iter().map(|s| s.multiplicity).sum::<u32>()
    }
}

/// `n gamma > 1` with a small safety margin.
pub fn moment_order(gamma: f64) -> usize {
    ((1.0 + 1e-9) / gamma).floor() as usize + 1
}

/// Doubling exponent estimated on geometric scales over the window.
pub fn estimate_gamma(profile: &PhaseProfile, window: Interval) -> Result<f64> {
    let mut scales = Vec::new();
    let mut r = window.len() / 4.0;
    while r > window.len() / 4096.0 {
        scales.push(r);
        r *= 0.5;
    }
    Ok(doubling_scan(profile, window, &scales, 32)?.gamma)
}

fn continuous_part(profile: &PhaseProfile) -> ContinuousPart {
    match profile.spec() {
        SpaceSpec::PaleyWiener { slope } => ContinuousPart::Uniform(slope / PI),
        _ => {
            let p = profile.clone();
            ContinuousPart::Density(Arc::new(move |x| p.dphi(x) / PI))
        }
    }
}

/// Builds the plan. See the module documentation for conventions.
pub fn build_plan(
    profile: &PhaseProfile,
    lambda: &RealSequence,
    window: Interval,
    opts: &PlanOptions,
) -> Result<MultiplierPlan> {
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let gamma = match opts.gamma {
        Some(g) => g,
        None => estimate_gamma(profile, window)?,
    };
    let n = opts.n.unwrap_or_else(|| moment_order(gamma));
    let m = opts.m.unwrap_or_else(|| ((n * n) as f64 / eps).ceil() as usize);
    if (m as f64) * eps < (n * n) as f64 - 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "block parameter M = {m} violates M epsilon >= n^2 = {}",
            n * n
        )));
    }
    let block_phase = PI * m as f64;

    // Density margin: at most (1 - eps) M points of Lambda per block-sized
    // interval anywhere in the window.
    let t0 = profile.phase(window.lo);
    let t1 = profile.phase(window.hi);
    if t1 - t0 < block_phase {
        return Err(Error::WindowTooSmall { blocks: 0 });
    }
    let pts_in: Vec<f64> = lambda.points().iter().copied().filter(|&x| window.contains(x)).collect();
    // Points sitting exactly on a window edge are ambiguous up to rounding;
    // a relative shrink of 1e-10 resolves the tie in favour of the bound.
    let (_, max) = sliding_extremes(profile, window, block_phase * (1.0 - 1e-10), &pts_in, None)?;
    let allowed = (1.0 - eps) * m as f64;
    if max.value > allowed + 1e-9 {
        return Err(Error::DensityMargin(format!(
            "{} points in [{}, {}) exceed (1 - epsilon) M = {allowed}",
            max.value, max.lo, max.hi
        )));
    }

    // Equal-measure partition, centred in the window.
    let k_blocks = ((t1 - t0) / block_phase).floor() as usize;
    if k_blocks < 3 {
        return Err(Error::WindowTooSmall { blocks: k_blocks });
    }
    let start = t0 + 0.5 * ((t1 - t0) - block_phase * k_blocks as f64);
    // Edges are nudged left by a phase amount far below any separation so
    // that a point on an edge lands in the same block regardless of rounding.
    let nudge = 1e-9 * block_phase;
    let mut edges = Vec::with_capacity(k_blocks + 1);
    for k in 0..=k_blocks {
        let t = (start + block_phase * k as f64 - nudge).max(t0);
        edges.push(profile.inverse_in(t, window)?);
    }

    let mut protected = opts.protected.clone();
    protected.sort_by(f64::total_cmp);
    let mut flags = Vec::new();

    // Separation threshold for padding: half the original phase separation.
    let mut combined: Vec<f64> = pts_in.iter().chain(&protected).copied().collect();
    combined.sort_by(f64::total_cmp);
    combined.dedup();
    let orig_sep = RealSequence::new(combined.clone())
        .ok()
        .and_then(|s| check_separation(profile, &s))
        .unwrap_or(PI);
    let pad_threshold = 0.5 * orig_sep.min(PI);

    let mut blocks: Vec<Block> = Vec::with_capacity(k_blocks);
    let mut lambda_outside = 0usize;
    for &x in &pts_in {
        if x < edges[0] || x >= edges[k_blocks] {
            lambda_outside += 1;
        }
    }
    // Phase values of all occupied positions, kept sorted while padding.
    let mut occupied: Vec<f64> = combined.iter().map(|&x| profile.phase(x)).collect();
    let slots_per_block = 8 * m;
    for k in 0..k_blocks {
        let (lo, hi) = (edges[k], edges[k + 1]);
        let lam: Vec<f64> = pts_in.iter().copied().filter(|&x| x >= lo && x < hi).collect();
        let count = lam.len();
        if count + n * n > m {
            return Err(Error::DensityMargin(format!(
                "block [{lo}, {hi}) holds {count} points; at most M - n^2 = {} allowed",
                m - n * n
            )));
        }
        let deficiency = m - count - n * n;
        let mut padded = Vec::with_capacity(deficiency);
        let s_lo = start + block_phase * k as f64;
        for _ in 0..deficiency {
            let mut best: Option<(f64, f64)> = None;
            for j in 0..slots_per_block {
                let t = s_lo + block_phase * (j as f64 + 0.5) / slots_per_block as f64;
                let clearance = nearest_gap(&occupied, t);
                if best.is_none_or(|(_, c)| clearance > c) {
                    best = Some((t, clearance));
                }
            }
            let (t, clearance) = best.expect("at least one slot");
            if clearance < pad_threshold - 1e-9 {
                return Err(Error::PaddingImpossible(format!(
                    "best free slot in block {k} is {clearance} from its neighbours, need {pad_threshold}"
                )));
            }
            let x = profile.inverse_in(t, window)?;
            padded.push(x);
            let pos = occupied.partition_point(|&v| v < t);
            occupied.insert(pos, t);
        }
        padded.sort_by(f64::total_cmp);
        blocks.push(Block {
            lo,
            hi,
            lambda: lam,
            padded,
            xi: Vec::new(),
            max_scaled_xi: 0.0,
            sigma: Vec::new(),
            replaced: 0,
        });
    }

    // Moment matching per block on mu~_k = (phi'/pi) dx - sum delta.
    let cont = continuous_part(profile);
    let solutions: Vec<_> = blocks
        .par_iter()
        .map(|b| {
            moment_match(&MomentProblem {
                interval: Interval { lo: b.lo, hi: b.hi },
                continuous: cont.clone(),
                masses: b.zeros_on_line().into_iter().map(|x| (x, -1.0)).collect(),
                order: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_scaled_xi: f64 = 0.0;
    for (k, (b, sol)) in blocks.iter_mut().zip(solutions).enumerate() {
        b.xi = sol.points;
        b.max_scaled_xi = sol.scaled.iter().map(|z| z.norm()).fold(0.0, f64::max);
        max_scaled_xi = max_scaled_xi.max(b.max_scaled_xi);
        if b.max_scaled_xi > 10.0 {
            flags.push(format!("block {k}: scaled |xi| = {} exceeds 10", b.max_scaled_xi));
        }
    }

    // Separation radius.
    let mut anchors: Vec<f64> = blocks.iter().flat_map(|b| b.zeros_on_line()).chain(protected.iter().copied()).collect();
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    let anchor_rho: Vec<f64> = anchors.iter().map(|&x| rho(profile, x)).collect();
    let mut eta = match opts.eta {
        Some(e) => e,
        None => {
            let sep = RealSequence::new(anchors.clone())
                .ok()
                .and_then(|s| check_separation(profile, &s))
                .unwrap_or(2.0 * PI);
            // Half the psi-separation, i.e. the phi-separation.
            sep
        }
    };
    for w in 0..anchors.len().saturating_sub(1) {
        let gap = anchors[w + 1] - anchors[w];
        let reach = anchor_rho[w] + anchor_rho[w + 1];
        if eta * reach >= gap {
            eta = 0.99 * gap / reach;
        }
    }
    let all_xi: Vec<Complex64> = blocks.iter().flat_map(|b| b.xi.iter().copied()).collect();
    loop {
        let mut shrink: Option<f64> = None;
        for xi in &all_xi {
            for (a, &r) in anchors.iter().zip(&anchor_rho) {
                let d = (xi - a).norm() / r;
                if d >= eta / 5.0 && d < eta {
                    shrink = Some(shrink.map_or(d, |s: f64| s.min(d)));
                }
            }
        }
        match shrink {
            Some(d) => eta = 0.99 * d,
            None => break,
        }
        if eta < 1e-8 {
            return Err(Error::IllConditioned(
                "separation radius collapsed while clearing moment points".into(),
            ));
        }
    }

    // Circle replacement.
    let unit_roots: Vec<Complex64> = (0..n)
        .map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 / n as f64))
        .collect();
    for b in blocks.iter_mut() {
        let mut sigma = Vec::new();
        let mut replaced = 0;
        for xi in &b.xi {
            let near = anchors
                .iter()
                .zip(&anchor_rho)
                .find(|(&a, &r)| (xi - a).norm() < eta * r / 5.0);
            match near {
                Some((_, &r)) => {
                    replaced += 1;
                    let radius = 3.0 * eta * r / 5.0;
                    sigma.extend(unit_roots.iter().map(|u| SigmaPoint {
                        z: xi + u * radius,
                        multiplicity: 1,
                    }));
                }
                None => sigma.push(SigmaPoint {
                    z: *xi,
                    multiplicity: n as u32,
                }),
            }
        }
        b.sigma = sigma;
        b.replaced = replaced;
    }

    // Euclidean separation of Sigma from Lambda and protected points.
    let mut separation_ratio = f64::INFINITY;
    for b in &blocks {
        for s in &b.sigma {
            for (&a, &r) in anchors.iter().zip(&anchor_rho) {
                separation_ratio = separation_ratio.min((s.z - a).norm() / (eta * r));
            }
        }
    }
    if separation_ratio < 0.4 - 1e-9 {
        flags.push(format!("Sigma approaches Lambda: ratio {separation_ratio} < 2/5"));
    }

    // Blocks-in-disk constant over interior blocks.
    let mut r_const: f64 = 0.0;
    for k in 1..k_blocks - 1 {
        let xk = blocks[k].center();
        let rk = rho(profile, xk);
        for j in k - 1..=k + 1 {
            let b = &blocks[j];
            let h = b.half_length();
            let c = b.center();
            for corner in [Complex64::new(c - h, h), Complex64::new(c + h, h)] {
                r_const = r_const.max((corner - xk).norm() / rk);
            }
            for s in &b.sigma {
                r_const = r_const.max((s.z - xk).norm() / rk);
            }
        }
    }

    let moments = audit_moments(profile, &blocks, n);
    let inner_window = Interval {
        lo: blocks[1].lo,
        hi: blocks[k_blocks - 2].hi,
    };
    Ok(MultiplierPlan {
        window,
        n,
        m,
        epsilon: eps,
        gamma,
        eta,
        blocks,
        protected,
        lambda_outside,
        inner_window,
        r_const,
        max_scaled_xi,
        separation_ratio,
        moments,
        flags,
    })
}

/// Distance from `t` to the nearest entry of a sorted list.
fn nearest_gap(sorted: &[f64], t: f64) -> f64 {
    let i = sorted.partition_point(|&v| v < t);
    let mut d = f64::INFINITY;
    if i < sorted.len() {
        d = d.min(sorted[i] - t);
    }
    if i > 0 {
        d = d.min(t - sorted[i - 1]);
    }
    d
}

/// Moments `int t^j d nu` for `j = 0..=n` in the block's scaled
/// coordinates, the continuous part by a fixed 64-panel Gauss rule
/// (independent of the adaptive rule used by the matcher).
pub fn block_moments(
    profile: &PhaseProfile,
    block: &Block,
    masses: &[(Complex64, f64)],
    n: usize,
) -> Vec<Complex64> {
    let c = block.center();
    let r = block.half_length();
    let mut mom = vec![Complex64::new(0.0, 0.0); n + 1];
    let gl = GaussLegendre::sixteen();
    let panels = 64;
    let h = 2.0 / panels as f64;
    for k in 0..panels {
        let a = -1.0 + h * k as f64;
        for (&node, &wt) in gl.nodes().iter().zip(gl.weights()) {
            let t = a + 0.5 * h * (node + 1.0);
            let d = profile.dphi(c + r * t) / PI * r * wt * 0.5 * h;
            let mut p = 1.0;
            for mm in mom.iter_mut() {
                *mm += d * p;
                p *= t;
            }
        }
    }
    for x in block.zeros_on_line() {
        let t = (x - c) / r;
        let mut p = 1.0;
        for mm in mom.iter_mut() {
            *mm -= p;
            p *= t;
        }
    }
    for &(z, w) in masses {
        let t = (z - c) / r;
        let mut p = Complex64::new(1.0, 0.0);
        for mm in mom.iter_mut() {
            *mm -= p * w;
            p *= t;
        }
    }
    mom
}

fn audit_moments(profile: &PhaseProfile, blocks: &[Block], n: usize) -> MomentAudit {
    let mut audit = MomentAudit {
        before_replacement: 0.0,
        after_replacement: 0.0,
        after_replacement_full: 0.0,
    };
    for b in blocks {
        let xi: Vec<(Complex64, f64)> = b.xi.iter().map(|&z| (z, n as f64)).collect();
        let before = block_moments(profile, b, &xi, n);
        let sigma: Vec<(Complex64, f64)> = b.sigma.iter().map(|s| (s.z, s.multiplicity as f64)).collect();
        let after = block_moments(profile, b, &sigma, n);
        for j in 1..=n {
            audit.before_replacement = audit.before_replacement.max(before[j].norm());
            audit.after_replacement_full = audit.after_replacement_full.max(after[j].norm());
        }
        for v in &after[..n] {
            audit.after_replacement = audit.after_replacement.max(v.norm());
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    fn lattice(step: f64, lo: f64, hi: f64) -> RealSequence {
        let k0 = (lo / step).ceil() as i64;
        let k1 = (hi / step).floor() as i64;
        RealSequence::new((k0..=k1).map(|k| k as f64 * step).collect()).unwrap()
    }

    #[test]
    fn lattice_plan_matches_hand_arithmetic() {
        let p = pw();
        let w = Interval::new(-50.0, 50.0).unwrap();
        let plan = build_plan(&p, &lattice(2.5, -50.0, 50.0), w, &PlanOptions::with_epsilon(0.5)).unwrap();
        assert_eq!(plan.n, 2);
        assert_eq!(plan.m, 8);
        assert_eq!(plan.blocks.len(), 12);
        // Edges carry a deliberate left nudge of 1e-9 of the block phase.
        assert!((plan.blocks[0].lo + 48.0).abs() < 1e-7);
        for (k, b) in plan.blocks.iter().enumerate() {
            assert!((b.hi - b.lo - 8.0).abs() < 1e-7);
            assert!(matches!(b.lambda.len(), 3 | 4));
            assert_eq!(b.lambda.len() + b.padded.len(), 4);
            assert_eq!(plan.zero_count(k), 8);
        }
        assert!(plan.moments.before_replacement <= 1e-7);
        assert!(plan.moments.after_replacement <= 1e-7);
        assert!(plan.separation_ratio >= 0.4 - 1e-9);
    }

    #[test]
    fn empty_sequence_plan() {
        let p = pw();
        let w = Interval::new(-50.0, 50.0).unwrap();
        let plan = build_plan(&p, &RealSequence::empty(), w, &PlanOptions::with_epsilon(0.5)).unwrap();
        assert!(plan.lambda().is_empty());
        assert_eq!(plan.replacements(), 0);
        assert!(plan.blocks.iter().all(|b| b.padded.len() == 4));
    }

    #[test]
    fn dense_sequence_is_rejected() {
        let p = pw();
        let w = Interval::new(-50.0, 50.0).unwrap();
        let res = build_plan(&p, &lattice(0.9, -50.0, 50.0), w, &PlanOptions::with_epsilon(0.5));
        assert!(matches!(res, Err(Error::DensityMargin(_))));
        let small = Interval::new(-10.0, 10.0).unwrap();
        let res = build_plan(&p, &RealSequence::empty(), small, &PlanOptions::with_epsilon(0.5));
        assert!(matches!(res, Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn circle_replacement_keeps_lower_moments() {
        // sum_l (z + t e^{2 pi i l / n})^j = n z^j for j < n.
        let z = Complex64::new(0.3, -0.2);
        let t = 0.7;
        for n in 2..6usize {
            for j in 0..n {
                let s: Complex64 = (0..n)
                    .map(|l| (z + Complex64::from_polar(t, 2.0 * PI * l as f64 / n as f64)).powu(j as u32))
                    .sum();
                assert!((s - z.powu(j as u32) * n as f64).norm() < 1e-12);
            }
        }
    }
}
