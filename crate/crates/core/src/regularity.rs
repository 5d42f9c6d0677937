//! Empirical diagnostics for the regularity of the phase measure
//! `mu = phi'(x) dx`: doubling ratios, the local doubling quotient
//! `|phi''| / phi'^2`, comparability of `phi'` at phase distance one, and the
//! distortion between `d_phi` and `phi'(x) |x - y|`.
//!
//! All suprema are taken over finite probe sets and are therefore lower
//! bounds for the true constants; each one comes with the witness that
//! attains it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};

/// One doubling probe: the interval `I` and `mu(2I) / mu(I)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingProbe {
    pub lo: f64,
    pub hi: f64,
    pub mu: f64,
    pub ratio: f64,
}

/// Phase measure of `(lo, hi)`.
pub fn measure(profile: &PhaseProfile, lo: f64, hi: f64) -> f64 {
    profile.phase_diff(hi, lo)
}

/// `mu(2I) / mu(I)` for `I = (lo, hi)`, with `2I` the concentric interval of
/// twice the length.
pub fn doubling_ratio(profile: &PhaseProfile, lo: f64, hi: f64) -> DoublingProbe {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let mu = measure(profile, lo, hi);
    let mu2 = measure(profile, c - 2.0 * r, c + 2.0 * r);
    DoublingProbe {
        lo,
        hi,
        mu,
        ratio: mu2 / mu,
    }
}

/// Outcome of a doubling scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingScan {
    pub ratio_sup: f64,
    pub witness: DoublingProbe,
    /// `ln 2 / ln C` with `C` the observed supremum.
    pub gamma: f64,
    /// Smallest `K` with `(mu(I)/mu(I'))^gamma <= K r/r'` over probe pairs
    /// that share a point.
    pub comparison_k: f64,
    pub probes: Vec<DoublingProbe>,
}

/// Limit on the number of probes entering the quadratic pair check.
const MAX_PAIR_PROBES: usize = 1500;

/// Scans `mu(2I)/mu(I)` over `I = (c - r, c + r)` with `2I` inside the
/// window. Centers are equispaced per scale, plus the positions where `2I`
/// touches a window endpoint or the real part of a zero.
pub fn doubling_scan(
    profile: &PhaseProfile,
    window: Interval,
    scales: &[f64],
    centers_per_scale: usize,
) -> Result<DoublingScan> {
    doubling_scan_with(profile, window, scales, centers_per_scale, &[])
}

/// [`doubling_scan`] with additional explicit probe intervals.
pub fn doubling_scan_with(
    profile: &PhaseProfile,
    window: Interval,
    scales: &[f64],
    centers_per_scale: usize,
    explicit: &[Interval],
) -> Result<DoublingScan> {
    if scales.is_empty() && explicit.is_empty() {
        return Err(Error::InvalidArgument("empty scale list".into()));
    }
    let anchors: Vec<f64> = profile
        .spec()
        .poles()
        .iter()
        .map(|&(a, _)| a)
        .filter(|&a| window.contains(a))
        .collect();
    let mut intervals: Vec<(f64, f64)> = explicit.iter().map(|i| (i.lo, i.hi)).collect();
    for &r in scales {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {r}")));
        }
        let c_lo = window.lo + 2.0 * r;
        let c_hi = window.hi - 2.0 * r;
        if c_lo > c_hi {
            continue;
        }
        let mut centers = vec![c_lo, c_hi];
        let m = centers_per_scale.max(1);
        if m > 1 {
            let h = (c_hi - c_lo) / (m - 1) as f64;
            centers.extend((0..m).map(|i| c_lo + h * i as f64));
        } else {
            centers.push(0.5 * (c_lo + c_hi));
        }
        for &a in &anchors {
            for c in [a - 2.0 * r, a + 2.0 * r, a - r, a + r] {
                if c >= c_lo && c <= c_hi {
                    centers.push(c);
                }
            }
        }
        intervals.extend(centers.into_iter().map(|c| (c - r, c + r)));
    }
    if intervals.is_empty() {
        return Err(Error::InvalidArgument(
            "no scale fits inside the window".into(),
        ));
    }
    let probes: Vec<DoublingProbe> = intervals
        .par_iter()
        .map(|&(lo, hi)| doubling_ratio(profile, lo, hi))
        .collect();
    let witness = *probes
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("non-empty probe list");
    let ratio_sup = witness.ratio;
    let gamma = if ratio_sup > 1.0 {
        std::f64::consts::LN_2 / ratio_sup.ln()
    } else {
        f64::INFINITY
    };
    let comparison_k = comparison_constant(&probes, gamma);
    Ok(DoublingScan {
        ratio_sup,
        witness,
        gamma,
        comparison_k,
        probes,
    })
}

fn comparison_constant(probes: &[DoublingProbe], gamma: f64) -> f64 {
    let stride = probes.len().div_ceil(MAX_PAIR_PROBES).max(1);
    let sample: Vec<&DoublingProbe> = probes.iter().step_by(stride).collect();
    sample
        .par_iter()
        .map(|p| {
            let mut k: f64 = 0.0;
            for q in &sample {
                if p.hi < q.lo || q.hi < p.lo {
                    continue;
                }
                let len_ratio = (p.hi - p.lo) / (q.hi - q.lo);
                let v = (p.mu / q.mu).powf(gamma) / len_ratio;
                k = k.max(v);
            }
            k
        })
        .reduce(|| 0.0, f64::max)
}

/// `sup |phi''(x)| / phi'(x)^2` over an equispaced grid, with its argmax.
pub fn local_doubling_check(profile: &PhaseProfile, window: Interval, grid: usize) -> Result<(f64, f64)> {
    if grid < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points".into()));
    }
    let h = window.len() / (grid - 1) as f64;
    let (sup, arg) = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = if i == grid - 1 { window.hi } else { window.lo + h * i as f64 };
            let d = profile.dphi(x);
            (profile.d2phi(x).abs() / (d * d), x)
        })
        .reduce(|| (f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    Ok((sup, arg))
}

/// Extreme values of `phi'(x)/phi'(y)` over sampled pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub min: f64,
    pub max: f64,
    pub min_witness: (f64, f64),
    pub max_witness: (f64, f64),
}

/// Samples `pairs` random pairs with `d_phi(x, y) <= 1` inside the window
/// and returns the range of `phi'(x)/phi'(y)`.
pub fn comparability_check(
    profile: &PhaseProfile,
    window: Interval,
    pairs: usize,
    seed: u64,
) -> Result<Comparability> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("pair count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_lo = profile.phase(window.lo);
    let t_hi = profile.phase(window.hi);
    let mut out = Comparability {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        min_witness: (f64::NAN, f64::NAN),
        max_witness: (f64::NAN, f64::NAN),
    };
    for _ in 0..pairs {
        let x: f64 = rng.gen_range(window.lo..=window.hi);
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let t = (profile.phase(x) + u).clamp(t_lo, t_hi);
        let y = profile.inverse_in(t, window)?;
        let q = profile.dphi(x) / profile.dphi(y);
        if q < out.min {
            out.min = q;
            out.min_witness = (x, y);
        }
        if q > out.max {
            out.max = q;
            out.max_witness = (x, y);
        }
    }
    Ok(out)
}

/// Near- and far-regime comparison of `d_phi(x, y)` with `phi'(x) |x - y|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// Range of `d_phi / (phi'(x)|x - y|)` over pairs with `d_phi <= r`.
    pub near_min: f64,
    pub near_max: f64,
    pub near_min_witness: (f64, f64),
    pub near_max_witness: (f64, f64),
    /// `1 / slope` of the log-log regression of `d_phi` against
    /// `phi'(x)|x - y|` over pairs with `d_phi > r`, floored at 1.
    pub far_alpha: f64,
    pub far_slope: f64,
    pub far_pairs: usize,
    /// Estimated exponent in `phi'(y) <~ d_phi^delta phi'(x)` (far pairs with
    /// `d_phi > e`); an empirical estimate only.
    pub delta_estimate: f64,
    pub delta_witness: (f64, f64),
}

pub fn distortion_check(
    profile: &PhaseProfile,
    window: Interval,
    pairs: usize,
    r: f64,
    seed: u64,
) -> Result<DistortionReport> {
    if pairs == 0 || !(r > 0.0) {
        return Err(Error::InvalidArgument("need positive pair count and radius".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_lo = profile.phase(window.lo);
    let t_hi = profile.phase(window.hi);
    let mut rep = DistortionReport {
        near_min: f64::INFINITY,
        near_max: f64::NEG_INFINITY,
        near_min_witness: (f64::NAN, f64::NAN),
        near_max_witness: (f64::NAN, f64::NAN),
        far_alpha: f64::NAN,
        far_slope: f64::NAN,
        far_pairs: 0,
        delta_estimate: 0.0,
        delta_witness: (f64::NAN, f64::NAN),
    };
    for _ in 0..pairs {
        let x: f64 = rng.gen_range(window.lo..=window.hi);
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let t = (profile.phase(x) + u * r).clamp(t_lo, t_hi);
        let y = profile.inverse_in(t, window)?;
        if x == y {
            continue;
        }
        let d = profile.metric(x, y);
        if d > r {
            continue;
        }
        let q = d / (profile.dphi(x) * (x - y).abs());
        if q < rep.near_min {
            rep.near_min = q;
            rep.near_min_witness = (x, y);
        }
        if q > rep.near_max {
            rep.near_max = q;
            rep.near_max_witness = (x, y);
        }
    }
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0usize);
    for _ in 0..pairs {
        let x: f64 = rng.gen_range(window.lo..=window.hi);
        let y: f64 = rng.gen_range(window.lo..=window.hi);
        let d = profile.metric(x, y);
        if d <= r {
            continue;
        }
        let dx = profile.dphi(x);
        let lx = (dx * (x - y).abs()).ln();
        let ly = d.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n += 1;
        if d > std::f64::consts::E {
            let est = (profile.dphi(y) / dx).ln() / d.ln();
            if est > rep.delta_estimate {
                rep.delta_estimate = est;
                rep.delta_witness = (x, y);
            }
        }
    }
    rep.far_pairs = n;
    if n >= 2 {
        let nf = n as f64;
        let var = sxx - sx * sx / nf;
        if var > 0.0 {
            let slope = (sxy - sx * sy / nf) / var;
            rep.far_slope = slope;
            rep.far_alpha = if slope > 0.0 { (1.0 / slope).max(1.0) } else { f64::INFINITY };
        }
    }
    Ok(rep)
}

/// Settings for [`assess`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityOptions {
    pub scales: Vec<f64>,
    pub centers_per_scale: usize,
    pub grid: usize,
    pub pairs: usize,
    pub distortion_radius: f64,
    pub seed: u64,
}

impl RegularityOptions {
    /// Geometric scales `2^j` from `2^-4` up to a quarter of the window.
    pub fn for_window(window: Interval, seed: u64) -> Self {
        let mut scales = Vec::new();
        let mut r = 0.0625;
        while 4.0 * r <= window.len() {
            scales.push(r);
            r *= 2.0;
        }
        RegularityOptions {
            scales,
            centers_per_scale: 64,
            grid: 20_001,
            pairs: 4000,
            distortion_radius: 1.0,
            seed,
        }
    }
}

/// Combined regularity diagnostics on a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub window: Interval,
    pub doubling_ratio_sup: f64,
    pub doubling_witness: DoublingProbe,
    pub doubling_exponent: f64,
    pub comparison_k: f64,
    pub local_doubling_sup: f64,
    pub local_doubling_argmax: f64,
    pub comparability_c: (f64, f64),
    pub comparability: Comparability,
    pub distortion: DistortionReport,
    pub probe_log: Vec<DoublingProbe>,
}

pub fn assess(profile: &PhaseProfile, window: Interval, opts: &RegularityOptions) -> Result<RegularityReport> {
    let scan = doubling_scan(profile, window, &opts.scales, opts.centers_per_scale)?;
    let (ld, ld_arg) = local_doubling_check(profile, window, opts.grid)?;
    let comp = comparability_check(profile, window, opts.pairs, opts.seed)?;
    let dist = distortion_check(
        profile,
        window,
        opts.pairs,
        opts.distortion_radius,
        opts.seed.wrapping_add(1),
    )?;
    Ok(RegularityReport {
        window,
        doubling_ratio_sup: scan.ratio_sup,
        doubling_witness: scan.witness,
        doubling_exponent: scan.gamma,
        comparison_k: scan.comparison_k,
        local_doubling_sup: ld,
        local_doubling_argmax: ld_arg,
        comparability_c: (comp.min, comp.max),
        comparability: comp,
        distortion: dist,
        probe_log: scan.probes,
    })
}

/// CSV rows `x, phi'(x), phi''(x)/phi'(x)^2` on an equispaced grid.
pub fn profile_csv(profile: &PhaseProfile, window: Interval, n: usize) -> String {
    let mut out = String::from("x,dphi,local_doubling\n");
    let n = n.max(2);
    let h = window.len() / (n - 1) as f64;
    for i in 0..n {
        let x = window.lo + h * i as f64;
        let d = profile.dphi(x);
        out.push_str(&format!("{x:.16e},{d:.16e},{:.16e}\n", profile.d2phi(x) / (d * d)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hb::SpaceSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    fn single() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::finite_zeros(vec![Complex64::new(0.0, -1.0)]).unwrap()).unwrap()
    }

    fn chain() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::geometric_chain(2.0, 40).unwrap()).unwrap()
    }

    #[test]
    fn paley_wiener_doubles_exactly() {
        let w = Interval::new(-20.0, 20.0).unwrap();
        let scan = doubling_scan(&pw(), w, &[0.1, 0.5, 1.0, 4.0], 17).unwrap();
        for p in &scan.probes {
            assert!((p.ratio - 2.0).abs() < 1e-12, "{p:?}");
        }
        assert!((scan.gamma - 1.0).abs() < 1e-10);
        assert!((scan.comparison_k - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_zero_ratio_on_unit_interval() {
        let p = doubling_ratio(&single(), -1.0, 1.0);
        let expected = (2.0 * 2f64.atan()) / (2.0 * 1f64.atan());
        assert!((p.ratio - expected).abs() < 1e-13);
    }

    #[test]
    fn chain_fails_doubling_at_growing_scales() {
        let p = chain();
        let ratios: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&t| doubling_ratio(&p, t / 2.0, 1.5 * t).ratio)
            .collect();
        assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2]);
        assert!(ratios[2] > 3.0);
    }

    #[test]
    fn witness_reproduces_sup() {
        let p = chain();
        let w = Interval::new(-1e3, 1e3).unwrap();
        let scan = doubling_scan(&p, w, &[1.0, 10.0, 100.0], 33).unwrap();
        let again = doubling_ratio(&p, scan.witness.lo, scan.witness.hi);
        assert!((again.ratio - scan.ratio_sup).abs() <= 1e-12 * scan.ratio_sup);
        assert!(scan.gamma > 0.0 && scan.comparison_k.is_finite());
    }

    #[test]
    fn local_doubling_examples() {
        let w = Interval::new(-3.0, 3.0).unwrap();
        assert_eq!(local_doubling_check(&pw(), w, 101).unwrap().0, 0.0);
        let (sup, arg) = local_doubling_check(&single(), w, 101).unwrap();
        assert!((sup - 6.0).abs() < 1e-12);
        assert_eq!(arg.abs(), 3.0);
    }

    #[test]
    fn chain_local_doubling_is_grid_stable() {
        let p = chain();
        let w = Interval::new(-1e4, 1e4).unwrap();
        let (a, _) = local_doubling_check(&p, w, 20_001).unwrap();
        let (b, _) = local_doubling_check(&p, w, 40_001).unwrap();
        assert!(a.is_finite() && ((a - b) / b).abs() <= 0.05);
    }

    #[test]
    fn comparability_examples() {
        let w = Interval::new(-1.0, 1.0).unwrap();
        let c = comparability_check(&pw(), w, 200, 7).unwrap();
        assert!((c.min - 1.0).abs() < 1e-12 && (c.max - 1.0).abs() < 1e-12);
        let c = comparability_check(&single(), w, 500, 7).unwrap();
        assert!(c.max <= 4.0 && c.min >= 0.25);

        // Fine-grid oracle on the chain: the sampled range lies inside the
        // exhaustive one.
        let p = chain();
        let w = Interval::new(-100.0, 100.0).unwrap();
        let c = comparability_check(&p, w, 2000, 3).unwrap();
        let c2 = comparability_check(&p, w, 4000, 3).unwrap();
        let mut oracle: f64 = 1.0;
        let xs: Vec<f64> = (0..=2000).map(|i| -100.0 + 0.1 * i as f64).collect();
        for &x in &xs {
            for &y in &xs {
                if p.metric(x, y) <= 1.0 {
                    oracle = oracle.max(p.dphi(x) / p.dphi(y));
                }
            }
        }
        assert!(c.max <= oracle * (1.0 + 1e-3));
        assert!(c2.max >= c.max * 0.9 && c2.max <= oracle * (1.0 + 1e-3));
    }

    #[test]
    fn distortion_examples() {
        let w = Interval::new(-10.0, 10.0).unwrap();
        let d = distortion_check(&pw(), w, 500, 1.0, 1).unwrap();
        assert!((d.near_min - 1.0).abs() < 1e-9 && (d.near_max - 1.0).abs() < 1e-9);
        assert!((d.far_alpha - 1.0).abs() < 1e-9);

        let s = single();
        let q = s.metric(0.0, 0.1) / (s.dphi(0.0) * 0.1);
        assert!((q - 0.9966865249116203).abs() < 1e-12);

        let p = chain();
        let a = distortion_check(&p, Interval::new(-1e3, 1e3).unwrap(), 4000, 1.0, 5).unwrap();
        let b = distortion_check(&p, Interval::new(-2e3, 2e3).unwrap(), 4000, 1.0, 5).unwrap();
        assert!(a.far_alpha >= 1.0 && a.far_alpha.is_finite());
        assert!(((a.far_alpha - b.far_alpha) / a.far_alpha).abs() <= 0.1);
    }
}
