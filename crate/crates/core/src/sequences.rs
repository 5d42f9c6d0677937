//! Real point sequences: phase separation, Beurling-type densities on a
//! window, and generation of sequences with a prescribed phase step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hb::{Interval, PhaseProfile};

/// A finite sorted real point set.
///
/// Points are strictly increasing, except for the output of [`perturb`]
/// when the jitter makes two points collide; such a sequence reports a
/// separation of exactly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealSequence {
    points: Vec<f64>,
    separation_eps: Option<f64>,
}

impl RealSequence {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
        Ok(RealSequence {
            points,
            separation_eps: None,
        })
    }

    /// Sorts and removes exact duplicates.
    pub fn from_unsorted(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self::new(points)
    }

    pub fn empty() -> Self {
        RealSequence {
            points: Vec::new(),
            separation_eps: None,
        }
    }

    /// Attaches the certified phase separation computed on `profile`.
    pub fn with_separation(mut self, profile: &PhaseProfile) -> Self {
        self.separation_eps = check_separation(profile, &self);
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn separation(&self) -> Option<f64> {
        self.separation_eps
    }

    /// Points lying in the closed interval.
    pub fn restrict(&self, window: Interval) -> RealSequence {
        RealSequence {
            points: self
                .points
                .iter()
                .copied()
                .filter(|&p| window.contains(p))
                .collect(),
            separation_eps: self.separation_eps,
        }
    }

    /// Number of points in `[lo, hi)`.
    pub fn count_half_open(&self, lo: f64, hi: f64) -> usize {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p < hi);
        b.saturating_sub(a)
    }

    /// Parses newline-separated decimal reals; blank lines and `#` comments
    /// are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let v: f64 = s
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("line {}: '{s}' is not a number", ln + 1)))?;
            pts.push(v);
        }
        Self::new(pts)
    }

    /// One point per line, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{p:.16e}\n"));
        }
        out
    }
}

/// Minimum phase distance between adjacent points; `None` for fewer than
/// two points.
pub fn check_separation(profile: &PhaseProfile, seq: &RealSequence) -> Option<f64> {
    seq.points
        .windows(2)
        .map(|w| profile.metric(w[0], w[1]))
        .min_by(f64::total_cmp)
}

/// An interval attaining a sliding-window extremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// Finite-radius density profile of a sequence on a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub r_values: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_witness: Vec<Witness>,
    pub upper_witness: Vec<Witness>,
}

impl DensityReport {
    /// Averages of the last (up to) three radii for the lower and upper
    /// profiles, with the boundary error bar `2/r` of the largest radius.
    pub fn trend(&self) -> Option<(f64, f64, f64)> {
        let n = self.r_values.len();
        if n == 0 {
            return None;
        }
        let k = n.min(3);
        let lo = self.lower[n - k..].iter().sum::<f64>() / k as f64;
        let hi = self.upper[n - k..].iter().sum::<f64>() / k as f64;
        Some((lo, hi, 2.0 / self.r_values[n - 1]))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,lower,upper,lower_lo,lower_hi,upper_lo,upper_hi\n");
        for i in 0..self.r_values.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.r_values[i],
                self.lower[i],
                self.upper[i],
                self.lower_witness[i].lo,
                self.lower_witness[i].hi,
                self.upper_witness[i].lo,
                self.upper_witness[i].hi,
            ));
        }
        out
    }
}

/// Upper limit on regular grid positions per sweep.
const MAX_GRID_POSITIONS: usize = 200_000;

/// Slides half-open intervals `[lo, hi)` of phase measure `r` across the
/// window and returns the minimum and maximum of the weighted point count.
///
/// Left endpoints run over a phase grid of spacing `r/1000` together with
/// the event positions where a point enters or leaves. Every candidate is
/// counted in `x` coordinates, so a witness reproduces its value exactly.
pub(crate) fn sliding_extremes(
    profile: &PhaseProfile,
    window: Interval,
    r: f64,
    points: &[f64],
    weights: Option<&[f64]>,
) -> Result<(Witness, Witness)> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let t0 = profile.phase(window.lo);
    let t1 = profile.phase(window.hi);
    let available = t1 - t0;
    if r > available {
        return Err(Error::RadiusTooLarge { r, available });
    }
    let s_max = t1 - r;
    let span = s_max - t0;
    let mut starts: Vec<f64> = Vec::new();
    let spacing = (r / 1000.0).max(span / MAX_GRID_POSITIONS as f64);
    if span > 0.0 {
        let m = (span / spacing).floor() as usize;
        starts.extend((0..=m).map(|i| t0 + spacing * i as f64));
    }
    starts.push(t0);
    starts.push(s_max);
    let phases: Vec<f64> = points.iter().map(|&p| profile.phase(p)).collect();
    for &t in &phases {
        let d = 1e-9 * t.abs().max(1.0);
        for s in [t - d, t + d, t - r - d, t - r + d] {
            if s >= t0 && s <= s_max {
                starts.push(s);
            }
        }
    }
    starts.sort_by(f64::total_cmp);
    starts.dedup();

    let prefix: Option<Vec<f64>> = weights.map(|w| {
        let mut acc = Vec::with_capacity(w.len() + 1);
        acc.push(0.0);
        let mut s = 0.0;
        for &v in w {
            s += v;
            acc.push(s);
        }
        acc
    });

    let probes: Vec<Witness> = starts
        .par_iter()
        .map(|&s| -> Result<Witness> {
            let lo = if s <= t0 { window.lo } else { profile.inverse_in(s, window)? };
            let hi = if s >= s_max {
                window.hi
            } else {
                profile.inverse_in(s + r, window)?
            };
            // Where the phase is nearly flat the two inversions can cross
            // by rounding.
            let hi = hi.max(lo);
            let a = points.partition_point(|&p| p < lo);
            let b = points.partition_point(|&p| p < hi);
            let value = match &prefix {
                Some(pre) => pre[b] - pre[a],
                None => (b - a) as f64,
            };
            Ok(Witness { lo, hi, value })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut min = probes[0];
    let mut max = probes[0];
    for p in &probes[1..] {
        if p.value < min.value {
            min = *p;
        }
        if p.value > max.value {
            max = *p;
        }
    }
    Ok((min, max))
}

/// Lower and upper counts per phase radius, divided by the radius.
pub fn density(
    profile: &PhaseProfile,
    seq: &RealSequence,
    window: Interval,
    r_list: &[f64],
) -> Result<DensityReport> {
    if r_list.is_empty() {
        return Err(Error::InvalidArgument("empty radius list".into()));
    }
    let mut report = DensityReport {
        r_values: Vec::with_capacity(r_list.len()),
        lower: Vec::new(),
        upper: Vec::new(),
        lower_witness: Vec::new(),
        upper_witness: Vec::new(),
    };
    for &r in r_list {
        let (min, max) = sliding_extremes(profile, window, r, seq.points(), None)?;
        report.r_values.push(r);
        report.lower.push(min.value / r);
        report.upper.push(max.value / r);
        report.lower_witness.push(min);
        report.upper_witness.push(max);
    }
    Ok(report)
}

/// All `x` in the closed window with `phi(x) = alpha + step * n`.
pub fn generate_by_phase(
    profile: &PhaseProfile,
    window: Interval,
    step: f64,
    alpha: f64,
) -> Result<RealSequence> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let t0 = profile.phase(window.lo);
    let t1 = profile.phase(window.hi);
    let n0 = ((t0 - alpha) / step).ceil() as i64;
    let n1 = ((t1 - alpha) / step).floor() as i64;
    let mut points = Vec::with_capacity((n1 - n0 + 1).max(0) as usize);
    for n in n0..=n1 {
        let t = alpha + step * n as f64;
        let x = profile.inverse_in(t.clamp(t0, t1), window)?;
        points.push(x);
    }
    let mut seq = RealSequence::new(points)?;
    if seq.len() >= 2 {
        seq.separation_eps = Some(step);
    }
    Ok(seq)
}

/// Applies `jitter` to every point, re-sorts and recomputes separation.
/// Collisions are kept; the separation is then `Some(0.0)`.
pub fn perturb<F: Fn(f64) -> f64>(
    profile: &PhaseProfile,
    seq: &RealSequence,
    jitter: F,
) -> Result<RealSequence> {
    let mut points: Vec<f64> = seq.points.iter().map(|&p| p + jitter(p)).collect();
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("jitter produced a non-finite point".into()));
    }
    points.sort_by(f64::total_cmp);
    let mut out = RealSequence {
        points,
        separation_eps: None,
    };
    out.separation_eps = check_separation(profile, &out);
    Ok(out)
}

/// Greedy left-to-right extraction of a subsequence whose adjacent phase
/// gaps are at least `eps`.
pub fn thin_separated(profile: &PhaseProfile, seq: &RealSequence, eps: f64) -> RealSequence {
    let mut kept: Vec<f64> = Vec::new();
    for &p in &seq.points {
        match kept.last() {
            Some(&q) if profile.metric(p, q) < eps => {}
            _ => kept.push(p),
        }
    }
    let mut out = RealSequence {
        points: kept,
        separation_eps: None,
    };
    out.separation_eps = check_separation(profile, &out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hb::SpaceSpec;
    use std::f64::consts::PI;

    fn pw() -> PhaseProfile {
        PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
    }

    fn integers(lo: i32, hi: i32) -> RealSequence {
        RealSequence::new((lo..=hi).map(f64::from).collect()).unwrap()
    }

    #[test]
    fn separation_examples() {
        let p = pw();
        assert!((check_separation(&p, &integers(-5, 5)).unwrap() - PI).abs() < 1e-14);
        let s = RealSequence::new(vec![0.0, 1e-9, 5.0]).unwrap();
        assert!((check_separation(&p, &s).unwrap() - PI * 1e-9).abs() < 1e-20);
        assert_eq!(check_separation(&p, &RealSequence::new(vec![1.0]).unwrap()), None);
    }

    #[test]
    fn lattice_density_counts() {
        let p = pw();
        let w = Interval::new(-50.0, 50.0).unwrap();
        let rep = density(&p, &integers(-50, 50), w, &[10.0 * PI]).unwrap();
        let r = 10.0 * PI;
        for v in [rep.lower[0], rep.upper[0]] {
            let count = (v * r).round();
            assert!((9.0..=11.0).contains(&count));
        }
        assert!(rep.upper[0] - rep.lower[0] <= 2.0 / r + 1e-12);
    }

    #[test]
    fn scaled_lattice_density() {
        let p = pw();
        let w = Interval::new(-300.0, 300.0).unwrap();
        let s = 1.0 / 1.2;
        let pts: Vec<f64> = (-360..=360).map(|k| k as f64 * s).collect();
        let seq = RealSequence::new(pts).unwrap();
        let r = 120.0 * PI;
        let rep = density(&p, &seq, w, &[r]).unwrap();
        let target = 1.2 / PI;
        assert!((rep.lower[0] - target).abs() <= 2.0 / r);
        assert!((rep.upper[0] - target).abs() <= 2.0 / r);
    }

    #[test]
    fn empty_sequence_has_zero_density() {
        let rep = density(&pw(), &RealSequence::empty(), Interval::new(0.0, 10.0).unwrap(), &[PI])
            .unwrap();
        assert_eq!(rep.lower, vec![0.0]);
        assert_eq!(rep.upper, vec![0.0]);
    }

    #[test]
    fn radius_larger_than_window_is_rejected() {
        let res = density(&pw(), &integers(0, 3), Interval::new(0.0, 3.0).unwrap(), &[20.0]);
        assert!(matches!(res, Err(Error::RadiusTooLarge { .. })));
    }

    #[test]
    fn witnesses_reproduce_counts() {
        let p = PhaseProfile::new(SpaceSpec::geometric_chain(2.0, 20).unwrap()).unwrap();
        let w = Interval::new(-30.0, 30.0).unwrap();
        let seq = generate_by_phase(&p, w, 0.7, 0.1).unwrap();
        let rep = density(&p, &seq, w, &[1.0, 2.5, 4.0]).unwrap();
        for (i, &r) in rep.r_values.iter().enumerate() {
            for wit in [rep.lower_witness[i], rep.upper_witness[i]] {
                let c = seq.count_half_open(wit.lo, wit.hi) as f64;
                assert_eq!(c, wit.value);
            }
            assert_eq!(rep.lower[i], rep.lower_witness[i].value / r);
            assert!(rep.lower[i] <= rep.upper[i]);
        }
    }

    #[test]
    fn generate_examples() {
        let p = pw();
        let w = Interval::new(-3.2, 4.5).unwrap();
        let ints = generate_by_phase(&p, w, PI, 0.0).unwrap();
        assert_eq!(ints.points(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ints.separation(), Some(PI));

        let w = Interval::new(-100.0, 100.0).unwrap();
        let sup = generate_by_phase(&p, w, PI / 1.2, 0.0).unwrap();
        let sub = generate_by_phase(&p, w, PI * 1.2, 0.0).unwrap();
        let mu = p.phase(w.hi) - p.phase(w.lo);
        assert!((sup.len() as f64 / mu - 1.2 / PI).abs() <= 2.0 / mu);
        assert!((sub.len() as f64 / mu - 1.0 / (1.2 * PI)).abs() <= 2.0 / mu);
    }

    #[test]
    fn perturb_examples() {
        let p = pw();
        let s = integers(0, 5);
        let same = perturb(&p, &s, |_| 0.0).unwrap();
        assert_eq!(same.points(), s.points());

        let collided = perturb(&p, &s, |x| if x == 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(collided.separation(), Some(0.0));

        // Uniform phase jitter below eps/3 keeps separation above eps/3.
        let eps = PI;
        let jittered = perturb(&p, &s, |x| ((x * 7.3).sin() * 0.33 * eps) / PI / 1.01).unwrap();
        assert!(jittered.separation().unwrap() >= eps / 3.0);
    }

    #[test]
    fn thinning_enforces_gap() {
        let p = pw();
        let s = RealSequence::new(vec![0.0, 0.1, 0.2, 1.0, 1.05, 3.0]).unwrap();
        let t = thin_separated(&p, &s, 0.5 * PI);
        assert_eq!(t.points(), &[0.0, 1.0, 3.0]);
        assert!(t.separation().unwrap() >= 0.5 * PI);
    }

    #[test]
    fn text_round_trip() {
        let s = RealSequence::new(vec![-1.5, 0.1, 2.0 / 3.0]).unwrap();
        assert_eq!(RealSequence::parse_text(&s.to_text()).unwrap(), s);
        assert!(RealSequence::parse_text("1\n0\n").is_err());
    }
}
