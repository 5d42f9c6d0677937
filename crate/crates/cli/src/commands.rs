//! One function per subcommand. Each returns a JSON results payload and
//! the CSV artifacts that back its numbers.

use std::f64::consts::PI;

use dblab_core::construct::{
    build_plan, decay_fit, lagrange_interpolate, peak_function, tail_check, verify_multiplier, Multiplier,
    PlanOptions, PotentialField, VerifyOptions,
};
use dblab_core::hb::{Interval, PhaseProfile};
use dblab_core::kernels::{cross_gram, frame_bounds, gram, matrix_csv, min_norm_interpolant, on_nodes, riesz_bounds};
use dblab_core::regularity::{assess, profile_csv, RegularityOptions};
use dblab_core::sequences::{check_separation, density, RealSequence};
use dblab_core::suite::{run_criterion, SuiteOptions, CRITERIA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, InterpolationMethod};
use crate::CliError;

/// A CSV file emitted next to the report.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: &str, contents: String) -> Self {
        Artifact {
            name: name.to_string(),
            contents,
        }
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub results: Value,
    pub artifacts: Vec<Artifact>,
    /// Pass/fail verdict, for commands that check something.
    pub passed: Option<bool>,
    /// Timing detail kept apart from the deterministic payload.
    pub timing: Value,
}

impl Outcome {
    fn plain(results: Value, artifacts: Vec<Artifact>) -> Self {
        Outcome {
            results,
            artifacts,
            passed: None,
            timing: Value::Null,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn sequence_summary(profile: &PhaseProfile, seq: &RealSequence) -> Value {
    json!({
        "count": seq.len(),
        "first": seq.points().first(),
        "last": seq.points().last(),
        "separation_phi": check_separation(profile, seq),
    })
}

fn sequence_csv(seq: &RealSequence) -> String {
    let mut out = String::from("x\n");
    for &x in seq.points() {
        out.push_str(&e(x));
        out.push('\n');
    }
    out
}

/// `(x, phi, phi')` on an equispaced grid.
pub fn phase(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let n = cfg.phase.points.max(2);
    let mut csv = String::from("x,phi,dphi\n");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_x, mut hi_x) = (f64::NAN, f64::NAN);
    for i in 0..n {
        let x = w.lo + w.len() * i as f64 / (n - 1) as f64;
        let d = p.dphi(x);
        if d < lo {
            (lo, lo_x) = (d, x);
        }
        if d > hi {
            (hi, hi_x) = (d, x);
        }
        csv.push_str(&format!("{},{},{}\n", e(x), e(p.phase(x)), e(d)));
    }
    let (r0, r1) = p.phase_range();
    let results = json!({
        "window": w,
        "grid_points": n,
        "phase_at_ends": [p.phase(w.lo), p.phase(w.hi)],
        "phase_range": [r0, r1],
        "dphi_min": { "value": lo, "x": lo_x },
        "dphi_max": { "value": hi, "x": hi_x },
        "branch_constant": p.branch_constant(),
        "grid": "phase.csv",
    });
    Ok(Outcome::plain(
        results,
        vec![Artifact::new("phase.csv", csv), Artifact::new("profile.csv", profile_csv(&p, w, n))],
    ))
}

pub fn doubling(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let mut opts = RegularityOptions::for_window(w, cfg.seed);
    let d = &cfg.doubling;
    if let Some(s) = &d.scales {
        opts.scales = s.clone();
    }
    opts.centers_per_scale = d.centers_per_scale.unwrap_or(opts.centers_per_scale);
    opts.grid = d.grid.unwrap_or(opts.grid);
    opts.pairs = d.pairs.unwrap_or(opts.pairs);
    opts.distortion_radius = d.distortion_radius.unwrap_or(opts.distortion_radius);
    let report = assess(&p, w, &opts)?;
    let mut probes = String::from("lo,hi,mu,ratio\n");
    for pr in &report.probe_log {
        probes.push_str(&format!("{},{},{},{}\n", e(pr.lo), e(pr.hi), e(pr.mu), e(pr.ratio)));
    }
    Ok(Outcome::plain(
        json!({ "options": opts, "report": report }),
        vec![
            Artifact::new("profile.csv", profile_csv(&p, w, cfg.phase.points)),
            Artifact::new("doubling_probes.csv", probes),
        ],
    ))
}

pub fn density_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let seq = cfg.sequence(&p)?;
    let report = density(&p, &seq, w, &cfg.density.r)?;
    let trend = report.trend().map(|(lo, hi, err)| json!({ "lower": lo, "upper": hi, "boundary_error": err }));
    Ok(Outcome::plain(
        json!({
            "sequence": sequence_summary(&p, &seq),
            "density": report,
            // Counts per unit of phase; the critical value is 1/pi.
            "critical": 1.0 / PI,
            "trend": trend,
        }),
        vec![
            Artifact::new("density.csv", report.to_csv()),
            Artifact::new("sequence.csv", sequence_csv(&seq)),
        ],
    ))
}

pub fn frame(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let seq = cfg.sequence(&p)?;
    let basis_window = match cfg.frame.basis_window {
        Some([a, b]) => Interval::new(a, b).map_err(|e| CliError::Config(e.to_string()))?,
        None => cfg.window()?,
    };
    let report = frame_bounds(&p, &seq, basis_window, cfg.frame.alpha, cfg.frame.trim)?;
    let nodes = on_nodes(&p, basis_window, cfg.frame.alpha)?;
    let interior = &nodes.points()[cfg.frame.trim..nodes.len() - cfg.frame.trim];
    let mut witness = String::from("node,coefficient\n");
    for (x, c) in interior.iter().zip(&report.witness) {
        witness.push_str(&format!("{},{}\n", e(*x), e(*c)));
    }
    let mut artifacts = vec![
        Artifact::new("frame_witness.csv", witness),
        Artifact::new("sequence.csv", sequence_csv(&seq)),
    ];
    if seq.len() * interior.len() <= 1 << 20 {
        artifacts.push(Artifact::new("cross_gram.csv", matrix_csv(&cross_gram(&p, seq.points(), interior))));
    }
    Ok(Outcome::plain(
        json!({
            "sequence": sequence_summary(&p, &seq),
            "basis_window": basis_window,
            "interior_nodes": interior.len(),
            "frame": report,
        }),
        artifacts,
    ))
}

pub fn riesz(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let seq = cfg.sequence(&p)?;
    let report = riesz_bounds(&p, &seq)?;
    let mut artifacts = vec![Artifact::new("sequence.csv", sequence_csv(&seq))];
    if seq.len() <= 1024 {
        artifacts.push(Artifact::new("gram.csv", matrix_csv(&gram(&p, seq.points()))));
    }
    Ok(Outcome::plain(
        json!({ "sequence": sequence_summary(&p, &seq), "riesz": report }),
        artifacts,
    ))
}

fn random_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

pub fn interpolate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let seq = cfg.sequence(&p)?;
    let sec = &cfg.interpolate;
    let values = match &sec.values {
        Some(v) if v.len() != seq.len() => {
            return Err(CliError::Config(format!(
                "{} values given for {} nodes in the window",
                v.len(),
                seq.len()
            )))
        }
        Some(v) => v.clone(),
        None => random_values(seq.len(), cfg.seed),
    };
    let probes: Vec<f64> = (0..sec.probe_points.max(2))
        .map(|i| w.lo + w.len() * i as f64 / (sec.probe_points.max(2) - 1) as f64)
        .collect();
    let (nodes, values, eval, norm): (Vec<f64>, Vec<f64>, Box<dyn Fn(f64) -> f64>, Value) = match sec.method {
        InterpolationMethod::MinNorm => {
            let f = min_norm_interpolant(&p, &seq, &values)?;
            let norm = json!({ "norm_sq": f.norm_sq, "gram_eig_min": f.gram_eig_min });
            let pc = p.clone();
            (seq.points().to_vec(), values, Box::new(move |x| f.eval(&pc, x)), norm)
        }
        InterpolationMethod::SineType => {
            let f = lagrange_interpolate(&p, &Multiplier::SineType { alpha: sec.alpha }, &seq, &values)?;
            let norm = to_value(&f.norm_report(&p, w)?);
            let pc = p.clone();
            (seq.points().to_vec(), values, Box::new(move |x| f.eval(&pc, x)), norm)
        }
        InterpolationMethod::Plan => {
            let plan = build_plan(&p, &seq, w, &PlanOptions::with_epsilon(sec.epsilon))?;
            // Only nodes inside a block are zeros of the multiplier.
            let kept = RealSequence::from_unsorted(plan.lambda())?;
            let vals: Vec<f64> = kept
                .points()
                .iter()
                .map(|x| values[seq.points().partition_point(|y| y < x)])
                .collect();
            let f = lagrange_interpolate(&p, &Multiplier::Plan(plan.clone()), &kept, &vals)?;
            let norm = to_value(&f.norm_report(&p, plan.inner_window)?);
            let pc = p.clone();
            (kept.points().to_vec(), vals, Box::new(move |x| f.eval(&pc, x)), norm)
        }
    };
    let node_error = nodes
        .iter()
        .zip(&values)
        .map(|(&x, &v)| (eval(x) - v).abs())
        .fold(0.0, f64::max);
    let mut csv = String::from("x,value\n");
    for &x in &probes {
        csv.push_str(&format!("{},{}\n", e(x), e(eval(x))));
    }
    let mut data = String::from("x,value\n");
    for (x, v) in nodes.iter().zip(&values) {
        data.push_str(&format!("{},{}\n", e(*x), e(*v)));
    }
    Ok(Outcome::plain(
        json!({
            "method": sec.method,
            "nodes": nodes.len(),
            "max_node_error": node_error,
            "norm": norm,
            "probes": "interpolant.csv",
        }),
        vec![Artifact::new("interpolant.csv", csv), Artifact::new("data.csv", data)],
    ))
}

pub fn multiplier(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let seq = cfg.sequence(&p)?;
    let sec = &cfg.multiplier;
    let opts = PlanOptions {
        n: sec.n,
        m: sec.m,
        gamma: sec.gamma,
        eta: sec.eta,
        ..PlanOptions::with_epsilon(sec.epsilon)
    };
    let plan = build_plan(&p, &seq, w, &opts)?;
    let field = PotentialField::new(&p, &plan)?;
    let verify = VerifyOptions {
        grid_fraction: sec.grid_fraction,
        samples_per_side: sec.samples_per_side,
        radius_factor: sec.radius_factor,
    };
    let report = verify_multiplier(&field, &plan, &verify)?;
    let inner = plan.inner_window;
    let n = 2001;
    let mut potential = String::from("x,w\n");
    for i in 0..n {
        let x = inner.lo + inner.len() * i as f64 / (n - 1) as f64;
        potential.push_str(&format!("{},{}\n", e(x), e(field.w_real(x))));
    }
    let mut sigma = String::from("re,im,multiplicity\n");
    for s in plan.sigma() {
        sigma.push_str(&format!("{},{},{}\n", e(s.z.re), e(s.z.im), s.multiplicity));
    }
    let mut zeros = String::from("x\n");
    for z in plan.real_zeros() {
        zeros.push_str(&format!("{}\n", e(z)));
    }
    Ok(Outcome::plain(
        json!({
            "sequence": sequence_summary(&p, &seq),
            "plan": {
                "window": plan.window,
                "inner_window": plan.inner_window,
                "n": plan.n,
                "m": plan.m,
                "epsilon": plan.epsilon,
                "gamma": plan.gamma,
                "eta": plan.eta,
                "blocks": plan.blocks.len(),
                "replacements": plan.replacements(),
                "lambda_outside": plan.lambda_outside,
                "r_const": plan.r_const,
                "separation_ratio": plan.separation_ratio,
                "moments": plan.moments,
                "flags": plan.flags,
            },
            "verification": report,
        }),
        vec![
            Artifact::new("potential.csv", potential),
            Artifact::new("sigma.csv", sigma),
            Artifact::new("real_zeros.csv", zeros),
        ],
    ))
}

pub fn peak(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.profile()?;
    let w = cfg.window()?;
    let sec = &cfg.peak;
    let h = peak_function(&p, sec.x0, sec.poles, sec.epsilon, w)?;
    let fit = decay_fit(&h, sec.metric, sec.d_range[0], sec.d_range[1], sec.bins, 40)?;
    let tail = tail_check(&h, sec.metric, sec.d_range[1], sec.tail_reach, 20, fit.slope)?;
    let mut envelope = String::from("d,envelope\n");
    for (d, v) in &fit.envelope {
        envelope.push_str(&format!("{},{}\n", e(*d), e(*v)));
    }
    let n = 4001;
    let mut modulus = String::from("y,distance,modulus\n");
    for i in 0..n {
        let y = w.lo + w.len() * i as f64 / (n - 1) as f64;
        modulus.push_str(&format!("{},{},{}\n", e(y), e(h.distance(y, sec.metric)), e(h.modulus(y))));
    }
    Ok(Outcome::plain(
        json!({
            "x0": h.x0,
            "poles": h.poles,
            "fit": {
                "metric": fit.metric,
                "d_lo": fit.d_lo,
                "d_hi": fit.d_hi,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "envelope": "peak_envelope.csv",
            },
            "tail": tail,
        }),
        vec![
            Artifact::new("peak_envelope.csv", envelope),
            Artifact::new("peak_modulus.csv", modulus),
        ],
    ))
}

/// Runs the acceptance battery (or the listed criteria). Wall times go to
/// the timing block so that the results payload is reproducible.
pub fn suite(cfg: &ExperimentConfig, only: &[u32]) -> Result<Outcome, CliError> {
    let ids: Vec<u32> = if only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(CliError::Config(format!("no criterion {bad}")));
    }
    let opts = SuiteOptions { seed: cfg.seed };
    let mut criteria = Vec::new();
    let mut seconds = Vec::new();
    let mut csv = String::from("id,passed,title\n");
    for id in ids {
        let r = run_criterion(id, &opts);
        eprintln!("{}", r.line());
        csv.push_str(&format!("{},{},{}\n", r.id, r.passed, r.title));
        seconds.push(json!({ "id": r.id, "seconds": r.seconds }));
        criteria.push(json!({
            "id": r.id,
            "title": r.title,
            "passed": r.passed,
            "detail": r.detail,
            "metrics": r.metrics,
            "budget_seconds": r.budget_seconds,
        }));
    }
    let passed = criteria.iter().all(|c| c["passed"] == Value::Bool(true));
    Ok(Outcome {
        results: json!({ "seed": opts.seed, "passed": passed, "criteria": criteria }),
        artifacts: vec![Artifact::new("suite.csv", csv)],
        passed: Some(passed),
        timing: json!({ "criteria": seconds }),
    })
}
