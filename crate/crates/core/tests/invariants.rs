//! Property tests of structural invariants across modules.

use std::f64::consts::PI;

use dblab_core::construct::{lagrange_interpolate, moment_match, ContinuousPart, MomentProblem, Multiplier};
use dblab_core::hb::{Interval, PhaseProfile, SpaceDocument, SpaceSpec};
use dblab_core::kernels::gram;
use dblab_core::numerics::poly::power_sums;
use dblab_core::numerics::symmetric_eigen;
use dblab_core::sequences::{density, generate_by_phase, RealSequence};
use num_complex::Complex64;
use proptest::prelude::*;

fn pw() -> PhaseProfile {
    PhaseProfile::new(SpaceSpec::paley_wiener(PI).unwrap()).unwrap()
}

/// Up to four zeros in the lower half-plane.
fn zeros_space() -> impl Strategy<Value = PhaseProfile> {
    prop::collection::vec((-10.0..10.0f64, 0.2..5.0f64), 1..5).prop_map(|z| {
        let zeros = z.into_iter().map(|(a, b)| Complex64::new(a, -b)).collect();
        PhaseProfile::new(SpaceSpec::finite_zeros(zeros).unwrap()).unwrap()
    })
}

fn masses() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.95..0.95f64, 0.1..2.0f64), 1..7)
}

fn problem(interval: Interval, masses: Vec<(f64, f64)>, order: usize) -> MomentProblem {
    MomentProblem {
        interval,
        continuous: ContinuousPart::Uniform(0.5),
        masses,
        order,
    }
}

fn power_sums_close(a: &[Complex64], b: &[Complex64], n: usize, tol: f64) -> bool {
    power_sums(a, n)
        .iter()
        .zip(power_sums(b, n))
        .all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moment_points_ignore_mass_order(m in masses(), order in 1usize..5, rot in 0usize..7) {
        let unit = Interval::new(-1.0, 1.0).unwrap();
        let mut shuffled = m.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = moment_match(&problem(unit, m, order)).unwrap();
        let b = moment_match(&problem(unit, shuffled, order)).unwrap();
        // Points are determined by their power sums; compare those, which
        // stays meaningful for (near-)multiple roots.
        prop_assert!(power_sums_close(&a.scaled, &b.scaled, order, 1e-9));
    }

    #[test]
    fn moment_points_follow_affine_maps(m in masses(), order in 1usize..5, scale in 0.1..20.0f64, shift in -50.0..50.0f64) {
        let unit = Interval::new(-1.0, 1.0).unwrap();
        let a = moment_match(&problem(unit, m.clone(), order)).unwrap();
        // Push the whole measure forward by x -> shift + scale x; the
        // uniform density 1/2 becomes 1/(2 scale).
        let moved = MomentProblem {
            interval: Interval::new(shift - scale, shift + scale).unwrap(),
            continuous: ContinuousPart::Uniform(0.5 / scale),
            masses: m.iter().map(|&(x, w)| (shift + scale * x, w)).collect(),
            order,
        };
        let b = moment_match(&moved).unwrap();
        prop_assert!((b.total_mass - a.total_mass).abs() <= 1e-12 * a.total_mass.abs());
        let back: Vec<Complex64> = b.points.iter().map(|z| (z - shift) / scale).collect();
        prop_assert!(power_sums_close(&back, &a.scaled, order, 1e-8));
    }

    #[test]
    fn circle_keeps_lower_power_sums(n in 2usize..8, re in -3.0..3.0f64, im in -1.0..1.0f64, r in 0.01..2.0f64) {
        let xi = Complex64::new(re, im);
        let circle: Vec<Complex64> = (0..n)
            .map(|k| xi + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
            .collect();
        let sums = power_sums(&circle, n);
        for (j, s) in sums.iter().enumerate().take(n - 1) {
            let target = xi.powu(j as u32 + 1) * n as f64;
            prop_assert!((s - target).norm() <= 1e-10 * (1.0 + target.norm()));
        }
        // The n-th sum picks up n r^n.
        let top = xi.powu(n as u32) * n as f64 + n as f64 * r.powi(n as i32);
        prop_assert!((sums[n - 1] - top).norm() <= 1e-9 * (1.0 + top.norm()));
    }

    #[test]
    fn normalized_gram_is_a_correlation_matrix(p in zeros_space(), gaps in prop::collection::vec(0.05..3.0f64, 2..30)) {
        let mut x = -20.0;
        let points: Vec<f64> = gaps.iter().map(|g| { x += g; x }).collect();
        let g = gram(&p, &points);
        for i in 0..g.nrows() {
            prop_assert!((g[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..g.ncols() {
                prop_assert!((g[(i, j)] - g[(j, i)]).abs() < 1e-12);
                prop_assert!(g[(i, j)].abs() <= 1.0 + 1e-12);
            }
        }
        let (vals, _) = symmetric_eigen(&g).unwrap();
        prop_assert!(vals[0] > -1e-9, "eig_min {}", vals[0]);
    }

    #[test]
    fn phase_is_increasing_and_inverts(p in zeros_space(), a in -40.0..40.0f64, d in 1e-3..10.0f64) {
        let b = a + d;
        prop_assert!(p.phase(b) > p.phase(a));
        prop_assert!(p.dphi(a) > 0.0);
        let x = p.inverse(p.phase(a)).unwrap();
        prop_assert!((x - a).abs() <= 1e-9 * (1.0 + a.abs()) / p.dphi(a).min(1.0));
    }

    #[test]
    fn phase_grid_density_is_within_one_point(p in zeros_space(), step in 0.2..1.5f64, alpha in 0.0..1.0f64) {
        let w = Interval::new(-60.0, 60.0).unwrap();
        // The phase of a finite-zero space has bounded range.
        prop_assume!(5.0 * step <= p.phase(w.hi) - p.phase(w.lo));
        let seq = generate_by_phase(&p, w, step, alpha).unwrap();
        let rs = [2.0 * step, 5.0 * step];
        let rep = density(&p, &seq, w, &rs).unwrap();
        for (i, &r) in rs.iter().enumerate() {
            prop_assert!(rep.lower[i] <= rep.upper[i]);
            // A half-open interval of phase measure r holds floor or ceil of r/step points.
            prop_assert!(rep.lower[i] * r >= r / step - 1.0 - 1e-9);
            prop_assert!(rep.upper[i] * r <= r / step + 1.0 + 1e-9);
        }
    }

    #[test]
    fn sine_type_lagrange_reproduces_node_values(alpha in 0.0..PI, vals in prop::collection::vec(-1.0..1.0f64, 21)) {
        let p = pw();
        let w = Interval::new(-10.5, 10.5).unwrap();
        let nodes = generate_by_phase(&p, w, PI, alpha).unwrap();
        let vals = &vals[..nodes.len()];
        let f = lagrange_interpolate(&p, &Multiplier::SineType { alpha }, &nodes, vals).unwrap();
        for (x, v) in nodes.points().iter().zip(vals) {
            // Slightly off the node the kernel sum must agree as well.
            let h = 1e-7;
            prop_assert!((f.eval(&p, *x) - v).abs() < 1e-12);
            prop_assert!((f.eval(&p, x + h) - v).abs() < 1e-4 * (1.0 + vals.iter().map(|v| v.abs()).sum::<f64>()));
        }
    }

    #[test]
    fn space_documents_round_trip(p in zeros_space(), slope in 0.1..10.0f64, eps in 1e-14..1e-8f64) {
        for spec in [p.spec().clone(), SpaceSpec::paley_wiener(slope).unwrap(), SpaceSpec::geometric_chain(2.0, 12).unwrap()] {
            let doc = SpaceDocument::from_spec(&spec, eps);
            let text = serde_json::to_string(&doc).unwrap();
            let back: SpaceDocument = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            let (spec2, eps2) = back.to_spec().unwrap();
            prop_assert_eq!(spec2, spec);
            prop_assert_eq!(eps2, eps);
        }
    }
}

#[test]
fn sequence_text_round_trips() {
    let seq = RealSequence::new(vec![-1.5, 3.0e-17, 0.1 + 0.2, 7.25]).unwrap();
    let back = RealSequence::parse_text(&seq.to_text()).unwrap();
    assert_eq!(back.points(), seq.points());
}
