//! Power sums, elementary symmetric functions and polynomial roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Newton's identities: power sums `p_1..p_n` to elementary symmetric
/// functions `e_1..e_n` (with `e_0 = 1` implied).
pub fn elementary_from_power_sums(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len();
    let mut e = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let term = e[k - i] * p[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[k] = acc / k as f64;
    }
    e.remove(0);
    e
}

/// Monic coefficients `[1, c_1, ..., c_n]` (highest degree first) of
/// `prod (t - z_i)` from `e_1..e_n`.
pub fn monic_from_elementary(e: &[Complex64]) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(e.len() + 1);
    c.push(Complex64::new(1.0, 0.0));
    for (j, ej) in e.iter().enumerate() {
        c.push(if j % 2 == 0 { -ej } else { *ej });
    }
    c
}

/// `p_j = sum_k z_k^j` for `j = 1..=n`.
pub fn power_sums(z: &[Complex64], n: usize) -> Vec<Complex64> {
    (1..=n)
        .map(|j| z.iter().map(|zk| zk.powu(j as u32)).sum())
        .collect()
}

/// Horner evaluation of `p` and `p'` for coefficients highest degree first.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic polynomial as eigenvalues of its companion matrix,
/// followed by Newton polishing on the original polynomial.
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[1]]);
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -monic[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigensolver("companion Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::Eigensolver("companion eigenvalues unavailable".into()))?;
    let mut roots: Vec<Complex64> = eig.iter().copied().collect();
    for r in roots.iter_mut() {
        *r = polish(&monic, *r);
    }
    Ok(roots)
}

/// A few guarded Newton steps; a step is kept only if it reduces |p|.
fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let (mut p, _) = eval_with_derivative(coeffs, z);
    for _ in 0..8 {
        let (_, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, _) = eval_with_derivative(coeffs, cand);
        if pc.norm() < p.norm() {
            z = cand;
            p = pc;
        } else {
            break;
        }
    }
    z
}

/// Roots by successive Newton iteration and synthetic division. Intended as
/// an independent check on low-degree problems.
pub fn deflation_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lead = coeffs
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("empty polynomial".into()))?;
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let original: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut work = original.clone();
    let mut roots = Vec::new();
    while work.len() > 2 {
        let mut z = Complex64::new(0.4, 0.9);
        for _ in 0..500 {
            let (p, dp) = eval_with_derivative(&work, z);
            if p.norm() == 0.0 {
                break;
            }
            let step = if dp.norm() == 0.0 {
                Complex64::new(1e-3, 1e-3)
            } else {
                p / dp
            };
            z -= step;
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        z = polish(&original, z);
        // Synthetic division by (t - z).
        let mut next = Vec::with_capacity(work.len() - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &work[..work.len() - 1] {
            acc = acc * z + c;
            next.push(acc);
        }
        roots.push(z);
        work = next;
    }
    if work.len() == 2 {
        roots.push(polish(&original, -work[1] / work[0]));
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn newton_identities_on_known_roots() {
        let z = [c(1.0), c(2.0), Complex64::new(-0.5, 1.5)];
        let p = power_sums(&z, 3);
        let e = elementary_from_power_sums(&p);
        let e1: Complex64 = z.iter().sum();
        let e2 = z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
        let e3 = z[0] * z[1] * z[2];
        assert!((e[0] - e1).norm() < 1e-13);
        assert!((e[1] - e2).norm() < 1e-13);
        assert!((e[2] - e3).norm() < 1e-13);
    }

    #[test]
    fn companion_and_deflation_agree_on_cubic() {
        // (t - 1)(t + 2)(t - 3i)
        let roots = [c(1.0), c(-2.0), Complex64::new(0.0, 3.0)];
        let e = elementary_from_power_sums(&power_sums(&roots, 3));
        let coeffs = monic_from_elementary(&e);
        let mut a = companion_roots(&coeffs).unwrap();
        let mut b = deflation_roots(&coeffs).unwrap();
        let key = |z: &Complex64| (z.re * 1e6).round() as i64 * 1_000_000 + (z.im * 1e3).round() as i64;
        a.sort_by_key(key);
        b.sort_by_key(key);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn linear_and_empty() {
        assert!(companion_roots(&[c(1.0)]).unwrap().is_empty());
        assert_eq!(companion_roots(&[c(2.0), c(-4.0)]).unwrap(), vec![c(2.0)]);
    }
}
