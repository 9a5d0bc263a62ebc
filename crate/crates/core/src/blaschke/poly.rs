//! Dense complex polynomials, ascending coefficient order. Only what the
//! Blaschke constructions need: products of linear factors, Horner evaluation
//! and simultaneous root finding.

use num_complex::Complex64;

/// Coefficients of `scale · Π (z - r)`.
pub(crate) fn from_roots(roots: &[Complex64], scale: Complex64) -> Vec<Complex64> {
    let mut coeffs = vec![scale];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Coefficients of `Π (1 - conj(a) z)`.
pub(crate) fn reflected_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &a in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * a.conj();
        }
        coeffs = next;
    }
    coeffs
}

/// Value and derivative at `z`.
pub(crate) fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots by Aberth–Ehrlich iteration followed by Newton polishing.
///
/// Returns `None` if the leading coefficient vanishes or the iteration does
/// not settle.
pub(crate) fn roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound for the initial circle.
    let bound = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = 0.5 * bound;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 =
                (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 * bound {
            converged = true;
            break;
        }
    }
    if !converged && z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return None;
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= p / dp;
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        let want = [Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.1), Complex64::new(0.0, 0.7)];
        let coeffs = from_roots(&want, Complex64::new(2.0, 1.0));
        let mut got = roots(&coeffs).unwrap();
        for w in want {
            let (k, d) = got.iter().enumerate().map(|(k, g)| (k, (g - w).norm())).fold((0, f64::INFINITY), |a, b| {
                if b.1 < a.1 {
                    b
                } else {
                    a
                }
            });
            assert!(d < 1e-12, "root {w} missed by {d}");
            got.remove(k);
        }
    }

    #[test]
    fn reflected_polynomial() {
        let a = Complex64::new(0.5, 0.0);
        let c = reflected_from_roots(&[a]);
        assert_eq!(c, vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)]);
    }
}
