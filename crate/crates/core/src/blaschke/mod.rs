//! Finite Blaschke products `c · Π (z - a)/(1 - conj(a) z)`.
//!
//! Divisibility of inner functions is taken modulo unimodular constants, so
//! [`divides`] and [`gcd`] only look at the zero multisets. Zeros are matched
//! numerically: two zeros closer than `tol` are the same zero.

mod poly;
mod text;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{LabError, Result};

pub use text::{format_complex, parse_complex};

/// Default matching tolerance for [`divides`] / [`gcd`].
pub const ZERO_MATCH_TOL: f64 = 1e-8;
/// Zeros must stay this far inside the unit circle.
pub const INTERIOR_MARGIN: f64 = 1e-9;
/// Largest admissible radius for [`random_blaschke`].
pub const MAX_RADIUS_CAP: f64 = 0.8;

const UNIMODULAR_TOL: f64 = 1e-12;
const CIRCLE_TOL: f64 = 1e-8;

/// A finite Blaschke product: a unimodular constant and a zero multiset in
/// the open disk. Degree zero is a unimodular constant.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    constant: Complex64,
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(constant: Complex64, zeros: Vec<Complex64>) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(LabError::Domain(format!("constant {constant} is not unimodular (|c| = {})", constant.norm())));
        }
        if let Some(a) = zeros.iter().find(|a| a.norm().is_nan() || a.norm() > 1.0 - INTERIOR_MARGIN) {
            return Err(LabError::Domain(format!("zero {a} is not strictly inside the unit disk")));
        }
        Ok(Self { constant, zeros })
    }

    /// Product with constant 1.
    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), zeros)
    }

    /// The unimodular constant `c` (degree 0).
    pub fn unimodular(constant: Complex64) -> Result<Self> {
        Self::new(constant, Vec::new())
    }

    pub fn one() -> Self {
        Self { constant: Complex64::new(1.0, 0.0), zeros: Vec::new() }
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        Self { constant: Complex64::new(1.0, 0.0), zeros: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_constant(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Value on the unit circle.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if (z.norm() - 1.0).abs() > CIRCLE_TOL {
            return Err(LabError::Domain(format!("|z| = {} is not on the unit circle", z.norm())));
        }
        Ok(self.value_at(z))
    }

    /// Value anywhere the product is analytic (no domain check).
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.constant, |acc, &a| acc * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z))
    }

    /// Values at each of `nodes` (assumed on the circle).
    pub fn samples(&self, nodes: &[Complex64]) -> Vec<Complex64> {
        nodes.iter().map(|&z| self.value_at(z)).collect()
    }

    /// Taylor coefficients `ĉ_0 .. ĉ_{count-1}` from a DFT of circle samples.
    ///
    /// The aliasing error per coefficient is at most `r^(grid_size - count)`
    /// with `r` the [`tail_radius`](Self::tail_radius).
    pub fn fourier_coefficients(&self, count: usize, grid_size: usize) -> Result<Vec<Complex64>> {
        if !grid_size.is_power_of_two() {
            return Err(LabError::Size(format!("grid size {grid_size} is not a power of two")));
        }
        if grid_size < 4 * (count + self.degree()) {
            return Err(LabError::Size(format!(
                "grid size {grid_size} < 4·(count + degree) = {}",
                4 * (count + self.degree())
            )));
        }
        let nodes: Vec<Complex64> =
            (0..grid_size).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid_size as f64)).collect();
        let mut buf = self.samples(&nodes);
        FftPlanner::new().plan_fft_forward(grid_size).process(&mut buf);
        let scale = 1.0 / grid_size as f64;
        Ok(buf.into_iter().take(count).map(|c| c * scale).collect())
    }

    /// Largest zero modulus; coefficient `k` of the product is `O(r^k)`.
    pub fn tail_radius(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        Self { constant: self.constant * other.constant, zeros }
    }

    /// `self / divisor` when `divisor` divides `self`; the matched zeros are
    /// removed and the constants divided.
    pub fn quotient(&self, divisor: &Self, tol: f64) -> Option<Self> {
        let pairs = match_zeros(&divisor.zeros, &self.zeros, tol);
        if pairs.len() != divisor.degree() {
            return None;
        }
        let mut used = vec![false; self.degree()];
        for &(_, j) in &pairs {
            used[j] = true;
        }
        let zeros = self.zeros.iter().zip(&used).filter(|(_, &u)| !u).map(|(&a, _)| a).collect();
        Some(Self { constant: self.constant / divisor.constant, zeros })
    }

    /// Frostman shift `(θ - a) / (1 - conj(a) θ)` for `|a| < 1`. Its zeros
    /// are the solutions of `θ(z) = a`, which is also where `1/(1 - a conj(θ))`
    /// has its poles after continuation into the disk.
    pub fn frostman_shift(&self, a: Complex64) -> Result<Self> {
        if a.norm().is_nan() || a.norm() >= 1.0 {
            return Err(LabError::Domain(format!("shift {a} must lie in the open disk")));
        }
        if self.is_constant() {
            return Err(LabError::Degenerate("frostman_shift needs a nonconstant θ".into()));
        }
        let numer = poly::from_roots(&self.zeros, self.constant);
        let denom = poly::reflected_from_roots(&self.zeros);
        let coeffs: Vec<Complex64> = numer.iter().zip(&denom).map(|(p, q)| p - a * q).collect();
        let zeros = poly::roots(&coeffs).ok_or_else(|| LabError::Degenerate("root finding did not converge".into()))?;
        let unit = Complex64::new(1.0, 0.0);
        let t = self.value_at(unit);
        let shape = Self::from_zeros(zeros)?;
        let constant = (t - a) / (unit - a.conj() * t) / shape.value_at(unit);
        Self::new(constant / constant.norm(), shape.zeros)
    }

    /// `(θ² - a) / (1 - conj(a) θ²)` for `|a| < 1`: a Blaschke product of
    /// degree `2·deg θ` with `θ² | (u + a)`.
    ///
    /// Zeros are the roots of `θ(z) = ±√a`, found by polynomial root finding.
    pub fn square_shifted(theta: &Self, a: Complex64) -> Result<Self> {
        if a.norm().is_nan() || a.norm() >= 1.0 {
            return Err(LabError::Domain(format!("shift {a} must lie in the open disk")));
        }
        if theta.is_constant() {
            return Err(LabError::Degenerate("square_shifted needs a nonconstant θ".into()));
        }
        let numer = poly::from_roots(&theta.zeros, theta.constant);
        let denom = poly::reflected_from_roots(&theta.zeros);
        let s = a.sqrt();
        let mut zeros = Vec::with_capacity(2 * theta.degree());
        for level in [s, -s] {
            // c·Π(z - a_j) - level·Π(1 - conj(a_j) z) = 0
            let coeffs: Vec<Complex64> = numer.iter().zip(&denom).map(|(p, q)| p - level * q).collect();
            let roots =
                poly::roots(&coeffs).ok_or_else(|| LabError::Degenerate("root finding did not converge".into()))?;
            zeros.extend(roots);
        }
        let unit = Complex64::new(1.0, 0.0);
        let exact = |z: Complex64| {
            let t2 = theta.value_at(z).powu(2);
            (t2 - a) / (unit - a.conj() * t2)
        };
        let shape = Self::from_zeros(zeros)?;
        let constant = exact(unit) / shape.value_at(unit);
        let constant = constant / constant.norm();
        let u = Self::new(constant, shape.zeros)?;
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.3) / 16.0);
            let err = (u.value_at(z) - exact(z)).norm();
            if err > 1e-9 {
                return Err(LabError::Degenerate(format!("square_shifted reconstruction error {err:.2e}")));
            }
        }
        Ok(u)
    }
}

impl Default for BlaschkeProduct {
    fn default() -> Self {
        Self::one()
    }
}

/// Greedy minimum-distance matching of two zero lists: all pairs within
/// `tol`, taken in increasing distance, each zero used at most once.
/// Returns `(index in a, index in b)` pairs.
pub fn match_zeros(a: &[Complex64], b: &[Complex64], tol: f64) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let d = (x - y).norm();
            if d <= tol {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

/// Whether `b1` divides `b2` (modulo unimodular constants).
pub fn divides(b1: &BlaschkeProduct, b2: &BlaschkeProduct, tol: f64) -> bool {
    b1.degree() <= b2.degree() && match_zeros(&b1.zeros, &b2.zeros, tol).len() == b1.degree()
}

/// Greatest common divisor with constant 1; matched zeros are averaged.
pub fn gcd(b1: &BlaschkeProduct, b2: &BlaschkeProduct, tol: f64) -> BlaschkeProduct {
    let mut pairs = match_zeros(&b1.zeros, &b2.zeros, tol);
    pairs.sort_unstable();
    let zeros = pairs.iter().map(|&(i, j)| 0.5 * (b1.zeros[i] + b2.zeros[j])).collect();
    BlaschkeProduct { constant: Complex64::new(1.0, 0.0), zeros }
}

/// `degree` zeros uniform on the disk of radius `radius_cap`, constant 1.
pub fn random_blaschke<R: Rng + ?Sized>(degree: usize, radius_cap: f64, rng: &mut R) -> Result<BlaschkeProduct> {
    if !(0.0..=MAX_RADIUS_CAP).contains(&radius_cap) {
        return Err(LabError::Domain(format!("radius cap {radius_cap} outside [0, {MAX_RADIUS_CAP}]")));
    }
    let zeros = (0..degree)
        .map(|_| {
            let r = radius_cap * rng.random::<f64>().sqrt();
            let t = 2.0 * PI * rng.random::<f64>();
            Complex64::from_polar(r, t)
        })
        .collect();
    BlaschkeProduct::from_zeros(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn b(zeros: &[Complex64]) -> BlaschkeProduct {
        BlaschkeProduct::from_zeros(zeros.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(BlaschkeProduct::one().eval(c(0.0, 1.0)).unwrap(), c(1.0, 0.0));
        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((b(&[c(0.0, 0.0)]).eval(z).unwrap() - z).norm() < 1e-15);
        assert!((b(&[c(0.5, 0.0)]).eval(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_rejects_interior_points() {
        let err = b(&[c(0.5, 0.0)]).eval(c(0.5, 0.0)).unwrap_err();
        assert!(matches!(err, LabError::Domain(_)));
    }

    #[test]
    fn construction_invariants() {
        assert!(BlaschkeProduct::new(c(2.0, 0.0), vec![]).is_err());
        assert!(BlaschkeProduct::from_zeros(vec![c(1.0, 0.0)]).is_err());
        assert!(BlaschkeProduct::from_zeros(vec![c(1.0 - 1e-10, 0.0)]).is_err());
        assert!(BlaschkeProduct::from_zeros(vec![c(1.0 - 2e-9, 0.0)]).is_ok());
    }

    #[test]
    fn multiply_examples() {
        let z = b(&[c(0.0, 0.0)]);
        assert_eq!(z.multiply(&z).zeros(), &[c(0.0, 0.0), c(0.0, 0.0)]);
        let i = BlaschkeProduct::unimodular(c(0.0, 1.0)).unwrap();
        let p = b(&[c(0.5, 0.0)]).multiply(&i);
        assert_eq!(p.zeros(), &[c(0.5, 0.0)]);
        assert_eq!(p.constant(), c(0.0, 1.0));
        let p = b(&[c(0.0, 0.0), c(0.5, 0.0)]).multiply(&b(&[c(0.5, 0.0)]));
        assert_eq!(p.zeros(), &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn divides_examples() {
        let tol = ZERO_MATCH_TOL;
        assert!(divides(&b(&[c(0.0, 0.0), c(0.5, 0.0)]), &b(&[c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]), tol));
        assert!(!divides(&b(&[c(0.0, 0.3)]), &b(&[c(0.0, 0.0)]), tol));
        assert!(divides(&BlaschkeProduct::one(), &b(&[c(0.1, 0.2)]), tol));
        // multiplicity matters
        assert!(!divides(&b(&[c(0.0, 0.0), c(0.0, 0.0)]), &b(&[c(0.0, 0.0)]), tol));
    }

    #[test]
    fn gcd_examples() {
        let tol = ZERO_MATCH_TOL;
        let g = gcd(&b(&[c(0.0, 0.0), c(0.5, 0.0)]), &b(&[c(0.5, 0.0), c(0.0, 0.3)]), tol);
        assert_eq!(g.zeros(), &[c(0.5, 0.0)]);
        let g = gcd(&b(&[c(0.0, 0.0), c(0.0, 0.0)]), &b(&[c(0.0, 0.0)]), tol);
        assert_eq!(g.zeros(), &[c(0.0, 0.0)]);
        let g = gcd(&b(&[c(0.4, 0.0)]), &b(&[c(-0.4, 0.0)]), tol);
        assert!(g.is_constant());
        assert_eq!(g.constant(), c(1.0, 0.0));
    }

    #[test]
    fn quotient_removes_matched_zeros() {
        let theta = b(&[c(0.1, 0.0), c(0.2, 0.3), c(-0.4, 0.0)]);
        let u = b(&[c(0.2, 0.3)]);
        let q = theta.quotient(&u, ZERO_MATCH_TOL).unwrap();
        assert_eq!(q.zeros(), &[c(0.1, 0.0), c(-0.4, 0.0)]);
        assert!(u.quotient(&theta, ZERO_MATCH_TOL).is_none());
    }

    #[test]
    fn fourier_coefficient_examples() {
        let z = b(&[c(0.0, 0.0)]);
        let f = z.fourier_coefficients(4, 64).unwrap();
        let want = [0.0, 1.0, 0.0, 0.0];
        for (g, w) in f.iter().zip(want) {
            assert!((g - c(w, 0.0)).norm() < 1e-14);
        }

        // (z - 1/2)/(1 - z/2) = (z - 1/2) Σ (z/2)^k, expanded by long
        // multiplication: ĉ_0 = -1/2, ĉ_k = (1/2)^(k-1) - (1/2)^(k+1).
        let mut taylor = vec![c(-0.5, 0.0)];
        for k in 1..12 {
            taylor.push(c(0.5f64.powi(k - 1) - 0.5 * 0.5f64.powi(k), 0.0));
        }
        assert_eq!(taylor[1], c(0.75, 0.0));
        assert_eq!(taylor[2], c(0.375, 0.0));
        assert_eq!(taylor[3], c(0.1875, 0.0));
        let f = b(&[c(0.5, 0.0)]).fourier_coefficients(12, 256).unwrap();
        for (g, w) in f.iter().zip(&taylor) {
            assert!((g - w).norm() < 1e-14, "{g} vs {w}");
        }

        let k = BlaschkeProduct::unimodular(c(0.6, 0.8)).unwrap();
        let f = k.fourier_coefficients(3, 64).unwrap();
        assert!((f[0] - c(0.6, 0.8)).norm() < 1e-15);
        assert!(f[1].norm() < 1e-15 && f[2].norm() < 1e-15);
    }

    #[test]
    fn fourier_grid_checks() {
        let p = b(&[c(0.1, 0.0); 4]);
        assert!(matches!(p.fourier_coefficients(4, 24), Err(LabError::Size(_))));
        assert!(matches!(p.fourier_coefficients(4, 16), Err(LabError::Size(_))));
        assert!(p.fourier_coefficients(4, 32).is_ok());
    }

    #[test]
    fn tail_radius_examples() {
        assert_eq!(BlaschkeProduct::one().tail_radius(), 0.0);
        assert_eq!(b(&[c(0.0, 0.0), c(0.5, 0.0)]).tail_radius(), 0.5);
        assert!((b(&[c(0.0, 0.3), c(-0.7, 0.0)]).tail_radius() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn random_blaschke_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_blaschke(0, 0.8, &mut rng).unwrap();
        assert!(p.is_constant());
        assert_eq!(p.constant(), c(1.0, 0.0));

        let a = random_blaschke(3, 0.8, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = random_blaschke(3, 0.8, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
        assert!(a.zeros().iter().all(|z| z.norm() <= 0.8));
        assert!(random_blaschke(2, 0.9, &mut rng).is_err());
    }

    #[test]
    fn frostman_shift_matches_pointwise() {
        let theta = BlaschkeProduct::from_zeros(vec![Complex64::new(0.3, -0.2), Complex64::new(-0.6, 0.1)]).unwrap();
        let a = Complex64::new(0.5, 0.4);
        let s = theta.frostman_shift(a).unwrap();
        assert_eq!(s.degree(), 2);
        for k in 0..7 {
            let z = Complex64::from_polar(1.0, 0.9 * k as f64);
            let t = theta.value_at(z);
            let want = (t - a) / (Complex64::new(1.0, 0.0) - a.conj() * t);
            assert!((s.value_at(z) - want).norm() < 1e-12);
        }
        for w in s.zeros() {
            assert!((theta.value_at(*w) - a).norm() < 1e-10);
        }
    }

    #[test]
    fn square_shifted_is_congruent_mod_theta_squared() {
        let theta = b(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        let a = c(0.2, -0.1);
        let u = BlaschkeProduct::square_shifted(&theta, a).unwrap();
        assert_eq!(u.degree(), 4);
        // u + a vanishes to second order wherever θ does.
        for &z0 in theta.zeros() {
            let v = u.value_at(z0) + a;
            assert!(v.norm() < 1e-10, "u(z0) + a = {v}");
            let h = 1e-4;
            let dv = (u.value_at(z0 + h) - u.value_at(z0 - h)) / (2.0 * h);
            assert!(dv.norm() < 1e-6, "u'(z0) = {dv}");
        }
    }
}
