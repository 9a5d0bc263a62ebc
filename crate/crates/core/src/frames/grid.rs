use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::blaschke::BlaschkeProduct;
use crate::error::{LabError, Result};

pub const MIN_GRID_SIZE: usize = 64;

/// Which half of `L²(𝕋) = H² ⊕ H²^⊥` a Riesz projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    /// Frequencies `0 .. size/2 - 1`.
    Analytic,
    /// Frequencies `-size/2 .. -1` (bins `size/2 .. size - 1`).
    Antianalytic,
}

/// The `size`-th roots of unity, `nodes[k] = e^{2πik/size}`. Quadrature on
/// the grid is the discrete mean, exact for trigonometric polynomials of
/// degree below `size`.
#[derive(Clone)]
pub struct CircleGrid {
    nodes: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleGrid").field("size", &self.size()).finish()
    }
}

impl PartialEq for CircleGrid {
    fn eq(&self, other: &Self) -> bool {
        self.size() == other.size()
    }
}

impl CircleGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size < MIN_GRID_SIZE || !size.is_power_of_two() {
            return Err(LabError::Size(format!("grid size {size} must be a power of two ≥ {MIN_GRID_SIZE}")));
        }
        let nodes = (0..size).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64)).collect();
        let mut planner = FftPlanner::new();
        Ok(Self { nodes, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Samples of `z^k` for any integer `k`, read off the node table so that
    /// no powers are accumulated.
    pub fn monomial(&self, k: i64) -> Vec<Complex64> {
        let n = self.size() as i64;
        (0..n).map(|j| self.nodes[(j * k).rem_euclid(n) as usize]).collect()
    }

    pub fn constant(&self, c: Complex64) -> Vec<Complex64> {
        vec![c; self.size()]
    }

    /// Discrete Fourier coefficients `ĝ(k) = mean(g · z^{-k})`, indexed by
    /// bin (`k mod size`).
    pub fn fourier(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(samples)?;
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.size() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(buf)
    }

    /// Inverse of [`fourier`](Self::fourier).
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(coefficients)?;
        let mut buf = coefficients.to_vec();
        self.inverse.process(&mut buf);
        Ok(buf)
    }

    /// Coefficient of `z^k` in a bin-indexed coefficient table.
    pub fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.size() as i64) as usize
    }

    fn check(&self, samples: &[Complex64]) -> Result<()> {
        if samples.len() != self.size() {
            return Err(LabError::GridMismatch { expected: self.size(), actual: samples.len() });
        }
        Ok(())
    }
}

/// `⟨f, g⟩ = mean over nodes of f · conj(g)`.
pub fn inner_product(f: &[Complex64], g: &[Complex64], grid: &CircleGrid) -> Result<Complex64> {
    grid.check(f)?;
    grid.check(g)?;
    Ok(dot_conj(f, g) / grid.size() as f64)
}

/// Quadrature norm.
pub fn norm(f: &[Complex64], grid: &CircleGrid) -> Result<f64> {
    grid.check(f)?;
    Ok((f.iter().map(|z| z.norm_sqr()).sum::<f64>() / grid.size() as f64).sqrt())
}

/// `Σ f · conj(g)` without normalisation.
pub(crate) fn dot_conj(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in f.iter().zip(g) {
        re += a.re * b.re + a.im * b.im;
        im += a.im * b.re - a.re * b.im;
    }
    Complex64::new(re, im)
}

/// Riesz projection: transform, zero one half of the spectrum, transform back.
pub fn riesz_project(samples: &[Complex64], grid: &CircleGrid, half: Half) -> Result<Vec<Complex64>> {
    let mut coeffs = grid.fourier(samples)?;
    let n = grid.size();
    let zero = Complex64::new(0.0, 0.0);
    match half {
        Half::Analytic => coeffs[n / 2..].fill(zero),
        Half::Antianalytic => coeffs[..n / 2].fill(zero),
    }
    grid.synthesize(&coeffs)
}

/// `Q_θ = I - P + M_θ P M_{conj θ}`: the projection onto `K_θ^⊥`.
pub fn q_theta_project(samples: &[Complex64], theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<Vec<Complex64>> {
    let t = theta.samples(grid.nodes());
    let anti = riesz_project(samples, grid, Half::Antianalytic)?;
    let shifted: Vec<Complex64> = samples.iter().zip(&t).map(|(f, t)| f * t.conj()).collect();
    let inner = riesz_project(&shifted, grid, Half::Analytic)?;
    Ok(anti.iter().zip(inner.iter().zip(&t)).map(|(a, (p, t))| a + t * p).collect())
}

/// `P_θ = I - Q_θ`: the projection onto `K_θ`.
pub fn p_theta_project(samples: &[Complex64], theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<Vec<Complex64>> {
    let q = q_theta_project(samples, theta, grid)?;
    Ok(samples.iter().zip(&q).map(|(f, q)| f - q).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_invariants() {
        assert!(CircleGrid::new(32).is_err());
        assert!(CircleGrid::new(100).is_err());
        let g = CircleGrid::new(64).unwrap();
        assert_eq!(g.nodes()[0], Complex64::new(1.0, 0.0));
        assert!((g.nodes()[16] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_examples() {
        let g = CircleGrid::new(256).unwrap();
        let z = g.monomial(1);
        let one = g.constant(Complex64::new(1.0, 0.0));
        assert!((inner_product(&z, &z, &g).unwrap() - 1.0).norm() < 1e-14);
        assert!(inner_product(&one, &z, &g).unwrap().norm() < 1e-14);
        // constant Taylor coefficient of (z - 1/2)/(1 - z/2)
        let b = BlaschkeProduct::from_zeros(vec![Complex64::new(0.5, 0.0)]).unwrap();
        let ip = inner_product(&b.samples(g.nodes()), &one, &g).unwrap();
        assert!((ip - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
        assert!(matches!(inner_product(&z[..10], &z, &g), Err(LabError::GridMismatch { .. })));
    }

    #[test]
    fn riesz_examples() {
        let g = CircleGrid::new(64).unwrap();
        let z = g.monomial(1);
        let zbar = g.monomial(-1);
        let sum: Vec<Complex64> = z.iter().zip(&zbar).map(|(a, b)| a + b).collect();
        assert!(max_diff(&riesz_project(&sum, &g, Half::Analytic).unwrap(), &z) < 1e-14);
        let one = g.constant(Complex64::new(1.0, 0.0));
        let p = riesz_project(&one, &g, Half::Antianalytic).unwrap();
        assert!(p.iter().all(|c| c.norm() < 1e-14));
        let zm2 = g.monomial(-2);
        assert!(max_diff(&riesz_project(&zm2, &g, Half::Antianalytic).unwrap(), &zm2) < 1e-14);
    }

    #[test]
    fn q_theta_examples() {
        let g = CircleGrid::new(64).unwrap();
        let theta = BlaschkeProduct::monomial(2);
        let one = g.constant(Complex64::new(1.0, 0.0));
        assert!(q_theta_project(&one, &theta, &g).unwrap().iter().all(|c| c.norm() < 1e-14));
        let z2 = g.monomial(2);
        assert!(max_diff(&q_theta_project(&z2, &theta, &g).unwrap(), &z2) < 1e-14);
        let zm1 = g.monomial(-1);
        assert!(max_diff(&q_theta_project(&zm1, &theta, &g).unwrap(), &zm1) < 1e-14);
    }
}
