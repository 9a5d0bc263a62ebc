//! Orthonormal coordinate systems on subspaces of `L²(𝕋)`, realised as
//! basis functions sampled on a [`CircleGrid`].
//!
//! Every frame except the Takenaka–Malmquist basis of `K_θ` consists of
//! functions `w · z^k` with `w ∈ {1, θ}`; for those the frame records the
//! `(w, k)` layout so that inner products against it reduce to a single
//! discrete Fourier transform.

mod grid;

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use crate::blaschke::BlaschkeProduct;
use crate::error::{LabError, Result};

pub(crate) use grid::dot_conj;
pub use grid::{inner_product, norm, p_theta_project, q_theta_project, riesz_project, CircleGrid, Half, MIN_GRID_SIZE};

/// Window size per side: the smallest `T` with `0.8^T < 1e-10`.
pub const DEFAULT_TRUNCATION: usize = 104;

/// Smallest `T` with `radius^T < eps`.
pub fn truncation_for(radius: f64, eps: f64) -> usize {
    if radius <= 0.0 {
        return 1;
    }
    (eps.ln() / radius.ln()).floor() as usize + 1
}

/// Smallest power of two ≥ `max(256, 8 · (total degree + pos + neg))`.
pub fn recommended_grid_size(total_degree: usize, pos: usize, neg: usize) -> usize {
    (8 * (total_degree + pos + neg)).max(256).next_power_of_two()
}

/// Truncation window of the dual frame: `pos` analytic slots `θ z^j` and
/// `neg` anti-analytic slots `z^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Truncation {
    pub pos: usize,
    pub neg: usize,
}

impl Truncation {
    pub fn symmetric(side: usize) -> Self {
        Self { pos: side, neg: side }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::symmetric(DEFAULT_TRUNCATION)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum FrameKind {
    /// Takenaka–Malmquist basis of `K_θ`.
    ModelBasis,
    /// `θ z^0 .. θ z^{pos-1}, z^{-1} .. z^{-neg}`: a window of `K_θ^⊥`.
    DualFrame,
    /// `1 .. z^{n-1}`: a window of `H²`.
    AnalyticSection,
    /// `z^{-1} .. z^{-m}`: a window of `H²^⊥`.
    AntianalyticSection,
    /// Concatenation of two mutually orthogonal frames.
    Stacked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FrameId(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    One,
    Theta,
}

/// Basis function `weight · z^freq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Atom {
    pub weight: Weight,
    pub freq: i64,
}

/// An ordered orthonormal family with its basis functions sampled on a grid.
#[derive(Debug, Clone)]
pub struct Frame {
    id: FrameId,
    kind: FrameKind,
    dimension: usize,
    grid_size: usize,
    samples: Vec<Complex64>,
    atoms: Option<Vec<Atom>>,
    theta: Option<BlaschkeProduct>,
    theta_samples: Option<Vec<Complex64>>,
    truncation: Option<Truncation>,
}

/// Coordinates of a function in a frame's basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    pub coords: Vec<Complex64>,
    pub frame_id: FrameId,
}

impl CoefVector {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Frame {
    /// Takenaka–Malmquist basis
    /// `e_k = √(1-|a_k|²)/(1 - conj(a_k) z) · Π_{j<k} (z - a_j)/(1 - conj(a_j) z)`
    /// in the stored zero order of `θ`.
    pub fn model_basis(theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<Self> {
        if theta.is_constant() {
            return Err(LabError::Degenerate("K_θ is trivial for constant θ".into()));
        }
        let n = grid.size();
        let one = Complex64::new(1.0, 0.0);
        let mut samples = Vec::with_capacity(theta.degree() * n);
        // zeros at the origin contribute exact powers of z from the node table
        let mut prefix = vec![one; n];
        let mut origin = 0i64;
        for &a in theta.zeros() {
            let power = grid.monomial(origin);
            if a == Complex64::new(0.0, 0.0) {
                samples.extend(prefix.iter().zip(&power).map(|(p, m)| p * m));
                origin += 1;
                continue;
            }
            let scale = (1.0 - a.norm_sqr()).sqrt();
            for ((z, p), m) in grid.nodes().iter().zip(prefix.iter_mut()).zip(&power) {
                let denom = one - a.conj() * z;
                samples.push(*p * m * scale / denom);
                *p *= (z - a) / denom;
            }
        }
        Ok(Self::build(FrameKind::ModelBasis, theta.degree(), grid, samples, None, Some(theta), None))
    }

    /// Window `θ z^0 .. θ z^{pos-1}, z^{-1} .. z^{-neg}` of `K_θ^⊥ = θH² ⊕ H²^⊥`.
    pub fn dual_frame(theta: &BlaschkeProduct, truncation: Truncation, grid: &CircleGrid) -> Result<Self> {
        if truncation.pos == 0 || truncation.neg == 0 {
            return Err(LabError::Size("dual frame needs pos_count, neg_count ≥ 1".into()));
        }
        let t = theta.samples(grid.nodes());
        let mut atoms = Vec::with_capacity(truncation.pos + truncation.neg);
        atoms.extend((0..truncation.pos as i64).map(|j| Atom { weight: Weight::Theta, freq: j }));
        atoms.extend((1..=truncation.neg as i64).map(|k| Atom { weight: Weight::One, freq: -k }));
        let samples = atom_samples(&atoms, grid, Some(&t));
        let mut frame =
            Self::build(FrameKind::DualFrame, atoms.len(), grid, samples, Some(atoms), Some(theta), Some(truncation));
        frame.theta_samples = Some(t);
        Ok(frame)
    }

    /// `1, z, .., z^{n-1}`.
    pub fn analytic_section(n: usize, grid: &CircleGrid) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Size("empty analytic section".into()));
        }
        let atoms: Vec<Atom> = (0..n as i64).map(|k| Atom { weight: Weight::One, freq: k }).collect();
        let samples = atom_samples(&atoms, grid, None);
        Ok(Self::build(FrameKind::AnalyticSection, n, grid, samples, Some(atoms), None, None))
    }

    /// `z^{-1}, .., z^{-m}`.
    pub fn antianalytic_section(m: usize, grid: &CircleGrid) -> Result<Self> {
        if m == 0 {
            return Err(LabError::Size("empty anti-analytic section".into()));
        }
        let atoms: Vec<Atom> = (1..=m as i64).map(|k| Atom { weight: Weight::One, freq: -k }).collect();
        let samples = atom_samples(&atoms, grid, None);
        Ok(Self::build(FrameKind::AntianalyticSection, m, grid, samples, Some(atoms), None, None))
    }

    /// `first` followed by `second`; the caller asserts the two are orthogonal.
    pub fn stack(first: &Frame, second: &Frame) -> Result<Self> {
        if first.grid_size != second.grid_size {
            return Err(LabError::GridMismatch { expected: first.grid_size, actual: second.grid_size });
        }
        let mut samples = first.samples.clone();
        samples.extend_from_slice(&second.samples);
        let mut h = DefaultHasher::new();
        (first.id, second.id).hash(&mut h);
        Ok(Self {
            id: FrameId(h.finish()),
            kind: FrameKind::Stacked,
            dimension: first.dimension + second.dimension,
            grid_size: first.grid_size,
            samples,
            atoms: None,
            theta: first.theta.clone().or_else(|| second.theta.clone()),
            theta_samples: None,
            truncation: None,
        })
    }

    fn build(
        kind: FrameKind,
        dimension: usize,
        grid: &CircleGrid,
        samples: Vec<Complex64>,
        atoms: Option<Vec<Atom>>,
        theta: Option<&BlaschkeProduct>,
        truncation: Option<Truncation>,
    ) -> Self {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        dimension.hash(&mut h);
        grid.size().hash(&mut h);
        if let Some(t) = theta {
            t.to_string().hash(&mut h);
        }
        if let Some(t) = truncation {
            (t.pos, t.neg).hash(&mut h);
        }
        Self {
            id: FrameId(h.finish()),
            kind,
            dimension,
            grid_size: grid.size(),
            samples,
            atoms,
            theta: theta.cloned(),
            theta_samples: None,
            truncation,
        }
    }

    pub fn id(&self) -> FrameId {
        self.id
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn theta(&self) -> Option<&BlaschkeProduct> {
        self.theta.as_ref()
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    /// Samples of basis function `k`.
    pub fn basis(&self, k: usize) -> &[Complex64] {
        &self.samples[k * self.grid_size..(k + 1) * self.grid_size]
    }

    pub(crate) fn atoms(&self) -> Option<&[Atom]> {
        self.atoms.as_deref()
    }

    pub(crate) fn theta_samples(&self) -> Option<&[Complex64]> {
        self.theta_samples.as_deref()
    }

    pub(crate) fn check_grid(&self, grid: &CircleGrid) -> Result<()> {
        if grid.size() != self.grid_size {
            return Err(LabError::GridMismatch { expected: self.grid_size, actual: grid.size() });
        }
        Ok(())
    }

    /// Indices of the central half of the window: the first half of each
    /// block for windowed frames, everything for the model basis.
    pub fn interior_indices(&self) -> Vec<usize> {
        match (self.kind, self.truncation) {
            (FrameKind::DualFrame, Some(t)) => (0..t.pos / 2).chain(t.pos..t.pos + t.neg / 2).collect(),
            (FrameKind::AnalyticSection | FrameKind::AntianalyticSection, _) => (0..self.dimension / 2).collect(),
            _ => (0..self.dimension).collect(),
        }
    }

    /// Gram matrix under quadrature, row-major `dimension × dimension`.
    pub fn gram(&self) -> Vec<Complex64> {
        let d = self.dimension;
        let mut g = vec![Complex64::new(0.0, 0.0); d * d];
        let n = self.grid_size as f64;
        for j in 0..d {
            for i in 0..d {
                g[j * d + i] = dot_conj(self.basis(i), self.basis(j)) / n;
            }
        }
        g
    }

    /// Coordinates `⟨f, e_k⟩` of a sampled function.
    pub fn analyze(&self, samples: &[Complex64], grid: &CircleGrid) -> Result<CoefVector> {
        self.check_grid(grid)?;
        if samples.len() != self.grid_size {
            return Err(LabError::GridMismatch { expected: self.grid_size, actual: samples.len() });
        }
        let coords = match &self.atoms {
            Some(atoms) => {
                let plain = grid.fourier(samples)?;
                let shifted = match &self.theta_samples {
                    Some(t) => {
                        let g: Vec<Complex64> = samples.iter().zip(t).map(|(f, t)| f * t.conj()).collect();
                        Some(grid.fourier(&g)?)
                    }
                    None => None,
                };
                atoms
                    .iter()
                    .map(|a| match a.weight {
                        Weight::One => plain[grid.bin(a.freq)],
                        Weight::Theta => shifted.as_ref().expect("θ-weighted atoms carry θ samples")[grid.bin(a.freq)],
                    })
                    .collect()
            }
            None => {
                let n = self.grid_size as f64;
                (0..self.dimension).map(|k| dot_conj(samples, self.basis(k)) / n).collect()
            }
        };
        Ok(CoefVector { coords, frame_id: self.id })
    }

    /// `Σ coords_k e_k` on the grid.
    pub fn synthesize(&self, v: &CoefVector) -> Result<Vec<Complex64>> {
        if v.frame_id != self.id {
            return Err(LabError::FrameMismatch("coefficient vector belongs to another frame".into()));
        }
        self.combine(&v.coords)
    }

    /// `Σ coords_k e_k` for raw coordinates.
    pub fn combine(&self, coords: &[Complex64]) -> Result<Vec<Complex64>> {
        if coords.len() != self.dimension {
            return Err(LabError::Size(format!(
                "{} coordinates for a frame of dimension {}",
                coords.len(),
                self.dimension
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid_size];
        for (k, &c) in coords.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, e) in out.iter_mut().zip(self.basis(k)) {
                *o += c * e;
            }
        }
        Ok(out)
    }

    /// Basis samples as CSV: one row per node, `re,im` pairs per basis function.
    pub fn to_csv(&self, grid: &CircleGrid) -> Result<String> {
        self.check_grid(grid)?;
        let mut out = String::from("node_re,node_im");
        for k in 0..self.dimension {
            let _ = write!(out, ",e{k}_re,e{k}_im");
        }
        out.push('\n');
        for (n, z) in grid.nodes().iter().enumerate() {
            let _ = write!(out, "{},{}", z.re, z.im);
            for k in 0..self.dimension {
                let v = self.samples[k * self.grid_size + n];
                let _ = write!(out, ",{},{}", v.re, v.im);
            }
            out.push('\n');
        }
        Ok(out)
    }
}

fn atom_samples(atoms: &[Atom], grid: &CircleGrid, theta: Option<&[Complex64]>) -> Vec<Complex64> {
    let mut samples = Vec::with_capacity(atoms.len() * grid.size());
    for a in atoms {
        let mono = grid.monomial(a.freq);
        match a.weight {
            Weight::One => samples.extend(mono),
            Weight::Theta => {
                let t = theta.expect("θ samples for θ-weighted atoms");
                samples.extend(mono.iter().zip(t).map(|(m, t)| m * t));
            }
        }
    }
    samples
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gram_error(f: &Frame) -> f64 {
        let d = f.dimension();
        f.gram()
            .iter()
            .enumerate()
            .map(|(k, g)| (g - if k / d == k % d { c(1.0, 0.0) } else { c(0.0, 0.0) }).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn default_truncation_matches_tail_rule() {
        assert_eq!(truncation_for(0.8, 1e-10), DEFAULT_TRUNCATION);
        assert!(0.8f64.powi(DEFAULT_TRUNCATION as i32) < 1e-10);
        assert!(0.8f64.powi(DEFAULT_TRUNCATION as i32 - 1) >= 1e-10);
    }

    #[test]
    fn grid_sizing_rule() {
        assert_eq!(recommended_grid_size(3, 4, 4), 256);
        assert_eq!(recommended_grid_size(10, 104, 104), 2048);
    }

    #[test]
    fn model_basis_of_monomial_is_monomials() {
        let g = CircleGrid::new(64).unwrap();
        for n in [2usize, 3] {
            let f = Frame::model_basis(&BlaschkeProduct::monomial(n), &g).unwrap();
            assert_eq!(f.dimension(), n);
            for k in 0..n {
                assert_eq!(f.basis(k), g.monomial(k as i64).as_slice());
            }
        }
    }

    #[test]
    fn model_basis_single_zero_norm() {
        // e_1 = (√3/2) Σ (z/2)^k ; ‖e_1‖² = (3/4) Σ (1/4)^k = 1
        let series: f64 = (0..60).map(|k| 0.75 * 0.25f64.powi(k)).sum();
        assert!((series - 1.0).abs() < 1e-15);
        let g = CircleGrid::new(256).unwrap();
        let theta = BlaschkeProduct::from_zeros(vec![c(0.5, 0.0)]).unwrap();
        let f = Frame::model_basis(&theta, &g).unwrap();
        assert!((norm(f.basis(0), &g).unwrap() - 1.0).abs() < 1e-12);
        let want: Vec<Complex64> = g.nodes().iter().map(|z| (3.0f64).sqrt() / 2.0 / (c(1.0, 0.0) - z / 2.0)).collect();
        assert!(f.basis(0).iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn model_basis_rejects_constant() {
        let g = CircleGrid::new(64).unwrap();
        assert!(matches!(Frame::model_basis(&BlaschkeProduct::one(), &g), Err(LabError::Degenerate(_))));
    }

    #[test]
    fn dual_frame_layout() {
        let g = CircleGrid::new(64).unwrap();
        let f = Frame::dual_frame(&BlaschkeProduct::monomial(2), Truncation { pos: 2, neg: 1 }, &g).unwrap();
        assert_eq!(f.dimension(), 3);
        for (k, e) in [2i64, 3, -1].into_iter().enumerate() {
            let m = g.monomial(e);
            assert!(f.basis(k).iter().zip(&m).all(|(a, b)| (a - b).norm() < 1e-14));
        }
        let f = Frame::dual_frame(&BlaschkeProduct::monomial(1), Truncation { pos: 1, neg: 1 }, &g).unwrap();
        assert_eq!(f.dimension(), 2);
        assert!(Frame::dual_frame(&BlaschkeProduct::monomial(1), Truncation { pos: 0, neg: 1 }, &g).is_err());
    }

    #[test]
    fn frames_are_orthonormal_and_mutually_orthogonal() {
        let g = CircleGrid::new(256).unwrap();
        let theta = BlaschkeProduct::from_zeros(vec![c(0.4, 0.0), c(0.0, -0.3)]).unwrap();
        let model = Frame::model_basis(&theta, &g).unwrap();
        let dual = Frame::dual_frame(&theta, Truncation::symmetric(8), &g).unwrap();
        assert!(gram_error(&model) < 1e-12);
        assert!(gram_error(&dual) < 1e-12);
        for i in 0..model.dimension() {
            for j in 0..dual.dimension() {
                assert!(inner_product(model.basis(i), dual.basis(j), &g).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn analyze_fast_path_matches_quadrature() {
        let g = CircleGrid::new(256).unwrap();
        let theta = BlaschkeProduct::from_zeros(vec![c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        let dual = Frame::dual_frame(&theta, Truncation::symmetric(6), &g).unwrap();
        let u = BlaschkeProduct::from_zeros(vec![c(0.1, -0.6)]).unwrap();
        let f: Vec<Complex64> = u.samples(g.nodes()).iter().zip(g.monomial(-2)).map(|(a, b)| a * b).collect();
        let fast = dual.analyze(&f, &g).unwrap();
        for k in 0..dual.dimension() {
            let direct = inner_product(&f, dual.basis(k), &g).unwrap();
            assert!((fast.coords[k] - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn synthesis_preserves_norm() {
        let g = CircleGrid::new(256).unwrap();
        let theta = BlaschkeProduct::from_zeros(vec![c(0.3, 0.2), c(-0.5, 0.1), c(0.0, 0.7)]).unwrap();
        let model = Frame::model_basis(&theta, &g).unwrap();
        let v = CoefVector { coords: vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 0.25)], frame_id: model.id() };
        let f = model.synthesize(&v).unwrap();
        assert!((norm(&f, &g).unwrap() - v.norm()).abs() < 1e-8);
        let back = model.analyze(&f, &g).unwrap();
        assert!(back.coords.iter().zip(&v.coords).all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn interior_indices_of_dual_frame() {
        let g = CircleGrid::new(64).unwrap();
        let f = Frame::dual_frame(&BlaschkeProduct::monomial(1), Truncation::symmetric(4), &g).unwrap();
        assert_eq!(f.interior_indices(), vec![0, 1, 4, 5]);
    }

    #[test]
    fn csv_export_shape() {
        let g = CircleGrid::new(64).unwrap();
        let f = Frame::analytic_section(2, &g).unwrap();
        let csv = f.to_csv(&g).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 65);
        assert_eq!(lines[0], "node_re,node_im,e0_re,e0_im,e1_re,e1_im");
        assert_eq!(lines[1], "1,0,1,0,1,0");
    }
}
