//! Matrix compressions of multiplication operators between frames.
//!
//! Everything funnels through [`compress`]: entry `(j, i)` is the quadrature
//! inner product `⟨φ e_i, f_j⟩` of the domain basis `e` and codomain basis
//! `f`. When both frames are built from atoms `w · z^k` (`w ∈ {1, θ}`) the
//! whole matrix is read off at most four Fourier transforms of `φ · w_e ·
//! conj(w_f)`; this is the same discrete mean, reorganised.

mod symbol;

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::blaschke::BlaschkeProduct;
use crate::error::{LabError, Result};
use crate::frames::{dot_conj, Atom, CircleGrid, CoefVector, Frame, FrameId, FrameKind, Truncation, Weight};
use crate::linalg::{self, CMatrix};

pub use symbol::{SymbolSpec, DIVISION_GUARD};

/// Floor for [`tail_epsilon`] so that quadrature rounding is never held to
/// a zero tolerance.
pub const TAIL_FLOOR: f64 = 1e-10;

/// Finite-section tolerance `10 · r^{side/2 - max_degree}`.
pub fn tail_epsilon(radius: f64, side: usize, max_degree: usize) -> f64 {
    let exponent = side as f64 / 2.0 - max_degree as f64;
    (10.0 * radius.powf(exponent.max(0.0))).max(TAIL_FLOOR)
}

/// A compression together with the frames it maps between.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    domain: FrameId,
    codomain: FrameId,
    symbol: String,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix, domain: FrameId, codomain: FrameId, symbol: impl Into<String>) -> Self {
        Self { entries, domain, codomain, symbol: symbol.into() }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn domain_frame_id(&self) -> FrameId {
        self.domain
    }

    pub fn codomain_frame_id(&self) -> FrameId {
        self.codomain
    }

    pub fn symbol_descriptor(&self) -> &str {
        &self.symbol
    }

    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            domain: self.codomain,
            codomain: self.domain,
            symbol: format!("adjoint({})", self.symbol),
        }
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.entries)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OperatorMatrix) -> Result<Self> {
        if inner.codomain != self.domain {
            return Err(LabError::FrameMismatch(format!("cannot compose {} after {}", self.symbol, inner.symbol)));
        }
        Ok(Self {
            entries: &self.entries * &inner.entries,
            domain: inner.domain,
            codomain: self.codomain,
            symbol: format!("{} . {}", self.symbol, inner.symbol),
        })
    }

    pub fn apply(&self, x: &CoefVector) -> Result<CoefVector> {
        if x.frame_id != self.domain {
            return Err(LabError::FrameMismatch("vector is not in the operator's domain frame".into()));
        }
        let y = &self.entries * DVector::from_column_slice(&x.coords);
        Ok(CoefVector { coords: y.iter().copied().collect(), frame_id: self.codomain })
    }

    /// Row-major CSV, each entry written as a `re,im` pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.entries.nrows() {
            for c in 0..self.entries.ncols() {
                if c > 0 {
                    out.push(',');
                }
                let z = self.entries[(r, c)];
                let _ = write!(out, "{},{}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

/// The antilinear map `x ↦ U · conj(x)` representing `Cf = θ conj(z f)` in a
/// frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation {
    matrix: CMatrix,
    frame: FrameId,
}

impl Conjugation {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn frame_id(&self) -> FrameId {
        self.frame
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.matrix.ncols() {
            return Err(LabError::Size(format!(
                "conjugation acts on {} coordinates, got {}",
                self.matrix.ncols(),
                x.len()
            )));
        }
        let y = &self.matrix * DVector::from_iterator(x.len(), x.iter().map(|z| z.conj()));
        Ok(y.iter().copied().collect())
    }

    /// Matrix of the linear map `C T C`, i.e. `U · conj(T) · conj(U)`.
    pub fn sandwich(&self, t: &CMatrix) -> CMatrix {
        &self.matrix * t.map(|z| z.conj()) * self.matrix.map(|z| z.conj())
    }

    /// `max |U conj(U) - I|`.
    pub fn involution_error(&self) -> f64 {
        let n = self.matrix.nrows();
        linalg::max_abs(&(&self.matrix * self.matrix.map(|z| z.conj()) - CMatrix::identity(n, n)))
    }

    /// `max |Uᴴ U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        linalg::orthonormality_error(&self.matrix)
    }
}

/// Entries `(j, i) = ⟨φ e_i, f_j⟩` for `e` = domain, `f` = codomain.
pub fn compress(phi: &SymbolSpec, domain: &Frame, codomain: &Frame, grid: &CircleGrid) -> Result<OperatorMatrix> {
    domain.check_grid(grid)?;
    codomain.check_grid(grid)?;
    let values = phi.samples(grid)?;
    compress_values(&values, phi.to_string(), domain, codomain, grid)
}

/// [`compress`] for a symbol already sampled on the grid.
pub fn compress_values(
    phi: &[Complex64],
    descriptor: String,
    domain: &Frame,
    codomain: &Frame,
    grid: &CircleGrid,
) -> Result<OperatorMatrix> {
    domain.check_grid(grid)?;
    codomain.check_grid(grid)?;
    if phi.len() != grid.size() {
        return Err(LabError::GridMismatch { expected: grid.size(), actual: phi.len() });
    }
    let (rows, cols) = (codomain.dimension(), domain.dimension());
    let entries = match (domain.atoms(), codomain.atoms()) {
        (Some(dom), Some(cod)) => atom_route(phi, dom, domain, cod, codomain, grid)?,
        (_, Some(_)) => {
            let mut m = CMatrix::zeros(rows, cols);
            for i in 0..cols {
                let g: Vec<Complex64> = phi.iter().zip(domain.basis(i)).map(|(p, e)| p * e).collect();
                let col = codomain.analyze(&g, grid)?;
                m.column_mut(i).copy_from_slice(&col.coords);
            }
            m
        }
        (Some(_), None) => {
            // ⟨φ e_i, f_j⟩ = conj ⟨conj(φ) f_j, e_i⟩
            let mut m = CMatrix::zeros(rows, cols);
            for j in 0..rows {
                let g: Vec<Complex64> = phi.iter().zip(codomain.basis(j)).map(|(p, f)| p.conj() * f).collect();
                let row = domain.analyze(&g, grid)?;
                for (i, z) in row.coords.iter().enumerate() {
                    m[(j, i)] = z.conj();
                }
            }
            m
        }
        (None, None) => {
            let n = grid.size() as f64;
            let mut m = CMatrix::zeros(rows, cols);
            for i in 0..cols {
                let g: Vec<Complex64> = phi.iter().zip(domain.basis(i)).map(|(p, e)| p * e).collect();
                for j in 0..rows {
                    m[(j, i)] = dot_conj(&g, codomain.basis(j)) / n;
                }
            }
            m
        }
    };
    Ok(OperatorMatrix::new(entries, domain.id(), codomain.id(), descriptor))
}

fn atom_route(
    phi: &[Complex64],
    dom_atoms: &[Atom],
    domain: &Frame,
    cod_atoms: &[Atom],
    codomain: &Frame,
    grid: &CircleGrid,
) -> Result<CMatrix> {
    let mut tables: [[Option<Vec<Complex64>>; 2]; 2] = Default::default();
    let slot = |w: Weight| match w {
        Weight::One => 0,
        Weight::Theta => 1,
    };
    for a in dom_atoms {
        for b in cod_atoms {
            let (p, q) = (slot(a.weight), slot(b.weight));
            if tables[p][q].is_some() {
                continue;
            }
            let mut h = phi.to_vec();
            if p == 1 {
                let t = domain.theta_samples().expect("θ-weighted atoms carry θ samples");
                h.iter_mut().zip(t).for_each(|(h, t)| *h *= t);
            }
            if q == 1 {
                let t = codomain.theta_samples().expect("θ-weighted atoms carry θ samples");
                h.iter_mut().zip(t).for_each(|(h, t)| *h *= t.conj());
            }
            tables[p][q] = Some(grid.fourier(&h)?);
        }
    }
    Ok(CMatrix::from_fn(cod_atoms.len(), dom_atoms.len(), |j, i| {
        let (a, b) = (dom_atoms[i], cod_atoms[j]);
        tables[slot(a.weight)][slot(b.weight)].as_ref().expect("table filled above")[grid.bin(b.freq - a.freq)]
    }))
}

/// The model basis and truncated dual frame of one `θ`, shared across the
/// four blocks of `M_φ`.
#[derive(Debug, Clone)]
pub struct BlockFrames {
    grid: CircleGrid,
    theta: BlaschkeProduct,
    model: Frame,
    dual: Frame,
}

impl BlockFrames {
    pub fn new(theta: &BlaschkeProduct, truncation: Truncation, grid: &CircleGrid) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            theta: theta.clone(),
            model: Frame::model_basis(theta, grid)?,
            dual: Frame::dual_frame(theta, truncation, grid)?,
        })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn model(&self) -> &Frame {
        &self.model
    }

    pub fn dual(&self) -> &Frame {
        &self.dual
    }

    /// `A_φ` on `K_θ`.
    pub fn a(&self, phi: &SymbolSpec) -> Result<OperatorMatrix> {
        compress(phi, &self.model, &self.model, &self.grid)
    }

    /// `B_φ : K_θ → K_θ^⊥`.
    pub fn b(&self, phi: &SymbolSpec) -> Result<OperatorMatrix> {
        compress(phi, &self.model, &self.dual, &self.grid)
    }

    /// `C_φ : K_θ^⊥ → K_θ`.
    pub fn c(&self, phi: &SymbolSpec) -> Result<OperatorMatrix> {
        compress(phi, &self.dual, &self.model, &self.grid)
    }

    /// `D_φ` on the window of `K_θ^⊥`.
    pub fn d(&self, phi: &SymbolSpec) -> Result<OperatorMatrix> {
        compress(phi, &self.dual, &self.dual, &self.grid)
    }

    /// `M_φ = [[A, C], [B, D]]` assembled from the four blocks.
    pub fn block(&self, phi: &SymbolSpec) -> Result<OperatorMatrix> {
        let values = phi.samples(&self.grid)?;
        let label = phi.to_string();
        let blk = |dom: &Frame, cod: &Frame| compress_values(&values, label.clone(), dom, cod, &self.grid);
        let a = blk(&self.model, &self.model)?;
        let b = blk(&self.model, &self.dual)?;
        let c = blk(&self.dual, &self.model)?;
        let d = blk(&self.dual, &self.dual)?;
        let (n, w) = (self.model.dimension(), self.dual.dimension());
        let mut m = CMatrix::zeros(n + w, n + w);
        m.view_mut((0, 0), (n, n)).copy_from(a.entries());
        m.view_mut((0, n), (n, w)).copy_from(c.entries());
        m.view_mut((n, 0), (w, n)).copy_from(b.entries());
        m.view_mut((n, n), (w, w)).copy_from(d.entries());
        let id = Frame::stack(&self.model, &self.dual)?.id();
        Ok(OperatorMatrix::new(m, id, id, format!("block({label})")))
    }

    /// The concatenated frame `model ⊕ dual` on which [`block`](Self::block) acts.
    pub fn stacked(&self) -> Result<Frame> {
        Frame::stack(&self.model, &self.dual)
    }
}

/// `A_φ` on `K_θ`.
pub fn tto(phi: &SymbolSpec, theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<OperatorMatrix> {
    let model = Frame::model_basis(theta, grid)?;
    compress(phi, &model, &model, grid)
}

/// Finite section of `D_φ` on the dual-frame window.
pub fn dtto(
    phi: &SymbolSpec,
    theta: &BlaschkeProduct,
    truncation: Truncation,
    grid: &CircleGrid,
) -> Result<OperatorMatrix> {
    let dual = Frame::dual_frame(theta, truncation, grid)?;
    compress(phi, &dual, &dual, grid)
}

/// `B_φ : K_θ → K_θ^⊥`, rows in dual-frame order.
pub fn tho(
    phi: &SymbolSpec,
    theta: &BlaschkeProduct,
    truncation: Truncation,
    grid: &CircleGrid,
) -> Result<OperatorMatrix> {
    BlockFrames::new(theta, truncation, grid)?.b(phi)
}

/// `C_φ : K_θ^⊥ → K_θ`.
pub fn dtho(
    phi: &SymbolSpec,
    theta: &BlaschkeProduct,
    truncation: Truncation,
    grid: &CircleGrid,
) -> Result<OperatorMatrix> {
    BlockFrames::new(theta, truncation, grid)?.c(phi)
}

/// Finite section of `T_φ` on `1 .. z^{n-1}`.
pub fn toeplitz(phi: &SymbolSpec, n: usize, grid: &CircleGrid) -> Result<OperatorMatrix> {
    let sec = Frame::analytic_section(n, grid)?;
    compress(phi, &sec, &sec, grid)
}

/// Finite section of `H_φ : H² → H²^⊥` from `1 .. z^{n-1}` to `z^{-1} .. z^{-m}`.
pub fn hankel(phi: &SymbolSpec, n: usize, m: usize, grid: &CircleGrid) -> Result<OperatorMatrix> {
    let dom = Frame::analytic_section(n, grid)?;
    let cod = Frame::antianalytic_section(m, grid)?;
    compress(phi, &dom, &cod, grid)
}

pub fn block_assemble(
    phi: &SymbolSpec,
    theta: &BlaschkeProduct,
    truncation: Truncation,
    grid: &CircleGrid,
) -> Result<OperatorMatrix> {
    BlockFrames::new(theta, truncation, grid)?.block(phi)
}

/// `S_θ = A_z`.
pub fn compressed_shift(theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<OperatorMatrix> {
    tto(&SymbolSpec::monomial(1), theta, grid)
}

/// Matrix of `Cf = θ conj(z f)` in a model basis or a dual frame of `θ`.
/// A dual frame must have `pos_count = neg_count`, which is exactly when
/// the truncated span is mapped into itself.
pub fn conjugation_on(frame: &Frame, theta: &BlaschkeProduct, grid: &CircleGrid) -> Result<Conjugation> {
    frame.check_grid(grid)?;
    match frame.kind() {
        FrameKind::ModelBasis | FrameKind::DualFrame => {}
        other => {
            return Err(LabError::FrameKind(format!("conjugation needs a model basis or dual frame, got {other:?}")))
        }
    }
    if frame.theta() != Some(theta) {
        return Err(LabError::FrameMismatch("frame was built for a different θ".into()));
    }
    if let Some(t) = frame.truncation() {
        if t.pos != t.neg {
            return Err(LabError::Size(format!(
                "conjugation on a dual frame needs pos_count = neg_count, got {} and {}",
                t.pos, t.neg
            )));
        }
    }
    let t = theta.samples(grid.nodes());
    let d = frame.dimension();
    let mut u = CMatrix::zeros(d, d);
    for i in 0..d {
        let ce: Vec<Complex64> =
            grid.nodes().iter().zip(frame.basis(i)).zip(&t).map(|((z, e), t)| t * (z * e).conj()).collect();
        let col = frame.analyze(&ce, grid)?;
        u.column_mut(i).copy_from_slice(&col.coords);
    }
    Ok(Conjugation { matrix: u, frame: frame.id() })
}

/// Right-hand side of `B_φ = H_φ H_θ̄* H_θ̄ + M_θ H_φ̄* H_θ̄` on `K_θ`, built
/// from Hankel sections of length `section` and written in dual-frame
/// coordinates.
pub fn tho_hankel_form(phi: &SymbolSpec, frames: &BlockFrames, section: usize) -> Result<OperatorMatrix> {
    let grid = frames.grid();
    let truncation = frames.dual().truncation().expect("dual frame has a truncation");
    if section < truncation.pos.max(truncation.neg) {
        return Err(LabError::Size(format!("hankel section {section} is shorter than the window")));
    }
    let analytic = Frame::analytic_section(section, grid)?;
    let taylor = compress(&SymbolSpec::constant(Complex64::new(1.0, 0.0)), frames.model(), &analytic, grid)?;
    let theta_bar = SymbolSpec::uv_bar(frames.theta().clone(), BlaschkeProduct::one());
    let h_tb = hankel(&theta_bar, section, section, grid)?.into_entries();
    let h_phi = hankel(phi, section, section, grid)?.into_entries();
    let h_phi_bar = hankel(&phi.conj(), section, section, grid)?.into_entries();
    let g = &h_tb * taylor.entries();
    let neg = &h_phi * (h_tb.adjoint() * &g);
    let pos = h_phi_bar.adjoint() * &g;
    let (p, n, d) = (truncation.pos, truncation.neg, frames.model().dimension());
    let mut m = CMatrix::zeros(p + n, d);
    m.view_mut((0, 0), (p, d)).copy_from(&pos.rows(0, p));
    m.view_mut((p, 0), (n, d)).copy_from(&neg.rows(0, n));
    Ok(OperatorMatrix::new(m, frames.model().id(), frames.dual().id(), format!("hankel_form({phi})")))
}

#[cfg(test)]
mod tests;
