use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::blaschke::{parse_complex, BlaschkeProduct};
use crate::error::{LabError, Result};
use crate::frames::{CircleGrid, Frame};

/// Smallest admissible `|1 - α conj(θ)|` on the grid.
pub const DIVISION_GUARD: f64 = 1e-6;

/// A bounded symbol `φ ∈ L^∞(𝕋)`, evaluated on demand at grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// `conj(u) · v`.
    UvBar {
        u: BlaschkeProduct,
        v: BlaschkeProduct,
    },
    /// `Σ coeffs[k] z^{lowest + k}`.
    Laurent {
        lowest: i64,
        coeffs: Vec<Complex64>,
    },
    /// `φ + conj(α S_θ φ̃) + c` for `φ ∈ K_θ` given in model-basis coordinates.
    Sedlock {
        theta: BlaschkeProduct,
        phi: Vec<Complex64>,
        alpha: Complex64,
        c: Complex64,
    },
    /// `θ h₁ + conj(θ h₂)` with polynomial `h₁, h₂` (ascending coefficients).
    ZeroSymbol {
        theta: BlaschkeProduct,
        h1: Vec<Complex64>,
        h2: Vec<Complex64>,
    },
    /// `ψ / (1 - α conj(θ))`.
    AlphaSymbol {
        psi: Box<SymbolSpec>,
        alpha: Complex64,
        theta: BlaschkeProduct,
    },
    Product(Box<SymbolSpec>, Box<SymbolSpec>),
    Conj(Box<SymbolSpec>),
}

impl SymbolSpec {
    pub fn uv_bar(u: BlaschkeProduct, v: BlaschkeProduct) -> Self {
        Self::UvBar { u, v }
    }

    /// The inner function `v` itself.
    pub fn inner(v: BlaschkeProduct) -> Self {
        Self::UvBar { u: BlaschkeProduct::one(), v }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::Laurent { lowest: 0, coeffs: vec![c] }
    }

    pub fn monomial(k: i64) -> Self {
        Self::Laurent { lowest: k, coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    /// Coefficients `c_{-m} .. c_m`; the list must have odd length.
    pub fn laurent(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(LabError::Domain(format!(
                "laurent coefficient list c_-m..c_m needs odd length, got {}",
                coeffs.len()
            )));
        }
        let m = (coeffs.len() / 2) as i64;
        Ok(Self::Laurent { lowest: -m, coeffs })
    }

    pub fn zero_symbol(theta: BlaschkeProduct, h1: Vec<Complex64>, h2: Vec<Complex64>) -> Self {
        Self::ZeroSymbol { theta, h1, h2 }
    }

    pub fn alpha_symbol(psi: SymbolSpec, alpha: Complex64, theta: BlaschkeProduct) -> Result<Self> {
        if alpha.norm().is_nan() || alpha.norm() >= 1.0 {
            return Err(LabError::Domain(format!("alpha symbol needs |α| < 1, got |α| = {}", alpha.norm())));
        }
        Ok(Self::AlphaSymbol { psi: Box::new(psi), alpha, theta })
    }

    pub fn times(self, other: SymbolSpec) -> Self {
        Self::Product(Box::new(self), Box::new(other))
    }

    /// `conj(φ)`, simplified where the form allows it.
    pub fn conj(&self) -> Self {
        match self {
            Self::UvBar { u, v } => Self::UvBar { u: v.clone(), v: u.clone() },
            Self::Laurent { lowest, coeffs } => Self::Laurent {
                lowest: -(lowest + coeffs.len() as i64 - 1),
                coeffs: coeffs.iter().rev().map(|c| c.conj()).collect(),
            },
            Self::Conj(inner) => (**inner).clone(),
            Self::Product(a, b) => Self::Product(Box::new(a.conj()), Box::new(b.conj())),
            other => Self::Conj(Box::new(other.clone())),
        }
    }

    /// Values at the grid nodes.
    pub fn samples(&self, grid: &CircleGrid) -> Result<Vec<Complex64>> {
        let nodes = grid.nodes();
        match self {
            Self::UvBar { u, v } => {
                let us = u.samples(nodes);
                let vs = v.samples(nodes);
                Ok(us.iter().zip(&vs).map(|(u, v)| u.conj() * v).collect())
            }
            Self::Laurent { lowest, coeffs } => {
                let mut out = vec![Complex64::new(0.0, 0.0); grid.size()];
                for (k, &c) in coeffs.iter().enumerate() {
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, m) in out.iter_mut().zip(grid.monomial(lowest + k as i64)) {
                        *o += c * m;
                    }
                }
                Ok(out)
            }
            Self::Sedlock { theta, phi, alpha, c } => {
                let model = Frame::model_basis(theta, grid)?;
                let conj = super::conjugation_on(&model, theta, grid)?;
                let shift = super::compressed_shift(theta, grid)?;
                let tilde = conj.apply(phi)?;
                let shifted: Vec<Complex64> =
                    (shift.entries() * nalgebra::DVector::from_vec(tilde)).iter().map(|x| alpha * x).collect();
                let f = model.combine(phi)?;
                let g = model.combine(&shifted)?;
                Ok(f.iter().zip(&g).map(|(f, g)| f + g.conj() + c).collect())
            }
            Self::ZeroSymbol { theta, h1, h2 } => {
                let t = theta.samples(nodes);
                Ok(nodes.iter().zip(&t).map(|(z, t)| t * horner(h1, *z) + (t * horner(h2, *z)).conj()).collect())
            }
            Self::AlphaSymbol { psi, alpha, theta } => {
                let p = psi.samples(grid)?;
                let t = theta.samples(nodes);
                let one = Complex64::new(1.0, 0.0);
                let denom: Vec<Complex64> = t.iter().map(|t| one - alpha * t.conj()).collect();
                let smallest = denom.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
                if smallest < DIVISION_GUARD {
                    return Err(LabError::DivisionGuard(smallest));
                }
                Ok(p.iter().zip(&denom).map(|(p, d)| p / d).collect())
            }
            Self::Product(a, b) => {
                let a = a.samples(grid)?;
                let b = b.samples(grid)?;
                Ok(a.iter().zip(&b).map(|(a, b)| a * b).collect())
            }
            Self::Conj(inner) => Ok(inner.samples(grid)?.iter().map(|z| z.conj()).collect()),
        }
    }

    /// Geometric decay rate of the Fourier tails; zero for trigonometric
    /// polynomials.
    pub fn tail_radius(&self) -> f64 {
        match self {
            Self::UvBar { u, v } => u.tail_radius().max(v.tail_radius()),
            Self::Laurent { .. } => 0.0,
            Self::Sedlock { theta, .. } | Self::ZeroSymbol { theta, .. } => theta.tail_radius(),
            Self::AlphaSymbol { psi, alpha, theta } => {
                let geometric = if theta.is_constant() { 0.0 } else { alpha.norm().powf(1.0 / theta.degree() as f64) };
                psi.tail_radius().max(theta.tail_radius()).max(geometric)
            }
            Self::Product(a, b) => a.tail_radius().max(b.tail_radius()),
            Self::Conj(inner) => inner.tail_radius(),
        }
    }

    /// Total number of Blaschke factors and monomial degree in the symbol.
    pub fn degree(&self) -> usize {
        match self {
            Self::UvBar { u, v } => u.degree() + v.degree(),
            Self::Laurent { lowest, coeffs } => {
                lowest.unsigned_abs().max((lowest + coeffs.len() as i64 - 1).unsigned_abs()) as usize
            }
            Self::Sedlock { theta, .. } => theta.degree(),
            Self::ZeroSymbol { theta, h1, h2 } => theta.degree() + h1.len().max(h2.len()),
            Self::AlphaSymbol { psi, theta, .. } => psi.degree() + theta.degree(),
            Self::Product(a, b) => a.degree() + b.degree(),
            Self::Conj(inner) => inner.degree(),
        }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn fmt_list(f: &mut fmt::Formatter<'_>, xs: &[Complex64]) -> fmt::Result {
    for (k, x) in xs.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&crate::blaschke::format_complex(*x))?;
    }
    Ok(())
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UvBar { u, v } => write!(f, "uv_bar(u: {u}; v: {v})"),
            Self::Laurent { lowest, coeffs } => {
                write!(f, "laurent(lowest={lowest}: ")?;
                fmt_list(f, coeffs)?;
                f.write_str(")")
            }
            Self::Sedlock { theta, phi, alpha, c } => {
                write!(f, "sedlock(theta: {theta}; phi: ")?;
                fmt_list(f, phi)?;
                write!(
                    f,
                    "; alpha={}; c={})",
                    crate::blaschke::format_complex(*alpha),
                    crate::blaschke::format_complex(*c)
                )
            }
            Self::ZeroSymbol { theta, h1, h2 } => {
                write!(f, "zero_symbol(theta: {theta}; h1: ")?;
                fmt_list(f, h1)?;
                f.write_str("; h2: ")?;
                fmt_list(f, h2)?;
                f.write_str(")")
            }
            Self::AlphaSymbol { psi, alpha, theta } => {
                write!(f, "alpha_symbol({psi}; alpha={}; theta: {theta})", crate::blaschke::format_complex(*alpha))
            }
            Self::Product(a, b) => write!(f, "({a})*({b})"),
            Self::Conj(inner) => write!(f, "conj({inner})"),
        }
    }
}

/// Command-line symbol grammar:
///
/// * `u:<blaschke>; v:<blaschke>` for `conj(u) v`, either part optional
///   (a missing or empty part is the constant 1);
/// * `laurent:c_-m, .., c_m`.
impl FromStr for SymbolSpec {
    type Err = LabError;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("laurent:") {
            let coeffs = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            return Self::laurent(coeffs);
        }
        let u_at = find_part(text, "u:");
        let v_at = find_part(text, "v:");
        if u_at.is_none() && v_at.is_none() {
            return Err(LabError::Parse(format!("symbol `{text}` needs a `u:`, `v:` or `laurent:` part")));
        }
        if u_at.is_some_and(|k| k != 0) && !v_at.is_some_and(|k| k == 0) {
            return Err(LabError::Parse(format!("unexpected text before the first part of `{text}`")));
        }
        let part = |start: Option<usize>, other: Option<usize>| -> Result<BlaschkeProduct> {
            let Some(s) = start else { return Ok(BlaschkeProduct::one()) };
            let end = other.filter(|&o| o > s).unwrap_or(text.len());
            let body = text[s + 2..end].trim().trim_end_matches(';');
            body.parse()
        };
        Ok(Self::UvBar { u: part(u_at, v_at)?, v: part(v_at, u_at)? })
    }
}

/// Position of `key` at the start of the text or right after a `;`.
fn find_part(text: &str, key: &str) -> Option<usize> {
    if text.starts_with(key) {
        return Some(0);
    }
    let mut from = 0;
    while let Some(k) = text[from..].find(';') {
        let after = from + k + 1;
        let trimmed = text[after..].trim_start();
        if trimmed.starts_with(key) {
            return Some(text.len() - trimmed.len());
        }
        from = after;
    }
    None
}
