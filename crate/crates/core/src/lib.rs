//! Numerical laboratory for truncated Toeplitz operators (TTOs) and dual
//! truncated Toeplitz operators (DTTOs) on model spaces `K_θ = H² ⊖ θH²` of
//! finite Blaschke products.
//!
//! The crate is organised bottom-up:
//!
//! * [`blaschke`]: exact algebra of finite Blaschke products.
//! * [`frames`]: quadrature on the circle and orthonormal coordinate systems
//!   (Takenaka–Malmquist basis of `K_θ`, truncated frame of `K_θ^⊥`, monomial
//!   sections of `H²` and `H²^⊥`).
//! * [`operators`]: compressions of multiplication operators between frames
//!   (`A_φ`, `B_φ`, `C_φ`, `D_φ`, `T_φ`, `H_φ`, the block `M_φ`) and the
//!   conjugation `Cf = θ·conj(z f)`.
//! * [`analysis`]: partial-isometry defects, kernel / initial / extremal
//!   subspaces, predicted subspaces, principal angles and Sedlock symbols.
//! * [`harness`]: seeded experiments E1–E11 with JSON reports.

pub mod analysis;
pub mod blaschke;
pub mod error;
pub mod frames;
pub mod harness;
pub mod linalg;
pub mod operators;

pub use num_complex::Complex64;

pub use analysis::{PiVerdict, Subspace};
pub use blaschke::BlaschkeProduct;
pub use error::{LabError, Result};
pub use frames::{CircleGrid, CoefVector, Frame, FrameId, FrameKind, Half, Truncation};
pub use operators::{Conjugation, OperatorMatrix, SymbolSpec};
