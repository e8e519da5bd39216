//! Toeplitz determinant asymptotics for symbols with nonzero winding.
//!
//! The pipeline: build a [`FourierSymbol`], factor it with
//! [`factorization::wiener_hopf`], predict `D_n[a t^kappa]` with
//! [`asymptotics::winding_prediction`] and compare against exact LU
//! determinants from [`toeplitz`]. Coefficient decay classes are measured with
//! the weighted Orlicz norms in [`orlicz`].
//!
//! Everything numerical is generic over [`Real`]; the aliases below fix the
//! scalar to `f32`, `f64` or 256-bit [`Mp256`].

pub mod asymptotics;
pub mod error;
pub mod factorization;
pub mod fft;
pub mod linalg;
pub mod mp;
pub mod nfunction;
pub mod orlicz;
pub mod scalar;
pub mod symbol;
pub mod toeplitz;
pub mod weights;

pub use error::{Error, Result};
pub use factorization::WienerHopfFactors;
pub use linalg::{LogDet, Matrix};
pub use mp::{Mp256, MpFloat};
pub use scalar::{ComplexExt, Real};
pub use symbol::FourierSymbol;

pub type Symbol32 = FourierSymbol<f32>;
pub type Symbol64 = FourierSymbol<f64>;
pub type SymbolMp = FourierSymbol<Mp256>;

pub type Factors64 = WienerHopfFactors<f64>;
pub type FactorsMp = WienerHopfFactors<Mp256>;

pub type Matrix64 = Matrix<f64>;
pub type MatrixMp = Matrix<Mp256>;
