//! Weighted Orlicz sequence spaces and the `W ∩ Fl` norm of a symbol.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::nfunction::NFunction;
use crate::scalar::{ComplexExt, Real};
use crate::symbol::FourierSymbol;
use crate::weights::{WeightSeq, DEFAULT_HORIZON};

/// Relative bracket width at which the Luxemburg bisection stops.
pub const LUXEMBURG_REL_WIDTH: f64 = 1e-12;

/// Which indices a sequence runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSet {
    /// `k >= 1`.
    Natural,
    /// `k >= 0`.
    NonNegative,
}

impl IndexSet {
    pub fn first(self) -> usize {
        match self {
            Self::Natural => 1,
            Self::NonNegative => 0,
        }
    }
}

/// `l^Phi_w(I)`: sequences with `sum Phi(|c_k| w_k / lambda)` finite.
#[derive(Debug, Clone, PartialEq)]
pub struct OrliczSpaceSpec {
    pub nfunction: NFunction,
    pub weight: WeightSeq,
    pub index_set: IndexSet,
}

impl OrliczSpaceSpec {
    pub fn new(nfunction: NFunction, weight: WeightSeq, index_set: IndexSet) -> Self {
        Self { nfunction, weight, index_set }
    }

    /// `|c_k| w_k` for a sequence whose `i`-th entry has index `first + i`.
    fn weighted(&self, moduli: &[f64]) -> Result<Vec<f64>> {
        let first = self.index_set.first();
        moduli.iter().enumerate().map(|(i, m)| Ok(m * self.weight.value(first + i)?)).collect()
    }

    /// `sum Phi(x_k / lambda)`; arguments beyond a tabulated range count as infinite.
    fn modular_of_weighted(&self, weighted: &[f64], lambda: f64) -> f64 {
        let mut total = 0.0;
        for x in weighted {
            if *x == 0.0 {
                continue;
            }
            match self.nfunction.phi_value(x / lambda) {
                Ok(v) => total += v,
                Err(_) => return f64::INFINITY,
            }
        }
        total
    }

    /// Modular of a complex sequence indexed from `index_set.first()`.
    pub fn modular<T: Real>(&self, c: &[Complex<T>], lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("modular needs lambda > 0, got {lambda}")));
        }
        let w = self.weighted(&moduli(c))?;
        Ok(self.modular_of_weighted(&w, lambda))
    }

    pub fn luxemburg_norm<T: Real>(&self, c: &[Complex<T>]) -> Result<f64> {
        self.luxemburg_of_moduli(&moduli(c))
    }

    fn luxemburg_of_moduli(&self, moduli: &[f64]) -> Result<f64> {
        let w = self.weighted(moduli)?;
        let sum: f64 = w.iter().sum();
        if sum == 0.0 {
            return Ok(0.0);
        }
        let f = &self.nfunction;
        let level = f.phi_value(f.t_max()).map_or(1.0, |top| top.min(1.0));
        let u = f.phi_inverse(level)?;
        let mut hi = sum * (1.0f64).max(1.0 / u);
        let mut lo = hi;
        while self.modular_of_weighted(&w, lo) <= 1.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(hi);
            }
        }
        while hi - lo > LUXEMBURG_REL_WIDTH * hi {
            let mid = 0.5 * (lo + hi);
            if self.modular_of_weighted(&w, mid) <= 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

fn moduli<T: Real>(c: &[Complex<T>]) -> Vec<f64> {
    c.iter().map(|z| z.modulus().to_f64()).collect()
}

/// `Fl^{Phi,Psi}_{phi,psi}`: negative-index coefficients measured in
/// `l^Phi_phi(N)`, nonnegative ones in `l^Psi_psi(Z+)`.
#[derive(Debug, Clone)]
pub struct FlSpace {
    pub minus: OrliczSpaceSpec,
    pub plus: OrliczSpaceSpec,
    constants: OnceLock<Result<(f64, f64)>>,
}

impl PartialEq for FlSpace {
    fn eq(&self, other: &Self) -> bool {
        self.minus == other.minus && self.plus == other.plus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlNormReport {
    pub wiener: f64,
    pub minus_part: f64,
    pub plus_part: f64,
    pub total: f64,
}

impl FlNormReport {
    /// The `Fl` part alone, without the Wiener norm.
    pub fn fl(&self) -> f64 {
        self.minus_part + self.plus_part
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMembership {
    pub modular_sum: f64,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl FlSpace {
    pub fn new(big_phi: NFunction, big_psi: NFunction, phi: WeightSeq, psi: WeightSeq) -> Self {
        Self {
            minus: OrliczSpaceSpec::new(big_phi, phi, IndexSet::Natural),
            plus: OrliczSpaceSpec::new(big_psi, psi, IndexSet::NonNegative),
            constants: OnceLock::new(),
        }
    }

    /// The space with the roles of `(Phi, phi)` and `(Psi, psi)` exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.plus.nfunction.clone(), self.minus.nfunction.clone(), self.plus.weight.clone(), self.minus.weight.clone())
    }

    fn halves<T: Real>(a: &FourierSymbol<T>) -> (Vec<f64>, Vec<f64>) {
        let r = a.radius() as i64;
        let minus = (1..=r).map(|k| a.coeff(-k).modulus().to_f64()).collect();
        let plus = (0..=r).map(|k| a.coeff(k).modulus().to_f64()).collect();
        (minus, plus)
    }

    pub fn fl_norm<T: Real>(&self, a: &FourierSymbol<T>) -> Result<FlNormReport> {
        let (m, p) = Self::halves(a);
        let wiener = a.wiener_norm().to_f64();
        let minus_part = self.minus.luxemburg_of_moduli(&m)?;
        let plus_part = self.plus.luxemburg_of_moduli(&p)?;
        Ok(FlNormReport { wiener, minus_part, plus_part, total: wiener + minus_part + plus_part })
    }

    /// The modular sum at `lambda = 1`.
    pub fn class_membership<T: Real>(&self, a: &FourierSymbol<T>) -> Result<ClassMembership> {
        let (m, p) = Self::halves(a);
        let s = self.minus.modular_of_weighted(&self.minus.weighted(&m)?, 1.0)
            + self.plus.modular_of_weighted(&self.plus.weighted(&p)?, 1.0);
        Ok(ClassMembership { modular_sum: s, member: s.is_finite() })
    }

    /// `||a - a^(n)||_Fl` for each `n`.
    pub fn tail_norm_series<T: Real>(&self, a: &FourierSymbol<T>, n_list: &[usize]) -> Result<Vec<f64>> {
        n_list
            .iter()
            .map(|&n| {
                let tail = a - &a.truncate(n);
                Ok(self.fl_norm(&tail)?.fl())
            })
            .collect()
    }

    /// Doubling constants `(C_phi, C_psi)` of the two weights.
    pub fn class_constants(&self) -> Result<(f64, f64)> {
        self.constants
            .get_or_init(|| Ok((class_constant(&self.minus.weight, "phi")?, class_constant(&self.plus.weight, "psi")?)))
            .clone()
    }

    /// `||ab|| <= (1 + 2 C_phi + 2 C_psi) ||a|| ||b||` in `W ∩ Fl`.
    pub fn algebra_bound_check<T: Real>(&self, a: &FourierSymbol<T>, b: &FourierSymbol<T>) -> Result<AlgebraBound> {
        let (c_phi, c_psi) = self.class_constants()?;
        let lhs = self.fl_norm(&a.multiply(b))?.total;
        let rhs = (1.0 + 2.0 * c_phi + 2.0 * c_psi) * self.fl_norm(a)?.total * self.fl_norm(b)?.total;
        Ok(AlgebraBound { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
    }
}

fn class_constant(w: &WeightSeq, which: &'static str) -> Result<f64> {
    let report = w.class_w_check(DEFAULT_HORIZON)?;
    if !report.member {
        let k = report.first_violation.unwrap_or(0);
        let reason = if k == 0 { "nu_0 != 1".to_string() } else { format!("decreases at index {k}") };
        return Err(Error::WeightNotInW { which, reason });
    }
    Ok(report.constant())
}
