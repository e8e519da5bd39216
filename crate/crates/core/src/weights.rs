//! Weight sequences `nu_k`, `k >= 0`, and the class W diagnostics:
//! `nu_0 = 1`, nondecreasing, and `nu_{2k} <= C nu_k`.

use crate::error::{Error, Result};

/// Default number of indices examined by the finite-horizon checks.
pub const DEFAULT_HORIZON: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSeq {
    /// `nu_k = (k + 1)^alpha`.
    Power(f64),
    /// Given values `nu_0 .. nu_{L-1}`.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassWReport {
    pub member: bool,
    /// `max nu_{2k} / nu_k` over the examined range.
    pub c_nu: f64,
    /// Exact doubling constant, known for the power family.
    pub c_nu_exact: Option<f64>,
    pub first_violation: Option<usize>,
    /// Largest index examined.
    pub horizon: usize,
}

impl ClassWReport {
    /// Constant to use in bounds: the exact one when known.
    pub fn constant(&self) -> f64 {
        self.c_nu_exact.unwrap_or(self.c_nu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    /// `max k / (phi_k psi_k)` over `0..=horizon`.
    pub max_ratio: f64,
    pub argmax: usize,
    /// Whether the supremum is finite, known for power pairs.
    pub bounded: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalSumReport {
    /// `sum_{j=1}^{horizon} 1 / (phi_j psi_j)`.
    pub partial: f64,
    pub convergent: Option<bool>,
}

impl WeightSeq {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("weight exponent must be >= 0, got {alpha}")));
        }
        Ok(Self::Power(alpha))
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("explicit weight needs at least one value".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive and finite".into()));
        }
        Ok(Self::Explicit(values))
    }

    /// `nu_k`.
    pub fn value(&self, k: usize) -> Result<f64> {
        match self {
            Self::Power(alpha) => Ok(((k + 1) as f64).powf(*alpha)),
            Self::Explicit(v) => v.get(k).copied().ok_or(Error::OutOfRange { x: k as f64, max: (v.len() - 1) as f64 }),
        }
    }

    /// Largest index the sequence can be evaluated at.
    pub fn last_index(&self) -> Option<usize> {
        match self {
            Self::Power(_) => None,
            Self::Explicit(v) => Some(v.len() - 1),
        }
    }

    fn clip(&self, horizon: usize) -> usize {
        self.last_index().map_or(horizon, |l| l.min(horizon))
    }

    pub fn class_w_check(&self, horizon: usize) -> Result<ClassWReport> {
        if horizon < 2 {
            return Err(Error::InvalidInput("class W check needs horizon >= 2".into()));
        }
        let h = self.clip(horizon);
        let mut first_violation = None;
        if self.value(0)? != 1.0 {
            first_violation = Some(0);
        }
        let mut prev = self.value(0)?;
        for k in 1..=h {
            let v = self.value(k)?;
            if first_violation.is_none() && v < prev {
                first_violation = Some(k);
            }
            prev = v;
        }
        let mut c_nu: f64 = 1.0;
        for k in 1..=h / 2 {
            c_nu = c_nu.max(self.value(2 * k)? / self.value(k)?);
        }
        let c_nu_exact = match self {
            Self::Power(alpha) => Some(2f64.powf(*alpha)),
            Self::Explicit(_) => None,
        };
        Ok(ClassWReport { member: first_violation.is_none(), c_nu, c_nu_exact, first_violation, horizon: h })
    }
}

pub fn pairing_constant(phi: &WeightSeq, psi: &WeightSeq, horizon: usize) -> Result<PairingReport> {
    if horizon < 1 {
        return Err(Error::InvalidInput("pairing constant needs horizon >= 1".into()));
    }
    let h = phi.clip(psi.clip(horizon));
    let mut max_ratio = 0.0;
    let mut argmax = 0;
    for k in 0..=h {
        let r = k as f64 / (phi.value(k)? * psi.value(k)?);
        if r > max_ratio {
            max_ratio = r;
            argmax = k;
        }
    }
    let bounded = match (phi, psi) {
        (WeightSeq::Power(a), WeightSeq::Power(b)) => Some(a + b >= 1.0),
        _ => None,
    };
    Ok(PairingReport { max_ratio, argmax, bounded })
}

pub fn reciprocal_sum(phi: &WeightSeq, psi: &WeightSeq, horizon: usize) -> Result<ReciprocalSumReport> {
    if horizon < 1 {
        return Err(Error::InvalidInput("reciprocal sum needs horizon >= 1".into()));
    }
    let h = phi.clip(psi.clip(horizon));
    let mut partial = 0.0;
    // smallest terms first
    for j in (1..=h).rev() {
        partial += 1.0 / (phi.value(j)? * psi.value(j)?);
    }
    let convergent = match (phi, psi) {
        (WeightSeq::Power(a), WeightSeq::Power(b)) => Some(a + b > 1.0),
        _ => None,
    };
    Ok(ReciprocalSumReport { partial, convergent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn class_w_examples() {
        let r = WeightSeq::power(0.0).unwrap().class_w_check(1000).unwrap();
        assert!(r.member);
        assert_eq!(r.c_nu, 1.0);
        let r = WeightSeq::power(1.0).unwrap().class_w_check(1000).unwrap();
        assert!(r.member);
        assert!(r.c_nu < 2.0 && r.c_nu > 1.99);
        assert_eq!(r.c_nu_exact, Some(2.0));
        let r = WeightSeq::explicit(vec![1.0, 0.5, 2.0]).unwrap().class_w_check(10).unwrap();
        assert!(!r.member);
        assert_eq!(r.first_violation, Some(1));
        let r = WeightSeq::explicit(vec![2.0, 3.0]).unwrap().class_w_check(10).unwrap();
        assert_eq!(r.first_violation, Some(0));
    }

    #[test]
    fn pairing_examples() {
        let half = WeightSeq::power(0.5).unwrap();
        let r = pairing_constant(&half, &half, 10_000).unwrap();
        assert!((r.max_ratio - 10_000.0 / 10_001.0).abs() < 1e-12);
        assert_eq!(r.bounded, Some(true));
        let r = pairing_constant(&WeightSeq::power(1.0).unwrap(), &WeightSeq::power(0.0).unwrap(), 10_000).unwrap();
        assert!((r.max_ratio - 10_000.0 / 10_001.0).abs() < 1e-12);
        assert_eq!(r.bounded, Some(true));
        let q = WeightSeq::power(0.25).unwrap();
        let r = pairing_constant(&q, &q, 10_000).unwrap();
        assert_eq!(r.bounded, Some(false));
        assert!(r.max_ratio > 90.0);
    }

    #[test]
    fn reciprocal_sum_examples() {
        let one = WeightSeq::power(1.0).unwrap();
        let r = reciprocal_sum(&one, &one, 100_000).unwrap();
        let basel = std::f64::consts::PI.powi(2) / 6.0 - 1.0;
        assert!((r.partial - basel).abs() < 1e-4);
        assert_eq!(r.convergent, Some(true));
        let half = WeightSeq::power(0.5).unwrap();
        assert_eq!(reciprocal_sum(&half, &half, 100).unwrap().convergent, Some(false));
        let zero = WeightSeq::power(0.0).unwrap();
        let r = reciprocal_sum(&zero, &zero, 100).unwrap();
        assert_eq!(r.convergent, Some(false));
        assert_eq!(r.partial, 100.0);
    }

    #[test]
    fn explicit_weights_are_finite_horizon() {
        let w = WeightSeq::explicit(vec![1.0, 1.5, 2.0, 2.5]).unwrap();
        assert_eq!(w.class_w_check(DEFAULT_HORIZON).unwrap().horizon, 3);
        assert!(w.value(4).is_err());
        assert!(WeightSeq::explicit(vec![1.0, 0.0]).is_err());
        assert!(WeightSeq::power(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn power_weights_belong_to_w(alpha in 0.0f64..4.0) {
            let r = WeightSeq::power(alpha).unwrap().class_w_check(4096).unwrap();
            prop_assert!(r.member);
            prop_assert!(r.c_nu >= 1.0);
            prop_assert!(r.c_nu <= 2f64.powf(alpha) + 1e-12);
        }
    }
}
