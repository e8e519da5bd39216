//! Predicted values of `D_n(a)` and `D_n[a t^kappa]` from the Wiener-Hopf
//! factors, and the measured remainders against exact determinants.

use std::borrow::Cow;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factorization::{wiener_hopf, WienerHopfFactors};
use crate::linalg::{LogDet, Matrix};
use crate::scalar::{ComplexExt, Real};
use crate::toeplitz::{corner_leading_block, corner_minor, log_det, shifted_log_det, Corner};
use crate::weights::WeightSeq;

#[derive(Debug, Clone)]
pub struct Prediction<T: Real> {
    pub n: usize,
    pub kappa: i64,
    /// The full predicted value.
    pub leading: Complex<T>,
    /// `(-1)^{(n+|kappa|)|kappa|}`.
    pub sign: i8,
    /// `G(a)^{n+1}`.
    pub g_power: Complex<T>,
    pub e_const: Complex<T>,
    /// `G(b)^kappa` for `kappa > 0`, `G(c)^{|kappa|}` for `kappa < 0`.
    pub index_factor: Complex<T>,
    /// Determinant of the `|kappa| x |kappa|` correction matrix.
    pub correction_det: Complex<T>,
    /// `log(G(a)^{n+1} E(a))`.
    pub log_scale: Complex<T>,
}

impl<T: Real> Prediction<T> {
    /// `log(leading)` without materializing `G(a)^{n+1}`; `-inf` modulus when the prediction is zero.
    pub fn log_leading(&self) -> (T, T) {
        let tail = self.index_factor.clone() * self.correction_det.clone() * T::from_f64(self.sign as f64);
        if tail.is_zero() {
            return (T::neg_infinity(), T::zero());
        }
        let l = self.log_scale.clone() + tail.clog();
        (l.re, l.im.wrap_angle())
    }
}

/// `G(a)^{n+1} E(a)`, formed in log space.
pub fn szego_prediction<T: Real>(factors: &WienerHopfFactors<T>, n: usize) -> Complex<T> {
    factors.log_szego_scale(n).cexp()
}

/// `G(b) = G(a)/G(a_+)^2` and `G(c) = G(a)/G(a_-)^2`.
fn index_constants<T: Real>(factors: &WienerHopfFactors<T>) -> (Complex<T>, Complex<T>) {
    let gp = factors.a_plus.coeff(0);
    let gm = factors.a_minus.coeff(0);
    (factors.g_const.clone() / (gp.clone() * gp), factors.g_const.clone() / (gm.clone() * gm))
}

/// Refactors once at twice the radius when `b`, `c` do not reach index `needed`.
pub fn ensure_radius<T: Real>(factors: &WienerHopfFactors<T>, needed: usize) -> Result<Cow<'_, WienerHopfFactors<T>>> {
    if factors.out_radius >= needed {
        return Ok(Cow::Borrowed(factors));
    }
    let bigger = wiener_hopf(&factors.symbol, 2 * factors.out_radius, factors.tol)?;
    if bigger.out_radius >= needed {
        Ok(Cow::Owned(bigger))
    } else {
        Err(Error::RadiusTooSmall { needed, have: bigger.out_radius })
    }
}

/// Entry `(i, j)`: `b_{n+1+i-j}` for `kappa < 0`, `c_{-n-1-i+j}` for `kappa > 0`.
pub fn correction_matrix<T: Real>(factors: &WienerHopfFactors<T>, n: usize, kappa: i64) -> Result<Matrix<T>> {
    if kappa == 0 {
        return Err(Error::InvalidInput("correction matrix needs kappa != 0".into()));
    }
    let size = kappa.unsigned_abs() as usize;
    let f = ensure_radius(factors, n + size)?;
    let base = n as i64 + 1;
    Ok(Matrix::from_fn(size, size, |i, j| {
        let d = i as i64 - j as i64;
        if kappa < 0 {
            f.b.coeff(base + d)
        } else {
            f.c.coeff(-base - d)
        }
    }))
}

/// Leading asymptotics of `D_n[a t^kappa]`.
pub fn winding_prediction<T: Real>(factors: &WienerHopfFactors<T>, n: usize, kappa: i64) -> Result<Prediction<T>> {
    let size = kappa.unsigned_abs() as usize;
    let f = ensure_radius(factors, n + size)?;
    let correction_det = correction_matrix(&f, n, kappa)?.determinant();
    let (g_b, g_c) = index_constants(&f);
    let index_factor = if kappa > 0 { g_b } else { g_c }.powu(size as u32);
    let sign: i8 = if ((n + size) * size) % 2 == 1 { -1 } else { 1 };
    let log_scale = f.log_szego_scale(n);
    let g_power = (f.log_g() * T::from_usize(n + 1)).cexp();
    let e_const = f.e_const.clone();
    let leading = log_scale.cexp() * index_factor.clone() * correction_det.clone() * T::from_f64(sign as f64);
    Ok(Prediction { n, kappa, leading, sign, g_power, e_const, index_factor, correction_det, log_scale })
}

#[derive(Debug, Clone)]
pub struct RemainderSeries<T: Real> {
    pub kappa: i64,
    pub n_values: Vec<usize>,
    /// `D_n[a t^kappa]` from LU.
    pub exact: Vec<LogDet<T>>,
    /// `None` for `kappa = 0`, where the prediction is `G^{n+1} E`.
    pub predicted: Vec<Option<Prediction<T>>>,
    /// `delta_1(n)` for `kappa = 0`, `rho(n)` otherwise.
    pub delta: Vec<f64>,
    /// `psi_n rho(n)` (`kappa < 0`) or `phi_n rho(n)` (`kappa > 0`).
    pub normalized: Vec<f64>,
    /// `phi_m psi_m^2 rho(n)` at `m = n + |kappa| + 1`.
    pub alt_normalized: Vec<f64>,
    pub below_floor: Vec<bool>,
    /// Slope of `log delta` against `log n` over points above the floor.
    pub fitted_exponent: Option<f64>,
    /// Same fit for `|det(correction matrix)|`.
    pub correction_exponent: Option<f64>,
    pub noise_floor_hits: usize,
    pub floor: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_log(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Exact determinants against predictions along `n_list`; fails with
/// [`Error::AllBelowNoiseFloor`] when no point is usable for a fit.
pub fn remainder_series<T: Real>(
    factors: &WienerHopfFactors<T>,
    kappa: i64,
    n_list: &[usize],
    phi: &WeightSeq,
    psi: &WeightSeq,
) -> Result<RemainderSeries<T>> {
    let out = remainder_table(factors, kappa, n_list, phi, psi)?;
    if out.noise_floor_hits == n_list.len() && out.delta.iter().any(|d| *d > 0.0) {
        return Err(Error::AllBelowNoiseFloor { points: n_list.len() });
    }
    Ok(out)
}

/// [`remainder_series`] without the noise-floor check, for callers that
/// report partial tables.
pub fn remainder_table<T: Real>(
    factors: &WienerHopfFactors<T>,
    kappa: i64,
    n_list: &[usize],
    phi: &WeightSeq,
    psi: &WeightSeq,
) -> Result<RemainderSeries<T>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("n_list must be nonempty and strictly increasing".into()));
    }
    let size = kappa.unsigned_abs() as usize;
    let top = *n_list.last().unwrap_or(&0);
    let f = if kappa == 0 { Cow::Borrowed(factors) } else { ensure_radius(factors, top + size)? };
    let floor = T::noise_floor().to_f64();
    let mut out = RemainderSeries {
        kappa,
        n_values: n_list.to_vec(),
        exact: Vec::with_capacity(n_list.len()),
        predicted: Vec::with_capacity(n_list.len()),
        delta: Vec::with_capacity(n_list.len()),
        normalized: Vec::with_capacity(n_list.len()),
        alt_normalized: Vec::with_capacity(n_list.len()),
        below_floor: Vec::with_capacity(n_list.len()),
        fitted_exponent: None,
        correction_exponent: None,
        noise_floor_hits: 0,
        floor,
    };
    let mut fit = Vec::new();
    let mut det_fit = Vec::new();
    for &n in n_list {
        let exact = if kappa == 0 { log_det(&f.symbol, n) } else { shifted_log_det(&f.symbol, kappa, n) };
        let q = exact.divide_by_exp(&f.log_szego_scale(n));
        let (delta, prediction) = if kappa == 0 {
            ((q - Complex::one()).modulus().to_f64(), None)
        } else {
            let p = winding_prediction(&f, n, kappa)?;
            let unit = p.index_factor.clone() * T::from_f64(p.sign as f64);
            let rho = (q / unit - p.correction_det.clone()).modulus().to_f64();
            (rho, Some(p))
        };
        let weight = match kappa.signum() {
            -1 => psi.value(n)?,
            1 => phi.value(n)?,
            _ => 1.0,
        };
        let m = n + size + 1;
        let below = delta <= floor;
        out.normalized.push(weight * delta);
        out.alt_normalized.push(phi.value(m)? * psi.value(m)?.powi(2) * delta);
        out.below_floor.push(below);
        if below {
            out.noise_floor_hits += 1;
        } else {
            fit.push((n as f64, delta));
            if let Some(p) = &prediction {
                det_fit.push((n as f64, p.correction_det.modulus().to_f64()));
            }
        }
        out.exact.push(exact);
        out.predicted.push(prediction);
        out.delta.push(delta);
    }
    out.fitted_exponent = fit_log_log(&fit);
    out.correction_exponent = fit_log_log(&det_fit);
    Ok(out)
}

/// `|det(upper-right corner of T_n^{-1}) - det(its leading operator product)|`.
pub fn corner_replacement_gap<T: Real>(factors: &WienerHopfFactors<T>, n: usize, kappa: usize, big_n: usize) -> Result<f64> {
    let exact = corner_minor(&factors.symbol, n, kappa, Corner::UpperRight)?.block.determinant();
    let lead = corner_leading_block(factors, n, kappa, Corner::UpperRight, big_n)?.determinant();
    Ok((exact - lead).modulus().to_f64())
}
