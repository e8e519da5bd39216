//! Laurent polynomials on the unit circle and their calculus.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fft::{coefficients_from_samples, sample_on_grid};
use crate::scalar::{ComplexExt, Real};

/// Default absolute floor for `min |a|` on the sampling grid.
pub const DEFAULT_ABS_FLOOR: f64 = 1e-12;
/// Relative size of a boundary coefficient above which a transform reports aliasing.
pub const ALIAS_RATIO: f64 = 1e-10;

/// Two-sided coefficient array `a_k`, `|k| <= radius`, stored densely at
/// offset `k + radius`. Queries outside the stored range return zero.
#[derive(Clone, PartialEq)]
pub struct FourierSymbol<T: Real> {
    coeffs: Vec<Complex<T>>,
    radius: usize,
}

/// Boundary coefficients of an FFT-based transform were not negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasWarning {
    pub boundary: f64,
    pub peak: f64,
}

/// Result of `log_symbol` / `exp_symbol`.
#[derive(Debug, Clone)]
pub struct Transform<T: Real> {
    pub symbol: FourierSymbol<T>,
    pub alias: Option<AliasWarning>,
    pub grid: usize,
}

/// Grid length used by the FFT-based transforms.
pub fn transform_grid(input_radius: usize, out_radius: usize) -> usize {
    (8 * input_radius).max(8 * out_radius).max(64).next_power_of_two()
}

impl<T: Real> FourierSymbol<T> {
    pub fn zero() -> Self {
        Self { coeffs: vec![Complex::zero()], radius: 0 }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self { coeffs: vec![c], radius: 0 }
    }

    /// `c * t^k`.
    pub fn monomial(k: i64, c: Complex<T>) -> Self {
        let mut s = Self::with_radius(k.unsigned_abs() as usize);
        s.set(k, c);
        s
    }

    pub fn with_radius(radius: usize) -> Self {
        Self { coeffs: vec![Complex::zero(); 2 * radius + 1], radius }
    }

    /// Builds from a dense array of length `2 * radius + 1`.
    pub fn from_dense(radius: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != 2 * radius + 1 {
            return Err(Error::InvalidInput(format!(
                "dense coefficient array has length {}, expected {}",
                coeffs.len(),
                2 * radius + 1
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite_c()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { coeffs, radius })
    }

    /// Builds from `(k, a_k)` pairs; repeated indices are summed.
    pub fn from_terms<I: IntoIterator<Item = (i64, Complex<T>)>>(terms: I) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let radius = terms.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut s = Self::with_radius(radius);
        for (k, c) in terms {
            let slot = s.slot(k).expect("index within computed radius");
            s.coeffs[slot] += c;
        }
        s
    }

    /// Convenience constructor from real/imaginary `f64` parts.
    pub fn from_f64_terms(terms: &[(i64, f64, f64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(k, re, im)| (k, Complex::new(T::from_f64(re), T::from_f64(im)))))
    }

    fn slot(&self, k: i64) -> Option<usize> {
        let i = k + self.radius as i64;
        (0..self.coeffs.len() as i64).contains(&i).then_some(i as usize)
    }

    fn set(&mut self, k: i64, c: Complex<T>) {
        let slot = self.slot(k).expect("index within radius");
        self.coeffs[slot] = c;
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Coefficient `a_k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex<T> {
        self.slot(k).map(|i| self.coeffs[i].clone()).unwrap_or_else(Complex::zero)
    }

    pub fn dense(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `(k, a_k)` over the stored range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Complex<T>)> + '_ {
        let r = self.radius as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - r, c))
    }

    /// Smallest and largest index with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        let mut nz = self.terms().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k);
        let lo = nz.next()?;
        let hi = nz.last().unwrap_or(lo);
        Some((lo, hi))
    }

    /// Same symbol with the radius reduced to its support.
    pub fn trimmed(&self) -> Self {
        match self.support() {
            None => Self::zero(),
            Some((lo, hi)) => self.truncate(lo.unsigned_abs().max(hi.unsigned_abs()) as usize),
        }
    }

    /// Stores the same coefficients in a larger (or equal) radius.
    pub fn padded(&self, radius: usize) -> Self {
        if radius <= self.radius {
            return self.clone();
        }
        let mut s = Self::with_radius(radius);
        let off = radius - self.radius;
        for (i, c) in self.coeffs.iter().enumerate() {
            s.coeffs[off + i] = c.clone();
        }
        s
    }

    /// `sum_k a_k e^{ik theta}`.
    pub fn evaluate(&self, theta: &T) -> Complex<T> {
        let mut acc = Complex::zero();
        for (k, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let phase = theta.clone() * T::from_i64(k);
            acc += c.clone() * Complex::new(phase.cos(), phase.sin());
        }
        acc
    }

    /// Pointwise product: coefficient convolution, radius `K_a + K_b`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::with_radius(self.radius + other.radius);
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += x.clone() * y.clone();
            }
        }
        out
    }

    /// `sum_k |a_k|`.
    pub fn wiener_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.modulus())
    }

    /// Wiener norm of the discarded part `a - truncate(a, n)`.
    pub fn tail_norm(&self, n: usize) -> T {
        self.terms().filter(|(k, _)| k.unsigned_abs() as usize > n).fold(T::zero(), |acc, (_, c)| acc + c.modulus())
    }

    /// Keeps `|k| <= n`.
    pub fn truncate(&self, n: usize) -> Self {
        let r = n.min(self.radius);
        let mut s = Self::with_radius(r);
        for k in -(r as i64)..=r as i64 {
            s.set(k, self.coeff(k));
        }
        s
    }

    /// `a(1/t)`: coefficient `k` moves to `-k`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { coeffs, radius: self.radius }
    }

    /// Complex conjugate function: `(conj a)_k = conj(a_{-k})`.
    pub fn conjugate(&self) -> Self {
        let mut s = self.reflect();
        for c in &mut s.coeffs {
            *c = c.conj();
        }
        s
    }

    /// `a(t) t^kappa`: `(a t^kappa)_k = a_{k - kappa}`.
    pub fn shift(&self, kappa: i64) -> Self {
        let r = self.radius + kappa.unsigned_abs() as usize;
        let mut s = Self::with_radius(r);
        for (k, c) in self.terms() {
            s.set(k + kappa, c.clone());
        }
        s
    }

    pub fn scale(&self, z: &Complex<T>) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.clone() * z.clone()).collect(), radius: self.radius }
    }

    /// Keeps `k < 0` (`strict`) or `k <= 0`.
    pub fn minus_part(&self, strict: bool) -> Self {
        let top = if strict { -1 } else { 0 };
        Self::from_terms(self.terms().filter(|(k, _)| *k <= top).map(|(k, c)| (k, c.clone()))).padded(self.radius)
    }

    /// Keeps `k > 0` (`strict`) or `k >= 0`.
    pub fn plus_part(&self, strict: bool) -> Self {
        let bottom = if strict { 1 } else { 0 };
        Self::from_terms(self.terms().filter(|(k, _)| *k >= bottom).map(|(k, c)| (k, c.clone()))).padded(self.radius)
    }

    /// Values on the grid `theta_j = 2 pi j / n`, `n` a power of two.
    pub fn sample(&self, n: usize) -> Vec<Complex<T>> {
        sample_on_grid(&self.coeffs, self.radius, n)
    }

    fn sample_any(&self, n: usize) -> Vec<Complex<T>> {
        if n.is_power_of_two() {
            self.sample(n)
        } else {
            let step = T::two_pi() / T::from_usize(n);
            (0..n).map(|j| self.evaluate(&(step.clone() * T::from_usize(j)))).collect()
        }
    }

    /// Winding number of `theta -> a(e^{i theta})` about zero, using the
    /// default floor for `min |a|`.
    pub fn cauchy_index(&self, grid_size: usize) -> Result<i64> {
        self.cauchy_index_with_floor(grid_size, DEFAULT_ABS_FLOOR)
    }

    pub fn cauchy_index_with_floor(&self, grid_size: usize, abs_floor: f64) -> Result<i64> {
        if grid_size < 2 {
            return Err(Error::InvalidInput("winding grid needs at least two points".into()));
        }
        let samples = self.sample_any(grid_size);
        Ok(unwrap_phase(&samples, abs_floor)?.index)
    }

    /// Coefficients of `log a` for `|k| <= out_radius`, via the unwrapped
    /// argument on an oversampled grid.
    pub fn log_symbol(&self, out_radius: usize) -> Result<Transform<T>> {
        let n = transform_grid(self.radius, out_radius);
        let samples = self.sample(n);
        let phase = unwrap_phase(&samples, DEFAULT_ABS_FLOOR)?;
        if phase.index != 0 {
            return Err(Error::NonzeroIndex { index: phase.index });
        }
        let logs: Vec<Complex<T>> =
            samples.iter().zip(phase.unwrapped).map(|(z, arg)| Complex::new(z.modulus().ln(), arg)).collect();
        let coeffs = coefficients_from_samples(&logs, out_radius);
        Ok(finish_transform(coeffs, out_radius, n))
    }

    /// Coefficients of `exp g` for `|k| <= out_radius`.
    pub fn exp_symbol(&self, out_radius: usize) -> Transform<T> {
        let n = transform_grid(self.radius, out_radius);
        let values: Vec<Complex<T>> = self.sample(n).iter().map(|z| z.cexp()).collect();
        let coeffs = coefficients_from_samples(&values, out_radius);
        finish_transform(coeffs, out_radius, n)
    }

    /// `exp` of a one-sided symbol, exact up to truncation at `out_radius`.
    ///
    /// For support in `k >= 0` the power series recurrence
    /// `m f_m = sum_k k h_k f_{m-k}` is used; `k <= 0` is handled by reflection.
    pub fn exp_one_sided(&self, out_radius: usize) -> Result<Self> {
        match self.support() {
            None => Ok(Self::constant(Complex::one())),
            Some((lo, _)) if lo >= 0 => Ok(self.exp_analytic(out_radius)),
            Some((_, hi)) if hi <= 0 => Ok(self.reflect().exp_analytic(out_radius).reflect()),
            Some((lo, hi)) => {
                Err(Error::InvalidInput(format!("one-sided exponential needs support on one side of zero, got [{lo}, {hi}]")))
            }
        }
    }

    fn exp_analytic(&self, out_radius: usize) -> Self {
        let h: Vec<Complex<T>> = (0..=self.radius as i64).map(|k| self.coeff(k)).collect();
        let weighted: Vec<Complex<T>> = h.iter().enumerate().map(|(k, c)| c.clone().scale(T::from_usize(k))).collect();
        let mut f: Vec<Complex<T>> = Vec::with_capacity(out_radius + 1);
        f.push(h[0].cexp());
        for m in 1..=out_radius {
            let mut acc = Complex::zero();
            for k in 1..=m.min(self.radius) {
                if weighted[k].is_zero() {
                    continue;
                }
                acc += weighted[k].clone() * f[m - k].clone();
            }
            f.push(acc.unscale(T::from_usize(m)));
        }
        Self::from_terms(f.into_iter().enumerate().map(|(k, c)| (k as i64, c))).padded(out_radius)
    }

    /// Lossy conversion to another scalar type through `f64`.
    pub fn to_f64_symbol(&self) -> FourierSymbol<f64> {
        FourierSymbol { coeffs: self.coeffs.iter().map(|c| c.to_c64()).collect(), radius: self.radius }
    }
}

struct Unwrapped<T> {
    unwrapped: Vec<T>,
    index: i64,
}

/// Continuous argument along closed-curve samples, plus the winding number.
fn unwrap_phase<T: Real>(samples: &[Complex<T>], abs_floor: f64) -> Result<Unwrapped<T>> {
    let n = samples.len();
    let moduli: Vec<f64> = samples.iter().map(|z| z.modulus().to_f64()).collect();
    let min_abs = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_abs > abs_floor) {
        return Err(Error::NearZeroOnCircle { min_abs });
    }
    let principal: Vec<T> = samples.iter().map(|z| z.phase()).collect();
    let two_pi = T::two_pi();
    let limit = std::f64::consts::PI * (1.0 - 1e-6);
    let mut unwrapped = Vec::with_capacity(n);
    let mut turns = 0i64;
    let mut total = 0.0f64;
    for j in 0..n {
        let next = (j + 1) % n;
        let jump = (principal[next].clone() - principal[j].clone()).wrap_angle().to_f64();
        if jump.abs() >= limit {
            return Err(Error::BranchAmbiguity { jump });
        }
        unwrapped.push(principal[j].clone() + two_pi.clone() * T::from_i64(turns));
        total += jump;
        let raw = (principal[next].clone() - principal[j].clone()).to_f64();
        // a wrapped step crossed the branch cut
        if raw - jump > std::f64::consts::PI {
            turns -= 1;
        } else if jump - raw > std::f64::consts::PI {
            turns += 1;
        }
    }
    let value = total / (2.0 * std::f64::consts::PI);
    let index = value.round();
    if (value - index).abs() > 1e-6 {
        return Err(Error::NonIntegerWinding { value });
    }
    Ok(Unwrapped { unwrapped, index: index as i64 })
}

fn finish_transform<T: Real>(coeffs: Vec<Complex<T>>, radius: usize, grid: usize) -> Transform<T> {
    let peak = coeffs.iter().map(|c| c.modulus().to_f64()).fold(0.0, f64::max);
    let boundary = coeffs[0].modulus().to_f64().max(coeffs[2 * radius].modulus().to_f64());
    let alias = (radius > 0 && boundary > ALIAS_RATIO * peak).then_some(AliasWarning { boundary, peak });
    Transform { symbol: FourierSymbol { coeffs, radius }, alias, grid }
}

impl<T: Real> fmt::Debug for FourierSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, c) in self.terms() {
            if !c.is_zero() {
                m.entry(&k, &format_args!("{}{:+}i", c.re, c.im));
            }
        }
        m.finish()
    }
}

impl<T: Real> Add for &FourierSymbol<T> {
    type Output = FourierSymbol<T>;
    fn add(self, rhs: Self) -> FourierSymbol<T> {
        let r = self.radius.max(rhs.radius);
        let mut out = self.padded(r);
        for (k, c) in rhs.terms() {
            let slot = out.slot(k).expect("within padded radius");
            out.coeffs[slot] += c.clone();
        }
        out
    }
}

impl<T: Real> Neg for &FourierSymbol<T> {
    type Output = FourierSymbol<T>;
    fn neg(self) -> FourierSymbol<T> {
        FourierSymbol { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), radius: self.radius }
    }
}

impl<T: Real> Sub for &FourierSymbol<T> {
    type Output = FourierSymbol<T>;
    fn sub(self, rhs: Self) -> FourierSymbol<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Mul for &FourierSymbol<T> {
    type Output = FourierSymbol<T>;
    fn mul(self, rhs: Self) -> FourierSymbol<T> {
        self.multiply(rhs)
    }
}
