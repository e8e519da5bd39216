//! Dense complex matrices, LU with partial pivoting, and log-scaled determinants.

use std::fmt;
use std::ops::{Index, IndexMut, Range};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{ComplexExt, Real};

/// Largest `log|det|` for which [`LogDet::value`] is materialized.
pub const MATERIALIZE_LIMIT: f64 = 700.0;

const POWER_MAX_ITERS: usize = 2000;
/// Relative change at which power iteration stops.
pub const POWER_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a.clone() * other[(l, j)].clone();
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| {
                let mut s = Complex::zero();
                for (j, x) in v.iter().enumerate() {
                    s += self[(i, j)].clone() * x.clone();
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&Complex<T>, &Complex<T>) -> Complex<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shapes differ");
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| T::max_of(m, z.modulus()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    pub fn determinant(&self) -> Complex<T> {
        Lu::new(self).log_det().to_complex()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        let adj = self.adjoint();
        spectral_norm_of(self.cols, |v| self.matvec(v), |v| adj.matvec(v))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.to_c64()).collect() }
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self[(i, j)].to_c64())).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    let mut s = T::zero();
    for z in v {
        s += z.norm_sqr();
    }
    s.sqrt()
}

/// Largest singular value of the operator `apply` (with adjoint `apply_adj`)
/// on vectors of length `dim`, by power iteration on `A^H A`.
pub fn spectral_norm_of<T: Real>(
    dim: usize,
    apply: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
    apply_adj: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> T {
    if dim == 0 {
        return T::zero();
    }
    // fixed, generic start vector: no symmetry for a structured operator to annihilate
    let mut v: Vec<Complex<T>> = (0..dim)
        .map(|j| {
            let x = (j as f64 * 0.754_877_666).fract();
            Complex::new(T::from_f64(1.0 + x), T::from_f64(0.5 - 0.3 * x))
        })
        .collect();
    let mut estimate = T::zero();
    for _ in 0..POWER_MAX_ITERS {
        let nv = vec_norm(&v);
        if nv.is_zero() {
            return T::zero();
        }
        let inv = T::one() / nv;
        for z in v.iter_mut() {
            *z = z.clone() * inv.clone();
        }
        let av = apply(&v);
        let next = vec_norm(&av);
        if next.is_zero() {
            return T::zero();
        }
        v = apply_adj(&av);
        let done = (next.clone() - estimate.clone()).abs() <= T::from_f64(POWER_TOL) * next.clone();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Log-scaled complex determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDet<T: Real> {
    /// `ln|det|`; `-inf` for an exactly singular matrix.
    pub log_abs: T,
    /// `arg det` in `(-pi, pi]`.
    pub phase: T,
    /// `det` itself when `log_abs < 700`.
    pub value: Option<Complex<T>>,
}

impl<T: Real> LogDet<T> {
    pub fn new(log_abs: T, phase: T) -> Self {
        let phase = if log_abs.is_finite() { phase.wrap_angle() } else { T::zero() };
        let value = (log_abs < T::from_f64(MATERIALIZE_LIMIT))
            .then(|| Complex::<T>::from_polar_parts(log_abs.clone().exp(), phase.clone()));
        Self { log_abs, phase, value }
    }

    pub fn singular() -> Self {
        Self::new(T::neg_infinity(), T::zero())
    }

    pub fn is_singular(&self) -> bool {
        self.log_abs == T::neg_infinity()
    }

    pub fn to_complex(&self) -> Complex<T> {
        self.value.clone().unwrap_or_else(|| Complex::<T>::from_polar_parts(self.log_abs.clone().exp(), self.phase.clone()))
    }

    /// `det / exp(log_scale)` without forming either factor.
    pub fn divide_by_exp(&self, log_scale: &Complex<T>) -> Complex<T> {
        if self.is_singular() {
            return Complex::zero();
        }
        let m = (self.log_abs.clone() - log_scale.re.clone()).exp();
        Complex::<T>::from_polar_parts(m, self.phase.clone() - log_scale.im.clone())
    }

    /// `self / other`; zero when `self` is singular.
    pub fn ratio(&self, other: &Self) -> Complex<T> {
        self.divide_by_exp(&Complex::new(other.log_abs.clone(), other.phase.clone()))
    }
}

/// `P A = L U` with unit lower `L`.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Matrix<T>,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    swaps: usize,
    min_pivot: T,
    max_entry: T,
    exactly_singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut min_pivot = T::infinity();
        let mut exactly_singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = l1(&lu[(k, k)]);
            for i in k + 1..n {
                let m = l1(&lu[(i, k)]);
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)].clone();
            min_pivot = T::min_of(min_pivot, pivot.modulus());
            if pivot.is_zero() {
                exactly_singular = true;
                continue;
            }
            let inv = Complex::<T>::one() / pivot;
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let f = lu[(i, k)].clone() * inv.clone();
                for j in k + 1..n {
                    let d = f.clone() * lu[(k, j)].clone();
                    lu[(i, j)] -= d;
                }
                lu[(i, k)] = f;
            }
        }
        if n == 0 {
            min_pivot = T::one();
        }
        Self { max_entry: a.max_abs(), lu, perm, swaps, min_pivot, exactly_singular }
    }

    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    /// `min |pivot| <= floor * max |entry|`, with the floor `1e-13` scaled to the precision.
    pub fn is_numerically_singular(&self) -> bool {
        self.exactly_singular || self.min_pivot <= T::noise_floor() * self.max_entry.clone()
    }

    pub fn log_det(&self) -> LogDet<T> {
        if self.exactly_singular {
            return LogDet::singular();
        }
        let mut log_abs = T::zero();
        let mut phase = if self.swaps % 2 == 1 { T::pi() } else { T::zero() };
        for k in 0..self.order() {
            let p = &self.lu[(k, k)];
            log_abs += p.modulus().ln();
            phase += p.phase();
        }
        LogDet::new(log_abs, phase)
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.order();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let d = self.lu[(i, j)].clone() * x[j].clone();
                x[i] -= d;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let d = self.lu[(i, j)].clone() * x[j].clone();
                x[i] -= d;
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.order();
        let mut y: Vec<Complex<T>> = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let d = self.lu[(j, i)].clone() * y[j].clone();
                y[i] -= d;
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let d = self.lu[(j, i)].clone() * y[j].clone();
                y[i] -= d;
            }
        }
        let mut x = vec![Complex::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i].clone();
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let conj: Vec<_> = b.iter().map(|z| z.conj()).collect();
        self.solve_transpose(&conj).into_iter().map(|z| z.conj()).collect()
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.order();
        let cols: Vec<_> = (0..n).map(|j| self.solve(&unit(n, j))).collect();
        Matrix::from_columns(n, &cols)
    }
}

fn l1<T: Real>(z: &Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

pub fn unit<T: Real>(n: usize, j: usize) -> Vec<Complex<T>> {
    let mut e = vec![Complex::zero(); n];
    e[j] = Complex::one();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::Mp256;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn lu_solves_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 12] {
            let a = random_matrix(&mut rng, n);
            let lu = Lu::new(&a);
            let b: Vec<_> = (0..n).map(|i| Complex::new(i as f64, 1.0)).collect();
            let x = lu.solve(&b);
            let r = a.matvec(&x);
            assert!(r.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-11));
            let xt = lu.solve_transpose(&b);
            let rt = a.transpose().matvec(&xt);
            assert!(rt.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-11));
            let xa = lu.solve_adjoint(&b);
            let ra = a.adjoint().matvec(&xa);
            assert!(ra.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-11));
            assert!(a.matmul(&lu.inverse()).max_abs_diff(&Matrix::identity(n)) < 1e-11);
        }
    }

    /// Cofactor expansion as an independent determinant.
    fn cofactor_det(a: &Matrix<f64>) -> Complex<f64> {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| a[(r + 1, if c < j { c } else { c + 1 })]);
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                a[(0, j)] * cofactor_det(&minor) * s
            })
            .sum()
    }

    #[test]
    fn log_det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let a = random_matrix(&mut rng, n);
            let want = cofactor_det(&a);
            let got = Lu::new(&a).log_det();
            assert!((got.to_complex() - want).norm() < 1e-12 * want.norm().max(1.0));
            assert!((got.log_abs - want.norm().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_sign_and_singularity() {
        let swap = Matrix::<f64>::from_fn(2, 2, |i, j| if i != j { Complex::new(1.0, 0.0) } else { Complex::zero() });
        let d = Lu::new(&swap).log_det();
        assert!((d.phase - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(d.log_abs, 0.0);
        let zero = Matrix::<f64>::zeros(3, 3);
        let lu = Lu::new(&zero);
        assert!(lu.log_det().is_singular());
        assert!(lu.is_numerically_singular());
        assert_eq!(lu.log_det().value, Some(Complex::zero()));
        let tiny = Matrix::<f64>::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex::new(1.0, 0.0),
            (1, 1) => Complex::new(1e-15, 0.0),
            _ => Complex::zero(),
        });
        assert!(Lu::new(&tiny).is_numerically_singular());
        assert!(!Lu::new(&tiny).log_det().is_singular());
    }

    #[test]
    fn huge_determinants_stay_in_log_space() {
        let a = Matrix::<f64>::from_fn(400, 400, |i, j| if i == j { Complex::new(10.0, 0.0) } else { Complex::zero() });
        let d = Lu::new(&a).log_det();
        assert!((d.log_abs - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!(d.value.is_none());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = Matrix::<f64>::from_fn(4, 4, |i, j| if i == j { Complex::new(0.0, i as f64 + 1.0) } else { Complex::zero() });
        assert!((a.spectral_norm() - 4.0).abs() < 1e-8);
        assert_eq!(Matrix::<f64>::zeros(3, 2).spectral_norm(), 0.0);
    }

    #[test]
    fn mp_lu_is_accurate() {
        let a = Matrix::<Mp256>::from_fn(6, 6, |i, j| {
            Complex::new(Mp256::from_f64(1.0 / (i + j + 1) as f64), Mp256::from_f64((i as f64 - j as f64) * 0.1))
        });
        let x = Lu::new(&a).solve(&unit(6, 2));
        let r = a.matvec(&x);
        let err = r.iter().zip(unit::<Mp256>(6, 2)).fold(0.0f64, |m, (u, v)| m.max((u.clone() - v).modulus().to_f64()));
        assert!(err < 1e-60, "{err}");
    }
}
