//! Finite Toeplitz and Hankel sections, log-scaled determinants, corner minors
//! of `T_n^{-1}(a)` and numerical checks of the identities that tie them to
//! shifted determinants and to the Wiener-Hopf factors.
//!
//! Index conventions: `P_n` keeps indices `0..=n`, `Q_n = I - P_n`, and
//! `P_n - P_{n-kappa}` keeps `n-kappa+1..=n`.

use std::cell::RefCell;
use std::ops::Range;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::factorization::WienerHopfFactors;
pub use crate::linalg::LogDet;
use crate::linalg::{spectral_norm_of, unit, vec_norm, Lu, Matrix};
use crate::orlicz::FlSpace;
use crate::scalar::{ComplexExt, Real};
use crate::symbol::FourierSymbol;

/// Neumann terms stop once `||K^m w|| <= NEUMANN_TOL ||w||`.
pub const NEUMANN_TOL: f64 = 1e-14;
pub const NEUMANN_MAX_TERMS: usize = 100;
/// Consecutive non-decreasing Neumann terms that count as divergence.
pub const NEUMANN_STALL: usize = 5;

/// Entry `(j, k) = a_{j-k}` for `j in rows`, `k in cols`.
pub fn toeplitz_section<T: Real>(a: &FourierSymbol<T>, rows: Range<usize>, cols: Range<usize>) -> Matrix<T> {
    let (r0, c0) = (rows.start as i64, cols.start as i64);
    Matrix::from_fn(rows.len(), cols.len(), |i, j| a.coeff(r0 + i as i64 - c0 - j as i64))
}

/// `T_n(a)`, of order `n + 1`.
pub fn toeplitz_matrix<T: Real>(a: &FourierSymbol<T>, n: usize) -> Matrix<T> {
    toeplitz_section(a, 0..n + 1, 0..n + 1)
}

/// Entry `(j, k) = a_{j+k+1}`.
pub fn hankel_matrix<T: Real>(a: &FourierSymbol<T>, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |j, k| a.coeff((j + k + 1) as i64))
}

/// `H(a~)`: entry `(j, k) = a_{-j-k-1}`.
pub fn hankel_reflected<T: Real>(a: &FourierSymbol<T>, rows: usize, cols: usize) -> Matrix<T> {
    hankel_matrix(&a.reflect(), rows, cols)
}

/// `D_n(a) = det T_n(a)`.
pub fn log_det<T: Real>(a: &FourierSymbol<T>, n: usize) -> LogDet<T> {
    Lu::new(&toeplitz_matrix(a, n)).log_det()
}

/// `D_n[a t^kappa]`.
pub fn shifted_log_det<T: Real>(a: &FourierSymbol<T>, kappa: i64, n: usize) -> LogDet<T> {
    log_det(&a.shift(kappa), n)
}

fn invertible_lu<T: Real>(m: &Matrix<T>) -> Result<Lu<T>> {
    let lu = Lu::new(m);
    if lu.is_numerically_singular() {
        return Err(Error::SingularMatrix { order: m.rows() });
    }
    Ok(lu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    /// Rows `n-kappa+1..=n`, columns `0..kappa`.
    LowerLeft,
    /// Rows `0..kappa`, columns `n-kappa+1..=n`.
    UpperRight,
}

#[derive(Debug, Clone)]
pub struct CornerMinor<T: Real> {
    pub kappa: usize,
    pub block: Matrix<T>,
    pub which: Corner,
}

/// The `kappa x kappa` corner of `T_n^{-1}(a)`.
pub fn corner_minor<T: Real>(a: &FourierSymbol<T>, n: usize, kappa: usize, which: Corner) -> Result<CornerMinor<T>> {
    if kappa == 0 || kappa > n + 1 {
        return Err(Error::InvalidInput(format!("corner size {kappa} must lie in 1..={}", n + 1)));
    }
    let lu = invertible_lu(&toeplitz_matrix(a, n))?;
    let tail = n + 1 - kappa;
    let block = match which {
        Corner::LowerLeft => {
            let cols: Vec<_> = (0..kappa).map(|j| lu.solve(&unit(n + 1, j))[tail..].to_vec()).collect();
            Matrix::from_columns(kappa, &cols)
        }
        Corner::UpperRight => {
            // row i of T^{-1} is column i of T^{-T}
            let rows: Vec<_> = (0..kappa).map(|i| lu.solve_transpose(&unit(n + 1, i))[tail..].to_vec()).collect();
            Matrix::from_columns(kappa, &rows).transpose()
        }
    };
    Ok(CornerMinor { kappa, block, which })
}

#[derive(Debug, Clone)]
pub struct JacobiCheck<T: Real> {
    /// Lower-left corner determinant against `D_{n-kappa}[a t^{-kappa}] / D_n(a)`.
    pub lhs_minus: Complex<T>,
    pub rhs_minus: Complex<T>,
    /// Upper-right corner determinant against `D_{n-kappa}[a t^{kappa}] / D_n(a)`.
    pub lhs_plus: Complex<T>,
    pub rhs_plus: Complex<T>,
    pub max_rel_err: f64,
}

/// `det(corner) = (-1)^{n kappa} D_{n-kappa}[a t^{-+kappa}] / D_n(a)`.
pub fn jacobi_check<T: Real>(a: &FourierSymbol<T>, n: usize, kappa: usize) -> Result<JacobiCheck<T>> {
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidInput(format!("Jacobi check needs 1 <= kappa <= n, got kappa={kappa}, n={n}")));
    }
    let d = log_det(a, n);
    let sign = if (n * kappa) % 2 == 1 { -T::one() } else { T::one() };
    let k = kappa as i64;
    let lhs_minus = corner_minor(a, n, kappa, Corner::LowerLeft)?.block.determinant();
    let lhs_plus = corner_minor(a, n, kappa, Corner::UpperRight)?.block.determinant();
    let rhs_minus = shifted_log_det(a, -k, n - kappa).ratio(&d) * sign.clone();
    let rhs_plus = shifted_log_det(a, k, n - kappa).ratio(&d) * sign;
    let max_rel_err = rel_err(&lhs_minus, &rhs_minus).max(rel_err(&lhs_plus, &rhs_plus));
    Ok(JacobiCheck { lhs_minus, rhs_minus, lhs_plus, rhs_plus, max_rel_err })
}

/// `|x - y| / max(|x|, |y|)`, zero when both vanish.
pub fn rel_err<T: Real>(x: &Complex<T>, y: &Complex<T>) -> f64 {
    let scale = T::max_of(x.modulus(), y.modulus());
    if scale.is_zero() {
        return 0.0;
    }
    ((x.clone() - y.clone()).modulus() / scale).to_f64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductIdentityErrors {
    /// `max |T(ab) - T(a)T(b) - H(a)H(b~)|` over the `(n+1) x (n+1)` section.
    pub toeplitz: f64,
    /// `max |H(ab) - T(a)H(b) - H(a)T(b~)|`.
    pub hankel: f64,
}

/// Both product identities on the leading `(n+1) x (n+1)` section, with
/// inner dimensions padded so the truncated products are exact.
pub fn product_identity_errors<T: Real>(a: &FourierSymbol<T>, b: &FourierSymbol<T>, n: usize) -> ProductIdentityErrors {
    let m = n + 1;
    let inner = m + a.radius() + b.radius() + 1;
    let ab = a.multiply(b);
    let bt = b.reflect();
    let t_ab = toeplitz_matrix(&ab, n);
    let t_prod = toeplitz_section(a, 0..m, 0..inner).matmul(&toeplitz_section(b, 0..inner, 0..m));
    let h_prod = hankel_matrix(a, m, inner).matmul(&hankel_matrix(&bt, inner, m));
    let toeplitz = t_ab.max_abs_diff(&t_prod.add(&h_prod)).to_f64();
    let h_ab = hankel_matrix(&ab, m, m);
    let th = toeplitz_section(a, 0..m, 0..inner).matmul(&hankel_matrix(b, inner, m));
    let ht = hankel_matrix(a, m, inner).matmul(&toeplitz_section(&bt, 0..inner, 0..m));
    let hankel = h_ab.max_abs_diff(&th.add(&ht)).to_f64();
    ProductIdentityErrors { toeplitz, hankel }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationDecay {
    /// `||a - a^(n-j)||_Fl / psi_{n-j+1}`.
    pub bound_row: f64,
    /// `||a - a^(n-j)||_Fl / phi_{n-j+1}`.
    pub bound_col: f64,
    /// `||Q_n T(a) Delta_j||` in `l^2`: `sqrt(sum_{k>n} |a_{k-j}|^2)`.
    pub column_norm: f64,
}

/// Right-hand sides of the truncation bounds, without their constant.
pub fn truncation_decay<T: Real>(a: &FourierSymbol<T>, space: &FlSpace, n: usize, j: usize) -> Result<TruncationDecay> {
    if j > n {
        return Err(Error::InvalidInput(format!("truncation column {j} exceeds n = {n}")));
    }
    let tail = space.fl_norm(&(a - &a.truncate(n - j)))?.fl();
    let bound_row = tail / space.plus.weight.value(n - j + 1)?;
    let bound_col = tail / space.minus.weight.value(n - j + 1)?;
    let column_norm = ((n + 1)..=(j + a.radius())).map(|k| a.coeff((k - j) as i64).norm_sqr().to_f64()).sum::<f64>().sqrt();
    Ok(TruncationDecay { bound_row, bound_col, column_norm })
}

/// Building blocks applied to vectors of a fixed section length.
enum Op<'a, T: Real> {
    T(&'a FourierSymbol<T>),
    H(&'a FourierSymbol<T>),
    Keep(usize, usize),
}

impl<T: Real> Clone for Op<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T: Real> Copy for Op<'_, T> {}

fn apply<T: Real>(op: Op<'_, T>, v: &[Complex<T>], adjoint: bool) -> Vec<Complex<T>> {
    let len = v.len();
    let mut out = vec![Complex::zero(); len];
    let coef = |x: &FourierSymbol<T>, m: i64| if adjoint { x.coeff(m).conj() } else { x.coeff(m) };
    match op {
        Op::Keep(lo, hi) => {
            let hi = hi.min(len);
            if lo < hi {
                out[lo..hi].clone_from_slice(&v[lo..hi]);
            }
        }
        Op::T(x) => {
            let r = x.radius() as i64;
            for (k, vk) in v.iter().enumerate().filter(|(_, z)| !z.is_zero()) {
                for m in -r..=r {
                    // T: out_{k+m} += x_m v_k; adjoint: out_{k-m} += conj(x_m) v_k
                    let j = if adjoint { k as i64 - m } else { k as i64 + m };
                    if j >= 0 && (j as usize) < len {
                        out[j as usize] += coef(x, m) * vk.clone();
                    }
                }
            }
        }
        Op::H(x) => {
            let r = x.radius();
            for (k, vk) in v.iter().enumerate().filter(|(_, z)| !z.is_zero()) {
                for m in (k + 1)..=r {
                    let j = m - 1 - k;
                    if j < len {
                        out[j] += coef(x, m as i64) * vk.clone();
                    }
                }
            }
        }
    }
    out
}

/// Applies `ops[0] ops[1] ... ops[last]` to `v` (rightmost first).
fn chain<T: Real>(ops: &[Op<'_, T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
    ops.iter().rev().fold(v.to_vec(), |w, op| apply(*op, &w, false))
}

fn chain_adjoint<T: Real>(ops: &[Op<'_, T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
    ops.iter().fold(v.to_vec(), |w, op| apply(*op, &w, true))
}

fn axpy<T: Real>(acc: &mut [Complex<T>], sign: f64, v: &[Complex<T>]) {
    let s = T::from_f64(sign);
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x.clone() * s.clone();
    }
}

/// The Neumann series `S = sum_{m>=1} K^m`, `K = Q_n H(b) H(c~) Q_n`, on sections of length `len`.
struct Neumann<'a, T: Real> {
    k_ops: [Op<'a, T>; 4],
    len: usize,
    terms: RefCell<usize>,
    failure: RefCell<Option<Error>>,
}

impl<'a, T: Real> Neumann<'a, T> {
    fn new(b: &'a FourierSymbol<T>, c_refl: &'a FourierSymbol<T>, n: usize, len: usize) -> Self {
        let q = Op::Keep(n + 1, len);
        Self { k_ops: [q, Op::H(b), Op::H(c_refl), q], len, terms: RefCell::new(0), failure: RefCell::new(None) }
    }

    fn apply(&self, w: &[Complex<T>], adjoint: bool) -> Vec<Complex<T>> {
        let mut sum = vec![Complex::zero(); self.len];
        let base = vec_norm(w);
        if base.is_zero() {
            return sum;
        }
        let mut term = w.to_vec();
        let mut prev = T::infinity();
        let mut stalls = 0;
        for m in 1..=NEUMANN_MAX_TERMS {
            term = if adjoint { chain_adjoint(&self.k_ops, &term) } else { chain(&self.k_ops, &term) };
            axpy(&mut sum, 1.0, &term);
            let size = vec_norm(&term);
            let mut used = self.terms.borrow_mut();
            *used = (*used).max(m);
            if size <= T::from_f64(NEUMANN_TOL) * base.clone() {
                break;
            }
            if size >= prev {
                stalls += 1;
                if stalls >= NEUMANN_STALL {
                    self.failure.borrow_mut().get_or_insert(Error::SeriesDiverging { terms: m });
                    break;
                }
            } else {
                stalls = 0;
            }
            prev = size;
        }
        sum
    }

    fn check(&self) -> Result<()> {
        match self.failure.borrow().clone() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BsRemainders<T: Real> {
    /// `l^2` norm of `X_{n,kappa}` (lower-left remainder).
    pub x_norm: f64,
    /// `l^2` norm of `Y_{n,kappa}` (upper-right remainder).
    pub y_norm: f64,
    /// `l^2` norm of the summed Neumann series `S`.
    pub series_norm: f64,
    pub x_block: Matrix<T>,
    pub y_block: Matrix<T>,
    /// Most Neumann terms used for any applied vector.
    pub terms: usize,
}

fn check_section<T: Real>(factors: &WienerHopfFactors<T>, n: usize, kappa: usize, big_n: usize) -> Result<()> {
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidInput(format!("remainders need 1 <= kappa <= n, got kappa={kappa}, n={n}")));
    }
    let need = 4 * (n + factors.out_radius);
    if big_n < need {
        return Err(Error::InvalidInput(format!("section size {big_n} is below 4 (n + K) = {need}")));
    }
    Ok(())
}

/// The remainders `X_{n,kappa}`, `Y_{n,kappa}` in the corner decompositions
/// `corner = leading + remainder`, measured on sections of size `big_n`.
pub fn bs_remainder_norms<T: Real>(
    factors: &WienerHopfFactors<T>,
    n: usize,
    kappa: usize,
    big_n: usize,
) -> Result<BsRemainders<T>> {
    check_section(factors, n, kappa, big_n)?;
    let len = big_n;
    let c_refl = factors.c.reflect();
    let am_inv_refl = factors.a_minus_inv.reflect();
    let s = Neumann::new(&factors.b, &c_refl, n, len);
    let d = Op::Keep(n + 1 - kappa, n + 1);
    let pk = Op::Keep(0, kappa);
    let pn = Op::Keep(0, n + 1);
    let qn = Op::Keep(n + 1, len);
    let (ap_inv, am_inv) = (Op::T(&factors.a_plus_inv), Op::T(&factors.a_minus_inv));
    let (tb, tc) = (Op::T(&factors.b), Op::T(&factors.c));

    let mut x_cols = Vec::with_capacity(kappa);
    for i in 0..kappa {
        let w = chain(&[tb, pk, am_inv, pk], &unit(len, i));
        let mut col = chain(&[d, Op::H(&factors.a_plus_inv), Op::H(&c_refl), qn], &w);
        axpy(&mut col, -1.0, &chain(&[d, ap_inv, pn, tc], &s.apply(&w, false)));
        x_cols.push(col[n + 1 - kappa..=n].to_vec());
    }
    let mut y_cols = Vec::with_capacity(kappa);
    for j in (n + 1 - kappa)..=n {
        let e = unit(len, j);
        let mut col = chain(&[pk, ap_inv, pk, tc, qn, Op::H(&factors.b), Op::H(&am_inv_refl), d], &e);
        let w = chain(&[tb, pn, am_inv, d], &e);
        axpy(&mut col, -1.0, &chain(&[pk, ap_inv, pk, tc], &s.apply(&w, false)));
        y_cols.push(col[..kappa].to_vec());
    }
    s.check()?;
    let x_block = Matrix::from_columns(kappa, &x_cols);
    let y_block = Matrix::from_columns(kappa, &y_cols);
    let series_norm = spectral_norm_of(len, |v| s.apply(v, false), |v| s.apply(v, true));
    s.check()?;
    let terms = *s.terms.borrow();
    Ok(BsRemainders {
        x_norm: x_block.spectral_norm().to_f64(),
        y_norm: y_block.spectral_norm().to_f64(),
        series_norm: series_norm.to_f64(),
        x_block,
        y_block,
        terms,
    })
}

/// Leading parts of the corners: `(P_n - P_{n-kappa}) T(a_-^{-1}) (P_n - P_{n-kappa}) T(b) P_{kappa-1} T(a_-^{-1}) P_{kappa-1}`
/// (lower-left) and `P_{kappa-1} T(a_+^{-1}) P_{kappa-1} T(c) (P_n - P_{n-kappa}) T(a_+^{-1}) (P_n - P_{n-kappa})`
/// (upper-right).
pub fn corner_leading_block<T: Real>(
    factors: &WienerHopfFactors<T>,
    n: usize,
    kappa: usize,
    which: Corner,
    big_n: usize,
) -> Result<Matrix<T>> {
    check_section(factors, n, kappa, big_n)?;
    let d = Op::Keep(n + 1 - kappa, n + 1);
    let pk = Op::Keep(0, kappa);
    let (ap_inv, am_inv) = (Op::T(&factors.a_plus_inv), Op::T(&factors.a_minus_inv));
    let cols: Vec<_> = match which {
        Corner::LowerLeft => (0..kappa)
            .map(|i| chain(&[d, am_inv, d, Op::T(&factors.b), pk, am_inv, pk], &unit(big_n, i))[n + 1 - kappa..=n].to_vec())
            .collect(),
        Corner::UpperRight => ((n + 1 - kappa)..=n)
            .map(|j| chain(&[pk, ap_inv, pk, Op::T(&factors.c), d, ap_inv, d], &unit(big_n, j))[..kappa].to_vec())
            .collect(),
    };
    Ok(Matrix::from_columns(kappa, &cols))
}

/// `T_n^{-1}(a)` assembled from the factors as
/// `P_n T(a_+^{-1}) P_n (I - F) P_n T(a_-^{-1}) P_n`, `F = P_n T(c) Q_n T(b) P_n + P_n T(c) S T(b) P_n`.
pub fn bs1_inverse<T: Real>(factors: &WienerHopfFactors<T>, n: usize, big_n: usize) -> Result<Matrix<T>> {
    check_section(factors, n, 1, big_n)?;
    let c_refl = factors.c.reflect();
    let s = Neumann::new(&factors.b, &c_refl, n, big_n);
    let pn = Op::Keep(0, n + 1);
    let qn = Op::Keep(n + 1, big_n);
    let (tb, tc) = (Op::T(&factors.b), Op::T(&factors.c));
    let mut cols = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let v = chain(&[pn, Op::T(&factors.a_minus_inv), pn], &unit(big_n, j));
        let w = chain(&[tb, pn], &v);
        let mut f = chain(&[pn, tc, qn], &w);
        axpy(&mut f, 1.0, &chain(&[pn, tc], &s.apply(&w, false)));
        let mut inner = v;
        axpy(&mut inner, -1.0, &f);
        cols.push(chain(&[pn, Op::T(&factors.a_plus_inv), pn], &inner)[..=n].to_vec());
    }
    s.check()?;
    Ok(Matrix::from_columns(n + 1, &cols))
}

#[derive(Debug, Clone)]
pub struct SectionProbe {
    pub n: usize,
    /// `||T_n^{-1}(a)||` in `l^2`, or the reason it is unavailable.
    pub inv_norm_l2: Result<f64>,
}

/// `l^2` norms of `T_n^{-1}(a)` along `n_list`.
pub fn finite_section_probe<T: Real>(a: &FourierSymbol<T>, n_list: &[usize]) -> Vec<SectionProbe> {
    n_list
        .iter()
        .map(|&n| {
            let inv_norm_l2 = invertible_lu(&toeplitz_matrix(a, n))
                .map(|lu| spectral_norm_of(n + 1, |v| lu.solve(v), |v| lu.solve_adjoint(v)).to_f64());
            SectionProbe { n, inv_norm_l2 }
        })
        .collect()
}

/// Largest finite norm in a probe, with the number of orders that failed.
pub fn probe_sup(probe: &[SectionProbe]) -> (f64, usize) {
    probe.iter().fold((0.0, 0), |(m, bad), p| match &p.inv_norm_l2 {
        Ok(v) => (m.max(*v), bad),
        Err(_) => (m, bad + 1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaPoint {
    /// `max |A_n - B_n|` over entries.
    pub entry_gap: f64,
    /// `|det A_n - det B_n|`.
    pub det_gap: f64,
    /// `det_gap / gamma_n`.
    pub ratio: f64,
}

/// Determinant perturbation data for sequences `A_n`, `B_n` with scale `gamma_n`.
pub fn la_ratios<T: Real>(a_seq: &[Matrix<T>], b_seq: &[Matrix<T>], gammas: &[f64]) -> Result<Vec<LaPoint>> {
    if a_seq.len() != b_seq.len() || a_seq.len() != gammas.len() {
        return Err(Error::InvalidInput("matrix sequences and scales must have equal length".into()));
    }
    Ok(a_seq
        .iter()
        .zip(b_seq)
        .zip(gammas)
        .map(|((a, b), g)| {
            let det_gap = (a.determinant() - b.determinant()).modulus().to_f64();
            LaPoint { entry_gap: a.max_abs_diff(b).to_f64(), det_gap, ratio: det_gap / g }
        })
        .collect())
}
