//! Wiener-Hopf factorization `a = a_- a_+` of an index-zero symbol, the
//! Szego constants `G(a)`, `E(a)`, and the symbols `b = a_- a_+^{-1}`,
//! `c = a_-^{-1} a_+`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};
use crate::symbol::{transform_grid, FourierSymbol};

/// Relative gap allowed between the two routes to `G(b)`, `G(c)`.
pub const ROUTE_TOL: f64 = 1e-10;
/// Relative size of the last retained `E(a)` term above which a tail warning is raised.
pub const E_TAIL_RATIO: f64 = 1e-13;

/// The last term of the `E(a)` series was not negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct TailWarning {
    pub last_term: f64,
    pub sum: f64,
}

#[derive(Debug, Clone)]
pub struct EConstant<T: Real> {
    pub value: Complex<T>,
    /// `sum_k k (log a)_k (log a)_{-k}`.
    pub exponent: Complex<T>,
    /// Modulus of the `k = K` term.
    pub last_term: f64,
    pub tail: Option<TailWarning>,
}

#[derive(Debug, Clone)]
pub struct WienerHopfFactors<T: Real> {
    /// The factored symbol.
    pub symbol: FourierSymbol<T>,
    pub out_radius: usize,
    pub tol: f64,
    pub a_minus: FourierSymbol<T>,
    pub a_plus: FourierSymbol<T>,
    pub a_minus_inv: FourierSymbol<T>,
    pub a_plus_inv: FourierSymbol<T>,
    pub b: FourierSymbol<T>,
    pub c: FourierSymbol<T>,
    pub g_const: Complex<T>,
    pub e_const: Complex<T>,
    pub e_tail: Option<TailWarning>,
    /// `(log a)_k` for `|k| <= out_radius`.
    pub log_coeffs: FourierSymbol<T>,
    /// `max |a - a_- a_+|` on the evaluation grid.
    pub residual: f64,
}

impl<T: Real> WienerHopfFactors<T> {
    /// `log G(a) = (log a)_0`.
    pub fn log_g(&self) -> Complex<T> {
        self.log_coeffs.coeff(0)
    }

    /// `log(G(a)^{n+1} E(a))`.
    pub fn log_szego_scale(&self, n: usize) -> Complex<T> {
        self.log_g() * T::from_usize(n + 1) + e_constant(self).exponent
    }
}

/// Default factor radius: four times the symbol radius.
pub fn default_out_radius<T: Real>(a: &FourierSymbol<T>) -> usize {
    (4 * a.radius()).max(16)
}

/// Factors `a` with factor radius `out_radius`; retries once at twice the
/// radius when the residual exceeds `tol`.
pub fn wiener_hopf<T: Real>(a: &FourierSymbol<T>, out_radius: usize, tol: f64) -> Result<WienerHopfFactors<T>> {
    if out_radius == 0 {
        return Err(Error::InvalidInput("factor radius must be positive".into()));
    }
    let first = factor_once(a, out_radius, tol)?;
    if first.residual <= tol {
        return Ok(first);
    }
    let second = factor_once(a, 2 * out_radius, tol)?;
    if second.residual <= tol {
        Ok(second)
    } else {
        Err(Error::ResidualTooLarge { residual: second.residual, tol })
    }
}

fn factor_once<T: Real>(a: &FourierSymbol<T>, out_radius: usize, tol: f64) -> Result<WienerHopfFactors<T>> {
    let log = a.log_symbol(out_radius)?.symbol;
    let minus = log.minus_part(true);
    let plus = log.plus_part(false);
    let a_minus = minus.exp_one_sided(out_radius)?;
    let a_minus_inv = (-&minus).exp_one_sided(out_radius)?;
    let a_plus = plus.exp_one_sided(out_radius)?;
    let a_plus_inv = (-&plus).exp_one_sided(out_radius)?;
    let b = a_minus.multiply(&a_plus_inv).truncate(out_radius);
    let c = a_minus_inv.multiply(&a_plus).truncate(out_radius);

    let grid = transform_grid(a.radius(), out_radius);
    let product = a_minus.multiply(&a_plus).sample(grid);
    let residual =
        a.sample(grid).iter().zip(&product).fold(0.0f64, |m, (x, y)| m.max((x.clone() - y.clone()).modulus().to_f64()));

    let mut factors = WienerHopfFactors {
        symbol: a.clone(),
        out_radius,
        tol,
        a_minus,
        a_plus,
        a_minus_inv,
        a_plus_inv,
        b,
        c,
        g_const: log.coeff(0).cexp(),
        e_const: Complex::zero(),
        e_tail: None,
        log_coeffs: log,
        residual,
    };
    let e = e_constant(&factors);
    factors.e_const = e.value;
    factors.e_tail = e.tail;
    Ok(factors)
}

/// `G(a) = exp((log a)_0)`.
pub fn g_constant<T: Real>(factors: &WienerHopfFactors<T>) -> Complex<T> {
    factors.g_const.clone()
}

/// `G(a)` straight from a symbol.
pub fn g_of_symbol<T: Real>(a: &FourierSymbol<T>, out_radius: usize) -> Result<Complex<T>> {
    Ok(a.log_symbol(out_radius)?.symbol.coeff(0).cexp())
}

/// `E(a) = exp(sum_{k=1}^K k (log a)_k (log a)_{-k})` over the stored coefficients.
pub fn e_constant<T: Real>(factors: &WienerHopfFactors<T>) -> EConstant<T> {
    let g = &factors.log_coeffs;
    let top = g.radius() as i64;
    let mut exponent: Complex<T> = Complex::zero();
    let mut last: Complex<T> = Complex::zero();
    // smallest terms first
    for k in (1..=top).rev() {
        let term = g.coeff(k) * g.coeff(-k) * T::from_i64(k);
        if k == top {
            last = term.clone();
        }
        exponent += term;
    }
    let last_term = last.modulus().to_f64();
    let sum = exponent.modulus().to_f64();
    let tail = (last_term > E_TAIL_RATIO * sum).then_some(TailWarning { last_term, sum });
    EConstant { value: exponent.cexp(), exponent, last_term, tail }
}

#[derive(Debug, Clone)]
pub struct GOfBAndC<T: Real> {
    pub g_b: Complex<T>,
    pub g_c: Complex<T>,
    /// Largest relative gap between the two routes.
    pub gap: f64,
}

/// `G(b) = G(a)/G(a_+)^2` and `G(c) = G(a)/G(a_-)^2`, checked against
/// `exp((log b)_0)` and `exp((log c)_0)` computed from `b` and `c` directly.
pub fn g_of_b_and_c<T: Real>(factors: &WienerHopfFactors<T>) -> Result<GOfBAndC<T>> {
    let g_a = factors.g_const.clone();
    let g_plus = factors.a_plus.coeff(0);
    let g_minus = factors.a_minus.coeff(0);
    let g_b = g_a.clone() / (g_plus.clone() * g_plus);
    let g_c = g_a / (g_minus.clone() * g_minus);
    let r = factors.out_radius;
    let direct_b = g_of_symbol(&factors.b, r)?;
    let direct_c = g_of_symbol(&factors.c, r)?;
    let rel = |x: &Complex<T>, y: &Complex<T>| ((x.clone() - y.clone()).modulus() / x.modulus()).to_f64();
    let gap = rel(&g_b, &direct_b).max(rel(&g_c, &direct_c));
    if !(gap <= ROUTE_TOL) {
        return Err(Error::InconsistentRoutes { gap });
    }
    Ok(GOfBAndC { g_b, g_c, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::Mp256;
    use proptest::prelude::*;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn exp_family<T: Real>(r: f64, s: f64, radius: usize) -> FourierSymbol<T> {
        FourierSymbol::<T>::from_f64_terms(&[(-1, r, 0.0), (1, s, 0.0)]).exp_symbol(radius).symbol
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|j| j as f64).product()
    }

    #[test]
    fn exponential_family_splits_exactly() {
        let (r, s) = (0.3, 0.2);
        let a = exp_family::<f64>(r, s, 32);
        let f = wiener_hopf(&a, 32, 1e-12).unwrap();
        for k in 0..=12usize {
            let ki = k as i64;
            assert!((f.a_plus.coeff(ki) - c64(s.powi(k as i32) / factorial(k), 0.0)).norm() < 1e-15);
            assert!((f.a_minus.coeff(-ki) - c64(r.powi(k as i32) / factorial(k), 0.0)).norm() < 1e-15);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((f.a_plus_inv.coeff(ki) - c64(sign * s.powi(k as i32) / factorial(k), 0.0)).norm() < 1e-15);
        }
        assert!((f.g_const - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((f.e_const - c64(0.06f64.exp(), 0.0)).norm() < 1e-13);
        assert!(f.residual < 1e-14);
        let want_b = exp_family::<f64>(r, -s, 32);
        for k in -10..=10 {
            assert!((f.b.coeff(k) - want_b.coeff(k)).norm() < 1e-14, "b_{k}");
        }
    }

    #[test]
    fn constant_symbol() {
        let a = FourierSymbol::constant(c64(5.0, 0.0));
        let f = wiener_hopf(&a, 8, 1e-12).unwrap();
        assert!((f.a_minus.coeff(0) - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((f.a_plus.coeff(0) - c64(5.0, 0.0)).norm() < 1e-14);
        assert!((f.b.coeff(0) - c64(0.2, 0.0)).norm() < 1e-15);
        assert!((f.c.coeff(0) - c64(5.0, 0.0)).norm() < 1e-14);
        assert!(f.b.wiener_norm() - f.b.coeff(0).norm() < 1e-15);
        let g = g_of_b_and_c(&wiener_hopf(&FourierSymbol::constant(c64(4.0, 0.0)), 8, 1e-12).unwrap()).unwrap();
        assert!((g.g_b - c64(0.25, 0.0)).norm() < 1e-15);
        assert!((g.g_c - c64(4.0, 0.0)).norm() < 1e-14);
        let e = e_constant(&f);
        assert!((e.value - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(e.tail.is_none());
    }

    #[test]
    fn elementary_factors_are_recovered() {
        // (1 - 0.4/t)(1 - 0.3t)
        let lm = FourierSymbol::<f64>::from_f64_terms(&[(0, 1.0, 0.0), (-1, -0.4, 0.0)]);
        let lp = FourierSymbol::<f64>::from_f64_terms(&[(0, 1.0, 0.0), (1, -0.3, 0.0)]);
        let a = lm.multiply(&lp);
        let f = wiener_hopf(&a, 64, 1e-10).unwrap();
        assert!(f.residual < 1e-10);
        for k in -3..=3 {
            assert!((f.a_minus.coeff(k) - lm.coeff(k)).norm() < 1e-12, "a_minus_{k}");
            assert!((f.a_plus.coeff(k) - lp.coeff(k)).norm() < 1e-12, "a_plus_{k}");
        }
    }

    #[test]
    fn g_and_e_examples() {
        let f = wiener_hopf(&FourierSymbol::constant(c64(4.0, 0.0)), 8, 1e-12).unwrap();
        assert!((g_constant(&f) - c64(4.0, 0.0)).norm() < 1e-14);
        let f = wiener_hopf(&exp_family::<f64>(0.3, 0.2, 32), 32, 1e-12).unwrap();
        assert!((g_constant(&f) - c64(1.0, 0.0)).norm() < 1e-14);
        let g = g_of_b_and_c(&f).unwrap();
        assert!((g.g_b - c64(1.0, 0.0)).norm() < 1e-13 && (g.g_c - c64(1.0, 0.0)).norm() < 1e-13);
        // symmetric log coefficients give E >= 1
        let sym = FourierSymbol::<f64>::from_f64_terms(&[(-2, 0.1, 0.0), (-1, 0.3, 0.0), (1, 0.3, 0.0), (2, 0.1, 0.0)]);
        let f = wiener_hopf(&sym.exp_symbol(64).symbol, 64, 1e-12).unwrap();
        assert!(f.e_const.re >= 1.0 && f.e_const.im.abs() < 1e-14);
    }

    #[test]
    fn nonzero_index_is_rejected() {
        let a = FourierSymbol::<f64>::from_f64_terms(&[(1, 1.0, 0.0), (0, 0.2, 0.0)]);
        assert_eq!(wiener_hopf(&a, 16, 1e-12).unwrap_err(), Error::NonzeroIndex { index: 1 });
        let vanishing = FourierSymbol::<f64>::from_f64_terms(&[(0, 1.0, 0.0), (1, -1.0, 0.0)]);
        assert!(matches!(wiener_hopf(&vanishing, 16, 1e-12), Err(Error::NearZeroOnCircle { .. })));
    }

    #[test]
    fn residual_retry_then_failure() {
        let a = exp_family::<f64>(1.5, 1.2, 64);
        // radius 4 is far too small; 8 still too small
        assert!(matches!(wiener_hopf(&a, 4, 1e-12), Err(Error::ResidualTooLarge { .. })));
        // 16 fails, the retry at 32 succeeds
        let f = wiener_hopf(&a, 16, 1e-12).unwrap();
        assert_eq!(f.out_radius, 32);
    }

    #[test]
    fn mp_factors_hit_extended_precision() {
        let terms = [(-1, "0.3"), (1, "0.2")];
        let g = FourierSymbol::<Mp256>::from_terms(
            terms.iter().map(|(k, v)| (*k, Complex::new(Mp256::parse_decimal(v).unwrap(), Mp256::zero()))),
        );
        let a = g.exp_symbol(64).symbol;
        let f = wiener_hopf(&a, 64, 1e-60).unwrap();
        let want = Mp256::parse_decimal("0.06").unwrap().exp();
        assert!((f.e_const.re.clone() - want).abs().to_f64() < 1e-65);
        assert!(f.g_const.im.abs().to_f64() < 1e-70);
    }

    fn small_log() -> impl Strategy<Value = FourierSymbol<f64>> {
        prop::collection::vec((-0.15f64..0.15, -0.15f64..0.15), 7)
            .prop_map(|v| FourierSymbol::from_dense(3, v.into_iter().map(|(x, y)| c64(x, y)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn factor_invariants(g in small_log(), h in small_log()) {
            let a = g.exp_symbol(96).symbol;
            let f = wiener_hopf(&a, 48, 1e-10).unwrap();
            prop_assert!(f.residual <= 1e-10);
            for k in 1..=f.out_radius as i64 {
                prop_assert!(f.a_minus.coeff(k).is_zero() && f.a_minus_inv.coeff(k).is_zero());
                prop_assert!(f.a_plus.coeff(-k).is_zero() && f.a_plus_inv.coeff(-k).is_zero());
            }
            prop_assert_eq!(f.a_minus.coeff(0), c64(1.0, 0.0));
            let one = FourierSymbol::constant(c64(1.0, 0.0));
            let r = f.out_radius;
            prop_assert!((&f.a_minus.multiply(&f.a_minus_inv).truncate(r) - &one).wiener_norm() < 1e-10);
            prop_assert!((&f.a_plus.multiply(&f.a_plus_inv).truncate(r) - &one).wiener_norm() < 1e-10);
            let bc = g_of_b_and_c(&f).unwrap();
            let gp2 = f.a_plus.coeff(0) * f.a_plus.coeff(0);
            prop_assert!((bc.g_b * bc.g_c * gp2 / (f.g_const * f.g_const) - c64(1.0, 0.0)).norm() < 1e-10);

            // G is multiplicative
            let b_sym = h.exp_symbol(96).symbol;
            let gab = g_of_symbol(&a.multiply(&b_sym), 96).unwrap();
            let ga = g_of_symbol(&a, 96).unwrap();
            let gb = g_of_symbol(&b_sym, 96).unwrap();
            prop_assert!((gab - ga * gb).norm() < 1e-10 * (ga * gb).norm());
        }
    }
}
