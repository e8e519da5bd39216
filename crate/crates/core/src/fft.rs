//! Radix-2 FFT over any [`Real`] scalar.
//!
//! `rustfft` is limited to primitive floats, so the multiprecision path needs
//! its own transform. Twiddle factors are cached per thread and per length;
//! only an eighth of the circle is evaluated with `sin`/`cos`.

use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

thread_local! {
    static TWIDDLES: RefCell<HashMap<(TypeId, usize), Rc<dyn Any>>> = RefCell::new(HashMap::new());
}

/// `exp(2 pi i k / n)` for `k < n / 2`.
fn twiddles<T: Real>(n: usize) -> Rc<Vec<Complex<T>>> {
    let key = (TypeId::of::<T>(), n);
    if let Some(hit) = TWIDDLES.with(|t| t.borrow().get(&key).cloned()) {
        if let Ok(w) = hit.downcast::<Vec<Complex<T>>>() {
            return w;
        }
    }
    let w = Rc::new(build_twiddles::<T>(n));
    TWIDDLES.with(|t| t.borrow_mut().insert(key, w.clone() as Rc<dyn Any>));
    w
}

fn build_twiddles<T: Real>(n: usize) -> Vec<Complex<T>> {
    let half = n / 2;
    let step = T::two_pi() / T::from_usize(n);
    if n < 8 {
        return (0..half)
            .map(|k| {
                let th = step.clone() * T::from_usize(k);
                Complex::new(th.cos(), th.sin())
            })
            .collect();
    }
    let eighth = n / 8;
    let quarter = n / 4;
    let mut base: Vec<(T, T)> = Vec::with_capacity(eighth + 1);
    for k in 0..=eighth {
        let th = step.clone() * T::from_usize(k);
        base.push((th.cos(), th.sin()));
    }
    let mut w = Vec::with_capacity(half);
    for k in 0..half {
        let (c, s) = if k <= eighth {
            base[k].clone()
        } else if k <= quarter {
            let (c, s) = base[quarter - k].clone();
            (s, c)
        } else {
            // k in (n/4, n/2): angle = pi - angle(n/2 - k)
            let m = half - k;
            let (c, s) = if m <= eighth {
                base[m].clone()
            } else {
                let (c, s) = base[quarter - m].clone();
                (s, c)
            };
            (-c, s)
        };
        w.push(Complex::new(c, s));
    }
    w
}

/// In-place unnormalized DFT. `inverse = false` uses `exp(-2 pi i jk / n)`,
/// `inverse = true` uses `exp(+2 pi i jk / n)`.
///
/// # Panics
/// If the length is not a power of two.
pub fn fft_in_place<T: Real>(data: &mut [Complex<T>], inverse: bool) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let w = twiddles::<T>(n);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let tw = &w[k * stride];
                let tw = if inverse { tw.clone() } else { tw.conj() };
                let odd = data[start + k + half].clone() * tw;
                let even = data[start + k].clone();
                data[start + k] = even.clone() + odd.clone();
                data[start + k + half] = even - odd;
            }
        }
        len <<= 1;
    }
}

/// Values `sum_k c_k exp(2 pi i jk / n)` at `j = 0..n`, for coefficients
/// `coeffs[k + radius]` with `|k| <= radius`. Coefficients are folded modulo
/// `n`, which is exact for evaluation on the grid.
pub fn sample_on_grid<T: Real>(coeffs: &[Complex<T>], radius: usize, n: usize) -> Vec<Complex<T>> {
    let mut buf = vec![Complex::<T>::zero(); n];
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as i64 - radius as i64;
        let slot = k.rem_euclid(n as i64) as usize;
        buf[slot] += c.clone();
    }
    fft_in_place(&mut buf, true);
    buf
}

/// Fourier coefficients `c_k`, `|k| <= radius`, of grid samples; inverse of
/// [`sample_on_grid`] when `2 * radius < n`.
pub fn coefficients_from_samples<T: Real>(samples: &[Complex<T>], radius: usize) -> Vec<Complex<T>> {
    let n = samples.len();
    assert!(2 * radius < n, "radius {radius} does not fit a grid of {n} points");
    let mut buf = samples.to_vec();
    fft_in_place(&mut buf, false);
    let scale = T::one() / T::from_usize(n);
    (0..=2 * radius)
        .map(|i| {
            let k = i as i64 - radius as i64;
            let slot = k.rem_euclid(n as i64) as usize;
            buf[slot].clone().scale(scale.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::Mp256;
    use crate::scalar::ComplexExt;

    fn naive(data: &[Complex<f64>], sign: f64) -> Vec<Complex<f64>> {
        let n = data.len();
        (0..n)
            .map(|j| {
                data.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (k, x)| {
                    let th = sign * 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc + x * Complex::new(th.cos(), th.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_at_every_length() {
        for n in [1usize, 2, 4, 8, 16, 64, 256] {
            let data: Vec<Complex<f64>> = (0..n).map(|k| Complex::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos())).collect();
            for inverse in [false, true] {
                let mut got = data.clone();
                fft_in_place(&mut got, inverse);
                let want = naive(&data, if inverse { 1.0 } else { -1.0 });
                let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-12 * n as f64, "n={n} inverse={inverse} err={err}");
            }
        }
    }

    #[test]
    fn octant_twiddles_match_direct_evaluation() {
        let n = 1024;
        let w = build_twiddles::<f64>(n);
        for (k, z) in w.iter().enumerate() {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            assert!((z - Complex::new(th.cos(), th.sin())).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn sample_then_recover_round_trips() {
        let radius = 5;
        let coeffs: Vec<Complex<f64>> = (0..=2 * radius).map(|i| Complex::new(i as f64, -(i as f64) / 3.0)).collect();
        let samples = sample_on_grid(&coeffs, radius, 32);
        let back = coefficients_from_samples(&samples, radius);
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn multiprecision_transform_is_exact_to_working_precision() {
        let radius = 3;
        let coeffs: Vec<Complex<Mp256>> = (0..=2 * radius).map(|i| crate::scalar::complex(1.0 / (i as f64 + 1.0), 0.5)).collect();
        let samples = sample_on_grid(&coeffs, radius, 64);
        let back = coefficients_from_samples(&samples, radius);
        for (a, b) in coeffs.iter().zip(&back) {
            let d = (a.clone() - b.clone()).modulus();
            assert!(d.to_f64() < 1e-70, "{d}");
        }
    }
}
