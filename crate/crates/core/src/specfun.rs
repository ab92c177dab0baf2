//! Complex error functions.
//!
//! The Faddeeva function `w(z) = exp(-z²)·erfc(-iz)` is evaluated with three
//! region-switched kernels, all valid in the closed upper half plane:
//!
//! * `|z| < 1.5`: Taylor series `Σ (iz)ⁿ / Γ(n/2 + 1)` (also used below the axis),
//! * `1.5 ≤ |z| < 8`: Weideman's rational approximation with 40 terms,
//! * `|z| ≥ 8`: Laplace continued fraction, 30 levels.
//!
//! The lower half plane is reached through `w(z) = 2·exp(-z²) - w(-z)`.
//! For `f64` the relative error is below 1e-12 for `|z| ≤ 10`.
//!
//! # Saturation
//!
//! `exp(-z²)` overflows when `(Im z)² - (Re z)²` exceeds `ln(MAX)`; this only
//! happens for `Im z < 0` in [`faddeeva`] and for `|Im z| > |Re z|` in
//! [`erfc_complex`]. There the real part of the exponent is clamped to
//! `ln(MAX) - ln 4` (≈ 707.7 for `f64`, ≈ 87.3 for `f32`), so results stay
//! finite with the correct phase. No saturation occurs for `f64` inputs with
//! `|Re z|, |Im z| ≤ 25`.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::scalar::Scalar;

const SERIES_RADIUS: f64 = 1.5;
const CONTINUED_FRACTION_RADIUS: f64 = 8.0;
const CONTINUED_FRACTION_DEPTH: usize = 30;
const WEIDEMAN_TERMS: usize = 40;

struct Weideman {
    l: f64,
    // coefficient of Z^(n-1), n = 1..=N
    coeffs: [f64; WEIDEMAN_TERMS],
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // g(k) = exp(-t²)(L² + t²), t = L·tan(kπ/2M); g(-M) = 0.
        let g = |k: i64| -> f64 {
            if k.unsigned_abs() as usize == m {
                return 0.0;
            }
            let theta = k as f64 * std::f64::consts::PI / m as f64;
            let t = l * (theta / 2.0).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let mut coeffs = [0.0; WEIDEMAN_TERMS];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let freq = (idx + 1) as f64;
            let mut acc = 0.0;
            for k in -(m as i64)..(m as i64) {
                acc += g(k) * (std::f64::consts::PI * freq * k as f64 / m as f64).cos();
            }
            *c = acc / (2 * m) as f64;
        }
        Weideman { l, coeffs }
    })
}

/// Faddeeva function `w(z) = exp(-z²)·erfc(-iz)`.
///
/// Non-finite input yields NaN components.
pub fn faddeeva<T: Scalar>(z: Complex<T>) -> Complex<T> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Complex::new(T::nan(), T::nan());
    }
    if z.norm() < T::lit(SERIES_RADIUS) {
        return taylor(z);
    }
    if z.im >= T::zero() {
        upper_half(z)
    } else {
        let reflected = upper_half(-z);
        saturating_exp(-(z * z)) * T::lit(2.0) - reflected
    }
}

/// Complementary error function of a complex argument.
pub fn erfc_complex<T: Scalar>(z: Complex<T>) -> Complex<T> {
    if z.re < T::zero() {
        return Complex::new(T::lit(2.0), T::zero()) - erfc_complex(-z);
    }
    // Re z ≥ 0 puts iz in the closed upper half plane.
    let iz = Complex::new(-z.im, z.re);
    saturating_exp(-(z * z)) * faddeeva(iz)
}

/// Error function of a complex argument, `1 - erfc(z)`.
pub fn erf_complex<T: Scalar>(z: Complex<T>) -> Complex<T> {
    Complex::new(T::one(), T::zero()) - erfc_complex(z)
}

/// Real complementary error function.
pub fn erfc<T: Scalar>(x: T) -> T {
    erfc_complex(Complex::new(x, T::zero())).re
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
pub fn erfcx<T: Scalar>(x: T) -> T {
    faddeeva(Complex::new(T::zero(), x)).re
}

fn saturating_exp<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let cap = T::max_value().ln() - T::lit(4.0).ln();
    let re = if z.re > cap { cap } else { z.re };
    Complex::from_polar(re.exp(), z.im)
}

fn taylor<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let iz = Complex::new(-z.im, z.re);
    let iz2 = iz * iz;
    let eps = T::epsilon();
    // even and odd chains: t_{n+2} = t_n·(iz)² / (n/2 + 1)
    let mut even = Complex::new(T::one(), T::zero());
    let mut odd = iz * T::lit(2.0 / std::f64::consts::PI.sqrt());
    let mut sum = even + odd;
    let mut n = 0usize;
    loop {
        even = even * iz2 / (T::of_usize(n) / T::lit(2.0) + T::one());
        odd = odd * iz2 / (T::of_usize(n + 1) / T::lit(2.0) + T::one());
        sum = sum + even + odd;
        n += 2;
        let scale = sum.norm().max(T::min_positive_value());
        if (even.norm() + odd.norm()) <= eps * scale * T::lit(0.25) || n > 200 {
            return sum;
        }
    }
}

fn upper_half<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let inv_sqrt_pi = T::lit(1.0 / std::f64::consts::PI.sqrt());
    if z.norm() >= T::lit(CONTINUED_FRACTION_RADIUS) {
        let mut r = Complex::new(T::zero(), T::zero());
        for k in (1..=CONTINUED_FRACTION_DEPTH).rev() {
            r = Complex::new(T::of_usize(k) / T::lit(2.0), T::zero()) / (z - r);
        }
        return Complex::new(T::zero(), inv_sqrt_pi) / (z - r);
    }
    let table = weideman();
    let l = Complex::new(T::lit(table.l), T::zero());
    let iz = Complex::new(-z.im, z.re);
    let denom = l - iz;
    let zz = (l + iz) / denom;
    let mut poly = Complex::new(T::zero(), T::zero());
    for &c in table.coeffs.iter().rev() {
        poly = poly * zz + T::lit(c);
    }
    poly * T::lit(2.0) / (denom * denom) + Complex::new(inv_sqrt_pi, T::zero()) / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn w_at_origin_is_one() {
        assert_eq!(faddeeva(C::new(0.0, 0.0)), C::new(1.0, 0.0));
    }

    #[test]
    fn w_on_imaginary_unit() {
        let w = faddeeva(C::new(0.0, 1.0));
        assert!(rel(w, C::new(0.427_583_576_155_807, 0.0)) < 1e-14);
    }

    #[test]
    fn region_boundaries_are_continuous() {
        for &r in &[SERIES_RADIUS, CONTINUED_FRACTION_RADIUS] {
            for k in 0..16 {
                let phase = std::f64::consts::PI * k as f64 / 15.0;
                let inside = C::from_polar(r * (1.0 - 1e-12), phase);
                let outside = C::from_polar(r * (1.0 + 1e-12), phase);
                assert!(rel(faddeeva(inside), faddeeva(outside)) < 1e-11, "r={r} k={k}");
            }
        }
    }

    #[test]
    fn no_nan_on_box() {
        let n = 101;
        for i in 0..n {
            for j in 0..n {
                let z = C::new(-25.0 + 0.5 * i as f64, -25.0 + 0.5 * j as f64);
                let w = faddeeva(z);
                let e = erfc_complex(z);
                assert!(w.re.is_finite() && w.im.is_finite(), "w({z})");
                assert!(e.re.is_finite() && e.im.is_finite(), "erfc({z})");
            }
        }
    }

    #[test]
    fn saturates_instead_of_overflowing() {
        let w = faddeeva(C::new(0.0, -40.0));
        assert!(w.re.is_finite() && w.re > 1e300);
        let w32 = faddeeva(Complex::<f32>::new(0.0, -15.0));
        assert!(w32.re.is_finite());
    }

    #[test]
    fn nonfinite_input_gives_nan() {
        assert!(faddeeva(C::new(f64::NAN, 0.0)).re.is_nan());
    }

    #[test]
    fn real_erfc_limits() {
        assert_eq!(erfc(0.0f64), 1.0);
        assert!((erfc(1.0f64) - 0.157_299_207_050_285_13).abs() < 1e-16);
        assert!((erfc(-30.0f64) - 2.0).abs() < 1e-15);
        assert_eq!(erfc(40.0f64), 0.0);
        assert!((erfcx(3.0f64) - 0.179_001_151_181_389_98).abs() < 1e-14);
    }

    #[test]
    fn single_precision_tracks_double() {
        for &(x, y) in &[(0.3, 0.2), (2.0, 1.0), (-3.0, 4.0), (9.0, 0.5)] {
            let w64 = faddeeva(C::new(x, y));
            let w32 = faddeeva(Complex::<f32>::new(x as f32, y as f32));
            let d = C::new(w32.re as f64, w32.im as f64);
            assert!(rel(d, w64) < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn reflection_symmetry(x in -12.0f64..12.0, y in -5.0f64..12.0) {
            let z = C::new(x, y);
            let lhs = faddeeva(-z.conj());
            let rhs = faddeeva(z).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1e-300));
        }

        #[test]
        fn erfc_reflection(x in -6.0f64..6.0, y in -6.0f64..6.0) {
            let z = C::new(x, y);
            let s = erfc_complex(z) + erfc_complex(-z);
            let scale = erfc_complex(z).norm().max(erfc_complex(-z).norm()).max(1.0);
            prop_assert!((s - C::new(2.0, 0.0)).norm() <= 1e-13 * scale);
        }
    }
}
