//! Closed-form two-photon correlation patterns.
//!
//! Positions are in mm, transverse wavenumbers in 1/mm, the wavelength in nm.
//! Every evaluator returns `amplitude·G²(x - x0) + background`, where `G²` is
//! the unnormalised closed-form coincidence profile; the absolute scale is
//! left to the `amplitude` parameter.
//!
//! The erfc terms of the focal-plane (ghost interference) profile have
//! complex arguments whose modulus grows linearly with `x`, so
//! `|erfc(A)|` overflows long before the Gaussian prefactor underflows.
//! They are evaluated through `exp(-G·x²)·erfc(z) = exp(-G·x² - z²)·w(iz)`,
//! where the combined exponent stays bounded.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::specfun::{erfc, faddeeva};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid optical configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid source parameters: {0}")]
    InvalidSource(String),
    #[error("invalid pattern parameters: {0}")]
    InvalidParams(String),
}

/// Deterministic geometry of the setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalConfig<T = f64> {
    /// Collimating lens focal length (mm).
    pub f: T,
    /// Detection lens focal length (mm).
    pub f_a: T,
    /// Optical wavelength (nm).
    pub lambda_nm: T,
    /// Gaussian envelope waist of the object transmittance (mm).
    pub omega_0: T,
    /// Width of the central block (mm).
    pub omega_b: T,
}

impl<T: Scalar> OpticalConfig<T> {
    /// f = 500 mm, f_A = 25.4 mm, λ = 780 nm, ω₀ = 2.0 mm, ω_b = 1.04 mm.
    pub fn standard() -> Self {
        Self {
            f: T::lit(500.0),
            f_a: T::lit(25.4),
            lambda_nm: T::lit(780.0),
            omega_0: T::lit(2.0),
            omega_b: T::lit(1.04),
        }
    }

    pub fn lambda_mm(&self) -> T {
        self.lambda_nm * T::lit(1e-6)
    }

    /// Scale factor `λf/2π` (mm²) mapping wavenumber on the Signal-1 side to
    /// position on the object plane.
    pub fn k_to_r(&self) -> T {
        self.lambda_mm() * self.f / (T::lit(2.0) * T::PI())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("f", self.f),
            ("f_a", self.f_a),
            ("lambda_nm", self.lambda_nm),
            ("omega_0", self.omega_0),
            ("omega_b", self.omega_b),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > T::zero()) {
                return Err(ModelError::InvalidConfig(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.omega_b >= T::lit(6.0) * self.omega_0 {
            return Err(ModelError::InvalidConfig(format!(
                "omega_b ({}) must be below 6*omega_0 ({})",
                self.omega_b,
                T::lit(6.0) * self.omega_0
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for OpticalConfig<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// Widths of the double-Gaussian biphoton amplitude (1/mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams<T = f64> {
    /// Width of the momentum-sum correlation ε_p.
    pub sigma_p: T,
    /// Width of the momentum-difference correlation ε_x.
    pub sigma_x: T,
}

impl<T: Scalar> SourceParams<T> {
    pub fn new(sigma_p: T, sigma_x: T) -> Result<Self, ModelError> {
        let s = Self { sigma_p, sigma_x };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.sigma_p.is_finite() && self.sigma_p > T::zero()) {
            return Err(ModelError::InvalidSource(format!("sigma_p must be > 0, got {}", self.sigma_p)));
        }
        if !(self.sigma_x.is_finite() && self.sigma_x > T::zero()) {
            return Err(ModelError::InvalidSource(format!("sigma_x must be > 0, got {}", self.sigma_x)));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SourceParams<T> {
    fn default() -> Self {
        Self { sigma_p: T::lit(3.25), sigma_x: T::lit(12.0) }
    }
}

/// Wraps an angle into `[-π, π]`; values already in range (including ±π) are kept.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let pi = T::PI();
    if theta >= -pi && theta <= pi {
        return theta;
    }
    let two_pi = pi + pi;
    let mut t = theta % two_pi;
    if t > pi {
        t = t - two_pi;
    } else if t < -pi {
        t = t + two_pi;
    }
    t
}

/// Double-slit phase object: a Gaussian envelope with a central block and a
/// relative phase `theta` on the right-hand window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseObject<T = f64> {
    pub theta: T,
    pub omega_b: T,
    pub omega_0: T,
}

impl<T: Scalar> PhaseObject<T> {
    pub fn new(theta: T, omega_b: T, omega_0: T) -> Self {
        Self { theta: wrap_angle(theta), omega_b, omega_0 }
    }

    pub fn from_config(config: &OpticalConfig<T>, theta: T) -> Self {
        Self::new(theta, config.omega_b, config.omega_0)
    }
}

fn heaviside<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        T::zero()
    } else {
        T::lit(0.5)
    }
}

/// Object transmittance `exp(-r²/ω₀²)·(1 - Π(r/ω_b, θ))` with
/// `Π(x, θ) = H(x + ½) - e^{iθ}·H(x - ½)` and `H(0) = ½`.
pub fn transmittance<T: Scalar>(r: T, obj: &PhaseObject<T>) -> Complex<T> {
    let x = r / obj.omega_b;
    let half = T::lit(0.5);
    let phase = Complex::from_polar(T::one(), obj.theta);
    let window = Complex::new(T::one() - heaviside(x + half), T::zero()) + phase * heaviside(x - half);
    window * (-(r * r) / (obj.omega_0 * obj.omega_0)).exp()
}

/// Full parameterisation of a fitted or simulated scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternParams<T = f64> {
    pub config: OpticalConfig<T>,
    pub source: SourceParams<T>,
    /// Relative phase between the slit windows (rad).
    pub theta: T,
    pub amplitude: T,
    /// Scan-centre offset (mm).
    pub x0: T,
    pub background: T,
}

impl<T: Scalar> PatternParams<T> {
    pub fn new(config: OpticalConfig<T>, source: SourceParams<T>, theta: T) -> Result<Self, ModelError> {
        let p = Self {
            config,
            source,
            theta: wrap_angle(theta),
            amplitude: T::one(),
            x0: T::zero(),
            background: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_scale(mut self, amplitude: T, x0: T, background: T) -> Self {
        self.amplitude = amplitude;
        self.x0 = x0;
        self.background = background;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.config.validate()?;
        self.source.validate()?;
        if !(self.amplitude.is_finite() && self.amplitude >= T::zero()) {
            return Err(ModelError::InvalidParams(format!("amplitude must be >= 0, got {}", self.amplitude)));
        }
        if !(self.background.is_finite() && self.background >= T::zero()) {
            return Err(ModelError::InvalidParams(format!("background must be >= 0, got {}", self.background)));
        }
        if !self.x0.is_finite() || !self.theta.is_finite() {
            return Err(ModelError::InvalidParams("x0 and theta must be finite".into()));
        }
        Ok(())
    }
}

/// Output port of the Mach–Zehnder OAM sorter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    /// Horizontal polarisation, symmetric part (C1).
    H,
    /// Vertical polarisation, antisymmetric part (C2).
    V,
}

/// Which closed form [`mz_pattern_with`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MzForm {
    /// Exact channel split `(E(x) ± E(-x))/2` of the focal-plane amplitude.
    #[default]
    Symmetrized,
    /// `(g/2)·(erfc A + erfc B ± 2·erfc r)`, the three-term expression with an
    /// x-independent third erfc. Coincides with `Symmetrized` only as ω_b → 0.
    AsPrinted,
}

/// Which closed-form profile to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternModel {
    Interference,
    Image,
    Sorter(Channel),
}

impl PatternModel {
    pub fn eval<T: Scalar>(&self, x: T, p: &PatternParams<T>) -> T {
        match *self {
            PatternModel::Interference => interference_pattern(x, p),
            PatternModel::Image => image_pattern(x, p),
            PatternModel::Sorter(ch) => mz_pattern(x, p, ch),
        }
    }
}

/// Precomputed coefficients of the focal-plane closed form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FocalTerms<T> {
    prefactor: T,
    // exp(-gauss·x²) part left after the erfc growth is absorbed
    gauss: T,
    // real part of the erfc arguments
    r: T,
    // imaginary part of the erfc arguments per unit x
    u_per_x: T,
}

impl<T: Scalar> FocalTerms<T> {
    pub(crate) fn new(cfg: &OpticalConfig<T>, src: &SourceParams<T>) -> Self {
        let pi = T::PI();
        let two = T::lit(2.0);
        let lambda = cfg.lambda_mm();
        let s = src.sigma_p * src.sigma_p;
        let t = T::lit(4.0) * src.sigma_x * src.sigma_x;
        let beta = cfg.f / cfg.f_a;
        let w0 = cfg.omega_0;
        let k = T::lit(8.0) * pi * pi * w0 * w0 + cfg.f * cfg.f * (s + t) * lambda * lambda;
        Self {
            prefactor: src.sigma_p * src.sigma_x * w0 / k.sqrt(),
            gauss: beta * beta * s * t / (two * (s + t)),
            r: cfg.omega_b * k.sqrt() / (two * cfg.f * w0 * lambda * (s + t).sqrt()),
            u_per_x: pi * w0 * beta * (t - s) / ((s + t) * k).sqrt(),
        }
    }

    /// Returns `g(x)·erfc(r + iu)` and `g(x)·erfc(r - iu)` without the prefactor.
    fn windows(&self, x: T) -> (Complex<T>, Complex<T>) {
        let u = self.u_per_x * x;
        let r = self.r;
        let two = T::lit(2.0);
        let damp = (-(self.gauss * x * x) - r * r).exp();
        let left = Complex::from_polar(damp, -two * r * u) * faddeeva(Complex::new(-u, r));
        let right = Complex::from_polar(damp, two * r * u) * faddeeva(Complex::new(u, r));
        (left, right)
    }

    fn amplitude(&self, x: T, theta: T) -> Complex<T> {
        let (left, right) = self.windows(x);
        (left + Complex::from_polar(T::one(), theta) * right) * self.prefactor
    }

    fn channel(&self, x: T, theta: T, channel: Channel, form: MzForm) -> Complex<T> {
        let (left, right) = self.windows(x);
        let half = T::lit(0.5);
        let phase = Complex::from_polar(T::one(), theta);
        let one = Complex::new(T::one(), T::zero());
        match form {
            MzForm::Symmetrized => match channel {
                Channel::H => (one + phase) * (left + right) * (self.prefactor * half),
                Channel::V => (one - phase) * (left - right) * (self.prefactor * half),
            },
            MzForm::AsPrinted => {
                let u = self.u_per_x * x;
                let third = T::lit(2.0) * erfc(self.r) * (-(self.gauss * x * x) - u * u).exp();
                let sign = match channel {
                    Channel::H => T::one(),
                    Channel::V => -T::one(),
                };
                (left + right + Complex::new(sign * third, T::zero())) * (self.prefactor * half)
            }
        }
    }
}

/// Precomputed coefficients of the image-plane closed form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImageTerms<T> {
    prefactor: T,
    gauss: T,
    // erfc argument = (offset + slope·x) for the left window, (offset - slope·x) for the right
    offset: T,
    slope: T,
}

impl<T: Scalar> ImageTerms<T> {
    pub(crate) fn new(cfg: &OpticalConfig<T>, src: &SourceParams<T>) -> Self {
        let pi = T::PI();
        let two = T::lit(2.0);
        let lambda = cfg.lambda_mm();
        let s = src.sigma_p * src.sigma_p;
        let t = T::lit(4.0) * src.sigma_x * src.sigma_x;
        let w0 = cfg.omega_0;
        let f = cfg.f;
        let k = T::lit(8.0) * pi * pi * w0 * w0 + f * f * (s + t) * lambda * lambda;
        let m = two * pi * pi * (s + t) * w0 * w0 + f * f * lambda * lambda * s * t;
        let den = two * f * w0 * lambda * (s * t).sqrt() * m.sqrt();
        let w0sq = w0 * w0;
        Self {
            prefactor: src.sigma_p * src.sigma_x * w0 / m.sqrt(),
            gauss: two * pi * pi * k / (f * f * lambda * lambda * m),
            offset: (two * pi * pi * w0sq * (s + t) * cfg.omega_b + f * f * lambda * lambda * s * t * cfg.omega_b)
                / den,
            slope: T::lit(4.0) * pi * pi * w0sq * (s - t) / den,
        }
    }

    fn amplitude(&self, x: T, theta: T) -> Complex<T> {
        let left = erfc(self.offset + self.slope * x);
        let right = erfc(self.offset - self.slope * x);
        let g = self.prefactor * (-(self.gauss * x * x)).exp();
        (Complex::new(left, T::zero()) + Complex::from_polar(right, theta)) * g
    }
}

/// Raw focal-plane (ghost interference) amplitude at offset `x` from the centre.
pub fn interference_amplitude<T: Scalar>(x: T, cfg: &OpticalConfig<T>, src: &SourceParams<T>, theta: T) -> Complex<T> {
    FocalTerms::new(cfg, src).amplitude(x, theta)
}

/// Raw image-plane (ghost imaging) amplitude at offset `x` from the centre.
pub fn image_amplitude<T: Scalar>(x: T, cfg: &OpticalConfig<T>, src: &SourceParams<T>, theta: T) -> Complex<T> {
    ImageTerms::new(cfg, src).amplitude(x, theta)
}

/// Raw sorter-channel amplitude at offset `x` from the centre.
pub fn mz_amplitude<T: Scalar>(
    x: T,
    cfg: &OpticalConfig<T>,
    src: &SourceParams<T>,
    theta: T,
    channel: Channel,
    form: MzForm,
) -> Complex<T> {
    FocalTerms::new(cfg, src).channel(x, theta, channel, form)
}

/// Ghost-interference coincidence profile.
pub fn interference_pattern<T: Scalar>(x: T, p: &PatternParams<T>) -> T {
    let a = interference_amplitude(x - p.x0, &p.config, &p.source, p.theta);
    p.amplitude * a.norm_sqr() + p.background
}

/// Ghost-imaging coincidence profile.
pub fn image_pattern<T: Scalar>(x: T, p: &PatternParams<T>) -> T {
    let a = image_amplitude(x - p.x0, &p.config, &p.source, p.theta);
    p.amplitude * a.norm_sqr() + p.background
}

/// Ghost interference behind the Mach–Zehnder sorter, exact channel split.
pub fn mz_pattern<T: Scalar>(x: T, p: &PatternParams<T>, channel: Channel) -> T {
    mz_pattern_with(x, p, channel, MzForm::Symmetrized)
}

pub fn mz_pattern_with<T: Scalar>(x: T, p: &PatternParams<T>, channel: Channel, form: MzForm) -> T {
    let a = mz_amplitude(x - p.x0, &p.config, &p.source, p.theta, channel, form);
    p.amplitude * a.norm_sqr() + p.background
}

/// Evaluates a whole curve, reusing the precomputed coefficients.
pub fn pattern_curve<T: Scalar>(model: PatternModel, xs: &[T], p: &PatternParams<T>) -> Vec<T> {
    match model {
        PatternModel::Interference => {
            let terms = FocalTerms::new(&p.config, &p.source);
            xs.iter().map(|&x| p.amplitude * terms.amplitude(x - p.x0, p.theta).norm_sqr() + p.background).collect()
        }
        PatternModel::Image => {
            let terms = ImageTerms::new(&p.config, &p.source);
            xs.iter().map(|&x| p.amplitude * terms.amplitude(x - p.x0, p.theta).norm_sqr() + p.background).collect()
        }
        PatternModel::Sorter(ch) => {
            let terms = FocalTerms::new(&p.config, &p.source);
            xs.iter()
                .map(|&x| {
                    p.amplitude * terms.channel(x - p.x0, p.theta, ch, MzForm::Symmetrized).norm_sqr() + p.background
                })
                .collect()
        }
    }
}

/// Averages `pattern` over a rectangular aperture of full width `width`
/// centred on `x`, using `samples` midpoint subsamples.
pub fn aperture_average<T: Scalar, F: Fn(T) -> T>(pattern: F, x: T, width: T, samples: usize) -> T {
    if width <= T::zero() || samples == 0 {
        return pattern(x);
    }
    let n = T::of_usize(samples);
    let step = width / n;
    let start = x - width / T::lit(2.0) + step / T::lit(2.0);
    let sum = (0..samples).fold(T::zero(), |acc, i| acc + pattern(start + step * T::of_usize(i)));
    sum / n
}

/// Indices of strict local maxima whose height above `floor` exceeds
/// `min_fraction` of the largest such height.
pub fn significant_maxima<T: Scalar>(values: &[T], floor: T, min_fraction: T) -> Vec<usize> {
    let top = values.iter().fold(T::zero(), |m, &v| m.max(v - floor));
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .filter(|&i| values[i] - floor > min_fraction * top)
        .collect()
}

/// `(pattern(x0) - background)/(peak - background)`, with the peak taken over
/// `n` uniform samples of `[x0 - half_width, x0 + half_width]`.
pub fn central_fraction<T: Scalar>(model: PatternModel, p: &PatternParams<T>, half_width: T, n: usize) -> T {
    let step = (half_width + half_width) / T::of_usize(n.max(2) - 1);
    let xs: Vec<T> = (0..n).map(|i| p.x0 - half_width + step * T::of_usize(i)).collect();
    let peak = pattern_curve(model, &xs, p).into_iter().fold(T::zero(), T::max) - p.background;
    if peak <= T::zero() {
        return T::zero();
    }
    (model.eval(p.x0, p) - p.background) / peak
}
