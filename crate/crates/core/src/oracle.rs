//! Brute-force propagation of the biphoton amplitude.
//!
//! The Signal-1 detector sits on axis, so its field reduces to the object
//! transmittance sampled at `r = λf·k₁/2π`. The Signal-2 amplitude at scan
//! position `x` is then
//!
//! ```text
//! E(x) = ∬ dk₁ dk₂ ε_p(k₁+k₂)·ε_x((k₁-k₂)/2)·Γ(λf·k₁/2π; θ)·T(k₂, x)
//! ```
//!
//! with `T = exp(-i·(f/f_A)·k₂·x)` in the focal plane and a delta
//! selecting `k₂ = 2πx/(λf)` in the image plane. Both integrals use the
//! trapezoid rule on uniform grids. The object is zero over the central block,
//! so `k₁` is integrated only over the two open windows `±[c, K]`,
//! `c = πω_b/(λf)`, which keeps the integrand smooth on each piece.
//!
//! Every result is checked against a second evaluation with both grids
//! doubled; the finer one is returned together with the observed change.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ops::Add;
use thiserror::Error;

use crate::optics::{transmittance, Channel, ModelError, OpticalConfig, PhaseObject, SourceParams};
use crate::scalar::Scalar;
use crate::specfun::erfc;

/// Smallest sample count accepted for a [`SampledField`].
pub const MIN_FIELD_SAMPLES: usize = 256;
/// Largest kernel mass allowed outside a wavenumber grid.
pub const MAX_TAIL_MASS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too narrow: kernel mass {mass:e} outside [{lo}, {hi}] exceeds {limit:e}")]
    GridTooNarrow { mass: f64, lo: f64, hi: f64, limit: f64 },
    #[error("quadrature did not converge: grid doubling changed the result by {change:e} (limit {limit:e})")]
    NonConvergence { change: f64, limit: f64 },
    #[error("invalid OAM weights: {0}")]
    InvalidWeights(String),
}

/// Coordinate domain of a [`SampledField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Transverse position (mm).
    Position,
    /// Transverse wavenumber (1/mm).
    Wavenumber,
}

/// Complex samples on a uniform, strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T = f64> {
    pub grid: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub domain: Domain,
}

impl<T: Scalar> SampledField<T> {
    pub fn new(grid: Vec<T>, values: Vec<Complex<T>>, domain: Domain) -> Result<Self, OracleError> {
        check_uniform(&grid)?;
        if values.len() != grid.len() {
            return Err(OracleError::InvalidGrid(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        Ok(Self { grid, values, domain })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.grid[1] - self.grid[0]
    }

    /// Re-expresses a wavenumber field on the object plane, `r = λf·k/2π`.
    pub fn to_position(&self, cfg: &OpticalConfig<T>) -> Self {
        match self.domain {
            Domain::Position => self.clone(),
            Domain::Wavenumber => {
                let a = cfg.k_to_r();
                Self {
                    grid: self.grid.iter().map(|&k| k * a).collect(),
                    values: self.values.clone(),
                    domain: Domain::Position,
                }
            }
        }
    }

    /// Inverse of [`SampledField::to_position`].
    pub fn to_wavenumber(&self, cfg: &OpticalConfig<T>) -> Self {
        match self.domain {
            Domain::Wavenumber => self.clone(),
            Domain::Position => {
                let a = cfg.k_to_r();
                Self {
                    grid: self.grid.iter().map(|&r| r / a).collect(),
                    values: self.values.clone(),
                    domain: Domain::Wavenumber,
                }
            }
        }
    }
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::of_usize(n - 1);
            (0..n).map(|i| if i + 1 == n { hi } else { lo + step * T::of_usize(i) }).collect()
        }
    }
}

fn check_uniform<T: Scalar>(grid: &[T]) -> Result<(), OracleError> {
    if grid.len() < MIN_FIELD_SAMPLES {
        return Err(OracleError::InvalidGrid(format!("{} samples, at least {MIN_FIELD_SAMPLES} required", grid.len())));
    }
    let step = (grid[grid.len() - 1] - grid[0]) / T::of_usize(grid.len() - 1);
    if !(step > T::zero()) || !step.is_finite() {
        return Err(OracleError::InvalidGrid("grid must be finite and strictly increasing".into()));
    }
    let tol = step * T::lit(1e-6);
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - step).abs() > tol {
            return Err(OracleError::InvalidGrid("grid spacing is not uniform".into()));
        }
    }
    Ok(())
}

/// Normalised double-Gaussian biphoton amplitude
/// `ς(k₁, k₂) = ε_p(k₁+k₂)·ε_x((k₁-k₂)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonKernel<T = f64> {
    pub source: SourceParams<T>,
}

impl<T: Scalar> BiphotonKernel<T> {
    pub fn new(source: SourceParams<T>) -> Self {
        Self { source }
    }

    /// `(πσ_p²)^(-1/4)·(πσ_x²)^(-1/4)`, making each factor unit-norm in its argument.
    pub fn normalisation(&self) -> T {
        let pi = T::PI();
        let sp = self.source.sigma_p;
        let sx = self.source.sigma_x;
        (pi * sp * sp).powf(T::lit(-0.25)) * (pi * sx * sx).powf(T::lit(-0.25))
    }

    fn exponent(&self, k1: T, k2: T) -> T {
        let two = T::lit(2.0);
        let s = self.source.sigma_p * self.source.sigma_p;
        let t = T::lit(4.0) * self.source.sigma_x * self.source.sigma_x;
        let sum = k1 + k2;
        let diff = k1 - k2;
        -(sum * sum) / (two * s) - diff * diff / (two * t)
    }

    pub fn eval(&self, k1: T, k2: T) -> T {
        self.normalisation() * self.exponent(k1, k2).exp()
    }

    /// Standard deviation of either wavenumber under `|ς|²`.
    pub fn marginal_std(&self) -> T {
        let s = self.source.sigma_p * self.source.sigma_p;
        let t = T::lit(4.0) * self.source.sigma_x * self.source.sigma_x;
        ((s + t) / T::lit(8.0)).sqrt()
    }

    /// Probability mass of either marginal of `|ς|²` outside `[lo, hi]`.
    pub fn tail_mass(&self, lo: T, hi: T) -> T {
        let scale = self.marginal_std() * T::SQRT_2();
        let half = T::lit(0.5);
        half * erfc(-lo / scale) + half * erfc(hi / scale)
    }
}

/// Samples the object transmittance on a wavenumber grid through `r = λf·k/2π`.
pub fn object_spectrum<T: Scalar>(
    obj: &PhaseObject<T>,
    cfg: &OpticalConfig<T>,
    source: &SourceParams<T>,
    k_grid: &[T],
) -> Result<SampledField<T>, OracleError> {
    cfg.validate()?;
    source.validate()?;
    check_uniform(k_grid)?;
    let lo = k_grid[0];
    let hi = k_grid[k_grid.len() - 1];
    let mass = BiphotonKernel::new(*source).tail_mass(lo, hi);
    if mass > T::lit(MAX_TAIL_MASS) {
        return Err(OracleError::GridTooNarrow {
            mass: mass.to_f64().unwrap_or(f64::NAN),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
            limit: MAX_TAIL_MASS,
        });
    }
    let a = cfg.k_to_r();
    let values = k_grid.iter().map(|&k| transmittance(k * a, obj)).collect();
    SampledField::new(k_grid.to_vec(), values, Domain::Wavenumber)
}

/// Detection plane of the scanned photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    /// Focal plane of the detection lens (ghost interference).
    Focal,
    /// Image plane of the source (ghost imaging).
    Image,
}

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    /// Trapezoid nodes per open window in k₁.
    pub n_k1: usize,
    /// Trapezoid nodes over `[-K, K]` in k₂ (focal plane only).
    pub n_k2: usize,
    /// `K = extent·max(σ_p, 2σ_x)`.
    pub extent: f64,
    /// Largest accepted relative L2 change under grid doubling.
    pub tolerance: f64,
    /// Full width (mm) of a rectangular detection aperture; 0 disables it.
    pub aperture_mm: f64,
    /// Midpoint subsamples across the aperture.
    pub aperture_samples: usize,
}

impl OracleGrid {
    pub fn focal() -> Self {
        Self { n_k1: 2048, n_k2: 4096, extent: 6.0, tolerance: 1e-3, aperture_mm: 0.0, aperture_samples: 16 }
    }

    pub fn image() -> Self {
        Self { n_k1: 4096, ..Self::focal() }
    }

    pub fn for_plane(plane: Plane) -> Self {
        match plane {
            Plane::Focal => Self::focal(),
            Plane::Image => Self::image(),
        }
    }

    pub fn doubled(&self) -> Self {
        Self { n_k1: 2 * self.n_k1, n_k2: 2 * self.n_k2, ..*self }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.n_k1 < 2 || self.n_k2 < 2 {
            return Err(OracleError::InvalidGrid("at least two nodes per grid".into()));
        }
        if !(self.extent > 0.0 && self.tolerance > 0.0 && self.aperture_mm >= 0.0) {
            return Err(OracleError::InvalidGrid("extent and tolerance must be > 0, aperture >= 0".into()));
        }
        Ok(())
    }
}

/// Oracle output on the requested scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePattern<T = f64> {
    pub values: Vec<T>,
    /// Relative L2 change observed under grid doubling.
    pub estimated_error: T,
}

/// Closed-form focal-plane profiles omit constant factors; multiplying them by
/// this value gives the oracle's normalisation, `8π³/(σ_p·σ_x)`.
pub fn focal_scale<T: Scalar>(source: &SourceParams<T>) -> T {
    let pi = T::PI();
    T::lit(8.0) * pi * pi * pi / (source.sigma_p * source.sigma_x)
}

/// Image-plane counterpart of [`focal_scale`], `4π²/(σ_p·σ_x)`.
pub fn image_scale<T: Scalar>(source: &SourceParams<T>) -> T {
    let pi = T::PI();
    T::lit(4.0) * pi * pi / (source.sigma_p * source.sigma_x)
}

/// Sums `term(0..n)` by recursive halving so the rounding does not depend
/// on how the work is scheduled.
pub fn pairwise_sum<V, F>(n: usize, term: &F) -> V
where
    V: Copy + Zero + Add<Output = V>,
    F: Fn(usize) -> V,
{
    fn rec<V: Copy + Zero + Add<Output = V>, F: Fn(usize) -> V>(lo: usize, hi: usize, term: &F) -> V {
        if hi - lo <= 32 {
            (lo..hi).fold(V::zero(), |acc, i| acc + term(i))
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, term)
}

/// Trapezoid nodes and weights of one open window `sign·[c, K]`.
struct Window<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Window<T> {
    fn new(c: T, k_max: T, n: usize, sign: T) -> Self {
        let hi = if k_max > c { k_max } else { c };
        let nodes: Vec<T> = linspace(c, hi, n).into_iter().map(|k| k * sign).collect();
        let h = (hi - c) / T::of_usize(n - 1);
        let weights = (0..n).map(|i| if i == 0 || i + 1 == n { h / T::lit(2.0) } else { h }).collect();
        Self { nodes, weights }
    }
}

/// Transmittance inside the left and right windows, divided by the envelope.
fn window_phases<T: Scalar>(cfg: &OpticalConfig<T>, obj: &PhaseObject<T>) -> (Complex<T>, Complex<T>) {
    let r = cfg.omega_b;
    let env = (-(r * r) / (obj.omega_0 * obj.omega_0)).exp();
    (transmittance(-r, obj) / env, transmittance(r, obj) / env)
}

fn envelope<T: Scalar>(cfg: &OpticalConfig<T>, k1: T) -> T {
    let r = cfg.k_to_r() * k1;
    (-(r * r) / (cfg.omega_0 * cfg.omega_0)).exp()
}

/// Focal-plane quadrature at one grid level: the k₁ integral is done once per
/// window, leaving `Σ_j e^{-iβk₂x}·(Λ_j·F_j^L + R·F_j^R)·w_j` per scan point.
struct FocalLevel<T> {
    k2: Vec<T>,
    left: Vec<T>,
    right: Vec<T>,
}

impl<T: Scalar> FocalLevel<T> {
    fn new(cfg: &OpticalConfig<T>, source: &SourceParams<T>, grid: &OracleGrid) -> Self {
        let kernel = BiphotonKernel::new(*source);
        let k_max = T::lit(grid.extent) * source.sigma_p.max(T::lit(2.0) * source.sigma_x);
        let c = T::PI() * cfg.omega_b / (cfg.lambda_mm() * cfg.f);
        let norm = kernel.normalisation();
        let k2 = linspace(-k_max, k_max, grid.n_k2);
        let h2 = (k_max + k_max) / T::of_usize(grid.n_k2 - 1);
        let w2: Vec<T> =
            (0..grid.n_k2).map(|j| if j == 0 || j + 1 == grid.n_k2 { h2 / T::lit(2.0) } else { h2 }).collect();
        let side = |sign: T| -> Vec<T> {
            let win = Window::new(c, k_max, grid.n_k1, sign);
            let g: Vec<T> = win.nodes.iter().zip(&win.weights).map(|(&k, &w)| envelope(cfg, k) * w).collect();
            k2.par_iter()
                .zip(w2.par_iter())
                .map(|(&q, &wq)| {
                    let s = pairwise_sum(win.nodes.len(), &|i| g[i] * kernel.exponent(win.nodes[i], q).exp());
                    s * norm * wq
                })
                .collect()
        };
        let left = side(-T::one());
        let right = side(T::one());
        Self { k2, left, right }
    }

    fn amplitude(&self, beta: T, x: T, phases: (Complex<T>, Complex<T>)) -> Complex<T> {
        let (pl, pr) = phases;
        pairwise_sum(self.k2.len(), &|j| {
            let field = pl * self.left[j] + pr * self.right[j];
            field * Complex::from_polar(T::one(), -(beta * self.k2[j] * x))
        })
    }
}

/// Focal-plane oracle with the θ-independent work done once, so phase
/// sweeps and channel splits reuse both grid levels.
pub struct FocalOracle<T = f64> {
    cfg: OpticalConfig<T>,
    grid: OracleGrid,
    coarse: FocalLevel<T>,
    fine: FocalLevel<T>,
}

impl<T: Scalar> FocalOracle<T> {
    pub fn new(cfg: &OpticalConfig<T>, source: &SourceParams<T>, grid: &OracleGrid) -> Result<Self, OracleError> {
        cfg.validate()?;
        source.validate()?;
        grid.validate()?;
        Ok(Self {
            cfg: *cfg,
            grid: *grid,
            coarse: FocalLevel::new(cfg, source, grid),
            fine: FocalLevel::new(cfg, source, &grid.doubled()),
        })
    }

    /// `(E(x), E(-x))` at both grid levels for every scan point.
    fn amplitudes(&self, obj: &PhaseObject<T>, xs: &[T]) -> [Vec<(Complex<T>, Complex<T>)>; 2] {
        let beta = self.cfg.f / self.cfg.f_a;
        let phases = window_phases(&self.cfg, obj);
        let eval = |level: &FocalLevel<T>| -> Vec<(Complex<T>, Complex<T>)> {
            xs.par_iter().map(|&x| (level.amplitude(beta, x, phases), level.amplitude(beta, -x, phases))).collect()
        };
        [eval(&self.coarse), eval(&self.fine)]
    }

    /// Coincidence pattern, optionally split into a sorter channel.
    pub fn pattern(
        &self,
        obj: &PhaseObject<T>,
        mz: Option<Channel>,
        xs: &[T],
    ) -> Result<OraclePattern<T>, OracleError> {
        let (pts, width) = aperture_points(&self.grid, xs);
        let [coarse, fine] = self.amplitudes(obj, &pts);
        let channel = |(e, m): (Complex<T>, Complex<T>)| split_with_reference(e, m, mz);
        let coarse: Vec<_> = coarse.into_iter().map(channel).collect();
        let fine: Vec<_> = fine.into_iter().map(channel).collect();
        finish(&self.grid, xs.len(), width, coarse, fine)
    }

    /// Coherent OAM superposition through the sorter: each mode `l` carries
    /// `(-1)^l` on the negative half-line of the scan.
    pub fn superposition(
        &self,
        obj: &PhaseObject<T>,
        weights: &BTreeMap<i32, Complex<T>>,
        mz: Channel,
        xs: &[T],
    ) -> Result<OraclePattern<T>, OracleError> {
        let weights = normalise_weights(weights)?;
        let (pts, width) = aperture_points(&self.grid, xs);
        let [coarse, fine] = self.amplitudes(obj, &pts);
        let combine = |(&x, (e, m)): (&T, (Complex<T>, Complex<T>))| -> (T, T) {
            let plus = weights.iter().fold(Complex::<T>::zero(), |acc, &(l, c)| acc + c * oam_sign(l, x));
            let minus = weights.iter().fold(Complex::<T>::zero(), |acc, &(l, c)| acc + c * oam_sign(l, -x));
            split_with_reference(plus * e, minus * m, Some(mz))
        };
        let coarse: Vec<_> = pts.iter().zip(coarse).map(combine).collect();
        let fine: Vec<_> = pts.iter().zip(fine).map(combine).collect();
        finish(&self.grid, xs.len(), width, coarse, fine)
    }
}

fn split<T: Scalar>(e: Complex<T>, mirrored: Complex<T>, mz: Option<Channel>) -> Complex<T> {
    let half = T::lit(0.5);
    match mz {
        None => e,
        Some(Channel::H) => (e + mirrored) * half,
        Some(Channel::V) => (e - mirrored) * half,
    }
}

/// Channel intensity paired with the unsplit intensity `(|E(x)|² + |E(-x)|²)/2`
/// it is judged against; a channel that vanishes by symmetry would otherwise
/// make its own relative change meaningless.
fn split_with_reference<T: Scalar>(e: Complex<T>, mirrored: Complex<T>, mz: Option<Channel>) -> (T, T) {
    let value = split(e, mirrored, mz).norm_sqr();
    match mz {
        None => (value, value),
        Some(_) => (value, (e.norm_sqr() + mirrored.norm_sqr()) * T::lit(0.5)),
    }
}

/// Azimuthal phase `e^{ilα}` on the scan line: 1 for x > 0, `(-1)^l` for x < 0;
/// on axis odd modes vanish.
fn oam_sign<T: Scalar>(l: i32, x: T) -> T {
    let odd = l.rem_euclid(2) == 1;
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        if odd {
            -T::one()
        } else {
            T::one()
        }
    } else if odd {
        T::zero()
    } else {
        T::one()
    }
}

fn normalise_weights<T: Scalar>(weights: &BTreeMap<i32, Complex<T>>) -> Result<Vec<(i32, Complex<T>)>, OracleError> {
    if weights.is_empty() {
        return Err(OracleError::InvalidWeights("no modes given".into()));
    }
    if let Some(l) = weights.keys().find(|l| l.abs() > 3) {
        return Err(OracleError::InvalidWeights(format!("mode l={l} outside -3..=3")));
    }
    let norm = weights.values().fold(T::zero(), |acc, c| acc + c.norm_sqr()).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(OracleError::InvalidWeights("weights must have a finite, nonzero norm".into()));
    }
    Ok(weights.iter().map(|(&l, &c)| (l, c / norm)).collect())
}

/// Expands each scan point into aperture subsamples when an aperture is set.
fn aperture_points<T: Scalar>(grid: &OracleGrid, xs: &[T]) -> (Vec<T>, usize) {
    if grid.aperture_mm <= 0.0 || grid.aperture_samples == 0 {
        return (xs.to_vec(), 1);
    }
    let n = grid.aperture_samples;
    let width = T::lit(grid.aperture_mm);
    let step = width / T::of_usize(n);
    let pts = xs
        .iter()
        .flat_map(|&x| {
            let start = x - width / T::lit(2.0) + step / T::lit(2.0);
            (0..n).map(move |i| start + step * T::of_usize(i))
        })
        .collect();
    (pts, n)
}

fn finish<T: Scalar>(
    grid: &OracleGrid,
    n_out: usize,
    width: usize,
    coarse: Vec<(T, T)>,
    fine: Vec<(T, T)>,
) -> Result<OraclePattern<T>, OracleError> {
    let average = |v: Vec<(T, T)>, pick: fn(&(T, T)) -> T| -> Vec<T> {
        v.chunks(width).map(|c| c.iter().map(pick).fold(T::zero(), |a, b| a + b) / T::of_usize(width)).collect()
    };
    let reference = average(fine.clone(), |p| p.1);
    let coarse = average(coarse, |p| p.0);
    let fine = average(fine, |p| p.0);
    debug_assert_eq!(fine.len(), n_out);
    let diff = coarse.iter().zip(&fine).fold(T::zero(), |acc, (&c, &f)| acc + (c - f) * (c - f));
    let norm = reference.iter().fold(T::zero(), |acc, &r| acc + r * r);
    let change = if diff == T::zero() { T::zero() } else { (diff / norm).sqrt() };
    if change > T::lit(grid.tolerance) || !change.is_finite() {
        return Err(OracleError::NonConvergence { change: change.to_f64().unwrap_or(f64::NAN), limit: grid.tolerance });
    }
    Ok(OraclePattern { values: fine, estimated_error: change })
}

/// `‖a - b‖₂ / ‖b‖₂`; zero when both vanish identically.
pub fn relative_l2<T: Scalar>(a: &[T], b: &[T]) -> T {
    let num = a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y));
    let den = b.iter().fold(T::zero(), |acc, &y| acc + y * y);
    if den == T::zero() {
        if num == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        (num / den).sqrt()
    }
}

/// Relative L2 distance for a sorter channel. A channel whose oracle norm is
/// below `1e-10` of the unsplit `H + V` norm vanishes by symmetry, and the
/// distance is then measured against `H + V` instead.
pub fn channel_relative_l2<T: Scalar>(closed: &[T], oracle: &[T], unsplit: &[T]) -> T {
    let norm = |v: &[T]| v.iter().fold(T::zero(), |acc, &y| acc + y * y).sqrt();
    let own = norm(oracle);
    let total = norm(unsplit);
    if own > T::lit(1e-10) * total {
        return relative_l2(closed, oracle);
    }
    let diff = closed.iter().zip(oracle).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)).sqrt();
    diff / total
}

fn image_amplitude<T: Scalar>(
    cfg: &OpticalConfig<T>,
    kernel: &BiphotonKernel<T>,
    obj: &PhaseObject<T>,
    grid: &OracleGrid,
    x: T,
) -> Complex<T> {
    let source = kernel.source;
    let k_max = T::lit(grid.extent) * source.sigma_p.max(T::lit(2.0) * source.sigma_x);
    let c = T::PI() * cfg.omega_b / (cfg.lambda_mm() * cfg.f);
    let a = cfg.k_to_r();
    let k2 = x / a;
    let norm = kernel.normalisation();
    let mut total = Complex::zero();
    for sign in [-T::one(), T::one()] {
        let win = Window::new(c, k_max, grid.n_k1, sign);
        // the edge node sits on the H(0) = ½ step; use the open-window limit there
        let edge = transmittance(win.nodes[1] * a, obj) / envelope(cfg, win.nodes[1]);
        total = total
            + pairwise_sum(win.nodes.len(), &|i| {
                let k1 = win.nodes[i];
                let gamma = if i == 0 { edge * envelope(cfg, k1) } else { transmittance(k1 * a, obj) };
                gamma * (kernel.exponent(k1, k2).exp() * win.weights[i])
            });
    }
    total * norm
}

/// Direct quadrature of the coincidence pattern on a scan grid (mm,
/// relative to the pattern centre).
pub fn oracle_pattern<T: Scalar>(
    cfg: &OpticalConfig<T>,
    source: &SourceParams<T>,
    obj: &PhaseObject<T>,
    plane: Plane,
    mz: Option<Channel>,
    xs: &[T],
    grid: &OracleGrid,
) -> Result<OraclePattern<T>, OracleError> {
    match plane {
        Plane::Focal => FocalOracle::new(cfg, source, grid)?.pattern(obj, mz, xs),
        Plane::Image => {
            cfg.validate()?;
            source.validate()?;
            grid.validate()?;
            let kernel = BiphotonKernel::new(*source);
            let (pts, width) = aperture_points(grid, xs);
            let fine_grid = grid.doubled();
            let level = |g: &OracleGrid| -> Vec<(T, T)> {
                pts.par_iter()
                    .map(|&x| {
                        let e = image_amplitude(cfg, &kernel, obj, g, x);
                        let m = image_amplitude(cfg, &kernel, obj, g, -x);
                        split_with_reference(e, m, mz)
                    })
                    .collect()
            };
            let coarse = level(grid);
            let fine = level(&fine_grid);
            finish(grid, xs.len(), width, coarse, fine)
        }
    }
}

/// Focal-plane sorter output for a coherent superposition of OAM modes
/// `l ∈ -3..=3`; weights are normalised to unit square-sum.
pub fn superposition_pattern<T: Scalar>(
    cfg: &OpticalConfig<T>,
    source: &SourceParams<T>,
    obj: &PhaseObject<T>,
    weights: &BTreeMap<i32, Complex<T>>,
    mz: Channel,
    xs: &[T],
    grid: &OracleGrid,
) -> Result<OraclePattern<T>, OracleError> {
    normalise_weights(weights)?;
    FocalOracle::new(cfg, source, grid)?.superposition(obj, weights, mz, xs)
}
