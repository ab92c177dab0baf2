//! Fitting coincidence scans, the EPR witness and dimension estimates.
//!
//! Counts are modelled as `t_accum·(amplitude·G²(x - x0) + background)` with
//! `G²` the closed-form profile, so `amplitude` is a rate per unit model value
//! and `background` a rate in counts/s.
//!
//! The fit minimises `Σ (counts - model)²/max(counts, 1)` by a projected
//! Levenberg–Marquardt iteration over `(ln σ_p, ln σ_x, amplitude, x0,
//! background[, θ])`, started from a jittered log-uniform grid of widths.
//!
//! At θ = 0 and θ = π the profiles are invariant under `σ_p² ↔ 4σ_x²`, so
//! the widths are only identified up to that swap; such fits are reported on
//! the `σ_p < 2σ_x` branch.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optics::{pattern_curve, wrap_angle, ModelError, OpticalConfig, PatternModel, PatternParams, SourceParams};
use crate::oracle::Plane;

/// Convergence threshold on the cosine between the residual and every Jacobian column.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Minimum number of scan points.
pub const MIN_SCAN_POINTS: usize = 8;

const SIGMA_RANGE: (f64, f64) = (0.1, 100.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("no start met the gradient criterion {tolerance:e} (best reduced chi2 {best_chi2_reduced})")]
    NoConvergence { best_chi2_reduced: f64, tolerance: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    #[serde(rename = "x_mm")]
    pub x: f64,
    pub counts: u64,
    #[serde(rename = "t_accum_s")]
    pub t_accum: f64,
}

/// Coincidence counts recorded along one transverse scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceScan {
    pub points: Vec<ScanPoint>,
    pub plane: Plane,
    pub theta_hint: Option<f64>,
}

impl CoincidenceScan {
    pub fn new(points: Vec<ScanPoint>, plane: Plane, theta_hint: Option<f64>) -> Result<Self, InferenceError> {
        let scan = Self { points, plane, theta_hint };
        scan.validate()?;
        Ok(scan)
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        if self.points.len() < MIN_SCAN_POINTS {
            return Err(InferenceError::InvalidScan(format!(
                "{} points, at least {MIN_SCAN_POINTS} required",
                self.points.len()
            )));
        }
        for p in &self.points {
            if !p.x.is_finite() {
                return Err(InferenceError::InvalidScan("non-finite position".into()));
            }
            if !(p.t_accum.is_finite() && p.t_accum > 0.0) {
                return Err(InferenceError::InvalidScan(format!("accumulation time {} must be > 0", p.t_accum)));
            }
        }
        let mut xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return Err(InferenceError::InvalidScan("positions must be distinct".into()));
        }
        if let Some(t) = self.theta_hint {
            if !t.is_finite() {
                return Err(InferenceError::InvalidScan("theta hint must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Which closed form the scan is fitted with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FitModel {
    Interference,
    Image,
}

impl FitModel {
    fn pattern(self) -> PatternModel {
        match self {
            FitModel::Interference => PatternModel::Interference,
            FitModel::Image => PatternModel::Image,
        }
    }
}

/// Everything held fixed during a fit, plus iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub config: OpticalConfig,
    /// Relative phase; taken from the scan's hint when `None`.
    pub theta: Option<f64>,
    /// Free θ as a sixth parameter.
    pub fit_theta: bool,
    pub multistart: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            config: OpticalConfig::standard(),
            theta: None,
            fit_theta: false,
            multistart: 16,
            seed: 0,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "sigma_p_per_mm")]
    pub sigma_p: f64,
    #[serde(rename = "sigma_x_per_mm")]
    pub sigma_x: f64,
    /// Counts/s per unit closed-form value.
    #[serde(rename = "amplitude_per_s")]
    pub amplitude: f64,
    #[serde(rename = "x0_mm")]
    pub x0: f64,
    #[serde(rename = "background_per_s")]
    pub background: f64,
    #[serde(rename = "theta_rad")]
    pub theta: f64,
    /// Over `(σ_p, σ_x, amplitude, x0, background)`, in their own units.
    pub covariance: [[f64; 5]; 5],
    #[serde(rename = "theta_stderr_rad")]
    pub theta_stderr: Option<f64>,
    pub chi2_reduced: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Index of the winning start.
    pub start_index: usize,
    pub starts_converged: usize,
}

impl FitResult {
    pub fn params(&self, config: OpticalConfig) -> PatternParams {
        PatternParams {
            config,
            source: SourceParams { sigma_p: self.sigma_p, sigma_x: self.sigma_x },
            theta: self.theta,
            amplitude: self.amplitude,
            x0: self.x0,
            background: self.background,
        }
    }

    /// Covariance of `(σ_p, σ_x)`.
    pub fn sigma_covariance(&self) -> [[f64; 2]; 2] {
        [[self.covariance[0][0], self.covariance[0][1]], [self.covariance[1][0], self.covariance[1][1]]]
    }
}

struct Problem<'a> {
    xs: Vec<f64>,
    counts: Vec<f64>,
    times: Vec<f64>,
    sqrt_w: Vec<f64>,
    model: PatternModel,
    config: &'a OpticalConfig,
    theta: f64,
    fit_theta: bool,
}

// parameter layout
const LN_SP: usize = 0;
const LN_SX: usize = 1;
const AMP: usize = 2;
const X0: usize = 3;
const BG: usize = 4;
const THETA: usize = 5;

impl Problem<'_> {
    fn n_params(&self) -> usize {
        if self.fit_theta {
            6
        } else {
            5
        }
    }

    fn params(&self, v: &[f64]) -> PatternParams {
        PatternParams {
            config: *self.config,
            source: SourceParams { sigma_p: v[LN_SP].exp(), sigma_x: v[LN_SX].exp() },
            theta: if self.fit_theta { v[THETA] } else { self.theta },
            amplitude: v[AMP],
            x0: v[X0],
            background: v[BG],
        }
    }

    fn shape(&self, v: &[f64]) -> Vec<f64> {
        let p = PatternParams { amplitude: 1.0, background: 0.0, ..self.params(v) };
        pattern_curve(self.model, &self.xs, &p)
    }

    fn residuals(&self, v: &[f64]) -> Vec<f64> {
        let g = self.shape(v);
        (0..self.xs.len())
            .map(|i| (self.counts[i] - self.times[i] * (v[AMP] * g[i] + v[BG])) * self.sqrt_w[i])
            .collect()
    }

    fn jacobian(&self, v: &[f64], span: f64) -> DMatrix<f64> {
        let n = self.xs.len();
        let m = self.n_params();
        let mut jac = DMatrix::zeros(n, m);
        let g = self.shape(v);
        // amplitude and background enter linearly
        for i in 0..n {
            jac[(i, AMP)] = -self.times[i] * g[i] * self.sqrt_w[i];
            jac[(i, BG)] = -self.times[i] * self.sqrt_w[i];
        }
        for k in [LN_SP, LN_SX, X0, THETA] {
            if k >= m {
                continue;
            }
            let h = match k {
                X0 => 1e-6 * span.max(v[X0].abs()),
                _ => 1e-6 * v[k].abs().max(1.0),
            };
            let mut up = v.to_vec();
            let mut down = v.to_vec();
            up[k] += h;
            down[k] -= h;
            let ru = self.residuals(&up);
            let rd = self.residuals(&down);
            for i in 0..n {
                jac[(i, k)] = (ru[i] - rd[i]) / (2.0 * h);
            }
        }
        jac
    }

    /// Nonnegative least squares for `(amplitude, background)` at fixed shape.
    fn linear_scale(&self, v: &mut [f64]) {
        let g = self.shape(v);
        let w: Vec<f64> = self.sqrt_w.iter().map(|s| s * s).collect();
        let (mut saa, mut sab, mut sbb, mut sya, mut syb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..self.xs.len() {
            let a = self.times[i] * g[i];
            let b = self.times[i];
            saa += w[i] * a * a;
            sab += w[i] * a * b;
            sbb += w[i] * b * b;
            sya += w[i] * self.counts[i] * a;
            syb += w[i] * self.counts[i] * b;
        }
        let det = saa * sbb - sab * sab;
        let (mut amp, mut bg) =
            if det > 0.0 { ((sya * sbb - syb * sab) / det, (syb * saa - sya * sab) / det) } else { (0.0, syb / sbb) };
        if amp < 0.0 || bg < 0.0 {
            let amp_only = if saa > 0.0 { (sya / saa).max(0.0) } else { 0.0 };
            let bg_only = (syb / sbb).max(0.0);
            let cost = |a: f64, b: f64| -> f64 {
                (0..self.xs.len())
                    .map(|i| {
                        let r = self.counts[i] - self.times[i] * (a * g[i] + b);
                        w[i] * r * r
                    })
                    .sum()
            };
            if cost(amp_only, 0.0) <= cost(0.0, bg_only) {
                amp = amp_only;
                bg = 0.0;
            } else {
                amp = 0.0;
                bg = bg_only;
            }
        }
        v[AMP] = amp;
        v[BG] = bg;
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

struct LocalFit {
    v: Vec<f64>,
    cost: f64,
    converged: bool,
    iterations: usize,
}

/// Largest `|Jₖ·r|/(‖Jₖ‖·‖r‖)` over parameters not held at a bound.
fn gradient_cosine(jac: &DMatrix<f64>, r: &DVector<f64>, v: &[f64]) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    let g = jac.transpose() * r;
    (0..jac.ncols())
        .filter(|&k| !((k == AMP || k == BG) && v[k] <= 0.0 && g[k] > 0.0))
        .map(|k| {
            let cn = jac.column(k).norm();
            if cn == 0.0 {
                0.0
            } else {
                g[k].abs() / (cn * rn)
            }
        })
        .fold(0.0, f64::max)
}

fn levenberg_marquardt(problem: &Problem, start: Vec<f64>, span: f64, max_iterations: usize) -> LocalFit {
    let mut v = start;
    let mut r = problem.residuals(&v);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for iter in 0..max_iterations {
        let jac = problem.jacobian(&v, span);
        let rv = DVector::from_column_slice(&r);
        if !c.is_finite() {
            break;
        }
        if gradient_cosine(&jac, &rv, &v) <= GRADIENT_TOLERANCE {
            return LocalFit { v, cost: c, converged: true, iterations: iter };
        }
        let mut jtj = jac.transpose() * &jac;
        let mut jtr = jac.transpose() * &rv;
        // bounds that the gradient pushes against stay fixed for this step
        for k in [AMP, BG] {
            if v[k] <= 0.0 && jtr[k] > 0.0 {
                jtj.row_mut(k).fill(0.0);
                jtj.column_mut(k).fill(0.0);
                jtj[(k, k)] = 1.0;
                jtr[k] = 0.0;
            }
        }
        let diag: Vec<f64> = (0..jtj.ncols()).map(|k| jtj[(k, k)].max(1e-300)).collect();
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for (k, d) in diag.iter().enumerate() {
                a[(k, k)] += lambda * d;
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&(-&jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = v.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            trial[AMP] = trial[AMP].max(0.0);
            trial[BG] = trial[BG].max(0.0);
            trial[LN_SP] = trial[LN_SP].clamp(-12.0, 12.0);
            trial[LN_SX] = trial[LN_SX].clamp(-12.0, 12.0);
            let tr = problem.residuals(&trial);
            let tc = cost(&tr);
            if tc.is_finite() && tc < c {
                v = trial;
                r = tr;
                c = tc;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no descent possible at machine precision: judge the current point
            let jac = problem.jacobian(&v, span);
            let rv = DVector::from_column_slice(&r);
            let converged = gradient_cosine(&jac, &rv, &v) <= GRADIENT_TOLERANCE || c == 0.0;
            return LocalFit { v, cost: c, converged, iterations: iter + 1 };
        }
    }
    let jac = problem.jacobian(&v, span);
    let rv = DVector::from_column_slice(&r);
    let converged = gradient_cosine(&jac, &rv, &v) <= GRADIENT_TOLERANCE;
    LocalFit { v, cost: c, converged, iterations: max_iterations }
}

/// Jittered log-uniform grid of `(σ_p, σ_x)` starts over `[0.1, 100]`.
pub fn start_grid(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let side = (n as f64).sqrt().ceil().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (SIGMA_RANGE.0.ln(), SIGMA_RANGE.1.ln());
    let cell = (hi - lo) / side as f64;
    (0..n)
        .map(|i| {
            let (a, b) = (i % side, i / side);
            let u: f64 = rng.random();
            let w: f64 = rng.random();
            ((lo + cell * (a as f64 + u)).exp(), (lo + cell * (b as f64 + w)).exp())
        })
        .collect()
}

/// Fits a coincidence scan with the closed-form profile of `model`.
pub fn fit_pattern(scan: &CoincidenceScan, model: FitModel, options: &FitOptions) -> Result<FitResult, InferenceError> {
    scan.validate()?;
    options.config.validate()?;
    if options.multistart == 0 {
        return Err(InferenceError::InvalidInput("multistart must be positive".into()));
    }
    let counts: Vec<f64> = scan.points.iter().map(|p| p.counts as f64).collect();
    let rates: Vec<f64> = scan.points.iter().map(|p| p.counts as f64 / p.t_accum).collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    if rates.iter().all(|&r| (r - mean).abs() <= 1e-12 * mean.abs().max(1e-300)) {
        return Err(InferenceError::DegenerateData("counts carry no variation across the scan".into()));
    }
    let theta = wrap_angle(options.theta.or(scan.theta_hint).unwrap_or(0.0));
    let problem = Problem {
        xs: scan.points.iter().map(|p| p.x).collect(),
        counts: counts.clone(),
        times: scan.points.iter().map(|p| p.t_accum).collect(),
        sqrt_w: counts.iter().map(|&c| 1.0 / c.max(1.0).sqrt()).collect(),
        model: model.pattern(),
        config: &options.config,
        theta,
        fit_theta: options.fit_theta,
    };
    let (xmin, xmax) = problem.xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = xmax - xmin;
    let floor = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let excess: Vec<f64> = rates.iter().map(|r| r - floor).collect();
    let total: f64 = excess.iter().sum();
    let centroid = if total > 0.0 {
        problem.xs.iter().zip(&excess).map(|(x, e)| x * e).sum::<f64>() / total
    } else {
        0.5 * (xmin + xmax)
    };

    let starts = start_grid(options.multistart, options.seed);
    let fits: Vec<LocalFit> = starts
        .par_iter()
        .map(|&(sp, sx)| {
            let mut v = vec![sp.ln(), sx.ln(), 0.0, centroid, 0.0];
            if options.fit_theta {
                v.push(theta);
            }
            problem.linear_scale(&mut v);
            let mut fit = levenberg_marquardt(&problem, v, span, options.max_iterations);
            // a background-only fit is stationary in the widths for any start
            fit.converged &= fit.v[AMP] > 0.0;
            fit
        })
        .collect();

    let starts_converged = fits.iter().filter(|f| f.converged).count();
    let dof = (problem.xs.len() as f64 - problem.n_params() as f64).max(1.0);
    let best = fits
        .iter()
        .enumerate()
        .filter(|(_, f)| f.converged)
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost).then(a.0.cmp(&b.0)));
    let Some((start_index, best)) = best else {
        let best_cost = fits.iter().map(|f| f.cost).fold(f64::INFINITY, f64::min);
        return Err(InferenceError::NoConvergence {
            best_chi2_reduced: best_cost / dof,
            tolerance: GRADIENT_TOLERANCE,
        });
    };

    let mut v = best.v.clone();
    if options.fit_theta {
        v[THETA] = wrap_angle(v[THETA]);
    }
    fold_width_swap(&problem, &mut v);
    let jac = problem.jacobian(&v, span);
    let normal = jac.transpose() * &jac;
    let inv = normal
        .clone()
        .try_inverse()
        .filter(|m| m.iter().all(|x| x.is_finite()))
        .or_else(|| normal.clone().pseudo_inverse(1e-14).ok())
        .unwrap_or_else(|| DMatrix::from_element(normal.nrows(), normal.ncols(), f64::NAN));
    let sp = v[LN_SP].exp();
    let sx = v[LN_SX].exp();
    // d σ = σ d ln σ
    let scale = [sp, sx, 1.0, 1.0, 1.0];
    let covariance: [[f64; 5]; 5] =
        std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * scale[i] * scale[j] * (inv[(i, j)] + inv[(j, i)])));
    Ok(FitResult {
        sigma_p: sp,
        sigma_x: sx,
        amplitude: v[AMP],
        x0: v[X0],
        background: v[BG],
        theta: if options.fit_theta { v[THETA] } else { theta },
        covariance,
        theta_stderr: options.fit_theta.then(|| inv[(THETA, THETA)].max(0.0).sqrt()),
        chi2_reduced: best.cost / dof,
        converged: true,
        iterations: best.iterations,
        start_index,
        starts_converged,
    })
}

/// Moves a `σ_p > 2σ_x` optimum onto the `σ_p < 2σ_x` branch when the
/// swapped widths give the same profile.
fn fold_width_swap(problem: &Problem, v: &mut [f64]) {
    let sp = v[LN_SP].exp();
    let sx = v[LN_SX].exp();
    if sp <= 2.0 * sx {
        return;
    }
    let mut swapped = v.to_vec();
    swapped[LN_SP] = (2.0 * sx).ln();
    swapped[LN_SX] = (sp / 2.0).ln();
    let a = problem.shape(v);
    let b = problem.shape(&swapped);
    let peak = a.iter().cloned().fold(0.0, f64::max);
    if a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9 * peak) {
        v.copy_from_slice(&swapped);
    }
}

/// EPR-paradox witness on the conditional uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    #[serde(rename = "dp_plus_hbar_per_mm")]
    pub dp_plus: f64,
    #[serde(rename = "dx_minus_mm")]
    pub dx_minus: f64,
    #[serde(rename = "product_hbar2")]
    pub product: f64,
    #[serde(rename = "bound_hbar2")]
    pub bound: f64,
    pub entangled: bool,
    #[serde(rename = "product_stderr_hbar2")]
    pub product_stderr: Option<f64>,
}

/// Lower bound `|⟨[x, p]⟩|²/4` in units of ħ².
pub const EPR_BOUND: f64 = 0.25;

/// `Δp₊ = σ_p/√2` (ħ/mm), `Δx₋ = 1/(√2·σ_x)` (mm), product `Δp₊²·Δx₋²`.
pub fn epr_witness(
    sigma_p: f64,
    sigma_x: f64,
    covariance: Option<[[f64; 2]; 2]>,
) -> Result<WitnessResult, InferenceError> {
    if !(sigma_p.is_finite() && sigma_p > 0.0 && sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(InferenceError::InvalidInput(format!(
            "widths must be finite and > 0, got sigma_p={sigma_p}, sigma_x={sigma_x}"
        )));
    }
    let dp_plus = sigma_p / std::f64::consts::SQRT_2;
    let dx_minus = 1.0 / (std::f64::consts::SQRT_2 * sigma_x);
    let product = sigma_p * sigma_p / (4.0 * sigma_x * sigma_x);
    let product_stderr = covariance.map(|c| {
        let gp = sigma_p / (2.0 * sigma_x * sigma_x);
        let gx = -sigma_p * sigma_p / (2.0 * sigma_x.powi(3));
        (gp * gp * c[0][0] + 2.0 * gp * gx * c[0][1] + gx * gx * c[1][1]).max(0.0).sqrt()
    });
    Ok(WitnessResult { dp_plus, dx_minus, product, bound: EPR_BOUND, entangled: product < EPR_BOUND, product_stderr })
}

/// Witness from quoted uncertainties instead of widths.
pub fn epr_witness_from_uncertainties(dp_plus: f64, dx_minus: f64) -> Result<WitnessResult, InferenceError> {
    if !(dp_plus.is_finite() && dp_plus > 0.0 && dx_minus.is_finite() && dx_minus > 0.0) {
        return Err(InferenceError::InvalidInput("uncertainties must be finite and > 0".into()));
    }
    let sigma_p = std::f64::consts::SQRT_2 * dp_plus;
    let sigma_x = 1.0 / (std::f64::consts::SQRT_2 * dx_minus);
    let mut w = epr_witness(sigma_p, sigma_x, None)?;
    w.dp_plus = dp_plus;
    w.dx_minus = dx_minus;
    w.product = dp_plus * dp_plus * dx_minus * dx_minus;
    w.entangled = w.product < EPR_BOUND;
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// `(2σ_x/σ_p)²`.
    pub d_epr: f64,
    /// `2·m_max`.
    pub d_oam: u64,
    pub d_hyper: f64,
    /// Set when `σ_p ≥ 2σ_x` and the reciprocal ratio was used.
    pub reciprocal: bool,
    pub d_epr_stderr: Option<f64>,
}

pub fn estimate_dimensions(
    sigma_p: f64,
    sigma_x: f64,
    m_max: u64,
    covariance: Option<[[f64; 2]; 2]>,
) -> Result<DimensionEstimate, InferenceError> {
    if !(sigma_p.is_finite() && sigma_p > 0.0 && sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(InferenceError::InvalidInput(format!(
            "widths must be finite and > 0, got sigma_p={sigma_p}, sigma_x={sigma_x}"
        )));
    }
    let ratio = 2.0 * sigma_x / sigma_p;
    let reciprocal = ratio < 1.0;
    let d_epr = if reciprocal { ratio.powi(-2) } else { ratio * ratio };
    let d_epr_stderr = covariance.map(|c| {
        // ∂ ln d/∂ ln σ_x = ±2, ∂ ln d/∂ ln σ_p = ∓2
        let sign = if reciprocal { -1.0 } else { 1.0 };
        let gp = -sign * 2.0 * d_epr / sigma_p;
        let gx = sign * 2.0 * d_epr / sigma_x;
        (gp * gp * c[0][0] + 2.0 * gp * gx * c[0][1] + gx * gx * c[1][1]).max(0.0).sqrt()
    });
    let d_oam = 2 * m_max;
    Ok(DimensionEstimate { d_epr, d_oam, d_hyper: d_epr * d_oam as f64, reciprocal, d_epr_stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_grid_is_deterministic_and_in_range() {
        let a = start_grid(16, 3);
        assert_eq!(a, start_grid(16, 3));
        assert_ne!(a, start_grid(16, 4));
        for (p, x) in a {
            assert!((0.1..=100.0).contains(&p) && (0.1..=100.0).contains(&x));
        }
    }

    #[test]
    fn heisenberg_boundary_is_not_entangled() {
        // Δp₊·Δx₋ = σ_p/(2σ_x) = 1/2 ⇔ σ_p = σ_x
        let w = epr_witness(4.0, 4.0, None).unwrap();
        assert!((w.dp_plus * w.dx_minus - 0.5).abs() < 1e-15);
        assert!((w.product - w.bound).abs() < 1e-15);
        assert!(!w.entangled);
    }

    #[test]
    fn witness_rejects_nonpositive() {
        assert!(epr_witness(0.0, 1.0, None).is_err());
        assert!(epr_witness(1.0, -1.0, None).is_err());
        assert!(estimate_dimensions(1.0, f64::NAN, 1, None).is_err());
    }

    #[test]
    fn reciprocal_dimension_is_flagged() {
        let d = estimate_dimensions(10.0, 1.0, 0, None).unwrap();
        assert!(d.reciprocal);
        assert!((d.d_epr - 25.0).abs() < 1e-12);
        assert_eq!(d.d_hyper, 0.0);
    }
}
