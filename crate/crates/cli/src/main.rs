//! `oamepr`: simulate, fit and analyse ghost-interference scans and OAM tomography.

mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use oamepr::inference::{
    epr_witness, epr_witness_from_uncertainties, estimate_dimensions, fit_pattern, FitModel, FitOptions, FitResult,
    InferenceError,
};
use oamepr::io::{
    from_document, read_scan, read_tomo_counts, to_document, write_pattern, write_scan, write_tomo_counts,
    DensityMatrixDoc, FormatError,
};
use oamepr::optics::{central_fraction, pattern_curve, Channel, PatternModel, PatternParams, PhaseObject};
use oamepr::oracle::{
    focal_scale, image_scale, linspace, oracle_pattern, relative_l2, superposition_pattern, OracleError, OracleGrid,
    Plane,
};
use oamepr::synth::{
    calibrate_rate_scale, gen_pattern_data, gen_tomo_counts, NoiseSpec, SynthModel, DEFAULT_PEAK_COUNTS,
    DEFAULT_T_ACCUM,
};
use oamepr::tomography::{fidelity, reconstruct, DensityMatrix2Q};
use serde::Serialize;

use config::{PhysicsArgs, RunConfig};
use output::{emit, json_bytes, svg_plot, write_atomic};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Oracle(String),
    Fit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Oracle(_) => 3,
            CliError::Fit(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Oracle(_) => "oracle_nonconvergence",
            CliError::Fit(_) => "fit_nonconvergence",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Oracle(m) | CliError::Fit(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NonConvergence { .. } => CliError::Oracle(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::NoConvergence { .. } => CliError::Fit(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser)]
#[command(name = "oamepr", version, about = "Ghost-interference scans, EPR witness and OAM tomography")]
struct Cli {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Interference,
    Image,
    MzH,
    MzV,
}

impl Model {
    fn synth(self) -> SynthModel {
        match self {
            Model::Interference => SynthModel::Interference,
            Model::Image => SynthModel::Image,
            Model::MzH => SynthModel::MzH,
            Model::MzV => SynthModel::MzV,
        }
    }

    fn default_half_width(self) -> f64 {
        match self {
            Model::Image => 1.5,
            _ => 0.1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Interference,
    Image,
}

#[derive(Clone, Copy, ValueEnum)]
enum State {
    Bell,
    Gg,
    Gl,
    Lg,
    Ll,
    Mixed,
}

impl State {
    fn rho(self) -> DensityMatrix2Q {
        match self {
            State::Bell => DensityMatrix2Q::bell(),
            State::Gg => DensityMatrix2Q::basis_state(0),
            State::Gl => DensityMatrix2Q::basis_state(1),
            State::Lg => DensityMatrix2Q::basis_state(2),
            State::Ll => DensityMatrix2Q::basis_state(3),
            State::Mixed => DensityMatrix2Q::maximally_mixed(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            State::Bell => "bell",
            State::Gg => "gg",
            State::Gl => "gl",
            State::Lg => "lg",
            State::Ll => "ll",
            State::Mixed => "mixed",
        }
    }
}

#[derive(clap::Args)]
struct Range {
    /// Lower scan edge (mm); defaults to x0 - 0.1 (x0 - 1.5 for imaging).
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    /// Upper scan edge (mm).
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Number of grid points [default: 201, 41 for synth].
    #[arg(long)]
    samples: Option<usize>,
}

impl Range {
    fn grid(&self, centre: f64, half_width: f64, default_samples: usize) -> Result<Vec<f64>, CliError> {
        let lo = self.x_min.unwrap_or(centre - half_width);
        let hi = self.x_max.unwrap_or(centre + half_width);
        let n = self.samples.unwrap_or(default_samples);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
            return Err(CliError::Input(format!("bad scan range [{lo}, {hi}] with {n} samples")));
        }
        Ok(linspace(lo, hi, n))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form pattern on a grid, optionally checked against the quadrature oracle.
    Simulate {
        #[arg(long, value_enum, default_value = "interference")]
        model: Model,
        #[command(flatten)]
        range: Range,
        /// Peak scale applied to the normalised pattern.
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        /// Pattern centre (mm).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// Constant offset added to every sample.
        #[arg(long, default_value_t = 0.0)]
        background: f64,
        /// Scale the output so its maximum is 1.
        #[arg(long)]
        normalize: bool,
        /// Add an `oracle_value` column and report the divergence on stderr.
        #[arg(long)]
        oracle: bool,
        /// Full detector aperture width (mm) applied to the oracle.
        #[arg(long, default_value_t = 0.0)]
        aperture_mm: f64,
        /// Largest accepted change under grid doubling.
        #[arg(long, default_value_t = 1e-3)]
        oracle_tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Central-fringe fraction over a sweep of relative phases.
    Sweep {
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        half_width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Both sorter output channels; with --mode, an OAM superposition through the oracle.
    Sorter {
        /// OAM component `l:re[:im]`, repeatable; l in -3..=3.
        #[arg(long = "mode", allow_hyphen_values = true)]
        modes: Vec<String>,
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Fit a coincidence scan CSV.
    Fit {
        /// CSV with columns x_mm,counts,t_accum_s.
        #[arg(long)]
        scan: PathBuf,
        #[arg(long, value_enum, default_value = "interference")]
        model: FitKind,
        /// Treat theta as a free parameter, starting from theta_rad.
        #[arg(long)]
        fit_theta: bool,
        #[arg(long, default_value_t = 16)]
        multistart: usize,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// EPR witness from widths, quoted uncertainties or a fit result.
    Witness {
        #[command(flatten)]
        source: WidthSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// EPR, OAM and hyper-entangled dimension estimates.
    Dimension {
        #[command(flatten)]
        source: WidthSource,
        #[arg(long, default_value_t = 100)]
        m_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a two-qubit state from a 16-row tomography CSV.
    Tomo {
        /// CSV with columns proj1_index,proj2_index,counts.
        #[arg(long)]
        counts: PathBuf,
        /// Target state for the reported fidelity.
        #[arg(long, value_enum, default_value = "bell")]
        reference: State,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Poisson coincidence scan around a closed-form pattern.
    Synth {
        #[arg(long, value_enum, default_value = "interference")]
        model: Model,
        #[command(flatten)]
        range: Range,
        /// Accumulation time per point (s).
        #[arg(long, default_value_t = DEFAULT_T_ACCUM)]
        t_accum: f64,
        /// Expected counts at the pattern maximum; ignored with --rate-scale.
        #[arg(long, default_value_t = DEFAULT_PEAK_COUNTS)]
        peak_counts: f64,
        /// Coincidence rate per unit pattern value (1/s).
        #[arg(long)]
        rate_scale: Option<f64>,
        /// Accidental coincidence rate (1/s).
        #[arg(long, default_value_t = 0.0)]
        background_rate: f64,
        /// Pattern centre (mm).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Poisson tomography counts for a named state.
    SynthTomo {
        #[arg(long, value_enum, default_value = "bell")]
        state: State,
        /// Expected counts per complete projector basis.
        #[arg(long, default_value_t = 1e4)]
        total: f64,
        /// Expected accidental counts added to each cell.
        #[arg(long, default_value_t = 0.0)]
        background_rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct WidthSource {
    /// FitResult JSON; its covariance feeds the error propagation.
    #[arg(long, conflicts_with_all = ["dp_plus", "dx_minus"])]
    fit: Option<PathBuf>,
    /// Quoted Δp₊ (ħ/mm), used with --dx-minus.
    #[arg(long, requires = "dx_minus")]
    dp_plus: Option<f64>,
    /// Quoted Δx₋ (mm).
    #[arg(long, requires = "dp_plus")]
    dx_minus: Option<f64>,
}

enum Widths {
    Sigmas { sigma_p: f64, sigma_x: f64, covariance: Option<[[f64; 2]; 2]> },
    Uncertainties { dp_plus: f64, dx_minus: f64 },
}

impl WidthSource {
    fn resolve(&self, run: &RunConfig) -> Result<Widths, CliError> {
        if let Some(path) = &self.fit {
            let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let doc: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let fit: FitResult = from_document(&doc)?;
            return Ok(Widths::Sigmas {
                sigma_p: fit.sigma_p,
                sigma_x: fit.sigma_x,
                covariance: Some(fit.sigma_covariance()),
            });
        }
        if let (Some(dp_plus), Some(dx_minus)) = (self.dp_plus, self.dx_minus) {
            return Ok(Widths::Uncertainties { dp_plus, dx_minus });
        }
        Ok(Widths::Sigmas { sigma_p: run.source.sigma_p, sigma_x: run.source.sigma_x, covariance: None })
    }
}

fn plot_to(path: &Option<PathBuf>, xs: &[f64], series: &[(&str, &[f64])], x_label: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        write_atomic(p, svg_plot(xs, series, x_label).as_bytes())?;
    }
    Ok(())
}

fn csv_bytes<F: FnOnce(&mut Vec<u8>) -> Result<(), FormatError>>(f: F) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Sample grid, model values and the optional oracle check.
type Sampled = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

fn simulate(
    run: &RunConfig,
    model: Model,
    range: &Range,
    scale: (f64, f64, f64),
    normalize: bool,
    check: Option<OracleGrid>,
) -> Result<Sampled, CliError> {
    let (amplitude, x0, background) = scale;
    let p =
        PatternParams::new(run.optical, run.source, run.theta).map_err(input)?.with_scale(amplitude, x0, background);
    p.validate().map_err(input)?;
    let xs = range.grid(x0, model.default_half_width(), 201)?;
    let pattern = model.synth().pattern();
    let mut values = pattern_curve(pattern, &xs, &p);
    let mut oracle = None;
    if let Some(controls) = check {
        let obj = PhaseObject::from_config(&run.optical, run.theta);
        let plane = model.synth().plane();
        let grid = OracleGrid {
            aperture_mm: controls.aperture_mm,
            tolerance: controls.tolerance,
            ..OracleGrid::for_plane(plane)
        };
        let mz = match pattern {
            PatternModel::Sorter(ch) => Some(ch),
            _ => None,
        };
        let rel: Vec<f64> = xs.iter().map(|x| x - x0).collect();
        let o = oracle_pattern(&run.optical, &run.source, &obj, plane, mz, &rel, &grid)?;
        let norm = match plane {
            Plane::Focal => focal_scale(&run.source),
            Plane::Image => image_scale(&run.source),
        };
        let scaled: Vec<f64> = o.values.iter().map(|v| amplitude * v / norm + background).collect();
        let bare: Vec<f64> = values.iter().map(|v| v - background).collect();
        let bare_oracle: Vec<f64> = scaled.iter().map(|v| v - background).collect();
        eprintln!(
            "oracle relative_l2={:.3e} doubling_change={:.3e}",
            relative_l2(&bare, &bare_oracle),
            o.estimated_error
        );
        oracle = Some(scaled);
    }
    if normalize {
        let top = values.iter().chain(oracle.iter().flatten()).cloned().fold(0.0, f64::max);
        if top > 0.0 {
            values.iter_mut().for_each(|v| *v /= top);
            if let Some(o) = oracle.as_mut() {
                o.iter_mut().for_each(|v| *v /= top);
            }
        }
    }
    Ok((xs, values, oracle))
}

fn parse_mode(text: &str) -> Result<(i32, Complex64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Input(format!("mode '{text}' is not l:re[:im]"));
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let l: i32 = parts[0].trim().parse().map_err(|_| bad())?;
    let re: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.get(2) {
        Some(s) => s.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok((l, Complex64::new(re, im)))
}

#[derive(Serialize)]
struct TomoReport {
    #[serde(flatten)]
    state: DensityMatrixDoc,
    reference: &'static str,
    fidelity: f64,
    total_counts: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.physics.resolve()?;
    match cli.command {
        Command::Simulate {
            model,
            range,
            amplitude,
            x0,
            background,
            normalize,
            oracle,
            aperture_mm,
            oracle_tolerance,
            out,
            plot,
        } => {
            let check =
                oracle.then_some(OracleGrid { aperture_mm, tolerance: oracle_tolerance, ..OracleGrid::focal() });
            let (xs, values, oracle) = simulate(&cfg, model, &range, (amplitude, x0, background), normalize, check)?;
            let bytes = csv_bytes(|b| write_pattern(b, &xs, &values, oracle.as_deref()))?;
            emit(out.as_deref(), &bytes)?;
            let mut series: Vec<(&str, &[f64])> = vec![("closed form", &values)];
            if let Some(o) = &oracle {
                series.push(("oracle", o));
            }
            plot_to(&plot, &xs, &series, "x (mm)")
        }
        Command::Sweep { steps, half_width, out, plot } => {
            if steps < 2 || !(half_width > 0.0) {
                return Err(input("sweep needs at least 2 steps and a positive half width"));
            }
            let thetas = linspace(-std::f64::consts::PI, std::f64::consts::PI, steps);
            let mut fractions = Vec::with_capacity(steps);
            for &t in &thetas {
                let p = PatternParams::new(cfg.optical, cfg.source, t).map_err(input)?;
                fractions.push(central_fraction(PatternModel::Interference, &p, half_width, 2001));
            }
            let mut text = String::from("theta_rad,central_fraction\n");
            for (t, f) in thetas.iter().zip(&fractions) {
                text.push_str(&format!("{t},{f}\n"));
            }
            emit(out.as_deref(), text.as_bytes())?;
            plot_to(&plot, &thetas, &[("central fraction", &fractions)], "theta (rad)")
        }
        Command::Sorter { modes, range, out, plot } => {
            let xs = range.grid(0.0, 0.1, 201)?;
            let (h, v) = if modes.is_empty() {
                let p = PatternParams::new(cfg.optical, cfg.source, cfg.theta).map_err(input)?;
                (
                    pattern_curve(PatternModel::Sorter(Channel::H), &xs, &p),
                    pattern_curve(PatternModel::Sorter(Channel::V), &xs, &p),
                )
            } else {
                let mut weights = BTreeMap::new();
                for m in &modes {
                    let (l, w) = parse_mode(m)?;
                    if weights.insert(l, w).is_some() {
                        return Err(input(format!("mode l={l} given twice")));
                    }
                }
                let obj = PhaseObject::from_config(&cfg.optical, cfg.theta);
                let grid = OracleGrid::focal();
                let norm = focal_scale(&cfg.source);
                let channel = |ch| -> Result<Vec<f64>, CliError> {
                    let o = superposition_pattern(&cfg.optical, &cfg.source, &obj, &weights, ch, &xs, &grid)?;
                    Ok(o.values.iter().map(|v| v / norm).collect())
                };
                (channel(Channel::H)?, channel(Channel::V)?)
            };
            let mut text = String::from("x_mm,h_value,v_value\n");
            for i in 0..xs.len() {
                text.push_str(&format!("{},{},{}\n", xs[i], h[i], v[i]));
            }
            emit(out.as_deref(), text.as_bytes())?;
            plot_to(&plot, &xs, &[("H", &h), ("V", &v)], "x (mm)")
        }
        Command::Fit { scan, model, fit_theta, multistart, max_iterations, out } => {
            let (fit_model, plane) = match model {
                FitKind::Interference => (FitModel::Interference, Plane::Focal),
                FitKind::Image => (FitModel::Image, Plane::Image),
            };
            let file = std::fs::File::open(&scan).map_err(|e| input(format!("{}: {e}", scan.display())))?;
            let data = read_scan(file, plane, Some(cfg.theta))?;
            let options = FitOptions {
                config: cfg.optical,
                theta: Some(cfg.theta),
                fit_theta,
                multistart,
                seed: cfg.seed,
                max_iterations,
            };
            let fit = fit_pattern(&data, fit_model, &options)?;
            emit(out.as_deref(), &json_bytes(&to_document(&fit)?))
        }
        Command::Witness { source, out } => {
            let w = match source.resolve(&cfg)? {
                Widths::Sigmas { sigma_p, sigma_x, covariance } => epr_witness(sigma_p, sigma_x, covariance)?,
                Widths::Uncertainties { dp_plus, dx_minus } => epr_witness_from_uncertainties(dp_plus, dx_minus)?,
            };
            emit(out.as_deref(), &json_bytes(&to_document(&w)?))
        }
        Command::Dimension { source, m_max, out } => {
            let d = match source.resolve(&cfg)? {
                Widths::Sigmas { sigma_p, sigma_x, covariance } => {
                    estimate_dimensions(sigma_p, sigma_x, m_max, covariance)?
                }
                Widths::Uncertainties { dp_plus, dx_minus } => {
                    let sigma_p = std::f64::consts::SQRT_2 * dp_plus;
                    let sigma_x = 1.0 / (std::f64::consts::SQRT_2 * dx_minus);
                    estimate_dimensions(sigma_p, sigma_x, m_max, None)?
                }
            };
            emit(out.as_deref(), &json_bytes(&to_document(&d)?))
        }
        Command::Tomo { counts, reference, out } => {
            let file = std::fs::File::open(&counts).map_err(|e| input(format!("{}: {e}", counts.display())))?;
            let data = read_tomo_counts(file)?;
            let rho = reconstruct(&data).map_err(input)?;
            let report = TomoReport {
                state: DensityMatrixDoc::from(&rho),
                reference: reference.name(),
                fidelity: fidelity(&rho, &reference.rho()),
                total_counts: data.total(),
            };
            emit(out.as_deref(), &json_bytes(&to_document(&report)?))
        }
        Command::Synth { model, range, t_accum, peak_counts, rate_scale, background_rate, x0, out } => {
            let p = PatternParams::new(cfg.optical, cfg.source, cfg.theta).map_err(input)?.with_scale(1.0, x0, 0.0);
            let xs = range.grid(x0, model.default_half_width(), 41)?;
            let rate_scale = match rate_scale {
                Some(r) => r,
                None => calibrate_rate_scale(model.synth(), &p, &xs, peak_counts, t_accum).map_err(input)?,
            };
            let noise = NoiseSpec { seed: cfg.seed, background_rate, rate_scale };
            let scan = gen_pattern_data(model.synth(), &p, &xs, t_accum, &noise).map_err(input)?;
            emit(out.as_deref(), &csv_bytes(|b| write_scan(b, &scan))?)
        }
        Command::SynthTomo { state, total, background_rate, out } => {
            let noise = NoiseSpec { seed: cfg.seed, background_rate, rate_scale: 0.0 };
            let counts = gen_tomo_counts(&state.rho(), total, &noise).map_err(input)?;
            emit(out.as_deref(), &csv_bytes(|b| write_tomo_counts(b, &counts))?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let first = e.to_string().lines().next().unwrap_or_default().to_string();
            eprintln!("status=error code=2 kind=usage message={first:?}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.message().replace('\n', " ");
            eprintln!("status=error code={} kind={} message={message:?}", e.code(), e.kind());
            ExitCode::from(e.code())
        }
    }
}
