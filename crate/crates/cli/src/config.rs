use std::path::Path;

use clap::Args;
use oamepr::optics::{OpticalConfig, SourceParams};
use serde::Deserialize;

use crate::CliError;

/// Flat key-value run configuration; every key is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub f_mm: Option<f64>,
    #[serde(rename = "fA_mm")]
    pub fa_mm: Option<f64>,
    pub lambda_nm: Option<f64>,
    pub omega0_mm: Option<f64>,
    pub omegab_mm: Option<f64>,
    pub sigma_p_per_mm: Option<f64>,
    pub sigma_x_per_mm: Option<f64>,
    pub theta_rad: Option<f64>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Physical parameters shared by most commands; flags win over the file.
#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// TOML file with any of: f_mm, fA_mm, lambda_nm, omega0_mm, omegab_mm,
    /// sigma_p_per_mm, sigma_x_per_mm, theta_rad, seed.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Collimating lens focal length, mm [default: 500]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub f_mm: Option<f64>,
    /// Detection lens focal length, mm [default: 25.4]
    #[arg(long = "fA-mm", global = true, allow_hyphen_values = true)]
    pub fa_mm: Option<f64>,
    /// Photon wavelength, nm [default: 780]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_nm: Option<f64>,
    /// Gaussian envelope waist of the object, mm [default: 2]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega0_mm: Option<f64>,
    /// Width of the central block, mm [default: 1.04]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omegab_mm: Option<f64>,
    /// Momentum-sum correlation width, 1/mm [default: 3.25]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma_p_per_mm: Option<f64>,
    /// Momentum-difference correlation width, 1/mm [default: 12]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma_x_per_mm: Option<f64>,
    /// Phase on the right-hand object window, rad [default: 0]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta_rad: Option<f64>,
    /// Random seed for synthetic data [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Merged configuration.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub optical: OpticalConfig,
    pub source: SourceParams,
    pub theta: f64,
    pub seed: u64,
}

impl PhysicsArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let d = OpticalConfig::standard();
        let s = SourceParams::default();
        let optical = OpticalConfig {
            f: self.f_mm.or(file.f_mm).unwrap_or(d.f),
            f_a: self.fa_mm.or(file.fa_mm).unwrap_or(d.f_a),
            lambda_nm: self.lambda_nm.or(file.lambda_nm).unwrap_or(d.lambda_nm),
            omega_0: self.omega0_mm.or(file.omega0_mm).unwrap_or(d.omega_0),
            omega_b: self.omegab_mm.or(file.omegab_mm).unwrap_or(d.omega_b),
        };
        optical.validate().map_err(|e| CliError::Input(e.to_string()))?;
        let source = SourceParams::new(
            self.sigma_p_per_mm.or(file.sigma_p_per_mm).unwrap_or(s.sigma_p),
            self.sigma_x_per_mm.or(file.sigma_x_per_mm).unwrap_or(s.sigma_x),
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        let theta = self.theta_rad.or(file.theta_rad).unwrap_or(0.0);
        if !theta.is_finite() {
            return Err(CliError::Input("theta_rad must be finite".into()));
        }
        Ok(RunConfig { optical, source, theta, seed: self.seed.or(file.seed).unwrap_or(0) })
    }
}
