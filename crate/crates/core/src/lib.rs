//! Biphoton ghost-interference and ghost-imaging models with a quadrature
//! oracle, scan fitting, the EPR witness and two-qubit OAM tomography.
//!
//! The numerical kernels ([`specfun`], [`optics`], [`oracle`]) are generic
//! over [`Scalar`] (`f32` or `f64`); the statistical layers work in `f64`.

pub mod inference;
pub mod io;
pub mod optics;
pub mod oracle;
pub mod scalar;
pub mod specfun;
pub mod synth;
pub mod tomography;

pub use scalar::Scalar;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type OpticalConfig64 = optics::OpticalConfig<f64>;
pub type OpticalConfig32 = optics::OpticalConfig<f32>;
pub type SourceParams64 = optics::SourceParams<f64>;
pub type SourceParams32 = optics::SourceParams<f32>;
pub type PhaseObject64 = optics::PhaseObject<f64>;
pub type PhaseObject32 = optics::PhaseObject<f32>;
pub type PatternParams64 = optics::PatternParams<f64>;
pub type PatternParams32 = optics::PatternParams<f32>;
pub type SampledField64 = oracle::SampledField<f64>;
pub type SampledField32 = oracle::SampledField<f32>;
