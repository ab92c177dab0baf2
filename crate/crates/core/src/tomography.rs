//! Two-qubit OAM state tomography over `{|G⟩, |L⟩}⊗{|G⟩, |L⟩}`.
//!
//! `|G⟩` is the l = 0 mode and `|L⟩` the l = 1 mode. Each photon is
//! projected onto `|G⟩, |L⟩, (|G⟩ - i|L⟩)/√2, (|G⟩ + |L⟩)/√2`; the 16
//! coincidence counts are inverted linearly through the Pauli expansion and
//! the result is mapped to the nearest physical state by eigenvalue
//! clipping with the deficit spread uniformly over the kept eigenvalues.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance of the Hermiticity, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomographyError {
    #[error("invalid ket: {0}")]
    InvalidKet(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("invalid OAM weights: {0}")]
    InvalidWeights(String),
}

/// Single-photon state `a_G·|G⟩ + a_L·|L⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OamKet {
    pub amplitude_g: Complex64,
    pub amplitude_l: Complex64,
}

impl OamKet {
    pub fn new(amplitude_g: Complex64, amplitude_l: Complex64) -> Result<Self, TomographyError> {
        let norm = amplitude_g.norm_sqr() + amplitude_l.norm_sqr();
        if !((norm - 1.0).abs() <= STATE_TOLERANCE) {
            return Err(TomographyError::InvalidKet(format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { amplitude_g, amplitude_l })
    }

    /// Expectations `⟨ψ|σ_k|ψ⟩` of `(I, σ_x, σ_y, σ_z)`.
    fn bloch(&self) -> [f64; 4] {
        let (a, b) = (self.amplitude_g, self.amplitude_l);
        let cross = a.conj() * b;
        [a.norm_sqr() + b.norm_sqr(), 2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()]
    }
}

/// `[|G⟩, |L⟩, (|G⟩ - i|L⟩)/√2, (|G⟩ + |L⟩)/√2]`.
pub fn projector_basis() -> [OamKet; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        OamKet { amplitude_g: c(1.0, 0.0), amplitude_l: c(0.0, 0.0) },
        OamKet { amplitude_g: c(0.0, 0.0), amplitude_l: c(1.0, 0.0) },
        OamKet { amplitude_g: c(h, 0.0), amplitude_l: c(0.0, -h) },
        OamKet { amplitude_g: c(h, 0.0), amplitude_l: c(h, 0.0) },
    ]
}

/// Two-photon density matrix over `|GG⟩, |GL⟩, |LG⟩, |LL⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2Q {
    entries: Matrix4<Complex64>,
}

impl DensityMatrix2Q {
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self, TomographyError> {
        for i in 0..4 {
            for j in 0..4 {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > STATE_TOLERANCE {
                    return Err(TomographyError::InvalidState("not Hermitian".into()));
                }
            }
        }
        let tr = entries.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(TomographyError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigen(&entries).0.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOLERANCE {
            return Err(TomographyError::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|` for a normalised two-photon ket.
    pub fn pure(ket: [Complex64; 4]) -> Result<Self, TomographyError> {
        let v = Vector4::from(ket);
        let norm = v.norm_squared();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(TomographyError::InvalidKet(format!("squared norm {norm} differs from 1")));
        }
        Self::new(v * v.adjoint())
    }

    /// `(|GG⟩ + |LL⟩)/√2`.
    pub fn bell() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self::pure([h, z, z, h]).expect("Bell state is normalised")
    }

    pub fn basis_state(index: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self { entries: m }
    }

    pub fn maximally_mixed() -> Self {
        Self { entries: Matrix4::identity() * Complex64::new(0.25, 0.0) }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let (vals, _) = hermitian_eigen(&self.entries);
        let mut out = [vals[0], vals[1], vals[2], vals[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

fn hermitize(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hermitian_eigen(m: &Matrix4<Complex64>) -> (Vector4<f64>, Matrix4<Complex64>) {
    let eig = hermitize(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

fn from_spectrum(vals: &[f64; 4], vecs: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let mut out = Matrix4::zeros();
    for (k, &val) in vals.iter().enumerate() {
        let v = vecs.column(k);
        out += v * v.adjoint() * Complex64::new(val, 0.0);
    }
    out
}

fn sqrt_psd(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let (vals, vecs) = hermitian_eigen(m);
    // eigenvalues at rounding level would otherwise become ~1e-8 roots
    let floor = 64.0 * f64::EPSILON * vals.amax();
    let roots = [0, 1, 2, 3].map(|k| if vals[k] > floor { vals[k].sqrt() } else { 0.0 });
    from_spectrum(&roots, &vecs)
}

/// Coincidences for the 16 projector pairs, indexed `[proj1][proj2]` into
/// [`projector_basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TomoCounts {
    pub counts: [[u64; 4]; 4],
}

impl TomoCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// `total·Tr(ρ·Π_a⊗Π_b)` for every projector pair.
pub fn expected_counts(rho: &DensityMatrix2Q, total: f64) -> Result<[[f64; 4]; 4], TomographyError> {
    if !(total.is_finite() && total > 0.0) {
        return Err(TomographyError::InvalidCounts(format!("total {total} must be > 0")));
    }
    DensityMatrix2Q::new(rho.entries)?;
    let basis = projector_basis();
    let mut out = [[0.0; 4]; 4];
    for (a, ka) in basis.iter().enumerate() {
        for (b, kb) in basis.iter().enumerate() {
            let psi = Vector4::new(
                ka.amplitude_g * kb.amplitude_g,
                ka.amplitude_g * kb.amplitude_l,
                ka.amplitude_l * kb.amplitude_g,
                ka.amplitude_l * kb.amplitude_l,
            );
            let p = (psi.adjoint() * rho.entries * psi)[(0, 0)].re;
            out[a][b] = total * p.max(0.0);
        }
    }
    Ok(out)
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, -i], [i, o]],
        _ => [[one, o], [o, -one]],
    }
}

/// Frame matrix `A[a][k] = ⟨ψ_a|σ_k|ψ_a⟩` and its inverse.
fn frame_inverse() -> nalgebra::Matrix4<f64> {
    let basis = projector_basis();
    let a = nalgebra::Matrix4::from_fn(|r, k| basis[r].bloch()[k]);
    a.try_inverse().expect("projector frame is informationally complete")
}

/// Linear inversion of the counts, then the nearest physical state.
pub fn reconstruct(counts: &TomoCounts) -> Result<DensityMatrix2Q, TomographyError> {
    if counts.total() == 0 {
        return Err(TomographyError::InvalidCounts("all counts are zero".into()));
    }
    let n = nalgebra::Matrix4::from_fn(|a, b| counts.counts[a][b] as f64);
    let ainv = frame_inverse();
    // counts[a][b] ∝ Σ_ij A[a][i]·A[b][j]·c_ij/4
    let c = ainv * n * ainv.transpose() * 4.0;
    let mut m = Matrix4::<Complex64>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let (pi, pj) = (pauli(i), pauli(j));
            for r in 0..4 {
                for s in 0..4 {
                    m[(r, s)] += pi[r / 2][s / 2] * pj[r % 2][s % 2] * (c[(i, j)] / 4.0);
                }
            }
        }
    }
    let m = hermitize(&m);
    let tr = m.trace().re;
    let (vals, vecs) = hermitian_eigen(&m);
    let projected = if tr > 0.0 {
        let mu = [0, 1, 2, 3].map(|k| vals[k] / tr);
        clip_to_simplex(&mu)
    } else {
        let clipped = [0, 1, 2, 3].map(|k| vals[k].max(0.0));
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 {
            return Err(TomographyError::InvalidCounts("counts admit no physical state".into()));
        }
        clipped.map(|v| v / sum)
    };
    let mut rho = hermitize(&from_spectrum(&projected, &vecs));
    let tr = rho.trace().re;
    rho *= Complex64::new(1.0 / tr, 0.0);
    DensityMatrix2Q::new(rho)
}

/// Nearest probability vector to a unit-sum spectrum: the most negative
/// eigenvalues are zeroed and their weight shared among the rest.
fn clip_to_simplex(mu: &[f64; 4]) -> [f64; 4] {
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]));
    let mut out = [0.0; 4];
    let mut deficit = 0.0;
    let mut kept = 4;
    while kept > 0 {
        let idx = order[kept - 1];
        if mu[idx] + deficit / kept as f64 >= 0.0 {
            break;
        }
        deficit += mu[idx];
        kept -= 1;
    }
    for &idx in &order[..kept] {
        out[idx] = mu[idx] + deficit / kept as f64;
    }
    out
}

/// Uhlmann fidelity `(Tr √(√ρ₁ ρ₂ √ρ₁))²`, clipped to `[0, 1]`.
pub fn fidelity(rho_exp: &DensityMatrix2Q, rho_ideal: &DensityMatrix2Q) -> f64 {
    // Tr √(√ρ₁ ρ₂ √ρ₁) is the sum of the singular values of √ρ₁·√ρ₂
    let product = sqrt_psd(&rho_exp.entries) * sqrt_psd(&rho_ideal.entries);
    let root_sum = product.singular_values().sum();
    (root_sum * root_sum).clamp(0.0, 1.0)
}

/// How the two photons' OAM values are paired in the source state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pairing {
    /// `|l⟩|l⟩`.
    Correlated,
    /// `|-l⟩|l⟩`.
    AntiCorrelated,
}

/// Modes covered by [`oam_coincidence_matrix`].
pub const OAM_RANGE: std::ops::RangeInclusive<i32> = -3..=3;

/// 7×7 coincidence distribution indexed `[l₁ + 3][l₂ + 3]`: the paired modes
/// carry `(1 - crosstalk)·weight(l₂)` and every cell a uniform `crosstalk/49`.
pub fn oam_coincidence_matrix(
    weights: &BTreeMap<i32, f64>,
    crosstalk: f64,
    pairing: Pairing,
) -> Result<[[f64; 7]; 7], TomographyError> {
    if !(0.0..0.5).contains(&crosstalk) {
        return Err(TomographyError::InvalidWeights(format!("crosstalk {crosstalk} outside [0, 0.5)")));
    }
    if let Some((l, w)) = weights.iter().find(|(l, w)| !OAM_RANGE.contains(l) || !(w.is_finite() && **w >= 0.0)) {
        return Err(TomographyError::InvalidWeights(format!("weight {w} for l={l}")));
    }
    let sum: f64 = weights.values().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(TomographyError::InvalidWeights(format!("weights sum to {sum}, expected 1")));
    }
    let mut m = [[crosstalk / 49.0; 7]; 7];
    for (&l2, &w) in weights {
        let l1 = match pairing {
            Pairing::Correlated => l2,
            Pairing::AntiCorrelated => -l2,
        };
        m[(l1 + 3) as usize][(l2 + 3) as usize] += (1.0 - crosstalk) * w;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_order_and_norm() {
        let b = projector_basis();
        assert_eq!(b[0].amplitude_g, Complex64::new(1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(b[2].amplitude_l, Complex64::new(0.0, -h));
        for k in b {
            assert!(OamKet::new(k.amplitude_g, k.amplitude_l).is_ok());
        }
    }

    #[test]
    fn frame_rows() {
        let rows: Vec<[f64; 4]> = projector_basis().iter().map(|k| k.bloch()).collect();
        let close = |a: [f64; 4], b: [f64; 4]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(rows[0], [1.0, 0.0, 0.0, 1.0]));
        assert!(close(rows[1], [1.0, 0.0, 0.0, -1.0]));
        assert!(close(rows[2], [1.0, 0.0, -1.0, 0.0]));
        assert!(close(rows[3], [1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn simplex_clip() {
        let out = clip_to_simplex(&[0.6, 0.5, -0.05, -0.05]);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(out.iter().all(|&v| v >= 0.0));
        assert!((out[0] - 0.55).abs() < 1e-15 && (out[1] - 0.45).abs() < 1e-15);
        assert_eq!(clip_to_simplex(&[0.25; 4]), [0.25; 4]);
    }

    #[test]
    fn invalid_states_rejected() {
        let mut m = Matrix4::<Complex64>::identity() * Complex64::new(0.25, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix2Q::new(m).is_err());
        let m = Matrix4::<Complex64>::identity() * Complex64::new(0.3, 0.0);
        assert!(DensityMatrix2Q::new(m).is_err());
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix2Q::new(m).is_err());
    }
}
