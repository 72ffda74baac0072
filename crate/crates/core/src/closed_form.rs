//! Closed-form single-realization dynamics.
//!
//! For a frozen realization written in noise coordinates (x = off-diagonal
//! coupling, y = diagonal detuning shift on top of the bare gap eps > 0,
//! with eps + y > 0) the dynamics depends on the single dimensionless
//! mixing parameter
//!
//! ```text
//!     P = 2x / (eps + y)
//! ```
//!
//! All amplitudes below use the bounded reparameterization
//!
//! ```text
//!     R = P / (1 + sqrt(1 + P^2)),     |R| < 1,    P = 2R / (1 - R^2),
//! ```
//!
//! which stays well-conditioned both at P -> 0 (R ~ P/2) and |P| -> inf
//! (|R| -> 1). The evolved state splits into a stationary part with weights
//! (f_alpha, f_beta, f_gamma) and a single oscillation at angular frequency
//! `phase` = (eps + y) sqrt(1 + P^2), the eigenvalue gap of the realization:
//!
//! ```text
//!     rho11(t) = f_alpha + f_beta rho11(0) - 2 f_gamma Re rho12(0)
//!                + 2 Re[ e^{-i t phase} h ]
//!     rho12(t) = f_gamma (1 - 2 rho11(0)) + 2 f_alpha Re rho12(0)
//!                + e^{-i t phase} g1 + e^{+i t phase} g2
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::DensityMatrix;

/// Realization coordinates relative to the bare level splitting eps.
#[derive(Debug, Clone, Copy)]
pub struct NoiseCoordinates {
    /// Off-diagonal coupling.
    pub x: f64,
    /// Diagonal detuning added to the gap; eps + y must stay positive.
    pub y: f64,
    /// Bare level splitting, eps > 0.
    pub eps: f64,
}

/// Mixing parameter P, its bounded form R, and the oscillation frequency.
#[derive(Debug, Clone, Copy)]
pub struct PhaseData {
    pub p: f64,
    pub r: f64,
    pub phase: f64,
}

/// Oscillatory amplitudes of the closed form. `h` drives the population,
/// `g1`/`g2` the coherence at e^{-i t phase} / e^{+i t phase} respectively.
#[derive(Debug, Clone, Copy)]
pub struct OscAmplitudes {
    pub h: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
}

pub fn phase_data(c: &NoiseCoordinates) -> Result<PhaseData> {
    if !(c.eps > 0.0) || !c.eps.is_finite() {
        return Err(Error::Domain(format!("eps = {} must be positive", c.eps)));
    }
    let gap = c.eps + c.y;
    if !(gap > 0.0) || !c.x.is_finite() || !gap.is_finite() {
        return Err(Error::Domain(format!(
            "eps + y = {gap} must be positive (x = {}, y = {}, eps = {})",
            c.x, c.y, c.eps
        )));
    }
    let p = 2.0 * c.x / gap;
    let root = p.hypot(1.0);
    Ok(PhaseData {
        p,
        r: stable_ratio(p),
        phase: gap * root,
    })
}

/// R(P) = P / (1 + sqrt(1 + P^2)); odd, |R| < 1, exact at the bit level
/// under P -> -P.
pub fn stable_ratio(p: f64) -> f64 {
    p / (1.0 + p.hypot(1.0))
}

/// Stationary weights (f_alpha, f_beta, f_gamma) of a single realization:
///
/// ```text
///     f_alpha = 2R^2/(1+R^2)^2,  f_beta = ((1-R^2)/(1+R^2))^2,
///     f_gamma = R(R^2-1)/(1+R^2)^2,
/// ```
///
/// satisfying f_beta + 2 f_alpha = 1 identically. Noise-averaging these
/// weights yields the final-state coefficients (alpha, beta, gamma).
/// Defined for |R| <= 1 (the boundary by continuity).
pub fn stationary_weights(r: f64) -> [f64; 3] {
    let r2 = r * r;
    let denom = (1.0 + r2) * (1.0 + r2);
    [
        2.0 * r2 / denom,
        (1.0 - r2) * (1.0 - r2) / denom,
        r * (r2 - 1.0) / denom,
    ]
}

/// Oscillatory amplitudes in the bounded parameterization. With
/// p = rho11(0), q12 = rho12(0), q21 = conj(q12):
///
/// ```text
///     h  =  R ((2p-1) R + q21 R^2 - q12) / (1+R^2)^2
///     g1 =   -((2p-1) R + q21 R^2 - q12) / (1+R^2)^2
///     g2 =  R^2 ((2p-1) R - q21 + q12 R^2) / (1+R^2)^2
/// ```
///
/// so g1 = -h/R identically. The sign of the q21 term in g1 is pinned by
/// two exact identities: the evolution must reproduce rho0 at t = 0
/// (stationary + g1 + g2 = rho12(0)), and g1 = -2h/P + O(P^2) near the
/// origin. At R = 0 the amplitudes reduce to (0, q12, 0): pure phase
/// rotation of the coherence and no population oscillation.
pub fn osc_amplitudes(rho0: &DensityMatrix, r: f64) -> Result<OscAmplitudes> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain(format!("|R| = {} must be < 1", r.abs())));
    }
    let w = 2.0 * rho0.rho11() - 1.0;
    let q12 = rho0.rho12();
    let q21 = q12.conj();
    let r2 = r * r;
    let denom = (1.0 + r2) * (1.0 + r2);
    let h_over_r = (q21 * r2 + (w * r - q12)) / denom;
    Ok(OscAmplitudes {
        h: h_over_r * r,
        g1: -h_over_r,
        g2: (q12 * r2 + (w * r - q21)) * (r2 / denom),
    })
}

/// Stationary part of the evolved state for one realization; the second
/// component (the coherence) is real by construction.
pub fn stationary_state(rho0: &DensityMatrix, r: f64) -> (f64, f64) {
    let [fa, fb, fg] = stationary_weights(r);
    let re12 = rho0.rho12().re;
    (
        fa + fb * rho0.rho11() - 2.0 * fg * re12,
        fg * (1.0 - 2.0 * rho0.rho11()) + 2.0 * fa * re12,
    )
}

/// Closed-form evolved state of a single realization.
pub fn rho_t(rho0: &DensityMatrix, coords: &NoiseCoordinates, t: f64) -> Result<DensityMatrix> {
    let pd = phase_data(coords)?;
    let amps = osc_amplitudes(rho0, pd.r)?;
    let (st11, st12) = stationary_state(rho0, pd.r);
    let e = Complex64::from_polar(1.0, -t * pd.phase);
    let rho11 = st11 + 2.0 * (e * amps.h).re;
    let rho12 = st12 + e * amps.g1 + e.conj() * amps.g2;
    Ok(DensityMatrix::new_unchecked(rho11, rho12))
}
