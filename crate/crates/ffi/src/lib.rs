//! C ABI for the qubit-noise library.
//!
//! Conventions:
//! - Handles (`QnDensity`, `QnModel`) are opaque; create them with the
//!   `qn_*_new` constructors and release them with the matching `qn_*_free`.
//! - Every function returns a [`QnStatus`]; outputs go through pointers that
//!   are written only on `QnOk`. Null handles or null required outputs yield
//!   `QnNullPointer` and leave the outputs untouched.
//! - All entry points catch panics, so no unwinding crosses the boundary.
//! - Handles are immutable after construction and safe to share across
//!   threads; freeing a handle while another thread uses it is not.

use std::panic::{catch_unwind, AssertUnwindSafe};

use qubit_noise::averaging::{
    expected_rho, final_state, final_state_coeffs, NoiseModel, QuadratureSpec,
};
use qubit_noise::closed_form::{rho_t, NoiseCoordinates};
use qubit_noise::error::Error;
use qubit_noise::noise::NoiseDensity;
use qubit_noise::qubit::DensityMatrix;

/// Outcome of a call. Mirrors the library error classes; `QnPanic` reports
/// an internal invariant failure that was contained at the boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnStatus {
    QnOk = 0,
    QnNullPointer = 1,
    QnConfig = 2,
    QnConvergence = 3,
    QnDomain = 4,
    QnFit = 5,
    QnPanic = 6,
}

/// Probability density of one noise coordinate (opaque).
pub struct QnDensity(NoiseDensity);

/// Energy gap plus coupling and detuning densities (opaque).
pub struct QnModel(NoiseModel);

/// A qubit density matrix in the energy basis; the off-diagonal entry is
/// `re_rho12 + i im_rho12` and `rho22 = 1 - rho11` is implicit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QnState {
    pub rho11: f64,
    pub re_rho12: f64,
    pub im_rho12: f64,
}

fn status_of(err: &Error) -> QnStatus {
    match err {
        Error::Domain(_) => QnStatus::QnDomain,
        Error::Config(_) => QnStatus::QnConfig,
        Error::Convergence { .. } => QnStatus::QnConvergence,
        Error::Fit(_) => QnStatus::QnFit,
        Error::Io(_) => QnStatus::QnConfig,
    }
}

fn guarded(body: impl FnOnce() -> QnStatus) -> QnStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(QnStatus::QnPanic)
}

/// Boxes a freshly built value into an out-pointer.
///
/// # Safety
/// `out` must be valid for a single pointer write.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> QnStatus {
    if out.is_null() {
        return QnStatus::QnNullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    QnStatus::QnOk
}

unsafe fn density_from(
    out: *mut *mut QnDensity,
    build: impl FnOnce() -> Result<NoiseDensity, Error>,
) -> QnStatus {
    guarded(|| match build() {
        Ok(d) => unsafe { emit(out, QnDensity(d)) },
        Err(e) => status_of(&e),
    })
}

/// `(1 - (u/half_width)^2)^n` bump on `[-half_width, half_width]`, normalized.
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_poly_bump(
    n: u32,
    half_width: f64,
    out: *mut *mut QnDensity,
) -> QnStatus {
    unsafe { density_from(out, || NoiseDensity::poly_bump(n, half_width)) }
}

/// Infinitely differentiable bump `exp(-1/(1 - (u/half_width)^2))`, normalized.
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_smooth_bump(
    half_width: f64,
    out: *mut *mut QnDensity,
) -> QnStatus {
    unsafe { density_from(out, || NoiseDensity::smooth_bump(half_width)) }
}

/// Polynomial bump multiplied by `|u|^k`, vanishing to order `k` at zero.
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_ir_poly_bump(
    k: u32,
    n: u32,
    half_width: f64,
    out: *mut *mut QnDensity,
) -> QnStatus {
    unsafe { density_from(out, || NoiseDensity::ir_poly_bump(k, n, half_width)) }
}

/// Polynomial bump of the given width centered at `center > width`.
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_shifted_bump(
    center: f64,
    width: f64,
    n: u32,
    out: *mut *mut QnDensity,
) -> QnStatus {
    unsafe { density_from(out, || NoiseDensity::shifted_bump(center, width, n)) }
}

/// Even pair of polynomial bumps centered at `+-center`.
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_mirrored_bump(
    center: f64,
    width: f64,
    n: u32,
    out: *mut *mut QnDensity,
) -> QnStatus {
    unsafe { density_from(out, || NoiseDensity::mirrored_bump(center, width, n)) }
}

/// Point mass at zero (coordinate switched off).
///
/// # Safety
/// `out` must be valid for a single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_zero(out: *mut *mut QnDensity) -> QnStatus {
    unsafe { density_from(out, || Ok(NoiseDensity::zero())) }
}

/// Releases a density handle. Null is a no-op.
///
/// # Safety
/// `d` must be a handle from a `qn_density_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qn_density_free(d: *mut QnDensity) {
    if !d.is_null() {
        drop(unsafe { Box::from_raw(d) });
    }
}

/// Evaluates the probability density at `u`.
///
/// # Safety
/// `d` must be a live density handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qn_density_pdf(d: *const QnDensity, u: f64, out: *mut f64) -> QnStatus {
    if d.is_null() || out.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        unsafe { *out = (*d).0.pdf(u) };
        QnStatus::QnOk
    })
}

/// Characteristic function `E[exp(-i t u)]` split into real and imaginary parts.
///
/// # Safety
/// `d` must be a live density handle; `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qn_density_fourier(
    d: *const QnDensity,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QnStatus {
    if d.is_null() || out_re.is_null() || out_im.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let value = unsafe { &(*d).0 }.fourier(t);
        unsafe {
            *out_re = value.re;
            *out_im = value.im;
        }
        QnStatus::QnOk
    })
}

/// Draws `count` i.i.d. samples into `buf`. Deterministic in `seed`.
///
/// # Safety
/// `d` must be a live density handle; `buf` must be valid for `count` writes.
#[no_mangle]
pub unsafe extern "C" fn qn_density_sample(
    d: *const QnDensity,
    seed: u64,
    buf: *mut f64,
    count: usize,
) -> QnStatus {
    if d.is_null() || (buf.is_null() && count > 0) {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let samples = unsafe { &(*d).0 }.sample(seed, count);
        unsafe { std::ptr::copy_nonoverlapping(samples.as_ptr(), buf, count) };
        QnStatus::QnOk
    })
}

/// Builds a noise model from the gap `eps` and the coupling and detuning
/// densities. The densities are copied; the caller keeps ownership of them.
/// Fails with `QnDomain` if the detuning support reaches `-eps`.
///
/// # Safety
/// `mu_o` and `mu_d` must be live density handles; `out` must be valid for a
/// single pointer write.
#[no_mangle]
pub unsafe extern "C" fn qn_model_new(
    eps: f64,
    mu_o: *const QnDensity,
    mu_d: *const QnDensity,
    out: *mut *mut QnModel,
) -> QnStatus {
    if mu_o.is_null() || mu_d.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let built = NoiseModel::new(eps, unsafe { &(*mu_o).0 }.clone(), unsafe { &(*mu_d).0 }.clone());
        match built {
            Ok(m) => unsafe { emit(out, QnModel(m)) },
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a model handle. Null is a no-op.
///
/// # Safety
/// `m` must be a handle from `qn_model_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qn_model_free(m: *mut QnModel) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

fn state_in(state: &QnState) -> Result<DensityMatrix, Error> {
    DensityMatrix::new(
        state.rho11,
        num_complex::Complex64::new(state.re_rho12, state.im_rho12),
    )
}

fn state_out(rho: &DensityMatrix) -> QnState {
    QnState {
        rho11: rho.rho11(),
        re_rho12: rho.rho12().re,
        im_rho12: rho.rho12().im,
    }
}

/// Evolves `rho0` for time `t` under one frozen noise realization
/// `(x, y)` drawn around the gap `eps`, using the closed form.
///
/// # Safety
/// `rho0` must be valid for a read and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn qn_rho_t(
    eps: f64,
    x: f64,
    y: f64,
    rho0: *const QnState,
    t: f64,
    out: *mut QnState,
) -> QnStatus {
    if rho0.is_null() || out.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let result = state_in(unsafe { &*rho0 })
            .and_then(|rho| rho_t(&rho, &NoiseCoordinates { x, y, eps }, t));
        match result {
            Ok(rho) => {
                unsafe { *out = state_out(&rho) };
                QnStatus::QnOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Noise-averaged state at time `t` by adaptive quadrature at the default
/// tolerances. `out_rho11_err` and `out_rho12_err` receive error estimates
/// and may be null if not wanted.
///
/// # Safety
/// `m` must be a live model handle, `rho0` valid for a read, `out` for a
/// write, and each non-null error pointer valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qn_expected_rho(
    m: *const QnModel,
    rho0: *const QnState,
    t: f64,
    out: *mut QnState,
    out_rho11_err: *mut f64,
    out_rho12_err: *mut f64,
) -> QnStatus {
    if m.is_null() || rho0.is_null() || out.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let result = state_in(unsafe { &*rho0 }).and_then(|rho| {
            expected_rho(unsafe { &(*m).0 }, &rho, t, &QuadratureSpec::default())
        });
        match result {
            Ok(avg) => {
                unsafe { *out = state_out(&avg.rho) };
                if !out_rho11_err.is_null() {
                    unsafe { *out_rho11_err = avg.rho11_err };
                }
                if !out_rho12_err.is_null() {
                    unsafe { *out_rho12_err = avg.rho12_err };
                }
                QnStatus::QnOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Coefficients of the affine long-time map: the time-averaged population is
/// `alpha + beta rho11 - 2 gamma re_rho12` and the residual coherence is real.
/// `out_err` receives a coefficient error estimate and may be null.
///
/// # Safety
/// `m` must be a live model handle; `out_alpha`, `out_beta`, `out_gamma`
/// must be valid for writes, and `out_err` too when non-null.
#[no_mangle]
pub unsafe extern "C" fn qn_final_state_coeffs(
    m: *const QnModel,
    out_alpha: *mut f64,
    out_beta: *mut f64,
    out_gamma: *mut f64,
    out_err: *mut f64,
) -> QnStatus {
    if m.is_null() || out_alpha.is_null() || out_beta.is_null() || out_gamma.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        match final_state_coeffs(unsafe { &(*m).0 }, &QuadratureSpec::default()) {
            Ok((coeffs, err)) => {
                unsafe {
                    *out_alpha = coeffs.alpha;
                    *out_beta = coeffs.beta;
                    *out_gamma = coeffs.gamma;
                }
                if !out_err.is_null() {
                    unsafe { *out_err = err };
                }
                QnStatus::QnOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Applies the long-time map to an initial state without averaging again.
///
/// # Safety
/// `rho0` must be valid for a read and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn qn_final_state(
    alpha: f64,
    beta: f64,
    gamma: f64,
    rho0: *const QnState,
    out: *mut QnState,
) -> QnStatus {
    if rho0.is_null() || out.is_null() {
        return QnStatus::QnNullPointer;
    }
    guarded(|| {
        let coeffs = qubit_noise::averaging::FinalStateCoeffs { alpha, beta, gamma };
        let result = state_in(unsafe { &*rho0 }).and_then(|rho| final_state(&coeffs, &rho));
        match result {
            Ok(rho) => {
                unsafe { *out = state_out(&rho) };
                QnStatus::QnOk
            }
            Err(e) => status_of(&e),
        }
    })
}
