//! Fast built-in consistency checks.
//!
//! Each check is independent, seeded, and runs in at most a few seconds, so
//! the whole battery can gate an installation or a refactor without the full
//! test suite. A check reports `Ok(())` or a one-line diagnosis.

use num_complex::Complex64;
use rand::Rng;

use crate::analysis::fit_power_law;
use crate::averaging::{
    expected_rho, final_state, final_state_coeffs, seeded_rng, NoiseModel, QuadratureSpec,
};
use crate::closed_form::{rho_t, stationary_weights, NoiseCoordinates};
use crate::noise::NoiseDensity;
use crate::quadrature::GlRule;
use crate::qubit::{evolve_oracle, DensityMatrix, FrozenHamiltonian};

pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

/// Runs the full battery; order is stable for log comparison.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        CheckResult {
            name: "closed form vs unitary oracle",
            outcome: closed_form_vs_oracle(),
        },
        CheckResult {
            name: "stationary weight identities",
            outcome: stationary_weight_identities(),
        },
        CheckResult {
            name: "final-state identity beta + 2 alpha = 1",
            outcome: final_state_identity(),
        },
        CheckResult {
            name: "noise normalization and fourier bounds",
            outcome: noise_normalization_fourier(),
        },
        CheckResult {
            name: "sampler distribution (KS)",
            outcome: sampler_ks(),
        },
        CheckResult {
            name: "rate fit on synthetic decay",
            outcome: rate_fit_synthetic(),
        },
        CheckResult {
            name: "final-state map affinity and positivity",
            outcome: final_state_map(),
        },
        CheckResult {
            name: "averaged state physical and exact at t = 0",
            outcome: averaged_state_physical(),
        },
    ]
}

fn closed_form_vs_oracle() -> Result<(), String> {
    let mut rng = seeded_rng(0x51_0bc1);
    for i in 0..1000 {
        let eps = 0.5 + 1.5 * rng.gen::<f64>();
        let y = (rng.gen::<f64>() - 0.5) * 1.6 * eps.min(1.0) * 0.9;
        let x = (rng.gen::<f64>() - 0.5) * 10.0;
        let t = rng.gen::<f64>() * 50.0;
        let rho11 = rng.gen::<f64>();
        let max_coh = (rho11 * (1.0 - rho11)).sqrt();
        let coh = Complex64::from_polar(
            rng.gen::<f64>() * max_coh,
            rng.gen::<f64>() * std::f64::consts::TAU,
        );
        let rho0 =
            DensityMatrix::new(rho11, coh).map_err(|e| format!("tuple {i}: bad state: {e}"))?;
        let closed = rho_t(&rho0, &NoiseCoordinates { x, y, eps }, t)
            .map_err(|e| format!("tuple {i}: {e}"))?;
        let h = FrozenHamiltonian::new(eps + y, 0.0, x).map_err(|e| format!("tuple {i}: {e}"))?;
        let oracle = evolve_oracle(&h, &rho0, t);
        let d = closed.frobenius_distance(&oracle);
        if d > 1e-10 {
            return Err(format!(
                "tuple {i} (x={x:.3}, y={y:.3}, eps={eps:.3}, t={t:.3}): distance {d:.3e}"
            ));
        }
    }
    Ok(())
}

fn stationary_weight_identities() -> Result<(), String> {
    for i in -999..1000 {
        let r = i as f64 / 1000.0;
        let [fa, fb, fg] = stationary_weights(r);
        if (fb + 2.0 * fa - 1.0).abs() > 1e-14 {
            return Err(format!("R = {r}: beta + 2 alpha - 1 = {:.3e}", fb + 2.0 * fa - 1.0));
        }
        if fg.abs() > 0.25 + 1e-14 {
            return Err(format!("R = {r}: |f_gamma| = {} exceeds 1/4", fg.abs()));
        }
        let [_, _, fg_neg] = stationary_weights(-r);
        if fg_neg + fg != 0.0 {
            return Err(format!("R = {r}: f_gamma not exactly odd"));
        }
    }
    Ok(())
}

fn final_state_identity() -> Result<(), String> {
    let model = NoiseModel::new(
        1.0,
        NoiseDensity::poly_bump(1, 0.4).map_err(|e| e.to_string())?,
        NoiseDensity::poly_bump(2, 0.3).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let (coeffs, _) = final_state_coeffs(&model, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let residual = (coeffs.beta + 2.0 * coeffs.alpha - 1.0).abs();
    if residual > 1e-12 {
        return Err(format!("identity residual {residual:.3e}"));
    }
    if coeffs.gamma.abs() > 1e-12 {
        return Err(format!("gamma = {:.3e} for an even coupling density", coeffs.gamma));
    }
    Ok(())
}

fn noise_normalization_fourier() -> Result<(), String> {
    let densities = [
        NoiseDensity::poly_bump(0, 0.5),
        NoiseDensity::poly_bump(2, 0.3),
        NoiseDensity::smooth_bump(0.7),
        NoiseDensity::ir_poly_bump(1, 2, 0.5),
        NoiseDensity::shifted_bump(7.0, 2.0, 2),
        NoiseDensity::mirrored_bump(10.0, 1.0, 2),
    ];
    for d in densities {
        let d = d.map_err(|e| e.to_string())?;
        let mass = d.moment(0).map_err(|e| e.to_string())?;
        if (mass - 1.0).abs() > 1e-9 {
            return Err(format!("{:?}: mass = {mass}", d.kind()));
        }
        if (d.fourier(0.0) - Complex64::new(1.0, 0.0)).norm() > 1e-11 {
            return Err(format!("{:?}: fourier(0) != 1", d.kind()));
        }
        if d.fourier(17.3).norm() > 1.0 + 1e-11 {
            return Err(format!("{:?}: |fourier| exceeds 1", d.kind()));
        }
    }
    let parabolic = NoiseDensity::poly_bump(1, 1.0).map_err(|e| e.to_string())?;
    let t = 3.0f64;
    let want = 3.0 * (t.sin() - t * t.cos()) / (t * t * t);
    let got = parabolic.fourier(t).re;
    if (got - want).abs() > 1e-10 {
        return Err(format!("parabolic bump fourier({t}) = {got}, want {want}"));
    }
    Ok(())
}

fn sampler_ks() -> Result<(), String> {
    let d = NoiseDensity::poly_bump(2, 0.3).map_err(|e| e.to_string())?;
    let n = 20_000;
    let mut samples = d.sample(1234, n);
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = d.support();
    let cells = 2000;
    let rule = GlRule::new(8);
    let mut cum = vec![0.0; cells + 1];
    for i in 0..cells {
        let a = lo + (hi - lo) * i as f64 / cells as f64;
        let b = lo + (hi - lo) * (i + 1) as f64 / cells as f64;
        let mut piece = 0.0;
        rule.panel(a, b, &mut |x, w| piece += w * d.pdf(x));
        cum[i + 1] = cum[i] + piece;
    }
    let total = cum[cells];
    let cdf = |x: f64| {
        let pos = ((x - lo) / (hi - lo) * cells as f64).clamp(0.0, cells as f64);
        let i = (pos.floor() as usize).min(cells - 1);
        (cum[i] + (pos - i as f64) * (cum[i + 1] - cum[i])) / total
    };
    let mut ks: f64 = 0.0;
    for (j, s) in samples.iter().enumerate() {
        let f = cdf(*s);
        ks = ks
            .max((f - j as f64 / n as f64).abs())
            .max(((j + 1) as f64 / n as f64 - f).abs());
    }
    let bound = 2.0 / (n as f64).sqrt();
    if ks >= bound {
        return Err(format!("KS statistic {ks:.4e} >= bound {bound:.4e}"));
    }
    Ok(())
}

fn rate_fit_synthetic() -> Result<(), String> {
    let times: Vec<f64> = (0..=200).map(|i| 10f64.powf(2.0 * i as f64 / 200.0)).collect();
    let values: Vec<f64> = times.iter().map(|t| 3.0 * t.powi(-2)).collect();
    let fit = fit_power_law(&times, &values, &[], (1.0, 100.0)).map_err(|e| e.to_string())?;
    if (fit.exponent - 2.0).abs() > 1e-6 {
        return Err(format!("exponent {} vs 2", fit.exponent));
    }
    Ok(())
}

fn final_state_map() -> Result<(), String> {
    let model = NoiseModel::new(
        1.0,
        NoiseDensity::shifted_bump(1.0, 0.5, 1).map_err(|e| e.to_string())?,
        NoiseDensity::poly_bump(1, 0.2).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let (coeffs, _) = final_state_coeffs(&model, &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(0xf1a1);
    let mut states = Vec::new();
    for _ in 0..25 {
        let rho11 = rng.gen::<f64>();
        let max_coh = (rho11 * (1.0 - rho11)).sqrt();
        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
        let mag = rng.gen::<f64>() * max_coh;
        states.push(
            DensityMatrix::new(rho11, Complex64::from_polar(mag, phase)).map_err(|e| e.to_string())?,
        );
    }
    for (i, rho0) in states.iter().enumerate() {
        final_state(&coeffs, rho0).map_err(|e| format!("state {i}: image not physical: {e}"))?;
    }
    let (a, b) = (&states[0], &states[1]);
    let mix = DensityMatrix::new(
        0.25 * a.rho11() + 0.75 * b.rho11(),
        a.rho12() * 0.25 + b.rho12() * 0.75,
    )
    .map_err(|e| e.to_string())?;
    let fa = final_state(&coeffs, a).map_err(|e| e.to_string())?;
    let fb = final_state(&coeffs, b).map_err(|e| e.to_string())?;
    let fmix = final_state(&coeffs, &mix).map_err(|e| e.to_string())?;
    let affine = (fmix.rho11() - 0.25 * fa.rho11() - 0.75 * fb.rho11()).abs();
    if affine > 1e-12 {
        return Err(format!("affinity residual {affine:.3e}"));
    }
    Ok(())
}

fn averaged_state_physical() -> Result<(), String> {
    let model = NoiseModel::new(
        1.0,
        NoiseDensity::poly_bump(1, 0.4).map_err(|e| e.to_string())?,
        NoiseDensity::poly_bump(2, 0.3).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let rho0 = DensityMatrix::new(0.7, Complex64::new(0.1, 0.2)).map_err(|e| e.to_string())?;
    let spec = QuadratureSpec::default();
    let at0 = expected_rho(&model, &rho0, 0.0, &spec).map_err(|e| e.to_string())?;
    let d0 = at0.rho.frobenius_distance(&rho0);
    if d0 > 1e-12 {
        return Err(format!("average at t = 0 differs from rho0 by {d0:.3e}"));
    }
    for t in [2.0, 10.0] {
        // positivity is enforced by the DensityMatrix constructor inside
        let avg = expected_rho(&model, &rho0, t, &spec).map_err(|e| format!("t = {t}: {e}"))?;
        let purity = avg.rho.purity();
        if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&purity) {
            return Err(format!("t = {t}: purity {purity} outside [1/2, 1]"));
        }
    }
    Ok(())
}
