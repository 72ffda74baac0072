//! JSON experiment configuration.
//!
//! A config file fully determines a run: model, initial state, time grid,
//! quadrature controls, and optional frozen noise coordinates. Outputs echo
//! the resolved config (defaults filled in) so results stay reproducible
//! from the artifact alone.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::{Mode, NoiseModel, QuadratureSpec};
use crate::error::{Error, Result};
use crate::noise::NoiseDensity;
use crate::qubit::DensityMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub initial_state: StateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridConfig>,
    #[serde(default)]
    pub quadrature: QuadConfig,
    /// Fixed noise coordinates for single-realization evolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frozen: Option<FrozenConfig>,
    /// Fit window [t_lo, t_hi] for rate extraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    /// Seed for Monte Carlo mode; a CLI-level seed overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub eps: f64,
    pub mu_o: DensityConfig,
    pub mu_d: DensityConfig,
}

/// Noise density family, tagged by name:
/// `{"family": "poly_bump", "n": 2, "half_width": 0.3}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityConfig {
    PolyBump { n: u32, half_width: f64 },
    SmoothBump { half_width: f64 },
    IrPolyBump { k: u32, n: u32, half_width: f64 },
    ShiftedBump { center: f64, width: f64, n: u32 },
    MirroredBump { center: f64, width: f64, n: u32 },
    Zero,
}

impl DensityConfig {
    pub fn build(&self) -> Result<NoiseDensity> {
        match *self {
            DensityConfig::PolyBump { n, half_width } => NoiseDensity::poly_bump(n, half_width),
            DensityConfig::SmoothBump { half_width } => NoiseDensity::smooth_bump(half_width),
            DensityConfig::IrPolyBump { k, n, half_width } => {
                NoiseDensity::ir_poly_bump(k, n, half_width)
            }
            DensityConfig::ShiftedBump { center, width, n } => {
                NoiseDensity::shifted_bump(center, width, n)
            }
            DensityConfig::MirroredBump { center, width, n } => {
                NoiseDensity::mirrored_bump(center, width, n)
            }
            DensityConfig::Zero => Ok(NoiseDensity::zero()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub rho11: f64,
    #[serde(default)]
    pub re_rho12: f64,
    #[serde(default)]
    pub im_rho12: f64,
}

impl StateConfig {
    pub fn build(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.rho11, Complex64::new(self.re_rho12, self.im_rho12))
    }
}

/// Logarithmic time grid, endpoints inclusive.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
}

impl TimeGridConfig {
    pub fn build(&self) -> Result<Vec<f64>> {
        log_time_grid(self.t_min, self.t_max, self.points_per_decade)
    }
}

pub fn log_time_grid(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) {
        return Err(Error::Config(format!(
            "time grid needs 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if points_per_decade == 0 {
        return Err(Error::Config("points_per_decade must be at least 1".into()));
    }
    let decades = (t_max / t_min).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64))
        .collect();
    grid[0] = t_min;
    grid[n] = t_max;
    Ok(grid)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrozenConfig {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    #[serde(default = "default_base_order")]
    pub base_order: usize,
    #[serde(default = "default_panels_per_unit_phase")]
    pub panels_per_unit_phase: f64,
    #[serde(default = "default_coeff_tolerance")]
    pub coeff_tolerance: f64,
    #[serde(default = "default_series_tolerance")]
    pub series_tolerance: f64,
    /// Present switches averaging to Monte Carlo with this many samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub samples: usize,
}

fn default_base_order() -> usize {
    QuadratureSpec::default().base_order
}
fn default_panels_per_unit_phase() -> f64 {
    QuadratureSpec::default().panels_per_unit_phase
}
fn default_coeff_tolerance() -> f64 {
    QuadratureSpec::default().coeff_tolerance
}
fn default_series_tolerance() -> f64 {
    QuadratureSpec::default().series_tolerance
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            base_order: default_base_order(),
            panels_per_unit_phase: default_panels_per_unit_phase(),
            coeff_tolerance: default_coeff_tolerance(),
            series_tolerance: default_series_tolerance(),
            monte_carlo: None,
        }
    }
}

impl QuadConfig {
    pub fn to_spec(&self, seed: u64) -> Result<QuadratureSpec> {
        if self.base_order < 2 || self.base_order > 64 {
            return Err(Error::Config(format!(
                "base_order must lie in [2, 64], got {}",
                self.base_order
            )));
        }
        if !(self.panels_per_unit_phase > 0.0) {
            return Err(Error::Config("panels_per_unit_phase must be positive".into()));
        }
        if !(self.coeff_tolerance > 0.0) || !(self.series_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        let mode = match &self.monte_carlo {
            Some(mc) => {
                if mc.samples == 0 {
                    return Err(Error::Config("monte_carlo.samples must be positive".into()));
                }
                Mode::MonteCarlo {
                    samples: mc.samples,
                    seed,
                }
            }
            None => Mode::Quadrature,
        };
        Ok(QuadratureSpec {
            base_order: self.base_order,
            panels_per_unit_phase: self.panels_per_unit_phase,
            coeff_tolerance: self.coeff_tolerance,
            series_tolerance: self.series_tolerance,
            mode,
        })
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config JSON: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn build_model(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.model.eps, self.model.mu_o.build()?, self.model.mu_d.build()?)
    }

    pub fn build_state(&self) -> Result<DensityMatrix> {
        self.initial_state.build()
    }

    /// Effective seed: CLI override beats the config value beats zero.
    pub fn effective_seed(&self, cli_seed: Option<u64>) -> u64 {
        cli_seed.or(self.seed).unwrap_or(0)
    }

    pub fn build_spec(&self, cli_seed: Option<u64>) -> Result<QuadratureSpec> {
        self.quadrature.to_spec(self.effective_seed(cli_seed))
    }

    /// Resolved config with defaults materialized, for echoing into outputs.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {
            "eps": 1.0,
            "mu_o": {"family": "poly_bump", "n": 2, "half_width": 0.3},
            "mu_d": {"family": "zero"}
        },
        "initial_state": {"rho11": 0.7, "re_rho12": 0.1, "im_rho12": 0.2}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.quadrature.base_order, 12);
        assert_eq!(cfg.quadrature.panels_per_unit_phase, 0.5);
        assert_eq!(cfg.quadrature.coeff_tolerance, 1e-9);
        assert!(cfg.time_grid.is_none());
        let model = cfg.build_model().unwrap();
        assert!(model.mu_d().is_point_mass());
        let rho0 = cfg.build_state().unwrap();
        assert_eq!(rho0.rho11(), 0.7);
        let spec = cfg.build_spec(None).unwrap();
        assert_eq!(spec.mode, Mode::Quadrature);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = MINIMAL.replace("\"rho11\": 0.7", "\"rho11\": 0.7, \"bogus\": 1");
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config(_))));
        assert!(matches!(
            ExperimentConfig::from_json("not json"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn density_families_parse_and_build() {
        for (json, even) in [
            (r#"{"family": "poly_bump", "n": 0, "half_width": 0.5}"#, true),
            (r#"{"family": "smooth_bump", "half_width": 1.0}"#, true),
            (r#"{"family": "ir_poly_bump", "k": 1, "n": 2, "half_width": 0.5}"#, true),
            (r#"{"family": "shifted_bump", "center": 7.0, "width": 2.0, "n": 2}"#, false),
            (r#"{"family": "mirrored_bump", "center": 10.0, "width": 1.0, "n": 2}"#, true),
            (r#"{"family": "zero"}"#, true),
        ] {
            let cfg: DensityConfig = serde_json::from_str(json).unwrap();
            let density = cfg.build().unwrap();
            assert_eq!(density.is_even(), even, "{json}");
        }
        let unknown: std::result::Result<DensityConfig, _> =
            serde_json::from_str(r#"{"family": "gaussian", "sigma": 1.0}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn domain_violations_surface_as_domain_errors() {
        let cfg = ExperimentConfig::from_json(
            &MINIMAL.replace(r#"{"family": "zero"}"#, r#"{"family": "poly_bump", "n": 1, "half_width": 2.0}"#),
        )
        .unwrap();
        assert!(matches!(cfg.build_model(), Err(Error::Domain(_))));
        let cfg = ExperimentConfig::from_json(&MINIMAL.replace("0.7", "1.4")).unwrap();
        assert!(matches!(cfg.build_state(), Err(Error::Domain(_))));
    }

    #[test]
    fn log_grid_hits_both_endpoints() {
        let grid = log_time_grid(0.1, 1000.0, 10).unwrap();
        assert_eq!(grid[0], 0.1);
        assert_eq!(*grid.last().unwrap(), 1000.0);
        assert_eq!(grid.len(), 41);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert!(log_time_grid(0.0, 1.0, 10).is_err());
        assert!(log_time_grid(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn monte_carlo_seed_precedence() {
        let json = MINIMAL.replace(
            r#""initial_state""#,
            r#""quadrature": {"monte_carlo": {"samples": 1000}}, "seed": 7, "initial_state""#,
        );
        let cfg = ExperimentConfig::from_json(&json).unwrap();
        match cfg.build_spec(None).unwrap().mode {
            Mode::MonteCarlo { samples, seed } => {
                assert_eq!(samples, 1000);
                assert_eq!(seed, 7);
            }
            _ => panic!("expected Monte Carlo mode"),
        }
        match cfg.build_spec(Some(99)).unwrap().mode {
            Mode::MonteCarlo { seed, .. } => assert_eq!(seed, 99),
            _ => panic!("expected Monte Carlo mode"),
        }
    }

    #[test]
    fn resolved_echo_round_trips() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        let echoed = cfg.resolved_json();
        let back = ExperimentConfig::from_json(&echoed).unwrap();
        assert_eq!(back.resolved_json(), echoed);
        assert!(echoed.contains("\"base_order\": 12"));
    }
}
