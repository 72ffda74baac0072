//! Command-line front end.
//!
//! Every run is driven by a JSON config (see `config` module docs); outputs
//! land in `--out` as CSV/JSON with the resolved config echoed alongside, so
//! an artifact is reproducible from itself.
//!
//! Exit codes: 0 success, 1 validation failures, 2 config/input errors,
//! 3 convergence or fit failures, 4 domain errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qubit_noise::analysis::{dephasing_distance, regime_report};
use qubit_noise::averaging::{deviation_series, expected_rho, final_state, final_state_coeffs};
use qubit_noise::closed_form::{rho_t, NoiseCoordinates};
use qubit_noise::config::ExperimentConfig;
use qubit_noise::{validate, Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "qnoise",
    version,
    about = "Qubit dynamics under random static noise: evolution, averaging, rates, regimes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-realization evolution at the frozen noise coordinates.
    Evolve(RunArgs),
    /// Noise-averaged state on the time grid.
    Average(RunArgs),
    /// Final-state coefficients and the final state of the initial state.
    FinalState(RunArgs),
    /// Deviation-from-final-state series and its power-law rate fit.
    RateFit(RunArgs),
    /// Regime classification with leading-order coefficient predictions.
    RegimeCheck(RunArgs),
    /// Built-in consistency checks (no config needed).
    Validate,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed for Monte Carlo mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for series evaluation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Io(_) => 2u8,
                Error::Convergence { .. } | Error::Fit(_) => 3,
                Error::Domain(_) => 4,
            })
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Evolve(args) => run_evolve(&args)?,
        Command::Average(args) => run_average(&args)?,
        Command::FinalState(args) => run_final_state(&args)?,
        Command::RateFit(args) => run_rate_fit(&args)?,
        Command::RegimeCheck(args) => run_regime_check(&args)?,
        Command::Validate => return Ok(run_validate()),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_validate() -> ExitCode {
    let results = validate::run_all();
    let mut failures = 0;
    for r in &results {
        match &r.outcome {
            Ok(()) => println!("ok   - {}", r.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL - {}: {detail}", r.name);
            }
        }
    }
    println!("{} passed, {failures} failed", results.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    seed: Option<u64>,
}

fn setup(args: &RunArgs) -> Result<Run> {
    if let Some(n) = args.threads {
        // ignore the error if a pool already exists (tests share a process)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = ExperimentConfig::from_path(&args.config)?;
    std::fs::create_dir_all(&args.out)?;
    Ok(Run {
        cfg,
        out: args.out.clone(),
        seed: args.seed,
    })
}

fn csv_header(cfg: &ExperimentConfig, columns: &str) -> String {
    let compact = serde_json::to_value(cfg)
        .and_then(|v| serde_json::to_string(&v))
        .expect("config serialization cannot fail");
    format!("# qnoise v{VERSION}\n# config: {compact}\n{columns}\n")
}

fn write_output(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn time_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.time_grid
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs a time_grid block".into()))?
        .build()
}

fn run_evolve(args: &RunArgs) -> Result<()> {
    let run = setup(args)?;
    let frozen = run
        .cfg
        .frozen
        .ok_or_else(|| Error::Config("evolve needs a frozen block with coordinates x, y".into()))?;
    let rho0 = run.cfg.build_state()?;
    let coords = NoiseCoordinates {
        x: frozen.x,
        y: frozen.y,
        eps: run.cfg.model.eps,
    };
    let grid = time_grid(&run.cfg)?;
    let mut body = csv_header(&run.cfg, "t,rho11,re_rho12,im_rho12,purity");
    for t in grid {
        let rho = rho_t(&rho0, &coords, t)?;
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t,
            rho.rho11(),
            rho.rho12().re,
            rho.rho12().im,
            rho.purity()
        ));
    }
    write_output(&run.out.join("evolve.csv"), &body)
}

fn run_average(args: &RunArgs) -> Result<()> {
    let run = setup(args)?;
    let model = run.cfg.build_model()?;
    let rho0 = run.cfg.build_state()?;
    let spec = run.cfg.build_spec(run.seed)?;
    let grid = time_grid(&run.cfg)?;
    let mut body = csv_header(&run.cfg, "t,rho11,re_rho12,im_rho12,rho11_err,rho12_err");
    for t in grid {
        let avg = expected_rho(&model, &rho0, t, &spec)?;
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t,
            avg.rho.rho11(),
            avg.rho.rho12().re,
            avg.rho.rho12().im,
            avg.rho11_err,
            avg.rho12_err
        ));
    }
    write_output(&run.out.join("average.csv"), &body)
}

fn run_final_state(args: &RunArgs) -> Result<()> {
    let run = setup(args)?;
    let model = run.cfg.build_model()?;
    let rho0 = run.cfg.build_state()?;
    let spec = run.cfg.build_spec(run.seed)?;
    let (coeffs, err) = final_state_coeffs(&model, &spec)?;
    let rho_bar = final_state(&coeffs, &rho0)?;
    let doc = serde_json::json!({
        "version": VERSION,
        "alpha": coeffs.alpha,
        "beta": coeffs.beta,
        "gamma": coeffs.gamma,
        "identity_residual": coeffs.beta + 2.0 * coeffs.alpha - 1.0,
        "coeff_error_estimate": err,
        "rho_bar": {
            "rho11": rho_bar.rho11(),
            "re_rho12": rho_bar.rho12().re,
            "im_rho12": rho_bar.rho12().im,
        },
        "config": serde_json::to_value(&run.cfg).expect("config serialization cannot fail"),
    });
    write_output(
        &run.out.join("final_state.json"),
        &format!("{:#}\n", doc),
    )
}

fn run_rate_fit(args: &RunArgs) -> Result<()> {
    let run = setup(args)?;
    let model = run.cfg.build_model()?;
    let rho0 = run.cfg.build_state()?;
    let spec = run.cfg.build_spec(run.seed)?;
    let grid = time_grid(&run.cfg)?;
    let window = run
        .cfg
        .fit_window
        .ok_or_else(|| Error::Config("rate-fit needs a fit_window [t_lo, t_hi]".into()))?;
    let series = deviation_series(&model, &rho0, &grid, &spec)?;
    let mut csv = csv_header(&run.cfg, "");
    csv.pop();
    csv.push_str(&series.to_csv());
    write_output(&run.out.join("deviations.csv"), &csv)?;
    let fit = qubit_noise::analysis::fit_power_law(
        &series.times,
        &series.dev_frobenius,
        &series.error_estimates,
        (window[0], window[1]),
    )?;
    let doc = serde_json::json!({
        "version": VERSION,
        "exponent": fit.exponent,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "window": [fit.window.0, fit.window.1],
        "n_envelope_points": fit.n_envelope_points,
        "flags": fit.flags,
        "non_convergent": series.non_convergent,
        "config": serde_json::to_value(&run.cfg).expect("config serialization cannot fail"),
    });
    println!(
        "fit: exponent {:.6}, r^2 {:.6}, {} envelope points",
        fit.exponent, fit.r_squared, fit.n_envelope_points
    );
    write_output(&run.out.join("rate_fit.json"), &format!("{:#}\n", doc))
}

fn run_regime_check(args: &RunArgs) -> Result<()> {
    let run = setup(args)?;
    let model = run.cfg.build_model()?;
    let rho0 = run.cfg.build_state()?;
    let spec = run.cfg.build_spec(run.seed)?;
    let report = regime_report(&model, &spec)?;
    let distances = dephasing_distance(&model, &rho0, &spec)?;
    let mut doc = serde_json::to_value(&report).expect("report serialization cannot fail");
    let obj = doc.as_object_mut().expect("report is an object");
    obj.insert(
        "dist_energy_basis".into(),
        serde_json::json!(distances.dist_energy_basis),
    );
    obj.insert(
        "dist_delocalized_basis".into(),
        serde_json::json!(distances.dist_delocalized_basis),
    );
    obj.insert("version".into(), serde_json::json!(VERSION));
    obj.insert(
        "config".into(),
        serde_json::to_value(&run.cfg).expect("config serialization cannot fail"),
    );
    write_output(&run.out.join("regime_check.json"), &format!("{:#}\n", doc))
}
