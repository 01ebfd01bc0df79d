//! Command-line surface: subcommand dispatch, config loading, file output.

use crate::config::{RunConfig, Solver};
use crate::emde::{
    assemble, discretize, propagate_pm, time_grid, EffectiveModeSet, Trajectory,
};
use crate::errors::{Error, Result};
use crate::ioutil::atomic_write;
use crate::mie::SphereSpec;
use crate::oracles::{markov_solution, volterra_solve, KernelPair};
use crate::spectral::{EmitterSpec, SpectralDensityModel};
use crate::table::EnhancementTable;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::{Path, PathBuf};

/// Simulator of spontaneous-emission dynamics of a degenerate V-type (or
/// two-level) emitter near a Drude-metal nanosphere.
#[derive(Debug, Parser)]
#[command(name = "plasmon-emit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate radial/tangential enhancement factors on an ω × D grid.
    Enhance(RunArgs),
    /// Propagate the emitter amplitudes and write a trajectory CSV.
    Simulate(RunArgs),
    /// Run exact vs flat-continuum variants and report the phase shift.
    CompareFca(RunArgs),
    /// Run the built-in verification suite and exit nonzero on failure.
    Validate(RunArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Path to a `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path (overrides the config `out` key).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Additional `key=value` overrides, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Load the config file (or defaults), then apply `--set` and `--out`.
pub fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for spec in &args.set {
        config.apply_override(spec)?;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.display().to_string());
    }
    config.cross_validate()?;
    Ok(config)
}

/// Everything `simulate` needs: the density model, its discretization, and
/// the normalized initial amplitudes.
pub struct SimulationParts {
    /// Anisotropic spectral-density model over the configured band.
    pub model: SpectralDensityModel,
    /// Midpoint discretization with M modes.
    pub modes: EffectiveModeSet,
    /// Initial amplitude of excited state 1.
    pub a1: Complex64,
    /// Initial amplitude of excited state 2.
    pub a2: Complex64,
}

fn sphere_from(config: &RunConfig) -> Result<SphereSpec> {
    SphereSpec::new(
        config.radius_nm,
        config.omega_p_ev,
        config.eps_inf,
        config.gamma_ev,
        config.eps_background,
    )
}

/// Frequency nodes for the simulation table: the band edges plus the M
/// midpoints, computed exactly as the discretization computes them so the
/// density evaluations hit table nodes.
fn simulation_omega_grid(band: (f64, f64), m: usize) -> Vec<f64> {
    let dw = (band.1 - band.0) / m as f64;
    let mut grid = Vec::with_capacity(m + 2);
    grid.push(band.0);
    for i in 0..m {
        grid.push(band.0 + (i as f64 + 0.5) * dw);
    }
    grid.push(band.1);
    grid
}

/// Evenly spaced grid with both endpoints pinned exactly.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// Build the model and mode set for a simulation run.
pub fn build_simulation(config: &RunConfig) -> Result<SimulationParts> {
    let sphere = sphere_from(config)?;
    let band = (config.band_lo_ev, config.band_hi_ev);
    let (raw1, raw2) = config.init.amplitudes();
    let emitter = EmitterSpec::new(
        config.omega0_ev,
        config.tau0_fs,
        config.dipole_config,
        raw1,
        raw2,
    )?;
    let table = EnhancementTable::build(
        sphere,
        simulation_omega_grid(band, config.m),
        vec![config.d_nm],
        config.truncation,
    )?;
    let model = SpectralDensityModel::new(emitter, table, config.d_nm, band, config.fca)?;
    let modes = discretize(&model, config.m)?;
    let (a1, a2) = (model.emitter.a1, model.emitter.a2);
    Ok(SimulationParts {
        model,
        modes,
        a1,
        a2,
    })
}

/// Dispatch to the configured solver and attach the config metadata.
pub fn solve_trajectory(config: &RunConfig, parts: &SimulationParts) -> Result<Trajectory> {
    let times = time_grid(config.t_max_fs, config.dt_out_fs)?;
    let omega0 = config.omega0_ev;
    let mut traj = match config.solver {
        Solver::EigenPm => propagate_pm(&parts.modes, omega0, parts.a1, parts.a2, &times)?,
        Solver::Eigen => {
            let mut system = assemble(&parts.modes, omega0);
            system.propagate(parts.a1, parts.a2, &times)?
        }
        Solver::Volterra => {
            let ratio = config.dt_out_fs / config.dt_volterra_fs;
            let stride = ratio.round();
            if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio.max(1.0) {
                return Err(Error::Config(format!(
                    "dt_out_fs = {} must be an integer multiple of dt_volterra_fs = {}",
                    config.dt_out_fs, config.dt_volterra_fs
                )));
            }
            let kernels = KernelPair::from_modes(&parts.modes, omega0);
            let fine = volterra_solve(
                &kernels,
                parts.a1,
                parts.a2,
                config.dt_volterra_fs,
                config.t_max_fs,
            )?;
            fine.decimated(stride as usize)
        }
        Solver::Markov => {
            let (j_plus, j_minus) = parts.model.mode_densities(omega0)?;
            let mut c1 = Vec::with_capacity(times.len());
            let mut c2 = Vec::with_capacity(times.len());
            for &t in &times {
                let (u1, u2) = markov_solution(j_plus, j_minus, parts.a1, parts.a2, t);
                c1.push(u1);
                c2.push(u2);
            }
            Trajectory {
                times_fs: times.clone(),
                c1,
                c2,
                solver_id: "markov".to_string(),
                metadata: Vec::new(),
            }
        }
    };
    traj.metadata = run_metadata(config);
    Ok(traj)
}

/// Config fields as CSV metadata; the solver id is emitted separately by
/// the trajectory writer, and the code version is appended here.
fn run_metadata(config: &RunConfig) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = config
        .to_metadata()
        .into_iter()
        .filter(|(k, _)| k != "solver" && k != "out")
        .collect();
    meta.push(("version".to_string(), env!("CARGO_PKG_VERSION").to_string()));
    meta
}

fn output_path(config: &RunConfig, default_name: &str) -> PathBuf {
    PathBuf::from(
        config
            .out
            .clone()
            .unwrap_or_else(|| default_name.to_string()),
    )
}

fn cmd_enhance(config: &RunConfig) -> Result<()> {
    let sphere = sphere_from(config)?;
    let omega_grid = linspace(config.band_lo_ev, config.band_hi_ev, config.n_omega);
    let (d_lo, d_hi) = config.distance_range();
    let distance_grid = linspace(d_lo, d_hi, config.n_d);
    let mut cache_note = "no cache configured";
    let table = match &config.cache {
        Some(cache_path) => {
            let path = Path::new(cache_path);
            let cached = if path.exists() {
                EnhancementTable::read_cache(path).ok()
            } else {
                None
            };
            match cached {
                Some(t)
                    if t.sphere == sphere
                        && t.truncation == config.truncation
                        && t.omega_grid == omega_grid
                        && t.distance_grid == distance_grid =>
                {
                    cache_note = "reused cache";
                    t
                }
                _ => {
                    let t = EnhancementTable::build(
                        sphere,
                        omega_grid,
                        distance_grid,
                        config.truncation,
                    )?;
                    t.write_cache(path)?;
                    cache_note = "rebuilt cache";
                    t
                }
            }
        }
        None => EnhancementTable::build(sphere, omega_grid, distance_grid, config.truncation)?,
    };
    let out = output_path(config, "enhancement.csv");
    table.write_csv(&out)?;
    println!(
        "wrote {} x {} enhancement factors to {} ({cache_note})",
        table.omega_grid.len(),
        table.distance_grid.len(),
        out.display()
    );
    Ok(())
}

fn cmd_simulate(config: &RunConfig) -> Result<()> {
    let parts = build_simulation(config)?;
    let (tau_perp, tau_par) = parts.model.effective_times_fs()?;
    let traj = solve_trajectory(config, &parts)?;
    let out = output_path(config, "trajectory.csv");
    traj.write_csv(&out)?;
    println!(
        "effective lifetimes at omega0: radial {tau_perp:.3} fs, tangential {tau_par:.3} fs"
    );
    println!(
        "wrote {} samples ({} solver, M = {}) to {}",
        traj.len(),
        traj.solver_id,
        parts.modes.len(),
        out.display()
    );
    Ok(())
}

fn describe_minimum(label: &str, min: Option<(f64, f64)>) -> String {
    match min {
        Some((t, p)) => format!("{label}: first local minimum of p1 at {t} fs (p1 = {p:.6})"),
        None => format!("{label}: no local minimum of p1 inside the simulated window"),
    }
}

fn cmd_compare_fca(config: &RunConfig) -> Result<()> {
    let stem_owned;
    let stem = match &config.out {
        Some(out) => {
            stem_owned = out.strip_suffix(".csv").unwrap_or(out).to_string();
            &stem_owned
        }
        None => "compare_fca",
    };
    let mut results: Vec<(bool, Trajectory)> = Vec::new();
    for fca in [false, true] {
        let variant = RunConfig {
            fca,
            ..config.clone()
        };
        let parts = build_simulation(&variant)?;
        let suffix = if fca { "fca" } else { "exact" };
        let traj = solve_trajectory(&variant, &parts)?;
        traj.write_csv(Path::new(&format!("{stem}_{suffix}.csv")))?;
        let densities = parts.model.densities_csv(config.n_omega.max(2))?;
        atomic_write(
            Path::new(&format!("{stem}_densities_{suffix}.csv")),
            &densities,
        )?;
        results.push((fca, traj));
    }
    let exact_min = results[0].1.first_local_minimum_p1();
    let fca_min = results[1].1.first_local_minimum_p1();
    println!(
        "wrote {stem}_exact.csv, {stem}_fca.csv, {stem}_densities_exact.csv, \
         {stem}_densities_fca.csv"
    );
    println!("{}", describe_minimum("exact", exact_min));
    println!("{}", describe_minimum("flat-continuum", fca_min));
    match (exact_min, fca_min) {
        (Some((te, _)), Some((tf, _))) => {
            let shift = tf - te;
            let label = if shift > 0.0 {
                "positive (the flat-continuum minimum comes later)"
            } else if shift < 0.0 {
                "negative (the flat-continuum minimum comes earlier)"
            } else {
                "zero (the minima coincide)"
            };
            println!("phase shift (flat-continuum minus exact) = {shift} fs: {label}");
        }
        _ => println!("phase shift undefined: a local minimum was not found"),
    }
    Ok(())
}

/// Execute a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Enhance(args) => cmd_enhance(&load_config(args)?),
        Command::Simulate(args) => cmd_simulate(&load_config(args)?),
        Command::CompareFca(args) => cmd_compare_fca(&load_config(args)?),
        Command::Validate(args) => {
            let _ = load_config(args)?;
            crate::validate::run_and_print()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitialState;

    fn tiny_config() -> RunConfig {
        RunConfig {
            m: 15,
            t_max_fs: 20.0,
            dt_out_fs: 1.0,
            ..RunConfig::default()
        }
    }

    #[test]
    fn simulation_grid_wraps_the_midpoints_with_the_band_edges() {
        let grid = simulation_omega_grid((3.5, 4.5), 10);
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0], 3.5);
        assert_eq!(*grid.last().unwrap(), 4.5);
        assert_eq!(grid[1], 3.55);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linspace_pins_both_endpoints() {
        let g = linspace(3.0, 4.6, 321);
        assert_eq!(g.len(), 321);
        assert_eq!(g[0], 3.0);
        assert_eq!(*g.last().unwrap(), 4.6);
        assert_eq!(linspace(2.0, 9.0, 1), vec![2.0]);
    }

    #[test]
    fn build_simulation_discretizes_the_requested_mode_count() {
        let parts = build_simulation(&tiny_config()).unwrap();
        assert_eq!(parts.modes.len(), 15);
        assert_eq!(parts.model.table.omega_grid.len(), 17);
        assert_eq!(parts.a1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn every_solver_starts_from_the_initial_population() {
        for solver in [Solver::EigenPm, Solver::Eigen, Solver::Volterra, Solver::Markov] {
            let config = RunConfig {
                solver,
                dt_volterra_fs: 0.05,
                ..tiny_config()
            };
            let parts = build_simulation(&config).unwrap();
            let traj = solve_trajectory(&config, &parts).unwrap();
            assert_eq!(traj.times_fs[0], 0.0);
            assert!((traj.p1(0) - 1.0).abs() < 1e-14, "{solver:?}");
            assert_eq!(traj.len(), 21, "{solver:?}");
        }
    }

    #[test]
    fn volterra_rejects_incommensurate_output_steps() {
        let config = RunConfig {
            solver: Solver::Volterra,
            dt_out_fs: 1.0,
            dt_volterra_fs: 0.3,
            ..tiny_config()
        };
        let parts = build_simulation(&config).unwrap();
        let err = solve_trajectory(&config, &parts).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn metadata_includes_version_but_not_the_solver_key() {
        let config = tiny_config();
        let meta = run_metadata(&config);
        assert!(meta.iter().any(|(k, _)| k == "version"));
        assert!(meta.iter().all(|(k, _)| k != "solver"));
        assert!(meta.iter().any(|(k, _)| k == "m"));
    }

    #[test]
    fn sis_initial_state_reaches_the_solvers_normalized() {
        let config = RunConfig {
            init: InitialState::Sis,
            ..tiny_config()
        };
        let parts = build_simulation(&config).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((parts.a1.re - s).abs() < 1e-15);
        assert!((parts.a2.re - s).abs() < 1e-15);
    }

    #[test]
    fn output_path_prefers_the_config_value() {
        let mut config = tiny_config();
        assert_eq!(output_path(&config, "trajectory.csv"), PathBuf::from("trajectory.csv"));
        config.out = Some("runs/x.csv".to_string());
        assert_eq!(output_path(&config, "trajectory.csv"), PathBuf::from("runs/x.csv"));
    }
}
