use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::config::Config;
use super::sigma::{scan_sigma, ScanSpec, Units};
use super::sweep::{find_lambda_for_as, sweep_lambda, Sweep, AS_TOLERANCE};
use super::system::{build_dimer, build_surface, System};
use crate::radial::{count_bound_states, scattering_length, RadialProblem};
use crate::resonance::{fit_breit_wigner, time_delay, PhaseSeries};
use crate::units::{
    bohr_to_angstrom, hartree_to_cm1, hartree_to_microkelvin, kelvin_to_hartree,
    AU_TIME_IN_SECONDS, DALTON_IN_ME,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Au,
    Lab,
}

#[derive(Debug, Parser)]
#[command(
    name = "ucscat",
    version,
    about = "Ultracold atom-diatom scattering workbench"
)]
struct Cli {
    /// TOML run configuration; built-in surrogate defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value = "lab")]
    units: UnitsArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Calibrate and fit the dimer curve, report its long-range coefficients.
    FitDimer,
    /// Fit the nonadditive trimer surface and report its sample residual.
    FitTrimer,
    /// Bound states and scattering lengths of the dimer and the atom-diatom system.
    DimerProps {
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
    },
    /// Scattering length over a lambda grid, with pole brackets.
    SweepLambda {
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: Option<f64>,
        #[arg(long)]
        lambda_step: Option<f64>,
    },
    /// Lambda giving a target scattering length (bohr).
    FindLambda {
        #[arg(long = "as", allow_negative_numbers = true)]
        target: f64,
        #[arg(long, allow_negative_numbers = true)]
        lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        hi: Option<f64>,
    },
    /// Partial cross sections, phases and time delays on an energy grid.
    ScanSigma {
        /// Total angular momenta, comma separated.
        #[arg(long = "J", value_delimiter = ',')]
        total_j: Vec<u32>,
        /// Tune lambda to this scattering length (bohr) first.
        #[arg(long = "as", allow_negative_numbers = true)]
        target: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Lowest energy (Kelvin).
        #[arg(long)]
        emin: Option<f64>,
        /// Highest energy (Kelvin).
        #[arg(long)]
        emax: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Fit a background plus resonance to a phase series CSV (energy_uK, delta_rad).
    FitResonance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        ell: u32,
    },
    /// Wigner time delay of a phase series CSV, written to standard output.
    TimeDelay {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        ell: u32,
    },
}

/// Run the command line; returns the process exit code: 0 on success, 1 for
/// usage or input errors, 2 for numerical failures.
pub fn cli_main<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::Parse { .. }
        | Error::InvalidInput(_)
        | Error::UnknownUnit(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<String> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let units = match cli.units {
        UnitsArg::Au => Units::Au,
        UnitsArg::Lab => Units::Lab,
    };
    match cli.command {
        Command::FitDimer => fit_dimer(&config, &cli.out, units),
        Command::FitTrimer => fit_trimer(&config),
        Command::DimerProps { lambda } => {
            if let Some(l) = lambda {
                config.lambda = l;
            }
            dimer_props(&config)
        }
        Command::SweepLambda {
            lambda_min,
            lambda_max,
            lambda_step,
        } => {
            if lambda_min.is_some() || lambda_max.is_some() || lambda_step.is_some() {
                config.lambdas.clear();
            }
            config.lambda_min = lambda_min.unwrap_or(config.lambda_min);
            config.lambda_max = lambda_max.unwrap_or(config.lambda_max);
            config.lambda_step = lambda_step.unwrap_or(config.lambda_step);
            config.validate()?;
            let system = System::build(&config)?;
            let sweep = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
                .install(|| sweep_lambda(&system, &config.lambda_grid()));
            fs::create_dir_all(&cli.out)?;
            fs::write(cli.out.join("sweep_lambda.csv"), sweep_csv(&sweep))?;
            fs::write(cli.out.join("poles.csv"), poles_csv(&sweep))?;
            Ok(sweep_summary(&sweep))
        }
        Command::FindLambda { target, lo, hi } => {
            let bracket = [
                lo.unwrap_or(config.bracket[0]),
                hi.unwrap_or(config.bracket[1]),
            ];
            let system = System::build(&config)?;
            let l = find_lambda_for_as(&system, target, bracket, AS_TOLERANCE)?;
            let a = system.scattering_length(l)?.a;
            Ok(format!("lambda = {l:.10}\na_s_bohr = {a:.6}\n"))
        }
        Command::ScanSigma {
            total_j,
            target,
            lambda,
            emin,
            emax,
            points,
        } => {
            if !total_j.is_empty() {
                config.total_j = total_j;
            }
            if target.is_some() {
                config.target_as = target;
            }
            if let Some(l) = lambda {
                config.lambda = l;
                config.lambdas.clear();
                config.target_as = None;
            }
            config.e_min_kelvin = emin.unwrap_or(config.e_min_kelvin);
            config.e_max_kelvin = emax.unwrap_or(config.e_max_kelvin);
            config.energy_points = points.unwrap_or(config.energy_points);
            config.validate()?;
            run_scan_sigma(&config, &cli.out, cli.threads, units)
        }
        Command::FitResonance { input, ell } => {
            let series = PhaseSeries::from_csv(&fs::read_to_string(input)?, ell)?;
            Ok(fit_breit_wigner(&series)?.to_key_value())
        }
        Command::TimeDelay { input, ell } => {
            let series = PhaseSeries::from_csv(&fs::read_to_string(input)?, ell)?;
            let td = time_delay(&series)?;
            let mut out = String::new();
            match units {
                Units::Au => out.push_str("energy_hartree,Q_au\n"),
                Units::Lab => out.push_str("energy_uK,Q_ps\n"),
            }
            for (e, q) in td.energies.iter().zip(&td.q) {
                let _ = match units {
                    Units::Au => writeln!(out, "{e:.10e},{q:.10e}"),
                    Units::Lab => writeln!(
                        out,
                        "{:.10e},{:.10e}",
                        hartree_to_microkelvin(*e),
                        q * AU_TIME_IN_SECONDS * 1e12
                    ),
                };
            }
            Ok(out)
        }
    }
}

/// Lambdas of a cross-section scan: tuned to `target_as` when set, else the
/// explicit list, else the single configured value.
pub fn scan_lambdas(system: &System) -> Result<Vec<f64>> {
    let c = &system.config;
    if let Some(t) = c.target_as {
        return Ok(vec![find_lambda_for_as(
            system,
            t,
            c.bracket,
            AS_TOLERANCE,
        )?]);
    }
    Ok(if c.lambdas.is_empty() {
        vec![c.lambda]
    } else {
        c.lambdas.clone()
    })
}

fn run_scan_sigma(config: &Config, out: &Path, threads: usize, units: Units) -> Result<String> {
    let system = System::build(config)?;
    let spec = ScanSpec {
        lambdas: scan_lambdas(&system)?,
        total_j: config.total_j.clone(),
        energies: config
            .energy_grid_kelvin()
            .into_iter()
            .map(kelvin_to_hartree)
            .collect(),
        refine_passes: config.refine_passes,
    };
    let hash = config.hash()?;
    fs::create_dir_all(out)?;
    let path = out.join("scan_sigma.csv");
    let mut text = String::new();
    match scan_sigma(&system, &spec, threads, units, &hash, &path)? {
        None => {
            let _ = writeln!(text, "complete = {}", path.display());
        }
        Some(o) => {
            let _ = writeln!(text, "written = {}", path.display());
            let _ = writeln!(text, "rows = {}", o.rows.len());
            let _ = writeln!(text, "computed = {}", o.computed);
            let _ = writeln!(text, "reused = {}", o.reused);
            let failed = o.rows.iter().filter(|r| r.error.is_some()).count();
            let _ = writeln!(text, "failed = {failed}");
        }
    }
    for l in &spec.lambdas {
        let _ = writeln!(text, "lambda = {l:.10}");
    }
    let _ = writeln!(text, "config_sha256 = {hash}");
    Ok(text)
}

fn fit_dimer(config: &Config, out: &Path, units: Units) -> Result<String> {
    let curve = build_dimer(config)?;
    let (c6, c8, c10) = curve.tail_coefficients();
    let cal = curve.calibration();
    let mut text = String::new();
    let _ = writeln!(text, "calibration_shift_angstrom = {:.8}", cal.shift);
    let _ = writeln!(text, "calibration_scale = {:.8}", cal.scale);
    let _ = writeln!(text, "c6_au = {c6:.6e}");
    let _ = writeln!(text, "c8_au = {c8:.6e}");
    let _ = writeln!(text, "c10_au = {c10:.6e}");
    let _ = writeln!(text, "switch_radius_bohr = {:.6}", curve.switch_radius());
    let mut table = match units {
        Units::Au => String::from("r_bohr,V_hartree\n"),
        Units::Lab => String::from("r_angstrom,V_cm1\n"),
    };
    let r0 = curve.inner_radius();
    for i in 0..=400 {
        let r = r0 + (40.0 - r0) * i as f64 / 400.0;
        let v = curve.evaluate(r);
        let _ = match units {
            Units::Au => writeln!(table, "{r:.8e},{v:.10e}"),
            Units::Lab => writeln!(
                table,
                "{:.8e},{:.10e}",
                bohr_to_angstrom(r),
                hartree_to_cm1(v)
            ),
        };
    }
    fs::create_dir_all(out)?;
    let path = out.join("dimer_curve.csv");
    fs::write(&path, table)?;
    let _ = writeln!(text, "written = {}", path.display());
    Ok(text)
}

fn fit_trimer(config: &Config) -> Result<String> {
    let dimer = std::sync::Arc::new(build_dimer(config)?);
    let surface = build_surface(config, dimer)?;
    let raw = match &config.trimer_samples {
        Some(p) => crate::rkhs::io::read_samples_3d(p)?,
        None => crate::potentials::surrogate::trimer_samples(),
    };
    let mut worst: f64 = 0.0;
    for &(a, b, c, v) in &raw {
        let au = |x: f64| crate::units::angstrom_to_bohr(x);
        let got = hartree_to_cm1(surface.evaluate(au(a), au(b), au(c))?);
        worst = worst.max((got - v).abs() / v.abs().max(1.0));
    }
    let mut text = String::new();
    let _ = writeln!(text, "samples = {}", raw.len());
    let _ = writeln!(text, "max_relative_residual = {worst:.3e}");
    let _ = writeln!(
        text,
        "long_range_subtracted = {}",
        config.subtract_long_range
    );
    let _ = writeln!(
        text,
        "sampled_extent_bohr = {:.6}",
        surface.sampled_extent()
    );
    match surface.taper {
        Some(t) => {
            let _ = writeln!(text, "taper_bohr = {:.6} {:.6}", t.start, t.start + t.width);
        }
        None => {
            let _ = writeln!(text, "taper_bohr = none");
        }
    }
    Ok(text)
}

fn dimer_props(config: &Config) -> Result<String> {
    let curve = build_dimer(config)?;
    let mass = 0.5 * config.atom_mass_dalton * DALTON_IN_ME;
    let prob = RadialProblem::new(&curve, mass, 0, 0.0, curve.inner_radius());
    let n = count_bound_states(&prob)?;
    let a = scattering_length(&prob)?.a;
    let system = System::build(config)?;
    let mut text = String::new();
    let _ = writeln!(text, "dimer_bound_states = {n}");
    let _ = writeln!(text, "dimer_a_s_bohr = {a:.6}");
    let _ = writeln!(
        text,
        "rotational_constant_cm1 = {:.6}",
        hartree_to_cm1(system.rotational_constant)
    );
    let _ = writeln!(text, "lambda = {}", config.lambda);
    let _ = writeln!(
        text,
        "atom_diatom_bound_states = {}",
        system.bound_count(config.lambda)?
    );
    match system.scattering_length(config.lambda) {
        Ok(s) => {
            let _ = writeln!(text, "atom_diatom_a_s_bohr = {:.6}", s.a);
        }
        Err(Error::Pole { inverse_length }) => {
            let _ = writeln!(
                text,
                "atom_diatom_a_s_bohr = pole (1/a = {inverse_length:.3e})"
            );
        }
        Err(e) => return Err(e),
    }
    Ok(text)
}

fn opt(x: Option<f64>) -> String {
    x.map_or("nan".into(), |v| format!("{v:.10e}"))
}

fn sweep_csv(s: &Sweep) -> String {
    let mut out = String::from("lambda,a_s_bohr,inverse_length_per_bohr,bound_states,status\n");
    for r in &s.rows {
        let status = r
            .error
            .as_deref()
            .map_or("ok".to_string(), |m| m.replace(['\n', ','], " "));
        let n = r.bound_count.map_or("nan".into(), |n| n.to_string());
        let _ = writeln!(
            out,
            "{:.10e},{},{},{n},{status}",
            r.lambda,
            opt(r.scattering_length),
            opt(r.inverse_length)
        );
    }
    out
}

fn poles_csv(s: &Sweep) -> String {
    let mut out = String::from(
        "lambda_lo,lambda_hi,a_lo_bohr,a_hi_bohr,bound_lo,bound_hi,lambda_a_minus_1000,lambda_a_plus_1000,potential_variation\n",
    );
    for p in &s.report.poles {
        let c = |n: Option<u32>| n.map_or("nan".into(), |n| n.to_string());
        let _ = writeln!(
            out,
            "{:.10e},{:.10e},{:.6e},{:.6e},{},{},{},{},{}",
            p.lo,
            p.hi,
            p.a_lo,
            p.a_hi,
            c(p.count_lo),
            c(p.count_hi),
            opt(p.window.map(|w| w.lambda_negative)),
            opt(p.window.map(|w| w.lambda_positive)),
            opt(p.window.map(|w| w.potential_variation)),
        );
    }
    out
}

fn sweep_summary(s: &Sweep) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rows = {}", s.rows.len());
    let _ = writeln!(
        out,
        "failed = {}",
        s.rows
            .iter()
            .filter(|r| r.scattering_length.is_none())
            .count()
    );
    let _ = writeln!(out, "poles = {}", s.report.poles.len());
    for p in &s.report.poles {
        let _ = writeln!(
            out,
            "pole = [{:.6}, {:.6}] a = {:.3e} .. {:.3e} bound = {:?} -> {:?}",
            p.lo, p.hi, p.a_lo, p.a_hi, p.count_lo, p.count_hi
        );
    }
    out
}
