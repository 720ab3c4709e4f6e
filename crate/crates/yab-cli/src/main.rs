//! Command-line front end for the converter model. All numerical work lives
//! in the `yab-sim` library; this binary parses arguments, assembles the
//! parameter set, and writes the requested artifacts.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 model-invariant
//! violation detected at runtime.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use yab_sim::metrics::MetricsError;
use yab_sim::modulation::ModulationError;
use yab_sim::params::{load_config, Severity, Topology};
use yab_sim::report::{
    capbounds_text, dump_cycle_csv, oracle_check, sweep, write_figure, write_text, FigureId,
    MetricKind, ReportError, SweepSpec, ORACLE_CHECK_POINTS, ORACLE_CHECK_SEED,
    ORACLE_PEAK_ERR_BOUND, ORACLE_REL_RMS_BOUND,
};
use yab_sim::waveforms::WaveformError;
use yab_sim::ConverterParams;

/// Sample count the oracle comparison defaults to when none was requested;
/// the discretization gap between the two solvers needs this resolution to
/// stay inside the published bounds.
const ORACLE_DEFAULT_N_SW: usize = 2048;

#[derive(Parser)]
#[command(
    name = "yab-sim",
    version,
    about = "Steady-state model of the three-phase YAB AC-DC converter and its AC-DC DAB baseline"
)]
struct Cli {
    /// Load parameters from a key = value config file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one parameter, e.g. --set v_dc=250 (repeatable, applied
    /// after --config).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Directory for generated files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Converter topology: YAB or ACDC_DAB.
    #[arg(long, global = true)]
    topology: Option<String>,

    /// Samples per switching cycle.
    #[arg(long, global = true)]
    nsw: Option<usize>,

    /// Worker threads for the grid sweep (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the phase-shift sweep and write sweep.csv.
    Sweep {
        /// Phase shifts as fractions of T_sw, comma separated.
        #[arg(long, value_delimiter = ',')]
        phi: Option<Vec<f64>>,
        /// DC-port voltages in volts, comma separated.
        #[arg(long, value_delimiter = ',')]
        vdc: Option<Vec<f64>>,
        /// Metric families: power, thd, stress, zvs, loss, flux.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
    },
    /// Reproduce one model figure: writes <id>.csv and <id>.plot.
    Figure {
        /// One of: phase-power, power-vs-phi, thd, stress, flux, zvs,
        /// loss-cycle, loss-vs-phi.
        id: String,
    },
    /// Print the blocking-capacitor design bounds.
    Capbounds,
    /// Solve one switching cycle and write it as cycle.csv.
    DumpCycle {
        /// Grid angle in degrees.
        #[arg(long)]
        theta: f64,
        /// Phase shift as a fraction of T_sw.
        #[arg(long)]
        phi: f64,
    },
    /// Compare the solver against the time-domain oracle on randomized
    /// operating points; write oracle-check.csv.
    OracleCheck {
        #[arg(long, default_value_t = ORACLE_CHECK_POINTS)]
        points: usize,
        #[arg(long, default_value_t = ORACLE_CHECK_SEED)]
        seed: u64,
    },
    /// Check the parameter set and report all violations.
    Validate,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(err: ReportError) -> Self {
        let code = if is_config_error(&err) { 1 } else { 2 };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

/// Separates bad input (exit 1) from violated model invariants (exit 2).
fn is_config_error(err: &ReportError) -> bool {
    fn over_modulation(m: &ModulationError) -> bool {
        matches!(m, ModulationError::OverModulation { .. })
    }
    match err {
        ReportError::Params(_)
        | ReportError::LossMap(_)
        | ReportError::Io { .. }
        | ReportError::InvalidSpec(_)
        | ReportError::UnknownFigure(_) => true,
        ReportError::Waveform(WaveformError::Modulation(m)) => over_modulation(m),
        ReportError::Metrics(m) => match m {
            MetricsError::InvalidParams(_)
            | MetricsError::LossMap(_)
            | MetricsError::BadHarmonicCount { .. } => true,
            MetricsError::Modulation(inner) => over_modulation(inner),
            MetricsError::Waveform(WaveformError::Modulation(inner)) => over_modulation(inner),
            _ => false,
        },
        _ => false,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be positive"));
        }
        // Ignore the error: the pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let mut params = match &cli.config {
        Some(path) => load_config(path).map_err(|e| CliError::usage(e.to_string()))?,
        None => ConverterParams::default(),
    };
    for setting in &cli.set {
        let (key, value) = setting
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{setting}`")))?;
        params
            .apply_setting(key.trim(), value.trim())
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    if let Some(name) = &cli.topology {
        params.topology = Topology::parse(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown topology `{name}`; expected YAB or ACDC_DAB"
            ))
        })?;
    }
    if let Some(n_sw) = cli.nsw {
        params.n_sw = n_sw;
    }

    match &cli.command {
        Command::Sweep { phi, vdc, metrics } => {
            let mut spec = SweepSpec::default();
            if let Some(phi) = phi {
                spec.phi_grid = phi.clone();
            }
            if let Some(vdc) = vdc {
                spec.v_dc_list = vdc.clone();
            }
            if cli.topology.is_some() {
                spec.topologies = vec![params.topology];
            }
            if let Some(names) = metrics {
                spec.metrics = names
                    .iter()
                    .map(|n| {
                        MetricKind::parse(n).ok_or_else(|| {
                            CliError::usage(format!(
                                "unknown metric `{n}`; expected power, thd, stress, zvs, loss, or flux"
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            }
            note_placeholders(&params);
            let csv = sweep(&spec, &params)?;
            let path = prepare_out_file(&cli.out_dir, "sweep.csv")?;
            write_text(&path, &csv)?;
            println!("wrote {}", path.display());
        }
        Command::Figure { id } => {
            let figure = FigureId::parse(id).ok_or_else(|| {
                let known: Vec<&str> = FigureId::ALL.iter().map(|f| f.name()).collect();
                CliError::usage(format!(
                    "unknown figure `{id}`; expected one of: {}",
                    known.join(", ")
                ))
            })?;
            note_placeholders(&params);
            ensure_out_dir(&cli.out_dir)?;
            let (csv_path, plot_path) = write_figure(figure, &params, &cli.out_dir)?;
            println!("wrote {}", csv_path.display());
            println!("wrote {}", plot_path.display());
        }
        Command::Capbounds => {
            print!("{}", capbounds_text(&params)?);
        }
        Command::DumpCycle { theta, phi } => {
            let csv = dump_cycle_csv(&params, *theta, *phi)?;
            let path = prepare_out_file(&cli.out_dir, "cycle.csv")?;
            write_text(&path, &csv)?;
            println!("wrote {}", path.display());
        }
        Command::OracleCheck { points, seed } => {
            if cli.nsw.is_none() && !nsw_came_from_settings(&cli) {
                params.n_sw = ORACLE_DEFAULT_N_SW;
            }
            let check = oracle_check(&params, *points, *seed)?;
            let path = prepare_out_file(&cli.out_dir, "oracle-check.csv")?;
            write_text(&path, &check.csv)?;
            println!("wrote {}", path.display());
            println!(
                "pooled rel rms err {:.3e} (bound {ORACLE_REL_RMS_BOUND}), worst sample {:.3e} of peak (bound {ORACLE_PEAK_ERR_BOUND})",
                check.pooled_rel_rms, check.global_max_over_peak
            );
            if !check.within_bounds() {
                return Err(CliError {
                    code: 2,
                    message: format!(
                        "solver disagrees with the time-domain oracle beyond bounds at N_sw = {}",
                        params.n_sw
                    ),
                });
            }
        }
        Command::Validate => {
            let violations = params.validate();
            let mut errors = 0;
            for v in &violations {
                match v.severity {
                    Severity::Error => {
                        errors += 1;
                        println!("error: {}", v.message);
                    }
                    Severity::Warning => println!("warning: {}", v.message),
                }
            }
            if errors > 0 {
                return Err(CliError::usage(format!(
                    "{errors} parameter error(s), {} warning(s)",
                    violations.len() - errors
                )));
            }
            println!("configuration ok ({} warning(s))", violations.len());
        }
    }
    Ok(())
}

/// Whether the user pinned N_sw through --set or the config file; if so the
/// oracle check respects it instead of its own default.
fn nsw_came_from_settings(cli: &Cli) -> bool {
    let set_has_nsw = cli
        .set
        .iter()
        .any(|s| s.split_once('=').is_some_and(|(k, _)| k.trim() == "N_sw"));
    let config_has_nsw = cli.config.as_deref().is_some_and(config_mentions_nsw);
    set_has_nsw || config_has_nsw
}

fn config_mentions_nsw(path: &Path) -> bool {
    std::fs::read_to_string(path).is_ok_and(|text| {
        text.lines().any(|line| {
            let uncommented = line.split('#').next().unwrap_or("");
            uncommented
                .split_once('=')
                .is_some_and(|(k, _)| k.trim() == "N_sw")
        })
    })
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))
}

fn prepare_out_file(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    ensure_out_dir(dir)?;
    Ok(dir.join(name))
}

fn note_placeholders(params: &ConverterParams) {
    let (_, r_ph) = params.resolve_r_ds_on();
    let (_, c_ph) = params.resolve_c_oss();
    if r_ph || c_ph {
        eprintln!("note: placeholder device values in use (R_ds_on, C_oss); not device data");
    }
    if params.loss_map.is_none() {
        eprintln!("note: synthetic loss map in use; not device data");
    }
}
