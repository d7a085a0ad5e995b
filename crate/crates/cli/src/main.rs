use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dqs_core::bench::{
    diagnostics_path, experiment_circuit, parse_seconds, run_experiment, sweep, to_qasm, write_csv, write_csv_to,
    write_diagnostics, Backend, ExperimentConfig, Overrides, SweepAxis, TimeSeries, DEFAULT_T2_SWEEP,
};
use dqs_core::devsim::{calibrate_exchange, Device};
use dqs_core::trotter::NativeSet;
use dqs_core::Error;

#[derive(Parser)]
#[command(
    name = "dqs",
    version,
    about = "Digital quantum simulation experiments on gate and device backends"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one time series and write it as CSV.
    Run(Common),
    /// Run one series per step count or coherence time.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Swept quantity.
        #[arg(long, value_enum, default_value_t = Axis::T2)]
        over: Axis,
        /// Comma-separated values; times accept `us`, `ms`, `s` and `inf`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Print the circuit for the last grid time.
    Compile {
        #[command(flatten)]
        common: Common,
        /// Also print the pulse schedule (device backend).
        #[arg(long)]
        pulses: bool,
    },
    /// Write the circuit for the last grid time as OpenQASM 2.0.
    ExportQasm(Common),
    /// Print the exchange calibration of the device.
    Calibrate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Steps,
    T2,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// spin1 or tim.
    #[arg(long)]
    model: Option<String>,
    /// exact, gate or device.
    #[arg(long)]
    backend: Option<String>,
    /// Trotter steps.
    #[arg(long)]
    steps: Option<usize>,
    /// End of the time grid in dimensionless units.
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Coherence time of the active backend (`us`, `ms`, `s`, `inf`).
    #[arg(long)]
    t2: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    /// The experiment config; every failure here is reported as a config
    /// error.
    fn config(&self) -> Result<ExperimentConfig, Error> {
        self.build().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }

    fn build(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let overrides = Overrides {
            model: self.model.clone(),
            backend: self.backend.as_deref().map(Backend::from_str).transpose()?,
            steps: self.steps,
            tmax: self.tmax,
            points: self.points,
            t2: self.t2.as_deref().map(parse_seconds).transpose()?,
            shots: self.shots,
            seed: self.seed,
            out: self.out.clone(),
        };
        cfg.apply(&overrides)?;
        Ok(cfg)
    }
}

fn native_set(cfg: &ExperimentConfig) -> NativeSet {
    match cfg.backend {
        Backend::Device => NativeSet::SqiswapSet,
        _ => NativeSet::CnotSet,
    }
}

fn emit_text(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_series(cfg: &ExperimentConfig, series: &[TimeSeries]) -> Result<(), Error> {
    match &cfg.out {
        Some(p) => {
            write_csv(series, p)?;
            if cfg.backend != Backend::Exact {
                write_diagnostics(series, &diagnostics_path(p))?;
            }
            log::info!(
                "wrote {} rows to {}",
                series.iter().map(TimeSeries::len).sum::<usize>(),
                p.display()
            );
        }
        None => write_csv_to(std::io::stdout().lock(), series)?,
    }
    Ok(())
}

fn sweep_axis(over: Axis, values: &[String]) -> Result<SweepAxis, Error> {
    Ok(match over {
        Axis::Steps => {
            let v = values
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad step count `{s}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            SweepAxis::Steps(if v.is_empty() { vec![2, 5, 10, 20] } else { v })
        }
        Axis::T2 => {
            let v = values.iter().map(|s| parse_seconds(s)).collect::<Result<Vec<_>, _>>()?;
            SweepAxis::T2(if v.is_empty() { DEFAULT_T2_SWEEP.to_vec() } else { v })
        }
    })
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.config()?;
            let series = run_experiment(&cfg)?;
            emit_series(&cfg, &[series])
        }
        Command::Sweep { common, over, values } => {
            let cfg = common.config()?;
            let series = sweep(&cfg, &sweep_axis(over, &values)?)?;
            emit_series(&cfg, &series)
        }
        Command::Compile { common, pulses } => {
            let cfg = common.config()?;
            let c = experiment_circuit(&cfg, cfg.grid.t_max, native_set(&cfg))?;
            let mut text = format!("{c}\n");
            if pulses {
                if cfg.backend != Backend::Device {
                    return Err(Error::Config("--pulses needs the device backend".into()));
                }
                text += &format!("{}\n", Device::new(cfg.device.clone())?.compile(&c)?);
            }
            emit_text(cfg.out.as_ref(), &text)
        }
        Command::ExportQasm(common) => {
            let cfg = common.config()?;
            let c = experiment_circuit(&cfg, cfg.grid.t_max, native_set(&cfg))?;
            emit_text(cfg.out.as_ref(), &to_qasm(&c)?)
        }
        Command::Calibrate(common) => {
            let cfg = common.config()?;
            let cal = calibrate_exchange(&cfg.device)?;
            let khz = |w: f64| w / std::f64::consts::TAU / 1e3;
            let text = format!(
                "exchange frequency/2pi = {:.6} MHz\n\
                 J/2pi (dispersive estimate) = {:.4} kHz\n\
                 J/2pi (spectrum) = {:.4} kHz\n\
                 J/2pi (transfer) = {:.4} kHz\n\
                 t_sqiswap = {:.6} us\n\
                 conditional phase rate/2pi = {:.4} kHz\n",
                cal.frequency / std::f64::consts::TAU / 1e6,
                khz(cal.j_seed),
                khz(cal.j_spectral),
                khz(cal.j),
                cal.t_sqiswap * 1e6,
                khz(cal.kappa),
            );
            emit_text(cfg.out.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Config(_)) {
                2
            } else if e.is_numerical_integrity() {
                3
            } else {
                1
            })
        }
    }
}
