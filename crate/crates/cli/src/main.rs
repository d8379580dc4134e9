//! Command line front end: single runs, sweeps, reliability simulation,
//! figure tables and schedule dumps.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use urllc_core::experiment::{
    effective_scenario, evaluate, figure_tables, read_sweep_csv, run_sweep, write_sweep_csv, Algorithm, SweepSpec,
    SweepVar,
};
use urllc_core::format::{fmt_sig, to_json_string};
use urllc_core::reliability::validate_reliability;
use urllc_core::{generate_scenario, FadingMode, ParamsConfig, Scenario, SystemParams};

const DELAY_SCOPE: &str = "delays are averaged over served devices only";

#[derive(Parser)]
#[command(name = "urllc", version, about = "Periodic URLLC uplink resource allocation")]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,
    #[command(subcommand)]
    command: Command,
}

/// System parameters: a TOML file, then per-key overrides.
#[derive(Args, Default)]
struct ParamArgs {
    /// TOML file with any of the keys below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Subcarrier spacing in Hz.
    #[arg(long, global = true)]
    omega_hz: Option<f64>,
    /// RU duration in seconds.
    #[arg(long, global = true)]
    tau_s: Option<f64>,
    /// Channel bandwidth in Hz.
    #[arg(long, global = true)]
    bandwidth_hz: Option<f64>,
    /// Transmit SNR in dB.
    #[arg(long, global = true)]
    gamma_t_db: Option<f64>,
    /// Path loss exponent.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Upper bound of the channel interference term.
    #[arg(long, global = true)]
    y_max: Option<f64>,
    /// Packet size in bits.
    #[arg(long, global = true)]
    packet_bits: Option<f64>,
    /// Slots per cycle.
    #[arg(long, global = true)]
    cycle_slots: Option<u32>,
    /// Delivery deadline in slots.
    #[arg(long, global = true)]
    delta_slots: Option<u32>,
    /// Reliability target.
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Largest issue-time distance between paired devices.
    #[arg(long, global = true)]
    pairing_limit: Option<u32>,
    /// Deployment radius in meters.
    #[arg(long, global = true)]
    radius_m: Option<f64>,
}

impl ParamArgs {
    fn load(&self) -> Result<SystemParams> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ParamsConfig::from_toml_str(&text)?
            }
            None => ParamsConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { cfg.$field = v; })*};
        }
        apply!(
            omega_hz,
            tau_s,
            bandwidth_hz,
            gamma_t_db,
            alpha,
            y_max,
            packet_bits,
            cycle_slots,
            delta_slots,
            rho,
            pairing_limit,
            radius_m
        );
        let params = cfg.into_params();
        params.validate()?;
        Ok(params)
    }
}

/// One random deployment.
#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 140)]
    devices: usize,
    #[arg(long, default_value_t = 7)]
    channels: usize,
    #[arg(long, default_value = "gba_sic")]
    algorithm: Algorithm,
}

impl ScenarioArgs {
    fn scenario(&self, params: &SystemParams) -> Result<Scenario> {
        if self.devices == 0 || self.channels == 0 {
            bail!("need at least one device and one channel");
        }
        Ok(generate_scenario(self.seed, self.devices, self.channels, params))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Allocate one deployment and print its metrics as JSON.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Sweep the device count, channel count or delay bound and write CSV.
    Sweep {
        /// Swept variable: N, C or delta.
        #[arg(long)]
        var: SweepVar,
        /// Comma separated values of the swept variable.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u32>,
        /// Comma separated algorithms.
        #[arg(long, value_delimiter = ',', default_value = "fsa,bca,gba,gba_sic")]
        algorithms: Vec<Algorithm>,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        /// Device count when not swept.
        #[arg(long, default_value_t = 140)]
        devices: usize,
        /// Channel count when not swept.
        #[arg(long, default_value_t = 7)]
        channels: usize,
        /// Fading shared by all channels of a device.
        #[arg(long, default_value = "independent")]
        fading: FadingMode,
        /// Write measured runtimes instead of zeros.
        #[arg(long)]
        record_runtime: bool,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the schedule over many cycles and compare with the formula.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Seed of the fading draws.
        #[arg(long, default_value_t = 7)]
        fading_seed: u64,
    },
    /// Aggregate sweep CSV files into per-figure tables.
    Figure {
        /// Sweep CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Device count of the distance profile table.
        #[arg(long, default_value_t = 140)]
        profile_devices: u32,
    },
    /// Print the schedule as CSV: channel, slot, owner, role, bits.
    ScheduleDump {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        // A closed pipe (for example `| head`) is not an error.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let params = cli.params.load()?;
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Run { scenario } => {
            let s = scenario.scenario(&params)?;
            let e = evaluate(scenario.algorithm, &s)?;
            let out = json!({
                "algorithm": scenario.algorithm.name(),
                "seed": scenario.seed,
                "devices": scenario.devices,
                "channels": scenario.channels,
                "delay_scope": DELAY_SCOPE,
                "metrics": e.metrics,
            });
            writeln!(stdout, "{}", to_json_string(&out)?)?;
        }
        Command::Sweep {
            var,
            values,
            algorithms,
            seeds,
            base_seed,
            devices,
            channels,
            fading,
            record_runtime,
            out,
        } => {
            let spec = SweepSpec {
                var,
                values,
                algorithms,
                seeds,
                base_seed,
                devices,
                channels,
                params,
                fading,
                record_runtime,
            };
            let rows = run_sweep(&spec, |v| eprintln!("{} = {v} done", var.name()))?;
            match out {
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_sweep_csv(&rows, io::BufWriter::new(file))?;
                }
                None => write_sweep_csv(&rows, &mut stdout)?,
            }
        }
        Command::Validate { scenario, trials, fading_seed } => {
            let s = scenario.scenario(&params)?;
            let e = evaluate(scenario.algorithm, &s)?;
            let sc = effective_scenario(scenario.algorithm, &s);
            let devices = validate_reliability(&e.schedule, &sc, trials, fading_seed);
            let failing = devices.iter().filter(|d| !d.ok).count();
            let out = json!({
                "algorithm": scenario.algorithm.name(),
                "seed": scenario.seed,
                "fading_seed": fading_seed,
                "trials": trials,
                "rho": params.reliability,
                "served": devices.len(),
                "below_three_sigma": failing,
                "devices": devices,
            });
            writeln!(stdout, "{}", to_json_string(&out)?)?;
            if failing > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Figure { inputs, out_dir, profile_devices } => {
            let mut rows = Vec::new();
            for path in &inputs {
                let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
                rows.extend(read_sweep_csv(file)?);
            }
            fs::create_dir_all(&out_dir)?;
            for (name, text) in figure_tables(&rows, profile_devices) {
                let path = out_dir.join(&name);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                writeln!(stdout, "{}", path.display())?;
            }
        }
        Command::ScheduleDump { scenario } => {
            let s = scenario.scenario(&params)?;
            let e = evaluate(scenario.algorithm, &s)?;
            writeln!(stdout, "channel,slot,owner,role,bits")?;
            for r in e.schedule.rows() {
                writeln!(stdout, "{},{},{},{},{}", r.channel, r.slot, r.owner, r.role.as_str(), fmt_sig(r.bits))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
