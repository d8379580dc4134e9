//! Running allocators on scenarios, parameter sweeps and figure tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::alloc::demand::{DemandModel, DemandTable};
use crate::alloc::{bca, fsa, gba, gba_sic};
use crate::error::{ScheduleViolation, SimError};
use crate::format::fmt_sig;
use crate::metrics::{compute_metrics, MetricsReport, DISTANCE_BINS};
use crate::params::SystemParams;
use crate::scenario::{generate_scenario, FadingMode, Scenario};
use crate::schedule::{check_schedule, CheckOptions, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Algorithm {
    Fsa,
    Bca,
    Gba,
    GbaSic,
    /// BCA with demands from the numerically integrated error model.
    BcaNi,
    /// GBA with demands from the numerically integrated error model.
    GbaNi,
    /// FSA with fading shared by all channels.
    FsaCorrelated,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Fsa,
        Algorithm::Bca,
        Algorithm::Gba,
        Algorithm::GbaSic,
        Algorithm::BcaNi,
        Algorithm::GbaNi,
        Algorithm::FsaCorrelated,
    ];

    /// The four main allocators.
    pub const MAIN: [Algorithm; 4] = [Algorithm::Fsa, Algorithm::Bca, Algorithm::Gba, Algorithm::GbaSic];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Fsa => "fsa",
            Algorithm::Bca => "bca",
            Algorithm::Gba => "gba",
            Algorithm::GbaSic => "gba_sic",
            Algorithm::BcaNi => "bca_ni",
            Algorithm::GbaNi => "gba_ni",
            Algorithm::FsaCorrelated => "fsa_correlated",
        }
    }

    /// Whether every device must stay on a single channel.
    pub fn single_channel(&self) -> bool {
        !matches!(self, Algorithm::Fsa | Algorithm::FsaCorrelated)
    }

    pub fn demand_model(&self) -> Option<DemandModel> {
        match self {
            Algorithm::Fsa | Algorithm::FsaCorrelated => None,
            Algorithm::BcaNi | Algorithm::GbaNi => Some(DemandModel::Exact),
            _ => Some(DemandModel::Threshold),
        }
    }
}

impl FromStr for Algorithm {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| SimError::UnknownAlgorithm(s.to_string()))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs several allocators on one scenario, computing each demand table once.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    tables: BTreeMap<u8, DemandTable>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub schedule: Schedule,
    pub metrics: MetricsReport,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self { scenario, tables: BTreeMap::new() }
    }

    fn table(&mut self, model: DemandModel) -> Result<&DemandTable, SimError> {
        let key = model as u8;
        if !self.tables.contains_key(&key) {
            self.tables.insert(key, DemandTable::build(self.scenario, model)?);
        }
        Ok(&self.tables[&key])
    }

    pub fn allocate(&mut self, algorithm: Algorithm) -> Result<Schedule, SimError> {
        let s = self.scenario;
        Ok(match algorithm {
            Algorithm::Fsa => fsa(s),
            Algorithm::FsaCorrelated => fsa(&s.clone().with_fading(FadingMode::Correlated)),
            Algorithm::Bca | Algorithm::BcaNi => bca(s, self.table(algorithm.demand_model().unwrap())?),
            Algorithm::Gba | Algorithm::GbaNi => gba(s, self.table(algorithm.demand_model().unwrap())?),
            Algorithm::GbaSic => gba_sic(s, self.table(DemandModel::Threshold)?),
        })
    }

    /// Allocation and metrics; the runtime includes building the demand table
    /// the first time it is needed.
    pub fn evaluate(&mut self, algorithm: Algorithm) -> Result<Evaluation, SimError> {
        let start = Instant::now();
        let schedule = self.allocate(algorithm)?;
        let runtime = start.elapsed().as_secs_f64();
        let metrics = compute_metrics(&schedule, self.scenario, runtime);
        Ok(Evaluation { schedule, metrics })
    }
}

pub fn evaluate(algorithm: Algorithm, scenario: &Scenario) -> Result<Evaluation, SimError> {
    Evaluator::new(scenario).evaluate(algorithm)
}

/// Scenario the allocator actually saw (correlated fading for `fsa_correlated`).
pub fn effective_scenario(algorithm: Algorithm, scenario: &Scenario) -> Scenario {
    match algorithm {
        Algorithm::FsaCorrelated => scenario.clone().with_fading(FadingMode::Correlated),
        _ => scenario.clone(),
    }
}

/// Structural and analytic reliability checks for an allocator's output.
pub fn check_algorithm(
    algorithm: Algorithm,
    scenario: &Scenario,
    schedule: &Schedule,
) -> Result<(), ScheduleViolation> {
    let sc = effective_scenario(algorithm, scenario);
    // Demands of the -ni variants come from the exact error model, which the
    // threshold formulas do not describe.
    let reliability = match algorithm.demand_model() {
        Some(DemandModel::Exact) => None,
        _ => Some(scenario.params.reliability),
    };
    let opts = CheckOptions { single_channel: algorithm.single_channel(), reliability };
    check_schedule(schedule, &sc, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepVar {
    Devices,
    Channels,
    Delay,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::Devices => "N",
            SweepVar::Channels => "C",
            SweepVar::Delay => "delta",
        }
    }
}

impl FromStr for SweepVar {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" | "n" | "devices" => Ok(SweepVar::Devices),
            "C" | "c" | "channels" => Ok(SweepVar::Channels),
            "delta" | "Delta" | "delay" => Ok(SweepVar::Delay),
            other => Err(SimError::Scenario(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub values: Vec<u32>,
    pub algorithms: Vec<Algorithm>,
    /// Seeds `base_seed .. base_seed + seeds`.
    pub seeds: u64,
    pub base_seed: u64,
    /// Device count when not swept.
    pub devices: usize,
    /// Channel count when not swept.
    pub channels: usize,
    pub params: SystemParams,
    pub fading: FadingMode,
    /// Write measured runtimes; otherwise the column is 0 and the output is
    /// byte-for-byte reproducible.
    pub record_runtime: bool,
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_var: String,
    pub value: u32,
    pub algorithm: String,
    pub seed: u64,
    pub fraction_served: f64,
    pub mean_delay: f64,
    pub max_delay: u32,
    pub mean_aoi: f64,
    pub jain_bin: f64,
    pub jain_dev: f64,
    pub runtime_s: f64,
    pub bins: Vec<Option<f64>>,
}

impl SweepSpec {
    /// Scenario and parameters of one sweep point.
    pub fn scenario(&self, value: u32, seed: u64) -> Result<Scenario, SimError> {
        let mut params = self.params.clone();
        let (mut n, mut c) = (self.devices, self.channels);
        match self.var {
            SweepVar::Devices => n = value as usize,
            SweepVar::Channels => c = value as usize,
            SweepVar::Delay => {
                params.delay_slots = value;
                params.pairing_limit = params.pairing_limit.min(value);
            }
        }
        params.validate()?;
        if n == 0 || c == 0 {
            return Err(SimError::Scenario("sweep point with no device or no channel".into()));
        }
        Ok(generate_scenario(seed, n, c, &params).with_fading(self.fading))
    }
}

/// Runs the sweep; `progress` is told about each finished sweep point.
pub fn run_sweep(spec: &SweepSpec, mut progress: impl FnMut(u32)) -> Result<Vec<SweepRecord>, SimError> {
    let mut rows = Vec::new();
    for &value in &spec.values {
        for k in 0..spec.seeds {
            let seed = spec.base_seed + k;
            let scenario = spec.scenario(value, seed)?;
            let mut ev = Evaluator::new(&scenario);
            for &alg in &spec.algorithms {
                let m = ev.evaluate(alg)?.metrics;
                rows.push(SweepRecord {
                    sweep_var: spec.var.name().to_string(),
                    value,
                    algorithm: alg.name().to_string(),
                    seed,
                    fraction_served: m.fraction_served,
                    mean_delay: m.mean_delay,
                    max_delay: m.max_delay,
                    mean_aoi: m.mean_aoi,
                    jain_bin: m.jain_bin,
                    jain_dev: m.jain_dev,
                    runtime_s: if spec.record_runtime { m.runtime_s } else { 0.0 },
                    bins: m.distance_profile,
                });
            }
        }
        progress(value);
    }
    // Order by (sweep point, seed, algorithm) as listed.
    Ok(rows)
}

const BASE_COLUMNS: [&str; 11] = [
    "sweep_var",
    "value",
    "algorithm",
    "seed",
    "fraction_served",
    "mean_delay",
    "max_delay",
    "mean_aoi",
    "jain_bin",
    "jain_dev",
    "runtime_s",
];

pub fn sweep_header() -> Vec<String> {
    BASE_COLUMNS.iter().map(|s| s.to_string()).chain((1..=DISTANCE_BINS).map(|b| format!("bin_{b}"))).collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRecord], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(sweep_header()).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.sweep_var.clone(),
            r.value.to_string(),
            r.algorithm.clone(),
            r.seed.to_string(),
            fmt_sig(r.fraction_served),
            fmt_sig(r.mean_delay),
            r.max_delay.to_string(),
            fmt_sig(r.mean_aoi),
            fmt_sig(r.jain_bin),
            fmt_sig(r.jain_dev),
            fmt_sig(r.runtime_s),
        ];
        rec.extend(r.bins.iter().map(|b| b.map(fmt_sig).unwrap_or_default()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Table(e.to_string())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>, SimError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| SimError::Table(format!("missing column `{name}`")))
    };
    let idx: Vec<usize> = BASE_COLUMNS.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    let bin_idx: Vec<Option<usize>> = (1..=DISTANCE_BINS).map(|b| col(&format!("bin_{b}")).ok()).collect();
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let bad =
            |k: usize| SimError::Table(format!("row {}: bad `{}` value `{}`", line + 1, BASE_COLUMNS[k], field(k)));
        let num = |k: usize| field(k).parse::<f64>().map_err(|_| bad(k));
        rows.push(SweepRecord {
            sweep_var: field(0).to_string(),
            value: field(1).parse().map_err(|_| bad(1))?,
            algorithm: field(2).to_string(),
            seed: field(3).parse().map_err(|_| bad(3))?,
            fraction_served: num(4)?,
            mean_delay: num(5)?,
            max_delay: field(6).parse().map_err(|_| bad(6))?,
            mean_aoi: num(7)?,
            jain_bin: num(8)?,
            jain_dev: num(9)?,
            runtime_s: num(10)?,
            bins: bin_idx.iter().map(|i| i.and_then(|i| rec.get(i)).and_then(|v| v.parse().ok())).collect(),
        });
    }
    Ok(rows)
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups rows of one sweep variable by `(value, algorithm)`, keeping the
/// algorithms in order of first appearance.
fn groups<'r>(rows: &'r [SweepRecord], var: &str) -> Vec<((u32, String), Vec<&'r SweepRecord>)> {
    let mut algs: Vec<&str> = Vec::new();
    let mut map: BTreeMap<(u32, usize), Vec<&SweepRecord>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.sweep_var == var) {
        let a = match algs.iter().position(|a| *a == r.algorithm) {
            Some(a) => a,
            None => {
                algs.push(&r.algorithm);
                algs.len() - 1
            }
        };
        map.entry((r.value, a)).or_default().push(r);
    }
    map.into_iter().map(|((v, a), rs)| ((v, algs[a].to_string()), rs)).collect()
}

fn table(header: &[&str], lines: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).unwrap();
    for l in lines {
        w.write_record(&l).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn fraction_table(rows: &[SweepRecord], var: &str) -> String {
    let lines = groups(rows, var)
        .into_iter()
        .map(|((v, alg), rs)| {
            let xs: Vec<f64> = rs.iter().map(|r| r.fraction_served).collect();
            let (m, sd) = mean_sd(&xs);
            vec![v.to_string(), alg, fmt_sig(m), fmt_sig(sd), xs.len().to_string()]
        })
        .collect();
    table(&[var, "algorithm", "fraction_mean", "fraction_sd", "runs"], lines)
}

/// Per-figure tables `(file name, CSV text)` aggregated over seeds:
/// served fraction against N, delay against N, served fraction against C and
/// against the delay bound, and served fraction per distance bin at
/// `profile_devices` devices.
pub fn figure_tables(rows: &[SweepRecord], profile_devices: u32) -> Vec<(String, String)> {
    let delay_lines = groups(rows, "N")
        .into_iter()
        .map(|((v, alg), rs)| {
            let mean: Vec<f64> = rs.iter().map(|r| r.mean_delay).collect();
            let max: Vec<f64> = rs.iter().map(|r| r.max_delay as f64).collect();
            let (m, sd) = mean_sd(&mean);
            let (mm, _) = mean_sd(&max);
            let top = rs.iter().map(|r| r.max_delay).max().unwrap_or(0);
            vec![v.to_string(), alg, fmt_sig(m), fmt_sig(sd), fmt_sig(mm), top.to_string(), rs.len().to_string()]
        })
        .collect();

    let mut profile_lines = Vec::new();
    for ((v, alg), rs) in groups(rows, "N") {
        if v != profile_devices {
            continue;
        }
        for b in 0..DISTANCE_BINS {
            let xs: Vec<f64> = rs.iter().filter_map(|r| r.bins.get(b).copied().flatten()).collect();
            let (m, sd) = mean_sd(&xs);
            profile_lines.push(vec![(b + 1).to_string(), alg.clone(), fmt_sig(m), fmt_sig(sd), xs.len().to_string()]);
        }
    }

    vec![
        ("fig4.csv".into(), fraction_table(rows, "N")),
        (
            "fig5.csv".into(),
            table(
                &["N", "algorithm", "mean_delay_mean", "mean_delay_sd", "max_delay_mean", "max_delay_max", "runs"],
                delay_lines,
            ),
        ),
        ("fig6.csv".into(), fraction_table(rows, "C")),
        ("fig7.csv".into(), fraction_table(rows, "delta")),
        ("fig8.csv".into(), table(&["bin", "algorithm", "fraction_mean", "fraction_sd", "runs"], profile_lines)),
    ]
}
