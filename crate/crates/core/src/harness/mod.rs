//! Benchmark harness: runs scenarios under host-metric sampling, sweeps
//! parameter grids on a bounded worker pool, and emits CSV and plot-ready
//! reports.

mod csv_io;
mod metrics;
mod report;

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::energy::{energy_report, Category, EnergyError, EnergyReport, ModelKind};
use crate::mac::ProfileId;
use crate::network::{run, RunError, RunOptions, RunStats};
use crate::scenario::{MeshScenario, PingScenario, Scenario, ScenarioError, PING_FREQUENCIES, PING_PAYLOADS};
use crate::sim::NodeId;

pub use csv_io::{
    append_csv, emit_csv, format_energy, next_run_id, read_energy, read_runs, CsvPaths, ENERGY_CSV, ENERGY_HEADER,
    RUNS_CSV, RUNS_HEADER,
};
pub use metrics::{sample_host_metrics, sample_self, HostMetrics, Sample, Sampler, SAMPLE_INTERVAL};
pub use report::{emit_report, render_report, report_dir, REPORT_FILE};

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "WSNSIM_OUT";
pub const DEFAULT_OUT_DIR: &str = "wsnsim-out";

/// Output directory: explicit choice, else `$WSNSIM_OUT`, else `./wsnsim-out`.
pub fn out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("no reports to emit")]
    NoReports,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// One runs.csv row. Unavailable host metrics are `None` (empty cells).
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub scenario: String,
    pub protocol: String,
    pub payload_bytes: u32,
    pub freq_hz: f64,
    pub nodes: usize,
    pub sim_duration_s: f64,
    pub wall_ms: f64,
    pub peak_rss_bytes: Option<u64>,
    pub cpu_avg_pct: Option<f64>,
    pub cpu_max_pct: Option<f64>,
    pub events: u64,
    pub seed: u64,
}

/// One energy.csv row.
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct EnergyRecord {
    pub run_id: u64,
    pub node_id: NodeId,
    pub model: String,
    pub category: String,
    pub interval_index: u64,
    pub energy_j: f64,
}

/// Everything measured for one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub record: RunRecord,
    pub model: ModelKind,
    pub stats: RunStats,
    pub host: HostMetrics,
    pub energy: EnergyReport,
}

impl RunReport {
    pub fn with_run_id(mut self, run_id: u64) -> Self {
        self.record.run_id = run_id;
        self
    }

    /// Energy per node and category, summed over every interval.
    pub fn energy_totals(&self) -> Vec<(NodeId, Category, f64)> {
        let mut totals: Vec<(NodeId, Category, f64)> = Vec::new();
        for row in &self.energy.rows {
            match totals.iter_mut().find(|(n, c, _)| *n == row.node && *c == row.category) {
                Some(t) => t.2 += row.energy_j,
                None => totals.push((row.node, row.category, row.energy_j)),
            }
        }
        totals
    }

    /// Total consumption of one node over the run.
    pub fn node_consumption(&self, node: NodeId) -> f64 {
        (0..self.energy.intervals)
            .map(|k| self.energy.node_interval_total(node, k))
            .sum()
    }

    /// Mean consumption of one node per reporting interval.
    pub fn per_interval_energy(&self, node: NodeId) -> f64 {
        if self.energy.intervals == 0 {
            return 0.0;
        }
        self.node_consumption(node) / self.energy.intervals as f64
    }

    /// The energy.csv rows of this run.
    pub fn energy_records(&self) -> impl Iterator<Item = EnergyRecord> + '_ {
        self.energy.rows.iter().map(|r| EnergyRecord {
            run_id: self.record.run_id,
            node_id: r.node,
            model: self.model.name().to_owned(),
            category: r.category.name().to_owned(),
            interval_index: r.interval_index,
            energy_j: r.energy_j,
        })
    }
}

fn execute(scenario: &Scenario, run_id: u64, options: RunOptions) -> Result<RunReport, HarnessError> {
    scenario.validate()?;
    let sampler = sample_self(SAMPLE_INTERVAL);
    let outcome = run(scenario, options);
    let host = sampler.stop();
    let outcome = outcome?;
    let energy = energy_report(&outcome.trace, outcome.interval())?;
    let record = RunRecord {
        run_id,
        scenario: scenario.name.clone(),
        protocol: scenario.profile.name().to_owned(),
        payload_bytes: scenario.payload_bytes(),
        freq_hz: scenario.frequency_hz(),
        nodes: outcome.topology.len(),
        sim_duration_s: outcome.end.as_secs_f64(),
        wall_ms: outcome.loop_wall.as_secs_f64() * 1e3,
        peak_rss_bytes: host.peak_rss_bytes,
        cpu_avg_pct: host.cpu_avg_pct,
        cpu_max_pct: host.cpu_max_pct,
        events: outcome.events,
        seed: scenario.seed,
    };
    Ok(RunReport {
        record,
        model: scenario.model,
        stats: outcome.stats,
        host,
        energy,
    })
}

/// Runs one scenario with run id 0.
pub fn run_scenario(scenario: &Scenario) -> Result<RunReport, HarnessError> {
    execute(scenario, 0, RunOptions::default())
}

/// Loads a scenario file, applies the optional seed/model overrides and runs it.
pub fn run_scenario_file(path: &Path, seed: Option<u64>, model: Option<ModelKind>) -> Result<RunReport, HarnessError> {
    let mut scenario = Scenario::load(path)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    if let Some(model) = model {
        scenario.model = model;
    }
    run_scenario(&scenario)
}

/// A run that did not produce a report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run_id: u64,
    pub scenario: String,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct BatchOutcome {
    pub reports: Vec<RunReport>,
    pub failures: Vec<RunFailure>,
}

impl BatchOutcome {
    fn push(&mut self, run_id: u64, scenario: &Scenario, result: Result<RunReport, HarnessError>) {
        match result {
            Ok(r) => self.reports.push(r),
            Err(e) => self.failures.push(RunFailure {
                run_id,
                scenario: scenario.name.clone(),
                error: e.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleOptions {
    pub seed: u64,
    pub profile: ProfileId,
    pub model: ModelKind,
    pub rounds: u32,
    pub frequency_hz: f64,
    pub payload_bytes: u32,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        let mesh = MeshScenario::default();
        Self {
            seed: 1,
            profile: ProfileId::Dot11bNs2,
            model: ModelKind::StateMachine,
            rounds: mesh.rounds,
            frequency_hz: mesh.frequency_hz,
            payload_bytes: mesh.payload_bytes,
        }
    }
}

/// Mesh scenarios for each bc value, in list order.
pub fn scale_scenarios(bc_list: &[u32], options: &ScaleOptions) -> Vec<Scenario> {
    bc_list
        .iter()
        .map(|&bc_count| {
            let mesh = MeshScenario {
                bc_count,
                frequency_hz: options.frequency_hz,
                rounds: options.rounds,
                payload_bytes: options.payload_bytes,
            };
            Scenario::mesh(options.profile, mesh)
                .with_seed(options.seed)
                .with_model(options.model)
        })
        .collect()
}

/// Runs the all-pairs mesh once per bc value, sequentially so that wall time
/// and host metrics are not shared between runs. Failed runs are recorded and
/// the sweep continues.
pub fn bench_scale(bc_list: &[u32], options: &ScaleOptions) -> Result<BatchOutcome, HarnessError> {
    if bc_list.is_empty() {
        return Err(HarnessError::InvalidGrid("bc list is empty".into()));
    }
    let mut out = BatchOutcome::default();
    for (i, scenario) in scale_scenarios(bc_list, options).iter().enumerate() {
        let id = i as u64;
        out.push(
            id,
            scenario,
            execute(
                scenario,
                id,
                RunOptions {
                    keep_trace_entries: false,
                },
            ),
        );
    }
    Ok(out)
}

/// Ping-pair sweep axes. Runs are the cartesian product in
/// protocol → payload → frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub protocols: Vec<ProfileId>,
    pub payloads: Vec<u32>,
    pub frequencies: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            protocols: vec![ProfileId::Dot11bNs2, ProfileId::Dot154Default],
            payloads: PING_PAYLOADS.to_vec(),
            frequencies: PING_FREQUENCIES.to_vec(),
        }
    }
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.protocols.len() * self.payloads.len() * self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.is_empty() {
            return Err(HarnessError::InvalidGrid("every axis needs at least one value".into()));
        }
        if let Some(f) = self.frequencies.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(HarnessError::InvalidGrid(format!("frequency {f} is not positive")));
        }
        Ok(())
    }

    pub fn scenarios(&self, seed: u64, model: ModelKind) -> Vec<Scenario> {
        let mut out = Vec::with_capacity(self.len());
        for &profile in &self.protocols {
            for &payload_bytes in &self.payloads {
                for &frequency_hz in &self.frequencies {
                    let ping = PingScenario {
                        payload_bytes,
                        frequency_hz,
                        ..PingScenario::default()
                    };
                    out.push(Scenario::ping(profile, ping).with_seed(seed).with_model(model));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub seed: u64,
    pub model: ModelKind,
    /// Worker threads; 0 = one per available core.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            model: ModelKind::StateMachine,
            workers: 0,
        }
    }
}

/// One line of the energy table: mean per-interval energy of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub run_id: u64,
    pub protocol: String,
    pub payload_bytes: u32,
    pub freq_hz: f64,
    pub per_interval_j: Vec<f64>,
}

/// Energy table rows for a set of reports, in report order.
pub fn energy_table(reports: &[RunReport]) -> Vec<SweepRow> {
    reports
        .iter()
        .map(|r| SweepRow {
            run_id: r.record.run_id,
            protocol: r.record.protocol.clone(),
            payload_bytes: r.record.payload_bytes,
            freq_hz: r.record.freq_hz,
            per_interval_j: (0..r.record.nodes as NodeId)
                .map(|n| r.per_interval_energy(n))
                .collect(),
        })
        .collect()
}

/// Runs every scenario of the grid on a bounded pool; reports come back in
/// grid order whatever the worker count.
pub fn sweep_energy(grid: &SweepGrid, options: &SweepOptions) -> Result<BatchOutcome, HarnessError> {
    grid.validate()?;
    run_batch(&grid.scenarios(options.seed, options.model), options.workers)
}

/// Runs scenarios on `workers` threads (0 = all cores); run ids are the
/// positions in `scenarios`.
pub fn run_batch(scenarios: &[Scenario], workers: usize) -> Result<BatchOutcome, HarnessError> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, s)| execute(s, i as u64, RunOptions::default()))
            .collect()
    });
    let mut out = BatchOutcome::default();
    for (i, (scenario, result)) in scenarios.iter().zip(results).enumerate() {
        out.push(i as u64, scenario, result);
    }
    Ok(out)
}

/// Ordinary least squares y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits a line through the points; `None` with fewer than two distinct x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys).take(n) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Wall time spent in the event loop.
pub fn wall_time(report: &RunReport) -> Duration {
    Duration::from_secs_f64(report.record.wall_ms / 1e3)
}
