//! Frozen CSV schemas: `runs.csv` (one row per run) and `energy.csv`
//! (one row per run × node × category × interval).

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use super::{EnergyRecord, HarnessError, RunRecord, RunReport};

pub const RUNS_CSV: &str = "runs.csv";
pub const ENERGY_CSV: &str = "energy.csv";

pub const RUNS_HEADER: [&str; 13] = [
    "run_id",
    "scenario",
    "protocol",
    "payload_bytes",
    "freq_hz",
    "nodes",
    "sim_duration_s",
    "wall_ms",
    "peak_rss_bytes",
    "cpu_avg_pct",
    "cpu_max_pct",
    "events",
    "seed",
];

pub const ENERGY_HEADER: [&str; 6] = ["run_id", "node_id", "model", "category", "interval_index", "energy_j"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvPaths {
    pub runs: PathBuf,
    pub energy: PathBuf,
}

/// Joules with 12 significant digits, e.g. `4.23300000000e-4`.
pub fn format_energy(j: f64) -> String {
    format!("{j:.11e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run_fields(r: &RunRecord) -> [String; 13] {
    [
        r.run_id.to_string(),
        r.scenario.clone(),
        r.protocol.clone(),
        r.payload_bytes.to_string(),
        r.freq_hz.to_string(),
        r.nodes.to_string(),
        format!("{:.9}", r.sim_duration_s),
        format!("{:.3}", r.wall_ms),
        opt(r.peak_rss_bytes),
        opt(r.cpu_avg_pct.map(|c| format!("{c:.1}"))),
        opt(r.cpu_max_pct.map(|c| format!("{c:.1}"))),
        r.events.to_string(),
        r.seed.to_string(),
    ]
}

fn energy_fields(e: &EnergyRecord) -> [String; 6] {
    [
        e.run_id.to_string(),
        e.node_id.to_string(),
        e.model.clone(),
        e.category.clone(),
        e.interval_index.to_string(),
        format_energy(e.energy_j),
    ]
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path, append: bool) -> Result<(csv::Writer<fs::File>, bool), HarnessError> {
    let fresh = !append || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .map_err(io_err(path))?;
    let w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    Ok((w, fresh))
}

fn write_all(reports: &[RunReport], dir: &Path, append: bool) -> Result<CsvPaths, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let paths = CsvPaths {
        runs: dir.join(RUNS_CSV),
        energy: dir.join(ENERGY_CSV),
    };

    {
        let (mut w, fresh) = writer(&paths.runs, append)?;
        let err = csv_err(&paths.runs);
        if fresh {
            w.write_record(RUNS_HEADER).map_err(&err)?;
        }
        for r in reports {
            w.write_record(run_fields(&r.record)).map_err(&err)?;
        }
        w.flush().map_err(io_err(&paths.runs))?;
    }

    {
        let (mut w, fresh) = writer(&paths.energy, append)?;
        let err = csv_err(&paths.energy);
        if fresh {
            w.write_record(ENERGY_HEADER).map_err(&err)?;
        }
        for r in reports {
            for e in r.energy_records() {
                w.write_record(energy_fields(&e)).map_err(&err)?;
            }
        }
        w.flush().map_err(io_err(&paths.energy))?;
    }
    Ok(paths)
}

/// Writes `runs.csv` and `energy.csv` into `dir`, replacing existing files.
pub fn emit_csv(reports: &[RunReport], dir: &Path) -> Result<CsvPaths, HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::NoReports);
    }
    write_all(reports, dir, false)
}

/// Appends rows to the CSVs in `dir`, writing headers only for new files.
pub fn append_csv(reports: &[RunReport], dir: &Path) -> Result<CsvPaths, HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::NoReports);
    }
    write_all(reports, dir, true)
}

fn read<T: serde::de::DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found = r.headers().map_err(csv_err(path))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(HarnessError::Csv {
            path: path.to_path_buf(),
            source: csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("unexpected header `{}`", found.iter().collect::<Vec<_>>().join(",")),
            )),
        });
    }
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(csv_err(path))
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    read(path, &RUNS_HEADER)
}

pub fn read_energy(path: &Path) -> Result<Vec<EnergyRecord>, HarnessError> {
    read(path, &ENERGY_HEADER)
}

/// First run id not yet present in `dir/runs.csv` (0 if there is none).
pub fn next_run_id(dir: &Path) -> Result<u64, HarnessError> {
    let path = dir.join(RUNS_CSV);
    if !path.exists() {
        return Ok(0);
    }
    Ok(read_runs(&path)?.iter().map(|r| r.run_id + 1).max().unwrap_or(0))
}
