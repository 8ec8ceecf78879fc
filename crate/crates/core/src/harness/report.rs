//! Human-readable report with gnuplot-ready data blocks, built from the CSV
//! records so that `report <dir>` and in-process emission agree.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::csv_io::{read_energy, read_runs, ENERGY_CSV, RUNS_CSV};
use super::{linear_fit, EnergyRecord, HarnessError, RunRecord, RunReport};

pub const REPORT_FILE: &str = "report.md";

const NS2: &str = "dot11b/ns2";
const OMNET: &str = "dot11b/omnet";

struct RunEnergy {
    model: String,
    /// Mean consumption per interval, per node.
    per_node: Vec<f64>,
}

fn summarise(energy: &[EnergyRecord]) -> BTreeMap<u64, RunEnergy> {
    let mut intervals: BTreeMap<u64, u64> = BTreeMap::new();
    let mut sums: BTreeMap<(u64, u32), f64> = BTreeMap::new();
    let mut models: BTreeMap<u64, String> = BTreeMap::new();
    for e in energy {
        let n = intervals.entry(e.run_id).or_default();
        *n = (*n).max(e.interval_index + 1);
        models.entry(e.run_id).or_insert_with(|| e.model.clone());
        let s = sums.entry((e.run_id, e.node_id)).or_default();
        if e.category != "harvest" {
            *s += e.energy_j;
        }
    }
    let mut out: BTreeMap<u64, RunEnergy> = BTreeMap::new();
    for ((run, node), total) in sums {
        let entry = out.entry(run).or_insert_with(|| RunEnergy {
            model: models[&run].clone(),
            per_node: Vec::new(),
        });
        let node = node as usize;
        if entry.per_node.len() <= node {
            entry.per_node.resize(node + 1, 0.0);
        }
        entry.per_node[node] = total / intervals[&run] as f64;
    }
    out
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into())
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out.push('\n');
}

/// Renders the report for a set of runs and their energy rows.
pub fn render_report(runs: &[RunRecord], energy: &[EnergyRecord]) -> String {
    let per_run = summarise(energy);
    let mut out = String::from("# wsnsim report\n\n");

    out.push_str("## Runs\n\n");
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| {
            vec![
                r.run_id.to_string(),
                r.scenario.clone(),
                r.protocol.clone(),
                per_run.get(&r.run_id).map_or("-".into(), |e| e.model.clone()),
                r.payload_bytes.to_string(),
                r.freq_hz.to_string(),
                r.nodes.to_string(),
                r.events.to_string(),
                format!("{:.3}", r.sim_duration_s),
                format!("{:.3}", r.wall_ms),
                cell(r.cpu_avg_pct.map(|c| format!("{c:.1}"))),
                cell(r.cpu_max_pct.map(|c| format!("{c:.1}"))),
                cell(r.peak_rss_bytes),
            ]
        })
        .collect();
    table(
        &mut out,
        &[
            "run",
            "scenario",
            "protocol",
            "model",
            "payload B",
            "freq Hz",
            "nodes",
            "events",
            "sim s",
            "wall ms",
            "cpu avg %",
            "cpu max %",
            "peak RSS B",
        ],
        &rows,
    );

    out.push_str("## Energy per reporting interval\n\nMean consumption of each node per interval, in joules.\n\n");
    let rows: Vec<Vec<String>> = runs
        .iter()
        .filter_map(|r| {
            let e = per_run.get(&r.run_id)?;
            let min = e.per_node.iter().copied().fold(f64::INFINITY, f64::min);
            let max = e.per_node.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = e.per_node.iter().sum::<f64>() / e.per_node.len() as f64;
            Some(vec![
                r.run_id.to_string(),
                r.protocol.clone(),
                e.model.clone(),
                r.payload_bytes.to_string(),
                r.freq_hz.to_string(),
                format!("{mean:.6e}"),
                format!("{min:.6e}"),
                format!("{max:.6e}"),
            ])
        })
        .collect();
    table(
        &mut out,
        &[
            "run",
            "protocol",
            "model",
            "payload B",
            "freq Hz",
            "mean J",
            "min J",
            "max J",
        ],
        &rows,
    );

    let gap = profile_gap(runs, &per_run);
    if !gap.is_empty() {
        out.push_str(
            "## 802.11b profile gap\n\nPer-interval energy of node 0, omnet overhead preset relative to ns2.\n\n",
        );
        let rows: Vec<Vec<String>> = gap
            .iter()
            .map(|g| {
                vec![
                    g.payload.to_string(),
                    g.freq.to_string(),
                    g.model.clone(),
                    format!("{:.6e}", g.ns2),
                    format!("{:.6e}", g.omnet),
                    format!("{:.3}", 100.0 * (g.omnet - g.ns2) / g.ns2),
                ]
            })
            .collect();
        table(
            &mut out,
            &["payload B", "freq Hz", "model", "ns2 J", "omnet J", "gap %"],
            &rows,
        );
    }

    let xs: Vec<f64> = runs.iter().map(|r| r.events as f64).collect();
    let ys: Vec<f64> = runs.iter().map(|r| r.wall_ms).collect();
    if let Some(fit) = linear_fit(&xs, &ys) {
        let _ = writeln!(
            out,
            "## Scaling\n\nwall_ms = {:.6e} · events + {:.6e}   (R² = {:.5}, {} runs)\n",
            fit.slope,
            fit.intercept,
            fit.r_squared,
            runs.len()
        );
    }

    out.push_str(
        "## Plot data\n\n```gnuplot\n$runs << EOD\n# run nodes events wall_ms cpu_avg_pct cpu_max_pct peak_rss_bytes\n",
    );
    for r in runs {
        let _ = writeln!(
            out,
            "{} {} {} {:.3} {} {} {}",
            r.run_id,
            r.nodes,
            r.events,
            r.wall_ms,
            cell(r.cpu_avg_pct.map(|c| format!("{c:.1}"))),
            cell(r.cpu_max_pct.map(|c| format!("{c:.1}"))),
            cell(r.peak_rss_bytes)
        );
    }
    out.push_str("EOD\n\n$energy << EOD\n");
    // one gnuplot index per (protocol, frequency)
    let mut series: BTreeMap<(String, String), Vec<(u32, f64)>> = BTreeMap::new();
    for r in runs {
        if let Some(e) = per_run.get(&r.run_id) {
            let mean = e.per_node.iter().sum::<f64>() / e.per_node.len() as f64;
            series
                .entry((r.protocol.clone(), r.freq_hz.to_string()))
                .or_default()
                .push((r.payload_bytes, mean));
        }
    }
    for (i, ((protocol, freq), points)) in series.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# index {i}: {protocol} @ {freq} Hz\n# payload_bytes energy_j");
        for (p, j) in points {
            let _ = writeln!(out, "{p} {j:.11e}");
        }
    }
    out.push_str("EOD\n\n# plot $runs using 3:4 with linespoints title 'wall ms vs events'\n");
    out.push_str("# plot for [i=0:*] $energy index i using 1:2 with linespoints title columnheader(1)\n```\n");
    out
}

struct Gap {
    payload: u32,
    freq: f64,
    model: String,
    ns2: f64,
    omnet: f64,
}

fn profile_gap(runs: &[RunRecord], per_run: &BTreeMap<u64, RunEnergy>) -> Vec<Gap> {
    let node0 = |r: &RunRecord| {
        per_run
            .get(&r.run_id)
            .and_then(|e| Some((e.model.clone(), *e.per_node.first()?)))
    };
    let mut out = Vec::new();
    for a in runs.iter().filter(|r| r.protocol == NS2) {
        let Some((model, ns2)) = node0(a) else { continue };
        let twin = runs.iter().find(|b| {
            b.protocol == OMNET
                && b.payload_bytes == a.payload_bytes
                && b.freq_hz == a.freq_hz
                && b.nodes == a.nodes
                && node0(b).is_some_and(|(m, _)| m == model)
        });
        if let Some((_, omnet)) = twin.and_then(node0) {
            out.push(Gap {
                payload: a.payload_bytes,
                freq: a.freq_hz,
                model,
                ns2,
                omnet,
            });
        }
    }
    out
}

/// Writes the report for in-memory run reports to `path`.
pub fn emit_report(reports: &[RunReport], path: &Path) -> Result<(), HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::NoReports);
    }
    let runs: Vec<RunRecord> = reports.iter().map(|r| r.record.clone()).collect();
    let energy: Vec<EnergyRecord> = reports.iter().flat_map(RunReport::energy_records).collect();
    fs::write(path, render_report(&runs, &energy)).map_err(|source| HarnessError::Io {
        path: path.into(),
        source,
    })
}

/// Reads `runs.csv` and `energy.csv` from `dir`, writes `dir/report.md` and
/// returns its text.
pub fn report_dir(dir: &Path) -> Result<String, HarnessError> {
    let runs = read_runs(&dir.join(RUNS_CSV))?;
    if runs.is_empty() {
        return Err(HarnessError::NoReports);
    }
    let energy = read_energy(&dir.join(ENERGY_CSV))?;
    let text = render_report(&runs, &energy);
    let path = dir.join(REPORT_FILE);
    fs::write(&path, &text).map_err(|source| HarnessError::Io { path, source })?;
    Ok(text)
}
