use std::collections::BTreeMap;
use std::path::Path;

use wsnsim::energy::ModelKind;
use wsnsim::harness::{
    emit_csv, emit_report, energy_table, read_energy, read_runs, run_scenario, run_scenario_file, sweep_energy,
    RunReport, SweepGrid, SweepOptions, ENERGY_CSV, RUNS_CSV,
};
use wsnsim::mac::ProfileId;
use wsnsim::scenario::{PingScenario, Scenario};

fn ping(profile: ProfileId, payload: u32, freq: f64) -> Scenario {
    Scenario::ping(
        profile,
        PingScenario {
            payload_bytes: payload,
            frequency_hz: freq,
            ..PingScenario::default()
        },
    )
}

/// Each node sends one request and answers one per interval, so per second it
/// spends RTS+DATA+CTS+ACK on air in each direction and idles otherwise.
fn ping_interval_oracle_j(payload: u32) -> f64 {
    let ns = |bytes: u32| (1e3 * (192.0 + 8.0 * bytes as f64 / 11.0)).round();
    let air = ns(20) + ns(payload + 55) + 2.0 * ns(14);
    (0.75 * air + 0.22 * air + 0.0002 * (1e9 - 2.0 * air)) * 1e-9
}

#[test]
fn ping_report_matches_energy_oracle() {
    let r = run_scenario(&ping(ProfileId::Dot11bNs2, 10, 1.0)).unwrap();
    assert_eq!(r.stats.requests_sent, 100);
    let oracle = ping_interval_oracle_j(10);
    for node in 0..2 {
        for k in 0..r.energy.intervals {
            let v = r.energy.node_interval_total(node, k);
            assert!(
                (v - oracle).abs() / oracle < 1e-9,
                "node {node} interval {k}: {v} vs {oracle}"
            );
        }
    }
}

#[test]
fn shipped_scenario_files_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let r = run_scenario_file(&path, None, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(r.record.events > 0, "{}", path.display());
        n += 1;
    }
    assert!(n >= 4);
}

#[test]
fn seed_and_model_overrides_apply() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/ping-dot11b-ns2.toml");
    let r = run_scenario_file(&path, Some(42), Some(ModelKind::Hierarchical)).unwrap();
    assert_eq!(r.record.seed, 42);
    assert_eq!(r.model, ModelKind::Hierarchical);
}

fn strip_host_fields(csv: &str) -> String {
    // wall_ms, peak_rss_bytes, cpu_avg_pct, cpu_max_pct are columns 7..=10
    csv.lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            [&f[..7], &f[11..]].concat().join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn emit(reports: &[RunReport]) -> (String, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    emit_csv(reports, dir.path()).unwrap();
    (
        std::fs::read_to_string(dir.path().join(RUNS_CSV)).unwrap(),
        std::fs::read(dir.path().join(ENERGY_CSV)).unwrap(),
    )
}

#[test]
fn repeated_runs_identical_except_host_metrics() {
    let s = ping(ProfileId::Dot154Default, 40, 2.0).with_seed(9);
    let a = emit(&[run_scenario(&s).unwrap()]);
    let b = emit(&[run_scenario(&s).unwrap()]);
    assert_eq!(strip_host_fields(&a.0), strip_host_fields(&b.0));
    assert_eq!(a.1, b.1);
}

#[test]
fn csv_headers_and_formatting_are_frozen() {
    let r = run_scenario(&ping(ProfileId::Dot11bNs2, 10, 1.0)).unwrap();
    let (runs, energy) = emit(std::slice::from_ref(&r));
    let energy = String::from_utf8(energy).unwrap();
    assert!(runs.starts_with(
        "run_id,scenario,protocol,payload_bytes,freq_hz,nodes,sim_duration_s,wall_ms,peak_rss_bytes,cpu_avg_pct,cpu_max_pct,events,seed\n"
    ));
    assert!(energy.starts_with("run_id,node_id,model,category,interval_index,energy_j\n"));
    assert!(!runs.contains('\r') && !energy.contains('\r'));
    let row: Vec<&str> = runs.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(
        row[..7],
        [
            "0",
            "ping-dot11b-ns2-10B-1Hz",
            "dot11b/ns2",
            "10",
            "1",
            "2",
            "100.000000000"
        ]
    );
    assert_eq!(row[11..], ["200", "1"]);
    // node 0's transmit energy in interval 0: RTS + DATA + CTS + ACK at 0.75 W
    assert!(
        energy.contains("\n0,0,sm,tx,0,6.37636500000e-4\n"),
        "{}",
        &energy[..400]
    );
}

#[test]
fn energy_csv_sums_to_report_totals() {
    let reports: Vec<_> = [
        ModelKind::StateMachine,
        ModelKind::Hierarchical,
        ModelKind::ComponentAccounting,
    ]
    .into_iter()
    .enumerate()
    .map(|(i, m)| {
        run_scenario(&ping(ProfileId::Dot11bOmnet, 70, 0.1).with_model(m))
            .unwrap()
            .with_run_id(i as u64)
    })
    .collect();
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&reports, dir.path()).unwrap();
    let rows = read_energy(&dir.path().join(ENERGY_CSV)).unwrap();
    let mut sums: BTreeMap<(u64, u32, String), f64> = BTreeMap::new();
    for r in &rows {
        *sums.entry((r.run_id, r.node_id, r.category.clone())).or_default() += r.energy_j;
    }
    let mut expected = 0;
    for r in &reports {
        for (node, cat, total) in r.energy_totals() {
            let csv = sums[&(r.record.run_id, node, cat.name().to_owned())];
            // rows carry 12 significant digits
            assert!((csv - total).abs() <= 1e-11 * total.abs(), "{cat}: {csv} vs {total}");
            expected += 1;
        }
    }
    assert_eq!(sums.len(), expected);
}

#[test]
fn zero_duration_writes_headers_only() {
    let s = Scenario::ping(
        ProfileId::Dot11bNs2,
        PingScenario {
            duration_s: 0.0,
            ..PingScenario::default()
        },
    );
    let r = run_scenario(&s).unwrap();
    let (runs, energy) = emit(&[r]);
    assert_eq!(runs.lines().count(), 2);
    assert_eq!(
        String::from_utf8(energy).unwrap(),
        "run_id,node_id,model,category,interval_index,energy_j\n"
    );
}

#[test]
fn emit_rejects_empty_and_unwritable() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_csv(&[], dir.path()).is_err());
    let r = run_scenario(&ping(ProfileId::Dot11bNs2, 10, 0.1)).unwrap();
    let file = dir.path().join("not-a-dir");
    std::fs::write(&file, "x").unwrap();
    assert!(emit_csv(std::slice::from_ref(&r), &file).is_err());
    assert!(emit_report(&[r], &file.join("report.md")).is_err());
}

#[test]
fn default_sweep() {
    let out = sweep_energy(
        &SweepGrid::default(),
        &SweepOptions {
            workers: 4,
            ..SweepOptions::default()
        },
    )
    .unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.reports.len(), 54);
    let (runs, energy) = emit(&out.reports);
    assert_eq!(runs.lines().count(), 55);
    // re-emission is byte-identical
    assert_eq!(emit(&out.reports), (runs, energy));

    let table = energy_table(&out.reports);
    for freq in [0.1, 1.0, 2.0] {
        let series = |proto: &str| -> Vec<f64> {
            table
                .iter()
                .filter(|r| r.protocol == proto && r.freq_hz == freq)
                .map(|r| r.per_interval_j[0])
                .collect()
        };
        let dot11b = series("dot11b/ns2");
        let dot154 = series("dot154/default");
        assert_eq!(dot11b.len(), 9);
        assert!(dot11b.windows(2).all(|w| w[1] > w[0]), "{dot11b:?}");
        assert!(dot11b.iter().zip(&dot154).all(|(a, b)| a != b));
    }
}

#[test]
fn report_round_trips_through_csv() {
    let reports: Vec<_> = [10, 50, 90]
        .iter()
        .flat_map(|&p| [ProfileId::Dot11bNs2, ProfileId::Dot11bOmnet].map(|id| ping(id, p, 1.0)))
        .enumerate()
        .map(|(i, s)| run_scenario(&s).unwrap().with_run_id(i as u64))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&reports, dir.path()).unwrap();
    let runs = read_runs(&dir.path().join(RUNS_CSV)).unwrap();
    assert_eq!(runs.len(), 6);
    assert_eq!(runs[3].protocol, "dot11b/omnet");
    let text = wsnsim::harness::report_dir(dir.path()).unwrap();
    let gap_rows = text
        .split("## 802.11b profile gap")
        .nth(1)
        .unwrap()
        .split("##")
        .next()
        .unwrap();
    assert_eq!(
        gap_rows
            .lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| payload"))
            .count(),
        3
    );
    assert!(text.contains("```gnuplot"));
}
