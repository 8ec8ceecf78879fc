use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use std::hint::black_box;
use wsnsim::energy::{EnergyTrace, RadioPowerTable, RadioState, StateMachineModel};
use wsnsim::mac::{build_exchange, compute_airtime, ProfileId};
use wsnsim::network::{run, RunOptions};
use wsnsim::scenario::{MeshScenario, PingScenario, Scenario};
use wsnsim::sim::{Engine, EventKind, RngStream, SimTime};

fn scheduler(c: &mut Criterion) {
    const N: u64 = 10_000;
    let mut g = c.benchmark_group("scheduler");
    g.throughput(Throughput::Elements(N));
    g.bench_function("schedule_and_drain", |b| {
        b.iter_batched(
            Engine::<u64>::new,
            |mut engine| {
                let mut rng = RngStream::new(7);
                for i in 0..N {
                    let t = SimTime::from_nanos(rng.uniform_inclusive(1_000_000));
                    engine.schedule(t, EventKind::Timer, 0, i).unwrap();
                }
                engine.run_until(SimTime::MAX, &mut |_ev, _s: &mut _| {})
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn mac(c: &mut Criterion) {
    let profile = ProfileId::Dot11bNs2.profile();
    c.bench_function("compute_airtime", |b| {
        b.iter(|| compute_airtime(&profile, black_box(65)).unwrap())
    });
    let mut rng = RngStream::new(1);
    for id in [ProfileId::Dot11bNs2, ProfileId::Dot154Default] {
        let p = id.profile();
        c.bench_function(&format!("build_exchange/{id}"), |b| {
            b.iter(|| build_exchange(&p, black_box(50), &mut rng, 0).unwrap())
        });
    }
}

fn energy(c: &mut Criterion) {
    c.bench_function("state_machine_transition", |b| {
        let mut m = StateMachineModel::new(1e9, RadioPowerTable::DOT11B);
        let mut t = SimTime::ZERO;
        let states = [RadioState::Tx, RadioState::Idle, RadioState::Rx, RadioState::Idle];
        let mut i = 0;
        b.iter(|| {
            t += SimTime::from_micros(100);
            i = (i + 1) % states.len();
            m.transition(states[i], t).unwrap()
        })
    });
    c.bench_function("trace_record_split", |b| {
        let mut trace = EnergyTrace::new(1, SimTime::from_millis(1), false);
        let mut t = SimTime::ZERO;
        b.iter(|| {
            let end = t + SimTime::from_micros(1500);
            trace.record(0, t, end, wsnsim::energy::Category::Aux, 1e-6);
            t = end;
        })
    });
}

fn scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("scenario");
    g.sample_size(10);
    let ping = Scenario::ping(ProfileId::Dot11bNs2, PingScenario::default());
    g.throughput(Throughput::Elements(200));
    g.bench_function("ping_pair_100s", |b| {
        b.iter(|| run(&ping, RunOptions::default()).unwrap().events)
    });
    let mesh = Scenario::mesh(
        ProfileId::Dot11bNs2,
        MeshScenario {
            bc_count: 4,
            rounds: 10,
            ..MeshScenario::default()
        },
    );
    g.throughput(Throughput::Elements(2 * 10 * 16 * 15));
    g.bench_function("mesh_bc4_10_rounds", |b| {
        b.iter(|| {
            run(
                &mesh,
                RunOptions {
                    keep_trace_entries: false,
                },
            )
            .unwrap()
            .events
        })
    });
    g.finish();
}

criterion_group!(benches, scheduler, mac, energy, scenarios);
criterion_main!(benches);
