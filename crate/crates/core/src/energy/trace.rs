use std::fmt;

use crate::sim::{NodeId, SimTime};

use super::{Activity, EnergyError, RadioState};

/// What an energy delta was spent on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Radio(RadioState),
    /// Constant auxiliary consumer (MCU/sensor stand-in).
    Aux,
    /// Energy harvested into storage (not a consumption).
    Harvest,
    Activity(Activity),
}

pub(crate) const NUM_CATEGORIES: usize = 6 + 15;

impl Category {
    pub fn all() -> impl Iterator<Item = Category> {
        RadioState::ALL
            .into_iter()
            .map(Category::Radio)
            .chain([Category::Aux, Category::Harvest])
            .chain(Activity::ALL.into_iter().map(Category::Activity))
    }

    pub fn index(self) -> usize {
        match self {
            Category::Radio(s) => s.index(),
            Category::Aux => 4,
            Category::Harvest => 5,
            Category::Activity(a) => 6 + a.index(),
        }
    }

    fn from_index(i: usize) -> Category {
        Category::all().nth(i).expect("category index in range")
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Radio(s) => s.name(),
            Category::Aux => "aux",
            Category::Harvest => "harvest",
            Category::Activity(a) => a.key(),
        }
    }

    pub fn is_consumption(self) -> bool {
        self != Category::Harvest
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One charged delta. Dwell charges span `[start, end)`; point charges have `start == end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub start: SimTime,
    pub end: SimTime,
    pub category: Category,
    pub delta: f64,
}

#[derive(Debug, Clone, Default)]
struct NodeTrace {
    buckets: Vec<f64>,
    totals: [f64; NUM_CATEGORIES],
    used: [bool; NUM_CATEGORIES],
    entries: Vec<TraceEntry>,
}

/// Per-node energy deltas, pre-aggregated into fixed-width time buckets.
///
/// Dwell charges that straddle a bucket boundary are split in proportion to
/// the overlap. Raw entries are kept only when requested, since large meshes
/// produce billions of them.
#[derive(Debug, Clone)]
pub struct EnergyTrace {
    bucket: SimTime,
    keep_entries: bool,
    nodes: Vec<NodeTrace>,
    closed_at: Option<SimTime>,
}

impl EnergyTrace {
    pub fn new(node_count: usize, bucket: SimTime, keep_entries: bool) -> Self {
        assert!(bucket > SimTime::ZERO, "trace bucket width must be positive");
        Self {
            bucket,
            keep_entries,
            nodes: vec![NodeTrace::default(); node_count],
            closed_at: None,
        }
    }

    pub fn bucket_width(&self) -> SimTime {
        self.bucket
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn closed_at(&self) -> Option<SimTime> {
        self.closed_at
    }

    pub fn close(&mut self, at: SimTime) {
        self.closed_at = Some(at);
    }

    fn add_to_bucket(node: &mut NodeTrace, bucket: usize, cat: usize, delta: f64) {
        let idx = bucket * NUM_CATEGORIES + cat;
        if node.buckets.len() <= idx {
            node.buckets.resize((bucket + 1) * NUM_CATEGORIES, 0.0);
        }
        node.buckets[idx] += delta;
    }

    pub fn record(&mut self, node: NodeId, start: SimTime, end: SimTime, category: Category, delta: f64) {
        if delta == 0.0 {
            return;
        }
        debug_assert!(end >= start);
        let width = self.bucket.as_nanos();
        let keep = self.keep_entries;
        let n = &mut self.nodes[node as usize];
        let cat = category.index();
        n.totals[cat] += delta;
        n.used[cat] = true;
        if keep {
            n.entries.push(TraceEntry {
                start,
                end,
                category,
                delta,
            });
        }
        let first = (start.as_nanos() / width) as usize;
        let last = if end > start {
            ((end.as_nanos() - 1) / width) as usize
        } else {
            first
        };
        if first == last {
            Self::add_to_bucket(n, first, cat, delta);
            return;
        }
        let span = (end - start).as_nanos() as f64;
        for b in first..=last {
            let lo = start.as_nanos().max(b as u64 * width);
            let hi = end.as_nanos().min((b as u64 + 1) * width);
            Self::add_to_bucket(n, b, cat, delta * (hi - lo) as f64 / span);
        }
    }

    pub fn entries(&self, node: NodeId) -> &[TraceEntry] {
        &self.nodes[node as usize].entries
    }

    pub fn keeps_entries(&self) -> bool {
        self.keep_entries
    }

    pub fn total(&self, node: NodeId, category: Category) -> f64 {
        self.nodes[node as usize].totals[category.index()]
    }

    /// Categories that received at least one non-zero delta, in category order.
    pub fn categories(&self, node: NodeId) -> impl Iterator<Item = Category> + '_ {
        let n = &self.nodes[node as usize];
        (0..NUM_CATEGORIES)
            .filter(move |&i| n.used[i])
            .map(Category::from_index)
    }

    pub fn bucket_value(&self, node: NodeId, bucket: usize, category: Category) -> f64 {
        self.nodes[node as usize]
            .buckets
            .get(bucket * NUM_CATEGORIES + category.index())
            .copied()
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub node: NodeId,
    pub category: Category,
    pub interval_index: u64,
    pub energy_j: f64,
}

/// Energy totals bucketed by interval and category.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub interval: SimTime,
    pub intervals: u64,
    /// Ordered by node, category, interval.
    pub rows: Vec<ReportRow>,
}

impl EnergyReport {
    pub fn node_interval_total(&self, node: NodeId, interval_index: u64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.node == node && r.interval_index == interval_index && r.category.is_consumption())
            .map(|r| r.energy_j)
            .sum()
    }

    pub fn node_category_total(&self, node: NodeId, category: Category) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.node == node && r.category == category)
            .map(|r| r.energy_j)
            .sum()
    }
}

/// Buckets a closed trace by `interval`.
///
/// `interval` must be a whole multiple of the trace bucket width unless the
/// trace kept its raw entries, in which case they are re-bucketed directly.
pub fn energy_report(trace: &EnergyTrace, interval: SimTime) -> Result<EnergyReport, EnergyError> {
    let closed = trace.closed_at.ok_or(EnergyError::TraceOpen)?;
    if interval == SimTime::ZERO {
        return Err(EnergyError::InvalidParam {
            field: "interval",
            reason: "must be positive".into(),
        });
    }
    let width = interval.as_nanos();
    let intervals = closed.as_nanos().div_ceil(width);
    let mut rows = Vec::new();
    let aligned = width.is_multiple_of(trace.bucket.as_nanos());
    if !aligned && !trace.keep_entries {
        return Err(EnergyError::IntervalMismatch {
            interval,
            bucket: trace.bucket,
        });
    }
    for (node_idx, n) in trace.nodes.iter().enumerate() {
        let node = node_idx as NodeId;
        let cats: Vec<Category> = trace.categories(node).collect();
        if cats.is_empty() {
            continue;
        }
        let mut grid = vec![0.0; intervals as usize * NUM_CATEGORIES];
        if aligned {
            let per = (width / trace.bucket.as_nanos()) as usize;
            for (i, v) in n.buckets.iter().enumerate() {
                let (b, c) = (i / NUM_CATEGORIES, i % NUM_CATEGORIES);
                let k = (b / per).min(intervals.saturating_sub(1) as usize);
                if let Some(slot) = grid.get_mut(k * NUM_CATEGORIES + c) {
                    *slot += v;
                }
            }
        } else {
            let mut tmp = EnergyTrace::new(1, interval, false);
            for e in &n.entries {
                tmp.record(0, e.start, e.end, e.category, e.delta);
            }
            for k in 0..intervals as usize {
                for c in 0..NUM_CATEGORIES {
                    grid[k * NUM_CATEGORIES + c] = tmp.bucket_value(0, k, Category::from_index(c));
                }
            }
        }
        for cat in cats {
            for k in 0..intervals {
                rows.push(ReportRow {
                    node,
                    category: cat,
                    interval_index: k,
                    energy_j: grid[k as usize * NUM_CATEGORIES + cat.index()],
                });
            }
        }
    }
    Ok(EnergyReport {
        interval,
        intervals,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDLE: Category = Category::Radio(RadioState::Idle);
    const TX: Category = Category::Radio(RadioState::Tx);

    #[test]
    fn straddling_dwell_is_split_by_overlap() {
        let mut t = EnergyTrace::new(1, SimTime::from_secs(1), false);
        t.record(0, SimTime::from_millis(500), SimTime::from_millis(2500), IDLE, 4.0);
        assert!((t.bucket_value(0, 0, IDLE) - 1.0).abs() < 1e-15);
        assert!((t.bucket_value(0, 1, IDLE) - 2.0).abs() < 1e-15);
        assert!((t.bucket_value(0, 2, IDLE) - 1.0).abs() < 1e-15);
        assert_eq!(t.total(0, IDLE), 4.0);
    }

    #[test]
    fn dwell_ending_on_boundary_stays_in_its_bucket() {
        let mut t = EnergyTrace::new(1, SimTime::from_secs(1), false);
        t.record(0, SimTime::from_millis(900), SimTime::from_secs(1), TX, 1.0);
        assert_eq!(t.bucket_value(0, 0, TX), 1.0);
        assert_eq!(t.bucket_value(0, 1, TX), 0.0);
    }

    #[test]
    fn report_requires_closed_trace() {
        let t = EnergyTrace::new(1, SimTime::from_secs(1), false);
        assert!(matches!(
            energy_report(&t, SimTime::from_secs(1)),
            Err(EnergyError::TraceOpen)
        ));
    }

    #[test]
    fn empty_trace_has_no_rows() {
        let mut t = EnergyTrace::new(3, SimTime::from_secs(1), false);
        t.close(SimTime::from_secs(10));
        let r = energy_report(&t, SimTime::from_secs(1)).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.intervals, 10);
    }

    #[test]
    fn periodic_charges_give_equal_buckets_and_conserve() {
        let mut t = EnergyTrace::new(1, SimTime::from_secs(1), true);
        for k in 0..5u64 {
            let s = SimTime::from_secs(k);
            t.record(0, s, s + SimTime::from_micros(200), TX, 1.5e-4);
            t.record(0, s + SimTime::from_micros(200), s + SimTime::from_secs(1), IDLE, 2e-4);
        }
        t.close(SimTime::from_secs(5));
        let r = energy_report(&t, SimTime::from_secs(1)).unwrap();
        let per: Vec<f64> = (0..5).map(|k| r.node_interval_total(0, k)).collect();
        assert!(per.windows(2).all(|w| w[0] == w[1]));
        let sum: f64 = r.rows.iter().map(|x| x.energy_j).sum();
        assert!((sum - (t.total(0, TX) + t.total(0, IDLE))).abs() < 1e-15);

        // coarser aligned interval and an unaligned one via raw entries
        let r2 = energy_report(&t, SimTime::from_secs(5)).unwrap();
        assert_eq!(r2.intervals, 1);
        let r3 = energy_report(&t, SimTime::from_millis(2500)).unwrap();
        assert_eq!(r3.intervals, 2);
        let halves = r3.node_interval_total(0, 0) + r3.node_interval_total(0, 1);
        assert!((halves - sum).abs() < 1e-15);
        // three transmissions start in [0, 2.5 s), two in [2.5 s, 5 s)
        assert!((r3.node_category_total(0, TX) - 5.0 * 1.5e-4).abs() < 1e-15);
        let first_tx = r3
            .rows
            .iter()
            .find(|r| r.category == TX && r.interval_index == 0)
            .unwrap();
        assert!((first_tx.energy_j - 4.5e-4).abs() < 1e-15);
    }

    #[test]
    fn unaligned_without_entries_is_rejected() {
        let mut t = EnergyTrace::new(1, SimTime::from_secs(1), false);
        t.close(SimTime::from_secs(3));
        assert!(matches!(
            energy_report(&t, SimTime::from_millis(1500)),
            Err(EnergyError::IntervalMismatch { .. })
        ));
    }

    #[test]
    fn category_indices_are_dense() {
        let all: Vec<Category> = Category::all().collect();
        assert_eq!(all.len(), NUM_CATEGORIES);
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(Category::from_index(i), *c);
        }
    }
}
