//! Host CPU / resident-memory sampling from the OS process statistics.
//!
//! On Linux the sampler reads `/proc/<pid>/stat` (utime + stime) and
//! `/proc/<pid>/status` (VmRSS, VmHWM). Elsewhere, or if the files cannot be
//! read, the metrics are reported as unavailable and the run stays valid.

use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

/// Default sampling period.
pub const SAMPLE_INTERVAL: Duration = Duration::from_millis(100);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Offset from the start of sampling.
    pub at: Duration,
    /// CPU utilisation over the preceding period; 100 = one full core.
    pub cpu_pct: f64,
    pub rss_bytes: u64,
}

/// Summary of one sampling session. `None` fields mean "unavailable".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HostMetrics {
    pub samples: Vec<Sample>,
    pub cpu_avg_pct: Option<f64>,
    pub cpu_max_pct: Option<f64>,
    pub peak_rss_bytes: Option<u64>,
}

impl HostMetrics {
    pub fn available(&self) -> bool {
        self.cpu_avg_pct.is_some()
    }

    fn from_samples(samples: Vec<Sample>, hwm: Option<u64>) -> Self {
        if samples.is_empty() {
            return Self {
                samples,
                cpu_avg_pct: None,
                cpu_max_pct: None,
                peak_rss_bytes: hwm,
            };
        }
        // plain mean of the samples, not time-weighted
        let avg = samples.iter().map(|s| s.cpu_pct).sum::<f64>() / samples.len() as f64;
        let max = samples.iter().map(|s| s.cpu_pct).fold(f64::NEG_INFINITY, f64::max);
        let peak = samples.iter().map(|s| s.rss_bytes).max().into_iter().chain(hwm).max();
        Self {
            samples,
            cpu_avg_pct: Some(avg),
            cpu_max_pct: Some(max),
            peak_rss_bytes: peak,
        }
    }
}

#[cfg(target_os = "linux")]
mod proc_fs {
    use std::sync::OnceLock;

    pub fn clock_ticks() -> Option<f64> {
        static TICKS: OnceLock<Option<f64>> = OnceLock::new();
        *TICKS.get_or_init(|| {
            // SAFETY: sysconf has no memory-safety preconditions.
            let t = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
            (t > 0).then_some(t as f64)
        })
    }

    /// utime + stime in clock ticks.
    pub fn cpu_ticks(pid: u32) -> Option<u64> {
        let stat = std::fs::read_to_string(format!("/proc/{pid}/stat")).ok()?;
        // the command name may contain spaces; fields resume after the last ')'
        let rest = &stat[stat.rfind(')')? + 2..];
        let mut fields = rest.split_ascii_whitespace();
        // rest starts at field 3 (state); utime and stime are fields 14 and 15
        let utime: u64 = fields.nth(11)?.parse().ok()?;
        let stime: u64 = fields.next()?.parse().ok()?;
        Some(utime + stime)
    }

    fn status_kb(pid: u32, key: &str) -> Option<u64> {
        let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
        let line = status.lines().find(|l| l.starts_with(key))?;
        let kb: u64 = line[key.len()..].trim().trim_end_matches("kB").trim().parse().ok()?;
        Some(kb * 1024)
    }

    pub fn rss_bytes(pid: u32) -> Option<u64> {
        status_kb(pid, "VmRSS:")
    }

    pub fn peak_rss_bytes(pid: u32) -> Option<u64> {
        status_kb(pid, "VmHWM:")
    }
}

#[cfg(not(target_os = "linux"))]
mod proc_fs {
    pub fn clock_ticks() -> Option<f64> {
        None
    }
    pub fn cpu_ticks(_: u32) -> Option<u64> {
        None
    }
    pub fn rss_bytes(_: u32) -> Option<u64> {
        None
    }
    pub fn peak_rss_bytes(_: u32) -> Option<u64> {
        None
    }
}

struct Probe {
    pid: u32,
    ticks_per_s: f64,
    last_ticks: u64,
    last_at: Instant,
    origin: Instant,
}

impl Probe {
    fn new(pid: u32) -> Option<Self> {
        let ticks_per_s = proc_fs::clock_ticks()?;
        let last_ticks = proc_fs::cpu_ticks(pid)?;
        proc_fs::rss_bytes(pid)?;
        let now = Instant::now();
        Some(Self {
            pid,
            ticks_per_s,
            last_ticks,
            last_at: now,
            origin: now,
        })
    }

    fn sample(&mut self) -> Option<Sample> {
        let ticks = proc_fs::cpu_ticks(self.pid)?;
        let rss = proc_fs::rss_bytes(self.pid)?;
        let now = Instant::now();
        let wall = now.duration_since(self.last_at).as_secs_f64();
        if wall <= 0.0 {
            return None;
        }
        let cpu = (ticks.saturating_sub(self.last_ticks)) as f64 / self.ticks_per_s;
        self.last_ticks = ticks;
        self.last_at = now;
        Some(Sample {
            at: now.duration_since(self.origin),
            cpu_pct: 100.0 * cpu / wall,
            rss_bytes: rss,
        })
    }
}

/// Background observer of one process. Stop it to collect the samples.
pub struct Sampler {
    stop: Option<Sender<()>>,
    worker: Option<JoinHandle<(Vec<Sample>, Option<u64>)>>,
}

/// Starts sampling `pid` every `interval`. If process statistics are not
/// available the returned sampler yields unavailable metrics.
pub fn sample_host_metrics(pid: u32, interval: Duration) -> Sampler {
    let Some(mut probe) = Probe::new(pid) else {
        return Sampler {
            stop: None,
            worker: None,
        };
    };
    let (tx, rx) = mpsc::channel::<()>();
    let worker = std::thread::Builder::new()
        .name(format!("metrics-{pid}"))
        .spawn(move || {
            let mut samples = Vec::new();
            while let Err(RecvTimeoutError::Timeout) = rx.recv_timeout(interval) {
                samples.extend(probe.sample());
            }
            // the final partial period so that short runs still get a sample
            if samples.is_empty() || probe.last_at.elapsed() >= interval / 10 {
                samples.extend(probe.sample());
            }
            (samples, proc_fs::peak_rss_bytes(pid))
        })
        .ok();
    Sampler { stop: Some(tx), worker }
}

/// Samples the current process.
pub fn sample_self(interval: Duration) -> Sampler {
    sample_host_metrics(std::process::id(), interval)
}

impl Sampler {
    pub fn stop(mut self) -> HostMetrics {
        self.finish()
    }

    fn finish(&mut self) -> HostMetrics {
        drop(self.stop.take());
        match self.worker.take().map(JoinHandle::join) {
            Some(Ok((samples, hwm))) => HostMetrics::from_samples(samples, hwm),
            _ => HostMetrics::default(),
        }
    }
}

impl Drop for Sampler {
    fn drop(&mut self) {
        if self.worker.is_some() {
            self.finish();
        }
    }
}
