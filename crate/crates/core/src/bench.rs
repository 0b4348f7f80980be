//! Throughput metrics and benchmark tables.
//!
//! A benchmark run is a plain center-square run with snapshots disabled
//! (`nssp = 1`); only the iteration loop is timed.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{InitMode, Precision, RunConfig};
use crate::gene::Gene;
use crate::grid::{checksum_hex, Real};
use crate::init::{init_center_square, InitError};
use crate::kernels::Backend;
use crate::run::{run, RunError};

/// Header of the CSV emitted by [`emit_table`].
pub const CSV_HEADER: &str = "backend,hardware,n,iters,seconds,mcells_per_s,ns_per_cell_iter,checksum";

/// Relative tolerance of the record self-consistency checks.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("duration must be positive")]
    ZeroDuration,
    #[error("no benchmark records to tabulate")]
    Empty,
    #[error("invalid benchmark request: {0}")]
    Invalid(String),
    #[error("{backend} at N={n}: {source}")]
    Run {
        backend: String,
        n: usize,
        #[source]
        source: RunError,
    },
    #[error("N={n}: {source}")]
    Init {
        n: usize,
        #[source]
        source: InitError,
    },
}

impl BenchError {
    /// Iteration of a blow-up, if the failing run diverged.
    pub fn blow_up_iteration(&self) -> Option<usize> {
        match self {
            BenchError::Run { source, .. } => source.blow_up_iteration(),
            _ => None,
        }
    }
}

/// Million cell updates per second and nanoseconds per cell update.
pub fn throughput(nn: usize, nm: usize, iters: usize, seconds: f64) -> Result<(f64, f64), BenchError> {
    if seconds.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !seconds.is_finite() {
        return Err(BenchError::ZeroDuration);
    }
    let work = nn as f64 * nm as f64 * iters as f64;
    Ok((work / (seconds * 1e6), seconds * 1e9 / work))
}

/// One timed configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub backend: String,
    pub hardware: String,
    pub n: usize,
    pub iters: usize,
    pub seconds: f64,
    pub mcells_per_s: f64,
    pub ns_per_cell_iter: f64,
    /// Final-state checksum as 16 hex digits.
    pub checksum: String,
}

impl BenchRecord {
    pub fn new(
        backend: &str,
        hardware: &str,
        n: usize,
        iters: usize,
        seconds: f64,
        checksum: u64,
    ) -> Result<Self, BenchError> {
        let (mcells_per_s, ns_per_cell_iter) = throughput(n, n, iters, seconds)?;
        Ok(Self {
            backend: backend.to_string(),
            hardware: hardware.to_string(),
            n,
            iters,
            seconds,
            mcells_per_s,
            ns_per_cell_iter,
            checksum: checksum_hex(checksum),
        })
    }

    /// Both stored rates agree with the wall time and with each other.
    pub fn is_consistent(&self) -> bool {
        let work = self.n as f64 * self.n as f64 * self.iters as f64;
        let expect = work / self.seconds / 1e6;
        let rel = |x: f64, y: f64| ((x - y) / y).abs() <= CONSISTENCY_TOLERANCE;
        rel(self.mcells_per_s, expect) && rel(self.ns_per_cell_iter * self.mcells_per_s, 1000.0)
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.2},{:.4},{}",
            csv_field(&self.backend),
            csv_field(&self.hardware),
            self.n,
            self.iters,
            self.seconds,
            self.mcells_per_s,
            self.ns_per_cell_iter,
            self.checksum
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A benchmark matrix request.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub backends: Vec<Backend>,
    pub sizes: Vec<usize>,
    pub iters: usize,
    pub gene: Gene,
    pub seed: u64,
    pub precision: Precision,
    pub hardware: String,
    /// Timed repetitions per cell; the median is reported.
    pub repetitions: usize,
    /// Cells whose `N*N*iters` exceeds this are skipped, not run.
    pub max_cell_iters: Option<u64>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            backends: vec![Backend::parallel()],
            sizes: vec![128, 256, 512, 1024, 2048, 4096],
            iters: 1000,
            gene: Gene::default(),
            seed: 0,
            precision: Precision::Single,
            hardware: "cpu".to_string(),
            repetitions: 3,
            max_cell_iters: None,
        }
    }
}

/// A matrix cell that was not run.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub backend: String,
    pub n: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<Skipped>,
}

/// Runs every (backend, N) pair sequentially, after one discarded warm-up
/// run per backend at the smallest size.
pub fn bench_suite(spec: &BenchSpec) -> Result<BenchReport, BenchError> {
    match spec.precision {
        Precision::Single => bench_suite_typed::<f32>(spec),
        Precision::Double => bench_suite_typed::<f64>(spec),
    }
}

fn bench_suite_typed<T: Real>(spec: &BenchSpec) -> Result<BenchReport, BenchError> {
    if spec.iters == 0 {
        return Err(BenchError::Invalid("iters must be at least 1".into()));
    }
    if spec.repetitions == 0 {
        return Err(BenchError::Invalid("repetitions must be at least 1".into()));
    }
    if let Some(&n) = spec.sizes.iter().find(|&&n| n < crate::init::SEED_BLOCK) {
        return Err(BenchError::Invalid(format!(
            "size {n} is below the {} cell minimum",
            crate::init::SEED_BLOCK
        )));
    }

    let mut report = BenchReport::default();
    for &backend in &spec.backends {
        let label = backend.label();
        let runnable: Vec<usize> = spec
            .sizes
            .iter()
            .copied()
            .filter(|&n| {
                let over = spec
                    .max_cell_iters
                    .is_some_and(|cap| (n * n) as u64 * spec.iters as u64 > cap);
                if over {
                    report.skipped.push(Skipped {
                        backend: label.clone(),
                        n,
                        reason: "over the cell-iteration budget".into(),
                    });
                }
                !over
            })
            .collect();
        if let Some(&smallest) = runnable.iter().min() {
            timed_run::<T>(spec, backend, smallest)?;
        }
        for n in runnable {
            let mut times = Vec::with_capacity(spec.repetitions);
            let mut checksum = None;
            for _ in 0..spec.repetitions {
                let (seconds, digest) = timed_run::<T>(spec, backend, n)?;
                times.push(seconds);
                checksum.get_or_insert(digest);
            }
            times.sort_by(f64::total_cmp);
            let seconds = times[times.len() / 2].max(f64::MIN_POSITIVE);
            report.records.push(BenchRecord::new(
                &label,
                &spec.hardware,
                n,
                spec.iters,
                seconds,
                checksum.unwrap(),
            )?);
        }
    }
    Ok(report)
}

fn timed_run<T: Real>(spec: &BenchSpec, backend: Backend, n: usize) -> Result<(f64, u64), BenchError> {
    let config = RunConfig {
        init_mode: InitMode::CenterSquare,
        iter_max: spec.iters,
        nssp: 1,
        seed: spec.seed,
        backend,
        precision: spec.precision,
        ..RunConfig::square(n)
    };
    let initial = init_center_square::<T>(n, n, spec.seed).map_err(|source| BenchError::Init { n, source })?;
    let outcome = run(&config, &spec.gene, initial).map_err(|source| BenchError::Run {
        backend: backend.label(),
        n,
        source,
    })?;
    Ok((outcome.seconds, outcome.final_state.checksum()))
}

/// How table rows are keyed.
fn row_key(records: &[BenchRecord]) -> impl Fn(&BenchRecord) -> String {
    let backends: BTreeSet<&str> = records.iter().map(|r| r.backend.as_str()).collect();
    let hardware: BTreeSet<&str> = records.iter().map(|r| r.hardware.as_str()).collect();
    let (by_backend, by_hardware) = (hardware.len() == 1, backends.len() == 1 && hardware.len() > 1);
    move |r: &BenchRecord| {
        if by_backend {
            r.backend.clone()
        } else if by_hardware {
            r.hardware.clone()
        } else {
            format!("{} @ {}", r.backend, r.hardware)
        }
    }
}

/// CSV text plus an aligned table with one row per backend (or per hardware
/// label when all records share a backend) and one `N=...` column per size.
/// Cells read `mcells/s (seconds)`; missing combinations show `—`.
pub fn emit_table(records: &[BenchRecord]) -> Result<(String, String), BenchError> {
    render(records, &[])
}

impl BenchReport {
    /// Like [`emit_table`], with skipped cells shown as `—`.
    pub fn emit_table(&self) -> Result<(String, String), BenchError> {
        render(&self.records, &self.skipped)
    }
}

fn render(records: &[BenchRecord], skipped: &[Skipped]) -> Result<(String, String), BenchError> {
    if records.is_empty() {
        return Err(BenchError::Empty);
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in records {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }

    let key = row_key(records);
    let mut rows: Vec<String> = Vec::new();
    for r in records {
        let k = key(r);
        if !rows.contains(&k) {
            rows.push(k);
        }
    }
    let hardware = &records[0].hardware;
    for s in skipped {
        let probe = BenchRecord {
            backend: s.backend.clone(),
            hardware: hardware.clone(),
            n: s.n,
            iters: 0,
            seconds: 0.0,
            mcells_per_s: 0.0,
            ns_per_cell_iter: 0.0,
            checksum: String::new(),
        };
        let k = key(&probe);
        if !rows.contains(&k) {
            rows.push(k);
        }
    }
    let sizes: BTreeSet<usize> = records.iter().map(|r| r.n).chain(skipped.iter().map(|s| s.n)).collect();

    let mut grid: Vec<Vec<String>> = vec![std::iter::once("speed (seconds)".to_string())
        .chain(sizes.iter().map(|n| format!("N={n}")))
        .collect()];
    for row in &rows {
        let mut line = vec![row.clone()];
        for &n in &sizes {
            let cell = records
                .iter()
                .rev()
                .find(|r| r.n == n && &key(r) == row)
                .map(|r| format!("{:.0} ({:.2})", r.mcells_per_s, r.seconds))
                .unwrap_or_else(|| "—".to_string());
            line.push(cell);
        }
        grid.push(line);
    }

    let ncols = grid[0].len();
    let widths: Vec<usize> = (0..ncols)
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap())
        .collect();
    let mut table = String::new();
    for (i, row) in grid.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                let _ = write!(table, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(table, "  {}{cell}", " ".repeat(pad));
            }
        }
        table.push('\n');
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (ncols - 1);
            table.push_str(&"-".repeat(total));
            table.push('\n');
        }
    }
    Ok((csv, table))
}

/// The records as a JSON array with the CSV field names.
pub fn emit_json(records: &[BenchRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}
