//! Sequential-versus-parallel timing harness.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::augment::{tree_augment, AugmentError, AugmentationSet};
use crate::generate::{shape_tree, Shape};
use crate::parallel::ParallelAugmenter;
use crate::tree::{lower_bound, Tree};

/// One CSV row. Times are medians in nanoseconds; `speedup = t_seq / t_par`
/// and `efficiency = speedup / workers`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub shape: String,
    pub workers: usize,
    pub t_seq: u64,
    pub t_par: u64,
    pub speedup: f64,
    pub efficiency: f64,
    pub edges_added: usize,
}

pub const CSV_HEADER: &str = "n,shape,workers,t_seq,t_par,speedup,efficiency,edges_added";

impl BenchRecord {
    pub fn new(n: usize, shape: Shape, workers: usize, t_seq: u64, t_par: u64, edges_added: usize) -> Self {
        let speedup = t_seq as f64 / t_par as f64;
        Self {
            n,
            shape: shape.name().to_string(),
            workers,
            t_seq,
            t_par,
            speedup,
            efficiency: speedup / workers as f64,
            edges_added,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub shapes: Vec<Shape>,
    pub workers: Vec<usize>,
    /// Timed runs per measurement, after one discarded warm-up run.
    pub trials: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10_000, 100_000],
            shapes: vec![Shape::Random, Shape::Caterpillar],
            workers: default_worker_counts(),
            trials: 5,
            seed: 1,
        }
    }
}

/// Powers of two up to the hardware parallelism.
pub fn default_worker_counts() -> Vec<usize> {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::iter::successors(Some(1usize), |w| Some(w * 2))
        .take_while(|&w| w <= hw)
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("size {0} is below the minimum of 3")]
    TooSmall(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("engines disagree on {shape} n={n} with {workers} workers: {detail}")]
    EngineMismatch {
        n: usize,
        shape: Shape,
        workers: usize,
        detail: String,
    },
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Median wall time of `trials` runs of `f`, after one untimed warm-up run.
/// Returns the last result alongside.
pub fn median_time<T>(trials: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    assert!(trials > 0);
    let mut last = f();
    let mut times = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        last = f();
        times.push(start.elapsed());
    }
    times.sort_unstable();
    (times[trials / 2], last)
}

fn nanos(d: Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX).max(1)
}

/// Runs every (size, shape, workers) combination. Each instance is checked
/// for identical output across engines and for `edges_added` equal to the
/// lower bound; the first disagreement aborts the run.
pub fn run_bench(
    config: &BenchConfig,
    mut on_record: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>, BenchError> {
    if config.trials == 0 {
        return Err(BenchError::NoTrials);
    }
    if let Some(&n) = config.sizes.iter().find(|&&n| n < 3) {
        return Err(BenchError::TooSmall(n));
    }
    let engines: Vec<ParallelAugmenter> = config.workers.iter().map(|&w| ParallelAugmenter::new(w)).collect();

    let mut records = Vec::new();
    for &n in &config.sizes {
        for &shape in &config.shapes {
            let tree = shape_tree(shape, n, config.seed);
            let bound = lower_bound(&tree).expect("n >= 3");
            let (t_seq, expected) = median_time(config.trials, || tree_augment(&tree));
            let expected = expected?;
            for engine in &engines {
                let (t_par, got) = median_time(config.trials, || engine.augment(&tree));
                check_same(&tree, shape, engine.workers(), &expected, &got?, bound)?;
                let rec = BenchRecord::new(n, shape, engine.workers(), nanos(t_seq), nanos(t_par), expected.len());
                on_record(&rec);
                records.push(rec);
            }
        }
    }
    Ok(records)
}

fn check_same(
    tree: &Tree,
    shape: Shape,
    workers: usize,
    expected: &AugmentationSet,
    got: &AugmentationSet,
    bound: usize,
) -> Result<(), BenchError> {
    let mismatch = |detail: String| BenchError::EngineMismatch {
        n: tree.vertex_count(),
        shape,
        workers,
        detail,
    };
    if expected != got {
        return Err(mismatch(format!(
            "sequential added {} edges, parallel {}; lists differ",
            expected.len(),
            got.len()
        )));
    }
    if expected.len() != bound {
        return Err(mismatch(format!("added {} edges, lower bound {bound}", expected.len())));
    }
    Ok(())
}

/// CSV writer with the fixed header, flushing after every row.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W) -> Self {
        Self {
            inner: csv::WriterBuilder::new().has_headers(true).from_writer(out),
        }
    }

    pub fn write(&mut self, record: &BenchRecord) -> Result<(), csv::Error> {
        self.inner.serialize(record)?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
            .into_inner()
            .map_err(|e| e.into_error())
            .expect("flushed writer")
    }
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<(), csv::Error> {
    let mut sink = CsvSink::new(out);
    for r in records {
        sink.write(r)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_comparison() {
        let config = BenchConfig {
            sizes: vec![1000],
            shapes: vec![Shape::Random],
            workers: vec![1],
            trials: 3,
            seed: 4,
        };
        let records = run_bench(&config, |_| {}).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.workers, 1);
        assert!(r.speedup.is_finite() && r.speedup > 0.0);
        assert_eq!(r.efficiency, r.speedup);
        assert_eq!(r.edges_added, lower_bound(&shape_tree(Shape::Random, 1000, 4)).unwrap());
    }

    #[test]
    fn csv_schema() {
        let rec = BenchRecord::new(10, Shape::Star, 2, 400, 100, 8);
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("10,star,2,400,100,4.0,2.0,8"));
    }

    #[test]
    fn rejects_small_sizes() {
        let config = BenchConfig {
            sizes: vec![2],
            ..BenchConfig::default()
        };
        assert!(matches!(run_bench(&config, |_| {}), Err(BenchError::TooSmall(2))));
    }

    #[test]
    fn default_workers_start_at_one() {
        assert_eq!(default_worker_counts()[0], 1);
    }
}
