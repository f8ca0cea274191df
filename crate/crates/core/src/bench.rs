//! Timing harness for the two-stage sampling pipeline.
//!
//! For each input size a fresh synthetic vehicle cloud is generated and both
//! samplers run the 1024/512 pipeline on it once as a discarded warm-up.
//! The measured runs then cycle through every size and sampler once per
//! repeat, so a slow phase of the machine lands on all sizes alike instead of
//! skewing one. Each run records three spans on a monotonic clock: the
//! sampling module, the generation stub (an empty timed region standing in
//! for network inference, which is not reproduced), and their total.

use std::fmt::Write as _;
use std::fs;
use std::hint::black_box;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use crate::dataio::{generate_shape, ShapeKind};
use crate::error::{invalid, Error, Result};
use crate::sampling::{multiscale_sample, CellIfpsConfig, Sampler, PIPELINE_MIN_INPUT};

/// Input sizes of the five vehicle-cloud scales.
pub const DEFAULT_SIZES: [usize; 5] = [2048, 4048, 6048, 8048, 10048];
pub const MIN_REPEATS: usize = 3;
pub const CSV_HEADER: &str = "algorithm,stage,n_input,repeat,wall_ms";

const ALGORITHMS: [Sampler; 2] = [Sampler::Ifps, Sampler::CellIfps];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Sampling,
    GenerationStub,
    Total,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Sampling => "sampling",
            Stage::GenerationStub => "generation_stub",
            Stage::Total => "total",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Sampler,
    pub stage: Stage,
    pub n_input: usize,
    pub repeat_index: usize,
    pub wall_ms: f64,
    /// Start of the measured run, in ms since the harness started.
    pub started_ms: f64,
}

static BENCH_RUNNING: AtomicBool = AtomicBool::new(false);

struct RunGuard;

impl RunGuard {
    fn acquire() -> Result<Self> {
        if let Some(threads) = std::env::var("RUST_TEST_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            if threads > 1 {
                return Err(Error::BenchRefused(format!(
                    "RUST_TEST_THREADS={threads}; timings need a single test thread"
                )));
            }
        }
        if BENCH_RUNNING.swap(true, Ordering::SeqCst) {
            return Err(Error::BenchRefused("another benchmark is already running in this process".into()));
        }
        Ok(RunGuard)
    }
}

impl Drop for RunGuard {
    fn drop(&mut self) {
        BENCH_RUNNING.store(false, Ordering::SeqCst);
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn run_sampling_bench(sizes: &[usize], repeats: usize, rng_seed: u64) -> Result<Vec<BenchRecord>> {
    if repeats < MIN_REPEATS {
        return Err(invalid(format!("repeats must be at least {MIN_REPEATS}, got {repeats}")));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < PIPELINE_MIN_INPUT) {
        return Err(Error::BelowMinimumScale {
            available: n,
            required: PIPELINE_MIN_INPUT,
        });
    }
    let _guard = RunGuard::acquire()?;

    let config = CellIfpsConfig::with_seed(rng_seed);
    let clouds = sizes
        .iter()
        .map(|&n| generate_shape(ShapeKind::VehicleProxy, n, rng_seed ^ n as u64))
        .collect::<Result<Vec<_>>>()?;
    for cloud in &clouds {
        for sampler in ALGORITHMS {
            black_box(multiscale_sample(cloud, sampler, &config)?);
        }
    }

    let epoch = Instant::now();
    let mut records = Vec::with_capacity(sizes.len() * repeats * ALGORITHMS.len() * 3);
    for repeat_index in 0..repeats {
        for (&n_input, cloud) in sizes.iter().zip(&clouds) {
            for algorithm in ALGORITHMS {
                let t0 = Instant::now();
                let out = multiscale_sample(black_box(cloud), algorithm, &config)?;
                let t1 = Instant::now();
                black_box(&out);
                let t2 = Instant::now();

                let started_ms = ms(t0 - epoch);
                for (stage, span) in [
                    (Stage::Sampling, t1 - t0),
                    (Stage::GenerationStub, t2 - t1),
                    (Stage::Total, t2 - t0),
                ] {
                    records.push(BenchRecord {
                        algorithm,
                        stage,
                        n_input,
                        repeat_index,
                        wall_ms: ms(span),
                        started_ms,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// `t_p / t_ip`: how many times faster the improved run is.
pub fn speedup(t_p: f64, t_ip: f64) -> Result<f64> {
    if !(t_p.is_finite() && t_p > 0.0 && t_ip.is_finite() && t_ip > 0.0) {
        return Err(invalid(format!("speedup needs positive times, got {t_p} and {t_ip}")));
    }
    Ok(t_p / t_ip)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Sampling-stage medians of one input size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeSummary {
    pub n_input: usize,
    pub ifps_median_ms: f64,
    pub cell_ifps_median_ms: f64,
    pub speedup: f64,
}

/// One row per input size that has sampling records for both algorithms,
/// in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = Vec::new();
    for r in records {
        if !sizes.contains(&r.n_input) {
            sizes.push(r.n_input);
        }
    }
    sizes
        .into_iter()
        .filter_map(|n_input| {
            let med = |alg: Sampler| {
                let times: Vec<f64> = records
                    .iter()
                    .filter(|r| r.n_input == n_input && r.algorithm == alg && r.stage == Stage::Sampling)
                    .map(|r| r.wall_ms)
                    .collect();
                median(&times)
            };
            let ifps_median_ms = med(Sampler::Ifps)?;
            let cell_ifps_median_ms = med(Sampler::CellIfps)?;
            // a zero reading below timer resolution has no meaningful ratio
            let speedup = speedup(ifps_median_ms, cell_ifps_median_ms).unwrap_or(f64::NAN);
            Some(SizeSummary {
                n_input,
                ifps_median_ms,
                cell_ifps_median_ms,
                speedup,
            })
        })
        .collect()
}

/// Renders the CSV report: raw records, then (if there are any) a summary
/// block of per-size medians and speedups after a blank line.
pub fn format_report(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6}",
            r.algorithm.name(),
            r.stage.name(),
            r.n_input,
            r.repeat_index,
            r.wall_ms
        );
    }
    let summary = summarize(records);
    if !summary.is_empty() {
        out.push_str("\n# summary: median sampling time per input size\n");
        out.push_str(&format_summary(&summary));
    }
    out
}

pub fn format_summary(summary: &[SizeSummary]) -> String {
    let mut out = String::from("n_input,ifps_median_ms,cell_ifps_median_ms,speedup\n");
    for s in summary {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.3}",
            s.n_input, s.ifps_median_ms, s.cell_ifps_median_ms, s.speedup
        );
    }
    out
}

pub fn emit_report(records: &[BenchRecord], path: &Path) -> Result<()> {
    fs::write(path, format_report(records))?;
    Ok(())
}
