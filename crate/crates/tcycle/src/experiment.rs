//! Seeded multi-trial experiments and their CSV/JSON records.

use std::num::NonZeroUsize;
use std::thread;

use anyhow::{anyhow, Result};
use serde::{Deserialize, Serialize};
use tcycle_core::adversarial::GkInstance;
use tcycle_core::analysis::{
    compute_bad_sets, congestion_trial, fan_instance, path_probability, paths_per_source, random_fan_arms,
    summarize_congestion, sweep_prediction, sweep_trial, BadSetReport, CongestionSummary, FanArm, ReducedPalette,
    BAD_SET_F,
};
use tcycle_core::oracle::OracleLimits;
use tcycle_core::rng::derive_seed;
use tcycle_core::stats::{binomial_pmf, histogram};
use tcycle_core::{Cycle, Graph};

use crate::io::SCHEMA_VERSION;

/// Runs `f(0), ..., f(count-1)` on `jobs` threads and returns the results in
/// trial order, so output does not depend on `jobs`.
pub fn run_trials<T, F>(count: u64, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let jobs = jobs.clamp(1, count.max(1) as usize);
    if jobs == 1 {
        return (0..count).map(&f).collect();
    }
    let f = &f;
    let shards: Vec<Result<Vec<(u64, T)>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|j| {
                scope.spawn(move || (j..count).step_by(jobs).map(|t| f(t).map(|v| (t, v))).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("worker panicked")))).collect()
    });
    let mut all = Vec::with_capacity(count as usize);
    for shard in shards {
        all.extend(shard?);
    }
    all.sort_by_key(|(t, _)| *t);
    Ok(all.into_iter().map(|(_, v)| v).collect())
}

/// `--jobs 0` means one worker per available core.
pub fn resolve_jobs(jobs: usize) -> usize {
    if jobs == 0 {
        thread::available_parallelism().map_or(1, NonZeroUsize::get)
    } else {
        jobs
    }
}

/// Per-trial record of a congestion experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongestionRow {
    pub schema_version: u32,
    pub trial: u64,
    pub seed: u64,
    pub source: usize,
    #[serde(rename = "X")]
    pub x: u64,
    /// `X <= T`.
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongestionReport {
    pub schema_version: u32,
    pub master_seed: u64,
    pub k: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub reduced_palette: Option<ReducedPalette>,
    #[serde(flatten)]
    pub summary: CongestionSummary,
    pub empirical_std_error: f64,
    pub empirical_variance: f64,
    /// `P[X = x]` under Binomial(paths, r), `x = 0..=paths`.
    pub theory_pmf: Vec<f64>,
    /// Empirical frequency of each `X`, `x = 0..=paths`.
    pub empirical_pmf: Vec<f64>,
    pub ks_distance: f64,
}

pub fn congestion(
    inst: &GkInstance,
    threshold: u64,
    trials: u64,
    seed: u64,
    reduced: Option<ReducedPalette>,
    jobs: usize,
) -> Result<(Vec<CongestionRow>, CongestionReport)> {
    let samples = run_trials(trials, jobs, |t| Ok(congestion_trial(inst, t, seed, reduced)?))?;
    let summary = summarize_congestion(inst, threshold, &samples, reduced)?;
    let rows = samples
        .iter()
        .map(|s| CongestionRow {
            schema_version: SCHEMA_VERSION,
            trial: s.trial,
            seed: s.seed,
            source: s.source,
            x: s.x,
            verdict: s.x <= threshold,
        })
        .collect();
    let xs: Vec<u64> = samples.iter().map(|s| s.x).collect();
    let pmf = binomial_pmf(summary.paths, summary.r)?;
    let mut counts = histogram(&xs);
    counts.resize(pmf.len().max(counts.len()), 0);
    let empirical_pmf = counts.iter().map(|&c| if trials == 0 { 0.0 } else { c as f64 / trials as f64 }).collect();
    let report = CongestionReport {
        schema_version: SCHEMA_VERSION,
        master_seed: seed,
        k: inst.k,
        size: inst.size,
        reduced_palette: reduced,
        empirical_std_error: summary.moments.std_error(),
        empirical_variance: summary.moments.variance(),
        ks_distance: tcycle_core::stats::ks_distance(&xs, &pmf),
        theory_pmf: pmf,
        empirical_pmf,
        summary,
    };
    Ok((rows, report))
}

/// Per-trial record of a threshold sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTrialRow {
    pub schema_version: u32,
    /// Common cap, empty when unbounded.
    pub threshold: Option<u64>,
    pub trial: u64,
    pub seed: u64,
    pub source: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub detected: bool,
    pub rounds: u64,
}

/// Aggregate over the trials at one cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema_version: u32,
    pub threshold: Option<u64>,
    pub master_seed: u64,
    pub trials: u64,
    pub detections: u64,
    pub detection_rate: f64,
    pub mean_rounds: f64,
    /// `P[X <= T - 1]` under Binomial(paths, r).
    pub predicted_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub master_seed: u64,
    pub k: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub paths: u64,
    pub r: f64,
    pub reduced_palette: Option<ReducedPalette>,
    /// The coloring of `C*` and of `s` is forced, not sampled.
    pub non_algorithmic: bool,
    pub rows: Vec<SweepRow>,
    /// Largest `|rate - predicted|` over the grid.
    pub max_abs_deviation: f64,
}

/// Every cap of `grid` uses the same trial seeds, so rows differ only in `T`.
pub fn sweep(
    inst: &GkInstance,
    grid: &[Option<u64>],
    trials: u64,
    seed: u64,
    reduced: Option<ReducedPalette>,
    jobs: usize,
) -> Result<(Vec<SweepTrialRow>, SweepReport)> {
    let paths = paths_per_source(inst, inst.sources[0]) as u64;
    let r = path_probability(inst, reduced);
    let mut per_trial = Vec::new();
    let mut rows = Vec::new();
    for &cap in grid {
        let samples = run_trials(trials, jobs, |t| Ok(sweep_trial(inst, cap, t, seed, reduced)?))?;
        let detections = samples.iter().filter(|s| s.detected).count() as u64;
        let rounds: u64 = samples.iter().map(|s| s.rounds).sum();
        let denom = trials.max(1) as f64;
        rows.push(SweepRow {
            schema_version: SCHEMA_VERSION,
            threshold: cap,
            master_seed: seed,
            trials,
            detections,
            detection_rate: detections as f64 / denom,
            mean_rounds: rounds as f64 / denom,
            predicted_rate: sweep_prediction(paths, r, cap)?,
        });
        per_trial.extend(samples.into_iter().map(|s| SweepTrialRow {
            schema_version: SCHEMA_VERSION,
            threshold: cap,
            trial: s.trial,
            seed: s.seed,
            source: s.source,
            x: s.x,
            detected: s.detected,
            rounds: s.rounds,
        }));
    }
    let max_abs_deviation = rows.iter().map(|r| (r.detection_rate - r.predicted_rate).abs()).fold(0.0, f64::max);
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        master_seed: seed,
        k: inst.k,
        size: inst.size,
        paths,
        r,
        reduced_palette: reduced,
        non_algorithmic: true,
        rows,
        max_abs_deviation,
    };
    Ok((per_trial, report))
}

/// One bad-set computation, flattened for CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetRow {
    pub schema_version: u32,
    pub instance: u64,
    pub seed: u64,
    pub deg_u0: usize,
    pub candidates: usize,
    pub b1: usize,
    pub b2: usize,
    pub b3: usize,
    pub b4: usize,
    pub b5: usize,
    pub b6: usize,
    pub b8: usize,
    pub b9: usize,
    pub b10: usize,
    pub b11: usize,
    pub b12: usize,
    pub b13: usize,
    pub forward_union: usize,
    /// `(35/72) deg(u_0) + 3`.
    pub union_bound: f64,
    pub good_neighbors: usize,
    pub good_fraction: f64,
    pub preconditions: bool,
    pub bounds_hold: bool,
}

impl BadSetRow {
    pub fn new(instance: u64, seed: u64, r: &BadSetReport) -> Self {
        let b = |i| r.set(i).len();
        BadSetRow {
            schema_version: SCHEMA_VERSION,
            instance,
            seed,
            deg_u0: r.deg_u0,
            candidates: r.candidates.len(),
            b1: b(1),
            b2: b(2),
            b3: b(3),
            b4: b(4),
            b5: b(5),
            b6: b(6),
            b8: b(8),
            b9: b(9),
            b10: b(10),
            b11: b(11),
            b12: b(12),
            b13: b(13),
            forward_union: r.forward_union(),
            union_bound: 35.0 / 72.0 * r.deg_u0 as f64 + 3.0,
            good_neighbors: r.good_neighbors(),
            good_fraction: r.good_fraction(),
            preconditions: r.preconditions,
            bounds_hold: r.all_bounds_hold() && r.good_bound_holds(),
        }
    }
}

/// Bad sets of `count` random fan instances; instance `i` uses arms drawn
/// from `derive_seed(seed, i)`.
pub fn bad_sets_random(
    count: u64,
    seed: u64,
    max_arms: usize,
    max_paths: usize,
    limits: &OracleLimits,
    jobs: usize,
) -> Result<Vec<BadSetRow>> {
    run_trials(count, jobs, |i| {
        let s = derive_seed(seed, i);
        let arms: Vec<FanArm> = random_fan_arms(s, max_arms, max_paths);
        let inst = fan_instance(&arms)?;
        let report = compute_bad_sets(&inst.graph, &inst.colors, &inst.cycle, BAD_SET_F, limits)?;
        Ok(BadSetRow::new(i, s, &report))
    })
}

/// Bad sets of a given graph and labeled 14-cycle under `count` colorings
/// that fix `u_j <- j` and color the rest at random (gate color included).
pub fn bad_sets_on_graph(
    g: &Graph,
    cycle: &Cycle,
    count: u64,
    seed: u64,
    limits: &OracleLimits,
    jobs: usize,
) -> Result<Vec<BadSetRow>> {
    run_trials(count, jobs, |i| {
        let s = derive_seed(seed, i);
        let mut colors = tcycle_core::coloring::assign_colors(g, 7, true, s)?;
        colors.force_cycle(cycle.nodes())?;
        let report = compute_bad_sets(g, &colors, cycle, BAD_SET_F, limits)?;
        Ok(BadSetRow::new(i, s, &report))
    })
}

/// Writes `rows` as CSV with a header.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}
