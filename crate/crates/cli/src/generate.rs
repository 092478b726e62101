//! Seeded random instances and the corpus run behind `generate`.
//!
//! Trial `i` draws from a ChaCha8 stream selected by `(seed, i)`, so every
//! trial is reproducible on its own and the corpus does not depend on the
//! order in which trials run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use riplayer_core::audit::{audit_layers, grid_partitions};
use riplayer_core::hierarchy::SegmentForest;
use riplayer_core::metric::{Inclusion, MetricError, MetricKind, MetricSpace};
use riplayer_core::report::{CheckResult, Side};
use riplayer_core::stability::{check_all, make_pair, PairOptions, StabilityError};
use serde::Serialize;

/// Checks reported but not expected to hold for the nearest-point
/// projection.
pub const REPORT_ONLY: [&str; 2] = ["L16", "L17"];

pub const MAX_JITTER: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub k: usize,
}

impl Instance {
    /// `n` uniform in `[2, 32]` points uniform in the unit square, `k`
    /// uniform in `[0, 3]`, and `Y` adding up to `⌈n/4⌉` copies of random
    /// points of `X`, each coordinate moved by up to [`MAX_JITTER`].
    pub fn random(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let n: usize = rng.gen_range(2..=32);
        let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let k = rng.gen_range(0..=3);
        let mut y = x.clone();
        for _ in 0..rng.gen_range(0..=n.div_ceil(4)) {
            let base = &x[rng.gen_range(0..n)];
            let p: Vec<f64> = base
                .iter()
                .map(|c| c + rng.gen_range(-MAX_JITTER..=MAX_JITTER))
                .collect();
            if !y.contains(&p) {
                y.push(p);
            }
        }
        Self { x, y, k }
    }

    pub fn inclusion(&self) -> Result<Inclusion, MetricError> {
        let x = MetricSpace::from_points(&self.x, MetricKind::Euclidean, false)?;
        let y = MetricSpace::from_points(&self.y, MetricKind::Euclidean, false)?;
        Inclusion::new(x, y, (0..self.x.len()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Count {
    pub id: String,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Why the stability checks were skipped, if they were.
    pub skipped: Option<String>,
    pub hausdorff: Option<f64>,
    pub r: Option<f64>,
    pub violations: Vec<Count>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Total {
    pub id: String,
    pub tested: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub trials: usize,
    pub checked: usize,
    pub skipped: usize,
    /// Violations of every check outside [`REPORT_ONLY`].
    pub robust_violations: usize,
    pub layer_checks: Vec<Total>,
    pub stability_checks: Vec<Total>,
    pub runs: Vec<TrialSummary>,
}

/// One trial's summary with the full check results behind it.
pub struct TrialRun {
    pub summary: TrialSummary,
    /// Single-hierarchy audit of both forests.
    pub layer: Vec<CheckResult>,
    pub stability: Vec<CheckResult>,
}

fn audit(forest: &SegmentForest, side: Side) -> Vec<CheckResult> {
    audit_layers(forest, &grid_partitions(forest), side)
}

pub fn run_trial(seed: u64, trial: usize, budget: u64, strict_l16: bool) -> TrialRun {
    let inst = Instance::random(seed, trial as u64);
    let mut summary = TrialSummary {
        trial,
        n: inst.x.len(),
        m: inst.y.len(),
        k: inst.k,
        skipped: None,
        hausdorff: None,
        r: None,
        violations: Vec::new(),
    };
    let inclusion = match inst.inclusion() {
        Ok(inc) => inc,
        Err(e) => {
            summary.skipped = Some(e.to_string());
            return TrialRun {
                summary,
                layer: Vec::new(),
                stability: Vec::new(),
            };
        }
    };
    let options = PairOptions {
        tuple_budget: budget,
        strict_l16,
        ..Default::default()
    };
    let (layer, stability) = match make_pair(inclusion.clone(), inst.k, options) {
        Ok(pair) => {
            summary.hausdorff = Some(pair.hausdorff());
            summary.r = Some(pair.r());
            let mut layer = audit(pair.forest_x(), Side::X);
            layer.extend(audit(pair.forest_y(), Side::Y));
            (layer, check_all(&pair).checks)
        }
        Err(e) => {
            let reason = match e {
                StabilityError::Metric(m) => m.to_string(),
                other => other.to_string(),
            };
            summary.skipped = Some(reason);
            let mut layer = audit(&SegmentForest::build(inclusion.sub(), inst.k), Side::X);
            layer.extend(audit(
                &SegmentForest::build(inclusion.sup(), inst.k),
                Side::Y,
            ));
            (layer, Vec::new())
        }
    };
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in layer.iter().chain(&stability).filter(|c| !c.passed) {
        *counts.entry(&c.id).or_default() += c.violations();
    }
    summary.violations = counts
        .into_iter()
        .map(|(id, violations)| Count {
            id: id.to_string(),
            violations,
        })
        .collect();
    TrialRun {
        summary,
        layer,
        stability,
    }
}

fn totals<'a>(results: impl Iterator<Item = &'a CheckResult>) -> Vec<Total> {
    let mut order: Vec<Total> = Vec::new();
    for c in results {
        match order.iter_mut().find(|t| t.id == c.id) {
            Some(t) => {
                t.tested += c.tested;
                t.violations += c.violations();
            }
            None => order.push(Total {
                id: c.id.clone(),
                tested: c.tested,
                violations: c.violations(),
            }),
        }
    }
    order
}

/// Runs `trials` trials, in parallel on at most `threads` threads, and
/// aggregates them in trial order.
pub fn run_corpus(
    seed: u64,
    trials: usize,
    budget: u64,
    strict_l16: bool,
    threads: Option<usize>,
) -> CorpusReport {
    let work = || -> Vec<TrialRun> {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(seed, t, budget, strict_l16))
            .collect()
    };
    let runs = match threads.filter(|&t| t > 0) {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let layer_checks = totals(runs.iter().flat_map(|r| &r.layer));
    let stability_checks = totals(runs.iter().flat_map(|r| &r.stability));
    let robust_violations = layer_checks
        .iter()
        .chain(
            stability_checks
                .iter()
                .filter(|t| !REPORT_ONLY.contains(&t.id.as_str())),
        )
        .map(|t| t.violations)
        .sum();
    let skipped = runs.iter().filter(|r| r.summary.skipped.is_some()).count();
    CorpusReport {
        seed,
        trials,
        checked: trials - skipped,
        skipped,
        robust_violations,
        layer_checks,
        stability_checks,
        runs: runs.into_iter().map(|r| r.summary).collect(),
    }
}

impl CorpusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("corpus report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# Corpus report\n").unwrap();
        writeln!(out, "| field | value |\n|---|---|").unwrap();
        writeln!(out, "| seed | {} |", self.seed).unwrap();
        writeln!(out, "| trials | {} |", self.trials).unwrap();
        writeln!(out, "| checked | {} |", self.checked).unwrap();
        writeln!(out, "| skipped | {} |", self.skipped).unwrap();
        writeln!(out, "| robust_violations | {} |", self.robust_violations).unwrap();
        for (title, rows) in [
            ("Layer checks", &self.layer_checks),
            ("Stability checks", &self.stability_checks),
        ] {
            writeln!(out, "\n## {title}\n").unwrap();
            writeln!(out, "| id | tested | violations |\n|---|---|---|").unwrap();
            for t in rows {
                writeln!(out, "| {} | {} | {} |", t.id, t.tested, t.violations).unwrap();
            }
        }
        writeln!(out, "\n## Runs\n").unwrap();
        writeln!(out, "| trial | n | m | k | hausdorff | r | skipped | violations |\n|---|---|---|---|---|---|---|---|")
            .unwrap();
        for s in &self.runs {
            let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
            let counts: Vec<String> = s
                .violations
                .iter()
                .map(|c| format!("{} x{}", c.id, c.violations))
                .collect();
            writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                s.trial,
                s.n,
                s.m,
                s.k,
                opt(s.hausdorff),
                opt(s.r),
                s.skipped.as_deref().unwrap_or(""),
                counts.join(", ")
            )
            .unwrap();
        }
        out
    }
}
