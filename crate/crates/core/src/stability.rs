//! Interleaving maps between the layer posets of an inclusion `X ⊂ Y` and
//! a checker for the inequalities they are claimed to satisfy.
//!
//! Given `r` strictly above the configuration-space Hausdorff distance,
//! three poset maps are built from the hierarchies `Γ_k(X)` and `Γ_k(Y)`:
//!
//! * `i*` sends a layer point `(s, [x])` of `X` to the largest layer point
//!   of `Y` below `(s, [x])`,
//! * `θ*` sends a layer point `(s, [y])` of `Y` to the largest layer point
//!   of `X` below `(s + 2r, [θ(y)])`, where `θ` is the nearest-point
//!   projection `Y → X`,
//! * `σ*` sends a layer point `(s, [x])` to the largest layer point below
//!   `(s + 2r, [x])` in the same hierarchy.
//!
//! [`check_all`] evaluates every claim over its full universe of instances
//! and reports violations as replayable witnesses rather than errors.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::audit::{block_bijections, grid_partitions};
use crate::filtration::{self, ParameterGrid};
use crate::hierarchy::{HierarchyError, NodeRef, SegmentForest};
use crate::layers::{
    layer_parameters, layer_points, max_layer_below, LayerError, LayerParameters, LayerPoint,
};
use crate::metric::{hausdorff_config, Inclusion, MetricError, DEFAULT_TUPLE_BUDGET};
use crate::report::{CheckResult, Side, Tally, Witness, WitnessNode};

/// Description of the tuple metric written into every report.
pub const CONFIG_METRIC_CONVENTION: &str =
    "ordered (k+1)-tuples of distinct points, max (l-infinity product) metric";
pub const THETA_RULE: &str = "nearest point of X, smallest index on ties";

/// Slack, in units of the largest distance involved, allowed when a
/// metric inequality is checked in closed form at the measured Hausdorff
/// distance; absorbs rounding in the triangle inequality of computed
/// distances.
const METRIC_SLACK: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Layer(#[from] LayerError),
    #[error("r = {r} must exceed the Hausdorff distance {hausdorff}")]
    RTooSmall { r: f64, hausdorff: f64 },
    #[error("r = {r} must be a positive finite number")]
    InvalidR { r: f64 },
    #[error("theta({point}) is not a vertex of the X hierarchy at scale {s}")]
    ThetaNotVertex { point: usize, s: f64 },
}

pub type Result<T> = std::result::Result<T, StabilityError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    /// Interleaving radius; defaults to just above the Hausdorff distance.
    pub r: Option<f64>,
    /// Event snapping for both hierarchies (see [`ParameterGrid::snapped`]).
    pub snap_eps: f64,
    pub tuple_budget: u64,
    /// Adds the hypothesis `s > r` to the `L16` check.
    pub strict_l16: bool,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            r: None,
            snap_eps: 0.0,
            tuple_budget: DEFAULT_TUPLE_BUDGET,
            strict_l16: false,
        }
    }
}

/// A validated inclusion with its interleaving radius, projection and both
/// hierarchies.
#[derive(Debug, Clone)]
pub struct InclusionPair {
    inclusion: Inclusion,
    k: usize,
    r: f64,
    hausdorff: f64,
    theta: Vec<usize>,
    forest_x: SegmentForest,
    forest_y: SegmentForest,
    layers_x: Vec<LayerPoint>,
    layers_y: Vec<LayerPoint>,
    params_x: LayerParameters,
    params_y: LayerParameters,
    strict_l16: bool,
}

/// The default radius used when none is supplied.
pub fn default_radius(hausdorff: f64) -> f64 {
    hausdorff * (1.0 + 1e-9) + 1e-12
}

pub fn make_pair(inclusion: Inclusion, k: usize, options: PairOptions) -> Result<InclusionPair> {
    let hausdorff = hausdorff_config(&inclusion, k, options.tuple_budget)?;
    let r = match options.r {
        None => default_radius(hausdorff),
        Some(r) if !(r.is_finite() && r > 0.0) => return Err(StabilityError::InvalidR { r }),
        Some(r) if r <= hausdorff => return Err(StabilityError::RTooSmall { r, hausdorff }),
        Some(r) => r,
    };
    let theta = inclusion.nearest_projection();
    let build = |space| {
        let grid = ParameterGrid::snapped(space, options.snap_eps);
        SegmentForest::build_on_grid(space, k, grid)
    };
    let forest_x = build(inclusion.sub());
    let forest_y = build(inclusion.sup());
    Ok(InclusionPair {
        layers_x: layer_points(&forest_x),
        layers_y: layer_points(&forest_y),
        params_x: layer_parameters(&forest_x),
        params_y: layer_parameters(&forest_y),
        inclusion,
        k,
        r,
        hausdorff,
        theta,
        forest_x,
        forest_y,
        strict_l16: options.strict_l16,
    })
}

impl InclusionPair {
    pub fn inclusion(&self) -> &Inclusion {
        &self.inclusion
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn hausdorff(&self) -> f64 {
        self.hausdorff
    }

    /// `θ(y)` as an index of `X`, for every index `y` of `Y`.
    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    pub fn forest_x(&self) -> &SegmentForest {
        &self.forest_x
    }

    pub fn forest_y(&self) -> &SegmentForest {
        &self.forest_y
    }

    pub fn layers_x(&self) -> &[LayerPoint] {
        &self.layers_x
    }

    pub fn layers_y(&self) -> &[LayerPoint] {
        &self.layers_y
    }

    pub fn params_x(&self) -> &LayerParameters {
        &self.params_x
    }

    pub fn params_y(&self) -> &LayerParameters {
        &self.params_y
    }

    fn shift(&self, s: f64) -> f64 {
        shift(s, self.r)
    }
}

fn shift(s: f64, r: f64) -> f64 {
    s + 2.0 * r
}

pub fn i_star(pair: &InclusionPair, p: &LayerPoint) -> Result<LayerPoint> {
    let fx = &pair.forest_x;
    let rep = fx.members(&p.node())[0];
    let node = pair
        .forest_y
        .node_at(p.birth(), pair.inclusion.embed()[rep])?;
    Ok(max_layer_below(&pair.forest_y, &node)?)
}

pub fn theta_star(pair: &InclusionPair, q: &LayerPoint) -> Result<LayerPoint> {
    let rep = pair.forest_y.members(&q.node())[0];
    theta_star_from(pair, q, rep)
}

/// `θ*` computed through an arbitrary member `y` of `q`'s cluster.
pub fn theta_star_from(pair: &InclusionPair, q: &LayerPoint, y: usize) -> Result<LayerPoint> {
    let s = pair.shift(q.birth());
    let point = pair.theta[y];
    let node = match pair.forest_x.node_at(s, point) {
        Err(HierarchyError::NotAVertex { .. }) => {
            return Err(StabilityError::ThetaNotVertex { point, s })
        }
        other => other?,
    };
    Ok(max_layer_below(&pair.forest_x, &node)?)
}

/// The node `(p.birth + 2r, [x])` on `p`'s chain.
pub fn shifted_node(forest: &SegmentForest, r: f64, p: &LayerPoint) -> Result<NodeRef> {
    Ok(forest.advance(p.node(), shift(p.birth(), r))?)
}

pub fn sigma_star(forest: &SegmentForest, r: f64, p: &LayerPoint) -> Result<LayerPoint> {
    let node = shifted_node(forest, r, p)?;
    Ok(max_layer_below(forest, &node)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub k: usize,
    pub r: f64,
    pub hausdorff: f64,
    pub x_points: usize,
    pub y_points: usize,
    pub config_metric: String,
    pub theta: String,
    pub strict_l16: bool,
}

/// `σ*(p) = (t, [x])` for a layer point `p = (s, [x])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Offset {
    pub side: Side,
    pub s: f64,
    pub members: Vec<usize>,
    pub t: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub pair: PairSummary,
    pub checks: Vec<CheckResult>,
    pub offsets: Vec<Offset>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing_ids(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.as_str())
            .collect()
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let p = &self.pair;
        writeln!(out, "# Stability report\n").unwrap();
        writeln!(out, "| field | value |\n|---|---|").unwrap();
        writeln!(out, "| k | {} |", p.k).unwrap();
        writeln!(out, "| r | {} |", p.r).unwrap();
        writeln!(out, "| hausdorff | {} |", p.hausdorff).unwrap();
        writeln!(out, "| x_points | {} |", p.x_points).unwrap();
        writeln!(out, "| y_points | {} |", p.y_points).unwrap();
        writeln!(out, "| config_metric | {} |", p.config_metric).unwrap();
        writeln!(out, "| theta | {} |", p.theta).unwrap();
        writeln!(out, "| strict_l16 | {} |", p.strict_l16).unwrap();
        writeln!(out, "\n## Checks\n").unwrap();
        writeln!(
            out,
            "| id | tested | passed | violations |\n|---|---|---|---|"
        )
        .unwrap();
        for c in &self.checks {
            writeln!(
                out,
                "| {} | {} | {} | {} |",
                c.id,
                c.tested,
                c.passed,
                c.violations()
            )
            .unwrap();
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            writeln!(out, "\n### {} witnesses\n", c.id).unwrap();
            for w in &c.witnesses {
                writeln!(out, "- {}", w.note).unwrap();
                for n in &w.nodes {
                    writeln!(
                        out,
                        "  - {} ({:?}): s = {}, members = {:?}",
                        n.role, n.side, n.s, n.members
                    )
                    .unwrap();
                }
                for (name, v) in &w.values {
                    writeln!(out, "  - {name} = {v}").unwrap();
                }
            }
        }
        writeln!(out, "\n## Offsets\n").unwrap();
        writeln!(
            out,
            "| side | s | members | t | offset |\n|---|---|---|---|---|"
        )
        .unwrap();
        for o in &self.offsets {
            writeln!(
                out,
                "| {:?} | {} | {:?} | {} | {} |",
                o.side, o.s, o.members, o.t, o.offset
            )
            .unwrap();
        }
        out
    }
}

fn merge(id: &'static str, parts: Vec<CheckResult>) -> CheckResult {
    let mut tally = Tally::new(id);
    for part in parts {
        tally.absorb(part);
    }
    tally.finish()
}

/// Evaluates every stability claim for `pair`.
pub fn check_all(pair: &InclusionPair) -> StabilityReport {
    let (fx, fy) = (&pair.forest_x, &pair.forest_y);
    let r = pair.r;
    let wx = |role: &str, node: &NodeRef| WitnessNode::new(role, Side::X, fx, node);
    let wy = |role: &str, node: &NodeRef| WitnessNode::new(role, Side::Y, fy, node);
    let holds = |forest: &SegmentForest, a: &NodeRef, b: &NodeRef| forest.leq(a, b) == Ok(true);

    // θ* i* ≤ σ* on L_k(X).
    let mut eq6 = Tally::new("Thm8-eq6");
    for p in &pair.layers_x {
        let base =
            Witness::new("theta_* i_* (p) is not below sigma_* (p)").node(wx("p", &p.node()));
        let step = i_star(pair, p).and_then(|a| Ok((a, theta_star(pair, &a)?)));
        match step {
            Ok((a, b)) => {
                let sigma = sigma_star(fx, r, p).expect("sigma stays in its forest");
                eq6.record(holds(fx, &b.node(), &sigma.node()), || {
                    base.node(wy("i_star", &a.node()))
                        .node(wx("theta_i_star", &b.node()))
                        .node(wx("sigma_star", &sigma.node()))
                });
            }
            Err(e) => eq6.fail(Witness {
                note: e.to_string(),
                ..base
            }),
        }
    }

    // i* θ* ≤ σ* on L_k(Y).
    let mut eq7 = Tally::new("Thm8-eq7");
    for q in &pair.layers_y {
        let base =
            Witness::new("i_* theta_* (q) is not below sigma_* (q)").node(wy("q", &q.node()));
        let step = theta_star(pair, q).and_then(|a| Ok((a, i_star(pair, &a)?)));
        match step {
            Ok((a, b)) => {
                let sigma = sigma_star(fy, r, q).expect("sigma stays in its forest");
                eq7.record(holds(fy, &b.node(), &sigma.node()), || {
                    base.node(wx("theta_star", &a.node()))
                        .node(wy("i_theta_star", &b.node()))
                        .node(wy("sigma_star", &sigma.node()))
                });
            }
            Err(e) => eq7.fail(Witness {
                note: e.to_string(),
                ..base
            }),
        }
    }

    // p ≤ σ*(p) ≤ (p.birth + 2r, [p]) on both sides, and the offsets.
    let mut eq8 = Tally::new("Rel-eq8");
    let mut remark9 = Tally::new("R9");
    let mut offsets = Vec::new();
    for (side, forest, layers) in [(Side::X, fx, &pair.layers_x), (Side::Y, fy, &pair.layers_y)] {
        let w = |role: &str, node: &NodeRef| WitnessNode::new(role, side, forest, node);
        for p in layers {
            let sigma = sigma_star(forest, r, p).expect("sigma stays in its forest");
            let top = shifted_node(forest, r, p).expect("shift stays in its forest");
            eq8.record(
                holds(forest, &p.node(), &sigma.node()) && holds(forest, &sigma.node(), &top),
                || {
                    Witness::new("p <= sigma_*(p) <= (s+2r, [p]) fails")
                        .node(w("p", &p.node()))
                        .node(w("sigma_star", &sigma.node()))
                        .node(w("shifted", &top))
                },
            );
            let (s, t) = (p.birth(), sigma.birth());
            remark9.record(s <= t && t <= shift(s, r), || {
                Witness::new("sigma_* offset outside [0, 2r]")
                    .node(w("p", &p.node()))
                    .value("t", t)
            });
            offsets.push(Offset {
                side,
                s,
                members: forest.members(&p.node()).to_vec(),
                t,
                offset: t - s,
            });
        }
    }

    // |d(y1, y2) - d(θ y1, θ y2)| ≤ 2 d_H.
    let (x, y) = (pair.inclusion.sub(), pair.inclusion.sup());
    let mut lemma10 = Tally::new("L10");
    for y1 in 0..y.len() {
        for y2 in (y1 + 1)..y.len() {
            let (d, t) = (y.dist(y1, y2), x.dist(pair.theta[y1], pair.theta[y2]));
            let slack = METRIC_SLACK * d.max(t);
            lemma10.record((d - t).abs() <= 2.0 * pair.hausdorff + slack, || {
                Witness::new("distance distortion under theta exceeds 2 d_H")
                    .value("y1", y1 as f64)
                    .value("y2", y2 as f64)
                    .value("d_y", d)
                    .value("d_x", t)
            });
        }
    }

    // Every event of Y lies within 2 d_H of an event of X.
    let mut cor11 = Tally::new("C11");
    let xgrid = fx.grid().values();
    for &s in fy.grid().values() {
        let pos = xgrid.partition_point(|&t| t < s);
        let nearest = [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter_map(|i| xgrid.get(i))
            .map(|&t| (t, (s - t).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let ok =
            nearest.is_some_and(|(t, gap)| gap <= 2.0 * pair.hausdorff + METRIC_SLACK * s.max(t));
        cor11.record(ok, || {
            Witness::new("Y event is far from every X event")
                .value("s", s)
                .value("nearest_x", nearest.map_or(f64::NAN, |n| n.0))
        });
    }

    let lemma12 = merge(
        "L12",
        vec![
            block_bijections(fx, &grid_partitions(fx), Side::X),
            block_bijections(fy, &grid_partitions(fy), Side::Y),
        ],
    );

    // Layer points of X with room above them: r < t < t₊ - 2r.
    let roomy = |t: f64| r < t && pair.params_x.successor(t).is_none_or(|up| t < up - 2.0 * r);

    let mut lemma13 = Tally::new("L13");
    for &t in pair.params_x.values().iter().filter(|&&t| roomy(t)) {
        let px = filtration::components(x, t, pair.k);
        let py = filtration::components(y, t, pair.k);
        let mut hit = vec![0usize; py.blocks.len()];
        let mut missing = false;
        for block in &px.blocks {
            match py.block_of(pair.inclusion.embed()[block[0]]) {
                Some(b) => hit[b] += 1,
                None => missing = true,
            }
        }
        let ok = !missing && hit.iter().all(|&h| h == 1);
        lemma13.record(ok, || {
            Witness::new("pi_0 L_t(X) -> pi_0 L_t(Y) is not a bijection")
                .value("t", t)
                .value("clusters_x", px.blocks.len() as f64)
                .value("clusters_y", py.blocks.len() as f64)
        });
    }

    let mut lemma14 = Tally::new("L14");
    let mut cor15 = Tally::new("C15");
    for p in pair.layers_x.iter().filter(|p| roomy(p.birth())) {
        let t = p.birth();
        let base = || Witness::new("").node(wx("p", &p.node()));
        match i_star(pair, p) {
            Ok(a) => {
                let s = a.birth();
                lemma14.record(t - 2.0 * r <= s && s <= t, || Witness {
                    note: "i_*(p) = (s, .) with s outside [t-2r, t]".into(),
                    ..base().node(wy("i_star", &a.node()))
                });
                match theta_star(pair, &a) {
                    Ok(b) => cor15.record(b == *p, || Witness {
                        note: "theta_* i_* (p) != p".into(),
                        ..base()
                            .node(wy("i_star", &a.node()))
                            .node(wx("theta_i_star", &b.node()))
                    }),
                    Err(e) => cor15.fail(Witness {
                        note: e.to_string(),
                        ..base()
                    }),
                }
            }
            Err(e) => {
                lemma14.fail(Witness {
                    note: e.to_string(),
                    ..base()
                });
                cor15.fail(Witness {
                    note: e.to_string(),
                    ..base()
                });
            }
        }
    }

    // θ*(s, [y]) = (t, .) with s ≤ t ≤ s + 2r.
    let theta_window = |tally: &mut Tally, q: &LayerPoint| {
        let s = q.birth();
        let base = Witness::new("").node(wy("q", &q.node()));
        match theta_star(pair, q) {
            Ok(b) => {
                let t = b.birth();
                tally.record(s <= t && t <= shift(s, r), || Witness {
                    note: "theta_*(q) = (t, .) with t outside [s, s+2r]".into(),
                    ..base
                        .node(wx("theta_star", &b.node()))
                        .value("s", s)
                        .value("t", t)
                });
            }
            Err(e) => tally.fail(Witness {
                note: e.to_string(),
                ..base
            }),
        }
    };

    let mut lemma16 = Tally::new("L16");
    for q in &pair.layers_y {
        let s = q.birth();
        let room = pair.params_y.successor(s).is_none_or(|up| s < up - 2.0 * r);
        if room && (!pair.strict_l16 || s > r) {
            theta_window(&mut lemma16, q);
        }
    }

    let mut lemma17 = Tally::new("L17");
    if pair.k == 0 {
        for q in &pair.layers_y {
            theta_window(&mut lemma17, q);
        }
        let xs = pair.params_x.values();
        for &s in pair.params_y.values() {
            let covered = xs.iter().any(|&t| t - 2.0 * r <= s && s <= t);
            lemma17.record(covered, || {
                Witness::new("Y layer parameter in no interval [t-2r, t]").value("s", s)
            });
        }
    }

    StabilityReport {
        pair: PairSummary {
            k: pair.k,
            r,
            hausdorff: pair.hausdorff,
            x_points: x.len(),
            y_points: y.len(),
            config_metric: CONFIG_METRIC_CONVENTION.into(),
            theta: THETA_RULE.into(),
            strict_l16: pair.strict_l16,
        },
        checks: vec![
            eq6.finish(),
            eq7.finish(),
            eq8.finish(),
            lemma10.finish(),
            cor11.finish(),
            lemma12,
            lemma13.finish(),
            lemma14.finish(),
            cor15.finish(),
            lemma16.finish(),
            lemma17.finish(),
            remark9.finish(),
        ],
        offsets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricKind, MetricSpace};

    fn line(coords: &[f64]) -> MetricSpace {
        let points: Vec<Vec<f64>> = coords.iter().map(|&c| vec![c]).collect();
        MetricSpace::from_points(&points, MetricKind::Euclidean, false).unwrap()
    }

    fn e3(r: Option<f64>) -> Result<InclusionPair> {
        let x = line(&[0.0, 1.0, 3.0, 7.0]);
        let y = line(&[0.0, 1.0, 3.0, 7.0, 7.2]);
        let inc = Inclusion::new(x, y, vec![0, 1, 2, 3]).unwrap();
        make_pair(
            inc,
            0,
            PairOptions {
                r,
                ..Default::default()
            },
        )
    }

    fn layer_with(
        forest: &SegmentForest,
        layers: &[LayerPoint],
        birth: f64,
        rep: usize,
    ) -> LayerPoint {
        *layers
            .iter()
            .find(|p| p.birth() == birth && forest.members(&p.node())[0] == rep)
            .unwrap()
    }

    fn describe(forest: &SegmentForest, p: &LayerPoint) -> (f64, Vec<usize>) {
        (p.birth(), forest.members(&p.node()).to_vec())
    }

    #[test]
    fn pair_construction() {
        let pair = e3(Some(0.25)).unwrap();
        assert_eq!(pair.hausdorff(), 7.2 - 7.0);
        assert_eq!(pair.theta(), &[0, 1, 2, 3, 3]);
        assert!(matches!(
            e3(Some(0.1)),
            Err(StabilityError::RTooSmall { .. })
        ));
        assert!(matches!(
            e3(Some(-1.0)),
            Err(StabilityError::InvalidR { .. })
        ));
        let default = e3(None).unwrap();
        assert!(default.r() > default.hausdorff());

        let same = make_pair(
            Inclusion::identity(line(&[0.0, 1.0, 3.0])),
            0,
            PairOptions {
                r: Some(1e-6),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(same.hausdorff(), 0.0);
        assert_eq!(same.theta(), &[0, 1, 2]);
    }

    #[test]
    fn induced_maps_on_e3() {
        let pair = e3(Some(0.25)).unwrap();
        let (fx, fy) = (pair.forest_x(), pair.forest_y());

        let p = layer_with(fx, pair.layers_x(), 1.0, 0);
        assert_eq!(describe(fy, &i_star(&pair, &p).unwrap()), (1.0, vec![0, 1]));
        let p7 = layer_with(fx, pair.layers_x(), 0.0, 3);
        assert_eq!(describe(fy, &i_star(&pair, &p7).unwrap()), (0.0, vec![3]));

        let q = layer_with(fy, pair.layers_y(), 1.0, 0);
        assert_eq!(
            describe(fx, &theta_star(&pair, &q).unwrap()),
            (1.0, vec![0, 1])
        );
        let q7 = layer_with(fy, pair.layers_y(), 7.2 - 7.0, 3);
        assert_eq!(
            describe(fx, &theta_star(&pair, &q7).unwrap()),
            (0.0, vec![3])
        );
        assert_eq!(theta_star_from(&pair, &q7, 4), theta_star(&pair, &q7));
    }

    #[test]
    fn shift_map() {
        let f0 = SegmentForest::build(&line(&[0.0, 1.0, 3.0, 7.0]), 0);
        let layers = layer_points(&f0);
        let p = layer_with(&f0, &layers, 1.0, 0);
        assert_eq!(sigma_star(&f0, 0.25, &p).unwrap(), p);
        assert_eq!(
            describe(&f0, &sigma_star(&f0, 0.6, &p).unwrap()),
            (2.0, vec![0, 1, 2])
        );
        for q in &layers {
            assert_eq!(sigma_star(&f0, 0.0, q).unwrap(), *q);
        }
    }

    #[test]
    fn e3_report_fails_exactly_lemmas_16_and_17() {
        let report = check_all(&e3(Some(0.25)).unwrap());
        assert_eq!(report.failing_ids(), vec!["L16", "L17"]);
        let l16 = report.check("L16").unwrap();
        assert_eq!(l16.witnesses.len(), 1);
        let w = &l16.witnesses[0];
        assert_eq!(w.nodes[0].side, Side::Y);
        assert_eq!(w.nodes[0].members, vec![3, 4]);
        assert_eq!(w.nodes[0].s, 7.2 - 7.0);
        assert_eq!(w.values["t"], 0.0);
        for o in &report.offsets {
            assert!(0.0 <= o.offset && o.t <= o.s + 0.5);
        }
    }

    #[test]
    fn identity_pair_passes_with_zero_offsets() {
        let pair = make_pair(
            Inclusion::identity(line(&[0.0, 1.0, 3.0, 7.0])),
            0,
            PairOptions {
                r: Some(1e-6),
                ..Default::default()
            },
        )
        .unwrap();
        let report = check_all(&pair);
        assert!(report.passed(), "{:?}", report.failing_ids());
        assert!(report.offsets.iter().all(|o| o.offset == 0.0));
    }

    #[test]
    fn lemma14_instance_with_early_merge() {
        let x = line(&[0.0, 1.0, 3.0, 7.0]);
        let y = line(&[0.0, 0.2, 1.0, 3.0, 7.0]);
        let inc = Inclusion::new(x, y, vec![0, 2, 3, 4]).unwrap();
        let pair = make_pair(
            inc,
            0,
            PairOptions {
                r: Some(0.25),
                ..Default::default()
            },
        )
        .unwrap();
        let p = layer_with(pair.forest_x(), pair.layers_x(), 1.0, 0);
        let a = i_star(&pair, &p).unwrap();
        assert_eq!(describe(pair.forest_y(), &a), (1.0 - 0.2, vec![0, 1, 2]));
        let report = check_all(&pair);
        let l14 = report.check("L14").unwrap();
        assert!(l14.passed && l14.tested > 0);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = check_all(&e3(Some(0.25)).unwrap()).to_json();
        let b = check_all(&e3(Some(0.25)).unwrap()).to_json();
        assert_eq!(a, b);
        let md = check_all(&e3(Some(0.25)).unwrap()).to_markdown();
        assert!(md.contains("| L16 | "));
        assert!(md.contains(CONFIG_METRIC_CONVENTION));
    }
}
