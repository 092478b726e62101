//! Layer points, branch points and the retractions onto them.
//!
//! A layer point is a node `(t, [x])` whose cluster is strictly larger than
//! every cluster below it at smaller scales (or has nothing below it). A
//! branch point additionally has either no antecedents or at least two
//! distinct ones just below `t`. In the segment forest both are segment
//! births: a segment opens exactly when a cluster's member set grows, and it
//! is a branch point unless it grew out of a single antecedent.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::hierarchy::{HierarchyError, NodeRef, SegmentForest, SegmentId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayerError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("least upper bound ({s}, segment {segment}) is not a layer point")]
    LubNotLayer { s: f64, segment: usize },
}

/// A segment birth `(birth, [x])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerPoint {
    node: NodeRef,
    cardinality: usize,
}

impl LayerPoint {
    fn of(forest: &SegmentForest, segment: SegmentId) -> Self {
        let seg = forest.segment(segment);
        let node = forest
            .node_in_segment(seg.birth, segment)
            .expect("a segment is alive at its birth");
        Self {
            node,
            cardinality: seg.cardinality(),
        }
    }

    pub fn node(&self) -> NodeRef {
        self.node
    }

    pub fn birth(&self) -> f64 {
        self.node.s()
    }

    pub fn segment(&self) -> SegmentId {
        self.node.segment()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

/// A layer point with zero or at least two antecedents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint(LayerPoint);

impl BranchPoint {
    pub fn layer(&self) -> LayerPoint {
        self.0
    }

    pub fn node(&self) -> NodeRef {
        self.0.node
    }

    pub fn birth(&self) -> f64 {
        self.0.birth()
    }

    pub fn segment(&self) -> SegmentId {
        self.0.segment()
    }
}

pub fn is_branch(forest: &SegmentForest, segment: SegmentId) -> bool {
    forest.segment(segment).antecedents.len() != 1
}

/// All layer points, in segment order.
pub fn layer_points(forest: &SegmentForest) -> Vec<LayerPoint> {
    forest
        .segments()
        .iter()
        .map(|s| LayerPoint::of(forest, s.id))
        .collect()
}

pub fn branch_points(forest: &SegmentForest) -> Vec<BranchPoint> {
    forest
        .segments()
        .iter()
        .filter(|s| is_branch(forest, s.id))
        .map(|s| BranchPoint(LayerPoint::of(forest, s.id)))
        .collect()
}

/// The largest layer point below `v`: the birth of `v`'s segment, which
/// has the same member set as `v`.
pub fn max_layer_below(forest: &SegmentForest, v: &NodeRef) -> Result<LayerPoint, LayerError> {
    if v.forest() != forest.id() {
        return Err(HierarchyError::ForestMismatch.into());
    }
    Ok(LayerPoint::of(forest, v.segment()))
}

/// The largest branch point below `v`, found by walking back through
/// single-antecedent births.
pub fn max_branch_below(forest: &SegmentForest, v: &NodeRef) -> Result<BranchPoint, LayerError> {
    if v.forest() != forest.id() {
        return Err(HierarchyError::ForestMismatch.into());
    }
    let mut id = v.segment();
    while let [only] = forest.segment(id).antecedents[..] {
        id = only;
    }
    Ok(BranchPoint(LayerPoint::of(forest, id)))
}

/// Least upper bound of two layer points, which is again a layer point.
pub fn lub_layer(
    forest: &SegmentForest,
    a: &LayerPoint,
    b: &LayerPoint,
) -> Result<LayerPoint, LayerError> {
    let join = forest.lub(&a.node, &b.node)?;
    let seg = forest.segment(join.segment());
    if join.s() != seg.birth {
        return Err(LayerError::LubNotLayer {
            s: join.s(),
            segment: join.segment().0,
        });
    }
    Ok(LayerPoint::of(forest, join.segment()))
}

/// Sorted distinct scales of the layer points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LayerParameters(Vec<f64>);

impl LayerParameters {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn contains(&self, t: f64) -> bool {
        self.0.binary_search_by(|v| v.total_cmp(&t)).is_ok()
    }

    /// Smallest layer parameter strictly above `t`; `None` stands for `+∞`.
    pub fn successor(&self, t: f64) -> Option<f64> {
        self.0.get(self.0.partition_point(|&v| v <= t)).copied()
    }

    /// Largest layer parameter strictly below `t`; `None` stands for `-∞`.
    pub fn predecessor(&self, t: f64) -> Option<f64> {
        self.0
            .partition_point(|&v| v < t)
            .checked_sub(1)
            .map(|i| self.0[i])
    }

    /// Whether any layer parameter lies in the half-open interval `(s, t]`.
    pub fn any_in(&self, s: f64, t: f64) -> bool {
        self.successor(s).is_some_and(|u| u <= t)
    }
}

fn distinct_sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

pub fn layer_parameters(forest: &SegmentForest) -> LayerParameters {
    LayerParameters(distinct_sorted(
        forest.segments().iter().map(|s| s.birth).collect(),
    ))
}

pub fn branch_parameters(forest: &SegmentForest) -> Vec<f64> {
    distinct_sorted(
        branch_points(forest)
            .iter()
            .map(BranchPoint::birth)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerSegmentDoc {
    pub id: usize,
    pub members: Vec<usize>,
    pub birth: f64,
    pub death: Option<f64>,
    pub antecedents: Vec<usize>,
    pub successor: Option<usize>,
    pub terminal: bool,
    pub layer: bool,
    pub branch: bool,
}

/// A layer or branch point as `(s, members)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDoc {
    pub s: f64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayersDoc {
    pub k: usize,
    pub grid: Vec<f64>,
    pub segments: Vec<LayerSegmentDoc>,
    pub layer_points: Vec<PointDoc>,
    pub branch_points: Vec<PointDoc>,
    pub layer_parameters: Vec<f64>,
    pub branch_parameters: Vec<f64>,
}

pub fn layers_doc(forest: &SegmentForest) -> LayersDoc {
    let base = forest.to_doc();
    let point = |seg: SegmentId| PointDoc {
        s: forest.segment(seg).birth,
        members: forest.segment(seg).members.clone(),
    };
    LayersDoc {
        layer_points: layer_points(forest)
            .iter()
            .map(|p| point(p.segment()))
            .collect(),
        branch_points: branch_points(forest)
            .iter()
            .map(|p| point(p.segment()))
            .collect(),
        k: base.k,
        grid: base.grid,
        segments: base
            .segments
            .into_iter()
            .map(|s| LayerSegmentDoc {
                branch: is_branch(forest, SegmentId(s.id)),
                layer: true,
                id: s.id,
                members: s.members,
                birth: s.birth,
                death: s.death,
                antecedents: s.antecedents,
                successor: s.successor,
                terminal: s.terminal,
            })
            .collect(),
        layer_parameters: layer_parameters(forest).0,
        branch_parameters: branch_parameters(forest),
    }
}

pub fn layers_json(forest: &SegmentForest) -> String {
    serde_json::to_string_pretty(&layers_doc(forest)).expect("layer document serializes")
}

/// Graphviz rendering of the layer poset. Nodes are labelled
/// `t | {members}` with point labels; branch points are double circles.
/// Edges run from each antecedent to the layer point it feeds.
pub fn layers_dot(forest: &SegmentForest) -> String {
    let space = forest.space();
    let mut out = String::new();
    writeln!(out, "digraph layers {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for seg in forest.segments() {
        let members: Vec<&str> = seg.members.iter().map(|&p| space.label(p)).collect();
        let shape = if is_branch(forest, seg.id) {
            "doublecircle"
        } else {
            "ellipse"
        };
        writeln!(
            out,
            "  s{} [label=\"{} | {{{}}}\", shape={}];",
            seg.id.0,
            seg.birth,
            members.join(",").replace('"', "\\\""),
            shape
        )
        .unwrap();
    }
    for seg in forest.segments() {
        for a in &seg.antecedents {
            writeln!(out, "  s{} -> s{};", a.0, seg.id.0).unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
