//! The cluster hierarchy `Γ_k(X)` as a forest of segments.
//!
//! A node of the hierarchy is a pair `(s, [x])` of a scale and a cluster at
//! that scale. Between consecutive grid values nothing changes, and a
//! cluster often keeps the same member set across many grid values, so the
//! forest stores one [`Segment`] per maximal run of nodes sharing a member
//! set. A [`NodeRef`] names a node by its (real) scale and the segment alive
//! there.
//!
//! `(s, [x]) ≤ (t, [y])` holds iff `s ≤ t` and `[x]_s ⊆ [y]_t`. Following
//! successor links from a segment visits exactly the clusters that contain
//! it at later scales.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filtration::{group_by_root, ParameterGrid};
use crate::metric::MetricSpace;
use crate::union_find::DisjointSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HierarchyError {
    #[error("point {point} is not a vertex at scale {s}")]
    NotAVertex { point: usize, s: f64 },
    #[error("scale {s} lies below the first event")]
    BelowFirstEvent { s: f64 },
    #[error("point {point} out of range for a space of {len} points")]
    PointOutOfRange { point: usize, len: usize },
    #[error("nodes belong to different hierarchies")]
    ForestMismatch,
    #[error("segments {left} and {right} never join")]
    NoCommonUpperBound { left: usize, right: usize },
    #[error("node ({s}, segment {segment}) does not exist in this hierarchy")]
    InvalidNode { s: f64, segment: usize },
    #[error("invalid hierarchy document: {0}")]
    InvalidDocument(String),
}

pub type Result<T> = std::result::Result<T, HierarchyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SegmentId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ForestId(u64);

impl ForestId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(0);
        Self(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// A maximal run of hierarchy nodes sharing one member set.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub id: SegmentId,
    /// Sorted point indices.
    pub members: Vec<usize>,
    pub birth: f64,
    /// First grid value at which the member set has changed; `None` for
    /// a terminal segment.
    pub death: Option<f64>,
    pub antecedents: Vec<SegmentId>,
    pub successor: Option<SegmentId>,
    birth_index: usize,
    death_index: Option<usize>,
}

impl Segment {
    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    pub fn birth_index(&self) -> usize {
        self.birth_index
    }

    pub fn death_index(&self) -> Option<usize> {
        self.death_index
    }

    pub fn is_terminal(&self) -> bool {
        self.successor.is_none()
    }
}

/// A node `(s, [x])` of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRef {
    s: f64,
    segment: SegmentId,
    forest: ForestId,
}

impl NodeRef {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn segment(&self) -> SegmentId {
        self.segment
    }

    pub fn forest(&self) -> ForestId {
        self.forest
    }
}

#[derive(Debug, Clone)]
pub struct SegmentForest {
    id: ForestId,
    space: MetricSpace,
    k: usize,
    grid: ParameterGrid,
    segments: Vec<Segment>,
    /// Per grid index, `(representative, segment)` for every live segment,
    /// ordered by representative.
    alive: Vec<Vec<(usize, SegmentId)>>,
    first_segment: Vec<Option<SegmentId>>,
}

impl PartialEq for SegmentForest {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.grid == other.grid
            && self.segments == other.segments
            && self.space == other.space
    }
}

impl SegmentForest {
    pub fn build(space: &MetricSpace, k: usize) -> Self {
        Self::build_on_grid(space, k, ParameterGrid::new(space))
    }

    /// Sweeps `grid` once, growing a union-find over edges and vertices as
    /// they appear, and opens a segment whenever a component's member set
    /// differs from every component of the previous grid value.
    pub fn build_on_grid(space: &MetricSpace, k: usize, grid: ParameterGrid) -> Self {
        let n = space.len();
        let mut edges: Vec<(f64, usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .map(|(a, b)| (space.dist(a, b), a, b))
            .collect();
        edges.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut degree = vec![0usize; n];
        let mut is_vertex = vec![false; n];
        let mut vertices: Vec<usize> = Vec::new();
        let mut dsu = DisjointSet::new(n);
        let mut next_edge = 0;

        let mut segments: Vec<Segment> = Vec::new();
        let mut alive = Vec::with_capacity(grid.len());
        let mut first_segment = vec![None; n];
        let mut current: Vec<Option<SegmentId>> = vec![None; n];

        for (i, &t) in grid.values().iter().enumerate() {
            let start = next_edge;
            while next_edge < edges.len() && edges[next_edge].0 <= t {
                let (_, a, b) = edges[next_edge];
                degree[a] += 1;
                degree[b] += 1;
                next_edge += 1;
            }
            let fresh: Vec<usize> = (0..n)
                .filter(|&x| !is_vertex[x] && degree[x] >= k)
                .collect();
            for &x in &fresh {
                is_vertex[x] = true;
            }
            for &(_, a, b) in &edges[start..next_edge] {
                if is_vertex[a] && is_vertex[b] {
                    dsu.union(a, b);
                }
            }
            for &x in &fresh {
                for y in (0..n).filter(|&y| y != x && is_vertex[y] && space.dist(x, y) <= t) {
                    dsu.union(x, y);
                }
            }
            if !fresh.is_empty() {
                vertices.extend(&fresh);
                vertices.sort_unstable();
            }

            let previous = current.clone();
            let mut live = Vec::new();
            for block in group_by_root(&mut dsu, &vertices) {
                let mut antecedents: Vec<SegmentId> =
                    block.iter().filter_map(|&p| previous[p]).collect();
                antecedents.sort_unstable();
                antecedents.dedup();
                let id = match antecedents[..] {
                    [only] if segments[only.0].members.len() == block.len() => only,
                    _ => {
                        let id = SegmentId(segments.len());
                        for a in &antecedents {
                            let seg = &mut segments[a.0];
                            seg.death = Some(t);
                            seg.death_index = Some(i);
                            seg.successor = Some(id);
                        }
                        for &p in &block {
                            first_segment[p].get_or_insert(id);
                        }
                        segments.push(Segment {
                            id,
                            members: block.clone(),
                            birth: t,
                            death: None,
                            antecedents,
                            successor: None,
                            birth_index: i,
                            death_index: None,
                        });
                        id
                    }
                };
                for &p in &block {
                    current[p] = Some(id);
                }
                live.push((block[0], id));
            }
            alive.push(live);
        }

        Self {
            id: ForestId::fresh(),
            space: space.clone(),
            k,
            grid,
            segments,
            alive,
            first_segment,
        }
    }

    pub fn id(&self) -> ForestId {
        self.id
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id.0]
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `(representative, segment)` pairs alive at grid index `i`.
    pub fn alive_at(&self, i: usize) -> &[(usize, SegmentId)] {
        &self.alive[i]
    }

    pub fn segment_for_representative(&self, grid_index: usize, rep: usize) -> Option<SegmentId> {
        let live = self.alive.get(grid_index)?;
        live.binary_search_by_key(&rep, |&(r, _)| r)
            .ok()
            .map(|pos| live[pos].1)
    }

    /// Member sets of the clusters at grid index `i`, ordered by
    /// representative.
    pub fn partition_at(&self, i: usize) -> Vec<Vec<usize>> {
        self.alive[i]
            .iter()
            .map(|&(_, id)| self.segment(id).members.clone())
            .collect()
    }

    pub fn terminal_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.is_terminal())
    }

    fn node(&self, s: f64, segment: SegmentId) -> NodeRef {
        NodeRef {
            s,
            segment,
            forest: self.id,
        }
    }

    /// The node at scale `s` whose cluster holds `point`.
    pub fn node_at(&self, s: f64, point: usize) -> Result<NodeRef> {
        if point >= self.space.len() {
            return Err(HierarchyError::PointOutOfRange {
                point,
                len: self.space.len(),
            });
        }
        let index = self
            .grid
            .snap_index(s)
            .ok_or(HierarchyError::BelowFirstEvent { s })?;
        let first = self.first_segment[point].ok_or(HierarchyError::NotAVertex { point, s })?;
        if self.segment(first).birth_index > index {
            return Err(HierarchyError::NotAVertex { point, s });
        }
        Ok(self.node(s, self.chain_at(first, index)))
    }

    /// The node `(s, segment)`, checking that the segment is alive at `s`.
    pub fn node_in_segment(&self, s: f64, segment: SegmentId) -> Result<NodeRef> {
        let invalid = HierarchyError::InvalidNode {
            s,
            segment: segment.0,
        };
        let seg = self.segments.get(segment.0).ok_or(invalid.clone())?;
        let index = self.grid.snap_index(s).ok_or(invalid.clone())?;
        let alive = seg.birth_index <= index && seg.death_index.is_none_or(|d| index < d);
        if alive {
            Ok(self.node(s, segment))
        } else {
            Err(invalid)
        }
    }

    /// The node at scale `s` on the successor chain of `node`; `s` must not
    /// be smaller than `node.s()`.
    pub fn advance(&self, node: NodeRef, s: f64) -> Result<NodeRef> {
        self.check(&node)?;
        debug_assert!(s >= node.s);
        let index = self
            .grid
            .snap_index(s)
            .ok_or(HierarchyError::BelowFirstEvent { s })?;
        Ok(self.node(s, self.chain_at(node.segment, index)))
    }

    fn chain_at(&self, mut id: SegmentId, index: usize) -> SegmentId {
        while let Some(d) = self.segment(id).death_index {
            if d > index {
                break;
            }
            id = self
                .segment(id)
                .successor
                .expect("dead segment has a successor");
        }
        id
    }

    fn check(&self, node: &NodeRef) -> Result<()> {
        if node.forest != self.id {
            Err(HierarchyError::ForestMismatch)
        } else {
            Ok(())
        }
    }

    pub fn members(&self, node: &NodeRef) -> &[usize] {
        &self.segment(node.segment).members
    }

    pub fn leq(&self, a: &NodeRef, b: &NodeRef) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.s <= b.s && is_subset(self.members(a), self.members(b)))
    }

    /// Least upper bound: the smallest scale `u ≥ max(a.s, b.s)` at which
    /// both clusters have joined, with the cluster they form there.
    pub fn lub(&self, a: &NodeRef, b: &NodeRef) -> Result<NodeRef> {
        let top = a.s.max(b.s);
        let mut left = self.advance(*a, top)?.segment;
        let mut right = self.advance(*b, top)?.segment;
        let mut u = top;
        while left != right {
            let (dl, dr) = (self.segment(left).death, self.segment(right).death);
            let next = match (dl, dr) {
                (None, None) => {
                    return Err(HierarchyError::NoCommonUpperBound {
                        left: left.0,
                        right: right.0,
                    })
                }
                (Some(x), None) | (None, Some(x)) => x,
                (Some(x), Some(y)) => x.min(y),
            };
            if dl == Some(next) {
                left = self
                    .segment(left)
                    .successor
                    .expect("dead segment has a successor");
            }
            if dr == Some(next) {
                right = self
                    .segment(right)
                    .successor
                    .expect("dead segment has a successor");
            }
            u = next;
        }
        Ok(self.node(u, left))
    }

    pub fn to_doc(&self) -> HierarchyDoc {
        HierarchyDoc {
            k: self.k,
            grid: self.grid.values().to_vec(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDoc {
                    id: s.id.0,
                    members: s.members.clone(),
                    birth: s.birth,
                    death: s.death,
                    antecedents: s.antecedents.iter().map(|a| a.0).collect(),
                    successor: s.successor.map(|a| a.0),
                    terminal: s.is_terminal(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("hierarchy serializes")
    }

    /// Rebuilds a forest over `space` from an exported document, checking
    /// its internal consistency.
    pub fn from_doc(space: &MetricSpace, doc: &HierarchyDoc) -> Result<Self> {
        let bad = |m: String| HierarchyError::InvalidDocument(m);
        let grid = ParameterGrid::from_values(doc.grid.clone())
            .ok_or_else(|| bad("grid is not strictly increasing from 0".into()))?;
        let position = |v: f64| {
            grid.values()
                .binary_search_by(|t| t.total_cmp(&v))
                .map_err(|_| bad(format!("{v} is not a grid value")))
        };
        let n = space.len();
        let count = doc.segments.len();
        let mut segments = Vec::with_capacity(count);
        for (i, s) in doc.segments.iter().enumerate() {
            if s.id != i {
                return Err(bad(format!("segment {i} carries id {}", s.id)));
            }
            if s.members.is_empty()
                || s.members.windows(2).any(|w| w[0] >= w[1])
                || s.members.iter().any(|&p| p >= n)
            {
                return Err(bad(format!("segment {i} has malformed members")));
            }
            if s.terminal != s.successor.is_none() {
                return Err(bad(format!("segment {i} has inconsistent terminal flag")));
            }
            let link_ok = |&j: &usize| j < count;
            if !s.antecedents.iter().all(link_ok) || !s.successor.iter().all(link_ok) {
                return Err(bad(format!("segment {i} links out of range")));
            }
            segments.push(Segment {
                id: SegmentId(i),
                members: s.members.clone(),
                birth: s.birth,
                death: s.death,
                antecedents: s.antecedents.iter().map(|&a| SegmentId(a)).collect(),
                successor: s.successor.map(SegmentId),
                birth_index: position(s.birth)?,
                death_index: s.death.map(position).transpose()?,
            });
        }
        for s in &segments {
            if s.death.is_some() != s.successor.is_some() {
                return Err(bad(format!("segment {} has inconsistent death", s.id.0)));
            }
            if let Some(next) = s.successor {
                let next = &segments[next.0];
                if !next.antecedents.contains(&s.id) || Some(next.birth) != s.death {
                    return Err(bad(format!(
                        "segment {} has inconsistent successor",
                        s.id.0
                    )));
                }
            }
            for a in &s.antecedents {
                if segments[a.0].successor != Some(s.id) {
                    return Err(bad(format!(
                        "segment {} has inconsistent antecedents",
                        s.id.0
                    )));
                }
            }
        }

        let mut alive = vec![Vec::new(); grid.len()];
        let mut first_segment = vec![None; n];
        for s in &segments {
            let end = s.death_index.unwrap_or(grid.len());
            for live in &mut alive[s.birth_index..end] {
                live.push((s.representative(), s.id));
            }
            for &p in &s.members {
                match first_segment[p] {
                    Some(SegmentId(f)) if segments[f].birth_index <= s.birth_index => {}
                    _ => first_segment[p] = Some(s.id),
                }
            }
        }
        for live in &mut alive {
            live.sort_unstable();
        }
        Ok(Self {
            id: ForestId::fresh(),
            space: space.clone(),
            k: doc.k,
            grid,
            segments,
            alive,
            first_segment,
        })
    }

    pub fn from_json(space: &MetricSpace, json: &str) -> Result<Self> {
        let doc: HierarchyDoc = serde_json::from_str(json)
            .map_err(|e| HierarchyError::InvalidDocument(e.to_string()))?;
        Self::from_doc(space, &doc)
    }
}

/// Serialized form of a [`SegmentForest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyDoc {
    pub k: usize,
    pub grid: Vec<f64>,
    pub segments: Vec<SegmentDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub id: usize,
    pub members: Vec<usize>,
    pub birth: f64,
    pub death: Option<f64>,
    pub antecedents: Vec<usize>,
    pub successor: Option<usize>,
    /// Whether the segment lasts through every larger scale.
    pub terminal: bool,
}

/// Both slices sorted ascending.
pub(crate) fn is_subset(small: &[usize], large: &[usize]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
