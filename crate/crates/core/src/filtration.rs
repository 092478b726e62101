//! Degree-Rips combinatorics at a fixed scale and density.
//!
//! At scale `s` and density `k`, a point is a vertex when it has at least
//! `k` other points within distance `s`. Clusters are the connected
//! components of the graph on those vertices with an edge whenever two
//! vertices are within `s` of each other; only this 1-skeleton matters for
//! path components.

use serde::Serialize;

use crate::metric::MetricSpace;
use crate::union_find::DisjointSet;

/// Sorted event scales at which the degree-Rips system can change:
/// zero followed by the distinct pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ParameterGrid(Vec<f64>);

impl ParameterGrid {
    pub fn new(space: &MetricSpace) -> Self {
        Self::snapped(space, 0.0)
    }

    /// Grid in which runs of consecutive event values closer than `eps`
    /// collapse onto the largest value of the run. Zero always
    /// stays a separate event. `eps = 0` keeps every distinct distance.
    pub fn snapped(space: &MetricSpace, eps: f64) -> Self {
        let mut values: Vec<f64> = space.pair_distances().collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut grid = vec![0.0];
        let mut run_end: Option<f64> = None;
        for v in values {
            match run_end {
                Some(last) if v - last < eps => {}
                Some(last) => grid.push(last),
                None => {}
            }
            run_end = Some(v);
        }
        grid.extend(run_end);
        Self(grid)
    }

    /// Builds a grid from explicit values, which must be strictly
    /// increasing and start at zero.
    pub fn from_values(values: Vec<f64>) -> Option<Self> {
        let valid = values.first() == Some(&0.0)
            && values.windows(2).all(|w| w[0] < w[1])
            && values.iter().all(|v| v.is_finite());
        valid.then_some(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Index of the largest grid value `<= s`, or `None` when `s < 0`.
    pub fn snap_index(&self, s: f64) -> Option<usize> {
        self.0.partition_point(|&t| t <= s).checked_sub(1)
    }
}

/// The points with at least `k` distinct neighbours within `s`.
pub fn vertex_set(space: &MetricSpace, s: f64, k: usize) -> Vec<usize> {
    (0..space.len())
        .filter(|&x| {
            k == 0
                || space
                    .row(x)
                    .iter()
                    .enumerate()
                    .filter(|&(y, &d)| y != x && d <= s)
                    .nth(k - 1)
                    .is_some()
        })
        .collect()
}

/// Connected components of the degree-Rips 1-skeleton at `(s, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPartition {
    pub scale: f64,
    pub k: usize,
    /// Blocks with sorted members, ordered by their minimum member.
    pub blocks: Vec<Vec<usize>>,
}

impl ComponentPartition {
    /// Index of the block holding `point`, if it is a vertex.
    pub fn block_of(&self, point: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&point).is_ok())
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

pub fn components(space: &MetricSpace, s: f64, k: usize) -> ComponentPartition {
    let vertices = vertex_set(space, s, k);
    let mut dsu = DisjointSet::new(space.len());
    for (i, &a) in vertices.iter().enumerate() {
        for &b in &vertices[i + 1..] {
            if space.dist(a, b) <= s {
                dsu.union(a, b);
            }
        }
    }
    ComponentPartition {
        scale: s,
        k,
        blocks: group_by_root(&mut dsu, &vertices),
    }
}

/// Groups `vertices` (sorted) by their union-find root; blocks come out
/// ordered by minimum member with members sorted.
pub(crate) fn group_by_root(dsu: &mut DisjointSet, vertices: &[usize]) -> Vec<Vec<usize>> {
    let mut slot: Vec<Option<usize>> = vec![None; dsu_len(vertices)];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in vertices {
        let root = dsu.find(v);
        match slot[root] {
            Some(b) => blocks[b].push(v),
            None => {
                slot[root] = Some(blocks.len());
                blocks.push(vec![v]);
            }
        }
    }
    blocks
}

fn dsu_len(vertices: &[usize]) -> usize {
    vertices.last().map_or(0, |&v| v + 1)
}
