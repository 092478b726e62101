//! Finite metric spaces, isometric inclusions and configuration tuples.
//!
//! Distances are stored as a dense `n × n` table of `f64`. Every constructor
//! validates the metric axioms, so downstream code can assume symmetry,
//! positivity off the diagonal and (for tables supplied by the caller) the
//! triangle inequality.

mod hausdorff;
pub mod io;

use std::fmt;

use thiserror::Error;

pub use hausdorff::{hausdorff_config, DEFAULT_TUPLE_BUDGET};

/// Relative slack allowed when validating the triangle inequality of a
/// user-supplied table, so that decimals printed from floating point data
/// are not rejected for rounding noise.
const TRIANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("points {first} and {second} are identical")]
    DuplicatePoint { first: usize, second: usize },
    #[error("distance between {a} and {b} is negative ({value})")]
    NegativeDistance { a: usize, b: usize, value: f64 },
    #[error("distance between {a} and {b} is not finite")]
    NonFiniteDistance { a: usize, b: usize },
    #[error("distance between distinct points {a} and {b} is zero")]
    ZeroOffDiagonal { a: usize, b: usize },
    #[error("triangle inequality fails on ({a}, {b}, {c}): d({a},{c}) = {direct} > {via} = d({a},{b}) + d({b},{c})")]
    TriangleViolation {
        a: usize,
        b: usize,
        c: usize,
        direct: f64,
        via: f64,
    },
    #[error("row {row} of the distance table has {found} entries, expected {expected}")]
    RaggedTable {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("configuration tuples have different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("configuration tuple repeats point {index}")]
    RepeatedTupleEntry { index: usize },
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("embedding has {found} entries but the subspace has {expected} points")]
    EmbeddingLength { expected: usize, found: usize },
    #[error("embedding sends points {a} and {b} to the same point")]
    NotInjective { a: usize, b: usize },
    #[error(
        "embedding is not isometric on ({a}, {b}): {sub} in the subspace, {sup} in the superspace"
    )]
    NotIsometric {
        a: usize,
        b: usize,
        sub: f64,
        sup: f64,
    },
    #[error("no tuples of {tuple_len} distinct points in a space of {points} points")]
    EmptyConfigSpace { tuple_len: usize, points: usize },
    #[error("Hausdorff computation exceeded its budget of {budget} tuple evaluations")]
    BudgetExceeded { budget: u64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, MetricError>;

/// Coordinate metric used when a space is built from a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricKind {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl MetricKind {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            MetricKind::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            MetricKind::Manhattan => diffs.sum(),
            MetricKind::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Manhattan => "manhattan",
            MetricKind::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(MetricKind::Euclidean),
            "manhattan" => Ok(MetricKind::Manhattan),
            "chebyshev" => Ok(MetricKind::Chebyshev),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// A validated finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl MetricSpace {
    /// Builds a space from coordinate vectors, labelling points by index.
    pub fn from_points(points: &[Vec<f64>], kind: MetricKind, dedup: bool) -> Result<Self> {
        let labels = (0..points.len()).map(|i| i.to_string()).collect();
        Self::from_labeled_points(labels, points, kind, dedup)
    }

    /// Builds a space from coordinate vectors. With `dedup` set, repeated
    /// vectors collapse onto their first occurrence; otherwise they are
    /// rejected.
    pub fn from_labeled_points(
        labels: Vec<String>,
        points: &[Vec<f64>],
        kind: MetricKind,
        dedup: bool,
    ) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(MetricError::LabelCount {
                expected: points.len(),
                found: labels.len(),
            });
        }
        if let Some(first) = points.first() {
            let dim = first.len();
            if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
                return Err(MetricError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
        }

        let mut kept: Vec<usize> = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if let Some(&j) = kept.iter().find(|&&j| points[j] == *p) {
                if !dedup {
                    return Err(MetricError::DuplicatePoint {
                        first: j,
                        second: i,
                    });
                }
                continue;
            }
            kept.push(i);
        }

        let n = kept.len();
        let mut dist = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let d = kind.eval(&points[kept[a]], &points[kept[b]]);
                dist[a * n + b] = d;
                dist[b * n + a] = d;
            }
        }
        let labels = kept.iter().map(|&i| labels[i].clone()).collect();
        let space = Self { labels, dist, n };
        space.check_entries()?;
        Ok(space)
    }

    /// Builds a space from the strict lower triangle of its distance table:
    /// `rows[i]` holds the distances from point `i + 1` to points `0..=i`.
    /// An empty table gives the empty space.
    pub fn from_lower_triangle(rows: &[Vec<f64>]) -> Result<Self> {
        let n = if rows.is_empty() { 0 } else { rows.len() + 1 };
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_lower_triangle_labeled(labels, rows)
    }

    pub(crate) fn from_lower_triangle_labeled(
        labels: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let n = labels.len();
        if n.saturating_sub(1) != rows.len() {
            return Err(MetricError::LabelCount {
                expected: rows.len() + usize::from(!rows.is_empty()),
                found: n,
            });
        }
        let mut dist = vec![0.0; n * n];
        for (r, row) in rows.iter().enumerate() {
            let i = r + 1;
            if row.len() != i {
                return Err(MetricError::RaggedTable {
                    row: i,
                    expected: i,
                    found: row.len(),
                });
            }
            for (j, &d) in row.iter().enumerate() {
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let space = Self { labels, dist, n };
        space.check_entries()?;
        space.check_triangle()?;
        Ok(space)
    }

    fn check_entries(&self) -> Result<()> {
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let d = self.dist(a, b);
                if !d.is_finite() {
                    return Err(MetricError::NonFiniteDistance { a, b });
                }
                if d < 0.0 {
                    return Err(MetricError::NegativeDistance { a, b, value: d });
                }
                if d == 0.0 {
                    return Err(MetricError::ZeroOffDiagonal { a, b });
                }
            }
        }
        Ok(())
    }

    fn check_triangle(&self) -> Result<()> {
        for a in 0..self.n {
            for c in (a + 1)..self.n {
                let direct = self.dist(a, c);
                for b in (0..self.n).filter(|&b| b != a && b != c) {
                    let via = self.dist(a, b) + self.dist(b, c);
                    if direct > via * (1.0 + TRIANGLE_SLACK) {
                        return Err(MetricError::TriangleViolation {
                            a,
                            b,
                            c,
                            direct,
                            via,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Distances from point `a` to every point, in index order.
    pub fn row(&self, a: usize) -> &[f64] {
        &self.dist[a * self.n..(a + 1) * self.n]
    }

    /// All off-diagonal distances `d(a, b)` with `a < b`.
    pub fn pair_distances(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |a| ((a + 1)..self.n).map(move |b| self.dist(a, b)))
    }
}

/// An ordered tuple of pairwise distinct point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfigTuple(Vec<usize>);

impl ConfigTuple {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        for (i, a) in indices.iter().enumerate() {
            if indices[..i].contains(a) {
                return Err(MetricError::RepeatedTupleEntry { index: *a });
            }
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Max-product distance between two tuples of the same length:
/// the largest coordinate-wise distance.
pub fn config_distance(a: &ConfigTuple, b: &ConfigTuple, space: &MetricSpace) -> Result<f64> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let len = space.len();
    a.0.iter().zip(&b.0).try_fold(0.0_f64, |acc, (&u, &v)| {
        for index in [u, v] {
            if index >= len {
                return Err(MetricError::IndexOutOfRange { index, len });
            }
        }
        Ok(acc.max(space.dist(u, v)))
    })
}

/// An isometric embedding `X → Y` of finite metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Inclusion {
    sub: MetricSpace,
    sup: MetricSpace,
    embed: Vec<usize>,
}

impl Inclusion {
    pub fn new(sub: MetricSpace, sup: MetricSpace, embed: Vec<usize>) -> Result<Self> {
        if embed.len() != sub.len() {
            return Err(MetricError::EmbeddingLength {
                expected: sub.len(),
                found: embed.len(),
            });
        }
        let mut owner = vec![None; sup.len()];
        for (a, &image) in embed.iter().enumerate() {
            if image >= sup.len() {
                return Err(MetricError::IndexOutOfRange {
                    index: image,
                    len: sup.len(),
                });
            }
            if let Some(b) = owner[image] {
                return Err(MetricError::NotInjective { a: b, b: a });
            }
            owner[image] = Some(a);
        }
        for a in 0..sub.len() {
            for b in (a + 1)..sub.len() {
                let (d_sub, d_sup) = (sub.dist(a, b), sup.dist(embed[a], embed[b]));
                if d_sub != d_sup {
                    return Err(MetricError::NotIsometric {
                        a,
                        b,
                        sub: d_sub,
                        sup: d_sup,
                    });
                }
            }
        }
        Ok(Self { sub, sup, embed })
    }

    pub fn identity(space: MetricSpace) -> Self {
        let embed = (0..space.len()).collect();
        Self {
            sub: space.clone(),
            sup: space,
            embed,
        }
    }

    pub fn sub(&self) -> &MetricSpace {
        &self.sub
    }

    pub fn sup(&self) -> &MetricSpace {
        &self.sup
    }

    pub fn embed(&self) -> &[usize] {
        &self.embed
    }

    /// Nearest subspace point to each superspace point, ties going to the
    /// smallest subspace index. Fixes the subspace pointwise.
    pub fn nearest_projection(&self) -> Vec<usize> {
        (0..self.sup.len())
            .map(|y| {
                let row = self.sup.row(y);
                let mut best = 0;
                for x in 1..self.embed.len() {
                    if row[self.embed[x]] < row[self.embed[best]] {
                        best = x;
                    }
                }
                best
            })
            .collect()
    }
}
