//! Independent brute-force oracles and random instance generators shared
//! by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riplayer_core::hierarchy::{HierarchyError, NodeRef, SegmentForest};
use riplayer_core::metric::{Inclusion, MetricError, MetricKind, MetricSpace};

pub fn line(coords: &[f64]) -> MetricSpace {
    let points: Vec<Vec<f64>> = coords.iter().map(|&c| vec![c]).collect();
    MetricSpace::from_points(&points, MetricKind::Euclidean, false).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
        .collect()
}

pub fn random_space(rng: &mut ChaCha8Rng, max_n: usize) -> MetricSpace {
    let n = rng.gen_range(1..=max_n);
    MetricSpace::from_points(&random_points(rng, n), MetricKind::Euclidean, true).unwrap()
}

/// `X` of `n` random points and `Y` = `X` plus up to `extra` jittered copies,
/// with `X` occupying the first indices of `Y`.
pub fn random_inclusion(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Inclusion {
    let xs = random_points(rng, n);
    let mut ys = xs.clone();
    for _ in 0..rng.gen_range(0..=extra) {
        let base = &xs[rng.gen_range(0..n)];
        let p: Vec<f64> = base
            .iter()
            .map(|c| c + rng.gen_range(-0.05..0.05))
            .collect();
        if !ys.contains(&p) {
            ys.push(p);
        }
    }
    let x = MetricSpace::from_points(&xs, MetricKind::Euclidean, false).unwrap();
    let y = MetricSpace::from_points(&ys, MetricKind::Euclidean, false).unwrap();
    Inclusion::new(x, y, (0..n).collect()).unwrap()
}

/// Vertices at `(s, k)` by counting neighbours directly.
pub fn vertices(space: &MetricSpace, s: f64, k: usize) -> Vec<usize> {
    (0..space.len())
        .filter(|&a| {
            (0..space.len())
                .filter(|&b| b != a && space.dist(a, b) <= s)
                .count()
                >= k
        })
        .collect()
}

/// Connected components by breadth-first search, blocks sorted and ordered
/// by their smallest member.
pub fn bfs_components(space: &MetricSpace, s: f64, k: usize) -> Vec<Vec<usize>> {
    let vs = vertices(space, s, k);
    let mut seen = vec![false; space.len()];
    let mut blocks = Vec::new();
    for &start in &vs {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut block = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &b in &vs {
                if !seen[b] && space.dist(a, b) <= s {
                    seen[b] = true;
                    block.push(b);
                    queue.push_back(b);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// Every scale at which components can change.
pub fn all_scales(space: &MetricSpace) -> Vec<f64> {
    let mut v: Vec<f64> = std::iter::once(0.0).chain(space.pair_distances()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Least upper bound by trying every candidate scale in increasing order.
pub fn brute_lub(
    forest: &SegmentForest,
    a: &NodeRef,
    b: &NodeRef,
) -> Result<(f64, Vec<usize>), HierarchyError> {
    let space = forest.space();
    let (x, y) = (forest.members(a)[0], forest.members(b)[0]);
    let top = a.s().max(b.s());
    let candidates = std::iter::once(top).chain(all_scales(space).into_iter().filter(|&u| u > top));
    for u in candidates {
        for block in bfs_components(space, u, forest.k()) {
            if block.contains(&x) && block.contains(&y) {
                return Ok((u, block));
            }
        }
    }
    Err(HierarchyError::NoCommonUpperBound { left: 0, right: 0 })
}

/// Points as `(scale bits, members)`.
pub type PointSet = BTreeSet<(u64, Vec<usize>)>;

/// Layer and branch points straight from their definitions: a cluster at a
/// change scale is a layer point when every cluster at the previous scale
/// inside it is strictly smaller, and a branch point when it contains other
/// than exactly one earlier cluster.
pub fn definition_points(space: &MetricSpace, k: usize) -> (PointSet, PointSet) {
    let mut layers = BTreeSet::new();
    let mut branches = BTreeSet::new();
    let mut previous: Vec<Vec<usize>> = Vec::new();
    for t in all_scales(space) {
        let current = bfs_components(space, t, k);
        for block in &current {
            let inside: Vec<&Vec<usize>> = previous
                .iter()
                .filter(|p| p.iter().all(|m| block.contains(m)))
                .collect();
            if inside.iter().all(|p| p.len() < block.len()) {
                layers.insert((t.to_bits(), block.clone()));
                if inside.len() != 1 {
                    branches.insert((t.to_bits(), block.clone()));
                }
            }
        }
        previous = current;
    }
    (layers, branches)
}

fn distinct_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, len, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, len, &mut cur, &mut out);
    out
}

/// Configuration-space Hausdorff distance by the double loop over all
/// ordered tuples.
pub fn brute_hausdorff(pair: &Inclusion, k: usize) -> Result<f64, MetricError> {
    let (x, y) = (pair.sub(), pair.sup());
    if x.len() < k + 1 {
        return Err(MetricError::EmptyConfigSpace {
            tuple_len: k + 1,
            points: x.len(),
        });
    }
    let xt = distinct_tuples(x.len(), k + 1);
    let yt = distinct_tuples(y.len(), k + 1);
    let mut worst = 0.0f64;
    for u in &yt {
        let mut best = f64::INFINITY;
        for v in &xt {
            let d = u
                .iter()
                .zip(v)
                .map(|(&a, &b)| y.dist(a, pair.embed()[b]))
                .fold(0.0, f64::max);
            best = best.min(d);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}
