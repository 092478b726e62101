//! Executable checks of the structural claims about a single hierarchy:
//! branch points are layer points, the two coincide at density zero, layer
//! points are closed under joins, the max retractions behave as retractions,
//! and clusters are in bijection across scale ranges free of layer
//! parameters.
//!
//! The definition-level checks recompute partitions with
//! [`filtration::components`] rather than reading them off the forest, so
//! the forest construction is checked against an independent route.

use crate::filtration::{self, ComponentPartition};
use crate::hierarchy::{NodeRef, SegmentForest};
use crate::layers::{
    is_branch, layer_parameters, layer_points, lub_layer, max_branch_below, max_layer_below,
};
use crate::report::{CheckResult, Side, Tally, Witness, WitnessNode};

/// Component partitions at every grid value of `forest`.
pub fn grid_partitions(forest: &SegmentForest) -> Vec<ComponentPartition> {
    forest
        .grid()
        .values()
        .iter()
        .map(|&t| filtration::components(forest.space(), t, forest.k()))
        .collect()
}

fn block_index(partition: &ComponentPartition, n: usize) -> Vec<Option<usize>> {
    let mut index = vec![None; n];
    for (b, block) in partition.blocks.iter().enumerate() {
        for &p in block {
            index[p] = Some(b);
        }
    }
    index
}

/// For grid steps `t_i < t_{i+1}` with no layer parameter in
/// `(t_i, t_{i+1}]`, checks that every cluster at `t_i` lands in a different
/// cluster at `t_{i+1}` and that every cluster there is hit. Bijections
/// compose, so this covers every pair `s < t` without a layer parameter in
/// `(s, t]`.
pub fn block_bijections(
    forest: &SegmentForest,
    partitions: &[ComponentPartition],
    side: Side,
) -> CheckResult {
    let mut tally = Tally::new("L12");
    let params = layer_parameters(forest);
    let n = forest.space().len();
    let grid = forest.grid().values();
    for i in 0..grid.len().saturating_sub(1) {
        if params.any_in(grid[i], grid[i + 1]) {
            continue;
        }
        let (lower, upper) = (&partitions[i], &partitions[i + 1]);
        let upper_index = block_index(upper, n);
        let mut hit = vec![0usize; upper.blocks.len()];
        for block in &lower.blocks {
            if let Some(b) = upper_index[block[0]] {
                hit[b] += 1;
            }
        }
        let bijective = lower.blocks.len() == upper.blocks.len() && hit.iter().all(|&h| h == 1);
        tally.record(bijective, || {
            Witness::new(format!("{side:?}: cluster map is not a bijection"))
                .value("s", grid[i])
                .value("t", grid[i + 1])
                .value("clusters_s", lower.blocks.len() as f64)
                .value("clusters_t", upper.blocks.len() as f64)
        });
    }
    tally.finish()
}

/// Nodes used for the retraction checks: every live segment at every grid
/// value, and again halfway to the next grid value (or one unit past the
/// last).
pub fn sample_nodes(forest: &SegmentForest) -> Vec<NodeRef> {
    let grid = forest.grid().values();
    let mut nodes = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let mid = grid.get(i + 1).map_or(t + 1.0, |&u| t + (u - t) / 2.0);
        for &(_, seg) in forest.alive_at(i) {
            for s in [t, mid] {
                nodes.push(
                    forest
                        .node_in_segment(s, seg)
                        .expect("segment alive at sample"),
                );
            }
        }
    }
    nodes
}

/// Runs every single-hierarchy check. `partitions` must come from
/// [`grid_partitions`] on the same forest.
pub fn audit_layers(
    forest: &SegmentForest,
    partitions: &[ComponentPartition],
    side: Side,
) -> Vec<CheckResult> {
    let grid = forest.grid().values();
    let node_w = |role: &str, node: &NodeRef| WitnessNode::new(role, side, forest, node);

    let mut definition = Tally::new("Layer-def");
    let mut lemma2 = Tally::new("L2");
    let mut lemma3 = Tally::new("L3");
    for (i, partition) in partitions.iter().enumerate() {
        for block in &partition.blocks {
            // Clusters nest as the scale grows, so a previous cluster lies
            // inside this one iff its representative does.
            let inside: Vec<usize> = match i {
                0 => Vec::new(),
                _ => partitions[i - 1]
                    .blocks
                    .iter()
                    .filter(|b| block.binary_search(&b[0]).is_ok())
                    .map(Vec::len)
                    .collect(),
            };
            let layer = inside.iter().all(|&len| len < block.len());
            let branch = inside.len() != 1;
            let t = grid[i];
            let bad = |note: &str| {
                Witness::new(format!("{side:?}: {note}"))
                    .value("t", t)
                    .value("cardinality", block.len() as f64)
                    .value("antecedents", inside.len() as f64)
            };

            let seg = forest.segment_for_representative(i, block[0]);
            let consistent = seg.is_some_and(|id| {
                let s = forest.segment(id);
                s.members == *block
                    && (s.birth_index() == i) == layer
                    && (!layer || is_branch(forest, id) == branch)
            });
            definition.record(consistent, || {
                bad("forest disagrees with the definition at this cluster")
            });
            lemma2.record(!branch || layer, || {
                bad("branch point that is not a layer point")
            });
            if forest.k() == 0 {
                lemma3.record(!layer || branch, || {
                    bad("layer point that is not a branch point")
                });
            }
        }
    }

    let layers = layer_points(forest);
    let mut lemma4 = Tally::new("L4");
    for (i, a) in layers.iter().enumerate() {
        for b in &layers[i..] {
            let pair = || {
                Witness::new(format!("{side:?}: join of layer points"))
                    .node(node_w("a", &a.node()))
                    .node(node_w("b", &b.node()))
            };
            match lub_layer(forest, a, b) {
                Ok(j) => {
                    let bound = forest.leq(&a.node(), &j.node()) == Ok(true)
                        && forest.leq(&b.node(), &j.node()) == Ok(true);
                    lemma4.record(bound, || pair().node(node_w("join", &j.node())));
                }
                Err(e) => lemma4.fail(Witness {
                    note: format!("{side:?}: {e}"),
                    ..pair()
                }),
            }
        }
    }

    let mut section = Tally::new("L6-section");
    for p in &layers {
        let back = max_layer_below(forest, &p.node());
        section.record(back.as_ref() == Ok(p), || {
            Witness::new(format!("{side:?}: max does not fix a layer point"))
                .node(node_w("p", &p.node()))
        });
    }

    let mut retract = Tally::new("L6-retract");
    let mut monotone = Tally::new("L6-monotone");
    let mut remark7 = Tally::new("R7");
    let nodes = sample_nodes(forest);
    for v in &nodes {
        let top = max_layer_below(forest, v).expect("node from this forest");
        let below = forest.leq(&top.node(), v) == Ok(true);
        retract.record(below, || {
            Witness::new(format!("{side:?}: max(v) is not below v"))
                .node(node_w("v", v))
                .node(node_w("max", &top.node()))
        });

        let branch = max_branch_below(forest, v).expect("node from this forest");
        let chain = forest.leq(&branch.node(), &top.node()) == Ok(true) && below;
        remark7.record(chain, || {
            Witness::new(format!("{side:?}: max_branch <= max_layer <= v fails"))
                .node(node_w("v", v))
                .node(node_w("max_layer", &top.node()))
                .node(node_w("max_branch", &branch.node()))
        });

        // Steps to the next grid value generate the order along a chain.
        if let Some(&next) = grid.get(grid.partition_point(|&t| t <= v.s())) {
            let w = forest.advance(*v, next).expect("node from this forest");
            let w_top = max_layer_below(forest, &w).expect("node from this forest");
            let ok =
                forest.leq(v, &w) == Ok(true) && forest.leq(&top.node(), &w_top.node()) == Ok(true);
            monotone.record(ok, || {
                Witness::new(format!("{side:?}: max is not order preserving"))
                    .node(node_w("v", v))
                    .node(node_w("w", &w))
            });
        }
    }

    vec![
        definition.finish(),
        lemma2.finish(),
        lemma3.finish(),
        lemma4.finish(),
        section.finish(),
        retract.finish(),
        monotone.finish(),
        remark7.finish(),
        block_bijections(forest, partitions, side),
    ]
}
