mod common;

use common::*;
use rand::Rng;
use riplayer_core::audit::sample_nodes;
use riplayer_core::filtration::{components, ParameterGrid};
use riplayer_core::hierarchy::SegmentForest;
use riplayer_core::layers::{branch_points, layer_points};
use riplayer_core::metric::{hausdorff_config, DEFAULT_TUPLE_BUDGET};

#[test]
fn union_find_matches_bfs_on_every_grid_value() {
    let mut rng = rng(11);
    for _ in 0..100 {
        let space = random_space(&mut rng, 16);
        for k in 0..4 {
            let forest = SegmentForest::build(&space, k);
            for (i, &t) in ParameterGrid::new(&space).values().iter().enumerate() {
                let bfs = bfs_components(&space, t, k);
                assert_eq!(components(&space, t, k).blocks, bfs, "t={t} k={k}");
                assert_eq!(forest.partition_at(i), bfs, "forest t={t} k={k}");
            }
        }
    }
}

#[test]
fn constant_between_events() {
    let mut rng = rng(12);
    for _ in 0..30 {
        let space = random_space(&mut rng, 12);
        let grid = ParameterGrid::new(&space);
        for w in grid.values().windows(2) {
            let mid = w[0] + (w[1] - w[0]) * rng.gen::<f64>();
            for k in 0..3 {
                assert_eq!(
                    components(&space, mid, k).blocks,
                    components(&space, w[0], k).blocks
                );
            }
        }
    }
}

#[test]
fn lub_matches_minimal_scale_search() {
    let mut rng = rng(13);
    let mut checked = 0;
    while checked < 1000 {
        let space = random_space(&mut rng, 12);
        let k = rng.gen_range(0..3);
        let forest = SegmentForest::build(&space, k);
        let nodes = sample_nodes(&forest);
        if nodes.is_empty() {
            continue;
        }
        for _ in 0..20 {
            let a = nodes[rng.gen_range(0..nodes.len())];
            let b = nodes[rng.gen_range(0..nodes.len())];
            let fast = forest
                .lub(&a, &b)
                .map(|j| (j.s(), forest.members(&j).to_vec()));
            let slow = brute_lub(&forest, &a, &b);
            assert_eq!(fast.is_ok(), slow.is_ok());
            if let (Ok(f), Ok(s)) = (fast, slow) {
                assert_eq!(f, s);
            }
            checked += 1;
        }
    }
}

#[test]
fn layer_and_branch_points_match_definition() {
    let mut rng = rng(14);
    for _ in 0..60 {
        let space = random_space(&mut rng, 14);
        for k in 0..4 {
            let forest = SegmentForest::build(&space, k);
            let (layers, branches) = definition_points(&space, k);
            let got_layers = layer_points(&forest)
                .iter()
                .map(|p| (p.birth().to_bits(), forest.members(&p.node()).to_vec()))
                .collect();
            let got_branches = branch_points(&forest)
                .iter()
                .map(|p| (p.birth().to_bits(), forest.members(&p.node()).to_vec()))
                .collect();
            assert_eq!(layers, got_layers);
            assert_eq!(branches, got_branches);
        }
    }
}

#[test]
fn hausdorff_matches_double_loop() {
    let mut rng = rng(15);
    for _ in 0..150 {
        let n = rng.gen_range(1..=7);
        let pair = random_inclusion(&mut rng, n, 3);
        for k in 0..3 {
            assert_eq!(
                hausdorff_config(&pair, k, DEFAULT_TUPLE_BUDGET),
                brute_hausdorff(&pair, k),
                "n={n} k={k}"
            );
        }
    }
}

#[test]
fn hausdorff_at_k0_is_directed_point_distance() {
    let mut rng = rng(16);
    for _ in 0..100 {
        let n = rng.gen_range(1..10);
        let pair = random_inclusion(&mut rng, n, 4);
        let y = pair.sup();
        let classical = (0..y.len())
            .map(|a| {
                pair.embed()
                    .iter()
                    .map(|&b| y.dist(a, b))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert_eq!(
            hausdorff_config(&pair, 0, DEFAULT_TUPLE_BUDGET),
            Ok(classical)
        );
    }
}

#[test]
fn hausdorff_monotone_in_k() {
    let mut rng = rng(17);
    for _ in 0..100 {
        let n = rng.gen_range(4..12);
        let pair = random_inclusion(&mut rng, n, 3);
        let values: Vec<f64> = (0..4)
            .map(|k| hausdorff_config(&pair, k, DEFAULT_TUPLE_BUDGET).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
    }
}
