mod common;

use common::*;
use rand::Rng;
use riplayer_core::hierarchy::SegmentForest;
use riplayer_core::layers::LayerPoint;
use riplayer_core::metric::Inclusion;
use riplayer_core::stability::{
    check_all, i_star, make_pair, sigma_star, theta_star, theta_star_from, InclusionPair,
    PairOptions,
};

fn corpus(seed: u64, count: usize) -> Vec<InclusionPair> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=14);
        let k = rng.gen_range(0..=3);
        let inc = random_inclusion(&mut rng, n, n.div_ceil(4));
        if let Ok(pair) = make_pair(inc, k, PairOptions::default()) {
            out.push(pair);
        }
    }
    out
}

fn comparable(forest: &SegmentForest, layers: &[LayerPoint]) -> Vec<(LayerPoint, LayerPoint)> {
    let mut out = Vec::new();
    for a in layers {
        for b in layers {
            if forest.leq(&a.node(), &b.node()).unwrap() {
                out.push((*a, *b));
            }
        }
    }
    out
}

#[test]
fn induced_maps_preserve_order() {
    for pair in corpus(21, 40) {
        let (fx, fy) = (pair.forest_x(), pair.forest_y());
        for (a, b) in comparable(fx, pair.layers_x()) {
            let (ia, ib) = (i_star(&pair, &a).unwrap(), i_star(&pair, &b).unwrap());
            assert!(fy.leq(&ia.node(), &ib.node()).unwrap());
            let (sa, sb) = (
                sigma_star(fx, pair.r(), &a).unwrap(),
                sigma_star(fx, pair.r(), &b).unwrap(),
            );
            assert!(fx.leq(&sa.node(), &sb.node()).unwrap());
        }
        for (a, b) in comparable(fy, pair.layers_y()) {
            if let (Ok(ta), Ok(tb)) = (theta_star(&pair, &a), theta_star(&pair, &b)) {
                assert!(fx.leq(&ta.node(), &tb.node()).unwrap());
            }
        }
    }
}

#[test]
fn theta_star_is_representative_independent() {
    for pair in corpus(22, 40) {
        for q in pair.layers_y() {
            let first = theta_star(&pair, q);
            for &y in pair.forest_y().members(&q.node()) {
                assert_eq!(theta_star_from(&pair, q, y), first);
            }
        }
    }
}

#[test]
fn robust_checks_hold_on_random_pairs() {
    let robust = [
        "Thm8-eq6", "Thm8-eq7", "Rel-eq8", "L10", "C11", "L12", "L13", "L14", "C15", "R9",
    ];
    for pair in corpus(23, 60) {
        let report = check_all(&pair);
        for id in robust {
            let check = report.check(id).unwrap();
            assert!(check.passed, "{id}: {:?}", check.witnesses.first());
        }
    }
}

#[test]
fn reports_are_byte_identical() {
    for pair in corpus(24, 10) {
        let again = make_pair(pair.inclusion().clone(), pair.k(), PairOptions::default()).unwrap();
        assert_eq!(check_all(&pair).to_json(), check_all(&again).to_json());
        assert_eq!(
            check_all(&pair).to_markdown(),
            check_all(&again).to_markdown()
        );
    }
}

#[test]
fn strictness_toggle_only_narrows_lemma_16() {
    let x = line(&[0.0, 1.0, 3.0, 7.0]);
    let y = line(&[0.0, 1.0, 3.0, 7.0, 7.2]);
    let inc = Inclusion::new(x, y, vec![0, 1, 2, 3]).unwrap();
    let options = PairOptions {
        r: Some(0.25),
        strict_l16: true,
        ..Default::default()
    };
    let report = check_all(&make_pair(inc, 0, options).unwrap());
    // The only witness sits at s = 0.2 < r, so the floor removes it.
    assert!(report.check("L16").unwrap().passed);
    assert!(!report.check("L17").unwrap().passed);
}
