mod common;

use std::time::Duration;

use augdist::ged::{self, CostModel};
use augdist::mcs;
use common::*;
use proptest::prelude::*;

const LONG: Duration = Duration::from_secs(60);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn astar_matches_exhaustive_search(a in aug_strategy(4, 4), b in aug_strategy(4, 4)) {
        let r = ged::ged_astar(&a, &b, &CostModel::ged(), LONG).unwrap();
        prop_assert!(r.complete);
        prop_assert_eq!(r.cost, brute_force_ged(&a, &b));
        prop_assert_eq!(ged::mapping_cost(&a, &b, &r.mapping, &CostModel::ged()), r.cost);
        let d = ged::dist_ged_astar(&a, &b, &CostModel::ged(), LONG).unwrap();
        // the raw ratio can exceed 1 (e.g. every node changes type); distances clamp
        prop_assert_eq!(d, (brute_force_ged(&a, &b) / ged_denominator(&a, &b)).min(1.0));
    }

    #[test]
    fn astar_is_symmetric(a in aug_strategy(4, 4), b in aug_strategy(4, 4)) {
        let ab = ged::ged_astar(&a, &b, &CostModel::ged(), LONG).unwrap().cost;
        let ba = ged::ged_astar(&b, &a, &CostModel::ged(), LONG).unwrap().cost;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn hungarian_matches_node_enumeration(a in aug_strategy(5, 3), b in aug_strategy(5, 3)) {
        prop_assert_eq!(ged::ged_hungarian(&a, &b, &CostModel::ged()).unwrap(), brute_force_node_ged(&a, &b));
        prop_assert_eq!(
            ged::ged_hungarian(&a, &b, &CostModel::ged()).unwrap(),
            ged::ged_hungarian(&b, &a, &CostModel::ged()).unwrap()
        );
    }

    #[test]
    fn hungarian_never_exceeds_astar_node_part(a in aug_strategy(4, 4), b in aug_strategy(4, 4)) {
        let exact = ged::ged_astar(&a, &b, &CostModel::ged(), LONG).unwrap().cost;
        prop_assert!(ged::ged_hungarian(&a, &b, &CostModel::ged()).unwrap() <= exact);
    }

    #[test]
    fn mcs_matches_maximum_common_nodes(a in aug_strategy(5, 3), b in aug_strategy(5, 3)) {
        let m = mcs::mcs_hungarian(&a, &b).unwrap();
        let k = brute_force_common_nodes(&a, &b);
        prop_assert_eq!(m.pairs.len(), k);
        for &(i, j) in &m.pairs {
            prop_assert_eq!(&a.nodes()[i].label, &b.nodes()[j].label);
            prop_assert_eq!(&a.nodes()[i].node_type, &b.nodes()[j].node_type);
        }
        prop_assert_eq!(m.cost, (a.node_count() + b.node_count() - 2 * k) as f64);
    }

    #[test]
    fn edit_path_reaches_target(a in aug_strategy(4, 4), b in aug_strategy(4, 4)) {
        let r = ged::ged_astar(&a, &b, &CostModel::ged(), LONG).unwrap();
        let path = ged::EditPath::from_mapping(&a, &b, &r.mapping, &CostModel::ged());
        prop_assert_eq!(path.total_cost, r.cost);
        let ops: f64 = path.ops.iter().map(|op| op.cost()).sum();
        prop_assert_eq!(ops, r.cost);
        let out = path.apply(&a, &b);
        prop_assert_eq!(out.node_count(), b.node_count());
        prop_assert_eq!(out.edge_multiset(), b.edge_multiset());
    }
}

#[test]
fn longer_deadlines_never_hurt() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let a = random_large(&mut rng, "a", 12, 30);
        let b = random_large(&mut rng, "b", 12, 30);
        let mut last = f64::INFINITY;
        for ms in [1, 10, 100] {
            let r = ged::ged_astar(&a, &b, &CostModel::ged(), Duration::from_millis(ms)).unwrap();
            assert!(r.cost <= last, "{ms} ms gave {} after {last}", r.cost);
            last = r.cost;
        }
    }
}

#[test]
fn zero_timeout_reports_timeout_and_distance_one() {
    let g = build("g", &[(0, 0, 0)], &[]);
    assert_eq!(ged::ged_astar(&g, &g, &CostModel::ged(), Duration::ZERO), Err(augdist::DistanceError::Timeout));
    assert_eq!(ged::dist_ged_astar(&g, &g, &CostModel::ged(), Duration::ZERO).unwrap(), 1.0);
}
