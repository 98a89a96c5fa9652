use padic_hilbert::index::{encode_points, DEFAULT_K_MAX};
use padic_hilbert::{Curve, Error, Exec, PointCloud, Prime, ScaledTree, Variant};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Insert(Vec<f64>),
    Remove(usize),
}

fn ops(n: usize) -> impl Strategy<Value = Vec<Op>> {
    // coarse coordinates so that buckets fill and the depth limit is reached
    let coord = (0u8..8).prop_map(|v| v as f64 / 8.0);
    let op = prop_oneof![
        3 => prop::collection::vec(coord, n).prop_map(Op::Insert),
        1 => any::<usize>().prop_map(Op::Remove),
    ];
    prop::collection::vec(op, 1..120)
}

fn setup() -> impl Strategy<Value = (Prime, usize, usize, usize, Variant, Vec<Op>)> {
    (
        prop::sample::select(vec![2u32, 3]),
        1usize..=3,
        1usize..=4,
        1usize..=4,
        prop::sample::select(vec![Variant::Bubble, Variant::Ring]),
    )
        .prop_flat_map(|(p, n, s, k_max, v)| {
            (
                Just(Prime::new(p).unwrap()),
                Just(n),
                Just(s),
                Just(k_max),
                Just(v),
                ops(n),
            )
        })
}

fn bulk(p: Prime, n: usize, s: usize, k_max: usize, v: &Variant, live: &[(u64, Vec<f64>)]) -> ScaledTree {
    let curve = Curve::new(p, n, v.clone()).unwrap();
    let mut tree = ScaledTree::with_k_max(p, n, s, v.clone(), k_max).unwrap();
    if live.is_empty() {
        return tree;
    }
    let rows: Vec<&[f64]> = live.iter().map(|(_, x)| x.as_slice()).collect();
    let cloud = PointCloud::from_rows(&rows, "live").unwrap();
    let mut enc = encode_points(&curve, &cloud, k_max, Exec::Sequential).unwrap();
    enc.ids = live.iter().map(|(id, _)| *id).collect();
    tree = ScaledTree::build(p, n, s, v.clone(), k_max, &enc, Exec::Sequential).unwrap();
    tree
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_history_matches_bulk_build((p, n, s, k_max, v, ops) in setup()) {
        let mut tree = ScaledTree::with_k_max(p, n, s, v.clone(), k_max).unwrap();
        let mut live: Vec<(u64, Vec<f64>)> = Vec::new();
        let mut next_id = 0u64;
        for op in ops {
            match op {
                Op::Insert(x) => {
                    tree.insert(next_id, &x).unwrap();
                    live.push((next_id, x));
                    next_id += 1;
                }
                Op::Remove(i) if !live.is_empty() => {
                    let (id, _) = live.swap_remove(i % live.len());
                    tree.remove(id).unwrap();
                }
                Op::Remove(_) => {}
            }
            prop_assert!(tree.check_invariants().is_ok());
            prop_assert_eq!(tree.len(), live.len());
        }
        prop_assert!(tree.structurally_eq(&bulk(p, n, s, k_max, &v, &live)));
    }

    #[test]
    fn leaf_counts_match_sorted_paths((p, n, s, k_max, v, ops) in setup()) {
        let live: Vec<(u64, Vec<f64>)> = ops
            .into_iter()
            .filter_map(|o| match o { Op::Insert(x) => Some(x), Op::Remove(_) => None })
            .enumerate()
            .map(|(i, x)| (i as u64, x))
            .collect();
        let tree = bulk(p, n, s, k_max, &v, &live);
        let rows: Vec<&[f64]> = live.iter().map(|(_, x)| x.as_slice()).collect();
        let cloud = PointCloud::from_rows(&rows, "live").unwrap();
        let curve = Curve::new(p, n, v).unwrap();
        let sorted = encode_points(&curve, &cloud, k_max, Exec::Sequential).unwrap().sorted(Exec::Sequential);
        prop_assert_eq!(sorted.scaled_leaves(s), tree.leaf_counts());
        let stats = tree.stats();
        prop_assert_eq!(stats.leaves, tree.leaf_counts().leaves);
        prop_assert_eq!(stats.points, live.len());
    }

    #[test]
    fn every_point_is_found_in_its_leaf((p, n, s, k_max, v, ops) in setup()) {
        let live: Vec<(u64, Vec<f64>)> = ops
            .into_iter()
            .filter_map(|o| match o { Op::Insert(x) => Some(x), Op::Remove(_) => None })
            .enumerate()
            .map(|(i, x)| (i as u64, x))
            .collect();
        let tree = bulk(p, n, s, k_max, &v, &live);
        for (id, x) in &live {
            let node = tree.find_node(x).unwrap();
            prop_assert!(node.is_leaf);
            let near = tree.nearest(x).unwrap();
            prop_assert!(near.contains(id));
            prop_assert_eq!(&near, &tree.leaf_of(*id).unwrap());
            prop_assert!(node.count <= s || node.depth == k_max * n);
        }
    }
}

#[test]
fn ordered_ids_follow_the_curve() {
    let p = Prime::TWO;
    let curve = Curve::new(p, 2, Variant::Bubble).unwrap();
    // cell centres of the 4x4 grid listed in curve order, inserted reversed
    let mut centres = Vec::new();
    for idx in padic_hilbert::curve::all_indices(p, 2, 2).unwrap() {
        let c = padic_hilbert::curve::coord(&curve.index_to_cell(&idx).unwrap());
        centres.push(vec![c[0] + 0.125, c[1] + 0.125]);
    }
    let mut tree = ScaledTree::new(p, 2, 1, Variant::Bubble).unwrap();
    for (i, x) in centres.iter().enumerate().rev() {
        tree.insert(i as u64, x).unwrap();
    }
    assert_eq!(tree.ordered_ids(), (0..16).collect::<Vec<u64>>());
    assert_eq!(tree.stats().leaves, 16);
}

#[test]
fn contract_errors() {
    let mut tree = ScaledTree::new(Prime::TWO, 2, 2, Variant::Ring).unwrap();
    tree.insert(1, &[0.1, 0.2]).unwrap();
    assert!(matches!(tree.insert(1, &[0.3, 0.2]), Err(Error::Contract(_))));
    assert!(matches!(tree.remove(7), Err(Error::NotFound(7))));
    assert!(matches!(tree.insert(2, &[0.1]), Err(Error::DimensionMismatch { .. })));
    assert!(tree.insert(3, &[1.5, 0.0]).is_err());
    assert!(ScaledTree::new(Prime::TWO, 2, 0, Variant::Ring).is_err());
    assert_eq!(tree.len(), 1);
    assert_eq!(DEFAULT_K_MAX, tree.k_max());
}
