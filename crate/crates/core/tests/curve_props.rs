use num_bigint::BigUint;
use padic_hilbert::curve::{coord, padic_distance};
use padic_hilbert::digits::{self, gray_decode, gray_encode, hamming, DigitVec};
use padic_hilbert::{Curve, CurveIndex, Prime, Variant};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(vec![Variant::Bubble, Variant::Ring])
}

/// (p, n, k, index) with the index as a big integer below (p^n)^k.
fn curve_point() -> impl Strategy<Value = (Prime, usize, usize, Vec<u8>)> {
    (prime(), 1usize..=6, 1usize..=6).prop_flat_map(|(p, n, k)| {
        let digits = prop::collection::vec(0..p.get(), n * k);
        (Just(p), Just(n), Just(k), digits)
    })
}

fn index_of(p: Prime, n: usize, k: usize, digits: &[u8]) -> CurveIndex {
    let v = digits.iter().fold(BigUint::from(0u8), |acc, &d| acc * p.get() + d);
    CurveIndex::from_biguint(&v, p, n, k).unwrap()
}

proptest! {
    #[test]
    fn gray_round_trip(p in prime(), digits in prop::collection::vec(0u8..=255, 1..12)) {
        let d: Vec<u8> = digits.iter().map(|v| v % p.get()).collect();
        let x = DigitVec::from_digits(d, p).unwrap();
        prop_assert_eq!(gray_decode(&gray_encode(&x)), x);
    }

    #[test]
    fn gray_successors_differ_in_one_digit(p in prime(), n in 1usize..8, seed in any::<u64>()) {
        let total = p.checked_pow(n).unwrap();
        let i = seed % (total - 1);
        let a = gray_encode(&digits::bin_digits(i, n, p).unwrap());
        let b = gray_encode(&digits::bin_digits(i + 1, n, p).unwrap());
        prop_assert_eq!(hamming(&a, &b).unwrap(), 1);
        let (axis, sign) = digits::gray_delta(i, n, p).unwrap();
        let step = (b.get(axis) as i16 - a.get(axis) as i16) as i8;
        prop_assert_eq!(step, sign);
    }

    #[test]
    fn index_cell_round_trip((p, n, k, digits) in curve_point(), v in variant()) {
        let curve = Curve::new(p, n, v).unwrap();
        let idx = index_of(p, n, k, &digits);
        let cell = curve.index_to_cell(&idx).unwrap();
        prop_assert_eq!(curve.cell_to_index(&cell).unwrap(), idx.clone());
        // the path is the index digits, most significant first
        prop_assert_eq!(idx.path(), digits);
    }

    #[test]
    fn successor_is_face_adjacent((p, n, k, digits) in curve_point(), v in variant()) {
        let curve = Curve::new(p, n, v).unwrap();
        let idx = index_of(p, n, k, &digits);
        let next = idx.to_biguint() + 1u8;
        prop_assume!(next < padic_hilbert::curve::index_end(p, n, k));
        let a = curve.index_to_cell(&idx).unwrap().grid();
        let b = curve
            .index_to_cell(&CurveIndex::from_biguint(&next, p, n, k).unwrap())
            .unwrap()
            .grid();
        let moved: u64 = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum();
        prop_assert_eq!(moved, 1);
    }

    #[test]
    fn prefix_cells_nest((p, n, k, digits) in curve_point(), v in variant()) {
        // the first j limbs of an index address the parent cell at depth j
        let curve = Curve::new(p, n, v).unwrap();
        let idx = index_of(p, n, k, &digits);
        let cell = curve.index_to_cell(&idx).unwrap();
        for j in 1..k {
            let head = CurveIndex::new(idx.limbs()[..j].to_vec()).unwrap();
            prop_assert_eq!(curve.index_to_cell(&head).unwrap(), cell.truncate(j));
        }
    }

    #[test]
    fn quantize_recovers_cell((p, n, k, digits) in curve_point(), v in variant(), frac in 0.0f64..1.0) {
        let curve = Curve::new(p, n, v).unwrap();
        let cell = curve.index_to_cell(&index_of(p, n, k, &digits)).unwrap();
        let side = (p.get() as f64).powi(-(k as i32));
        let x: Vec<f64> = coord(&cell).iter().map(|c| c + frac * side * 0.999).collect();
        prop_assert_eq!(curve.quantize(&x, k).unwrap(), cell);
    }

    #[test]
    fn padic_distance_is_ultrametric(
        (p, n, k, a) in curve_point(),
        b_seed in prop::collection::vec(any::<u8>(), 36),
        c_seed in prop::collection::vec(any::<u8>(), 36),
    ) {
        let curve = Curve::new(p, n, Variant::Bubble).unwrap();
        let other = |seed: &[u8]| -> Vec<u8> {
            seed.iter().take(n * k).map(|v| v % p.get()).collect()
        };
        let cells: Vec<_> = [a, other(&b_seed), other(&c_seed)]
            .iter()
            .map(|d| curve.index_to_cell(&index_of(p, n, k, d)).unwrap())
            .collect();
        let d = |i: usize, j: usize| padic_distance(&cells[i], &cells[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1).max(d(1, 2)));
        prop_assert_eq!(d(0, 0), 0.0);
        prop_assert_eq!(d(0, 1), d(1, 0));
    }
}

#[test]
fn path_order_is_curve_order() {
    let p = Prime::new(3).unwrap();
    let curve = Curve::new(p, 2, Variant::Bubble).unwrap();
    let mut prev: Option<Vec<u8>> = None;
    for idx in padic_hilbert::curve::all_indices(p, 2, 3).unwrap() {
        let cell = curve.index_to_cell(&idx).unwrap();
        let centre: Vec<f64> = coord(&cell).iter().map(|c| c + 0.5 / 27.0).collect();
        let mut path = Vec::new();
        curve.encode_path(&centre, 3, &mut path).unwrap();
        assert_eq!(path, idx.path());
        if let Some(q) = &prev {
            assert!(q < &path);
        }
        prev = Some(path);
    }
}
