use std::sync::Arc;

use castle_polar::channel::{split_exact, Dmc};
use castle_polar::codeset::is_weakly_decreasing;
use castle_polar::curve::{hermitian_curve, rational_curve};
use castle_polar::kernel::Kernel;
use castle_polar::linalg;
use castle_polar::polarization::{
    bn_permutation, decode_sc, encode, exact_z, gn_matrix, mc_estimate_z, select_info_set, theoretical_order,
};
use castle_polar::{FieldElement, FiniteField};
use proptest::prelude::*;

fn gf(q: u32) -> Arc<FiniteField> {
    Arc::new(FiniteField::with_order(q).unwrap())
}

fn arikan(f: Arc<FiniteField>) -> Kernel {
    let (o, z) = (FieldElement::ONE, FieldElement::ZERO);
    Kernel::from_matrix(f, vec![vec![o, z], vec![o, o]]).unwrap()
}

fn kernels() -> Vec<(Kernel, usize)> {
    vec![
        (arikan(gf(2)), 5),
        (Kernel::from_curve(Arc::new(rational_curve(gf(3)))), 3),
        (Kernel::from_curve(Arc::new(rational_curve(gf(4)))), 2),
        (Kernel::from_curve(Arc::new(hermitian_curve(gf(4)).unwrap())), 2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn encoding_is_multiplication_by_gn(ki in 0usize..4, n in 1usize..=3, seed in any::<u64>()) {
        let (k, nmax) = &kernels()[ki];
        let n = n.min(*nmax);
        let f = k.field().clone();
        let g = gn_matrix(k, n).unwrap();
        let q = f.order() as u64;
        let u: Vec<FieldElement> = (0..g.len() as u64)
            .map(|i| FieldElement((seed.rotate_left(i as u32 * 7) ^ i).wrapping_mul(0x9e37_79b9) as u16 % q as u16))
            .collect();
        let x = encode(k, n, &u).unwrap();
        let want = linalg::mat_mul(&f, &vec![u.clone()], &g);
        prop_assert_eq!(&x, &want[0]);

        let clean = Dmc::qsc(f.clone(), 0.0).unwrap();
        let y: Vec<usize> = x.iter().map(|e| e.index()).collect();
        prop_assert_eq!(decode_sc(k, n, &clean, &y, &vec![None; u.len()]).unwrap(), u);
    }

    #[test]
    fn digit_reversal_is_an_involution(l in 2usize..9, n in 1usize..5) {
        let p = bn_permutation(l, n).unwrap();
        prop_assert!(p.iter().enumerate().all(|(i, &j)| p[j] == i));
    }

    #[test]
    fn qsc_degrades_with_crossover(a in 0.0f64..0.7, b in 0.0f64..0.7) {
        let f = gf(4);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let good = Dmc::qsc(f.clone(), lo).unwrap();
        let bad = Dmc::qsc(f, hi).unwrap();
        prop_assert!(good.degradation_witness(&bad).unwrap().is_some());
        prop_assert!(good.bhattacharyya() <= bad.bhattacharyya() + 1e-12);
        prop_assert!(good.mutual_information() >= bad.mutual_information() - 1e-12);
    }
}

#[test]
fn monte_carlo_tracks_exact_values_at_depth_two() {
    for (k, w) in [
        (arikan(gf(2)), Dmc::qsc(gf(2), 0.11).unwrap()),
        (arikan(gf(4)), Dmc::qsc(gf(4), 0.1).unwrap()),
        (Kernel::from_curve(Arc::new(rational_curve(gf(3)))), Dmc::qsc(gf(3), 0.1).unwrap()),
    ] {
        let exact = exact_z(&k, 2, &w).unwrap();
        let est = mc_estimate_z(&k, 2, &w, 20_000, 5).unwrap();
        for i in 0..exact.len() {
            let tol = 4.0 * est.se[i] + 1e-3;
            assert!((est.est[i] - exact[i]).abs() <= tol, "index {i}: {} vs {}", est.est[i], exact[i]);
        }
    }
}

#[test]
fn order_edges_are_degradations() {
    let c = Arc::new(rational_curve(gf(4)));
    let k = Kernel::from_curve(c.clone());
    let w = Dmc::qsc(gf(4), 0.1).unwrap();
    let order = theoretical_order(&k, &c, 1).unwrap();
    let split = |idx: usize| split_exact(&w, &k, 3 - idx).unwrap();
    for (worse, better) in order.edges() {
        assert!(split(better).degradation_witness(&split(worse)).unwrap().is_some(), "{worse} → {better}");
    }

    let c3 = Arc::new(rational_curve(gf(3)));
    let k3 = Kernel::from_curve(c3.clone());
    let w3 = Dmc::qsc(gf(3), 0.1).unwrap();
    let z = exact_z(&k3, 2, &w3).unwrap();
    for (worse, better) in theoretical_order(&k3, &c3, 2).unwrap().edges() {
        assert!(z[worse] >= z[better] - 1e-9, "{worse} → {better}");
    }
}

#[test]
fn rational_information_sets_are_weakly_decreasing() {
    let cases = [(gf(3), 2, 0.1), (gf(4), 1, 0.1), (gf(4), 1, 0.3)];
    for (f, n, p) in cases {
        let c = rational_curve(f.clone());
        let k = Kernel::from_curve(Arc::new(c.clone()));
        let z = exact_z(&k, n, &Dmc::qsc(f, p).unwrap()).unwrap();
        for dim in 0..=z.len() {
            let a = select_info_set(&z, c.len(), n, dim).unwrap();
            assert!(is_weakly_decreasing(&a, &c).unwrap(), "n = {n}, dim = {dim}");
        }
    }
}

#[test]
fn splits_of_symmetric_channels_stay_symmetric() {
    for (q, p) in [(3, 0.2), (4, 0.05), (5, 0.1)] {
        let k = Kernel::from_curve(Arc::new(rational_curve(gf(q))));
        let w = Dmc::qsc(gf(q), p).unwrap();
        for i in 0..k.size() {
            let s = match split_exact(&w, &k, i) {
                Ok(s) => s,
                Err(castle_polar::Error::TooLarge(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            match s.sof_witnesses() {
                Ok(witness) => assert!(witness.is_some(), "GF({q}) row {i}"),
                Err(castle_polar::Error::TooLarge(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}
