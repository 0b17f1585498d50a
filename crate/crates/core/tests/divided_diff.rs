use itea::divided_diff::confluent_limit_check;
use itea::oracles::{catalog, CATALOG_IDS};
use itea::{build_table, NodeMultiset, SampleSet, VectorFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

/// Distinct points inside the unit disk, at least `0.05` apart.
fn nodes_strategy(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.1..1.0f64, 0.0..std::f64::consts::TAU), len)
        .prop_map(|v| v.into_iter().map(|(r, t)| polar(r, t)).collect::<Vec<_>>())
        .prop_filter("separated", |pts| {
            pts.iter().enumerate().all(|(i, a)| pts[..i].iter().all(|b| (a - b).norm() > 0.05))
        })
}

fn top_entry(f: &impl VectorFunction, pts: Vec<Complex64>) -> itea::CVector {
    let nodes = NodeMultiset::new(pts).unwrap();
    let table = build_table(&nodes, &SampleSet::from_function(f, &nodes)).unwrap();
    table.get(1, nodes.len()).unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn top_entry_is_symmetric(pts in nodes_strategy(6), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let f = catalog("three_pole").unwrap();
        let shuffled: Vec<Complex64> = perm.iter().map(|&i| pts[i]).collect();
        let a = top_entry(&f, pts);
        let b = top_entry(&f, shuffled);
        prop_assert!(a.relative_distance(&b) <= 1e-10, "{}", a.relative_distance(&b));
    }

    #[test]
    fn reversal_gives_the_same_top_entry(pts in nodes_strategy(7)) {
        let f = catalog("two_pole_exp").unwrap();
        let mut reversed = pts.clone();
        reversed.reverse();
        let a = top_entry(&f, pts);
        let b = top_entry(&f, reversed);
        prop_assert!(a.relative_distance(&b) <= 1e-12, "{}", a.relative_distance(&b));
    }

    #[test]
    fn newton_form_interpolates(pts in nodes_strategy(8)) {
        let f = catalog("two_pole").unwrap();
        let nodes = NodeMultiset::new(pts.clone()).unwrap();
        let table = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
        for &x in &pts {
            let g = table.newton_eval(1, 8, x).unwrap();
            prop_assert!(g.relative_distance(&f.value(x)) <= 1e-11);
        }
    }
}

#[test]
fn confluent_check_shrinks_with_the_gap() {
    let pts = vec![
        Complex64::new(0.2, 0.1),
        Complex64::new(0.2, 0.1),
        Complex64::new(0.2, 0.1),
        Complex64::new(-0.4, 0.3),
        Complex64::new(-0.4, 0.3),
        Complex64::new(0.6, -0.5),
    ];
    let nodes = NodeMultiset::new(pts).unwrap();
    for id in CATALOG_IDS {
        let f = catalog(id).unwrap();
        let gaps: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&g| confluent_limit_check(&f, &nodes, g).unwrap()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{id}: {gaps:?}");
    }
}

#[test]
fn confluent_run_carries_scaled_derivatives() {
    let f = catalog("two_pole_exp").unwrap();
    let a = Complex64::new(0.3, -0.2);
    let nodes = NodeMultiset::new(vec![a; 4]).unwrap();
    let table = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
    let expected = f.derivative(a, 3).scale(Complex64::new(1.0 / 6.0, 0.0));
    assert!(table.get(1, 4).unwrap().relative_distance(&expected) <= 1e-14);
}
