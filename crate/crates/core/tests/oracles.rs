use itea::analysis::denominator_roots;
use itea::itea::{assemble_system, default_direction};
use itea::oracles::{
    alpha_matrix, catalog, dd_closed_form, error_closed_form, error_via_determinant, refined_pole_constant, t_det,
    t_factored, u_closed_form, CATALOG_IDS,
};
use itea::potential::{disk_nodes, interval_nodes};
use itea::{build_interpolant, build_table, CVector, IteaConfig, NodeMultiset, SampleSet, VectorFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn node_sets(len: usize) -> Vec<NodeMultiset> {
    vec![disk_nodes(len, 1.0).unwrap(), interval_nodes(len).unwrap()]
}

#[test]
fn closed_form_system_matches_the_tableau() {
    for id in CATALOG_IDS {
        let f = catalog(id).unwrap();
        let q = default_direction(f.dim());
        for k in 1..=f.pole_count() {
            for p in [k + 3, 10] {
                for nodes in node_sets(p + k) {
                    let table = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
                    let pipeline = assemble_system(&table, &IteaConfig::new(p, k, q.clone()).unwrap()).unwrap();
                    let oracle = u_closed_form(&f, &nodes, p, k, &q).unwrap();
                    let scale = pipeline.u.max_abs();
                    for i in 1..=k {
                        for j in 0..=k {
                            let gap = (pipeline.entry(i, j) - oracle.entry(i, j)).norm();
                            assert!(gap <= 1e-9 * scale, "{id} p={p} k={k} u[{i}][{j}]: {gap:e}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn closed_form_divided_differences_match_the_tableau() {
    for id in CATALOG_IDS {
        let f = catalog(id).unwrap();
        let nodes = disk_nodes(12, 1.0).unwrap();
        let table = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
        for m in 1..=12 {
            for n in m..=12 {
                let Ok(oracle) = dd_closed_form(&f, &nodes, m, n) else {
                    continue; // order too low for a closed form, or a non-rational part
                };
                let d = table.get(m, n).unwrap();
                assert!(d.relative_distance(&oracle) <= 1e-9, "{id} D[{m}][{n}]");
            }
        }
    }
}

#[test]
fn three_error_forms_agree_on_catalog_instances() {
    let probes = [c(0.3, 0.2), c(-0.9, 0.1), c(1.2, -0.6)];
    for (id, k, p) in [("two_pole", 1, 8), ("three_pole", 1, 10), ("three_pole", 2, 9)] {
        let f = catalog(id).unwrap();
        let q = default_direction(f.dim());
        let nodes = disk_nodes(p + k, 1.0).unwrap();
        let interp = build_interpolant(&nodes, &SampleSet::from_function(&f, &nodes), &IteaConfig::new(p, k, q.clone()).unwrap())
            .unwrap();
        for z in probes {
            let direct = &f.value(z) - &interp.eval(z).unwrap();
            let closed = error_closed_form(&f, &nodes, p, k, &q, z).unwrap();
            let det = error_via_determinant(&f, &nodes, p, k, &q, z).unwrap();
            assert!(direct.relative_distance(&closed) <= 1e-8, "{id} z={z}");
            assert!(direct.relative_distance(&det) <= 1e-8, "{id} z={z}");
            assert!(closed.relative_distance(&det) <= 1e-8, "{id} z={z}");
        }
    }
}

#[test]
fn t_factorization_and_p_independence_on_catalog() {
    let f = catalog("three_pole").unwrap();
    let q = default_direction(2);
    for k in 1..=3 {
        let subsets = itea::oracles::subsets(3, k);
        let a = alpha_matrix(&f, &disk_nodes(6 + k, 1.0).unwrap(), 6, k, &q).unwrap();
        let b = alpha_matrix(&f, &disk_nodes(11 + k, 1.0).unwrap(), 11, k, &q).unwrap();
        for cols in subsets {
            let factored = t_factored(&q, f.residues(), f.poles(), &cols).unwrap();
            let (ta, tb) = (t_det(&a, &cols), t_det(&b, &cols));
            assert!((ta - factored).norm() <= 1e-10 * factored.norm(), "k={k} {cols:?}");
            assert!((ta - tb).norm() <= 1e-10 * ta.norm(), "k={k} {cols:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn direction_scale_does_not_matter(re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let t = c(re, im);
        prop_assume!(t.norm() > 0.1);
        let f = catalog("three_pole").unwrap();
        let (p, k) = (10, 2);
        let nodes = disk_nodes(p + k, 1.0).unwrap();
        let samples = SampleSet::from_function(&f, &nodes);
        let q = default_direction(2);
        let tq = q.scale(t);
        let a = build_interpolant(&nodes, &samples, &IteaConfig::new(p, k, q.clone()).unwrap()).unwrap();
        let b = build_interpolant(&nodes, &samples, &IteaConfig::new(p, k, tq.clone()).unwrap()).unwrap();
        let mut ra = denominator_roots(&a).unwrap().roots;
        let mut rb = denominator_roots(&b).unwrap().roots;
        let key = |z: &Complex64| (z.re, z.im);
        ra.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        rb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (x, y) in ra.iter().zip(&rb) {
            prop_assert!((x - y).norm() <= 1e-10 * x.norm());
        }
        let z = c(0.4, -0.3);
        prop_assert!(a.eval(z).unwrap().relative_distance(&b.eval(z).unwrap()) <= 1e-10);
        let ca = refined_pole_constant(&f, &nodes, p, k, &q, 1).unwrap();
        let cb = refined_pole_constant(&f, &nodes, p, k, &tq, 1).unwrap();
        prop_assert!((ca - cb).norm() <= 1e-10 * ca.norm());
    }
}

#[test]
fn two_pole_refined_constant_is_minus_five() {
    let f = catalog("two_pole").unwrap();
    let nodes = disk_nodes(9, 1.0).unwrap();
    let c1 = refined_pole_constant(&f, &nodes, 8, 1, &default_direction(2), 1).unwrap();
    assert!((c1 - c(-5.0, 0.0)).norm() <= 1e-12, "{c1}");
    // the direction enters through (q, v_2) / (q, v_1)
    let skewed = refined_pole_constant(&f, &nodes, 8, 1, &CVector::from_real(&[0.3, 2.0]), 1).unwrap();
    assert!((skewed - c1 * (2.0 / 0.3)).norm() <= 1e-12 * skewed.norm(), "{skewed}");
}
