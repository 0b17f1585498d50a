use itea::analysis::{
    denominator_roots, is_roughly_monotone, refined_asymptotics_check, run_convergence_study, theta_decay_check,
    Quantity, RateReport, RefinedOutcome, StudyConfig, Verdict,
};
use itea::oracles::catalog;
use itea::potential::{disk_nodes, NodeFamily};
use itea::{build_interpolant, IteaConfig, SampleSet, VectorFunction};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const DISK: NodeFamily = NodeFamily::Disk { radius: 1.0 };

fn study(id: &str, k: usize, p_values: Vec<usize>, probes: Vec<Complex64>, rho: f64) -> RateReport {
    let mut cfg = StudyConfig::new(k, p_values);
    cfg.probes = probes;
    cfg.rho = rho;
    run_convergence_study(&catalog(id).unwrap(), &DISK, &cfg).unwrap()
}

#[test]
fn roots_satisfy_vieta() {
    for (id, k, p) in [("two_pole", 1, 10), ("three_pole", 2, 12), ("three_pole", 3, 9), ("two_pole_exp", 2, 14)] {
        let f = catalog(id).unwrap();
        let nodes = disk_nodes(p + k, 1.0).unwrap();
        let interp = build_interpolant(
            &nodes,
            &SampleSet::from_function(&f, &nodes),
            &IteaConfig::with_default_direction(p, k, f.dim()).unwrap(),
        )
        .unwrap();
        let roots = denominator_roots(&interp).unwrap();
        assert_eq!(roots.roots.len(), k);
        assert!(!roots.stalled);
        let mono = interp.denominator_monomial();
        let lead = mono[k];
        let sum: Complex64 = roots.roots.iter().sum();
        let product: Complex64 = roots.roots.iter().product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let expected_sum = -mono[k - 1] / lead;
        let expected_product = sign * mono[0] / lead;
        assert!((sum - expected_sum).norm() <= 1e-9 * expected_sum.norm().max(1.0), "{id} k={k}");
        assert!((product - expected_product).norm() <= 1e-9 * expected_product.norm(), "{id} k={k}");
    }
}

#[test]
fn pole_estimates_converge_at_the_predicted_rate() {
    let ps: Vec<usize> = (8..=32).step_by(2).collect();
    for (id, k) in [("two_pole", 1), ("three_pole", 1), ("three_pole", 2), ("two_pole_exp", 1), ("two_pole_poly", 1)] {
        let report = study(id, k, ps.clone(), vec![], f64::INFINITY);
        for q in &report.quantities {
            let Quantity::PoleError { m, .. } = q.quantity else { continue };
            // only the part above the noise floor is informative
            let resolved = &q.magnitudes[..q.points_used];
            let tail: Vec<f64> =
                report.p_values.iter().zip(resolved).filter(|(&p, _)| p > 12).map(|(_, &e)| e).collect();
            assert!(tail.len() >= 4, "{id} k={k} m={m}: {} resolved points beyond p = 12", tail.len());
            assert!(is_roughly_monotone(&tail, 3.0), "{id} k={k} m={m}: {tail:?}");
            assert_ne!(q.verdict, Verdict::Fail, "{id} k={k} m={m}: {:?} vs {}", q.fitted_ratio, q.bound);
        }
    }
}

/// Sweep with an odd node count `p + k`, so `|z^L - 1|` is `sqrt 2` at `z = i`
/// for every `p` instead of oscillating through the nodes.
fn odd_sweep(k: usize, p_max: usize) -> Vec<usize> {
    (8 + (k + 1) % 2..=p_max).step_by(2).collect()
}

#[test]
fn interpolants_converge_at_the_predicted_rate() {
    let probes = vec![c(0.0, 0.0), c(0.5, -0.5), c(0.0, 1.0), c(-1.4, 0.3), c(0.0, 1.5)];
    for (id, k) in [("two_pole", 1), ("three_pole", 1), ("three_pole", 2), ("two_pole_exp", 1)] {
        let report = study(id, k, odd_sweep(k, 32), probes.clone(), f64::INFINITY);
        for q in &report.quantities {
            if let Quantity::InterpolantError { probe } = q.quantity {
                assert_eq!(q.verdict, Verdict::Pass, "{id} k={k} z={probe}: {:?} vs {}", q.fitted_ratio, q.bound);
            }
        }
    }
}

#[test]
fn entire_part_converges_faster_than_any_rho() {
    let probes = vec![c(0.5, 0.3), c(0.0, 1.0), c(1.5, 0.0), c(0.0, 1.2)];
    for rho in [2.0, 3.0, 5.0, 10.0] {
        let report = study("two_pole_exp", 2, odd_sweep(2, 40), probes.clone(), rho);
        for q in &report.quantities {
            let Quantity::InterpolantError { probe } = q.quantity else { continue };
            let fitted = q.fitted_ratio.expect("error sequence above rounding level");
            assert_eq!(q.verdict, Verdict::Pass, "rho={rho} z={probe}: {fitted} vs {}", q.bound);
            if probe.norm() <= 1.0 {
                assert!(fitted <= 1.0 / rho, "rho={rho} z={probe}: {fitted}");
            }
        }
    }
}

#[test]
fn entire_part_divided_differences_decay() {
    let f = catalog("two_pole_exp").unwrap();
    let ps: Vec<usize> = (20..=40).step_by(4).collect();
    for k in [1, 2] {
        let report = theta_decay_check(&f.smooth_only(), &DISK, k, &ps, 5.0, 0.2).unwrap();
        assert!(report.passed, "k={k}: {:?} vs {}", report.measured, report.bound);
        assert!(report.measured.iter().all(|&m| m <= 1.2 / 5.0));
        assert!(report.tableau_agreement <= 1e-6, "k={k}: {}", report.tableau_agreement);
    }
}

#[test]
fn refined_constants_are_approached() {
    let f = catalog("two_pole").unwrap();
    let ps: Vec<usize> = (10..=40).step_by(2).collect();
    let RefinedOutcome::Checked(r) =
        refined_asymptotics_check(&f, &DISK, 1, 1, &ps, &[c(1.5, 0.0), c(0.0, 1.2)], None).unwrap()
    else {
        panic!("refined check did not run");
    };
    assert!((r.c_m - c(-5.0, 0.0)).norm() <= 1e-12);
    assert!(r.deviation_at(30).unwrap() <= 0.2);
    assert!(r.b_band() < 10.0);

    let not_applicable = refined_asymptotics_check(&f, &DISK, 2, 1, &ps, &[], None).unwrap();
    assert!(matches!(not_applicable, RefinedOutcome::NotApplicable { .. }));
    let equal_levels = itea::oracles::MeromorphicTestFunction::rational(
        vec![c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 3.0)],
        vec![itea::CVector::from_real(&[1.0, 0.0]), itea::CVector::from_real(&[0.0, 1.0]), itea::CVector::from_real(&[1.0, 1.0])],
    )
    .unwrap();
    let skipped = refined_asymptotics_check(&equal_levels, &DISK, 1, 1, &ps, &[], None).unwrap();
    assert!(matches!(skipped, RefinedOutcome::Skipped { .. }));
}
