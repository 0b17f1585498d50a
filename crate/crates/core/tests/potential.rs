use itea::potential::{bound_error_rate, bound_pole_rate, verify_node_asymptotics, Geometry, NodeFamily};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn disk_level_is_scaled_modulus(r in 0.5..3.0f64, t in 0.0..std::f64::consts::TAU, s in 1.01..5.0f64) {
        let z = Complex64::from_polar(r * s, t);
        prop_assert_eq!(Geometry::Disk { radius: r }.phi(z).unwrap(), z.norm() / r);
    }

    #[test]
    fn interval_level_on_the_real_axis(x in 1.001..20.0f64, negative in any::<bool>()) {
        let z = c(if negative { -x } else { x }, 0.0);
        let expected = x + (x * x - 1.0).sqrt();
        prop_assert!((Geometry::Interval.phi(z).unwrap() - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn bounds_are_monotone_in_the_levels(a in 1.1..3.0f64, gap in 0.1..2.0f64, extra in 0.1..2.0f64, z in 1.0..4.0f64) {
        let g = Geometry::Disk { radius: 1.0 };
        let near = vec![c(a, 0.0), c(a + gap, 0.0)];
        let farther_first = vec![c(a + 0.5 * gap, 0.0), c(a + gap, 0.0)];
        let farther_second = vec![c(a, 0.0), c(a + gap + extra, 0.0)];
        let base = bound_pole_rate(&g, &near, 1, 1, f64::INFINITY).unwrap();
        prop_assert!(bound_pole_rate(&g, &farther_first, 1, 1, f64::INFINITY).unwrap() > base);
        prop_assert!(bound_pole_rate(&g, &farther_second, 1, 1, f64::INFINITY).unwrap() < base);
        let probe = c(0.0, z);
        let e = bound_error_rate(&g, &near, 1, probe, f64::INFINITY).unwrap();
        prop_assert!(bound_error_rate(&g, &farther_second, 1, probe, f64::INFINITY).unwrap() < e);
    }
}

#[test]
fn nodal_products_follow_capacity_times_level() {
    let ps: Vec<usize> = (20..=40).step_by(4).collect();
    let cases = [
        (NodeFamily::Disk { radius: 1.0 }, vec![c(1.5, 0.0), c(0.0, -1.3), c(-2.0, 1.0), c(1.1, 1.1), c(3.0, 0.0)]),
        (NodeFamily::Disk { radius: 0.5 }, vec![c(0.8, 0.0), c(0.0, 1.0), c(-1.0, 0.5), c(0.6, 0.6), c(2.0, 0.0)]),
        (NodeFamily::Chebyshev, vec![c(1.2, 0.0), c(0.0, 0.5), c(-2.0, 1.0), c(0.3, -0.3), c(-2.5, 0.0)]),
    ];
    for (family, probes) in cases {
        let g = family.geometry();
        let kappa = g.capacity().unwrap();
        for z in probes {
            let target = kappa * g.phi(z).unwrap();
            // p + k factors under a 1/p root: the excess (kappa Phi)^(k/p) must stay small
            for k in [0, 1] {
                let values = verify_node_asymptotics(&family, z, k, &ps).unwrap();
                for (p, v) in ps.iter().zip(values) {
                    assert!((v - target).abs() <= 0.1 * target, "{family:?} z={z} k={k} p={p}: {v} vs {target}");
                }
            }
        }
    }
}

#[test]
fn infinite_rho_gives_zero_bound_when_k_is_mu() {
    let g = Geometry::Disk { radius: 1.0 };
    let poles = [c(2.0, 0.0), c(-2.5, 0.0)];
    assert_eq!(bound_error_rate(&g, &poles, 2, c(1.5, 0.0), f64::INFINITY).unwrap(), 0.0);
    assert_eq!(bound_error_rate(&g, &poles, 2, c(1.5, 0.0), 5.0).unwrap(), 0.3);
    assert!(bound_pole_rate(&g, &[c(-3.0, 0.0), c(2.0, 0.0)], 1, 1, f64::INFINITY).is_err());
}
