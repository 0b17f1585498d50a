//! Generalized Hermite divided differences and Newton-form interpolation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{CVector, NodeMultiset};

/// A vector-valued function that can report derivatives of any order.
pub trait VectorFunction {
    fn dim(&self) -> usize;

    /// `F^{(order)}(z)`, the raw (unscaled) derivative.
    fn derivative(&self, z: Complex64, order: usize) -> CVector;

    fn value(&self, z: Complex64) -> CVector {
        self.derivative(z, 0)
    }
}

/// Function samples for interpolation in the generalized Hermite sense:
/// for each distinct point, `[F(a), F'(a), ..., F^{(r-1)}(a)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    entries: Vec<(Complex64, Vec<CVector>)>,
}

impl SampleSet {
    pub fn new(dim: usize) -> Self {
        SampleSet {
            dim,
            entries: Vec::new(),
        }
    }

    /// Samples every group of `nodes` with as many derivatives as its
    /// multiplicity.
    pub fn from_function<F: VectorFunction + ?Sized>(f: &F, nodes: &NodeMultiset) -> Self {
        let mut set = SampleSet::new(f.dim());
        for g in nodes.groups() {
            let derivs = (0..g.multiplicity).map(|j| f.derivative(g.point, j)).collect();
            set.entries.push((g.point, derivs));
        }
        set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds (or replaces) the derivative list for `point`.
    pub fn insert(&mut self, point: Complex64, derivatives: Vec<CVector>) -> Result<()> {
        if let Some(bad) = derivatives.iter().find(|d| d.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: bad.dim(),
            });
        }
        if derivatives.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("sample values"));
        }
        match self.entries.iter_mut().find(|(p, _)| *p == point) {
            Some(entry) => entry.1 = derivatives,
            None => self.entries.push((point, derivatives)),
        }
        Ok(())
    }

    pub fn derivatives(&self, point: Complex64) -> Option<&[CVector]> {
        self.entries
            .iter()
            .find(|(p, _)| *p == point)
            .map(|(_, d)| d.as_slice())
    }

    /// `F(point)`, when sampled.
    pub fn value(&self, point: Complex64) -> Option<&CVector> {
        self.derivatives(point).and_then(|d| d.first())
    }

    pub fn max_norm(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|(_, d)| d.first())
            .map(CVector::norm)
            .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> &[(Complex64, Vec<CVector>)] {
        &self.entries
    }

    fn ensure_covers(&self, nodes: &NodeMultiset) -> Result<()> {
        for g in nodes.groups() {
            let available = self.derivatives(g.point).map_or(0, <[CVector]>::len);
            if available < g.multiplicity {
                return Err(Error::MissingDerivative {
                    point: g.point,
                    needed: g.multiplicity - 1,
                    available,
                });
            }
        }
        Ok(())
    }
}

/// Triangular table `D[m][n] = F[xi_m, ..., xi_n]`, 1-based, `m <= n`.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    nodes: NodeMultiset,
    dim: usize,
    // row m (0-based) holds D[m+1][m+1..=L]
    rows: Vec<Vec<CVector>>,
}

impl DividedDifferenceTable {
    pub fn nodes(&self) -> &NodeMultiset {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D[m][n]` for `1 <= m <= n <= L`.
    pub fn get(&self, m: usize, n: usize) -> Result<&CVector> {
        if m < 1 || n < m || n > self.len() {
            return Err(Error::IndexOutOfRange {
                what: "divided difference",
                m,
                n,
                len: self.len(),
            });
        }
        Ok(&self.rows[m - 1][n - m])
    }

    /// `G_{m,n}(z) = sum_{i=m}^{n} D[m][i] psi_{m,i-1}(z)`, by nested
    /// multiplication over the Newton basis.
    pub fn newton_eval(&self, m: usize, n: usize, z: Complex64) -> Result<CVector> {
        let top = self.get(m, n)?;
        let mut acc = top.clone();
        for i in (m..n).rev() {
            acc = acc.scale(z - self.nodes.node(i));
            acc += &self.rows[m - 1][i - m];
        }
        Ok(acc)
    }
}

/// Fills the divided-difference table by the standard recurrence, with
/// `F^{(s)}(a)/s!` on confluent runs.
pub fn build_table(nodes: &NodeMultiset, samples: &SampleSet) -> Result<DividedDifferenceTable> {
    samples.ensure_covers(nodes)?;
    let len = nodes.len();
    let dim = samples.dim();
    let mut rows: Vec<Vec<CVector>> = (0..len)
        .map(|m| {
            let d = samples.derivatives(nodes.node(m + 1)).expect("covered");
            let mut row = Vec::with_capacity(len - m);
            row.push(d[0].clone());
            row
        })
        .collect();

    let mut factorial = 1.0;
    for s in 1..len {
        factorial *= s as f64;
        for m in 1..=len - s {
            let n = m + s;
            let (a, b) = (nodes.node(m), nodes.node(n));
            let entry = if a == b {
                let d = samples.derivatives(a).expect("covered");
                d[s].scale(Complex64::new(1.0 / factorial, 0.0))
            } else {
                let upper = &rows[m][s - 1]; // D[m+1][n]
                let left = &rows[m - 1][s - 1]; // D[m][n-1]
                (upper - left).scale((b - a).inv())
            };
            rows[m - 1].push(entry);
        }
    }
    Ok(DividedDifferenceTable { nodes: nodes.clone(), dim, rows })
}

/// Largest entrywise difference between the table on `nodes` and the table
/// on nodes where every confluent run `a, a, ..., a` is spread out to
/// `a, a + gap, a + 2 gap, ...`.
pub fn confluent_limit_check<F: VectorFunction + ?Sized>(
    f: &F,
    nodes: &NodeMultiset,
    gap: f64,
) -> Result<f64> {
    if !nodes.has_confluent_runs() {
        return Ok(0.0);
    }
    let spread: Vec<Complex64> = nodes
        .groups()
        .iter()
        .flat_map(|g| (0..g.multiplicity).map(move |t| g.point + Complex64::new(gap * t as f64, 0.0)))
        .collect();
    let spread = NodeMultiset::new(spread)?;
    let confluent = build_table(nodes, &SampleSet::from_function(f, nodes))?;
    let distinct = build_table(&spread, &SampleSet::from_function(f, &spread))?;
    let len = nodes.len();
    let mut worst: f64 = 0.0;
    for m in 1..=len {
        for n in m..=len {
            worst = worst.max((confluent.get(m, n)? - distinct.get(m, n)?).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `v / (z - a)` with closed-form derivatives.
    struct Pole {
        a: Complex64,
        v: CVector,
    }

    impl VectorFunction for Pole {
        fn dim(&self) -> usize {
            self.v.dim()
        }
        fn derivative(&self, z: Complex64, order: usize) -> CVector {
            let fact: f64 = (1..=order).map(|i| i as f64).product();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            self.v.scale(c(sign * fact, 0.0) / (z - self.a).powu(order as u32 + 1))
        }
    }

    struct Linear {
        a: CVector,
        b: CVector,
    }

    impl VectorFunction for Linear {
        fn dim(&self) -> usize {
            self.a.dim()
        }
        fn derivative(&self, z: Complex64, order: usize) -> CVector {
            match order {
                0 => &self.a + &self.b.scale(z),
                1 => self.b.clone(),
                _ => CVector::zeros(self.a.dim()),
            }
        }
    }

    fn reals(xs: &[f64]) -> NodeMultiset {
        NodeMultiset::new(xs.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn ones() -> CVector {
        CVector::from_real(&[1.0, 1.0])
    }

    #[test]
    fn constants_are_annihilated() {
        let k = Linear {
            a: CVector::new(vec![c(2.0, -1.0), c(0.5, 0.0)]),
            b: CVector::zeros(2),
        };
        let nodes = reals(&[0.0, 1.0, 2.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&k, &nodes)).unwrap();
        assert_eq!(t.get(1, 3).unwrap().norm(), 0.0);
    }

    #[test]
    fn single_pole_tableau() {
        // F(0) = -v/3, F(1) = -v/2, F(2) = -v; D[1][3] = -v/psi_{1,3}(3) = -v/6
        let f = Pole { a: c(3.0, 0.0), v: ones() };
        let nodes = reals(&[0.0, 1.0, 2.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
        let first = (&f.value(c(1.0, 0.0)) - &f.value(ZERO_C)).scale(c(1.0, 0.0));
        let second = &f.value(c(2.0, 0.0)) - &f.value(c(1.0, 0.0));
        let by_hand = (&second - &first).scale(c(0.5, 0.0));
        let expected = CVector::from_real(&[-1.0 / 6.0, -1.0 / 6.0]);
        assert!((&by_hand - &expected).norm() < 1e-15);
        assert!((t.get(1, 3).unwrap() - &expected).norm() < 1e-15);
    }

    const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn confluent_rule_uses_derivative() {
        let f = Pole { a: c(2.0, 0.0), v: ones() };
        let nodes = reals(&[0.0, 0.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
        let expected = ones().scale(c(-0.25, 0.0));
        assert!((t.get(1, 2).unwrap() - &expected).norm() < 1e-15);
    }

    #[test]
    fn confluent_rule_divides_by_factorial() {
        // F = z^3 (one component): F[0,0,0,0] = 1, F[0,0,0] = 0
        struct Cube;
        impl VectorFunction for Cube {
            fn dim(&self) -> usize {
                1
            }
            fn derivative(&self, z: Complex64, order: usize) -> CVector {
                let v = match order {
                    0 => z * z * z,
                    1 => 3.0 * z * z,
                    2 => 6.0 * z,
                    3 => c(6.0, 0.0),
                    _ => ZERO_C,
                };
                CVector::new(vec![v])
            }
        }
        let nodes = reals(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&Cube, &nodes)).unwrap();
        assert!((t.get(1, 4).unwrap()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(t.get(1, 3).unwrap()[0].norm() < 1e-15);
        assert!(t.get(1, 5).unwrap()[0].norm() < 1e-14);
    }

    #[test]
    fn missing_derivatives_are_reported() {
        let nodes = reals(&[0.0, 0.0, 1.0]);
        let mut s = SampleSet::new(1);
        s.insert(ZERO_C, vec![CVector::from_real(&[1.0])]).unwrap();
        s.insert(c(1.0, 0.0), vec![CVector::from_real(&[2.0])]).unwrap();
        let err = build_table(&nodes, &s).unwrap_err();
        assert!(matches!(err, Error::MissingDerivative { needed: 1, available: 1, .. }));
    }

    #[test]
    fn newton_eval_examples() {
        let f = Pole { a: c(3.0, 0.0), v: ones() };
        let nodes = reals(&[0.0, 1.0, 2.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
        let z = c(0.3, -1.7);
        assert_eq!(t.newton_eval(2, 2, z).unwrap(), f.value(c(1.0, 0.0)));
        let at_node = t.newton_eval(1, 3, c(1.0, 0.0)).unwrap();
        assert!((&at_node - &ones().scale(c(-0.5, 0.0))).norm() < 1e-15);
        assert!(t.newton_eval(2, 4, z).is_err());

        let lin = Linear {
            a: CVector::new(vec![c(1.0, 1.0), c(-2.0, 0.0)]),
            b: CVector::new(vec![c(0.0, 3.0), c(0.5, 0.5)]),
        };
        let nodes = reals(&[0.0, 1.0]);
        let t = build_table(&nodes, &SampleSet::from_function(&lin, &nodes)).unwrap();
        for z in [c(5.0, 2.0), c(-1.0, 0.25)] {
            assert!((&t.newton_eval(1, 2, z).unwrap() - &lin.value(z)).norm() < 1e-13);
        }
    }

    #[test]
    fn confluent_limit_check_examples() {
        let f = Pole { a: c(2.0, 0.0), v: ones() };
        let nodes = reals(&[0.0, 0.0]);
        let d5 = confluent_limit_check(&f, &nodes, 1e-5).unwrap();
        let d7 = confluent_limit_check(&f, &nodes, 1e-7).unwrap();
        assert!(d5 <= 1e-4 * ones().norm());
        assert!(d7 < d5);
        assert_eq!(confluent_limit_check(&f, &reals(&[0.0, 1.0]), 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn confluent_limit_check_refines() {
        let f = Pole { a: c(-1.5, 0.5), v: CVector::new(vec![c(1.0, 0.0), c(0.0, 2.0)]) };
        let nodes = NodeMultiset::new(vec![c(0.2, 0.0), c(0.2, 0.0), c(0.5, 0.1), c(-0.3, 0.0), c(-0.3, 0.0)]).unwrap();
        let gaps = [1e-3, 1e-4, 1e-5];
        let diffs: Vec<f64> = gaps.iter().map(|&g| confluent_limit_check(&f, &nodes, g).unwrap()).collect();
        assert!(diffs[0] > diffs[1] && diffs[1] > diffs[2], "{diffs:?}");
    }

    fn arb_nodes() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..8)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect::<Vec<_>>())
            .prop_filter("well separated", |v| {
                v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a - b).norm() > 0.2))
            })
    }

    proptest! {
        #[test]
        fn top_entry_is_permutation_symmetric(xs in arb_nodes(), seed in 0u64..1000) {
            let f = Pole { a: c(2.5, 0.7), v: CVector::new(vec![c(1.0, -1.0), c(0.3, 0.0)]) };
            let nodes = NodeMultiset::new(xs.clone()).unwrap();
            let t = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
            let mut perm = xs.clone();
            // deterministic shuffle driven by the seed
            let len = perm.len();
            for i in (1..len).rev() {
                let j = ((seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64)) >> 7) as usize % (i + 1);
                perm.swap(i, j);
            }
            let pn = NodeMultiset::new(perm.clone()).unwrap();
            let tp = build_table(&pn, &SampleSet::from_function(&f, &pn)).unwrap();
            let (a, b) = (t.get(1, len).unwrap(), tp.get(1, len).unwrap());
            prop_assert!(a.relative_distance(b) < 1e-10);

            perm.reverse();
            let pr = NodeMultiset::new(xs.iter().rev().copied().collect()).unwrap();
            let tr = build_table(&pr, &SampleSet::from_function(&f, &pr)).unwrap();
            prop_assert!(a.relative_distance(tr.get(1, len).unwrap()) < 1e-12);
        }

        #[test]
        fn newton_form_interpolates(xs in arb_nodes()) {
            let f = Pole { a: c(-2.0, 1.0), v: CVector::new(vec![c(0.0, 1.0), c(2.0, 0.0)]) };
            let nodes = NodeMultiset::new(xs.clone()).unwrap();
            let t = build_table(&nodes, &SampleSet::from_function(&f, &nodes)).unwrap();
            for &x in &xs {
                let g = t.newton_eval(1, xs.len(), x).unwrap();
                prop_assert!(g.relative_distance(&f.value(x)) < 1e-11);
            }
        }
    }
}
