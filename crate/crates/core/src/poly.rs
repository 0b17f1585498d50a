//! Polynomials in the monomial basis (coefficients lowest degree first),
//! conversion from Newton bases, and simultaneous root finding.

use num_complex::Complex64;

use crate::types::{CVector, ONE, ZERO};

/// Expands `sum_j coeffs[j] * prod_{i<j} (w - shifts[i])` into monomial
/// coefficients in `w` by sequential synthetic multiplication.
pub fn newton_to_monomial(coeffs: &[Complex64], shifts: &[Complex64]) -> Vec<Complex64> {
    assert!(shifts.len() + 1 >= coeffs.len());
    let mut out = vec![ZERO; coeffs.len()];
    let mut basis = vec![ONE];
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            basis = mul_linear(&basis, shifts[j - 1]);
        }
        for (o, b) in out.iter_mut().zip(basis.iter()) {
            *o += c * b;
        }
    }
    out
}

/// `poly * (w - r)`
pub fn mul_linear(poly: &[Complex64], r: Complex64) -> Vec<Complex64> {
    let mut out = vec![ZERO; poly.len() + 1];
    for (i, &a) in poly.iter().enumerate() {
        out[i + 1] += a;
        out[i] -= r * a;
    }
    out
}

pub fn horner(poly: &[Complex64], z: Complex64) -> Complex64 {
    poly.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

pub fn derivative(poly: &[Complex64]) -> Vec<Complex64> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// Truncated power series in `w = z - center` (scalar).
pub fn series_mul(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; order];
    for (i, &x) in a.iter().enumerate().take(order) {
        for (j, &y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Vector series divided by a scalar series with nonzero constant term.
pub fn series_div_vec(num: &[CVector], den: &[Complex64], order: usize) -> Vec<CVector> {
    assert!(den[0] != ZERO, "series division by a series vanishing at the center");
    let dim = num.first().map_or(0, CVector::dim);
    let mut out: Vec<CVector> = Vec::with_capacity(order);
    for n in 0..order {
        let mut acc = num.get(n).cloned().unwrap_or_else(|| CVector::zeros(dim));
        for j in 1..=n.min(den.len() - 1) {
            acc.axpy(-den[j], &out[n - j]);
        }
        out.push(acc.scale(den[0].inv()));
    }
    out
}

/// Result of simultaneous root finding.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    /// Set when the iteration limit was reached before convergence; the
    /// roots are then the best iterate.
    pub stalled: bool,
}

/// All roots of a polynomial by Aberth–Ehrlich iteration.
///
/// `poly` holds coefficients lowest degree first; the leading coefficient
/// must be nonzero. Iteration stops once the largest correction relative to
/// its root falls below `tol`.
pub fn aberth(poly: &[Complex64], tol: f64, max_iter: usize) -> RootSet {
    let degree = poly.len().saturating_sub(1);
    if degree == 0 {
        return RootSet { roots: vec![], iterations: 0, stalled: false };
    }
    let lead = poly[degree];
    assert!(lead != ZERO, "leading coefficient must be nonzero");
    let monic: Vec<Complex64> = poly.iter().map(|&a| a / lead).collect();
    if degree == 1 {
        return RootSet { roots: vec![-monic[0]], iterations: 0, stalled: false };
    }
    let dpoly = derivative(&monic);

    let radius = 1.0 + monic[..degree].iter().map(|a| a.norm()).fold(0.0, f64::max);
    // offset angle keeps guesses off symmetry axes of real polynomials
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|i| Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / degree as f64 + 0.4))
        .collect();

    for iter in 1..=max_iter {
        let mut worst: f64 = 0.0;
        for i in 0..degree {
            let zi = roots[i];
            let p = horner(&monic, zi);
            if p == ZERO {
                continue;
            }
            let ratio = p / horner(&dpoly, zi);
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            roots[i] = zi - step;
            worst = worst.max(step.norm() / roots[i].norm().max(f64::MIN_POSITIVE));
        }
        if worst < tol {
            return RootSet { roots, iterations: iter, stalled: false };
        }
    }
    RootSet { roots, iterations: max_iter, stalled: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v
    }

    #[test]
    fn newton_basis_expansion() {
        // 2 + 3 (w - 1) + (w - 1)(w + 2) = w^2 + 4w - 3
        let m = newton_to_monomial(&[c(2.0, 0.0), c(3.0, 0.0), ONE], &[ONE, c(-2.0, 0.0)]);
        assert_eq!(m, vec![c(-3.0, 0.0), c(4.0, 0.0), ONE]);
    }

    #[test]
    fn aberth_finds_known_roots() {
        let r = aberth(&[c(-1.0, 0.0), ZERO, ONE], 1e-12, 200);
        assert!(!r.stalled);
        let r = sorted_re(r.roots);
        assert!((r[0] + ONE).norm() < 1e-12 && (r[1] - ONE).norm() < 1e-12);

        let targets = [c(2.0, 0.0), c(-3.0, 0.0), c(0.5, 1.5), c(0.5, -1.5), c(-1.0, 0.2)];
        let mut poly = vec![ONE];
        for &t in &targets {
            poly = mul_linear(&poly, t);
        }
        let found = aberth(&poly, 1e-12, 200);
        assert!(!found.stalled);
        for t in targets {
            let d = found.roots.iter().map(|r| (r - t).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "missing root {t}");
        }
    }

    #[test]
    fn aberth_linear_and_constant() {
        let r = aberth(&[c(-3.0, 0.0), ONE], 1e-12, 200);
        assert_eq!(r.roots, vec![c(3.0, 0.0)]);
        assert!(aberth(&[c(2.0, 0.0)], 1e-12, 200).roots.is_empty());
    }

    #[test]
    fn aberth_reports_stall() {
        let mut poly = vec![ONE];
        for t in [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)] {
            poly = mul_linear(&poly, t);
        }
        let r = aberth(&poly, 1e-300, 3);
        assert!(r.stalled);
        assert_eq!(r.roots.len(), 4);
    }

    #[test]
    fn series_division_inverts_multiplication() {
        let a = [c(1.0, 0.0), c(2.0, 1.0), c(-0.5, 0.0)];
        let b = [c(2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(3.0, 0.0)];
        let prod = series_mul(&a, &b, 4);
        let num: Vec<CVector> = prod.iter().map(|&x| CVector::new(vec![x])).collect();
        let back = series_div_vec(&num, &b, 3);
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x[0] - y).norm() < 1e-14);
        }
    }
}
