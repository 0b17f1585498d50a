//! Closed-form ground truth for rational (and meromorphic) `F` with simple
//! poles, computed without the divided-difference tableau wherever a closed
//! form exists.

mod function;

pub use function::{
    catalog, EntireFunction, EntireKind, MeromorphicTestFunction, SmoothFunction, SmoothPart, CATALOG_IDS,
};

use num_complex::Complex64;

use crate::divided_diff::{build_table, SampleSet, VectorFunction};
use crate::error::{Error, Result};
use crate::itea::{cofactor_coeffs, IteaSystem};
use crate::linalg::{determinant, Matrix};
use crate::types::{
    inner, scaled_sum, scaled_vector_sum, vandermonde, vandermonde_scaled, CVector, NodeMultiset, ScaledProduct,
    ZERO,
};

/// All `r`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

fn check_nodes(nodes: &NodeMultiset, p: usize, k: usize) -> Result<()> {
    if nodes.len() != p + k {
        return Err(Error::Precondition(format!(
            "{} nodes given, need p + k = {}",
            nodes.len(),
            p + k
        )));
    }
    Ok(())
}

fn check_not_pole(f: &MeromorphicTestFunction, z: Complex64) -> Result<()> {
    if f.poles().contains(&z) {
        return Err(Error::EvalAtPole { z, magnitude: 0.0 });
    }
    Ok(())
}

/// Divided difference of `1/(z - a)` over `xi_m, ..., xi_n`: `-1/psi_{m,n}(a)`.
pub fn omega_dd(nodes: &NodeMultiset, m: usize, n: usize, a: Complex64) -> Result<Complex64> {
    let psi = nodes.psi(m, n, a)?;
    if psi == ZERO {
        return Err(Error::PointIsNode(a));
    }
    Ok(-psi.inv())
}

/// `D_{m,n} = -sum_s v_s / psi_{m,n}(z_s)`, valid when `n - m > deg u`.
pub fn dd_closed_form(f: &MeromorphicTestFunction, nodes: &NodeMultiset, m: usize, n: usize) -> Result<CVector> {
    if n < m {
        return Err(Error::IndexOutOfRange { what: "divided difference", m, n, len: nodes.len() });
    }
    if !f.exceeds_polynomial_degree(n - m)? {
        return Err(Error::Precondition(format!("order {} does not exceed deg u", n - m)));
    }
    let mut acc = CVector::zeros(f.dim());
    for (&a, v) in f.poles().iter().zip(f.residues()) {
        acc.axpy(omega_dd(nodes, m, n, a)?, v);
    }
    Ok(acc)
}

/// `F(z) - G_{m,n}(z) = psi_{m,n}(z) sum_s v_s / ((z - z_s) psi_{m,n}(z_s))`.
pub fn remainder_closed_form(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    m: usize,
    n: usize,
    z: Complex64,
) -> Result<CVector> {
    if n + 1 < m {
        return Err(Error::IndexOutOfRange { what: "remainder", m, n, len: nodes.len() });
    }
    if !f.exceeds_polynomial_degree(n + 1 - m)? {
        return Err(Error::Precondition(format!("order {} does not exceed deg u", n + 1 - m)));
    }
    check_not_pole(f, z)?;
    let outer = nodes.psi_scaled(m, n, z)?;
    let mut acc = CVector::zeros(f.dim());
    for (&a, v) in f.poles().iter().zip(f.residues()) {
        let inner_psi = nodes.psi_scaled(m, n, a)?;
        let factor = outer
            .div(&inner_psi)
            .ok_or(Error::PointIsNode(a))?
            .apply((z - a).inv());
        acc.axpy(factor, v);
    }
    Ok(acc)
}

/// `alpha[i][s] = (q, v_s) psi_{p+i+1,p+k}(z_s)`, rows `i = 1..k`, columns
/// `s = 1..mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    pub p: usize,
    pub data: Matrix,
}

impl AlphaMatrix {
    pub fn k(&self) -> usize {
        self.data.rows()
    }

    pub fn mu(&self) -> usize {
        self.data.cols()
    }

    /// Both indices 1-based.
    pub fn get(&self, i: usize, s: usize) -> Complex64 {
        self.data.get(i - 1, s - 1)
    }
}

pub fn alpha_matrix(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
) -> Result<AlphaMatrix> {
    check_nodes(nodes, p, k)?;
    let mu = f.pole_count();
    let mut data = Matrix::zeros(k, mu);
    for (s, (&a, v)) in f.poles().iter().zip(f.residues()).enumerate() {
        let qv = inner(q, v)?;
        for i in 1..=k {
            data.set(i - 1, s, qv * nodes.psi(p + i + 1, p + k, a)?);
        }
    }
    Ok(AlphaMatrix { p, data })
}

/// `u[i][j] = -sum_s alpha[i][s] psi_{1,j}(z_s) / Psi_p(z_s)`, plus
/// `(q, Theta[xi_{j+1}, ..., xi_{p+i}])` for an entire smooth part.
pub fn u_closed_form(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
) -> Result<IteaSystem> {
    let alpha = alpha_matrix(f, nodes, p, k, q)?;
    let theta_table = match f.smooth() {
        SmoothPart::None => None,
        SmoothPart::Polynomial(_) => {
            require_closed_form(f, p, k)?;
            None
        }
        SmoothPart::Entire(_) => {
            let theta = f.smooth_only();
            Some(build_table(nodes, &SampleSet::from_function(&theta, nodes))?)
        }
    };
    let mut u = Matrix::zeros(k, k + 1);
    for (s, &a) in f.poles().iter().enumerate() {
        let big_psi = nodes.psi_scaled(1, p + k, a)?;
        for j in 0..=k {
            let ratio = nodes
                .psi_scaled(1, j, a)?
                .div(&big_psi)
                .ok_or(Error::PointIsNode(a))?;
            for i in 1..=k {
                let val = u.get(i - 1, j) - ratio.apply(alpha.get(i, s + 1));
                u.set(i - 1, j, val);
            }
        }
    }
    if let Some(table) = theta_table {
        for i in 1..=k {
            for j in 0..=k {
                let val = u.get(i - 1, j) + inner(q, table.get(j + 1, p + i)?)?;
                u.set(i - 1, j, val);
            }
        }
    }
    Ok(IteaSystem { u })
}

/// Determinant of the `alpha` columns `cols` (0-based, increasing).
pub fn t_det(alpha: &AlphaMatrix, cols: &[usize]) -> Complex64 {
    assert_eq!(cols.len(), alpha.k(), "T needs exactly k columns");
    determinant(&alpha.data.select_columns(cols))
}

/// `(-1)^{k(k-1)/2} V(z_{s_1}, ..., z_{s_k}) prod_i (q, v_{s_i})`.
pub fn t_factored(q: &CVector, residues: &[CVector], poles: &[Complex64], cols: &[usize]) -> Result<Complex64> {
    let k = cols.len();
    let points: Vec<Complex64> = cols.iter().map(|&s| poles[s]).collect();
    let mut t = vandermonde(&points);
    for &s in cols {
        t *= inner(q, &residues[s])?;
    }
    Ok(if (k * k.saturating_sub(1) / 2) % 2 == 0 { t } else { -t })
}

fn require_closed_form(f: &MeromorphicTestFunction, p: usize, k: usize) -> Result<()> {
    match f.polynomial_degree() {
        None => Err(Error::Precondition("closed form needs a rational F".into())),
        Some(Some(d)) if p <= k + d => Err(Error::Precondition("closed form needs p > k + deg u".into())),
        _ => Ok(()),
    }
}

/// `Q(z) = (-1)^k sum_S T_S V(z, z_S) / prod_{s in S} Psi_p(z_s)` as a
/// scaled value.
pub fn q_expansion_scaled(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    z: Complex64,
) -> Result<ScaledProduct> {
    require_closed_form(f, p, k)?;
    let alpha = alpha_matrix(f, nodes, p, k, q)?;
    let inv_psi = inverse_big_psi(f, nodes, p, k)?;
    let mut terms = Vec::new();
    for cols in subsets(f.pole_count(), k) {
        let mut points = vec![z];
        points.extend(cols.iter().map(|&s| f.poles()[s]));
        let mut scale = vandermonde_scaled(&points);
        for &s in &cols {
            scale = scale.mul(&inv_psi[s]);
        }
        terms.push((t_det(&alpha, &cols), scale));
    }
    let mut sum = scaled_sum(terms);
    if k % 2 == 1 {
        sum.phase = -sum.phase;
    }
    Ok(sum)
}

pub fn q_expansion(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    z: Complex64,
) -> Result<Complex64> {
    Ok(q_expansion_scaled(f, nodes, p, k, q, z)?.value())
}

/// The `(k+1) x (k+1)` determinant with first row `psi_{1,j}(z)` over the
/// rows of `u`.
pub fn q_determinant(system: &IteaSystem, nodes: &NodeMultiset, z: Complex64) -> Result<Complex64> {
    let k = system.k();
    let mut rows = vec![(0..=k).map(|j| nodes.psi(1, j, z)).collect::<Result<Vec<_>>>()?];
    rows.extend((0..k).map(|i| system.u.row(i).to_vec()));
    Ok(determinant(&Matrix::from_rows(rows)))
}

fn inverse_big_psi(f: &MeromorphicTestFunction, nodes: &NodeMultiset, p: usize, k: usize) -> Result<Vec<ScaledProduct>> {
    f.poles()
        .iter()
        .map(|&a| nodes.psi_scaled(1, p + k, a)?.recip().ok_or(Error::PointIsNode(a)))
        .collect()
}

/// `e_s(z) = v_s psi_{p+1,p+k}(z_s) / (z - z_s)`.
pub fn e_hat(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    z: Complex64,
) -> Result<Vec<CVector>> {
    check_not_pole(f, z)?;
    f.poles()
        .iter()
        .zip(f.residues())
        .map(|(&a, v)| Ok(v.scale(nodes.psi(p + 1, p + k, a)? / (z - a))))
        .collect()
}

/// `T^_S(z)` expanded along its first row of `e` vectors.
pub fn t_hat(alpha: &AlphaMatrix, e: &[CVector], cols: &[usize]) -> CVector {
    assert_eq!(cols.len(), alpha.k() + 1, "T^ needs k + 1 columns");
    let dim = e.first().map_or(0, CVector::dim);
    let mut acc = CVector::zeros(dim);
    for l in 0..cols.len() {
        let rest: Vec<usize> = cols.iter().enumerate().filter(|&(i, _)| i != l).map(|(_, &s)| s).collect();
        let t = t_det(alpha, &rest);
        acc.axpy(if l % 2 == 0 { t } else { -t }, &e[cols[l]]);
    }
    acc
}

/// `F(z) - R_{p,k}(z)` from the subset expansions of numerator and
/// denominator determinants; exactly zero when `k = mu`.
pub fn error_closed_form(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    z: Complex64,
) -> Result<CVector> {
    require_closed_form(f, p, k)?;
    check_not_pole(f, z)?;
    let mu = f.pole_count();
    if k >= mu {
        return Ok(CVector::zeros(f.dim()));
    }
    let alpha = alpha_matrix(f, nodes, p, k, q)?;
    let inv_psi = inverse_big_psi(f, nodes, p, k)?;
    let e = e_hat(f, nodes, p, k, z)?;

    let numerator = subsets(mu, k + 1).into_iter().map(|cols| {
        let points: Vec<Complex64> = cols.iter().map(|&s| f.poles()[s]).collect();
        let scale = cols.iter().fold(vandermonde_scaled(&points), |acc, &s| acc.mul(&inv_psi[s]));
        (t_hat(&alpha, &e, &cols), scale)
    });
    let (num, num_log) = scaled_vector_sum(f.dim(), numerator);

    let mut den_terms = Vec::new();
    for cols in subsets(mu, k) {
        let mut points = vec![z];
        points.extend(cols.iter().map(|&s| f.poles()[s]));
        let scale = cols.iter().fold(vandermonde_scaled(&points), |acc, &s| acc.mul(&inv_psi[s]));
        den_terms.push((t_det(&alpha, &cols), scale));
    }
    let den = scaled_sum(den_terms);
    if den.is_exact_zero() {
        return Err(Error::EvalAtPole { z, magnitude: 0.0 });
    }
    let lead = nodes.psi_scaled(1, p, z)?;
    if lead.is_exact_zero() || num.norm() == 0.0 {
        return Ok(CVector::zeros(f.dim()));
    }
    let factor = lead.phase / den.phase * (num_log + lead.log_magnitude - den.log_magnitude).exp();
    Ok(num.scale(factor))
}

/// `F(z) - R_{p,k}(z) = Delta(z) / Q(z)` with both determinants expanded
/// along their first rows using cofactors of the closed-form `u`.
pub fn error_via_determinant(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    z: Complex64,
) -> Result<CVector> {
    if k > p {
        return Err(Error::Precondition("determinant form needs k <= p".into()));
    }
    check_not_pole(f, z)?;
    let system = u_closed_form(f, nodes, p, k, q)?;
    let cof = cofactor_coeffs(&system);
    let e = e_hat(f, nodes, p, k, z)?;
    let inv_psi = inverse_big_psi(f, nodes, p, k)?;
    let lead = nodes.psi(1, p, z)?;

    let mut delta = CVector::zeros(f.dim());
    let mut q_val = ZERO;
    let mut q_mag = 0.0;
    for (j, &mj) in cof.iter().enumerate() {
        let basis = nodes.psi(1, j, z)?;
        q_val += mj * basis;
        q_mag += (mj * basis).norm();

        let mut dj = CVector::zeros(f.dim());
        for (s, &a) in f.poles().iter().enumerate() {
            let w = inv_psi[s].apply(nodes.psi(1, j, a)?);
            dj.axpy(w, &e[s]);
        }
        if !matches!(f.smooth(), SmoothPart::None) {
            dj += &smooth_dd_with_point(f, nodes, j + 1, p, z)?;
        }
        delta.axpy(mj * lead, &dj);
    }
    if q_val.norm() <= 1e-14 * q_mag || q_val == ZERO {
        return Err(Error::EvalAtPole { z, magnitude: q_val.norm() });
    }
    Ok(delta.scale(q_val.inv()))
}

/// `Theta[xi_m, ..., xi_n, z]` by the tableau on the smooth part alone.
fn smooth_dd_with_point(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    m: usize,
    n: usize,
    z: Complex64,
) -> Result<CVector> {
    let mut pts = nodes.nodes()[m - 1..n].to_vec();
    pts.push(z);
    let ms = NodeMultiset::new(pts)?;
    let theta = f.smooth_only();
    let table = build_table(&ms, &SampleSet::from_function(&theta, &ms))?;
    Ok(table.get(1, ms.len())?.clone())
}

fn refined_setup(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
) -> Result<(AlphaMatrix, Complex64)> {
    if k == 0 || f.pole_count() < k + 1 {
        return Err(Error::Precondition("refined constants need 1 <= k < mu".into()));
    }
    let alpha = alpha_matrix(f, nodes, p, k, q)?;
    let t_first = t_det(&alpha, &(0..k).collect::<Vec<_>>());
    if t_first.norm() <= 1e-14 * alpha.data.max_abs().powi(k as i32) {
        return Err(Error::Precondition("T_{1..k} vanishes".into()));
    }
    Ok((alpha, t_first))
}

/// `C_m` of the refined pole asymptotics; poles are taken in the order stored
/// in `f` (sorted by level). `m` is 1-based.
pub fn refined_pole_constant(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    m: usize,
) -> Result<Complex64> {
    if m == 0 || m > k {
        return Err(Error::Precondition(format!("need 1 <= m <= k, got m = {m}, k = {k}")));
    }
    let (alpha, t_first) = refined_setup(f, nodes, p, k, q)?;
    let zs = f.poles();
    let zk1 = zs[k];
    let without_m: Vec<usize> = (0..=k).filter(|&i| i != m - 1).collect();
    let mut c = t_det(&alpha, &without_m) / t_first * (zk1 - zs[m - 1]);
    for i in (0..k).filter(|&i| i != m - 1) {
        c *= (zk1 - zs[i]) / (zs[m - 1] - zs[i]);
    }
    Ok(if (k - m) % 2 == 1 { -c } else { c })
}

/// `B_p(z)` of the refined error asymptotics.
pub fn refined_error_constant(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    z: Complex64,
) -> Result<CVector> {
    let (alpha, t_first) = refined_setup(f, nodes, p, k, q)?;
    let zs = f.poles();
    let e = e_hat(f, nodes, p, k, z)?;
    let mut factor = t_first.inv();
    for &zi in &zs[..k] {
        factor *= (zs[k] - zi) / (z - zi);
    }
    if k % 2 == 1 {
        factor = -factor;
    }
    Ok(t_hat(&alpha, &e, &(0..=k).collect::<Vec<_>>()).scale(factor))
}

/// `(C_m, B_p(z))`.
pub fn refined_constants(
    f: &MeromorphicTestFunction,
    nodes: &NodeMultiset,
    p: usize,
    k: usize,
    q: &CVector,
    m: usize,
    z: Complex64,
) -> Result<(Complex64, CVector)> {
    Ok((
        refined_pole_constant(f, nodes, p, k, q, m)?,
        refined_error_constant(f, nodes, p, k, q, z)?,
    ))
}

/// `f[points]` by the trapezoid rule on the circle `|t - center| = radius`,
/// which must enclose every point while `f` stays analytic inside.
pub fn contour_divided_difference<F: VectorFunction + ?Sized>(
    f: &F,
    points: &[Complex64],
    center: Complex64,
    radius: f64,
    samples: usize,
) -> Result<CVector> {
    if points.iter().any(|&x| (x - center).norm() >= radius) {
        return Err(Error::Precondition("contour must enclose all points".into()));
    }
    let mut terms = Vec::with_capacity(samples);
    for l in 0..samples {
        let t = center + Complex64::from_polar(radius, std::f64::consts::TAU * l as f64 / samples as f64);
        let mut denom = ScaledProduct::ONE;
        for &x in points {
            denom = denom.mul(&ScaledProduct::from_complex(t - x));
        }
        let w = ScaledProduct::from_complex(t - center)
            .div(&denom)
            .ok_or(Error::PointIsNode(t))?;
        terms.push((f.value(t), w));
    }
    let (sum, log_scale) = scaled_vector_sum(f.dim(), terms);
    Ok(sum.scale(Complex64::new(log_scale.exp() / samples as f64, 0.0)))
}
