//! The ITEA interpolant `R_{p,k} = U_{p,k} / V_{p,k}`.
//!
//! The coefficients `c_0, ..., c_k` (with `c_k = 1`) are fixed by requiring
//! `(q, sum_j c_j D_{j+1,p+i}) = 0` for `i = 1..k`; this is the linear
//! system `sum_{j<k} u_{i,j} c_j = -u_{i,k}` with `u_{i,j} = (q, D_{j+1,p+i})`.

use num_complex::Complex64;

use crate::divided_diff::{build_table, DividedDifferenceTable, SampleSet};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly;
use crate::types::{inner, CVector, NodeMultiset, ONE, ZERO};

/// Relative pivot threshold below which the defining system is singular.
pub const PIVOT_THRESHOLD: f64 = 1e-13;
/// `|V(z)| <= POLE_THRESHOLD * (1 + |z|)^k` counts as a zero of `V`.
pub const POLE_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct IteaConfig {
    pub p: usize,
    pub k: usize,
    pub q: CVector,
}

impl IteaConfig {
    pub fn new(p: usize, k: usize, q: CVector) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        if q.dim() == 0 || q.norm() == 0.0 {
            return Err(Error::InvalidConfig("direction q must be nonzero".into()));
        }
        if !q.is_finite() {
            return Err(Error::NonFinite("direction q"));
        }
        Ok(IteaConfig { p, k, q })
    }

    /// `q = (1, ..., 1) / sqrt(N)`.
    pub fn with_default_direction(p: usize, k: usize, dim: usize) -> Result<Self> {
        IteaConfig::new(p, k, default_direction(dim))
    }

    pub fn node_count(&self) -> usize {
        self.p + self.k
    }
}

pub fn default_direction(dim: usize) -> CVector {
    let s = 1.0 / (dim.max(1) as f64).sqrt();
    CVector::from_real(&vec![s; dim])
}

/// `u[i][j] = (q, D_{j+1,p+i})` for `i = 1..k` (rows) and `j = 0..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IteaSystem {
    pub u: Matrix,
}

impl IteaSystem {
    pub fn k(&self) -> usize {
        self.u.rows()
    }

    /// `u_{i,j}` with `i` 1-based and `j` 0-based, as written in the formulas.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.u.get(i - 1, j)
    }
}

pub fn assemble_system(table: &DividedDifferenceTable, config: &IteaConfig) -> Result<IteaSystem> {
    let (p, k) = (config.p, config.k);
    if table.len() < p + k {
        return Err(Error::Precondition(format!(
            "table spans {} nodes, need p + k = {}",
            table.len(),
            p + k
        )));
    }
    let mut u = Matrix::zeros(k, k + 1);
    for i in 1..=k {
        for j in 0..=k {
            u.set(i - 1, j, inner(&config.q, table.get(j + 1, p + i)?)?);
        }
    }
    Ok(IteaSystem { u })
}

/// Solved coefficients together with the smallest elimination pivot.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub c: Vec<Complex64>,
    pub min_pivot: f64,
}

pub fn solve_coeffs(system: &IteaSystem) -> Result<Coefficients> {
    let k = system.k();
    if k == 0 {
        return Ok(Coefficients { c: vec![ONE], min_pivot: f64::INFINITY });
    }
    let a = system.u.select_columns(&(0..k).collect::<Vec<_>>());
    let rhs: Vec<Complex64> = (0..k).map(|i| -system.u.get(i, k)).collect();
    let sol = linalg::solve(&a, &rhs, PIVOT_THRESHOLD)?;
    let mut c = sol.x;
    c.push(ONE);
    Ok(Coefficients { c, min_pivot: sol.min_pivot })
}

/// First-row cofactors `M_j = (-1)^j det(u without column j)` of the
/// denominator determinant.
pub fn cofactor_coeffs(system: &IteaSystem) -> Vec<Complex64> {
    let k = system.k();
    (0..=k)
        .map(|j| {
            let minor = linalg::determinant(&system.u.without_column(j));
            if j % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct IteaInterpolant {
    config: IteaConfig,
    coeffs: Coefficients,
    table: DividedDifferenceTable,
}

pub fn build_interpolant(
    nodes: &NodeMultiset,
    samples: &SampleSet,
    config: &IteaConfig,
) -> Result<IteaInterpolant> {
    if nodes.len() != config.node_count() {
        return Err(Error::Precondition(format!(
            "need exactly p + k = {} nodes, got {}",
            config.node_count(),
            nodes.len()
        )));
    }
    if samples.dim() != config.q.dim() {
        return Err(Error::DimensionMismatch { expected: config.q.dim(), found: samples.dim() });
    }
    let table = build_table(nodes, samples)?;
    let system = assemble_system(&table, config)?;
    let coeffs = solve_coeffs(&system)?;
    Ok(IteaInterpolant { config: config.clone(), coeffs, table })
}

impl IteaInterpolant {
    pub fn config(&self) -> &IteaConfig {
        &self.config
    }

    pub fn nodes(&self) -> &NodeMultiset {
        self.table.nodes()
    }

    pub fn table(&self) -> &DividedDifferenceTable {
        &self.table
    }

    /// `c_0, ..., c_k`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs.c
    }

    pub fn min_pivot(&self) -> f64 {
        self.coeffs.min_pivot
    }

    pub fn system(&self) -> Result<IteaSystem> {
        assemble_system(&self.table, &self.config)
    }

    /// `V_{p,k}(z) = sum_j c_j psi_{1,j}(z)`.
    pub fn eval_denominator(&self, z: Complex64) -> Complex64 {
        let nodes = self.nodes();
        let mut basis = ONE;
        let mut acc = ZERO;
        for (j, &c) in self.coeffs.c.iter().enumerate() {
            if j > 0 {
                basis *= z - nodes.node(j);
            }
            acc += c * basis;
        }
        acc
    }

    /// `U_{p,k}(z) = sum_j c_j psi_{1,j}(z) G_{j+1,p}(z)`; terms with
    /// `j >= p` have an empty Newton sum.
    pub fn eval_numerator(&self, z: Complex64) -> Result<CVector> {
        let nodes = self.nodes();
        let p = self.config.p;
        let mut basis = ONE;
        let mut acc = CVector::zeros(self.table.dim());
        for (j, &c) in self.coeffs.c.iter().enumerate() {
            if j > 0 {
                basis *= z - nodes.node(j);
            }
            if j < p {
                acc.axpy(c * basis, &self.table.newton_eval(j + 1, p, z)?);
            }
        }
        Ok(acc)
    }

    /// `R_{p,k}(z)`, refusing points where `V` vanishes to working precision.
    pub fn eval(&self, z: Complex64) -> Result<CVector> {
        let v = self.eval_denominator(z);
        let threshold = POLE_THRESHOLD * (1.0 + z.norm()).powi(self.config.k as i32);
        if !(v.norm() > threshold) {
            return Err(Error::EvalAtPole { z, magnitude: v.norm() });
        }
        let u = self.eval_numerator(z)?;
        let r = u.scale(v.inv());
        if !r.is_finite() {
            return Err(Error::NonFinite("interpolant value"));
        }
        Ok(r)
    }

    /// Monomial coefficients of `V_{p,k}`, lowest degree first.
    pub fn denominator_monomial(&self) -> Vec<Complex64> {
        let k = self.config.k;
        let shifts: Vec<Complex64> = (1..=k).map(|i| self.nodes().node(i)).collect();
        poly::newton_to_monomial(&self.coeffs.c, &shifts)
    }

    /// Taylor coefficients `R^{(s)}(a)/s!`, `s < order`, from exact
    /// polynomial expansions of `U` and `V` around `a`. These are the
    /// divided differences of `R` over a confluent run at `a`.
    pub fn taylor_coefficients(&self, a: Complex64, order: usize) -> Result<Vec<CVector>> {
        let nodes = self.nodes();
        let p = self.config.p;
        let dim = self.table.dim();
        let shift = |i: usize| nodes.node(i) - a;

        let mut v_series = vec![ZERO; order];
        let mut u_series = vec![CVector::zeros(dim); order];
        let mut psi = vec![ONE];
        for (j, &c) in self.coeffs.c.iter().enumerate() {
            if j > 0 {
                psi = truncate(poly::mul_linear(&psi, shift(j)), order);
            }
            for (s, &b) in psi.iter().enumerate() {
                v_series[s] += c * b;
            }
            if j < p {
                let g = self.newton_series(j + 1, p, a, order)?;
                for (s, &b) in psi.iter().enumerate() {
                    for t in 0..order - s {
                        u_series[s + t].axpy(c * b, &g[t]);
                    }
                }
            }
        }
        if v_series[0] == ZERO {
            return Err(Error::EvalAtPole { z: a, magnitude: 0.0 });
        }
        Ok(poly::series_div_vec(&u_series, &v_series, order))
    }

    /// Truncated Taylor series of `G_{m,n}` around `a`.
    fn newton_series(&self, m: usize, n: usize, a: Complex64, order: usize) -> Result<Vec<CVector>> {
        let nodes = self.nodes();
        let mut out = vec![CVector::zeros(self.table.dim()); order];
        let mut basis = vec![ONE];
        for i in m..=n {
            if i > m {
                basis = truncate(poly::mul_linear(&basis, nodes.node(i - 1) - a), order);
            }
            let d = self.table.get(m, i)?;
            for (s, &b) in basis.iter().enumerate() {
                out[s].axpy(b, d);
            }
        }
        Ok(out)
    }
}

fn truncate(mut v: Vec<Complex64>, order: usize) -> Vec<Complex64> {
    v.truncate(order.max(1));
    v
}

/// `(q, F(xi_{p+i}) - R(xi_{p+i}))` for `i = 1..k`.
pub fn projection_residuals(interp: &IteaInterpolant, samples: &SampleSet) -> Result<Vec<Complex64>> {
    let cfg = interp.config();
    (1..=cfg.k)
        .map(|i| {
            let x = interp.nodes().node(cfg.p + i);
            let f = samples.value(x).ok_or(Error::MissingDerivative { point: x, needed: 0, available: 0 })?;
            inner(&cfg.q, &(f - &interp.eval(x)?))
        })
        .collect()
}
