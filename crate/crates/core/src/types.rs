//! Scalars, vectors in C^N, node multisets and nodal products.
//!
//! Node positions in this crate are 1-based wherever they index into a
//! node list, so that `psi(m, n, z)` is the product over positions `m..=n`
//! and the empty range is `n == m - 1`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An element of C^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVector(Vec<Complex64>);

impl CVector {
    pub fn new(components: Vec<Complex64>) -> Self {
        CVector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        CVector(vec![ZERO; dim])
    }

    pub fn from_real(components: &[f64]) -> Self {
        CVector(components.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> CVector {
        CVector(self.0.iter().map(|&c| c * s).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Complex64, other: &CVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, &b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += s * b;
        }
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`; zero when both vanish.
    pub fn relative_distance(&self, other: &CVector) -> f64 {
        let diff = (self - other).norm();
        let scale = self.norm().max(other.norm());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl From<Vec<Complex64>> for CVector {
    fn from(v: Vec<Complex64>) -> Self {
        CVector(v)
    }
}

impl<'a> Add<&'a CVector> for &'a CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a CVector> for &'a CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&CVector> for CVector {
    fn add_assign(&mut self, rhs: &CVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&CVector> for CVector {
    fn sub_assign(&mut self, rhs: &CVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
    }
}

impl Mul<Complex64> for &CVector {
    type Output = CVector;
    fn mul(self, s: Complex64) -> CVector {
        self.scale(s)
    }
}

impl Neg for &CVector {
    type Output = CVector;
    fn neg(self) -> CVector {
        CVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Sesquilinear inner product, conjugating the first argument.
pub fn inner(q: &CVector, v: &CVector) -> Result<Complex64> {
    if q.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: v.dim(),
        });
    }
    Ok(q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// `a+bi` with shortest round-trip formatting of both parts.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Overflow-safe product `exp(log_magnitude) * phase`.
///
/// An exact zero (some factor vanished) is carried as a flag instead of a
/// `-inf` log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledProduct {
    pub log_magnitude: f64,
    pub phase: Complex64,
    exact_zero: bool,
}

impl ScaledProduct {
    pub const ONE: ScaledProduct = ScaledProduct {
        log_magnitude: 0.0,
        phase: ONE,
        exact_zero: false,
    };

    pub const ZERO: ScaledProduct = ScaledProduct {
        log_magnitude: f64::NEG_INFINITY,
        phase: ZERO,
        exact_zero: true,
    };

    pub fn from_complex(c: Complex64) -> ScaledProduct {
        if c == ZERO {
            return ScaledProduct::ZERO;
        }
        let r = c.norm();
        ScaledProduct {
            log_magnitude: r.ln(),
            phase: c / r,
            exact_zero: false,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// Reconstructs the (possibly overflowing) value.
    pub fn value(&self) -> Complex64 {
        if self.exact_zero {
            ZERO
        } else {
            self.phase * self.log_magnitude.exp()
        }
    }

    pub fn mul(&self, other: &ScaledProduct) -> ScaledProduct {
        if self.exact_zero || other.exact_zero {
            return ScaledProduct::ZERO;
        }
        let phase = self.phase * other.phase;
        ScaledProduct {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            phase: phase / phase.norm(),
            exact_zero: false,
        }
    }

    /// `self / other`; `None` when `other` is an exact zero.
    pub fn div(&self, other: &ScaledProduct) -> Option<ScaledProduct> {
        if other.exact_zero {
            return None;
        }
        if self.exact_zero {
            return Some(ScaledProduct::ZERO);
        }
        let phase = self.phase * other.phase.conj();
        Some(ScaledProduct {
            log_magnitude: self.log_magnitude - other.log_magnitude,
            phase: phase / phase.norm(),
            exact_zero: false,
        })
    }

    pub fn recip(&self) -> Option<ScaledProduct> {
        ScaledProduct::ONE.div(self)
    }

    /// Multiplies `c` by this product, returning an ordinary complex value.
    pub fn apply(&self, c: Complex64) -> Complex64 {
        if self.exact_zero {
            ZERO
        } else {
            c * self.phase * self.log_magnitude.exp()
        }
    }
}

/// Sum of `mantissa * scale` terms without overflow: the largest scale is
/// factored out before exponentiation.
pub fn scaled_sum<I>(terms: I) -> ScaledProduct
where
    I: IntoIterator<Item = (Complex64, ScaledProduct)>,
{
    let terms: Vec<_> = terms
        .into_iter()
        .filter(|(c, s)| *c != ZERO && !s.is_exact_zero())
        .collect();
    let Some(top) = terms
        .iter()
        .map(|(c, s)| s.log_magnitude + c.norm().ln())
        .reduce(f64::max)
    else {
        return ScaledProduct::ZERO;
    };
    let sum: Complex64 = terms
        .iter()
        .map(|(c, s)| c * s.phase * (s.log_magnitude - top).exp())
        .sum();
    let mut out = ScaledProduct::from_complex(sum);
    if !out.is_exact_zero() {
        out.log_magnitude += top;
    }
    out
}

/// Vector analogue of [`scaled_sum`]: returns `(vector, log_scale)` with the
/// true value `vector * exp(log_scale)`.
pub fn scaled_vector_sum<I>(dim: usize, terms: I) -> (CVector, f64)
where
    I: IntoIterator<Item = (CVector, ScaledProduct)>,
{
    let terms: Vec<_> = terms
        .into_iter()
        .filter(|(v, s)| !s.is_exact_zero() && v.norm() > 0.0)
        .collect();
    let Some(top) = terms
        .iter()
        .map(|(v, s)| s.log_magnitude + v.norm().ln())
        .reduce(f64::max)
    else {
        return (CVector::zeros(dim), 0.0);
    };
    let mut acc = CVector::zeros(dim);
    for (v, s) in &terms {
        acc.axpy(s.phase * (s.log_magnitude - top).exp(), v);
    }
    (acc, top)
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
}

/// A distinct point with its multiplicity in a [`NodeMultiset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGroup {
    pub point: Complex64,
    pub multiplicity: usize,
    /// 1-based position of the first node of the group.
    pub start: usize,
}

/// Ordered interpolation points in which equal points are contiguous.
///
/// Equality is bitwise: confluent nodes come from deliberate repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMultiset {
    nodes: Vec<Complex64>,
    groups: Vec<NodeGroup>,
}

impl NodeMultiset {
    pub fn new(nodes: Vec<Complex64>) -> Result<Self> {
        if nodes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("node list"));
        }
        let mut groups: Vec<NodeGroup> = Vec::new();
        for (i, &z) in nodes.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if same_point(g.point, z) => g.multiplicity += 1,
                _ => {
                    if groups.iter().any(|g| same_point(g.point, z)) {
                        return Err(Error::NonContiguousNodes {
                            node: z,
                            position: i + 1,
                        });
                    }
                    groups.push(NodeGroup {
                        point: z,
                        multiplicity: 1,
                        start: i + 1,
                    });
                }
            }
        }
        Ok(NodeMultiset { nodes, groups })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn groups(&self) -> &[NodeGroup] {
        &self.groups
    }

    /// Node at 1-based position `i`.
    pub fn node(&self, i: usize) -> Complex64 {
        self.nodes[i - 1]
    }

    pub fn has_confluent_runs(&self) -> bool {
        self.groups.iter().any(|g| g.multiplicity > 1)
    }

    /// Product `prod_{r=m}^{n} (z - xi_r)`; 1 for the empty range `n = m - 1`.
    pub fn psi(&self, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
        self.check_range(m, n)?;
        Ok(self.nodes[m - 1..n].iter().map(|&x| z - x).product())
    }

    /// [`psi`](Self::psi) accumulated as log-magnitude and phase.
    pub fn psi_scaled(&self, m: usize, n: usize, z: Complex64) -> Result<ScaledProduct> {
        self.check_range(m, n)?;
        let mut log_magnitude = 0.0;
        let mut phase = ONE;
        for &x in &self.nodes[m - 1..n] {
            let f = z - x;
            if f == ZERO {
                return Ok(ScaledProduct::ZERO);
            }
            let r = f.norm();
            log_magnitude += r.ln();
            phase *= f / r;
            // renormalize to keep |phase| = 1 over long products
            phase /= phase.norm();
        }
        Ok(ScaledProduct {
            log_magnitude,
            phase,
            exact_zero: false,
        })
    }

    fn check_range(&self, m: usize, n: usize) -> Result<()> {
        if m < 1 || n + 1 < m || n > self.nodes.len() {
            return Err(Error::IndexOutOfRange {
                what: "nodal product",
                m,
                n,
                len: self.nodes.len(),
            });
        }
        Ok(())
    }
}

/// `prod_{0 <= i < j <= n} (x_j - x_i)`; 1 for fewer than two points.
pub fn vandermonde(points: &[Complex64]) -> Complex64 {
    let mut v = ONE;
    for j in 1..points.len() {
        for i in 0..j {
            v *= points[j] - points[i];
        }
    }
    v
}

/// [`vandermonde`] as a [`ScaledProduct`].
pub fn vandermonde_scaled(points: &[Complex64]) -> ScaledProduct {
    let mut v = ScaledProduct::ONE;
    for j in 1..points.len() {
        for i in 0..j {
            v = v.mul(&ScaledProduct::from_complex(points[j] - points[i]));
        }
    }
    v
}
