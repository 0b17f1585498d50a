use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divided_diff::VectorFunction;
use crate::error::{Error, Result};
use crate::types::{CVector, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntireKind {
    Exp,
    Sin,
    Cos,
}

/// `amplitude * f(rate * z)` with `f` one of exp, sin, cos.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireFunction {
    pub kind: EntireKind,
    pub amplitude: CVector,
    pub rate: Complex64,
}

impl EntireFunction {
    pub fn derivative(&self, z: Complex64, order: usize) -> CVector {
        let w = self.rate * z;
        let base = match self.kind {
            EntireKind::Exp => w.exp(),
            EntireKind::Sin => quarter_shift_sin(w, order),
            EntireKind::Cos => quarter_shift_sin(w, order + 1),
        };
        self.amplitude.scale(base * self.rate.powu(order as u32))
    }
}

/// `sin(w + n pi/2)`
fn quarter_shift_sin(w: Complex64, n: usize) -> Complex64 {
    match n % 4 {
        0 => w.sin(),
        1 => w.cos(),
        2 => -w.sin(),
        _ => -w.cos(),
    }
}

/// The part of `F` that is analytic on the whole region of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothPart {
    None,
    /// Vector coefficients, lowest degree first.
    Polynomial(Vec<CVector>),
    Entire(EntireFunction),
}

/// `F(z) = sum_s v_s / (z - z_s) + smooth(z)` with simple poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeromorphicTestFunction {
    poles: Vec<Complex64>,
    residues: Vec<CVector>,
    smooth: SmoothPart,
    dim: usize,
}

impl MeromorphicTestFunction {
    pub fn new(poles: Vec<Complex64>, residues: Vec<CVector>, smooth: SmoothPart) -> Result<Self> {
        if poles.len() != residues.len() {
            return Err(Error::InvalidConfig(format!(
                "{} poles but {} residues",
                poles.len(),
                residues.len()
            )));
        }
        let dim = match (&residues.first(), &smooth) {
            (Some(v), _) => v.dim(),
            (None, SmoothPart::Polynomial(c)) if !c.is_empty() => c[0].dim(),
            (None, SmoothPart::Entire(e)) => e.amplitude.dim(),
            _ => return Err(Error::InvalidConfig("cannot infer the dimension of F".into())),
        };
        if dim == 0 {
            return Err(Error::InvalidConfig("F must have at least one component".into()));
        }
        let smooth_dims: Vec<usize> = match &smooth {
            SmoothPart::None => vec![],
            SmoothPart::Polynomial(c) => c.iter().map(CVector::dim).collect(),
            SmoothPart::Entire(e) => vec![e.amplitude.dim()],
        };
        if let Some(bad) = residues.iter().map(CVector::dim).chain(smooth_dims).find(|&d| d != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad });
        }
        for (i, z) in poles.iter().enumerate() {
            if poles[..i].contains(z) {
                return Err(Error::InvalidConfig(format!("pole {z} repeated")));
            }
        }
        if residues.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::InvalidConfig("residues must be nonzero".into()));
        }
        Ok(MeromorphicTestFunction { poles, residues, smooth, dim })
    }

    pub fn rational(poles: Vec<Complex64>, residues: Vec<CVector>) -> Result<Self> {
        Self::new(poles, residues, SmoothPart::None)
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[CVector] {
        &self.residues
    }

    pub fn smooth(&self) -> &SmoothPart {
        &self.smooth
    }

    pub fn pole_count(&self) -> usize {
        self.poles.len()
    }

    /// Degree of the polynomial part: `Some(None)` when there is no smooth
    /// part at all, `None` when the smooth part is not a polynomial.
    pub fn polynomial_degree(&self) -> Option<Option<usize>> {
        match &self.smooth {
            SmoothPart::None => Some(None),
            SmoothPart::Polynomial(c) => Some(c.iter().rposition(|v| v.norm() > 0.0)),
            SmoothPart::Entire(_) => None,
        }
    }

    /// Whether `n - m > deg(u)` holds (always when `u = 0`).
    pub fn exceeds_polynomial_degree(&self, order: usize) -> Result<bool> {
        match self.polynomial_degree() {
            None => Err(Error::Precondition(
                "closed forms need a rational F (polynomial or no smooth part)".into(),
            )),
            Some(None) => Ok(true),
            Some(Some(d)) => Ok(order > d),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.polynomial_degree().is_some()
    }

    /// The same function with the poles removed.
    pub fn smooth_only(&self) -> SmoothFunction<'_> {
        SmoothFunction { f: self }
    }

    /// Same poles and smooth part, new residues.
    pub fn with_residues(&self, residues: Vec<CVector>) -> Result<Self> {
        Self::new(self.poles.clone(), residues, self.smooth.clone())
    }

    fn smooth_derivative(&self, z: Complex64, order: usize) -> CVector {
        match &self.smooth {
            SmoothPart::None => CVector::zeros(self.dim),
            SmoothPart::Polynomial(coeffs) => {
                let mut acc = CVector::zeros(self.dim);
                let mut power = ONE;
                for (n, c) in coeffs.iter().enumerate().skip(order) {
                    // d^order/dz^order z^n = n!/(n-order)! z^(n-order)
                    let falling: f64 = ((n - order + 1)..=n).map(|i| i as f64).product();
                    acc.axpy(power * falling, c);
                    power *= z;
                }
                acc
            }
            SmoothPart::Entire(e) => e.derivative(z, order),
        }
    }
}

impl VectorFunction for MeromorphicTestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivative(&self, z: Complex64, order: usize) -> CVector {
        let mut acc = self.smooth_derivative(z, order);
        let fact: f64 = (1..=order).map(|i| i as f64).product();
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        for (a, v) in self.poles.iter().zip(&self.residues) {
            let w = z - a;
            if w == ZERO {
                return CVector::new(vec![Complex64::new(f64::INFINITY, f64::INFINITY); self.dim]);
            }
            acc.axpy(Complex64::new(sign * fact, 0.0) / w.powu(order as u32 + 1), v);
        }
        acc
    }
}

/// View of the smooth part of a [`MeromorphicTestFunction`].
#[derive(Debug, Clone, Copy)]
pub struct SmoothFunction<'a> {
    f: &'a MeromorphicTestFunction,
}

impl VectorFunction for SmoothFunction<'_> {
    fn dim(&self) -> usize {
        self.f.dim
    }

    fn derivative(&self, z: Complex64, order: usize) -> CVector {
        self.f.smooth_derivative(z, order)
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Bundled test functions, addressed by id.
pub fn catalog(id: &str) -> Option<MeromorphicTestFunction> {
    let e1 = CVector::from_real(&[1.0, 0.0]);
    let e2 = CVector::from_real(&[0.0, 1.0]);
    let ones = CVector::from_real(&[1.0, 1.0]);
    let f = match id {
        "single_pole" => MeromorphicTestFunction::rational(vec![re(3.0)], vec![ones]),
        "two_pole" => MeromorphicTestFunction::rational(vec![re(2.0), re(-3.0)], vec![e1, e2]),
        "two_pole_exp" => MeromorphicTestFunction::new(
            vec![re(2.0), re(-3.0)],
            vec![e1, e2],
            SmoothPart::Entire(EntireFunction { kind: EntireKind::Exp, amplitude: ones, rate: ONE }),
        ),
        "three_pole" => MeromorphicTestFunction::rational(
            vec![re(1.5), Complex64::new(0.0, -2.5), re(4.0)],
            vec![e1, e2, ones],
        ),
        "two_pole_poly" => MeromorphicTestFunction::new(
            vec![re(2.0), re(-3.0)],
            vec![e1, e2],
            SmoothPart::Polynomial(vec![CVector::from_real(&[0.5, -1.0]), CVector::from_real(&[0.0, 2.0])]),
        ),
        _ => return None,
    };
    Some(f.expect("catalog entries are valid"))
}

pub const CATALOG_IDS: &[&str] = &["single_pole", "two_pole", "two_pole_exp", "three_pole", "two_pole_poly"];

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for id in CATALOG_IDS {
            let f = catalog(id).unwrap();
            let z = c(0.3, -0.4);
            let h = 1e-5;
            for order in 0..3 {
                let fd = (&f.derivative(z + h, order) - &f.derivative(z - h, order)).scale(c(0.5 / h, 0.0));
                let exact = f.derivative(z, order + 1);
                assert!(fd.relative_distance(&exact) < 1e-7, "{id} order {order}");
            }
        }
    }

    #[test]
    fn polynomial_part_degree_and_values() {
        let f = catalog("two_pole_poly").unwrap();
        assert_eq!(f.polynomial_degree(), Some(Some(1)));
        let z = c(1.0, 1.0);
        let smooth = f.smooth_only().value(z);
        assert!(smooth.relative_distance(&CVector::new(vec![c(0.5, 0.0), c(1.0, 2.0)])) < 1e-15);
        assert_eq!(catalog("two_pole").unwrap().polynomial_degree(), Some(None));
        assert_eq!(catalog("two_pole_exp").unwrap().polynomial_degree(), None);
    }

    #[test]
    fn constructor_validates() {
        let v = CVector::from_real(&[1.0]);
        assert!(MeromorphicTestFunction::rational(vec![c(1.0, 0.0)], vec![]).is_err());
        assert!(MeromorphicTestFunction::rational(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![v.clone(), v.clone()]).is_err());
        assert!(MeromorphicTestFunction::rational(vec![c(1.0, 0.0)], vec![CVector::zeros(1)]).is_err());
        assert!(MeromorphicTestFunction::rational(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![v, CVector::zeros(2)]).is_err());
        assert!(catalog("nope").is_none());
    }

    #[test]
    fn entire_kinds() {
        let amp = CVector::from_real(&[1.0]);
        let sin = EntireFunction { kind: EntireKind::Sin, amplitude: amp.clone(), rate: c(2.0, 0.0) };
        let z = c(0.7, 0.1);
        assert!((sin.derivative(z, 1)[0] - 2.0 * (2.0 * z).cos()).norm() < 1e-14);
        assert!((sin.derivative(z, 2)[0] + 4.0 * (2.0 * z).sin()).norm() < 1e-14);
        let cos = EntireFunction { kind: EntireKind::Cos, amplitude: amp, rate: ONE };
        assert!((cos.derivative(z, 1)[0] + z.sin()).norm() < 1e-15);
    }
}
