//! Interpolation sets `E`, their level function `Phi = exp(g)` and capacity,
//! node families with known nodal-product asymptotics, and the geometric
//! rate bounds that follow from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::NodeMultiset;

/// Relative slack used when deciding whether a point lies on `E`.
const ON_SET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Closed disk `|z| <= radius`.
    Disk { radius: f64 },
    /// The segment `[-1, 1]`.
    Interval,
    /// Arbitrary node file; no Green's function available.
    Custom,
}

impl Geometry {
    pub fn capacity(&self) -> Option<f64> {
        match self {
            Geometry::Disk { radius } => Some(*radius),
            Geometry::Interval => Some(0.5),
            Geometry::Custom => None,
        }
    }

    /// Whether `z` belongs to `E`; `None` for custom geometries.
    pub fn contains(&self, z: Complex64) -> Option<bool> {
        match self {
            Geometry::Disk { radius } => Some(z.norm() <= radius * (1.0 + ON_SET_TOL)),
            Geometry::Interval => Some(z.im.abs() <= ON_SET_TOL && z.re.abs() <= 1.0 + ON_SET_TOL),
            Geometry::Custom => None,
        }
    }

    /// `Phi(z)` for `z` outside `E`.
    pub fn phi(&self, z: Complex64) -> Result<f64> {
        match self.contains(z) {
            None => Err(Error::Precondition("Phi is not available for custom geometries".into())),
            Some(true) => Err(Error::PointInsideE(z)),
            Some(false) => Ok(self.raw_phi(z)),
        }
    }

    /// `Phi(z)` outside `E` and 1 on `E` (where the Green's function vanishes).
    pub fn level(&self, z: Complex64) -> Result<f64> {
        match self.contains(z) {
            None => Err(Error::Precondition("Phi is not available for custom geometries".into())),
            Some(true) => Ok(1.0),
            Some(false) => Ok(self.raw_phi(z)),
        }
    }

    fn raw_phi(&self, z: Complex64) -> f64 {
        match self {
            Geometry::Disk { radius } => z.norm() / radius,
            Geometry::Interval => {
                // (z + s)(z - s) = 1, so one of the two has modulus >= 1
                let s = (z * z - 1.0).sqrt();
                (z + s).norm().max((z - s).norm())
            }
            Geometry::Custom => f64::NAN,
        }
    }
}

/// A rule producing `L` interpolation points on `E` for every `L`.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeFamily {
    /// `R exp(2 pi i (i-1)/L)`.
    Disk { radius: f64 },
    /// Chebyshev points of the first kind on `[-1, 1]`.
    Chebyshev,
    /// The first `L` points of a user-supplied pool.
    Custom { pool: Vec<Complex64> },
}

impl NodeFamily {
    pub fn geometry(&self) -> Geometry {
        match self {
            NodeFamily::Disk { radius } => Geometry::Disk { radius: *radius },
            NodeFamily::Chebyshev => Geometry::Interval,
            NodeFamily::Custom { .. } => Geometry::Custom,
        }
    }

    pub fn nodes(&self, count: usize) -> Result<NodeMultiset> {
        match self {
            NodeFamily::Disk { radius } => disk_nodes(count, *radius),
            NodeFamily::Chebyshev => interval_nodes(count),
            NodeFamily::Custom { pool } => {
                if count > pool.len() {
                    return Err(Error::Precondition(format!(
                        "custom node pool has {} points, {count} requested",
                        pool.len()
                    )));
                }
                NodeMultiset::new(pool[..count].to_vec())
            }
        }
    }
}

pub fn disk_nodes(count: usize, radius: f64) -> Result<NodeMultiset> {
    if count == 0 || !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!("disk nodes need L >= 1 and R > 0 (L = {count}, R = {radius})")));
    }
    NodeMultiset::new(
        (0..count)
            .map(|i| Complex64::from_polar(radius, 2.0 * PI * i as f64 / count as f64))
            .collect(),
    )
}

pub fn interval_nodes(count: usize) -> Result<NodeMultiset> {
    if count == 0 {
        return Err(Error::InvalidConfig("interval nodes need L >= 1".into()));
    }
    NodeMultiset::new(
        (1..=count)
            .map(|i| Complex64::new(((2 * i - 1) as f64 * PI / (2 * count) as f64).cos(), 0.0))
            .collect(),
    )
}

/// `|Psi_p(z)|^{1/p}` with `Psi_p = psi_{1,p+k}` on the family's `p + k`
/// nodes, for each `p` in `p_values`.
pub fn verify_node_asymptotics(
    family: &NodeFamily,
    z: Complex64,
    k: usize,
    p_values: &[usize],
) -> Result<Vec<f64>> {
    if family.geometry().contains(z) == Some(true) {
        return Err(Error::PointInsideE(z));
    }
    p_values
        .iter()
        .map(|&p| {
            let nodes = family.nodes(p + k)?;
            let s = nodes.psi_scaled(1, p + k, z)?;
            Ok(if s.is_exact_zero() { 0.0 } else { (s.log_magnitude / p as f64).exp() })
        })
        .collect()
}

fn check_sorted(geometry: &Geometry, poles: &[Complex64]) -> Result<Vec<f64>> {
    let levels = poles.iter().map(|&z| geometry.phi(z)).collect::<Result<Vec<_>>>()?;
    if levels.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-14)) {
        return Err(Error::UnsortedPoles);
    }
    Ok(levels)
}

/// The level `Phi(z_{k+1})` (or `rho` when `k = mu`) that governs the rates.
fn governing_level(levels: &[f64], k: usize, rho: f64) -> Result<f64> {
    let mu = levels.len();
    if k > mu {
        return Err(Error::Precondition(format!("k = {k} exceeds the number of poles {mu}")));
    }
    Ok(if k == mu { rho } else { levels[k].min(rho) })
}

/// Bound on `limsup |z_m^{(p)} - z_m|^{1/p}`: `Phi(z_m)/Phi(z_{k+1})`, or
/// `Phi(z_m)/rho` when `k = mu`. `m` is 1-based; `rho = inf` gives 0.
pub fn bound_pole_rate(geometry: &Geometry, poles: &[Complex64], m: usize, k: usize, rho: f64) -> Result<f64> {
    let levels = check_sorted(geometry, poles)?;
    if m < 1 || m > k {
        return Err(Error::Precondition(format!("pole index m = {m} must lie in 1..={k}")));
    }
    Ok(levels[m - 1] / governing_level(&levels, k, rho)?)
}

/// Bound on `limsup ||F(z) - R_{p,k}(z)||^{1/p}`: `Phi(z)/Phi(z_{k+1})`
/// with `Phi = 1` on `E`; `rho` replaces `Phi(z_{k+1})` when `k = mu`.
pub fn bound_error_rate(geometry: &Geometry, poles: &[Complex64], k: usize, z: Complex64, rho: f64) -> Result<f64> {
    let levels = check_sorted(geometry, poles)?;
    Ok(geometry.level(z)? / governing_level(&levels, k, rho)?)
}
