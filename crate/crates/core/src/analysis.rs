//! Pole extraction from `V_{p,k}`, geometric rate fitting over `p`-sweeps,
//! and comparison against the potential-theoretic bounds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::divided_diff::{build_table, SampleSet, VectorFunction};
use crate::error::{Error, Result};
use crate::itea::{build_interpolant, default_direction, IteaConfig, IteaInterpolant};
use crate::oracles::{
    alpha_matrix, contour_divided_difference, refined_error_constant, refined_pole_constant, t_det,
    MeromorphicTestFunction,
};
use crate::poly::{aberth, RootSet};
use crate::potential::{bound_error_rate, bound_pole_rate, Geometry, NodeFamily};
use crate::types::CVector;

pub const ROOT_TOL: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 200;
/// Multiplicative slack applied to the limsup bounds at finite `p`.
pub const RATE_SLACK: f64 = 0.15;

/// Zeros of `V_{p,k}` in the monomial basis, by Aberth–Ehrlich iteration.
pub fn denominator_roots(interp: &IteaInterpolant) -> Result<RootSet> {
    if interp.config().k == 0 {
        return Err(Error::Precondition("a degree-0 denominator has no zeros".into()));
    }
    Ok(aberth(&interp.denominator_monomial(), ROOT_TOL, ROOT_MAX_ITER))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleMatch {
    pub root: Complex64,
    pub reference: Complex64,
    pub reference_index: usize,
    pub distance: f64,
}

/// Greedy one-to-one pairing by globally sorted distance.
pub fn match_poles(roots: &[Complex64], reference: &[Complex64]) -> Vec<PoleMatch> {
    let mut pairs: Vec<(f64, usize, usize)> = roots
        .iter()
        .enumerate()
        .flat_map(|(i, r)| reference.iter().enumerate().map(move |(j, z)| ((r - z).norm(), i, j)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut root_used = vec![false; roots.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut out = Vec::new();
    for (d, i, j) in pairs {
        if root_used[i] || ref_used[j] {
            continue;
        }
        root_used[i] = true;
        ref_used[j] = true;
        out.push(PoleMatch { root: roots[i], reference: reference[j], reference_index: j, distance: d });
    }
    out.sort_by_key(|m| m.reference_index);
    out
}

/// Fitted geometric ratio `exp(s)`, with `s` the least-squares slope of
/// `ln(magnitude)` against `p` over the last half of the data. Exact zeros
/// truncate the data to the prefix before them.
pub fn fit_rate(p_values: &[usize], magnitudes: &[f64]) -> Result<f64> {
    if p_values.len() != magnitudes.len() {
        return Err(Error::DimensionMismatch { expected: p_values.len(), found: magnitudes.len() });
    }
    if p_values.len() < 4 {
        return Err(Error::InsufficientData(format!("{} points, need at least 4", p_values.len())));
    }
    if magnitudes.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(Error::InsufficientData("magnitudes must be finite and nonnegative".into()));
    }
    let cut = magnitudes.iter().position(|&m| m < f64::MIN_POSITIVE).unwrap_or(magnitudes.len());
    slope_fit(&p_values[..cut], &magnitudes[..cut])
}

fn slope_fit(p_values: &[usize], magnitudes: &[f64]) -> Result<f64> {
    let start = p_values.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = p_values[start..]
        .iter()
        .zip(&magnitudes[start..])
        .map(|(&p, &m)| (p as f64, m.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InsufficientData("fewer than two points left to fit".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all p values equal".into()));
    }
    Ok((sxy / sxx).exp())
}

/// Outcome of fitting a sequence that may sink into rounding noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// `None` when fewer than four points lie above the floor.
    pub ratio: Option<f64>,
    pub points_used: usize,
}

/// [`fit_rate`] over the prefix of magnitudes lying above their per-`p`
/// noise floors.
pub fn fit_rate_above_floor(p_values: &[usize], magnitudes: &[f64], floors: &[f64]) -> Result<RateFit> {
    let cut = magnitudes
        .iter()
        .zip(floors)
        .position(|(&m, &fl)| m <= fl)
        .unwrap_or(magnitudes.len());
    if cut < 4 {
        return Ok(RateFit { ratio: None, points_used: cut });
    }
    Ok(RateFit { ratio: Some(fit_rate(&p_values[..cut], &magnitudes[..cut])?), points_used: cut })
}

/// Fixed part of the noise floor, in units of machine epsilon.
pub const NOISE_BASE: f64 = 100.0;

/// Rounding level of a quantity whose information enters the samples at
/// relative size `level^{-n}`: `eps * scale * (NOISE_BASE + level^n)`.
pub fn noise_floor(scale: f64, level: f64, n: usize) -> f64 {
    f64::EPSILON * scale * (NOISE_BASE + level.max(1.0).powi(n as i32))
}

/// Whether `mags[j] <= factor * mags[i]` for all `i < j`.
pub fn is_roughly_monotone(magnitudes: &[f64], factor: f64) -> bool {
    let mut best = f64::INFINITY;
    for &m in magnitudes {
        if m > factor * best {
            return false;
        }
        best = best.min(m);
    }
    true
}

/// Poles and residues reordered by nondecreasing level `Phi`.
pub fn sort_by_level(f: &MeromorphicTestFunction, geometry: &Geometry) -> Result<MeromorphicTestFunction> {
    let mut idx: Vec<(f64, usize)> = f
        .poles()
        .iter()
        .enumerate()
        .map(|(i, &z)| geometry.phi(z).map(|l| (l, i)))
        .collect::<Result<_>>()?;
    idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let poles = idx.iter().map(|&(_, i)| f.poles()[i]).collect();
    let residues = idx.iter().map(|&(_, i)| f.residues()[i].clone()).collect();
    MeromorphicTestFunction::new(poles, residues, f.smooth().clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub k: usize,
    pub p_values: Vec<usize>,
    /// `None` selects the default direction.
    pub q: Option<CVector>,
    pub probes: Vec<Complex64>,
    /// Radius of the region of meromorphy; infinite for rational `F`.
    pub rho: f64,
    pub slack: f64,
    /// Multiplier on [`noise_floor`].
    pub noise_factor: f64,
}

impl StudyConfig {
    pub fn new(k: usize, p_values: Vec<usize>) -> Self {
        StudyConfig { k, p_values, q: None, probes: vec![], rho: f64::INFINITY, slack: RATE_SLACK, noise_factor: 1.0 }
    }
}

/// Estimates at one `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleEstimateSet {
    pub p: usize,
    pub roots: Vec<Complex64>,
    pub matched: Vec<PoleMatch>,
    pub stalled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub p: usize,
    pub coefficients: Vec<Complex64>,
    pub poles: PoleEstimateSet,
    /// `||F(z*) - R(z*)||` per probe.
    pub probe_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    PoleError { m: usize, pole: Complex64 },
    InterpolantError { probe: Complex64 },
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::PoleError { m, .. } => format!("pole_error_{m}"),
            Quantity::InterpolantError { probe } => format!("error_at_{}", crate::types::format_complex(*probe)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The whole sequence sits at rounding level; nothing left to fit.
    AtRoundoff,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::AtRoundoff => "roundoff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityReport {
    pub quantity: Quantity,
    /// Aligned with [`RateReport::p_values`].
    pub magnitudes: Vec<f64>,
    pub fitted_ratio: Option<f64>,
    pub points_used: usize,
    pub bound: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub p_values: Vec<usize>,
    pub skipped: Vec<(usize, String)>,
    pub records: Vec<StudyRecord>,
    pub quantities: Vec<QuantityReport>,
}

impl RateReport {
    pub fn passed(&self) -> bool {
        self.quantities.iter().all(|q| q.verdict.passed())
    }

    pub fn max_probe_error(&self) -> f64 {
        self.records.iter().flat_map(|r| r.probe_errors.iter().copied()).fold(0.0, f64::max)
    }
}

fn verdict(fit: RateFit, bound: f64, slack: f64) -> Verdict {
    match fit.ratio {
        None => Verdict::AtRoundoff,
        Some(r) if r <= bound * (1.0 + slack) => Verdict::Pass,
        Some(_) => Verdict::Fail,
    }
}

fn study_point(
    f: &MeromorphicTestFunction,
    family: &NodeFamily,
    config: &StudyConfig,
    q: &CVector,
    p: usize,
) -> Result<StudyRecord> {
    let k = config.k;
    let nodes = family.nodes(p + k)?;
    let samples = SampleSet::from_function(f, &nodes);
    let interp = build_interpolant(&nodes, &samples, &IteaConfig::new(p, k, q.clone())?)?;
    let (roots, stalled) = if k == 0 {
        (vec![], false)
    } else {
        let r = denominator_roots(&interp)?;
        (r.roots, r.stalled)
    };
    let reference = &f.poles()[..k.min(f.pole_count())];
    let matched = match_poles(&roots, reference);
    let probe_errors = config
        .probes
        .iter()
        .map(|&z| Ok((&f.value(z) - &interp.eval(z)?).norm()))
        .collect::<Result<_>>()?;
    Ok(StudyRecord {
        p,
        coefficients: interp.coefficients().to_vec(),
        poles: PoleEstimateSet { p, roots, matched, stalled },
        probe_errors,
    })
}

/// Builds `R_{p,k}` for every `p` of the sweep, tracks pole and probe
/// errors, fits their geometric ratios and compares them to the bounds.
pub fn run_convergence_study(f: &MeromorphicTestFunction, family: &NodeFamily, config: &StudyConfig) -> Result<RateReport> {
    let geometry = family.geometry();
    let f = sort_by_level(f, &geometry)?;
    if config.k > f.pole_count() {
        return Err(Error::Precondition(format!("k = {} exceeds the {} poles of F", config.k, f.pole_count())));
    }
    for &z in f.poles() {
        if geometry.contains(z) == Some(true) {
            return Err(Error::Precondition(format!("pole {z} lies on E")));
        }
    }
    let q = config.q.clone().unwrap_or_else(|| default_direction(f.dim()));

    let outcomes: Vec<(usize, Result<StudyRecord>)> = config
        .p_values
        .par_iter()
        .map(|&p| (p, study_point(&f, family, config, &q, p)))
        .collect();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (p, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e @ Error::SingularSystem { .. }) => skipped.push((p, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if records.len() < 4 {
        return Err(Error::StudyInconclusive { successful: records.len() });
    }
    let p_values: Vec<usize> = records.iter().map(|r| r.p).collect();
    let mut quantities = Vec::new();

    for m in 1..=config.k {
        let pole = f.poles()[m - 1];
        let magnitudes: Vec<f64> = records
            .iter()
            .map(|r| r.poles.matched.iter().find(|pm| pm.reference_index == m - 1).map_or(f64::INFINITY, |pm| pm.distance))
            .collect();
        let level = geometry.phi(pole)?;
        let floors: Vec<f64> =
            p_values.iter().map(|&p| config.noise_factor * noise_floor(1.0, level, p + config.k)).collect();
        let fit = fit_rate_above_floor(&p_values, &magnitudes, &floors)?;
        let bound = bound_pole_rate(&geometry, f.poles(), m, config.k, config.rho)?;
        quantities.push(QuantityReport {
            quantity: Quantity::PoleError { m, pole },
            magnitudes,
            fitted_ratio: fit.ratio,
            points_used: fit.points_used,
            bound,
            verdict: verdict(fit, bound, config.slack),
        });
    }
    for (i, &z) in config.probes.iter().enumerate() {
        let magnitudes: Vec<f64> = records.iter().map(|r| r.probe_errors[i]).collect();
        let level = geometry.level(z)?;
        let scale = f.value(z).norm();
        let floors: Vec<f64> =
            p_values.iter().map(|&p| config.noise_factor * noise_floor(scale, level, p + config.k)).collect();
        let fit = fit_rate_above_floor(&p_values, &magnitudes, &floors)?;
        let bound = bound_error_rate(&geometry, f.poles(), config.k, z, config.rho)?;
        quantities.push(QuantityReport {
            quantity: Quantity::InterpolantError { probe: z },
            magnitudes,
            fitted_ratio: fit.ratio,
            points_used: fit.points_used,
            bound,
            verdict: verdict(fit, bound, config.slack),
        });
    }
    skipped.sort_by_key(|s| s.0);
    Ok(RateReport { p_values, skipped, records, quantities })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RefinedOutcome {
    NotApplicable { reason: String },
    Skipped { reason: String },
    Inconclusive { reason: String },
    Checked(RefinedReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedReport {
    pub m: usize,
    pub c_m: Complex64,
    pub p_values: Vec<usize>,
    /// `(z_m^(p) - z_m) Psi_p(z_{k+1}) / Psi_p(z_m)` per `p`.
    pub normalized: Vec<Complex64>,
    /// `|normalized - C_m| / |C_m|` per `p`.
    pub deviations: Vec<f64>,
    pub probes: Vec<Complex64>,
    /// `||B_p(z*)||`, indexed `[probe][p]`.
    pub b_norms: Vec<Vec<f64>>,
    /// Relative distance between `F - R` and `B_p psi_{1,p} / Psi_p(z_{k+1})`,
    /// indexed `[probe][p]`.
    pub error_deviations: Vec<Vec<f64>>,
}

impl RefinedReport {
    /// Largest ratio between `||B_p||` values at one probe.
    pub fn b_band(&self) -> f64 {
        self.b_norms
            .iter()
            .map(|row| {
                let hi = row.iter().copied().fold(0.0, f64::max);
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                hi / lo
            })
            .fold(1.0, f64::max)
    }

    /// Deviation from `C_m` at the first `p >= p_min`.
    pub fn deviation_at(&self, p_min: usize) -> Option<f64> {
        self.p_values.iter().position(|&p| p >= p_min).map(|i| self.deviations[i])
    }
}

/// Compares the measured pole and error sequences with the refined
/// constants `C_m` and `B_p`.
pub fn refined_asymptotics_check(
    f: &MeromorphicTestFunction,
    family: &NodeFamily,
    k: usize,
    m: usize,
    p_values: &[usize],
    probes: &[Complex64],
    q: Option<&CVector>,
) -> Result<RefinedOutcome> {
    let geometry = family.geometry();
    let f = sort_by_level(f, &geometry)?;
    let mu = f.pole_count();
    if k >= mu {
        return Ok(RefinedOutcome::NotApplicable { reason: "k = mu: the numerator sum is empty".into() });
    }
    if k == 0 || m == 0 || m > k {
        return Err(Error::Precondition(format!("need 1 <= m <= k, got m = {m}, k = {k}")));
    }
    let levels: Vec<f64> = f.poles().iter().map(|&z| geometry.phi(z)).collect::<Result<_>>()?;
    if levels[k - 1] >= levels[k] || (mu > k + 1 && levels[k] >= levels[k + 1]) {
        return Ok(RefinedOutcome::Skipped { reason: "levels of z_k, z_{k+1}, z_{k+2} are not strictly increasing".into() });
    }
    let q = q.cloned().unwrap_or_else(|| default_direction(f.dim()));
    let probe_base = p_values.first().copied().unwrap_or(1).max(1);
    let base_nodes = family.nodes(probe_base + k)?;
    let alpha = alpha_matrix(&f, &base_nodes, probe_base, k, &q)?;
    let without_m: Vec<usize> = (0..=k).filter(|&i| i != m - 1).collect();
    let scale = alpha.data.max_abs().powi(k as i32);
    if t_det(&alpha, &without_m).norm() <= 1e-14 * scale {
        return Ok(RefinedOutcome::Inconclusive { reason: format!("T without index {m} vanishes") });
    }

    let c_m = refined_pole_constant(&f, &base_nodes, probe_base, k, &q, m)?;
    let mut normalized = Vec::new();
    let mut b_norms = vec![Vec::new(); probes.len()];
    let mut error_deviations = vec![Vec::new(); probes.len()];
    let zm = f.poles()[m - 1];
    let zk1 = f.poles()[k];
    for &p in p_values {
        let nodes = family.nodes(p + k)?;
        let samples = SampleSet::from_function(&f, &nodes);
        let interp = build_interpolant(&nodes, &samples, &IteaConfig::new(p, k, q.clone())?)?;
        let roots = denominator_roots(&interp)?.roots;
        let matched = match_poles(&roots, &f.poles()[..k]);
        let root = matched
            .iter()
            .find(|pm| pm.reference_index == m - 1)
            .ok_or_else(|| Error::Precondition("no root matched to z_m".into()))?
            .root;
        let ratio = nodes
            .psi_scaled(1, p + k, zk1)?
            .div(&nodes.psi_scaled(1, p + k, zm)?)
            .ok_or(Error::PointIsNode(zm))?;
        normalized.push(ratio.apply(root - zm));
        let psi_far = nodes.psi_scaled(1, p + k, zk1)?;
        for (i, &z) in probes.iter().enumerate() {
            let b = refined_error_constant(&f, &nodes, p, k, &q, z)?;
            b_norms[i].push(b.norm());
            let lead = nodes.psi_scaled(1, p, z)?.div(&psi_far).ok_or(Error::PointIsNode(zk1))?;
            let predicted = b.scale(lead.value());
            let actual = &f.value(z) - &interp.eval(z)?;
            error_deviations[i].push(actual.relative_distance(&predicted));
        }
    }
    let deviations = normalized.iter().map(|v| (v - c_m).norm() / c_m.norm()).collect();
    Ok(RefinedOutcome::Checked(RefinedReport {
        m,
        c_m,
        p_values: p_values.to_vec(),
        normalized,
        deviations,
        probes: probes.to_vec(),
        b_norms,
        error_deviations,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaDecayReport {
    pub p_values: Vec<usize>,
    /// `max_{i,j} ||Theta[xi_{j+1}, ..., xi_{p+i}]||^{1/p}` per `p`.
    pub measured: Vec<f64>,
    /// Largest relative gap between contour and tableau values where the
    /// tableau entry is above its noise level.
    pub tableau_agreement: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Decay of the divided differences of an analytic `theta` over the nodes
/// entering the defining system, measured by contour integration.
pub fn theta_decay_check<F: VectorFunction + Sync + ?Sized>(
    theta: &F,
    family: &NodeFamily,
    k: usize,
    p_values: &[usize],
    rho: f64,
    slack: f64,
) -> Result<ThetaDecayReport> {
    let geometry = family.geometry();
    let kappa = geometry
        .capacity()
        .ok_or_else(|| Error::Precondition("capacity unknown for a custom geometry".into()))?;
    let bound = 1.0 / (kappa * rho);
    let rows: Vec<Result<(f64, f64)>> = p_values
        .par_iter()
        .map(|&p| {
            let nodes = family.nodes(p + k)?;
            let table = build_table(&nodes, &SampleSet::from_function(theta, &nodes))?;
            let reach = nodes.nodes().iter().map(|x| x.norm()).fold(0.0, f64::max);
            let mut worst: f64 = 0.0;
            let mut agreement: f64 = 0.0;
            for i in 1..=k.max(1) {
                for j in 0..=k {
                    let pts = &nodes.nodes()[j..p + i];
                    let radius = (2.0 * reach).max(pts.len() as f64);
                    let samples = 4 * pts.len() + 64;
                    let dd = contour_divided_difference(theta, pts, Complex64::new(0.0, 0.0), radius, samples)?;
                    worst = worst.max(dd.norm().powf(1.0 / p as f64));
                    let tab = table.get(j + 1, p + i)?;
                    if tab.norm() > 1e-8 * table.get(1, 1)?.norm() {
                        agreement = agreement.max(dd.relative_distance(tab));
                    }
                }
            }
            Ok((worst, agreement))
        })
        .collect();
    let mut measured = Vec::new();
    let mut tableau_agreement: f64 = 0.0;
    for r in rows {
        let (w, a) = r?;
        measured.push(w);
        tableau_agreement = tableau_agreement.max(a);
    }
    let passed = measured.iter().all(|&m| m <= bound * (1.0 + slack));
    Ok(ThetaDecayReport { p_values: p_values.to_vec(), measured, tableau_agreement, bound, passed })
}
