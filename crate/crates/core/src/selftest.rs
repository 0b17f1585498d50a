//! Randomized identity suites: the pipeline against the closed-form
//! oracles, and the algebraic properties of the interpolant.
//!
//! Every case draws from its own ChaCha stream derived from the suite seed,
//! so results do not depend on scheduling.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{denominator_roots, match_poles};
use crate::divided_diff::{build_table, SampleSet, VectorFunction};
use crate::error::{Error, Result};
use crate::itea::{assemble_system, build_interpolant, IteaConfig, IteaInterpolant};
use crate::oracles::{
    alpha_matrix, dd_closed_form, error_closed_form, error_via_determinant, q_determinant, q_expansion,
    refined_pole_constant, subsets, t_det, t_factored, u_closed_form, MeromorphicTestFunction, SmoothPart,
};
use crate::types::{inner, CVector, NodeMultiset};

/// Signature of the `T` factorization under test.
pub type TFactoredFn = fn(&CVector, &[CVector], &[Complex64], &[usize]) -> Result<Complex64>;

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn rel_vec(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

pub fn case_rng(seed: u64, suite: &str, case: usize) -> ChaCha8Rng {
    let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(case as u64);
    rng
}

fn rand_c<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Poles in the annulus `1.3 <= |z| <= 2.2`, pairwise at least 0.3 apart.
pub fn random_poles<R: Rng>(rng: &mut R, mu: usize) -> Vec<Complex64> {
    let mut poles: Vec<Complex64> = Vec::with_capacity(mu);
    while poles.len() < mu {
        let z = Complex64::from_polar(rng.gen_range(1.3..2.2), rng.gen_range(0.0..std::f64::consts::TAU));
        if poles.iter().all(|w| (z - w).norm() >= 0.3) {
            poles.push(z);
        }
    }
    poles
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> CVector {
    loop {
        let v = CVector::new((0..dim).map(|_| rand_c(rng, 1.0)).collect());
        if v.norm() >= 0.3 {
            return v;
        }
    }
}

/// A direction whose inner products with all residues are not small.
pub fn random_direction<R: Rng>(rng: &mut R, residues: &[CVector]) -> CVector {
    let dim = residues.first().map_or(1, CVector::dim);
    loop {
        let q = random_vector(rng, dim);
        let ok = residues
            .iter()
            .all(|v| inner(&q, v).is_ok_and(|x| x.norm() >= 0.1 * q.norm() * v.norm()));
        if ok {
            return q;
        }
    }
}

/// Rotated roots of unity; with `confluent`, one node is doubled.
pub fn random_nodes<R: Rng>(rng: &mut R, count: usize, confluent: bool) -> NodeMultiset {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut pts: Vec<Complex64> = (0..count)
        .map(|i| Complex64::from_polar(1.0, theta + std::f64::consts::TAU * i as f64 / count as f64))
        .collect();
    if confluent && count >= 3 {
        let i = rng.gen_range(0..count - 1);
        pts[i + 1] = pts[i];
    }
    NodeMultiset::new(pts).expect("generated nodes are finite and grouped")
}

pub fn random_rational<R: Rng>(rng: &mut R, dim: usize, mu: usize, poly_degree: Option<usize>) -> MeromorphicTestFunction {
    let poles = random_poles(rng, mu);
    let residues = (0..mu).map(|_| random_vector(rng, dim)).collect();
    let smooth = match poly_degree {
        None => SmoothPart::None,
        Some(d) => SmoothPart::Polynomial((0..=d).map(|_| random_vector(rng, dim).scale(Complex64::new(0.5, 0.0))).collect()),
    };
    MeromorphicTestFunction::new(poles, residues, smooth).expect("generated function is valid")
}

/// A rational instance with its nodes, sizes and direction.
#[derive(Debug, Clone)]
pub struct Instance {
    pub f: MeromorphicTestFunction,
    pub nodes: NodeMultiset,
    pub p: usize,
    pub k: usize,
    pub q: CVector,
}

impl Instance {
    pub fn interpolant(&self) -> Result<IteaInterpolant> {
        self.interpolant_with(&self.nodes, &self.q)
    }

    pub fn interpolant_with(&self, nodes: &NodeMultiset, q: &CVector) -> Result<IteaInterpolant> {
        let samples = SampleSet::from_function(&self.f, nodes);
        build_interpolant(nodes, &samples, &IteaConfig::new(self.p, self.k, q.clone())?)
    }
}

/// `mu = k`, total numerator degree at most `p - 1`: the interpolant
/// reproduces `F`.
pub fn reproducing_instance<R: Rng>(rng: &mut R) -> Instance {
    let dim = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=3);
    let p = rng.gen_range(k + 2..=12);
    let max_poly = p - 1 - k;
    let poly = if rng.gen_bool(0.5) { Some(rng.gen_range(0..=max_poly)) } else { None };
    let f = random_rational(rng, dim, k, poly);
    let confluent = rng.gen_bool(0.3);
        let nodes = random_nodes(rng, p + k, confluent);
    let q = random_direction(rng, f.residues());
    Instance { f, nodes, p, k, q }
}

/// `k < mu <= 4`, `p <= 20`, no polynomial part.
pub fn convergent_instance<R: Rng>(rng: &mut R) -> Instance {
    bounded_instance(rng, false, f64::INFINITY)
}

/// `k < mu <= 4` (or `k = mu` with `reproducing`), `p <= 20`, capped so
/// that `|z|^(p+k) <= growth` for every pole. Sample roundoff is amplified
/// by up to that factor in the denominator coefficients.
pub fn bounded_instance<R: Rng>(rng: &mut R, reproducing: bool, growth: f64) -> Instance {
    let dim = rng.gen_range(1..=3);
    let mu = rng.gen_range(if reproducing { 1 } else { 2 }..=4);
    let k = if reproducing { mu } else { rng.gen_range(1..mu) };
    let f = random_rational(rng, dim, mu, None);
    let farthest = f.poles().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cap = (growth.ln() / farthest.ln()).floor().min(1e3) as usize;
    let p_max = cap.saturating_sub(k).clamp(k + 2, 20);
    let p = rng.gen_range(k + 2..=p_max);
    let nodes = random_nodes(rng, p + k, false);
    let q = random_direction(rng, f.residues());
    Instance { f, nodes, p, k, q }
}

/// 100 points on a polar grid over `|z| <= 1.2`, dropping those within
/// 0.1 of a pole.
pub fn probe_grid(poles: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            let r = 0.12 * (i + 1) as f64;
            let z = Complex64::from_polar(r, std::f64::consts::TAU * (j as f64 + 0.5 * (i % 2) as f64) / 10.0);
            if poles.iter().all(|a| (z - a).norm() > 0.1) {
                out.push(z);
            }
        }
    }
    out
}

/// Worst relative error of one identity over its cases.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    /// Index of the case attaining `worst`.
    pub worst_case: usize,
    pub tolerance: f64,
    /// Cases that could not be evaluated, with the reason of the first one.
    pub errors: Vec<String>,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.worst <= self.tolerance
    }

    pub fn line(&self) -> String {
        format!(
            "{:<24} cases={:<4} worst={:.3e} (case {}) tol={:.0e} {}{}",
            self.name,
            self.cases,
            self.worst,
            self.worst_case,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" },
            self.errors.first().map(|e| format!(" ({e})")).unwrap_or_default()
        )
    }
}

fn run_cases<F>(name: &'static str, seed: u64, cases: usize, tolerance: f64, case: F) -> IdentityResult
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let outcomes: Vec<Result<f64>> = (0..cases)
        .into_par_iter()
        .map(|i| case(&mut case_rng(seed, name, i)))
        .collect();
    let mut worst: f64 = 0.0;
    let mut worst_case = 0;
    let mut errors = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(w) if w.is_nan() => errors.push(format!("case {i}: NaN")),
            Ok(w) if w > worst => {
                worst = w;
                worst_case = i;
            }
            Ok(_) => {}
            Err(e) => errors.push(format!("case {i}: {e}")),
        }
    }
    IdentityResult { name, cases, worst, worst_case, tolerance, errors }
}

/// `R = F` on a grid when `F` is rational of type `[p-1/k]`.
pub fn suite_reproducing(seed: u64, cases: usize) -> IdentityResult {
    run_cases("reproducing", seed, cases, 1e-9, |rng| {
        let inst = reproducing_instance(rng);
        let r = inst.interpolant()?;
        let grid = probe_grid(inst.f.poles());
        let values: Vec<CVector> = grid.iter().map(|&z| inst.f.value(z)).collect();
        let floor = 1e-3 * values.iter().map(CVector::norm).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for (&z, fz) in grid.iter().zip(&values) {
            let rz = r.eval(z)?;
            worst = worst.max((fz - &rz).norm() / fz.norm().max(floor));
        }
        Ok(worst)
    })
}

/// `(q, F - R)(xi_{p+i}) = 0`, relative to `|q| max ||F(xi)||`.
pub fn suite_projection(seed: u64, cases: usize) -> IdentityResult {
    run_cases("projection", seed, cases, 1e-10, |rng| {
        let reproducing = rng.gen_bool(0.5);
        let inst = bounded_instance(rng, reproducing, GROWTH);
        let r = inst.interpolant()?;
        let scale = inst.q.norm() * inst.nodes.nodes().iter().map(|&x| inst.f.value(x).norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for i in 1..=inst.k {
            let xi = inst.nodes.node(inst.p + i);
            let d = &inst.f.value(xi) - &r.eval(xi)?;
            worst = worst.max(inner(&inst.q, &d)?.norm() / scale);
        }
        Ok(worst)
    })
}

const GROWTH: f64 = 1e4;
const MAX_DRAWS: usize = 1000;

fn exhausted() -> Error {
    Error::Precondition(format!("no well-conditioned instance in {MAX_DRAWS} draws"))
}

/// Interpolants built from samples perturbed by a relative `eps`.
pub fn perturbed_interpolants<R: Rng>(rng: &mut R, inst: &Instance, trials: usize) -> Result<Vec<IteaInterpolant>> {
    let clean = SampleSet::from_function(&inst.f, &inst.nodes);
    let config = IteaConfig::new(inst.p, inst.k, inst.q.clone())?;
    (0..trials)
        .map(|_| {
            let mut noisy = SampleSet::new(clean.dim());
            for (point, derivs) in clean.entries() {
                let jittered = derivs
                    .iter()
                    .map(|v| CVector::new(v.iter().map(|x| x * (Complex64::new(1.0, 0.0) + rand_c(rng, f64::EPSILON))).collect()))
                    .collect();
                noisy.insert(*point, jittered)?;
            }
            build_interpolant(&inst.nodes, &noisy, &config)
        })
        .collect()
}

/// Largest relative change of `V`'s monomial coefficients under sample
/// perturbations at roundoff level.
pub fn sample_sensitivity<R: Rng>(rng: &mut R, inst: &Instance, trials: usize) -> Result<f64> {
    let base = inst.interpolant()?.denominator_monomial();
    let mut worst: f64 = 0.0;
    for r in perturbed_interpolants(rng, inst, trials)? {
        worst = worst.max(rel_vec(&base, &r.denominator_monomial()));
    }
    Ok(worst)
}

/// Distinct nodes, redrawn until the instance resolves `tol / 10`.
fn distinct_instance(rng: &mut ChaCha8Rng, tol: f64) -> Result<Instance> {
    for _ in 0..MAX_DRAWS {
        let reproducing = rng.gen_bool(0.5);
        let mut inst = bounded_instance(rng, reproducing, GROWTH);
        inst.nodes = random_nodes(rng, inst.p + inst.k, false);
        if sample_sensitivity(rng, &inst, 4)? <= 0.1 * tol {
            return Ok(inst);
        }
    }
    Err(exhausted())
}

/// Monomial coefficients of `V` under permutations of all nodes.
pub fn suite_symmetry_v(seed: u64, cases: usize, permutations: usize) -> IdentityResult {
    run_cases("symmetry_denominator", seed, cases, 1e-9, |rng| {
        let inst = distinct_instance(rng, 1e-9)?;
        let base = inst.interpolant()?.denominator_monomial();
        let mut worst: f64 = 0.0;
        for _ in 0..permutations {
            let mut pts = inst.nodes.nodes().to_vec();
            pts.shuffle(rng);
            let perm = NodeMultiset::new(pts)?;
            worst = worst.max(rel_vec(&base, &inst.interpolant_with(&perm, &inst.q)?.denominator_monomial()));
        }
        Ok(worst)
    })
}

/// `R(z)` under permutations of the first `p` nodes.
pub fn suite_symmetry_r(seed: u64, cases: usize, permutations: usize) -> IdentityResult {
    run_cases("symmetry_interpolant", seed, cases, 1e-9, |rng| {
        let inst = distinct_instance(rng, 1e-9)?;
        let base = inst.interpolant()?;
        let probes = [Complex64::new(0.3, 0.1), Complex64::new(-0.5, 0.6), Complex64::new(1.1, -0.2)];
        let mut worst: f64 = 0.0;
        for _ in 0..permutations {
            let mut pts = inst.nodes.nodes().to_vec();
            pts[..inst.p].shuffle(rng);
            let perm = inst.interpolant_with(&NodeMultiset::new(pts)?, &inst.q)?;
            for &z in &probes {
                worst = worst.max(base.eval(z)?.relative_distance(&perm.eval(z)?));
            }
        }
        Ok(worst)
    })
}

fn random_t_setup(rng: &mut ChaCha8Rng) -> (MeromorphicTestFunction, usize, CVector) {
    let k = rng.gen_range(1..=4);
    let mu = rng.gen_range(k..=k + 2);
    let dim = rng.gen_range(1..=3);
    let f = random_rational(rng, dim, mu, None);
    let q = random_vector(rng, dim);
    (f, k, q)
}

/// `T_det = T_factored` over every `k`-subset of poles.
pub fn suite_t_identity(seed: u64, cases: usize, t_fn: TFactoredFn) -> IdentityResult {
    run_cases("t_factorization", seed, cases, 1e-10, |rng| {
        let (f, k, q) = random_t_setup(rng);
        let p = rng.gen_range(1..=20);
        let confluent = rng.gen_bool(0.2);
        let nodes = random_nodes(rng, p + k, confluent);
        let alpha = alpha_matrix(&f, &nodes, p, k, &q)?;
        let mut worst: f64 = 0.0;
        for cols in subsets(f.pole_count(), k) {
            worst = worst.max(rel(t_det(&alpha, &cols), t_fn(&q, f.residues(), f.poles(), &cols)?));
        }
        Ok(worst)
    })
}

/// `T_det` from the alpha matrices at two different `p`.
pub fn suite_t_p_independence(seed: u64, cases: usize) -> IdentityResult {
    run_cases("t_p_independence", seed, cases, 1e-10, |rng| {
        let (f, k, q) = random_t_setup(rng);
        let p1 = rng.gen_range(1..=10);
        let p2 = rng.gen_range(11..=20);
        let a1 = alpha_matrix(&f, &random_nodes(rng, p1 + k, false), p1, k, &q)?;
        let a2 = alpha_matrix(&f, &random_nodes(rng, p2 + k, false), p2, k, &q)?;
        let mut worst: f64 = 0.0;
        for cols in subsets(f.pole_count(), k) {
            worst = worst.max(rel(t_det(&a1, &cols), t_det(&a2, &cols)));
        }
        Ok(worst)
    })
}

/// Direct, determinant-form and closed-form errors pairwise.
pub fn suite_error_equivalence(seed: u64, cases: usize) -> IdentityResult {
    run_cases("error_equivalence", seed, cases, 1e-8, |rng| {
        // redraw until the direct error is resolved to better than tol/10
        let mut drawn = None;
        'draw: for _ in 0..MAX_DRAWS {
            let inst = convergent_instance(rng);
            let z = Complex64::from_polar(rng.gen_range(0.2..1.25), rng.gen_range(0.0..std::f64::consts::TAU));
            if inst.nodes.nodes().iter().any(|x| (x - z).norm() < 0.05) {
                continue;
            }
            let fz = inst.f.value(z);
            let direct = &fz - &inst.interpolant()?.eval(z)?;
            for r in perturbed_interpolants(rng, &inst, 4)? {
                if (&fz - &r.eval(z)?).relative_distance(&direct) > 1e-9 {
                    continue 'draw;
                }
            }
            drawn = Some((inst, z, direct));
            break;
        }
        let (inst, z, direct) = drawn.ok_or_else(exhausted)?;
        let closed = error_closed_form(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q, z)?;
        let det = error_via_determinant(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q, z)?;
        Ok(direct
            .relative_distance(&closed)
            .max(direct.relative_distance(&det))
            .max(closed.relative_distance(&det)))
    })
}

/// The closed-form `u` against the tableau assembly.
pub fn suite_u_closed_form(seed: u64, cases: usize) -> IdentityResult {
    run_cases("u_closed_form", seed, cases, 1e-9, |rng| {
        let inst = bounded_instance(rng, false, GROWTH);
        let table = build_table(&inst.nodes, &SampleSet::from_function(&inst.f, &inst.nodes))?;
        let config = IteaConfig::new(inst.p, inst.k, inst.q.clone())?;
        let pipe = assemble_system(&table, &config)?;
        let closed = u_closed_form(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q)?;
        let mut worst: f64 = 0.0;
        for i in 0..inst.k {
            worst = worst.max(rel_vec(pipe.u.row(i), closed.u.row(i)));
        }
        Ok(worst)
    })
}

/// The closed-form divided differences against the tableau.
pub fn suite_dd_closed_form(seed: u64, cases: usize) -> IdentityResult {
    run_cases("dd_closed_form", seed, cases, 1e-9, |rng| {
        let dim = rng.gen_range(1..=3);
        let mu = rng.gen_range(1..=4);
        let deg = if rng.gen_bool(0.5) { Some(rng.gen_range(0..=2)) } else { None };
        let f = random_rational(rng, dim, mu, deg);
        let len = rng.gen_range(4..=16);
        let confluent = rng.gen_bool(0.3);
        let nodes = random_nodes(rng, len, confluent);
        let table = build_table(&nodes, &SampleSet::from_function(&f, &nodes))?;
        let min_order = deg.map_or(0, |d| d + 1);
        let mut worst: f64 = 0.0;
        for m in 1..=len {
            for n in (m + min_order)..=len {
                worst = worst.max(table.get(m, n)?.relative_distance(&dd_closed_form(&f, &nodes, m, n)?));
            }
        }
        Ok(worst)
    })
}

/// The subset expansion of the denominator determinant.
pub fn suite_q_expansion(seed: u64, cases: usize) -> IdentityResult {
    run_cases("q_expansion", seed, cases, 1e-9, |rng| {
        let inst = bounded_instance(rng, false, GROWTH);
        let system = u_closed_form(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q)?;
        let z = rand_c(rng, 1.5);
        Ok(rel(
            q_expansion(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q, z)?,
            q_determinant(&system, &inst.nodes, z)?,
        ))
    })
}

/// Poles of `V`, `R(z)` and `C_1` under `q -> t q`.
pub fn suite_q_scale(seed: u64, cases: usize) -> IdentityResult {
    run_cases("q_scale_invariance", seed, cases, 1e-10, |rng| {
        let inst = bounded_instance(rng, false, GROWTH);
        let t = loop {
            let t = rand_c(rng, 3.0);
            if t.norm() > 0.1 {
                break t;
            }
        };
        let qt = inst.q.scale(t);
        let a = inst.interpolant()?;
        let b = inst.interpolant_with(&inst.nodes, &qt)?;
        let ra = denominator_roots(&a)?.roots;
        let rb = denominator_roots(&b)?.roots;
        let mut worst: f64 = 0.0;
        for pm in match_poles(&rb, &ra) {
            worst = worst.max(pm.distance / pm.reference.norm().max(1.0));
        }
        let z = Complex64::new(0.2, -0.3);
        worst = worst.max(a.eval(z)?.relative_distance(&b.eval(z)?));
        let ca = refined_pole_constant(&inst.f, &inst.nodes, inst.p, inst.k, &inst.q, 1)?;
        let cb = refined_pole_constant(&inst.f, &inst.nodes, inst.p, inst.k, &qt, 1)?;
        Ok(worst.max(rel(ca, cb)))
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub t_factored: TFactoredFn,
}

impl SelftestOptions {
    pub fn new(seed: u64) -> Self {
        SelftestOptions { seed, t_factored }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestSummary {
    pub seed: u64,
    pub results: Vec<IdentityResult>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.results.iter().all(IdentityResult::passed)
    }

    pub fn worst(&self) -> f64 {
        self.results.iter().map(|r| r.worst).fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let mut out = format!("selftest seed={}\n", self.seed);
        for r in &self.results {
            out.push_str(&r.line());
            out.push('\n');
        }
        let failed = self.results.iter().filter(|r| !r.passed()).count();
        out.push_str(&format!(
            "summary: {} identities, {} failed, worst relative error {:.3e}\n",
            self.results.len(),
            failed,
            self.worst()
        ));
        out
    }
}

/// Runs every identity suite with the given seed.
pub fn run_selftest(options: &SelftestOptions) -> SelftestSummary {
    let s = options.seed;
    let results = vec![
        suite_reproducing(s, 20),
        suite_projection(s, 20),
        suite_symmetry_v(s, 10, 10),
        suite_symmetry_r(s, 10, 10),
        suite_t_identity(s, 100, options.t_factored),
        suite_t_p_independence(s, 50),
        suite_error_equivalence(s, 50),
        suite_u_closed_form(s, 30),
        suite_dd_closed_form(s, 30),
        suite_q_expansion(s, 30),
        suite_q_scale(s, 20),
    ];
    SelftestSummary { seed: s, results }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_streams_are_distinct_and_stable() {
        let a: u64 = case_rng(1, "x", 0).gen();
        let b: u64 = case_rng(1, "x", 1).gen();
        let c: u64 = case_rng(1, "y", 0).gen();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, case_rng(1, "x", 0).gen::<u64>());
    }

    #[test]
    fn generators_respect_constraints() {
        let mut rng = case_rng(7, "gen", 0);
        for _ in 0..20 {
            let poles = random_poles(&mut rng, 4);
            for (i, a) in poles.iter().enumerate() {
                assert!(a.norm() >= 1.3 && a.norm() <= 2.2);
                assert!(poles[..i].iter().all(|b| (a - b).norm() >= 0.3));
            }
            let inst = reproducing_instance(&mut rng);
            assert_eq!(inst.nodes.len(), inst.p + inst.k);
            assert_eq!(inst.f.pole_count(), inst.k);
            assert!(inst.p >= inst.k + 2 && inst.p <= 12);
        }
    }

    #[test]
    fn mutated_factorization_is_caught() {
        fn flipped(q: &CVector, r: &[CVector], z: &[Complex64], cols: &[usize]) -> Result<Complex64> {
            t_factored(q, r, z, cols).map(|t| -t)
        }
        assert!(!suite_t_identity(3, 10, flipped).passed());
        assert!(suite_t_identity(3, 10, t_factored).passed());
    }
}
