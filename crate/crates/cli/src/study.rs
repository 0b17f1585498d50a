use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use itea::analysis::{
    denominator_roots, fit_rate, match_poles, refined_asymptotics_check, run_convergence_study, theta_decay_check,
    RateReport, RefinedOutcome, StudyConfig, ThetaDecayReport,
};
use itea::oracles::{catalog, MeromorphicTestFunction, SmoothPart};
use itea::potential::{Geometry, NodeFamily};
use itea::types::format_complex;
use itea::{build_interpolant, CVector, IteaConfig, NodeMultiset, VectorFunction};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{GeometrySpec, StudyFile};
use crate::error::{CliError, CliResult, Kind};
use crate::samples::{read_samples, SampleFile};

pub const DEFAULT_MAX_P: usize = 40;
/// Smallest `p` at which the divided-difference decay is measured.
const THETA_MIN_P: usize = 20;
const THETA_SLACK: f64 = 0.2;
/// Refined pole constant: relative deviation allowed at `REFINED_AT_P`.
const REFINED_TOL: f64 = 0.2;
const REFINED_AT_P: usize = 30;
/// Allowed spread of `||B_p||` over the sweep.
const B_BAND: f64 = 10.0;
const PROBE_POLE_DISTANCE: f64 = 1e-6;

pub fn max_p_from_env() -> CliResult<usize> {
    match std::env::var("EPSILON_INTERP_MAX_P") {
        Err(_) => Ok(DEFAULT_MAX_P),
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| CliError::invalid(format!("EPSILON_INTERP_MAX_P = '{v}' is not a positive integer"))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub seed: u64,
    pub version: &'static str,
    /// From `SOURCE_DATE_EPOCH`, so that reports stay reproducible.
    pub timestamp: Option<u64>,
    pub max_p: usize,
    pub dropped_p_values: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub p: usize,
    pub coefficients: Vec<Complex64>,
    pub roots: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum StudyBody {
    Catalog {
        rates: RateReport,
        /// Refined pole and error constants, or why they were not checked.
        refined: Option<RefinedOutcome>,
        theta_decay: Option<ThetaDecayReport>,
        max_probe_error: f64,
    },
    Samples {
        records: Vec<SampleRecord>,
        skipped: Vec<(usize, String)>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictLine {
    pub name: String,
    pub detail: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub metadata: Metadata,
    pub config: StudyFile,
    pub study: StudyBody,
    pub verdicts: Vec<VerdictLine>,
}

impl StudyReport {
    pub fn failed(&self) -> Vec<&VerdictLine> {
        self.verdicts.iter().filter(|v| v.verdict == "fail").collect()
    }
}

/// Rows of `rates.csv`, in output order.
#[derive(Debug, Clone)]
pub struct RateRow {
    pub p: usize,
    pub quantity: String,
    pub magnitude: f64,
    pub fitted_ratio: Option<f64>,
    pub bound: Option<f64>,
    pub verdict: String,
}

#[derive(Debug)]
pub struct StudyOutput {
    pub report: StudyReport,
    pub rows: Vec<RateRow>,
}

fn family_for(geometry: &GeometrySpec) -> CliResult<NodeFamily> {
    match geometry {
        GeometrySpec::Disk { radius } => Ok(NodeFamily::Disk { radius: *radius }),
        GeometrySpec::Interval => Ok(NodeFamily::Chebyshev),
        GeometrySpec::Custom => Err(CliError::invalid("custom geometry needs a samples file as function")),
    }
}

fn fmt_ratio(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |r| format!("{r:.4}"))
}

pub fn run_study(cfg: &StudyFile, max_p: usize) -> CliResult<StudyOutput> {
    let all = cfg.p_values();
    let (p_values, dropped): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&p| p <= max_p);
    if p_values.is_empty() {
        return Err(CliError::invalid(format!("every p in the sweep exceeds the cap {max_p}")));
    }
    let metadata = Metadata {
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()),
        max_p,
        dropped_p_values: dropped,
    };
    if let Some(f) = catalog(&cfg.function) {
        catalog_study(cfg, &f, p_values, metadata)
    } else if Path::new(&cfg.function).is_file() {
        let file = read_samples(Path::new(&cfg.function))?;
        samples_study(cfg, &file, p_values, metadata)
    } else {
        Err(CliError::invalid(format!(
            "function '{}' is neither a catalog id ({}) nor a samples file",
            cfg.function,
            itea::oracles::CATALOG_IDS.join(", ")
        )))
    }
}

fn direction(cfg: &StudyFile, dim: usize) -> CliResult<Option<CVector>> {
    match &cfg.q {
        None => Ok(None),
        Some(q) if q.len() == dim => Ok(Some(CVector::new(q.clone()))),
        Some(q) => Err(CliError::invalid(format!("q has {} components, F has {dim}", q.len()))),
    }
}

fn catalog_study(
    cfg: &StudyFile,
    f: &MeromorphicTestFunction,
    p_values: Vec<usize>,
    metadata: Metadata,
) -> CliResult<StudyOutput> {
    let family = family_for(&cfg.geometry)?;
    for &z in &cfg.probes {
        if let Some(a) = f.poles().iter().find(|a| (z - *a).norm() < PROBE_POLE_DISTANCE) {
            return Err(CliError::invalid(format!(
                "probe {} is within {PROBE_POLE_DISTANCE:e} of the pole {}",
                format_complex(z),
                format_complex(*a)
            )));
        }
    }
    let q = direction(cfg, f.dim())?;
    let config = StudyConfig {
        k: cfg.k,
        p_values: p_values.clone(),
        q: q.clone(),
        probes: cfg.probes.clone(),
        rho: cfg.rho,
        slack: cfg.slack,
        noise_factor: cfg.noise,
    };
    let rates = run_convergence_study(f, &family, &config)?;
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for qr in &rates.quantities {
        let label = qr.quantity.label();
        for (&p, &m) in rates.p_values.iter().zip(&qr.magnitudes) {
            rows.push(RateRow {
                p,
                quantity: label.clone(),
                magnitude: m,
                fitted_ratio: qr.fitted_ratio,
                bound: Some(qr.bound),
                verdict: qr.verdict.as_str().into(),
            });
        }
        verdicts.push(VerdictLine {
            name: label,
            detail: format!(
                "fitted {} over {} points, bound {:.4} x {:.2}",
                fmt_ratio(qr.fitted_ratio),
                qr.points_used,
                qr.bound,
                1.0 + cfg.slack
            ),
            verdict: qr.verdict.as_str().into(),
        });
    }

    let refined = if cfg.k >= 1 && f.is_rational() {
        let outcome = refined_asymptotics_check(f, &family, cfg.k, 1, &rates.p_values, &cfg.probes, q.as_ref())?;
        if let RefinedOutcome::Checked(r) = &outcome {
            if let Some(dev) = r.deviation_at(REFINED_AT_P) {
                verdicts.push(VerdictLine {
                    name: "refined_pole_constant_1".into(),
                    detail: format!(
                        "C_1 = {}, deviation {dev:.3e} at p >= {REFINED_AT_P} (limit {REFINED_TOL})",
                        format_complex(r.c_m)
                    ),
                    verdict: if dev <= REFINED_TOL { "pass" } else { "fail" }.into(),
                });
            }
            if !r.probes.is_empty() {
                let band = r.b_band();
                verdicts.push(VerdictLine {
                    name: "refined_error_constant_band".into(),
                    detail: format!("max/min of ||B_p|| = {band:.3} (limit {B_BAND})"),
                    verdict: if band < B_BAND { "pass" } else { "fail" }.into(),
                });
            }
        }
        Some(outcome)
    } else {
        None
    };

    let theta_decay = match f.smooth() {
        SmoothPart::Entire(_) if cfg.rho.is_finite() => {
            let ps: Vec<usize> = rates.p_values.iter().copied().filter(|&p| p >= THETA_MIN_P).collect();
            if ps.is_empty() {
                None
            } else {
                let report = theta_decay_check(&f.smooth_only(), &family, cfg.k, &ps, cfg.rho, THETA_SLACK)?;
                let verdict = if report.passed { "pass" } else { "fail" };
                for (&p, &m) in report.p_values.iter().zip(&report.measured) {
                    rows.push(RateRow {
                        p,
                        quantity: "theta_decay".into(),
                        magnitude: m,
                        fitted_ratio: None,
                        bound: Some(report.bound),
                        verdict: verdict.into(),
                    });
                }
                let worst = report.measured.iter().copied().fold(0.0, f64::max);
                verdicts.push(VerdictLine {
                    name: "theta_decay".into(),
                    detail: format!("max ||Theta||^(1/p) = {worst:.4}, bound {:.4} x {:.2}", report.bound, 1.0 + THETA_SLACK),
                    verdict: verdict.into(),
                });
                Some(report)
            }
        }
        _ => None,
    };

    let max_probe_error = rates.max_probe_error();
    if let Some(tol) = cfg.max_error {
        verdicts.push(VerdictLine {
            name: "max_probe_error".into(),
            detail: format!("{max_probe_error:.3e} (limit {tol:e})"),
            verdict: if max_probe_error <= tol { "pass" } else { "fail" }.into(),
        });
    }
    Ok(StudyOutput {
        report: StudyReport {
            metadata,
            config: cfg.clone(),
            study: StudyBody::Catalog { rates, refined, theta_decay, max_probe_error },
            verdicts,
        },
        rows,
    })
}

fn samples_study(cfg: &StudyFile, file: &SampleFile, p_values: Vec<usize>, metadata: Metadata) -> CliResult<StudyOutput> {
    if cfg.k == 0 {
        return Err(CliError::invalid("a samples-file study tracks poles and needs k >= 1"));
    }
    let geometry = match &cfg.geometry {
        GeometrySpec::Disk { radius } => Geometry::Disk { radius: *radius },
        GeometrySpec::Interval => Geometry::Interval,
        GeometrySpec::Custom => Geometry::Custom,
    };
    let q = direction(cfg, file.dim)?.unwrap_or_else(|| itea::itea::default_direction(file.dim));
    let pool = file.nodes.nodes();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &p in &p_values {
        if p + cfg.k > pool.len() {
            skipped.push((p, format!("needs {} nodes, file has {}", p + cfg.k, pool.len())));
            continue;
        }
        let nodes = NodeMultiset::new(pool[..p + cfg.k].to_vec())?;
        match build_interpolant(&nodes, &file.samples, &IteaConfig::new(p, cfg.k, q.clone())?) {
            Ok(interp) => {
                let mut roots = denominator_roots(&interp)?.roots;
                let level = |z: &Complex64| geometry.level(*z).unwrap_or(z.norm());
                roots.sort_by(|a, b| level(a).total_cmp(&level(b)));
                records.push(SampleRecord { p, coefficients: interp.coefficients().to_vec(), roots });
            }
            Err(e @ itea::Error::SingularSystem { .. }) => skipped.push((p, e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    if records.len() < 2 {
        return Err(CliError::new(
            Kind::Inconclusive,
            format!("only {} p-values produced an interpolant", records.len()),
        ));
    }
    let reference = records.last().map(|r| r.roots.clone()).unwrap_or_default();
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for m in 0..cfg.k {
        let ps: Vec<usize> = records.iter().map(|r| r.p).collect();
        let mags: Vec<f64> = records
            .iter()
            .map(|r| {
                match_poles(&r.roots, &reference)
                    .iter()
                    .find(|pm| pm.reference_index == m)
                    .map_or(f64::INFINITY, |pm| pm.distance)
            })
            .collect();
        let n = mags.len() - 1;
        let fitted = fit_rate(&ps[..n], &mags[..n]).ok();
        let label = format!("pole_change_{}", m + 1);
        for (&p, &mag) in ps.iter().zip(&mags) {
            rows.push(RateRow { p, quantity: label.clone(), magnitude: mag, fitted_ratio: fitted, bound: None, verdict: "unchecked".into() });
        }
        verdicts.push(VerdictLine {
            name: label,
            detail: format!(
                "distance to the estimate {} at p = {}, fitted {}",
                format_complex(reference[m]),
                ps[n],
                fmt_ratio(fitted)
            ),
            verdict: "unchecked".into(),
        });
    }
    Ok(StudyOutput {
        report: StudyReport { metadata, config: cfg.clone(), study: StudyBody::Samples { records, skipped }, verdicts },
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn rates_csv(rows: &[RateRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::new(Kind::Internal, e.to_string());
    w.write_record(["p", "quantity", "magnitude", "fitted_ratio", "bound", "verdict"]).map_err(internal)?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.quantity.clone(),
            format!("{:e}", r.magnitude),
            opt(r.fitted_ratio),
            opt(r.bound),
            r.verdict.clone(),
        ])
        .map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::new(Kind::Internal, e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::new(Kind::Internal, e.to_string()))
}

pub fn summary(out: &StudyOutput, dir: &Path) -> String {
    let r = &out.report;
    let mut s = String::new();
    let ps = r.config.p_values();
    let _ = writeln!(s, "study {} k={} p={}..={} step {}", r.config.function, r.config.k, ps[0], ps[ps.len() - 1], r.config.p_step);
    if !r.metadata.dropped_p_values.is_empty() {
        let _ = writeln!(s, "capped at p <= {}: dropped {:?}", r.metadata.max_p, r.metadata.dropped_p_values);
    }
    match &r.study {
        StudyBody::Catalog { rates, max_probe_error, .. } => {
            let _ = writeln!(s, "{} p-values, {} skipped", rates.p_values.len(), rates.skipped.len());
            let _ = writeln!(s, "max probe error {max_probe_error:.3e}");
        }
        StudyBody::Samples { records, skipped } => {
            let _ = writeln!(s, "{} p-values, {} skipped", records.len(), skipped.len());
        }
    }
    for v in &r.verdicts {
        let _ = writeln!(s, "{:<8} {:<32} {}", v.verdict, v.name, v.detail);
    }
    let _ = writeln!(s, "wrote {} and {}", dir.join("rates.csv").display(), dir.join("report.json").display());
    s
}

pub fn write_outputs(out: &StudyOutput, dir: &PathBuf) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let rates = dir.join("rates.csv");
    std::fs::write(&rates, rates_csv(&out.rows)?).map_err(|e| CliError::io(&rates, e))?;
    let json = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::new(Kind::Internal, e.to_string()))?;
    let report = dir.join("report.json");
    std::fs::write(&report, json + "\n").map_err(|e| CliError::io(&report, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{bundled, parse_config};

    fn bundled_cfg(name: &str) -> StudyFile {
        parse_config(bundled(name).unwrap()).unwrap()
    }

    #[test]
    fn two_pole_study_passes_and_is_deterministic() {
        let cfg = bundled_cfg("two_pole_disk_k1");
        let a = run_study(&cfg, DEFAULT_MAX_P).unwrap();
        assert!(a.report.failed().is_empty(), "{:?}", a.report.verdicts);
        let b = run_study(&cfg, DEFAULT_MAX_P).unwrap();
        assert_eq!(rates_csv(&a.rows).unwrap(), rates_csv(&b.rows).unwrap());
        let StudyBody::Catalog { rates, .. } = &a.report.study else { panic!() };
        assert!(rates.quantities[0].fitted_ratio.unwrap() <= 0.77);
    }

    #[test]
    fn cap_drops_large_p() {
        let cfg = bundled_cfg("two_pole_disk_k1");
        let out = run_study(&cfg, 20).unwrap();
        assert_eq!(out.report.metadata.dropped_p_values, vec![22, 24, 26, 28, 30, 32]);
        assert!(out.rows.iter().all(|r| r.p <= 20));
        assert_eq!(run_study(&cfg, 4).unwrap_err().kind, Kind::InvalidParameters);
    }

    #[test]
    fn probes_near_poles_are_rejected() {
        let mut cfg = bundled_cfg("two_pole_disk_k1");
        cfg.probes = vec![Complex64::new(2.0, 1e-9)];
        assert_eq!(run_study(&cfg, DEFAULT_MAX_P).unwrap_err().kind, Kind::InvalidParameters);
        cfg.probes = vec![];
        cfg.function = "no_such_function".into();
        assert_eq!(run_study(&cfg, DEFAULT_MAX_P).unwrap_err().kind, Kind::InvalidParameters);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![RateRow {
            p: 8,
            quantity: "pole_error_1".into(),
            magnitude: 1.5e-3,
            fitted_ratio: None,
            bound: Some(2.0 / 3.0),
            verdict: "roundoff".into(),
        }];
        let text = rates_csv(&rows).unwrap();
        assert_eq!(text, "p,quantity,magnitude,fitted_ratio,bound,verdict\n8,pole_error_1,1.5e-3,,6.666666666666666e-1,roundoff\n");
    }
}
