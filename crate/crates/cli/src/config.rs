//! Flat `key = value` study configuration. `#` starts a comment.
//!
//! Keys: `function`, `geometry.kind` (`disk`, `interval`, `custom`),
//! `geometry.radius`, `k`, `p.min`, `p.max`, `p.step`, `q` (`default` or a
//! comma-separated complex vector), `probes`, `rho`, `seed`, `output.dir`,
//! `tolerances.slack`, `tolerances.noise`, `tolerances.max_error`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{parse_complex, parse_complex_list};
use crate::error::{CliError, CliResult};

pub const BUNDLED: &[(&str, &str)] = &[
    ("two_pole_disk_k1", include_str!("../configs/two_pole_disk_k1.conf")),
    ("reproducing_k_eq_mu", include_str!("../configs/reproducing_k_eq_mu.conf")),
    ("meromorphic_exp", include_str!("../configs/meromorphic_exp.conf")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

const KEYS: &[&str] = &[
    "function",
    "geometry.kind",
    "geometry.radius",
    "k",
    "p.min",
    "p.max",
    "p.step",
    "q",
    "probes",
    "rho",
    "seed",
    "output.dir",
    "tolerances.slack",
    "tolerances.noise",
    "tolerances.max_error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometrySpec {
    Disk { radius: f64 },
    Interval,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyFile {
    /// Catalog id or samples-file path.
    pub function: String,
    pub geometry: GeometrySpec,
    pub k: usize,
    pub p_min: usize,
    pub p_max: usize,
    pub p_step: usize,
    /// `None` selects the default direction.
    pub q: Option<Vec<Complex64>>,
    pub probes: Vec<Complex64>,
    #[serde(serialize_with = "serialize_finite")]
    pub rho: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub slack: f64,
    pub noise: f64,
    pub max_error: Option<f64>,
}

fn serialize_finite<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

impl StudyFile {
    pub fn p_values(&self) -> Vec<usize> {
        (self.p_min..=self.p_max).step_by(self.p_step).collect()
    }
}

fn split_lines(text: &str) -> CliResult<BTreeMap<String, (String, usize)>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::malformed(format!("line {line_no}: expected key = value")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::malformed(format!("line {line_no}: unknown key '{key}'")));
        }
        if let Some((_, first)) = map.insert(key.to_string(), (value.trim().to_string(), line_no)) {
            return Err(CliError::malformed(format!("line {line_no}: key '{key}' already set on line {first}")));
        }
    }
    Ok(map)
}

struct Entries(BTreeMap<String, (String, usize)>);

impl Entries {
    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.0.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> CliResult<T> {
        match self.raw(key) {
            Some((v, line)) => v
                .parse()
                .map_err(|_| CliError::malformed(format!("line {line}: {key} = '{v}' is not valid"))),
            None => default.ok_or_else(|| CliError::malformed(format!("missing required key '{key}'"))),
        }
    }
}

pub fn parse_config(text: &str) -> CliResult<StudyFile> {
    let e = Entries(split_lines(text)?);
    let function = e.parse::<String>("function", None)?;
    let geometry = match e.raw("geometry.kind") {
        None | Some(("disk", _)) => {
            let radius: f64 = e.parse("geometry.radius", Some(1.0))?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(CliError::malformed("geometry.radius must be positive"));
            }
            GeometrySpec::Disk { radius }
        }
        Some(("interval", _)) => GeometrySpec::Interval,
        Some(("custom", _)) => GeometrySpec::Custom,
        Some((other, line)) => {
            return Err(CliError::malformed(format!(
                "line {line}: geometry.kind = '{other}', expected disk, interval or custom"
            )))
        }
    };
    let k = e.parse("k", None)?;
    let p_min = e.parse("p.min", None)?;
    let p_max = e.parse("p.max", None)?;
    let p_step: usize = e.parse("p.step", Some(1))?;
    if p_step == 0 || p_min > p_max || p_min == 0 {
        return Err(CliError::malformed(format!(
            "p range {p_min}..={p_max} step {p_step} is empty or starts at 0"
        )));
    }
    let q = match e.raw("q") {
        None | Some(("default", _)) => None,
        Some((v, line)) => Some(parse_complex_list(v).map_err(|m| CliError::malformed(format!("line {line}: q: {m}")))?),
    };
    let probes = match e.raw("probes") {
        None => vec![],
        Some((v, line)) => parse_complex_list(v).map_err(|m| CliError::malformed(format!("line {line}: probes: {m}")))?,
    };
    let rho = match e.raw("rho") {
        None | Some(("inf", _)) => f64::INFINITY,
        Some((v, line)) => {
            let r = parse_complex(v)
                .ok()
                .filter(|z| z.im == 0.0 && z.re > 1.0)
                .ok_or_else(|| CliError::malformed(format!("line {line}: rho must be a real number > 1 or 'inf'")))?;
            r.re
        }
    };
    let slack: f64 = e.parse("tolerances.slack", Some(itea::analysis::RATE_SLACK))?;
    let noise: f64 = e.parse("tolerances.noise", Some(1.0))?;
    if !(slack >= 0.0) || !(noise > 0.0) {
        return Err(CliError::malformed("tolerances.slack must be >= 0 and tolerances.noise > 0"));
    }
    let max_error = match e.raw("tolerances.max_error") {
        None => None,
        Some(_) => Some(e.parse::<f64>("tolerances.max_error", None)?),
    };
    Ok(StudyFile {
        function,
        geometry,
        k,
        p_min,
        p_max,
        p_step,
        q,
        probes,
        rho,
        seed: e.parse("seed", Some(0))?,
        output_dir: PathBuf::from(e.parse::<String>("output.dir", Some("out".into()))?),
        slack,
        noise,
        max_error,
    })
}
