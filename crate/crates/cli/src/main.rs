//! `epsilon-interp`: vector rational interpolation from sample files,
//! convergence studies on catalog functions, and randomized self-tests.

mod complex;
mod config;
mod error;
mod samples;
mod study;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use itea::oracles::t_factored;
use itea::selftest::{run_selftest, SelftestOptions};
use itea::{build_interpolant, CVector, IteaConfig, NodeMultiset};
use num_complex::Complex64;

use crate::complex::parse_complex_list;
use crate::error::{CliError, CliResult, Kind};

#[derive(Parser, Debug)]
#[command(name = "epsilon-interp", version, about = "Vector-valued rational interpolation and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build R_{p,k} from a samples CSV and evaluate it.
    Interp {
        /// CSV with node_re,node_im,deriv_order,c0_re,c0_im,... columns.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated complex vector, or `default`.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Evaluation points; repeat the flag or separate with commas.
        #[arg(long, allow_hyphen_values = true)]
        eval: Vec<String>,
    },
    /// Run a convergence study from a config file or a bundled config name.
    Study {
        /// Config file path, or one of the bundled names.
        #[arg(long)]
        config: String,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` (recorded in the report).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized identity suites.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the summary to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Rounds to 12 significant digits, then prints the shortest form.
fn short(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{}", rounded + 0.0)
}

/// As [`short`] per component; a component below `1e-12` of the other is
/// printed as zero.
fn short_c(z: Complex64) -> String {
    let scale = z.re.abs().max(z.im.abs());
    let part = |x: f64| if x.abs() < 1e-12 * scale { 0.0 } else { short(x).parse().unwrap_or(x) };
    itea::types::format_complex(Complex64::new(part(z.re), part(z.im)))
}

fn cmd_interp(samples: &Path, p: usize, k: usize, q: Option<&str>, eval: &[String]) -> CliResult<String> {
    let file = samples::read_samples(samples)?;
    let need = p + k;
    if file.nodes.len() < need {
        return Err(CliError::malformed(format!(
            "{}: {} nodes after grouping, p + k = {need} needed",
            samples.display(),
            file.nodes.len()
        )));
    }
    let q = match q {
        None | Some("default") => itea::itea::default_direction(file.dim),
        Some(text) => {
            let v = parse_complex_list(text).map_err(|m| CliError::malformed(format!("--q: {m}")))?;
            if v.len() != file.dim {
                return Err(CliError::invalid(format!("--q has {} components, samples have {}", v.len(), file.dim)));
            }
            CVector::new(v)
        }
    };
    let mut points = Vec::new();
    for text in eval {
        points.extend(parse_complex_list(text).map_err(|m| CliError::malformed(format!("--eval: {m}")))?);
    }
    let nodes = NodeMultiset::new(file.nodes.nodes()[..need].to_vec())?;
    let interp = build_interpolant(&nodes, &file.samples, &IteaConfig::new(p, k, q)?)?;

    let mut out = format!("interpolant p={p} k={k} dim={} nodes={need}\n", file.dim);
    if k > 0 {
        out.push_str(&format!("min_pivot {:.3e}\n", interp.min_pivot()));
        let coeffs: Vec<String> = interp.coefficients().iter().map(|&c| short_c(c)).collect();
        out.push_str(&format!("denominator coefficients {}\n", coeffs.join(" ")));
        let roots = itea::analysis::denominator_roots(&interp)?;
        for z in &roots.roots {
            out.push_str(&format!("denominator root {}\n", short_c(*z)));
        }
    } else {
        out.push_str("denominator 1 (polynomial interpolation)\n");
    }
    for &z in &points {
        let value = interp.eval(z)?;
        let parts: Vec<String> = value.iter().map(|&c| short_c(c)).collect();
        out.push_str(&format!("R({}) = [{}]\n", short_c(z), parts.join(", ")));
    }
    Ok(out)
}

fn load_config(name: &str) -> CliResult<config::StudyFile> {
    let path = PathBuf::from(name);
    let text = if path.is_file() {
        std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?
    } else if let Some(text) = config::bundled(name) {
        text.to_string()
    } else {
        let names: Vec<&str> = config::BUNDLED.iter().map(|(n, _)| *n).collect();
        return Err(CliError::new(
            Kind::Io,
            format!("{name}: no such file and not a bundled config ({})", names.join(", ")),
        ));
    };
    config::parse_config(&text).map_err(|e| CliError::new(e.kind, format!("{name}: {}", e.message)))
}

fn cmd_study(name: &str, out: Option<PathBuf>, seed: Option<u64>) -> CliResult<String> {
    let mut cfg = load_config(name)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let result = study::run_study(&cfg, study::max_p_from_env()?)?;
    study::write_outputs(&result, &cfg.output_dir)?;
    let text = study::summary(&result, &cfg.output_dir);
    let failed = result.report.failed();
    if failed.is_empty() {
        Ok(text)
    } else {
        print!("{text}");
        let names: Vec<&str> = failed.iter().map(|v| v.name.as_str()).collect();
        Err(CliError::new(Kind::VerdictFailed, format!("failing verdicts: {}", names.join(", "))))
    }
}

fn cmd_selftest(seed: u64, out: Option<PathBuf>) -> CliResult<String> {
    let summary = run_selftest(&SelftestOptions { seed, t_factored });
    let text = summary.render();
    if let Some(path) = out {
        std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    }
    if summary.passed() {
        Ok(text)
    } else {
        print!("{text}");
        let names: Vec<&str> = summary.results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
        Err(CliError::new(Kind::SelftestFailed, format!("identities failed: {}", names.join(", "))))
    }
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Interp { samples, p, k, q, eval } => cmd_interp(&samples, p, k, q.as_deref(), &eval),
        Command::Study { config, out, seed } => cmd_study(&config, out, seed),
        Command::Selftest { seed, out } => cmd_selftest(seed, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let err = CliError::new(Kind::Usage, first.trim_start_matches("error: "));
            eprintln!("{err}");
            return ExitCode::from(Kind::Usage.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_rounds_noise() {
        assert_eq!(short(2.9999999999999996), "3");
        assert_eq!(short(-0.5), "-0.5");
        assert_eq!(short(-0.0), "0");
        assert_eq!(short_c(Complex64::new(3.0000000000000004, -1e-17)), "3+0i");
        assert_eq!(short_c(Complex64::new(0.5, -0.25)), "0.5-0.25i");
    }
}
