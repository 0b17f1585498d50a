//! Samples CSV: `node_re,node_im,deriv_order,c0_re,c0_im,...`.
//!
//! Consecutive rows at the same node with `deriv_order` 0, 1, ... carry
//! `F, F', ...` there and make that node confluent.

use std::io::Read;
use std::path::Path;

use itea::{CVector, NodeMultiset, SampleSet};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct SampleFile {
    pub nodes: NodeMultiset,
    pub samples: SampleSet,
    pub dim: usize,
}

fn dim_from_header(header: &csv::StringRecord) -> CliResult<usize> {
    let fields: Vec<&str> = header.iter().map(str::trim).collect();
    if fields.len() < 5 || fields[..3] != ["node_re", "node_im", "deriv_order"] {
        return Err(CliError::malformed(
            "row 1: header must start with node_re,node_im,deriv_order followed by c0_re,c0_im,...",
        ));
    }
    let rest = &fields[3..];
    if rest.len() % 2 != 0 {
        return Err(CliError::malformed("row 1: component columns must come in _re/_im pairs"));
    }
    for (i, pair) in rest.chunks(2).enumerate() {
        if pair[0] != format!("c{i}_re") || pair[1] != format!("c{i}_im") {
            return Err(CliError::malformed(format!(
                "row 1: expected c{i}_re,c{i}_im, found {},{}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(rest.len() / 2)
}

fn number(field: &str, row: usize, column: &str) -> CliResult<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::malformed(format!("row {row}: {column} = '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::malformed(format!("row {row}: {column} is not finite")));
    }
    Ok(v)
}

pub fn parse_samples<R: Read>(reader: R) -> CliResult<SampleFile> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| CliError::malformed(format!("row 1: {e}")))?.clone();
    let dim = dim_from_header(&header)?;
    let columns: Vec<String> = header.iter().map(String::from).collect();

    let mut points: Vec<Complex64> = Vec::new();
    let mut groups: Vec<(Complex64, Vec<CVector>, usize)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| CliError::malformed(format!("row {row}: {e}")))?;
        if record.len() != columns.len() {
            return Err(CliError::malformed(format!(
                "row {row}: {} fields, header has {}",
                record.len(),
                columns.len()
            )));
        }
        let node = Complex64::new(number(&record[0], row, "node_re")?, number(&record[1], row, "node_im")?);
        let order: usize = record[2]
            .trim()
            .parse()
            .map_err(|_| CliError::malformed(format!("row {row}: deriv_order = '{}' is not a nonnegative integer", &record[2])))?;
        let value = CVector::new(
            (0..dim)
                .map(|c| {
                    Ok(Complex64::new(
                        number(&record[3 + 2 * c], row, &columns[3 + 2 * c])?,
                        number(&record[4 + 2 * c], row, &columns[4 + 2 * c])?,
                    ))
                })
                .collect::<CliResult<_>>()?,
        );
        match groups.last_mut() {
            Some((last, derivs, _)) if *last == node => {
                if order != derivs.len() {
                    return Err(CliError::malformed(format!(
                        "row {row}: deriv_order {order} at node {}, expected {}",
                        itea::types::format_complex(node),
                        derivs.len()
                    )));
                }
                derivs.push(value);
            }
            _ => {
                if let Some(first) = groups.iter().find(|g| g.0 == node) {
                    return Err(CliError::malformed(format!(
                        "row {row}: node {} repeats the run starting at row {}",
                        itea::types::format_complex(node),
                        first.2
                    )));
                }
                if order != 0 {
                    return Err(CliError::malformed(format!(
                        "row {row}: node {} starts with deriv_order {order}, expected 0",
                        itea::types::format_complex(node)
                    )));
                }
                groups.push((node, vec![value], row));
            }
        }
        points.push(node);
    }
    if points.is_empty() {
        return Err(CliError::malformed("no data rows"));
    }
    let nodes = NodeMultiset::new(points)?;
    let mut samples = SampleSet::new(dim);
    for (node, derivs, _) in groups {
        samples.insert(node, derivs)?;
    }
    Ok(SampleFile { nodes, samples, dim })
}

pub fn read_samples(path: &Path) -> CliResult<SampleFile> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_samples(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Kind;

    const HEADER: &str = "node_re,node_im,deriv_order,c0_re,c0_im,c1_re,c1_im\n";

    #[test]
    fn parses_confluent_rows() {
        let text = format!("{HEADER}0,0,0,1,0,2,0\n0,0,1,3,0,4,0\n1,0,0,5,0,6,1\n");
        let f = parse_samples(text.as_bytes()).unwrap();
        assert_eq!(f.dim, 2);
        assert_eq!(f.nodes.len(), 3);
        assert!(f.nodes.has_confluent_runs());
        let d = f.samples.derivatives(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(d[1][1], Complex64::new(4.0, 0.0));
    }

    fn error_of(text: &str) -> CliError {
        parse_samples(text.as_bytes()).unwrap_err()
    }

    #[test]
    fn missing_derivative_row_names_the_row() {
        let e = error_of(&format!("{HEADER}0,0,0,1,0,2,0\n0,0,2,3,0,4,0\n"));
        assert_eq!(e.kind, Kind::MalformedInput);
        assert!(e.message.starts_with("row 3:"), "{}", e.message);
    }

    #[test]
    fn rejects_bad_headers_and_rows() {
        assert!(error_of("x,y,z\n").message.starts_with("row 1"));
        assert!(error_of("node_re,node_im,deriv_order,c0_re,c1_im\n").message.starts_with("row 1"));
        assert!(error_of(&format!("{HEADER}0,0,0,1,0,2\n")).message.starts_with("row 2"));
        assert!(error_of(&format!("{HEADER}0,0,0,a,0,2,0\n")).message.contains("c0_re"));
        assert!(error_of(&format!("{HEADER}0,0,1,1,0,2,0\n")).message.starts_with("row 2"));
        assert!(error_of(&format!("{HEADER}0,0,0,1,0,2,0\n1,0,0,1,0,2,0\n0,0,0,1,0,2,0\n"))
            .message
            .contains("row 4"));
        assert!(error_of(HEADER).message.contains("no data"));
    }
}
