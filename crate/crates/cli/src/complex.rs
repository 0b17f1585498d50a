//! Complex literals: `1.5`, `-2i`, `i`, `0.5-0.3i`, `1e-3+2e1i`.

use num_complex::Complex64;

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid number '{s}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number '{s}'"))
    }
}

fn parse_imag(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s),
    }
}

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex64::new(parse_real(&s).map_err(|e| format!("{e} in '{text}'"))?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i]), parse_imag(&body[i..])),
        None => (Ok(0.0), parse_imag(body)),
    };
    let err = |e: String| format!("{e} in '{text}'");
    Ok(Complex64::new(re.map_err(err)?, im.map_err(err)?))
}

/// Comma-separated complex literals; empty input gives an empty list.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, String> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',').map(parse_complex).collect()
}
