//! Complex literals, grids and index values from the command line.

use num_complex::Complex64;

use crate::error::CliError;

/// Parses `a`, `bi`, `a+bi` or `a-bi` (no spaces, `i` may stand alone).
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("not a complex literal: {s:?} (expected a+bi)"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re = re_part.parse::<f64>().map_err(|_| bad())?;
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses `lin:a:b:n` or `log:a:b:n`.
pub fn grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad grid {s:?}: {why} (expected lin:a:b:n or log:a:b:n)"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(bad("wrong number of fields"));
    }
    let a: f64 = parts[1].parse().map_err(|_| bad("start is not a number"))?;
    let b: f64 = parts[2].parse().map_err(|_| bad("end is not a number"))?;
    let n: usize = parts[3].parse().map_err(|_| bad("count is not a positive integer"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad("empty or non-finite"));
    }
    let at = |k: usize| if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
    match parts[0] {
        "lin" => Ok((0..n).map(|k| a + (b - a) * at(k)).collect()),
        "log" => {
            if !(a > 0.0 && b > 0.0) {
                return Err(bad("log grid needs positive ends"));
            }
            Ok((0..n).map(|k| if k + 1 == n && n > 1 { b } else { 10f64.powf(a.log10() + (b.log10() - a.log10()) * at(k)) }).collect())
        }
        _ => Err(bad("unknown spacing")),
    }
}

/// Integer offset `k` with `v = k + eps`.
pub fn offset(name: &str, v: f64, eps: f64) -> Result<i64, CliError> {
    let d = v - eps;
    let k = d.round();
    if (d - k).abs() > 1e-9 * v.abs().max(1.0) {
        return Err(CliError::Usage(format!("--{name}={v} is not in eps + Z for eps = {eps}")));
    }
    Ok(k as i64)
}

/// Parses `a:b` into an inclusive integer range.
pub fn window(s: &str) -> Result<std::ops::RangeInclusive<i64>, CliError> {
    let bad = || CliError::Usage(format!("bad window {s:?} (expected a:b with integers a <= b)"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}
