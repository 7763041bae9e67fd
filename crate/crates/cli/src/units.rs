//! Parsing of quantities with unit suffixes on the command line.

fn split(s: &str) -> (&str, &str) {
    let s = s.trim();
    let at = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    (s[..at].trim(), s[at..].trim())
}

fn scale(unit: &str, table: &[(&str, f64)], default: f64) -> Result<f64, String> {
    if unit.is_empty() {
        return Ok(default);
    }
    table
        .iter()
        .find(|(u, _)| u.eq_ignore_ascii_case(unit) && (u.len() < 2 || unit[..1] == u[..1]))
        .map(|(_, k)| *k)
        .ok_or_else(|| {
            let names: Vec<_> = table.iter().map(|(u, _)| *u).collect();
            format!(
                "unknown unit `{unit}` (expected one of {})",
                names.join(", ")
            )
        })
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{s}` is not a number"))
}

const FREQ: &[(&str, f64)] = &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)];
const TEMP: &[(&str, f64)] = &[("K", 1.0), ("mK", 1e-3), ("uK", 1e-6)];

/// Frequency in Hz; a bare number is read as GHz.
pub fn frequency(s: &str) -> Result<f64, String> {
    let (v, u) = split(s);
    Ok(number(v)? * scale(u, FREQ, 1e9)?)
}

/// Temperature in K; a bare number is read as mK.
pub fn temperature(s: &str) -> Result<f64, String> {
    let (v, u) = split(s);
    Ok(number(v)? * scale(u, TEMP, 1e-3)?)
}

/// Probability from `0.0034` or `0.34%`.
pub fn probability(s: &str) -> Result<f64, String> {
    let t = s.trim();
    match t.strip_suffix('%') {
        Some(p) => Ok(number(p.trim())? / 100.0),
        None => number(t),
    }
}

/// `lo:hi[unit]` frequency band in Hz, e.g. `1:10GHz` or `500MHz:2GHz`.
pub fn band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("band `{s}` must look like 1:10GHz"))?;
    let (_, unit) = split(b);
    let lo = if split(a).1.is_empty() && !unit.is_empty() {
        frequency(&format!("{a}{unit}"))?
    } else {
        frequency(a)?
    };
    let hi = frequency(b)?;
    if !(hi > lo && lo > 0.0) {
        return Err(format!("band `{s}` must satisfy 0 < lo < hi"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies() {
        assert_eq!(frequency("4.86GHz").unwrap(), 4.86e9);
        assert_eq!(frequency("500 MHz").unwrap(), 500e6);
        assert_eq!(frequency("4.37").unwrap(), 4.37e9);
        assert_eq!(frequency("1e3kHz").unwrap(), 1e6);
        assert!(frequency("4.2 GHzz").is_err());
        assert!(frequency("fast").is_err());
    }

    #[test]
    fn milli_and_mega_are_distinct() {
        assert_eq!(temperature("41mK").unwrap(), 0.041);
        assert_eq!(temperature("0.05K").unwrap(), 0.05);
        assert_eq!(temperature("49").unwrap(), 0.049);
        assert!(frequency("5mHz").is_err());
        assert!(temperature("41MK").is_err());
    }

    #[test]
    fn bands_and_probabilities() {
        assert_eq!(band("1:10GHz").unwrap(), (1e9, 10e9));
        assert_eq!(band("500MHz:2GHz").unwrap(), (500e6, 2e9));
        assert!(band("10:1GHz").is_err());
        assert!(band("1-10GHz").is_err());
        assert!((probability("0.34%").unwrap() - 0.0034).abs() < 1e-18);
        assert_eq!(probability("0.0135").unwrap(), 0.0135);
    }
}
