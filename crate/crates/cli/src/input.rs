//! Parsing of the textual argument formats.
//!
//! Complex numbers are `re,im` (a bare real is accepted too). Polynomials
//! are ascending coefficient lists whose entries are reals or `(re,im)`.

use holoflow::cpoly::CPoly;
use num_complex::Complex64;
use std::fmt;

/// Malformed input; the binary exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

fn real(tok: &str, what: &str) -> anyhow::Result<f64> {
    let t = tok.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(usage(format!("{what}: '{t}' is not a finite number"))),
    }
}

pub fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t);
    let parts: Vec<&str> = inner.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(real(re, "complex number")?, 0.0)),
        [re, im] => Ok(Complex64::new(
            real(re, "real part")?,
            real(im, "imaginary part")?,
        )),
        _ => Err(usage(format!(
            "'{s}' is not a complex number; expected re,im"
        ))),
    }
}

/// Splits on commas outside parentheses.
fn split_top_level(s: &str) -> anyhow::Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(usage(format!("unbalanced ')' at byte {i} in '{s}'")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(usage(format!("unbalanced '(' in '{s}'")));
    }
    out.push(&s[start..]);
    Ok(out)
}

pub fn parse_poly(s: &str) -> anyhow::Result<CPoly> {
    if s.trim().is_empty() {
        return Err(usage("empty coefficient list".into()));
    }
    let mut coeffs = Vec::new();
    for (k, tok) in split_top_level(s)?.into_iter().enumerate() {
        let t = tok.trim();
        let c = if t.starts_with('(') {
            parse_complex(t)
        } else {
            real(t, "coefficient").map(|v| Complex64::new(v, 0.0))
        };
        coeffs.push(c.map_err(|e| usage(format!("coefficient {k} of '{s}': {e}")))?);
    }
    Ok(CPoly::new(coeffs))
}

/// `x_min,x_max,y_min,y_max`, nondegenerate.
pub fn parse_window(s: &str) -> anyhow::Result<[f64; 4]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| real(t, "window"))
        .collect::<anyhow::Result<_>>()?;
    let [x0, x1, y0, y1] = v[..] else {
        return Err(usage(format!("window '{s}' needs x_min,x_max,y_min,y_max")));
    };
    if !(x0 < x1 && y0 < y1) {
        return Err(usage(format!("window '{s}' is degenerate")));
    }
    Ok([x0, x1, y0, y1])
}

/// Vertices `x,y;x,y;...`.
pub fn parse_polygon(s: &str) -> anyhow::Result<Vec<Complex64>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

/// Comma-separated reals.
pub fn parse_reals(s: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',').map(|t| real(t, what)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials() {
        let p = parse_poly("1, 0,(0,1)").unwrap();
        assert_eq!(
            p.coeffs(),
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0)
            ]
        );
        assert!(parse_poly("1,x").is_err());
        assert!(parse_poly("1,(0,1").is_err());
        assert!(parse_poly("").is_err());
        assert!(parse_poly("(1,2,3)").is_err());
    }

    #[test]
    fn complex_and_windows() {
        assert_eq!(parse_complex("-1.5,2").unwrap(), Complex64::new(-1.5, 2.0));
        assert_eq!(parse_complex("(0,-1)").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan,0").is_err());
        assert!(parse_window("-1,1,-2,2").is_ok());
        assert!(parse_window("1,1,0,2").is_err());
        assert!(parse_window("0,1,0").is_err());
        assert_eq!(parse_polygon("0,0;1,0;0,1").unwrap().len(), 3);
    }
}
