//! Minimal numeric CSV: comma separated, '.' decimal point, LF line endings.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Reads rows of floats. Blank lines are skipped; all rows must have the same width.
pub fn read_rows<R: BufRead>(input: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if header && lineno == 0 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: cannot parse '{}' as a number", lineno + 1, f.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse(format!(
                    "line {}: expected {w} fields, found {}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes rows with shortest round-trip formatting.
pub fn write_rows<W: Write>(mut out: W, header: Option<&[String]>, rows: &[Vec<f64>]) -> Result<()> {
    if let Some(names) = header {
        writeln!(out, "{}", names.join(","))?;
    }
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Formats `x` with `digits` significant digits, without trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific formatting parses");
    rounded.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig((-(2f64).sqrt()).exp(), 6), "0.243117");
        assert_eq!(format_sig(1.0, 6), "1");
        assert_eq!(format_sig(-1234567.0, 3), "-1230000");
        assert_eq!(format_sig(1.23456789e-7, 4), "0.0000001235");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(read_rows("1,2\n3\n".as_bytes(), false), Err(Error::Parse(_))));
        assert!(matches!(read_rows("1,x\n".as_bytes(), false), Err(Error::Parse(_))));
        assert_eq!(read_rows("a,b\n1, 2\n\n3,4\n".as_bytes(), true).unwrap().len(), 2);
    }
}
