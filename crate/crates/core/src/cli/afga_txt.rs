//! The `afga.txt` table: three input lines, a column-label line, then one
//! tab-separated row per step with every real in `%.4e` notation (tabs shown
//! as spaces below).
//!
//! ```text
//! gamma(degs) = 1.7315e+02
//! del_lam(degs) = 1.3500e+02
//! num_steps = 20
//! j  gam_j(degs)  alp_j(degs)  vr_x  vr_y  vr_z  vs_x  vs_y  vs_z
//! 0  1.7315e+02  1.5735e+02  -8.4337e-02  -8.4337e-02  -9.9286e-01  1.1927e-01  0.0000e+00  -9.9286e-01
//! ```
//!
//! Row `j` carries `γ_j` and `ŝ_j` together with the `α_j` and `r̂_j` of the
//! step about to be taken from it.

use std::fmt::Write as _;

use thiserror::Error;

use crate::schedule::{AfgaParams, ScheduleRow};

pub const COLUMN_LABELS: [&str; 9] = [
    "j",
    "gam_j(degs)",
    "alp_j(degs)",
    "vr_x",
    "vr_y",
    "vr_z",
    "vs_x",
    "vs_y",
    "vs_z",
];

/// `%.4e` with a signed two-digit exponent; negative zero prints as `0.0000e+00`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4e}");
    let (mant, exp) = s
        .split_once('e')
        .expect("exponent formatting always has an 'e'");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (mant, exp) = if mant.trim_start_matches('-') == "0.0000" {
        ("0.0000", 0)
    } else {
        (mant, exp)
    };
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// Renders the table for `rows` as produced by [`crate::schedule::build_schedule`].
pub fn emit_afga_txt(rows: &[ScheduleRow], params: &AfgaParams) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "gamma(degs) = {}",
        format_sci(params.gamma().to_degrees())
    );
    let _ = writeln!(
        out,
        "del_lam(degs) = {}",
        format_sci(params.del_lam().to_degrees())
    );
    let _ = writeln!(out, "num_steps = {}", params.num_steps());
    out.push_str(&COLUMN_LABELS.join("\t"));
    out.push('\n');
    for row in rows {
        let r = row.r_j.to_array();
        let s = row.s_j.to_array();
        let fields = [
            row.gamma_j.to_degrees(),
            row.alpha_j.to_degrees(),
            r[0],
            r[1],
            r[2],
            s[0],
            s[1],
            s[2],
        ];
        out.push_str(&row.j.to_string());
        for v in fields {
            out.push('\t');
            out.push_str(&format_sci(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected `{key} = <value>`")]
    Header { line: usize, key: &'static str },
    #[error("line {line}: column labels do not match")]
    Labels { line: usize },
    #[error("line {line}: expected 9 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: cannot parse `{text}`")]
    Number { line: usize, text: String },
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AfgaTableRow {
    pub j: usize,
    /// `gam_j, alp_j, vr_x, vr_y, vr_z, vs_x, vs_y, vs_z`
    pub values: [f64; 8],
}

#[derive(Clone, Debug, PartialEq)]
pub struct AfgaTable {
    pub gamma_degs: f64,
    pub del_lam_degs: f64,
    pub num_steps: usize,
    pub rows: Vec<AfgaTableRow>,
}

fn header_value<'a>(
    line: Option<&'a str>,
    n: usize,
    key: &'static str,
) -> Result<&'a str, ParseError> {
    line.and_then(|l| l.strip_prefix(key))
        .and_then(|rest| rest.trim_start().strip_prefix('='))
        .map(str::trim)
        .ok_or(ParseError::Header { line: n, key })
}

fn number<T: std::str::FromStr>(text: &str, line: usize) -> Result<T, ParseError> {
    text.trim().parse().map_err(|_| ParseError::Number {
        line,
        text: text.to_string(),
    })
}

/// Reads back a table written by [`emit_afga_txt`]. Fields may be separated by
/// tabs or runs of spaces.
pub fn parse_afga_txt(text: &str) -> Result<AfgaTable, ParseError> {
    let mut lines = text.lines();
    let gamma_degs = number(header_value(lines.next(), 1, "gamma(degs)")?, 1)?;
    let del_lam_degs = number(header_value(lines.next(), 2, "del_lam(degs)")?, 2)?;
    let num_steps = number(header_value(lines.next(), 3, "num_steps")?, 3)?;
    let labels: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    if labels != COLUMN_LABELS {
        return Err(ParseError::Labels { line: 4 });
    }

    let mut rows = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let n = k + 5;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(ParseError::FieldCount {
                line: n,
                found: fields.len(),
            });
        }
        let mut values = [0.0; 8];
        for (v, f) in values.iter_mut().zip(&fields[1..]) {
            *v = number(f, n)?;
        }
        rows.push(AfgaTableRow {
            j: number(fields[0], n)?,
            values,
        });
    }
    if rows.len() != num_steps + 1 {
        return Err(ParseError::RowCount {
            expected: num_steps + 1,
            found: rows.len(),
        });
    }
    Ok(AfgaTable {
        gamma_degs,
        del_lam_degs,
        num_steps,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::build_schedule;

    #[test]
    fn sci_formatting() {
        assert_eq!(format_sci(173.15), "1.7315e+02");
        assert_eq!(format_sci(-0.084337), "-8.4337e-02");
        assert_eq!(format_sci(0.0), "0.0000e+00");
        assert_eq!(format_sci(-0.0), "0.0000e+00");
        assert_eq!(format_sci(-2.7756e-17), "-2.7756e-17");
        assert_eq!(format_sci(1.0), "1.0000e+00");
        assert_eq!(format_sci(0.99999999), "1.0000e+00");
        assert_eq!(format_sci(1.5e123), "1.5000e+123");
    }

    #[test]
    fn reference_first_row() {
        let p = AfgaParams::from_degrees(173.15, 135.0, 20).unwrap();
        let text = emit_afga_txt(&build_schedule(&p), &p);
        let row0 = text.lines().nth(4).unwrap();
        assert_eq!(
            row0,
            "0\t1.7315e+02\t1.5735e+02\t-8.4337e-02\t-8.4337e-02\t-9.9286e-01\t1.1927e-01\t0.0000e+00\t-9.9286e-01"
        );
        assert_eq!(text.lines().count(), 4 + 21);
    }

    #[test]
    fn zero_steps_has_one_row() {
        let p = AfgaParams::from_degrees(30.0, 60.0, 0).unwrap();
        let text = emit_afga_txt(&build_schedule(&p), &p);
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().nth(2).unwrap(), "num_steps = 0");
        let t = parse_afga_txt(&text).unwrap();
        assert_eq!(t.rows.len(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_afga_txt(""),
            Err(ParseError::Header { line: 1, .. })
        ));
        let p = AfgaParams::from_degrees(30.0, 60.0, 2).unwrap();
        let good = emit_afga_txt(&build_schedule(&p), &p);
        let short: String = good.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            parse_afga_txt(&short),
            Err(ParseError::RowCount { .. })
        ));
        let garbled = good.replacen("3.0000e+01", "thirty", 1);
        assert!(matches!(
            parse_afga_txt(&garbled),
            Err(ParseError::Number { .. })
        ));
    }
}
