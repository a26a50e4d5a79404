//! Coefficient text format.
//!
//! ```text
//! #order 3
//! 0	1.0000000000000000e0	0.0000000000000000e0
//! 1	5.0000000000000000e-1	-2.5000000000000000e-1
//! ```
//!
//! A header line `#order n`, then one line per coefficient:
//! `index<TAB>re<TAB>im` in ascending index order. Indices that are not
//! listed are zero. Values are written with 17 significant digits, which
//! round-trips every `f64` exactly. Blank lines and other `#` lines are
//! ignored on input.

use std::fmt::Write as _;

use crate::error::{Result, SeriesError};
use crate::fft::{C64, ZERO};
use crate::series::TruncatedSeries;

pub fn write_series(f: &TruncatedSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#order {}", f.order());
    for (i, c) in f.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{i}\t{:.16e}\t{:.16e}", c.re, c.im);
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> SeriesError {
    SeriesError::Parse { line, column, message: message.into() }
}

pub fn parse_series(text: &str) -> Result<TruncatedSeries> {
    let mut order: Option<usize> = None;
    let mut coeffs: Vec<C64> = Vec::new();
    let mut last_index: Option<usize> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(value) = rest.strip_prefix("order") {
                let value = value.trim();
                let n: usize = value
                    .parse()
                    .map_err(|_| parse_err(line_no, 8, format!("invalid order '{value}'")))?;
                if order.is_some() {
                    return Err(parse_err(line_no, 1, "duplicate #order header"));
                }
                order = Some(n);
                coeffs = vec![ZERO; n];
            }
            continue;
        }
        let n = order.ok_or_else(|| parse_err(line_no, 1, "coefficient before #order header"))?;
        let mut column = 1;
        let mut fields = Vec::with_capacity(3);
        for field in line.split('\t') {
            fields.push((column, field));
            column += field.chars().count() + 1;
        }
        if fields.len() != 3 {
            return Err(parse_err(line_no, 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let (col, idx_text) = fields[0];
        let index: usize = idx_text
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, col, format!("invalid index '{idx_text}'")))?;
        if index >= n {
            return Err(parse_err(line_no, col, format!("index {index} outside order {n}")));
        }
        if last_index.is_some_and(|prev| index <= prev) {
            return Err(parse_err(line_no, col, "indices must be strictly ascending"));
        }
        last_index = Some(index);
        let mut parts = [0.0f64; 2];
        for (slot, &(col, text)) in parts.iter_mut().zip(&fields[1..]) {
            *slot = text
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, col, format!("invalid number '{text}'")))?;
        }
        coeffs[index] = C64::new(parts[0], parts[1]);
    }
    match order {
        Some(_) => Ok(TruncatedSeries::new(coeffs)),
        None => Err(parse_err(1, 1, "missing #order header")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_sparse_file() {
        let f = parse_series("#order 4\n1\t1.5\t-2\n3\t0\t1e-3\n").unwrap();
        assert_eq!(f.order(), 4);
        assert_eq!(f[1], C64::new(1.5, -2.0));
        assert_eq!(f[0], ZERO);
        assert_eq!(f[3], C64::new(0.0, 1e-3));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_series("#order 2\n0\t1.0\tabc\n").unwrap_err();
        assert_eq!(err, SeriesError::Parse { line: 2, column: 7, message: "invalid number 'abc'".into() });
        let err = parse_series("0\t1\t0\n").unwrap_err();
        assert!(matches!(err, SeriesError::Parse { line: 1, .. }));
        let err = parse_series("#order 2\n1\t1\t0\n0\t1\t0\n").unwrap_err();
        assert!(matches!(err, SeriesError::Parse { line: 3, column: 1, .. }));
        let err = parse_series("#order 2\n5\t1\t0\n").unwrap_err();
        assert!(matches!(err, SeriesError::Parse { line: 2, .. }));
        assert!(parse_series("").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(v in prop::collection::vec((any::<f64>(), any::<f64>()), 0..40)) {
            let v: Vec<C64> = v.into_iter()
                .map(|(a, b)| C64::new(if a.is_finite() { a } else { 0.0 }, if b.is_finite() { b } else { 0.0 }))
                .collect();
            let f = TruncatedSeries::new(v);
            let back = parse_series(&write_series(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
