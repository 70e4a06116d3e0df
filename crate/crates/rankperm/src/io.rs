//! CSV input parsing with type detection, and CSV writers.
//!
//! Bivariate input has four columns per row:
//!
//! * right-censored: `x, x_event, y, y_event` with events coded 0/1;
//! * interval-censored: `x_left, x_right, y_left, y_right`, where `inf` marks a
//!   right-censored end, a zero left end a left-censored one, and equal ends
//!   an exact value.
//!
//! Univariate input (for `sample`) has the first two of these columns. An
//! optional header row of non-numeric labels is skipped, as are `#` comments.

use std::io::Write;

use rankperm_core::censoring::{rank_bounds_interval, rank_bounds_right};
use rankperm_core::stats::{Dataset, Margin};
use rankperm_core::{IntervalObs, RankBounds, RankVector, RightObs};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DataType {
    Right,
    Interval,
}

impl DataType {
    pub fn name(&self) -> &'static str {
        match self {
            DataType::Right => "right",
            DataType::Interval => "interval",
        }
    }
}

/// Numeric rows with the file line each came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: Vec<Vec<f64>>,
    pub lines: Vec<u64>,
    pub width: usize,
}

fn parse_number(field: &str) -> Option<f64> {
    match field.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        _ => field.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

pub fn read_table(text: &str) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut width = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if rows.is_empty() && width.is_none() && record.iter().all(|f| parse_number(f).is_none()) {
            // header row
            width = Some(record.len());
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(CliError::parse(
                line,
                record.len().min(w) + 1,
                format!("expected {w} columns, found {}", record.len()),
            ));
        }
        let mut row = Vec::with_capacity(w);
        for (c, field) in record.iter().enumerate() {
            let v =
                parse_number(field).ok_or_else(|| CliError::parse(line, c + 1, format!("not a number: {field:?}")))?;
            if v < 0.0 {
                return Err(CliError::parse(line, c + 1, format!("negative value {v}")));
            }
            row.push(v);
        }
        rows.push(row);
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    Ok(Table { rows, lines, width: width.unwrap_or(0) })
}

/// Picks the format from the values: 0/1 indicator columns mean right
/// censoring, `inf` or equal endpoints mean intervals. Data that fits both
/// readings is rejected.
pub fn detect_type(table: &Table) -> CliResult<DataType> {
    let pairs = table.width / 2;
    let right_like = table.rows.iter().all(|r| (0..pairs).all(|m| r[2 * m + 1] == 0.0 || r[2 * m + 1] == 1.0));
    let interval_like =
        table.rows.iter().any(|r| r.iter().any(|v| v.is_infinite()) || (0..pairs).any(|m| r[2 * m] == r[2 * m + 1]));
    match (right_like, interval_like) {
        (true, true) => Err(CliError::Input("cannot tell right-censored from interval data; pass --type".into())),
        (true, false) => Ok(DataType::Right),
        (false, _) => Ok(DataType::Interval),
    }
}

fn right_margin(table: &Table, col: usize) -> CliResult<Vec<RightObs>> {
    table
        .rows
        .iter()
        .zip(&table.lines)
        .map(|(r, &line)| {
            let (t, e) = (r[col], r[col + 1]);
            if !t.is_finite() {
                return Err(CliError::parse(line, col + 1, "time must be finite"));
            }
            match e {
                0.0 => Ok(RightObs::censored(t)),
                1.0 => Ok(RightObs::event(t)),
                _ => Err(CliError::parse(line, col + 2, format!("event indicator must be 0 or 1, found {e}"))),
            }
        })
        .collect()
}

fn interval_margin(table: &Table, col: usize) -> CliResult<Vec<IntervalObs>> {
    table
        .rows
        .iter()
        .zip(&table.lines)
        .map(|(r, &line)| {
            IntervalObs::from_endpoints(r[col], r[col + 1]).map_err(|e| CliError::parse(line, col + 1, e.to_string()))
        })
        .collect()
}

fn resolve_type(table: &Table, kind: Option<DataType>) -> CliResult<DataType> {
    match kind {
        Some(k) => Ok(k),
        None => detect_type(table),
    }
}

/// A bivariate dataset from four-column CSV text.
pub fn parse_dataset(text: &str, kind: Option<DataType>) -> CliResult<(Dataset, DataType)> {
    let table = read_table(text)?;
    if table.width != 4 {
        return Err(CliError::parse(table.lines[0], 0, format!("expected 4 columns, found {}", table.width)));
    }
    let kind = resolve_type(&table, kind)?;
    let data = match kind {
        DataType::Right => Dataset::Right { x: right_margin(&table, 0)?, y: right_margin(&table, 2)? },
        DataType::Interval => Dataset::Interval { x: interval_margin(&table, 0)?, y: interval_margin(&table, 2)? },
    };
    Ok((data, kind))
}

/// Rank bounds of one margin, from a two-column file or one half of a
/// four-column file.
pub fn parse_margin_bounds(text: &str, kind: Option<DataType>, margin: Margin) -> CliResult<Vec<RankBounds>> {
    let table = read_table(text)?;
    let col = match (table.width, margin) {
        (2, _) | (4, Margin::X) => 0,
        (4, Margin::Y) => 2,
        (w, _) => return Err(CliError::parse(table.lines[0], 0, format!("expected 2 or 4 columns, found {w}"))),
    };
    let narrowed = Table {
        rows: table.rows.iter().map(|r| r[col..col + 2].to_vec()).collect(),
        lines: table.lines.clone(),
        width: 2,
    };
    let bounds = match resolve_type(&narrowed, kind)? {
        DataType::Right => rank_bounds_right(&right_margin(&narrowed, 0)?)?,
        DataType::Interval => rank_bounds_interval(&interval_margin(&narrowed, 0)?)?,
    };
    Ok(bounds)
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `# key=value ...` provenance followed by the CSV body.
pub fn write_comment<W: Write + ?Sized>(w: &mut W, fields: &[(&str, String)]) -> std::io::Result<()> {
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(w, "# {}", body.join(" "))
}

pub fn write_samples<W: Write>(w: W, samples: &[RankVector]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if let Some(first) = samples.first() {
        out.write_record((1..=first.len()).map(|i| format!("r{i}")))?;
    }
    for s in samples {
        out.write_record(s.as_slice().iter().map(u32::to_string))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_null_draws<W: Write>(w: W, draws: &[f64]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "statistic"])?;
    for (k, d) in draws.iter().enumerate() {
        out.write_record([k.to_string(), fmt_f64(*d)])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_right_censored() {
        let (d, k) = parse_dataset("x,dx,y,dy\n1.5,1,2,0\n2.5,0,1.5,1\n", None).unwrap();
        assert_eq!(k, DataType::Right);
        assert_eq!(d.n(), 2);
    }

    #[test]
    fn detects_interval() {
        let (d, k) = parse_dataset("0,3,3,6\n3,inf,0,3\n2,5,1,1\n", None).unwrap();
        assert_eq!(k, DataType::Interval);
        let Dataset::Interval { x, y } = d else { panic!() };
        assert_eq!(x[1], IntervalObs::right_censored(3.0));
        assert_eq!(y[2], IntervalObs::exact(1.0));
        assert_eq!(x[0], IntervalObs::left_censored(3.0));
    }

    #[test]
    fn ambiguous_needs_explicit_type() {
        let text = "1,1,2,0\n2,0,3,1\n";
        assert!(matches!(parse_dataset(text, None), Err(CliError::Input(_))));
        assert_eq!(parse_dataset(text, Some(DataType::Right)).unwrap().1, DataType::Right);
    }

    #[test]
    fn errors_point_at_row_and_column() {
        match parse_dataset("1,1,2,0\n2,abc,3,1\n", None) {
            Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        match parse_dataset("1,1,2,0\n2,1,3\n", None) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_dataset("1,2,2,0\n", Some(DataType::Right)) {
            Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 2)),
            other => panic!("{other:?}"),
        }
        match parse_dataset("4,2,2,3\n", Some(DataType::Interval)) {
            Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("{other:?}"),
        }
        assert!(parse_dataset("", None).is_err());
        assert!(parse_dataset("-1,1,2,1\n", None).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let (d, _) = parse_dataset("# note\nx,dx,y,dy\n\n1.5,1,2,1\n3,0,4,1\n", None).unwrap();
        assert_eq!(d.n(), 2);
    }

    #[test]
    fn margin_bounds() {
        let b = parse_margin_bounds("1.5,1\n2,0\n3,1\n", None, Margin::X).unwrap();
        assert_eq!(b, vec![RankBounds::new(1, 1), RankBounds::new(2, 3), RankBounds::new(2, 3)]);
        let b = parse_margin_bounds("1,1,9,1\n2,0,8,1\n", None, Margin::Y).unwrap();
        assert_eq!(b, vec![RankBounds::new(2, 2), RankBounds::new(1, 1)]);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
