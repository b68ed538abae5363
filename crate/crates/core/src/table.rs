//! Result tables and their CSV, JSON-lines and SVG renderings.
//!
//! Every stored number is already rounded to [`SIG_DIGITS`] significant
//! digits, so writing a table and reading it back gives identical values.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const SIG_DIGITS: usize = 9;

/// Rounds `x` to [`SIG_DIGITS`] significant digits. Non-finite values pass
/// through unchanged.
pub fn quantize(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_number(x).parse().expect("formatted float parses")
}

/// Plain decimal notation with [`SIG_DIGITS`] significant digits where that
/// stays readable, scientific notation otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = SIG_DIGITS as i32 - 1 - exponent;
    if (0..=15).contains(&decimals) {
        format!("{x:.*}", decimals as usize)
    } else {
        format!("{x:.*e}", SIG_DIGITS - 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    JsonLines,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "jsonlines" | "json-lines" => Ok(Format::JsonLines),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected csv, jsonl or svg)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// Grid point.
    pub value: f64,
    /// One entry per table column; `None` is written as an empty field.
    pub cells: Vec<Option<f64>>,
    /// Free-text note for rows that could not be fully evaluated.
    pub flag: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Name of the swept quantity, repeated in the first CSV column.
    pub axis: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(axis: impl Into<String>, columns: Vec<String>) -> Self {
        Self { axis: axis.into(), columns, rows: Vec::new() }
    }

    /// Appends a row, quantizing its numbers.
    pub fn push(&mut self, value: f64, cells: Vec<Option<f64>>, flag: impl Into<String>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(self.columns.len(), cells.len()));
        }
        let cells = cells.into_iter().map(|c| c.filter(|v| v.is_finite()).map(quantize)).collect();
        self.rows.push(Row { value: quantize(value), cells, flag: flag.into() });
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        ["axis", "value"]
            .iter()
            .map(|s| s.to_string())
            .chain(self.columns.iter().cloned())
            .chain(["flag".to_string()])
            .collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.cells[i]).collect())
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidParameter("cannot emit an empty table".into()));
        }
        match format {
            Format::Csv => self.write_csv(out),
            Format::JsonLines => self.write_jsonl(out),
            Format::Svg => self.write_svg(out),
        }
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header()).map_err(csv_error)?;
        for row in &self.rows {
            let fields = [self.axis.clone(), format_number(row.value)]
                .into_iter()
                .chain(row.cells.iter().map(|c| c.map(format_number).unwrap_or_default()))
                .chain([row.flag.clone()]);
            w.write_record(fields).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
        if header.len() < 3 || header[0] != "axis" || header[1] != "value" || header.last().unwrap() != "flag" {
            return Err(Error::Config(format!("unexpected CSV header {header:?}")));
        }
        let columns = header[2..header.len() - 1].to_vec();
        let mut table = Table::new(String::new(), columns);
        let number = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("bad number {s:?}: {e}")));
        for record in r.records() {
            let record = record.map_err(csv_error)?;
            table.axis = record[0].to_string();
            let cells = (2..header.len() - 1)
                .map(|i| if record[i].is_empty() { Ok(None) } else { number(&record[i]).map(Some) })
                .collect::<Result<_>>()?;
            table.rows.push(Row { value: number(&record[1])?, cells, flag: record[header.len() - 1].to_string() });
        }
        Ok(table)
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            obj.insert("axis".into(), self.axis.clone().into());
            obj.insert("value".into(), row.value.into());
            for (name, cell) in self.columns.iter().zip(&row.cells) {
                obj.insert(name.clone(), cell.map_or(serde_json::Value::Null, Into::into));
            }
            obj.insert("flag".into(), row.flag.clone().into());
            serde_json::to_writer(&mut out, &obj).map_err(|e| Error::Io(e.into()))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Line chart with one polyline per column. Columns named `*_stderr` are
    /// uncertainties and are not drawn.
    pub fn write_svg(&self, mut out: impl Write) -> Result<()> {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const M: f64 = 56.0;
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

        let series: Vec<(&String, Vec<(f64, f64)>)> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, name)| !name.ends_with("_stderr"))
            .map(|(i, name)| (name, self.rows.iter().filter_map(|r| r.cells[i].map(|y| (r.value, y))).collect()))
            .collect();
        let xs = self.rows.iter().map(|r| r.value);
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.1)).chain([0.0]));
        let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
        let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<path d="M{M} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#,
            top = M,
            bottom = H - M,
            right = W - M
        );
        for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
            let _ = writeln!(s, r#"<text x="{anchor_x:.3}" y="{}" text-anchor="middle" font-size="11">{}</text>"#, H - M + 16.0, format_number(v));
        }
        for v in [y0, y1] {
            let _ = writeln!(s, r#"<text x="{}" y="{:.3}" text-anchor="end" font-size="11">{}</text>"#, M - 6.0, py(v) + 4.0, format_number(v));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, H - 12.0, escape(&self.axis));
        let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 14 {})">value</text>"#, H / 2.0, H / 2.0);
        for (k, (name, pts)) in series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline data-series="{name}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                points.join(" "),
                name = escape(name)
            );
            let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#, W - M + 4.0, M + 14.0 * k as f64, escape(name));
        }
        s.push_str("</svg>\n");
        out.write_all(s.as_bytes())?;
        Ok(())
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return (lo - 0.5, lo + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("CSV: {other:?}")),
    }
}
