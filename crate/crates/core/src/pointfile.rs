//! CSV point files: one point per line, comma-separated coordinates,
//! `#` starts a comment line. The dimension is taken from the first row.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Point};

pub fn parse_points(text: &str) -> Result<Configuration> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut points = Vec::new();
    let mut dim = None;
    for record in reader.records() {
        let record = record.map_err(|e| Error::PointFile {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let coords = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::PointFile {
                    line,
                    message: format!("cannot parse {field:?} as a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = *dim.get_or_insert(coords.len());
        if coords.len() != expected {
            return Err(Error::PointFile {
                line,
                message: format!("expected {expected} coordinates, found {}", coords.len()),
            });
        }
        points.push(Point::new(coords).map_err(|e| Error::PointFile {
            line,
            message: e.to_string(),
        })?);
    }
    Configuration::new(points)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Configuration> {
    let text = std::fs::read_to_string(path)?;
    parse_points(&text)
}

/// Writes coordinates with shortest round-trip formatting.
pub fn format_points(c: &Configuration) -> String {
    let mut out = String::new();
    for p in c.iter() {
        let row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
