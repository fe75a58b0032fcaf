//! Node/derivative data files.
//!
//! One row per node: `z_re,z_im,w,s,f0,f1,...,fS`, where `f0` is the value
//! and `fi` the `i`-th derivative. Columns past a row's own `s` stay empty.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::nodes::NodeSet;

const FIXED_COLUMNS: [&str; 4] = ["z_re", "z_im", "w", "s"];

fn field(record: &csv::StringRecord, i: usize) -> &str {
    record.get(i).map(str::trim).unwrap_or("")
}

fn number(text: &str, line: usize, name: &str) -> Result<f64> {
    let value: f64 =
        text.parse().map_err(|_| Error::Dataset { line, message: format!("{name}: cannot parse {text:?}") })?;
    if !value.is_finite() {
        return Err(Error::Dataset { line, message: format!("{name} is not finite") });
    }
    Ok(value)
}

/// Parses a dataset; `f` comes back in per-node blocks `f^(s_j), ..., f_j`.
pub fn read_dataset<R: Read>(reader: R) -> Result<(NodeSet, DenseVector)> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = csv.headers().map_err(|e| Error::Dataset { line: 1, message: e.to_string() })?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 5 || names[..4] != FIXED_COLUMNS {
        return Err(Error::Dataset { line: 1, message: "header must start with z_re,z_im,w,s,f0".into() });
    }
    for (i, name) in names[4..].iter().enumerate() {
        if *name != format!("f{i}") {
            return Err(Error::Dataset { line: 1, message: format!("expected column f{i}, found {name:?}") });
        }
    }
    let max_order = names.len() - 5;

    let (mut nodes, mut weights, mut orders, mut f) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (row, record) in csv.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::Dataset { line, message: e.to_string() })?;
        if record.len() > names.len() {
            return Err(Error::Dataset {
                line,
                message: format!("{} fields for {} columns", record.len(), names.len()),
            });
        }
        let z = Complex64::new(number(field(&record, 0), line, "z_re")?, number(field(&record, 1), line, "z_im")?);
        let w = number(field(&record, 2), line, "w")?;
        let s: usize = field(&record, 3).parse().map_err(|_| Error::Dataset {
            line,
            message: format!("s: expected a non-negative integer, found {:?}", field(&record, 3)),
        })?;
        if s > max_order {
            return Err(Error::Dataset { line, message: format!("s = {s} but the header stops at f{max_order}") });
        }
        let mut values = Vec::with_capacity(s + 1);
        for d in 0..=max_order {
            let text = field(&record, 4 + d);
            match (d <= s, text.is_empty()) {
                (true, true) => {
                    return Err(Error::Dataset { line, message: format!("missing f{d} for s = {s}") });
                }
                (true, false) => values.push(number(text, line, &format!("f{d}"))?),
                (false, false) => {
                    return Err(Error::Dataset { line, message: format!("f{d} given but s = {s}") });
                }
                (false, true) => {}
            }
        }
        nodes.push(z);
        weights.push(Complex64::new(w, 0.0));
        orders.push(s);
        f.extend(values.into_iter().rev().map(|v| Complex64::new(v, 0.0)));
    }
    let set = NodeSet::with_derivatives(nodes, weights, orders, None)?;
    Ok((set, DenseVector::new(f)?))
}

pub fn load_dataset(path: &Path) -> Result<(NodeSet, DenseVector)> {
    read_dataset(std::fs::File::open(path)?)
}

/// Writes a dataset with shortest round-trip formatting. Weights and data
/// must be real.
pub fn write_dataset<W: Write>(writer: W, nodes: &NodeSet, f: &DenseVector) -> Result<()> {
    if f.len() != nodes.total_rows() {
        return Err(Error::DimensionMismatch {
            context: "dataset values",
            expected: nodes.total_rows(),
            actual: f.len(),
        });
    }
    if nodes.weights().iter().chain(f.iter()).any(|v| v.im != 0.0) {
        return Err(Error::InvalidInput("the dataset format stores real weights and values only".into()));
    }
    let max_order = nodes.max_order();
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..=max_order).map(|d| format!("f{d}")));
    out.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let mut offset = 0;
    for ((z, w), &s) in nodes.nodes().iter().zip(nodes.weights()).zip(nodes.orders()) {
        let mut record = vec![z.re.to_string(), z.im.to_string(), w.re.to_string(), s.to_string()];
        record.extend((0..=max_order).map(|d| if d <= s { f[offset + s - d].re.to_string() } else { String::new() }));
        out.write_record(&record).map_err(|e| Error::Io(e.to_string()))?;
        offset += s + 1;
    }
    out.flush()?;
    Ok(())
}

pub fn save_dataset(path: &Path, nodes: &NodeSet, f: &DenseVector) -> Result<()> {
    write_dataset(std::fs::File::create(path)?, nodes, f)
}

/// Reads `re,im` pairs, one pole per line, with an optional header.
pub fn read_points<R: Read>(reader: R) -> Result<Vec<Complex64>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut points = Vec::new();
    for (row, record) in csv.records().enumerate() {
        let line = row + 1;
        let record = record.map_err(|e| Error::Dataset { line, message: e.to_string() })?;
        if row == 0 && field(&record, 0).parse::<f64>().is_err() {
            continue;
        }
        let im = if field(&record, 1).is_empty() { 0.0 } else { number(field(&record, 1), line, "im")? };
        points.push(Complex64::new(number(field(&record, 0), line, "re")?, im));
    }
    Ok(points)
}
