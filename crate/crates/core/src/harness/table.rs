use std::io::{Read, Write};

use super::TrialRow;
use crate::error::HarnessError;

pub const CSV_HEADER: [&str; 8] = [
    "algorithm",
    "epsilon",
    "seed",
    "j",
    "queries",
    "output_x",
    "grad_abs",
    "status",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Floats use the shortest representation that round-trips.
pub fn write_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.as_str().to_string(),
            r.epsilon.to_string(),
            r.seed.to_string(),
            opt(r.j),
            r.queries.to_string(),
            opt(r.output_x),
            opt(r.grad_abs),
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T, HarnessError> {
    let text = rec.get(i).unwrap_or("");
    text.parse().map_err(|_| {
        HarnessError::InvalidSpec(format!(
            "row {line}: bad {} `{text}`",
            CSV_HEADER[i]
        ))
    })
}

fn opt_field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: u64,
) -> Result<Option<T>, HarnessError> {
    match rec.get(i) {
        Some("") | None => Ok(None),
        Some(_) => field(rec, i, line).map(Some),
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::InvalidSpec(format!(
            "unexpected CSV header: {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let status: String = field(&rec, 7, line)?;
        rows.push(TrialRow {
            algorithm: rec.get(0).unwrap_or("").parse()?,
            epsilon: field(&rec, 1, line)?,
            seed: field(&rec, 2, line)?,
            j: opt_field(&rec, 3, line)?,
            queries: field(&rec, 4, line)?,
            output_x: opt_field(&rec, 5, line)?,
            grad_abs: opt_field(&rec, 6, line)?,
            status: status.parse().map_err(HarnessError::InvalidSpec)?,
        });
    }
    Ok(rows)
}
