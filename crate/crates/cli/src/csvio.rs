//! CSV ingestion and emission.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use depcorr::nalgebra::DMatrix;
use depcorr::PairedSample;
use serde::Serialize;

use crate::args::Input;
use crate::report::Usage;

/// Echoed into every report that reads a file.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub x_columns: Vec<usize>,
    pub y_columns: Vec<usize>,
    pub header: bool,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

fn resolve(spec: &str, header: Option<&csv::StringRecord>, width: usize, flag: &str) -> Result<Vec<usize>> {
    let usage = |msg: String| anyhow::Error::new(Usage(msg));
    spec.split(',')
        .map(str::trim)
        .map(|tok| {
            if tok.is_empty() {
                return Err(usage(format!("--{flag}: empty column selector in {spec:?}")));
            }
            let idx = match tok.parse::<usize>() {
                Ok(i) => i,
                Err(_) => {
                    let header =
                        header.ok_or_else(|| usage(format!("--{flag}: column name {tok:?} needs a header row")))?;
                    header
                        .iter()
                        .position(|h| h.trim() == tok)
                        .map(|p| p + 1)
                        .ok_or_else(|| usage(format!("--{flag}: no column named {tok:?}")))?
                }
            };
            if idx == 0 || idx > width {
                return Err(usage(format!("--{flag}: column {idx} out of range (file has {width} columns)")));
            }
            Ok(idx)
        })
        .collect()
}

/// Reads the columns selected by `--x`/`--y` into a sample.
pub fn ingest_csv(input: &Input) -> Result<(PairedSample, InputDescriptor)> {
    let path = &input.input;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(!input.no_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = if input.no_header {
        None
    } else {
        Some(rdr.headers().with_context(|| format!("{}: unreadable header", path.display()))?.clone())
    };

    let mut width = header.as_ref().map(|h| h.len());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let data_row = i + 1;
        let rec = rec.with_context(|| format!("{}: data row {data_row}: malformed CSV", path.display()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            bail!(
                "{}: data row {data_row} (line {line}): expected {w} fields, found {}",
                path.display(),
                rec.len()
            );
        }
        let vals = rec
            .iter()
            .enumerate()
            .map(|(c, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(anyhow!(
                    "{}: data row {data_row} (line {line}), column {}: cannot parse {cell:?} as a finite number",
                    path.display(),
                    c + 1
                )),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    if rows.len() < 2 {
        bail!("{}: need at least 2 data rows, found {}", path.display(), rows.len());
    }
    let width = width.unwrap_or(0);
    let xc = resolve(&input.x, header.as_ref(), width, "x")?;
    let yc = resolve(&input.y, header.as_ref(), width, "y")?;
    let pick = |cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |r, c| rows[r][cols[c] - 1]);
    let sample = PairedSample::new(pick(&xc), pick(&yc))?;
    let desc = InputDescriptor {
        path: path.display().to_string(),
        header: !input.no_header,
        n: sample.n(),
        p: sample.p(),
        q: sample.q(),
        x_columns: xc,
        y_columns: yc,
    };
    Ok((sample, desc))
}

/// Writes `x1..xp, y1..yq` columns (or `x, y` when univariate). Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(w: W, s: &PairedSample) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let names = |prefix: &str, k: usize| -> Vec<String> {
        if k == 1 {
            vec![prefix.to_string()]
        } else {
            (1..=k).map(|i| format!("{prefix}{i}")).collect()
        }
    };
    let mut header = names("x", s.p());
    header.extend(names("y", s.q()));
    wtr.write_record(&header)?;
    for r in 0..s.n() {
        let row: Vec<String> = s
            .x()
            .row(r)
            .iter()
            .chain(s.y().row(r).iter())
            .map(|v| v.to_string())
            .collect();
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, s: &PairedSample) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_csv(std::io::BufWriter::new(f), s)
}
