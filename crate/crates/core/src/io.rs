//! On-disk formats.
//!
//! Frame container (JSON, `format = "etfspectra-frame"`, `version = 1`):
//!
//! ```text
//! { "format": "etfspectra-frame", "version": 1,
//!   "rows": m, "cols": n, "field": "real" | "complex",
//!   "family": "dss", "seed": null | u64,
//!   "entries": [[re, im], ...] }        // row-major, m*n pairs
//! ```
//!
//! Real frames still store pairs, with im = 0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Family, Field, FrameMatrix};
use crate::spectra::SubsetSpectrum;

pub const FRAME_FORMAT: &str = "etfspectra-frame";
pub const FRAME_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct FrameFile {
    format: String,
    version: u32,
    rows: usize,
    cols: usize,
    field: Field,
    family: String,
    seed: Option<u64>,
    entries: Vec<[f64; 2]>,
}

pub fn frame_to_json(f: &FrameMatrix) -> Result<String> {
    let (m, n) = (f.m(), f.n());
    let mut entries = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let z = f.entries[(i, j)];
            entries.push([z.re, z.im]);
        }
    }
    let file = FrameFile {
        format: FRAME_FORMAT.into(),
        version: FRAME_VERSION,
        rows: m,
        cols: n,
        field: f.field,
        family: f.family.name().into(),
        seed: f.seed,
        entries,
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn frame_from_json(s: &str) -> Result<FrameMatrix> {
    let file: FrameFile = serde_json::from_str(s)?;
    if file.format != FRAME_FORMAT {
        return Err(Error::Format(format!("unknown format tag {:?}", file.format)));
    }
    if file.version != FRAME_VERSION {
        return Err(Error::Format(format!("unsupported version {}", file.version)));
    }
    if file.entries.len() != file.rows * file.cols {
        return Err(Error::Format(format!(
            "{} entries for a {}x{} frame",
            file.entries.len(),
            file.rows,
            file.cols
        )));
    }
    let family = Family::parse(&file.family)?;
    let n = file.cols;
    let entries = Mat::from_fn(file.rows, n, |i, j| {
        let [re, im] = file.entries[i * n + j];
        c64::new(re, im)
    });
    Ok(FrameMatrix { entries, field: file.field, family, seed: file.seed })
}

pub fn write_frame(f: &FrameMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(frame_to_json(f)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_frame(path: impl AsRef<Path>) -> Result<FrameMatrix> {
    let mut s = String::new();
    std::io::Read::read_to_string(&mut BufReader::new(File::open(path)?), &mut s)?;
    frame_from_json(&s)
}

/// Eigenvalue table with columns trial, index, eigenvalue.
pub fn write_eigenvalues_csv<W: Write>(w: W, spectra: &[SubsetSpectrum]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["trial", "index", "eigenvalue"])?;
    for (t, s) in spectra.iter().enumerate() {
        for (i, v) in s.eigenvalues.iter().enumerate() {
            out.write_record([t.to_string(), i.to_string(), format!("{v:.17e}")])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_eigenvalues_csv<R: std::io::Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<&str> { rec.get(i).ok_or_else(|| Error::Format("short CSV row".into())) };
        let t: usize = parse(0)?.parse().map_err(|e| Error::Format(format!("trial: {e}")))?;
        let v: f64 = parse(2)?.parse().map_err(|e| Error::Format(format!("eigenvalue: {e}")))?;
        if t >= out.len() {
            out.resize(t + 1, Vec::new());
        }
        out[t].push(v);
    }
    Ok(out)
}

/// Writes a header row and numeric rows with full precision.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r.iter().map(|v| format!("{v:.17e}")))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{construct_dss, construct_haar, construct_real_paley};

    #[test]
    fn frame_round_trip() {
        for f in [
            construct_dss(11).unwrap(),
            construct_real_paley(5).unwrap(),
            construct_haar(9, 4, Field::Complex, 7).unwrap(),
        ] {
            let g = frame_from_json(&frame_to_json(&f).unwrap()).unwrap();
            assert_eq!(g.field, f.field);
            assert_eq!(g.family, f.family);
            assert_eq!(g.seed, f.seed);
            assert_eq!((g.m(), g.n()), (f.m(), f.n()));
            for i in 0..f.m() {
                for j in 0..f.n() {
                    assert_eq!(g.entries[(i, j)], f.entries[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_containers() {
        let good = frame_to_json(&construct_dss(7).unwrap()).unwrap();
        assert!(frame_from_json(&good.replace("etfspectra-frame", "other")).is_err());
        assert!(frame_from_json(&good.replace("\"version\":1", "\"version\":9")).is_err());
        assert!(frame_from_json(&good.replace("\"rows\":3", "\"rows\":4")).is_err());
    }

    #[test]
    fn eigenvalue_csv_round_trip() {
        let s = SubsetSpectrum { eigenvalues: vec![0.5, 1.25, 1.0 / 3.0], structural_zeros: 0, n: 7, m: 3, k: 3 };
        let mut buf = Vec::new();
        write_eigenvalues_csv(&mut buf, &[s.clone(), s.clone()]).unwrap();
        let back = read_eigenvalues_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![s.eigenvalues.clone(), s.eigenvalues]);
    }
}
