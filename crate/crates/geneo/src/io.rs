//! File formats.
//!
//! | data        | format                                                     |
//! |-------------|------------------------------------------------------------|
//! | signal      | CSV `x,value`, uniformly spaced `x`                        |
//! | diagram     | CSV `birth,death`, `death = inf` for essential classes     |
//! | noise       | JSON `{"sigma": .., "bumps": [{"a": .., "b": .., "c": ..}]}` |
//! | trials      | CSV, one [`TrialRecord`] per row                           |
//! | sweep       | CSV `var,value,mean_raw,mean_denoised,mean_bound`          |
//! | histogram   | CSV `bin,lo,hi,count`                                      |
//!
//! Floats are written with Rust's shortest round-trip formatting, so writing
//! is deterministic and reading back is exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use geneo_core::{Diagram, EdgePolicy, NoiseSpec, Signal, TrialRecord};

use crate::error::{Error, Result};
use crate::experiments::{Histogram, SweepRow};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "GENEO_OUT_DIR";

/// `$GENEO_OUT_DIR`, or the working directory when unset.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::File { path: path.to_owned(), source })
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::File { path: dir.to_owned(), source })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File { path: path.to_owned(), source })
}

fn format_err(line: Option<&csv::Position>, message: impl Into<String>) -> Error {
    Error::Format { line: line.map_or(0, |p| p.line()), message: message.into() }
}

fn expect_header<R: Read>(rdr: &mut csv::Reader<R>, names: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != names {
        return Err(format_err(None, format!("expected header {}, found {}", names.join(","), got.join(","))));
    }
    Ok(())
}

fn parse_field(record: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let raw = record.get(i).map(str::trim).unwrap_or_default();
    raw.parse::<f64>()
        .map_err(|_| format_err(record.position(), format!("cannot parse {name} {raw:?}")))
}

/// Reads a signal and infers its grid. Rows must be sorted with spacing
/// uniform to a relative tolerance of `1e-9`.
pub fn read_signal<R: Read>(reader: R, edge: EdgePolicy) -> Result<Signal> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    expect_header(&mut rdr, &["x", "value"])?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for row in rdr.records() {
        let row = row?;
        xs.push(parse_field(&row, 0, "x")?);
        values.push(parse_field(&row, 1, "value")?);
    }
    if xs.len() < 2 {
        return Err(geneo_core::Error::TooFewSamples(xs.len()).into());
    }
    let n = xs.len();
    let step = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(format_err(None, "x must be strictly increasing"));
    }
    for (i, &x) in xs.iter().enumerate() {
        let expected = xs[0] + i as f64 * step;
        if (x - expected).abs() > 1e-9 * x.abs().max(step) {
            return Err(Error::Format {
                line: i as u64 + 2,
                message: format!("non-uniform grid: x = {x}, expected {expected}"),
            });
        }
    }
    Ok(Signal::new(xs[0], step, values, edge)?)
}

pub fn write_signal<W: Write>(writer: W, s: &Signal) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "value"])?;
    for (x, v) in s.grid().points().zip(s.values()) {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_signal_file(path: &Path, edge: EdgePolicy) -> Result<Signal> {
    read_signal(open(path)?, edge)
}

pub fn write_signal_file(path: &Path, s: &Signal) -> Result<()> {
    write_signal(create(path)?, s)
}

pub fn read_diagram<R: Read>(reader: R) -> Result<Diagram> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    expect_header(&mut rdr, &["birth", "death"])?;
    let mut pairs = Vec::new();
    for row in rdr.records() {
        let row = row?;
        pairs.push((parse_field(&row, 0, "birth")?, parse_field(&row, 1, "death")?));
    }
    Ok(Diagram::from_pairs(pairs)?)
}

/// Writes finite points first, then essential points with `death = inf`.
pub fn write_diagram<W: Write>(writer: W, d: &Diagram) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["birth", "death"])?;
    for (b, dth) in d.pairs() {
        w.write_record([b.to_string(), dth.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagram_file(path: &Path) -> Result<Diagram> {
    read_diagram(open(path)?)
}

pub fn read_noise<R: Read>(reader: R) -> Result<NoiseSpec> {
    let spec: NoiseSpec = serde_json::from_reader(reader)?;
    Ok(spec.validated()?)
}

pub fn write_noise<W: Write>(writer: W, spec: &NoiseSpec) -> Result<()> {
    serde_json::to_writer_pretty(writer, spec)?;
    Ok(())
}

pub fn read_noise_file(path: &Path) -> Result<NoiseSpec> {
    read_noise(open(path)?)
}

pub const TRIAL_HEADER: [&str; 11] = [
    "seed",
    "L",
    "N",
    "k",
    "beta",
    "eta",
    "raw_error",
    "denoised_error",
    "det_bound",
    "in_family",
    "pd_distance",
];

pub fn write_trials<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_HEADER)?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.lipschitz.to_string(),
            r.knots.to_string(),
            r.bumps.to_string(),
            r.beta.to_string(),
            r.eta.to_string(),
            r.raw_error.to_string(),
            r.denoised_error.to_string(),
            r.det_bound.to_string(),
            r.in_family.to_string(),
            r.pd_distance.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["var", "value", "mean_raw", "mean_denoised", "mean_bound"])?;
    for r in rows {
        w.write_record([
            r.var.to_string(),
            r.value.to_string(),
            r.mean_raw.to_string(),
            r.mean_denoised.to_string(),
            r.mean_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(writer: W, h: &Histogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin", "lo", "hi", "count"])?;
    for (i, (lo, hi, count)) in h.bins().enumerate() {
        w.write_record([i.to_string(), lo.to_string(), hi.to_string(), count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
