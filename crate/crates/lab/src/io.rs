//! On-disk formats.
//!
//! Binary frames are concatenated records, each
//!
//! ```text
//! magic    8 bytes  b"GMCHFRAM"
//! N        u64      little-endian
//! L        f64      little-endian, half length of the box [-L, L)
//! t        f64      little-endian
//! samples  N × f64  little-endian, u at x_j = -L + 2Lj/N
//! ```

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use gmch_core::evolution::ObserverRecord;
use gmch_core::spectral::{GridFunction, GridSpec};
use serde::Serialize;

pub const FRAME_MAGIC: &[u8; 8] = b"GMCHFRAM";

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub half_length: f64,
    pub t: f64,
    pub samples: Vec<f64>,
}

pub fn write_frame<W: Write>(w: &mut W, grid: &GridSpec, t: f64, samples: &[f64]) -> io::Result<()> {
    w.write_all(FRAME_MAGIC)?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    w.write_all(&grid.half_length().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for v in samples {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads frames until a clean end of input. A truncated frame or a bad
/// magic is an error.
pub fn read_frames<R: Read>(mut r: R) -> io::Result<Vec<Frame>> {
    let mut out = Vec::new();
    loop {
        let mut magic = [0u8; 8];
        match r.read_exact(&mut magic) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(out),
            Err(e) => return Err(e),
        }
        if &magic != FRAME_MAGIC {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad frame magic"));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let half_length = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let t = f64::from_le_bytes(word);
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut word)?;
            samples.push(f64::from_le_bytes(word));
        }
        out.push(Frame { half_length, t, samples });
    }
}

/// Trajectory sink in either CSV (`t, u_0, …, u_{N−1}` per row) or the
/// binary frame format.
pub enum FrameSink {
    Csv(csv::Writer<File>),
    Binary(BufWriter<File>),
}

impl FrameSink {
    pub fn csv(path: &Path, grid: &GridSpec) -> csv::Result<Self> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend((0..grid.len()).map(|j| format!("u_{j}")));
        w.write_record(&header)?;
        Ok(FrameSink::Csv(w))
    }

    pub fn binary(path: &Path) -> io::Result<Self> {
        Ok(FrameSink::Binary(BufWriter::new(File::create(path)?)))
    }

    pub fn push(&mut self, grid: &GridSpec, t: f64, samples: &[f64]) -> anyhow::Result<()> {
        match self {
            FrameSink::Csv(w) => {
                let mut row = vec![fmt(t)];
                row.extend(samples.iter().map(|v| fmt(*v)));
                w.write_record(&row)?;
            }
            FrameSink::Binary(w) => write_frame(w, grid, t, samples)?,
        }
        Ok(())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match self {
            FrameSink::Csv(mut w) => w.flush()?,
            FrameSink::Binary(mut w) => w.flush()?,
        }
        Ok(())
    }
}

/// Shortest round-trip decimal, so CSV output is byte-stable.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> anyhow::Result<()> {
    // Serde writes the header with the first row; an empty table still
    // gets one.
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const OBSERVER_HEADER: [&str; 8] = ["t", "E", "F", "M", "xi", "lhs_3_5", "min_y", "min_u_pm_ux"];

pub fn write_observer_csv(path: &Path, records: &[ObserverRecord]) -> anyhow::Result<()> {
    write_csv(path, records, &OBSERVER_HEADER)
}

/// Whitespace-separated columns with a `#` header line, for gnuplot.
pub fn write_columns(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {}", header.join(" "))?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

pub fn observer_columns(path: &Path, records: &[ObserverRecord]) -> anyhow::Result<()> {
    write_columns(
        path,
        &OBSERVER_HEADER,
        records.iter().map(|r| vec![r.t, r.e, r.f, r.m, r.xi, r.lhs_3_5, r.min_y, r.min_u_pm_ux]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub u: f64,
    pub u_x: f64,
    pub y: f64,
}

pub fn profile_rows(u: &GridFunction) -> Vec<ProfileRow> {
    let g = u.spec();
    (0..g.len())
        .map(|j| ProfileRow { x: g.x(j), u: u.samples()[j], u_x: u.ux()[j], y: u.y()[j] })
        .collect()
}

pub fn write_profile_csv(path: &Path, u: &GridFunction) -> anyhow::Result<()> {
    write_csv(path, &profile_rows(u), &["x", "u", "u_x", "y"])
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
