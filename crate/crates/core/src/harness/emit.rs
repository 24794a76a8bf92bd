use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::clt::CltRecord;
use super::sweep::{PrimeRecord, SweepReport};
use crate::error::{Error, Result};
use crate::numeric::fmt17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    /// Two columns, log10 q and log10 W1.
    Dat,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dat" => Ok(Format::Dat),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// Pretty JSON with floats as 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Sorted keys, fixed float format, LF line endings, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // going through Value sorts object keys
    let v = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_records_csv<W: Write>(records: &[PrimeRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "q,w1,allowance,atoms,reference_atoms,solver,fourier_t,error")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.q,
            opt_f(r.w1),
            opt_f(r.allowance),
            r.atoms,
            r.reference_atoms,
            r.solver.as_deref().unwrap_or(""),
            r.fourier_t.map(|t| t.to_string()).unwrap_or_default(),
            csv_text(r.error.as_deref().unwrap_or("")),
        )?;
    }
    Ok(())
}

/// log10 q and log10 W1 for every record with positive W1.
pub fn write_records_dat<W: Write>(records: &[PrimeRecord], mut w: W) -> io::Result<()> {
    for r in records {
        if let Some(v) = r.w1.filter(|&v| v > 0.0) {
            writeln!(w, "{} {}", fmt17((r.q as f64).log10()), fmt17(v.log10()))?;
        }
    }
    Ok(())
}

pub fn write_clt_csv<W: Write>(records: &[CltRecord], mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "q,d,atoms,w1_gaussian,allowance_gaussian,w1_gamma,allowance_gamma,gamma_bound,within_bound"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.q,
            r.d,
            r.atoms,
            fmt17(r.w1_gaussian),
            opt_f(r.allowance_gaussian),
            fmt17(r.w1_gamma),
            opt_f(r.allowance_gamma),
            fmt17(r.gamma_bound),
            r.within_bound
        )?;
    }
    Ok(())
}

/// Write a sweep report; csv and dat carry the records only.
pub fn emit<W: Write>(report: &SweepReport, format: Format, mut w: W) -> Result<()> {
    match format {
        Format::Csv => write_records_csv(&report.records, &mut w)?,
        Format::Dat => write_records_dat(&report.records, &mut w)?,
        Format::Json => w.write_all(canonical_json(report)?.as_bytes())?,
    }
    w.flush()?;
    Ok(())
}

pub fn emit_to_path(report: &SweepReport, format: Format, path: &Path) -> Result<()> {
    emit(report, format, BufWriter::new(File::create(path)?))
}
