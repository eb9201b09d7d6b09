//! Deterministic JSON and CSV number formatting.
//!
//! Every float is written with 17 significant digits in scientific notation,
//! which round-trips `f64` exactly and does not depend on the platform.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;

/// `x` with 17 significant digits; `NaN`, `inf` and `-inf` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Compact serde_json formatter that writes floats through [`fmt_f64`].
/// Non-finite floats never reach it; serde_json emits `null` for them.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedFormatter;

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn write_json_to<W: Write, T: Serialize + ?Sized>(writer: W, value: &T) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, FixedFormatter);
    value.serialize(&mut ser)?;
    ser.into_inner().write_all(b"\n")?;
    Ok(())
}

/// Compact JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json_to(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut file = File::create(path)?;
    write_json_to(&mut file, value)?;
    file.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// CSV writer with comma delimiter and LF line endings.
pub fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer)
}
