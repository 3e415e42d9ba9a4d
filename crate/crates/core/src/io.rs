//! File formats: set files, spectrum CSV and fixed-precision JSON reports.
//!
//! Set text format: a header line `N <ambient>` followed by one decimal
//! element per line in ascending order. Lines starting with `#` are comments.
//! The JSON alternative is `{"ambient": N, "elements": [...]}`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::intsets::DiscreteSet;
use crate::spectral::Spectrum;

pub fn parse_set_text(text: &str) -> Result<DiscreteSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("set file is empty".into()))?;
    let ambient = header
        .strip_prefix('N')
        .filter(|rest| rest.starts_with(char::is_whitespace))
        .and_then(|rest| rest.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("line {line_no}: expected header `N <ambient>`")))?;
    let elements = lines
        .map(|(i, l)| {
            l.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {i}: `{l}` is not a nonnegative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteSet::new(ambient, elements)
}

/// Text form of a set; `comments` become leading `#` lines.
pub fn format_set_text(set: &DiscreteSet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "N {}", set.ambient());
    for e in set.elements() {
        let _ = writeln!(out, "{e}");
    }
    out
}

/// Parses either set format, picking JSON when the first non-blank byte is `{`.
pub fn parse_set(text: &str) -> Result<DiscreteSet> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("set JSON: {e}")))
    } else {
        parse_set_text(text)
    }
}

pub fn read_set(path: impl AsRef<Path>) -> Result<DiscreteSet> {
    parse_set(&fs::read_to_string(path)?)
}

/// `k,re,im,abs` rows with 15 significant digits.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("k,re,im,abs\n");
    for (k, c) in spectrum.coeffs().iter().enumerate() {
        let _ = writeln!(out, "{k},{:.14e},{:.14e},{:.14e}", c.re, c.im, c.norm());
    }
    out
}

/// Pretty JSON with every float written to 17 significant digits, so that
/// identical values always produce identical bytes.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Default)]
struct FixedFloats {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
