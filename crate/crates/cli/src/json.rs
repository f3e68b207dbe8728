//! JSON emission with floats fixed at 17 significant digits, and the record
//! shapes shared by the subcommands and `verify`.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use sumzeta_core::zerofinder::ZeroRecord;
use sumzeta_core::Target;

/// Writes every float as `d.dddddddddddddddde±x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// One compact JSON document followed by a newline.
pub fn write_line<T: Serialize, W: Write>(out: &mut W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, FixedFloats);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.write_all(b"\n")
}

/// `{:.16e}` for CSV cells.
pub fn float(value: f64) -> String {
    format!("{value:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroJson {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
    pub residual: f64,
    pub simple: bool,
    pub function: Target,
}

impl From<&ZeroRecord> for ZeroJson {
    fn from(z: &ZeroRecord) -> Self {
        Self {
            re: z.location.re,
            im: z.location.im,
            multiplicity: z.multiplicity,
            residual: z.residual,
            simple: z.simple,
            function: z.function,
        }
    }
}

impl ZeroJson {
    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatabaseHeader {
    pub n: usize,
    pub function: Target,
    /// `[x_lo, x_hi, y_lo, y_hi]`.
    pub window: [f64; 4],
    pub tol: f64,
    pub version: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaderLine {
    pub header: DatabaseHeader,
}
