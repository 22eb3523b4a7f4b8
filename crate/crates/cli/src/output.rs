//! Rendering of command results as JSON or CSV.

use std::io::Write;

use betadd::QBeta;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// An exact number with its renderings.
#[derive(Clone, Debug, Serialize)]
pub struct Num {
    pub exact: QBeta,
    pub text: String,
    pub decimal: String,
    pub float: f64,
}

/// Rendering settings shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Style {
    /// Significant bits requested with `--precision`.
    pub precision: u32,
}

impl Style {
    /// Fractional decimal digits carrying `precision` bits.
    pub fn decimal_digits(self) -> u32 {
        (f64::from(self.precision) * std::f64::consts::LOG10_2).ceil() as u32
    }

    pub fn num(self, x: &QBeta) -> Num {
        Num {
            exact: x.clone(),
            text: x.to_string(),
            decimal: x.to_decimal(self.decimal_digits()),
            float: x.to_float(self.precision.max(53)),
        }
    }

    pub fn nums<'a>(self, xs: impl IntoIterator<Item = &'a QBeta>) -> Vec<Num> {
        xs.into_iter().map(|x| self.num(x)).collect()
    }
}

/// A result with a JSON document and a flat table for CSV.
pub struct Output {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(json: impl Serialize, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Output {
            json: serde_json::to_value(json).expect("results serialize"),
            header,
            rows,
        }
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
        }
    }
}

/// Plain `Display` of a float, the shortest text that parses back exactly.
pub fn f(x: f64) -> String {
    x.to_string()
}
