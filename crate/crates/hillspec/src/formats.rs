//! On-disk formats: JSON documents with every float written to 17
//! significant digits, and CSV tables with documented headers.
//!
//! Every writer has a matching reader, and `read(write(x)) == x` holds
//! bit-for-bit for finite doubles.

use std::io;

use hillspec_core::schrodinger::{SpectralRecord, SpectralTable};
use hillspec_core::{Complex64, FourierFunction, WeightedSequence};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// `v` with 17 significant digits, e.g. `9.8696044010893580e0`.
///
/// Non-finite values come out as `NaN`, `inf` and `-inf`, which `f64`'s
/// parser accepts.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| HarnessError::Serialize(format!("bad float {s:?}: {e}")))
}

/// JSON formatter writing floats via [`fmt_f64`].
#[derive(Debug, Default, Clone, Copy)]
pub struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with 17-digit floats. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| HarnessError::Serialize(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| HarnessError::Serialize(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| HarnessError::Serialize(e.to_string()))
}

/// `{"K": int, "real": bool, "coeffs": [[k, re, im], ...]}` with `k`
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierJson {
    #[serde(rename = "K")]
    pub max_freq: usize,
    pub real: bool,
    pub coeffs: Vec<(i64, f64, f64)>,
}

impl From<&FourierFunction> for FourierJson {
    fn from(f: &FourierFunction) -> Self {
        FourierJson {
            max_freq: f.max_freq(),
            real: f.is_real_symmetric(),
            coeffs: f.iter().map(|(k, c)| (k, c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<&FourierJson> for FourierFunction {
    type Error = HarnessError;

    fn try_from(j: &FourierJson) -> Result<Self> {
        check_increasing(j.coeffs.iter().map(|c| c.0))?;
        Ok(FourierFunction::new(
            j.max_freq,
            j.real,
            j.coeffs.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))),
        )?)
    }
}

/// `{"entries": [[k, re, im], ...]}` with `k` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceJson {
    pub entries: Vec<(i64, f64, f64)>,
}

impl From<&WeightedSequence> for SequenceJson {
    fn from(x: &WeightedSequence) -> Self {
        SequenceJson {
            entries: x.iter().map(|(k, c)| (k, c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<&SequenceJson> for WeightedSequence {
    type Error = HarnessError;

    fn try_from(j: &SequenceJson) -> Result<Self> {
        check_increasing(j.entries.iter().map(|c| c.0))?;
        if let Some(&(k, _, _)) = j.entries.iter().find(|e| !(e.1.is_finite() && e.2.is_finite())) {
            return Err(HarnessError::Serialize(format!("non-finite entry at k = {k}")));
        }
        Ok(WeightedSequence::from_entries(
            j.entries.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))),
        ))
    }
}

fn check_increasing(ks: impl Iterator<Item = i64>) -> Result<()> {
    let mut last = None;
    for k in ks {
        if last.is_some_and(|l| l >= k) {
            return Err(HarnessError::Serialize(format!("indices not strictly increasing at k = {k}")));
        }
        last = Some(k);
    }
    Ok(())
}

pub fn fourier_to_json(f: &FourierFunction) -> Result<String> {
    to_json(&FourierJson::from(f))
}

pub fn fourier_from_json(text: &str) -> Result<FourierFunction> {
    FourierFunction::try_from(&from_json::<FourierJson>(text)?)
}

pub fn sequence_to_json(x: &WeightedSequence) -> Result<String> {
    to_json(&SequenceJson::from(x))
}

pub fn sequence_from_json(text: &str) -> Result<WeightedSequence> {
    WeightedSequence::try_from(&from_json::<SequenceJson>(text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    pub r_kappa: f64,
    pub r_mid: f64,
}

/// One row of a spectral table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralRow {
    pub n: u32,
    pub mu: f64,
    pub kappa: f64,
    pub lam_minus: f64,
    pub lam_plus: f64,
    pub residuals: Residuals,
    pub est_error: f64,
}

impl From<&SpectralRecord> for SpectralRow {
    fn from(r: &SpectralRecord) -> Self {
        SpectralRow {
            n: r.n,
            mu: r.mu,
            kappa: r.kappa,
            lam_minus: r.lam_minus,
            lam_plus: r.lam_plus,
            residuals: Residuals {
                r_kappa: r.r_kappa,
                r_mid: r.r_mid,
            },
            est_error: r.est_error,
        }
    }
}

pub const SPECTRAL_HEADER: [&str; 7] = ["n", "mu", "kappa", "lam_minus", "lam_plus", "r_kappa", "r_mid"];
pub const STRIP_HEADER: [&str; 3] = ["u", "v", "abs_f"];

/// The CSV view of a spectral table. `est_error` is JSON-only.
pub fn spectral_csv(table: &SpectralTable) -> Result<String> {
    let rows: Vec<SpectralRow> = table.records.iter().map(SpectralRow::from).collect();
    spectral_rows_csv(&rows)
}

pub fn spectral_rows_csv(rows: &[SpectralRow]) -> Result<String> {
    write_csv(&SPECTRAL_HEADER, rows.iter().map(|r| {
        vec![
            r.n.to_string(),
            fmt_f64(r.mu),
            fmt_f64(r.kappa),
            fmt_f64(r.lam_minus),
            fmt_f64(r.lam_plus),
            fmt_f64(r.residuals.r_kappa),
            fmt_f64(r.residuals.r_mid),
        ]
    }))
}

/// Parses a spectral CSV back. `est_error` is not part of the CSV and
/// comes back as NaN.
pub fn parse_spectral_csv(text: &str) -> Result<Vec<SpectralRow>> {
    read_csv(text, &SPECTRAL_HEADER, |f| {
        Ok(SpectralRow {
            n: f[0].parse().map_err(|e| HarnessError::Serialize(format!("bad index {:?}: {e}", f[0])))?,
            mu: parse_f64(f[1])?,
            kappa: parse_f64(f[2])?,
            lam_minus: parse_f64(f[3])?,
            lam_plus: parse_f64(f[4])?,
            residuals: Residuals {
                r_kappa: parse_f64(f[5])?,
                r_mid: parse_f64(f[6])?,
            },
            est_error: f64::NAN,
        })
    })
}

/// `|f(u + iv)|` samples for heat maps.
pub fn strip_csv(points: &[(f64, f64, f64)]) -> Result<String> {
    write_csv(
        &STRIP_HEADER,
        points.iter().map(|&(u, v, a)| vec![fmt_f64(u), fmt_f64(v), fmt_f64(a)]),
    )
}

pub fn parse_strip_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    read_csv(text, &STRIP_HEADER, |f| Ok((parse_f64(f[0])?, parse_f64(f[1])?, parse_f64(f[2])?)))
}

/// CSV with an arbitrary header; used for tables without a fixed schema.
pub fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::Serialize(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Serialize(e.to_string()))
}

pub fn read_csv<T>(text: &str, header: &[&str], row: impl Fn(&[&str]) -> Result<T>) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let err = |e: csv::Error| HarnessError::Serialize(e.to_string());
    let found = r.headers().map_err(err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(HarnessError::Serialize(format!(
            "expected header {:?}, found {:?}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(err)?;
            let fields: Vec<&str> = rec.iter().collect();
            row(&fields)
        })
        .collect()
}
