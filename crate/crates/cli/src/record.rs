use std::io::Write;

use serde::Serialize;

use crate::args::Format;

/// One output line. Fields that do not apply to a command are null (JSON) or
/// empty (CSV), so every command shares one schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub command: String,
    pub group: Option<String>,
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub alpha: Option<f64>,
    pub method: String,
    pub value: Option<f64>,
    pub log_value: Option<f64>,
    pub stderr: Option<f64>,
    pub phase: Option<String>,
    pub exponent: Option<f64>,
    pub log_power: Option<u8>,
    pub constant: Option<f64>,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
    pub version: String,
}

impl ResultRecord {
    pub fn new(command: &str, method: &str) -> Self {
        ResultRecord {
            command: command.into(),
            group: None,
            n: None,
            m: None,
            alpha: None,
            method: method.into(),
            value: None,
            log_value: None,
            stderr: None,
            phase: None,
            exponent: None,
            log_power: None,
            constant: None,
            seed: None,
            runtime_ms: 0,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    /// Sets value and its log from the log; value is left null when it does
    /// not fit in a double.
    pub fn with_log_value(mut self, ln: f64) -> Self {
        let v = ln.exp();
        self.value = (v.is_finite() && v > 0.0).then_some(v);
        self.log_value = Some(ln);
        self
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self.log_value = (v > 0.0).then(|| v.ln());
        self
    }
}

pub fn write_records<W: Write>(out: W, records: &[ResultRecord], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()
        }
    }
}
