use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;

/// Provenance embedded in every randomized output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub version: &'static str,
    pub config_hash: String,
}

impl Meta {
    /// `config` must not contain worker counts or output paths.
    pub fn new(seed: u64, config: &str) -> Self {
        let digest = Sha256::digest(config.as_bytes());
        let config_hash = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Meta {
            seed,
            version: env!("CARGO_PKG_VERSION"),
            config_hash,
        }
    }
}

/// Nine significant digits, `.` decimal separator.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table {
            header: header.split(',').map(str::to_owned).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, meta: Option<&Meta>) -> String {
        let mut s = String::new();
        if let Some(m) = meta {
            s.push_str(&format!(
                "# seed={}\n# version={}\n# config_hash={}\n",
                m.seed, m.version, m.config_hash
            ));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub struct Report {
    pub json: Value,
    pub table: Table,
    pub summary: String,
    pub meta: Option<Meta>,
}

impl Report {
    pub fn new(json: impl Serialize, table: Table, summary: String) -> Self {
        Report {
            json: serde_json::to_value(json).expect("report serializes"),
            table,
            summary,
            meta: None,
        }
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.render(self.meta.as_ref()),
            Format::Json => {
                let value = match (&self.meta, &self.json) {
                    (None, v) => v.clone(),
                    (Some(m), Value::Object(obj)) => {
                        let mut obj = obj.clone();
                        obj.insert("meta".into(), json!(m));
                        Value::Object(obj)
                    }
                    (Some(m), v) => json!({ "meta": m, "results": v }),
                };
                let mut s = serde_json::to_string_pretty(&value).expect("json renders");
                s.push('\n');
                s
            }
        }
    }
}
