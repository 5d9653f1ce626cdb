//! Artifact rendering: JSON documents or CSV tables, both carrying the
//! run metadata.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use mmphf_lab::harddist::RNG_NAME;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// What a subcommand produced, before rendering.
pub struct Artifact {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Artifact {
    pub fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Artifact { json, header, rows }
    }
}

pub struct Metadata {
    pub seed: u64,
    pub config: Value,
}

impl Metadata {
    pub fn to_json(&self) -> Value {
        json!({
            "version": mmphf_lab::VERSION,
            "seed": self.seed,
            "rng": RNG_NAME,
            "config": self.config,
        })
    }
}

pub fn render(artifact: &Artifact, meta: &Metadata, format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("metadata".into(), meta.to_json());
            match &artifact.json {
                Value::Object(fields) => doc.extend(fields.clone()),
                other => {
                    doc.insert("result".into(), other.clone());
                }
            }
            let mut text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| e.to_string())?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut out = format!("# {}\n", serde_json::to_string(&meta.to_json()).map_err(|e| e.to_string())?);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&artifact.header).map_err(|e| e.to_string())?;
            for row in &artifact.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let body = w.into_inner().map_err(|e| e.to_string())?;
            out.push_str(&String::from_utf8(body).map_err(|e| e.to_string())?);
            Ok(out)
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    }
}
