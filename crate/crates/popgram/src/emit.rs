//! Line-delimited output records.
//!
//! Every record renders to exactly one line in either format:
//!
//! * `tsv`: tab-separated `key=value` pairs, the record kind first, the
//!   remaining keys sorted; `%`, tab, CR and LF inside values are
//!   percent-escaped;
//! * `json-lines`: one JSON object per line with sorted keys.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Tsv,
    JsonLines,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "tsv" => Ok(OutputFormat::Tsv),
            "json-lines" => Ok(OutputFormat::JsonLines),
            other => Err(Error::Config(format!(
                "unknown output format {other:?}, expected tsv or json-lines"
            ))),
        }
    }

    pub fn render(&self) -> &'static str {
        match self {
            OutputFormat::Tsv => "tsv",
            OutputFormat::JsonLines => "json-lines",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Text(String),
    UInt(u64),
    Bool(bool),
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::UInt(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '%' => out.push_str("%25"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            other => out.push(other),
        }
    }
    out
}

/// Inverse of [`escape`]; only the four escapes it produces are accepted.
pub fn unescape(text: &str) -> Result<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        match (chars.next(), chars.next()) {
            (Some('2'), Some('5')) => out.push('%'),
            (Some('0'), Some('9')) => out.push('\t'),
            (Some('0'), Some('A')) => out.push('\n'),
            (Some('0'), Some('D')) => out.push('\r'),
            _ => return Err(Error::Artifact(format!("bad escape in {text:?}"))),
        }
    }
    Ok(out)
}

/// One output line: a kind plus sorted key/value fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: BTreeMap<String, Value>,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record {
            kind,
            fields: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Tsv => {
                let mut parts = vec![format!("record={}", self.kind)];
                for (key, value) in &self.fields {
                    let text = match value {
                        Value::Text(t) => escape(t),
                        Value::UInt(n) => n.to_string(),
                        Value::Bool(b) => b.to_string(),
                    };
                    parts.push(format!("{key}={text}"));
                }
                parts.join("\t")
            }
            OutputFormat::JsonLines => {
                let mut map = serde_json::Map::new();
                map.insert(
                    "record".to_string(),
                    serde_json::Value::String(self.kind.to_string()),
                );
                for (key, value) in &self.fields {
                    let json = match value {
                        Value::Text(t) => serde_json::Value::String(t.clone()),
                        Value::UInt(n) => serde_json::Value::Number((*n).into()),
                        Value::Bool(b) => serde_json::Value::Bool(*b),
                    };
                    map.insert(key.clone(), json);
                }
                // serde_json's default map is ordered by key
                serde_json::Value::Object(map).to_string()
            }
        }
    }
}
