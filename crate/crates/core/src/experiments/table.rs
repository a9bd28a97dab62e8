//! Plain-text tables: `#`-prefixed `key=value` metadata, a header line, rows.

use std::fmt::Write;

use crate::error::{invalid, Result};

/// Ordered `key=value` pairs written as `# key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key).ok_or_else(|| invalid(key_name(key), "missing from the metadata"))?;
        raw.parse().map_err(|_| invalid(key_name(key), format!("cannot parse `{raw}`")))
    }
}

// error messages want a 'static name; metadata keys are few and known
fn key_name(key: &str) -> &'static str {
    match key {
        "t" => "t",
        "n_runs" => "n_runs",
        _ => "metadata",
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Metadata lines after the rows, such as summaries.
    pub footer: Metadata,
}

impl Table {
    pub fn new(meta: Metadata, header: &[&str]) -> Self {
        Self { meta, header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid("csv", format!("no column `{name}`")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta.0 {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        for (k, v) in &self.footer.0 {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut seen_header = false;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| invalid("csv", format!("metadata line without `=`: {line}")))?;
                let target = if seen_header { &mut table.footer } else { &mut table.meta };
                target.push(k.trim(), v.trim());
            } else if !seen_header {
                table.header = line.split(',').map(|s| s.trim().to_string()).collect();
                seen_header = true;
            } else {
                let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
                if row.len() != table.header.len() {
                    return Err(invalid("csv", format!("row has {} fields, header has {}", row.len(), table.header.len())));
                }
                table.rows.push(row);
            }
        }
        if !seen_header {
            return Err(invalid("csv", "no header line"));
        }
        Ok(table)
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(raw: &str, column: &str) -> Result<T> {
    raw.parse().map_err(|_| invalid("csv", format!("cannot parse `{raw}` in column `{column}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut meta = Metadata::default();
        meta.push("alpha", 0.1);
        let mut t = Table::new(meta, &["t", "value"]);
        t.push_row(vec!["0.5".into(), "1.25".into()]);
        t.footer.push("max", 3);
        let text = t.to_csv();
        assert_eq!(text, "# alpha=0.1\nt,value\n0.5,1.25\n# max=3\n");
        assert_eq!(Table::parse(&text).unwrap(), t);
    }
}
