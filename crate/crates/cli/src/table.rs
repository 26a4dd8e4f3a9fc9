//! Result tables: columns with units, rows of reals, and an ordered
//! metadata block. CSV carries the metadata as `# key = value` lines before
//! the header row; JSON nests it. Identical inputs produce byte-identical
//! files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{fmt_float, Experiment, OutputFormat};
use crate::error::CliResult;

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    /// New table carrying the artifact version, the table name, and the
    /// fully resolved experiment as metadata.
    pub fn new(name: &str, columns: Vec<Column>, experiment: &Experiment) -> Self {
        let mut metadata = vec![
            ("artifact".to_string(), "rwpnet".to_string()),
            ("version".to_string(), rwpnet::VERSION.to_string()),
            ("table".to_string(), name.to_string()),
        ];
        metadata.extend(experiment.metadata_pairs());
        ResultTable {
            name: name.into(),
            columns,
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push_meta(&mut self, key: &str, value: String) {
        self.metadata.push((key.into(), value));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for (i, c) in self.columns.iter().enumerate() {
            out.push_str(&format!("# unit.{} = {}\n", c.name, c.unit));
            let _ = i;
        }
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| c.name.clone())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(
                &row.iter()
                    .map(|v| fmt_float(*v))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: Vec<serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| serde_json::json!({ "key": k, "value": v }))
            .collect();
        let cols: Vec<serde_json::Value> = self
            .columns
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "unit": c.unit }))
            .collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| fmt_float(*v)).collect())
            .collect();
        let doc = serde_json::json!({
            "metadata": meta,
            "columns": cols,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).expect("static structure")
    }

    /// Writes the table into `dir` with the format's extension; returns the
    /// path written.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> CliResult<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        let contents = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        };
        let mut f = std::fs::File::create(&path)?;
        f.write_all(contents.as_bytes())?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }
}

/// Reads the `# key = value` metadata block back from a CSV table.
pub fn read_csv_metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| {
            let body = l.trim_start_matches('#').trim();
            body.split_once(" = ")
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
