//! Output files: CSV tables with a provenance header, JSON summaries and
//! generator triplet exports.

use crate::config::Config;
use crate::error::Result;
use crate::sparse::CsrMatrix;
use crate::spectral::{EPS_OVERLAP, TOL_MATCH, TOL_ZERO};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub config_hash: String,
    pub scheme: String,
    pub tolerances: Vec<(String, f64)>,
    pub notes: Vec<String>,
    /// Resolved configuration with every default filled in.
    pub config: String,
}

impl Provenance {
    pub fn from_config(cfg: &Config) -> Self {
        Self {
            tool: format!("skinheom {}", env!("CARGO_PKG_VERSION")),
            config_hash: cfg.hash(),
            scheme: cfg.scheme().label(),
            tolerances: vec![
                ("rtol".into(), cfg.run.rtol),
                ("atol".into(), cfg.run.atol),
                ("tol_match".into(), TOL_MATCH),
                ("tol_zero".into(), TOL_ZERO),
                ("eps_overlap".into(), EPS_OVERLAP),
            ],
            notes: cfg.notes(),
            config: cfg.to_toml(),
        }
    }

    /// `#`-prefixed header block.
    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.tool);
        let _ = writeln!(s, "# config_hash: {}", self.config_hash);
        let _ = writeln!(s, "# scheme: {}", self.scheme);
        let tol: Vec<String> = self
            .tolerances
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
            .collect();
        let _ = writeln!(s, "# tolerances: {}", tol.join(" "));
        for n in &self.notes {
            let _ = writeln!(s, "# note: {n}");
        }
        let _ = writeln!(s, "# config:");
        for line in self.config.lines() {
            if line.is_empty() {
                let _ = writeln!(s, "#");
            } else {
                let _ = writeln!(s, "#   {line}");
            }
        }
        s
    }
}

/// Rows of pre-formatted fields.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, prov: &Provenance, mut w: W) -> std::io::Result<()> {
        w.write_all(prov.header().as_bytes())?;
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, prov: &Provenance, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(prov, &mut w)?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub fn save_json<T: Serialize>(prov: &Provenance, body: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&Summary { provenance: prov, body })
        .map_err(|e| crate::Error::Config(format!("json: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn save_triplets(prov: &Provenance, m: &CsrMatrix, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(prov.header().as_bytes())?;
    m.write_triplets(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Data lines of a CSV written by [`Table::save`], header skipped.
pub fn read_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}
