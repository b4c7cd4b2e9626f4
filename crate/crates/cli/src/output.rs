//! Versioned CSV, run manifests, plot scripts and text tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::Command;

pub const CSV_VERSION: u32 = 1;

/// First line of every CSV file written by the tool.
pub fn schema_line(kind: &str) -> String {
    format!("# schema=bchdtp-{kind}/{CSV_VERSION}")
}

/// Checks the schema line of a CSV produced by this tool and returns its kind.
pub fn check_schema(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().next().unwrap_or("");
    let Some(rest) = first.strip_prefix("# schema=bchdtp-") else {
        bail!("{} has no schema line", path.display());
    };
    let (kind, version) = rest.split_once('/').context("malformed schema line")?;
    let version: u32 = version.trim().parse().context("malformed schema version")?;
    if version != CSV_VERSION {
        bail!(
            "{} has schema version {version}, expected {CSV_VERSION}",
            path.display()
        );
    }
    Ok(kind.to_string())
}

pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv<T: Serialize>(
        &mut self,
        name: &str,
        kind: &str,
        rows: &[T],
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let mut f =
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(f, "{}", schema_line(kind))?;
        let mut w = csv::Writer::from_writer(f);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    /// Writes manifest.json; it contains no timestamps, so reruns reproduce it byte for byte.
    pub fn write_manifest(&mut self, command: &Command) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'static str,
            version: &'static str,
            csv_schema: u32,
            data_dir: Option<String>,
            command: &'a Command,
            outputs: &'a [String],
        }
        let m = Manifest {
            tool: "bchdtp",
            version: env!("CARGO_PKG_VERSION"),
            csv_schema: CSV_VERSION,
            data_dir: std::env::var(crate::args::DATA_DIR_ENV).ok(),
            command,
            outputs: &self.written,
        };
        let path = self.path("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(path)
    }
}

/// Reads the command of a manifest (or a bare command object).
pub fn read_command(path: &Path) -> Result<Command> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).context("config is not valid JSON")?;
    let cmd = v.get("command").cloned().unwrap_or(v);
    serde_json::from_value(cmd).context("config does not describe a command")
}

/// One curve of a gnuplot script: column of y values and a title.
pub struct Curve {
    pub column: usize,
    pub title: String,
    /// Optional filter expression on another column, e.g. decoder name.
    pub select: Option<(usize, String)>,
    pub points: bool,
}

pub fn gnuplot_script(csv: &str, png: &str, ylabel: &str, curves: &[Curve]) -> String {
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale y\nset format y '10^{%L}'\nset grid\n");
    s.push_str("set xlabel 'E_b/N_0 [dB]'\n");
    s.push_str(&format!("set ylabel '{ylabel}'\n"));
    let plots: Vec<String> = curves
        .iter()
        .map(|c| {
            let y = match &c.select {
                Some((col, v)) => format!("(strcol({col}) eq '{v}' ? ${} : 1/0)", c.column),
                None => format!("{}", c.column),
            };
            let style = if c.points {
                "points pt 7"
            } else {
                "lines lw 2"
            };
            format!(
                "'{csv}' every ::1 using 1:{y} with {style} title '{}'",
                c.title
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

/// Probability formatted for the printed tables: four decimals, with more digits
/// where rounding would show a non-trivial value as 0 or 1.
pub fn table_value(p: f64) -> String {
    let s = format!("{p:.4}");
    if (s == "1.0000" && p != 1.0) || (s == "0.0000" && p > 0.0) {
        if p > 0.5 {
            format!("{p:.6}")
        } else {
            format!("{p:.1e}")
        }
    } else {
        s
    }
}

/// Text table with u down the rows and e across the columns.
pub fn format_grid(title: &str, rows: &[Vec<f64>]) -> String {
    let cols = rows.first().map_or(0, |r| r.len());
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|&p| table_value(p)).collect())
        .collect();
    let width = cells
        .iter()
        .flatten()
        .map(|c| c.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut s = format!("{title}\n{:>4} |", "u\\e");
    for e in 0..cols {
        s.push_str(&format!(" {e:>width$}"));
    }
    s.push('\n');
    s.push_str(&"-".repeat(6 + cols * (width + 1)));
    s.push('\n');
    for (u, row) in cells.iter().enumerate() {
        s.push_str(&format!("{u:>4} |"));
        for c in row {
            s.push_str(&format!(" {c:>width$}"));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(table_value(0.687477), "0.6875");
        assert_eq!(table_value(1.0), "1.0000");
        assert_eq!(table_value(0.999992), "0.999992");
        assert_eq!(table_value(7.8e-6), "7.8e-6");
        assert_eq!(table_value(0.0), "0.0000");
    }

    #[test]
    fn grid_layout() {
        let g = format_grid("t", &[vec![1.0, 0.5], vec![0.25, 0.0]]);
        assert!(g.contains("   1 |"));
        assert_eq!(g.lines().count(), 5);
    }
}
