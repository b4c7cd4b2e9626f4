//! Flag groups shared by the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bchdtp::code::{CodeSpec, WeightEnumerator};
use bchdtp::metrics::Window;
use clap::Args;
use serde::{Deserialize, Serialize};

/// Environment variable naming the directory searched for enumerator files.
pub const DATA_DIR_ENV: &str = "BCHDTP_DATA_DIR";

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CodeArgs {
    /// Parent code as n,k,d_des
    #[arg(long, default_value = "255,239,5")]
    pub code: String,
    /// Number of shortened positions
    #[arg(long, default_value_t = 0)]
    pub shorten: usize,
    /// auto, exact, approx, or a path to an enumerator file
    #[arg(long, default_value = "auto")]
    pub enumerator: String,
}

impl CodeArgs {
    pub fn spec(&self) -> Result<CodeSpec> {
        let parent: CodeSpec = self
            .code
            .parse()
            .with_context(|| format!("invalid --code {:?}", self.code))?;
        if self.shorten == 0 {
            return Ok(parent);
        }
        Ok(parent.shorten(self.shorten)?)
    }

    pub fn enumerator(&self, spec: &CodeSpec) -> Result<WeightEnumerator> {
        resolve_enumerator(&spec.parent(), &self.enumerator)
    }
}

fn data_dir_file(spec: &CodeSpec) -> Option<PathBuf> {
    let dir = std::env::var_os(DATA_DIR_ENV)?;
    let p = Path::new(&dir).join(format!("bch_{}_{}_{}.txt", spec.n, spec.k, spec.d_des));
    p.is_file().then_some(p)
}

/// Enumerator lookup: data directory, then bundled tables, then enumeration or the approximation.
pub fn resolve_enumerator(parent: &CodeSpec, choice: &str) -> Result<WeightEnumerator> {
    let exact = || -> Result<Option<WeightEnumerator>> {
        if let Some(p) = data_dir_file(parent) {
            return Ok(Some(WeightEnumerator::load(&p)?));
        }
        if let Some(a) = WeightEnumerator::bundled(parent.n, parent.k) {
            return Ok(Some(a));
        }
        if parent.k <= bchdtp::code::ENUMERATION_CAP {
            return Ok(Some(WeightEnumerator::exact_for(parent)?));
        }
        Ok(None)
    };
    let a = match choice {
        "auto" => match exact()? {
            Some(a) => a,
            None => WeightEnumerator::approx(parent)?,
        },
        "exact" => match exact()? {
            Some(a) => a,
            None => {
                bail!("no exact enumerator for {parent}; supply a file or use --enumerator approx")
            }
        },
        "approx" => WeightEnumerator::approx(parent)?,
        path => WeightEnumerator::load(path)?,
    };
    a.check_matches(parent)?;
    Ok(a)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// First Eb/N0 in dB
    #[arg(long)]
    pub from: Option<f64>,
    /// Last Eb/N0 in dB
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Explicit comma-separated Eb/N0 list; overrides from/to/step
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<f64>,
}

impl GridArgs {
    pub fn grid(&self, default: (f64, f64, f64)) -> Result<Vec<f64>> {
        if !self.points.is_empty() {
            return Ok(self.points.clone());
        }
        let from = self.from.unwrap_or(default.0);
        let to = self.to.unwrap_or(default.1);
        let step = self.step.unwrap_or(default.2);
        if !(step > 0.0) || to < from {
            bail!("invalid grid {from}..{to} step {step}");
        }
        let count = ((to - from) / step + 1e-9).floor() as usize + 1;
        // decimal rounding keeps grid values identical across platforms and reruns
        Ok((0..count)
            .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
            .collect())
    }
}

pub fn parse_pair(s: &str, what: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .with_context(|| format!("{what} expects two comma-separated integers"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

pub fn parse_window(s: &Option<String>) -> Result<Option<Window>> {
    s.as_ref()
        .map(|w| parse_pair(w, "--window").map(|(u_max, r_max)| Window { u_max, r_max }))
        .transpose()
}

/// Frame counts given as integers or in scientific notation (1e5).
pub fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        return Err(format!("{s} is not a positive integer"));
    }
    Ok(v as u64)
}
