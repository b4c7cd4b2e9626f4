use std::path::PathBuf;

use anyhow::{Context, Result};
use bchdtp::metrics::{concat_sweep, ConcatConfig, SweepSpec, SymbolMapping, TableCache};
use bchdtp::sim::DecoderKind;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::args::{resolve_enumerator, GridArgs};
use crate::output::{gnuplot_script, Curve, OutDir};
use crate::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingArg {
    UniformSpread,
    SameSymbol,
    BlockAligned,
}

impl From<MappingArg> for SymbolMapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::UniformSpread => SymbolMapping::UniformSpread,
            MappingArg::SameSymbol => SymbolMapping::SameSymbol,
            MappingArg::BlockAligned => SymbolMapping::BlockAligned,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConcatArgs {
    /// Inner decoders, comma separated
    #[arg(long, value_delimiter = ',', default_value = "bdd,eaed-a")]
    pub decoders: Vec<DecoderKind>,
    #[arg(long = "T", default_value_t = 0.05)]
    pub t: f64,
    #[arg(long = "Ta", default_value_t = 0.56)]
    pub t_a: f64,
    /// Overrides the mapping of the scheme config
    #[arg(long, value_enum)]
    pub mapping: Option<MappingArg>,
    /// JSON file with a scheme config; defaults to the built-in reference scheme
    #[arg(long)]
    pub concat_config: Option<PathBuf>,
    /// Inner parent enumerator: auto, exact, approx or a file
    #[arg(long, default_value = "auto")]
    pub enumerator: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "out/concat")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Row {
    ebn0_db: f64,
    decoder: String,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "T_a")]
    t_a: Option<f64>,
    symbol_error: f64,
    fer: f64,
    inner_ber: f64,
    inner_fer: f64,
}

fn config(args: &ConcatArgs) -> Result<ConcatConfig> {
    let mut cfg = match &args.concat_config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).context("invalid scheme config")?
        }
        None => ConcatConfig::reference(),
    };
    if let Some(m) = args.mapping {
        cfg.mapping = m.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &ConcatArgs, command: &Command) -> Result<()> {
    let cfg = config(args)?;
    let a = resolve_enumerator(&cfg.inner.parent(), &args.enumerator)?;
    let grid = args.grid.grid((6.0, 7.5, 0.1))?;
    let cache = TableCache::new();
    let mut rows = Vec::new();
    for &dec in &args.decoders {
        let t = if dec.uses_erasures() { args.t } else { 0.0 };
        let ta = dec.uses_anchors().then_some(args.t_a);
        let points = concat_sweep(&cfg, &a, &SweepSpec::new(dec, t, ta), &grid, &cache)?;
        for p in points {
            println!(
                "{:>7} {:6.2} dB  fer {:.4e}  symbol error {:.4e}",
                dec.to_string(),
                p.ebn0_db,
                p.fer,
                p.symbol_error
            );
            rows.push(Row {
                ebn0_db: p.ebn0_db,
                decoder: dec.to_string(),
                t,
                t_a: ta,
                symbol_error: p.symbol_error,
                fer: p.fer,
                inner_ber: p.inner_ber,
                inner_fer: p.inner_fer,
            });
        }
    }
    let mut out = OutDir::create(&args.out)?;
    out.write_csv("concat.csv", "concat", &rows)?;
    let curves: Vec<Curve> = args
        .decoders
        .iter()
        .map(|d| Curve {
            column: 6,
            title: d.to_string(),
            select: Some((2, d.to_string())),
            points: false,
        })
        .collect();
    out.write_text(
        "concat.gp",
        &gnuplot_script("concat.csv", "concat.png", "FER", &curves),
    )?;
    out.write_manifest(command)?;
    Ok(())
}
