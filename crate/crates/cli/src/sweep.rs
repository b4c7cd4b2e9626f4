use std::path::PathBuf;

use anyhow::Result;
use bchdtp::dtp::CorrectDecodeCheck;
use bchdtp::metrics::{optimize_thresholds, sweep, Objective, SweepSpec};
use bchdtp::sim::{simulate_frames, DecoderKind, SimConfig};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::args::{parse_count, parse_window, CodeArgs, GridArgs};
use crate::output::{gnuplot_script, Curve, OutDir};
use crate::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveArg {
    Ber,
    Fer,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value = "eaed")]
    pub decoder: DecoderKind,
    /// Erasure threshold
    #[arg(long = "T", default_value_t = 0.16)]
    pub t: f64,
    /// Anchor threshold
    #[arg(long = "Ta")]
    pub t_a: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Evaluate only u <= U and residuals <= R, as U,R
    #[arg(long)]
    pub window: Option<String>,
    /// Joint (U, E) truncation mass
    #[arg(long, default_value_t = bchdtp::channel::DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long)]
    pub erasure_cap: Option<usize>,
    #[arg(long)]
    pub strict: bool,
    /// Pick (T, T_a) on a grid at this Eb/N0 before sweeping
    #[arg(long)]
    pub optimize: Option<f64>,
    #[arg(long, value_enum, default_value = "ber")]
    pub objective: ObjectiveArg,
    /// Append Monte-Carlo columns
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    pub frames: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out/sweep")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SimRow {
    ebn0_db: f64,
    ber: f64,
    fer: f64,
    mc_ber: f64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "T_a")]
    t_a: Option<f64>,
    sim_ber: f64,
    sim_ber_info: f64,
    sim_fer: f64,
    sim_mc_ber: f64,
    sim_ber_se: f64,
    frames: u64,
    seed: u64,
}

/// Threshold grids searched by --optimize.
fn threshold_grids() -> (Vec<f64>, Vec<f64>) {
    let t = (0..=30).map(|i| i as f64 / 100.0).collect();
    let ta = (6..=30).map(|i| i as f64 / 20.0).collect();
    (t, ta)
}

pub fn run(args: &SweepArgs, command: &Command) -> Result<()> {
    let spec = args.code.spec()?;
    let a = args.code.enumerator(&spec)?;
    let grid = args.grid.grid((4.0, 10.0, 0.2))?;
    let mut s = SweepSpec::new(args.decoder, args.t, args.t_a);
    s.eta = args.eta;
    s.erasure_cap = args.erasure_cap;
    s.window = parse_window(&args.window)?;
    if args.strict {
        s.check = CorrectDecodeCheck::Strict;
    }
    if let Some(db) = args.optimize {
        let (tg, tag) = threshold_grids();
        let objective = match args.objective {
            ObjectiveArg::Ber => Objective::Ber,
            ObjectiveArg::Fer => Objective::Fer,
        };
        let tg = if args.decoder.uses_erasures() {
            tg
        } else {
            vec![0.0]
        };
        let (t, ta) = optimize_thresholds(&spec, &a, &s, db, &tg, Some(&tag), objective)?;
        eprintln!("optimal thresholds at {db} dB: T = {t}, T_a = {ta:?}");
        s.t = t;
        s.t_a = ta;
    }
    let points = sweep(&spec, &a, &s, &grid)?;
    let mut out = OutDir::create(&args.out)?;
    let mut curves = vec![
        Curve {
            column: 2,
            title: format!("{} computed", args.decoder),
            select: None,
            points: false,
        },
        Curve {
            column: 4,
            title: "miscorrection".into(),
            select: None,
            points: false,
        },
    ];
    if args.simulate {
        let rows = points
            .iter()
            .map(|p| -> Result<SimRow> {
                let cfg = SimConfig {
                    erasure_cap: args.erasure_cap,
                    ..SimConfig::new(spec, args.decoder, p.ebn0_db, args.frames, args.seed)
                        .thresholds(p.t, p.t_a)
                };
                let r = simulate_frames(&cfg)?;
                Ok(SimRow {
                    ebn0_db: p.ebn0_db,
                    ber: p.ber,
                    fer: p.fer,
                    mc_ber: p.mc_ber,
                    t: p.t,
                    t_a: p.t_a,
                    sim_ber: r.ber,
                    sim_ber_info: r.ber_info,
                    sim_fer: r.fer,
                    sim_mc_ber: r.mc_ber,
                    sim_ber_se: r.ber_se,
                    frames: args.frames,
                    seed: args.seed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.write_csv("sweep.csv", "sweep-sim", &rows)?;
        curves.push(Curve {
            column: 8,
            title: format!("{} simulated", args.decoder),
            select: None,
            points: true,
        });
    } else {
        out.write_csv("sweep.csv", "sweep", &points)?;
    }
    out.write_text(
        "sweep.gp",
        &gnuplot_script("sweep.csv", "sweep.png", "BER", &curves),
    )?;
    out.write_manifest(command)?;
    for p in &points {
        println!(
            "{:6.2} dB  ber {:.6e}  fer {:.6e}  mc_ber {:.6e}",
            p.ebn0_db, p.ber, p.fer, p.mc_ber
        );
    }
    Ok(())
}
