use std::path::PathBuf;

use anyhow::{bail, Result};
use bchdtp::channel::{anchor_probs_eae, sigma_from_ebn0, AnchorProbs};
use bchdtp::dtp::{
    bdd_a_dtp, bdd_dtp, eaed_a_dtp, eaed_dtp, AnchorWeights, CorrectDecodeCheck, DtpCell,
    EaedParams, WeightValue,
};
use bchdtp::sim::DecoderKind;
use clap::Args;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::args::CodeArgs;
use crate::output::{format_grid, OutDir};
use crate::{Command, ValidationFailed};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DtpArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// bdd, bdd-a, eaed or eaed-a
    #[arg(long, default_value = "eaed")]
    pub decoder: DecoderKind,
    #[arg(long, default_value_t = 5)]
    pub umax: usize,
    #[arg(long, default_value_t = 8)]
    pub emax: usize,
    /// Anchor probabilities given directly
    #[arg(long)]
    pub pca: Option<f64>,
    #[arg(long)]
    pub pwa: Option<f64>,
    /// Or derived from an operating point: Eb/N0 with the thresholds T and T_a
    #[arg(long)]
    pub ebn0: Option<f64>,
    #[arg(long = "T", default_value_t = 0.0)]
    pub t: f64,
    #[arg(long = "Ta")]
    pub t_a: Option<f64>,
    /// Correct decodings pass the anchor check unconditionally
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub erasure_cap: Option<usize>,
    /// Exact rational arithmetic (short codes)
    #[arg(long)]
    pub rational: bool,
    #[arg(long, default_value = "out/dtp")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Row {
    u: usize,
    e: usize,
    outcome: String,
    r: String,
    p: f64,
    cell: String,
}

fn anchors(args: &DtpArgs, rate: f64) -> Result<AnchorProbs> {
    if let (Some(p_ca), Some(p_wa)) = (args.pca, args.pwa) {
        if !(0.0..=1.0).contains(&p_ca) || !(0.0..=1.0).contains(&p_wa) {
            bail!("anchor probabilities must lie in [0, 1]");
        }
        return Ok(AnchorProbs::new(p_ca, p_wa));
    }
    match (args.ebn0, args.t_a) {
        (Some(db), Some(ta)) => {
            let t = if args.decoder.uses_erasures() {
                args.t
            } else {
                0.0
            };
            Ok(anchor_probs_eae(sigma_from_ebn0(db, rate), t, ta)?)
        }
        _ => bail!(
            "decoder {} needs --pca and --pwa, or --ebn0 with --Ta",
            args.decoder
        ),
    }
}

/// Table as rows of cells, u-major, in f64.
type Grid = Vec<Vec<(DtpCell<f64>, String)>>;

fn build<P: WeightValue>(args: &DtpArgs, w: Option<AnchorWeights<P>>) -> Result<Grid> {
    let spec = args.code.spec()?;
    let a = args.code.enumerator(&spec)?;
    let check = if args.strict {
        CorrectDecodeCheck::Strict
    } else {
        CorrectDecodeCheck::AnchorChecked
    };
    let mut params = EaedParams::new(args.umax, args.emax).with_check(check);
    params.erasure_cap = args.erasure_cap;
    let none = AnchorWeights::none();
    Ok(match args.decoder {
        DecoderKind::Bdd | DecoderKind::BddA => {
            let t = match args.decoder {
                DecoderKind::Bdd => bdd_dtp::<P>(&spec, &a, args.umax)?,
                _ => bdd_a_dtp::<P>(&spec, &a, w.as_ref().unwrap_or(&none), args.umax, check)?,
            };
            t.cells
                .iter()
                .map(|c| vec![(c.to_f64(), "bdd".to_string())])
                .collect()
        }
        DecoderKind::Eaed | DecoderKind::EaedA => {
            let t = match args.decoder {
                DecoderKind::Eaed => eaed_dtp::<P>(&spec, &a, &params)?,
                _ => eaed_a_dtp::<P>(&spec, &a, w.as_ref().unwrap_or(&none), &params)?,
            };
            t.cells
                .iter()
                .zip(&t.kinds)
                .map(|(row, kinds)| {
                    row.iter()
                        .zip(kinds)
                        .map(|(c, k)| (c.to_f64(), k.label()))
                        .collect()
                })
                .collect()
        }
    })
}

pub fn run(args: &DtpArgs, command: &Command) -> Result<()> {
    let spec = args.code.spec()?;
    let probs = args
        .decoder
        .uses_anchors()
        .then(|| anchors(args, spec.rate()))
        .transpose()?;
    let grid = if args.rational {
        let w = probs.map(|p| {
            let r = |x: f64| BigRational::from_float(x).expect("finite probability");
            AnchorWeights::from_rationals(&r(p.p_ca), &r(p.p_wa))
        });
        build::<BigRational>(args, w)?
    } else {
        build::<f64>(args, probs.as_ref().map(AnchorWeights::from_probs))?
    };
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for (u, row) in grid.iter().enumerate() {
        for (e, (c, label)) in row.iter().enumerate() {
            let total = c.total();
            if !((total - 1.0).abs() <= 1e-9) {
                bad.push(format!("(u={u}, e={e}) sums to {total}"));
            }
            for (o, r, p) in c.entries() {
                rows.push(Row {
                    u,
                    e,
                    outcome: o.to_string(),
                    r: r.to_string(),
                    p,
                    cell: label.clone(),
                });
            }
        }
    }
    let succ: Vec<Vec<f64>> = grid
        .iter()
        .map(|r| r.iter().map(|(c, _)| c.succ).collect())
        .collect();
    let mc: Vec<Vec<f64>> = grid
        .iter()
        .map(|r| r.iter().map(|(c, _)| c.mc_total()).collect())
        .collect();
    let title = format!("{} {}", args.decoder, spec);
    let tables = format!(
        "{}\n{}",
        format_grid(&format!("P_succ(u,e), {title}"), &succ),
        format_grid(&format!("P_mc(u,e), {title}"), &mc)
    );
    print!("{tables}");
    let mut out = OutDir::create(&args.out)?;
    out.write_csv("dtp.csv", "dtp", &rows)?;
    out.write_text("tables.txt", &tables)?;
    out.write_manifest(command)?;
    if !bad.is_empty() {
        return Err(
            ValidationFailed(format!("table is not normalized: {}", bad.join("; "))).into(),
        );
    }
    Ok(())
}
