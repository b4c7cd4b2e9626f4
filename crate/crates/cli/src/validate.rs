use std::path::PathBuf;

use anyhow::{bail, Result};
use bchdtp::channel::{joint_ue_distribution, quantize, sigma_from_ebn0, DEFAULT_ETA};
use bchdtp::code::{CodeError, CodeSpec, WeightEnumerator};
use bchdtp::dtp::{
    bdd_dtp, classify_region, eaed_a_dtp, eaed_dtp, region_l_counts, region_l_dtp, region_m_dtp,
    AnchorWeights, DtpCell, EaedDtp, EaedParams, Region,
};
use bchdtp::metrics::ber_fer_from_dtp;
use bchdtp::sim::{
    brute_force_cell, brute_force_dtp, simulate_frames, BchCode, DecoderKind, SimConfig,
};
use clap::Args;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::args::{parse_count, parse_pair, resolve_enumerator};
use crate::output::{check_schema, OutDir};
use crate::{Command, ValidationFailed};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// Codes to check, as n,k,d_des (repeatable)
    #[arg(long = "code", default_values_t = ["7,4,3".to_string(), "15,7,5".to_string()])]
    pub codes: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub umax: usize,
    #[arg(long, default_value_t = 4)]
    pub emax: usize,
    /// Compare a single (u, e) cell against the oracle
    #[arg(long)]
    pub cell: Option<String>,
    /// Enumerator file to check and use; replaces the code list with its code
    #[arg(long)]
    pub enumerator: Option<PathBuf>,
    /// Check the schema version of a CSV written by this tool
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Eb/N0 of the Monte-Carlo agreement check
    #[arg(long, default_value_t = 7.0)]
    pub ebn0: f64,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub frames: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Skip the Monte-Carlo check
    #[arg(long)]
    pub no_mc: bool,
    #[arg(long, default_value = "out/validate")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    code: String,
    passed: bool,
    checked: usize,
    failures: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    passed: bool,
    checks: Vec<Check>,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: &str, spec: Option<&CodeSpec>, checked: usize, failures: Vec<String>) {
        let code = spec.map_or_else(String::new, |s| s.to_string());
        let passed = failures.is_empty();
        let label = if code.is_empty() {
            name.to_string()
        } else {
            format!("{name} {code}")
        };
        println!(
            "{} {label} ({checked} checked)",
            if passed { "PASS" } else { "FAIL" }
        );
        for f in &failures {
            println!("    {f}");
        }
        self.checks.push(Check {
            name: name.into(),
            code,
            passed,
            checked,
            failures,
        });
    }
}

fn brief(c: &DtpCell<f64>) -> String {
    c.entries()
        .iter()
        .map(|(o, r, p)| format!("{o} r={r}: {p:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cells(args: &ValidateArgs) -> Result<Vec<(usize, usize)>> {
    Ok(match &args.cell {
        Some(c) => vec![parse_pair(c, "--cell")?],
        None => (0..=args.umax)
            .flat_map(|u| (0..=args.emax).map(move |e| (u, e)))
            .collect(),
    })
}

fn region_l(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    code: &BchCode,
    grid: &[(usize, usize)],
    s: &mut Suite,
) -> Result<()> {
    let (mut checked, mut bad, mut sym_bad, mut sym_checked) = (0, Vec::new(), Vec::new(), 0);
    for &(u, e) in grid {
        if u + e > spec.n {
            continue;
        }
        let oracle = brute_force_cell::<BigRational>(code, u, e, None)?;
        for e1 in 0..=e {
            sym_checked += 1;
            if oracle.by_e1[e1] != oracle.by_e1[e - e1] {
                sym_bad.push(format!(
                    "oracle (u={u}, e={e}) e1={e1} differs from its mirror"
                ));
            }
            if e > 0
                && region_m_dtp::<BigRational>(spec, a, u, e, e1)?
                    != region_m_dtp(spec, a, u, e, e - e1)?
            {
                sym_bad.push(format!(
                    "region M (u={u}, e={e}) e1={e1} differs from its mirror"
                ));
            }
            let mirror = match classify_region(u, e, e1, spec.t) {
                Region::L => e1,
                Region::R => e - e1,
                Region::M => continue,
            };
            checked += 1;
            let closed = region_l_dtp(
                &region_l_counts::<BigRational>(spec, a, u, e, mirror)?,
                u,
                e,
            );
            if closed.entries() != oracle.by_e1[e1].entries() {
                let (c, o) = (brief(&closed.to_f64()), brief(&oracle.by_e1[e1].to_f64()));
                bad.push(format!("(u={u}, e={e}, e1={e1}) closed [{c}] oracle [{o}]"));
            }
        }
        if grid.len() == 1 {
            let closed: EaedDtp<f64> = eaed_dtp(spec, a, &EaedParams::new(u, e))?;
            let c = closed.cell(u, e).expect("cell in range");
            println!("cell (u={u}, e={e}) of {spec}");
            println!("  {:<12} {:>12} {:>12}", "outcome", "closed", "oracle");
            let o = oracle.total.to_f64();
            let mut keys: Vec<(String, String)> = c
                .entries()
                .into_iter()
                .chain(o.entries())
                .map(|(k, r, _)| (k.to_string(), r.to_string()))
                .collect();
            keys.sort();
            keys.dedup();
            let find = |x: &DtpCell<f64>, k: &(String, String)| -> f64 {
                x.entries()
                    .into_iter()
                    .filter(|(kk, r, _)| kk.to_string() == k.0 && r.to_string() == k.1)
                    .map(|t| t.2)
                    .sum()
            };
            for k in &keys {
                println!(
                    "  {:<12} {:>12.6} {:>12.6}",
                    format!("{} r={}", k.0, k.1),
                    find(c, k),
                    find(&o, k)
                );
            }
        }
    }
    s.push("region-l-exact", Some(spec), checked, bad);
    s.push("e1-symmetry", Some(spec), sym_checked, sym_bad);
    Ok(())
}

fn structure(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u_max: usize,
    e_max: usize,
    s: &mut Suite,
) -> Result<()> {
    let e_max = e_max.min(spec.n.saturating_sub(u_max));
    let p = EaedParams::new(u_max, e_max);
    let x: EaedDtp<f64> = eaed_dtp(spec, a, &p)?;
    let xa: EaedDtp<f64> = eaed_a_dtp(spec, a, &AnchorWeights::none(), &p)?;
    let b = bdd_dtp::<f64>(spec, a, u_max)?;
    let (mut norm, mut reduce, mut free) = (Vec::new(), Vec::new(), Vec::new());
    let mut checked = 0;
    for u in 0..=u_max {
        if x.cell(u, 0) != b.cell(u) {
            reduce.push(format!("u={u}: e=0 cell differs from BDD"));
        }
        let bt = b.cell(u).expect("bdd cell").total();
        if (bt - 1.0).abs() > 1e-9 {
            norm.push(format!("BDD u={u} sums to {bt}"));
        }
        for e in 0..=e_max {
            checked += 1;
            let c = x.cell(u, e).expect("cell in range");
            if (c.total() - 1.0).abs() > 1e-9 {
                norm.push(format!("(u={u}, e={e}) sums to {}", c.total()));
            }
            let ca = xa.cell(u, e).expect("cell in range");
            let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * p.abs().max(q.abs()).max(1e-300);
            let same = close(c.succ, ca.succ)
                && close(c.fail, ca.fail)
                && c.mc.len() == ca.mc.len()
                && c.mc
                    .iter()
                    .zip(&ca.mc)
                    .all(|((r, p), (q, v))| r == q && close(*p, *v));
            if !same {
                free.push(format!(
                    "(u={u}, e={e}) anchor-free EaED^a differs from EaED"
                ));
            }
        }
    }
    s.push("normalization", Some(spec), checked, norm);
    s.push("e0-reduces-to-bdd", Some(spec), u_max + 1, reduce);
    s.push("anchor-free-equality", Some(spec), checked, free);
    Ok(())
}

/// Simulated BER against the exhaustive table averaged over the channel.
fn monte_carlo(spec: &CodeSpec, code: &BchCode, args: &ValidateArgs, s: &mut Suite) -> Result<()> {
    let oracle = brute_force_dtp(code, args.umax, args.emax, None)?
        .dtp
        .to_f64();
    let sigma = sigma_from_ebn0(args.ebn0, spec.rate());
    let mut bad = Vec::new();
    for (i, (dec, t)) in [(DecoderKind::Bdd, 0.0), (DecoderKind::Eaed, 0.16)]
        .into_iter()
        .enumerate()
    {
        let joint = joint_ue_distribution(spec.n, &quantize(sigma, t)?, DEFAULT_ETA);
        let analytic = ber_fer_from_dtp(&oracle, &joint, spec.n, None, f64::INFINITY)?;
        let cfg = SimConfig::new(*spec, dec, args.ebn0, args.frames, args.seed + i as u64)
            .thresholds(t, None);
        let r = simulate_frames(&cfg)?;
        // a cell outside the table leaves at most u + e + t residual errors
        let missing: f64 = joint
            .cells
            .iter()
            .filter(|c| c.u > args.umax || c.e > args.emax)
            .map(|c| c.p * ((c.u + c.e + spec.t).min(spec.n) as f64 / spec.n as f64))
            .sum();
        let tol = 4.0 * r.ber_se + missing + joint.dropped_mass;
        println!(
            "    {dec} at {} dB: table {:.4e} simulated {:.4e} (tolerance {:.1e})",
            args.ebn0, analytic.ber, r.ber, tol
        );
        if (r.ber - analytic.ber).abs() > tol {
            bad.push(format!(
                "{dec}: table {:.4e} simulated {:.4e}",
                analytic.ber, r.ber
            ));
        }
    }
    s.push("monte-carlo-agreement", Some(spec), 2, bad);
    Ok(())
}

/// Loads the enumerator file; content problems become check failures, syntax errors stay errors.
fn load_checked(
    path: &std::path::Path,
    s: &mut Suite,
) -> Result<Option<(CodeSpec, WeightEnumerator)>> {
    let a = match WeightEnumerator::load(path) {
        Ok(a) => a,
        Err(e @ CodeError::Invariant(_)) => {
            s.push("enumerator-invariants", None, 1, vec![e.to_string()]);
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    let spec = CodeSpec::new(a.n(), a.k(), a.d_des())?;
    let mut bad = Vec::new();
    if let Err(e) = a.check_matches(&spec) {
        bad.push(e.to_string());
    }
    if spec.k <= bchdtp::code::ENUMERATION_CAP {
        let exact = WeightEnumerator::exact_for(&spec)?;
        for w in 0..=spec.n as i64 {
            if a.a(w) != exact.a(w) {
                bad.push(format!(
                    "A_{w} = {} but enumeration gives {}",
                    a.a(w),
                    exact.a(w)
                ));
            }
        }
    }
    s.push(
        "enumerator-matches-enumeration",
        Some(&spec),
        spec.n + 1,
        bad,
    );
    Ok(Some((spec, a)))
}

pub fn run(args: &ValidateArgs, command: &Command) -> Result<()> {
    let mut s = Suite { checks: Vec::new() };
    if let Some(path) = &args.csv {
        match check_schema(path) {
            Ok(kind) => s.push(&format!("csv-schema {kind}"), None, 1, vec![]),
            Err(e) => s.push("csv-schema", None, 1, vec![format!("{e:#}")]),
        }
    }
    let grid = cells(args)?;
    let codes: Vec<(CodeSpec, WeightEnumerator)> = match &args.enumerator {
        Some(path) => load_checked(path, &mut s)?.into_iter().collect(),
        None => args
            .codes
            .iter()
            .map(|c| -> Result<_> {
                let spec: CodeSpec = c.parse()?;
                let a = resolve_enumerator(&spec, "exact")?;
                Ok((spec, a))
            })
            .collect::<Result<_>>()?,
    };
    for (spec, a) in &codes {
        if spec.n > 64 {
            bail!("the oracle suite needs n <= 64; {spec} is too long");
        }
        let code = BchCode::new(*spec)?.with_table()?;
        region_l(spec, a, &code, &grid, &mut s)?;
        if args.cell.is_none() {
            structure(spec, a, args.umax, args.emax, &mut s)?;
            if !args.no_mc {
                monte_carlo(spec, &code, args, &mut s)?;
            }
        }
    }
    let report = Report {
        passed: s.checks.iter().all(|c| c.passed),
        checks: s.checks,
    };
    let mut out = OutDir::create(&args.out)?;
    out.write_text(
        "report.json",
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;
    out.write_manifest(command)?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(ValidationFailed(failed.join(", ")).into());
    }
    println!("all {} checks passed", report.checks.len());
    Ok(())
}
