//! `parahoric`: file-driven front end. Every subcommand prints one JSON document whose `schema`
//! field names a versioned schema under `schemas/`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde_json::{json, Value};

use parahoric::evalmaps::{
    beta_independence_digits, hecke_classical, lift_noncritical, p_stabilize, padic_l, unit_root, LiftReport,
};
use parahoric::family::ordinary_chart;
use parahoric::galdist::{amice_velu_reconstruct, data_from_file, InterpolationFile};
use parahoric::padic::{PadicNumber, Slope, Zmod};
use parahoric::pardist::{slopes, twisted_up_cosets, up_matrix};
use parahoric::repr::Branching;
use parahoric::weights::{RefinementData, Weight, WeightFixture};

#[derive(Parser, Debug)]
#[command(name = "parahoric", version, about = "Parahoric overconvergent cohomology at desk scale")]
struct Cli {
    /// Absolute p-adic precision N.
    #[arg(long, global = true, env = "PARAHORIC_PRECISION", default_value_t = 20)]
    precision: u32,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct WeightArg {
    /// Weight fixture (schema `parahoric.weight.v1`).
    #[arg(long)]
    weight: PathBuf,
}

#[derive(Args, Debug)]
struct LevelArgs {
    /// Level of `Gamma_0(N)`.
    #[arg(long)]
    level: u64,
    #[arg(long)]
    p: u64,
    /// Truncation order.
    #[arg(long = "M", default_value_t = 10)]
    m: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical range for the weight and its contragredient, purity and regularity.
    Crit(WeightArg),
    /// Non-critical slope test for `U_p` eigenvalues, one `--alpha` per prime above p.
    SlopeCheck {
        #[command(flatten)]
        weight: WeightArg,
        /// Eigenvalue as an integer or `unit*p^val`.
        #[arg(long, required = true)]
        alpha: Vec<String>,
    },
    /// Branching dimension at `j` and the branching vector when `j` is critical.
    Branch {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
    },
    /// Newton polygon of the twisted `U_p` operator on the first `M` moments.
    UpSlopes {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long = "M")]
        m: u32,
    },
    /// Overconvergent lift of the first rational newform at weight two.
    Lift(LevelArgs),
    /// Moment table of the p-adic L-function with its admissibility report.
    Lp {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long, default_value_t = 2)]
        beta: u32,
    },
    /// Amice-Velu reconstruction from interpolation data.
    Reconstruct {
        /// Interpolation data (schema `parahoric.interpolation-data.v1`).
        #[arg(long)]
        data: PathBuf,
        /// Admissibility slope, e.g. `0` or `1/2`.
        #[arg(long)]
        h: String,
        /// Comma-separated critical integers.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        crit: String,
        /// Moments per component.
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
    },
    /// Local chart of the ordinary family through the first rational newform.
    FamilyChart {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        p: u64,
        /// Total T-degree of the truncated affinoid.
        #[arg(long = "D", default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value = "1/2")]
        h: String,
        #[arg(long = "M", default_value_t = 14)]
        m: u32,
    },
}

fn schema(cmd: &str) -> String {
    format!("parahoric.cli.{cmd}.v1")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("schema error in {}", path.display()))
}

fn load_weight(arg: &WeightArg) -> Result<(WeightFixture, Weight)> {
    let f: WeightFixture = read_json(&arg.weight)?;
    let w = Weight::from_fixture(&f).with_context(|| format!("schema error in {}", arg.weight.display()))?;
    Ok((f, w))
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let r = match s.split_once('/') {
        Some((a, b)) => Ratio::new(a.trim().parse()?, b.trim().parse()?),
        None => Ratio::from_integer(s.trim().parse()?),
    };
    Ok(r)
}

fn slope_string(s: &Slope) -> String {
    match s {
        Slope::Finite(r) => r.to_string(),
        Slope::Infinite => "inf".into(),
    }
}

fn check_config(p: u64, precision: u32, m: u32) -> Result<()> {
    if p == 2 || !parahoric::padic::is_prime(p) {
        bail!("p = {p} must be an odd prime");
    }
    if m == 0 || m > precision {
        bail!("need N >= M >= 1, got N = {precision}, M = {m}");
    }
    Ok(())
}

/// Lift of the `p`-stabilized first rational newform of `level`.
fn newform_lift(level: u64, p: u64, m: u32) -> Result<(i64, PadicNumber, LiftReport)> {
    let h = hecke_classical(level)?;
    let form = h.rational_newforms().into_iter().next().with_context(|| format!("no rational newform at level {level}"))?;
    let ap = *form.eigenvalues.get(&p).with_context(|| format!("a_{p} is not available at level {level}"))?;
    let alpha = unit_root(p, ap, m as i64 + 6)?;
    let stab = p_stabilize(&h.space.symbol(form.basis[0].clone()), p, &alpha)?;
    Ok((ap, alpha.clone(), lift_noncritical(&stab, &alpha, m, m as usize + 1)?))
}

fn run(cli: &Cli) -> Result<Value> {
    let n = cli.precision;
    Ok(match &cli.command {
        Command::Crit(arg) => {
            let (_, w) = load_weight(arg)?;
            let r = w.regularity_flags();
            json!({
                "schema": schema("crit"),
                "lambda": w.components(),
                "crit_lambda": w.crit_range()?,
                "crit_contragredient": w.contragredient().crit_range()?,
                "purity_weight": w.purity_weight(),
                "regular": r.regular,
                "h_regular": r.h_regular,
            })
        }
        Command::SlopeCheck { weight, alpha } => {
            let (f, w) = load_weight(weight)?;
            let alphas =
                alpha.iter().map(|s| PadicNumber::parse(s, f.p, n as i64)).collect::<Result<Vec<_>, _>>().context("parsing --alpha")?;
            let refinement = RefinementData::from_alphas(&w, alphas)?;
            let verdicts: Vec<Value> = w
                .non_q_critical_slope_check(&refinement)
                .iter()
                .map(|v| {
                    json!({
                        "prime": v.prime,
                        "e_times_slope": v.lhs.to_string(),
                        "bound": v.bound,
                        "non_critical": v.non_critical,
                        "alpha_circ": refinement.alpha_circ(&w, v.prime).map(|a| a.to_string()),
                    })
                })
                .collect();
            json!({ "schema": schema("slope-check"), "p": f.p, "verdicts": verdicts })
        }
        Command::Branch { weight, j } => {
            let (f, w) = load_weight(weight)?;
            if w.d() != 1 {
                bail!("branch supports d = 1 only");
            }
            let b = Branching::new(&w, Zmod::new(f.p, n)?)?;
            let dim = b.hom_dimension(*j)?;
            let (nu, report) = if w.crit_range()?.contains(j) {
                let bv = b.nu_vector(*j)?;
                let r = b.verify_nu(&bv, 20)?;
                let coords: Vec<String> = bv.nu.iter().map(|&x| PadicNumber::from_residue(&b.z, x).to_string()).collect();
                (Some(coords), Some(json!({ "equivariant": r.equivariant, "restriction": r.restriction, "tested": r.tested })))
            } else {
                (None, None)
            };
            json!({ "schema": schema("branch"), "p": f.p, "j": j, "hom_dimension": dim, "nu": nu, "nu_check": report })
        }
        Command::UpSlopes { weight, m } => {
            let (f, w) = load_weight(weight)?;
            check_config(f.p, n, *m)?;
            let l = w.sigma(0);
            if w.d() != 1 || l.len() != 2 {
                bail!("up-slopes supports n = 1, d = 1 only");
            }
            let u = up_matrix(f.p, [l[0], l[1]], &twisted_up_cosets(f.p), *m, n)?;
            let rep = slopes(&u, *m)?;
            let rows: Vec<Value> = rep
                .slopes
                .iter()
                .map(|(s, k, ok)| json!({ "slope": slope_string(s), "multiplicity": k, "trusted": ok }))
                .collect();
            let table: Vec<String> = rep
                .polygon
                .points
                .iter()
                .map(|(i, v)| format!("{i:>3} | {}", v.map_or("*".into(), |v| format!("{v:>3} {}", "#".repeat(v.max(0) as usize)))))
                .collect();
            json!({ "schema": schema("up-slopes"), "p": f.p, "M": m, "slopes": rows, "table": table })
        }
        Command::Lift(a) => {
            check_config(a.p, n, a.m)?;
            let (ap, alpha, rep) = newform_lift(a.level, a.p, a.m)?;
            json!({
                "schema": schema("lift"),
                "level": a.level, "p": a.p, "M": a.m,
                "a_p": ap,
                "alpha": alpha.to_string(),
                "defects": rep.defects,
                "eigen_digits": rep.eigen_digits,
                "specialization_digits": rep.specialization_digits,
            })
        }
        Command::Lp { level: a, beta } => {
            check_config(a.p, n, a.m)?;
            let (_, alpha, rep) = newform_lift(a.level, a.p, a.m)?;
            let mu = padic_l(&rep.symbol, &alpha, *beta)?;
            let adm = mu.is_h_admissible(Ratio::from_integer(0), *beta)?;
            json!({
                "schema": schema("lp"),
                "level": a.level, "p": a.p, "M": a.m, "beta": beta,
                "alpha": alpha.to_string(),
                "distribution": mu.to_table(),
                "admissibility": {
                    "h": "0",
                    "admissible": adm.admissible,
                    "witness_val": adm.witness_val.map(|v| v.to_string()),
                    "witness_at_most_one": adm.witness_at_most_one(),
                },
                "beta_independence_digits": beta_independence_digits(&rep.symbol, &alpha, *beta)?,
            })
        }
        Command::Reconstruct { data, h, crit, m } => {
            let file: InterpolationFile = read_json(data)?;
            let items = data_from_file(&file).with_context(|| format!("schema error in {}", data.display()))?;
            let crit: Vec<i64> = crit.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().context("parsing --crit")?;
            let level = items.iter().map(|d| d.beta).max().context("no interpolation data")?;
            let h = parse_ratio(h)?;
            let rec = amice_velu_reconstruct(file.p, &items, h, &crit, level, *m)?;
            json!({
                "schema": schema("reconstruct"),
                "distribution": rec.distribution.to_table(),
                "certificate": {
                    "h": rec.certificate.h.to_string(),
                    "crit_size": rec.certificate.crit_size,
                    "digits": rec.certificate.digits,
                },
            })
        }
        Command::FamilyChart { level, p, degree, h, m } => {
            check_config(*p, n, *m)?;
            let (rep, chart) = ordinary_chart(*level, *p, *m, *degree, parse_ratio(h)?)?;
            let mut out = serde_json::to_value(chart.report())?;
            out["eigen_digits"] = json!(rep.eigen_digits);
            out["relation_digits"] = json!(rep.relation_digits);
            out["family_rank"] = json!(rep.basis.len());
            out
        }
    })
}

fn main() {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|v| {
        let text = serde_json::to_string_pretty(&v)? + "\n";
        match &cli.output {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
