//! Command-line front end: JSON experiment configs in, CSV tables and JSON
//! summaries out.
//!
//! Four subcommands: `pressure` (spectral report for the closed system),
//! `escape` (escape-rate sweep over a hole family), `dimension` (Bowen-root
//! sweep over a hole family of an interval map), `oracle` (independent
//! survival-curve checks for one hole). Every summary JSON embeds the SHA-256
//! of the config, the crate version, and the numeric budgets in effect, so a
//! table can always be traced back to the run that produced it. Identical
//! config and seed give byte-identical outputs.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{
    ExperimentConfig, OutputFormat, ResolvedFamilies, RunEntry, System,
};
use crate::error::{Error, Result};
use crate::holes::{self, EscapeSweep};
use crate::oracle::{self, SurvivalCurve};
use crate::symbolic::Subshift;
use crate::{dimension, params, thermo};

/// Escape rates, pressure, and survivor-set dimension for open subshifts and
/// Markov interval maps.
#[derive(Debug, Parser)]
#[command(name = "escapes", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leading eigenvalue, pressure, and Gibbs-constant report.
    Pressure(CommonArgs),
    /// Escape-rate sweep over the configured hole family.
    Escape(CommonArgs),
    /// Dimension sweep (Bowen roots) over the configured hole family.
    Dimension(CommonArgs),
    /// Survival-curve oracles and the return-time check for one hole.
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Path to the experiment configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory override.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Depth override for transfer matrices and geometric-potential sampling.
    #[arg(long)]
    pub depth: Option<usize>,
    /// RNG seed override for Monte Carlo sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict output files to one format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Runs one parsed invocation. The caller maps errors to exit codes.
pub fn run(cli: Cli) -> Result<()> {
    init_threads();
    match cli.command {
        Command::Pressure(args) => cmd_pressure(&args),
        Command::Escape(args) => cmd_escape(&args),
        Command::Dimension(args) => cmd_dimension(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

/// ESCAPES_THREADS caps the rayon pool; results do not depend on it.
fn init_threads() {
    if let Some(n) = std::env::var("ESCAPES_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

struct Loaded {
    config: ExperimentConfig,
    raw: Vec<u8>,
    system: System,
    out_dir: Option<PathBuf>,
    formats: Vec<OutputFormat>,
    seed: u64,
    depth: Option<usize>,
}

impl Loaded {
    fn shift(&self) -> &Subshift {
        self.system.shift()
    }

    fn wants(&self, format: OutputFormat) -> bool {
        self.out_dir.is_some() && self.formats.contains(&format)
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        let dir = self.out_dir.as_ref().expect("checked by wants()");
        fs::write(dir.join(name), text)?;
        println!("wrote {}", dir.join(name).display());
        Ok(())
    }

    fn write_summary(&self, name: &str, mut body: serde_json::Value) -> Result<()> {
        if !self.wants(OutputFormat::Json) {
            return Ok(());
        }
        let envelope = envelope(&self.raw);
        for (k, v) in envelope.as_object().expect("envelope is an object") {
            body[k] = v.clone();
        }
        let mut text = serde_json::to_string_pretty(&body)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn write_csv(&self, name: &str, text: &str) -> Result<()> {
        if !self.wants(OutputFormat::Csv) {
            return Ok(());
        }
        self.write(name, text)
    }
}

fn load(args: &CommonArgs) -> Result<Loaded> {
    let raw = fs::read(&args.config)?;
    let config: ExperimentConfig = serde_json::from_slice(&raw)?;
    let system = config.resolve_system()?;
    let out_dir = args.out.clone().or_else(|| config.output.dir.clone());
    if let Some(dir) = &out_dir {
        fs::create_dir_all(dir)?;
    }
    let formats = match args.format {
        Some(FormatArg::Csv) => vec![OutputFormat::Csv],
        Some(FormatArg::Json) => vec![OutputFormat::Json],
        None => config.output.formats.clone(),
    };
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let depth = args.depth.or(config.depth);
    Ok(Loaded {
        config,
        raw,
        system,
        out_dir,
        formats,
        seed,
        depth,
    })
}

/// Provenance block shared by every summary JSON.
fn envelope(raw: &[u8]) -> serde_json::Value {
    let digest = Sha256::digest(raw);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "config_sha256": hex,
        "version": env!("CARGO_PKG_VERSION"),
        "params": {
            "state_cap": params::STATE_CAP,
            "enum_cap": params::ENUM_CAP,
            "power_tol": params::POWER_TOL,
            "power_max_iters": params::POWER_MAX_ITERS,
            "bisect_width": params::BISECT_WIDTH,
            "newton_max_steps": params::NEWTON_MAX_STEPS,
            "bowen_tol": params::BOWEN_TOL,
            "inverse_tol": params::INVERSE_TOL,
            "ball_word_cap": params::BALL_WORD_CAP,
            "ball_depth_cap": params::BALL_DEPTH_CAP,
            "deriv_samples": params::DERIV_SAMPLES,
            "mc_batch": params::MC_BATCH,
        },
    })
}

fn cmd_pressure(args: &CommonArgs) -> Result<()> {
    let loaded = load(args)?;
    let depth_floor = loaded.depth.unwrap_or(2);
    let rp = loaded.config.resolve_potential(&loaded.system, depth_floor)?;
    let depth = rp.phi.depth().max(depth_floor);
    let matrix = thermo::build_transfer_matrix(loaded.shift(), &rp.phi, depth)?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let gibbs_depth = loaded
        .config
        .run
        .iter()
        .find_map(|e| match e {
            RunEntry::Pressure { gibbs_depth } => *gibbs_depth,
            _ => None,
        })
        .unwrap_or(6);
    let check = thermo::gibbs_constant_check(loaded.shift(), &rp.phi, gibbs_depth)?;
    println!("lambda = {}", data.lambda);
    println!("pressure = {}", data.pressure);
    println!(
        "gibbs constant <= {} over depths 1..={gibbs_depth}",
        check.constant
    );
    println!("depth = {depth}");
    if let Some(t) = rp.t {
        println!("geometric potential with t = {t}");
    }
    loaded.write_summary(
        "pressure.json",
        json!({
            "pressure": {
                "lambda": data.lambda,
                "pressure": data.pressure,
                "depth": depth,
                "iterations": data.iterations,
                "residual": data.residual,
                "gibbs_constant": check.constant,
                "gibbs_per_depth": check.per_depth,
                "potential_t": rp.t,
                "oscillation": rp.oscillation,
            },
        }),
    )
}

fn escape_csv(sweep: &EscapeSweep) -> String {
    let mut out = String::from(
        "n,len_n,mu_hole,lambda_n,escape_rate,ratio,gap_ratio,predicted,deviation,mixing_flag\n",
    );
    for r in &sweep.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.len_n,
            r.mu_hole,
            r.lambda_n,
            r.escape_rate,
            r.ratio,
            r.gap_ratio,
            r.predicted,
            r.deviation,
            r.mixing_flag
        ));
    }
    out
}

fn sweep_range(entry: Option<[usize; 2]>, fams: &ResolvedFamilies) -> (usize, usize) {
    match entry {
        Some([lo, hi]) => (lo, hi),
        None => (1, fams.primary.n_max()),
    }
}

fn cmd_escape(args: &CommonArgs) -> Result<()> {
    let loaded = load(args)?;
    let rp = loaded
        .config
        .resolve_potential(&loaded.system, loaded.depth.unwrap_or(2))?;
    let fams = loaded.config.resolve_families(&loaded.system, &rp.phi)?;
    let entry = loaded.config.run.iter().find_map(|e| match e {
        RunEntry::Escape { n_range } => Some(*n_range),
        _ => None,
    });
    let (lo, hi) = sweep_range(entry.flatten(), &fams);
    let shift = loaded.shift();
    let inner = holes::escape_sweep(shift, &rp.phi, &fams.primary, lo..=hi)?;
    println!(
        "escape sweep n = {lo}..{hi}: final ratio {} vs predicted {} (deviation {})",
        inner.final_ratio, inner.predicted, inner.final_deviation
    );
    match &fams.outer {
        None => {
            loaded.write_csv("escape.csv", &escape_csv(&inner))?;
            loaded.write_summary("escape.json", json!({ "sweep": inner }))
        }
        Some(outer_family) => {
            let outer = holes::escape_sweep(shift, &rp.phi, outer_family, lo..=hi)?;
            // Sandwich bracket: the ball's own ratio lies between the
            // cylinder sweeps up to the achieved measure slack.
            let eta = fams.eta_achieved.unwrap_or(0.0);
            let low = inner.final_ratio.min(outer.final_ratio) * (1.0 - eta);
            let high = inner.final_ratio.max(outer.final_ratio) * (1.0 + eta);
            println!(
                "ball bracket: ratio in [{low}, {high}] at slack eta = {eta}"
            );
            loaded.write_csv("escape_inner.csv", &escape_csv(&inner))?;
            loaded.write_csv("escape_outer.csv", &escape_csv(&outer))?;
            loaded.write_summary(
                "escape.json",
                json!({
                    "inner": inner,
                    "outer": outer,
                    "bracket": {
                        "low": low,
                        "high": high,
                        "eta_requested": fams.eta,
                        "eta_achieved": eta,
                    },
                    "approximations": fams.approximations,
                }),
            )
        }
    }
}

fn dimension_csv(sweep: &dimension::DimensionSweep) -> String {
    let mut out = String::from(
        "n,mu_hole,s,s_n,ratio,predicted,deviation,lyapunov,oscillation_diagnostic\n",
    );
    for r in &sweep.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n, r.mu_hole, r.s, r.s_n, r.ratio, r.predicted, r.deviation, r.lyapunov, r.oscillation
        ));
    }
    out
}

fn cmd_dimension(args: &CommonArgs) -> Result<()> {
    let loaded = load(args)?;
    let map = loaded
        .system
        .map()
        .ok_or_else(|| Error::Config("dimension sweeps need an interval map system".into()))?
        .clone();
    // Without a hole section the command reports the closed repeller alone.
    if loaded.config.hole.is_none() {
        let root = dimension::bowen_root(&map, loaded.depth.unwrap_or(2), None)?;
        println!(
            "closed repeller dimension s = {} (residual {}, {} evaluations)",
            root.t, root.residual, root.evaluations
        );
        return loaded.write_summary("dimension.json", json!({ "closed": root }));
    }
    let rp = loaded
        .config
        .resolve_potential(&loaded.system, loaded.depth.unwrap_or(2))?;
    let fams = loaded.config.resolve_families(&loaded.system, &rp.phi)?;
    let entry = loaded.config.run.iter().find_map(|e| match e {
        RunEntry::Dimension { n_range } => Some(*n_range),
        _ => None,
    });
    let (lo, hi) = sweep_range(entry.flatten(), &fams);
    let inner = dimension::dimension_sweep(&map, &fams.primary, lo..=hi)?;
    println!(
        "dimension sweep n = {lo}..{hi}: s = {}, final ratio {} vs predicted {} (deviation {})",
        inner.s, inner.final_ratio, inner.predicted, inner.final_deviation
    );
    match &fams.outer {
        None => {
            loaded.write_csv("dimension.csv", &dimension_csv(&inner))?;
            loaded.write_summary("dimension.json", json!({ "sweep": inner }))
        }
        Some(outer_family) => {
            let outer = dimension::dimension_sweep(&map, outer_family, lo..=hi)?;
            loaded.write_csv("dimension_inner.csv", &dimension_csv(&inner))?;
            loaded.write_csv("dimension_outer.csv", &dimension_csv(&outer))?;
            loaded.write_summary(
                "dimension.json",
                json!({
                    "inner": inner,
                    "outer": outer,
                    "eta_requested": fams.eta,
                    "eta_achieved": fams.eta_achieved,
                }),
            )
        }
    }
}

fn survival_csv(curve: &SurvivalCurve) -> String {
    let mut out = String::new();
    match &curve.stderr {
        Some(errs) => {
            out.push_str("k,survival,stderr\n");
            for ((k, s), e) in curve.k_values.iter().zip(&curve.survival).zip(errs) {
                out.push_str(&format!("{k},{s},{e}\n"));
            }
        }
        None => {
            out.push_str("k,survival\n");
            for (k, s) in curve.k_values.iter().zip(&curve.survival) {
                out.push_str(&format!("{k},{s}\n"));
            }
        }
    }
    out
}

fn cmd_oracle(args: &CommonArgs) -> Result<()> {
    let loaded = load(args)?;
    let rp = loaded
        .config
        .resolve_potential(&loaded.system, loaded.depth.unwrap_or(1))?;
    let fams = loaded.config.resolve_families(&loaded.system, &rp.phi)?;
    let entry = loaded
        .config
        .run
        .iter()
        .find_map(|e| match e {
            RunEntry::Oracle {
                n,
                k_max,
                samples,
                tail_fraction,
            } => Some((*n, *k_max, *samples, *tail_fraction)),
            _ => None,
        })
        .unwrap_or((None, None, None, None));
    let n = entry.0.unwrap_or_else(|| fams.primary.n_max());
    let k_max = entry.1.unwrap_or(12);
    let samples = entry.2.unwrap_or(20_000);
    let tail_fraction = entry.3.unwrap_or(0.5);
    let hole = fams
        .primary
        .hole(n)
        .ok_or_else(|| {
            Error::Config(format!(
                "hole index {n} outside family of {} holes",
                fams.primary.n_max()
            ))
        })?
        .clone();
    let shift = loaded.shift();
    let depth = loaded.depth.unwrap_or(hole.len());
    let matrix_curve = oracle::matrix_survival(shift, &rp.phi, &hole, k_max, depth)?;
    // Enumeration is optional: deep holes with large k overflow the node
    // budget, and the run degrades to the sampled and spectral routes.
    let exhaustive = match oracle::exhaustive_survival(shift, &rp.phi, &hole, k_max) {
        Ok(curve) => Some(curve),
        Err(Error::EnumerationCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let mc = oracle::monte_carlo_survival(shift, &rp.phi, &hole, k_max, samples, loaded.seed)?;
    let fit = oracle::fit_escape_rate(exhaustive.as_ref().unwrap_or(&matrix_curve), tail_fraction)?;
    let mc_fit = oracle::fit_escape_rate(&mc, tail_fraction).ok();
    let kac = oracle::kac_check(shift, &rp.phi, &hole, k_max.max(1))?;
    let spectrum = holes::perturbed_eigenvalue(shift, &rp.phi, &hole, depth)?;
    let expected_rate = thermo::pressure(shift, &rp.phi)? - spectrum.lambda.ln();
    println!(
        "hole n = {n} ({} words of length {}), k up to {k_max}",
        hole.words().len(),
        hole.len()
    );
    println!(
        "fitted rate {} vs spectral rate {} ({})",
        fit.rate,
        expected_rate,
        if exhaustive.is_some() {
            "exhaustive tail"
        } else {
            "matrix tail, enumeration capped"
        }
    );
    println!(
        "return-time check: 1/mu = {} in [{}, {}] -> {}",
        kac.rhs,
        kac.head,
        kac.head + kac.tail_upper,
        if kac.within { "ok" } else { "gap" }
    );
    if let Some(curve) = &exhaustive {
        loaded.write_csv("survival_exhaustive.csv", &survival_csv(curve))?;
    }
    loaded.write_csv("survival_matrix.csv", &survival_csv(&matrix_curve))?;
    loaded.write_csv("survival_mc.csv", &survival_csv(&mc))?;
    loaded.write_summary(
        "oracle.json",
        json!({
            "oracle": {
                "n": n,
                "k_max": k_max,
                "hole_len": hole.len(),
                "hole_words": hole.words(),
                "enumeration_capped": exhaustive.is_none(),
                "fit": fit,
                "mc_fit": mc_fit,
                "expected_rate": expected_rate,
                "lambda_n": spectrum.lambda,
                "kac": kac,
                "seed": loaded.seed,
                "samples": samples,
                "curves": {
                    "exhaustive": exhaustive,
                    "matrix": matrix_curve,
                    "monte_carlo": mc,
                },
            },
        }),
    )
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::oracle::Method;

    #[test]
    fn survival_csv_includes_stderr_only_when_present() {
        let base = SurvivalCurve {
            k_values: vec![0, 1],
            survival: vec![1.0, 0.5],
            method: Method::Matrix,
            samples: None,
            seed: None,
            stderr: None,
            empty: false,
        };
        assert_eq!(survival_csv(&base), "k,survival\n0,1\n1,0.5\n");
        let mc = SurvivalCurve {
            stderr: Some(vec![0.0, 0.25]),
            method: Method::MonteCarlo,
            ..base
        };
        assert_eq!(
            survival_csv(&mc),
            "k,survival,stderr\n0,1,0\n1,0.5,0.25\n"
        );
    }

    #[test]
    fn envelope_embeds_hash_version_and_budgets() {
        let env = envelope(b"{}");
        assert_eq!(
            env["config_sha256"],
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
        assert_eq!(env["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(env["params"]["bowen_tol"], params::BOWEN_TOL);
        assert_eq!(env["params"]["mc_batch"], params::MC_BATCH);
    }

    #[test]
    fn cli_parses_the_documented_invocation() {
        let cli = Cli::try_parse_from([
            "escapes", "escape", "--config", "exp.json", "--out", "tables",
            "--depth", "6", "--seed", "9", "--format", "csv",
        ])
        .unwrap();
        match cli.command {
            Command::Escape(args) => {
                assert_eq!(args.config, PathBuf::from("exp.json"));
                assert_eq!(args.out.as_deref(), Some(Path::new("tables")));
                assert_eq!(args.depth, Some(6));
                assert_eq!(args.seed, Some(9));
                assert_eq!(args.format, Some(FormatArg::Csv));
            }
            other => panic!("parsed into {other:?}"),
        }
    }
}
