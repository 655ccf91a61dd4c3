//! Command-line front end: argument parsing, command dispatch, and the
//! exit-code contract.
//!
//! ```text
//! ptower <command> <config-file> [--level i] [--max-level n]
//!        [--format text|json|csv] [--seed k]
//! ```
//!
//! Commands map one-to-one onto library entry points: `check-stable`
//! (Frobenius stability of the ideal), `build` (stage presentations),
//! `verify` (the tower axiom battery), `tilt` (mod-p stage presentations
//! and perfectness checks), `torsion` (symbolic/numeric p-torsion),
//! `limcm` (the Koszul length diagnostic; `--format csv` exports the
//! table), `fsplit` (a degreewise Frobenius retraction), and
//! `delta-check` (delta-structure consistency on the quotient).
//!
//! Exit codes: 0 when every check passed or reached a definite answer,
//! 1 when a check failed with a witness, 2 when a window was too small to
//! decide, 3 for usage and config errors, 4 for internal errors. Reports
//! are deterministic: the same document and seed give byte-identical
//! output.

use crate::config::{parse_config, JobConfig};
use crate::deltaring::{
    admits_delta_on_quotient, check_delta_axioms, check_phi_splits, AxiomVerdict,
    DeltaAdmissibility, SplittingVerdict,
};
use crate::error::{Error, Result};
use crate::fracpoly::FracPoly;
use crate::idealkit::{is_phi_stable, p_torsion, PhiStability};
use crate::limcm::{limcm_diagnostic, LimCMTable, LimCMVerdict};
use crate::report::{CheckStatus, Report};
use crate::tower::{build_layer, check_perfect_tower, small_tilt, verify_axioms, AxiomStatus};

pub const USAGE: &str = "\
usage: ptower <command> <config-file> [--level i] [--max-level n]
              [--format text|json|csv] [--seed k]

commands:
  check-stable   is the ideal carried into itself by Frobenius?
  build          print the stage presentations
  verify         run the tower axiom battery
  tilt           print the tilted stages and check perfectness
  torsion        compute the p-torsion of each stage
  limcm          Koszul homology lengths against minimal generator counts
  fsplit         search for a degreewise Frobenius retraction
  delta-check    can the quotient carry a delta-structure?

flags:
  --level i      restrict build/tilt/torsion to one stage
  --max-level n  highest stage for limcm (default: levels)
  --format f     text (default), json, or csv (limcm only)
  --seed k       override the config seed";

/// Parsed command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliArgs {
    pub command: String,
    pub config_path: String,
    pub level: Option<u32>,
    pub max_level: Option<u32>,
    pub format: OutputFormat,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

const COMMANDS: [&str; 8] = [
    "check-stable",
    "build",
    "verify",
    "tilt",
    "torsion",
    "limcm",
    "fsplit",
    "delta-check",
];

/// Parses the argument vector (program name excluded).
pub fn parse_args(args: &[String]) -> std::result::Result<CliArgs, String> {
    let mut it = args.iter();
    let command = it.next().ok_or("missing command")?.clone();
    if !COMMANDS.contains(&command.as_str()) {
        return Err(format!("unknown command `{command}`"));
    }
    let config_path = it.next().ok_or("missing config file")?.clone();
    if config_path.starts_with("--") {
        return Err(format!("expected a config file, got flag `{config_path}`"));
    }
    let mut parsed = CliArgs {
        command,
        config_path,
        level: None,
        max_level: None,
        format: OutputFormat::Text,
        seed: None,
    };
    let mut format_seen = false;
    while let Some(flag) = it.next() {
        match flag.as_str() {
            "--level" => {
                if parsed.level.is_some() {
                    return Err("flag `--level` given twice".into());
                }
                parsed.level = Some(parse_num(flag_value(&mut it, flag)?, flag)?);
            }
            "--max-level" => {
                if parsed.max_level.is_some() {
                    return Err("flag `--max-level` given twice".into());
                }
                parsed.max_level = Some(parse_num(flag_value(&mut it, flag)?, flag)?);
            }
            "--seed" => {
                if parsed.seed.is_some() {
                    return Err("flag `--seed` given twice".into());
                }
                parsed.seed = Some(parse_num(flag_value(&mut it, flag)?, flag)?);
            }
            "--format" => {
                if format_seen {
                    return Err("flag `--format` given twice".into());
                }
                format_seen = true;
                parsed.format = match flag_value(&mut it, flag)?.as_str() {
                    "text" => OutputFormat::Text,
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => return Err(format!("unknown format `{other}`")),
                };
            }
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    if parsed.level.is_some() && !matches!(parsed.command.as_str(), "build" | "tilt" | "torsion") {
        return Err(format!(
            "flag `--level` does not apply to `{}`",
            parsed.command
        ));
    }
    if parsed.max_level.is_some() && parsed.command != "limcm" {
        return Err(format!(
            "flag `--max-level` does not apply to `{}`",
            parsed.command
        ));
    }
    if parsed.format == OutputFormat::Csv && parsed.command != "limcm" {
        return Err("csv output is only available for limcm".into());
    }
    Ok(parsed)
}

fn flag_value<'a>(
    it: &mut std::slice::Iter<'a, String>,
    flag: &str,
) -> std::result::Result<&'a String, String> {
    it.next()
        .ok_or_else(|| format!("flag `{flag}` needs a value"))
}

fn parse_num<T: std::str::FromStr>(s: &str, flag: &str) -> std::result::Result<T, String> {
    s.parse()
        .map_err(|_| format!("flag `{flag}` needs an unsigned integer, got `{s}`"))
}

/// Full pipeline: parse arguments, load the document, run, print, and
/// return the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.is_empty() {
        eprintln!("{USAGE}");
        return 3;
    }
    if matches!(args[0].as_str(), "--help" | "-h" | "help") {
        println!("{USAGE}");
        return 0;
    }
    let cli = match parse_args(args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("ptower: {msg}");
            eprintln!("{USAGE}");
            return 3;
        }
    };
    let text = match std::fs::read_to_string(&cli.config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ptower: cannot read `{}`: {e}", cli.config_path);
            return 3;
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ptower: {e}");
            return 3;
        }
    };
    // The override becomes part of the config so the report echoes the
    // seed that was actually used.
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let report = match run_command(&config, &cli.command, cli.level, cli.max_level) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("ptower: {e}");
            return match e {
                Error::Parse { .. }
                | Error::Validation(_)
                | Error::ModeMismatch(_)
                | Error::NotMonomial(_)
                | Error::NotSquarefree(_)
                | Error::Incompatible(_) => 3,
                _ => 4,
            };
        }
    };
    match cli.format {
        OutputFormat::Text => println!("{}", report.render_text()),
        OutputFormat::Json => println!("{}", report.render_json()),
        OutputFormat::Csv => print!("{}", report.csv.as_deref().unwrap_or("")),
    }
    report.exit_code()
}

/// Runs one command against a parsed config and assembles its report.
pub fn run_command(
    config: &JobConfig,
    command: &str,
    level: Option<u32>,
    max_level: Option<u32>,
) -> Result<Report> {
    match command {
        "check-stable" => cmd_check_stable(config),
        "build" => cmd_build(config, level),
        "verify" => cmd_verify(config),
        "tilt" => cmd_tilt(config, level),
        "torsion" => cmd_torsion(config, level),
        "limcm" => cmd_limcm(config, max_level),
        "fsplit" => cmd_fsplit(config),
        "delta-check" => cmd_delta_check(config),
        other => Err(Error::Validation(format!("unknown command `{other}`"))),
    }
}

fn win(d: u32) -> String {
    format!("degree <= {d}")
}

/// Folds a library error into the report when it is itself an answer:
/// window limitations leave the question open, failed hypotheses and
/// mismatches are findings. Structural errors (mode, shape, validation)
/// bubble up as usage problems.
fn absorb(report: &mut Report, check: &str, e: Error) -> Result<()> {
    match &e {
        Error::WindowTooSmall(_)
        | Error::WindowTooLarge(_)
        | Error::PrecisionExhausted { .. }
        | Error::NotFinite { .. } => {
            report.push(check, CheckStatus::Unknown, "-", e.to_string());
            Ok(())
        }
        Error::HypothesisFailed(_) | Error::DimensionMismatch(_) | Error::TorsionMismatch(_) => {
            report.push(check, CheckStatus::Fail, "-", e.to_string());
            Ok(())
        }
        _ => Err(e),
    }
}

fn stage_list(level: Option<u32>, levels: u32) -> Vec<u32> {
    match level {
        Some(i) => vec![i],
        None => (0..=levels).collect(),
    }
}

fn name_refs(config: &JobConfig) -> Vec<&str> {
    config.variables.iter().map(|s| s.as_str()).collect()
}

fn push_axiom_status(report: &mut Report, check: String, status: &AxiomStatus) {
    match status {
        AxiomStatus::VerifiedUpTo(d) => report.push(check, CheckStatus::Pass, win(*d), "-"),
        AxiomStatus::Structural => report.push(check, CheckStatus::Pass, "-", "structural"),
        AxiomStatus::Assumed => report.push(check, CheckStatus::Pass, "-", "assumed"),
        AxiomStatus::Failed(msg) => report.push(check, CheckStatus::Fail, "-", msg.clone()),
    }
}

fn cmd_check_stable(config: &JobConfig) -> Result<Report> {
    let mut report = Report::new("check-stable", config);
    let names = name_refs(config);
    let check = "phi-stability of the ideal";
    let ideal = config.ideal_presentation()?;
    match is_phi_stable(&ideal, config.cap) {
        Ok(PhiStability::Stable) => report.push(
            check,
            CheckStatus::Pass,
            win(config.cap),
            "phi maps every generator into the ideal",
        ),
        Ok(PhiStability::NotStable { witness, residual }) => report.push(
            check,
            CheckStatus::Fail,
            win(config.cap),
            format!(
                "phi-image {} reduces to {} outside the ideal",
                witness.render(&names),
                residual.render(&names)
            ),
        ),
        Ok(PhiStability::UnknownBeyond(d)) => report.push(
            check,
            CheckStatus::Unknown,
            win(d),
            "stability is undecided beyond this window",
        ),
        Err(e) => absorb(&mut report, check, e)?,
    }
    Ok(report)
}

fn cmd_build(config: &JobConfig, level: Option<u32>) -> Result<Report> {
    let mut report = Report::new("build", config);
    let tower = match config.tower() {
        Ok(t) => t,
        Err(e) => {
            absorb(&mut report, "tower hypotheses", e)?;
            return Ok(report);
        }
    };
    for i in stage_list(level, config.levels) {
        match build_layer(&tower, i) {
            Ok(layer) => report.push(
                format!("stage {i}"),
                CheckStatus::Pass,
                win(config.cap),
                layer.render(),
            ),
            Err(e) => absorb(&mut report, &format!("stage {i}"), e)?,
        }
    }
    Ok(report)
}

fn cmd_verify(config: &JobConfig) -> Result<Report> {
    let mut report = Report::new("verify", config);
    let tower = match config.tower() {
        Ok(t) => t,
        Err(e) => {
            absorb(&mut report, "tower hypotheses", e)?;
            return Ok(report);
        }
    };
    match verify_axioms(&tower) {
        Ok(stages) => {
            for stage in &stages {
                for (axiom, status) in stage.entries() {
                    let check = format!("axiom {} at level {}", axiom.label(), stage.level());
                    push_axiom_status(&mut report, check, status);
                }
            }
        }
        Err(e) => absorb(&mut report, "axiom battery", e)?,
    }
    Ok(report)
}

fn cmd_tilt(config: &JobConfig, level: Option<u32>) -> Result<Report> {
    let mut report = Report::new("tilt", config);
    let tower = config.tower()?;
    for i in stage_list(level, config.levels) {
        match small_tilt(&tower, i) {
            Ok(tilt) => report.push(
                format!("tilt stage {i}"),
                CheckStatus::Pass,
                win(config.cap),
                tilt.render(),
            ),
            Err(e) => absorb(&mut report, &format!("tilt stage {i}"), e)?,
        }
    }
    if level.is_none() {
        match check_perfect_tower(&tower) {
            Ok(pairs) => {
                for pair in &pairs {
                    push_axiom_status(
                        &mut report,
                        format!("tilt frobenius onto stage {}", pair.level),
                        &pair.frobenius_bijective,
                    );
                    push_axiom_status(
                        &mut report,
                        format!("tilt projection mod t at stage {}", pair.level),
                        &pair.projection_surjective,
                    );
                    push_axiom_status(
                        &mut report,
                        format!("tilt projection kernel at stage {}", pair.level),
                        &pair.projection_kernel,
                    );
                }
            }
            Err(e) => absorb(&mut report, "perfect tower checks", e)?,
        }
    }
    Ok(report)
}

fn cmd_torsion(config: &JobConfig, level: Option<u32>) -> Result<Report> {
    let mut report = Report::new("torsion", config);
    let names = name_refs(config);
    let ideal = config.ideal_presentation()?;
    for i in stage_list(level, config.levels) {
        let check = format!("p-torsion at stage {i}");
        match p_torsion(&ideal, i, config.cap) {
            Ok(torsion) => report.push(
                check,
                CheckStatus::Pass,
                win(torsion.cap),
                format!(
                    "torsion ideal {} with {} numeric generator(s)",
                    torsion.symbolic.render(&names),
                    torsion.numeric_count
                ),
            ),
            Err(e) => absorb(&mut report, &check, e)?,
        }
    }
    Ok(report)
}

fn cmd_limcm(config: &JobConfig, max_level: Option<u32>) -> Result<Report> {
    let mut report = Report::new("limcm", config);
    let n_max = max_level.unwrap_or(config.levels);
    if n_max > config.levels {
        return Err(Error::Validation(format!(
            "--max-level {n_max} exceeds the configured levels {}",
            config.levels
        )));
    }
    let tower = match config.tower() {
        Ok(t) => t,
        Err(e) => {
            absorb(&mut report, "tower hypotheses", e)?;
            return Ok(report);
        }
    };
    let sop = config.sop_polys()?;
    match limcm_diagnostic(&tower, n_max, config.seed, sop.as_deref()) {
        Ok(table) => push_limcm_table(&mut report, &table),
        // A failed parameter-system draw (or a degenerate user system)
        // leaves the diagnostic undecided rather than unusable.
        Err(Error::Validation(msg)) => {
            report.push("parameter system", CheckStatus::Unknown, "-", msg)
        }
        Err(e) => absorb(&mut report, "koszul diagnostic", e)?,
    }
    Ok(report)
}

fn push_limcm_table(report: &mut Report, table: &LimCMTable) {
    report.push(
        "fiber dimension",
        CheckStatus::Pass,
        "-",
        table.dim.to_string(),
    );
    report.push(
        "parameter system",
        CheckStatus::Pass,
        "-",
        format!("({})", table.sop.join(", ")),
    );
    for (ri, row) in table.rows.iter().enumerate() {
        let lengths: Vec<String> = row
            .lengths
            .iter()
            .map(|(l, trusted)| {
                if *trusted {
                    l.to_string()
                } else {
                    format!("{l}~")
                }
            })
            .collect();
        let ratios: Vec<String> = (1..row.lengths.len())
            .map(|i| match table.ratio(ri, i) {
                Some((a, 1)) => a.to_string(),
                Some((a, b)) => format!("{a}/{b}"),
                None => "?".to_string(),
            })
            .collect();
        let chi = row
            .euler
            .map(|e| e.to_string())
            .unwrap_or_else(|| "?".to_string());
        report.push(
            format!("koszul data at stage {}", row.level),
            CheckStatus::Pass,
            format!("numerator degree <= {}", row.trusted_to),
            format!(
                "nu = {}, l = [{}], ratios = [{}], chi = {}",
                row.nu,
                lengths.join(", "),
                ratios.join(", "),
                chi
            ),
        );
    }
    if let Some(holds) = table.euler_scaling {
        report.push(
            "euler scaling chi_n = p^(n*dim) * chi_0",
            if holds {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            "-",
            if holds {
                "holds on the computed stages"
            } else {
                "violated on the computed stages"
            },
        );
    }
    for note in &table.notes {
        report.push("note", CheckStatus::Pass, "-", note);
    }
    let status = match table.verdict {
        LimCMVerdict::Inconsistent => CheckStatus::Fail,
        _ => CheckStatus::Pass,
    };
    report.push("limcm verdict", status, "-", table.verdict.render());
    report.csv = Some(table.to_csv());
}

fn cmd_fsplit(config: &JobConfig) -> Result<Report> {
    let mut report = Report::new("fsplit", config);
    let ring = config.ring()?;
    match check_phi_splits(&ring) {
        Ok(splitting) => {
            for warning in &splitting.warnings {
                report.push("advisory", CheckStatus::Pass, "-", warning);
            }
            match splitting.verdict {
                SplittingVerdict::SplitsUpTo { degree, retraction } => report.push(
                    "frobenius splitting",
                    CheckStatus::Pass,
                    win(degree),
                    format!(
                        "retraction table on {} monomials",
                        retraction.entries().count()
                    ),
                ),
                SplittingVerdict::NoSplittingUpTo(d) => report.push(
                    "frobenius splitting",
                    CheckStatus::Fail,
                    win(d),
                    "no retraction exists on this window",
                ),
            }
        }
        Err(e) => absorb(&mut report, "frobenius splitting", e)?,
    }
    Ok(report)
}

fn cmd_delta_check(config: &JobConfig) -> Result<Report> {
    let mut report = Report::new("delta-check", config);
    let names = name_refs(config);
    let ring = config.ring()?;
    let (f, g) = sample_pair(config)?;
    match check_delta_axioms(&f, &g) {
        Ok(AxiomVerdict::Holds) => report.push(
            "delta axioms on sample elements",
            CheckStatus::Pass,
            win(config.cap),
            format!(
                "hold for f = {}, g = {}",
                f.render(&names),
                g.render(&names)
            ),
        ),
        Ok(AxiomVerdict::Violated { identity, residual }) => report.push(
            "delta axioms on sample elements",
            CheckStatus::Fail,
            "-",
            format!(
                "{identity} fails for f = {}, g = {}: residual {}",
                f.render(&names),
                g.render(&names),
                residual.render(&names)
            ),
        ),
        Err(e) => absorb(&mut report, "delta axioms on sample elements", e)?,
    }
    match admits_delta_on_quotient(&ring) {
        Ok(DeltaAdmissibility::ConsistentUpTo(d)) => report.push(
            "delta structure on the quotient",
            CheckStatus::Pass,
            win(d),
            "no obstruction on this window",
        ),
        Ok(DeltaAdmissibility::Obstruction {
            witness,
            explanation,
        }) => report.push(
            "delta structure on the quotient",
            CheckStatus::Fail,
            "-",
            format!("witness {}: {explanation}", witness.render(&names)),
        ),
        Ok(DeltaAdmissibility::Inconclusive(msg)) => report.push(
            "delta structure on the quotient",
            CheckStatus::Unknown,
            "-",
            msg,
        ),
        Err(e) => absorb(&mut report, "delta structure on the quotient", e)?,
    }
    Ok(report)
}

/// A deterministic pair of elements for the axiom spot-check: the first
/// two ideal generators when available, padded with variables.
fn sample_pair(config: &JobConfig) -> Result<(FracPoly, FracPoly)> {
    let gens = config.ideal_polys()?;
    let nvars = config.variables.len();
    let var = |j: usize| FracPoly::variable(j, config.p, nvars, config.precision, config.cap);
    Ok(match gens.len() {
        0 => (var(0), var(nvars - 1)),
        1 => (gens[0].clone(), var(0)),
        _ => (gens[0].clone(), gens[1].clone()),
    })
}
