//! Command-line front end: experiment files, seeded runs and result emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::hamiltonian::{synth_instance, InstanceFile, InstanceSpec};
use crate::photonics::{
    per_repetition_failure_bound, survivor_lower_bound, vacuum_threshold, PulseParams,
};
use crate::protocol1::{self, exact_pacc_povm, Estimate, MAX_EXACT_POVM_QUBITS, MIN_TRIALS};
use crate::protocol2::{
    self, bound_check, completeness_bound, gap_lower_bound, induced_povm, recommended_params,
    soundness_bound, union_bound, AdversarySpec, P2Estimate, RunConfig, MIN_ESTIMATE_TRIALS,
};
use crate::selftest::{self, Mutation};
use crate::{phasernd, seeding};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "VERIPHOTON_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Selftest(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "veriphoton",
    version,
    about = "Verification with phase-randomized coherent light"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    PhiSign,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment file and emit transcripts and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print recommended parameters and bound values.
    Bounds {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        f: f64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Print the discrete phase-randomization sizing table.
    Phaserand {
        #[arg(long)]
        m: usize,
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        f: f64,
    },
    /// Run the oracle-equivalence suites.
    Selftest {
        #[arg(long, value_enum, hide = true)]
        mutate: Option<MutationArg>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    P1,
    P2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub transcripts: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            transcripts: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub seed: u64,
}

/// The experiment file. `instance` is an inline instance, a path to one, or
/// `{"synthetic": {"n": .., "seed": ..}}` (which needs `f`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub protocol: Protocol,
    pub instance: serde_json::Value,
    pub adversary: AdversarySpec,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("experiment serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    fn resolve_instance(&self, base: &Path) -> Result<InstanceSpec, CliError> {
        let inst = match &self.instance {
            serde_json::Value::String(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
                InstanceSpec::from_json(&text)?
            }
            serde_json::Value::Object(map) if map.contains_key("synthetic") => {
                if map.len() != 1 {
                    return Err(CliError::Validation(
                        "synthetic instance takes no sibling keys".into(),
                    ));
                }
                let spec: SyntheticSpec = serde_json::from_value(map["synthetic"].clone())
                    .map_err(|e| CliError::Validation(format!("synthetic instance: {e}")))?;
                let f = self.f.ok_or_else(|| {
                    CliError::Validation("synthetic instance requires top-level f".into())
                })?;
                if !(f.is_finite() && f >= 1.0) {
                    return Err(CliError::Validation(format!("f = {f} must be at least 1")));
                }
                synth_instance(spec.n, spec.seed, 1.0 / f)?
            }
            other => {
                let file: InstanceFile = serde_json::from_value(other.clone())
                    .map_err(|e| CliError::Validation(format!("instance: {e}")))?;
                file.try_into()?
            }
        };
        Ok(inst)
    }

    /// Validates every field and builds the run configuration.
    pub fn resolve(&self, base: &Path) -> Result<RunConfig, CliError> {
        let inst = self.resolve_instance(base)?;
        if inst.n_qubits() < 2 {
            return Err(CliError::Validation("N must be at least 2".into()));
        }
        let (m, alpha) = match self.protocol {
            Protocol::P2 => {
                let m = self
                    .m
                    .ok_or_else(|| CliError::Validation("protocol p2 requires m".into()))?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| CliError::Validation("protocol p2 requires alpha".into()))?;
                PulseParams::new(m, alpha)?;
                if self.trials < MIN_ESTIMATE_TRIALS {
                    return Err(CliError::Validation(format!(
                        "trials = {} below the minimum {MIN_ESTIMATE_TRIALS}",
                        self.trials
                    )));
                }
                (m, alpha)
            }
            Protocol::P1 => {
                if self.m.is_some() || self.alpha.is_some() {
                    return Err(CliError::Validation(
                        "m and alpha apply only to protocol p2".into(),
                    ));
                }
                if matches!(self.adversary, AdversarySpec::VacuumForge { .. }) {
                    return Err(CliError::Validation(
                        "vacuum-forge needs the photonic protocol p2".into(),
                    ));
                }
                if self.trials < MIN_TRIALS {
                    return Err(CliError::Validation(format!(
                        "trials = {} below the minimum {MIN_TRIALS}",
                        self.trials
                    )));
                }
                (crate::photonics::MIN_PULSES, 1.0)
            }
        };
        Ok(RunConfig::new(
            inst,
            m,
            alpha,
            self.trials,
            self.seed,
            self.adversary.clone(),
        )?)
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// One row of the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub protocol: Protocol,
    pub adversary: String,
    pub n_qubits: usize,
    pub trials: usize,
    pub accepts: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
    pub exact: Option<f64>,
    pub bound_check: String,
}

/// Bytes produced by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub transcripts: Option<Vec<u8>>,
    pub summary: Vec<u8>,
}

/// Executes an experiment without touching the file system.
pub fn run_experiment(
    exp: &ExperimentFile,
    base: &Path,
    format: Format,
    threads: Option<usize>,
) -> Result<(ResultRecord, RunOutput), CliError> {
    let cfg = exp.resolve(base)?;
    let hash = exp.hash();
    let (est, bound, exact, lines) = seeding::with_threads(threads, || -> Result<_, CliError> {
        match exp.protocol {
            Protocol::P1 => {
                let povm = induced_povm(&cfg.adversary, &cfg.instance)?;
                let rounds =
                    protocol1::run_rounds(&cfg.instance.hamiltonian, &povm, cfg.trials, cfg.seed)?;
                let accepts = rounds.iter().filter(|r| r.accepted).count();
                let est = Estimate::from_counts(accepts, cfg.trials);
                let exact = if cfg.n_qubits() <= MAX_EXACT_POVM_QUBITS {
                    Some(exact_pacc_povm(&cfg.instance.hamiltonian, &povm)?)
                } else {
                    None
                };
                let bound = p1_bound(&cfg)?;
                let lines = to_lines(&rounds, exp.output.transcripts)?;
                Ok((est, bound, exact, lines))
            }
            Protocol::P2 => {
                let rounds = protocol2::run_rounds(&cfg)?;
                let est = P2Estimate::from_rounds(&rounds).pacc;
                let bound = p2_bound(&cfg)?;
                let lines = to_lines(&rounds, exp.output.transcripts)?;
                Ok((est, bound, None, lines))
            }
        }
    })??;

    let pass = match (exp.protocol, &cfg.adversary) {
        (_, AdversarySpec::Honest {}) => est.estimate + est.half_width >= bound,
        (Protocol::P1, _) => est.estimate - est.half_width <= bound,
        (Protocol::P2, _) => bound_check(&cfg, &est)?,
    };
    let (lo, hi) = est.ci();
    let record = ResultRecord {
        config_hash: hash,
        protocol: exp.protocol,
        adversary: cfg.adversary.name().to_string(),
        n_qubits: cfg.n_qubits(),
        trials: est.trials,
        accepts: est.accepts,
        estimate: round12(est.estimate),
        ci_low: round12(lo),
        ci_high: round12(hi),
        bound: round12(bound),
        exact: exact.map(round12),
        bound_check: if pass { "pass" } else { "fail" }.to_string(),
    };
    let summary = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&record)
                .map_err(|e| CliError::Io(format!("csv: {e}")))?;
            w.into_inner()
                .map_err(|e| CliError::Io(format!("csv: {e}")))?
        }
        Format::Jsonl => {
            let mut line = serde_json::to_vec(&record).expect("record serializes");
            line.push(b'\n');
            line
        }
    };
    Ok((
        record,
        RunOutput {
            transcripts: lines,
            summary,
        },
    ))
}

fn to_lines<T: Serialize>(rounds: &[T], enabled: bool) -> Result<Option<Vec<u8>>, CliError> {
    if !enabled {
        return Ok(None);
    }
    let mut out = Vec::new();
    for r in rounds {
        serde_json::to_writer(&mut out, r).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
    }
    Ok(Some(out))
}

fn p1_bound(cfg: &RunConfig) -> Result<f64, CliError> {
    Ok(match cfg.adversary {
        AdversarySpec::Honest {} => 1.0 - cfg.instance.a / 2.0,
        _ => 1.0 - protocol2::effective_energy(&cfg.adversary, &cfg.instance)? / 2.0,
    })
}

fn p2_bound(cfg: &RunConfig) -> Result<f64, CliError> {
    Ok(match cfg.adversary {
        AdversarySpec::Honest {} => completeness_bound(&cfg.instance, cfg.m, cfg.alpha),
        _ => soundness_bound(
            protocol2::effective_energy(&cfg.adversary, &cfg.instance)?,
            cfg.n_qubits(),
            cfg.m,
            cfg.alpha,
        ),
    })
}

/// Bound table for `cmd bounds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub f: f64,
    pub m: usize,
    pub alpha: f64,
    pub recommended_m: usize,
    pub threshold: f64,
    pub per_repetition_bound: f64,
    pub honest_reject_bound: f64,
    pub survivor_lower_bound: f64,
    pub gap_lower_bound: f64,
}

pub fn bounds_row(
    n: usize,
    f: f64,
    m: Option<usize>,
    alpha: Option<f64>,
) -> Result<BoundsRow, CliError> {
    let rec = recommended_params(n, f)?;
    let m = m.unwrap_or(rec.m);
    let alpha = alpha.unwrap_or(rec.alpha);
    PulseParams::new(m, alpha)?;
    Ok(BoundsRow {
        n,
        f,
        m,
        alpha,
        recommended_m: rec.m,
        threshold: round12(vacuum_threshold(m, alpha)),
        per_repetition_bound: round12(per_repetition_failure_bound(m, alpha)),
        honest_reject_bound: round12(union_bound(n, m, alpha)),
        survivor_lower_bound: round12(survivor_lower_bound(m, alpha)),
        gap_lower_bound: round12(gap_lower_bound(n, f)?),
    })
}

fn csv_bytes<T: Serialize>(row: &T) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(row)
        .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    w.into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))
}

pub fn phaserand_row(m: usize, n: usize, f: f64) -> Result<phasernd::ParamRow, CliError> {
    let mut row = phasernd::param_row(m, n, f)?;
    row.f_series = round12(row.f_series);
    row.f_min = round12(row.f_min);
    row.shift_bound = round12(row.shift_bound);
    Ok(row)
}

/// Reads the worker count from the environment.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(CliError::Validation(format!(
                "{THREADS_ENV} = {v:?} is not a positive integer"
            ))),
        },
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Runs a parsed command, writing human-facing output to `stdout`.
pub fn execute(cli: Cli, threads: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let emit = |out: &mut dyn Write, bytes: &[u8]| -> Result<(), CliError> {
        out.write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string()))
    };
    match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| io_err(&config, e))?;
            let mut exp = ExperimentFile::parse(&text)?;
            if let Some(s) = seed {
                exp.seed = s;
            }
            if let Some(t) = trials {
                exp.trials = t;
            }
            let base = config.parent().unwrap_or(Path::new("."));
            let (_, output) = run_experiment(&exp, base, format, threads)?;
            let dir = out.or_else(|| exp.output.dir.as_ref().map(|d| base.join(d)));
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
                if let Some(t) = &output.transcripts {
                    write_file(&dir.join("transcripts.jsonl"), t)?;
                }
                let name = match format {
                    Format::Csv => "summary.csv",
                    Format::Jsonl => "summary.jsonl",
                };
                write_file(&dir.join(name), &output.summary)?;
            }
            emit(stdout, &output.summary)
        }
        Command::Bounds { n, f, m, alpha } => {
            emit(stdout, &csv_bytes(&bounds_row(n, f, m, alpha)?)?)
        }
        Command::Phaserand { m, n, f } => emit(stdout, &csv_bytes(&phaserand_row(m, n, f)?)?),
        Command::Selftest { mutate } => {
            let mutation = mutate.map(|MutationArg::PhiSign| Mutation::PhiSign);
            let report = selftest::run(mutation);
            for s in &report.suites {
                let line = format!(
                    "{} {}{}\n",
                    if s.passed { "PASS" } else { "FAIL" },
                    s.name,
                    if s.passed {
                        String::new()
                    } else {
                        format!(": {}", s.detail)
                    }
                );
                emit(stdout, line.as_bytes())?;
            }
            match report.first_failure() {
                None => Ok(()),
                Some(f) => Err(CliError::Selftest(format!("{}: {}", f.name, f.detail))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HONEST_P1: &str = r#"{
        "protocol": "p1",
        "instance": {"n": 2, "terms": [{"i": 0, "j": 1, "p": 1.0, "c": 1}], "a": 0.0, "b": 0.1, "f": 10,
                     "witness": [[0,0],[0.7071067811865476,0],[-0.7071067811865476,0],[0,0]]},
        "adversary": {"kind": "honest"},
        "trials": 200,
        "seed": 5
    }"#;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.123_456_789_012_345), 0.123_456_789_012);
        assert_eq!(round12(1.0), 1.0);
    }

    #[test]
    fn honest_p1_run() {
        let exp = ExperimentFile::parse(HONEST_P1).unwrap();
        let (rec, out) = run_experiment(&exp, Path::new("."), Format::Csv, Some(2)).unwrap();
        assert_eq!(rec.accepts, 200);
        assert_eq!(rec.exact, Some(1.0));
        assert_eq!(rec.bound_check, "pass");
        let text = String::from_utf8(out.summary).unwrap();
        assert!(text.starts_with("config_hash,protocol,adversary"));
        assert_eq!(
            out.transcripts
                .unwrap()
                .iter()
                .filter(|&&b| b == b'\n')
                .count(),
            200
        );
    }

    #[test]
    fn validation_errors() {
        let bad_key = HONEST_P1.replace("\"seed\": 5", "\"seed\": 5, \"extra\": 1");
        assert!(matches!(
            ExperimentFile::parse(&bad_key),
            Err(CliError::Validation(_))
        ));
        let p2 = HONEST_P1.replace("\"p1\"", "\"p2\"").replace(
            "\"trials\": 200",
            "\"trials\": 1000, \"m\": 75, \"alpha\": 1.5",
        );
        let exp = ExperimentFile::parse(&p2).unwrap();
        let err = exp.resolve(Path::new(".")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn bounds_table_values() {
        let row = bounds_row(2, 10.0, Some(75), None).unwrap();
        assert_eq!(row.gap_lower_bound, 0.025);
        assert_eq!(row.recommended_m, 76);
        assert!((row.honest_reject_bound - 0.0125).abs() < 2e-6);
        let row3 = bounds_row(3, 10.0, None, None).unwrap();
        assert!((row3.gap_lower_bound - 1.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn phaserand_row_example() {
        assert_eq!(phaserand_row(75, 2, 10.0).unwrap().r, 16);
    }
}
