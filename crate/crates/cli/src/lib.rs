//! Command-line front end for `entrosteer`.
//!
//! [`RunConfig`] is the parsed command line; [`dispatch`] runs it and returns
//! the data artifact plus a manifest. `main` only handles I/O and exit codes.

pub mod state_file;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use entrosteer::cvgauss::{entropic_sumdiff_cv, reid_sumdiff_cv, tmsv, walborn_cv};
use entrosteer::infotheory::Sign;
use entrosteer::measure::{mub_set, Measurement};
use entrosteer::montecarlo::{
    self, audit_separable, basis_sweep, item_rng, one_way_candidate, sample_two_qubit, survey_fig1, survey_fig2,
    werner_threshold, Ensemble, EPR_SIGNS,
};
use entrosteer::qmat::{werner_state, DensityMatrix};
use entrosteer::witness::{self, Steering, WitnessReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::state_file::StateFile;
use crate::table::{write_csv, Cell};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] entrosteer::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleArg {
    Pure,
    Mixed,
    Separable,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Pure => Ensemble::Pure,
            EnsembleArg::Mixed => Ensemble::Mixed,
            EnsembleArg::Separable => Ensemble::Separable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DirectionArg {
    #[value(name = "AtoB", alias = "atob")]
    AtoB,
    #[value(name = "BtoA", alias = "btoa")]
    BtoA,
}

impl From<DirectionArg> for Steering {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::AtoB => Steering::AtoB,
            DirectionArg::BtoA => Steering::BtoA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessArg {
    PairConditional,
    PairSymmetricMi,
    MubConditional,
    MubMi,
    Sumdiff,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize)]
#[command(name = "entrosteer", version, about = "Entropic EPR-steering witnesses and surveys")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed; every random draw derives from it.
    #[arg(long, env = "ENTROSTEER_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    /// Output file. Data goes to stdout when omitted.
    #[arg(long = "out", global = true)]
    pub out_path: Option<PathBuf>,

    /// Output format. Tables default to csv, everything else is json only.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Conditional vs symmetric violations with Pauli-triple settings.
    Fig1 {
        #[arg(long, value_enum, default_value = "mixed")]
        ensemble: EnsembleArg,
        #[arg(long = "n", default_value_t = 10_000)]
        n_states: usize,
    },
    /// Per-direction violations maximized over random local settings.
    Fig2 {
        #[arg(long, value_enum, default_value = "mixed")]
        ensemble: EnsembleArg,
        #[arg(long = "n", default_value_t = 1_000)]
        n_states: usize,
        #[arg(long = "trials", default_value_t = 500)]
        n_trials: usize,
    },
    /// Both directional violations of one state over random settings.
    Sweep {
        /// State to sweep; otherwise a one-way candidate is searched for.
        #[arg(long)]
        state_file: Option<PathBuf>,
        #[arg(long = "n", default_value_t = 1_000)]
        n_trials: usize,
        /// Mixed states screened when searching for a candidate.
        #[arg(long, default_value_t = 500)]
        candidates: usize,
        /// Optimization trials per screened candidate.
        #[arg(long, default_value_t = 500)]
        candidate_trials: usize,
    },
    /// Bisection for the Werner-state violation threshold.
    WernerThreshold {
        #[arg(long, default_value_t = 2)]
        settings: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        lo: f64,
        #[arg(long, default_value_t = 0.9)]
        hi: f64,
    },
    /// Continuous-variable witnesses on the two-mode squeezed vacuum over an r grid.
    CvScan {
        #[arg(long, default_value_t = 0.0)]
        r_min: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
    },
    /// Evaluates one witness on a given state.
    Eval {
        #[arg(long, conflicts_with = "werner", required_unless_present = "werner")]
        state_file: Option<PathBuf>,
        /// Werner state with singlet weight p.
        #[arg(long)]
        werner: Option<f64>,
        #[arg(long, value_enum)]
        witness: WitnessArg,
        #[arg(long, value_enum, default_value = "AtoB")]
        direction: DirectionArg,
        /// Signs for the R and S pairs of the sum/difference witness.
        #[arg(long, value_parser = parse_signs, default_value = "minus,plus")]
        signs: SignPair,
    },
    /// Runs every discrete witness on random separable states.
    SeparableAudit {
        #[arg(long = "n", default_value_t = 10_000)]
        n_states: usize,
        #[arg(long, default_value_t = montecarlo::SEPARABLE_K_MAX)]
        k_max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignPair(pub Sign, pub Sign);

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "plus" | "+" => Ok(Sign::Plus),
        "minus" | "-" => Ok(Sign::Minus),
        other => Err(format!("unknown sign '{other}' (use plus or minus)")),
    }
}

pub fn parse_signs(s: &str) -> Result<SignPair, String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated signs, e.g. minus,plus")?;
    Ok(SignPair(parse_sign(a)?, parse_sign(b)?))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(CliError::Config(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        if let Some(t) = self.threads {
            positive("--threads", t)?;
        }
        let json_only = |cmd: &str| match self.format {
            Some(Format::Csv) => Err(CliError::Config(format!("{cmd} only emits json"))),
            _ => Ok(()),
        };
        match &self.command {
            Command::Fig1 { n_states, .. } => positive("--n", *n_states),
            Command::Fig2 { n_states, n_trials, .. } => {
                positive("--n", *n_states)?;
                positive("--trials", *n_trials)
            }
            Command::Sweep {
                n_trials,
                candidates,
                candidate_trials,
                ..
            } => {
                positive("--n", *n_trials)?;
                positive("--candidates", *candidates)?;
                positive("--candidate-trials", *candidate_trials)
            }
            Command::WernerThreshold { settings, tol, lo, hi } => {
                json_only("werner-threshold")?;
                if !matches!(settings, 2 | 3) {
                    return Err(CliError::Config(format!("--settings must be 2 or 3, got {settings}")));
                }
                if !(*tol > 0.0) {
                    return Err(CliError::Config(format!("--tol must be positive, got {tol}")));
                }
                if !(0.0 <= *lo && lo < hi && *hi <= 1.0) {
                    return Err(CliError::Config(format!("need 0 <= lo < hi <= 1, got [{lo}, {hi}]")));
                }
                Ok(())
            }
            Command::CvScan { r_min, r_max, steps } => {
                positive("--steps", *steps)?;
                if !(r_min.is_finite() && r_max.is_finite() && 0.0 <= *r_min && r_min <= r_max) {
                    return Err(CliError::Config(format!("need 0 <= r-min <= r-max, got [{r_min}, {r_max}]")));
                }
                Ok(())
            }
            Command::Eval { werner, .. } => {
                json_only("eval")?;
                match werner {
                    Some(p) if !(0.0..=1.0).contains(p) => {
                        Err(CliError::Config(format!("--werner must lie in [0, 1], got {p}")))
                    }
                    _ => Ok(()),
                }
            }
            Command::SeparableAudit { n_states, k_max } => {
                json_only("separable-audit")?;
                positive("--n", *n_states)?;
                positive("--k-max", *k_max)
            }
        }
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Fig1 { .. } => "fig1",
            Command::Fig2 { .. } => "fig2",
            Command::Sweep { .. } => "sweep",
            Command::WernerThreshold { .. } => "werner-threshold",
            Command::CvScan { .. } => "cv-scan",
            Command::Eval { .. } => "eval",
            Command::SeparableAudit { .. } => "separable-audit",
        }
    }

    fn format(&self) -> Format {
        match self.command {
            Command::Fig1 { .. } | Command::Fig2 { .. } | Command::Sweep { .. } | Command::CvScan { .. } => {
                self.format.unwrap_or(Format::Csv)
            }
            _ => Format::Json,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The data artifact, byte-identical for identical configs.
    pub data: String,
    /// Command-specific manifest entries (e.g. the swept state).
    pub extra: Value,
    /// False when the run completed but its result is a failure (unsound audit).
    pub success: bool,
}

/// Validates `config`, runs it on a pool capped at `config.threads`.
pub fn dispatch(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| run(config))
}

fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let format = config.format();
    let seed = config.seed;
    let ok = |data: String| RunOutput {
        data,
        extra: Value::Null,
        success: true,
    };
    match &config.command {
        Command::Fig1 { ensemble, n_states } => {
            log::info!("fig1: {n_states} {ensemble:?} states, seed {seed}");
            let records = survey_fig1(*n_states, (*ensemble).into(), seed)?;
            let rows: Vec<_> = records
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.state_id as u64),
                        Cell::Float(r.v_conditional_ab),
                        Cell::Float(r.v_symmetric),
                        Cell::Float(r.purity_scaled),
                    ]
                })
                .collect();
            let header = ["state_id", "v_conditional_AtoB", "v_symmetric", "purity"];
            Ok(ok(render(format, &header, &rows)?))
        }
        Command::Fig2 {
            ensemble,
            n_states,
            n_trials,
        } => {
            log::info!("fig2: {n_states} {ensemble:?} states x {n_trials} trials, seed {seed}");
            let records = survey_fig2(*n_states, (*ensemble).into(), *n_trials, seed)?;
            let header = ["state_id", "best_v_AtoB", "best_v_BtoA", "purity"];
            Ok(ok(render(format, &header, &fig2_rows(&records))?))
        }
        Command::Sweep {
            state_file,
            n_trials,
            candidates,
            candidate_trials,
        } => {
            let (rho, extra) = match state_file {
                Some(path) => (StateFile::load(path)?, json!({ "state_file": path })),
                None => find_one_way_candidate(*candidates, *candidate_trials, seed)?,
            };
            log::info!("sweep: {n_trials} random settings");
            let sweep = basis_sweep(&rho, *n_trials, seed.wrapping_add(1))?;
            let rows: Vec<_> = sweep
                .iter()
                .enumerate()
                .map(|(i, (ab, ba))| vec![Cell::Int(i as u64), Cell::Float(*ab), Cell::Float(*ba)])
                .collect();
            let data = render(format, &["trial_id", "v_AtoB", "v_BtoA"], &rows)?;
            Ok(RunOutput {
                data,
                extra,
                success: true,
            })
        }
        Command::WernerThreshold { settings, tol, lo, hi } => {
            let p_star = werner_threshold(*settings, *lo, *hi, *tol)?;
            log::info!("werner threshold ({settings} settings): {p_star}");
            let out = json!({ "p_star": p_star, "settings": settings, "tol": tol, "lo": lo, "hi": hi });
            Ok(ok(to_json(&out)?))
        }
        Command::CvScan { r_min, r_max, steps } => {
            let mut rows = Vec::with_capacity(*steps);
            for i in 0..*steps {
                let r = if *steps == 1 {
                    *r_min
                } else {
                    r_min + (r_max - r_min) * i as f64 / (*steps - 1) as f64
                };
                let g = tmsv(r)?;
                rows.push(vec![
                    Cell::Float(r),
                    Cell::Float(walborn_cv(&g, Steering::AtoB)?.violation),
                    Cell::Float(reid_sumdiff_cv(&g, EPR_SIGNS).violation),
                    Cell::Float(entropic_sumdiff_cv(&g, EPR_SIGNS)?.violation),
                ]);
            }
            let header = ["r", "v_walborn_AtoB", "v_reid_sumdiff", "v_entropic_sumdiff"];
            Ok(ok(render(format, &header, &rows)?))
        }
        Command::Eval {
            state_file,
            werner,
            witness,
            direction,
            signs,
        } => {
            let rho = match (state_file, werner) {
                (Some(path), _) => StateFile::load(path)?,
                (None, Some(p)) => werner_state(*p)?,
                (None, None) => return Err(CliError::Config("eval needs --state-file or --werner".into())),
            };
            let report = evaluate(&rho, *witness, (*direction).into(), *signs)?;
            Ok(ok(to_json(&report)?))
        }
        Command::SeparableAudit { n_states, k_max } => {
            log::info!("separable audit: {n_states} states, k_max {k_max}, seed {seed}");
            let audit = audit_separable(*n_states, *k_max, seed)?;
            if !audit.sound {
                log::error!("separable state produced a positive violation");
            }
            Ok(RunOutput {
                data: to_json(&audit)?,
                extra: Value::Null,
                success: audit.sound,
            })
        }
    }
}

fn fig2_rows(records: &[montecarlo::OptimizationResult]) -> Vec<Vec<Cell>> {
    records
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.state_id as u64),
                Cell::Float(r.best_v_ab),
                Cell::Float(r.best_v_ba),
                Cell::Float(r.purity_scaled),
            ]
        })
        .collect()
}

fn find_one_way_candidate(n: usize, trials: usize, seed: u64) -> Result<(DensityMatrix, Value), CliError> {
    log::info!("screening {n} mixed states ({trials} trials each) for a one-way candidate");
    let records = survey_fig2(n, Ensemble::Mixed, trials, seed)?;
    let best = one_way_candidate(&records).expect("survey is non-empty");
    let rho = sample_two_qubit(Ensemble::Mixed, &mut item_rng(seed, best.state_id as u64))?;
    log::info!(
        "candidate {}: best AtoB {:.4}, best BtoA {:.4}",
        best.state_id,
        best.best_v_ab,
        best.best_v_ba
    );
    let extra = json!({
        "candidate": {
            "state_id": best.state_id,
            "best_v_AtoB": best.best_v_ab,
            "best_v_BtoA": best.best_v_ba,
            "screened": n,
            "trials": trials,
            "state": StateFile::from_density(&rho),
        }
    });
    Ok((rho, extra))
}

/// Pair witnesses use the first and last member of each side's reference MUB
/// set (X and Z for qubits).
pub fn evaluate(
    rho: &DensityMatrix,
    witness: WitnessArg,
    steering: Steering,
    signs: SignPair,
) -> Result<WitnessReport, CliError> {
    let (da, db) = rho.dims();
    let bases_a = mub_set(da)?;
    let bases_b = mub_set(db)?;
    let (ra, sa): (&dyn Measurement, &dyn Measurement) = (&bases_a[0], &bases_a[bases_a.len() - 1]);
    let (rb, sb): (&dyn Measurement, &dyn Measurement) = (&bases_b[0], &bases_b[bases_b.len() - 1]);
    let report = match witness {
        WitnessArg::PairConditional => witness::pair_conditional(rho, ra, sa, rb, sb, steering)?,
        WitnessArg::PairSymmetricMi => witness::pair_symmetric_mi(rho, ra, sa, rb, sb)?,
        WitnessArg::MubConditional => witness::mub_conditional(rho, &bases_a, &bases_b, steering)?,
        WitnessArg::MubMi => witness::mub_mi(rho, &bases_a, &bases_b)?,
        WitnessArg::Sumdiff => witness::sumdiff_discrete(rho, ra, sa, rb, sb, (signs.0, signs.1))?,
    };
    Ok(report)
}

fn render(format: Format, header: &[&str], rows: &[Vec<Cell>]) -> Result<String, CliError> {
    match format {
        Format::Csv => write_csv(header, rows),
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj = header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| {
                            let v = match c {
                                Cell::Int(i) => json!(i),
                                Cell::Float(f) => json!(f),
                            };
                            (h.to_string(), v)
                        })
                        .collect::<serde_json::Map<_, _>>();
                    Value::Object(obj)
                })
                .collect();
            to_json(&records)
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn manifest(config: &RunConfig, output: &RunOutput, wall_time_s: f64) -> Value {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "command": config.command_name(),
        "seed": config.seed,
        "versions": {
            "entrosteer": entrosteer::VERSION,
            "entrosteer-cli": env!("CARGO_PKG_VERSION"),
        },
        "parameters": config,
        "format": config.format(),
        "threads": config.threads,
        "wall_time_s": wall_time_s,
        "timestamp_unix": timestamp,
        "success": output.success,
        "details": output.extra,
    })
}

/// Runs `config`, writes data and manifest, returns the exit code.
pub fn execute(config: &RunConfig) -> Result<i32, CliError> {
    let start = Instant::now();
    let output = dispatch(config)?;
    let elapsed = start.elapsed().as_secs_f64();
    match &config.out_path {
        Some(path) => {
            std::fs::write(path, &output.data)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            let m = manifest(config, &output, elapsed);
            std::fs::write(manifest_path(path), to_json(&m)?)?;
            log::info!("wrote {} in {elapsed:.2}s", path.display());
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(output.data.as_bytes())?;
            log::info!("finished in {elapsed:.2}s");
        }
    }
    Ok(if output.success { 0 } else { 1 })
}
