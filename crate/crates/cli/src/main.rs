use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awtp_core::channel::{channel_run, ChannelBudget, StrategySpec};
use awtp_core::codec::{AwtpCode, AwtpParams, Decoded, EncodingCoins, ParamSpec, RhoMode};
use awtp_core::experiment::{self, ExperimentConfig, ExperimentError, ExperimentReport, Mode};
use awtp_core::frs::FrsCodeword;
use awtp_core::wire;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "awtp", version, about = "Adversarial wiretap codes: encode, attack, decode and experiment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or expand a parameter file
    Params {
        #[command(subcommand)]
        action: ParamsAction,
    },
    /// Encode a message into a codeword
    Encode(EncodeArgs),
    /// Pass a codeword through the adversarial channel
    Corrupt(CorruptArgs),
    /// Decode a received word
    Decode(DecodeArgs),
    /// Run an experiment suite
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum ParamsAction {
    /// Exit 0 if the parameter set is valid
    Check(ParamsArgs),
    /// Print every derived quantity as JSON
    Derive(ParamsArgs),
}

#[derive(Args)]
struct ParamsArgs {
    /// Parameter JSON file
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Permissive)]
    rho_mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Permissive,
}

impl From<ModeArg> for RhoMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => RhoMode::Strict,
            ModeArg::Permissive => RhoMode::Permissive,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WordFormat {
    Json,
    Bin,
}

#[derive(Args)]
struct CodeArgs {
    /// Parameter JSON file
    #[arg(long)]
    params: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Permissive)]
    rho_mode: ModeArg,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Message JSON: array of uRN decimal strings
    #[arg(long)]
    message: PathBuf,
    /// Coins JSON ({"r_amd": [...], "a": [...]}); drawn from --seed if absent
    #[arg(long)]
    coins: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Codeword output file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = WordFormat::Json)]
    format: WordFormat,
    /// Also write the coins that were used
    #[arg(long)]
    coins_out: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Codeword file (JSON or binary)
    #[arg(long)]
    input: PathBuf,
    /// Strategy JSON, e.g. {"name": "burst", "start": 2}
    #[arg(long, default_value = r#"{"name": "random"}"#)]
    strategy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = WordFormat::Json)]
    format: WordFormat,
    /// Transcript JSON output
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Received word (JSON or binary)
    #[arg(long)]
    input: PathBuf,
    /// Write the message here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = parse_mode)]
    mode: Mode,
    /// Experiment config JSON; built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Report format
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    out: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: ExperimentError| e.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_string(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?).map_err(|_| CliError::Config(format!("{}: not UTF-8", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.write_all(b"\n")) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io { path: PathBuf::from("<stdout>"), source: e })
        }
        _ => Ok(()),
    }
}

fn load_spec(path: &Path) -> Result<ParamSpec, CliError> {
    serde_json::from_str(&read_string(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_code(args: &CodeArgs) -> Result<AwtpCode, CliError> {
    AwtpCode::from_spec(&load_spec(&args.params)?, args.rho_mode.into()).map_err(config)
}

/// JSON if the file starts with `[`, otherwise raw little-endian words.
fn load_word(path: &Path, code: &AwtpCode) -> Result<FrsCodeword, CliError> {
    let bytes = read(path)?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    let word = if first == Some(&b'[') {
        let s = String::from_utf8(bytes).map_err(config)?;
        wire::codeword_from_json(&s).map_err(config)?
    } else {
        let p = code.params();
        wire::codeword_from_bytes(&bytes, p.n(), p.u()).map_err(config)?
    };
    let p = code.params();
    if word.len() != p.n() || word.symbols.iter().any(|s| s.len() != p.u()) {
        return Err(CliError::Config(format!("codeword must have {} symbols of {} elements", p.n(), p.u())));
    }
    if word.symbols.iter().flatten().any(|&x| x >= p.q()) {
        return Err(CliError::Config(format!("codeword entries must be below q = {}", p.q())));
    }
    Ok(word)
}

fn store_word(path: &Path, word: &FrsCodeword, format: WordFormat) -> Result<(), CliError> {
    match format {
        WordFormat::Json => write(path, wire::codeword_to_json(word).as_bytes()),
        WordFormat::Bin => write(path, &wire::codeword_to_bytes(word)),
    }
}

fn cmd_params(action: ParamsAction) -> Result<(), CliError> {
    let (args, derive) = match action {
        ParamsAction::Check(a) => (a, false),
        ParamsAction::Derive(a) => (a, true),
    };
    let spec = load_spec(&args.file)?;
    let params = AwtpParams::derive(&spec, args.rho_mode.into()).map_err(config)?;
    let code = AwtpCode::new(params.clone()).map_err(config)?;
    if derive {
        let out = serde_json::json!({
            "params": params,
            "agreement_threshold": wire::format_rational(&code.frs().agreement_threshold()),
            "failure_bound": wire::format_rational(&code.failure_bound()),
            "ses_degrees": code.ses().degrees(),
            "frs_generator": code.frs().gamma(),
            "frs_degree_budget": code.frs().choose_degree_budget().map_err(config)?,
            "amd_modulus": code.amd().ext().modulus(),
        });
        emit(&serde_json::to_string_pretty(&out).expect("serialisable"))?;
    } else {
        emit(&format!(
            "ok: l = {}, w = {}, b = {}, n1 = {}, n = {}, k = {}",
            params.blocks, params.w, params.b, params.n1, params.n_ses, params.k
        ))?;
    }
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let m = wire::vector_from_json(&read_string(&args.message)?).map_err(config)?;
    let coins = match &args.coins {
        Some(p) => serde_json::from_str(&read_string(p)?).map_err(config)?,
        None => EncodingCoins::random(code.params(), &mut experiment::trial_rng(args.seed, 0)),
    };
    let word = code.encode(&m, &coins).map_err(config)?;
    store_word(&args.out, &word, args.format)?;
    if let Some(p) = &args.coins_out {
        write(p, serde_json::to_string_pretty(&coins).expect("serialisable").as_bytes())?;
    }
    Ok(())
}

fn cmd_corrupt(args: CorruptArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let c = load_word(&args.input, &code)?;
    let spec: StrategySpec = serde_json::from_str(&args.strategy).map_err(config)?;
    let p = code.params();
    let budget = ChannelBudget { reads_max: p.reads, writes_max: p.writes };
    let mut strat = spec.build(0, experiment::trial_rng(args.seed, 0), p.n());
    let (y, transcript) = channel_run(code.field(), &c, strat.as_mut(), budget)
        .map_err(|e| CliError::Failed(format!("channel aborted: {e}")))?;
    store_word(&args.out, &y, args.format)?;
    if let Some(t) = &args.transcript {
        write(t, serde_json::to_string_pretty(&transcript).expect("serialisable").as_bytes())?;
    }
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let y = load_word(&args.input, &code)?;
    let trace = code.decode_trace(&y);
    match trace.outcome {
        Decoded::Message(m) => {
            let js = wire::vector_to_json(&m);
            match &args.out {
                Some(p) => write(p, js.as_bytes()),
                None => emit(&js),
            }
        }
        Decoded::Bottom => Err(CliError::Failed(format!(
            "decoder abstained: {}",
            trace.diagnostic.unwrap_or_default()
        ))),
    }
}

fn report_csv(r: &ExperimentReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |a: &str, b: &str, c: &str| w.write_record([a, b, c]).map_err(config);
    row("section", "key", "value")?;
    row("run", "mode", r.mode.as_str())?;
    row("run", "seed", &r.seed.to_string())?;
    row("run", "trials", &r.trials.to_string())?;
    row("run", "seed_scheme", &r.seed_scheme)?;
    row("run", "wall_clock_ms", &format!("{:.3}", r.wall_clock_ms))?;
    row("run", "params", &r.params.to_string())?;
    let agg = serde_json::to_value(&r.aggregates).expect("serialisable");
    for (k, v) in agg.as_object().into_iter().flatten() {
        let v = v.as_str().map_or_else(|| v.to_string(), str::to_string);
        row("aggregate", k, &v)?;
    }
    for a in &r.assertions {
        row("assertion", &a.name, &format!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.detail))?;
    }
    for (i, t) in r.table.iter().enumerate() {
        for (k, v) in t {
            row(&format!("table.{i}"), k, v)?;
        }
    }
    for t in &r.outcomes {
        let detail = t.detail.as_deref().unwrap_or("");
        let outcome = serde_json::to_value(t.outcome).expect("serialisable");
        row("trial", &t.trial.to_string(), format!("{} {detail}", outcome.as_str().unwrap_or("")).trim_end())?;
    }
    w.into_inner().map_err(config)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(p) => ExperimentConfig::from_json(&read_string(p)?).map_err(config)?,
        None => ExperimentConfig::default(),
    };
    let report = experiment::run(args.mode, &cfg, args.seed, args.trials).map_err(config)?;
    let body = match args.out {
        ReportFormat::Json => serde_json::to_vec_pretty(&report).expect("serialisable"),
        ReportFormat::Csv => report_csv(&report)?,
    };
    match &args.output {
        Some(p) => write(p, &body)?,
        None => emit(&String::from_utf8_lossy(&body))?,
    }
    for a in &report.assertions {
        eprintln!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} mode: assertion failure", report.mode)))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Params { action } => cmd_params(action),
        Command::Encode(a) => cmd_encode(a),
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
