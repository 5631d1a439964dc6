use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semcom::harness::{self, Dataset, ExperimentConfig, HarnessError};
use semcom::knowledge_base::KnowledgeBase;

#[derive(Parser)]
#[command(name = "semcom", version, about = "Knowledge-base assisted semantic communication experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Build a knowledge base from the training split and save it to --kb.
    BuildKb,
    /// Train a transceiver and save it to --model; prints the loss trace.
    Train,
    /// Evaluate a trained transceiver over the SNR grid.
    Eval,
    /// Evaluate the classical Huffman/fixed-6 x RS/LDPC pipelines.
    BaselineEval,
    /// Semantic entropy report of the corpus against a knowledge base.
    EntropyReport,
    /// Build a KB and train a model for every theta in the list.
    ThetaSweep,
}

#[derive(Args)]
struct Overrides {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    kb: Option<PathBuf>,
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Model trained without knowledge, evaluated alongside --model.
    #[arg(long, global = true)]
    ablation_model: Option<PathBuf>,
    /// awgn, rayleigh or rician.
    #[arg(long, global = true)]
    channel: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    rician_k_db: Option<String>,
    /// Comma-separated SNR values in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    snr_grid: Option<String>,
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Comma-separated thresholds for theta-sweep.
    #[arg(long, global = true)]
    theta_list: Option<String>,
    /// Comma-separated seeds.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// desk or paper.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add ceil(log2 |KB|)/6 symbols per sentence for the knowledge index.
    #[arg(long, global = true)]
    include_index_cost: bool,
    /// Train or evaluate without a knowledge base.
    #[arg(long, global = true)]
    no_kb: bool,
    #[arg(long, global = true)]
    epochs: Option<String>,
    /// Evaluate on the first N test sentences only.
    #[arg(long, global = true)]
    max_sentences: Option<String>,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let paths = [
            ("corpus", &self.corpus),
            ("kb", &self.kb),
            ("model", &self.model),
            ("ablation_model", &self.ablation_model),
            ("out", &self.out),
        ];
        for (key, value) in paths {
            if let Some(v) = value {
                cfg.set(key, &v.to_string_lossy())?;
            }
        }
        let values = [
            ("channel", &self.channel),
            ("rician_k_db", &self.rician_k_db),
            ("snr_grid", &self.snr_grid),
            ("theta", &self.theta),
            ("theta_list", &self.theta_list),
            ("seeds", &self.seed),
            ("profile", &self.profile),
            ("epochs", &self.epochs),
            ("max_sentences", &self.max_sentences),
        ];
        for (key, value) in values {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.include_index_cost |= self.include_index_cost;
        cfg.no_kb |= self.no_kb;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require_kb(cfg: &ExperimentConfig) -> Result<KnowledgeBase, HarnessError> {
    let path = cfg.kb.as_ref().ok_or(HarnessError::Missing("--kb"))?;
    Ok(KnowledgeBase::load(path, &cfg.embedder()?)?)
}

fn run(command: &Command, cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let out = cfg.out.as_deref();
    match command {
        Command::BuildKb => {
            let data = Dataset::load(cfg)?;
            let kb = harness::build_kb(cfg, &data, cfg.theta)?;
            kb.save(cfg.kb.as_ref().ok_or(HarnessError::Missing("--kb"))?)?;
            harness::emit(&harness::kb_summary_csv(&kb, &data)?, out)
        }
        Command::Train => {
            let model_path = cfg.model.as_ref().ok_or(HarnessError::Missing("--model"))?;
            let data = Dataset::load(cfg)?;
            let kb = if cfg.no_kb { None } else { Some(harness::load_or_build_kb(cfg, &data)?) };
            let seed = cfg.seeds[0];
            let (model, trace) = harness::train_model(cfg, &data, kb.as_ref(), seed)?;
            harness::save_model(&model, &data.vocab, model_path)?;
            harness::emit(&trace.to_csv(), out)
        }
        Command::Eval => {
            let model_path = cfg.model.as_ref().ok_or(HarnessError::Missing("--model"))?;
            let data = Dataset::load(cfg)?;
            let embedder = cfg.embedder()?;
            let test = data.test_set(cfg);
            let (model, vocab) = harness::load_model(model_path)?;
            let kb = if cfg.no_kb { None } else { Some(require_kb(cfg)?) };
            let method = if cfg.no_kb { "no-kb" } else { "kb" };
            let mut rows = harness::evaluate_neural(cfg, method, &model, &vocab, kb.as_ref(), test, &embedder)?;
            if let Some(p) = &cfg.ablation_model {
                let (ablation, vocab) = harness::load_model(p)?;
                rows.extend(harness::evaluate_neural(cfg, "no-kb", &ablation, &vocab, None, test, &embedder)?);
            }
            harness::emit(&harness::rows_to_csv(&rows), out)
        }
        Command::BaselineEval => {
            let data = Dataset::load(cfg)?;
            let pipelines = harness::classical_pipelines(cfg, &data)?;
            let rows = harness::evaluate_classical(cfg, &pipelines, data.test_set(cfg), &cfg.embedder()?)?;
            harness::emit(&harness::rows_to_csv(&rows), out)
        }
        Command::EntropyReport => {
            let data = Dataset::load(cfg)?;
            let kb = require_kb(cfg)?;
            harness::emit(&harness::entropy_report(cfg, &data, &kb)?.to_csv(), out)
        }
        Command::ThetaSweep => {
            let data = Dataset::load(cfg)?;
            let rows = harness::threshold_sweep(cfg, &data, |theta, seed, _, trace| {
                log::info!("theta {theta} seed {seed}: final loss {:?}", trace.train_losses().last());
            })?;
            harness::emit(&harness::sweep_to_csv(&rows), out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.opts.resolve().and_then(|cfg| run(&cli.command, &cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={msg:?}", e.kind());
            ExitCode::FAILURE
        }
    }
}
