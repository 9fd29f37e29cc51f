//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 unreadable input (parse or
//! corpus layout), 3 incomputable distance.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::evaluation::{
    self, applicability_csv, detection_csv, load_corpus, run_evaluation, timing_csv, EvalError, EvaluationConfig,
};
use crate::exas::{extract_features, CosineMode};
use crate::graph::dot::parse_aug;
use crate::graph::Aug;
use crate::{Algorithm, DistanceError, Metric, Options};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCOMPUTABLE: i32 = 3;

const ALGORITHM_NAMES: [&str; 8] = [
    "astar-ged",
    "hungarian-ged",
    "hungarian-mcs",
    "node-sim",
    "exas-l1",
    "exas-cosine",
    "exas-split-l1",
    "exas-split-cosine",
];

const ALGORITHM_HELP: &str = "\
Algorithms:
  astar-ged          exact graph edit distance (depth-first branch and bound, timeout)
  hungarian-ged      node-assignment approximation of graph edit distance
  hungarian-mcs      maximum-common-subgraph distance via node assignment
  node-sim           structural node-node similarity (labels ignored)
  exas-l1            Exas feature vectors, normalized L1
  exas-cosine        Exas feature vectors, cosine with shared-feature term
  exas-split-l1      exas-l1 per API package, averaged
  exas-split-cosine  exas-cosine per API package, averaged";

#[derive(Debug, Parser)]
#[command(name = "augdist", version, about = "Distances between API usage graphs", after_help = ALGORITHM_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the distance between two AUG files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check rule applicability and detection on a corpus and write CSV reports.
    Evaluate {
        /// Directory with `*.dot` entries, `labels.csv`, and `rules/`.
        corpus: PathBuf,
        /// Rule directory (defaults to `<corpus>/rules`).
        #[arg(long, env = "AUGDIST_RULES")]
        rules: Option<PathBuf>,
        /// Output directory for the CSV reports.
        #[arg(long, default_value = ".", env = "AUGDIST_OUT")]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Leave out entries named after the rule under evaluation.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set, env = "AUGDIST_EXCLUDE_SELF")]
        exclude_self: bool,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0, env = "AUGDIST_WORKERS")]
        workers: usize,
        /// Score detection for every rule, not only applicable ones.
        #[arg(long, env = "AUGDIST_DETECT_ALL")]
        detect_all: bool,
    },
    /// Dump the Exas feature vector of an AUG file as `feature<TAB>count` lines.
    Features { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CosineModeArg {
    Corrected,
    Literal,
}

impl From<CosineModeArg> for CosineMode {
    fn from(m: CosineModeArg) -> Self {
        match m {
            CosineModeArg::Corrected => CosineMode::Corrected,
            CosineModeArg::Literal => CosineMode::Literal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(
        long,
        default_value = "astar-ged",
        env = "AUGDIST_ALGORITHM",
        value_parser = PossibleValuesParser::new(ALGORITHM_NAMES)
    )]
    pub algorithm: String,
    /// Per-pair timeout in seconds for astar-ged.
    #[arg(long, default_value_t = 15.0, env = "AUGDIST_TIMEOUT")]
    pub timeout: f64,
    /// Weight of the shared-feature term in exas-cosine.
    #[arg(long, default_value_t = 0.5, env = "AUGDIST_LAMBDA")]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = CosineModeArg::Corrected, env = "AUGDIST_COSINE_MODE")]
    pub cosine_mode: CosineModeArg,
    /// Convergence tolerance for node-sim.
    #[arg(long, default_value_t = 1e-4, env = "AUGDIST_TOL")]
    pub tol: f64,
    /// Iteration cap for node-sim (even).
    #[arg(long, default_value_t = 100, env = "AUGDIST_MAX_ITER")]
    pub max_iter: usize,
}

impl RunArgs {
    pub fn metric(&self) -> Result<Metric, String> {
        let algorithm: Algorithm = self.algorithm.parse()?;
        if !(self.timeout.is_finite() && self.timeout >= 0.0) {
            return Err(format!("timeout must be a non-negative number of seconds, got {}", self.timeout));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        Ok(Metric::new(
            algorithm,
            Options {
                timeout: Duration::from_secs_f64(self.timeout),
                lambda: self.lambda,
                cosine_mode: self.cosine_mode.into(),
                tol: self.tol,
                max_iter: self.max_iter,
            },
        ))
    }
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match &e {
            EvalError::Layout(_) | EvalError::Io { .. } | EvalError::DuplicateEntry(_) => EXIT_INPUT,
            EvalError::Distance(d) if d.is_incomputable() => EXIT_INCOMPUTABLE,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

fn distance_failure(e: DistanceError) -> Failure {
    let code = match e {
        DistanceError::InvalidParameter(_) => EXIT_FAILURE,
        _ => EXIT_INCOMPUTABLE,
    };
    Failure::new(code, e.to_string())
}

fn read_aug(path: &Path) -> Result<Aug, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    parse_aug(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

/// Runs a parsed command, returning the text for stdout.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Dist { a, b, run } => {
            let metric = run.metric().map_err(|m| Failure::new(EXIT_FAILURE, m))?;
            let (ga, gb) = (read_aug(a)?, read_aug(b)?);
            let d = evaluation::DistanceFn::distance(&metric, &ga, &gb).map_err(distance_failure)?;
            Ok(format!("{d:.6}\n"))
        }
        Command::Features { file } => {
            let g = read_aug(file)?;
            let v = extract_features(&g).map_err(distance_failure)?;
            Ok(v.dump())
        }
        Command::Evaluate { corpus, rules, out, run, exclude_self, workers, detect_all } => {
            let metric = run.metric().map_err(|m| Failure::new(EXIT_FAILURE, m))?;
            let loaded = load_corpus(corpus, rules.as_deref())?;
            if !loaded.skipped.is_empty() {
                log::warn!("{} file(s) skipped", loaded.skipped.len());
            }
            let config = EvaluationConfig {
                algorithm_name: metric.algorithm.name().to_string(),
                exclude_self: *exclude_self,
                detect_all: *detect_all,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(*workers)
                .build()
                .map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot start worker pool: {e}")))?;
            let output = pool.install(|| run_evaluation(&loaded, &metric, &config))?;

            fs::create_dir_all(out).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", out.display())))?;
            applicability_csv(&output.verdicts, create(&out.join("applicability.csv"))?)?;
            detection_csv(&output.detections, create(&out.join("detection.csv"))?)?;
            timing_csv(&config.algorithm_name, &output.timings, create(&out.join("timing.csv"))?)?;
            Ok(format!("{}\n", output.summary_line()))
        }
    }
}
