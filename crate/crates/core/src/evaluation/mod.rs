//! Evaluation harness: rule applicability over a dataset of correct usages
//! and misuses, misuse detection with precision/recall, and timing.
//!
//! Distances are always taken with the rule side as the first argument.

mod corpus;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::exas::{self, CosineMode, SplitBase};
use crate::ged::{self, CostModel};
use crate::graph::{Aug, CorrectionRule};
use crate::{mcs, node_similarity, DistanceError};

pub use corpus::{load_corpus, load_labels, load_rules, Corpus, SkippedFile};
pub use report::{
    applicability_csv, detection_csv, run_evaluation, timing_csv, EvaluationConfig, EvaluationOutput, RuleTiming,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    AstarGed,
    HungarianGed,
    HungarianMcs,
    NodeSim,
    ExasL1,
    ExasCosine,
    ExasSplitL1,
    ExasSplitCosine,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::AstarGed,
        Algorithm::HungarianGed,
        Algorithm::HungarianMcs,
        Algorithm::NodeSim,
        Algorithm::ExasL1,
        Algorithm::ExasCosine,
        Algorithm::ExasSplitL1,
        Algorithm::ExasSplitCosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AstarGed => "astar-ged",
            Algorithm::HungarianGed => "hungarian-ged",
            Algorithm::HungarianMcs => "hungarian-mcs",
            Algorithm::NodeSim => "node-sim",
            Algorithm::ExasL1 => "exas-l1",
            Algorithm::ExasCosine => "exas-cosine",
            Algorithm::ExasSplitL1 => "exas-split-l1",
            Algorithm::ExasSplitCosine => "exas-split-cosine",
        }
    }

    /// Whether d(a, b) = d(b, a) holds by construction.
    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            Algorithm::AstarGed
                | Algorithm::HungarianGed
                | Algorithm::HungarianMcs
                | Algorithm::ExasL1
                | Algorithm::ExasSplitL1
        )
    }

    /// Whether d(G, G) = 0 for every graph. Node similarity compares
    /// structure only and never reaches 0 on its own.
    pub fn respects_identity(self) -> bool {
        self != Algorithm::NodeSim
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            format!("unknown algorithm `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

/// Tuning knobs shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub timeout: Duration,
    pub lambda: f64,
    pub cosine_mode: CosineMode,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            timeout: ged::DEFAULT_TIMEOUT,
            lambda: exas::DEFAULT_LAMBDA,
            cosine_mode: CosineMode::Corrected,
            tol: node_similarity::DEFAULT_TOLERANCE,
            max_iter: node_similarity::DEFAULT_MAX_ITER,
        }
    }
}

/// A distance between a reference graph and another graph.
pub trait DistanceFn: Sync {
    fn distance(&self, reference: &Aug, other: &Aug) -> Result<f64, DistanceError>;
}

impl<F> DistanceFn for F
where
    F: Fn(&Aug, &Aug) -> Result<f64, DistanceError> + Sync,
{
    fn distance(&self, reference: &Aug, other: &Aug) -> Result<f64, DistanceError> {
        self(reference, other)
    }
}

/// One of the eight algorithms with its options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub algorithm: Algorithm,
    pub options: Options,
}

impl Metric {
    pub fn new(algorithm: Algorithm, options: Options) -> Self {
        Metric { algorithm, options }
    }
}

impl DistanceFn for Metric {
    fn distance(&self, a: &Aug, b: &Aug) -> Result<f64, DistanceError> {
        let o = &self.options;
        match self.algorithm {
            Algorithm::AstarGed => ged::dist_ged_astar(a, b, &CostModel::ged(), o.timeout),
            Algorithm::HungarianGed => ged::dist_ged_hungarian(a, b, &CostModel::ged()),
            Algorithm::HungarianMcs => mcs::dist_mcs_hungarian(a, b),
            Algorithm::NodeSim => node_similarity::dist_node_sim(a, b, o.tol, o.max_iter),
            Algorithm::ExasL1 => exas::dist_exas_l1(a, b),
            Algorithm::ExasCosine => exas::dist_exas_cosine(a, b, o.lambda, o.cosine_mode),
            Algorithm::ExasSplitL1 => exas::dist_exas_split(a, b, SplitBase::L1, o.lambda, o.cosine_mode),
            Algorithm::ExasSplitCosine => exas::dist_exas_split(a, b, SplitBase::Cosine, o.lambda, o.cosine_mode),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("graph `{entry}` is empty")]
    EmptyGraph { entry: String },
    #[error("rule `{rule}` has no computable {partition} entries")]
    InsufficientData { rule: String, partition: &'static str },
    #[error("duplicate entry name `{0}`")]
    DuplicateEntry(String),
    #[error("{0}")]
    Distance(DistanceError),
    #[error("corpus layout: {0}")]
    Layout(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<DistanceError> for EvalError {
    fn from(e: DistanceError) -> Self {
        match e {
            DistanceError::EmptyGraph(entry) => EvalError::EmptyGraph { entry },
            other => EvalError::Distance(other),
        }
    }
}

fn non_empty(g: &Aug) -> Result<(), EvalError> {
    if g.is_empty() {
        Err(EvalError::EmptyGraph { entry: g.name().to_string() })
    } else {
        Ok(())
    }
}

/// Splits a distance result into a value, an incomputable marker, or a hard
/// error.
fn soft<T>(r: Result<T, DistanceError>) -> Result<Result<T, DistanceError>, EvalError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_incomputable() => Ok(Err(e)),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceQuadruple {
    pub d_rc_c: f64,
    pub d_rc_m: f64,
    pub d_rm_c: f64,
    pub d_rm_m: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadrupleOutcome {
    Computed(DistanceQuadruple),
    Incomputable { reason: DistanceError, elapsed: Duration },
}

impl QuadrupleOutcome {
    pub fn elapsed(&self) -> Duration {
        match self {
            QuadrupleOutcome::Computed(q) => q.elapsed,
            QuadrupleOutcome::Incomputable { elapsed, .. } => *elapsed,
        }
    }
}

/// The four distances between the rule's fix/misuse and a correct usage
/// `c` / misuse `m`, timed together.
pub fn quadruple(
    rule: &CorrectionRule,
    c: &Aug,
    m: &Aug,
    dist: &dyn DistanceFn,
) -> Result<QuadrupleOutcome, EvalError> {
    for g in [&rule.fix, &rule.misuse, c, m] {
        non_empty(g)?;
    }
    let start = Instant::now();
    let values = [
        soft(dist.distance(&rule.fix, c))?,
        soft(dist.distance(&rule.fix, m))?,
        soft(dist.distance(&rule.misuse, c))?,
        soft(dist.distance(&rule.misuse, m))?,
    ];
    let elapsed = start.elapsed();
    let mut out = [0.0; 4];
    for (slot, v) in out.iter_mut().zip(values) {
        match v {
            Ok(d) => *slot = d,
            Err(reason) => return Ok(QuadrupleOutcome::Incomputable { reason, elapsed }),
        }
    }
    Ok(QuadrupleOutcome::Computed(DistanceQuadruple {
        d_rc_c: out[0],
        d_rc_m: out[1],
        d_rm_c: out[2],
        d_rm_m: out[3],
        elapsed,
    }))
}

/// Correct usages `C` and misuses `M`.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub correct: Vec<Aug>,
    pub misuse: Vec<Aug>,
}

impl Dataset {
    pub fn new(correct: Vec<Aug>, misuse: Vec<Aug>) -> Result<Self, EvalError> {
        let mut seen = std::collections::HashSet::new();
        for g in correct.iter().chain(&misuse) {
            if !seen.insert(g.name()) {
                return Err(EvalError::DuplicateEntry(g.name().to_string()));
            }
        }
        Ok(Dataset { correct, misuse })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Correct,
    Misuse,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "correct",
            Label::Misuse => "misuse",
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "correct" => Ok(Label::Correct),
            "misuse" => Ok(Label::Misuse),
            other => Err(format!("unknown label `{other}` (expected `correct` or `misuse`)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LabeledEntry {
    pub aug: Aug,
    pub label: Label,
}

impl LabeledEntry {
    pub fn name(&self) -> &str {
        self.aug.name()
    }
}

impl From<&[LabeledEntry]> for Dataset {
    fn from(entries: &[LabeledEntry]) -> Self {
        let (correct, misuse): (Vec<&LabeledEntry>, Vec<&LabeledEntry>) =
            entries.iter().partition(|e| e.label == Label::Correct);
        Dataset {
            correct: correct.into_iter().map(|e| e.aug.clone()).collect(),
            misuse: misuse.into_iter().map(|e| e.aug.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplicabilityVerdict {
    pub rule_id: String,
    /// Mean d(fix, c) over C.
    pub mean_rc_c: f64,
    /// Mean d(fix, m) over M.
    pub mean_rc_m: f64,
    /// Mean d(misuse, c) over C.
    pub mean_rm_c: f64,
    /// Mean d(misuse, m) over M.
    pub mean_rm_m: f64,
    /// The fix is closer to correct usages than to misuses.
    pub fix_separates: bool,
    /// The misuse is closer to misuses than to correct usages.
    pub misuse_separates: bool,
    /// Correct usages are closer to the fix than to the misuse.
    pub correct_prefers_fix: bool,
    /// Misuses are closer to the misuse than to the fix.
    pub misuse_prefers_misuse: bool,
    pub applicable: bool,
    pub correct_used: usize,
    pub misuse_used: usize,
}

impl ApplicabilityVerdict {
    pub fn from_means(rule_id: impl Into<String>, rc_c: f64, rc_m: f64, rm_c: f64, rm_m: f64) -> Self {
        let fix_separates = rc_c < rc_m;
        let misuse_separates = rm_c > rm_m;
        let correct_prefers_fix = rc_c < rm_c;
        let misuse_prefers_misuse = rc_m > rm_m;
        ApplicabilityVerdict {
            rule_id: rule_id.into(),
            mean_rc_c: rc_c,
            mean_rc_m: rc_m,
            mean_rm_c: rm_c,
            mean_rm_m: rm_m,
            fix_separates,
            misuse_separates,
            correct_prefers_fix,
            misuse_prefers_misuse,
            applicable: fix_separates && misuse_separates && correct_prefers_fix && misuse_prefers_misuse,
            correct_used: 0,
            misuse_used: 0,
        }
    }
}

/// Distances from the fix and the misuse of a rule to one entry.
#[derive(Debug, Clone, Copy, PartialEq)]
struct EntryPair {
    to_fix: f64,
    to_misuse: f64,
}

fn entry_pair(
    rule: &CorrectionRule,
    e: &Aug,
    dist: &dyn DistanceFn,
) -> Result<Result<EntryPair, DistanceError>, EvalError> {
    non_empty(e)?;
    let to_fix = match soft(dist.distance(&rule.fix, e))? {
        Ok(d) => d,
        Err(reason) => return Ok(Err(reason)),
    };
    Ok(soft(dist.distance(&rule.misuse, e))?.map(|to_misuse| EntryPair { to_fix, to_misuse }))
}

// Order-independent mean.
fn mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Verdict plus the wall time of every quadruple computed for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub verdict: ApplicabilityVerdict,
    pub timings: Vec<Duration>,
    pub incomputable: usize,
}

/// Applicability of a rule, keeping quadruple timings. The i-th correct
/// usage and i-th misuse form one timed quadruple; when the partitions
/// differ in size the leftovers are timed alone.
pub fn assess(rule: &CorrectionRule, dataset: &Dataset, dist: &dyn DistanceFn) -> Result<Assessment, EvalError> {
    non_empty(&rule.fix)?;
    non_empty(&rule.misuse)?;
    let groups = dataset.correct.len().max(dataset.misuse.len());
    type Group = (Option<Result<EntryPair, DistanceError>>, Option<Result<EntryPair, DistanceError>>, Duration);
    let results: Vec<Group> = (0..groups)
        .into_par_iter()
        .map(|i| -> Result<Group, EvalError> {
            let start = Instant::now();
            let c = dataset.correct.get(i).map(|c| entry_pair(rule, c, dist)).transpose()?;
            let m = dataset.misuse.get(i).map(|m| entry_pair(rule, m, dist)).transpose()?;
            Ok((c, m, start.elapsed()))
        })
        .collect::<Result<_, _>>()?;

    let mut rc_c = Vec::new();
    let mut rm_c = Vec::new();
    let mut rc_m = Vec::new();
    let mut rm_m = Vec::new();
    let mut timings = Vec::with_capacity(results.len());
    let mut incomputable = 0;
    for (c, m, elapsed) in results {
        timings.push(elapsed);
        match c {
            Some(Ok(p)) => {
                rc_c.push(p.to_fix);
                rm_c.push(p.to_misuse);
            }
            Some(Err(e)) => {
                log::debug!("rule `{}`: correct entry skipped: {e}", rule.id);
                incomputable += 1;
            }
            None => {}
        }
        match m {
            Some(Ok(p)) => {
                rc_m.push(p.to_fix);
                rm_m.push(p.to_misuse);
            }
            Some(Err(e)) => {
                log::debug!("rule `{}`: misuse entry skipped: {e}", rule.id);
                incomputable += 1;
            }
            None => {}
        }
    }
    if rc_c.is_empty() {
        return Err(EvalError::InsufficientData { rule: rule.id.clone(), partition: "correct" });
    }
    if rc_m.is_empty() {
        return Err(EvalError::InsufficientData { rule: rule.id.clone(), partition: "misuse" });
    }
    let (correct_used, misuse_used) = (rc_c.len(), rc_m.len());
    let mut verdict = ApplicabilityVerdict::from_means(
        rule.id.clone(),
        mean(&mut rc_c),
        mean(&mut rc_m),
        mean(&mut rm_c),
        mean(&mut rm_m),
    );
    verdict.correct_used = correct_used;
    verdict.misuse_used = misuse_used;
    Ok(Assessment { verdict, timings, incomputable })
}

/// Whether the rule is applicable on the dataset.
pub fn is_applicable(
    rule: &CorrectionRule,
    dataset: &Dataset,
    dist: &dyn DistanceFn,
) -> Result<ApplicabilityVerdict, EvalError> {
    assess(rule, dataset, dist).map(|a| a.verdict)
}

/// Flags `entry` as a misuse iff it is strictly closer to the rule's misuse
/// than to its fix. Incomputable pairs surface as `Err`.
pub fn detect(
    rule: &CorrectionRule,
    entry: &Aug,
    dist: &dyn DistanceFn,
) -> Result<Result<bool, DistanceError>, EvalError> {
    non_empty(&rule.fix)?;
    non_empty(&rule.misuse)?;
    Ok(entry_pair(rule, entry, dist)?.map(|p| p.to_fix > p.to_misuse))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub rule_id: String,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    /// Entries whose distances could not be computed.
    pub skipped: usize,
}

impl DetectionReport {
    pub fn from_counts(rule_id: impl Into<String>, tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        DetectionReport {
            rule_id: rule_id.into(),
            tp,
            fp,
            tn,
            fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            skipped: 0,
        }
    }

    pub fn evaluated(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Runs [`detect`] over labeled entries and tallies the confusion matrix.
pub fn score(
    rule: &CorrectionRule,
    labeled: &[LabeledEntry],
    dist: &dyn DistanceFn,
) -> Result<DetectionReport, EvalError> {
    let flags: Vec<Result<bool, DistanceError>> =
        labeled.par_iter().map(|e| detect(rule, &e.aug, dist)).collect::<Result<_, _>>()?;
    let (mut tp, mut fp, mut tn, mut fn_, mut skipped) = (0, 0, 0, 0, 0);
    for (entry, flag) in labeled.iter().zip(flags) {
        match (flag, entry.label) {
            (Ok(true), Label::Misuse) => tp += 1,
            (Ok(true), Label::Correct) => fp += 1,
            (Ok(false), Label::Misuse) => fn_ += 1,
            (Ok(false), Label::Correct) => tn += 1,
            (Err(e), _) => {
                log::debug!("rule `{}`: entry `{}` skipped: {e}", rule.id, entry.name());
                skipped += 1;
            }
        }
    }
    let mut report = DetectionReport::from_counts(rule.id.clone(), tp, fp, tn, fn_);
    report.skipped = skipped;
    Ok(report)
}

/// Mean and median of a set of durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSummary {
    pub count: usize,
    pub mean: Duration,
    pub median: Duration,
}

impl TimingSummary {
    pub fn from_durations(durations: &[Duration]) -> Self {
        if durations.is_empty() {
            return TimingSummary { count: 0, mean: Duration::ZERO, median: Duration::ZERO };
        }
        let mut sorted = durations.to_vec();
        sorted.sort();
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2 };
        let mean = sorted.iter().sum::<Duration>() / n as u32;
        TimingSummary { count: n, mean, median }
    }
}

/// Per-quadruple elapsed times for every rule over one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub rows: Vec<(String, Duration)>,
    pub summary: TimingSummary,
}

pub fn benchmark(rules: &[CorrectionRule], dataset: &Dataset, dist: &dyn DistanceFn) -> Result<TimingTable, EvalError> {
    let mut rows = Vec::new();
    for rule in rules {
        match assess(rule, dataset, dist) {
            Ok(a) => rows.extend(a.timings.into_iter().map(|t| (rule.id.clone(), t))),
            Err(EvalError::InsufficientData { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let durations: Vec<Duration> = rows.iter().map(|(_, d)| *d).collect();
    Ok(TimingTable { summary: TimingSummary::from_durations(&durations), rows })
}
