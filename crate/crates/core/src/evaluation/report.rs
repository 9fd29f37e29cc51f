//! Whole-corpus runs and their CSV reports.

use std::io::Write;
use std::time::Duration;

use super::{
    assess, score, ApplicabilityVerdict, Corpus, Dataset, DetectionReport, DistanceFn, EvalError, LabeledEntry,
};
use crate::graph::CorrectionRule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationConfig {
    /// Name written to the `algo` column of the timing report.
    pub algorithm_name: String,
    /// Drop entries named after the rule (`<id>` or `<id>.*`) before
    /// evaluating it.
    pub exclude_self: bool,
    /// Score every rule, not only the applicable ones.
    pub detect_all: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTiming {
    pub rule_id: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvaluationOutput {
    pub verdicts: Vec<ApplicabilityVerdict>,
    pub detections: Vec<DetectionReport>,
    pub timings: Vec<RuleTiming>,
    /// Rules without a verdict, with the reason.
    pub skipped_rules: Vec<(String, String)>,
}

impl EvaluationOutput {
    pub fn applicable_count(&self) -> usize {
        self.verdicts.iter().filter(|v| v.applicable).count()
    }

    /// `applicable: X/Y` over the rules that received a verdict.
    pub fn summary_line(&self) -> String {
        format!("applicable: {}/{}", self.applicable_count(), self.verdicts.len())
    }
}

fn is_own_entry(rule_id: &str, name: &str) -> bool {
    name == rule_id || name.strip_prefix(rule_id).is_some_and(|rest| rest.starts_with('.'))
}

fn entries_for<'a>(rule: &CorrectionRule, entries: &'a [LabeledEntry], exclude_self: bool) -> Vec<LabeledEntry> {
    entries.iter().filter(|e: &&'a LabeledEntry| !(exclude_self && is_own_entry(&rule.id, e.name()))).cloned().collect()
}

/// Rule errors that only disqualify that rule.
fn rule_local(e: &EvalError) -> bool {
    matches!(e, EvalError::InsufficientData { .. } | EvalError::EmptyGraph { .. })
}

/// Checks applicability of every rule against the labeled corpus, then
/// scores detection for the applicable ones (or all, with `detect_all`).
pub fn run_evaluation(
    corpus: &Corpus,
    dist: &dyn DistanceFn,
    config: &EvaluationConfig,
) -> Result<EvaluationOutput, EvalError> {
    let mut out = EvaluationOutput::default();
    for rule in &corpus.rules {
        let entries = entries_for(rule, &corpus.entries, config.exclude_self);
        let dataset = Dataset::from(entries.as_slice());
        let assessment = match assess(rule, &dataset, dist) {
            Ok(a) => a,
            Err(e) if rule_local(&e) => {
                log::warn!("rule `{}` skipped: {e}", rule.id);
                out.skipped_rules.push((rule.id.clone(), e.to_string()));
                continue;
            }
            Err(e) => return Err(e),
        };
        if assessment.incomputable > 0 {
            log::info!("rule `{}`: {} incomputable entries dropped", rule.id, assessment.incomputable);
        }
        out.timings.extend(assessment.timings.iter().map(|&elapsed| RuleTiming { rule_id: rule.id.clone(), elapsed }));
        let verdict = assessment.verdict;
        if verdict.applicable || config.detect_all {
            out.detections.push(score(rule, &entries, dist)?);
        }
        out.verdicts.push(verdict);
    }
    Ok(out)
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

pub fn applicability_csv<W: Write>(verdicts: &[ApplicabilityVerdict], w: W) -> Result<(), EvalError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "rule_id",
        "mean_rc_c",
        "mean_rc_m",
        "mean_rm_c",
        "mean_rm_m",
        "fix_separates",
        "misuse_separates",
        "correct_prefers_fix",
        "misuse_prefers_misuse",
        "applicable",
    ])?;
    for v in verdicts {
        wtr.write_record([
            v.rule_id.clone(),
            f6(v.mean_rc_c),
            f6(v.mean_rc_m),
            f6(v.mean_rm_c),
            f6(v.mean_rm_m),
            v.fix_separates.to_string(),
            v.misuse_separates.to_string(),
            v.correct_prefers_fix.to_string(),
            v.misuse_prefers_misuse.to_string(),
            v.applicable.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn detection_csv<W: Write>(reports: &[DetectionReport], w: W) -> Result<(), EvalError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["rule_id", "fp", "tp", "fn", "tn", "precision", "recall"])?;
    for r in reports {
        wtr.write_record([
            r.rule_id.clone(),
            r.fp.to_string(),
            r.tp.to_string(),
            r.fn_.to_string(),
            r.tn.to_string(),
            f6(r.precision),
            f6(r.recall),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn timing_csv<W: Write>(algo: &str, timings: &[RuleTiming], w: W) -> Result<(), EvalError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["algo", "rule_id", "elapsed_seconds"])?;
    for t in timings {
        wtr.write_record([algo.to_string(), t.rule_id.clone(), f6(t.elapsed.as_secs_f64())])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
