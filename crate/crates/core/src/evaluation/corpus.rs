//! Corpus layout on disk: `*.dot` entries, a `labels.csv` manifest
//! (`name,label`), and a `rules/` directory of rule files. Entry and rule
//! names are file stems.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{EvalError, Label, LabeledEntry};
use crate::graph::dot::{parse_aug, parse_rule};
use crate::graph::CorrectionRule;

pub const LABELS_FILE: &str = "labels.csv";
pub const RULES_DIR: &str = "rules";

/// A file that could not be loaded, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Labeled entries sorted by name.
    pub entries: Vec<LabeledEntry>,
    /// Rules sorted by id.
    pub rules: Vec<CorrectionRule>,
    pub skipped: Vec<SkippedFile>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |source| EvalError::Io { path: path.display().to_string(), source }
}

/// `.dot` files directly inside `dir`, sorted by stem.
fn dot_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, EvalError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("dot") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            log::warn!("skipping non-UTF-8 file name {}", path.display());
            continue;
        };
        out.push((stem.to_string(), path));
    }
    out.sort();
    Ok(out)
}

pub fn load_labels(path: &Path) -> Result<BTreeMap<String, Label>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| EvalError::Layout(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| EvalError::Layout(format!("{} lacks a `{name}` column", path.display())))
    };
    let (name_col, label_col) = (column("name")?, column("label")?);
    let mut labels = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let name = record.get(name_col).unwrap_or_default().to_string();
        let raw = record.get(label_col).unwrap_or_default();
        let label =
            raw.parse::<Label>().map_err(|e| EvalError::Layout(format!("{}: entry `{name}`: {e}", path.display())))?;
        if labels.insert(name.clone(), label).is_some() {
            return Err(EvalError::Layout(format!("{}: entry `{name}` listed twice", path.display())));
        }
    }
    Ok(labels)
}

/// Parses every rule file in `dir`. Unparseable files are logged and
/// reported in the second return value.
pub fn load_rules(dir: &Path) -> Result<(Vec<CorrectionRule>, Vec<SkippedFile>), EvalError> {
    if !dir.is_dir() {
        return Err(EvalError::Layout(format!("rules directory {} not found", dir.display())));
    }
    let mut rules = Vec::new();
    let mut skipped = Vec::new();
    for (stem, path) in dot_files(dir)? {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        match parse_rule(&text) {
            Ok(mut rule) => {
                rule.misuse = rule.misuse.with_name(format!("{stem}.misuse"));
                rule.fix = rule.fix.with_name(format!("{stem}.fix"));
                rule.id = stem;
                rules.push(rule);
            }
            Err(e) => {
                log::warn!("skipping rule {}: {e}", path.display());
                skipped.push(SkippedFile { path, reason: e.to_string() });
            }
        }
    }
    Ok((rules, skipped))
}

/// Loads a corpus directory. `rules_dir` defaults to `<corpus>/rules`.
pub fn load_corpus(corpus_dir: &Path, rules_dir: Option<&Path>) -> Result<Corpus, EvalError> {
    if !corpus_dir.is_dir() {
        return Err(EvalError::Layout(format!("corpus directory {} not found", corpus_dir.display())));
    }
    let labels_path = corpus_dir.join(LABELS_FILE);
    if !labels_path.is_file() {
        return Err(EvalError::Layout(format!("missing {}", labels_path.display())));
    }
    let labels = load_labels(&labels_path)?;
    let default_rules = corpus_dir.join(RULES_DIR);
    let (rules, mut skipped) = load_rules(rules_dir.unwrap_or(&default_rules))?;

    let mut entries = Vec::new();
    let mut found = std::collections::HashSet::new();
    for (stem, path) in dot_files(corpus_dir)? {
        let Some(&label) = labels.get(&stem) else {
            log::warn!("skipping {}: not listed in {LABELS_FILE}", path.display());
            skipped.push(SkippedFile { path, reason: format!("not listed in {LABELS_FILE}") });
            continue;
        };
        found.insert(stem.clone());
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        match parse_aug(&text) {
            Ok(g) if g.is_empty() => {
                log::warn!("skipping {}: empty graph", path.display());
                skipped.push(SkippedFile { path, reason: "empty graph".into() });
            }
            Ok(g) => entries.push(LabeledEntry { aug: g.with_name(stem), label }),
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push(SkippedFile { path, reason: e.to_string() });
            }
        }
    }
    for name in labels.keys().filter(|n| !found.contains(*n)) {
        log::warn!("{LABELS_FILE} lists `{name}` but no {name}.dot exists");
    }
    Ok(Corpus { entries, rules, skipped })
}
