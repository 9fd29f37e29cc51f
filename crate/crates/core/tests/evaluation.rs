mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use augdist::evaluation::{
    applicability_csv, benchmark, detection_csv, is_applicable, load_corpus, run_evaluation, score, Dataset,
    DetectionReport, EvaluationConfig, Label, LabeledEntry,
};
use augdist::{Algorithm, Aug, CorrectionRule, DistanceError, Metric, Options};
use common::*;
use proptest::prelude::*;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus")
}

fn golden(algo: &str, file: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden").join(algo).join(file)).unwrap()
}

fn config(algo: Algorithm) -> EvaluationConfig {
    EvaluationConfig { algorithm_name: algo.name().to_string(), exclude_self: true, detect_all: false }
}

fn own(rule: &str, name: &str) -> bool {
    name == rule || name.starts_with(&format!("{rule}."))
}

fn oracle_distance(a: &Aug, b: &Aug) -> f64 {
    (brute_force_ged(a, b) / ged_denominator(a, b)).min(1.0)
}

#[test]
fn astar_golden_agrees_with_exhaustive_search() {
    let corpus = load_corpus(&corpus_dir(), None).unwrap();
    assert!(corpus.skipped.is_empty());
    let mut expected = String::from(
        "rule_id,mean_rc_c,mean_rc_m,mean_rm_c,mean_rm_m,fix_separates,misuse_separates,correct_prefers_fix,misuse_prefers_misuse,applicable\n",
    );
    for rule in &corpus.rules {
        let mut sums = [0.0f64; 4];
        let mut values: [Vec<f64>; 4] = Default::default();
        for e in corpus.entries.iter().filter(|e| !own(&rule.id, e.name())) {
            let (to_fix, to_misuse) = (oracle_distance(&rule.fix, &e.aug), oracle_distance(&rule.misuse, &e.aug));
            let side = usize::from(e.label == Label::Misuse);
            values[side].push(to_fix);
            values[2 + side].push(to_misuse);
        }
        for (sum, v) in sums.iter_mut().zip(values.iter_mut()) {
            v.sort_by(f64::total_cmp);
            *sum = v.iter().sum::<f64>() / v.len() as f64;
        }
        let [rc_c, rc_m, rm_c, rm_m] = sums;
        let flags = [rc_c < rc_m, rm_c > rm_m, rc_c < rm_c, rc_m > rm_m];
        expected.push_str(&format!(
            "{},{rc_c:.6},{rc_m:.6},{rm_c:.6},{rm_m:.6},{},{},{},{},{}\n",
            rule.id,
            flags[0],
            flags[1],
            flags[2],
            flags[3],
            flags.iter().all(|f| *f)
        ));
    }
    assert_eq!(golden("astar-ged", "applicability.csv"), expected);
}

#[test]
fn evaluation_is_deterministic() {
    let corpus = load_corpus(&corpus_dir(), None).unwrap();
    for algo in Algorithm::ALL {
        let metric = Metric::new(algo, Options::default());
        let render = || {
            let out = run_evaluation(&corpus, &metric, &config(algo)).unwrap();
            let mut a = Vec::new();
            applicability_csv(&out.verdicts, &mut a).unwrap();
            let mut d = Vec::new();
            detection_csv(&out.detections, &mut d).unwrap();
            (a, d)
        };
        assert_eq!(render(), render(), "{algo}");
    }
}

#[test]
fn exclude_self_changes_the_pool() {
    let corpus = load_corpus(&corpus_dir(), None).unwrap();
    let metric = Metric::new(Algorithm::HungarianGed, Options::default());
    let with = run_evaluation(&corpus, &metric, &config(Algorithm::HungarianGed)).unwrap();
    let mut cfg = config(Algorithm::HungarianGed);
    cfg.exclude_self = false;
    let without = run_evaluation(&corpus, &metric, &cfg).unwrap();
    let used = |o: &augdist::evaluation::EvaluationOutput, id: &str| {
        let v = o.verdicts.iter().find(|v| v.rule_id == id).unwrap();
        v.correct_used + v.misuse_used
    };
    assert_eq!(used(&with, "close_stream") + 1, used(&without, "close_stream"));
    assert_eq!(used(&with, "null_check"), used(&without, "null_check"));
}

#[test]
fn unparseable_entry_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
        }
    }
    fs::create_dir(dir.path().join("rules")).unwrap();
    for entry in fs::read_dir(corpus_dir().join("rules")).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, dir.path().join("rules").join(path.file_name().unwrap())).unwrap();
    }
    fs::write(dir.path().join("stream_ok_1.dot"), "digraph broken { a [label=\"x\" ").unwrap();
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert_eq!(corpus.skipped.len(), 1);
    assert!(corpus.skipped[0].path.ends_with("stream_ok_1.dot"));
    assert_eq!(corpus.entries.len(), 12);
    let metric = Metric::new(Algorithm::ExasL1, Options::default());
    let out = run_evaluation(&corpus, &metric, &config(Algorithm::ExasL1)).unwrap();
    assert_eq!(out.verdicts.len(), 3);
}

#[test]
fn missing_manifest_is_a_layout_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("rules")).unwrap();
    assert!(matches!(load_corpus(dir.path(), None), Err(augdist::evaluation::EvalError::Layout(_))));
}

fn labeled(rule: &CorrectionRule, n_correct: usize, n_misuse: usize) -> Vec<LabeledEntry> {
    let mut out = Vec::new();
    for i in 0..n_correct {
        out.push(LabeledEntry { aug: rule.fix.clone().with_name(format!("c{i}")), label: Label::Correct });
    }
    for i in 0..n_misuse {
        out.push(LabeledEntry { aug: rule.misuse.clone().with_name(format!("m{i}")), label: Label::Misuse });
    }
    out
}

fn first_rule() -> CorrectionRule {
    load_corpus(&corpus_dir(), None).unwrap().rules.remove(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_algebra(entries in prop::collection::vec((aug_strategy(4, 5), any::<bool>()), 1..12)) {
        let rule = first_rule();
        let labeled: Vec<LabeledEntry> = entries
            .into_iter()
            .enumerate()
            .map(|(i, (g, m))| LabeledEntry {
                aug: g.with_name(format!("e{i}")),
                label: if m { Label::Misuse } else { Label::Correct },
            })
            .collect();
        let metric = Metric::new(Algorithm::NodeSim, Options::default());
        let r = score(&rule, &labeled, &metric).unwrap();
        let misuses = labeled.iter().filter(|e| e.label == Label::Misuse).count();
        prop_assert_eq!(r.evaluated() + r.skipped, labeled.len());
        prop_assert!(r.tp + r.fn_ <= misuses);
        prop_assert!(r.fp + r.tn <= labeled.len() - misuses);
        let exact = score(&rule, &labeled, &Metric::new(Algorithm::HungarianGed, Options::default())).unwrap();
        prop_assert_eq!(exact.skipped, 0);
        prop_assert_eq!(exact.tp + exact.fn_, misuses);
        prop_assert_eq!(exact.fp + exact.tn, labeled.len() - misuses);
        let again = DetectionReport::from_counts(exact.rule_id.clone(), exact.tp, exact.fp, exact.tn, exact.fn_);
        prop_assert_eq!(again, exact);
    }

    #[test]
    fn applicability_ignores_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let corpus = load_corpus(&corpus_dir(), None).unwrap();
        let metric = Metric::new(Algorithm::ExasCosine, Options::default());
        let rule = &corpus.rules[0];
        let base = Dataset::from(corpus.entries.as_slice());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = base.clone();
        shuffled.correct.shuffle(&mut rng);
        shuffled.misuse.shuffle(&mut rng);
        let a = is_applicable(rule, &base, &metric).unwrap();
        let b = is_applicable(rule, &shuffled, &metric).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn instantaneous_stub_has_equal_mean_and_median() {
    let rule = first_rule();
    let stub = |_: &Aug, _: &Aug| -> Result<f64, DistanceError> { Ok(0.0) };
    let ds = Dataset::from(labeled(&rule, 5, 5).as_slice());
    let t = benchmark(std::slice::from_ref(&rule), &ds, &stub).unwrap();
    assert_eq!(t.summary.count, 5);
    assert!(t.summary.mean < Duration::from_millis(5));
    assert!(t.summary.median < Duration::from_millis(5));
}

#[test]
fn slow_outliers_pull_the_mean_above_the_median() {
    let rule = first_rule();
    let stub = |_: &Aug, e: &Aug| -> Result<f64, DistanceError> {
        if e.name() == "c3" || e.name() == "c11" {
            std::thread::sleep(Duration::from_millis(60));
        }
        Ok(0.5)
    };
    let ds = Dataset::from(labeled(&rule, 20, 20).as_slice());
    let t = benchmark(std::slice::from_ref(&rule), &ds, &stub).unwrap();
    assert_eq!(t.summary.count, 20);
    assert!(t.summary.mean >= t.summary.median);
    assert!(t.summary.mean > t.summary.median * 2, "{:?}", t.summary);
}

#[test]
fn incomputable_entries_shrink_the_denominator() {
    let rule = first_rule();
    let stub = |_: &Aug, e: &Aug| -> Result<f64, DistanceError> {
        match e.name() {
            "c0" => Err(DistanceError::Timeout),
            "m1" => Err(DistanceError::DegenerateStructure("stub".into())),
            n if n.starts_with('c') => Ok(0.1),
            _ => Ok(0.9),
        }
    };
    let ds = Dataset::from(labeled(&rule, 3, 3).as_slice());
    let v = is_applicable(&rule, &ds, &stub).unwrap();
    assert_eq!((v.correct_used, v.misuse_used), (2, 2));
    let entries = labeled(&rule, 3, 3);
    let r = score(&rule, &entries, &stub).unwrap();
    assert_eq!(r.skipped, 2);
    assert_eq!(r.evaluated(), 4);
}
