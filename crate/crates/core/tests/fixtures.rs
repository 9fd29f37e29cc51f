use std::path::Path;
use std::time::Duration;

use augdist::evaluation::{detect, DistanceFn};
use augdist::graph::dot::{parse_aug, parse_rule, serialize_aug, serialize_rule};
use augdist::graph::split_by_api;
use augdist::{Algorithm, Aug, CorrectionRule, Metric, Options};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixtures").join(name)).unwrap()
}

fn running_example() -> Aug {
    parse_aug(&fixture("compute_something.dot")).unwrap()
}

fn addition_rule() -> CorrectionRule {
    parse_rule(&fixture("add_condition.dot")).unwrap()
}

#[test]
fn running_example_shape() {
    let g = running_example();
    assert_eq!(g.name(), "computeSomething");
    assert_eq!(g.node_count(), 9);
    let labels: std::collections::BTreeSet<&str> = g.edges().iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["def", "order", "para", "recv", "sel"]);
    let ret = &g.nodes()[g.node_index("ret").unwrap()];
    assert_eq!(ret.api, "");
}

#[test]
fn running_example_round_trips() {
    let g = running_example();
    let text = serialize_aug(&g);
    let back = parse_aug(&text).unwrap();
    assert_eq!(back, g);
    assert_eq!(serialize_aug(&back), text);
}

#[test]
fn running_example_splits_off_unresolved_nodes() {
    let parts = split_by_api(&running_example()).unwrap();
    assert_eq!(parts.keys().map(String::as_str).collect::<Vec<_>>(), ["com.example", "misc"]);
    let misc: Vec<&str> = parts["misc"].nodes().iter().map(|n| n.id.as_str()).collect();
    assert_eq!(misc, ["unknown", "ret"]);
    assert_eq!(parts["misc"].edge_count(), 1);
    assert_eq!(parts["com.example"].node_count(), 7);
    // result -> unknown crosses packages and is dropped
    assert_eq!(parts["com.example"].edge_count(), 12);
}

#[test]
fn addition_rule_structure() {
    let rule = addition_rule();
    assert_eq!(rule.id, "add_condition");
    assert_eq!(rule.misuse.node_count(), 4);
    assert_eq!(rule.fix.node_count(), 5);
    assert!(rule.misuse.node_index("m_check").is_none());
    assert!(rule.fix.node_index("f_check").is_some());
    let additions: Vec<_> = rule.mapping.iter().filter(|m| m.is_addition()).collect();
    assert_eq!(additions.len(), 1);
    assert_eq!(additions[0].fix.as_deref(), Some("f_check"));
    assert_eq!(rule.mapping.len(), 5);
    assert!(rule.misuse.edges().iter().all(|e| e.label != "transform"));

    let again = parse_rule(&serialize_rule(&rule)).unwrap();
    assert_eq!(again, rule);
}

#[test]
fn running_example_is_closer_to_the_fix() {
    let rule = addition_rule();
    let g = running_example();
    let options = Options { timeout: Duration::from_secs(30), ..Options::default() };
    for algo in [
        Algorithm::AstarGed,
        Algorithm::HungarianGed,
        Algorithm::HungarianMcs,
        Algorithm::ExasL1,
        Algorithm::ExasCosine,
    ] {
        let metric = Metric::new(algo, options);
        let to_fix = metric.distance(&rule.fix, &g).unwrap();
        let to_misuse = metric.distance(&rule.misuse, &g).unwrap();
        assert!(to_fix <= to_misuse, "{algo}: {to_fix} vs {to_misuse}");
        assert!(!detect(&rule, &g, &metric).unwrap().unwrap(), "{algo}");
    }
}
