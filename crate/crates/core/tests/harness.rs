mod common;

use gridmapf::harness::{load, persist, render_view, run_suite};
use gridmapf::maps_io::{expand_config, suite, MapRegistry, ViewConfig, ViewKind};
use gridmapf::metrics::compute_report;

fn registry() -> MapRegistry {
    let registry = MapRegistry::new();
    suite::register_generated(&registry).unwrap();
    registry
}

#[test]
fn worker_count_does_not_change_results() {
    let registry = registry();
    let config = common::determinism_config();
    assert_eq!(expand_config(&config, &registry).unwrap().len(), 64);
    let (one, m1) = run_suite(&config, &registry, 1).unwrap();
    let (eight, m8) = run_suite(&config, &registry, 8).unwrap();
    assert_eq!(one.len(), 256);
    assert_eq!(m1.error_count, 0);
    assert_eq!(m1.config_digest, m8.config_digest);
    assert_eq!(common::jsonl_without_runtime(&one), common::jsonl_without_runtime(&eight));
}

#[test]
fn persisted_results_give_the_same_report() {
    let registry = registry();
    let config = common::determinism_config();
    let (records, _) = run_suite(&config, &registry, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.jsonl");
    persist(&records, &path).unwrap();
    let loaded = load(&path).unwrap();
    assert_eq!(loaded, records);
    assert_eq!(compute_report(&loaded).unwrap(), compute_report(&records).unwrap());

    let report = compute_report(&records).unwrap();
    for alg in ["random", "astar", "greedy", "pp"] {
        let perf = report.metrics["performance"][alg];
        assert!((0.0..=1.0).contains(&perf.mean) && perf.ci95 >= 0.0 && perf.samples == 64);
    }
    assert_eq!(report.metrics["coordination"]["pp"].mean, 1.0);

    let view = ViewConfig {
        name: "per_alg".into(),
        kind: ViewKind::Table,
        group_by: vec!["algorithm".into(), "dataset".into()],
        metrics: vec!["soc".into(), "collisions".into()],
    };
    let table = render_view(&view, &records).unwrap();
    assert_eq!(table.lines().count(), 1 + 4 * 2);
}
