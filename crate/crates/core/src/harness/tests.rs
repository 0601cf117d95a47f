use super::*;

fn spec(json: &str) -> ExperimentSpec {
    ExperimentSpec::from_json(json).unwrap()
}

const SMALL: &str = r#"{"name": "small", "kind": "match", "n": 30, "b": 1, "walker": "greedy-path",
    "breaker": "random", "trials": 6, "seed_base": 40, "assertions": ["replay"]}"#;

#[test]
fn malformed_specs_are_rejected_before_any_trial() {
    assert!(matches!(
        ExperimentSpec::from_json("{"),
        Err(ConfigError::Malformed(_))
    ));
    assert!(matches!(
        ExperimentSpec::from_json(
            r#"{"name": "x", "kind": "match", "n": 9, "breaker": "random", "trials": 1, "bogus": 1}"#
        ),
        Err(ConfigError::Malformed(_))
    ));
    let base = r#"{"name": "x", "kind": "match", "n": 9, "walker": "random", "breaker": "random", "trials": 1"#;
    let with = |extra: &str| ExperimentSpec::from_json(&format!("{base}{extra}}}"));
    assert!(with("").is_ok());
    assert!(matches!(
        with(r#", "profile": "huge""#),
        Err(ConfigError::UnknownProfile(_))
    ));
    assert!(matches!(
        with(r#", "first": "X""#),
        Err(ConfigError::Invalid(_))
    ));
    assert!(matches!(
        with(r#", "assertions": ["tree_bounds"]"#),
        Err(ConfigError::Inapplicable { .. })
    ));
    let no_walker = r#"{"name": "x", "kind": "match", "n": 9, "breaker": "random", "trials": 1}"#;
    assert!(matches!(
        ExperimentSpec::from_json(no_walker),
        Err(ConfigError::Invalid(_))
    ));
    let bad_breaker = r#"{"name": "x", "kind": "tree", "n": 9, "breaker": "nobody", "trials": 1}"#;
    assert!(matches!(
        ExperimentSpec::from_json(bad_breaker),
        Err(ConfigError::UnknownStrategy { .. })
    ));
    let zero = r#"{"name": "x", "kind": "tree", "n": 9, "breaker": "random", "trials": 0}"#;
    assert!(matches!(
        ExperimentSpec::from_json(zero),
        Err(ConfigError::Invalid(_))
    ));
}

#[test]
fn identical_specs_give_identical_csv() {
    let s = spec(SMALL);
    let a = run_experiment(&s).unwrap();
    let b = run_experiment(&s).unwrap();
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.summary, b.summary);
    let mut lines = a.csv.lines();
    assert_eq!(lines.next(), Some("# wbl-csv kind=match version=1"));
    assert!(lines.next().unwrap().starts_with("trial,seed,walker"));
    let seeds: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(seeds, ["40", "41", "42", "43", "44", "45"]);
    assert!(a.summary.failures.is_empty(), "{:?}", a.summary.failures);
    assert_eq!(a.summary.spec_hash.len(), 64);
}

#[test]
fn failing_assertions_are_reported_with_seeds() {
    let mut s = spec(SMALL);
    s.assertions = vec![Assertion::CycleAtLeast(31)];
    let out = run_experiment(&s).unwrap();
    assert_eq!(out.summary.failures.len(), 6);
    assert_eq!(out.summary.failures[2].seed, 42);
    assert!(out.csv.lines().skip(2).all(|l| l.ends_with(",fail")));
}

#[test]
fn strategy_errors_surface_as_error_rows() {
    // The tree builder rejects a bias this large on a tiny board.
    let s =
        spec(r#"{"name": "t", "kind": "tree", "n": 12, "b": 6, "breaker": "random", "trials": 2}"#);
    let out = run_experiment(&s).unwrap();
    assert_eq!(out.summary.failures.len(), 2);
    assert!(out.summary.failures[0].reasons[0].starts_with("seed 0:"));
    assert!(out.csv.lines().skip(2).all(|l| l.ends_with(",error")));
}

#[test]
fn tree_campaign_recomputes_from_transcripts() {
    let s = spec(
        r#"{"name": "t", "kind": "tree", "n": 400, "b": 1, "profile": "scaled", "breaker": "isolateB",
            "trials": 3, "assertions": ["tree_bounds", "replay", "no_claim_violations"]}"#,
    );
    let out = run_experiment(&s).unwrap();
    assert!(
        out.summary.failures.is_empty(),
        "{:?}",
        out.summary.failures
    );
    let agg = &out.summary.aggregates["diameter"];
    assert!(agg.max <= out.summary.aggregates["diameter_bound"].min);
}

#[test]
fn outputs_land_in_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(SMALL);
    s.keep_transcripts = true;
    let out = run_experiment(&s).unwrap();
    let paths = write_outputs(&out, dir.path()).unwrap();
    assert_eq!(paths.len(), 2 + 6);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["aggregates", "failures", "spec_hash", "trials"]);
    let report = replay(&paths[2]).unwrap();
    assert_eq!(report.n, 30);
}

#[test]
fn edited_breaker_edge_diverges_at_its_line() {
    let s = spec(SMALL);
    let out = run_experiment(&s).unwrap();
    let text = out.transcripts[0].clone().unwrap();
    let (clean, _) = replay_text(&text).unwrap();
    assert_eq!(clean.n, 30);
    let lines: Vec<&str> = text.lines().collect();
    let wline = lines.iter().position(|l| l.starts_with("W ")).unwrap();
    let at = wline
        + lines[wline..]
            .iter()
            .position(|l| l.starts_with("B "))
            .unwrap();
    let mut edited: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    // Claim an edge Walker already owns instead.
    let w = lines[wline];
    let f: Vec<&str> = w.split(' ').collect();
    let (a, b): (usize, usize) = (f[1].parse().unwrap(), f[2].parse().unwrap());
    edited[at] = format!("B {}-{}", a.min(b), a.max(b));
    let err = replay_text(&(edited.join("\n") + "\n")).unwrap_err();
    assert_eq!(err.line(), at + 1, "{err}");
}
