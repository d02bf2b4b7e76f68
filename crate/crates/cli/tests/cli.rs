use std::process::Command as Process;

use qka::report::{parse_text, to_text, REPORT_SCHEMA};
use qka::{execute, parse_args, render, CliError, Command, Format};
use qka_core::qka::KeyBits;
use serde_json::Value;

fn bin() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_qka"));
    p.env_remove("QKA_SEED");
    p
}

fn report(args: &[&str]) -> Value {
    execute(&parse_args(args).unwrap()).unwrap()
}

#[test]
fn parses_simulate_example() {
    let c = parse_args([
        "simulate", "--theta", "0.6283", "--trials", "100000", "--seed", "42",
    ])
    .unwrap();
    assert_eq!(c.command, Command::Simulate);
    assert_eq!(c.theta(), 0.6283);
    assert_eq!(
        (c.trials, c.seed, c.target, c.format),
        (100_000, 42, None, Format::Json)
    );
}

#[test]
fn parses_attack_example() {
    let c = parse_args([
        "attack", "--theta", "0.6283", "--target", "10", "--trials", "10000", "--seed", "7",
    ])
    .unwrap();
    assert_eq!(c.command, Command::Attack);
    assert_eq!(c.target, Some(KeyBits::K10));
    assert_eq!((c.trials, c.seed), (10_000, 7));
}

#[test]
fn quarter_pi_is_degenerate() {
    let err = parse_args(["simulate", "--theta", "0.7854"]).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("--theta")
            && msg.contains("degenerate parameters")
            && msg.contains("α²−β² = 0"),
        "{msg}"
    );
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn usage_errors_name_the_flag() {
    let cases: [(&[&str], &str); 5] = [
        (&["simulate", "--bogus", "1"], "--bogus"),
        (&["attack", "--theta", "0.6"], "--target"),
        (&["attack", "--target", "2"], "--target"),
        (&["simulate", "--trials", "0"], "--trials"),
        (&["nosignal", "--theta", "-0.1"], "--theta"),
    ];
    for (args, flag) in cases {
        let err = parse_args(args.iter().copied()).unwrap_err();
        assert!(err.to_string().contains(flag), "{args:?}: {err}");
        assert_eq!(err.exit_code(), 1, "{args:?}");
    }
}

#[test]
fn pi_over_eight_is_rejected_as_degenerate() {
    let theta = (std::f64::consts::PI / 8.0).to_string();
    let err = parse_args(["discriminate", "--theta", theta.as_str()]).unwrap_err();
    assert!(matches!(
        err,
        CliError::InvalidArg {
            flag: "--theta",
            ..
        }
    ));
    assert!(err.to_string().contains("collides"));
}

#[test]
fn target_only_with_attack() {
    let mut c = parse_args(["simulate"]).unwrap();
    c.target = Some(KeyBits::K01);
    assert!(matches!(
        execute(&c),
        Err(CliError::InvalidArg {
            flag: "--target",
            ..
        })
    ));
    let mut a = parse_args(["attack", "--target", "01"]).unwrap();
    a.target = None;
    assert!(matches!(execute(&a), Err(CliError::MissingTarget)));
}

#[test]
fn defaults() {
    let c = parse_args(["nosignal"]).unwrap();
    assert_eq!(c.theta(), std::f64::consts::PI / 5.0);
    assert_eq!((c.trials, c.seed), (qka::config::DEFAULT_TRIALS, 0));
}

#[test]
fn simulate_is_byte_deterministic() {
    let args = ["simulate", "--trials", "100000", "--seed", "42"];
    let c = parse_args(args).unwrap();
    let a = render(&c, &execute(&c).unwrap());
    let b = render(&c, &execute(&c).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["results"]["agreement_rate"], 1.0);
    assert_eq!(v["verdicts"]["keys_agree"], true);
    let total: u64 = v["results"]["key_histogram"]
        .as_object()
        .unwrap()
        .values()
        .map(|n| n.as_u64().unwrap())
        .sum();
    assert_eq!(total, 100_000);
}

#[test]
fn attack_hits_target_11() {
    let v = report(&[
        "attack", "--target", "11", "--trials", "10000", "--seed", "7",
    ]);
    assert_eq!(v["results"]["hit_rate"], 1.0);
    assert_eq!(v["results"]["hits"], 10_000);
    assert_eq!(v["results"]["forged_value"], 0.0);
    assert_eq!(v["results"]["sample_transcript"]["alice_key"], "11");
    assert_eq!(v["config"]["target"], "11");
}

#[test]
fn full_report_headline_numbers() {
    let v = report(&["full-report", "--trials", "200"]);
    assert_eq!(v["results"]["discriminate"]["success_probability"], 0.5);
    assert_eq!(v["results"]["discriminate"]["verdict"], "impossible");
    assert_eq!(v["results"]["nosignal"]["trace_distance"], 0.0);
    assert_eq!(v["results"]["nosignal"]["helstrom_success"], 0.5);
    for key in ["00", "01", "10", "11"] {
        assert_eq!(v["results"]["attack"][key]["hit_rate"], 1.0);
    }
    assert_eq!(v["verdicts"]["attack"]["target_forced"], true);
}

#[test]
fn oracle_values_are_flagged_unphysical() {
    let v = report(&["simulate", "--trials", "3"]);
    for t in v["results"]["sample_transcripts"].as_array().unwrap() {
        assert_eq!(t["oracle"]["unphysical"], true);
    }
}

#[test]
fn every_command_matches_schema() {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::JSONSchema::compile(&schema).unwrap();
    let runs: [&[&str]; 6] = [
        &["simulate", "--trials", "50", "--theta", "0.3"],
        &["attack", "--target", "00", "--trials", "50"],
        &["discriminate", "--theta", "0.1"],
        &["nosignal", "--theta", "0.7"],
        &["full-report", "--trials", "20"],
        &["simulate", "--trials", "1"],
    ];
    for args in runs {
        let v = report(args);
        if let Err(errors) = validator.validate(&v) {
            let msgs: Vec<String> = errors
                .map(|e| format!("{} at {}", e, e.instance_path))
                .collect();
            panic!("{args:?}: {msgs:?}");
        };
    }
    let mut broken = report(&["nosignal"]);
    broken["schema_version"] = "2".into();
    assert!(!validator.is_valid(&broken));
}

fn leaves(path: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let nested = |v: &Value| {
        matches!(v, Value::Object(_))
            || v.as_array()
                .is_some_and(|a| a.iter().any(|x| x.is_object()))
    };
    match v {
        Value::Object(m) => m
            .iter()
            .for_each(|(k, x)| leaves(&format!("{path}.{k}"), x, out)),
        Value::Array(a) if nested(v) => a
            .iter()
            .enumerate()
            .for_each(|(i, x)| leaves(&format!("{path}.{i}"), x, out)),
        _ => out.push((path.to_owned(), v.clone())),
    }
}

#[test]
fn text_and_json_carry_identical_numbers() {
    let v = report(&["full-report", "--trials", "30", "--seed", "3"]);
    let text = to_text(&v);
    let parsed = parse_text(&text);
    let mut expected = Vec::new();
    for key in ["config", "results", "verdicts"] {
        leaves(key, &v[key], &mut expected);
    }
    assert_eq!(parsed.len(), expected.len());
    for ((tp, tv), (jp, jv)) in parsed.iter().zip(&expected) {
        assert_eq!(tp, jp);
        match jv {
            Value::String(js) => assert_eq!(tv, js, "{tp}"),
            Value::Number(_) => {
                assert_eq!(tv, &jv.to_string(), "{tp}");
                assert_eq!(tv.parse::<f64>().unwrap(), jv.as_f64().unwrap(), "{tp}");
            }
            other => assert_eq!(&serde_json::from_str::<Value>(tv).unwrap(), other, "{tp}"),
        }
    }
}

#[test]
fn binary_exit_codes() {
    assert_eq!(
        bin().args(["nosignal"]).output().unwrap().status.code(),
        Some(0)
    );
    assert_eq!(
        bin()
            .args(["simulate", "--theta", "0.7854"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bin().args(["attack"]).output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(
        bin().args(["frobnicate"]).output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(
        bin().args(["--help"]).output().unwrap().status.code(),
        Some(0)
    );
    let dir = std::env::temp_dir()
        .join("qka-missing-dir-for-test")
        .join("x")
        .join("report.json");
    assert_eq!(
        bin()
            .args(["nosignal", "-o"])
            .arg(&dir)
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_falls_back_to_environment() {
    let with_env = bin()
        .args(["simulate", "--trials", "5"])
        .env("QKA_SEED", "42")
        .output()
        .unwrap();
    let with_flag = bin()
        .args(["simulate", "--trials", "5", "--seed", "42"])
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, with_flag.stdout);
    let v: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn writes_report_file() {
    let path = std::env::temp_dir().join(format!("qka-report-{}.txt", std::process::id()));
    let out = bin()
        .args(["discriminate", "--format", "text", "--output"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("qka discriminate report (schema 1)\n"));
    assert!(text.contains("results.success_probability = 0.5\n"));
    assert!(text.contains("verdicts.four_state = impossible\n"));
}
