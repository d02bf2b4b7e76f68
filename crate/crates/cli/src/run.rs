//! Dispatch from a [`RunConfig`] to the simulator and assembly of the report.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use qka_core::discrim::lemma1_verdict;
use qka_core::nosignal::nosignal_report;
use qka_core::qka::{honest_branch, run_honest, run_malicious_bob, KeyBits, ProtocolParams};
use qka_core::qsim::{BellLabel, RandomSource};

use crate::config::{Command, RunConfig};
use crate::report::{self, num, SCHEMA_VERSION};
use crate::CliError;

/// Transcripts kept verbatim in a `simulate` report.
pub const SAMPLE_TRANSCRIPTS: u64 = 3;

/// Outcome frequencies further than this many standard deviations from 1/4
/// fail the `simulate` verdict.
const FREQUENCY_SIGMAS: f64 = 5.0;

#[derive(Clone, Copy, Default)]
struct Tally {
    keys: [u64; 4],
    outcomes: [u64; 4],
    agreed: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..4 {
            self.keys[i] += other.keys[i];
            self.outcomes[i] += other.outcomes[i];
        }
        self.agreed += other.agreed;
        self
    }
}

/// Runs the configured command and returns the report document.
pub fn execute(config: &RunConfig) -> Result<Value, CliError> {
    check(config)?;
    let p = &config.params;
    let (results, verdicts) = match config.command {
        Command::Simulate => simulate(p, config.trials, config.seed)?,
        Command::Attack => attack(
            p,
            config.target.ok_or(CliError::MissingTarget)?,
            config.trials,
            config.seed,
        )?,
        Command::Discriminate => discriminate(p)?,
        Command::Nosignal => nosignal(p)?,
        Command::FullReport => full_report(p, config.trials, config.seed)?,
    };
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": config.command.name(),
        "config": config_json(config),
        "results": results,
        "verdicts": verdicts,
    }))
}

fn check(config: &RunConfig) -> Result<(), CliError> {
    if config.trials == 0 {
        return Err(CliError::InvalidArg {
            flag: "--trials",
            message: "at least one trial is required".into(),
        });
    }
    if config.command != Command::Attack && config.target.is_some() {
        return Err(CliError::InvalidArg {
            flag: "--target",
            message: "only the attack command takes a target".into(),
        });
    }
    Ok(())
}

fn config_json(config: &RunConfig) -> Value {
    let mut m = Map::new();
    m.insert("theta".into(), num(config.theta()));
    m.insert("alpha".into(), num(config.params.alpha()));
    m.insert("beta".into(), num(config.params.beta()));
    m.insert("trials".into(), json!(config.trials));
    m.insert("seed".into(), json!(config.seed));
    if let Some(t) = config.target {
        m.insert("target".into(), json!(t.to_string()));
    }
    Value::Object(m)
}

fn keyed<T: Into<Value> + Copy>(values: &[T; 4]) -> Value {
    Value::Object(
        KeyBits::ALL
            .iter()
            .map(|k| (k.to_string(), values[k.bits() as usize].into()))
            .collect(),
    )
}

fn simulate(p: &ProtocolParams, trials: u64, seed: u64) -> Result<(Value, Value), CliError> {
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = run_honest(p, &mut RandomSource::child(seed, i))?;
            let mut one = Tally::default();
            one.keys[t.alice_key.bits() as usize] = 1;
            one.outcomes[t.bell_outcome.index()] = 1;
            one.agreed = u64::from(t.keys_agree());
            Ok(one)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
        .map_err(CliError::Core)?;

    let samples = (0..trials.min(SAMPLE_TRANSCRIPTS))
        .map(|i| run_honest(p, &mut RandomSource::child(seed, i)).map(|t| report::transcript(&t)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut born = Map::new();
    let mut freq = Map::new();
    let mut worst = 0.0f64;
    for label in BellLabel::ALL {
        born.insert(
            label.name().into(),
            num(honest_branch(p, label)?.bell_probability),
        );
        let f = tally.outcomes[label.index()] as f64 / trials as f64;
        worst = worst.max((f - 0.25).abs());
        freq.insert(label.name().into(), num(f));
    }
    let table = p.table_values().map(num);
    let agreement = tally.agreed as f64 / trials as f64;
    let sigma = (0.25 * 0.75 / trials as f64).sqrt();

    let results = json!({
        "trials": trials,
        "key_histogram": keyed(&tally.keys),
        "agreement_rate": num(agreement),
        "outcome_frequencies": freq,
        "born_probabilities": born,
        "oracle_table": Value::Object(KeyBits::ALL.iter().map(|k| (k.to_string(), table[k.bits() as usize].clone())).collect()),
        "sample_transcripts": samples,
    });
    let verdicts = json!({
        "keys_agree": tally.agreed == trials,
        "outcomes_equiprobable": worst <= FREQUENCY_SIGMAS * sigma,
    });
    Ok((results, verdicts))
}

fn attack(
    p: &ProtocolParams,
    target: KeyBits,
    trials: u64,
    seed: u64,
) -> Result<(Value, Value), CliError> {
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            run_malicious_bob(p, target, &mut RandomSource::child(seed, i))
                .map(|t| u64::from(t.alice_key == target))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let sample = run_malicious_bob(p, target, &mut RandomSource::child(seed, 0))?;
    let results = json!({
        "target": target.to_string(),
        "trials": trials,
        "hits": hits,
        "hit_rate": num(hits as f64 / trials as f64),
        "forged_value": num(p.table_value(target)),
        "sample_transcript": report::transcript(&sample),
    });
    Ok((results, json!({ "target_forced": hits == trials })))
}

fn discriminate(p: &ProtocolParams) -> Result<(Value, Value), CliError> {
    let v = lemma1_verdict(p.prep())?;
    Ok((report::four_state(&v), json!({ "four_state": v.verdict.name() })))
}

fn nosignal(p: &ProtocolParams) -> Result<(Value, Value), CliError> {
    let r = nosignal_report(p.prep())?;
    Ok((
        report::nosignal(&r),
        json!({ "no_signalling": r.verdict() }),
    ))
}

fn full_report(p: &ProtocolParams, trials: u64, seed: u64) -> Result<(Value, Value), CliError> {
    let (sim, sim_v) = simulate(p, trials, seed)?;
    let mut attacks = Map::new();
    let mut forced = true;
    for target in KeyBits::ALL {
        let (r, v) = attack(p, target, trials, seed)?;
        forced &= v["target_forced"] == Value::Bool(true);
        attacks.insert(target.to_string(), r);
    }
    let (disc, disc_v) = discriminate(p)?;
    let (ns, ns_v) = nosignal(p)?;
    let results = json!({
        "simulate": sim,
        "attack": attacks,
        "discriminate": disc,
        "nosignal": ns,
    });
    let verdicts = json!({
        "simulate": sim_v,
        "attack": { "target_forced": forced },
        "discriminate": disc_v,
        "nosignal": ns_v,
    });
    Ok((results, verdicts))
}
