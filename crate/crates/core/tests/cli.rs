use std::collections::HashMap;
use std::path::{Path, PathBuf};

use gibbstest::cli::{run, ModelConfig};
use gibbstest::hypothesis::{LikelihoodRatioProfile, RandomizedCylinderTest};
use gibbstest::symbolic::DEFAULT_ENUMERATION_BUDGET;

const BERNOULLI: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/bernoulli_pair.toml");
const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/golden_mean_markov.toml");
const DIGITS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/digits.toml");

fn invoke(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("gibbstest").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn fields(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn number(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key].parse().unwrap_or_else(|_| panic!("{key} = {:?}", map[key]))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn pressure_of_full_shift() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/full_shift_zero.toml");
    let (code, out) = invoke(&["pressure", "--config", path, "--model", "h0"]);
    assert_eq!(code, 0);
    assert_eq!(number(&fields(&out), "pressure"), 2f64.ln());
}

#[test]
fn minimax_matches_library() {
    let (code, out) = invoke(&["minimax", "--config", GOLDEN, "-n", "6"]);
    assert_eq!(code, 0, "{out}");
    let f = fields(&out);
    let pair = ModelConfig::load(Path::new(GOLDEN)).unwrap().pair().unwrap();
    let profile = LikelihoodRatioProfile::new(&pair, 6, DEFAULT_ENUMERATION_BUDGET).unwrap();
    let t = profile.minimax().unwrap();
    let r = profile.errors(&t).unwrap();
    assert_eq!(number(&f, "chi"), t.chi);
    assert_eq!(number(&f, "type1"), r.type1);
    assert_eq!(number(&f, "type2"), r.type2);
}

#[test]
fn saved_record_round_trips_into_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let record = dir.path().join("np.json");
    let record_s = record.to_str().unwrap();
    let (code, out) = invoke(&["np", "--config", BERNOULLI, "-n", "5", "--alpha", "0.1", "--save", record_s]);
    assert_eq!(code, 0, "{out}");
    let t = RandomizedCylinderTest::from_json(&std::fs::read_to_string(&record).unwrap()).unwrap();
    let f = fields(&out);
    assert_eq!(t.n, 5);
    assert_eq!(t.chi, number(&f, "chi"));
    assert!((t.alpha - 0.1).abs() < 1e-12);

    let (code, out) = invoke(&["simulate", "--config", BERNOULLI, "--test", record_s, "--samples", "20000", "--seed", "4"]);
    assert_eq!(code, 0, "{out}");
    let f = fields(&out);
    let (est, se) = f["type1"].split_once(" +- ").unwrap();
    let (est, se): (f64, f64) = (est.parse().unwrap(), se.parse().unwrap());
    assert!((est - t.alpha).abs() <= 5.0 * se, "{est} +- {se} vs {}", t.alpha);
}

#[test]
fn bayes_reports_risk() {
    let (code, out) = invoke(&["bayes", "--config", BERNOULLI, "-n", "1", "--prior", "0.5,0.5"]);
    assert_eq!(code, 0, "{out}");
    assert!((number(&fields(&out), "bayes_risk") - 11.0 / 32.0).abs() < 1e-15);
}

#[test]
fn exponents_and_sweep_csv() {
    let (code, out) = invoke(&["exponents", "--config", BERNOULLI, "--minimax"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("t0 = 0.48807713209"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let (code, out) = invoke(&[
        "sweep", "--config", BERNOULLI, "--kind", "np", "--c", "0", "--n-min", "1", "--n-max", "8", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,kind,type1,type2,risk,log_type1,log_type2,log_risk,predicted_type1,predicted_type2");
    assert_eq!(lines.count(), 8);
}

#[test]
fn classify_digit_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "digits.txt", "0.14159265358979\n\n0000000000\n12x4\n");
    let (code, out) = invoke(&["classify", "--config", DIGITS, "-n", "3", "--alpha", "0.05", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1, "a malformed line fails the run");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert!(lines[0].starts_with("1 ") && lines[1].starts_with("2 "));
    assert_eq!(lines[1], "2 reject", "repeated zeros favour the 1/(i+1) weights");
    assert!(lines[2].starts_with("3 error"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(&["np", "--config", BERNOULLI, "-n", "2", "--alpha", "1.5"]).0, 1);
    assert_eq!(invoke(&["minimax", "--config", "/nonexistent.toml", "-n", "2"]).0, 1);
    assert_eq!(invoke(&["frobnicate"]).0, 1);
    assert_eq!(invoke(&["--help"]).0, 0);

    let text = std::fs::read_to_string(BERNOULLI).unwrap();
    let typo = write(dir.path(), "typo.toml", &text.replace("[options]", "[options]\nbugdet = 3"));
    assert_eq!(invoke(&["minimax", "--config", typo.to_str().unwrap(), "-n", "2"]).0, 1);

    let small = write(dir.path(), "small.toml", &text.replace("budget = 16777216", "budget = 16"));
    assert_eq!(invoke(&["minimax", "--config", small.to_str().unwrap(), "-n", "3"]).0, 0);
    assert_eq!(invoke(&["minimax", "--config", small.to_str().unwrap(), "-n", "4"]).0, 2);

    let identical = text.replace("0.75", "0.5").replace("0.25", "0.5");
    let same = write(dir.path(), "same.toml", &identical);
    assert_eq!(invoke(&["minimax", "--config", same.to_str().unwrap(), "-n", "2"]).0, 1);
}
