use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tautodensity::{count, verify};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tautodensity"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("TAUTODENSITY_")) {
        c.env_remove(k);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let o = run(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tautodensity-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn density_values() {
    let v = json(&["density", "--vars", "2"]);
    let taut: f64 = v["densities"]["0"].as_str().unwrap().parse().unwrap();
    let anti: f64 = v["densities"]["15"].as_str().unwrap().parse().unwrap();
    assert!((taut - 0.33213).abs() < 5e-6);
    assert!((anti - 0.09710).abs() < 5e-6);

    let v = json(&["density", "--vars", "1", "--all-classes"]);
    assert_eq!(v["densities"].as_object().unwrap().len(), 4);
}

#[test]
fn count_rows() {
    let v = json(&["count", "--vars", "1", "--max-len", "5"]);
    let totals: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["total"].as_str().unwrap()).collect();
    assert_eq!(totals, ["1", "1", "2", "4", "9"]);

    let v = json(&["count", "--vars", "1", "--max-len", "5", "--class", "0"]);
    let taut: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["classes"]["0"]["count"].as_str().unwrap()).collect();
    assert_eq!(taut, ["0", "0", "1", "0", "5"]);

    let v = json(&["count", "--vars", "2", "--max-len", "4"]);
    let totals: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["total"].as_str().unwrap()).collect();
    assert_eq!(totals, ["2", "2", "6", "14"]);
}

#[test]
fn csv_layout() {
    let o = run(&["--format", "csv", "density", "--vars", "1"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,class,n_or_s,method,value"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.len() == 5 && r[0] == "1" && r[3] == "exact"));
    assert!(rows[0][4].starts_with("0.4232"));
}

#[test]
fn scut_reports() {
    let v = json(&["scut", "--vars", "1", "--s", "50"]);
    assert_eq!(v["converged"], true);
    let taut: f64 = v["solution"]["0"].as_str().unwrap().parse().unwrap();
    assert!((taut - 0.4233).abs() < 5e-5);
    let ratio: f64 = v["ratio_at_s"]["0"].as_str().unwrap().parse().unwrap();
    assert!((ratio - 0.4142).abs() < 5e-5);

    let v = json(&["scut", "--vars", "2", "--s", "30", "--system", "combined"]);
    assert_eq!(v["solution"]["W"], "1");
}

#[test]
fn asympt_targets() {
    let v = json(&["asympt", "--target", "combined-T", "--order", "4"]);
    assert_eq!(v["series"]["combined-T"]["text"], "1/m - 7/4*m^-3/2 + 5/4*m^-2 + O(m^-5/2)");

    let v = json(&["asympt", "--target", "combined", "--order", "4", "--at", "100"]);
    let names: Vec<&String> = v["series"].as_object().unwrap().keys().collect();
    for want in ["B", "T", "U", "A"] {
        assert!(names.iter().any(|n| *n == want), "{want} missing");
    }

    let v = json(&["asympt", "--target", "strong-T", "--order", "4"]);
    assert_eq!(v["series"]["strong-T"]["text"], "1/m - 7/2*m^-3/2 + 31/4*m^-2 + O(m^-5/2)");
}

#[test]
fn classify_formula() {
    let v = json(&["classify", "--formula", "x0 -> x0", "--vars", "1"]);
    assert_eq!(v["falsity_mask"], 0);
    assert_eq!(v["tautology"], true);
    assert_eq!(v["simple"]["strict_first"], true);
    assert_eq!(v["categories"]["strong"]["category"], "T");
    assert_eq!(v["norm"], "-1/2");

    let v = json(&["classify", "--formula", "~(x0 -> x0)", "--vars", "1"]);
    assert_eq!(v["antilogy"], true);
    assert_eq!(v["categories"]["weak"]["category"], "A");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["density", "--vars", "0"]), Some(1));
    assert_eq!(code(&["bogus"]), Some(1));
    assert_eq!(code(&["--precision", "32", "density", "--vars", "1"]), Some(1));
    assert_eq!(code(&["classify", "--formula", "x0 ->", "--vars", "1"]), Some(1));
    assert_eq!(code(&["asympt", "--target", "nope"]), Some(1));
    assert_eq!(code(&["density", "--vars", "5"]), Some(2));
    assert_eq!(code(&["count", "--vars", "4", "--max-len", "3"]), Some(2));
    assert_eq!(code(&["--max-iterations", "3", "scut", "--vars", "1", "--s", "50"]), Some(4));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn environment_overrides() {
    let o = bin().env("TAUTODENSITY_FORMAT", "csv").args(["density", "--vars", "1"]).output().unwrap();
    assert!(stdout(&o).starts_with("m,class,n_or_s,method,value"));
    let o = bin().env("TAUTODENSITY_PRECISION", "10").args(["density", "--vars", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cache_is_reused() {
    let dir = scratch("cache");
    let d = dir.to_str().unwrap();
    let a = run(&["--cache", d, "count", "--vars", "2", "--max-len", "20"]);
    assert!(a.status.success());
    assert!(count::cache_path(&dir, 2).exists());
    let b = run(&["--cache", d, "count", "--vars", "2", "--max-len", "15"]);
    assert_eq!(stdout(&b).lines().count(), 16);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_quick_passes_and_catches_a_mutated_table() {
    let ok = run(&["verify", "quick"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert_eq!(stdout(&ok).lines().filter(|l| l.contains("criterion")).count(), 9);

    let dir = scratch("mutant");
    let mut t = count::class_coefficients(1, 2000).unwrap();
    t.counts[0][5] += 1;
    assert_eq!(verify::compare_with_histogram(&t, &verify::enumeration_histogram(1, 12)), Some((0, 5)));
    count::write_cache(&t, &count::cache_path(&dir, 1)).unwrap();
    let bad = run(&["--cache", dir.to_str().unwrap(), "verify", "quick"]);
    assert_eq!(bad.status.code(), Some(3), "{}", stdout(&bad));
    std::fs::remove_dir_all(&dir).ok();
}
