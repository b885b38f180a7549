//! Command-line determinism criterion: identical reports across reruns with
//! `--no-timing`, and identical p-values across thread counts.

use std::process::Command;

fn run(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_depcorr")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn p_values(report: &[u8]) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_slice(report).unwrap();
    v["results"].clone()
}

fn check() -> Result<String, String> {
    let dir = tempfile::TempDir::new().unwrap();
    let csv = dir.path().join("d.csv").display().to_string();
    run(&["simulate", "bump", "--n", "150", "--noise-sd", "1", "--seed", "4", "--out", &csv]);

    let mut compared = 0;
    for stat in ["dcov2", "ace", "kl", "spearman"] {
        let base = ["permtest", "--in", &csv, "--stat", stat, "--b", "199", "--seed", "42", "--no-timing"];
        let first = run(&base);
        let second = run(&base);
        if first != second {
            return Err(format!("{stat}: reruns differ byte-wise"));
        }
        let t1 = run(&[&base[..], &["--threads", "1"]].concat());
        let t8 = run(&[&base[..], &["--threads", "8"]].concat());
        if p_values(&t1) != p_values(&t8) {
            return Err(format!("{stat}: results differ between 1 and 8 threads"));
        }
        compared += 1;
    }
    let power = ["power", "--stats", "pearson,dcor", "--n", "40", "--nsim", "8", "--b", "39", "--no-timing"];
    let a = run(&[&power[..], &["--threads", "1"]].concat());
    let b = run(&[&power[..], &["--threads", "8"]].concat());
    if p_values(&a) != p_values(&b) {
        return Err("power: results differ between 1 and 8 threads".into());
    }
    Ok(format!("{compared} permtest statistics and one power table reproduced"))
}

fn main() {
    let name = "AC11 CLI determinism (byte-identical reruns, 1 vs 8 threads)";
    match check() {
        Ok(detail) => println!("PASS  {name}: {detail}"),
        Err(why) => {
            println!("FAIL  {name}: {why}");
            std::process::exit(1);
        }
    }
}
