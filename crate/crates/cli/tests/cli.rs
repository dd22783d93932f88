//! End-to-end checks of the `genbound` binary: flag validation, schemas,
//! exit codes and byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_genbound"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    bin()
        .args(args)
        .env("GENBOUND_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SWEEP_HEADER: &str =
    "t,gen_true,gen_se,bound_mi,bound_js_0.25,bound_js_0.50,bound_js_0.75,bound_renyi_0.25,bound_renyi_0.50,bound_renyi_0.75";

fn instance_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances/two_hypothesis.json")
}

#[test]
fn measure_kl_value() {
    let out = run(&["measure", "--p", "0.5,0.5", "--q", "0.75,0.25", "--kind", "kl"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"schema\":\"genbound-measure-1\""));
    assert!(text.contains("0.1438410362258904"));
}

#[test]
fn measure_rejects_bad_alpha() {
    let out = run(&["measure", "--p", "0.5,0.5", "--q", "0.5,0.5", "--kind", "js", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["sweep", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_single_point_has_exact_header_and_one_row() {
    let out = run(&["sweep", "--t-grid", "0.5", "--mc", "20000", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "# schema: genbound-sweep-1");
    assert_eq!(lines[1], SWEEP_HEADER);
    assert!(lines[2].starts_with("0.5,"));
    assert_eq!(lines[2].split(',').count(), 10);
}

#[test]
fn sweep_default_grid_has_25_rows_and_sound_bounds() {
    let out = run(&["sweep", "--mc", "20000", "--seed", "42"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let (gen, se) = (r[1], r[2]);
        for b in &r[3..] {
            assert!(*b >= gen - 3.0 * se, "bound {b} below gen {gen}");
        }
    }
}

#[test]
fn sweep_rejects_bad_grid_and_mc() {
    assert_eq!(run(&["sweep", "--t-grid", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--mc", "10"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--alphas", "0.0,0.5"]).status.code(), Some(2));
}

#[test]
fn sweep_quadrature_mode_is_deterministic_at_moderate_t() {
    let args = ["sweep", "--quadrature", "--t-grid", "0.4,0.5", "--mc", "20000", "--seed", "3"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["sweep", "--quadrature", "--t-grid", "0.4,0.5", "--mc", "20000", "--seed", "99"]);
    // The quadrature path has no Monte Carlo component in the JS columns,
    // so those columns agree across seeds.
    let col = |out: &Output, row: usize, idx: usize| -> String {
        stdout(out).lines().nth(2 + row).unwrap().split(',').nth(idx).unwrap().to_string()
    };
    for row in 0..2 {
        for idx in 4..7 {
            assert_eq!(col(&a, row, idx), col(&b, row, idx));
        }
    }
}

#[test]
fn sweep_quadrature_mode_reports_accuracy_failure_at_extreme_t() {
    let out = run(&["sweep", "--quadrature", "--t-grid", "0.02", "--mc", "20000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_sigma2_ten_keeps_figure_orderings() {
    // c = σ/4 for the second setting; same correlations, bounds scaled by c².
    let out = run(&[
        "sweep", "--sigma2", "10", "--c", "0.7905694150420949",
        "--t-grid", "0.1,0.3,0.5", "--mc", "50000", "--seed", "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in text.lines().skip(2) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (mi, js75) = (v[3], v[6]);
        assert!(js75 < mi, "{line}");
        for renyi in &v[7..10] {
            assert!(*renyi >= mi, "{line}");
        }
    }
}

#[test]
fn verify_rejects_zero_cases() {
    let out = run(&["verify", "--cases", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_are_byte_identical_across_seeded_runs_and_thread_counts() {
    let args = ["verify", "--cases", "40", "--seed", "9"];
    let a = run_with_threads(&args, "1");
    let b = run_with_threads(&args, "4");
    let c = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(text.contains("\"schema\": \"genbound-verify-1\""));
}

#[test]
fn sweep_outputs_are_byte_identical_across_thread_counts() {
    let args = ["sweep", "--mc", "20000", "--seed", "11", "--t-grid", "0.1,0.2,0.3,0.4,0.5"];
    let a = run_with_threads(&args, "1");
    let b = run_with_threads(&args, "3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn erm_bundled_instance_converges() {
    let out = run(&[
        "erm",
        "--instance",
        instance_path().to_str().unwrap(),
        "--reg",
        "js",
        "--alpha",
        "0.5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "genbound-erm-1");
    assert!(v["max_certificate"].as_f64().unwrap() <= 1e-8);
    // Bounds dominate the exact generalization error.
    let gen = v["gen_error_exact"].as_f64().unwrap().abs();
    for b in v["bounds"].as_array().unwrap() {
        assert!(b["value"].as_f64().unwrap() >= gen);
    }
}

#[test]
fn erm_renyi_near_one_matches_gibbs() {
    let out = run(&[
        "erm",
        "--instance",
        instance_path().to_str().unwrap(),
        "--reg",
        "renyi",
        "--alpha",
        "0.999",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let inst: genbound::erm::LearnerInstance = serde_json::from_str(
        &std::fs::read_to_string(instance_path()).unwrap(),
    )
    .unwrap();
    for sol in v["solutions"].as_array().unwrap() {
        let s: Vec<usize> = sol["dataset"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        let gibbs = genbound::erm::gibbs_posterior(&inst, &s);
        let post: Vec<f64> = sol["posterior"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let tv: f64 = post
            .iter()
            .zip(gibbs.mass())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 1e-3, "dataset {s:?}: tv {tv}");
    }
}

#[test]
fn erm_constant_loss_returns_prior() {
    let dir = std::env::temp_dir().join("genbound-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("constant.json");
    std::fs::write(
        &path,
        r#"{"z_atoms":["0","1"],"mu":[0.4,0.6],"w_atoms":["a","b","c"],
            "loss":[[0.3,0.3],[0.3,0.3],[0.3,0.3]],"n":1,"beta":2.0,
            "prior":[0.2,0.3,0.5]}"#,
    )
    .unwrap();
    for reg in ["js", "renyi"] {
        let out = run(&["erm", "--instance", path.to_str().unwrap(), "--reg", reg, "--alpha", "0.3"]);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        for sol in v["solutions"].as_array().unwrap() {
            let post: Vec<f64> = sol["posterior"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect();
            for (p, q) in post.iter().zip([0.2, 0.3, 0.5]) {
                assert!((p - q).abs() < 1e-6, "{reg}: {post:?}");
            }
        }
    }
}

#[test]
fn erm_malformed_instance_exits_two() {
    let dir = std::env::temp_dir().join("genbound-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{\"z_atoms\": [").unwrap();
    let out = run(&["erm", "--instance", path.to_str().unwrap(), "--reg", "js", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}
