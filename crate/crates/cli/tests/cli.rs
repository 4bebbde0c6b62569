use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn indepmaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indepmaps"))
        .args(args)
        .env_remove("INDEPMAPS_SEED")
        .output()
        .unwrap()
}

fn with_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indepmaps"))
        .args(args)
        .env("INDEPMAPS_SEED", seed)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn besselk_prints_full_precision() {
    let o = indepmaps(&["besselk", "--nu", "0.5", "--x", "1"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    let closed = (std::f64::consts::PI / 2.0).sqrt() * (-1.0f64).exp();
    assert!((v - closed).abs() <= 1e-15 * closed);

    let o = indepmaps(&["besselk", "--nu", "-2.5", "--x", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--log"));
    let o = indepmaps(&["besselk", "--nu", "-2.5", "--x", "1e-300", "--log"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim().parse::<f64>().unwrap() > 1000.0);
}

#[test]
fn sample_header_and_seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let args = ["sample", "--dist", "al", "--params", "lambda1=1,lambda2=2", "--n", "20", "--out", path(&out)];
    assert!(with_env(&args, "99").status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# spec=") && header.contains("seed=99") && header.contains("n=20"), "{header}");
    assert_eq!(lines.next(), Some("value"));
    assert_eq!(lines.count(), 20);

    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "99"]);
    assert!(indepmaps(&flagged).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), text);

    *flagged.last_mut().unwrap() = "5";
    assert!(with_env(&flagged, "99").status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("seed=5"));

    assert!(!with_env(&args, "minus-one").status.success());
}

#[test]
fn transform_single_point() {
    let o = indepmaps(&["transform", "--kind", "f2", "--x", "-1", "--y", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["u"], -3.0);
    assert_eq!(v["v"], -2.0);
    assert_eq!(v["region"], "R2");
    assert_eq!(v["det"], -1.0);

    let o = indepmaps(&["transform", "--kind", "f1", "--alpha", "2", "--beta", "1", "--x", "0.7", "--y", "1.3"]);
    let v = json(&o);
    assert!((v["det"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((v["u"].as_f64().unwrap() * v["v"].as_f64().unwrap() - 0.91).abs() < 1e-12);

    let o = indepmaps(&["transform", "--kind", "f3", "--c1", "1", "--c2", "2", "--x", "-0.5", "--y", "0.25"]);
    let v = json(&o);
    assert_eq!((v["u"].as_f64(), v["v"].as_f64()), (Some(0.25), Some(-0.5)));
    assert_eq!(v["region"], "R2");
    let o = indepmaps(&["transform", "--kind", "f1", "--alpha", "1", "--beta", "2", "--x", "-1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = indepmaps(&["transform", "--kind", "f1", "--x", "1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_batch_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    fs::write(&input, "x,y\n1,2\n-3,0.5\n-1,-4\n-4,-1\n0.5,-2\n").unwrap();
    let once = dir.path().join("once.csv");
    assert!(indepmaps(&["transform", "--kind", "f2", "--input", path(&input), "--out", path(&once)]).status.success());
    let text = fs::read_to_string(&once).unwrap();
    assert!(text.starts_with("u,v\n"));
    assert_eq!(text.lines().count(), 6);

    let renamed = dir.path().join("renamed.csv");
    fs::write(&renamed, text.replacen("u,v", "x,y", 1)).unwrap();
    let twice = dir.path().join("twice.csv");
    assert!(indepmaps(&["transform", "--kind", "f2", "--input", path(&renamed), "--out", path(&twice)]).status.success());
    let back: Vec<Vec<f64>> = fs::read_to_string(&twice)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(back, vec![vec![1.0, 2.0], vec![-3.0, 0.5], vec![-1.0, -4.0], vec![-4.0, -1.0], vec![0.5, -2.0]]);
}

#[test]
fn stat_commands_read_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("gig.csv");
    let args = ["sample", "--dist", "gig", "--params", "lambda=0.5,c1=1,c2=1", "--n", "2000", "--seed", "3"];
    let mut a = args.to_vec();
    a.extend(["--out", path(&sample)]);
    assert!(indepmaps(&a).status.success());

    let o = indepmaps(&["stat", "ks", "--input", path(&sample), "--dist", "gig", "--params", "lambda=0.5,c1=1,c2=1"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["pass"], true);
    let o = indepmaps(&["stat", "ks", "--input", path(&sample), "--dist", "gig", "--params", "lambda=3,c1=1,c2=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);

    let pairs = dir.path().join("uv.csv");
    let mut text = String::from("u,v\n");
    for k in 0..300 {
        let t = k as f64 / 300.0;
        text.push_str(&format!("{t},{}\n", (t - 0.5).powi(2)));
    }
    fs::write(&pairs, text).unwrap();
    let o = indepmaps(&["stat", "dcor", "--input", path(&pairs), "--permutations", "199", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["pass"], false);
    assert!(v["p_value"].as_f64().unwrap() < 0.01);
}

#[test]
fn verify_report_schema_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/report.json");
    let o = indepmaps(&["verify", "--theorem", "al", "--params", "p=1,q=2,r=3", "--mode", "identity", "--seed", "4", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["theorem", "params", "mode", "checks", "seed", "n"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["theorem"], "al");
    assert_eq!(v["params"]["r"], 3.0);
    assert_eq!(v["seed"], 4);
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "statistic", "threshold", "pass"] {
            assert!(c.get(key).is_some());
        }
    }
    assert_eq!(fs::read_dir(out.parent().unwrap()).unwrap().count(), 1);

    // an unperturbed power run keeps (U, V) independent, so the rejection check fails
    let o = indepmaps(&["verify", "--theorem", "sexp", "--mode", "power", "--perturb", "1.0", "--n", "2000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL independence_rejected"));

    let o = indepmaps(&["verify", "--theorem", "al", "--params", "r=3", "--mode", "chain"]);
    assert_eq!(o.status.code(), Some(2));
    let o = indepmaps(&["verify", "--theorem", "nope", "--mode", "identity"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "theorem = \"sexp\"\nmode = \"identity\"\nn = 200\nseed = 12\n\n[params]\nlambda = 2.0\nc1 = 1.0\nc2 = 3.0\n",
    )
    .unwrap();
    let o = indepmaps(&["verify", "--config", path(&cfg), "--params", "c2=0.5", "--seed", "13"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["seed"], 13);
    assert_eq!(v["n"], 200);
    assert_eq!(v["params"]["lambda"], 2.0);
    assert_eq!(v["params"]["c2"], 0.5);

    let o = with_env(&["verify", "--config", path(&cfg)], "77");
    assert_eq!(json(&o)["seed"], 12);
    fs::write(&cfg, "theorem = \"sexp\"\nmode = \"identity\"\n").unwrap();
    let o = with_env(&["verify", "--config", path(&cfg)], "77");
    assert_eq!(json(&o)["seed"], 77);
    let o = indepmaps(&["verify", "--config", path(&cfg)]);
    assert_eq!(json(&o)["seed"], 20_240_601);

    fs::write(&cfg, "theorem = \"sexp\"\nmode = \"identity\"\ncolour = 3\n").unwrap();
    assert_eq!(indepmaps(&["verify", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn verify_grid_prefixes_checks() {
    let o = indepmaps(&["verify", "--theorem", "sexp", "--mode", "identity", "--n", "50", "--grid", "c1=1,2", "--grid", "c2=0.5"]);
    assert!(o.status.success());
    let names: Vec<String> = json(&o)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("c1=1,c2=0.5")));
    assert!(names.iter().any(|n| n.starts_with("c1=2,c2=0.5")));
}

#[test]
fn verify_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let o = indepmaps(&[
        "verify", "--theorem", "al", "--mode", "montecarlo", "--n", "2000", "--independence-n", "300", "--seed", "2",
        "--plot-dir", path(&plots), "--bins", "20",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["x", "y", "u", "v"] {
        let text = fs::read_to_string(plots.join(format!("{name}.csv"))).unwrap();
        assert!(text.starts_with("bin_center,empirical_density,analytic_pdf\n"));
        assert_eq!(text.lines().count(), 21);
    }
}

#[test]
fn chain_csv() {
    let o = indepmaps(&["chain", "--theorem", "al", "--chains", "500", "--steps", "5", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("step,ks_statistic,threshold\n"));
    assert_eq!(text.lines().count(), 7);
    let o = indepmaps(&["chain", "--theorem", "sexp", "--params", "c2=5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_data_columns_and_empty_batch() {
    let o = indepmaps(&["plot-data", "--dist", "al", "--params", "lambda1=1,lambda2=2", "--n", "5000", "--seed", "1", "--bins", "50"]);
    assert!(o.status.success());
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);

    let o = indepmaps(&[
        "plot-data", "--dist", "gig", "--params", "lambda=0.5,c1=1,c2=1", "--n", "20000", "--seed", "1", "--range", "0,30",
        "--bins", "300",
    ]);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    let riemann: f64 = rows.iter().map(|r| r[2] * 0.1).sum();
    assert!((riemann - 1.0).abs() <= 0.01, "{riemann}");

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "value\n").unwrap();
    let out = dir.path().join("hist.csv");
    let o = indepmaps(&["plot-data", "--dist", "al", "--params", "lambda1=1,lambda2=2", "--input", path(&empty), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
