use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gwishart::io::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gwishart"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn report(out: &Output) -> RunReport {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    RunReport::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap()
}

fn iris() -> String {
    format!("{}/data/iris_virginica.csv", env!("CARGO_MANIFEST_DIR"))
}

fn c4_files(dir: &Path) -> (PathBuf, PathBuf) {
    let g = write(dir, "c4.txt", "4\n1 2\n1 3\n2 4\n3 4\n");
    let d = write(
        dir,
        "d.csv",
        "136.431,-10.15,8.027,2.508\n-10.15,93.417,-2.122,-16.162\n8.027,-2.122,116.652,11.62\n2.508,-16.162,11.62,120.203\n",
    );
    (g, d)
}

#[test]
fn sample_reports_mean_with_exact_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = c4_files(dir.path());
    let samples = dir.path().join("k.csv");
    let out = run(&[
        "sample", "--graph", g.to_str().unwrap(), "--delta", "103", "--dmat", d.to_str().unwrap(),
        "--iters", "2000", "--seed", "1", "--samples", samples.to_str().unwrap(),
    ]);
    let r = report(&out);
    let mean = r.mean_k.unwrap();
    assert_eq!(mean[0][3], 0.0);
    assert_eq!(mean[1][2], 0.0);
    assert!((mean[0][0] - 0.7788).abs() < 0.02);
    let rows: Vec<String> = std::fs::read_to_string(&samples).unwrap().lines().map(String::from).collect();
    assert_eq!(rows.len(), 2000);
    assert_eq!(rows[0].split(',').count(), 10);
}

#[test]
fn block_gibbs_method_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = c4_files(dir.path());
    let out = run(&[
        "sample", "--graph", g.to_str().unwrap(), "--delta", "103", "--dmat", d.to_str().unwrap(),
        "--iters", "2000", "--method", "block-gibbs", "--burnin", "100", "--engine", "clique-ips",
    ]);
    let r = report(&out);
    assert_eq!(r.method.as_deref(), Some("block-gibbs"));
    assert!((r.mean_k.unwrap()[1][1] - 1.1593).abs() < 0.03);
}

#[test]
fn reports_are_reproducible_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = c4_files(dir.path());
    let path = dir.path().join("r.json");
    let args = |out: &str| {
        vec![
            "sample".to_string(), "--graph".into(), g.display().to_string(), "--delta".into(), "103".into(),
            "--dmat".into(), d.display().to_string(), "--iters".into(), "500".into(), "--seed".into(), "9".into(),
            "--out".into(), out.to_string(),
        ]
    };
    let p1 = path.display().to_string();
    let p2 = dir.path().join("r2.json").display().to_string();
    assert!(bin().args(args(&p1)).status().unwrap().success());
    assert!(bin().args(args(&p2)).status().unwrap().success());
    let mut a = RunReport::from_json(&std::fs::read_to_string(&p1).unwrap()).unwrap();
    let mut b = RunReport::from_json(&std::fs::read_to_string(&p2).unwrap()).unwrap();
    a.elapsed_seconds = 0.0;
    b.elapsed_seconds = 0.0;
    assert_eq!(a, b);
    assert_eq!(RunReport::from_json(&a.to_json().unwrap()).unwrap(), a);
}

#[test]
fn mode_of_identity_scale_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "4\n1 2\n1 3\n2 4\n3 4\n");
    let d = write(dir.path(), "i.csv", "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n");
    let r = report(&run(&["mode", "--graph", g.to_str().unwrap(), "--delta", "3", "--dmat", d.to_str().unwrap()]));
    let m = r.mode.unwrap();
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn drj_on_iris_with_chains() {
    let out = run(&[
        "drj", "--data", &iris(), "--delta", "3", "--dmat-identity", "--iters", "4000", "--burnin", "500",
        "--chains", "2", "--seed", "5",
    ]);
    let r = report(&out);
    let e = r.edge_prob.unwrap();
    assert!(e[0][2] > 0.9, "SL-PL should be nearly certain, got {}", e[0][2]);
    assert_eq!(r.per_chain.unwrap().len(), 2);
    assert_eq!(r.alpha_variant.as_deref(), Some("derived"));
    assert_eq!(r.centered, Some(true));
    assert_eq!(r.n, Some(50));
}

#[test]
fn exact_on_empty_sample_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "two_col.csv", "x,y\n");
    let r = report(&run(&["exact", "--data", data.to_str().unwrap(), "--delta", "3", "--dmat-identity"]));
    let post = r.graph_posterior.unwrap();
    assert_eq!(post.len(), 2);
    for g in post {
        assert!((g.weight - 0.5).abs() < 1e-12);
    }
}

#[test]
fn exact_refuses_large_p() {
    let out = run(&["exact", "--data", &iris(), "--delta", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = c4_files(dir.path());
    let bad = write(dir.path(), "bad.txt", "4\n1 5\n");
    let ragged = write(dir.path(), "ragged.csv", "1,2\n3\n");
    let not_pd = write(dir.path(), "np.csv", "1,2,0,0\n2,1,0,0\n0,0,1,0\n0,0,0,1\n");

    assert_eq!(run(&["sample", "--graph"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["sample", "--graph", bad.to_str().unwrap(), "--delta", "3", "--dmat", d.to_str().unwrap(), "--iters", "1"]),
        Some(3)
    );
    assert_eq!(
        code(&["sample", "--graph", g.to_str().unwrap(), "--delta", "3", "--dmat", not_pd.to_str().unwrap(), "--iters", "1"]),
        Some(3)
    );
    assert_eq!(code(&["drj", "--data", ragged.to_str().unwrap(), "--delta", "3"]), Some(3));
    assert_eq!(
        code(&["sample", "--graph", g.to_str().unwrap(), "--delta", "-2", "--dmat", d.to_str().unwrap(), "--iters", "1"]),
        Some(2)
    );
    assert_eq!(
        code(&["mode", "--graph", g.to_str().unwrap(), "--delta", "103", "--dmat", d.to_str().unwrap(), "--tol", "1e-300"]),
        Some(4)
    );
    let out = run(&["drj", "--data", "/does/not/exist.csv", "--delta", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
}

#[test]
fn validate_quick_passes() {
    let out = run(&["validate", "--quick"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
}
