use std::fs;
use std::path::Path;
use std::process::Command;

fn run(dir: &Path, args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_cascadelab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn pipeline_through_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    run(d, &["generate", "--model", "toshk", "--nodes", "500", "--k", "10", "--pneighbor", "0.9", "--out", "g.txt"]);
    let report = run(d, &["inspect", "--graph", "g.txt"]);
    assert!(report.contains("nodes\t500"));
    run(d, &["--seed", "4", "sample", "--rho", "0.2", "--graph", "g.txt", "--out", "v.txt"]);
    run(d, &["seed", "--gamma", "0.02", "--graph", "g.txt", "--view", "v.txt", "--out", "s.txt"]);
    run(d, &[
        "diffuse", "--graph", "g.txt", "--seeds", "s.txt", "--view", "v.txt", "--p", "0.1", "--runs", "7", "--out", "d.csv",
    ]);
    let diffuse = fs::read_to_string(d.join("d.csv")).unwrap();
    let mut lines = diffuse.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run_id,sample_id,rho,gamma,sigma,sigma_o,sigma_ph,sigma_h,sigma_p,horizon"
    );
    for line in lines.by_ref() {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[4] - (f[5] + f[6] + f[7])).abs() < 1e-9);
    }

    fs::write(d.join("prof.csv"), "step,size,mean_degree\n0,2,4\n1,3,5\n2,1,6\n").unwrap();
    let corrected = run(d, &["correct", "--profile", "prof.csv", "--rho", "0.5", "--p", "0.5"]);
    // sice: 2 + 3*2 + 1*2 = 10; rece level 2: 2 + (6 - 3) * 5 * 0.5 = 9.5
    assert!(corrected.contains("sice,total,10\n"));
    assert!(corrected.contains("rece,2,9.5\n"));
    assert!(corrected.contains("rece,total,17.5\n"));

    fs::write(d.join("exp.cfg"), "graph = g.txt\nrho = 0.2\ngamma = 0.02\nv = 3\nr = 4\np = 0.1\n").unwrap();
    run(d, &["experiment", "--config", "exp.cfg", "--set", "seed=5", "--out-dir", "out", "--keep-traces"]);
    for f in ["relative_error.csv", "samples.csv", "corrections.csv", "shape.csv", "levels.csv", "traces.csv"] {
        assert!(d.join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.txt"), "0 1\n1 x\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cascadelab"))
        .current_dir(tmp.path())
        .args(["inspect", "--graph", "g.txt"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("g.txt:2:"));
}
