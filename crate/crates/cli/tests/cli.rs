use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qspicb(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qspicb"));
    cmd.args(args).env_remove("QSPICB_CACHE_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run qspicb")
}

fn out_dir(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_smallest_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = qspicb(
        &["compute", "-n", "2", "-b", "0", "-o", out_dir(dir.path())],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let json = fs::read_to_string(dir.path().join("b0_l_n2_part3.json")).unwrap();
    let t = qspicb_core::TransitionMatrix::from_json(&json).unwrap();
    assert_eq!(t.dim(), 2);
    assert!(dir.path().join("b0_l_n2_part3_q1.csv").exists());
}

#[test]
fn type_b_first_slot_with_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "compute",
        "-n",
        "4",
        "-b",
        "0,0",
        "-l",
        "0",
        "--outputs",
        "matrix,dual,verify,q1",
        "-o",
        out_dir(dir.path()),
    ];
    let o = qspicb(&args, &[]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("b00_l0_n4_part3_verify.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"]["nonneg"], true);
    let t = qspicb_core::TransitionMatrix::from_json(
        &fs::read_to_string(dir.path().join("b00_l0_n4_part3.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(t.dim(), 8);
    assert!(dir.path().join("b00_l0_n4_part3_dual.csv").exists());
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let base = [
        "compute",
        "-n",
        "4",
        "-b",
        "0,1,0",
        "--outputs",
        "matrix,dual,q1",
        "-o",
    ];
    let run = |dir: &Path, threads: &str| {
        let mut args = base.to_vec();
        args.push(out_dir(dir));
        assert!(qspicb(&args, &[("RAYON_NUM_THREADS", threads)])
            .status
            .success());
    };
    run(a.path(), "1");
    run(b.path(), "4");
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for n in names {
        assert_eq!(
            fs::read(a.path().join(&n)).unwrap(),
            fs::read(b.path().join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn malformed_levi_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    for levi in ["x", "7", "1"] {
        let o = qspicb(
            &[
                "compute",
                "-n",
                "4",
                "-b",
                "0,1",
                "-l",
                levi,
                "-o",
                target.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(o.status.code(), Some(2), "levi {levi}");
    }
    assert!(!target.exists());
    assert_eq!(qspicb(&["compute", "-n", "4"], &[]).status.code(), Some(2));
}

#[test]
fn corrupted_bar_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = qspicb(
        &[
            "verify",
            "-n",
            "2",
            "-b",
            "0,0",
            "--corrupt-bar",
            "-o",
            out_dir(dir.path()),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("involutivity"));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("b00_l_n2_part3_verify.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["first_failure"], "involutivity");
    let o = qspicb(
        &["verify", "-n", "2", "-b", "0,0", "-o", out_dir(dir.path())],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn oracle_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (n, b, levi) in [("2", "0", ""), ("4", "0,0", "1"), ("4", "0,0", "0")] {
        let mut args = vec!["oracle", "-n", n, "-b", b, "-o", out_dir(dir.path())];
        if !levi.is_empty() {
            args.extend(["-l", levi]);
        }
        let o = qspicb(&args, &[]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{b} {levi}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = qspicb(
        &["oracle", "-n", "4", "-b", "0,1", "-o", out_dir(dir.path())],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = qspicb(
        &[
            "oracle",
            "-n",
            "6",
            "-b",
            "000",
            "-l",
            "1",
            "--kind",
            "a",
            "-o",
            out_dir(dir.path()),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn config_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let spec = dir.path().join("spec.json");
    let out = dir.path().join("out");
    fs::write(
        &spec,
        format!(r#"{{"N": 4, "convention": "Part2", "b": "0,0", "levi": [1], "outputs": ["matrix"], "out": {:?}}}"#, out),
    )
    .unwrap();
    let env = [("QSPICB_CACHE_DIR", cache.to_str().unwrap())];
    let o = qspicb(&["compute", "--config", spec.to_str().unwrap()], &env);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(out.join("b00_l1_n4_part2.json")).unwrap();
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    let o = qspicb(&["compute", "--config", spec.to_str().unwrap()], &env);
    assert!(o.status.success());
    assert_eq!(fs::read(out.join("b00_l1_n4_part2.json")).unwrap(), first);
    let t = qspicb_core::TransitionMatrix::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(t.lattice, qspicb_core::Lattice::QinvZqinv);
}

#[test]
fn kl_module_and_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let o = qspicb(
        &["kl", "--kind", "b", "-s", "2", "-o", out_dir(dir.path())],
        &[],
    );
    assert!(o.status.success());
    let t = qspicb_core::TransitionMatrix::from_json(
        &fs::read_to_string(dir.path().join("kl_b2_l.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(t.dim(), 8);
    let o = qspicb(&["module", "-n", "2", "-b", "0,1"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 4);
    assert!(qspicb(&["selftest"], &[]).status.success());
}
