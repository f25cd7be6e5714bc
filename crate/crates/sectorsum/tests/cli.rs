use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sectorsum"));
    c.env_remove("SECTORSUM_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("sectorsum-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn csv_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn empty_suite_list_is_a_config_error() {
    let d = scratch("empty");
    let cfg = d.join("c.json");
    std::fs::write(&cfg, r#"{"suites": []}"#).unwrap();
    let o = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let d = scratch("unknown");
    let cfg = d.join("c.json");
    std::fs::write(&cfg, r#"{"suites": ["mellin"], "sead": 1}"#).unwrap();
    let o = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sead"));
}

#[test]
fn bad_flags_and_environment_exit_2() {
    assert_eq!(code(&bin().args(["run", "--suite", "nope"]).output().unwrap()), 2);
    assert_eq!(code(&bin().args(["run", "--suite", "mellin", "--tol-scale", "-1"]).output().unwrap()), 2);
    let missing = bin().args(["opsum", "--config", "/nonexistent/x.json", "--out", "/tmp/x.csv"]).output().unwrap();
    assert_eq!(code(&missing), 2);
    let out = scratch("threads").join("r.csv");
    let o = bin().env("SECTORSUM_THREADS", "0").args(["run", "--suite", "mellin", "--out"]).arg(&out).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn mellin_run_passes_and_writes_header() {
    let out = scratch("mellin").join("r.csv");
    let o = bin()
        .env("SECTORSUM_THREADS", "2")
        .args(["run", "--suite", "mellin", "--seed", "9", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines = csv_lines(&out);
    assert!(lines[0].starts_with("# sectorsum seed=9 config_hash="), "{}", lines[0]);
    assert!(lines[0].contains(" timestamp="));
    assert_eq!(lines[1], "suite,case,metric,value_re,value_im,tolerance,pass,provenance");
    assert!(lines.len() > 20);
    assert!(lines[2..].iter().all(|l| l.starts_with("mellin,") && l.contains(",true,")));
}

#[test]
fn failed_checks_exit_1_and_are_listed() {
    let out = scratch("fail").join("r.csv");
    let o = bin().args(["run", "--suite", "mellin", "--tol-scale", "1e-300", "--out"]).arg(&out).output().unwrap();
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().any(|l| l.starts_with("FAIL mellin/")), "{err}");
    assert!(csv_lines(&out).iter().any(|l| l.contains(",false,")));
}

#[test]
fn config_run_uses_problem_files() {
    let out = scratch("config").join("e.csv");
    let o = bin().args(["run", "--config"]).arg(configs().join("experiment.json")).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines = csv_lines(&out);
    assert!(lines[0].starts_with("# sectorsum seed=7 "));
    for suite in ["opsum", "lpnorm", "bounds", "maxreg"] {
        assert!(lines.iter().any(|l| l.starts_with(&format!("{suite},config:"))), "{suite}");
    }
    assert!(out.with_extension("witnesses.json").exists());
}

#[test]
fn subcommands_write_their_tables() {
    let d = scratch("sub");
    let cases = [
        ("opsum", "opsum.json", "label,dim,rho,N,C_hom,norm_AS,norm_BS,dpg_bound,residual", 3),
        ("lpnorm", "lpnorm.json", "label,symbol,p/q,theta,value,grid_N,refinement_defect", 3),
        ("maxreg", "maxreg.json", "m,dt,p,q,theta,C_p,C_inhom,C_Ytheta,norm_AS,norm_BS", 2),
    ];
    for (cmd, cfg, header, rows) in cases {
        let out = d.join(format!("{cmd}.csv"));
        let o = bin().args([cmd, "--config"]).arg(configs().join(cfg)).arg("--out").arg(&out).output().unwrap();
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let lines = csv_lines(&out);
        assert!(lines[0].starts_with("# sectorsum seed="));
        assert_eq!(lines[1], header);
        assert_eq!(lines.len(), 2 + rows, "{cmd}");
    }

    let out = d.join("mellin.csv");
    let o = bin().args(["mellin", "--suite", "nielsen", "--out"]).arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(csv_lines(&out)[2..].iter().all(|l| l.contains("nielsen")));
}

#[test]
fn bounds_witness_replays() {
    let d = scratch("bounds");
    let family = configs().join("family.json");
    for kind in ["r", "gamma", "lq"] {
        let out = d.join(format!("{kind}.csv"));
        let o = bin().args(["bounds", "--kind", kind, "--family"]).arg(&family).arg("--out").arg(&out).output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let lines = csv_lines(&out);
        assert_eq!(lines[1], "family,kind,q,n_ops,trials,lower_bound,stderr,singleton");
        assert!(lines[2].starts_with(&format!("shear-pair,{kind},")));

        let replay = d.join(format!("{kind}-replay.csv"));
        let o = bin().args(["bounds", "--replay"]).arg(out.with_extension("json")).arg("--out").arg(&replay).output().unwrap();
        assert_eq!(code(&o), 0);
        let lines = csv_lines(&replay);
        assert_eq!(lines[1], "family,kind,recorded,replayed,rel_diff,pass");
        assert!(lines[2].ends_with(",true"));
    }
}

#[test]
fn tampered_witness_fails_replay() {
    let d = scratch("tamper");
    let out = d.join("b.csv");
    let o = bin().args(["bounds", "--family"]).arg(configs().join("family.json")).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    let path = out.with_extension("json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let lb = v["estimates"][0]["lower_bound"].as_f64().unwrap();
    v["estimates"][0]["lower_bound"] = (lb * 1.01).into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = bin().args(["bounds", "--replay"]).arg(&path).arg("--out").arg(d.join("r.csv")).output().unwrap();
    assert_eq!(code(&o), 1);
}
