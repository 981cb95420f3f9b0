use std::process::{Command, Output};

fn dgpl(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dgpl"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("DGPL_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run dgpl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Gamma values of the CSV rows, in order.
fn csv_gammas(csv: &str) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect()
}

const SMALL: &[&str] = &["run", "cr-noflow", "--n", "2"];

#[test]
fn csv_header_and_exit_code() {
    let o = dgpl(&[SMALL, &["--gamma", "0,1"]].concat(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "gamma,gamma_gd,l2_u,h1_broken_u,l2_p,div_broken,nj,picard_iters,converged"
    );
    assert_eq!(csv_gammas(&out), vec![0.0, 1.0]);
    assert!(stderr(&o).contains("cr-noflow"));
}

#[test]
fn output_is_deterministic() {
    let args = [SMALL, &["--gamma", "0,10,100", "--threads", "3"]].concat();
    let a = dgpl(&args, &[]);
    let b = dgpl(&args, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_environment() {
    let o = dgpl(SMALL, &[("DGPL_GAMMA", "5")]);
    assert_eq!(csv_gammas(&stdout(&o)), vec![5.0]);
    let o = dgpl(&[SMALL, &["--gamma", "1"]].concat(), &[("DGPL_GAMMA", "5")]);
    assert_eq!(csv_gammas(&stdout(&o)), vec![1.0]);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dgpl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let o = dgpl(&[SMALL, &["--gamma", "1", "--out", path.to_str().unwrap()]].concat(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv_gammas(&csv), vec![1.0]);
    assert!(stdout(&o).contains("cr-noflow"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn missing_mesh_file_exits_with_error() {
    let o = dgpl(&["run", "table1", "--mesh-file", "/nonexistent/mesh.txt", "--gamma", "0"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read mesh file"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn invalid_arguments_exit_with_error() {
    let o = dgpl(&["run", "table1", "--gamma", "x"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = dgpl(&["run", "table1", "--nu", "-1"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nu must be positive"), "{}", stderr(&o));
    let o = dgpl(&["run", "table9"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = dgpl(&["--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn picard_nonconvergence_exits_with_two() {
    let o = dgpl(&["run", "table4", "--k", "1", "--n", "2", "--gamma", "0", "--picard-max", "1"], &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.ends_with(",1,false"), "{row}");
}

#[test]
fn selfcheck_exit_codes() {
    let o = dgpl(&["selfcheck"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = dgpl(&["selfcheck", "--inject-fault"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] commuting diagram"));
}
