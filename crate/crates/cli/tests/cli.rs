use std::path::Path;
use std::process::{Command, Output};

fn radhydro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radhydro")).args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn run_writes_diagnostics_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = radhydro(&[
        "run",
        "--scenario",
        "marshak",
        "--points",
        "33",
        "--tfinal",
        "1e-4",
        "--dump-every",
        "1",
        "--check-idp",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("scenario=marshak points=33"));

    let diag = csv_rows(&out_dir.join("diag.csv"));
    assert_eq!(diag[0][0], "step");
    let last = diag.last().unwrap();
    assert_eq!(last[1].parse::<f64>().unwrap(), 1e-4);
    let steps: usize = last[0].parse().unwrap();
    assert_eq!(diag.len(), steps + 1);

    let fields = csv_rows(&out_dir.join("final.csv"));
    assert_eq!(fields[0], ["x", "rho", "v", "T", "Er", "Em", "p"]);
    assert_eq!(fields.len(), 34);
    assert!(out_dir.join("fields_0000001.csv").exists());
}

#[test]
fn reference_profile_gives_error_and_zero_for_itself() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let args = ["run", "--scenario", "marshak", "--points", "17", "--tfinal", "1e-4", "--out"];
    let mut a = args.to_vec();
    a.push(first.to_str().unwrap());
    assert!(radhydro(&a).status.success());

    let reference = first.join("final.csv");
    let second = dir.path().join("second");
    let mut b = args.to_vec();
    b.extend([second.to_str().unwrap(), "--reference", reference.to_str().unwrap()]);
    let out = radhydro(&b);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains(" error=0e0"), "{}", stdout(&out));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &config,
        format!("scenario = \"marshak\"\npoints = [17]\ntfinal = 1.0\nout = {:?}\n", out_dir.to_str().unwrap()),
    )
    .unwrap();
    let out = radhydro(&["run", "--config", config.to_str().unwrap(), "--tfinal", "5e-5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("t=5e-5"), "{}", stdout(&out));
}

#[test]
fn converge_with_self_reference_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = radhydro(&[
        "converge",
        "--scenario",
        "marshak",
        "--points",
        "17,33,129",
        "--tfinal",
        "1e-3",
        "--self-reference",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = csv_rows(&dir.path().join("convergence.csv"));
    assert_eq!(table[0], ["points", "h", "error", "rate"]);
    assert_eq!(table.len(), 3);
    assert_eq!(table[1][0], "17");
    assert_eq!(table[1][3], "");
    assert!(!table[2][3].is_empty());
    assert!(dir.path().join("reference.csv").exists());
    assert!(stdout(&out).contains("L1-error"));
}

#[test]
fn errors_are_reported_on_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let radhydro = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_radhydro"))
            .current_dir(dir.path())
            .args(args)
            .output()
            .expect("binary runs")
    };
    let out = radhydro(&["run", "--scenario", "mach7", "--points", "33"]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.starts_with("error kind=config msg=\""), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    let out = radhydro(&["run", "--scenario", "marshak", "--points", "33", "--cfl", "2"]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error kind=config"));
    assert!(!dir.path().join("out").exists());

    let out = radhydro(&["run", "--scenario", "marshak", "--points", "33", "--reference", "/nonexistent/ref.csv"]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error kind=config"));

    let out = radhydro(&["converge", "--scenario", "marshak", "--points", "17,33"]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error kind=config"));
}

#[test]
fn riemann_reports_both_solvers() {
    let out = radhydro(&["riemann", "--left", "1,0,1,1", "--right", "0.125,0,0.1,1", "--gamma", "1.4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let euler = text.lines().find(|l| l.starts_with("euler")).unwrap();
    let p_star: f64 = euler.split("p_star=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((p_star - 0.30313).abs() < 1e-5, "{euler}");
    assert!(text.lines().any(|l| l.starts_with("radiation mu_max=")));

    let out = radhydro(&["riemann", "--left", "1,1,1,1", "--right", "1,-1,1,1", "--gamma", "1.4"]);
    let rad = stdout(&out);
    let rad = rad.lines().find(|l| l.starts_with("radiation")).unwrap().to_owned();
    assert!(rad.contains("TwoShock"), "{rad}");

    let out = radhydro(&["riemann", "--left", "1,1,1", "--right", "1,-1,1,1"]);
    assert!(stderr(&out).starts_with("error kind=config"));
}
