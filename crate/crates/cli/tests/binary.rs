use std::path::Path;
use std::process::Command;

fn kmkdv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kmkdv")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn zero_data_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        r#"
command = "simulate"
[system]
preset = "kdv-mkdv-3"
[grid]
x_min = -5.0
x_max = 5.0
h = 0.5
[time]
t_end = 0.1
tau = 0.01
snapshots = [0.0, 0.05, 0.1]
"#,
    );
    let o = kmkdv(&["--config", &cfg, "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let snaps: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("snapshot_t") && p.extension().unwrap() == "csv")
        .collect();
    assert_eq!(snaps.len(), 3);
    for s in snaps {
        for c in ["theta1", "theta2", "theta3"] {
            assert!(column(&s, c).iter().all(|v| *v == 0.0));
        }
    }
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn long_format_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        r#"
command = "simulate"
[system]
preset = "kdv-scalar"
[grid]
x_min = -10.0
x_max = 10.0
h = 0.5
[time]
t_end = 0.05
[initial]
family = "kdv-soliton"
a = 1.0
[output]
svg = false
"#,
    );
    let o = kmkdv(&["simulate", "--config", &cfg, "--output", out.to_str().unwrap(), "--long-format", "--tau", "auto"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("snapshots_long.csv")).unwrap();
    assert!(text.starts_with("t,x,component,value\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 41);
    assert!(out.join("error_profile.csv").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("max percentage"));
}

fn analytic_config(dir: &Path, r: f64) -> String {
    write_config(
        dir,
        &format!(
            r#"
command = "analytic"
[system]
preset = "kdv-mkdv-3"
[grid]
x_min = -4.0
x_max = 4.0
h = 0.5
[initial]
family = "r-family"
a = 2.0
r = {r}
[analytic]
times = [0.0]
[output]
directory = "{}"
"#,
            dir.join("out").display()
        ),
    )
}

#[test]
fn analytic_r_family_vanishes_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmkdv(&["--config", &analytic_config(dir.path(), 0.5)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = dir.path().join("out/analytic_t00000.000000.csv");
    let xs = column(&p, "x");
    let f = column(&p, "f");
    let i = xs.iter().position(|x| *x == 0.0).unwrap();
    assert!(f[i].abs() < 1e-14);
    assert!(dir.path().join("out/analytic_t00000.000000.svg").exists());
}

#[test]
fn analytic_pole_is_reported_not_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmkdv(&["--config", &analytic_config(dir.path(), 2.0)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let poles = column(&dir.path().join("out/singularities_t00000.000000.csv"), "x");
    assert!(!poles.is_empty());
    let values = column(&dir.path().join("out/analytic_t00000.000000.csv"), "f");
    assert!(values.iter().all(|v| v.is_finite()));
    let svg = std::fs::read_to_string(dir.path().join("out/analytic_t00000.000000.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn invalid_config_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = analytic_config(dir.path(), 0.5);
    let o = kmkdv(&["--config", &cfg, "--h", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.h"));
}

#[test]
fn stability_report_written() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(analytic_config(dir.path(), 0.5))
        .unwrap()
        .replace("command = \"analytic\"", "command = \"stability\"");
    let cfg = write_config(dir.path(), &format!("{body}\n[time]\nt_end = 0.1\na_max = 200.0\n"));
    let o = kmkdv(&["--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/stability.csv")).unwrap();
    assert!(text.contains("tau_max"));
}

#[test]
fn unstable_fixed_step_exits_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(analytic_config(dir.path(), 0.5))
        .unwrap()
        .replace("command = \"analytic\"", "command = \"simulate\"");
    let cfg = write_config(dir.path(), &format!("{body}\n[time]\nt_end = 0.1\ntau = 0.05\n"));
    let o = kmkdv(&["--config", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn residual_table_has_both_columns() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(analytic_config(dir.path(), 0.5))
        .unwrap()
        .replace("command = \"analytic\"", "command = \"residual\"");
    let extra = "\n[residual]\nx_range = [-1.0, 1.0]\nt_range = [0.0, 0.1]\nnx = 3\nnt = 2\nprecision = \"double\"\n";
    let cfg = write_config(dir.path(), &format!("{body}{extra}"));
    let o = kmkdv(&["--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = dir.path().join("out/residual.csv");
    let pde = column(&p, "pde_residual");
    let compat = column(&p, "compat_residual");
    assert_eq!(pde.len(), 6);
    assert!(pde.iter().all(|v| *v < 1e-6), "{pde:?}");
    assert!(compat.iter().all(|v| *v < 1e-2), "{compat:?}");
}

#[test]
fn converge_table_has_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"
command = "converge"
[system]
preset = "kdv-scalar"
[grid]
x_min = -15.0
x_max = 15.0
h = 0.5
[time]
t_end = 0.05
[initial]
family = "kdv-soliton"
a = 1.0
[converge]
h = [0.5, 0.4, 0.3]
temporal_h = 0.5
temporal_tau = [4e-3, 2e-3]
reference_tau = 5e-4
[output]
directory = "{}"
"#,
            dir.path().join("out").display()
        ),
    );
    let o = kmkdv(&["--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let orders = std::fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    assert_eq!(orders.lines().count(), 4);
    let e = column(&dir.path().join("out/convergence.csv"), "error_l2");
    assert!(e[2] < e[0]);
    assert!(dir.path().join("out/temporal_convergence.csv").exists());
}

#[test]
fn sample_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            let text = std::fs::read_to_string(&p).unwrap();
            kmkdv_cli::parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
