use std::path::Path;
use std::process::{Command, Output};

use sl2coef::asym::{ScanReport, Verdict};

fn sl2coef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2coef")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SCAN: &[&str] = &[
    "scan",
    "--kind=principal",
    "--lambda=1",
    "--n=0",
    "--xgrid=log:1:100:8",
    "--mgrid=log:1:200:8",
];

#[test]
fn eval_matches_library() {
    let o = sl2coef(&["eval", "--ell=-0.5+1i", "--eps=0", "--m=3", "--n=1", "--x=5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,m,n,re,im,method,est_err");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let q = sl2coef::coeffs::CoeffQuery::new(
        sl2coef::params::ReprParams::principal(1.0, 0.0),
        sl2coef::coeffs::CoeffIndex::new(3, 1),
        5.0,
    );
    let v = sl2coef::coeffs::frak_p(&q, sl2coef::coeffs::CoeffMethod::Auto).unwrap();
    assert_eq!(row[3].parse::<f64>().unwrap(), v.value.re);
    assert_eq!(row[4].parse::<f64>().unwrap(), v.value.im);
    assert_eq!(row[5], v.method.as_str());
}

#[test]
fn eval_at_identity() {
    let o = sl2coef(&["eval", "--ell=-0.5+1i", "--m=2", "--n=2", "--x=1"]);
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("1,2,2,1e0,0e0,identity"), "{row}");
}

#[test]
fn exit_codes() {
    assert_eq!(sl2coef(&["eval", "--lambda=1", "--m=1", "--n=0", "--x=2", "--bogus"]).status.code(), Some(64));
    assert_eq!(sl2coef(&["eval", "--lambda=1", "--m=1.5", "--n=0", "--x=2"]).status.code(), Some(64));
    assert_eq!(sl2coef(&["eval", "--ell=1+2j", "--m=1", "--n=0", "--x=2"]).status.code(), Some(64));
    assert_eq!(sl2coef(&["scan", "--kind=principal", "--lambda=1", "--n=0", "--xgrid=log:1:100", "--mgrid=lin:1:9:3"]).status.code(), Some(64));
    assert_eq!(sl2coef(&["eval", "--lambda=1", "--m=1", "--n=0", "--x=3", "--method=jacobi"]).status.code(), Some(1));
    let mut fault = SCAN.to_vec();
    fault.push("--m-power-shift=1");
    assert_eq!(sl2coef(&fault).status.code(), Some(2));
    assert_eq!(sl2coef(&["--help"]).status.code(), Some(0));
}

fn scan_to(dir: &Path, threads: &str) -> Vec<u8> {
    let path = dir.join(format!("scan_{threads}.json"));
    let mut args = SCAN.to_vec();
    let out = path.to_str().unwrap().to_string();
    args.extend(["--threads", threads, "--out", &out]);
    let o = sl2coef(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn scan_output_is_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let one = scan_to(dir.path(), "1");
    let three = scan_to(dir.path(), "3");
    assert_eq!(one, three);
    let again = scan_to(dir.path(), "1");
    assert_eq!(one, again);
}

#[test]
fn scan_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = scan_to(dir.path(), "2");
    let report: ScanReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    assert_eq!(report.grid.len(), 64);
    let text = serde_json::to_string_pretty(&report).unwrap();
    let back: ScanReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(text.trim_end(), std::str::from_utf8(&bytes).unwrap().trim_end());
}

#[test]
fn column_and_fourier_csv() {
    let o = sl2coef(&["column", "--lambda=1", "--n=0", "--x=1", "--window=-5:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "left,right,re,im");
    assert_eq!(text.lines().count(), 12);
    let step = sl2coef::fourier::StepFunction::from_csv(&text).unwrap();
    assert_eq!(step.cell_width, 1.0);
    assert!((step.l2_norm() - 1.0).abs() < 1e-14);

    let o = sl2coef(&["fourier", "--ell=-1", "--n=0", "--x=4", "--window=0:3"]);
    assert!(o.status.success());
    let step = sl2coef::fourier::StepFunction::from_csv(&stdout(&o)).unwrap();
    for (left, v) in &step.cells {
        let y = left + 0.125;
        assert!((v.re - (-y).exp() / 2f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn norms_json() {
    let o = sl2coef(&["norms", "--ell=-0.25", "--eps=0.25", "--format=json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = v["ub_norm_11_squared"].as_f64().unwrap();
    let b = v["ub_norm_11_squared_special"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-12);
    assert_eq!(sl2coef(&["norms", "--ell=0.5", "--eps=0"]).status.code(), Some(1));
}
