use std::process::{Command, Output};

use g2sew::series::{dedekind_eta, TorusModulus};
use g2sew::sewing::{period_matrix_with_order, SewingPoint};
use g2sew::C64;
use serde_json::Value;

fn g2sew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2sew")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = g2sew(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn cplx(v: &Value) -> C64 {
    C64::new(v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn period_at_zero_eps_is_diagonal() {
    let v = json(&["period", "--tau1", "0.3+1.5i", "--tau2", "-0.2+1.8i", "--eps", "0"]);
    assert_eq!(cplx(&v["omega"][0][0]), C64::new(0.3, 1.5));
    assert_eq!(cplx(&v["omega"][1][1]), C64::new(-0.2, 1.8));
    assert_eq!(cplx(&v["omega"][0][1]).norm(), 0.0);
    assert_eq!(v["domain_margin"].as_f64(), Some(1.0));
}

#[test]
fn period_json_round_trips_bit_exactly() {
    let v = json(&["period", "--tau1", "0.3+1.5i", "--tau2", "-0.2+1.8i", "--eps", "1.1-0.7i"]);
    let p = SewingPoint::new(C64::new(0.3, 1.5), C64::new(-0.2, 1.8), C64::new(1.1, -0.7)).unwrap();
    let o = period_matrix_with_order(&p, 16, 40).unwrap();
    for (got, want) in [(&v["omega"][0][0], o.omega11), (&v["omega"][0][1], o.omega12), (&v["omega"][1][1], o.omega22)] {
        let g = cplx(got);
        assert_eq!((g.re.to_bits(), g.im.to_bits()), (want.re.to_bits(), want.im.to_bits()));
    }
    assert_eq!(v["est_error"].as_f64().unwrap().to_bits(), o.est_error.to_bits());
}

#[test]
fn truncation_ladder_shows_in_est_error() {
    let args = |k: &'static str| ["period", "--tau1", "0.3+1.5i", "--tau2", "-0.2+1.8i", "--eps", "4.5i", "-K", k];
    let a = json(&args("12"));
    let b = json(&args("16"));
    let (ea, eb) = (a["est_error"].as_f64().unwrap(), b["est_error"].as_f64().unwrap());
    assert!(ea > 0.0 && eb < ea, "{ea} {eb}");
    let d = (cplx(&a["omega"][0][1]) - cplx(&b["omega"][0][1])).norm();
    assert!(d < 10.0 * ea, "{d} {ea}");
}

#[test]
fn domain_violation_exits_2() {
    let out = g2sew(&["period", "--tau1", "2i", "--tau2", "2i", "--eps", "20"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
    assert_eq!(g2sew(&["period", "--tau1", "-2i", "--tau2", "2i"]).status.code(), Some(2));
    assert_eq!(g2sew(&["partition", "module", "--tau1", "2i", "--tau2", "2i"]).status.code(), Some(2));
}

#[test]
fn small_theta_cutoff_exits_4() {
    let out = g2sew(&["partition", "lattice", "--gram", "2", "--tau1", "2i", "--tau2", "2i", "--eps", "0.5", "-R", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn boson_at_zero_eps_is_inverse_eta_squared() {
    let v = json(&["partition", "boson", "--tau1", "0.3+1.5i", "--tau2", "2i"]);
    let e1 = dedekind_eta(&TorusModulus::new(C64::new(0.3, 1.5)).unwrap(), 40).unwrap();
    let e2 = dedekind_eta(&TorusModulus::new(C64::new(0.0, 2.0)).unwrap(), 40).unwrap();
    let want = 1.0 / (e1 * e2);
    assert!((cplx(&v["value"]) - want).norm() < 1e-14 * want.norm());
}

#[test]
fn zero_charge_module_equals_boson() {
    let pt = ["--tau1", "0.3+1.5i", "--tau2", "-0.2+1.8i", "--eps", "-1+0.8i"];
    let m = json(&[&["partition", "module", "--alpha", "0,0"][..], &pt].concat());
    let b = json(&[&["partition", "boson"][..], &pt].concat());
    assert_eq!(m["value"], b["value"]);
}

#[test]
fn lattice_theta_factor_matches_theta_command() {
    let pt = ["--tau1", "0.3+1.5i", "--tau2", "-0.2+1.8i", "--eps", "2.0-1.0i"];
    let z = json(&[&["partition", "lattice", "--gram", "2"][..], &pt].concat());
    let t = json(&[&["theta", "--gram", "2"][..], &pt].concat());
    assert_eq!(z["breakdown"]["theta_factor"], t["value"]);
    assert_eq!(z["omega"], t["omega"]);
}

#[test]
fn theta_at_explicit_omega() {
    let v = json(&["theta", "--lambda", "0,0", "--mu", "0,0", "--omega", "2i,0,2i"]);
    let j = g2sew::theta::jacobi_theta(0.0, 0.0, &TorusModulus::new(C64::new(0.0, 2.0)).unwrap());
    assert!((cplx(&v["value"]) - j * j).norm() < 1e-14);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("g2sew-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# test config\nK = 12\nN = 30\nformat = json\n").unwrap();
    let p = path.to_str().unwrap();
    let args = ["partition", "boson", "--tau1", "2i", "--tau2", "2i", "--eps", "0.5", "--config", p];
    let a = json(&args);
    assert_eq!((a["truncation"]["K"].as_u64(), a["truncation"]["N"].as_u64()), (Some(12), Some(30)));
    let b = json(&[&args[..], &["-K", "20"]].concat());
    assert_eq!((b["truncation"]["K"].as_u64(), b["truncation"]["N"].as_u64()), (Some(20), Some(30)));
    std::fs::write(&path, "K = 12\nwhat = 1\n").unwrap();
    assert_eq!(g2sew(&args).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_output() {
    let out = g2sew(&["period", "--tau1", "2i", "--tau2", "2i", "--eps", "1", "--format", "csv"]);
    let s = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "key,re,im");
    assert!(lines[1].starts_with("omega11,"));
    let c = g2sew(&["cycles", "--tau1", "2i", "--tau2", "2i", "--eps", "1", "-D", "4"]);
    assert_eq!(c.status.code(), Some(0));
    let s = String::from_utf8(c.stdout).unwrap();
    assert!(s.starts_with("degree,labels,parities,weight_re,weight_im"));
    assert!(s.lines().count() > 3);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = g2sew(&["verify", "--suite", "graphs", "--seed", "11"]);
    let b = g2sew(&["verify", "--suite", "graphs", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["check_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["paper_anchor"].is_string() && c["residual"].is_number() && c["tolerance"].is_number());
    }
}

#[test]
fn injected_sign_fault_fails_oracles() {
    let out = g2sew(&["verify", "--suite", "oracles", "--inject-fault", "liz-sign", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(5));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("check_id,paper_anchor,residual,tolerance,pass"));
    assert!(s.lines().any(|l| l.starts_with("oracles.module_pair.") && l.ends_with(",false")));
    assert_eq!(g2sew(&["verify", "--suite", "nope"]).status.code(), Some(2));
}
