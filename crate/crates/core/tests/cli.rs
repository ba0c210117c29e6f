use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aquapitch::cli::{exit_code, version_string};
use aquapitch::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aquapitch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, format!("schema_version = 1\n{body}")).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let r = rows(csv);
    let i = r[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    r[1..].iter().map(|row| row[i].parse().unwrap()).collect()
}

#[test]
fn version_flag() {
    let o = run(&["--version"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), version_string());
    assert!(version_string().contains("schema 1"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["simulate", "/no/such/file.toml"])), 2);
    assert_eq!(code(&run(&["sweep", "--turbine", "nrel5mw", "--pitch", "3"])), 2);
    let o = run(&["sweep", "--turbine", "nrel5mw", "--pitch", "0,3", "--observer", "1,2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
}

#[test]
fn model_errors_map_to_exit_1() {
    assert_eq!(exit_code(&Err(Error::Geometry("x".into()))), 1);
    assert_eq!(exit_code(&Err(Error::Sampling("x".into()))), 1);
    assert_eq!(exit_code(&Err(Error::Mismatch("x".into()))), 2);
    assert_eq!(exit_code(&Ok(())), 0);
}

#[test]
fn simulate_two_revolutions_of_dtu_ipc2() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scenario(dir.path(), "s.toml", "turbine = \"dtu10mw\"\nrevolutions = 2\nstrategy = { scheme = \"IPC2\" }\n");
    let out = dir.path().join("out.csv");
    let cones = dir.path().join("cones.csv");
    let o = run(&["simulate", &s, "-o", out.to_str().unwrap(), "--cones", cones.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let r = rows(&csv);
    assert_eq!(r.len(), 145);
    assert_eq!(
        r[0],
        [
            "time_s", "psi_blade1_deg", "ospl_bar_db", "pitch_blade1_deg", "pitch_blade2_deg", "pitch_blade3_deg",
            "ospl_bar_blade1_db", "ospl_bar_blade2_db", "ospl_bar_blade3_db", "power_w"
        ]
    );
    let pitch = column(&csv, "pitch_blade1_deg");
    let spread = pitch.iter().copied().fold(f64::MIN, f64::max) - pitch.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread > 4.5);
    assert_eq!(rows(&std::fs::read_to_string(&cones).unwrap()).len(), 1 + 3 * 144);
}

#[test]
fn nominal_pitch_columns_are_constant() {
    let o = run(&["simulate", scenarios().join("nrel5mw_nominal.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    for b in 1..=3 {
        let p = column(&csv, &format!("pitch_blade{b}_deg"));
        assert!(p.iter().all(|&x| x == p[0]));
    }
    assert_eq!(rows(&csv).len(), 1 + 3 * 72);
}

#[test]
fn sweep_power_falls_with_pitch() {
    let o = run(&["sweep", "--turbine", "nrel5mw", "--pitch", "0,3,5", "--observer", "50,0,0"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    let pitch = column(&csv, "pitch_deg");
    let power = column(&csv, "power_w");
    assert_eq!(pitch.len(), 3 * 72);
    let first = |p: f64| power[pitch.iter().position(|&x| x == p).unwrap()];
    assert!(first(0.0) > first(3.0) && first(3.0) > first(5.0));
}

#[test]
fn metrics_needs_a_nominal_run() {
    let o = run(&["metrics", scenarios().join("dtu10mw_ipc2.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nominal"));
}

#[test]
fn metrics_pair_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = run(&[
        "metrics",
        scenarios().join("nrel5mw_nominal.toml").to_str().unwrap(),
        scenarios().join("nrel5mw_ipc2.toml").to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert_eq!(column(&csv, "power_loss_pct")[0], 0.0);
    assert!(column(&csv, "power_loss_pct")[1] > 0.0);
    let header = &rows(&csv)[0];
    assert!(header.contains(&"ospl_hat_LF_db".to_string()));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["reports"].as_array().map(Vec::len), Some(2));
    assert_eq!(v["reports"][1]["strategy"], "IPC2");
    assert_eq!(v["reports"][0]["spectrum_hat"]["band_centers"].as_array().map(Vec::len), Some(31));
}

#[test]
fn compare_identical_and_mismatched() {
    let nom = scenarios().join("iea22mw_nominal.toml");
    let nom = nom.to_str().unwrap();
    let o = run(&["compare", "--nominal", nom, "--ipc", nom]);
    assert_eq!(code(&o), 0);
    let r = rows(&stdout(&o));
    assert_eq!(r[0][..3], ["turbine", "strategy", "unfiltered_db"]);
    assert!(r[1][2..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));

    let other = scenarios().join("nrel5mw_ipc2.toml");
    let o = run(&["compare", "--nominal", nom, "--ipc", other.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let o = run(&["compare", "--nominal", nom, "--ipc", nom, "--groups", "XYZ"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn compare_reports_positive_reductions() {
    let mut args = vec!["compare".to_string(), "--groups".into(), "LF,VHF".into()];
    for t in ["nrel5mw", "dtu10mw", "iea22mw"] {
        args.push("--nominal".into());
        args.push(scenarios().join(format!("{t}_nominal.toml")).to_str().unwrap().into());
        args.push("--ipc".into());
        args.push(scenarios().join(format!("{t}_ipc2.toml")).to_str().unwrap().into());
    }
    let o = bin().args(&args).output().unwrap();
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert_eq!(rows(&csv)[0], ["turbine", "strategy", "unfiltered_db", "LF_db", "VHF_db"]);
    let dc = column(&csv, "unfiltered_db");
    let lf = column(&csv, "LF_db");
    assert_eq!(dc.len(), 3);
    for (u, l) in dc.iter().zip(&lf) {
        assert!(*u > 0.0 && l < u);
    }
}

#[test]
fn snell_curves() {
    let o = run(&["snell", "--height", "100", "--d-max", "500", "--d-step", "50"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    let d = column(&csv, "d_m");
    let beta = column(&csv, "beta");
    let phi = column(&csv, "phi_air_deg");
    let lim = (343.0f64 / 1500.0).asin().to_degrees();
    for i in 0..d.len() {
        if beta[i] == 0.0 {
            let want = (d[i] / 100.0).atan().to_degrees();
            assert!((phi[i] - want).abs() < 1e-4 * want.max(1.0), "{} {} {}", d[i], phi[i], want);
        } else {
            assert!(phi[i] < lim);
        }
    }
    assert!(beta.iter().filter(|&&b| b == 1.0).count() == 11);
    assert_eq!(code(&run(&["snell", "--n", "1", "--height", "100", "--d-max", "10"])), 2);
    assert_eq!(code(&run(&["snell", "--n", "0.7", "--height", "100", "--d-max", "10"])), 2);
}

#[test]
fn metrics_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let suite = scenarios().join("strategies.toml");
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("m{i}.csv"));
        let o = run(&["metrics", suite.to_str().unwrap(), "-o", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(rows(std::str::from_utf8(&outputs[0]).unwrap()).len(), 16);
}
