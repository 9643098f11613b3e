use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
profile = "test"
seed = 3

[synth]
days = 75

[synth.cells]
R1 = 4
B = 3
T = 2
U = 1

[forecast]
methods = ["SA", "AD"]
tl = [1]
la = [1]
"#;

fn bhcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhcast")).args(args).output().expect("run bhcast")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Write the small config and a synthetic dataset into `dir`.
fn small_setup(dir: &Path) -> (String, String) {
    let config = dir.join("run.toml");
    std::fs::write(&config, SMALL).unwrap();
    let data = dir.join("data");
    let o = bhcast(&["--config", s(&config), "synth", "--out", s(&data)]);
    assert!(o.status.success(), "{}", stderr(&o));
    (s(&config).to_string(), s(&data.join("traffic.csv")).to_string())
}

#[test]
fn ingest_reports_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let mut text = String::from("cell_id,timestamp_iso8601_utc,dl_bytes\n");
    for h in 0..24 {
        let v = if h == 1 { "lots".to_string() } else { (100 + h).to_string() };
        text.push_str(&format!("c1,2021-05-03T{h:02}:00:00Z,{v}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = bhcast(&["ingest", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn ingest_summarizes_clean_file() {
    let dir = tempfile::tempdir().unwrap();
    let (_, data) = small_setup(dir.path());
    let o = bhcast(&["ingest", "--strict", &data]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("cells       10"), "{out}");
    assert!(out.contains("days        75"), "{out}");
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(bhcast(&["evaluate", "--out", s(dir.path())]).status.code(), Some(1));
    assert_eq!(bhcast(&["evaluate", "--data", s(&missing)]).status.code(), Some(1));
    assert_eq!(bhcast(&["ingest", s(&missing)]).status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[forecast]\ntl = [9]\n").unwrap();
    let o = bhcast(&["--config", s(&bad), "synth", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("TL must be 1 to 5"), "{}", stderr(&o));
    std::fs::write(&bad, "sede = 1\n").unwrap();
    assert_eq!(bhcast(&["--config", s(&bad), "synth", "--out", s(dir.path())]).status.code(), Some(1));
}

#[test]
fn small_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (config, data) = small_setup(dir.path());
    let out = dir.path().join("out");
    let o = bhcast(&["--config", &config, "evaluate", "--data", &data, "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("method,approach,tl,la,status,mape,mpe_peak,n,error"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.contains(",ok,")), "{report}");
    for name in ["AD_CU_TL1_LA1.csv", "SA_CA_TL1_LA1.csv"] {
        let f = std::fs::read_to_string(out.join("forecasts").join(name)).unwrap();
        assert!(f.starts_with("date,actual,predicted\n"));
    }
    for name in ["summary.json", "run_config.toml", "clusters.csv", "clusters.json"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["cells"], 4);
    assert_eq!(summary["failed"], 0);

    // the resolved config reproduces the run
    let again = dir.path().join("again");
    let resolved = out.join("run_config.toml");
    let o = bhcast(&["--config", s(&resolved), "evaluate", "--out", s(&again)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(again.join("report.csv")).unwrap(), report.as_bytes());
}

#[test]
fn clustering_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (config, data) = small_setup(dir.path());
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = bhcast(&["--config", &config, "--seed", seed, "cluster", "--data", &data, "--out", s(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("clusters.csv")).unwrap()
    };
    assert_eq!(run("a", "5"), run("b", "5"));
}

#[test]
fn failed_cells_exit_two_and_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (config, data) = small_setup(dir.path());
    let out = dir.path().join("out");
    let o = bhcast(&[
        "--config",
        &config,
        "forecast",
        "--data",
        &data,
        "--out",
        s(&out),
        "--method",
        "sa",
        "--tl",
        "5",
        "--la",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("1 of 1 grid cells failed"), "{}", stderr(&o));
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().starts_with("SA,CU,5,1,failed,,,"), "{report}");
}

#[test]
fn forecast_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (config, data) = small_setup(dir.path());
    let out = dir.path().join("out");
    let o = bhcast(&[
        "--config",
        &config,
        "forecast",
        "--data",
        &data,
        "--out",
        s(&out),
        "--method",
        "ad",
        "--approach",
        "ca",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("AD   CA TL=1 LA=1  MAPE"), "{stdout}");
    assert!(out.join("forecasts/AD_CA_TL1_LA1.csv").is_file());
}
