use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dpbw_cli::scenario::{ScenarioFile, StrategyFile};
use dpbw_core::{GameConfig, StrategyProfile};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn dpbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpbw")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const GSTAR: &str = r#"{"total_power": 18.0, "pools": [{"power": 2.0, "alpha": 0.8}, {"power": 3.0, "alpha": 0.8}]}"#;

#[test]
fn sweep_csv_header_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let g = scenario("gstar.json");
    let o = dpbw(&[
        "--config", g.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "sweep", "--param", "alpha", "--range", "0.50:0.85:0.05", "--grid", "64",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param_value,n_equilibria,x_0_1,x_1_0,regret,welfare,poa,pos,theorem1_bound_holds,theorem2_precond_holds,error"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[3][0], "0.65");
    for r in &rows {
        // every alpha up to the bound 1 - 3/18 keeps (0,0) as the only equilibrium
        let alpha: f64 = r[0].parse().unwrap();
        if alpha <= 1.0 - 3.0 / 18.0 {
            assert_eq!(&r[1..4], ["1", "0.0", "0.0"], "{r:?}");
            assert_eq!(r[9], "true");
        }
        assert_eq!(r[10], "");
    }
}

#[test]
fn classical_end_of_sweep_withholds() {
    let g = scenario("gstar.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = dpbw(&[
        "--config", g.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "sweep", "--param", "alpha", "--range", "1.0:1.0:0.1", "--grid", "64",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (x01, x10): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
    assert!(x01 > 0.0 && x10 > 0.0, "{row:?}");
    assert!(row[6].parse::<f64>().unwrap() > 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = scenario("gstar.json");
    let g = g.to_str().unwrap();

    assert_eq!(code(&dpbw(&["--config", g, "verify", "theorem2", "--grid", "32"])), 0);
    assert_eq!(code(&dpbw(&["--config", g, "verify", "corners"])), 0);

    // a failing check exits 1: the classical game has no zero-regret honest profile
    let failing = dpbw(&["--config", g, "verify", "eyal", "--grid", "32", "--min-regret", "1.0"]);
    assert_eq!(code(&failing), 1, "{}", stderr(&failing));

    assert_eq!(code(&dpbw(&["rewards"])), 2);
    assert_eq!(code(&dpbw(&["--config", g, "no-such-command"])), 2);
    assert_eq!(code(&dpbw(&["--config", "/nonexistent/x.json", "rewards"])), 2);
    assert_eq!(code(&dpbw(&["--config", g, "--format", "csv", "verify", "corners"])), 2);

    let bad_strategy = write(dir.path(), "s.json", r#"{"infiltration": [[0.0, 2.5], [0.0, 0.0]]}"#);
    let o = dpbw(&["--config", g, "--strategy", &bad_strategy, "rewards"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("infiltration[0]"), "{}", stderr(&o));

    let bad_alpha = write(dir.path(), "a.json", &GSTAR.replacen("0.8", "1.2", 1));
    let o = dpbw(&["--config", &bad_alpha, "rewards"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("pools[0].alpha"), "{}", stderr(&o));

    let unknown = write(dir.path(), "u.json", &GSTAR.replacen("\"alpha\": 0.8}", "\"alpha\": 0.8, \"fee\": 0.01}", 1));
    let o = dpbw(&["--config", &unknown, "rewards"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("fee"), "{}", stderr(&o));

    let eyal = scenario("eyal.json");
    let o = dpbw(&["--config", eyal.to_str().unwrap(), "verify", "theorem2", "--grid", "32"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--exploratory"));
    let o = dpbw(&["--config", eyal.to_str().unwrap(), "verify", "theorem2", "--grid", "32", "--exploratory"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn reports_do_not_depend_on_the_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = scenario("gstar_attack.json");
    let mut outputs = Vec::new();
    for name in ["one.json", "two.json"] {
        let out = dir.path().join(name);
        let o = dpbw(&[
            "--config", g.to_str().unwrap(), "--seed", "3", "--out", out.to_str().unwrap(),
            "simulate", "--rounds", "100000", "--epochs", "10", "--burn-in", "2",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
    assert!(v["results"]["canonical"].as_bool().unwrap());
}

#[test]
fn rewards_report_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let g = scenario("gstar_attack.json");
    let o = dpbw(&["--config", g.to_str().unwrap(), "--out", out.to_str().unwrap(), "rewards"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out).unwrap()).unwrap();
    let total: Vec<f64> = serde_json::from_value(v["results"]["rewards"]["total"].clone()).unwrap();
    assert!((total[0] - 1.6 / 17.0).abs() < 1e-15);
    assert!((total[1] - 3.0 / 17.0).abs() < 1e-15);
    assert_eq!(v["results"]["social_welfare"], 17.0);
}

#[test]
fn scenario_files_round_trip() {
    let config = GameConfig::new(100.0, vec![20.0, 15.0, 10.0], vec![0.6, 0.7, 0.8]);
    let mut file = ScenarioFile::from_game(&config);
    let mut x = StrategyProfile::zeros(3);
    x.set(0, 2, 1.25);
    x.set(2, 1, 0.5);
    file.strategy = Some(StrategyFile::from_profile(&x));
    let text = serde_json::to_string_pretty(&file).unwrap();
    let back: ScenarioFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, file);
    let game = back.game().unwrap();
    assert_eq!(game.config().alphas, config.alphas);
    assert_eq!(back.strategy.unwrap().profile(&game).unwrap(), x);
}

#[test]
fn bundled_scenarios_load() {
    for name in ["gstar.json", "gstar_attack.json", "eyal.json", "three_pools.json"] {
        let o = dpbw(&["--config", scenario(name).to_str().unwrap(), "rewards"]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
    }
}
