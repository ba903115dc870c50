use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "n_grid = 16, 64\nsamples = 4000\nestimate_n = 256\nestimate_samples = 2000\n\
                     ld_n_grid = 8, 16\nld_samples = 2000\nt_points = 5\ngrid_size = 256\npipeline_n = 6\n";

fn rmp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmp"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 4\n# fine so far\nsamples = many\n");
    let o = rmp(dir.path(), &["estimate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_estimates_name_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["be", "llt", "ld"] {
        let o = rmp(dir.path(), &[sub]);
        assert_eq!(o.status.code(), Some(1), "{sub}");
        assert!(stderr(&o).contains("estimate"), "{sub}: {}", stderr(&o));
    }
}

#[test]
fn estimate_then_experiments_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");

    let o = rmp(dir.path(), &["estimate", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("gamma"));
    assert!(out.join("estimates.txt").exists());

    let o = rmp(dir.path(), &["be", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("be_gaps.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    for sub in ["llt", "ld", "pipeline-check"] {
        let o = rmp(dir.path(), &[sub, "--config", &cfg]);
        assert!(o.status.success(), "{sub}: {}", stderr(&o));
    }
    assert!(out.join("llt.csv").exists() && out.join("ld_rates.csv").exists());
    assert!(std::fs::read_to_string(out.join("pipeline.txt")).unwrap().contains("PASS"));

    let o = rmp(dir.path(), &["report"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert_eq!(stdout(&o), text);
    assert!(text.contains("[estimates]") && text.contains("[berry-esseen"));
}

#[test]
fn seed_override_reproduces_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = rmp(dir.path(), &["estimate", "--config", &cfg, "--seed", "99", "--workers", "2"]);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(stdout(&o));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn strict_mode_stops_on_a_failed_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("atom = 2 0; 0 1\natom = 1 0; 0 2\n{SMALL}"));
    let o = rmp(dir.path(), &["check-model", "--config", &cfg, "--strict"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stdout(&o).to_lowercase().contains("irreducib"));
    let o = rmp(dir.path(), &["estimate", "--config", &cfg, "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    // without --strict it only warns
    let o = rmp(dir.path(), &["check-model", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn benchmark_passes_the_model_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmp(dir.path(), &["check-model", "--strict"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(dir.path().join("out/check_model.txt").exists());
}
