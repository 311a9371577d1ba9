use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use magspace_core::io::{read_vector, read_wave, write_scalar};
use magspace_core::{GridSpec, ScalarField};
use tempfile::TempDir;

struct Run {
    dir: TempDir,
}

impl Run {
    fn new(config: &str) -> Run {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("run.toml"), config).unwrap();
        Run { dir }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, args: &[&str]) -> i32 {
        let output = Command::new(env!("CARGO_BIN_EXE_magspace"))
            .args(args)
            .arg("--config")
            .arg(self.dir.path().join("run.toml"))
            .arg("--out")
            .arg(self.out())
            .output()
            .unwrap();
        output.status.code().unwrap()
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.out().join(name)).unwrap()
    }

    fn toml(&self, name: &str) -> toml::Table {
        self.read(name).parse().unwrap()
    }
}

fn float(t: &toml::Table, key: &str) -> f64 {
    t[key].as_float().unwrap()
}

#[test]
fn gauge_of_zero_field_writes_zero_potential() {
    let run = Run::new("[grid]\nhalfwidth = 4.0\npoints = 33\n[field]\nkind = \"constant\"\nstrength = 0.0\n");
    assert_eq!(run.exec(&["gauge"]), 0);
    let a = read_vector(&run.out().join("potential")).unwrap();
    assert!(a.x().iter().chain(a.y()).all(|&v| v == 0.0));
    assert!(run.out().join("metadata.toml").exists());
    assert!(run.out().join("config.toml").exists());
}

#[test]
fn gauge_of_gaussian_reports_residuals() {
    let run = Run::new("[field]\nkind = \"gaussian\"\n");
    assert_eq!(run.exec(&["gauge"]), 0);
    let report = run.toml("report.toml");
    assert_eq!(report["points"].as_integer(), Some(257));
    let curl = float(&report, "curl_residual");
    // Second-order stencils leave a curl residual of a few 1e-3 here.
    assert!(curl.is_finite() && curl < 1e-2, "curl residual {curl}");
    assert!(float(&report, "div_residual") < 1e-10);
    assert!(run.read("growth.csv").starts_with("radius,"));
}

#[test]
fn custom_field_on_another_grid_is_a_config_error() {
    let run = Run::new("[field]\nkind = \"custom\"\npath = \"b\"\n");
    let g = GridSpec::new(2.0, 33).unwrap();
    write_scalar(&run.dir.path().join("b"), &ScalarField::constant(g, 1.0)).unwrap();
    assert_eq!(run.exec(&["gauge"]), 2);
}

#[test]
fn trivial_minimization_converges_at_zero_energy() {
    let run = Run::new(
        "potential = \"zero\"\n[grid]\nhalfwidth = 3.0\npoints = 25\n[field]\nkind = \"constant\"\nstrength = 0.0\n",
    );
    assert_eq!(run.exec(&["minimize"]), 0);
    let report = run.toml("report.toml");
    assert_eq!(float(&report, "energy"), 0.0);
    assert_eq!(report["converged"].as_bool(), Some(true));
    let psi = read_wave(&run.out().join("state")).unwrap();
    assert!(psi.values().iter().all(|z| z.re == 1.0 && z.im == 0.0));
    assert!(run.read("history.csv").starts_with("iteration,energy,gradient_norm"));
}

#[test]
fn constant_field_minimization_has_positive_ball_energy() {
    let run = Run::new(
        "radii = [8.0]\n[grid]\nhalfwidth = 10.0\npoints = 81\n[field]\nkind = \"constant\"\nstrength = 1.0\n\
         [initial]\nkind = \"random-perturbation\"\namplitude = 0.1\nseed = 3\n",
    );
    assert_eq!(run.exec(&["minimize"]), 0);
    let report = run.toml("report.toml");
    let balls = report["balls"].as_array().unwrap();
    let e = balls[0]["energy"].as_float().unwrap();
    assert!(e > 0.0, "E_min(8) = {e}");
}

#[test]
fn iteration_cap_is_exit_four() {
    let run = Run::new("[grid]\nhalfwidth = 4.0\npoints = 33\n[minimize]\nmax_iterations = 1\n");
    assert_eq!(run.exec(&["minimize"]), 4);
    let report = run.toml("report.toml");
    assert_eq!(report["converged"].as_bool(), Some(false));
    assert_eq!(report["termination"].as_str(), Some("iteration-cap"));
}

#[test]
fn default_verify_has_no_violations() {
    let run = Run::new("");
    assert_eq!(run.exec(&["verify"]), 0);
    let report = run.toml("report.toml");
    assert_eq!(report["lemma_violations"].as_integer(), Some(0));
    assert_eq!(report["dirichlet_violations"].as_integer(), Some(0));
    assert_eq!(run.read("lemma25.csv").lines().count(), 101);
    assert_eq!(run.read("dirichlet.csv").lines().count(), 101);
}

#[test]
fn negative_field_violates_the_hypothesis() {
    let run = Run::new("[suite]\nfield_strength = -1.0\ntrials = 2\npoints = 65\n");
    assert_eq!(run.exec(&["verify"]), 2);
}

#[test]
fn zero_trials_is_a_config_error() {
    let run = Run::new("[suite]\ntrials = 0\n");
    assert_eq!(run.exec(&["verify"]), 2);
}

#[test]
fn quick_constant_growth_writes_one_row_per_radius() {
    let run = Run::new("radii = [8.0, 12.0]\n[field]\nkind = \"constant\"\nstrength = 1.0\n");
    assert_eq!(run.exec(&["experiment", "--quick"]), 0);
    let table = run.read("constant-growth.csv");
    assert_eq!(table.lines().count(), 3);
    assert!(run.out().join("constant-growth.meta.toml").exists());
    assert!(run.out().join("plot/constant-growth_e_min.csv").exists());
}

#[test]
fn l1_energy_of_constant_field_is_rejected() {
    let run = Run::new("[field]\nkind = \"constant\"\nstrength = 1.0\n[experiment]\npreset = \"l1-energy\"\n");
    assert_eq!(run.exec(&["experiment", "--quick"]), 2);
}

#[test]
fn unknown_preset_and_bad_flags_are_config_errors() {
    let run = Run::new("[experiment]\npreset = \"sideways\"\n");
    assert_eq!(run.exec(&["experiment"]), 2);
    let run = Run::new("");
    assert_eq!(run.exec(&["experiment", "--threads", "0"]), 2);
    assert_eq!(run.exec(&["levitate"]), 2);
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = tempfile::tempdir().unwrap();
    let code = Command::new(env!("CARGO_BIN_EXE_magspace"))
        .args(["gauge", "--config"])
        .arg(Path::new("/nonexistent/run.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
}

#[test]
fn seed_flag_overrides_config_seed_in_echo() {
    let run = Run::new("seed = 1\n[suite]\ntrials = 1\npoints = 33\nhalfwidth = 4.0\nradius = 3.0\n");
    assert_eq!(run.exec(&["verify", "--seed", "17"]), 0);
    let echo = run.toml("config.toml");
    assert_eq!(echo["seed"].as_integer(), Some(17));
    assert_eq!(echo["suite"]["seed"].as_integer(), Some(17));
}
