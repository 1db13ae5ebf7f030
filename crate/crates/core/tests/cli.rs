//! End-to-end tests of the `stacklq` binary: argument parsing, exit codes,
//! file outputs, and the text contracts (summary values, CSV shape,
//! determinism).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stackelberg_lq::game_model::GameSpec;
use stackelberg_lq::instances::{scalar_example, two_state_example};
use stackelberg_lq::io::{load_solution, save_problem, save_solution, ProblemFile, SolutionBody};
use stackelberg_lq::Mat;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stacklq"))
}

fn write_problem(dir: &Path, name: &str, spec: &GameSpec, horizon: Option<usize>) -> PathBuf {
    let path = dir.join(name);
    save_problem(&path, &ProblemFile::from_game_spec(spec, horizon)).unwrap();
    path
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_exits_zero_and_usage_errors_exit_three() {
    let help = bin().arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_str(&help).contains("solve"));

    let bad_flag = bin().args(["solve", "--no-such-flag"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(3));

    let no_command = bin().output().unwrap();
    assert_eq!(no_command.status.code(), Some(3));

    let bad_value = bin().args(["solve", "p.json", "--horizon", "minus-one"]).output().unwrap();
    assert_eq!(bad_value.status.code(), Some(3));
}

#[test]
fn solve_prints_the_reference_gains_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "scalar.json", &scalar_example(), None);
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");

    let run1 = bin()
        .args(["solve", p.to_str().unwrap(), "--out", out1.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(run1.status.code(), Some(0), "stderr: {}", stderr_str(&run1));
    let text = stdout_str(&run1);
    assert!(text.contains("-0.0330"), "summary missing the leader gain: {text}");
    assert!(text.contains("-0.4268"), "summary missing the follower gain: {text}");
    assert!(text.contains("stabilizable = true"), "summary: {text}");

    let run2 = bin()
        .args(["solve", p.to_str().unwrap(), "--out", out2.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(run2.status.code(), Some(0));

    // Byte-identical output apart from the timestamp line.
    let strip = |path: &Path| -> String {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("generated_at_unix"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&out1), strip(&out2));
}

#[test]
fn simulate_writes_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "scalar.json", &scalar_example(), None);
    let sol = dir.path().join("scalar.solution.json");
    let solve = bin()
        .args(["solve", p.to_str().unwrap(), "--out", sol.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(solve.status.code(), Some(0));

    let csv = dir.path().join("traj.csv");
    let sim = bin()
        .args([
            "simulate",
            p.to_str().unwrap(),
            sol.to_str().unwrap(),
            "--steps",
            "5",
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(sim.status.code(), Some(0), "stderr: {}", stderr_str(&sim));

    let content = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = content.lines().collect();
    assert_eq!(lines[0], "k,x_1,u1_1,u2_1,J1_cum,J2_cum,lyapunov");
    assert_eq!(lines.len(), 1 + 6, "rows k = 0..=5 plus header");

    // The regulated state decays by the closed-loop factor each step.
    let x: Vec<f64> =
        lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((x[0] - 7.3).abs() < 1e-12);
    for k in 0..x.len() - 1 {
        let ratio = x[k + 1] / x[k];
        assert!((ratio - 0.1135).abs() < 1e-3, "step {k}: decay ratio {ratio} not near 0.1135");
    }

    // Cost columns start at zero and never decrease.
    let j2: Vec<f64> =
        lines[1..].iter().map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(j2[0], 0.0);
    assert!(j2.windows(2).all(|w| w[1] >= w[0]));

    // steps = 1 gives exactly two data rows.
    let csv1 = dir.path().join("one.csv");
    let sim1 = bin()
        .args([
            "simulate",
            p.to_str().unwrap(),
            sol.to_str().unwrap(),
            "--steps",
            "1",
            "--csv",
            csv1.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(sim1.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv1).unwrap().lines().count(), 3);
}

#[test]
fn simulate_rejects_a_foreign_solution_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "scalar.json", &scalar_example(), None);
    let sol = dir.path().join("s.json");
    assert_eq!(
        bin()
            .args(["solve", p.to_str().unwrap(), "--out", sol.to_str().unwrap()])
            .output()
            .unwrap()
            .status
            .code(),
        Some(0)
    );

    let mut other = scalar_example();
    other.Q2[(0, 0)] = 3.0;
    let p2 = write_problem(dir.path(), "other.json", &other, None);
    let csv = dir.path().join("t.csv");

    let refused = bin()
        .args([
            "simulate",
            p2.to_str().unwrap(),
            sol.to_str().unwrap(),
            "--steps",
            "3",
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(refused.status.code(), Some(3));
    assert!(stderr_str(&refused).contains("digest"));

    let forced = bin()
        .args([
            "simulate",
            p2.to_str().unwrap(),
            sol.to_str().unwrap(),
            "--steps",
            "3",
            "--csv",
            csv.to_str().unwrap(),
            "--override-digest",
        ])
        .output()
        .unwrap();
    assert_eq!(forced.status.code(), Some(0), "stderr: {}", stderr_str(&forced));
}

#[test]
fn verify_names_the_corrupted_check_and_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), "scalar.json", &scalar_example(), None);
    let sol_path = dir.path().join("s.json");
    let solve = bin()
        .args([
            "solve",
            p.to_str().unwrap(),
            "--horizon",
            "10",
            "--out",
            sol_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(solve.status.code(), Some(0));

    // Sign-flip the leader gains in the saved file.
    let mut file = load_solution(&sol_path).unwrap();
    match &mut file.body {
        SolutionBody::Finite(fb) => {
            for gain in fb.K2.iter_mut() {
                for row in gain.iter_mut() {
                    for v in row.iter_mut() {
                        *v = -*v;
                    }
                }
            }
        }
        SolutionBody::Stationary(_) => panic!("expected finite"),
    }
    save_solution(&sol_path, &file).unwrap();

    let verify = bin()
        .args([
            "verify",
            p.to_str().unwrap(),
            "--horizon",
            "10",
            "--n-perturb",
            "0",
            "--solution",
            sol_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(5), "stdout: {}", stdout_str(&verify));
    assert!(stderr_str(&verify).contains("FixedPointMismatch"), "stderr: {}", stderr_str(&verify));

    // The untouched solve verifies cleanly without perturbations.
    let clean = bin()
        .args(["verify", p.to_str().unwrap(), "--horizon", "10", "--n-perturb", "0"])
        .output()
        .unwrap();
    assert_eq!(clean.status.code(), Some(0), "stderr: {}", stderr_str(&clean));
    assert!(stdout_str(&clean).contains("verification PASSED"));
}

#[test]
fn simulate_flags_a_diverging_loop_as_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = scalar_example();
    spec.A[(0, 0)] = 2.0;
    spec.x0[0] = 1.0;
    let p = write_problem(dir.path(), "unstable.json", &spec, None);

    // Handcraft a stationary solution with zero gains: the loop then runs
    // open at x_{k+1} = 2 x_k and must trip the overflow guard.
    let game = stackelberg_lq::game_model::validate_spec(spec).unwrap();
    let zero = stackelberg_lq::riccati_infinite::StationarySolution {
        P1: Mat::identity(1, 1),
        P2: Mat::identity(1, 1),
        T: Mat::zeros(1, 1),
        K1: Mat::zeros(1, 1),
        K2: Mat::zeros(1, 1),
        Gamma1: Mat::identity(1, 1),
        Gamma2: Mat::identity(1, 1),
        M1: Mat::identity(1, 1),
        M2: Mat::zeros(1, 1),
        S: Mat::zeros(1, 1),
        Upsilon: Mat::identity(1, 1),
        Y: Mat::zeros(1, 1),
        Abar: Mat::from_element(1, 1, 2.0),
        iterations: 1,
        final_delta: 0.0,
    };
    let verdict = stackelberg_lq::riccati_infinite::stabilization_verdict(&game, &Ok(zero.clone()));
    let sol_path = dir.path().join("zero.json");
    save_solution(
        &sol_path,
        &stackelberg_lq::io::SolutionFile {
            tool_version: "test".into(),
            input_digest: stackelberg_lq::io::digest_of_file(&p).unwrap(),
            generated_at_unix: 0,
            body: SolutionBody::Stationary(stackelberg_lq::io::StationaryBody::from_solution(
                &zero, &verdict,
            )),
        },
    )
    .unwrap();

    let csv = dir.path().join("t.csv");
    let sim = bin()
        .args([
            "simulate",
            p.to_str().unwrap(),
            sol_path.to_str().unwrap(),
            "--steps",
            "80",
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(sim.status.code(), Some(4), "stderr: {}", stderr_str(&sim));
}

#[test]
fn check_names_definiteness_violations() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = scalar_example();
    spec.R11 = Mat::zeros(1, 1);
    let p = write_problem(dir.path(), "bad.json", &spec, None);
    let out = bin().args(["check", p.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_str(&out).contains("DefinitenessViolation"), "stderr: {}", stderr_str(&out));

    let good = write_problem(dir.path(), "good.json", &scalar_example(), None);
    let ok = bin().args(["check", good.to_str().unwrap()]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout_str(&ok).contains("assumptions hold"));
}

#[test]
fn unstabilizable_plant_exits_two_with_a_populated_reason() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = scalar_example();
    spec.A[(0, 0)] = 2.0;
    spec.B1 = Mat::zeros(1, 1);
    spec.B2 = Mat::zeros(1, 1);
    let p = write_problem(dir.path(), "unc.json", &spec, None);
    let out = bin().args(["solve", p.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stdout: {}", stdout_str(&out));
    assert!(stdout_str(&out).contains("AssumptionViolated"), "stdout: {}", stdout_str(&out));
}

#[test]
fn batch_mode_solves_every_problem_in_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    write_problem(dir.path(), "a.json", &scalar_example(), None);
    write_problem(dir.path(), "b.json", &two_state_example(), Some(6));
    let out = bin().args(["solve", dir.path().to_str().unwrap(), "--jobs", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    assert!(dir.path().join("a.solution.json").exists());
    assert!(dir.path().join("b.solution.json").exists());
    assert!(stdout_str(&out).contains("batch: 2 solved, 0 failed"));

    // A second pass must skip the generated outputs (they are not problems)
    // and still succeed.
    let again = bin().args(["solve", dir.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert!(stdout_str(&again).contains("batch: 2 solved, 0 failed"));
    assert!(!dir.path().join("a.solution.solution.json").exists());
}
