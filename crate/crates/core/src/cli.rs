//! File-driven command-line front end.
//!
//! Subcommands: `solve` (finite or stationary), `simulate` (CSV rollout of a
//! saved solution), `verify` (oracle audit of a solved equilibrium), `check`
//! (data validation and structural assumption tests only).
//!
//! Exit codes are a stable scripting contract:
//! * `0` — success;
//! * `2` — not stabilizable (stationary gates failed or assumptions violated);
//! * `3` — invalid input (unreadable/malformed files, bad flags, digest
//!   mismatch, validation violations);
//! * `4` — numerical failure (divergence, no convergence, singular Υ,
//!   state overflow) or an output file that could not be written;
//! * `5` — verification failure (an oracle check did not pass).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::game_model::{validate_spec, ValidatedGame};
use crate::io::{
    digest_of_file, load_problem, load_solution, mat_from_rows, save_solution, write_csv,
    FiniteBody, IoError, ProblemFile, SolutionBody, SolutionFile, StationaryBody,
};
use crate::linalg::min_symmetric_eigenvalue;
use crate::oracle::verify_stackelberg_point;
use crate::riccati_finite::{
    cost_follower_finite, cost_leader_finite, solve_finite, FiniteSolution,
};
use crate::riccati_infinite::{
    cost_follower_infinite, cost_leader_infinite, solve_stationary, stabilization_verdict,
    FailureReason,
};
use crate::simulator::{rollout, state_quadratic, Gains, RolloutError};
use crate::{Col, Mat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_STABILIZABLE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "stacklq",
    version,
    about = "Leader-follower linear-quadratic game: solvers, simulator, and equilibrium audits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file; finite horizon when --horizon (or the file's
    /// `horizon` field) is present, stationary otherwise. A directory solves
    /// every `*.json` problem inside it.
    Solve {
        /// Problem file, or a directory of problem files (batch mode)
        problem: PathBuf,
        /// Finite horizon N (stages 0..=N); overrides the file's `horizon`
        #[arg(long)]
        horizon: Option<usize>,
        /// Stationary fixed-point tolerance
        #[arg(long, default_value_t = crate::tol::STATIONARY_TOL)]
        tol: f64,
        /// Stationary iteration cap
        #[arg(long, default_value_t = crate::tol::STATIONARY_MAX_ITERS)]
        max_iters: usize,
        /// Output path (default: problem path with `.solution.json`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for batch mode (default: one per core)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Roll out a saved solution's closed loop and write a CSV trajectory.
    Simulate {
        problem: PathBuf,
        solution: PathBuf,
        /// Number of steps K (CSV rows k = 0..=K)
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// CSV output path
        #[arg(long)]
        csv: PathBuf,
        /// Proceed even when the solution's input digest does not match
        #[arg(long)]
        override_digest: bool,
    },
    /// Audit a solved finite-horizon equilibrium against the brute-force
    /// oracle: fixed point, cost formulas, leader perturbations.
    Verify {
        problem: PathBuf,
        /// Horizon N for the audit
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Number of random leader perturbation directions
        #[arg(long, default_value_t = 50)]
        n_perturb: usize,
        /// Perturbation size
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// RNG seed for the perturbation directions
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Audit this saved solution's gains instead of a fresh solve
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Validate problem data and report the structural assumption tests.
    Check { problem: PathBuf },
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve { problem, horizon, tol, max_iters, out, jobs } => {
            cmd_solve(&problem, horizon, tol, max_iters, out, jobs)
        }
        Command::Simulate { problem, solution, steps, csv, override_digest } => {
            cmd_simulate(&problem, &solution, steps, &csv, override_digest)
        }
        Command::Verify { problem, horizon, n_perturb, eps, seed, solution } => {
            cmd_verify(&problem, horizon, n_perturb, eps, seed, solution.as_deref())
        }
        Command::Check { problem } => cmd_check(&problem),
    }
}

struct CmdOutput {
    code: i32,
    out: String,
    err: String,
}

impl CmdOutput {
    fn fail(code: i32, err: String) -> Self {
        CmdOutput { code, out: String::new(), err }
    }
}

fn load_validated(problem_path: &Path) -> Result<(ProblemFile, ValidatedGame), CmdOutput> {
    let problem = load_problem(problem_path)
        .map_err(|e| CmdOutput::fail(EXIT_INVALID_INPUT, format!("{e}\n")))?;
    let spec = problem
        .to_game_spec()
        .map_err(|e| CmdOutput::fail(EXIT_INVALID_INPUT, format!("{e}\n")))?;
    let game = validate_spec(spec).map_err(|violations| {
        let mut err = format!("{}: invalid problem data\n", problem_path.display());
        for v in violations {
            let _ = writeln!(err, "  {v}");
        }
        CmdOutput::fail(EXIT_INVALID_INPUT, err)
    })?;
    Ok((problem, game))
}

/// 4-decimal rendering of a gain or value matrix for the one-screen summary.
fn fmt_mat4(m: &Mat) -> String {
    if m.nrows() == 1 && m.ncols() == 1 {
        return format!("{:.4}", m[(0, 0)]);
    }
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols()).map(|j| format!("{:.4}", m[(i, j)])).collect();
            cells.join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn eig_range(m: &Mat) -> (f64, f64) {
    let eigs = crate::linalg::symmetrize(m).symmetric_eigen().eigenvalues;
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn default_out_path(problem_path: &Path) -> PathBuf {
    problem_path.with_extension("solution.json")
}

fn solve_single(
    problem_path: &Path,
    horizon: Option<usize>,
    tol: f64,
    max_iters: usize,
    out_path: Option<PathBuf>,
) -> CmdOutput {
    let (problem, game) = match load_validated(problem_path) {
        Ok(v) => v,
        Err(e) => return e,
    };
    let mut out = String::new();
    let mut err = String::new();
    for w in &game.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let digest = match digest_of_file(problem_path) {
        Ok(d) => d,
        Err(e) => return CmdOutput::fail(EXIT_INVALID_INPUT, format!("{e}\n")),
    };
    let out_path = out_path.unwrap_or_else(|| default_out_path(problem_path));
    let x0 = problem.x0.as_ref().map(|_| game.x0.clone());

    let mode = horizon.or(problem.horizon);
    let code = match mode {
        Some(n) => {
            let _ = writeln!(out, "{}: finite horizon N = {n}", problem_path.display());
            match solve_finite(&game, n) {
                Ok(sol) => {
                    summarize_finite(&mut out, &sol, x0.as_ref(), &game);
                    let file = SolutionFile {
                        tool_version: env!("CARGO_PKG_VERSION").to_string(),
                        input_digest: digest,
                        generated_at_unix: now_unix(),
                        body: SolutionBody::Finite(FiniteBody::from_solution(&sol)),
                    };
                    match save_solution(&out_path, &file) {
                        Ok(()) => {
                            let _ = writeln!(out, "solution written to {}", out_path.display());
                            EXIT_OK
                        }
                        Err(e) => {
                            let _ = writeln!(err, "{e}");
                            EXIT_NUMERICAL
                        }
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "solve failed: {e}");
                    EXIT_NUMERICAL
                }
            }
        }
        None => {
            if crate::linalg::max_abs(&game.H1) > 0.0 || crate::linalg::max_abs(&game.H2) > 0.0 {
                let _ =
                    writeln!(err, "warning: stationary mode ignores the terminal weights H1/H2");
            }
            let result = solve_stationary(&game, tol, max_iters);
            let verdict = stabilization_verdict(&game, &result);
            let _ = writeln!(out, "{}: stationary mode", problem_path.display());
            match &result {
                Ok(sol) => {
                    summarize_stationary(&mut out, sol, &verdict, x0.as_ref(), &game);
                    if verdict.stabilizable {
                        let file = SolutionFile {
                            tool_version: env!("CARGO_PKG_VERSION").to_string(),
                            input_digest: digest,
                            generated_at_unix: now_unix(),
                            body: SolutionBody::Stationary(StationaryBody::from_solution(
                                sol, &verdict,
                            )),
                        };
                        match save_solution(&out_path, &file) {
                            Ok(()) => {
                                let _ = writeln!(out, "solution written to {}", out_path.display());
                                EXIT_OK
                            }
                            Err(e) => {
                                let _ = writeln!(err, "{e}");
                                EXIT_NUMERICAL
                            }
                        }
                    } else {
                        let _ = writeln!(
                            err,
                            "not stabilizable: {:?}",
                            verdict.failure_reason.expect("gate failed")
                        );
                        EXIT_NOT_STABILIZABLE
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "solve failed: {e}");
                    let _ = writeln!(out, "verdict: stabilizable = false");
                    let _ = writeln!(
                        out,
                        "  assumptions: controllable = {} (rank {}), observable = {} (rank {})",
                        verdict.assumption_report.controllable,
                        verdict.assumption_report.controllability_rank,
                        verdict.assumption_report.observable,
                        verdict.assumption_report.observability_rank,
                    );
                    if verdict.failure_reason == Some(FailureReason::AssumptionViolated) {
                        let _ = writeln!(out, "  failure_reason: AssumptionViolated");
                        EXIT_NOT_STABILIZABLE
                    } else {
                        let _ = writeln!(out, "  failure_reason: {:?}", verdict.failure_reason);
                        EXIT_NUMERICAL
                    }
                }
            }
        }
    };
    CmdOutput { code, out, err }
}

fn summarize_finite(
    out: &mut String,
    sol: &FiniteSolution,
    x0: Option<&Col>,
    game: &ValidatedGame,
) {
    let (p1_lo, p1_hi) = eig_range(&sol.P1[0]);
    let (p2_lo, p2_hi) = eig_range(&sol.P2[0]);
    let _ = writeln!(out, "  K1[0] = {}", fmt_mat4(&sol.K1[0]));
    let _ = writeln!(out, "  K2[0] = {}", fmt_mat4(&sol.K2[0]));
    let _ = writeln!(out, "  P1[0] eigenvalues in [{p1_lo:.6}, {p1_hi:.6}]");
    let _ = writeln!(out, "  P2[0] eigenvalues in [{p2_lo:.6}, {p2_hi:.6}]");
    if let Some(x0) = x0 {
        let j1 = cost_follower_finite(sol, game, x0);
        let j2 = cost_leader_finite(sol, x0);
        let _ = writeln!(out, "  J1* = {j1:.12}");
        let _ = writeln!(out, "  J2* = {j2:.12}");
    }
}

fn summarize_stationary(
    out: &mut String,
    sol: &crate::riccati_infinite::StationarySolution,
    verdict: &crate::riccati_infinite::Verdict,
    x0: Option<&Col>,
    game: &ValidatedGame,
) {
    let _ = writeln!(
        out,
        "  converged in {} iterations (final delta {:.3e})",
        sol.iterations, sol.final_delta
    );
    let _ = writeln!(out, "  K1 = {}", fmt_mat4(&sol.K1));
    let _ = writeln!(out, "  K2 = {}", fmt_mat4(&sol.K2));
    let _ = writeln!(out, "  P1 = {}", fmt_mat4(&sol.P1));
    let _ = writeln!(out, "  P2 = {}", fmt_mat4(&sol.P2));
    let _ = writeln!(out, "  Upsilon = {}", fmt_mat4(&sol.Upsilon));
    let _ = writeln!(
        out,
        "  min eig: P1 = {:.6e}, P2 = {:.6e}",
        verdict.p1_min_eig, verdict.p2_min_eig
    );
    let _ =
        writeln!(out, "  closed-loop spectral radius = {:.4}", verdict.spectral_radius_closed_loop);
    let _ = writeln!(
        out,
        "  assumptions: controllable = {} (rank {}), observable = {} (rank {})",
        verdict.assumption_report.controllable,
        verdict.assumption_report.controllability_rank,
        verdict.assumption_report.observable,
        verdict.assumption_report.observability_rank,
    );
    let _ = writeln!(out, "  stabilizable = {}", verdict.stabilizable);
    if let Some(x0) = x0 {
        if verdict.stabilizable {
            match cost_follower_infinite(sol, game, x0) {
                Ok(j1) => {
                    let _ = writeln!(out, "  J1* = {j1:.12}");
                }
                Err(e) => {
                    let _ = writeln!(out, "  J1* unavailable: {e}");
                }
            }
            let _ = writeln!(out, "  J2* = {:.12}", cost_leader_infinite(sol, x0));
        }
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn cmd_solve(
    problem: &Path,
    horizon: Option<usize>,
    tol: f64,
    max_iters: usize,
    out: Option<PathBuf>,
    jobs: Option<usize>,
) -> i32 {
    if problem.is_dir() {
        return solve_batch(problem, horizon, tol, max_iters, jobs);
    }
    if jobs.is_some() {
        eprintln!("note: --jobs only applies to directory (batch) mode");
    }
    let result = solve_single(problem, horizon, tol, max_iters, out);
    print!("{}", result.out);
    eprint!("{}", result.err);
    result.code
}

fn solve_batch(
    dir: &Path,
    horizon: Option<usize>,
    tol: f64,
    max_iters: usize,
    jobs: Option<usize>,
) -> i32 {
    use rayon::prelude::*;

    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
                name.ends_with(".json") && !name.ends_with(".solution.json")
            })
            .collect(),
        Err(e) => {
            eprintln!("cannot read directory {}: {e}", dir.display());
            return EXIT_INVALID_INPUT;
        }
    };
    files.sort();
    if files.is_empty() {
        eprintln!("no problem files in {}", dir.display());
        return EXIT_INVALID_INPUT;
    }

    let solve_all = || {
        files.par_iter().map(|p| solve_single(p, horizon, tol, max_iters, None)).collect::<Vec<_>>()
    };
    let results = match jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(solve_all),
        _ => solve_all(),
    };

    let mut worst = EXIT_OK;
    for r in &results {
        print!("{}", r.out);
        eprint!("{}", r.err);
        worst = worst.max(r.code);
    }
    println!(
        "batch: {} solved, {} failed",
        results.iter().filter(|r| r.code == EXIT_OK).count(),
        results.iter().filter(|r| r.code != EXIT_OK).count()
    );
    worst
}

pub fn cmd_simulate(
    problem_path: &Path,
    solution_path: &Path,
    steps: usize,
    csv_path: &Path,
    override_digest: bool,
) -> i32 {
    let (problem, game) = match load_validated(problem_path) {
        Ok(v) => v,
        Err(e) => {
            eprint!("{}", e.err);
            return e.code;
        }
    };
    if problem.x0.is_none() {
        eprintln!("problem file has no x0; simulation needs an initial state");
        return EXIT_INVALID_INPUT;
    }
    if steps == 0 {
        eprintln!("--steps must be at least 1");
        return EXIT_INVALID_INPUT;
    }
    let solution = match load_solution(solution_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID_INPUT;
        }
    };
    match digest_of_file(problem_path) {
        Ok(d) if d == solution.input_digest => {}
        Ok(d) => {
            if override_digest {
                eprintln!(
                    "warning: digest mismatch overridden ({} vs {})",
                    d, solution.input_digest
                );
            } else {
                eprintln!(
                    "solution was produced from a different problem file \
                     ({} vs {}); pass --override-digest to proceed",
                    solution.input_digest, d
                );
                return EXIT_INVALID_INPUT;
            }
        }
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID_INPUT;
        }
    }

    // Decode gains and the Lyapunov weight from the solution body.
    let decoded: Result<(Vec<Mat>, Vec<Mat>, Mat, bool), IoError> = match &solution.body {
        SolutionBody::Finite(fb) => {
            if steps > fb.horizon {
                eprintln!(
                    "steps = {steps} exceeds the solved horizon N = {}; \
                     a finite solution defines gains for k = 0..=N only",
                    fb.horizon
                );
                return EXIT_INVALID_INPUT;
            }
            fb.gains().and_then(|(k1, k2)| {
                let p2 = mat_from_rows("P2_0", &fb.P2_0)?;
                Ok((k1, k2, p2, false))
            })
        }
        SolutionBody::Stationary(sb) => {
            let k1 = mat_from_rows("K1", &sb.K1);
            k1.and_then(|k1| {
                let k2 = mat_from_rows("K2", &sb.K2)?;
                let p2 = mat_from_rows("P2", &sb.P2)?;
                Ok((vec![k1], vec![k2], p2, true))
            })
        }
    };
    let (k1, k2, p2, stationary) = match decoded {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID_INPUT;
        }
    };
    let gains = if stationary {
        Gains::Stationary { K1: &k1[0], K2: &k2[0] }
    } else {
        Gains::PerStep { K1: &k1, K2: &k2 }
    };

    let mut traj = match rollout(&game, &gains, &game.x0, steps) {
        Ok(t) => t,
        Err(e @ RolloutError::StateOverflow { .. }) => {
            eprintln!("{e}");
            return EXIT_NUMERICAL;
        }
        Err(e @ RolloutError::GainsExhausted { .. }) => {
            eprintln!("{e}");
            return EXIT_NUMERICAL;
        }
    };
    traj.lyapunov_values = state_quadratic(&traj, &p2);

    let file = match std::fs::File::create(csv_path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot create {}: {e}", csv_path.display());
            return EXIT_NUMERICAL;
        }
    };
    let mut writer = std::io::BufWriter::new(file);
    if let Err(e) = write_csv(&mut writer, &traj, &gains) {
        eprintln!("cannot write {}: {e}", csv_path.display());
        return EXIT_NUMERICAL;
    }
    drop(writer);

    let last = traj.states.last().unwrap();
    println!(
        "simulated {steps} steps: |x_K| = {:.6e}, J1 = {:.12}, J2 = {:.12}",
        crate::linalg::max_abs_col(last),
        traj.running_J1.last().unwrap(),
        traj.running_J2.last().unwrap()
    );
    println!("trajectory written to {}", csv_path.display());
    EXIT_OK
}

pub fn cmd_verify(
    problem_path: &Path,
    horizon: usize,
    n_perturb: usize,
    eps: f64,
    seed: u64,
    solution_path: Option<&Path>,
) -> i32 {
    let (problem, game) = match load_validated(problem_path) {
        Ok(v) => v,
        Err(e) => {
            eprint!("{}", e.err);
            return e.code;
        }
    };
    if problem.x0.is_none() {
        eprintln!("problem file has no x0; verification prices trajectories from it");
        return EXIT_INVALID_INPUT;
    }

    let mut sol = match solve_finite(&game, horizon) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("solve failed: {e}");
            return EXIT_NUMERICAL;
        }
    };

    // When auditing a saved solution, its gains and cost matrices replace the
    // fresh solve's (the per-step auxiliaries that set tolerances stay).
    if let Some(path) = solution_path {
        let file = match load_solution(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("{e}");
                return EXIT_INVALID_INPUT;
            }
        };
        let fb = match file.body {
            SolutionBody::Finite(fb) => fb,
            SolutionBody::Stationary(_) => {
                eprintln!("verify needs a finite-horizon solution file");
                return EXIT_INVALID_INPUT;
            }
        };
        if fb.horizon != horizon {
            eprintln!("solution file horizon {} does not match --horizon {horizon}", fb.horizon);
            return EXIT_INVALID_INPUT;
        }
        let decoded = fb.gains().and_then(|(k1, k2)| {
            let p1 = mat_from_rows("P1_0", &fb.P1_0)?;
            let p2 = mat_from_rows("P2_0", &fb.P2_0)?;
            let t0 = mat_from_rows("T_0", &fb.T_0)?;
            let xi = mat_from_rows("Xi", &fb.Xi)?;
            Ok((k1, k2, p1, p2, t0, xi))
        });
        match decoded {
            Ok((k1, k2, p1, p2, t0, xi)) => {
                if k1.len() != horizon + 1
                    || k2.len() != horizon + 1
                    || k1[0].shape() != sol.K1[0].shape()
                    || k2[0].shape() != sol.K2[0].shape()
                {
                    eprintln!("solution file gain arrays have the wrong shape");
                    return EXIT_INVALID_INPUT;
                }
                sol.K1 = k1;
                sol.K2 = k2;
                sol.P1[0] = p1;
                sol.P2[0] = p2;
                sol.T[0] = t0;
                sol.Xi = xi;
            }
            Err(e) => {
                eprintln!("{e}");
                return EXIT_INVALID_INPUT;
            }
        }
    }

    let report = match verify_stackelberg_point(&game, &sol, &game.x0, n_perturb, eps, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verification aborted: {e}");
            return EXIT_NUMERICAL;
        }
    };

    println!("fixed-point gap          = {:.3e}", report.fixed_point_gap);
    println!(
        "J1 oracle vs formula     = {:.12e} vs {:.12e} (delta {:.3e})",
        report.j1_oracle,
        report.j1_formula,
        (report.j1_oracle - report.j1_formula).abs()
    );
    println!(
        "J2 trajectory vs formula = {:.12e} vs {:.12e} (delta {:.3e})",
        report.j2_trajectory,
        report.j2_formula,
        (report.j2_trajectory - report.j2_formula).abs()
    );
    println!(
        "perturbations            = {} directions at eps = {eps:.1e}",
        report.perturbations_run
    );
    println!(
        "worst J2 decrease        = {:.3e} (allowed {:.3e})",
        report.worst_j2_decrease, report.tolerance_c
    );
    if report.passed {
        println!("verification PASSED");
        EXIT_OK
    } else {
        for f in &report.failures {
            eprintln!("FAILED: {f}");
        }
        EXIT_VERIFICATION
    }
}

pub fn cmd_check(problem_path: &Path) -> i32 {
    let (_, game) = match load_validated(problem_path) {
        Ok(v) => v,
        Err(e) => {
            eprint!("{}", e.err);
            return e.code;
        }
    };
    for w in &game.warnings {
        eprintln!("warning: {w}");
    }
    let report = crate::game_model::assumption_report(&game);
    println!("dimensions: n = {}, m1 = {}, m2 = {}", game.n(), game.m1(), game.m2());
    println!(
        "controllability: rank {} of {} -> {}",
        report.controllability_rank,
        game.n(),
        if report.controllable { "pass" } else { "FAIL" }
    );
    println!(
        "observability:   rank {} of {} -> {}",
        report.observability_rank,
        game.n(),
        if report.observable { "pass" } else { "FAIL" }
    );
    let q2_min = min_symmetric_eigenvalue(&game.Q2);
    println!("Q2 smallest eigenvalue: {q2_min:.6e}");
    if report.all_hold() {
        println!("assumptions hold");
        EXIT_OK
    } else {
        println!("assumptions violated");
        EXIT_NOT_STABILIZABLE
    }
}
