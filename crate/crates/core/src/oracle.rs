//! Independent brute-force verification of the equilibrium on small
//! instances — the crate's ground-truth layer.
//!
//! Nothing in this module uses the backward recursion. The follower's problem
//! is restated as an explicit quadratic program in the stacked control
//! sequence: with `X = F·x0 + G1·U1 + G2·U2` (forward substitution of the
//! dynamics), the follower's cost is a quadratic in `U1` whose Hessian is
//! positive definite, so the best response is one Cholesky solve. That gives
//! three independent checks of a solved equilibrium:
//!
//! * **fixed point** — replaying the leader's equilibrium inputs open-loop,
//!   the stacked best response must reproduce the closed-loop trajectory;
//! * **cost formulas** — the QP's optimal value must match the closed-form
//!   follower cost, and the rollout total the closed-form leader cost;
//! * **leader local optimality** — perturbing the leader's feedback in random
//!   directions and recomputing the follower's *exact* response (one joint
//!   linear solve for the resulting fixed point) must never lower the
//!   leader's cost beyond second-order tolerance.
//!
//! The completion-of-squares audit checks the identity that makes the leader
//! optimal: for any alternative leader feedback, the excess leader cost over
//! `x0'·P2₀·x0` equals the accumulated `r'·Γ2·r` residual along the
//! alternative loop, with the follower playing its reaction law.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::game_model::ValidatedGame;
use crate::linalg::{
    inf_norm, max_abs, max_abs_col, min_symmetric_eigenvalue, quad_form, symmetrize,
};
use crate::riccati_finite::{cost_follower_finite, cost_leader_finite, FiniteSolution};
use crate::simulator::{rollout, Gains, RolloutError, SolutionRef};
use crate::{tol, Col, Mat};

/// Ceiling on the stacked follower decision vector; beyond this the dense QP
/// stops being a sensible oracle.
pub const STACKED_DECISION_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("HessianNotPD: smallest eigenvalue {min_eigenvalue:.3e}")]
    HessianNotPD { min_eigenvalue: f64 },
    #[error("HorizonTooLarge: {decisions} stacked decisions exceed the {limit} guard")]
    HorizonTooLarge { decisions: usize, limit: usize },
    #[error("JointSystemSingular: best-response/feedback fixed point has no unique solution")]
    JointSystemSingular,
    #[error("RolloutFailed: state overflowed at step {step}")]
    RolloutFailed { step: usize },
}

/// The follower's problem as an explicit quadratic program in the stacked
/// control vector `U1 = (u1_0, …, u1_N)`: minimize
/// `½·U1'·H·U1 + g'·U1 + const`, with `H ≻ 0`.
#[derive(Debug, Clone)]
pub struct StackedLQ {
    pub horizon: usize,
    pub H: Mat,
    pub g: Col,
    pub solution_u1: Col,
}

/// Stacked forward-substitution operators, built once and shared across
/// best-response solves: `X = F·x0 + G1·U1 + G2·U2` where `X` stacks
/// `x_0 … x_{N+1}`.
struct StackedOps {
    N: usize,
    /// `G1'·Q̄1` where `Q̄1 = blockdiag(Q1, …, Q1, H1)`.
    G1tQ: Mat,
    /// Half Hessian `G1'·Q̄1·G1 + blockdiag(R11, …)`.
    Hblk: Mat,
    /// Coupling `G1'·Q̄1·G2`.
    C: Mat,
    F: Mat,
    G1: Mat,
    G2: Mat,
}

fn build_stacked_ops(game: &ValidatedGame, N: usize) -> StackedOps {
    let n = game.n();
    let m1 = game.m1();
    let m2 = game.m2();
    let rows = (N + 2) * n;

    // Powers of A up to N+1.
    let mut apow = Vec::with_capacity(N + 2);
    apow.push(Mat::identity(n, n));
    for _ in 0..=N {
        let next = &game.A * apow.last().unwrap();
        apow.push(next);
    }

    let mut F = Mat::zeros(rows, n);
    for k in 0..=N + 1 {
        F.view_mut((k * n, 0), (n, n)).copy_from(&apow[k]);
    }

    let mut G1 = Mat::zeros(rows, (N + 1) * m1);
    let mut G2 = Mat::zeros(rows, (N + 1) * m2);
    for j in 0..=N {
        for k in j + 1..=N + 1 {
            let blk1 = &apow[k - 1 - j] * &game.B1;
            let blk2 = &apow[k - 1 - j] * &game.B2;
            G1.view_mut((k * n, j * m1), (n, m1)).copy_from(&blk1);
            G2.view_mut((k * n, j * m2), (n, m2)).copy_from(&blk2);
        }
    }

    // Q̄1 = blockdiag(Q1 × (N+1), H1); R̄11 = blockdiag(R11 × (N+1)).
    let mut Qbar = Mat::zeros(rows, rows);
    for k in 0..=N {
        Qbar.view_mut((k * n, k * n), (n, n)).copy_from(&game.Q1);
    }
    Qbar.view_mut(((N + 1) * n, (N + 1) * n), (n, n)).copy_from(&game.H1);

    let G1tQ = G1.transpose() * &Qbar;
    let mut Hblk = &G1tQ * &G1;
    for k in 0..=N {
        let mut blk = Hblk.view_mut((k * m1, k * m1), (m1, m1));
        blk += &game.R11;
    }
    let C = &G1tQ * &G2;

    StackedOps { N, G1tQ, Hblk, C, F, G1, G2 }
}

fn stack(cols: &[Col]) -> Col {
    let m = cols[0].len();
    let mut out = Col::zeros(cols.len() * m);
    for (k, c) in cols.iter().enumerate() {
        out.rows_mut(k * m, m).copy_from(c);
    }
    out
}

fn unstack(v: &Col, m: usize) -> Vec<Col> {
    (0..v.len() / m).map(|k| v.rows(k * m, m).into_owned()).collect()
}

/// Both players' total costs for explicit open-loop control sequences,
/// including the terminal weights: straight forward simulation, no solver
/// machinery.
pub fn open_loop_costs(game: &ValidatedGame, u1: &[Col], u2: &[Col], x0: &Col) -> (f64, f64) {
    assert_eq!(u1.len(), u2.len());
    let mut x = x0.clone();
    let mut j1 = 0.0;
    let mut j2 = 0.0;
    for k in 0..u1.len() {
        j1 += quad_form(&game.Q1, &x) + quad_form(&game.R11, &u1[k]) + quad_form(&game.R12, &u2[k]);
        j2 += quad_form(&game.Q2, &x) + quad_form(&game.R21, &u1[k]) + quad_form(&game.R22, &u2[k]);
        x = &game.A * &x + &game.B1 * &u1[k] + &game.B2 * &u2[k];
    }
    j1 += quad_form(&game.H1, &x);
    j2 += quad_form(&game.H2, &x);
    (j1, j2)
}

/// Exact follower best response to a fixed open-loop leader sequence
/// (`u2_fixed` has `N+1` entries), solved as one positive definite linear
/// system in the stacked controls. Returns the QP data with its minimizer and
/// the achieved follower cost.
pub fn follower_best_response(
    game: &ValidatedGame,
    u2_fixed: &[Col],
    x0: &Col,
    N: usize,
) -> Result<(StackedLQ, f64), OracleError> {
    let m1 = game.m1();
    let decisions = (N + 1) * m1;
    if decisions > STACKED_DECISION_LIMIT {
        return Err(OracleError::HorizonTooLarge { decisions, limit: STACKED_DECISION_LIMIT });
    }
    assert_eq!(u2_fixed.len(), N + 1, "leader sequence must cover stages 0..=N");

    let ops = build_stacked_ops(game, N);
    let U2 = stack(u2_fixed);
    let H = symmetrize(&(2.0 * &ops.Hblk));
    let g = 2.0 * (&ops.G1tQ * (&ops.F * x0 + &ops.G2 * &U2));

    let chol = nalgebra::linalg::Cholesky::new(H.clone()).ok_or_else(|| {
        OracleError::HessianNotPD { min_eigenvalue: min_symmetric_eigenvalue(&H) }
    })?;
    let U1 = chol.solve(&(-&g));

    let u1_seq = unstack(&U1, m1);
    let (j1, _) = open_loop_costs(game, &u1_seq, u2_fixed, x0);
    Ok((StackedLQ { horizon: N, H, g, solution_u1: U1 }, j1))
}

/// The exact outcome when the leader commits to a *feedback* law
/// `u2_k = K2_k·x_k` and the follower best-responds to the realized input
/// sequence.
#[derive(Debug, Clone)]
pub struct FeedbackResponse {
    pub u1: Vec<Col>,
    pub u2: Vec<Col>,
    pub states: Vec<Col>,
    pub J1: f64,
    pub J2: f64,
}

/// Follower best response against a leader feedback law (one matrix per
/// stage). The consistency condition — the follower reacts to the leader's
/// realized inputs, which themselves depend on the trajectory the follower
/// shapes — is a linear fixed point, solved here as a single joint system in
/// `(U1, U2)`:
///
/// ```text
/// (G1'Q̄1G1 + R̄11)·U1 + G1'Q̄1G2·U2 = −G1'Q̄1·F·x0   (best-response stationarity)
/// −K̆G1·U1 + (I − K̆G2)·U2          =  K̆F·x0          (feedback consistency)
/// ```
///
/// where `K̆` applies `K2_k` to the k-th state block.
pub fn best_response_to_feedback(
    game: &ValidatedGame,
    k2_feedback: &[Mat],
    x0: &Col,
) -> Result<FeedbackResponse, OracleError> {
    assert!(!k2_feedback.is_empty());
    let N = k2_feedback.len() - 1;
    let decisions = (N + 1) * (game.m1() + game.m2());
    if decisions > STACKED_DECISION_LIMIT {
        return Err(OracleError::HorizonTooLarge { decisions, limit: STACKED_DECISION_LIMIT });
    }
    let ops = build_stacked_ops(game, N);
    feedback_response_with(&ops, game, k2_feedback, x0)
}

fn feedback_response_with(
    ops: &StackedOps,
    game: &ValidatedGame,
    k2_feedback: &[Mat],
    x0: &Col,
) -> Result<FeedbackResponse, OracleError> {
    let N = ops.N;
    assert_eq!(k2_feedback.len(), N + 1);
    let n = game.n();
    let m1 = game.m1();
    let m2 = game.m2();
    let d1 = (N + 1) * m1;
    let d2 = (N + 1) * m2;

    let mut Kb = Mat::zeros(d2, (N + 2) * n);
    for k in 0..=N {
        Kb.view_mut((k * m2, k * n), (m2, n)).copy_from(&k2_feedback[k]);
    }
    let KG1 = &Kb * &ops.G1;
    let KG2 = &Kb * &ops.G2;
    let Fx0 = &ops.F * x0;

    let mut M = Mat::zeros(d1 + d2, d1 + d2);
    M.view_mut((0, 0), (d1, d1)).copy_from(&ops.Hblk);
    M.view_mut((0, d1), (d1, d2)).copy_from(&ops.C);
    M.view_mut((d1, 0), (d2, d1)).copy_from(&(-&KG1));
    M.view_mut((d1, d1), (d2, d2)).copy_from(&(Mat::identity(d2, d2) - &KG2));

    let mut rhs = Col::zeros(d1 + d2);
    rhs.rows_mut(0, d1).copy_from(&(-(&ops.G1tQ * &Fx0)));
    rhs.rows_mut(d1, d2).copy_from(&(&Kb * &Fx0));

    let sol = M.lu().solve(&rhs).ok_or(OracleError::JointSystemSingular)?;
    let u1 = unstack(&sol.rows(0, d1).into_owned(), m1);
    let u2 = unstack(&sol.rows(d1, d2).into_owned(), m2);

    let mut states = Vec::with_capacity(N + 2);
    states.push(x0.clone());
    let mut j1 = 0.0;
    let mut j2 = 0.0;
    for k in 0..=N {
        let x = states.last().unwrap();
        j1 += quad_form(&game.Q1, x) + quad_form(&game.R11, &u1[k]) + quad_form(&game.R12, &u2[k]);
        j2 += quad_form(&game.Q2, x) + quad_form(&game.R21, &u1[k]) + quad_form(&game.R22, &u2[k]);
        let x_next = &game.A * x + &game.B1 * &u1[k] + &game.B2 * &u2[k];
        if !(max_abs_col(&x_next) < tol::DIVERGENCE_GUARD) {
            return Err(OracleError::RolloutFailed { step: k + 1 });
        }
        states.push(x_next);
    }
    j1 += quad_form(&game.H1, states.last().unwrap());
    j2 += quad_form(&game.H2, states.last().unwrap());

    Ok(FeedbackResponse { u1, u2, states, J1: j1, J2: j2 })
}

/// Everything the equilibrium verification measured, plus the pass verdict.
/// `failures` names each failed check in a human-readable line.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Largest control/state gap between the stacked best response to the
    /// equilibrium leader inputs and the closed-loop trajectory.
    pub fixed_point_gap: f64,
    pub j1_oracle: f64,
    pub j1_formula: f64,
    pub j2_trajectory: f64,
    pub j2_formula: f64,
    pub perturbations_run: usize,
    /// Largest observed `J2(optimal) − J2(perturbed)` (positive = some
    /// perturbation made the leader cheaper).
    pub worst_j2_decrease: f64,
    /// The perturbation direction achieving `worst_j2_decrease`.
    pub worst_direction: Option<Vec<Mat>>,
    /// Second-order allowance `10·max_k‖Γ2_{k+1}‖_∞ · eps²`.
    pub tolerance_c: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

fn map_rollout_err(e: RolloutError) -> OracleError {
    match e {
        RolloutError::StateOverflow { step, .. } => OracleError::RolloutFailed { step },
        RolloutError::GainsExhausted { step, .. } => OracleError::RolloutFailed { step },
    }
}

/// Verify a solved finite-horizon equilibrium against the brute-force layer:
/// fixed-point check, both cost formulas, and the leader perturbation audit
/// (`n_perturb` random directions of size `eps`, derandomized by `seed`).
pub fn verify_stackelberg_point(
    game: &ValidatedGame,
    sol: &FiniteSolution,
    x0: &Col,
    n_perturb: usize,
    eps: f64,
    seed: u64,
) -> Result<VerificationReport, OracleError> {
    let N = sol.horizon;
    let m2 = game.m2();
    let n = game.n();
    let mut failures = Vec::new();

    // Equilibrium closed loop.
    let gains = Gains::from_finite(sol);
    let traj = rollout(game, &gains, x0, N + 1).map_err(map_rollout_err)?;

    // (a) fixed point: best response to the replayed leader inputs must
    // reproduce the closed loop.
    let (stacked, j1_oracle) = follower_best_response(game, &traj.controls_u2, x0, N)?;
    let u1_br = unstack(&stacked.solution_u1, game.m1());
    let mut scale = 0.0f64;
    let mut gap = 0.0f64;
    for k in 0..=N {
        gap = gap.max(max_abs_col(&(&u1_br[k] - &traj.controls_u1[k])));
        scale = scale.max(max_abs_col(&traj.controls_u1[k]));
    }
    {
        // state gap of the best-response trajectory
        let mut x = x0.clone();
        for k in 0..=N {
            x = &game.A * &x + &game.B1 * &u1_br[k] + &game.B2 * &traj.controls_u2[k];
            gap = gap.max(max_abs_col(&(&x - &traj.states[k + 1])));
            scale = scale.max(max_abs_col(&traj.states[k + 1]));
        }
    }
    let fp_threshold = 1e-7 * (1.0 + scale);
    if !(gap <= fp_threshold) {
        failures.push(format!(
            "FixedPointMismatch: best-response gap {gap:.3e} exceeds {fp_threshold:.3e}"
        ));
    }

    // (b) cost formulas.
    let j1_formula = cost_follower_finite(sol, game, x0);
    let j2_formula = cost_leader_finite(sol, x0);
    let j2_trajectory = traj.total_j2(&game.H2);
    if !((j1_oracle - j1_formula).abs() <= 1e-7 * (1.0 + j1_oracle.abs())) {
        failures.push(format!(
            "FollowerCostMismatch: oracle {j1_oracle:.12e} vs formula {j1_formula:.12e}"
        ));
    }
    if !((j2_trajectory - j2_formula).abs() <= 1e-7 * (1.0 + j2_trajectory.abs())) {
        failures.push(format!(
            "LeaderCostMismatch: trajectory {j2_trajectory:.12e} vs formula {j2_formula:.12e}"
        ));
    }

    // (c) leader perturbation audit with the follower's exact response.
    let c = 10.0 * sol.steps.iter().map(|s| inf_norm(&s.Gamma2)).fold(0.0f64, f64::max);
    let tolerance_c = c * eps * eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directions: Vec<Vec<Mat>> = (0..n_perturb)
        .map(|_| {
            let mut dir: Vec<Mat> =
                (0..=N).map(|_| Mat::from_fn(m2, n, |_, _| rng.random_range(-1.0..1.0))).collect();
            let peak = dir.iter().map(max_abs).fold(0.0f64, f64::max);
            if peak > 0.0 {
                for d in &mut dir {
                    *d /= peak;
                }
            }
            dir
        })
        .collect();

    let ops = build_stacked_ops(game, N);
    let j2_perturbed: Vec<f64> = directions
        .par_iter()
        .map(|dir| {
            let k2p: Vec<Mat> = (0..=N).map(|k| &sol.K2[k] + eps * &dir[k]).collect();
            feedback_response_with(&ops, game, &k2p, x0).map(|r| r.J2)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut worst_j2_decrease = 0.0f64;
    let mut worst_idx = None;
    for (i, j2p) in j2_perturbed.iter().enumerate() {
        let decrease = j2_formula - j2p;
        if worst_idx.is_none() || decrease > worst_j2_decrease {
            worst_j2_decrease = decrease;
            worst_idx = Some(i);
        }
    }
    if worst_j2_decrease > tolerance_c + 1e-9 {
        let idx = worst_idx.unwrap();
        failures.push(format!(
            "LeaderNotOptimal: direction #{idx} lowered J2 by {worst_j2_decrease:.3e} \
             (allowed {:.3e})",
            tolerance_c + 1e-9
        ));
    }

    let passed = failures.is_empty();
    Ok(VerificationReport {
        fixed_point_gap: gap,
        j1_oracle,
        j1_formula,
        j2_trajectory,
        j2_formula,
        perturbations_run: n_perturb,
        worst_j2_decrease,
        worst_direction: worst_idx.map(|i| directions[i].clone()),
        tolerance_c,
        passed,
        failures,
    })
}

/// Both sides of the leader's completion-of-squares identity.
#[derive(Debug, Clone)]
pub struct SquaresAudit {
    /// `J2(alternative) − x0'·P2₀·x0` (terminal weighted by the solution's
    /// final value matrix).
    pub lhs: f64,
    /// Accumulated `r_k'·Γ2_{k+1}·r_k` with `r_k = u2_k + Γ2⁻¹·M2·x_k`.
    pub rhs: f64,
    pub j2_alt: f64,
    pub j2_opt: f64,
}

impl SquaresAudit {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Evaluate the completion-of-squares identity under an alternative leader
/// feedback sequence, with the follower playing its reaction law
/// `u1_k = −Y_{k+1}·(A + B2·K̃2_k)·x_k` against it.
///
/// For a finite solution `alt_gains` must cover the whole horizon
/// (`N+1` entries, terminal weight `P2_{N+1} = H2`); for a stationary
/// solution any number of stages is allowed and the terminal weight is `P2`
/// itself. The identity is exact in exact arithmetic for *any* bounded
/// alternative gains; the returned residual is its floating-point defect.
pub fn completion_of_squares_audit(
    game: &ValidatedGame,
    sol: SolutionRef,
    alt_gains: &[Mat],
    x0: &Col,
) -> Result<SquaresAudit, OracleError> {
    let K = alt_gains.len();
    if let SolutionRef::Finite(f) = sol {
        assert_eq!(K, f.horizon + 1, "finite audit must cover the whole horizon");
    }
    let (p2_start, terminal): (&Mat, &Mat) = match sol {
        SolutionRef::Finite(f) => (&f.P2[0], &f.P2[f.horizon + 1]),
        SolutionRef::Stationary(s) => (&s.P2, &s.P2),
    };

    let mut x = x0.clone();
    let mut stage_sum = 0.0;
    let mut rhs = 0.0;
    for (k, altK) in alt_gains.iter().enumerate() {
        let (Gamma2, M2, Y): (&Mat, &Mat, &Mat) = match sol {
            SolutionRef::Finite(f) => (&f.steps[k].Gamma2, &f.steps[k].M2, &f.steps[k].Y),
            SolutionRef::Stationary(s) => (&s.Gamma2, &s.M2, &s.Y),
        };
        let acl = &game.A + &game.B2 * altK;
        let u2 = altK * &x;
        let u1 = -(Y * &acl * &x);

        stage_sum +=
            quad_form(&game.Q2, &x) + quad_form(&game.R21, &u1) + quad_form(&game.R22, &u2);
        let g2_inv = Gamma2
            .clone()
            .try_inverse()
            .expect("Gamma2 is positive definite in a produced solution");
        let r = &u2 + g2_inv * (M2 * &x);
        rhs += quad_form(Gamma2, &r);

        let x_next = &game.A * &x + &game.B1 * &u1 + &game.B2 * &u2;
        if !(max_abs_col(&x_next) < tol::DIVERGENCE_GUARD) {
            return Err(OracleError::RolloutFailed { step: k + 1 });
        }
        x = x_next;
    }

    let j2_alt = stage_sum + quad_form(terminal, &x);
    let j2_opt = quad_form(p2_start, x0);
    Ok(SquaresAudit { lhs: j2_alt - j2_opt, rhs, j2_alt, j2_opt })
}
