//! Closed-loop rollout, cost accumulation, and residual diagnostics.
//!
//! The simulator is deliberately naive: it steps `x_{k+1} = A·x_k + B1·u1_k +
//! B2·u2_k` and accumulates the two stage costs exactly as quadratic forms,
//! term by term. That naivety is the point — rollout totals serve as an
//! independent oracle for the closed-form cost expressions produced by the
//! Riccati solvers, so the simulator must share no algebra with them.
//!
//! Diagnostics tie a trajectory back to the equilibrium structure:
//! * costate reconstruction — rebuilds the follower's adjoint sequence from
//!   its backward difference equation and checks both the adjoint recursion
//!   and the closure `ζ_{k−1} = T_k·x_k`;
//! * Lyapunov decrements — checks that `x_k'·P2·x_k` falls by exactly the
//!   leader's stage cost along the optimal stationary loop;
//! * closed-loop gap — compares the two factorizations of the closed loop.

use crate::game_model::ValidatedGame;
use crate::linalg::{max_abs, max_abs_col, quad_form};
use crate::riccati_finite::FiniteSolution;
use crate::riccati_infinite::StationarySolution;
use crate::{tol, Col, Mat};

/// Either solver's output, for operations that accept both.
#[derive(Debug, Clone, Copy)]
pub enum SolutionRef<'a> {
    Finite(&'a FiniteSolution),
    Stationary(&'a StationarySolution),
}

/// Feedback gains to roll out: a per-step schedule (finite horizon) or a
/// single stationary pair.
#[derive(Debug, Clone, Copy)]
pub enum Gains<'a> {
    PerStep { K1: &'a [Mat], K2: &'a [Mat] },
    Stationary { K1: &'a Mat, K2: &'a Mat },
}

impl<'a> Gains<'a> {
    pub fn from_finite(sol: &'a FiniteSolution) -> Self {
        Gains::PerStep { K1: &sol.K1, K2: &sol.K2 }
    }

    pub fn from_stationary(sol: &'a StationarySolution) -> Self {
        Gains::Stationary { K1: &sol.K1, K2: &sol.K2 }
    }

    pub fn from_solution(sol: SolutionRef<'a>) -> Self {
        match sol {
            SolutionRef::Finite(f) => Gains::from_finite(f),
            SolutionRef::Stationary(s) => Gains::from_stationary(s),
        }
    }

    /// Gain pair applied at time `k`, or `None` when a per-step schedule has
    /// run out.
    pub fn at(&self, k: usize) -> Option<(&'a Mat, &'a Mat)> {
        match *self {
            Gains::PerStep { K1, K2 } => match (K1.get(k), K2.get(k)) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            },
            Gains::Stationary { K1, K2 } => Some((K1, K2)),
        }
    }
}

/// Residual diagnostics attached to a trajectory. All arrays hold nonnegative
/// magnitudes; empty until the corresponding check has been run.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticBundle {
    /// `‖ζ_{k−1} − T_k·x_k‖` for each k (closure of the backward equation).
    pub fbde_zeta_residuals: Vec<f64>,
    /// `‖λ_{k−1} − A'·λ_k − Q1·x_k‖` for each k (adjoint recursion).
    pub costate_residuals: Vec<f64>,
    /// `|(x_k'P2x_k − x_{k+1}'P2x_{k+1}) − stage2_k|` for each k.
    pub lyapunov_decrements: Vec<f64>,
    /// `‖(A + B1·K1 + B2·K2) − Υ⁻¹·M1·(A + B2·K2)‖_∞`.
    pub closed_loop_gap: f64,
}

/// A rolled-out closed loop of `K` steps: `K+1` states, `K` control pairs,
/// `K` cumulative cost entries (`running_J1[k]` totals stages `0..=k`).
/// `lyapunov_values` and `residuals` are filled by the diagnostic passes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<Col>,
    pub controls_u1: Vec<Col>,
    pub controls_u2: Vec<Col>,
    pub running_J1: Vec<f64>,
    pub running_J2: Vec<f64>,
    pub lyapunov_values: Vec<f64>,
    pub residuals: DiagnosticBundle,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.controls_u1.len()
    }

    /// Accumulated follower cost including a terminal weight on the last
    /// state.
    pub fn total_j1(&self, terminal: &Mat) -> f64 {
        let stage_sum = self.running_J1.last().copied().unwrap_or(0.0);
        stage_sum + quad_form(terminal, self.states.last().unwrap())
    }

    /// Accumulated leader cost including a terminal weight on the last state.
    pub fn total_j2(&self, terminal: &Mat) -> f64 {
        let stage_sum = self.running_J2.last().copied().unwrap_or(0.0);
        stage_sum + quad_form(terminal, self.states.last().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RolloutError {
    /// The state norm crossed the overflow guard — the loop is unstable;
    /// aborting keeps downstream math meaningful.
    #[error("StateOverflow at step {step}: state norm {norm:.3e}")]
    StateOverflow { step: usize, norm: f64 },
    /// A per-step gain schedule ran out before the requested step count.
    #[error("GainsExhausted at step {step}: only {available} gain pairs supplied")]
    GainsExhausted { step: usize, available: usize },
}

/// Roll the closed loop forward `steps` steps from `x0` under `gains`,
/// accumulating both players' stage costs:
/// `stage1 = x'Q1x + u1'R11u1 + u2'R12u2`,
/// `stage2 = x'Q2x + u1'R21u1 + u2'R22u2`.
pub fn rollout(
    game: &ValidatedGame,
    gains: &Gains,
    x0: &Col,
    steps: usize,
) -> Result<Trajectory, RolloutError> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls_u1 = Vec::with_capacity(steps);
    let mut controls_u2 = Vec::with_capacity(steps);
    let mut running_J1 = Vec::with_capacity(steps);
    let mut running_J2 = Vec::with_capacity(steps);
    let mut j1 = 0.0;
    let mut j2 = 0.0;

    states.push(x0.clone());
    for k in 0..steps {
        let (K1k, K2k) = gains.at(k).ok_or_else(|| {
            let available = match gains {
                Gains::PerStep { K1, .. } => K1.len(),
                Gains::Stationary { .. } => unreachable!("stationary gains never run out"),
            };
            RolloutError::GainsExhausted { step: k, available }
        })?;
        let x = states.last().unwrap();
        let u1 = K1k * x;
        let u2 = K2k * x;

        j1 += quad_form(&game.Q1, x) + quad_form(&game.R11, &u1) + quad_form(&game.R12, &u2);
        j2 += quad_form(&game.Q2, x) + quad_form(&game.R21, &u1) + quad_form(&game.R22, &u2);
        running_J1.push(j1);
        running_J2.push(j2);

        let x_next = &game.A * x + &game.B1 * &u1 + &game.B2 * &u2;
        let norm = max_abs_col(&x_next);
        if !norm.is_finite() || norm > tol::DIVERGENCE_GUARD {
            return Err(RolloutError::StateOverflow { step: k + 1, norm });
        }
        controls_u1.push(u1);
        controls_u2.push(u2);
        states.push(x_next);
    }

    Ok(Trajectory {
        states,
        controls_u1,
        controls_u2,
        running_J1,
        running_J2,
        lyapunov_values: Vec::new(),
        residuals: DiagnosticBundle::default(),
    })
}

/// `x_k'·P·x_k` along the trajectory, one value per state.
pub fn state_quadratic(traj: &Trajectory, P: &Mat) -> Vec<f64> {
    traj.states.iter().map(|x| quad_form(P, x)).collect()
}

/// Rebuild the follower's adjoint sequence along a full-horizon optimal
/// trajectory and fill the adjoint diagnostics.
///
/// The backward equation `ζ_{k−1} = A'·M1_{k+1}'·(ζ_k + P1_{k+1}·B2·u2_k)`
/// starts from `ζ_N = 0`; the adjoint is `λ_k = P1_{k+1}·x_{k+1} + ζ_k`.
/// Both sequences begin at index −1 (their `k = −1` values enter the cost
/// identities), stored with a one-slot offset: `zeta[i]` holds `ζ_{i−1}` and
/// `lambda[i]` holds `λ_{i−1}`, for `i = 0..=N+1`.
///
/// Fills `costate_residuals[i] = ‖λ_{i−1} − A'·λ_i − Q1·x_i‖` for
/// `i = 0..=N` and `fbde_zeta_residuals[i] = ‖ζ_{i−1} − T_i·x_i‖` for
/// `i = 0..=N+1`, and returns `(lambda, zeta)`.
///
/// The trajectory must cover the whole horizon (`N+1` steps, so `N+2`
/// states) and must have been produced under the solution's own gains.
pub fn reconstruct_costates(
    traj: &mut Trajectory,
    sol: &FiniteSolution,
    game: &ValidatedGame,
) -> (Vec<Col>, Vec<Col>) {
    let N = sol.horizon;
    assert_eq!(
        traj.states.len(),
        N + 2,
        "costate reconstruction needs the full-horizon trajectory"
    );
    let n = game.n();
    let At = game.A.transpose();

    let mut zeta = vec![Col::zeros(n); N + 2];
    // zeta[N+1] = ζ_N = 0 (terminal condition); sweep downward.
    for k in (0..=N).rev() {
        let M1t = sol.steps[k].M1.transpose();
        let forcing = &sol.P1[k + 1] * &game.B2 * &traj.controls_u2[k];
        zeta[k] = &At * &M1t * (&zeta[k + 1] + forcing);
    }

    let lambda: Vec<Col> = (0..=N + 1).map(|i| &sol.P1[i] * &traj.states[i] + &zeta[i]).collect();

    traj.residuals.costate_residuals = (0..=N)
        .map(|i| {
            let r = &lambda[i] - &At * &lambda[i + 1] - &game.Q1 * &traj.states[i];
            max_abs_col(&r)
        })
        .collect();
    traj.residuals.fbde_zeta_residuals = (0..=N + 1)
        .map(|i| {
            let r = &zeta[i] - &sol.T[i] * &traj.states[i];
            max_abs_col(&r)
        })
        .collect();

    (lambda, zeta)
}

/// Check the leader's Lyapunov identity along a trajectory generated under
/// the stationary optimal gains: the decrement of `V(x) = x'·P2·x` at each
/// step must equal the leader's stage cost.
///
/// Fills `lyapunov_values` and `lyapunov_decrements` (the per-step residual
/// magnitudes) and returns the largest residual.
///
/// # Panics
/// If any decrement is below −1e−9 — on an optimal trajectory the decrement
/// is a stage cost and cannot be materially negative.
pub fn lyapunov_check(traj: &mut Trajectory, P2: &Mat, game: &ValidatedGame) -> f64 {
    traj.lyapunov_values = state_quadratic(traj, P2);
    let mut worst = 0.0f64;
    let mut residuals = Vec::with_capacity(traj.steps());
    for k in 0..traj.steps() {
        let decrement = traj.lyapunov_values[k] - traj.lyapunov_values[k + 1];
        assert!(decrement >= -1e-9, "Lyapunov decrement {decrement:.3e} at step {k} is negative");
        let stage2 = quad_form(&game.Q2, &traj.states[k])
            + quad_form(&game.R21, &traj.controls_u1[k])
            + quad_form(&game.R22, &traj.controls_u2[k]);
        let r = (decrement - stage2).abs();
        worst = worst.max(r);
        residuals.push(r);
    }
    traj.residuals.lyapunov_decrements = residuals;
    worst
}

/// Largest gap between the direct closed loop `A + B1·K1 + B2·K2` and its
/// factored form `Υ⁻¹·M1·(A + B2·K2)` — stationary solutions compare against
/// the stored `Abar`, finite solutions take the maximum over all steps.
pub fn closed_loop_gap(game: &ValidatedGame, sol: SolutionRef) -> f64 {
    match sol {
        SolutionRef::Stationary(s) => {
            let direct = &game.A + &game.B1 * &s.K1 + &game.B2 * &s.K2;
            max_abs(&(direct - &s.Abar))
        }
        SolutionRef::Finite(f) => {
            let mut worst = 0.0f64;
            for k in 0..f.K1.len() {
                let direct = &game.A + &game.B1 * &f.K1[k] + &game.B2 * &f.K2[k];
                let ups_inv = f.steps[k]
                    .Upsilon
                    .clone()
                    .try_inverse()
                    .expect("Upsilon was invertible during the solve");
                let factored = ups_inv * &f.steps[k].M1 * (&game.A + &game.B2 * &f.K2[k]);
                worst = worst.max(max_abs(&(direct - factored)));
            }
            worst
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_model::validate_spec;
    use crate::instances::{random_instance, scalar_example, two_state_example};
    use crate::riccati_finite::{cost_leader_finite, solve_finite, transition_products};
    use crate::riccati_infinite::{cost_leader_infinite, solve_stationary};
    use approx::assert_abs_diff_eq;

    fn scalar_game() -> ValidatedGame {
        validate_spec(scalar_example()).unwrap()
    }

    #[test]
    fn reference_scalar_gains_regulate_at_the_expected_rate() {
        let game = scalar_game();
        let k1 = Mat::from_element(1, 1, -0.4268);
        let k2 = Mat::from_element(1, 1, -0.0330);
        let gains = Gains::Stationary { K1: &k1, K2: &k2 };
        let traj = rollout(&game, &gains, &game.x0, 30).unwrap();
        assert_abs_diff_eq!(traj.states[1][0], 0.828, epsilon = 2e-3);
        for k in 0..10 {
            let ratio = traj.states[k + 1][0] / traj.states[k][0];
            assert_abs_diff_eq!(ratio, 0.1134, epsilon = 1e-3);
        }
    }

    #[test]
    fn dead_beat_plant_with_zero_gains_freezes_the_cost() {
        let mut raw = scalar_example();
        raw.A = Mat::zeros(1, 1);
        let game = validate_spec(raw).unwrap();
        let z1 = Mat::zeros(1, 1);
        let z2 = Mat::zeros(1, 1);
        let gains = Gains::Stationary { K1: &z1, K2: &z2 };
        let traj = rollout(&game, &gains, &game.x0, 4).unwrap();
        assert_eq!(traj.states[1][0], 0.0);
        let stage0 = 7.3 * 7.3; // x0'Q1x0, controls are zero
        for k in 0..4 {
            assert_abs_diff_eq!(traj.running_J1[k], stage0, epsilon = 1e-12);
            assert_abs_diff_eq!(traj.running_J2[k], stage0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rollout_states_match_the_transition_products() {
        let game = validate_spec(two_state_example()).unwrap();
        let sol = solve_finite(&game, 12).unwrap();
        let gains = Gains::from_finite(&sol);
        let traj = rollout(&game, &gains, &game.x0, 13).unwrap();
        let phi = transition_products(&sol, &game);
        for k in 0..=13 {
            let predicted = &phi[k] * &game.x0;
            let diff = &traj.states[k] - predicted;
            assert!(max_abs_col(&diff) < 1e-10, "k={k}");
        }
    }

    #[test]
    fn unstable_loop_trips_the_overflow_guard() {
        let mut raw = scalar_example();
        raw.A = Mat::from_element(1, 1, 2.0);
        let game = validate_spec(raw).unwrap();
        let z1 = Mat::zeros(1, 1);
        let z2 = Mat::zeros(1, 1);
        let gains = Gains::Stationary { K1: &z1, K2: &z2 };
        match rollout(&game, &gains, &game.x0, 60) {
            Err(RolloutError::StateOverflow { step, norm }) => {
                assert!(step < 50, "overflow too late: step {step}");
                assert!(norm > 1e12);
            }
            other => panic!("expected StateOverflow, got {other:?}"),
        }
    }

    #[test]
    fn per_step_schedule_reports_exhaustion() {
        let game = validate_spec(two_state_example()).unwrap();
        let sol = solve_finite(&game, 3).unwrap();
        let gains = Gains::from_finite(&sol);
        match rollout(&game, &gains, &game.x0, 10) {
            Err(RolloutError::GainsExhausted { step, available }) => {
                assert_eq!(step, 4);
                assert_eq!(available, 4);
            }
            other => panic!("expected GainsExhausted, got {other:?}"),
        }
    }

    #[test]
    fn running_costs_never_decrease() {
        let game = validate_spec(two_state_example()).unwrap();
        let stat = solve_stationary(&game, 1e-12, 100_000).unwrap();
        let gains = Gains::from_stationary(&stat);
        let traj = rollout(&game, &gains, &game.x0, 50).unwrap();
        for k in 1..50 {
            assert!(traj.running_J1[k] >= traj.running_J1[k - 1]);
            assert!(traj.running_J2[k] >= traj.running_J2[k - 1]);
        }
    }

    #[test]
    fn long_rollout_cost_converges_to_the_value_matrix() {
        let game = scalar_game();
        let stat = solve_stationary(&game, 1e-13, 100_000).unwrap();
        let gains = Gains::from_stationary(&stat);
        let traj = rollout(&game, &gains, &game.x0, 400).unwrap();
        let j2 = cost_leader_infinite(&stat, &game.x0);
        assert_abs_diff_eq!(traj.running_J2[399], j2, epsilon = 1e-6 * j2);
    }

    #[test]
    fn finite_cost_formula_agrees_with_accumulated_stage_costs() {
        for seed in [1u64, 8, 21] {
            let raw = random_instance(seed, 2, 1, 1, true);
            let game = validate_spec(raw).unwrap();
            let N = 14;
            let sol = solve_finite(&game, N).unwrap();
            let gains = Gains::from_finite(&sol);
            let traj = rollout(&game, &gains, &game.x0, N + 1).unwrap();
            let j2_traj = traj.total_j2(&game.H2);
            let j2_formula = cost_leader_finite(&sol, &game.x0);
            assert_abs_diff_eq!(j2_traj, j2_formula, epsilon = 1e-8 * (1.0 + j2_traj.abs()));
        }
    }

    #[test]
    fn disconnected_leader_gives_identically_zero_adjoint_offset() {
        let mut raw = two_state_example();
        raw.B2 = Mat::zeros(2, 1);
        let game = validate_spec(raw).unwrap();
        let sol = solve_finite(&game, 10).unwrap();
        let gains = Gains::from_finite(&sol);
        let mut traj = rollout(&game, &gains, &game.x0, 11).unwrap();
        let (lambda, zeta) = reconstruct_costates(&mut traj, &sol, &game);
        for z in &zeta {
            assert_eq!(max_abs_col(z), 0.0);
        }
        for (i, l) in lambda.iter().enumerate() {
            let direct = &sol.P1[i] * &traj.states[i];
            assert_eq!(max_abs_col(&(l - direct)), 0.0);
        }
    }

    #[test]
    fn scalar_costate_residuals_vanish_along_the_optimal_trajectory() {
        let game = scalar_game();
        let sol = solve_finite(&game, 50).unwrap();
        let gains = Gains::from_finite(&sol);
        let mut traj = rollout(&game, &gains, &game.x0, 51).unwrap();
        reconstruct_costates(&mut traj, &sol, &game);
        let worst = traj.residuals.costate_residuals.iter().cloned().fold(0.0f64, f64::max);
        assert!(worst < 1e-9, "worst costate residual {worst:e}");
    }

    #[test]
    fn adjoint_closure_holds_on_a_random_three_state_instance() {
        let raw = random_instance(5, 3, 1, 1, true);
        let game = validate_spec(raw).unwrap();
        let sol = solve_finite(&game, 20).unwrap();
        let gains = Gains::from_finite(&sol);
        let mut traj = rollout(&game, &gains, &game.x0, 21).unwrap();
        reconstruct_costates(&mut traj, &sol, &game);
        let worst = traj.residuals.fbde_zeta_residuals.iter().cloned().fold(0.0f64, f64::max);
        assert!(worst < 1e-9, "worst closure residual {worst:e}");
    }

    #[test]
    fn lyapunov_residual_is_zero_from_the_origin() {
        let game = scalar_game();
        let stat = solve_stationary(&game, 1e-12, 100_000).unwrap();
        let gains = Gains::from_stationary(&stat);
        let mut traj = rollout(&game, &gains, &Col::zeros(1), 5).unwrap();
        assert_eq!(lyapunov_check(&mut traj, &stat.P2, &game), 0.0);
    }

    #[test]
    fn scalar_lyapunov_residual_is_tiny_over_a_hundred_steps() {
        let game = scalar_game();
        let stat = solve_stationary(&game, 1e-13, 100_000).unwrap();
        let gains = Gains::from_stationary(&stat);
        let mut traj = rollout(&game, &gains, &game.x0, 100).unwrap();
        let worst = lyapunov_check(&mut traj, &stat.P2, &game);
        assert!(worst < 1e-9, "worst Lyapunov residual {worst:e}");
    }

    #[test]
    fn lyapunov_decrements_telescope_and_the_values_decay() {
        let raw = random_instance(13, 2, 1, 1, false);
        let game = validate_spec(raw).unwrap();
        let stat = solve_stationary(&game, 1e-12, 100_000).unwrap();
        let gains = Gains::from_stationary(&stat);
        let mut traj = rollout(&game, &gains, &game.x0, 60).unwrap();
        let worst = lyapunov_check(&mut traj, &stat.P2, &game);
        assert!(worst < 1e-8);
        // telescoping: the summed decrements equal v_0 − v_K
        let v = &traj.lyapunov_values;
        let sum: f64 = (0..60).map(|k| v[k] - v[k + 1]).sum();
        assert_abs_diff_eq!(sum, v[0] - v[60], epsilon = 1e-10 * (1.0 + v[0].abs()));
        for k in 0..60 {
            assert!(v[k + 1] <= v[k] + 1e-9, "value rose at step {k}");
        }
    }

    #[test]
    fn follower_lyapunov_identity_reproduces_accumulated_stage_costs() {
        // Along the stationary optimal loop the follower's cumulative cost
        // telescopes: sum of stage1 over k < K equals
        //   x0'P1x0 + 2x0'ζ_{−1} − (xK'P1xK + 2xK'TxK) + Σ corr_k,
        // with ζ_k = T·x_{k+1} and the correction
        //   corr_k = u2'(R12 + B2'P1M1B2)u2 + 2u2'B2'M1'ζ_k − ζ_k'B1Γ1⁻¹B1'ζ_k.
        for (name, raw) in [("scalar", scalar_example()), ("two-state", two_state_example())] {
            let game = validate_spec(raw).unwrap();
            let stat = solve_stationary(&game, 1e-13, 100_000).unwrap();
            let gains = Gains::from_stationary(&stat);
            let K = 50;
            let traj = rollout(&game, &gains, &game.x0, K).unwrap();

            let g1_inv = stat.Gamma1.clone().try_inverse().unwrap();
            let M1B2 = &stat.M1 * &game.B2;
            let W = &game.R12 + game.B2.transpose() * &stat.P1 * &M1B2;
            let G = &game.B1 * &g1_inv * game.B1.transpose();
            let mut corr = 0.0;
            for k in 0..K {
                let u2 = &traj.controls_u2[k];
                let zeta_k = &stat.T * &traj.states[k + 1];
                corr += quad_form(&W, u2) + 2.0 * u2.dot(&(M1B2.transpose() * &zeta_k))
                    - quad_form(&G, &zeta_k);
            }
            let x0 = &game.x0;
            let xK = &traj.states[K];
            let lhs = traj.running_J1[K - 1];
            let rhs = quad_form(&stat.P1, x0) + 2.0 * x0.dot(&(&stat.T * x0))
                - (quad_form(&stat.P1, xK) + 2.0 * xK.dot(&(&stat.T * xK)))
                + corr;
            assert!(
                (lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()),
                "{name}: accumulated {lhs} vs identity {rhs}"
            );
        }
    }

    #[test]
    fn closed_loop_gap_is_negligible_for_both_solution_kinds() {
        let game = validate_spec(two_state_example()).unwrap();
        let fin = solve_finite(&game, 15).unwrap();
        let stat = solve_stationary(&game, 1e-12, 100_000).unwrap();
        assert!(closed_loop_gap(&game, SolutionRef::Finite(&fin)) < 1e-12);
        assert!(closed_loop_gap(&game, SolutionRef::Stationary(&stat)) < 1e-12);
    }

    #[test]
    fn zero_steps_yields_a_bare_initial_state() {
        let game = scalar_game();
        let z1 = Mat::zeros(1, 1);
        let z2 = Mat::zeros(1, 1);
        let gains = Gains::Stationary { K1: &z1, K2: &z2 };
        let traj = rollout(&game, &gains, &game.x0, 0).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert!(traj.controls_u1.is_empty());
        assert!(traj.running_J1.is_empty());
    }
}
