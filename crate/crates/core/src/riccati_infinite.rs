//! Stationary (infinite-horizon) solver: value iteration on the coupled
//! backward step, the stabilization verdict, and the series form of the
//! follower's cost.
//!
//! The iteration starts from `(P1, P2, T) = (0, 0, 0)` and applies
//! [`backward_step`] until the largest entrywise change across the three
//! carried matrices drops below a tolerance. One extra confirmation step is
//! then taken and its output is what the solution reports, so the returned
//! matrices are a fixed point of the step to within `final_delta`.
//!
//! A solution alone is not a stabilization proof. [`stabilization_verdict`]
//! applies the gates in a fixed order — structural assumptions, convergence,
//! Υ conditioning, positive definiteness of `P1` then `P2`, and finally the
//! spectral radius of the closed loop `Ā = Υ⁻¹·M1·(A + B2·K2)` — and reports
//! the first failure. The order matters: a divergent iteration on an
//! uncontrollable plant is blamed on the plant, not on the arithmetic.

use serde::{Deserialize, Serialize};

use crate::game_model::{assumption_report, AssumptionReport, ValidatedGame};
use crate::linalg::{
    condition_number, max_abs, max_abs_diff, min_symmetric_eigenvalue, quad_form, spectral_radius,
};
use crate::riccati_finite::{backward_step, StepError};
use crate::{tol, Col, Mat};

/// Fixed point of the coupled backward step, with the gains, auxiliaries, and
/// closed-loop matrix evaluated at it.
#[derive(Debug, Clone)]
pub struct StationarySolution {
    pub P1: Mat,
    pub P2: Mat,
    pub T: Mat,
    pub K1: Mat,
    pub K2: Mat,
    pub Gamma1: Mat,
    pub Gamma2: Mat,
    pub M1: Mat,
    pub M2: Mat,
    pub S: Mat,
    pub Upsilon: Mat,
    pub Y: Mat,
    /// Closed loop `A + B1·K1 + B2·K2 = Υ⁻¹·M1·(A + B2·K2)`.
    pub Abar: Mat,
    /// Backward steps taken to reach the tolerance (the confirmation step is
    /// not counted; its residual is `final_delta`).
    pub iterations: usize,
    /// Largest entrywise change the confirmation step produced.
    pub final_delta: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StationaryError {
    #[error("NotConverged: delta {delta:.3e} after {iterations} iterations")]
    NotConverged { iterations: usize, delta: f64 },
    #[error("Diverged: norm {norm:.3e} at iteration {iterations}")]
    Diverged { iterations: usize, norm: f64 },
    #[error("UpsilonSingular at iteration {iteration}: condition {condition:.3e}")]
    UpsilonSingular { iteration: usize, condition: f64 },
    #[error("Gamma2NotPD at iteration {iteration}: smallest eigenvalue {min_eigenvalue:.3e}")]
    Gamma2NotPD { iteration: usize, min_eigenvalue: f64 },
    #[error("Singular matrix {matrix} at iteration {iteration}")]
    Singular { iteration: usize, matrix: &'static str },
}

fn tag_step_error(e: StepError, iteration: usize) -> StationaryError {
    match e {
        StepError::UpsilonSingular { condition } => {
            StationaryError::UpsilonSingular { iteration, condition }
        }
        StepError::Gamma2NotPD { min_eigenvalue } => {
            StationaryError::Gamma2NotPD { iteration, min_eigenvalue }
        }
        StepError::Singular { matrix } => StationaryError::Singular { iteration, matrix },
    }
}

/// Value iteration for the stationary solution. `tol` bounds the largest
/// entrywise change between consecutive iterates; `max_iters` caps the sweep.
pub fn solve_stationary(
    game: &ValidatedGame,
    tolerance: f64,
    max_iters: usize,
) -> Result<StationarySolution, StationaryError> {
    let n = game.n();
    let mut P1 = Mat::zeros(n, n);
    let mut P2 = Mat::zeros(n, n);
    let mut T = Mat::zeros(n, n);

    let mut iterations = 0;
    let mut converged = false;
    for iter in 1..=max_iters {
        let out = backward_step(&P1, &P2, &T, game).map_err(|e| tag_step_error(e, iter))?;
        let delta = max_abs_diff(&out.P1, &P1)
            .max(max_abs_diff(&out.P2, &P2))
            .max(max_abs_diff(&out.T, &T));
        P1 = out.P1;
        P2 = out.P2;
        T = out.T;
        let norm = max_abs(&P1).max(max_abs(&P2)).max(max_abs(&T));
        if !norm.is_finite() || norm > tol::DIVERGENCE_GUARD {
            return Err(StationaryError::Diverged { iterations: iter, norm });
        }
        if delta < tolerance {
            iterations = iter;
            converged = true;
            break;
        }
        iterations = iter;
    }
    if !converged {
        let probe =
            backward_step(&P1, &P2, &T, game).map_err(|e| tag_step_error(e, max_iters + 1))?;
        let delta = max_abs_diff(&probe.P1, &P1)
            .max(max_abs_diff(&probe.P2, &P2))
            .max(max_abs_diff(&probe.T, &T));
        return Err(StationaryError::NotConverged { iterations: max_iters, delta });
    }

    // Confirmation step: re-evaluate at the converged values and report its
    // output, so every published matrix is consistent with a single step.
    let confirm =
        backward_step(&P1, &P2, &T, game).map_err(|e| tag_step_error(e, iterations + 1))?;
    let final_delta = max_abs_diff(&confirm.P1, &P1)
        .max(max_abs_diff(&confirm.P2, &P2))
        .max(max_abs_diff(&confirm.T, &T));

    let ups_inv =
        confirm.step.Upsilon.clone().try_inverse().ok_or(StationaryError::UpsilonSingular {
            iteration: iterations + 1,
            condition: f64::INFINITY,
        })?;
    let Abar = ups_inv * &confirm.step.M1 * (&game.A + &game.B2 * &confirm.K2);

    Ok(StationarySolution {
        P1: confirm.P1,
        P2: confirm.P2,
        T: confirm.T,
        K1: confirm.K1,
        K2: confirm.K2,
        Gamma1: confirm.step.Gamma1,
        Gamma2: confirm.step.Gamma2,
        M1: confirm.step.M1,
        M2: confirm.step.M2,
        S: confirm.step.S,
        Upsilon: confirm.step.Upsilon,
        Y: confirm.step.Y,
        Abar,
        iterations,
        final_delta,
    })
}

/// First gate that failed, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    NotConverged,
    Diverged,
    UpsilonSingular,
    P1NotPD,
    P2NotPD,
    UnstableClosedLoop,
    AssumptionViolated,
}

/// Outcome of the stabilization gates. Numeric fields are `NaN` when the
/// quantity was never computed (e.g. the iteration diverged before producing
/// a usable solution).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub stabilizable: bool,
    pub p1_min_eig: f64,
    pub p2_min_eig: f64,
    pub upsilon_condition: f64,
    pub spectral_radius_closed_loop: f64,
    pub assumption_report: AssumptionReport,
    pub failure_reason: Option<FailureReason>,
}

/// Run the stabilization gates in order: structural assumptions, convergence,
/// Υ conditioning, `P1 ≻ 0`, `P2 ≻ 0`, `ρ(Ā) < 1`. The first failed gate
/// names the `failure_reason`; `stabilizable` is true only when all pass.
pub fn stabilization_verdict(
    game: &ValidatedGame,
    result: &Result<StationarySolution, StationaryError>,
) -> Verdict {
    let report = assumption_report(game);

    let (p1_min, p2_min, ups_cond, rho) = match result {
        Ok(sol) => (
            min_symmetric_eigenvalue(&sol.P1),
            min_symmetric_eigenvalue(&sol.P2),
            condition_number(&sol.Upsilon),
            spectral_radius(&sol.Abar),
        ),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    };

    let failure_reason = if !report.all_hold() {
        Some(FailureReason::AssumptionViolated)
    } else {
        match result {
            Err(StationaryError::NotConverged { .. }) => Some(FailureReason::NotConverged),
            Err(StationaryError::Diverged { .. }) => Some(FailureReason::Diverged),
            Err(StationaryError::UpsilonSingular { .. }) => Some(FailureReason::UpsilonSingular),
            // Γ2 = R22 + (PSD terms in P2): with R22 ≻ 0 a Γ2 breakdown means
            // the leader's value matrix went indefinite.
            Err(StationaryError::Gamma2NotPD { .. }) => Some(FailureReason::P2NotPD),
            Err(StationaryError::Singular { .. }) => Some(FailureReason::UpsilonSingular),
            Ok(_) => {
                if !(ups_cond < tol::KAPPA_MAX) {
                    Some(FailureReason::UpsilonSingular)
                } else if p1_min <= tol::TAU_PD {
                    Some(FailureReason::P1NotPD)
                } else if p2_min <= tol::TAU_PD {
                    Some(FailureReason::P2NotPD)
                } else if !(rho < 1.0) {
                    Some(FailureReason::UnstableClosedLoop)
                } else {
                    None
                }
            }
        }
    };

    Verdict {
        stabilizable: failure_reason.is_none(),
        p1_min_eig: p1_min,
        p2_min_eig: p2_min,
        upsilon_condition: ups_cond,
        spectral_radius_closed_loop: rho,
        assumption_report: report,
        failure_reason,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    /// The closed loop is not a contraction, so the cost series cannot
    /// converge.
    #[error("SeriesDivergent: closed-loop spectral radius {spectral_radius:.6}")]
    SeriesDivergent { spectral_radius: f64 },
    /// The partial sums stopped shrinking before reaching the floor — should
    /// not happen for a contraction; kept as a guard.
    #[error("SeriesStalled after {terms} terms")]
    SeriesStalled { terms: usize },
}

/// Follower's cost under the stationary equilibrium policies,
/// `J1 = x0'·(P1 + T' + T + Ξ)·x0`, where Ξ is summed as a geometric-type
/// series in powers of the closed loop `Ā`. Requires `ρ(Ā) < 1`.
pub fn cost_follower_infinite(
    sol: &StationarySolution,
    game: &ValidatedGame,
    x0: &Col,
) -> Result<f64, SeriesError> {
    let rho = spectral_radius(&sol.Abar);
    if !(rho < 1.0) {
        return Err(SeriesError::SeriesDivergent { spectral_radius: rho });
    }

    let n = game.n();
    let Gamma1_inv = sol
        .Gamma1
        .clone()
        .try_inverse()
        .expect("Gamma1 is positive definite at a stationary solution");
    let M1B2 = &sol.M1 * &game.B2;
    // Constant weights of the series term at lag k:
    //   Φ_k'·C1·Φ_k + Φ_k'·C2·Φ_{k+1} + (Φ_k'·C2·Φ_{k+1})' − Φ_{k+1}'·C4·Φ_{k+1}
    let C1 = sol.K2.transpose() * (&game.R12 + game.B2.transpose() * &sol.P1 * &M1B2) * &sol.K2;
    let C2 = sol.K2.transpose() * M1B2.transpose() * &sol.T;
    let C4 = sol.T.transpose() * &game.B1 * &Gamma1_inv * game.B1.transpose() * &sol.T;

    let mut Xi = Mat::zeros(n, n);
    let mut Ak = Mat::identity(n, n); // Ā^k
    let max_terms = 1_000_000usize;
    for terms in 1..=max_terms {
        let Ak1 = &sol.Abar * &Ak; // Ā^{k+1}
        let cross = Ak.transpose() * &C2 * &Ak1;
        let term =
            Ak.transpose() * &C1 * &Ak + &cross + cross.transpose() - Ak1.transpose() * &C4 * &Ak1;
        Xi += &term;
        if max_abs(&term) < 1e-16 * (1.0 + max_abs(&Xi)) {
            let M = &sol.P1 + sol.T.transpose() + &sol.T + &Xi;
            return Ok(quad_form(&M, x0));
        }
        if terms == max_terms {
            return Err(SeriesError::SeriesStalled { terms });
        }
        Ak = Ak1;
    }
    unreachable!("loop always returns or errors at max_terms");
}

/// Leader's cost under the stationary equilibrium policies, `x0'·P2·x0`.
pub fn cost_leader_infinite(sol: &StationarySolution, x0: &Col) -> f64 {
    quad_form(&sol.P2, x0)
}
