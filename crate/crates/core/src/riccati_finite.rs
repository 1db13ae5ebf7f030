//! Finite-horizon solver: the coupled backward recursion, the feedback gain
//! sequences, and the closed-form optimal costs.
//!
//! One backward sweep carries three matrices — the follower's value matrix
//! `P1`, the leader's value matrix `P2`, and the coupling matrix `T` that
//! encodes how the follower's costate reacts to the leader's feedback. The
//! step evaluates, in dependency order:
//!
//! ```text
//! Γ1 = R11 + B1'·P1⁺·B1                                    (follower input Hessian)
//! M1 = I − B1·Γ1⁻¹·B1'·P1⁺
//! S  = Γ1⁻¹·B1'·P1⁺
//! Υ  = I + B1·Γ1⁻¹·B1'·T⁺                                  (must stay invertible)
//! Y  = S + Γ1⁻¹·B1'·T⁺·Υ⁻¹·M1
//! Γ2 = R22 + B2'Y'·R21·Y·B2 + B2'M1'·Υ⁻ᵀ·P2⁺·Υ⁻¹·M1·B2    (leader input Hessian)
//! M2 = B2'Y'·R21·Y·A + B2'M1'·Υ⁻ᵀ·P2⁺·Υ⁻¹·M1·A
//! K2 = −Γ2⁻¹·M2                  K1 = −Y·(A + B2·K2)
//! T  = A'M1'·[T⁺·Υ⁻¹·M1·(A + B2·K2) + P1⁺·B2·K2]
//! P1 = Q1 + A'P1⁺A − A'P1⁺B1·Γ1⁻¹·B1'P1⁺A
//! P2 = Q2 + A'Y'·R21·Y·A + A'M1'·Υ⁻ᵀ·P2⁺·Υ⁻¹·M1·A − M2'·Γ2⁻¹·M2
//! ```
//!
//! where `X⁺` denotes the value one step later. Terminal values are
//! `P1 = H1`, `P2 = H2`, `T = 0`. `P1` and `P2` are symmetrized after every
//! step to stop asymmetry drift.
//!
//! The optimal costs from initial state `x0` are
//! `J1* = x0'·(P1₀ + T0' + T0 + Ξ)·x0` and `J2* = x0'·P2₀·x0`, where Ξ is a
//! sum over the closed-loop transition products `Φ_{k,1}` (see
//! [`transition_products`]); its quadratic leader-gain term is weighted by
//! `R12` — the price the *follower* pays for the leader's input.

use crate::game_model::ValidatedGame;
use crate::linalg::{
    condition_number, is_finite_mat, min_symmetric_eigenvalue, quad_form, symmetrize,
};
use crate::{tol, Col, Mat};

/// Auxiliary matrices of one backward step, kept for diagnostics, cost
/// formulas, and the verification oracles. Index convention: `steps[k]` in a
/// [`FiniteSolution`] holds the step-`k+1` matrices that produce the gains
/// applied at time `k`.
#[derive(Debug, Clone)]
pub struct StepMatrices {
    pub Gamma1: Mat,
    pub Gamma2: Mat,
    pub M1: Mat,
    pub M2: Mat,
    pub S: Mat,
    pub Upsilon: Mat,
    pub Y: Mat,
}

/// Everything one backward step produces.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub P1: Mat,
    pub P2: Mat,
    pub T: Mat,
    pub K1: Mat,
    pub K2: Mat,
    pub step: StepMatrices,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    /// Υ conditions worse than the `KAPPA_MAX` ceiling: the feedthrough
    /// coupling is numerically singular and the equilibrium is not computable
    /// from this data.
    #[error("UpsilonSingular: condition number {condition:.3e} exceeds the ceiling")]
    UpsilonSingular { condition: f64 },
    /// The leader's input Hessian lost positive definiteness — numerical
    /// breakdown, typically after a divergent `P2`.
    #[error("Gamma2NotPD: smallest eigenvalue {min_eigenvalue:.3e}")]
    Gamma2NotPD { min_eigenvalue: f64 },
    /// A matrix that is provably invertible on valid data failed to invert.
    #[error("Singular: {matrix} failed to invert")]
    Singular { matrix: &'static str },
}

/// Errors from [`solve_finite`]: a step failure tagged with the time index at
/// which the backward sweep broke.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiniteError {
    #[error("backward step failed at k = {k}: {source}")]
    Step { k: usize, source: StepError },
    #[error("non-finite values appeared at k = {k} (divergent recursion)")]
    NonFinite { k: usize },
}

/// Complete finite-horizon solution over `k = 0..=N`.
///
/// Array layout: `P1`, `P2`, `T`, `Phi` have `N+2` entries (index `k` runs to
/// `N+1`); `K1`, `K2`, `steps` have `N+1` entries (gains applied at times
/// `0..=N`). `Phi[k]` is the closed-loop transition product mapping `x0` to
/// `x_k`; `Xi` is the cost-coupling sum entering the follower's optimal cost.
#[derive(Debug, Clone)]
pub struct FiniteSolution {
    pub horizon: usize,
    pub P1: Vec<Mat>,
    pub P2: Vec<Mat>,
    pub T: Vec<Mat>,
    pub K1: Vec<Mat>,
    pub K2: Vec<Mat>,
    pub steps: Vec<StepMatrices>,
    pub Phi: Vec<Mat>,
    pub Xi: Mat,
}

/// One backward step of the coupled recursion. `P1_next`, `P2_next`, `T_next`
/// are the step-`k+1` values; returns the step-`k` values plus the gains and
/// auxiliaries. Evaluation order follows the dependency chain documented in
/// the module header.
pub fn backward_step(
    P1_next: &Mat,
    P2_next: &Mat,
    T_next: &Mat,
    game: &ValidatedGame,
) -> Result<StepOutput, StepError> {
    let n = game.n();
    let A = &game.A;
    let B1 = &game.B1;
    let B2 = &game.B2;

    let Gamma1 = &game.R11 + B1.transpose() * P1_next * B1;
    let Gamma1_inv =
        Gamma1.clone().try_inverse().ok_or(StepError::Singular { matrix: "Gamma1" })?;

    let M1 = Mat::identity(n, n) - B1 * &Gamma1_inv * B1.transpose() * P1_next;
    let S = &Gamma1_inv * B1.transpose() * P1_next;

    let Upsilon = Mat::identity(n, n) + B1 * &Gamma1_inv * B1.transpose() * T_next;
    let condition = condition_number(&Upsilon);
    if !(condition < tol::KAPPA_MAX) {
        return Err(StepError::UpsilonSingular { condition });
    }
    let Upsilon_inv = Upsilon
        .clone()
        .try_inverse()
        .ok_or(StepError::UpsilonSingular { condition: f64::INFINITY })?;

    let UiM = &Upsilon_inv * &M1; // Υ⁻¹·M1, the closed-loop left factor
    let Y = &S + &Gamma1_inv * B1.transpose() * T_next * &UiM;

    let YA = &Y * A;
    let YB2 = &Y * B2;
    let UiMA = &UiM * A;
    let UiMB2 = &UiM * B2;

    let Gamma2 = symmetrize(
        &(&game.R22 + YB2.transpose() * &game.R21 * &YB2 + UiMB2.transpose() * P2_next * &UiMB2),
    );
    let g2_min = min_symmetric_eigenvalue(&Gamma2);
    if g2_min <= tol::TAU_PD {
        return Err(StepError::Gamma2NotPD { min_eigenvalue: g2_min });
    }
    let Gamma2_inv =
        Gamma2.clone().try_inverse().ok_or(StepError::Singular { matrix: "Gamma2" })?;

    let M2 = YB2.transpose() * &game.R21 * &YA + UiMB2.transpose() * P2_next * &UiMA;

    let K2 = -(&Gamma2_inv * &M2);
    let Acl = A + B2 * &K2; // A + B2·K2, the plant as the follower sees it
    let K1 = -(&Y * &Acl);

    let T = A.transpose() * M1.transpose() * (T_next * &UiM * &Acl + P1_next * B2 * &K2);

    let P1 = symmetrize(
        &(&game.Q1 + A.transpose() * P1_next * A
            - A.transpose() * P1_next * B1 * &Gamma1_inv * B1.transpose() * P1_next * A),
    );
    let P2 = symmetrize(
        &(&game.Q2 + YA.transpose() * &game.R21 * &YA + UiMA.transpose() * P2_next * &UiMA
            - M2.transpose() * &Gamma2_inv * &M2),
    );

    Ok(StepOutput {
        P1,
        P2,
        T,
        K1,
        K2,
        step: StepMatrices { Gamma1, Gamma2, M1, M2, S, Upsilon, Y },
    })
}

/// Solve the full horizon: sweep `backward_step` from `k = N` down to `0`
/// starting at `(H1, H2, 0)`, then assemble the transition products and the
/// cost-coupling sum Ξ.
pub fn solve_finite(game: &ValidatedGame, N: usize) -> Result<FiniteSolution, FiniteError> {
    let n = game.n();
    // Built in sweep order (k = N+1 down to 0), reversed at the end.
    let mut P1_rev = vec![game.H1.clone()];
    let mut P2_rev = vec![game.H2.clone()];
    let mut T_rev = vec![Mat::zeros(n, n)];
    let mut K1_rev: Vec<Mat> = Vec::with_capacity(N + 1);
    let mut K2_rev: Vec<Mat> = Vec::with_capacity(N + 1);
    let mut steps_rev: Vec<StepMatrices> = Vec::with_capacity(N + 1);

    for k in (0..=N).rev() {
        let out = backward_step(
            P1_rev.last().unwrap(),
            P2_rev.last().unwrap(),
            T_rev.last().unwrap(),
            game,
        )
        .map_err(|source| FiniteError::Step { k, source })?;
        if !(is_finite_mat(&out.P1) && is_finite_mat(&out.P2) && is_finite_mat(&out.T)) {
            return Err(FiniteError::NonFinite { k });
        }
        P1_rev.push(out.P1);
        P2_rev.push(out.P2);
        T_rev.push(out.T);
        K1_rev.push(out.K1);
        K2_rev.push(out.K2);
        steps_rev.push(out.step);
    }

    P1_rev.reverse();
    P2_rev.reverse();
    T_rev.reverse();
    K1_rev.reverse();
    K2_rev.reverse();
    steps_rev.reverse();

    let Phi = compute_phi(&steps_rev, &K2_rev, game);
    let Xi = compute_xi(&P1_rev, &T_rev, &K2_rev, &steps_rev, &Phi, game);

    Ok(FiniteSolution {
        horizon: N,
        P1: P1_rev,
        P2: P2_rev,
        T: T_rev,
        K1: K1_rev,
        K2: K2_rev,
        steps: steps_rev,
        Phi,
        Xi,
    })
}

fn compute_phi(steps: &[StepMatrices], K2: &[Mat], game: &ValidatedGame) -> Vec<Mat> {
    let n = game.n();
    let mut phi = Vec::with_capacity(steps.len() + 1);
    phi.push(Mat::identity(n, n)); // empty product: x_0 = Φ_{0}·x0
    for (k, step) in steps.iter().enumerate() {
        let ups_inv =
            step.Upsilon.clone().try_inverse().expect("Upsilon was invertible during the solve");
        let a_step = ups_inv * &step.M1 * (&game.A + &game.B2 * &K2[k]);
        phi.push(&a_step * phi.last().unwrap());
    }
    phi
}

/// Closed-loop transition products `Φ_k` with `Φ_0 = I` and
/// `Φ_{k+1} = Υ⁻¹·M1·(A + B2·K2_k)·Φ_k`, so that `x_k = Φ_k·x0` along the
/// optimal trajectory. Recomputes from the stored step matrices; equals the
/// `Phi` field of the solution.
pub fn transition_products(solution: &FiniteSolution, game: &ValidatedGame) -> Vec<Mat> {
    compute_phi(&solution.steps, &solution.K2, game)
}

fn compute_xi(
    P1: &[Mat],
    T: &[Mat],
    K2: &[Mat],
    steps: &[StepMatrices],
    Phi: &[Mat],
    game: &ValidatedGame,
) -> Mat {
    let n = game.n();
    let B1 = &game.B1;
    let B2 = &game.B2;
    let mut Xi = Mat::zeros(n, n);
    for k in 0..steps.len() {
        let T_next = &T[k + 1];
        let M1 = &steps[k].M1;
        let Gamma1_inv =
            steps[k].Gamma1.clone().try_inverse().expect("Gamma1 was invertible during the solve");
        let K2P = &K2[k] * &Phi[k]; // K2_k·Φ_k
        let TP = T_next * &Phi[k + 1]; // T_{k+1}·Φ_{k+1}
        let M1B2 = M1 * B2;
        // cross term: Φ'_{k+1} T' M1 B2 K2 Φ_k  (and its transpose)
        let cross = TP.transpose() * &M1B2 * &K2P;
        // quadratic leader-gain term, weighted by R12 — the follower's price
        // for the leader's input — plus the feedthrough curvature.
        let W = &game.R12 + B2.transpose() * &P1[k + 1] * &M1B2;
        let quad_k2 = K2P.transpose() * W * &K2P;
        let B1T = B1.transpose() * TP; // B1'·T_{k+1}·Φ_{k+1}
        let quad_t = B1T.transpose() * &Gamma1_inv * &B1T;
        Xi += &cross + cross.transpose() + quad_k2 - quad_t;
    }
    Xi
}

/// Follower's optimal cost `x0'·(P1₀ + T0' + T0 + Ξ)·x0`.
pub fn cost_follower_finite(solution: &FiniteSolution, _game: &ValidatedGame, x0: &Col) -> f64 {
    let M = &solution.P1[0] + solution.T[0].transpose() + &solution.T[0] + &solution.Xi;
    quad_form(&M, x0)
}

/// Leader's optimal cost `x0'·P2₀·x0`.
pub fn cost_leader_finite(solution: &FiniteSolution, x0: &Col) -> f64 {
    quad_form(&solution.P2[0], x0)
}
