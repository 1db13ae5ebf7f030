//! Problem data for the two-player LQ game, with validation and the two
//! structural rank tests the infinite-horizon theory rests on.
//!
//! A game instance consists of the plant `x_{k+1} = A x_k + B1 u1_k + B2 u2_k`
//! and the two stage costs
//!
//! ```text
//! follower:  x'Q1 x + u1'R11 u1 + u2'R12 u2     (+ terminal x'H1 x)
//! leader:    x'Q2 x + u1'R21 u1 + u2'R22 u2     (+ terminal x'H2 x)
//! ```
//!
//! Validation enforces shape consistency, finiteness, symmetry (with
//! symmetrization on ingest), and the definiteness classes: `Q1, Q2, R12, H1,
//! H2` positive semidefinite, `R11, R21, R22` positive definite. Definiteness
//! is decided by eigenvalue computation rather than attempted factorization so
//! a violation can name the offending eigenvalue.
//!
//! The two structural hypotheses for infinite-horizon stabilization are rank
//! tests: `(A, B1)` controllable and `(A, Q2^{1/2})` observable, both decided
//! by SVD with a threshold relative to the largest singular value.

use crate::linalg::{max_abs, min_symmetric_eigenvalue, rank_via_svd, symmetrize};
use crate::{tol, Col, Mat};
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Raw problem data. Construct freely, then call [`validate_spec`] to obtain a
/// [`ValidatedGame`] accepted by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub A: Mat,
    pub B1: Mat,
    pub B2: Mat,
    pub Q1: Mat,
    pub Q2: Mat,
    pub R11: Mat,
    pub R12: Mat,
    pub R21: Mat,
    pub R22: Mat,
    pub H1: Mat,
    pub H2: Mat,
    pub x0: Col,
}

impl GameSpec {
    /// State dimension.
    pub fn n(&self) -> usize {
        self.A.nrows()
    }
    /// Follower input dimension.
    pub fn m1(&self) -> usize {
        self.B1.ncols()
    }
    /// Leader input dimension.
    pub fn m2(&self) -> usize {
        self.B2.ncols()
    }
}

/// A [`GameSpec`] that passed [`validate_spec`]; symmetric-class matrices have
/// been symmetrized. Dereferences to the underlying spec, so solver code reads
/// `game.A`, `game.R11`, etc.
#[derive(Debug, Clone)]
pub struct ValidatedGame {
    spec: GameSpec,
    /// Non-fatal findings (e.g. asymmetry above warning threshold, fixed on
    /// ingest).
    pub warnings: Vec<String>,
}

impl Deref for ValidatedGame {
    type Target = GameSpec;
    fn deref(&self) -> &GameSpec {
        &self.spec
    }
}

impl ValidatedGame {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }
}

/// A single validation failure. `validate_spec` reports every violation found,
/// not just the first.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error(
        "DimensionMismatch: {matrix} is {got_rows}x{got_cols}, expected {want_rows}x{want_cols}"
    )]
    DimensionMismatch {
        matrix: &'static str,
        want_rows: usize,
        want_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error(
        "DefinitenessViolation: {matrix} must be {required}, smallest eigenvalue {eigenvalue:e}"
    )]
    DefinitenessViolation { matrix: &'static str, eigenvalue: f64, required: &'static str },
    #[error("NonFinite: {matrix} contains NaN or infinite entries")]
    NonFinite { matrix: &'static str },
}

/// Rank-test outcome for one assumption, plus the singular values the decision
/// used.
#[derive(Debug, Clone)]
pub struct RankTest {
    pub rank: usize,
    pub passed: bool,
    pub singular_values: Vec<f64>,
}

/// Evidence for the two structural hypotheses: `(A, B1)` controllable and
/// `(A, Q2^{1/2})` observable. `singular_values_used` lists the
/// controllability-matrix singular values followed by the observability-matrix
/// ones; the two ranks tell the split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub controllable: bool,
    pub controllability_rank: usize,
    pub observable: bool,
    pub observability_rank: usize,
    pub singular_values_used: Vec<f64>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.controllable && self.observable
    }
}

fn check_finite(name: &'static str, m: &Mat, out: &mut Vec<Violation>) {
    if !crate::linalg::is_finite_mat(m) {
        out.push(Violation::NonFinite { matrix: name });
    }
}

fn check_shape(name: &'static str, m: &Mat, rows: usize, cols: usize, out: &mut Vec<Violation>) {
    if m.nrows() != rows || m.ncols() != cols {
        out.push(Violation::DimensionMismatch {
            matrix: name,
            want_rows: rows,
            want_cols: cols,
            got_rows: m.nrows(),
            got_cols: m.ncols(),
        });
    }
}

/// Validate raw problem data. On success the returned wrapper carries
/// symmetrized copies of the symmetric-class matrices; on failure the complete
/// list of violations is returned.
pub fn validate_spec(raw: GameSpec) -> Result<ValidatedGame, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let n = raw.A.nrows();
    let m1 = raw.B1.ncols();
    let m2 = raw.B2.ncols();

    for (name, m) in [
        ("A", &raw.A),
        ("B1", &raw.B1),
        ("B2", &raw.B2),
        ("Q1", &raw.Q1),
        ("Q2", &raw.Q2),
        ("R11", &raw.R11),
        ("R12", &raw.R12),
        ("R21", &raw.R21),
        ("R22", &raw.R22),
        ("H1", &raw.H1),
        ("H2", &raw.H2),
    ] {
        check_finite(name, m, &mut violations);
    }
    if !raw.x0.iter().all(|x| x.is_finite()) {
        violations.push(Violation::NonFinite { matrix: "x0" });
    }

    check_shape("A", &raw.A, n, n, &mut violations);
    check_shape("B1", &raw.B1, n, m1, &mut violations);
    check_shape("B2", &raw.B2, n, m2, &mut violations);
    for (name, m) in [("Q1", &raw.Q1), ("Q2", &raw.Q2), ("H1", &raw.H1), ("H2", &raw.H2)] {
        check_shape(name, m, n, n, &mut violations);
    }
    for (name, m) in [("R11", &raw.R11), ("R21", &raw.R21)] {
        check_shape(name, m, m1, m1, &mut violations);
    }
    for (name, m) in [("R12", &raw.R12), ("R22", &raw.R22)] {
        check_shape(name, m, m2, m2, &mut violations);
    }
    if raw.x0.len() != n {
        violations.push(Violation::DimensionMismatch {
            matrix: "x0",
            want_rows: n,
            want_cols: 1,
            got_rows: raw.x0.len(),
            got_cols: 1,
        });
    }

    // Shape or finiteness problems make definiteness checks meaningless.
    if !violations.is_empty() {
        return Err(violations);
    }

    // Symmetrize the symmetric-class matrices, warning on real asymmetry.
    let mut spec = raw;
    for (name, m) in [
        ("Q1", &mut spec.Q1),
        ("Q2", &mut spec.Q2),
        ("R11", &mut spec.R11),
        ("R12", &mut spec.R12),
        ("R21", &mut spec.R21),
        ("R22", &mut spec.R22),
        ("H1", &mut spec.H1),
        ("H2", &mut spec.H2),
    ] {
        let asym = max_abs(&(&*m - m.transpose()));
        if asym > 1e-8 {
            warnings.push(format!("{name} asymmetric by {asym:.3e}; symmetrized as (M + M')/2"));
        }
        *m = symmetrize(m);
    }

    for (name, m) in
        [("Q1", &spec.Q1), ("Q2", &spec.Q2), ("R12", &spec.R12), ("H1", &spec.H1), ("H2", &spec.H2)]
    {
        let min_eig = min_symmetric_eigenvalue(m);
        let slack = tol::TAU_PSD_REL * (1.0 + max_abs(m));
        if min_eig < -slack {
            violations.push(Violation::DefinitenessViolation {
                matrix: name,
                eigenvalue: min_eig,
                required: "positive semidefinite",
            });
        }
    }
    for (name, m) in [("R11", &spec.R11), ("R21", &spec.R21), ("R22", &spec.R22)] {
        let min_eig = min_symmetric_eigenvalue(m);
        if min_eig <= tol::TAU_PD {
            violations.push(Violation::DefinitenessViolation {
                matrix: name,
                eigenvalue: min_eig,
                required: "positive definite",
            });
        }
    }

    if violations.is_empty() {
        Ok(ValidatedGame { spec, warnings })
    } else {
        Err(violations)
    }
}

/// Error from [`symmetric_sqrt`] on input that is not positive semidefinite.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("NotPSD: eigenvalue {eigenvalue:e} below the semidefiniteness tolerance")]
pub struct NotPSD {
    pub eigenvalue: f64,
}

/// Symmetric square root of a PSD matrix via eigendecomposition: `S·S = M`.
/// Eigenvalues in `[-tau_psd, 0)` (floating-point dust) are clamped to zero;
/// anything more negative is a hard error.
pub fn symmetric_sqrt(M: &Mat) -> Result<Mat, NotPSD> {
    let slack = tol::TAU_PSD_REL * (1.0 + max_abs(M));
    let eig = symmetrize(M).symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -slack {
            return Err(NotPSD { eigenvalue: *v });
        }
        *v = v.max(0.0).sqrt();
    }
    let sqrt = &eig.eigenvectors * Mat::from_diagonal(&vals) * eig.eigenvectors.transpose();
    Ok(symmetrize(&sqrt))
}

/// Rank of the reachability matrix `[B1, A·B1, …, A^{n-1}·B1]`; the pair is
/// controllable iff the rank equals the state dimension.
pub fn controllability_check(A: &Mat, B1: &Mat) -> RankTest {
    let n = A.nrows();
    let m1 = B1.ncols();
    let mut krylov = Mat::zeros(n, n * m1);
    let mut block = B1.clone();
    for i in 0..n {
        krylov.view_mut((0, i * m1), (n, m1)).copy_from(&block);
        block = A * &block;
    }
    let (rank, singular_values) = rank_via_svd(&krylov, n);
    RankTest { rank, passed: rank == n, singular_values }
}

/// Rank of the stacked matrix `[C; C·A; …; C·A^{n-1}]` with `C = Q2^{1/2}`;
/// the pair is observable iff the rank equals the state dimension.
pub fn observability_check(A: &Mat, Q2: &Mat) -> Result<RankTest, NotPSD> {
    let n = A.nrows();
    let C = symmetric_sqrt(Q2)?;
    let mut stacked = Mat::zeros(n * C.nrows(), n);
    let mut block = C.clone();
    for i in 0..n {
        stacked.view_mut((i * C.nrows(), 0), (C.nrows(), n)).copy_from(&block);
        block = &block * A;
    }
    let (rank, singular_values) = rank_via_svd(&stacked, n);
    Ok(RankTest { rank, passed: rank == n, singular_values })
}

/// Run both rank tests and assemble the evidence report. `Q2` was already
/// checked PSD by validation, so the square root cannot fail here; a failure
/// would indicate memory corruption and panics.
pub fn assumption_report(game: &ValidatedGame) -> AssumptionReport {
    let ctrl = controllability_check(&game.A, &game.B1);
    let obs = observability_check(&game.A, &game.Q2).expect("validated Q2 must be PSD");
    let mut singular_values_used = ctrl.singular_values.clone();
    singular_values_used.extend_from_slice(&obs.singular_values);
    AssumptionReport {
        controllable: ctrl.passed,
        controllability_rank: ctrl.rank,
        observable: obs.passed,
        observability_rank: obs.rank,
        singular_values_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::instances::scalar_example;

    fn scalar(v: f64) -> Mat {
        Mat::from_element(1, 1, v)
    }

    #[test]
    fn scalar_example_is_valid() {
        let game = validate_spec(scalar_example()).expect("valid");
        assert_eq!(game.n(), 1);
        assert_eq!(game.m1(), 1);
        assert_eq!(game.m2(), 1);
        assert!(game.warnings.is_empty());
    }

    #[test]
    fn r11_zero_is_a_definiteness_violation() {
        let mut raw = scalar_example();
        raw.R11 = scalar(0.0);
        let violations = validate_spec(raw).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DefinitenessViolation { matrix: "R11", .. })));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut raw = scalar_example();
        raw.A = Mat::identity(2, 2); // B1 stays 1x1
        let violations = validate_spec(raw).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DimensionMismatch { matrix: "B1", .. })));
    }

    #[test]
    fn nan_entries_are_rejected() {
        let mut raw = scalar_example();
        raw.Q2 = scalar(f64::NAN);
        let violations = validate_spec(raw).unwrap_err();
        assert_eq!(violations, vec![Violation::NonFinite { matrix: "Q2" }]);
    }

    #[test]
    fn all_violations_are_collected_not_just_the_first() {
        let mut raw = scalar_example();
        raw.R11 = scalar(0.0);
        raw.Q1 = scalar(-1.0);
        raw.R22 = scalar(-2.0);
        let violations = validate_spec(raw).unwrap_err();
        assert_eq!(violations.len(), 3);
    }

    #[test]
    fn validation_is_idempotent() {
        let game = validate_spec(scalar_example()).unwrap();
        let again = validate_spec(game.spec().clone()).unwrap();
        assert!(again.warnings.is_empty());
    }

    #[test]
    fn asymmetry_warns_and_symmetrizes() {
        let mut raw = scalar_example();
        raw.A = Mat::identity(2, 2);
        raw.B1 = Mat::from_row_slice(2, 1, &[2.0, 0.0]);
        raw.B2 = Mat::from_row_slice(2, 1, &[1.0, 1.0]);
        raw.Q1 = Mat::from_row_slice(2, 2, &[1.0, 0.2, 0.0, 1.0]);
        raw.Q2 = Mat::identity(2, 2);
        raw.H1 = Mat::zeros(2, 2);
        raw.H2 = Mat::zeros(2, 2);
        raw.x0 = Col::from_row_slice(&[1.0, 1.0]);
        let game = validate_spec(raw).unwrap();
        assert_eq!(game.warnings.len(), 1);
        assert!(game.warnings[0].contains("Q1"));
        assert_eq!(game.Q1[(0, 1)], 0.1);
        assert_eq!(game.Q1[(1, 0)], 0.1);
    }

    #[test]
    fn sqrt_of_identity_is_identity() {
        let s = symmetric_sqrt(&Mat::identity(3, 3)).unwrap();
        assert!(crate::linalg::max_abs_diff(&s, &Mat::identity(3, 3)) < 1e-14);
    }

    #[test]
    fn sqrt_of_scalar_four_is_two() {
        let s = symmetric_sqrt(&scalar(4.0)).unwrap();
        assert!((s[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_roundtrip_on_random_psd() {
        // L·Lᵀ with a fixed L is PSD by construction.
        let L = Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.4, 2.0, 0.0, -0.3, 0.7, 0.5]);
        let M = &L * L.transpose();
        let s = symmetric_sqrt(&M).unwrap();
        assert!(crate::linalg::max_abs_diff(&(&s * &s), &M) < crate::tol::TAU_SQRT);
        assert!(crate::linalg::max_abs(&(&s - s.transpose())) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite_input() {
        let M = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        let err = symmetric_sqrt(&M).unwrap_err();
        assert!(err.eigenvalue < -0.4);
    }

    #[test]
    fn scalar_pair_is_controllable() {
        let t = controllability_check(&scalar(1.0), &scalar(2.0));
        assert_eq!(t.rank, 1);
        assert!(t.passed);
    }

    #[test]
    fn repeated_eigenvalue_with_single_input_is_uncontrollable() {
        let t =
            controllability_check(&Mat::identity(2, 2), &Mat::from_row_slice(2, 1, &[1.0, 0.0]));
        assert_eq!(t.rank, 1);
        assert!(!t.passed);
    }

    #[test]
    fn companion_form_is_controllable() {
        // Companion matrix with single input at the last row: textbook reachable pair.
        let A = Mat::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                -0.1, 0.2, -0.3, 0.4,
            ],
        );
        let B = Mat::from_row_slice(4, 1, &[0.0, 0.0, 0.0, 1.0]);
        let t = controllability_check(&A, &B);
        assert_eq!(t.rank, 4);
        assert!(t.passed);
    }

    #[test]
    fn scalar_pair_is_observable() {
        let t = observability_check(&scalar(1.0), &scalar(1.0)).unwrap();
        assert_eq!(t.rank, 1);
        assert!(t.passed);
    }

    #[test]
    fn zero_weight_is_unobservable() {
        let t = observability_check(&Mat::identity(2, 2), &Mat::zeros(2, 2)).unwrap();
        assert_eq!(t.rank, 0);
        assert!(!t.passed);
    }

    #[test]
    fn observer_canonical_form_is_observable() {
        let A = Mat::from_row_slice(
            3,
            3,
            &[
                0.0, 0.0, -0.2, //
                1.0, 0.0, 0.5, //
                0.0, 1.0, 0.1,
            ],
        );
        // Q2 = cᵀc with c = [0, 0, 1] observes the canonical chain.
        let c = Mat::from_row_slice(1, 3, &[0.0, 0.0, 1.0]);
        let Q2 = c.transpose() * &c;
        let t = observability_check(&A, &Q2).unwrap();
        assert_eq!(t.rank, 3);
        assert!(t.passed);
    }

    #[test]
    fn report_concatenates_singular_values() {
        let game = validate_spec(scalar_example()).unwrap();
        let report = assumption_report(&game);
        assert!(report.controllable && report.observable);
        assert_eq!(report.singular_values_used.len(), 2);
    }
}
