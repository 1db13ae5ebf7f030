//! Ready-made game instances: the running scalar example, a rational 2-state
//! instance, and a seeded random-instance generator for the verification
//! suites.

use crate::game_model::GameSpec;
use crate::linalg::spectral_radius;
use crate::{Col, Mat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar(v: f64) -> Mat {
    Mat::from_element(1, 1, v)
}

/// The scalar running example used across the test suites:
/// `A=1, B1=2, B2=1, Q1=1, Q2=1, R11=0.6, R12=1, R21=1, R22=6.2, x0=7.3`,
/// zero terminal weights.
pub fn scalar_example() -> GameSpec {
    GameSpec {
        A: scalar(1.0),
        B1: scalar(2.0),
        B2: scalar(1.0),
        Q1: scalar(1.0),
        Q2: scalar(1.0),
        R11: scalar(0.6),
        R12: scalar(1.0),
        R21: scalar(1.0),
        R22: scalar(6.2),
        H1: scalar(0.0),
        H2: scalar(0.0),
        x0: Col::from_element(1, 7.3),
    }
}

/// A 2-state, 1+1-input instance with exactly representable (rational) data
/// and nonzero terminal weights. Its two-sweep backward recursion has been
/// evaluated independently in exact rational arithmetic; tests freeze those
/// values.
pub fn two_state_example() -> GameSpec {
    GameSpec {
        A: Mat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
        B1: Mat::from_row_slice(2, 1, &[1.0, 0.5]),
        B2: Mat::from_row_slice(2, 1, &[0.5, 1.0]),
        Q1: Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]),
        Q2: Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]),
        R11: scalar(0.6),
        R12: scalar(1.0),
        R21: scalar(1.0),
        R22: scalar(6.2),
        H1: Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]),
        H2: Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]),
        x0: Col::from_row_slice(&[1.0, -0.5]),
    }
}

fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.random_range(-scale..scale))
}

/// PSD matrix `L·Lᵀ + floor·I` from a random square factor.
fn random_psd(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Mat {
    let l = random_mat(rng, n, n, 1.0);
    &l * l.transpose() + Mat::identity(n, n) * floor
}

/// Seeded random instance for audits and property tests.
///
/// `A` is drawn with spectral radius in `[0.5, 1.5]` so both stable and
/// unstable plants are exercised; `Q2` gets a positive-definite floor (hence
/// `(A, Q2^{1/2})` observable); `R11, R21, R22` are positive definite with
/// floor 0.5. With `with_terminal` the terminal weights are random PSD instead
/// of zero (finite-horizon tests); stationary solves want them zero.
pub fn random_instance(seed: u64, n: usize, m1: usize, m2: usize, with_terminal: bool) -> GameSpec {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let mut A = random_mat(rng, n, n, 1.0);
    let rho = spectral_radius(&A);
    let target = rng.random_range(0.5..1.5);
    if rho > 1e-9 {
        A *= target / rho;
    } else {
        A += Mat::identity(n, n) * target;
    }
    let (H1, H2) = if with_terminal {
        (random_psd(rng, n, 0.0), random_psd(rng, n, 0.0))
    } else {
        (Mat::zeros(n, n), Mat::zeros(n, n))
    };
    GameSpec {
        A,
        B1: random_mat(rng, n, m1, 1.0)
            + Mat::from_fn(n, m1, |i, j| if i == j { 1.0 } else { 0.0 }),
        B2: random_mat(rng, n, m2, 1.0),
        Q1: random_psd(rng, n, 0.1),
        Q2: random_psd(rng, n, 0.5),
        R11: random_psd(rng, m1, 0.5),
        R12: random_psd(rng, m2, 0.0),
        R21: random_psd(rng, m1, 0.5),
        R22: random_psd(rng, m2, 0.5),
        H1,
        H2,
        x0: Col::from_fn(n, |_, _| rng.random_range(-2.0..2.0)),
    }
}
