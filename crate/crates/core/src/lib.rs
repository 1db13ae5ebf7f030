//! Solver toolkit for two-player leader–follower linear-quadratic games on
//! discrete-time plants.
//!
//! The plant `x_{k+1} = A x_k + B1 u1_k + B2 u2_k` is driven by two
//! self-interested decision makers. The *leader* (`u2`) commits to a linear
//! state-feedback law first; the *follower* (`u1`) then minimizes its own
//! quadratic cost treating the leader's input sequence as given data. Both
//! costs are quadratic in the state and in both inputs, so the equilibrium
//! reduces to a pair of coupled backward Riccati-type recursions producing
//! feedback gains `u1_k = K1_k x_k`, `u2_k = K2_k x_k`.
//!
//! What lives where:
//!
//! * [`game_model`] — problem data, validation, controllability/observability
//!   rank tests.
//! * [`riccati_finite`] — the finite-horizon backward recursion, gain
//!   sequences, and closed-form optimal costs.
//! * [`riccati_infinite`] — stationary fixed point by value iteration plus a
//!   stabilization verdict with itemized evidence.
//! * [`simulator`] — closed-loop rollout, cost accumulation, costate
//!   reconstruction, and per-step Lyapunov diagnostics.
//! * [`oracle`] — independent brute-force checks: the follower's problem as an
//!   explicit stacked quadratic program, and perturbation audits of the
//!   leader's optimality.
//! * [`io`] / [`cli`] — JSON problem/solution files, CSV trajectory output,
//!   and the `stacklq` command-line front end.

// Matrix variables follow control-theory notation (A, B1, Gamma1, ...).
#![allow(non_snake_case)]
// Guards are written `!(value < bound)` so that a NaN counts as a failure;
// the un-negated `value >= bound` would let NaN slip through silently.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Stage loops read several parallel per-stage sequences at once; indexing all
// of them by `k` is clearer than zipping iterators.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod game_model;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod riccati_finite;
pub mod riccati_infinite;
pub mod simulator;
pub mod tol;

/// Dense dynamically-sized matrix used for every matrix quantity in the crate.
pub type Mat = nalgebra::DMatrix<f64>;
/// Column vector (states, inputs, costates).
pub type Col = nalgebra::DVector<f64>;
