//! Numerical tolerances and guards, centralized so every module gates on the
//! same values.
//!
//! The underlying theory is exact; these constants only absorb floating-point
//! noise. Each one is documented with the test it controls so a failure can be
//! traced back to a single knob.

/// Relative slack for positive-*semi*definiteness: `M` passes when its
/// smallest eigenvalue is `>= -TAU_PSD_REL * (1 + max_abs(M))`. Scales with the
/// matrix so badly-scaled-but-valid weight matrices are not rejected.
pub const TAU_PSD_REL: f64 = 1e-8;

/// Strict positive-definiteness floor: smallest eigenvalue must exceed this.
pub const TAU_PD: f64 = 1e-10;

/// Residual bound for the symmetric square root: `max_abs(S*S - M) < TAU_SQRT`
/// on well-scaled input.
pub const TAU_SQRT: f64 = 1e-10;

/// Condition-number ceiling for the feedthrough coupling matrix Υ. A backward
/// step whose Υ conditions worse than this reports `UpsilonSingular` instead
/// of returning garbage gains.
pub const KAPPA_MAX: f64 = 1e12;

/// Divergence guard shared by the stationary solver and the simulator: any
/// iterate or state whose max-abs entry exceeds this is treated as divergence
/// (non-stabilizable data) rather than allowed to overflow downstream math.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Default fixed-point tolerance for stationary value iteration (max-abs
/// change across P1, P2, T between sweeps).
pub const STATIONARY_TOL: f64 = 1e-11;

/// Default iteration cap for stationary value iteration.
pub const STATIONARY_MAX_ITERS: usize = 100_000;

/// Rank threshold factor: singular values above `n * EPS * sigma_max` count
/// toward the rank of a controllability/observability matrix.
pub const EPS_MACHINE: f64 = f64::EPSILON;
