//! File formats: JSON problem and solution files, content digests, and the
//! plot-ready CSV trajectory dump.
//!
//! Problem and solution files are plain JSON with named matrix blocks as
//! nested row arrays (row-major), chosen over a binary format so corpora can
//! be diffed and reviewed. A solution file records the SHA-256 digest of the
//! problem file it was solved from; consumers refuse to mix mismatched pairs
//! unless explicitly overridden. The `generated_at_unix` timestamp is the
//! only field allowed to differ between two runs on identical input.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::game_model::GameSpec;
use crate::riccati_finite::FiniteSolution;
use crate::riccati_infinite::{StationarySolution, Verdict};
use crate::simulator::{Gains, Trajectory};
use crate::{Col, Mat};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("failed to read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("failed to write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("matrix {name} is malformed: {reason}")]
    BadMatrix { name: &'static str, reason: String },
}

/// On-disk problem description. `H1`, `H2` default to zero; `x0` is needed
/// only by commands that roll out or price a trajectory; `horizon` selects
/// the finite-horizon solver when present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub A: Vec<Vec<f64>>,
    pub B1: Vec<Vec<f64>>,
    pub B2: Vec<Vec<f64>>,
    pub Q1: Vec<Vec<f64>>,
    pub Q2: Vec<Vec<f64>>,
    pub R11: Vec<Vec<f64>>,
    pub R12: Vec<Vec<f64>>,
    pub R21: Vec<Vec<f64>>,
    pub R22: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub H1: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub H2: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

pub(crate) fn mat_from_rows(name: &'static str, rows: &[Vec<f64>]) -> Result<Mat, IoError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(IoError::BadMatrix { name, reason: "empty matrix".into() });
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(IoError::BadMatrix { name, reason: "ragged rows".into() });
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Mat::from_row_slice(rows.len(), cols, &flat))
}

pub fn mat_to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl ProblemFile {
    /// Convert to the in-memory spec. Absent terminal weights become zero;
    /// an absent `x0` becomes the origin (callers that need a real initial
    /// state must check [`ProblemFile::x0`] themselves).
    pub fn to_game_spec(&self) -> Result<GameSpec, IoError> {
        let A = mat_from_rows("A", &self.A)?;
        let n = A.nrows();
        let h1 = match &self.H1 {
            Some(rows) => mat_from_rows("H1", rows)?,
            None => Mat::zeros(n, n),
        };
        let h2 = match &self.H2 {
            Some(rows) => mat_from_rows("H2", rows)?,
            None => Mat::zeros(n, n),
        };
        let x0 = match &self.x0 {
            Some(v) => Col::from_column_slice(v),
            None => Col::zeros(n),
        };
        Ok(GameSpec {
            A,
            B1: mat_from_rows("B1", &self.B1)?,
            B2: mat_from_rows("B2", &self.B2)?,
            Q1: mat_from_rows("Q1", &self.Q1)?,
            Q2: mat_from_rows("Q2", &self.Q2)?,
            R11: mat_from_rows("R11", &self.R11)?,
            R12: mat_from_rows("R12", &self.R12)?,
            R21: mat_from_rows("R21", &self.R21)?,
            R22: mat_from_rows("R22", &self.R22)?,
            H1: h1,
            H2: h2,
            x0,
        })
    }

    pub fn from_game_spec(spec: &GameSpec, horizon: Option<usize>) -> Self {
        ProblemFile {
            A: mat_to_rows(&spec.A),
            B1: mat_to_rows(&spec.B1),
            B2: mat_to_rows(&spec.B2),
            Q1: mat_to_rows(&spec.Q1),
            Q2: mat_to_rows(&spec.Q2),
            R11: mat_to_rows(&spec.R11),
            R12: mat_to_rows(&spec.R12),
            R21: mat_to_rows(&spec.R21),
            R22: mat_to_rows(&spec.R22),
            H1: Some(mat_to_rows(&spec.H1)),
            H2: Some(mat_to_rows(&spec.H2)),
            x0: Some(spec.x0.iter().copied().collect()),
            horizon,
        }
    }
}

/// On-disk solution. The body is tagged by `kind` (`"finite"` or
/// `"stationary"`); `input_digest` is `sha256:<hex>` of the problem file's
/// bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub tool_version: String,
    pub input_digest: String,
    pub generated_at_unix: u64,
    #[serde(flatten)]
    pub body: SolutionBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolutionBody {
    Finite(FiniteBody),
    Stationary(StationaryBody),
}

/// Finite-horizon solution payload: the full gain schedules plus the
/// time-zero matrices that price the two cost formulas.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteBody {
    pub horizon: usize,
    pub K1: Vec<Vec<Vec<f64>>>,
    pub K2: Vec<Vec<Vec<f64>>>,
    pub P1_0: Vec<Vec<f64>>,
    pub P2_0: Vec<Vec<f64>>,
    pub T_0: Vec<Vec<f64>>,
    pub Xi: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryBody {
    pub P1: Vec<Vec<f64>>,
    pub P2: Vec<Vec<f64>>,
    pub T: Vec<Vec<f64>>,
    pub K1: Vec<Vec<f64>>,
    pub K2: Vec<Vec<f64>>,
    pub Abar: Vec<Vec<f64>>,
    pub iterations: usize,
    pub final_delta: f64,
    pub verdict: Verdict,
}

impl FiniteBody {
    pub fn from_solution(sol: &FiniteSolution) -> Self {
        FiniteBody {
            horizon: sol.horizon,
            K1: sol.K1.iter().map(mat_to_rows).collect(),
            K2: sol.K2.iter().map(mat_to_rows).collect(),
            P1_0: mat_to_rows(&sol.P1[0]),
            P2_0: mat_to_rows(&sol.P2[0]),
            T_0: mat_to_rows(&sol.T[0]),
            Xi: mat_to_rows(&sol.Xi),
        }
    }

    /// Rebuild the gain schedules as matrices.
    pub fn gains(&self) -> Result<(Vec<Mat>, Vec<Mat>), IoError> {
        let k1 =
            self.K1.iter().map(|rows| mat_from_rows("K1", rows)).collect::<Result<Vec<_>, _>>()?;
        let k2 =
            self.K2.iter().map(|rows| mat_from_rows("K2", rows)).collect::<Result<Vec<_>, _>>()?;
        Ok((k1, k2))
    }
}

impl StationaryBody {
    pub fn from_solution(sol: &StationarySolution, verdict: &Verdict) -> Self {
        StationaryBody {
            P1: mat_to_rows(&sol.P1),
            P2: mat_to_rows(&sol.P2),
            T: mat_to_rows(&sol.T),
            K1: mat_to_rows(&sol.K1),
            K2: mat_to_rows(&sol.K2),
            Abar: mat_to_rows(&sol.Abar),
            iterations: sol.iterations,
            final_delta: sol.final_delta,
            verdict: verdict.clone(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().fold(String::with_capacity(64), |mut acc, b| {
        use std::fmt::Write as _;
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

/// `sha256:<hex>` digest of a file's raw bytes.
pub fn digest_of_file(path: &Path) -> Result<String, IoError> {
    let bytes = std::fs::read(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    Ok(format!("sha256:{}", sha256_hex(&bytes)))
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|e| IoError::Parse { path: path.display().to_string(), message: e.to_string() })
}

pub fn load_solution(path: &Path) -> Result<SolutionFile, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|e| IoError::Parse { path: path.display().to_string(), message: e.to_string() })
}

pub fn save_solution(path: &Path, sol: &SolutionFile) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(sol).expect("solution serializes");
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|source| IoError::Write { path: path.display().to_string(), source })
}

pub fn save_problem(path: &Path, problem: &ProblemFile) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(problem).expect("problem serializes");
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|source| IoError::Write { path: path.display().to_string(), source })
}

/// Write the trajectory as CSV: header
/// `k,x_1..x_n,u1_1..u1_m1,u2_1..u2_m2,J1_cum,J2_cum,lyapunov`, one row per
/// state `k = 0..=K`. Cost columns hold the cost accumulated *before*
/// arriving at `x_k` (row 0 is 0), so the columns are nondecreasing and the
/// final row shows the total over all simulated stages. The final row's
/// controls are what the gains would apply at `x_K`, so every row is fully
/// populated; `gains.at(K)` must exist. Values are printed with 17
/// significant digits so parsing them back reproduces the doubles exactly.
/// `traj.lyapunov_values` must already be filled (one entry per state).
pub fn write_csv<W: std::io::Write>(
    w: &mut W,
    traj: &Trajectory,
    gains: &Gains,
) -> std::io::Result<()> {
    let steps = traj.steps();
    let n = traj.states[0].len();
    assert_eq!(
        traj.lyapunov_values.len(),
        traj.states.len(),
        "fill lyapunov_values before writing CSV"
    );
    let (last_k1, last_k2) =
        gains.at(steps).expect("CSV rows need a gain pair for the final state");
    let last_u1 = last_k1 * &traj.states[steps];
    let last_u2 = last_k2 * &traj.states[steps];
    let m1 = last_u1.len();
    let m2 = last_u2.len();

    let mut header = String::from("k");
    for i in 1..=n {
        header.push_str(&format!(",x_{i}"));
    }
    for i in 1..=m1 {
        header.push_str(&format!(",u1_{i}"));
    }
    for i in 1..=m2 {
        header.push_str(&format!(",u2_{i}"));
    }
    header.push_str(",J1_cum,J2_cum,lyapunov");
    writeln!(w, "{header}")?;

    for k in 0..=steps {
        let mut row = format!("{k}");
        for v in traj.states[k].iter() {
            row.push_str(&format!(",{v:.16e}"));
        }
        let (u1, u2) = if k < steps {
            (&traj.controls_u1[k], &traj.controls_u2[k])
        } else {
            (&last_u1, &last_u2)
        };
        for v in u1.iter() {
            row.push_str(&format!(",{v:.16e}"));
        }
        for v in u2.iter() {
            row.push_str(&format!(",{v:.16e}"));
        }
        let (j1, j2) =
            if k == 0 { (0.0, 0.0) } else { (traj.running_J1[k - 1], traj.running_J2[k - 1]) };
        row.push_str(&format!(",{j1:.16e},{j2:.16e},{:.16e}", traj.lyapunov_values[k]));
        writeln!(w, "{row}")?;
    }
    Ok(())
}
