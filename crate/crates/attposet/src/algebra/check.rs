use std::fmt;

use serde_json::{json, Value};

use crate::exact::QSqrt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Dense,
    MatrixFree,
    /// Exact computation that is neither a full matrix identity nor a
    /// randomized one (counts, kernels, scalar tables).
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Dense => "dense",
            Mode::MatrixFree => "matrix-free",
            Mode::Exact => "exact",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A matrix entry where the two sides differ.
    Entry {
        part: String,
        row: usize,
        col: usize,
        lhs: QSqrt,
        rhs: QSqrt,
    },
    /// A coordinate of M·v where the two sides differ.
    Vector {
        part: String,
        trial: u32,
        index: usize,
        lhs: QSqrt,
        rhs: QSqrt,
    },
    Message(String),
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Entry {
                part,
                row,
                col,
                lhs,
                rhs,
            } => json!({
                "part": part, "row": row, "col": col, "lhs": lhs.to_json(), "rhs": rhs.to_json()
            }),
            Witness::Vector {
                part,
                trial,
                index,
                lhs,
                rhs,
            } => json!({
                "part": part, "trial": trial, "index": index, "lhs": lhs.to_json(), "rhs": rhs.to_json()
            }),
            Witness::Message(m) => json!({ "message": m }),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Entry {
                part,
                row,
                col,
                lhs,
                rhs,
            } => {
                write!(f, "{part}: entry ({row},{col}) lhs {lhs} rhs {rhs}")
            }
            Witness::Vector {
                part,
                trial,
                index,
                lhs,
                rhs,
            } => write!(f, "{part}: trial {trial} index {index} lhs {lhs} rhs {rhs}"),
            Witness::Message(m) => f.write_str(m),
        }
    }
}

/// Outcome of one check. A failing result always carries a witness; a
/// skipped one passes vacuously and records why.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub mode: Mode,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub pass: bool,
    pub witness: Option<Witness>,
    pub skipped: Option<String>,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, mode: Mode, witness: Option<Witness>) -> Self {
        CheckResult {
            id: id.into(),
            mode,
            trials: None,
            seed: None,
            pass: witness.is_none(),
            witness,
            skipped: None,
        }
    }

    pub fn pass(id: impl Into<String>, mode: Mode) -> Self {
        Self::new(id, mode, None)
    }

    pub fn fail(id: impl Into<String>, mode: Mode, witness: Witness) -> Self {
        Self::new(id, mode, Some(witness))
    }

    pub fn skipped(id: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckResult {
            skipped: Some(reason.into()),
            ..Self::pass(id, Mode::Exact)
        }
    }

    pub fn with_randomness(mut self, trials: u32, seed: u64) -> Self {
        self.trials = Some(trials);
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "id": self.id,
            "mode": self.mode.as_str(),
            "trials": self.trials,
            "seed": self.seed,
            "pass": self.pass,
            "witness": self.witness.as_ref().map(Witness::to_json),
        });
        if let Some(reason) = &self.skipped {
            v["skipped"] = json!(reason);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_fragment_shape() {
        let r = CheckResult::pass("REL-09", Mode::MatrixFree).with_randomness(5, 42);
        assert_eq!(
            r.to_json(),
            json!({"id":"REL-09","mode":"matrix-free","trials":5,"seed":42,"pass":true,"witness":null})
        );
    }

    #[test]
    fn failure_carries_witness() {
        let r = CheckResult::fail("X", Mode::Dense, Witness::Message("boom".into()));
        assert!(!r.pass);
        assert!(r.witness.is_some());
        assert!(CheckResult::skipped("Y", "N < 6").pass);
    }
}
