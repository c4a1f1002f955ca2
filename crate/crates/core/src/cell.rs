//! State carried between recurrent steps and the per-step gate values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The four gate families of an LSTM cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateFamily {
    Forget,
    Input,
    Output,
    Candidate,
}

impl GateFamily {
    pub const ALL: [GateFamily; 4] = [
        GateFamily::Forget,
        GateFamily::Input,
        GateFamily::Output,
        GateFamily::Candidate,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Gates with a `[0, 1]` range; the candidate lives in `[-1, 1]`.
    pub fn is_sigmoid_like(self) -> bool {
        self != GateFamily::Candidate
    }
}

/// Classical cell and hidden vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CellState<T> {
    pub c: Vec<T>,
    pub h: Vec<T>,
}

impl<T: Real> CellState<T> {
    pub fn zeros(hidden_dim: usize) -> Self {
        Self {
            c: vec![T::zero(); hidden_dim],
            h: vec![T::zero(); hidden_dim],
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.h.len()
    }

    pub(crate) fn check(&self, hidden_dim: usize) -> Result<()> {
        for (what, v) in [("cell state", &self.c), ("hidden state", &self.h)] {
            if v.len() != hidden_dim {
                return Err(Error::LengthMismatch {
                    what,
                    expected: hidden_dim,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}

/// Per-unit gate outputs of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct GateActivations<T> {
    pub f: Vec<T>,
    pub i: Vec<T>,
    pub o: Vec<T>,
    pub c_tilde: Vec<T>,
}

impl<T: Real> GateActivations<T> {
    pub fn get(&self, family: GateFamily) -> &[T] {
        match family {
            GateFamily::Forget => &self.f,
            GateFamily::Input => &self.i,
            GateFamily::Output => &self.o,
            GateFamily::Candidate => &self.c_tilde,
        }
    }

    pub fn constant(hidden_dim: usize, f: T, i: T, o: T, c_tilde: T) -> Self {
        Self {
            f: vec![f; hidden_dim],
            i: vec![i; hidden_dim],
            o: vec![o; hidden_dim],
            c_tilde: vec![c_tilde; hidden_dim],
        }
    }

    /// Whether every component lies in its declared range.
    pub fn in_range(&self) -> bool {
        let unit = |v: &[T]| v.iter().all(|a| *a >= T::zero() && *a <= T::one());
        unit(&self.f)
            && unit(&self.i)
            && unit(&self.o)
            && self.c_tilde.iter().all(|a| a.abs() <= T::one())
    }
}
