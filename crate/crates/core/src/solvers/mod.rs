//! Upper-bound algorithms.
//!
//! Every solver talks to the function only through an [`OracleHandle`], and
//! every recursion in the original pseudocode is run as a loop over an
//! explicit bracket so that depth bounds are checked as it goes.

mod gd;
mod search;
mod zeroth;

pub use gd::gd;
pub use search::{binary_search, random_search};
pub use zeroth::{
    binary_search_ii, binary_search_iii, decrease_gap, zeroth_order, GapOutcome,
    ZEROTH_ORDER_CONSTANT,
};

use serde::{Deserialize, Serialize};

use crate::error::{OracleError, SolverError};
use crate::oracle::{OracleHandle, OracleKind, OracleSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Stationary,
    BudgetExhausted,
    PreconditionViolated,
}

impl SolverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Stationary => "stationary",
            SolverStatus::BudgetExhausted => "budget_exhausted",
            SolverStatus::PreconditionViolated => "precondition_violated",
        }
    }
}

impl std::str::FromStr for SolverStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stationary" => Ok(SolverStatus::Stationary),
            "budget_exhausted" => Ok(SolverStatus::BudgetExhausted),
            "precondition_violated" => Ok(SolverStatus::PreconditionViolated),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOutcome {
    pub point: Option<f64>,
    pub queries: u64,
    pub status: SolverStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// Hard cap on queries for one run.
    pub budget: u64,
    pub seed: u64,
    pub gd_step: f64,
    /// `RandomSearch` draws at most `ceil(rs_cap_constant / ε)` points.
    pub rs_cap_constant: f64,
}

impl SolverConfig {
    pub const DEFAULT_RS_CAP: f64 = 64.0;

    /// Defaults: unit step, cap constant 64, and a budget large enough for
    /// gradient descent's `2/ε²` guarantee and for the `RandomSearch` cap
    /// plus one bisection.
    pub fn new(epsilon: f64) -> Self {
        let gd = (2.0 / (epsilon * epsilon)).floor() + 2.0;
        let rs = (Self::DEFAULT_RS_CAP / epsilon).ceil() + bisection_bound(2.0 / epsilon, epsilon) as f64;
        Self {
            epsilon,
            budget: gd.max(rs).min(u64::MAX as f64) as u64,
            seed: 0,
            gd_step: 1.0,
            rs_cap_constant: Self::DEFAULT_RS_CAP,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.budget < 1 {
            return Err(SolverError::InvalidConfig("budget must be at least 1".into()));
        }
        if !(self.gd_step > 0.0 && self.gd_step.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("gd_step = {}", self.gd_step)));
        }
        if !(self.rs_cap_constant > 0.0 && self.rs_cap_constant.is_finite()) {
            return Err(SolverError::InvalidConfig(format!(
                "rs_cap_constant = {}",
                self.rs_cap_constant
            )));
        }
        Ok(())
    }

    /// Number of uniform draws `RandomSearch` makes before giving up.
    pub fn rs_cap(&self) -> u64 {
        (self.rs_cap_constant / self.epsilon).ceil() as u64
    }
}

/// `ceil(log2(len/ε)) + 2`: the most queries `binary_search` spends on a
/// bracket of length `len`.
pub fn bisection_bound(len: f64, epsilon: f64) -> u64 {
    (len / epsilon).log2().ceil().max(0.0) as u64 + 2
}

/// A point the caller has already queried, with whatever it learned there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub x: f64,
    pub value: Option<f64>,
    pub slope: f64,
}

impl Probe {
    pub fn new(x: f64, slope: f64) -> Self {
        Self {
            x,
            value: None,
            slope,
        }
    }

    pub fn with_value(x: f64, value: f64, slope: f64) -> Self {
        Self {
            x,
            value: Some(value),
            slope,
        }
    }
}

/// Why a solver stopped without a stationary point.
#[derive(Debug)]
pub(crate) enum Halt {
    Budget,
    Precondition(#[allow(dead_code)] String),
    Error(SolverError),
}

impl From<SolverError> for Halt {
    fn from(e: SolverError) -> Self {
        Halt::Error(e)
    }
}

/// Per-run view of a handle: enforces the run budget, counts the run's own
/// queries and can mirror the line (`x -> -x`) for solvers that normalise
/// `f'(0) <= -ε` by reflection.
pub(crate) struct Meter<'a, S> {
    handle: &'a mut OracleHandle<S>,
    start: u64,
    limit: u64,
    mirror: bool,
}

impl<'a, S: OracleSource> Meter<'a, S> {
    pub(crate) fn new(handle: &'a mut OracleHandle<S>, limit: u64) -> Self {
        let start = handle.count();
        Self {
            handle,
            start,
            limit,
            mirror: false,
        }
    }

    pub(crate) fn used(&self) -> u64 {
        self.handle.count() - self.start
    }

    pub(crate) fn needs_values(&self) -> Result<(), SolverError> {
        match self.handle.kind() {
            OracleKind::ZerothPlusFirst => Ok(()),
            OracleKind::FirstOrder => Err(SolverError::NeedsValues),
        }
    }

    pub(crate) fn set_mirror(&mut self, mirror: bool) {
        self.mirror = mirror;
    }

    /// Maps a point in solver coordinates back to the caller's line.
    pub(crate) fn external(&self, x: f64) -> f64 {
        if self.mirror {
            -x
        } else {
            x
        }
    }

    pub(crate) fn query(&mut self, x: f64) -> Result<Probe, Halt> {
        if self.used() >= self.limit {
            return Err(Halt::Budget);
        }
        let r = match self.handle.evaluate(self.external(x)) {
            Ok(r) => r,
            Err(OracleError::BudgetExhausted { .. }) => return Err(Halt::Budget),
            Err(e) => return Err(Halt::Error(e.into())),
        };
        let slope = if self.mirror { -r.derivative } else { r.derivative };
        Ok(Probe {
            x,
            value: r.value,
            slope,
        })
    }

    /// Like [`query`](Self::query) but insists on a function value.
    pub(crate) fn query_full(&mut self, x: f64) -> Result<(f64, f64), Halt> {
        let p = self.query(x)?;
        let v = p
            .value
            .ok_or(Halt::Error(SolverError::Oracle(OracleError::ValuesUnavailable)))?;
        Ok((v, p.slope))
    }

    pub(crate) fn finish(&self, result: Result<f64, Halt>) -> Result<SolverOutcome, SolverError> {
        let queries = self.used();
        match result {
            Ok(x) => Ok(SolverOutcome {
                point: Some(self.external(x)),
                queries,
                status: SolverStatus::Stationary,
            }),
            Err(Halt::Budget) => Ok(SolverOutcome {
                point: None,
                queries,
                status: SolverStatus::BudgetExhausted,
            }),
            Err(Halt::Precondition(_)) => Ok(SolverOutcome {
                point: None,
                queries,
                status: SolverStatus::PreconditionViolated,
            }),
            Err(Halt::Error(e)) => Err(e),
        }
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::instance::{Bounds, PiecewiseInstance, QuadPiece};

    /// `(x - center)^2 / 2 + floor` on a wide window with C1 rays.
    pub fn parabola(center: f64, floor: f64, half_width: f64) -> PiecewiseInstance {
        let p = QuadPiece::new(
            center - half_width,
            center + half_width,
            0.5,
            -half_width,
            floor + 0.5 * half_width * half_width,
        )
        .unwrap();
        PiecewiseInstance::new(
            -half_width,
            vec![p],
            None,
            Bounds {
                beta: 1.0,
                delta: 1.0,
            },
        )
        .unwrap()
    }
}
