//! The resisting oracle and its materialization.
//!
//! An [`AdversarySession`] answers `f'(x) = -ε` to every query and records
//! the points. [`AdversarySession::materialize`] then builds an explicit
//! 1-smooth piecewise-quadratic function consistent with every answer:
//! slope `-ε` at each query residue, a rise piece across every query-free
//! gap of length at least `8ε`, linear descent across shorter gaps, and
//! `f'` periodic with period `1/ε` on the positive half-line.

mod game;
mod protocol;

pub use game::{external_game, play_game, GameSolver};
pub use protocol::{serve, ProtocolOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{AdversaryError, OracleError};
use crate::instance::{
    reduce_periodic, snap_epsilon, stationary_set_exact, verify_instance, Bounds, PieceChain,
    PiecewiseInstance, Tail,
};
use crate::oracle::{OracleSource, Response};
use crate::solvers::SolverStatus;

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AdversarySession {
    epsilon: f64,
    m: u64,
    queries: Vec<f64>,
    live: bool,
}

impl AdversarySession {
    /// Opens a session, snapping `epsilon` to the nearest `1/m`.
    pub fn new(epsilon: f64) -> Result<Self, AdversaryError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(AdversaryError::InvalidEpsilon(epsilon));
        }
        let (epsilon, m) = snap_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            m,
            queries: Vec::new(),
            live: true,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `1/ε` as an exact integer-valued float.
    pub fn period(&self) -> f64 {
        self.m as f64
    }

    /// `1/(32ε²)`.
    pub fn threshold(&self) -> f64 {
        (self.m * self.m) as f64 / 32.0
    }

    /// `floor(1/(32ε²))`, computed in integers.
    pub fn guaranteed_budget(&self) -> u64 {
        self.m * self.m / 32
    }

    pub fn queries(&self) -> &[f64] {
        &self.queries
    }

    pub fn is_live(&self) -> bool {
        self.live
    }

    pub fn resist_answer(&mut self, x: f64) -> Result<Response, AdversaryError> {
        if !self.live {
            return Err(AdversaryError::SessionClosed);
        }
        if !x.is_finite() {
            return Err(AdversaryError::NonFiniteQuery(x));
        }
        self.queries.push(x);
        Ok(Response {
            value: None,
            derivative: -self.epsilon,
        })
    }

    /// Where the materialized function looks up `f'` for a query at `x`.
    fn residue(&self, x: f64) -> f64 {
        let p = self.period();
        if x >= p {
            reduce_periodic(x, p, p).0
        } else {
            x
        }
    }

    /// Builds the consistent function, audits it and closes the session.
    pub fn materialize(&mut self) -> Result<AdversaryReport, AdversaryError> {
        if !self.live {
            return Err(AdversaryError::SessionClosed);
        }
        self.live = false;
        let eps = self.epsilon;
        let p = self.period();

        let mut knots: Vec<f64> = self
            .queries
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| self.residue(x))
            .filter(|&r| r > 0.0)
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let n_knots = knots.len();

        let mut chain = PieceChain::start(0.0, 1.0, -eps);
        let (mut rise_gaps, mut linear_gaps) = (0usize, 0usize);
        let (mut rise_total, mut linear_drop) = (0.0, 0.0);
        let mut from = 0.0;
        for &to in knots.iter().chain(std::iter::once(&p)) {
            let len = to - from;
            if len >= 8.0 * eps {
                chain.piece_to(from + 0.5 * len, 0.5, -eps)?;
                chain.curve_to(to, -0.5)?;
                rise_gaps += 1;
                rise_total += len * (0.25 * len - eps);
            } else {
                chain.piece_to(to, 0.0, -eps)?;
                linear_gaps += 1;
                linear_drop += eps * len;
            }
            from = to;
        }
        let increment = chain.value() - 1.0;
        let materialized = PiecewiseInstance::new(
            -eps,
            chain.finish(),
            Some(Tail {
                period: p,
                increment,
            }),
            Bounds {
                beta: 1.0,
                delta: 1.0,
            },
        )?;
        let check = verify_instance(&materialized);

        let lo = self.queries.iter().copied().fold(0.0, f64::min) - 1.0;
        let set = stationary_set_exact(&materialized, eps, (lo, p + 1.0))?;
        let mut audit = Vec::with_capacity(self.queries.len());
        for (index, &x) in self.queries.iter().enumerate() {
            let residue = self.residue(x);
            let derivative = materialized.derivative(x)?;
            audit.push(AuditEntry {
                index,
                x,
                residue,
                answer: -eps,
                derivative,
                consistent: (derivative + eps).abs() <= CONSISTENCY_TOL * eps,
                stationary: set.iter().any(|iv| iv.contains(residue)),
            });
        }

        let threshold = self.threshold();
        let applies = rise_gaps as f64 <= threshold && linear_gaps as f64 <= 2.0 * threshold;
        Ok(AdversaryReport {
            epsilon: eps,
            period: p,
            n_queries: self.queries.len(),
            n_knots,
            threshold,
            guaranteed_budget: self.guaranteed_budget(),
            consistent: audit.iter().all(|e| e.consistent),
            valid: check.beta_exact <= 1.0 && check.gap_exact <= 1.0,
            defeated: audit.iter().all(|e| !e.stationary),
            replay_match: None,
            tail_increment: increment,
            increment_nonneg: increment >= 0.0,
            beta_exact: check.beta_exact,
            gap_exact: check.gap_exact,
            c1_ok: check.c1_ok,
            rise_gaps,
            linear_gaps,
            rise_total,
            linear_drop,
            accounting_ok: applies.then_some(rise_total >= linear_drop),
            solver: None,
            solver_status: None,
            claim: None,
            claim_stationary: None,
            audit,
            materialized,
        })
    }
}

impl OracleSource for &mut AdversarySession {
    fn provides_values(&self) -> bool {
        false
    }

    fn answer(&mut self, x: f64) -> Result<Response, OracleError> {
        self.resist_answer(x).map_err(|e| match e {
            AdversaryError::NonFiniteQuery(x) => OracleError::NonFiniteQuery(x),
            _ => OracleError::SessionClosed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub index: usize,
    pub x: f64,
    /// Point in `[0, 1/ε)` (or on the left ray) the evaluator reads for `x`.
    pub residue: f64,
    pub answer: f64,
    /// `f'(x)` of the materialized function.
    pub derivative: f64,
    pub consistent: bool,
    pub stationary: bool,
}

/// Non-finite gaps serialize as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub epsilon: f64,
    pub period: f64,
    pub n_queries: usize,
    /// Distinct residues in `(0, 1/ε)`.
    pub n_knots: usize,
    /// `1/(32ε²)`.
    pub threshold: f64,
    pub guaranteed_budget: u64,
    pub consistent: bool,
    pub valid: bool,
    pub defeated: bool,
    /// Whether a replay on the materialized oracle issued the same queries.
    /// `None` when no replay was possible.
    pub replay_match: Option<bool>,
    /// `a = f(1/ε) - f(0)`.
    pub tail_increment: f64,
    pub increment_nonneg: bool,
    pub beta_exact: f64,
    pub gap_exact: f64,
    pub c1_ok: bool,
    pub rise_gaps: usize,
    pub linear_gaps: usize,
    /// Sum of `ℓ(ℓ/4 - ε)` over rise gaps.
    pub rise_total: f64,
    /// Sum of `εℓ` over linear gaps.
    pub linear_drop: f64,
    /// `rise_total >= linear_drop`, checked when at most `1/(32ε²)` gaps
    /// rise and at most `1/(16ε²)` are linear.
    pub accounting_ok: Option<bool>,
    pub solver: Option<String>,
    pub solver_status: Option<SolverStatus>,
    /// Point the solver claimed as stationary, if any.
    pub claim: Option<f64>,
    pub claim_stationary: Option<bool>,
    pub audit: Vec<AuditEntry>,
    pub materialized: PiecewiseInstance,
}

impl AdversaryReport {
    /// At most `floor(1/(32ε²))` queries were made, so the construction is
    /// guaranteed to succeed.
    pub fn within_guarantee(&self) -> bool {
        self.n_queries as u64 <= self.guaranteed_budget
    }

    /// Every recorded check passed.
    pub fn all_ok(&self) -> bool {
        self.consistent
            && self.valid
            && self.defeated
            && self.increment_nonneg
            && self.replay_match != Some(false)
            && self.accounting_ok != Some(false)
    }

    pub(crate) fn record_claim(&mut self, claim: Option<f64>) {
        self.claim = claim;
        self.claim_stationary = claim.map(|x| {
            self.materialized
                .derivative(x)
                .map(|d| d.abs() < self.epsilon)
                .unwrap_or(false)
        });
    }
}
