use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{serve, AdversaryReport, AdversarySession};
use crate::error::AdversaryError;
use crate::oracle::{OracleHandle, OracleSource};
use crate::solvers::{gd, random_search, SolverConfig, SolverOutcome};

/// First-order solvers the adversary can play in-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameSolver {
    /// Gradient descent from 0 with unit step.
    Gd,
    RandomSearch { seed: u64 },
}

impl GameSolver {
    pub fn name(&self) -> &'static str {
        match self {
            GameSolver::Gd => "gd",
            GameSolver::RandomSearch { .. } => "random_search",
        }
    }

    fn run<S: OracleSource>(
        &self,
        handle: &mut OracleHandle<S>,
        config: &SolverConfig,
    ) -> Result<SolverOutcome, AdversaryError> {
        let out = match self {
            GameSolver::Gd => gd(handle, 0.0, config)?,
            GameSolver::RandomSearch { seed } => {
                random_search(handle, &config.with_seed(*seed))?
            }
        };
        Ok(out)
    }
}

impl FromStr for GameSolver {
    type Err = AdversaryError;

    /// `gd`, `random_search` (seed 0) or `random_search:<seed>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "gd" => Ok(GameSolver::Gd),
            None if s == "random_search" => Ok(GameSolver::RandomSearch { seed: 0 }),
            Some(("random_search", seed)) => seed
                .parse()
                .map(|seed| GameSolver::RandomSearch { seed })
                .map_err(|_| AdversaryError::UnknownSolver(s.to_string())),
            _ => Err(AdversaryError::UnknownSolver(s.to_string())),
        }
    }
}

/// Runs `solver` against the resisting oracle for at most `budget` queries,
/// materializes, then replays the solver on the materialized function and
/// compares the two query sequences.
pub fn play_game(
    solver: GameSolver,
    epsilon: f64,
    budget: u64,
) -> Result<AdversaryReport, AdversaryError> {
    let mut session = AdversarySession::new(epsilon)?;
    let eps = session.epsilon();
    if budget == 0 {
        let mut report = session.materialize()?;
        report.solver = Some(solver.name().to_string());
        report.replay_match = Some(true);
        return Ok(report);
    }
    let config = SolverConfig::new(eps).with_budget(budget);
    let outcome = {
        let mut handle = OracleHandle::first_order(&mut session);
        solver.run(&mut handle, &config)?
    };
    let mut report = session.materialize()?;

    let mut replay = OracleHandle::first_order(&report.materialized).with_log();
    solver.run(&mut replay, &config)?;
    let replayed = replay.take_log().map(|l| l.points()).unwrap_or_default();
    report.replay_match = Some(replayed == session.queries());

    report.solver = Some(solver.name().to_string());
    report.solver_status = Some(outcome.status);
    report.record_claim(
        outcome
            .point
            .filter(|_| outcome.status == crate::solvers::SolverStatus::Stationary),
    );
    Ok(report)
}

/// Plays against an external solver speaking the line protocol on
/// `input`/`output`. No replay is attempted.
pub fn external_game<R: BufRead, W: Write>(
    input: R,
    output: W,
    epsilon: f64,
    budget: u64,
) -> Result<AdversaryReport, AdversaryError> {
    let mut session = AdversarySession::new(epsilon)?;
    let outcome = serve(input, output, &mut session, budget)?;
    let mut report = session.materialize()?;
    report.solver = Some("external".to_string());
    report.record_claim(outcome.claim);
    Ok(report)
}
