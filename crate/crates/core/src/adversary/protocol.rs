//! Line protocol for external solvers.
//!
//! The solver writes `Q <x>` and the adversary replies `G <g>`. The solver
//! ends the game with `DONE <x>` to claim `x` is stationary. When the
//! budget is spent the next `Q` is answered with `END` and the game stops.
//! Blank lines are ignored; end of input also ends the game.

use std::io::{BufRead, Write};

use super::AdversarySession;
use crate::error::AdversaryError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOutcome {
    pub queries: u64,
    pub claim: Option<f64>,
    pub exhausted: bool,
}

fn io_err(e: std::io::Error) -> AdversaryError {
    AdversaryError::Io(e.to_string())
}

fn parse_point(arg: Option<&str>, line: usize) -> Result<f64, AdversaryError> {
    let text = arg.ok_or_else(|| AdversaryError::Protocol {
        line,
        message: "missing point".into(),
    })?;
    let x: f64 = text.parse().map_err(|_| AdversaryError::Protocol {
        line,
        message: format!("`{text}` is not a decimal float"),
    })?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(AdversaryError::NonFiniteQuery(x))
    }
}

pub fn serve<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    session: &mut AdversarySession,
    budget: u64,
) -> Result<ProtocolOutcome, AdversaryError> {
    let mut outcome = ProtocolOutcome {
        queries: 0,
        claim: None,
        exhausted: false,
    };
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let number = i + 1;
        let mut words = line.split_whitespace();
        let Some(cmd) = words.next() else {
            continue;
        };
        let arg = words.next();
        if words.next().is_some() {
            return Err(AdversaryError::Protocol {
                line: number,
                message: "trailing input".into(),
            });
        }
        match cmd {
            "Q" => {
                let x = parse_point(arg, number)?;
                if outcome.queries >= budget {
                    writeln!(output, "END").map_err(io_err)?;
                    output.flush().map_err(io_err)?;
                    outcome.exhausted = true;
                    break;
                }
                let g = session.resist_answer(x)?.derivative;
                outcome.queries += 1;
                writeln!(output, "G {g}").map_err(io_err)?;
                output.flush().map_err(io_err)?;
            }
            "DONE" => {
                outcome.claim = Some(parse_point(arg, number)?);
                break;
            }
            other => {
                return Err(AdversaryError::Protocol {
                    line: number,
                    message: format!("unknown message `{other}`"),
                })
            }
        }
    }
    Ok(outcome)
}
