use super::{Halt, Meter, SolverConfig, SolverOutcome, SolverStatus};
use crate::error::SolverError;
use crate::oracle::{OracleHandle, OracleSource};

/// Gradient descent `x_{k+1} = x_k - step * f'(x_k)` from `x0`.
///
/// Returns the first iterate with `|f'| < ε`. If the budget runs out first,
/// the iterate with the smallest observed `|f'|` is returned with status
/// `BudgetExhausted`.
pub fn gd<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    x0: f64,
    config: &SolverConfig,
) -> Result<SolverOutcome, SolverError> {
    config.validate()?;
    let eps = config.epsilon;
    let mut meter = Meter::new(handle, config.budget);
    let mut x = x0;
    let mut best: Option<(f64, f64)> = None;
    loop {
        let g = match meter.query(x) {
            Ok(p) => p.slope,
            Err(Halt::Budget) => {
                return Ok(SolverOutcome {
                    point: best.map(|(x, _)| x),
                    queries: meter.used(),
                    status: SolverStatus::BudgetExhausted,
                })
            }
            Err(halt) => return meter.finish(Err(halt)),
        };
        if g.abs() < eps {
            return meter.finish(Ok(x));
        }
        if best.is_none_or(|(_, b)| g.abs() < b) {
            best = Some((x, g.abs()));
        }
        x -= config.gd_step * g;
    }
}
