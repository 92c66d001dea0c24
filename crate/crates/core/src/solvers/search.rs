use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Halt, Meter, Probe, SolverConfig, SolverOutcome};
use crate::error::SolverError;
use crate::oracle::{OracleHandle, OracleSource};

/// Bisection on the sign of `f'` over a bracket whose endpoints the caller
/// has already queried: `f'(lower) <= -ε`, `f'(upper) > 0`.
///
/// No query is spent checking the bracket. A bracket no longer than `ε` with
/// those signs cannot come from a 1-smooth function, so it is reported as
/// `PreconditionViolated`, both on entry and if bisection ever shrinks the
/// bracket that far.
pub fn binary_search<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    lower: Probe,
    upper: Probe,
    epsilon: f64,
) -> Result<SolverOutcome, SolverError> {
    check_epsilon(epsilon)?;
    let mut meter = Meter::new(handle, u64::MAX);
    let r = bisect(&mut meter, lower, upper, epsilon);
    meter.finish(r)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<(), SolverError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidConfig(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )))
    }
}

pub(crate) fn bisect<S: OracleSource>(
    meter: &mut Meter<'_, S>,
    lower: Probe,
    upper: Probe,
    eps: f64,
) -> Result<f64, Halt> {
    if !(lower.x < upper.x && lower.slope <= -eps && upper.slope > 0.0) {
        return Err(Halt::Precondition(format!(
            "bracket [{}, {}] with slopes {} and {} is not a descent/ascent pair",
            lower.x, upper.x, lower.slope, upper.slope
        )));
    }
    let (mut lo, mut hi) = (lower.x, upper.x);
    if hi - lo <= eps {
        return Err(Halt::Precondition(format!(
            "bracket length {} <= ε contradicts 1-smoothness",
            hi - lo
        )));
    }
    loop {
        let m = 0.5 * (lo + hi);
        let g = meter.query(m)?.slope;
        // g in (-ε, 0] falls in this branch too
        if g.abs() < eps {
            return Ok(m);
        }
        if g <= -eps {
            lo = m;
        } else {
            hi = m;
        }
        if hi - lo <= eps {
            return Err(Halt::Precondition(format!(
                "bracket shrank to {} without a stationary point",
                hi - lo
            )));
        }
    }
}

/// Uniform draws on `[0, 2/ε]` until one is ε-stationary or has `f' > 0`,
/// in which case `binary_search` runs on `[0, x]`.
///
/// Assumes the normalised setting: `f(0) = 1`, `f >= 0`, `f'(0) <= -ε`. The
/// origin is never queried; its slope is taken to be `-ε`. At most
/// `config.rs_cap()` draws are made before returning `BudgetExhausted`.
pub fn random_search<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    config: &SolverConfig,
) -> Result<SolverOutcome, SolverError> {
    config.validate()?;
    let eps = config.epsilon;
    let span = 2.0 / eps;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut meter = Meter::new(handle, config.budget);
    let result = (|| {
        for _ in 0..config.rs_cap() {
            let x = rng.gen::<f64>() * span;
            let p = meter.query(x)?;
            if p.slope.abs() < eps {
                return Ok(x);
            }
            if p.slope > 0.0 {
                return bisect(&mut meter, Probe::new(0.0, -eps), p, eps);
            }
        }
        Err(Halt::Budget)
    })();
    meter.finish(result)
}
