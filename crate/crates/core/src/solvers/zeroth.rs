use super::search::{bisect, check_epsilon};
use super::{Halt, Meter, Probe, SolverOutcome};
use crate::error::SolverError;
use crate::oracle::{OracleHandle, OracleSource};

/// `zeroth_order` spends at most `K * log2(1/ε) + K` queries with this `K`.
///
/// The phases are: one query at the origin, at most `log_{4/3}(2/ε²)`
/// gap-decreasing steps, then one of `BinarySearchII`, `BinarySearchIII`
/// or `BinarySearch`, each chaining into the next at most once, with
/// `2 log2(1/ε) + O(1)` queries per phase. Summed this is about
/// `10.8 log2(1/ε) + 11`.
pub const ZEROTH_ORDER_CONSTANT: f64 = 12.0;

const SLACK: f64 = 1e-12;

fn slack(scale: f64) -> f64 {
    SLACK * scale.abs().max(1.0)
}

fn value_of(p: &Probe) -> Result<f64, Halt> {
    p.value.ok_or_else(|| {
        Halt::Precondition(format!("no function value held at x = {}", p.x))
    })
}

/// Result of the gap-decreasing phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapOutcome {
    /// `f(base) <= f(origin)`, `f'(base) <= -ε` and
    /// `f(base + 2/ε) >= 3/4 f(base)`; `far` is the probe at `base + 2/ε`.
    Settled {
        base: Probe,
        far: Probe,
        descents: u32,
        queries: u64,
    },
    /// The phase found a stationary point or stopped early.
    Finished(SolverOutcome),
}

enum GapPhase {
    Stationary(f64),
    Settled { base: Probe, far: Probe, descents: u32 },
}

/// Allowed number of `DecreaseGap` self-calls. Each call shrinks `f(base)`
/// by a factor `3/4` and `f(base) >= ε²/2` while `f'(base) <= -ε`, so
/// `log_{4/3}(2/ε²)` calls suffice when `f(origin) <= 1`.
fn gap_depth_limit(eps: f64) -> u32 {
    let log_eps = (1.0 / eps).log2();
    let proven = (2.0 / (eps * eps)).ln() / (4.0f64 / 3.0).ln();
    (4.0 * log_eps + 16.0).max(proven + 1.0).ceil() as u32
}

fn gap_phase<S: OracleSource>(
    meter: &mut Meter<'_, S>,
    origin: Probe,
    eps: f64,
) -> Result<GapPhase, Halt> {
    let mut base = origin;
    let mut base_value = value_of(&origin)?;
    if base.slope > -eps {
        return Err(Halt::Precondition(format!(
            "f'({}) = {} is not <= -ε",
            base.x, base.slope
        )));
    }
    let limit = gap_depth_limit(eps);
    let mut descents = 0;
    loop {
        let far_x = base.x + 2.0 / eps;
        let (far_value, far_slope) = meter.query_full(far_x)?;
        let far = Probe::with_value(far_x, far_value, far_slope);
        if far_slope.abs() < eps {
            return Ok(GapPhase::Stationary(far_x));
        }
        if far_slope > 0.0 {
            return bisect(meter, base, far, eps).map(GapPhase::Stationary);
        }
        if far_value >= 0.75 * base_value {
            return Ok(GapPhase::Settled {
                base,
                far,
                descents,
            });
        }
        descents += 1;
        if descents > limit {
            return Err(Halt::Error(SolverError::Invariant(format!(
                "DecreaseGap recursed {descents} times (limit {limit}); oracle is not 1-smooth with f >= 0"
            ))));
        }
        base = far;
        base_value = far_value;
    }
}

/// `DecreaseGap` from an already-queried `origin` (value and slope held).
pub fn decrease_gap<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    origin: Probe,
    epsilon: f64,
) -> Result<GapOutcome, SolverError> {
    check_epsilon(epsilon)?;
    let mut meter = Meter::new(handle, u64::MAX);
    meter.needs_values()?;
    match gap_phase(&mut meter, origin, epsilon) {
        Ok(GapPhase::Settled {
            base,
            far,
            descents,
        }) => Ok(GapOutcome::Settled {
            base,
            far,
            descents,
            queries: meter.used(),
        }),
        Ok(GapPhase::Stationary(x)) => meter.finish(Ok(x)).map(GapOutcome::Finished),
        Err(h) => meter.finish(Err(h)).map(GapOutcome::Finished),
    }
}

fn check_bs2(lo: &Probe, hi: &Probe, eps: f64) -> Result<(f64, f64), Halt> {
    let (fl, fh) = (value_of(lo)?, value_of(hi)?);
    let gap = fl - fh;
    let allowed = 0.25 * eps * (hi.x - lo.x);
    let ok = lo.x < hi.x
        && lo.slope <= -eps
        && gap >= -slack(fl)
        && gap <= allowed + slack(fl.max(allowed));
    if ok {
        Ok((fl, fh))
    } else {
        Err(Halt::Precondition(format!(
            "BinarySearchII needs f'(x-) <= -ε and 0 <= f(x-) - f(x+) <= ε/4 (x+ - x-); \
             got x- = {}, x+ = {}, f'(x-) = {}, gap = {gap}, allowed = {allowed}",
            lo.x, hi.x, lo.slope
        )))
    }
}

fn bs2<S: OracleSource>(
    meter: &mut Meter<'_, S>,
    mut lo: Probe,
    mut hi: Probe,
    eps: f64,
) -> Result<f64, Halt> {
    check_bs2(&lo, &hi, eps)?;
    loop {
        if hi.x - lo.x < 0.5 * eps {
            return Err(Halt::Error(SolverError::Invariant(format!(
                "BinarySearchII bracket [{}, {}] shorter than ε/2 without a stationary point",
                lo.x, hi.x
            ))));
        }
        let (fl, fh) = (value_of(&lo)?, value_of(&hi)?);
        let m = 0.5 * (lo.x + hi.x);
        let (fm, gm) = meter.query_full(m)?;
        let mid = Probe::with_value(m, fm, gm);
        if gm.abs() < eps {
            return Ok(m);
        }
        if gm > 0.0 {
            return bisect(meter, lo, mid, eps);
        }
        if fm >= fl {
            return bs3(meter, lo, mid, eps);
        }
        if fm <= fh {
            return bs3(meter, mid, hi, eps);
        }
        let half = 0.5 * (fl - fh);
        if fl - fm <= half {
            hi = mid;
        } else if fm - fh <= half {
            lo = mid;
        } else {
            return Err(Halt::Error(SolverError::Invariant(
                "BinarySearchII dispatch fell through every branch".into(),
            )));
        }
        // the halved bracket must still satisfy the entry condition
        check_bs2(&lo, &hi, eps).map_err(|h| match h {
            Halt::Precondition(msg) => Halt::Error(SolverError::Invariant(msg)),
            h => h,
        })?;
    }
}

fn bs3<S: OracleSource>(
    meter: &mut Meter<'_, S>,
    mut lo: Probe,
    mut hi: Probe,
    eps: f64,
) -> Result<f64, Halt> {
    let (fl, fh) = (value_of(&lo)?, value_of(&hi)?);
    if !(lo.x < hi.x && lo.slope <= -eps && fh >= fl) {
        return Err(Halt::Precondition(format!(
            "BinarySearchIII needs f'(x-) <= -ε and f(x+) >= f(x-); got x- = {}, x+ = {}, \
             f'(x-) = {}, f(x-) = {fl}, f(x+) = {fh}",
            lo.x, hi.x, lo.slope
        )));
    }
    loop {
        if hi.x - lo.x < eps {
            return Err(Halt::Error(SolverError::Invariant(format!(
                "BinarySearchIII bracket [{}, {}] shorter than ε yet f(x+) >= f(x-)",
                lo.x, hi.x
            ))));
        }
        let m = 0.5 * (lo.x + hi.x);
        let (fm, gm) = meter.query_full(m)?;
        let mid = Probe::with_value(m, fm, gm);
        if gm.abs() < eps {
            return Ok(m);
        }
        if gm > 0.0 {
            return bisect(meter, lo, mid, eps);
        }
        if fm >= value_of(&lo)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// `BinarySearchII` on a bracket whose endpoints the caller already holds
/// with values: `f'(lower) <= -ε` and
/// `0 <= f(lower) - f(upper) <= (ε/4)(upper - lower)`.
pub fn binary_search_ii<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    lower: Probe,
    upper: Probe,
    epsilon: f64,
) -> Result<SolverOutcome, SolverError> {
    check_epsilon(epsilon)?;
    let mut meter = Meter::new(handle, u64::MAX);
    meter.needs_values()?;
    let r = bs2(&mut meter, lower, upper, epsilon);
    meter.finish(r)
}

/// `BinarySearchIII`: `f'(lower) <= -ε` and `f(upper) >= f(lower)`.
pub fn binary_search_iii<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    lower: Probe,
    upper: Probe,
    epsilon: f64,
) -> Result<SolverOutcome, SolverError> {
    check_epsilon(epsilon)?;
    let mut meter = Meter::new(handle, u64::MAX);
    meter.needs_values()?;
    let r = bs3(&mut meter, lower, upper, epsilon);
    meter.finish(r)
}

/// Deterministic `O(log 1/ε)` search with function values.
///
/// Assumes the normalized setting: `f` is 1-smooth, `f(0) <= 1` and
/// `f >= 0`. The value comparisons are not shift invariant, so callers
/// holding a gap-1 function should shift it to `f(0) = 1` first.
///
/// Queries the origin first: a stationary origin is returned at once, and
/// `f'(0) >= ε` is handled by running on the mirrored line `x -> -x`. The
/// gap phase then fixes a base point, and the bracket `[base, base + 2/ε]`
/// goes to `BinarySearchII` when `f` does not rise across it and to
/// `BinarySearchIII` otherwise.
pub fn zeroth_order<S: OracleSource>(
    handle: &mut OracleHandle<S>,
    epsilon: f64,
) -> Result<SolverOutcome, SolverError> {
    check_epsilon(epsilon)?;
    let mut meter = Meter::new(handle, u64::MAX);
    meter.needs_values()?;
    let result = (|| {
        let (f0, g0) = meter.query_full(0.0)?;
        if g0.abs() < epsilon {
            return Ok(0.0);
        }
        let origin = if g0 > 0.0 {
            meter.set_mirror(true);
            Probe::with_value(0.0, f0, -g0)
        } else {
            Probe::with_value(0.0, f0, g0)
        };
        let (lo, hi) = match gap_phase(&mut meter, origin, epsilon)? {
            GapPhase::Stationary(x) => return Ok(x),
            GapPhase::Settled { base, far, .. } => (base, far),
        };
        let (fl, fh) = (value_of(&lo)?, value_of(&hi)?);
        if lo.slope.abs() < epsilon {
            Ok(lo.x)
        } else if fh <= fl {
            bs2(&mut meter, lo, hi, epsilon)
        } else if fh > fl {
            bs3(&mut meter, lo, hi, epsilon)
        } else {
            Err(Halt::Error(SolverError::Invariant(format!(
                "ZerothOrder dispatch fell through: f(x-) = {fl}, f(x+) = {fh}"
            ))))
        }
    })();
    meter.finish(result)
}
