//! Oracles, query accounting and the rescaling reduction.

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::instance::{Bounds, PiecewiseInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleKind {
    /// Returns `f'(x)` only.
    FirstOrder,
    /// Returns `(f(x), f'(x))`.
    ZerothPlusFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub value: Option<f64>,
    pub derivative: f64,
}

/// Something that can answer oracle queries. Implementations may be
/// stateful (the resisting oracle records its queries).
pub trait OracleSource {
    /// Whether [`answer`](Self::answer) fills in `value`.
    fn provides_values(&self) -> bool;

    fn answer(&mut self, x: f64) -> Result<Response, OracleError>;
}

impl OracleSource for &PiecewiseInstance {
    fn provides_values(&self) -> bool {
        true
    }

    fn answer(&mut self, x: f64) -> Result<Response, OracleError> {
        let (v, d) = self.eval(x).map_err(|_| OracleError::NonFiniteQuery(x))?;
        Ok(Response {
            value: Some(v),
            derivative: d,
        })
    }
}

/// A closed-form `x -> (f(x), f'(x))` for tests and quick experiments.
pub struct ClosedForm<F>(pub F);

impl<F: FnMut(f64) -> (f64, f64)> OracleSource for ClosedForm<F> {
    fn provides_values(&self) -> bool {
        true
    }

    fn answer(&mut self, x: f64) -> Result<Response, OracleError> {
        let (v, d) = (self.0)(x);
        Ok(Response {
            value: Some(v),
            derivative: d,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub x: f64,
    pub response: Response,
}

/// Ordered record of every answered query.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryLog {
    pub records: Vec<QueryRecord>,
}

impl QueryLog {
    pub fn points(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.x).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// The only way solvers reach a function. Counts every answered query and
/// optionally enforces a hard budget.
pub struct OracleHandle<S> {
    kind: OracleKind,
    source: S,
    count: u64,
    budget: Option<u64>,
    log: Option<QueryLog>,
}

impl<S: OracleSource> OracleHandle<S> {
    pub fn new(kind: OracleKind, source: S) -> Result<Self, OracleError> {
        if kind == OracleKind::ZerothPlusFirst && !source.provides_values() {
            return Err(OracleError::ValuesUnavailable);
        }
        Ok(Self {
            kind,
            source,
            count: 0,
            budget: None,
            log: None,
        })
    }

    pub fn first_order(source: S) -> Self {
        Self {
            kind: OracleKind::FirstOrder,
            source,
            count: 0,
            budget: None,
            log: None,
        }
    }

    pub fn zeroth_first(source: S) -> Result<Self, OracleError> {
        Self::new(OracleKind::ZerothPlusFirst, source)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Starts recording a [`QueryLog`].
    pub fn with_log(mut self) -> Self {
        self.log = Some(QueryLog::default());
        self
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn log(&self) -> Option<&QueryLog> {
        self.log.as_ref()
    }

    pub fn take_log(&mut self) -> Option<QueryLog> {
        self.log.take()
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn into_source(self) -> S {
        self.source
    }

    /// Answers a query. Rejected queries (non-finite point, exhausted
    /// budget, source failure) are not counted.
    pub fn evaluate(&mut self, x: f64) -> Result<Response, OracleError> {
        if !x.is_finite() {
            return Err(OracleError::NonFiniteQuery(x));
        }
        if let Some(budget) = self.budget {
            if self.count >= budget {
                return Err(OracleError::BudgetExhausted { budget });
            }
        }
        let mut response = self.source.answer(x)?;
        if self.kind == OracleKind::FirstOrder {
            response.value = None;
        }
        self.count += 1;
        if let Some(log) = self.log.as_mut() {
            log.records.push(QueryRecord { x, response });
        }
        Ok(response)
    }
}

/// Smoothness `beta`, objective-gap bound `delta` and target accuracy
/// `epsilon` of a stationary-point problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl ProblemMeta {
    pub fn new(beta: f64, delta: f64, epsilon: f64) -> Result<Self, OracleError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(OracleError::InvalidScale(format!("beta = {beta}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(OracleError::InvalidScale(format!("delta = {delta}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(OracleError::InvalidScale(format!("epsilon = {epsilon}")));
        }
        Ok(Self {
            beta,
            delta,
            epsilon,
        })
    }

    pub fn rescaling(&self) -> Rescaling {
        Rescaling::new(self.beta, self.delta).expect("validated in ProblemMeta::new")
    }

    /// Accuracy to demand on the normalized instance.
    pub fn normalized_epsilon(&self) -> f64 {
        self.rescaling().epsilon(self.epsilon)
    }
}

/// `g(x) = f(s x) / Δ` with `s = √(Δ/β)`: a β-smooth `f` with gap `Δ`
/// becomes a 1-smooth `g` with gap 1, and `g'(x) = (s/Δ) f'(s x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaling {
    beta: f64,
    delta: f64,
    x_scale: f64,
    slope_scale: f64,
}

impl Rescaling {
    pub fn new(beta: f64, delta: f64) -> Result<Self, OracleError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(OracleError::InvalidScale(format!("beta = {beta}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(OracleError::InvalidScale(format!("delta = {delta}")));
        }
        let x_scale = (delta / beta).sqrt();
        Ok(Self {
            beta,
            delta,
            x_scale,
            slope_scale: x_scale / delta,
        })
    }

    /// Like [`new`](Self::new) with `β` raised to the smallest `Δ·4^k >= β`,
    /// so `s = 2^-k` and mapping points between the two lines is exact.
    pub fn dyadic(beta: f64, delta: f64) -> Result<Self, OracleError> {
        Self::new(beta, delta)?;
        let ratio = beta / delta;
        let mut k = (ratio.log2() / 2.0).ceil() as i32;
        while 4f64.powi(k - 1) >= ratio {
            k -= 1;
        }
        while 4f64.powi(k) < ratio {
            k += 1;
        }
        Self::new(delta * 4f64.powi(k), delta)
    }

    /// `s = √(Δ/β)`.
    pub fn x_scale(&self) -> f64 {
        self.x_scale
    }

    /// Maps a normalized-coordinate point back to the original function.
    pub fn to_original(&self, x_g: f64) -> f64 {
        self.x_scale * x_g
    }

    /// `ε / √(βΔ)`, computed with the same factor applied to slopes so that a
    /// slope of exactly `−ε` maps to exactly `−ε_g`.
    pub fn epsilon(&self, epsilon: f64) -> f64 {
        epsilon * self.slope_scale
    }

    pub fn slope_to_original(&self, slope_g: f64) -> f64 {
        slope_g / self.slope_scale
    }

    pub fn apply(&self, f: &PiecewiseInstance) -> Result<PiecewiseInstance, OracleError> {
        let s = self.x_scale;
        let value_scale = 1.0 / self.delta;
        let curv_scale = s * s / self.delta;
        let b = f.bounds();
        let bounds = Bounds {
            beta: b.beta * curv_scale,
            delta: b.delta * value_scale,
        };
        f.map_affine(1.0 / s, value_scale, self.slope_scale, curv_scale, bounds)
            .map_err(|e| OracleError::InvalidScale(e.to_string()))
    }
}

/// Rescales a β-smooth instance with gap at most Δ to a 1-smooth instance
/// with gap at most 1. Quadratic pieces stay quadratic.
pub fn rescale_instance(
    f: &PiecewiseInstance,
    beta: f64,
    delta: f64,
) -> Result<PiecewiseInstance, OracleError> {
    Rescaling::new(beta, delta)?.apply(f)
}

/// `√(Δ/β) · x_g`: an `ε/√(βΔ)`-stationary point of the rescaled instance
/// maps to an ε-stationary point of the original.
pub fn map_stationary_point(x_g: f64, beta: f64, delta: f64) -> Result<f64, OracleError> {
    if !x_g.is_finite() {
        return Err(OracleError::NonFiniteQuery(x_g));
    }
    Ok(Rescaling::new(beta, delta)?.to_original(x_g))
}
