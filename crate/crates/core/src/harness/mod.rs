//! Trial matrices, slope estimation and plots.
//!
//! Every trial runs on the normalized instance `g(x) = f(s x)/Δ` with target
//! `ε_g = ε s/Δ`, and its output is mapped back and audited on `f` itself.
//! The scale `s` is a power of two (see [`Rescaling::dyadic`]).

mod plot;
mod slope;
mod table;

pub use plot::{emit_plot, render_svg};
pub use slope::{estimate_slope, fit_line, SlopeEstimate, SlopeMode};
pub use table::{read_csv, write_csv, CSV_HEADER};

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::instance::{make_fj, snap_epsilon, PiecewiseInstance};
use crate::oracle::{ClosedForm, OracleHandle, Rescaling};
use crate::solvers::{gd, random_search, zeroth_order, SolverConfig, SolverStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gd,
    RandomSearch,
    ZerothOrder,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Gd => "gd",
            Algorithm::RandomSearch => "random_search",
            Algorithm::ZerothOrder => "zeroth_order",
        }
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gd" => Ok(Algorithm::Gd),
            "random_search" => Ok(Algorithm::RandomSearch),
            "zeroth_order" => Ok(Algorithm::ZerothOrder),
            other => Err(HarnessError::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// `f_j` built per ε; `j` from the spec's policy.
    Fj,
    /// A fixed instance (usually read from a file), normalized through its
    /// certified bounds.
    Custom(PiecewiseInstance),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JPolicy {
    Fixed(u64),
    /// `j = 1 + floor(u m)` with `u` from stream 1 of the seed's ChaCha
    /// generator, independent of the solver's stream 0.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub algorithm: Algorithm,
    pub instance: InstanceSource,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub j_policy: JPolicy,
    /// Per-trial query cap; `None` uses [`SolverConfig::new`]'s default.
    pub budget: Option<u64>,
}

impl TrialSpec {
    pub fn new(algorithm: Algorithm, epsilons: Vec<f64>, seeds: Vec<u64>) -> Self {
        Self {
            algorithm,
            instance: InstanceSource::Fj,
            epsilons,
            seeds,
            j_policy: JPolicy::Uniform,
            budget: None,
        }
    }

    /// Snapped epsilons with their `m = 1/ε`.
    pub fn snapped(&self) -> Result<Vec<(f64, u64)>, HarnessError> {
        if self.epsilons.is_empty() {
            return Err(HarnessError::InvalidSpec("no epsilons".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidSpec("no seeds".into()));
        }
        let snapped = self
            .epsilons
            .iter()
            .map(|&e| snap_epsilon(e))
            .collect::<Result<Vec<_>, _>>()?;
        if snapped.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(HarnessError::InvalidSpec(format!(
                "epsilons must be strictly decreasing after snapping to 1/m: {:?}",
                snapped.iter().map(|s| s.0).collect::<Vec<_>>()
            )));
        }
        Ok(snapped)
    }
}

/// One CSV row. `j` is empty for custom instances; `output_x` and
/// `grad_abs` are empty when the solver returned no point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub seed: u64,
    pub j: Option<u64>,
    pub queries: u64,
    pub output_x: Option<f64>,
    /// `|f'(output_x)|` on the original instance.
    pub grad_abs: Option<f64>,
    pub status: SolverStatus,
}

/// Draws `j` uniformly from `1..=m` on stream 1 of `seed`.
pub fn uniform_j(seed: u64, m: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let u: f64 = rng.gen();
    (1 + (u * m as f64).floor() as u64).min(m)
}

fn run_one(
    spec: &TrialSpec,
    eps: f64,
    m: u64,
    seed: u64,
) -> Result<TrialRow, HarnessError> {
    let (f, j) = match &spec.instance {
        InstanceSource::Fj => {
            let j = match spec.j_policy {
                JPolicy::Fixed(j) => j,
                JPolicy::Uniform => uniform_j(seed, m),
            };
            (make_fj(j, eps)?, Some(j))
        }
        InstanceSource::Custom(f) => (f.clone(), None),
    };
    let bounds = f.bounds();
    if !bounds.delta.is_finite() {
        return Err(HarnessError::InvalidSpec(
            "instance has no finite certified gap to normalize by".into(),
        ));
    }
    let scale = Rescaling::dyadic(bounds.beta, bounds.delta)?;
    let g = scale.apply(&f)?;
    let eps_g = scale.epsilon(eps);
    let mut config = SolverConfig::new(eps_g).with_seed(seed);
    if let Some(b) = spec.budget {
        config = config.with_budget(b);
    }
    let out = match spec.algorithm {
        Algorithm::Gd => gd(&mut OracleHandle::first_order(&g), 0.0, &config)?,
        Algorithm::RandomSearch => random_search(&mut OracleHandle::first_order(&g), &config)?,
        Algorithm::ZerothOrder => {
            // values are shifted so g(0) = 1, hence g >= 0 when the gap is at most 1
            let shift = 1.0 - g.value(0.0)?;
            let shifted = ClosedForm(|x: f64| {
                let (v, d) = g.eval(x).unwrap_or((f64::NAN, f64::NAN));
                (v + shift, d)
            });
            let mut h = OracleHandle::zeroth_first(shifted)?.with_budget(config.budget);
            zeroth_order(&mut h, eps_g)?
        }
    };
    let output_x = out.point.map(|x| scale.to_original(x));
    let grad_abs = output_x
        .map(|x| f.derivative(x).map(f64::abs))
        .transpose()?;
    Ok(TrialRow {
        algorithm: spec.algorithm,
        epsilon: eps,
        seed,
        j,
        queries: out.queries,
        output_x,
        grad_abs,
        status: out.status,
    })
}

/// One row per `(ε, seed)` in spec order, computed in parallel.
pub fn run_trials(spec: &TrialSpec) -> Result<Vec<TrialRow>, HarnessError> {
    let snapped = spec.snapped()?;
    let cells: Vec<(f64, u64, u64)> = snapped
        .iter()
        .flat_map(|&(e, m)| spec.seeds.iter().map(move |&s| (e, m, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(e, m, s)| run_one(spec, e, m, s))
        .collect()
}

/// Stationary rows whose audited gradient is not below `ε`.
pub fn audit_failures(rows: &[TrialRow]) -> Vec<&TrialRow> {
    rows.iter()
        .filter(|r| {
            r.status == SolverStatus::Stationary
                && !r.grad_abs.is_some_and(|g| g < r.epsilon)
        })
        .collect()
}
