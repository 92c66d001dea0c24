use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Algorithm, TrialRow};
use crate::error::HarnessError;
use crate::solvers::SolverStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    /// `log2(median queries)` against `log2(1/ε)`.
    LogLog,
    /// `median queries` against `log2(1/ε)`.
    LogLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
    pub mode: SlopeMode,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least squares `y = slope x + intercept` with `r²` clamped to
/// `[0, 1]` (1 when `y` is constant and fitted exactly).
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 { 1.0 } else { 0.0 }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Fits median queries over `Stationary` rows of `algorithm`, one point per
/// distinct ε. `zeroth_order` is fitted log-linearly, the others log-log.
pub fn estimate_slope(rows: &[TrialRow], algorithm: Algorithm) -> Result<SlopeEstimate, HarnessError> {
    let mut by_eps: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in rows {
        if r.algorithm == algorithm && r.status == SolverStatus::Stationary {
            by_eps
                .entry(r.epsilon.to_bits())
                .or_default()
                .push(r.queries as f64);
        }
    }
    if by_eps.len() < 4 {
        return Err(HarnessError::InsufficientData(format!(
            "{} has successful rows at {} distinct epsilons, need 4",
            algorithm.as_str(),
            by_eps.len()
        )));
    }
    let mode = match algorithm {
        Algorithm::ZerothOrder => SlopeMode::LogLinear,
        _ => SlopeMode::LogLog,
    };
    let mut points = Vec::with_capacity(by_eps.len());
    for (bits, mut qs) in by_eps {
        let x = (1.0 / f64::from_bits(bits)).log2();
        let med = median(&mut qs);
        let y = match mode {
            SlopeMode::LogLog => {
                if med <= 0.0 {
                    return Err(HarnessError::InsufficientData(
                        "zero median query count cannot be log-scaled".into(),
                    ));
                }
                med.log2()
            }
            SlopeMode::LogLinear => med,
        };
        points.push((x, y));
    }
    let (slope, intercept, r2) = fit_line(&points);
    Ok(SlopeEstimate {
        slope,
        intercept,
        r2,
        n_points: points.len(),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: Algorithm, eps: f64, seed: u64, queries: u64, status: SolverStatus) -> TrialRow {
        TrialRow {
            algorithm: alg,
            epsilon: eps,
            seed,
            j: None,
            queries,
            output_x: None,
            grad_abs: None,
            status,
        }
    }

    #[test]
    fn powers_of_four_give_slope_two() {
        let rows: Vec<_> = (1..=5)
            .map(|k| row(Algorithm::Gd, 0.5f64.powi(k), 0, 4u64.pow(k as u32), SolverStatus::Stationary))
            .collect();
        let s = estimate_slope(&rows, Algorithm::Gd).unwrap();
        assert_eq!(s.slope, 2.0);
        assert_eq!(s.intercept, 0.0);
        assert_eq!(s.r2, 1.0);
        assert_eq!((s.n_points, s.mode), (5, SlopeMode::LogLog));
    }

    #[test]
    fn uses_medians_and_skips_failures() {
        let mut rows = Vec::new();
        for k in 1..=4 {
            let e = 0.5f64.powi(k);
            let q = 2u64.pow(k as u32);
            rows.push(row(Algorithm::RandomSearch, e, 0, q, SolverStatus::Stationary));
            rows.push(row(Algorithm::RandomSearch, e, 1, q, SolverStatus::Stationary));
            rows.push(row(Algorithm::RandomSearch, e, 2, 1 << 40, SolverStatus::Stationary));
            rows.push(row(Algorithm::RandomSearch, e, 3, 1, SolverStatus::BudgetExhausted));
            rows.push(row(Algorithm::Gd, e, 0, 1, SolverStatus::Stationary));
        }
        let s = estimate_slope(&rows, Algorithm::RandomSearch).unwrap();
        assert!((s.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeroth_order_is_fitted_log_linearly() {
        let rows: Vec<_> = (4..=12)
            .map(|k| row(Algorithm::ZerothOrder, 0.5f64.powi(k), 0, 3 * k as u64 + 5, SolverStatus::Stationary))
            .collect();
        let s = estimate_slope(&rows, Algorithm::ZerothOrder).unwrap();
        assert_eq!(s.mode, SlopeMode::LogLinear);
        assert!((s.slope - 3.0).abs() < 1e-12 && (s.intercept - 5.0).abs() < 1e-9);
    }

    #[test]
    fn needs_four_epsilons() {
        let rows: Vec<_> = (1..=3)
            .map(|k| row(Algorithm::Gd, 0.5f64.powi(k), 0, 10, SolverStatus::Stationary))
            .collect();
        assert!(matches!(
            estimate_slope(&rows, Algorithm::Gd),
            Err(HarnessError::InsufficientData(_))
        ));
    }

    #[test]
    fn median_of_even_count_averages() {
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&mut [5.0]), 5.0);
    }
}
