//! Exact piecewise-quadratic functions on the real line.
//!
//! A [`PiecewiseInstance`] is a left linear ray, a run of abutting
//! [`QuadPiece`]s and either a periodic tail (`f(x + p) = f(x) + inc`) or a
//! right linear ray continuing the last piece's end slope. Every hard
//! instance in this crate (the bump `Φ`, the family `f_j`, the rise pieces
//! and the materialized resisting function) is represented this way, so
//! values, derivatives, infima and stationary sets are all computed exactly
//! from the coefficients.

mod analysis;
mod build;
mod text;

pub use analysis::{infimum_exact, stationary_set_exact, verify_instance, Interval, VerifyReport};
pub use build::{make_fj, make_phi, make_rise_piece, snap_epsilon, PieceChain};
pub use text::{read_instance, write_instance};

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;

/// `p(x) = a (x - left)^2 + b (x - left) + c` on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPiece {
    pub left: f64,
    pub right: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadPiece {
    pub fn new(left: f64, right: f64, a: f64, b: f64, c: f64) -> Result<Self, InstanceError> {
        for v in [left, right, a, b, c] {
            if !v.is_finite() {
                return Err(InstanceError::NonFinite(v));
            }
        }
        if right <= left {
            return Err(InstanceError::DegeneratePiece {
                index: 0,
                left,
                right,
            });
        }
        Ok(Self { left, right, a, b, c })
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    #[inline]
    pub fn value_at(&self, x: f64) -> f64 {
        let t = x - self.left;
        (self.a * t + self.b) * t + self.c
    }

    #[inline]
    pub fn slope_at(&self, x: f64) -> f64 {
        2.0 * self.a * (x - self.left) + self.b
    }

    pub fn end_value(&self) -> f64 {
        let t = self.width();
        (self.a * t + self.b) * t + self.c
    }

    pub fn end_slope(&self) -> f64 {
        2.0 * self.a * self.width() + self.b
    }

    /// Constant second derivative on the piece.
    pub fn curvature(&self) -> f64 {
        2.0 * self.a
    }

    /// Minimum over the closed piece: an endpoint or the interior vertex.
    pub fn minimum(&self) -> f64 {
        let mut m = self.c.min(self.end_value());
        if self.a > 0.0 {
            let t = -self.b / (2.0 * self.a);
            if t > 0.0 && t < self.width() {
                m = m.min((self.a * t + self.b) * t + self.c);
            }
        }
        m
    }
}

/// Periodic continuation to the right: `f(x + period) = f(x) + increment`
/// for `x >= x_last - period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub period: f64,
    pub increment: f64,
}

/// Certified smoothness and objective-gap constants an instance was built
/// for. `delta` may be infinite for fragments with no finite gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub beta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseInstance {
    left_ray_slope: f64,
    pieces: Vec<QuadPiece>,
    tail: Option<Tail>,
    bounds: Bounds,
}

/// Reduces `x >= end` into the base period `[end - period, end)`.
///
/// Returns the reduced point and the (integral) number of periods removed.
/// Shared by evaluation and by the adversary, which needs query residues to
/// be bit-identical to the points the evaluator will look up.
pub fn reduce_periodic(x: f64, end: f64, period: f64) -> (f64, f64) {
    let start = end - period;
    let mut k = ((x - start) / period).floor();
    let mut r = x - k * period;
    // floor() on a rounded quotient can be off by one period either way
    while r >= end {
        k += 1.0;
        r = x - k * period;
    }
    while r < start {
        k -= 1.0;
        r = x - k * period;
    }
    (r, k)
}

impl PiecewiseInstance {
    /// Validates and assembles an instance. Pieces must abut exactly and have
    /// positive width; a tail's base period must lie inside the pieces.
    pub fn new(
        left_ray_slope: f64,
        pieces: Vec<QuadPiece>,
        tail: Option<Tail>,
        bounds: Bounds,
    ) -> Result<Self, InstanceError> {
        if pieces.is_empty() {
            return Err(InstanceError::Empty);
        }
        if !left_ray_slope.is_finite() {
            return Err(InstanceError::NonFinite(left_ray_slope));
        }
        for (index, p) in pieces.iter().enumerate() {
            for v in [p.left, p.right, p.a, p.b, p.c] {
                if !v.is_finite() {
                    return Err(InstanceError::NonFinite(v));
                }
            }
            if p.right <= p.left {
                return Err(InstanceError::DegeneratePiece {
                    index,
                    left: p.left,
                    right: p.right,
                });
            }
        }
        for (index, w) in pieces.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(InstanceError::NonAbutting {
                    index,
                    right: w[0].right,
                    next_left: w[1].left,
                });
            }
        }
        if let Some(t) = tail {
            if !(t.period.is_finite() && t.period > 0.0) {
                return Err(InstanceError::InvalidParameter(format!(
                    "tail period must be positive, got {}",
                    t.period
                )));
            }
            if !t.increment.is_finite() {
                return Err(InstanceError::NonFinite(t.increment));
            }
            let first = pieces[0].left;
            let last = pieces[pieces.len() - 1].right;
            if last - t.period < first {
                return Err(InstanceError::InvalidParameter(format!(
                    "tail period {} exceeds piece span [{first}, {last}]",
                    t.period
                )));
            }
        }
        if !(bounds.beta > 0.0 && bounds.delta > 0.0) {
            return Err(InstanceError::InvalidParameter(format!(
                "bounds must be positive, got beta={} delta={}",
                bounds.beta, bounds.delta
            )));
        }
        Ok(Self {
            left_ray_slope,
            pieces,
            tail,
            bounds,
        })
    }

    pub fn left_ray_slope(&self) -> f64 {
        self.left_ray_slope
    }

    pub fn pieces(&self) -> &[QuadPiece] {
        &self.pieces
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn x_first(&self) -> f64 {
        self.pieces[0].left
    }

    pub fn x_last(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].right
    }

    fn last(&self) -> &QuadPiece {
        &self.pieces[self.pieces.len() - 1]
    }

    /// Start of the base period repeated by the tail.
    pub fn tail_start(&self) -> Option<f64> {
        self.tail.map(|t| self.x_last() - t.period)
    }

    /// Index of the piece containing `x`; a knot belongs to the piece on its
    /// right. Requires `x_first <= x <= x_last`.
    fn locate(&self, x: f64) -> usize {
        self.pieces
            .partition_point(|p| p.left <= x)
            .saturating_sub(1)
    }

    fn eval_core(&self, x: f64) -> (f64, f64) {
        let first = self.x_first();
        if x < first {
            let s = self.left_ray_slope;
            return (self.pieces[0].c + s * (x - first), s);
        }
        let last = self.x_last();
        match self.tail {
            Some(t) if x >= last => {
                let (r, k) = reduce_periodic(x, last, t.period);
                let p = &self.pieces[self.locate(r)];
                (p.value_at(r) + k * t.increment, p.slope_at(r))
            }
            None if x > last => {
                let p = self.last();
                let s = p.end_slope();
                (p.end_value() + s * (x - last), s)
            }
            _ => {
                let p = &self.pieces[self.locate(x)];
                (p.value_at(x), p.slope_at(x))
            }
        }
    }

    /// Exact value and derivative at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), InstanceError> {
        if !x.is_finite() {
            return Err(InstanceError::NonFinite(x));
        }
        Ok(self.eval_core(x))
    }

    pub fn value(&self, x: f64) -> Result<f64, InstanceError> {
        self.eval(x).map(|(v, _)| v)
    }

    pub fn derivative(&self, x: f64) -> Result<f64, InstanceError> {
        self.eval(x).map(|(_, d)| d)
    }

    /// Maps every piece through `x -> x * x_scale` (domain) and
    /// `f -> f * value_scale`, with slopes scaled by `slope_scale` and
    /// curvatures by `curv_scale`. The caller keeps the four factors
    /// consistent; see [`crate::oracle::Rescaling`].
    pub(crate) fn map_affine(
        &self,
        domain_scale: f64,
        value_scale: f64,
        slope_scale: f64,
        curv_scale: f64,
        bounds: Bounds,
    ) -> Result<Self, InstanceError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| QuadPiece {
                left: p.left * domain_scale,
                right: p.right * domain_scale,
                a: p.a * curv_scale,
                b: p.b * slope_scale,
                c: p.c * value_scale,
            })
            .collect();
        let tail = self.tail.map(|t| Tail {
            period: t.period * domain_scale,
            increment: t.increment * value_scale,
        });
        Self::new(self.left_ray_slope * slope_scale, pieces, tail, bounds)
    }

    #[cfg(test)]
    pub(crate) fn pieces_mut(&mut self) -> &mut Vec<QuadPiece> {
        &mut self.pieces
    }
}
