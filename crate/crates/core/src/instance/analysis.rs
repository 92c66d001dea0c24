use serde::{Deserialize, Serialize};

use super::PiecewiseInstance;
use crate::error::InstanceError;

const JOIN_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-6;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Exact infimum over the whole real line (possibly `-inf`).
pub fn infimum_exact(f: &PiecewiseInstance) -> f64 {
    // left ray: decreasing toward -inf when its slope is positive
    if f.left_ray_slope() > 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut inf = f
        .pieces()
        .iter()
        .map(|p| p.minimum())
        .fold(f64::INFINITY, f64::min);
    match f.tail() {
        Some(t) if t.increment < 0.0 => return f64::NEG_INFINITY,
        // later periods sit above the base period, which the pieces cover
        Some(_) => {}
        None => {
            let last = f.pieces()[f.pieces().len() - 1];
            if last.end_slope() < 0.0 {
                return f64::NEG_INFINITY;
            }
            inf = inf.min(last.end_value());
        }
    }
    inf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Largest `|f''|` over the pieces (rays contribute 0).
    pub beta_exact: f64,
    /// `f(0) - inf f`.
    pub gap_exact: f64,
    /// Values agree at every join.
    pub c0_ok: bool,
    /// Derivatives agree at every join, including the ray and the tail seam.
    pub c1_ok: bool,
    /// Largest derivative jump across any join.
    pub max_slope_jump: f64,
    /// Value and derivative at `x_last` match the base period start
    /// shifted by the increment. Vacuously true without a tail.
    pub periodic_ok: bool,
    /// Independent estimate of `beta` from centred differences of `f'`.
    pub beta_fd: f64,
    pub fd_ok: bool,
    /// Certified constants the instance was built for.
    pub beta_certified: f64,
    pub delta_certified: f64,
}

impl VerifyReport {
    /// The instance honours its certified smoothness and gap bounds and the
    /// two beta computations agree.
    pub fn within_bounds(&self) -> bool {
        self.c0_ok
            && self.fd_ok
            && self.beta_exact <= self.beta_certified
            && self.gap_exact <= self.delta_certified
    }
}

pub fn verify_instance(f: &PiecewiseInstance) -> VerifyReport {
    let pieces = f.pieces();
    let beta_exact = pieces
        .iter()
        .map(|p| p.curvature().abs())
        .fold(0.0, f64::max);
    let inf = infimum_exact(f);
    let gap_exact = f.eval_core(0.0).0 - inf;

    let mut c0_ok = true;
    let mut max_jump = (f.left_ray_slope() - pieces[0].b).abs();
    let mut c1_ok = close(f.left_ray_slope(), pieces[0].b, JOIN_TOL);
    for w in pieces.windows(2) {
        c0_ok &= close(w[0].end_value(), w[1].c, JOIN_TOL);
        c1_ok &= close(w[0].end_slope(), w[1].b, JOIN_TOL);
        max_jump = max_jump.max((w[0].end_slope() - w[1].b).abs());
    }

    let mut periodic_ok = true;
    if let (Some(t), Some(start)) = (f.tail(), f.tail_start()) {
        let last = pieces[pieces.len() - 1];
        let (v0, d0) = f.eval_core(start);
        let value_ok = close(last.end_value(), v0 + t.increment, JOIN_TOL);
        let slope_ok = close(last.end_slope(), d0, JOIN_TOL);
        c0_ok &= value_ok;
        c1_ok &= slope_ok;
        max_jump = max_jump.max((last.end_slope() - d0).abs());
        periodic_ok = value_ok && slope_ok;
    }

    // f' is linear inside each piece, so a centred difference taken well
    // inside the piece recovers the curvature through the evaluator alone.
    let mut beta_fd: f64 = 0.0;
    for p in pieces {
        let w = p.width();
        for frac in [0.25, 0.5, 0.75] {
            let x = p.left + frac * w;
            let h = 0.125 * w;
            let up = f.eval_core(x + h).1;
            let down = f.eval_core(x - h).1;
            beta_fd = beta_fd.max(((up - down) / (2.0 * h)).abs());
        }
    }
    let fd_ok = (beta_fd - beta_exact).abs() <= FD_TOL * beta_exact.max(1.0);

    VerifyReport {
        beta_exact,
        gap_exact,
        c0_ok,
        c1_ok,
        max_slope_jump: max_jump,
        periodic_ok,
        beta_fd,
        fd_ok,
        beta_certified: f.bounds().beta,
        delta_certified: f.bounds().delta,
    }
}

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// A maximal run of the real line on which `f'` is affine:
/// `f'(x) = slope + curv * (x - from)` for `x` in `[from, to]`.
struct Segment {
    from: f64,
    to: f64,
    slope: f64,
    curv: f64,
}

fn push_solution(
    seg: &Segment,
    eps: f64,
    lo: f64,
    hi: f64,
    deriv: &dyn Fn(f64) -> f64,
    out: &mut Vec<Interval>,
) {
    let from = seg.from.max(lo);
    let to = seg.to.min(hi);
    if to <= from {
        return;
    }
    let (mut a, mut b) = if seg.curv == 0.0 {
        if seg.slope.abs() < eps {
            (from, to)
        } else {
            return;
        }
    } else {
        let r1 = seg.from + (-eps - seg.slope) / seg.curv;
        let r2 = seg.from + (eps - seg.slope) / seg.curv;
        (r1.min(r2).max(from), r1.max(r2).min(to))
    };
    // snap the algebraic roots to what the evaluator reports, a few ulps at most
    let stat = |x: f64| deriv(x).abs() < eps;
    for _ in 0..64 {
        if b < to && stat(b) {
            b = b.next_up();
        } else if b > a && !stat(b.next_down()) {
            b = b.next_down();
        } else {
            break;
        }
    }
    for _ in 0..64 {
        if a > from && stat(a) {
            a = a.next_down();
        } else if a < b && !stat(a.next_up()) {
            a = a.next_up();
        } else {
            break;
        }
    }
    // a stationary knot belongs to this piece; open intervals need one ulp
    if a == seg.from && a > lo && b > a && stat(a) {
        a = a.next_down();
    }
    if b > a {
        out.push(Interval { lo: a, hi: b });
    }
}

/// The exact set `{x in (lo, hi) : |f'(x)| < eps}` as sorted, disjoint open
/// intervals. Tail periods overlapping the window are unrolled one by one,
/// so the window should span a modest number of periods.
pub fn stationary_set_exact(
    f: &PiecewiseInstance,
    epsilon: f64,
    window: (f64, f64),
) -> Result<Vec<Interval>, InstanceError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(InstanceError::EmptyWindow(lo, hi));
    }
    let first = f.x_first();
    let last = f.x_last();
    let mut segs = Vec::new();
    segs.push(Segment {
        from: f64::NEG_INFINITY,
        to: first,
        slope: f.left_ray_slope(),
        curv: 0.0,
    });
    for p in f.pieces() {
        segs.push(Segment {
            from: p.left,
            to: p.right,
            slope: p.b,
            curv: p.curvature(),
        });
    }
    match (f.tail(), f.tail_start()) {
        (Some(t), Some(start)) => {
            let base: Vec<_> = f.pieces().iter().filter(|p| p.right > start).collect();
            let mut k = 1.0;
            while start + k * t.period < hi {
                let shift = k * t.period;
                for p in &base {
                    let from = p.left.max(start);
                    segs.push(Segment {
                        from: from + shift,
                        to: p.right + shift,
                        slope: p.slope_at(from),
                        curv: p.curvature(),
                    });
                }
                k += 1.0;
            }
        }
        _ => {
            let p = f.pieces()[f.pieces().len() - 1];
            segs.push(Segment {
                from: last,
                to: f64::INFINITY,
                slope: p.end_slope(),
                curv: 0.0,
            });
        }
    }
    let mut raw = Vec::new();
    for s in &segs {
        if s.to <= lo || s.from >= hi {
            continue;
        }
        if s.from.is_infinite() {
            // constant-slope ray: treat its finite end as the anchor
            if s.slope.abs() < epsilon {
                let a = lo.max(s.from);
                let b = hi.min(s.to);
                if b > a {
                    raw.push(Interval { lo: a, hi: b });
                }
            }
            continue;
        }
        push_solution(s, epsilon, lo, hi, &|x| f.eval_core(x).1, &mut raw);
    }
    raw.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::with_capacity(raw.len());
    for iv in raw {
        match merged.last_mut() {
            Some(prev) if iv.lo < prev.hi => prev.hi = prev.hi.max(iv.hi),
            // runs meeting at a knot join only if the knot itself qualifies
            Some(prev) if iv.lo == prev.hi && f.eval_core(iv.lo).1.abs() < epsilon => {
                prev.hi = iv.hi
            }
            _ => merged.push(iv),
        }
    }
    Ok(merged)
}
