use super::{Bounds, PiecewiseInstance, QuadPiece, Tail};
use crate::error::InstanceError;

/// Builds abutting pieces left to right, carrying the running value so the
/// result is continuous by construction.
#[derive(Debug, Clone)]
pub struct PieceChain {
    x: f64,
    value: f64,
    slope: f64,
    pieces: Vec<QuadPiece>,
}

impl PieceChain {
    pub fn start(x: f64, value: f64, slope: f64) -> Self {
        Self {
            x,
            value,
            slope,
            pieces: Vec::new(),
        }
    }

    /// Appends `[x, right]` with curvature `2a`, starting from the current
    /// end slope (C1 join).
    pub fn curve_to(&mut self, right: f64, a: f64) -> Result<&mut Self, InstanceError> {
        let b = self.slope;
        self.piece_to(right, a, b)
    }

    /// Appends `[x, right]` with an explicit start slope `b`.
    pub fn piece_to(&mut self, right: f64, a: f64, b: f64) -> Result<&mut Self, InstanceError> {
        let p = QuadPiece::new(self.x, right, a, b, self.value).map_err(|e| match e {
            InstanceError::DegeneratePiece { left, right, .. } => InstanceError::DegeneratePiece {
                index: self.pieces.len(),
                left,
                right,
            },
            e => e,
        })?;
        self.x = right;
        self.value = p.end_value();
        self.slope = p.end_slope();
        self.pieces.push(p);
        Ok(self)
    }

    pub fn position(&self) -> f64 {
        self.x
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn finish(self) -> Vec<QuadPiece> {
        self.pieces
    }
}

/// Snaps `epsilon` to the nearest `1/m` with `m >= 1`.
pub fn snap_epsilon(epsilon: f64) -> Result<(f64, u64), InstanceError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(InstanceError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let m = (1.0 / epsilon).round().max(1.0);
    Ok((1.0 / m, m as u64))
}

fn check_phi_epsilon(epsilon: f64) -> Result<(), InstanceError> {
    if !(epsilon > 0.0 && epsilon <= 0.25) {
        return Err(InstanceError::InvalidParameter(format!(
            "epsilon must lie in (0, 1/4], got {epsilon}"
        )));
    }
    Ok(())
}

/// The bump `Φ` on `[0, 1]`: `2(1+ε)x² − εx` on the left half and
/// `2Φ(½) − Φ(1−x)` on the right half, so `Φ(0) = 0`, `Φ(1) = 1` and
/// `Φ'(0) = Φ'(1) = −ε`. Smoothness is exactly `4(1+ε)`.
///
/// Outside `[0, 1]` the instance continues linearly with slope `−ε` on both
/// sides, so it has no finite objective gap; `bounds.delta` is infinite.
pub fn make_phi(epsilon: f64) -> Result<PiecewiseInstance, InstanceError> {
    check_phi_epsilon(epsilon)?;
    let a = 2.0 * (1.0 + epsilon);
    // On [1/2, 1] with t = x - 1/2: 1 - Φ(1/2 - t) = 1/2 + (2+ε)t - 2(1+ε)t².
    let pieces = vec![
        QuadPiece::new(0.0, 0.5, a, -epsilon, 0.0)?,
        QuadPiece::new(0.5, 1.0, -a, 2.0 + epsilon, 0.5)?,
    ];
    PiecewiseInstance::new(
        -epsilon,
        pieces,
        None,
        Bounds {
            beta: 2.0 * a,
            delta: f64::INFINITY,
        },
    )
}

/// The hard instance `f_j` for `ε = 1/m`: slope `−ε` everywhere except the
/// bump `1 − ε(j−1) + (1−ε)Φ(x − (j−1))` on `[j−1, j]`, repeated with period
/// `1/ε` and zero increment on the right.
///
/// The bump's end slopes are `−ε(1−ε)`, so `f_j'` jumps by `ε²` at `j−1`
/// and `j`; [`verify_instance`](super::verify_instance) reports the jump.
/// Certified bounds are `β = 4`, `Δ = 1`.
pub fn make_fj(j: u64, epsilon: f64) -> Result<PiecewiseInstance, InstanceError> {
    check_phi_epsilon(epsilon)?;
    let (snapped, m) = snap_epsilon(epsilon)?;
    if snapped != epsilon {
        return Err(InstanceError::InvalidParameter(format!(
            "1/epsilon must be an integer, got epsilon = {epsilon}"
        )));
    }
    if j < 1 || j > m {
        return Err(InstanceError::InvalidParameter(format!(
            "j must lie in 1..={m}, got {j}"
        )));
    }
    let eps = epsilon;
    let jm1 = (j - 1) as f64;
    let period = m as f64;
    let base = 1.0 - eps * jm1;
    let shrink = 1.0 - eps;
    let a = 2.0 * (1.0 - eps * eps);

    let mut pieces = Vec::with_capacity(4);
    if j > 1 {
        pieces.push(QuadPiece::new(0.0, jm1, 0.0, -eps, 1.0)?);
    }
    pieces.push(QuadPiece::new(jm1, jm1 + 0.5, a, -eps * shrink, base)?);
    pieces.push(QuadPiece::new(
        jm1 + 0.5,
        j as f64,
        -a,
        shrink * (2.0 + eps),
        base + 0.5 * shrink,
    )?);
    if j < m {
        let peak = base + shrink;
        pieces.push(QuadPiece::new(j as f64, period, 0.0, -eps, peak)?);
    }
    PiecewiseInstance::new(
        -eps,
        pieces,
        Some(Tail {
            period,
            increment: 0.0,
        }),
        Bounds {
            beta: 4.0,
            delta: 1.0,
        },
    )
}

/// The rise piece `Φ_i` over `[x_i, x_i + len]`: `−ε(x−x_i) + ½(x−x_i)²` on
/// the first half, mirrored on the second half. `Φ_i(x_i) = 0`,
/// `Φ_i(x_i + len) = len(len/4 − ε)`, end slopes `−ε`, smoothness 1.
pub fn make_rise_piece(
    x_i: f64,
    len: f64,
    epsilon: f64,
) -> Result<[QuadPiece; 2], InstanceError> {
    if !(len.is_finite() && len > 0.0) {
        return Err(InstanceError::InvalidParameter(format!(
            "rise length must be positive, got {len}"
        )));
    }
    if !epsilon.is_finite() {
        return Err(InstanceError::NonFinite(epsilon));
    }
    let mid = x_i + 0.5 * len;
    let half = 0.5 * len;
    let first = QuadPiece::new(x_i, mid, 0.5, -epsilon, 0.0)?;
    let second = QuadPiece::new(
        mid,
        x_i + len,
        -0.5,
        half - epsilon,
        0.5 * half * half - epsilon * half,
    )?;
    Ok([first, second])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_endpoint_values_and_slopes() {
        for &eps in &[0.25, 0.1, 0.01] {
            let phi = make_phi(eps).unwrap();
            let (v0, d0) = phi.eval(0.0).unwrap();
            let (v1, d1) = phi.eval(1.0).unwrap();
            assert_eq!(v0, 0.0);
            assert!((v1 - 1.0).abs() < 1e-15);
            assert_eq!(d0, -eps);
            assert!((d1 + eps).abs() < 1e-15);
            assert!((phi.value(0.5).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_rejects_large_epsilon() {
        assert!(make_phi(0.3).is_err());
        assert!(make_phi(0.0).is_err());
    }

    #[test]
    fn fj_values_follow_the_definition() {
        let eps = 0.125;
        let f = make_fj(2, eps).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), (1.0, -0.125));
        assert_eq!(f.value(-10.0).unwrap(), 1.0 + 10.0 * eps);
        assert_eq!(f.eval(1.0).unwrap(), (1.0 - eps, -eps * (1.0 - eps)));
        assert!((f.value(8.0).unwrap() - 1.0).abs() < 1e-15);
        // period 1/ε, zero increment
        let g = make_fj(1, eps).unwrap();
        let (a, da) = g.eval(0.5).unwrap();
        let (b, db) = g.eval(3.0 / eps + 0.5).unwrap();
        assert_eq!((a, da), (b, db));
    }

    #[test]
    fn fj_rejects_bad_parameters() {
        assert!(make_fj(0, 0.125).is_err());
        assert!(make_fj(9, 0.125).is_err());
        assert!(make_fj(1, 0.13).is_err());
        assert!(make_fj(1, 0.5).is_err());
    }

    #[test]
    fn rise_piece_endpoint_properties() {
        let [p, q] = make_rise_piece(2.0, 1.0, 0.1).unwrap();
        assert_eq!(p.value_at(2.0), 0.0);
        assert_eq!(p.slope_at(2.0), -0.1);
        assert!((q.end_value() - 0.15).abs() < 1e-15);
        assert!((q.end_slope() + 0.1).abs() < 1e-15);
        assert_eq!(p.end_value(), q.c);
        assert_eq!(p.end_slope(), q.b);
        assert!(make_rise_piece(0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn chain_joins_are_exact() {
        let mut chain = PieceChain::start(0.0, 1.0, -0.5);
        chain.curve_to(1.0, 0.5).unwrap().curve_to(3.0, -0.25).unwrap();
        let pieces = chain.finish();
        assert_eq!(pieces[0].end_value(), pieces[1].c);
        assert_eq!(pieces[0].end_slope(), pieces[1].b);
        let mut bad = PieceChain::start(0.0, 0.0, 0.0);
        assert!(matches!(
            bad.curve_to(0.0, 1.0),
            Err(InstanceError::DegeneratePiece { index: 0, .. })
        ));
    }

    #[test]
    fn snapping_rounds_to_nearest_reciprocal() {
        assert_eq!(snap_epsilon(0.05).unwrap(), (0.05, 20));
        assert_eq!(snap_epsilon(0.3).unwrap(), (1.0 / 3.0, 3));
        assert_eq!(snap_epsilon(0.9).unwrap(), (1.0, 1));
        assert!(snap_epsilon(-1.0).is_err());
    }
}
