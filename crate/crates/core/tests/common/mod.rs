//! Normalized C1 test instances shared by the integration tests.
//!
//! Every suite member is 1-smooth with `f(0) = 1` and `inf f >= 0`, so its
//! gap from the origin is at most 1.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stationary_lab::adversary::{play_game, GameSolver};
use stationary_lab::instance::{infimum_exact, verify_instance, Bounds, PieceChain};
use stationary_lab::oracle::rescale_instance;
use stationary_lab::{PiecewiseInstance, QuadPiece};

pub struct Member {
    pub name: String,
    pub f: PiecewiseInstance,
}

/// `(x - center)^2 / 2 + floor` on a window of half-width 50, with `floor`
/// chosen so `f(0) = 1`.
pub fn parabola(center: f64) -> PiecewiseInstance {
    let floor = 1.0 - 0.5 * center * center;
    assert!(floor >= 0.0);
    let hw = 50.0;
    let p = QuadPiece::new(center - hw, center + hw, 0.5, -hw, floor + 0.5 * hw * hw).unwrap();
    PiecewiseInstance::new(-hw, vec![p], None, Bounds { beta: 1.0, delta: 1.0 }).unwrap()
}

fn random_pieces(seed: u64, start_value: f64) -> (f64, Vec<QuadPiece>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slope = -rng.gen_range(0.2..1.0);
    let mut chain = PieceChain::start(-4.0, start_value, slope);
    let mut x = -4.0;
    for _ in 0..8 {
        x += rng.gen_range(0.3..1.5);
        chain.curve_to(x, rng.gen_range(-1.5..1.5)).unwrap();
    }
    let s = chain.slope();
    chain.curve_to(x + (0.5 - s).max(1.0) / 2.0, 1.0).unwrap();
    (slope, chain.finish())
}

/// A random C1 chain of quadratics, shifted so `inf f = 0` and rescaled
/// through its exact smoothness and gap so `β = 1`, `f(0) = 1`.
pub fn random_c1(seed: u64) -> PiecewiseInstance {
    let loose = Bounds { beta: 100.0, delta: f64::INFINITY };
    let (slope, pieces) = random_pieces(seed, 0.0);
    let raw = PiecewiseInstance::new(slope, pieces, None, loose).unwrap();
    let inf = infimum_exact(&raw);
    let (slope, pieces) = random_pieces(seed, -inf);
    let shifted = PiecewiseInstance::new(slope, pieces, None, loose).unwrap();
    let r = verify_instance(&shifted);
    assert!(r.c1_ok && r.gap_exact > 0.0, "seed {seed}: {r:?}");
    let exact = PiecewiseInstance::new(
        slope,
        shifted.pieces().to_vec(),
        None,
        Bounds { beta: r.beta_exact, delta: r.gap_exact },
    )
    .unwrap();
    rescale_instance(&exact, r.beta_exact, r.gap_exact).unwrap()
}

/// A random C1 instance with its exact bounds attached, not normalized.
pub fn random_raw(seed: u64) -> PiecewiseInstance {
    let loose = Bounds { beta: 100.0, delta: f64::INFINITY };
    let (slope, pieces) = random_pieces(seed, 0.0);
    let raw = PiecewiseInstance::new(slope, pieces.clone(), None, loose).unwrap();
    let r = verify_instance(&raw);
    PiecewiseInstance::new(slope, pieces, None, Bounds { beta: r.beta_exact, delta: r.gap_exact }).unwrap()
}

pub fn suite() -> Vec<Member> {
    let mut v = vec![
        Member { name: "parabola".into(), f: parabola(1.2) },
        Member { name: "wide_parabola".into(), f: parabola(-0.9) },
        Member {
            name: "resisting_gd_1/20".into(),
            f: play_game(GameSolver::Gd, 1.0 / 20.0, 12).unwrap().materialized,
        },
        Member {
            name: "resisting_rs_1/40".into(),
            f: play_game(GameSolver::RandomSearch { seed: 3 }, 1.0 / 40.0, 50).unwrap().materialized,
        },
    ];
    for seed in 1..=3 {
        v.push(Member { name: format!("random_c1_{seed}"), f: random_c1(seed) });
    }
    v
}
