//! Acceptance checks. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stationary_lab::adversary::{play_game, GameSolver};
use stationary_lab::harness::{
    audit_failures, estimate_slope, fit_line, run_trials, Algorithm, TrialSpec,
};
use stationary_lab::instance::{make_fj, make_phi, stationary_set_exact, verify_instance};
use stationary_lab::oracle::{map_stationary_point, rescale_instance, Rescaling};
use stationary_lab::solvers::{gd, random_search, zeroth_order};
use stationary_lab::{OracleHandle, PiecewiseInstance, SolverConfig, SolverStatus};

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn construction_audit() -> Check {
    for eps in [0.25, 0.1, 0.01] {
        let r = verify_instance(&make_phi(eps).map_err(|e| e.to_string())?);
        ensure(r.beta_exact == 4.0 * (1.0 + eps), || {
            format!("phi({eps}): beta_exact {} != 4(1+eps)", r.beta_exact)
        })?;
        ensure(r.c1_ok, || format!("phi({eps}) is not C1"))?;
    }
    let mut count = 0;
    for m in [8u64, 32, 128] {
        let eps = 1.0 / m as f64;
        for j in 1..=m {
            let r = verify_instance(&make_fj(j, eps).map_err(|e| e.to_string())?);
            let want = 4.0 * (1.0 - eps * eps);
            ensure(r.beta_exact == want && r.beta_exact <= 5.0, || {
                format!("f_{j} at 1/{m}: beta_exact {} != {want}", r.beta_exact)
            })?;
            ensure(r.gap_exact <= 1.0, || format!("f_{j} at 1/{m}: gap {}", r.gap_exact))?;
            count += 1;
        }
    }
    Ok(format!("phi at 3 eps, {count} f_j instances"))
}

fn gd_bound() -> Check {
    let suite = common::suite();
    let mut worst_ratio: f64 = 0.0;
    for member in &suite {
        let r = verify_instance(&member.f);
        ensure(r.c1_ok && r.beta_exact <= 1.0 + 1e-12 && r.gap_exact <= 1.0 + 1e-12, || {
            format!("{} is not a normalized C1 instance: {r:?}", member.name)
        })?;
        for n in [10u64, 100, 1000] {
            let mut h = OracleHandle::zeroth_first(&member.f)
                .map_err(|e| e.to_string())?
                .with_log();
            let cfg = SolverConfig::new(1e-12).with_budget(n);
            gd(&mut h, 0.0, &cfg).map_err(|e| e.to_string())?;
            let log = h.take_log().unwrap_or_default();
            let min_grad = log
                .records
                .iter()
                .map(|q| q.response.derivative.abs())
                .fold(f64::INFINITY, f64::min);
            let bound = (2.0 / n as f64).sqrt();
            ensure(min_grad <= bound + 1e-9, || {
                format!("{} N={n}: min |f'| = {min_grad} > {bound}", member.name)
            })?;
            worst_ratio = worst_ratio.max(min_grad / bound);
            for w in log.records.windows(2) {
                let (v0, d0) = (w[0].response.value.unwrap(), w[0].response.derivative);
                let v1 = w[1].response.value.unwrap();
                ensure(v1 <= v0 - 0.5 * d0 * d0 + 1e-9, || {
                    format!("{} N={n}: descent lemma fails at x = {}", member.name, w[0].x)
                })?;
            }
        }
    }
    Ok(format!(
        "{} instances x N in {{10,100,1000}}; worst min|f'|/sqrt(2/N) = {worst_ratio:.3}",
        suite.len()
    ))
}

fn grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 0.5f64.powi(k)).collect()
}

fn complexity_slopes() -> Check {
    let gd_rows = run_trials(&TrialSpec::new(Algorithm::Gd, grid(4, 10), (0..20).collect()))
        .map_err(|e| e.to_string())?;
    let rs_rows = run_trials(&TrialSpec::new(Algorithm::RandomSearch, grid(4, 10), (0..50).collect()))
        .map_err(|e| e.to_string())?;
    for rows in [&gd_rows, &rs_rows] {
        let bad = audit_failures(rows);
        ensure(bad.is_empty(), || format!("{} rows fail the gradient audit", bad.len()))?;
    }
    let g = estimate_slope(&gd_rows, Algorithm::Gd).map_err(|e| e.to_string())?;
    let r = estimate_slope(&rs_rows, Algorithm::RandomSearch).map_err(|e| e.to_string())?;
    let detail = format!(
        "gd slope {:.3} (r2 {:.4}), random_search slope {:.3} (r2 {:.4})",
        g.slope, g.r2, r.slope, r.r2
    );
    ensure((1.7..=2.3).contains(&g.slope) && g.r2 >= 0.9, || detail.clone())?;
    ensure((0.7..=1.3).contains(&r.slope) && r.r2 >= 0.9, || detail.clone())?;
    Ok(detail)
}

fn random_search_success() -> Check {
    let rows = run_trials(&TrialSpec::new(Algorithm::RandomSearch, vec![1.0 / 64.0], (0..200).collect()))
        .map_err(|e| e.to_string())?;
    let ok = rows.iter().filter(|r| r.status == SolverStatus::Stationary).count();
    let bad = audit_failures(&rows);
    ensure(bad.is_empty(), || format!("{} rows fail the gradient audit", bad.len()))?;
    let detail = format!(
        "{ok}/200 stationary within cap ceil({}/eps_g) draws",
        SolverConfig::DEFAULT_RS_CAP
    );
    ensure(ok >= 90, || detail.clone())?;
    Ok(detail)
}

fn zeroth_queries(f: &PiecewiseInstance, eps: f64) -> Result<(u64, bool), String> {
    let mut h = OracleHandle::zeroth_first(f).map_err(|e| e.to_string())?;
    let out = zeroth_order(&mut h, eps).map_err(|e| e.to_string())?;
    let audited = out.status == SolverStatus::Stationary
        && f.derivative(out.point.unwrap()).map_err(|e| e.to_string())?.abs() < eps;
    Ok((out.queries, audited))
}

fn zeroth_order_cost() -> Check {
    let suite = common::suite();
    let ks: Vec<i32> = (4..=12).collect();
    let mut total = vec![0u64; ks.len()];
    let mut points = Vec::new();
    for member in &suite {
        for (i, &k) in ks.iter().enumerate() {
            let eps = 0.5f64.powi(k);
            let (q, audited) = zeroth_queries(&member.f, eps)?;
            ensure(audited, || format!("{} at 2^-{k}: output not eps-stationary", member.name))?;
            total[i] += q;
        }
    }
    // f_j family, normalized by the harness
    let fj = run_trials(&TrialSpec::new(Algorithm::ZerothOrder, grid(4, 12), (0..10).collect()))
        .map_err(|e| e.to_string())?;
    ensure(audit_failures(&fj).is_empty(), || "f_j rows fail the gradient audit".into())?;
    ensure(fj.iter().all(|r| r.status == SolverStatus::Stationary), || {
        "f_j run did not finish stationary".into()
    })?;
    let fj_fit = estimate_slope(&fj, Algorithm::ZerothOrder).map_err(|e| e.to_string())?;
    for (i, &k) in ks.iter().enumerate() {
        let eps = 0.5f64.powi(k);
        total[i] += fj.iter().filter(|r| r.epsilon == eps).map(|r| r.queries).sum::<u64>();
        points.push((k as f64, total[i] as f64));
    }
    let at = |k: i32| total[ks.iter().position(|&x| x == k).unwrap()] as f64;
    let ratio = at(12) / at(6);
    let (slope, _, r2) = fit_line(&points);
    let detail = format!(
        "suite+f_j total queries 2^-12 / 2^-6 = {ratio:.3}; affine fit slope {slope:.2}/bit, r2 {r2:.4}; f_j alone r2 {:.4}",
        fj_fit.r2
    );
    ensure(ratio <= 3.0 && r2 >= 0.9 && fj_fit.r2 >= 0.9, || detail.clone())?;
    Ok(detail)
}

fn adversary_defeat() -> Check {
    let mut n = 0;
    for m in [20u64, 40, 80] {
        let eps = 1.0 / m as f64;
        let budget = m * m / 32;
        for solver in [GameSolver::Gd, GameSolver::RandomSearch { seed: 3 }] {
            let r = play_game(solver, eps, budget).map_err(|e| e.to_string())?;
            let tag = format!("{} at 1/{m} (budget {budget})", solver.name());
            ensure(r.n_queries as u64 == budget, || format!("{tag}: {} queries", r.n_queries))?;
            ensure(r.consistent && r.valid && r.defeated, || {
                format!("{tag}: consistent {} valid {} defeated {}", r.consistent, r.valid, r.defeated)
            })?;
            ensure(r.replay_match == Some(true), || format!("{tag}: replay mismatch"))?;
            ensure(r.tail_increment >= 0.0, || format!("{tag}: a = {} < 0", r.tail_increment))?;
            ensure(r.accounting_ok != Some(false), || format!("{tag}: rise accounting fails"))?;
            n += 1;
        }
    }
    Ok(format!("{n} games defeated with a >= 0 and identical replays"))
}

fn brute_force_agreement() -> Check {
    let eps = 0.05;
    let suite = common::suite();
    let mut grid_points = 0usize;
    let mut outputs = 0usize;
    for member in &suite {
        let f = &member.f;
        let (lo, hi) = (-10.0, 50.0);
        let set = stationary_set_exact(f, eps, (lo, hi)).map_err(|e| e.to_string())?;
        let step = eps / 100.0;
        let n = ((hi - lo) / step) as usize;
        for i in 1..n {
            let x = lo + i as f64 * step;
            let near_edge = set
                .iter()
                .any(|iv| (x - iv.lo).abs() < 1e-9 || (x - iv.hi).abs() < 1e-9);
            if near_edge {
                continue;
            }
            let inside = set.iter().any(|iv| iv.contains(x));
            let brute = f.derivative(x).map_err(|e| e.to_string())?.abs() < eps;
            ensure(inside == brute, || {
                format!("{}: x = {x} set says {inside}, grid says {brute}", member.name)
            })?;
            grid_points += 1;
        }
        let cfg = SolverConfig::new(eps).with_seed(5);
        let mut outs = vec![
            gd(&mut OracleHandle::first_order(f), 0.0, &cfg),
            random_search(&mut OracleHandle::first_order(f), &cfg),
        ];
        outs.push(zeroth_order(&mut OracleHandle::zeroth_first(f).map_err(|e| e.to_string())?, eps));
        for out in outs {
            let out = out.map_err(|e| e.to_string())?;
            if out.status != SolverStatus::Stationary {
                continue;
            }
            let x = out.point.unwrap();
            let set = stationary_set_exact(f, eps, (x.min(lo) - 1.0, x.max(hi) + 1.0))
                .map_err(|e| e.to_string())?;
            ensure(set.iter().any(|iv| iv.contains(x)), || {
                format!("{}: solver output {x} outside the stationary set", member.name)
            })?;
            outputs += 1;
        }
    }
    Ok(format!(
        "{} instances, {grid_points} grid points agree, {outputs} solver outputs inside",
        suite.len()
    ))
}

fn rescaling_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let eps = 0.01;
    for trial in 0..10u64 {
        let f = common::random_raw(100 + trial);
        let r = verify_instance(&f);
        let beta = r.beta_exact * rng.gen_range(1.0..10.0);
        let delta = r.gap_exact * rng.gen_range(1.0..10.0);
        let g = rescale_instance(&f, beta, delta).map_err(|e| e.to_string())?;
        let scale = Rescaling::new(beta, delta).map_err(|e| e.to_string())?;
        let eps_g = scale.epsilon(eps);
        let rg = verify_instance(&g);
        ensure(rg.beta_exact <= 1.0 + 1e-9 && rg.gap_exact <= 1.0 + 1e-9, || {
            format!("trial {trial}: rescaled beta {} gap {}", rg.beta_exact, rg.gap_exact)
        })?;
        let s = scale.x_scale();
        for i in 0..2000 {
            let y = -12.0 / s + i as f64 * (24.0 / s) / 2000.0;
            let (gv, gs) = g.eval(y).map_err(|e| e.to_string())?;
            let (fv, fd) = f.eval(s * y).map_err(|e| e.to_string())?;
            ensure((gv * delta - fv).abs() <= 1e-9 * fv.abs().max(1.0), || {
                format!("trial {trial}: value mismatch at y = {y}")
            })?;
            ensure((scale.slope_to_original(gs) - fd).abs() <= 1e-9 * fd.abs().max(1.0), || {
                format!("trial {trial}: slope mismatch at y = {y}")
            })?;
            let margin = (fd.abs() - eps).abs();
            if margin > 1e-9 {
                ensure((gs.abs() < eps_g) == (fd.abs() < eps), || {
                    format!("trial {trial}: stationarity differs at y = {y}")
                })?;
            }
        }
        let shifted = 1.0 - g.value(0.0).map_err(|e| e.to_string())?;
        let mut h = OracleHandle::zeroth_first(stationary_lab::oracle::ClosedForm(|x: f64| {
            let (v, d) = g.eval(x).unwrap();
            (v + shifted, d)
        }))
        .map_err(|e| e.to_string())?;
        let out = zeroth_order(&mut h, eps_g).map_err(|e| e.to_string())?;
        ensure(out.status == SolverStatus::Stationary, || format!("trial {trial}: {out:?}"))?;
        let x = map_stationary_point(out.point.unwrap(), beta, delta).map_err(|e| e.to_string())?;
        let d = f.derivative(x).map_err(|e| e.to_string())?.abs();
        ensure(d < eps + 1e-9, || format!("trial {trial}: |f'({x})| = {d}"))?;
    }
    Ok("10 (beta, delta) pairs round-trip".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("construction audit", 1, construction_audit),
        ("gradient descent bound", 5, gd_bound),
        ("complexity slopes", 60, complexity_slopes),
        ("random search success rate", 30, random_search_success),
        ("zeroth-order logarithmic cost", 10, zeroth_order_cost),
        ("adversary defeat at threshold", 10, adversary_defeat),
        ("stationary set vs dense grid", 10, brute_force_agreement),
        ("rescaling round trip", 10, rescaling_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit}s limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({detail}) [{:.2}s / {limit}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
