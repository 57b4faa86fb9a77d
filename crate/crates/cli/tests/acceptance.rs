//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use quasiprox::objectives::{
    critical_residual, kl_empirical_check, DomainBox, DoubleWell, KlDescriptor, KlStatus, Quadratic,
};
use quasiprox::prox_solver::{exact_prox_step, Model, SolverConfig, Termination, Trace};
use quasiprox::quasi_metric::{
    equivalence_bounds, subgradient_second, verify_axioms, AsymmetricWeightedL1, QuasiDistance,
};
use quasiprox::resistance::{curvature_rate, PowerResistance};
use quasiprox::sampling::UniformBox;
use quasiprox::traps::TrapKind;
use quasiprox::Point;
use quasiprox_cli::{execute, parse_config, run_scenario, run_sweep, RateStatus, Scenario, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn load(name: &str) -> ScenarioConfig {
    parse_config(&fs::read_to_string(scenario_path(name)).unwrap()).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.1..5.0)).collect()
}

fn c1_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut asymmetric = false;
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        let q = AsymmetricWeightedL1::new(random_weights(&mut rng, n), random_weights(&mut rng, n)).unwrap();
        let mut sampler = UniformBox::cube(n, 3.0, n as u64).unwrap();
        let report = verify_axioms(&q, || sampler.triple(), 10_000).map_err(|e| e.to_string())?;
        ensure(report.passes(), || format!("n = {n}: {report:?}"))?;
        worst = worst.max(report.max_triangle_violation);
        // Independent recheck on fresh points.
        for _ in 0..10_000 {
            let (x, y, z) = sampler.triple();
            ensure(q.value(&x, &x) == 0.0, || format!("q(x,x) != 0 at {x}"))?;
            ensure(q.value(&x, &z) <= q.value(&x, &y) + q.value(&y, &z) + 1e-12, || "triangle".into())?;
            asymmetric |= q.value(&x, &y) != q.value(&y, &x);
        }
    }
    ensure(asymmetric, || "no asymmetric pair".into())?;
    Ok(format!("n = 1..5, 2x10^4 triples each, max triangle excess {worst:e}"))
}

fn c2_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for n in 1..=5 {
        let (hp, hm) = (random_weights(&mut rng, n), random_weights(&mut rng, n));
        let q = AsymmetricWeightedL1::new(hp.clone(), hm.clone()).unwrap();
        let b = equivalence_bounds(&q);
        let lo = hp.iter().chain(&hm).copied().fold(f64::INFINITY, f64::min);
        let hi = hp.iter().chain(&hm).copied().fold(0.0, f64::max);
        ensure(b.beta1 == lo && (b.beta2 - (n as f64).sqrt() * hi).abs() < 1e-12, || format!("{b:?}"))?;
        let mut s = UniformBox::cube(n, 3.0, 20 + n as u64).unwrap();
        for _ in 0..10_000 {
            let (x, y) = (s.sample(), s.sample());
            let d = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let v = q.value(&x, &y);
            let tol = 1e-12 * (1.0 + v);
            if b.beta1 * d > v + tol || v > b.beta2 * d + tol {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("n = 1..5, 10^4 pairs each, 0 violations".into())
}

fn c3_curvature() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [1.5, 2.0, 3.0] {
        let g = PowerResistance::new(alpha).unwrap();
        for r in [0.25f64, 0.5, 0.9] {
            let target = alpha * r.powf(1.0 - alpha);
            for k in -60..=60 {
                let q = 10f64.powf(k as f64 / 10.0);
                let rate = curvature_rate(&g, q, r).map_err(|e| e.to_string())?;
                let rel = (rate - target).abs() / target;
                worst = worst.max(rel);
                ensure(rel <= 1e-12, || format!("alpha {alpha}, r {r}, q {q}: {rate} vs {target}"))?;
            }
        }
    }
    Ok(format!("9 (alpha, r) pairs over q in [1e-6, 1e6], max relative error {worst:e}"))
}

fn c4_closed_form() -> Outcome {
    let outcome = execute(&Scenario::build(&load("quadratic_exact.toml")).unwrap()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (k, (x, _)) in outcome.trace.iterates().enumerate().take(21) {
        let err = (x[0] - 0.5f64.powi(k as i32)).abs();
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("x_{k} = {}", x[0]))?;
    }
    let target = 0.25f64.ln();
    match outcome.rate.status {
        RateStatus::Empirical { slope, .. } => {
            ensure((slope - target).abs() <= 0.02 * target.abs(), || format!("slope {slope}"))?;
            Ok(format!("max |x_k - 2^-k| {worst:e} for k <= 20, tail slope {slope:.6} vs {target:.6}"))
        }
        other => Err(format!("rate status {other:?}")),
    }
}

fn c5_oracle() -> Outcome {
    let f = DoubleWell::new(DomainBox::cube(1, 2.0).unwrap());
    let q = AsymmetricWeightedL1::new(vec![2.0], vec![1.0]).unwrap();
    let g = PowerResistance::new(2.0).unwrap();
    let model = Model::new(&f, &q, &g).unwrap();
    let cfg = SolverConfig::default();
    let lambda = 0.3;
    let points = 100_000;
    let cell = 4.0 / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| -2.0 + i as f64 * cell).collect();
    let mut steps = 0;
    let mut worst: f64 = 0.0;
    for start in [-1.5, -0.2, 0.2, 0.7, 1.8] {
        let mut x = start;
        for _ in 0..50 {
            let p = |y: f64| {
                let d = y - x;
                let qv = if d > 0.0 { 2.0 * d } else { -d };
                (y * y - 1.0).powi(2) + lambda * qv * qv
            };
            let mut best = (grid[0], p(grid[0]));
            for &y in &grid[1..] {
                let v = p(y);
                if v < best.1 {
                    best = (y, v);
                }
            }
            let r = exact_prox_step(&model, lambda, &[x], &cfg).map_err(|e| e.to_string())?;
            let diff = (r.x_next[0] - best.0).abs();
            worst = worst.max(diff);
            ensure(diff <= cell, || format!("start {start}, x {x}: {} vs grid {}", r.x_next[0], best.0))?;
            x = r.x_next[0];
            steps += 1;
        }
    }
    Ok(format!("{steps} exact steps, max distance to grid argmin {worst:e} (cell {cell:e})"))
}

const CERT_SCENARIOS: [&str; 5] = ["quadratic.toml", "abs.toml", "double_well.toml", "l1_quadratic.toml", "entrepreneur.toml"];

/// Recomputes every per-step check of a trace from the model itself.
fn recheck_steps(trace: &Trace, model: &Model<'_>, sigma: f64, b: f64) -> Result<usize, String> {
    for (k, r) in trace.records.iter().enumerate() {
        let fk = model.f.value(&r.x_k);
        let fn_ = model.f.value(&r.x_next);
        let qv = model.q.value(&r.x_k, &r.x_next);
        let tol = 1e-12 * (1.0 + fk.abs());
        if qv == 0.0 {
            let w = critical_residual(model.f, &r.x_next).map_err(|e| e.to_string())?;
            ensure(w <= trace.residual_tol, || format!("step {k}: stay with residual {w}"))?;
            continue;
        }
        let descent = fk - fn_ - r.lambda * (1.0 - sigma) * model.gamma.value(qv);
        ensure(descent >= -tol, || format!("step {k}: descent short by {descent:e}"))?;
        let w = critical_residual(model.f, &r.x_next).map_err(|e| e.to_string())?;
        let v = subgradient_second(model.q, &r.x_k, &r.x_next).map_err(|e| e.to_string())?.norm();
        ensure(w <= b * model.gamma.first(qv) * v + tol, || format!("step {k}: |w| {w:e} > b G'[q] |v|"))?;
    }
    Ok(trace.records.len())
}

/// Grid minimum of the proximal payoff from `anchor`, for the global test.
fn grid_payoff_min(model: &Model<'_>, lambda: f64, anchor: &[f64], per_axis: usize) -> f64 {
    let mut best = f64::INFINITY;
    model.f.domain().for_each_grid_point(per_axis, |y| {
        best = best.min(model.payoff(lambda, anchor, y));
    });
    best.min(model.payoff(lambda, anchor, anchor))
}

fn c6_algorithms(regime: &str) -> Outcome {
    let mut checked = 0;
    for name in CERT_SCENARIOS {
        let mut config = load(name);
        config.regime = regime.into();
        let scenario = Scenario::build(&config).unwrap();
        let outcome = execute(&scenario).map_err(|e| format!("{name}: {e}"))?;
        let trace = &outcome.trace;
        ensure(!matches!(trace.status, Termination::StepFailure(_)), || format!("{name}: {}", trace.status))?;
        let model = Model::new(scenario.objective.as_ref(), scenario.quasi.as_ref(), &scenario.gamma).unwrap();
        let (sigma, b) = (scenario.solver.sigma, scenario.solver.b);
        checked += recheck_steps(trace, &model, sigma, b).map_err(|e| format!("{name}: {e}"))?;
        ensure(trace.algorithm1_violations().is_empty(), || format!("{name}: algorithm 1 recheck failed"))?;
        if regime == "algorithm2" {
            let per_axis = if model.dim() == 1 { 20_001 } else { 201 };
            for (k, r) in trace.records.iter().enumerate().filter(|(k, _)| *k < 40) {
                let pmin = grid_payoff_min(&model, r.lambda, &r.x_k, per_axis);
                let qv = model.q.value(&r.x_k, &r.x_next);
                let tol = 1e-12 * (1.0 + r.f_k.abs());
                let excess = model.payoff(r.lambda, &r.x_k, &r.x_next) - pmin - r.lambda * sigma * model.gamma.value(qv);
                ensure(excess <= tol, || format!("{name} step {k}: global condition off by {excess:e}"))?;
            }
        }
    }
    Ok(format!("{checked} accepted steps over 5 scenarios rechecked"))
}

fn c7_traps() -> Outcome {
    let mut lines = Vec::new();
    for name in CERT_SCENARIOS {
        let scenario = Scenario::build(&load(name)).unwrap();
        let o = execute(&scenario).map_err(|e| format!("{name}: {e}"))?;
        let t = &o.trace;
        let last = t.records.last().map_or(0.0, |r| r.q_step);
        ensure(t.status == Termination::Converged, || format!("{name}: {}", t.status))?;
        ensure(t.iterations() <= 10_000, || format!("{name}: {} iterations", t.iterations()))?;
        ensure(last <= 1e-6 && t.final_residual <= 1e-6, || format!("{name}: q {last:e}, residual {:e}", t.final_residual))?;
        ensure((o.lambda_star - 1.1 * t.lambda_infinity()).abs() <= 1e-12 * o.lambda_star, || "lambda*".into())?;
        let c = &o.report.certificate;
        ensure(c.kind == TrapKind::Strong && c.worst_violation < 0.0 && c.samples >= 10_000, || {
            format!("{name}: {} with {} samples, worst {:e}", c.kind.as_str(), c.samples, c.worst_violation)
        })?;
        ensure(o.report.path_ok, || format!("{name}: path has unworthwhile steps"))?;
        lines.push(format!("{} {} its", name.trim_end_matches(".toml"), t.iterations()));
    }
    Ok(format!("strong traps at 1.1 lambda_inf: {}", lines.join(", ")))
}

fn c8_telescoping() -> Outcome {
    let mut names: Vec<String> = CERT_SCENARIOS.iter().map(|s| s.to_string()).collect();
    names.push("quadratic_exact.toml".into());
    names.push("double_well_random.toml".into());
    let mut count = 0;
    for name in &names {
        for regime in ["exact", "algorithm1", "algorithm2"] {
            let mut config = load(name);
            config.regime = regime.into();
            let scenario = Scenario::build(&config).unwrap();
            let o = execute(&scenario).map_err(|e| e.to_string())?;
            let t = &o.trace;
            if t.status != Termination::Converged {
                continue;
            }
            let model = Model::new(scenario.objective.as_ref(), scenario.quasi.as_ref(), &scenario.gamma).unwrap();
            let sum: f64 = t.records.iter().map(|r| model.gamma.value(model.q.value(&r.x_k, &r.x_next))).sum();
            let sigma = if regime == "exact" { 0.0 } else { scenario.solver.sigma };
            let f0 = model.f.value(&scenario.x0);
            let bound = (f0 - model.f.value(&t.final_point)) / (scenario.solver.lambda_lo * (1.0 - sigma));
            ensure(sum <= bound + 1e-9, || format!("{name} {regime}: {sum} > {bound}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} converged traces satisfy the bound"))
}

fn c9_kl() -> Outcome {
    let f = Quadratic::unit(DomainBox::cube(1, 2.0).unwrap());
    let desc = KlDescriptor::new(0.5, 1.0, 4.0, Point::from(vec![0.0])).unwrap();
    let mut s = UniformBox::cube(1, 2.0, 9).unwrap();
    let drawn: Vec<Point> = (0..10_000).map(|_| s.sample()).collect();
    let mut it = drawn.iter().cloned();
    let report = kl_empirical_check(&f, &desc, || it.next().unwrap(), drawn.len()).map_err(|e| e.to_string())?;
    ensure(report.status == KlStatus::Pass, || format!("{report:?}"))?;
    // φ'(s) = 1/(2√s) and |f'(x)| = 2|x| computed here directly.
    let mut worst: f64 = 0.0;
    for x in drawn.iter().map(|p| p[0]).filter(|x| *x != 0.0) {
        worst = worst.max((1.0 / (2.0 * (x * x).sqrt()) * 2.0 * x.abs() - 1.0).abs());
    }
    worst = worst.max((report.min_statistic - 1.0).abs()).max((report.max_statistic - 1.0).abs());
    ensure(worst <= 1e-9 && report.valid_samples >= 9_990, || format!("deviation {worst:e}"))?;
    Ok(format!("{} band samples, max |stat - 1| {worst:e}", report.valid_samples))
}

fn dir_bytes(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn c10_determinism() -> Outcome {
    let mut files = 0;
    let mut names: Vec<PathBuf> = fs::read_dir(scenario_path("")).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in &names {
        let config = parse_config(&fs::read_to_string(path).unwrap()).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_scenario(&config, a.path()).map_err(|e| e.to_string())?;
        run_scenario(&config, b.path()).map_err(|e| e.to_string())?;
        let (x, y) = (dir_bytes(a.path()), dir_bytes(b.path()));
        ensure(x == y, || format!("{} differs", path.display()))?;
        files += x.len();
    }
    let config = load("double_well.toml");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_sweep(&config, a.path(), 1).map_err(|e| e.to_string())?;
    run_sweep(&config, b.path(), 4).map_err(|e| e.to_string())?;
    ensure(dir_bytes(a.path()) == dir_bytes(b.path()), || "sweep differs across worker counts".into())?;
    Ok(format!("{} scenarios, {files} artifacts byte-identical; sweep identical with 1 and 4 workers", names.len()))
}

fn main() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("quasi-metric axioms", Some(Duration::from_secs(1)), c1_axioms),
        ("norm sandwich", Some(Duration::from_secs(1)), c2_sandwich),
        ("curvature identity", Some(Duration::from_secs(1)), c3_curvature),
        ("exact prox closed form", Some(Duration::from_secs(1)), c4_closed_form),
        ("grid oracle equivalence", Some(Duration::from_secs(30)), c5_oracle),
        ("algorithm 1 step certification", Some(Duration::from_secs(30)), || c6_algorithms("algorithm1")),
        ("algorithm 2 step certification", Some(Duration::from_secs(30)), || c6_algorithms("algorithm2")),
        ("convergence and strong traps", Some(Duration::from_secs(120)), c7_traps),
        ("descent telescoping", None, c8_telescoping),
        ("KL identity", Some(Duration::from_secs(1)), c9_kl),
        ("determinism", None, c10_determinism),
    ];
    let numbers = ["1", "2", "3", "4", "5", "6a", "6b", "7", "8", "9", "10"];
    let mut failed = 0;
    for ((name, limit, check), number) in criteria.into_iter().zip(numbers) {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        if result.is_err() {
            failed += 1;
        }
        println!("criterion {number:>3} {tag} [{:7.3} s] {name}: {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
