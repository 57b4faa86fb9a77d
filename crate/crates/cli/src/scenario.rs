//! Turns a [`ScenarioConfig`] into solver-ready objects.

use quasiprox::objectives::{
    build_entrepreneur, AbsValue, DomainBox, DoubleWell, EntrepreneurScenario, KlDescriptor,
    L1Quadratic, Objective, Quadratic,
};
use quasiprox::prox_solver::{EpsilonSchedule, InnerSettings, LambdaSchedule, Regime, SolverConfig};
use quasiprox::quasi_metric::{AsymmetricWeightedL1, QuasiDistance, ScaledEuclidean};
use quasiprox::resistance::{validate_hypotheses, PowerResistance};
use quasiprox::traps::TrapSampling;
use quasiprox::Point;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ScenarioConfig, SemanticError, DEFAULT_MAX_RUNS};

pub const OBJECTIVE_KINDS: [&str; 5] = ["quadratic", "abs", "double_well", "l1_quadratic", "entrepreneur"];
pub const QUASI_KINDS: [&str; 2] = ["euclidean", "asym_l1"];
pub const LAMBDA_SCHEDULES: [&str; 3] = ["constant", "periodic", "random"];
pub const EPSILON_SCHEDULES: [&str; 4] = ["zero", "constant", "geometric", "summable"];

/// Default λ* multiplier applied to λ_∞.
pub const DEFAULT_LAMBDA_FACTOR: f64 = 1.1;
pub const DEFAULT_Q_BAR: f64 = 1.0;
pub const DEFAULT_CURVATURE_R: f64 = 0.5;

/// Trap certification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapPlan {
    pub sampling: TrapSampling,
    pub lambda_factor: f64,
    pub lambda_star: Option<f64>,
}

impl TrapPlan {
    /// λ* for a run whose tail mean of λ_k is `lambda_infinity`.
    pub fn lambda_star(&self, lambda_infinity: f64) -> f64 {
        self.lambda_star.unwrap_or(self.lambda_factor * lambda_infinity)
    }
}

/// Validated, constructed scenario.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub regime: Regime,
    pub objective: Box<dyn Objective>,
    pub quasi: Box<dyn QuasiDistance>,
    pub gamma: PowerResistance,
    pub solver: SolverConfig,
    pub x0: Vec<f64>,
    pub trap: TrapPlan,
    pub kl: Option<KlDescriptor>,
    /// Curvature bound `ρ̄_Γ(r)` over `(0, q̄]`.
    pub rho_bar: f64,
}

/// Seeds for the random λ schedule and the trap sampler, both derived from
/// the scenario seed.
pub fn derived_seeds(seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (rng.next_u64(), rng.next_u64())
}

#[derive(Default)]
struct Errors(Vec<SemanticError>);

impl Errors {
    fn push(&mut self, path: &str, message: impl ToString) {
        self.0.push(SemanticError {
            path: path.to_owned(),
            message: message.to_string(),
        });
    }

    fn check_len(&mut self, path: &str, v: &[f64], n: usize) -> bool {
        if v.len() != n {
            self.push(path, format!("expected {n} entries to match the objective box, found {}", v.len()));
            return false;
        }
        true
    }

    fn check_finite(&mut self, path: &str, v: &[f64]) -> bool {
        if v.iter().any(|x| !x.is_finite()) {
            self.push(path, "entries must be finite");
            return false;
        }
        true
    }
}

fn one_of(kind: &str, allowed: &[&str]) -> bool {
    allowed.contains(&kind)
}

fn allowed(kinds: &[&str]) -> String {
    kinds.join(", ")
}

impl Scenario {
    /// Validates `config` and builds every ingredient, collecting all problems.
    pub fn build(config: &ScenarioConfig) -> Result<Scenario, ConfigError> {
        let mut errs = Errors::default();
        if config.seed > i64::MAX as u64 {
            errs.push("seed", "seed must fit in a signed 64-bit integer");
        }
        let regime = config.regime.parse::<Regime>().map_err(|e| errs.push("regime", strip(&e))).ok();

        let obj = &config.objective;
        let n = obj.lower.len();
        let domain = match DomainBox::new(obj.lower.clone(), obj.upper.clone()) {
            Ok(d) => Some(d),
            Err(e) => {
                errs.push("objective.lower", strip(&e));
                None
            }
        };
        if errs.check_len("x0", &config.x0, n) && errs.check_finite("x0", &config.x0) {
            if let Some(d) = &domain {
                if !d.contains(&config.x0) {
                    errs.push("x0", "starting point lies outside the objective box");
                }
            }
        }

        let quasi = build_quasi(config, n, &mut errs);
        let objective = domain.as_ref().and_then(|d| build_objective(config, d.clone(), &mut errs));
        if !one_of(&obj.kind, &OBJECTIVE_KINDS) {
            errs.push(
                "objective.kind",
                format!("unknown kind {:?}; expected one of {}", obj.kind, allowed(&OBJECTIVE_KINDS)),
            );
        }

        if config.gamma.kind != "power" {
            errs.push("gamma.kind", format!("unknown kind {:?}; expected power", config.gamma.kind));
        }
        let gamma = PowerResistance::new(config.gamma.alpha).map_err(|e| errs.push("gamma.alpha", strip(&e))).ok();
        let q_bar = config.gamma.q_bar.unwrap_or(DEFAULT_Q_BAR);
        let r = config.gamma.r.unwrap_or(DEFAULT_CURVATURE_R);
        let mut rho_bar = f64::NAN;
        if !(q_bar > 0.0 && q_bar.is_finite()) {
            errs.push("gamma.q_bar", format!("q_bar must be positive and finite (got {q_bar})"));
        } else if !(r > 0.0 && r < 1.0) {
            errs.push("gamma.r", format!("r must lie in (0, 1) (got {r})"));
        } else if let Some(g) = &gamma {
            let report = validate_hypotheses(g, q_bar, r);
            for v in &report.violations {
                errs.push("gamma", v);
            }
            rho_bar = report.rho_bar;
        }

        let (lambda_seed, trap_seed) = derived_seeds(config.seed);
        let solver = build_solver(config, lambda_seed, &mut errs);
        let trap = build_trap(config, trap_seed, &mut errs);

        let kl = config.kl.as_ref().and_then(|k| {
            if !errs.check_len("kl.reference", &k.reference, n) || !errs.check_finite("kl.reference", &k.reference) {
                return None;
            }
            let eta = k.eta.unwrap_or(f64::INFINITY);
            KlDescriptor::new(k.theta, k.c, eta, Point::from(k.reference.clone()))
                .map_err(|e| errs.push("kl", strip(&e)))
                .ok()
        });

        if let Some(s) = &config.sweep {
            for a in s.alpha.iter().flatten() {
                if let Err(e) = PowerResistance::new(*a) {
                    errs.push("sweep.alpha", strip(&e));
                }
            }
            for v in s.sigma.iter().flatten() {
                if !(*v >= 0.0 && *v < 1.0) {
                    errs.push("sweep.sigma", format!("sigma must lie in [0, 1) (got {v})"));
                }
            }
            for v in s.lambda.iter().flatten() {
                if !(*v > 0.0 && v.is_finite()) {
                    errs.push("sweep.lambda", format!("lambda must be positive and finite (got {v})"));
                }
            }
            for (i, x) in s.x0.iter().flatten().enumerate() {
                let path = format!("sweep.x0[{i}]");
                if errs.check_len(&path, x, n) && errs.check_finite(&path, x) {
                    if let Some(d) = &domain {
                        if !d.contains(x) {
                            errs.push(&path, "starting point lies outside the objective box");
                        }
                    }
                }
            }
            let cap = s.max_runs.unwrap_or(DEFAULT_MAX_RUNS);
            if s.size() == 0 {
                errs.push("sweep", "every sweep axis needs at least one value");
            } else if s.size() > cap {
                errs.push("sweep", format!("{} runs exceed the cap of {cap} (sweep.max_runs)", s.size()));
            }
        }

        match (errs.0.is_empty(), regime, objective, quasi, gamma, solver, trap) {
            (true, Some(regime), Some(objective), Some(quasi), Some(gamma), Some(solver), Some(trap)) => {
                Ok(Scenario {
                    config: config.clone(),
                    regime,
                    objective,
                    quasi,
                    gamma,
                    solver,
                    x0: config.x0.clone(),
                    trap,
                    kl,
                    rho_bar,
                })
            }
            _ => Err(ConfigError::Semantic(errs.0)),
        }
    }
}

/// Core error text without its category prefix.
fn strip(e: &quasiprox::Error) -> String {
    match e {
        quasiprox::Error::InvalidInput(m) | quasiprox::Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

fn build_quasi(config: &ScenarioConfig, n: usize, errs: &mut Errors) -> Option<Box<dyn QuasiDistance>> {
    let q = &config.quasi;
    match q.kind.as_str() {
        "euclidean" => {
            if q.h_plus.is_some() || q.h_minus.is_some() {
                errs.push("quasi", "h_plus and h_minus apply only to kind asym_l1");
            }
            ScaledEuclidean::new(q.scale.unwrap_or(1.0))
                .map(|d| Box::new(d) as Box<dyn QuasiDistance>)
                .map_err(|e| errs.push("quasi.scale", strip(&e)))
                .ok()
        }
        "asym_l1" => {
            if q.scale.is_some() {
                errs.push("quasi.scale", "scale applies only to kind euclidean");
            }
            let (Some(hp), Some(hm)) = (&q.h_plus, &q.h_minus) else {
                errs.push("quasi", "asym_l1 needs both h_plus and h_minus");
                return None;
            };
            let ok = errs.check_len("quasi.h_plus", hp, n) & errs.check_len("quasi.h_minus", hm, n);
            if !ok {
                return None;
            }
            AsymmetricWeightedL1::new(hp.clone(), hm.clone())
                .map(|d| Box::new(d) as Box<dyn QuasiDistance>)
                .map_err(|e| errs.push("quasi", strip(&e)))
                .ok()
        }
        other => {
            errs.push(
                "quasi.kind",
                format!("unknown kind {other:?}; expected one of {}", allowed(&QUASI_KINDS)),
            );
            None
        }
    }
}

fn build_objective(config: &ScenarioConfig, domain: DomainBox, errs: &mut Errors) -> Option<Box<dyn Objective>> {
    let o = &config.objective;
    let n = domain.dim();
    let used: &[&str] = match o.kind.as_str() {
        "quadratic" | "abs" => &["weights", "center"],
        "double_well" => &[],
        "l1_quadratic" => &["weights", "center", "mu"],
        "entrepreneur" => &["price", "wages", "quantity_exponent", "grid"],
        _ => return None,
    };
    let present = [
        ("weights", o.weights.is_some()),
        ("center", o.center.is_some()),
        ("mu", o.mu.is_some()),
        ("price", o.price.is_some()),
        ("wages", o.wages.is_some()),
        ("quantity_exponent", o.quantity_exponent.is_some()),
        ("grid", o.grid.is_some()),
    ];
    for (key, is_set) in present {
        if is_set && !used.contains(&key) {
            errs.push(&format!("objective.{key}"), format!("not used by kind {}", o.kind));
        }
    }

    let vector = |errs: &mut Errors, key: &str, v: &Option<Vec<f64>>, default: f64| -> Option<Vec<f64>> {
        match v {
            None => Some(vec![default; n]),
            Some(v) => {
                let path = format!("objective.{key}");
                (errs.check_len(&path, v, n) && errs.check_finite(&path, v)).then(|| v.clone())
            }
        }
    };
    let boxed = |r: quasiprox::Result<Box<dyn Objective>>, errs: &mut Errors| {
        r.map_err(|e| errs.push("objective", strip(&e))).ok()
    };

    match o.kind.as_str() {
        "quadratic" | "abs" | "l1_quadratic" => {
            let weights = vector(errs, "weights", &o.weights, 1.0)?;
            let center = vector(errs, "center", &o.center, 0.0)?;
            let built: quasiprox::Result<Box<dyn Objective>> = match o.kind.as_str() {
                "quadratic" => Quadratic::new(weights, center, domain).map(|f| Box::new(f) as _),
                "abs" => AbsValue::new(weights, center, domain).map(|f| Box::new(f) as _),
                _ => L1Quadratic::new(weights, center, o.mu.unwrap_or(1.0), domain).map(|f| Box::new(f) as _),
            };
            boxed(built, errs)
        }
        "double_well" => Some(Box::new(DoubleWell::new(domain))),
        "entrepreneur" => {
            let q = &config.quasi;
            if q.kind != "asym_l1" {
                errs.push(
                    "quasi.kind",
                    "the entrepreneur objective needs kind asym_l1 (hiring and firing costs)",
                );
                return None;
            }
            // Missing weights are reported by the quasi-distance builder.
            let (Some(hp), Some(hm)) = (&q.h_plus, &q.h_minus) else {
                return None;
            };
            let wages = vector(errs, "wages", &o.wages, 1.0)?;
            let scenario = EntrepreneurScenario {
                h_plus: hp.clone(),
                h_minus: hm.clone(),
                wages,
                price: o.price.unwrap_or(1.0),
                quantity_exponent: o.quantity_exponent.unwrap_or(1.0),
                lower: o.lower.clone(),
                upper: o.upper.clone(),
                grid: o.grid,
            };
            boxed(build_entrepreneur(&scenario).map(|f| Box::new(f) as _), errs)
        }
        _ => None,
    }
}

fn build_solver(config: &ScenarioConfig, lambda_seed: u64, errs: &mut Errors) -> Option<SolverConfig> {
    let s = &config.solver;
    let defaults = SolverConfig::default();
    let schedule_name = s.lambda_schedule.as_deref().unwrap_or(if s.lambda_values.is_some() {
        "periodic"
    } else {
        "constant"
    });
    let (lo_default, hi_default) = match (s.lambda, &s.lambda_values) {
        (Some(l), _) => (l, l),
        (None, Some(vs)) if !vs.is_empty() => (
            vs.iter().copied().fold(f64::INFINITY, f64::min),
            vs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        _ => (defaults.lambda_lo, defaults.lambda_hi),
    };
    let lambda_lo = s.lambda_lo.unwrap_or(lo_default);
    let lambda_hi = s.lambda_hi.unwrap_or(hi_default.max(lambda_lo));
    let lambda_schedule = match schedule_name {
        "constant" => {
            if s.lambda_values.is_some() {
                errs.push("solver.lambda_values", "lambda_values apply only to the periodic schedule");
            }
            LambdaSchedule::Constant(s.lambda.unwrap_or(lambda_lo))
        }
        "periodic" => match &s.lambda_values {
            Some(vs) => LambdaSchedule::Periodic(vs.clone()),
            None => {
                errs.push("solver.lambda_values", "the periodic schedule needs lambda_values");
                return None;
            }
        },
        "random" => LambdaSchedule::Random { seed: lambda_seed },
        other => {
            errs.push(
                "solver.lambda_schedule",
                format!("unknown schedule {other:?}; expected one of {}", allowed(&LAMBDA_SCHEDULES)),
            );
            return None;
        }
    };
    let eps0 = s.epsilon0.unwrap_or(0.0);
    let epsilon_schedule = match s.epsilon_schedule.as_deref().unwrap_or(if s.epsilon0.is_some() {
        "constant"
    } else {
        "zero"
    }) {
        "zero" => EpsilonSchedule::Zero,
        "constant" => EpsilonSchedule::Constant(eps0),
        "geometric" => EpsilonSchedule::Geometric {
            initial: eps0,
            ratio: s.epsilon_ratio.unwrap_or(0.5),
        },
        "summable" => EpsilonSchedule::Summable { initial: eps0 },
        other => {
            errs.push(
                "solver.epsilon_schedule",
                format!("unknown schedule {other:?}; expected one of {}", allowed(&EPSILON_SCHEDULES)),
            );
            return None;
        }
    };
    let inner_defaults = InnerSettings::default();
    let cfg = SolverConfig {
        lambda_lo,
        lambda_hi,
        lambda_schedule,
        sigma: s.sigma.unwrap_or(defaults.sigma),
        b: s.b.unwrap_or(defaults.b),
        epsilon_schedule,
        max_iters: s.max_iters.unwrap_or(defaults.max_iters),
        step_tol: s.step_tol.unwrap_or(defaults.step_tol),
        residual_tol: s.residual_tol.unwrap_or(defaults.residual_tol),
        tail_window: s.tail_window.unwrap_or(defaults.tail_window),
        inner: InnerSettings {
            grid: s.grid,
            refine_sweeps: s.refine_sweeps.unwrap_or(inner_defaults.refine_sweeps),
            retry_budget: s.retry_budget.unwrap_or(inner_defaults.retry_budget),
        },
    };
    let problems = cfg.problems();
    for p in &problems {
        errs.push("solver", p);
    }
    problems.is_empty().then_some(cfg)
}

fn build_trap(config: &ScenarioConfig, seed: u64, errs: &mut Errors) -> Option<TrapPlan> {
    let t = &config.trap;
    let defaults = TrapSampling::default();
    let mut ok = true;
    let count = t.samples.unwrap_or(defaults.count);
    if count == 0 {
        errs.push("trap.samples", "at least one sample is required");
        ok = false;
    }
    let radii = t.radii.clone().unwrap_or(defaults.radii);
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        errs.push("trap.radii", "radii must be positive and finite");
        ok = false;
    }
    let lambda_factor = t.lambda_factor.unwrap_or(DEFAULT_LAMBDA_FACTOR);
    if !(lambda_factor > 0.0 && lambda_factor.is_finite()) {
        errs.push("trap.lambda_factor", format!("lambda_factor must be positive (got {lambda_factor})"));
        ok = false;
    }
    if let Some(l) = t.lambda_star {
        if !(l > 0.0 && l.is_finite()) {
            errs.push("trap.lambda_star", format!("lambda_star must be positive (got {l})"));
            ok = false;
        }
    }
    ok.then(|| TrapPlan {
        sampling: TrapSampling { count, radii, seed },
        lambda_factor,
        lambda_star: t.lambda_star,
    })
}
