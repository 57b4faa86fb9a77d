//! Inner solver for `min_y P_λ(x_k, y)` over the domain box.
//!
//! A tensor-grid scan (which also includes the anchor `x_k`) picks the start;
//! refinement then alternates exact coordinate line searches with a pattern
//! move along each sweep's displacement. Line searches bracket a sign change
//! of the directional derivative assembled from the subgradient oracles,
//! `⟨w(y) + λΓ'[q(x_k, y)]·v(y), d⟩`, bisect it to machine resolution, and
//! snap onto known kinks of `f` and `q` when the bracket contains one.
//! Refinement never accepts a point with larger payoff than the current one.

use super::config::{default_grid, InnerSettings};
use super::Model;
use crate::error::{check_dim, Error, Result};
use crate::point::Point;

#[derive(Debug, Clone)]
pub struct SubproblemSolution {
    /// Best point found.
    pub argmin: Point,
    /// `P_λ(x_k, argmin)`.
    pub value: f64,
    /// Minimum of `P` over the grid (and the anchor).
    pub grid_min: f64,
    pub grid_argmin: Point,
    /// `grid_min − value`; nonnegative because refinement starts at the grid minimizer.
    pub certified_slack: f64,
    /// Refinement path: the grid minimizer, then the point after each sweep.
    pub path: Vec<(Point, f64)>,
}

/// Approximately minimizes `f(y) + λΓ[q(x_k, y)]` over the domain box.
pub fn prox_subproblem_min(
    model: &Model<'_>,
    lambda: f64,
    x_k: &[f64],
    settings: &InnerSettings,
) -> Result<SubproblemSolution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive (got {lambda})")));
    }
    check_dim(model.dim(), x_k.len())?;
    let domain = model.f.domain();
    let per_axis = settings.grid.unwrap_or_else(|| default_grid(model.dim()));
    if per_axis < 2 {
        return Err(Error::Config("subproblem grid needs at least 2 points per axis".into()));
    }

    let mut grid_min = model.payoff(lambda, x_k, x_k);
    let mut grid_argmin = x_k.to_vec();
    domain.for_each_grid_point(per_axis, |y| {
        let p = model.payoff(lambda, x_k, y);
        if p < grid_min {
            grid_min = p;
            grid_argmin.copy_from_slice(y);
        }
    });

    let mut refiner = Refiner::new(*model, lambda, x_k, per_axis);
    let path = refiner.refine(&grid_argmin, grid_min, settings.refine_sweeps);
    let (argmin, value) = path.last().cloned().expect("path holds the start");
    Ok(SubproblemSolution {
        argmin,
        value,
        grid_min,
        grid_argmin: Point::from(grid_argmin),
        certified_slack: grid_min - value,
        path,
    })
}

impl SubproblemSolution {
    /// Continues refinement from the current best point for `sweeps` more
    /// sweeps, extending the path.
    pub(crate) fn refine_further(
        &mut self,
        model: &Model<'_>,
        lambda: f64,
        x_k: &[f64],
        settings: &InnerSettings,
        sweeps: usize,
    ) {
        let per_axis = settings.grid.unwrap_or_else(|| default_grid(model.dim()));
        let mut refiner = Refiner::new(*model, lambda, x_k, per_axis);
        let extra = refiner.refine(&self.argmin, self.value, sweeps);
        for (p, v) in extra.into_iter().skip(1) {
            self.path.push((p, v));
        }
        let (argmin, value) = self.path.last().cloned().expect("path is nonempty");
        self.argmin = argmin;
        self.value = value;
        self.certified_slack = self.grid_min - value;
    }
}

const MAX_EXPANSIONS: usize = 64;
const MAX_BISECTIONS: usize = 200;

struct Refiner<'a> {
    model: Model<'a>,
    lambda: f64,
    anchor: &'a [f64],
    cell: Vec<f64>,
    w: Vec<f64>,
    v: Vec<f64>,
}

impl<'a> Refiner<'a> {
    fn new(model: Model<'a>, lambda: f64, anchor: &'a [f64], per_axis: usize) -> Self {
        let domain = model.f.domain();
        let n = model.dim();
        let cell = (0..n).map(|j| domain.width(j) / (per_axis - 1) as f64).collect();
        Refiner {
            model,
            lambda,
            anchor,
            cell,
            w: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    fn payoff(&self, y: &[f64]) -> f64 {
        self.model.payoff(self.lambda, self.anchor, y)
    }

    /// Directional derivative of `P` along `d` built from oracle elements.
    /// NaN off the domain.
    fn slope(&mut self, y: &[f64], d: &[f64]) -> f64 {
        if self.model.f.subgradient_into(y, &mut self.w).is_err() {
            return f64::NAN;
        }
        let q = self.model.q.value(self.anchor, y);
        let scale = self.lambda * self.model.gamma.first(q);
        self.model.q.subgradient_second_into(self.anchor, y, &mut self.v);
        (0..y.len())
            .map(|j| (self.w[j] + scale * self.v[j]) * d[j])
            .sum()
    }

    fn refine(&mut self, start: &[f64], start_value: f64, sweeps: usize) -> Vec<(Point, f64)> {
        let n = start.len();
        let mut y = start.to_vec();
        let mut value = start_value;
        let mut path = vec![(Point::from(y.clone()), value)];
        let mut dir = vec![0.0; n];
        for _ in 0..sweeps {
            let before = y.clone();
            for j in 0..n {
                dir.iter_mut().for_each(|d| *d = 0.0);
                dir[j] = 1.0;
                let mut snaps: Vec<f64> = self.model.f.coordinate_kinks(j).to_vec();
                if let Some(k) = self.model.q.coordinate_kink(self.anchor, j) {
                    snaps.push(k);
                }
                let snaps: Vec<f64> = snaps.into_iter().map(|s| s - y[j]).collect();
                self.line_search(&mut y, &mut value, &dir, self.cell[j], &snaps);
            }
            if n > 1 {
                for j in 0..n {
                    dir[j] = y[j] - before[j];
                }
                if dir.iter().any(|d| *d != 0.0) {
                    self.line_search(&mut y, &mut value, &dir, 1.0, &[]);
                }
            }
            if y == before {
                break;
            }
            path.push((Point::from(y.clone()), value));
        }
        path
    }

    /// Minimizes `P` along `base + t·dir` within the box. Updates `y` and
    /// `value` when a candidate with payoff `≤ value` is found.
    fn line_search(&mut self, y: &mut Vec<f64>, value: &mut f64, dir: &[f64], h0: f64, snaps: &[f64]) {
        let domain = self.model.f.domain();
        let base = y.clone();
        let (t_lo, t_hi) = feasible_interval(&base, dir, domain.lower(), domain.upper());
        let at = |t: f64| -> Vec<f64> {
            base.iter()
                .zip(dir)
                .enumerate()
                .map(|(j, (b, d))| if *d == 0.0 { *b } else { domain.clamp_coord(j, b + t * d) })
                .collect()
        };

        let d0 = self.slope(&base, dir);
        if !d0.is_finite() || d0 == 0.0 {
            return;
        }
        let s = -d0.signum();
        let limit = if s > 0.0 { t_hi } else { t_lo };
        if limit == 0.0 {
            return;
        }

        // Expand until the slope stops pointing downhill or the box ends.
        let mut a = 0.0;
        let mut b = 0.0;
        let mut h = h0;
        let mut bracketed = false;
        for _ in 0..MAX_EXPANSIONS {
            b = a + s * h;
            if s * (b - limit) >= 0.0 {
                b = limit;
            }
            let db = self.slope(&at(b), dir);
            if !(s * db < 0.0) {
                bracketed = true;
                break;
            }
            a = b;
            if b == limit {
                break;
            }
            h *= 2.0;
        }

        let mut candidates = vec![a];
        if bracketed {
            for _ in 0..MAX_BISECTIONS {
                let m = 0.5 * (a + b);
                let pm = at(m);
                if pm == at(a) || pm == at(b) {
                    break;
                }
                let dm = self.slope(&pm, dir);
                if s * dm < 0.0 {
                    a = m;
                } else if dm == 0.0 {
                    a = m;
                    b = m;
                    break;
                } else {
                    b = m;
                }
            }
            candidates.push(b);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let tol = 1e-14 * (1.0 + lo.abs().max(hi.abs()));
            candidates.extend(snaps.iter().copied().filter(|t| *t >= lo - tol && *t <= hi + tol));
        }

        let mut best: Option<(Vec<f64>, f64)> = None;
        for t in candidates {
            let p = at(t);
            let v = self.payoff(&p);
            // Later candidates (kinks) win ties.
            if v.is_finite() && best.as_ref().is_none_or(|(_, bv)| v <= *bv) {
                best = Some((p, v));
            }
        }
        if let Some((p, v)) = best {
            if v <= *value && p != *y {
                *y = p;
                *value = v;
            }
        }
    }
}

/// Range of `t` keeping `base + t·dir` inside the box.
fn feasible_interval(base: &[f64], dir: &[f64], lower: &[f64], upper: &[f64]) -> (f64, f64) {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for j in 0..base.len() {
        let d = dir[j];
        if d == 0.0 {
            continue;
        }
        let a = (lower[j] - base[j]) / d;
        let b = (upper[j] - base[j]) / d;
        t_lo = t_lo.max(a.min(b));
        t_hi = t_hi.min(a.max(b));
    }
    (t_lo.min(0.0), t_hi.max(0.0))
}
