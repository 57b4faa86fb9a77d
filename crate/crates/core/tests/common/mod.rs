// Shared test-side oracles. Everything here is computed independently of
// the solver's own grid scan and refinement.
#![allow(dead_code)]

/// Dense-grid argmin of `p` over `[lo, hi]`, then golden-section refinement
/// within one cell on each side.
pub fn argmin_1d(p: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (lo, p(lo));
    for i in 1..points {
        let y = if i == points - 1 { hi } else { lo + i as f64 * step };
        let v = p(y);
        if v < best.1 {
            best = (y, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if p(c) < p(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    let m = 0.5 * (a + b);
    if p(m) <= best.1 {
        (m, p(m))
    } else {
        best
    }
}

/// Plain dense-grid argmin of `p` (no refinement); returns the grid spacing too.
pub fn grid_argmin_1d(p: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64, f64) {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (lo, p(lo));
    for i in 1..points {
        let y = lo + i as f64 * step;
        let v = p(y);
        if v < best.1 {
            best = (y, v);
        }
    }
    (best.0, best.1, step)
}

/// Roots of `g` on `[lo, hi]` located by sign changes on a grid and bisection.
pub fn roots_1d(g: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    let mut roots = Vec::new();
    for i in 0..points - 1 {
        let (mut a, mut b) = (lo + i as f64 * step, lo + (i + 1) as f64 * step);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb < 0.0 {
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if g(m) * g(a) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

/// Asymmetric weighted ℓ1 written out directly.
pub fn asym_l1(hp: &[f64], hm: &[f64], x: &[f64], y: &[f64]) -> f64 {
    (0..x.len())
        .map(|j| {
            let d = y[j] - x[j];
            if d > 0.0 {
                hp[j] * d
            } else {
                -hm[j] * d
            }
        })
        .sum()
}
