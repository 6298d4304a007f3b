//! Slow, obviously-correct reference implementations used to check the
//! library. Nothing here shares code with the crate under test.
#![allow(dead_code, clippy::too_many_arguments)]

/// Least-squares non-decreasing fit by enumerating every partition of the
/// distinct sorted scores into consecutive blocks.
///
/// Returns `(distinct score, fitted value)` pairs.
pub fn isotonic_brute_force(scores: &[f64], labels: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = scores.iter().copied().zip(labels.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // (x, sum of y, count) per distinct score
    let mut groups: Vec<(f64, f64, f64)> = Vec::new();
    for (x, y) in pts {
        match groups.last_mut() {
            Some(g) if g.0 == x => {
                g.1 += y;
                g.2 += 1.0;
            }
            _ => groups.push((x, y, 1.0)),
        }
    }
    let k = groups.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0u32..(1 << (k - 1)) {
        let mut fitted = vec![0.0; k];
        let mut start = 0;
        let mut prev_mean = f64::NEG_INFINITY;
        let mut monotone = true;
        for end in 1..=k {
            let boundary = end == k || cuts & (1 << (end - 1)) != 0;
            if !boundary {
                continue;
            }
            let s: f64 = groups[start..end].iter().map(|g| g.1).sum();
            let c: f64 = groups[start..end].iter().map(|g| g.2).sum();
            let mean = s / c;
            if mean < prev_mean {
                monotone = false;
                break;
            }
            prev_mean = mean;
            for f in &mut fitted[start..end] {
                *f = mean;
            }
            start = end;
        }
        if !monotone {
            continue;
        }
        // SSE against the raw labels, grouped
        let sse: f64 = scores
            .iter()
            .zip(labels)
            .map(|(&x, &y)| {
                let i = groups.iter().position(|g| g.0 == x).unwrap();
                (y - fitted[i]).powi(2)
            })
            .sum();
        if best.as_ref().map_or(true, |b| sse < b.0 - 1e-15) {
            best = Some((sse, fitted));
        }
    }
    let fitted = best.unwrap().1;
    groups.iter().map(|g| g.0).zip(fitted).collect()
}

fn sig(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn bernoulli_nll(q: f64, y: f64) -> f64 {
    let q = q.clamp(1e-15, 1.0 - 1e-15);
    -(y * q.ln() + (1.0 - y) * (1.0 - q).ln())
}

/// Mean NLL of `sigmoid(a·p + b)`.
pub fn platt_nll(points: &[(f64, f64)], a: f64, b: f64) -> f64 {
    points
        .iter()
        .map(|&(p, y)| bernoulli_nll(sig(a * p + b), y))
        .sum::<f64>()
        / points.len() as f64
}

/// Grid search over `(a, b)` with three successively finer grids.
pub fn platt_grid_search(points: &[(f64, f64)]) -> (f64, f64) {
    let (mut a0, mut b0) = (0.0, 0.0);
    let mut half = 8.0;
    for _ in 0..3 {
        let step = half / 20.0;
        let mut best = (f64::INFINITY, a0, b0);
        for i in -20..=20 {
            for j in -20..=20 {
                let a = a0 + i as f64 * step;
                let b = b0 + j as f64 * step;
                let v = platt_nll(points, a, b);
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        a0 = best.1;
        b0 = best.2;
        half = step * 2.0;
    }
    (a0, b0)
}

/// Mean NLL of `sigmoid(z/t)`.
pub fn temperature_nll(points: &[(f64, f64)], t: f64) -> f64 {
    points
        .iter()
        .map(|&(z, y)| bernoulli_nll(sig(z / t), y))
        .sum::<f64>()
        / points.len() as f64
}

/// Dense log-spaced grid over `[0.05, 20]`, then a linear refinement.
pub fn temperature_grid_search(points: &[(f64, f64)]) -> f64 {
    let (lo, hi) = (0.05f64.ln(), 20f64.ln());
    let n = 600;
    let mut best = (f64::INFINITY, 1.0);
    for i in 0..=n {
        let t = (lo + (hi - lo) * i as f64 / n as f64).exp();
        let v = temperature_nll(points, t);
        if v < best.0 {
            best = (v, t);
        }
    }
    let centre = best.1;
    let width = centre * 0.02;
    for i in -200..=200 {
        let t = centre + width * i as f64 / 200.0;
        let v = temperature_nll(points, t);
        if v < best.0 {
            best = (v, t);
        }
    }
    best.1
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `P(F > f)` for an F(d1, d2) variable by numerical integration of the
/// unnormalised density, after substituting `x = tan²θ` to map `[0, ∞)` to
/// `[0, π/2)`. The normalising constant is integrated numerically as well.
pub fn f_survival_quadrature(f: f64, d1: f64, d2: f64) -> f64 {
    let integrand = move |theta: f64| -> f64 {
        let c = theta.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let s = theta.tan();
        let x = s * s;
        let dx = 2.0 * s / (c * c);
        if x == 0.0 {
            // the integrand behaves like 2·s^(d1-1) near zero
            return if d1 == 1.0 { 2.0 } else { 0.0 };
        }
        let log_pdf = (d1 / 2.0 - 1.0) * x.ln() - (d1 + d2) / 2.0 * (1.0 + d1 * x / d2).ln();
        log_pdf.exp() * dx
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let theta_f = f.sqrt().atan();
    let total = integrate(&integrand, 0.0, half_pi, 1e-14);
    let upper = integrate(&integrand, theta_f, half_pi, 1e-14);
    upper / total
}

/// One-way ANOVA F statistic computed from the textbook sums of squares.
pub fn anova_f(groups: &[Vec<f64>]) -> (f64, f64, f64) {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let k = groups.len() as f64;
    let grand = all.iter().sum::<f64>() / n;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let (d1, d2) = (k - 1.0, n - k);
    ((ssb / d1) / (ssw / d2), d1, d2)
}
