use crate::{sigmoid, Dataset, Error, Probability, Result};

/// `q = sigmoid(a·p + b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlattModel {
    pub a: f64,
    pub b: f64,
}

pub const PLATT_GRAD_TOL: f64 = 1e-8;
pub const PLATT_MAX_ITER: usize = 100;

impl PlattModel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("platt slope", a), ("platt intercept", b)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        Ok(PlattModel { a, b })
    }

    /// Logistic regression of labels on raw scores, solved by Newton's method
    /// from `(a, b) = (1, 0)`.
    ///
    /// Targets are Platt's smoothed labels `(N₊+1)/(N₊+2)` and `1/(N₋+2)`,
    /// which keeps the optimum finite on separable validation sets. At the
    /// validation sizes used here the smoothing moves the fit by well under
    /// the sampling error.
    pub fn fit(val: &Dataset) -> Result<Self> {
        val.require_non_empty()?;
        if !val.has_both_classes() {
            return Err(Error::DegenerateLabels);
        }
        let n_pos = val.positives() as f64;
        let n_neg = val.len() as f64 - n_pos;
        let hi = (n_pos + 1.0) / (n_pos + 2.0);
        let lo = 1.0 / (n_neg + 2.0);
        let points: alloc::vec::Vec<(f64, f64)> = val
            .samples
            .iter()
            .map(|s| {
                let t = if s.label().is_positive() { hi } else { lo };
                (s.score().get(), t)
            })
            .collect();
        newton(&points, 1.0, 0.0)
    }

    pub fn apply(&self, p: Probability) -> Probability {
        Probability::saturating(sigmoid(self.a * p.get() + self.b))
    }
}

pub fn fit_platt(val: &Dataset) -> Result<PlattModel> {
    PlattModel::fit(val)
}

pub fn apply_platt(m: &PlattModel, p: Probability) -> Probability {
    m.apply(p)
}

// softplus(f) - t f, the per-sample cross-entropy in logit form
fn loss(points: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let sum: f64 = points
        .iter()
        .map(|&(x, t)| {
            let f = a * x + b;
            let softplus = f.max(0.0) + libm::log1p(libm::exp(-libm::fabs(f)));
            softplus - t * f
        })
        .sum();
    sum / points.len() as f64
}

fn gradient_hessian(points: &[(f64, f64)], a: f64, b: f64) -> ([f64; 2], [f64; 3]) {
    let mut g = [0.0; 2];
    let mut h = [0.0; 3]; // haa, hab, hbb
    for &(x, t) in points {
        let q = sigmoid(a * x + b);
        let r = q - t;
        let w = q * (1.0 - q);
        g[0] += r * x;
        g[1] += r;
        h[0] += w * x * x;
        h[1] += w * x;
        h[2] += w;
    }
    let n = points.len() as f64;
    (g.map(|v| v / n), h.map(|v| v / n))
}

fn newton(points: &[(f64, f64)], a0: f64, b0: f64) -> Result<PlattModel> {
    let (mut a, mut b) = (a0, b0);
    let mut current = loss(points, a, b);
    let mut grad_norm = f64::INFINITY;
    for _ in 0..PLATT_MAX_ITER {
        let (g, h) = gradient_hessian(points, a, b);
        grad_norm = libm::fabs(g[0]).max(libm::fabs(g[1]));
        if grad_norm < PLATT_GRAD_TOL {
            return PlattModel::new(a, b);
        }
        // Levenberg fallback when the scores carry no spread
        let mut det = h[0] * h[2] - h[1] * h[1];
        let mut ridge = 0.0;
        while det <= 1e-14 * (h[0] * h[2]).max(1e-300) {
            ridge = if ridge == 0.0 { 1e-10 } else { ridge * 10.0 };
            det = (h[0] + ridge) * (h[2] + ridge) - h[1] * h[1];
        }
        let da = ((h[2] + ridge) * g[0] - h[1] * g[1]) / det;
        let db = ((h[0] + ridge) * g[1] - h[1] * g[0]) / det;

        let mut step = 1.0;
        loop {
            let (na, nb) = (a - step * da, b - step * db);
            let next = loss(points, na, nb);
            if next <= current || step < 1e-10 {
                a = na;
                b = nb;
                current = next;
                break;
            }
            step *= 0.5;
        }
    }
    let (g, _) = gradient_hessian(points, a, b);
    let final_norm = libm::fabs(g[0]).max(libm::fabs(g[1]));
    if final_norm < PLATT_GRAD_TOL {
        return PlattModel::new(a, b);
    }
    Err(Error::NoConvergence {
        a,
        b,
        grad_norm: final_norm.min(grad_norm),
        iterations: PLATT_MAX_ITER,
    })
}
