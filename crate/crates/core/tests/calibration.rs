mod oracles;

use ptcal_core::calibrate::{
    fit_isotonic, fit_platt, fit_temperature, BinStrategy, BinningWithPlatt, CalibratorModel,
    Method,
};
use ptcal_core::pt::PtParams;
use ptcal_core::seed::rng_from_seed;
use ptcal_core::synth::{self, Distortion, DistortionSpec, TrueProbLaw};
use ptcal_core::{sigmoid, Dataset, Label, Probability, ScoredSample};
use rand::Rng;

fn dataset(points: &[(f64, bool)]) -> Dataset {
    let samples = points
        .iter()
        .map(|&(s, y)| ScoredSample::scored(Probability::new(s).unwrap(), Label::from_bool(y)))
        .collect();
    Dataset::new("hand", samples)
}

#[test]
fn pav_matches_brute_force_on_small_datasets() {
    let grid = [0.1, 0.4, 0.7];
    let mut worst: f64 = 0.0;
    for n in 1..=6usize {
        // every score assignment from the grid, every label vector
        for code in 0..grid.len().pow(n as u32) {
            let mut c = code;
            let scores: Vec<f64> = (0..n)
                .map(|_| {
                    let s = grid[c % grid.len()];
                    c /= grid.len();
                    s
                })
                .collect();
            for bits in 0u32..(1 << n) {
                let labels: Vec<f64> = (0..n).map(|i| (bits >> i & 1) as f64).collect();
                let pts: Vec<(f64, bool)> = scores
                    .iter()
                    .zip(&labels)
                    .map(|(&s, &y)| (s, y == 1.0))
                    .collect();
                let model = fit_isotonic(&dataset(&pts)).unwrap();
                for (x, want) in oracles::isotonic_brute_force(&scores, &labels) {
                    let got = model.apply(Probability::new(x).unwrap()).get();
                    worst = worst.max((got - want).abs());
                }
            }
        }
    }
    assert!(worst <= 1e-9, "max deviation {worst}");
}

#[test]
fn platt_recovers_planted_parameters() {
    let mut rng = rng_from_seed(7);
    let n = 50_000;
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) / n as f64;
            let y = rng.random::<f64>() < sigmoid(2.0 * p - 1.0);
            (p, y as u8 as f64)
        })
        .collect();
    let d = dataset(
        &points
            .iter()
            .map(|&(p, y)| (p, y == 1.0))
            .collect::<Vec<_>>(),
    );
    let m = fit_platt(&d).unwrap();
    assert!(
        (m.a - 2.0).abs() <= 0.1 && (m.b + 1.0).abs() <= 0.1,
        "{m:?}"
    );

    let (ga, gb) = oracles::platt_grid_search(&points);
    assert!(
        (m.a - ga).abs() <= 0.02 && (m.b - gb).abs() <= 0.02,
        "{m:?} vs ({ga}, {gb})"
    );
    // Newton's optimum is at least as good as the grid's
    assert!(oracles::platt_nll(&points, m.a, m.b) <= oracles::platt_nll(&points, ga, gb) + 1e-9);
}

fn temperature_data(t: f64, seed: u64) -> (Dataset, Vec<(f64, f64)>) {
    let mut rng = rng_from_seed(seed);
    let n = 50_000;
    let mut samples = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        // symmetric logit grid on [-6, 6]
        let z = -6.0 + 12.0 * (i as f64 + 0.5) / n as f64;
        let y = rng.random::<f64>() < sigmoid(z / t);
        let s = ScoredSample::new(
            Probability::new(sigmoid(z)).unwrap(),
            Some(z),
            Label::from_bool(y),
        )
        .unwrap();
        samples.push(s);
        points.push((z, y as u8 as f64));
    }
    (Dataset::new("temperature", samples), points)
}

#[test]
fn temperature_recovers_planted_values() {
    for (t, tol, seed) in [(1.0, 0.05, 1), (2.0, 0.1, 2)] {
        let (d, points) = temperature_data(t, seed);
        let fitted = fit_temperature(&d).unwrap().t;
        assert!((fitted - t).abs() <= tol, "t={t}: fitted {fitted}");
        let oracle = oracles::temperature_grid_search(&points);
        assert!(
            (fitted - oracle).abs() <= 2e-3,
            "fitted {fitted} vs grid {oracle}"
        );
    }
}

#[test]
fn fits_are_deterministic() {
    let (d, _) = temperature_data(1.5, 9);
    for m in Method::ALL {
        assert_eq!(
            m.fit(&d, 15, BinStrategy::EqualWidth).unwrap(),
            m.fit(&d, 15, BinStrategy::EqualWidth).unwrap()
        );
    }
}

// Exact inverse of the weighting function, by bisection.
fn exact_inverse(pt: &PtParams, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if pt.weight(Probability::new(mid).unwrap()).get() < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn isotonic_learns_the_inverse_of_a_pt_distortion() {
    let pt = PtParams::default();
    let d = synth::generate(&DistortionSpec {
        distortion: Distortion::PtWeight { gamma: pt.gamma() },
        law: TrueProbLaw::Uniform,
        n: 100_000,
        seed: 3,
    })
    .unwrap();
    let m = fit_isotonic(&d).unwrap();
    let mut sum = 0.0;
    let mut sup: f64 = 0.0;
    let grid: Vec<f64> = (0..=90).map(|i| 0.05 + i as f64 * 0.01).collect();
    for &q in &grid {
        let err = (m.apply(Probability::new(q).unwrap()).get() - exact_inverse(&pt, q)).abs();
        sum += err;
        sup = sup.max(err);
    }
    assert!(
        sum / grid.len() as f64 <= 0.01,
        "mean {}",
        sum / grid.len() as f64
    );
    assert!(sup <= 0.06, "sup {sup}");
}

#[test]
fn composite_hand_trace() {
    let d = dataset(&[(0.1, false), (0.2, false), (0.8, true), (0.9, true)]);
    let c = BinningWithPlatt::fit(&d, 2, BinStrategy::EqualWidth).unwrap();
    for p in [0.0, 0.15, 0.5, 0.85, 1.0] {
        let p = Probability::new(p).unwrap();
        assert_eq!(c.apply(p), c.binning.apply(c.platt.apply(p)));
    }
    let model = CalibratorModel::BinningWithPlatt(c);
    let s = ScoredSample::scored(Probability::new(0.9).unwrap(), Label::Positive);
    assert_eq!(model.apply(&s).unwrap().get(), 1.0);
}
