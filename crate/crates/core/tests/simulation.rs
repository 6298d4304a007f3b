use ptcal_core::calibrate::{CalibratorModel, Method};
use ptcal_core::pt::PtParams;
use ptcal_core::sim::{
    build_arms, run_study, simulate, AgentSpec, ArmName, SimulationConfig, StudyConfig,
};
use ptcal_core::synth::{self, Distortion, DistortionSpec, TrueProbLaw};

#[test]
fn default_study_orders_the_arms() {
    let mut top = 0;
    let mut bottom = 0;
    let mut significant = 0;
    for seed in 0..100 {
        let r = simulate(&SimulationConfig::default().with_seed(seed)).unwrap();
        let rank = r.ranking();
        top += (rank[0] == ArmName::PtCalibrated) as usize;
        bottom += (rank[4] == ArmName::Random) as usize;
        let p = r
            .pair(ArmName::PtCalibrated, ArmName::Random)
            .unwrap()
            .anova
            .unwrap()
            .p_value;
        significant += (p < 0.05) as usize;
        assert!(r.random_arm_outcome_corr.abs() < 0.1);
    }
    println!("pt-calibrated top {top}/100, random bottom {bottom}/100, p<0.05 {significant}/100");
    assert!(top >= 95 && bottom >= 95 && significant >= 95);
}

#[test]
fn simulation_is_reproducible() {
    let cfg = SimulationConfig::default().with_seed(17);
    assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    assert_ne!(
        simulate(&cfg).unwrap(),
        simulate(&cfg.with_seed(18)).unwrap()
    );
}

#[test]
fn everything_coincides_without_distortion() {
    let base = synth::generate(&DistortionSpec {
        distortion: Distortion::Identity,
        law: TrueProbLaw::Uniform,
        n: 2000,
        seed: 1,
    })
    .unwrap();
    let one = PtParams::new(1.0).unwrap();
    let arms = build_arms(&base, &CalibratorModel::Identity, &one, 5).unwrap();
    let study = StudyConfig {
        agent: AgentSpec {
            gamma_agent: one,
            ..AgentSpec::default()
        },
        ..StudyConfig::default()
    };
    let results = run_study(&arms, &study, 9).unwrap();
    for r in &results[1..4] {
        assert_eq!(r.per_agent_corr, results[0].per_agent_corr);
        assert_eq!(r.decisions, results[0].decisions);
    }
}

#[test]
fn every_method_runs_end_to_end() {
    for method in Method::ALL {
        if method == Method::Temperature {
            continue;
        }
        let cfg = SimulationConfig {
            method,
            ..SimulationConfig::default().with_seed(3)
        };
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.arms.len(), 5);
        assert_eq!(r.pairwise.len(), 10);
    }
}
