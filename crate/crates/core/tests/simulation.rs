use heterovar::diffvar::{estimate_variance, Method};
use heterovar::simlab::{
    generate, rate_study, roughness, run_table1, ExperimentConfig, MeanFn, Noise, VarianceFn,
};
use heterovar::stats::{mean, variance};
use heterovar::Design;

#[test]
fn generated_variance_matches_v_quadratic_at_centre() {
    let mut c = ExperimentConfig::table1(MeanFn::F1, 5);
    c.n = 100_000;
    let s = generate(&c, 0).unwrap();
    let window: Vec<f64> = s
        .x()
        .iter()
        .zip(s.y())
        .filter(|(x, _)| (0.45..=0.55).contains(*x))
        .map(|(_, y)| *y)
        .collect();
    let v = variance(&window).unwrap();
    assert!((0.49..=0.51).contains(&v), "{v}");
}

#[test]
fn pooled_noise_moments_meet_contract() {
    for noise in [Noise::Gaussian, Noise::TwoPoint] {
        let mut c = ExperimentConfig::table1(MeanFn::F1, 6);
        c.functions.variance = VarianceFn::Constant(1.0);
        c.noise = noise;
        c.n = 2000;
        let reps = 50;
        let z: Vec<f64> = (0..reps)
            .flat_map(|r| generate(&c, r).unwrap().y().to_vec())
            .collect();
        let total = z.len() as f64;
        let m = mean(&z).unwrap();
        let second = z.iter().map(|v| v * v).sum::<f64>() / total;
        assert!(m.abs() <= 4.0 / total.sqrt(), "{noise:?} mean {m}");
        let tol = 4.0 * (noise.fourth_moment() - 1.0).sqrt() / total.sqrt();
        assert!(
            (second - 1.0).abs() <= tol,
            "{noise:?} second moment {second}"
        );
    }
}

#[test]
fn random_design_estimate_tracks_truth() {
    let mut c = ExperimentConfig::table1(MeanFn::F2, 8);
    c.design = Design::RandomUniform;
    c.n = 5000;
    let s = generate(&c, 0).unwrap();
    let est = estimate_variance(&s, 0.15, 2, &[0.2, 0.5, 0.8], false).unwrap();
    for (x, v) in est.grid.iter().zip(&est.values) {
        let truth = c.functions.variance.eval(*x);
        assert!((v - truth).abs() < 0.1, "x {x}: {v} vs {truth}");
    }
}

#[test]
fn summary_is_a_pure_function_of_config() {
    let mut c = ExperimentConfig::table1(MeanFn::F3, 9);
    c.n = 300;
    c.replications = 4;
    let a = run_table1(&c).unwrap();
    let b = run_table1(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.per_replication.len(), 8);
    for m in [Method::DifferenceBased, Method::ResidualBased] {
        assert_eq!(a.methods[&m].completed, 4);
    }
}

#[test]
fn smooth_rate_is_negative() {
    let mut c = ExperimentConfig::table1(MeanFn::F1, 10);
    c.replications = 20;
    let r = rate_study(&[250, 500, 1000, 2000], &c, -0.2).unwrap();
    assert!(r.slope < -0.4 && r.slope > -1.2, "{}", r.slope);
}

#[test]
fn roughness_scales_with_frequency() {
    let r2 = roughness(&MeanFn::F2).unwrap();
    assert_eq!(roughness(&MeanFn::F1).unwrap(), 0.0);
    assert!((roughness(&MeanFn::F3).unwrap() / r2 - 4.0).abs() < 1e-12);
    assert!((roughness(&MeanFn::F4).unwrap() / r2 - 16.0).abs() < 1e-12);
}
