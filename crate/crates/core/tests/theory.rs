use heterovar::boundlab::{
    affinity_by_trapezoid, hc_expectation, hc_integral, hellinger_affinity, moment_distribution,
    normal_moment, AdversarialMean, TestingProblem,
};

#[test]
fn moment_table_through_q() {
    for q in [3, 5, 7, 9, 11] {
        let g = moment_distribution(q).unwrap();
        for j in 0..=q {
            assert!((g.moment(j) - normal_moment(j)).abs() < 1e-8, "q {q} j {j}");
        }
    }
}

#[test]
fn hellinger_study() {
    let mut prev = 0.0;
    for n in [100, 1000, 10_000] {
        let p = TestingProblem::new(n, 0.3, 5, 1.0).unwrap();
        let a = hellinger_affinity(&p).unwrap();
        assert!(a.rho >= prev);
        prev = a.rho;
        let oracle = affinity_by_trapezoid(&p, 50_000);
        assert!((a.single - oracle).abs() < 1e-8);
    }
    assert!(prev > 0.9);
}

#[test]
fn both_forms_of_the_odd_integral_vanish() {
    for d in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
        assert!(hc_integral(d).unwrap().abs() < 1e-10);
        assert!(hc_expectation(d).unwrap().abs() < 1e-10);
    }
}

#[test]
fn adversarial_mean_stays_in_holder_ball() {
    let f = AdversarialMean::new(2000, 0.15, 7, 10.0, 42).unwrap();
    assert!(f.holder_quotient(10_000, 1) <= 10.0);
    assert!(f.sup_norm() <= f.theta * f.g.b);
}
