use fracwalk::*;

#[test]
fn scaling_law_across_horizons() {
    // G_t(x) = t^(α-2) G_1(x/t), each t on its own contour and window Ξ/t
    for (alpha, p) in [(0.3, 0.5), (0.7, 0.2)] {
        let q = KernelQuery::new(alpha, p).unwrap();
        let base = KernelProfile::new(&q, 1.0, 16.0, 1.0).unwrap();
        for t in [0.5f64, 2.0] {
            let prof = KernelProfile::new(&q, t, 16.0 / t, t).unwrap();
            for y in [-0.7, -0.2, 0.4, 0.8] {
                let direct = prof.g(y * t);
                let scaled = t.powf(alpha - 2.0) * base.g(y);
                assert!((direct - scaled).abs() <= 1e-5 * scaled.abs().max(1e-3), "t={t} y={y}: {direct} vs {scaled}");
            }
        }
    }
}

#[test]
fn mass_examples_and_ratio() {
    let q = KernelQuery::new(0.5, 0.5).unwrap();
    let m1 = kernel_mass(&q, 1.0).unwrap();
    let m2 = kernel_mass(&q, 2.0).unwrap();
    assert!((m1 - 0.5641896).abs() < 1e-7);
    assert!((m2 - 0.398942).abs() < 1e-6);
    assert!((m2 / m1 - 2f64.powf(-0.5)).abs() < 1e-9);
    assert!(kernel_mass(&q, 0.0).is_err());
}

#[test]
fn riemann_sum_of_g1_gives_mass() {
    let q = KernelQuery::new(0.75, 0.3).unwrap();
    let prof = KernelProfile::new(&q, 1.0, 16.0, 2.0).unwrap();
    let dx = 1.0 / 128.0;
    let sum: f64 = (-256..=256).map(|k| prof.g(k as f64 * dx)).sum::<f64>() * dx;
    assert!((sum - 1.0 / gamma_fn(0.75).unwrap()).abs() < 1e-8, "{sum}");
}

#[test]
fn zeta_is_zero_free_on_contour() {
    let q = KernelQuery::new(0.4, 0.9).unwrap();
    for xi in [0.0, 1.0, -7.5, 60.0] {
        assert!(q.eval_p(xi).unwrap().min_abs_zeta > 0.0);
    }
}
