use fracwalk::*;
use proptest::prelude::*;

fn grid(n: usize) -> GridSpec {
    GridSpec::unpadded(0.125, 0.125 * n as f64, -1.0, 1.0).unwrap()
}

fn history(n: usize, data: &[f64]) -> SolutionHistory {
    SolutionHistory::from_rows(grid(n), data.chunks(17).map(|r| r.to_vec()).collect()).unwrap()
}

fn rows(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 17 * (n + 1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn operator_is_linear(
        alpha in 0.05f64..0.95,
        p in 0.0f64..=1.0,
        (n, u, v) in (1usize..8).prop_flat_map(|n| (Just(n), rows(n), rows(n))),
        a in -3.0f64..3.0,
    ) {
        let params = SolverParams::new(alpha, p).unwrap();
        let coeffs = make_coefficients(&params, n).unwrap();
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let (hu, hv, hw) = (history(n, &u), history(n, &v), history(n, &w));
        let op = DiscreteOperator::new(params, &coeffs);
        let ru = op.combined_row(&hu, n).unwrap();
        let rv = op.combined_row(&hv, n).unwrap();
        let rw = op.combined_row(&hw, n).unwrap();
        let scale = grid(n).h().powf(-alpha) / params.gamma_2ma() * 40.0;
        for k in 0..ru.len() {
            prop_assert!((rw[k] - (a * ru[k] + rv[k])).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        u in prop::collection::vec(-10.0f64..10.0, 1..64),
        shift in prop::collection::vec(-10.0f64..10.0, 64),
        c in -4.0f64..4.0,
        h in 1e-3f64..1.0,
    ) {
        let v = &shift[..u.len()];
        let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = u.iter().map(|a| c * a).collect();
        for kind in NormKind::ALL {
            let nu = discrete_norm(&u, h, kind);
            prop_assert!(nu >= 0.0);
            prop_assert!((discrete_norm(&scaled, h, kind) - c.abs() * nu).abs() <= 1e-12 * (1.0 + nu));
            prop_assert!(discrete_norm(&sum, h, kind) <= nu + discrete_norm(v, h, kind) + 1e-12);
        }
    }

    #[test]
    fn order_recovered_from_power_law(c in 0.01f64..100.0, s in 0.2f64..3.0, lo in 2i32..5, m in 3i32..8) {
        let pairs: Vec<(f64, f64)> = (lo..lo + m).map(|k| 0.5f64.powi(k)).map(|h| (h, c * h.powf(s))).collect();
        let fit = estimate_order(&pairs).unwrap();
        prop_assert!((fit.slope - s).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn profiles_never_negative_or_nan(alpha in 0.05f64..0.95, p in 0.01f64..0.99, y in -3.0f64..3.0) {
        for kind in [ProfileKind::WaitFirst, ProfileKind::JumpFirst, ProfileKind::StandardWalk] {
            let prof = SimilarityProfile::new(kind, alpha, p).unwrap();
            let v = prof.phi(y);
            prop_assert!(!v.is_nan() && v >= 0.0, "{:?} {} {}", kind, y, v);
        }
    }
}
