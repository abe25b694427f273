use proptest::prelude::*;

use revol_core::hazard::{hazard_empirical_values, hazard_model};
use revol_core::memory::{box_size_grid, dfa_fluctuation, partition_values, profile, MIN_BOX};
use revol_core::sefit::StretchedExpParams;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_telescopes(x in prop::collection::vec(-1e3f64..1e3, 1..500)) {
        let y = profile(&x).unwrap();
        let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!(y.last().unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn partition_is_balanced_and_exhaustive(x in prop::collection::vec(1u32..50, 5..400), k in 1usize..9) {
        let tau: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
        prop_assume!(tau.len() > k);
        let p = partition_values(&tau, k).unwrap();
        prop_assert_eq!(p.assignment.len(), tau.len() - 1);
        prop_assert!(p.assignment.iter().all(|&a| a < k));
        let sizes = p.sizes();
        prop_assert_eq!(sizes.iter().sum::<usize>(), tau.len() - 1);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        // Subsets are ordered by the preceding interval.
        for j in 0..p.assignment.len() {
            for i in 0..p.assignment.len() {
                if tau[j] < tau[i] {
                    prop_assert!(p.assignment[j] <= p.assignment[i]);
                }
            }
        }
    }

    #[test]
    fn box_grid_is_increasing_and_bounded(n in 80usize..20_000, points in 2usize..40) {
        let g = box_size_grid(n, points).unwrap();
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g[0] == MIN_BOX && *g.last().unwrap() <= n / 4);
    }

    #[test]
    fn dfa_ignores_constant_offset(x in prop::collection::vec(-10.0f64..10.0, 200..400), c in -100.0f64..100.0) {
        let grid = box_size_grid(x.len(), 6).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = dfa_fluctuation(&profile(&x).unwrap(), &grid, 1).unwrap();
        let b = dfa_fluctuation(&profile(&shifted).unwrap(), &grid, 1).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            prop_assert!((p.f - q.f).abs() <= 1e-8 * p.f.max(1.0));
        }
    }

    #[test]
    fn empirical_hazard_grows_with_window(x in prop::collection::vec(1u32..60, 1..300), dt in 1u32..20) {
        let tau: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
        let grid: Vec<f64> = (0..60).map(f64::from).collect();
        let narrow = hazard_empirical_values(&tau, 1.0, dt, &grid, 0).unwrap();
        let wide = hazard_empirical_values(&tau, 1.0, dt + 1, &grid, 0).unwrap();
        for (a, b) in narrow.points.iter().zip(&wide.points) {
            if let (Some(wa), Some(wb)) = (a.w, b.w) {
                prop_assert!(wb >= wa);
            }
        }
    }

    #[test]
    fn model_hazard_decreases_in_t_below_unit_shape(a in 0.01f64..5.0, g in 0.1f64..0.99, dt in 1u32..20) {
        let p = StretchedExpParams::truncated(a, g, 0.0).unwrap();
        let grid: Vec<f64> = (1..200).map(f64::from).collect();
        let w: Vec<f64> = hazard_model(&p, 1.0, dt, &grid).unwrap().points.iter().map(|p| p.w.unwrap()).collect();
        prop_assert!(w.windows(2).all(|pair| pair[1] <= pair[0] + 1e-12));
    }
}
