use std::f64::consts::PI;

use barnes_zeta::analysis::{fit_points, verdict};
use barnes_zeta::diagonal::diagonal_value;
use barnes_zeta::evaluator::{
    direct_series_truncated, euler_maclaurin_eval, hurwitz_oracle, hurwitz_reference_auto,
    theorem3_eval, TruncationPlan,
};
use barnes_zeta::meansquare::{
    build_lattice_table, eval_truncated, mean_square_curve, CurveRow, CurveStats, MeanSquareCurve,
    QuadSettings,
};
use barnes_zeta::{classify_region, validate_params, BarnesParams, ComplexPoint, RegionTag, Tolerance};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = BarnesParams> {
    (1i64..=6, 1i64..=3, 1i64..=4, 1i64..=4)
        .prop_map(|(an, ad, v, w)| BarnesParams::from_ratios((an, ad), (v, 1), (w, 1)).unwrap())
}

fn all_methods(s: ComplexPoint, p: &BarnesParams) -> [Complex64; 4] {
    let plan = TruncationPlan::new(60.5, 2.0 * PI, 30).unwrap();
    [
        direct_series_truncated(s, p, 60).unwrap().value,
        euler_maclaurin_eval(s, p, 30).unwrap().value,
        theorem3_eval(s, p, plan).unwrap().value,
        hurwitz_oracle(s, p, 50).unwrap().value,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugation(p in params_strategy(), sigma in 2.05f64..3.5, t in 0.0f64..60.0) {
        let s = ComplexPoint::new(sigma, t).unwrap();
        let a = all_methods(s, &p);
        let b = all_methods(s.conj(), &p);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y.conj()).norm() <= 1e-14 * x.norm());
        }
    }

    #[test]
    fn swap_symmetry(p in params_strategy(), sigma in 2.05f64..3.5, t in -40.0f64..40.0) {
        let s = ComplexPoint::new(sigma, t).unwrap();
        let q = p.swapped().unwrap();
        let a = all_methods(s, &p);
        let b = all_methods(s, &q);
        // the Hurwitz rearrangement truncates asymmetrically; compare its full-accuracy form
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).norm() <= 1e-12 * a[k].norm());
        }
        let x = hurwitz_reference_auto(s, &p).unwrap().value;
        let y = hurwitz_reference_auto(s, &q).unwrap().value;
        prop_assert!((x - y).norm() <= 1e-12 * x.norm());
    }

    #[test]
    fn homogeneity(p in params_strategy(), sigma in 2.05f64..3.5, t in -40.0f64..40.0, c in prop::sample::select(vec![2i64, 10])) {
        let s = ComplexPoint::new(sigma, t).unwrap();
        let scaled = p.scaled(&BigRational::from_integer(c.into())).unwrap();
        let factor = Complex64::new(c as f64, 0.0).powc(-s.to_complex());
        let a = all_methods(s, &scaled);
        let b = all_methods(s, &p);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y * factor).norm() <= 1e-12 * x.norm());
        }
    }

    #[test]
    fn strip_em_vs_theorem3(p in params_strategy(), sigma in 1.15f64..2.0, t in 0.0f64..40.0) {
        prop_assume!((sigma - 2.0).abs() > 1e-3);
        let s = ComplexPoint::new(sigma, t).unwrap();
        let em = euler_maclaurin_eval(s, &p, 400).unwrap();
        let plan = TruncationPlan::new(250.0, 2.0 * PI, 1).unwrap();
        let t3 = theorem3_eval(s, &p, plan).unwrap();
        prop_assert!((em.value - t3.value).norm() <= em.error_bound + t3.error_bound);
    }

    #[test]
    fn grouped_equals_naive(p in params_strategy(), sigma in 1.6f64..3.0, t in 1.0f64..25.0) {
        let table = build_lattice_table(&p, 25.0, sigma).unwrap();
        let got = eval_truncated(&table, sigma, t, t).unwrap();
        let b = t.floor() as u64;
        let z = Complex64::new(sigma, t);
        let mut want = Complex64::new(0.0, 0.0);
        for m in 0..=b {
            for n in 0..=b {
                want += Complex64::new(p.lambda(m, n), 0.0).powc(-z);
            }
        }
        prop_assert!((got - want).norm() <= 1e-12 * want.norm());
        prop_assert_eq!(table.mult.iter().sum::<u64>(), 26 * 26);
    }

    // every value is at least 1 once alpha >= 1; below that alpha^{-2 sigma} grows with sigma
    #[test]
    fn diagonal_decreasing_in_sigma(p in params_strategy().prop_filter("alpha >= 1", |p| p.alpha() >= 1.0), a in 1.55f64..3.0, gap in 0.01f64..0.5) {
        let lo = diagonal_value(a, &p, Tolerance::default()).unwrap().value;
        let hi = diagonal_value(a + gap, &p, Tolerance::default()).unwrap().value;
        prop_assert!(hi < lo);
    }

    #[test]
    fn diagonal_scaling(p in params_strategy(), sigma in 1.55f64..3.0, c in prop::sample::select(vec![2i64, 3, 10])) {
        let base = diagonal_value(sigma, &p, Tolerance::default()).unwrap().value;
        let scaled = p.scaled(&BigRational::from_integer(c.into())).unwrap();
        let got = diagonal_value(sigma, &scaled, Tolerance::default()).unwrap().value;
        let want = (c as f64).powf(-2.0 * sigma) * base;
        prop_assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn validate_idempotent(p in params_strategy()) {
        prop_assert_eq!(validate_params(&p.to_raw()).unwrap(), p);
    }

    #[test]
    fn region_piecewise_constant(x in -5.0f64..5.0) {
        let expected = if x > 2.0 {
            RegionTag::Theorem1
        } else if x > 1.5 {
            RegionTag::Theorem2
        } else if x > 1.0 {
            RegionTag::Theorem3Strip
        } else {
            RegionTag::OutOfScope
        };
        prop_assert_eq!(classify_region(x), expected);
    }

    #[test]
    fn fit_affine_equivariant(slope in -1.0f64..1.5, c in 0.01f64..100.0, wiggle in 0.0f64..0.3) {
        let t: Vec<f64> = (0..8).map(|k| 5.0 * 1.6f64.powi(k)).collect();
        let r: Vec<f64> = t.iter().enumerate().map(|(k, x)| x.powf(slope) * (1.0 + wiggle * (k as f64).sin().abs())).collect();
        let rc: Vec<f64> = r.iter().map(|x| x * c).collect();
        let e = vec![0.0; t.len()];
        let a = fit_points(&t, &r, &e, false).unwrap();
        let b = fit_points(&t, &rc, &e, false).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-12);
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() <= 1e-12);
    }

    #[test]
    fn verdict_monotone_in_slack(sigma in prop::sample::select(vec![1.6, 1.8, 1.95, 2.5]), growth in 0.0f64..1.0, s1 in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let grid: Vec<CurveRow> = (0..8)
            .map(|k| {
                let t = 10.0 * 1.4f64.powi(k);
                CurveRow { t, i: t, quad_err: 0.0, r: t.powf(growth) * (1.0 + 0.1 * (k as f64).cos()) }
            })
            .collect();
        let curve = MeanSquareCurve {
            sigma,
            params: BarnesParams::integers(1, 1, 1).unwrap(),
            grid,
            leading_coeff: 1.0,
            stats: CurveStats::default(),
        };
        let a = verdict(&curve, s1).unwrap();
        let b = verdict(&curve, s1 + ds).unwrap();
        prop_assert!(!a.pass || b.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn curve_parallel_serial_and_monotone(p in params_strategy(), sigma in 1.6f64..2.8) {
        let grid = [3.0, 7.5, 12.0, 20.0];
        let par = QuadSettings::default();
        let ser = QuadSettings { parallel: false, ..par };
        let a = mean_square_curve(sigma, &p, &grid, &par).unwrap();
        let b = mean_square_curve(sigma, &p, &grid, &ser).unwrap();
        prop_assert_eq!(&a.grid, &b.grid);
        prop_assert!(a.grid.windows(2).all(|w| w[1].i >= w[0].i));
        for row in &a.grid {
            prop_assert_eq!(row.r, row.i - a.leading_coeff * row.t);
        }
    }
}
