//! Property-based invariants over randomized inputs, complementing the
//! fixed-oracle unit tests inside each module.

use hyperheat::bounds_verifier::{classify_region, RegionConstants};
use hyperheat::dimension::Dimension;
use hyperheat::gradient_riesz::{kunze_stein_q_range, riesz_range};
use hyperheat::logval::LogValue;
use hyperheat::model_kernels::{heat_kernel, EvalPoint};
use proptest::prelude::*;

fn dim(n: i64) -> Dimension {
    Dimension::new(n).unwrap()
}

proptest! {
    #[test]
    fn logvalue_round_trips(v in -1e12f64..1e12) {
        let lv = LogValue::from_value(v);
        let back = lv.value();
        if v == 0.0 {
            prop_assert_eq!(back, 0.0);
        } else {
            prop_assert!(((back - v) / v).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_contour_identity(w in -20.0f64..20.0, r in 1e-3f64..30.0, t in 1e-2f64..50.0) {
        // e^{-i lambda r - t lambda^2} with lambda = w - i r/2t has modulus
        // e^{-r^2/4t} e^{-t w^2}: the shifted-contour change of variables.
        use num_complex::Complex64;
        let lam = Complex64::new(w, -r / (2.0 * t));
        let lhs = (Complex64::new(0.0, -r) * lam - t * lam * lam).exp();
        let rhs = (-r * r / (4.0 * t) - t * w * w).exp();
        prop_assert!((lhs.norm() - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn riesz_duality_holds(n in prop::sample::select(vec![2i64, 4, 6]), frac in 1e-6f64..0.999999) {
        let d = dim(n);
        let lambda = frac * n as f64 / 2.0;
        let rr = riesz_range(d, lambda).unwrap();
        prop_assert!((1.0 / rr.p_lo + 1.0 / rr.p_hi - 1.0).abs() < 1e-14);
        prop_assert!(rr.p_lo > 1.0 && rr.p_lo < 2.0 && rr.p_hi > 2.0);
    }

    #[test]
    fn kunze_stein_dual_in_unit_interval(p0 in 2.000001f64..1e6) {
        let (lo, hi) = kunze_stein_q_range(p0).unwrap();
        prop_assert_eq!(lo, 1.0);
        prop_assert!(hi > 1.0 && hi < 2.0);
        // hi is the Hölder dual of p0
        prop_assert!((1.0 / p0 + 1.0 / hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heat_kernel_positive_and_decreasing_in_r(
        n in prop::sample::select(vec![1i64, 2, 4, 6]),
        r in 0.05f64..20.0,
        dr in 0.05f64..5.0,
        t in 0.1f64..20.0,
    ) {
        let d = dim(n);
        let near = heat_kernel(d, EvalPoint { r, t }).unwrap();
        let far = heat_kernel(d, EvalPoint { r: r + dr, t }).unwrap();
        prop_assert_eq!(near.sign, 1);
        prop_assert_eq!(far.sign, 1);
        prop_assert!(far.log_magnitude < near.log_magnitude);
    }

    #[test]
    fn every_point_lies_in_a_region(r in 1e-3f64..100.0, t in 1e-3f64..100.0) {
        let labels = classify_region(EvalPoint { r, t }, &RegionConstants::default()).unwrap();
        prop_assert!(!labels.is_empty());
    }
}
