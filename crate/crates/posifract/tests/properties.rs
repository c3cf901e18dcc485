//! Property-based invariants: cone closure, cancellation, metric agreement
//! across conventions, map inversion, and config round-trips.

use proptest::prelude::*;

use posifract::config::{FormConfig, OperatorConfig, PValue, ScalingConfig, SpecConfig};
use posifract::partition::{ContractionFamily, KnotVector};
use posifract::semi_spaces::{
    combine, lp_metric, lp_sequence_metric, norm_from_zero, sup_metric, ContinuityClass, Exponent,
    PositiveSequence, PositiveVector, SampledPositiveFunction,
};

fn samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, n)
}

fn sampled_fn(n: usize) -> impl Strategy<Value = SampledPositiveFunction> {
    samples(n).prop_map(move |s| {
        SampledPositiveFunction::new((0.0, 2.0), s, ContinuityClass::Continuous).unwrap()
    })
}

proptest! {
    #[test]
    fn combine_is_closed_in_the_cone(
        f in sampled_fn(17),
        g in sampled_fn(17),
        alpha in 0.0f64..10.0,
        beta in 0.0f64..10.0,
    ) {
        let h = combine(&f, &g, alpha, beta).unwrap();
        prop_assert!(h.samples().iter().all(|s| *s >= 0.0));
        prop_assert_eq!(h.len(), f.len());
    }

    #[test]
    fn additive_cancellation_holds_at_matched_scales(
        u in samples(9),
        v in samples(9),
        w in samples(9),
    ) {
        let u = PositiveVector::new(u).unwrap();
        let v = PositiveVector::new(v).unwrap();
        let w = PositiveVector::new(w).unwrap();
        let uv = u.combine(&v, 1.0, 1.0).unwrap();
        let uw = u.combine(&w, 1.0, 1.0).unwrap();
        if uv == uw {
            // equal sums force equal addends up to the roundoff of the sums
            for ((vi, wi), ui) in v.values().iter().zip(w.values()).zip(u.values()) {
                prop_assert!((vi - wi).abs() <= 2.0 * f64::EPSILON * (ui + vi));
            }
        }
    }

    #[test]
    fn infinity_lp_metric_is_the_sup_metric(f in sampled_fn(33), g in sampled_fn(33)) {
        let a = lp_metric(&f, &g, Exponent::Infinity).unwrap();
        let b = sup_metric(&f, &g).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sequence_metric_agrees_with_the_classical_form(
        entries in prop::collection::vec((0usize..12, 0.0f64..10.0), 0..6),
        other in prop::collection::vec((0usize..12, 0.0f64..10.0), 0..6),
    ) {
        let p = Exponent::finite(2.0).unwrap();
        let a = PositiveSequence::new(entries, p).unwrap();
        let b = PositiveSequence::new(other, p).unwrap();
        let via_maxmin = lp_sequence_metric(&a, &b).unwrap();
        // classical |a_n - b_n| form over the same index order
        let mut indices: Vec<usize> = a.support().map(|(i, _)| i)
            .chain(b.support().map(|(i, _)| i)).collect();
        indices.sort_unstable();
        indices.dedup();
        let mut sum = 0.0;
        for i in indices {
            sum += (a.get(i) - b.get(i)).abs().powf(2.0);
        }
        prop_assert_eq!(via_maxmin.to_bits(), sum.powf(0.5).to_bits());
    }

    #[test]
    fn norms_are_absolutely_homogeneous(
        f in sampled_fn(65),
        alpha in 0.0f64..8.0,
    ) {
        let zero = SampledPositiveFunction::zero((0.0, 2.0), 65, ContinuityClass::Continuous)
            .unwrap();
        let scaled = combine(&f, &zero, alpha, 0.0).unwrap();
        for p in [Exponent::finite(1.0).unwrap(), Exponent::finite(2.0).unwrap(), Exponent::Infinity] {
            let lhs = norm_from_zero(&scaled, p);
            let rhs = alpha * norm_from_zero(&f, p);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn map_inversion_is_exact_to_ulps(
        interior in prop::collection::vec(0.05f64..0.95, 1..4),
        x in 0.0f64..1.0,
    ) {
        let mut knots: Vec<f64> = interior.clone();
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let mut all = vec![0.0];
        all.extend(knots);
        all.push(1.0);
        prop_assume!(all.len() >= 3);
        let family = ContractionFamily::from_knots(KnotVector::new(all).unwrap());
        for i in 0..family.map_count() {
            let y = family.apply(i, x);
            let back = family.invert(i, y).unwrap();
            // the anchored add `left + a·x` rounds at the scale of y, so the
            // round trip is exact to a few ulps of y / a_i rather than of x
            let scale = 1.0 + x + y / family.map(i).slope();
            prop_assert!((back - x).abs() <= 4.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn locate_is_the_unique_half_open_membership(
        interior in prop::collection::vec(0.05f64..0.95, 1..4),
        x in 0.0f64..1.0,
    ) {
        let mut knots: Vec<f64> = interior.clone();
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let mut all = vec![0.0];
        all.extend(knots);
        all.push(1.0);
        prop_assume!(all.len() >= 3);
        let family = ContractionFamily::from_knots(KnotVector::new(all.clone()).unwrap());
        let i = family.locate(x).unwrap();
        let last = i == family.map_count() - 1;
        prop_assert!(x >= all[i]);
        if last {
            prop_assert!(x <= all[i + 1]);
        } else {
            prop_assert!(x < all[i + 1]);
        }
    }

    #[test]
    fn configs_round_trip_through_json(
        knot in 0.1f64..0.9,
        s in prop::collection::vec(0.0f64..0.99, 2),
        c_rows in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 4), 2),
        tol in 1e-12f64..1e-6,
        use_lp in any::<bool>(),
    ) {
        let config = SpecConfig {
            knots: vec![0.0, knot, 1.0],
            p: if use_lp { Some(PValue::Number(2.0)) } else { None },
            scaling: ScalingConfig::Constants(s),
            form: if use_lp {
                FormConfig::Lp { q: c_rows }
            } else {
                FormConfig::C {
                    germ: c_rows[0].clone(),
                    operator: OperatorConfig::Name("endpoint_affine".into()),
                }
            },
            grid: 4,
            tol,
            max_iter: 100,
            attractor: None,
        };
        let json = config.to_json();
        let back = SpecConfig::from_json(&json).unwrap();
        prop_assert_eq!(&config, &back);
        prop_assert_eq!(json, back.to_json());
    }
}
