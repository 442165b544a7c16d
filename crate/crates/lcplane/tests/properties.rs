//! Property tests over randomly drawn monotone bijections: inversion and
//! composition laws, the tilde involution, and grammar round trips.

use proptest::prelude::*;

use lcplane::grammar::{parse, print};
use lcplane::random::{ray_bijection, rng, unit_bijection};
use lcplane::{Interval, MonotoneMap};

fn unit_map(seed: u64) -> MonotoneMap<f64> {
    unit_bijection(&mut rng(seed), 4)
}

fn ray_map(seed: u64) -> MonotoneMap<f64> {
    ray_bijection(&mut rng(seed), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trip(seed in 0u64..1 << 20, t in 0.0f64..1.0) {
        let f = unit_map(seed);
        let inv = f.invert().unwrap();
        let back = inv.eval(f.eval(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() < 1e-10, "round trip off by {}", (back - t).abs());
    }

    #[test]
    fn inverse_round_trip_rays(seed in 0u64..1 << 20, t in 0.0f64..5.0) {
        let f = ray_map(seed);
        let inv = f.invert().unwrap();
        let back = inv.eval(f.eval(t).unwrap()).unwrap();
        let scale = 1.0f64.max(t);
        prop_assert!((back - t).abs() / scale < 1e-10);
    }

    #[test]
    fn composition_associative(a in 0u64..1 << 20, b in 0u64..1 << 20, c in 0u64..1 << 20, t in 0.0f64..1.0) {
        let (f, g, h) = (unit_map(a), unit_map(b), unit_map(c));
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        let d = (left.eval(t).unwrap() - right.eval(t).unwrap()).abs();
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn tilde_is_involutive(seed in 0u64..1 << 20, t in 0.0f64..1.0) {
        let g = unit_map(seed);
        let gtt = g.tilde().unwrap().tilde().unwrap();
        prop_assert!((gtt.eval(t).unwrap() - g.eval(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tilde_respects_composition(a in 0u64..1 << 20, b in 0u64..1 << 20, t in 0.0f64..1.0) {
        // conjugation by s ↦ 1 − s is an isomorphism of the group of
        // endpoint-fixing bijections of the unit interval
        let (f, g) = (unit_map(a), unit_map(b));
        let lhs = f.compose(&g).unwrap().tilde().unwrap();
        let rhs = f.tilde().unwrap().compose(&g.tilde().unwrap()).unwrap();
        prop_assert!((lhs.eval(t).unwrap() - rhs.eval(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn odd_extension_is_odd(seed in 0u64..1 << 20, t in 0.0f64..1.0) {
        let g = unit_map(seed);
        let odd = g.odd_extend().unwrap();
        prop_assert!((odd.eval(-t).unwrap() + odd.eval(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn parts_reassemble(seed in 0u64..1 << 20, t in -1.0f64..1.0) {
        let g = unit_map(seed).odd_extend().unwrap();
        let rebuilt = MonotoneMap::from_parts(
            &g.negative_part().unwrap(),
            &g.positive_part().unwrap(),
        ).unwrap();
        prop_assert!((rebuilt.eval(t).unwrap() - g.eval(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn grammar_round_trip(a in 0.2f64..3.0, b in -1.0f64..1.0, p in 1.1f64..3.0, t in -2.0f64..2.0) {
        for spec in [
            format!("affine:{a},{b}"),
            format!("odd(pow:{p})"),
            format!("comp(affine:{a},{b},odd(pow:{p}))"),
            format!("neg(comp(exp1,affine:{a},0))"),
            format!("piece(0,poly:0,{a},affine:{a},0)"),
        ] {
            let f = parse::<f64>(&spec).unwrap();
            let canonical = print(f.expr());
            let g = parse::<f64>(&canonical).unwrap();
            // printing is canonical: a second round trip is the identity
            prop_assert_eq!(&canonical, &print(g.expr()));
            let (fv, gv) = (f.eval(t), g.eval(t));
            match (fv, gv) {
                (Ok(x), Ok(y)) => prop_assert!((x - y).abs() < 1e-12),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "domain mismatch after round trip of {}", spec),
            }
        }
    }

    #[test]
    fn restricted_inverse_maps_range(seed in 0u64..1 << 20, lo in 0.05f64..0.4, len in 0.1f64..0.5) {
        let f = unit_map(seed).restrict_to(Interval::new(lo, (lo + len).min(1.0)));
        let inv = f.invert().unwrap();
        let mid = 0.5 * (f.domain().lo + f.domain().hi);
        let y = f.eval(mid).unwrap();
        prop_assert!(inv.domain().lo <= y && y <= inv.domain().hi);
        prop_assert!((inv.eval(y).unwrap() - mid).abs() < 1e-10);
    }
}
