//! Seeded generators of random monotone data for property tests and the
//! verification ops.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interval::Interval;
use crate::lcmap::LCMap;
use crate::monotone::{Direction, MapExpr, MonotoneMap};
use crate::scalar::Real;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly increasing piecewise-linear bijection of [0, 1] fixing the
/// endpoints, with `breaks` interior breakpoints.
pub fn unit_bijection<T: Real>(rng: &mut ChaCha8Rng, breaks: usize) -> MonotoneMap<T> {
    let xs = random_partition(rng, breaks + 1);
    let ys = random_partition(rng, breaks + 1);
    let pts: Vec<(T, T)> = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| (T::of(x), T::of(y)))
        .collect();
    MonotoneMap::pwl(&pts).expect("partition points strictly increase")
}

/// Strictly increasing bijection of [0, ∞) fixing 0: piecewise linear on
/// [0, 3] (fixing 3) continued by the identity beyond.
pub fn ray_bijection<T: Real>(rng: &mut ChaCha8Rng, breaks: usize) -> MonotoneMap<T> {
    let three = T::of(3.0);
    let xs = random_partition(rng, breaks + 1);
    let ys = random_partition(rng, breaks + 1);
    let pts: Vec<(T, T)> = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| (T::of(3.0 * x), T::of(3.0 * y)))
        .collect();
    let pwl = MonotoneMap::pwl(&pts).expect("partition points strictly increase");
    let glued = MonotoneMap::new(MapExpr::Piecewise {
        split: three,
        left: Box::new(pwl.expr().clone()),
        right: Box::new(MapExpr::Identity),
    });
    glued.restrict_to(Interval::half_line())
}

/// 0 = t₀ < t₁ < ... < tₙ = 1 with n random gaps bounded away from zero.
fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for g in &gaps[..n - 1] {
        acc += g / total;
        out.push(acc);
    }
    out.push(1.0);
    out
}

/// Parameters of a self-similar four-scale family: a crossing point, image
/// shift, the four argument scalings, and the generating bijection of [1, 2].
#[derive(Clone, Debug)]
pub struct FourScale<T> {
    pub a: [T; 4],
    pub center: (T, T),
    pub shift: (T, T),
    pub g: MonotoneMap<T>,
}

/// Draws a four-scale family: random scalings in [0.5, 4] and a random
/// piecewise-linear generator of [1, 2].
pub fn four_scale<T: Real>(rng: &mut ChaCha8Rng) -> FourScale<T> {
    let a = [(); 4].map(|_| T::of(rng.gen_range(0.5..4.0)));
    let unit: MonotoneMap<T> = unit_bijection(rng, 3);
    // conjugate the unit bijection onto [1, 2]
    let g = MonotoneMap::new(MapExpr::Compose {
        outer: Box::new(MapExpr::Affine {
            a: T::one(),
            b: T::one(),
        }),
        inner: Box::new(MapExpr::Compose {
            outer: Box::new(unit.expr().clone()),
            inner: Box::new(MapExpr::Affine {
                a: T::one(),
                b: -T::one(),
            }),
        }),
    })
    .restrict_to(Interval::new(T::one(), T::of(2.0)));
    FourScale {
        a,
        center: (
            T::of(rng.gen_range(-0.5..0.5)),
            T::of(rng.gen_range(-0.5..0.5)),
        ),
        shift: (
            T::of(rng.gen_range(-0.5..0.5)),
            T::of(rng.gen_range(-0.5..0.5)),
        ),
        g,
    }
}

/// The Lorentz-conformal map of the four-scale family: h and k are built
/// from the self-similar bijection f(s) = 2⁻ⁿ g(2ⁿ s) on [2⁻ⁿ, 2⁻ⁿ⁺¹],
/// scaled by a_j in each of the four characteristic half-axes. Its u and v
/// contours through the crossing are straight lines even though h and k
/// are not differentiable there.
pub fn four_scale_map<T: Real>(params: &FourScale<T>) -> LCMap<T> {
    let f = self_similar(params.g.clone());
    let f_inv = self_similar(params.g.invert().expect("generator is monotone"));
    let (x0, y0) = params.center;
    let (u0, v0) = params.shift;
    let [a1, a2, a3, a4] = params.a;

    let branch = move |f: &dyn Fn(T) -> T, ap: T, am: T, c: T, s: T, t: T| {
        if t >= c {
            s + f(ap * (t - c))
        } else {
            s - f(am * (c - t))
        }
    };
    let fh = f.clone();
    let h = move |x: T| branch(fh.as_ref(), a1, a3, x0, u0, x);
    let fi = f_inv.clone();
    let h_inv = move |u: T| {
        if u >= u0 {
            x0 + fi(u - u0) / a1
        } else {
            x0 - fi(u0 - u) / a3
        }
    };
    let fk = f;
    let k = move |y: T| branch(fk.as_ref(), a2, a4, y0, v0, y);
    let fi2 = f_inv;
    let k_inv = move |v: T| {
        if v >= v0 {
            y0 + fi2(v - v0) / a2
        } else {
            y0 - fi2(v0 - v) / a4
        }
    };
    LCMap::new(
        MonotoneMap::custom(
            "four-scale-h",
            Arc::new(h),
            Some(Arc::new(h_inv)),
            Interval::full(),
            Some(Direction::Increasing),
        ),
        MonotoneMap::custom(
            "four-scale-k",
            Arc::new(k),
            Some(Arc::new(k_inv)),
            Interval::full(),
            Some(Direction::Increasing),
        ),
    )
}

/// f(s) = 2ᵐ g(2⁻ᵐ s) on [2ᵐ, 2ᵐ⁺¹] for every integer m: an increasing
/// bijection of [0, ∞) built from a bijection g of [1, 2].
fn self_similar<T: Real>(g: MonotoneMap<T>) -> Arc<dyn Fn(T) -> T + Send + Sync> {
    Arc::new(move |s: T| {
        if s <= T::zero() {
            return T::zero();
        }
        let m = s.log2().floor().to_i32().unwrap_or(0).clamp(-60, 60);
        let scale = T::of(2.0f64.powi(m));
        scale * g.eval((s / scale).max(T::one()).min(T::of(2.0))).unwrap_or(s / scale)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_bijection_is_valid() {
        let mut r = rng(7);
        for _ in 0..20 {
            let f: MonotoneMap<f64> = unit_bijection(&mut r, 4);
            assert_eq!(f.eval(0.0).unwrap(), 0.0);
            assert_eq!(f.eval(1.0).unwrap(), 1.0);
            assert!(f.check_monotone(101).pass);
        }
    }

    #[test]
    fn ray_bijection_is_valid() {
        let mut r = rng(11);
        for _ in 0..20 {
            let f: MonotoneMap<f64> = ray_bijection(&mut r, 3);
            assert_eq!(f.eval(0.0).unwrap(), 0.0);
            assert_eq!(f.eval(3.0).unwrap(), 3.0);
            assert_eq!(f.eval(5.5).unwrap(), 5.5);
            assert!(f.is_increasing());
            let y = f.eval(1.7).unwrap();
            assert!((f.inverse_eval(y).unwrap() - 1.7).abs() < 1e-10);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a: MonotoneMap<f64> = unit_bijection(&mut rng(3), 4);
        let b: MonotoneMap<f64> = unit_bijection(&mut rng(3), 4);
        assert_eq!(a.max_difference(&b, 57).unwrap(), 0.0);
    }

    #[test]
    fn self_similar_bijection_round_trips() {
        let mut r = rng(5);
        let params: FourScale<f64> = four_scale(&mut r);
        let f = self_similar(params.g.clone());
        let fi = self_similar(params.g.invert().unwrap());
        let mut prev = 0.0;
        for i in 1..200 {
            let s = 0.01 * i as f64 * i as f64; // spans several dyadic scales
            let v = f(s);
            assert!(v > prev, "self-similar map must increase");
            assert!((fi(v) - s).abs() < 1e-9 * s.max(1.0));
            prev = v;
        }
        // graph passes through all dyadic powers
        for m in [-3i32, 0, 4] {
            let s = 2.0f64.powi(m);
            assert!((f(s) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn four_scale_contours_are_linear() {
        let mut r = rng(42);
        let params: FourScale<f64> = four_scale(&mut r);
        let m = four_scale_map(&params);
        let (x0, y0) = params.center;
        let (u0, v0) = params.shift;
        let level_u = (u0 - v0) / 2.0;
        let [a1, a2, _, _] = params.a;
        // on the upper-right branch the u contour is Y − y0 = (a1/a2)(X − x0)
        let xs: Vec<f64> = (1..20).map(|i| x0 + 0.05 * i as f64).collect();
        let c = m.contour(crate::lcmap::Family::U, level_u, &xs);
        let mut found = 0;
        for p in c.points() {
            if p.cx > x0 && p.cy > y0 {
                let expect = y0 + a1 / a2 * (p.cx - x0);
                assert!((p.cy - expect).abs() < 1e-10, "{} vs {}", p.cy, expect);
                found += 1;
            }
        }
        assert!(found > 5);
    }
}
