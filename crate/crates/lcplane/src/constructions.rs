//! Constructive procedures: realizing crossing contours from ray data,
//! square mappings from quadrilateral sides, flat-top and left-right
//! symmetric specializations, unfolding, cropping, vertex normalization
//! and gauge maps.

use crate::error::{LcError, Result};
use crate::interval::Interval;
use crate::lcmap::LCMap;
use crate::monotone::{MapExpr, MonotoneMap};
use crate::scalar::Real;

const STRUCT_TOL: f64 = 1e-9;

/// Four rays gⱼ on [0, ∞) fixing 0, any one possibly absent. When all four
/// are present they must satisfy the cyclic condition g₄∘g₃∘g₂∘g₁ = ι.
#[derive(Clone, Debug)]
pub struct RayFamily<T> {
    pub g: [Option<MonotoneMap<T>>; 4],
}

fn check_ray<T: Real>(g: &MonotoneMap<T>) -> Result<()> {
    if !g.is_increasing() {
        return Err(LcError::NotMonotone("ray map must be increasing".into()));
    }
    let tol = T::of(STRUCT_TOL);
    if g.domain().lo.abs() > tol {
        return Err(LcError::NotFixingOrigin);
    }
    if g.eval(T::zero())?.abs() > tol {
        return Err(LcError::NotFixingOrigin);
    }
    Ok(())
}

fn check_unit<T: Real>(g: &MonotoneMap<T>) -> Result<()> {
    if !g.is_increasing() {
        return Err(LcError::NotMonotone("side map must be increasing".into()));
    }
    let tol = T::of(STRUCT_TOL);
    if !g.domain().approx_eq(&Interval::unit(), tol)
        || g.eval(T::zero())?.abs() > tol
        || (g.eval(T::one())? - T::one()).abs() > tol
    {
        return Err(LcError::NotEndpointFixing);
    }
    Ok(())
}

/// Max residual of g₄(g₃(g₂(g₁(t)))) − t on an n-point grid.
pub fn cyclic_residual<T: Real>(g: &[MonotoneMap<T>; 4], n: usize) -> T {
    let grid = Interval::new(T::zero(), T::of(3.0)).grid(n.max(2));
    let mut worst = T::zero();
    for t in grid {
        let r = g[0]
            .eval(t)
            .and_then(|a| g[1].eval(a))
            .and_then(|b| g[2].eval(b))
            .and_then(|c| g[3].eval(c));
        match r {
            Ok(v) => worst = worst.max((v - t).abs()),
            Err(_) => worst = T::infinity(),
        }
    }
    worst
}

/// Max residual of the twisted cycle g₄(g̃₃(g₂(g̃₁(t)))) − t on [0, 1].
pub fn twisted_cyclic_residual<T: Real>(g: &[MonotoneMap<T>; 4], n: usize) -> Result<T> {
    let g1t = g[0].tilde()?;
    let g3t = g[2].tilde()?;
    let grid = Interval::unit().grid(n.max(2));
    let mut worst = T::zero();
    for t in grid {
        let r = g1t
            .eval(t)
            .and_then(|a| g[1].eval(a))
            .and_then(|b| g3t.eval(b))
            .and_then(|c| g[3].eval(c));
        match r {
            Ok(v) => worst = worst.max((v - t).abs()),
            Err(_) => worst = T::infinity(),
        }
    }
    Ok(worst)
}

impl<T: Real> RayFamily<T> {
    pub fn new(g: [Option<MonotoneMap<T>>; 4]) -> Self {
        RayFamily { g }
    }

    pub fn from_four(g: [MonotoneMap<T>; 4]) -> Self {
        let [g1, g2, g3, g4] = g;
        RayFamily {
            g: [Some(g1), Some(g2), Some(g3), Some(g4)],
        }
    }

    /// Derives the missing ray from the cyclic condition. Returns the
    /// zero-based index of the slot that was filled.
    pub fn fourth_ray(&self) -> Result<(usize, MonotoneMap<T>)> {
        let missing: Vec<usize> = (0..4).filter(|&j| self.g[j].is_none()).collect();
        if missing.len() != 1 {
            return Err(LcError::DomainMismatch(format!(
                "exactly one ray must be absent, found {} absent",
                missing.len()
            )));
        }
        let j = missing[0];
        let have = |i: usize| -> Result<&MonotoneMap<T>> {
            let g = self.g[i].as_ref().unwrap();
            check_ray(g)?;
            Ok(g)
        };
        // from g4∘g3∘g2∘g1 = ι
        let derived = match j {
            0 => have(1)?.invert()?.compose(&have(2)?.invert()?)?.compose(&have(3)?.invert()?)?,
            1 => have(2)?.invert()?.compose(&have(3)?.invert()?)?.compose(&have(0)?.invert()?)?,
            2 => have(3)?.invert()?.compose(&have(0)?.invert()?)?.compose(&have(1)?.invert()?)?,
            _ => have(0)?.invert()?.compose(&have(1)?.invert()?)?.compose(&have(2)?.invert()?)?,
        };
        check_ray(&derived)?;
        Ok((j, derived))
    }

    /// All four rays, deriving the missing one if necessary.
    pub fn complete(&self) -> Result<[MonotoneMap<T>; 4]> {
        let mut filled = self.clone();
        if filled.g.iter().any(|g| g.is_none()) {
            let (j, g) = filled.fourth_ray()?;
            filled.g[j] = Some(g);
        }
        let out = filled.g.map(Option::unwrap);
        for g in &out {
            check_ray(g)?;
        }
        Ok(out)
    }
}

/// Builds the crossing-contour map from a ray family and the free part p,
/// an increasing bijection of [0, ∞) fixing 0. The resulting map's u = 0
/// and v = 0 contours contain the four rays.
pub fn realize_crossing<T: Real>(rays: &RayFamily<T>, p: &MonotoneMap<T>) -> Result<LCMap<T>> {
    check_ray(p)?;
    let g = rays.complete()?;
    let res = cyclic_residual(&g, 101);
    if res > T::of(1e-6) {
        return Err(LcError::CyclicViolation(res.to_f64().unwrap_or(f64::NAN)));
    }
    let k_neg = p.clone();
    let h_neg = p.compose(&g[2])?;
    let k_pos = h_neg.compose(&g[1])?;
    let h_pos = k_pos.compose(&g[0])?;
    let h = MonotoneMap::from_parts(&h_neg, &h_pos)?;
    let k = MonotoneMap::from_parts(&k_neg, &k_pos)?;
    Ok(LCMap::new(h, k))
}

/// Recovers the ray family (g₁, g₂, g₃, g₄) of a crossing map from its
/// half-line parts.
pub fn rays_of_crossing<T: Real>(m: &LCMap<T>) -> Result<[MonotoneMap<T>; 4]> {
    let h_pos = m.h().positive_part()?;
    let h_neg = m.h().negative_part()?;
    let k_pos = m.k().positive_part()?;
    let k_neg = m.k().negative_part()?;
    let g1 = k_pos.invert()?.compose(&h_pos)?;
    let g2 = h_neg.invert()?.compose(&k_pos)?;
    let g3 = k_neg.invert()?.compose(&h_neg)?;
    let g4 = h_pos.invert()?.compose(&k_neg)?;
    Ok([g1, g2, g3, g4])
}

/// Gauge data: an odd increasing bijection ℓ with an optional shift of the
/// crossing image, given in characteristic coordinates (U₀, V₀).
#[derive(Clone, Debug)]
pub struct GaugeMap<T> {
    pub ell: MonotoneMap<T>,
    pub shift: (T, T),
}

impl<T: Real> GaugeMap<T> {
    pub fn new(ell: MonotoneMap<T>) -> Result<Self> {
        Self::with_shift(ell, (T::zero(), T::zero()))
    }

    pub fn with_shift(ell: MonotoneMap<T>, shift: (T, T)) -> Result<Self> {
        if !ell.is_increasing() {
            return Err(LcError::NotMonotone("gauge map must be increasing".into()));
        }
        let r = ell.oddness_residual(65)?;
        if r > T::of(1e-9) {
            return Err(LcError::NotOdd(r.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(GaugeMap { ell, shift })
    }
}

/// h₂ = ℓ∘h₁ and k₂ = ℓ∘k₁, conjugated by the translation when the
/// crossing image is shifted away from the origin.
pub fn gauge_equivalent_crossing<T: Real>(m: &LCMap<T>, gauge: &GaugeMap<T>) -> Result<LCMap<T>> {
    let (u0, v0) = gauge.shift;
    let conjugated = |f: &MonotoneMap<T>, c: T| -> Result<MonotoneMap<T>> {
        if c == T::zero() {
            gauge.ell.compose(f)
        } else {
            MonotoneMap::affine(T::one(), c)
                .compose(&gauge.ell)?
                .compose(&MonotoneMap::affine(T::one(), -c))?
                .compose(f)
        }
    };
    Ok(LCMap::new(
        conjugated(m.h(), u0)?,
        conjugated(m.k(), v0)?,
    ))
}

/// Checks whether m2 = λ∘m1 for some odd gauge ℓ; recovers ℓ = h₂∘h₁⁻¹ and
/// verifies oddness and k-consistency.
pub fn recover_gauge<T: Real>(m1: &LCMap<T>, m2: &LCMap<T>) -> Result<MonotoneMap<T>> {
    let ell = m2.h().compose(&m1.h().invert()?)?;
    let odd = ell.oddness_residual(65)?;
    if odd > T::of(1e-9) {
        return Err(LcError::NotOdd(odd.to_f64().unwrap_or(f64::NAN)));
    }
    let k2 = ell.compose(m1.k())?;
    let r = k2.max_difference(m2.k(), 65)?;
    if r > T::of(1e-9) {
        return Err(LcError::InconsistentGauge(r.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(ell)
}

/// Quadrilateral data for the square case: sides g₁..g₄ as endpoint-fixing
/// bijections of [0, 1] (any one possibly absent) and the vertex positions
/// (X₁, X₂, Y₁, Y₂), all positive, for vertices (X₁,0), (−X₂,0), (0,Y₁),
/// (0,−Y₂) on the characteristic axes.
#[derive(Clone, Debug)]
pub struct Quadrilateral<T> {
    pub g: [Option<MonotoneMap<T>>; 4],
    pub vertices: [T; 4],
}

impl<T: Real> Quadrilateral<T> {
    pub fn unit(g: [Option<MonotoneMap<T>>; 4]) -> Self {
        Quadrilateral {
            g,
            vertices: [T::one(); 4],
        }
    }

    pub fn from_four(g: [MonotoneMap<T>; 4]) -> Self {
        let [g1, g2, g3, g4] = g;
        Self::unit([Some(g1), Some(g2), Some(g3), Some(g4)])
    }

    pub fn is_normalized(&self) -> bool {
        self.vertices
            .iter()
            .all(|&v| (v - T::one()).abs() < T::of(STRUCT_TOL))
    }

    /// Derives the missing side from the twisted cyclic condition. Returns
    /// the zero-based index of the slot that was filled.
    pub fn fourth_side(&self) -> Result<(usize, MonotoneMap<T>)> {
        let missing: Vec<usize> = (0..4).filter(|&j| self.g[j].is_none()).collect();
        if missing.len() != 1 {
            return Err(LcError::DomainMismatch(format!(
                "exactly one side must be absent, found {} absent",
                missing.len()
            )));
        }
        let j = missing[0];
        let have = |i: usize| -> Result<MonotoneMap<T>> {
            let g = self.g[i].as_ref().unwrap();
            check_unit(g)?;
            Ok(g.clone())
        };
        // from g4∘g̃3∘g2∘g̃1 = ι
        let derived = match j {
            0 => {
                let t = have(1)?
                    .invert()?
                    .compose(&have(2)?.tilde()?.invert()?)?
                    .compose(&have(3)?.invert()?)?;
                t.tilde()?
            }
            1 => have(2)?
                .tilde()?
                .invert()?
                .compose(&have(3)?.invert()?)?
                .compose(&have(0)?.tilde()?.invert()?)?,
            2 => {
                let t = have(3)?
                    .invert()?
                    .compose(&have(0)?.tilde()?.invert()?)?
                    .compose(&have(1)?.invert()?)?;
                t.tilde()?
            }
            _ => have(0)?
                .tilde()?
                .invert()?
                .compose(&have(1)?.invert()?)?
                .compose(&have(2)?.tilde()?.invert()?)?,
        };
        check_unit(&derived)?;
        Ok((j, derived))
    }

    pub fn complete(&self) -> Result<[MonotoneMap<T>; 4]> {
        let mut filled = self.clone();
        if filled.g.iter().any(|g| g.is_none()) {
            let (j, g) = filled.fourth_side()?;
            filled.g[j] = Some(g);
        }
        let out = filled.g.map(Option::unwrap);
        for g in &out {
            check_unit(g)?;
        }
        Ok(out)
    }
}

/// Axis-scaling map taking quadrilateral vertices to (±1, 0), (0, ±1):
/// each characteristic half-axis is scaled by the appropriate positive
/// number. Returns the rescaled quadrilateral and the scaling map.
pub fn quad_normalize<T: Real>(q: &Quadrilateral<T>) -> Result<(Quadrilateral<T>, LCMap<T>)> {
    let [x1, x2, y1, y2] = q.vertices;
    if !(x1 > T::zero() && x2 > T::zero() && y1 > T::zero() && y2 > T::zero()) {
        return Err(LcError::VerticesNotOnAxes);
    }
    let half_scale = |pos: T, neg: T| {
        MonotoneMap::new(MapExpr::Piecewise {
            split: T::zero(),
            left: Box::new(MapExpr::Affine {
                a: T::one() / neg,
                b: T::zero(),
            }),
            right: Box::new(MapExpr::Affine {
                a: T::one() / pos,
                b: T::zero(),
            }),
        })
    };
    let scaling = LCMap::new(half_scale(x1, x2), half_scale(y1, y2));
    let rescaled = Quadrilateral {
        g: q.g.clone(),
        vertices: [T::one(); 4],
    };
    Ok((rescaled, scaling))
}

fn identity_beyond_unit<T: Real>(core: MonotoneMap<T>) -> MonotoneMap<T> {
    let left = MonotoneMap::identity().restrict_to(Interval {
        lo: T::neg_infinity(),
        hi: -T::one(),
    });
    let right = MonotoneMap::identity().restrict_to(Interval {
        lo: T::one(),
        hi: T::infinity(),
    });
    let upper = MonotoneMap::piecewise(T::one(), core, right);
    MonotoneMap::piecewise(-T::one(), left, upper)
}

/// Builds the square map from a normalized quadrilateral and the free part
/// p ∈ G_[0,1]: k₋ = p̃, h₋ = p∘g̃₃, k₊ = p̃∘g₃∘g̃₂, h₊ = p∘g̃₃∘g₂∘g̃₁. The
/// assembled h, k fix −1, 0, 1 and continue as the identity outside [−1, 1].
pub fn realize_square<T: Real>(q: &Quadrilateral<T>, p: &MonotoneMap<T>) -> Result<LCMap<T>> {
    check_unit(p)?;
    if !q.is_normalized() {
        return Err(LcError::VerticesNotOnAxes);
    }
    let g = q.complete()?;
    let res = twisted_cyclic_residual(&g, 101)?;
    if res > T::of(1e-6) {
        return Err(LcError::CyclicViolation(res.to_f64().unwrap_or(f64::NAN)));
    }
    let p_tilde = p.tilde()?;
    let g1t = g[0].tilde()?;
    let g2t = g[1].tilde()?;
    let g3t = g[2].tilde()?;
    let k_neg = p_tilde.clone();
    let h_neg = p.compose(&g3t)?;
    let k_pos = p_tilde.compose(&g[2])?.compose(&g2t)?;
    let h_pos = p.compose(&g3t)?.compose(&g[1])?.compose(&g1t)?;
    let h = identity_beyond_unit(MonotoneMap::from_parts(&h_neg, &h_pos)?);
    let k = identity_beyond_unit(MonotoneMap::from_parts(&k_neg, &k_pos)?);
    Ok(LCMap::new(h, k))
}

/// Recovers the sides (g₁, g₂, g₃, g₄) of a square map from its parts
/// restricted to [0, 1].
pub fn sides_of_square<T: Real>(m: &LCMap<T>) -> Result<[MonotoneMap<T>; 4]> {
    let unit = Interval::unit();
    let h_pos = m.h().positive_part()?.restrict_to(unit);
    let h_neg = m.h().negative_part()?.restrict_to(unit);
    let k_pos = m.k().positive_part()?.restrict_to(unit);
    let k_neg = m.k().negative_part()?.restrict_to(unit);
    let g1 = k_pos.invert()?.compose(&h_pos.tilde()?)?;
    let g2 = h_neg.invert()?.compose(&k_pos.tilde()?)?;
    let g3 = k_neg.invert()?.compose(&h_neg.tilde()?)?;
    let g4 = h_pos.invert()?.compose(&k_neg.tilde()?)?;
    Ok([g1, g2, g3, g4])
}

/// Flat top and bottom: sides (ι, g, ι, g⁻¹). The lateral sides are then
/// related by reflection about the x-axis and translation.
pub fn flat_top_bottom<T: Real>(
    g: &MonotoneMap<T>,
    p: &MonotoneMap<T>,
) -> Result<(Quadrilateral<T>, LCMap<T>)> {
    check_unit(g)?;
    let q = Quadrilateral::from_four([
        MonotoneMap::identity().restrict_to(Interval::unit()),
        g.clone(),
        MonotoneMap::identity().restrict_to(Interval::unit()),
        g.invert()?,
    ]);
    let m = realize_square(&q, p)?;
    Ok((q, m))
}

/// Left-right symmetric square map: sides (g̃⁻¹∘g, g, ι, g̃⁻¹). The top side
/// satisfies g̃₁⁻¹ = g₁, making C₁ symmetric about the y-axis.
pub fn left_right_symmetric<T: Real>(
    g: &MonotoneMap<T>,
    p: &MonotoneMap<T>,
) -> Result<(Quadrilateral<T>, LCMap<T>)> {
    check_unit(g)?;
    let gt_inv = g.tilde()?.invert()?;
    let q = Quadrilateral::from_four([
        gt_inv.compose(g)?,
        g.clone(),
        MonotoneMap::identity().restrict_to(Interval::unit()),
        gt_inv,
    ]);
    let m = realize_square(&q, p)?;
    Ok((q, m))
}

/// Unfolds an even p with bijective positive part into the invertible map
/// with h = k = odd extension of p₊. The negated variant restricts p to
/// the negative half-line instead, giving (U, V) = −(h(X), h(Y)).
pub fn unfold<T: Real>(p: &MonotoneMap<T>, negated: bool) -> Result<LCMap<T>> {
    let even = p.evenness_residual(129)?;
    if even > T::of(1e-9) {
        return Err(LcError::NotEven(even.to_f64().unwrap_or(f64::NAN)));
    }
    let pos = p.positive_part()?;
    if !pos.is_increasing() || pos.eval(T::zero())?.abs() > T::of(STRUCT_TOL) {
        return Err(LcError::NotBijectiveOnHalfLine);
    }
    let h = pos.odd_extend()?;
    let h = if negated { h.negate_of() } else { h };
    Ok(LCMap::new(h.clone(), h))
}

/// Crops an odd bijection with positive derivative off 0:
/// H_c(t) = h(t+c) − h(c) for t ≥ 0, h(t−c) − h(−c) for t ≤ 0. For c > 0
/// the contours of (H_c(X), H_c(Y)) cross transversely everywhere; c = 0
/// returns the original map, and H_c is continuous in c.
pub fn crop<T: Real>(h: &MonotoneMap<T>, c: T) -> Result<LCMap<T>> {
    if c < T::zero() {
        return Err(LcError::Domain(
            c.to_f64().unwrap_or(f64::NAN),
            0.0,
            f64::INFINITY,
        ));
    }
    let odd = h.oddness_residual(129)?;
    if odd > T::of(1e-9) {
        return Err(LcError::NotOdd(odd.to_f64().unwrap_or(f64::NAN)));
    }
    for t in h.domain().grid(101) {
        if t.abs() < T::of(1e-3) {
            continue;
        }
        if h.derivative_at(t) <= T::zero() {
            return Err(LcError::NonPositiveDerivative);
        }
    }
    if c == T::zero() {
        return Ok(LCMap::new(h.clone(), h.clone()));
    }
    let shifted = |sign: T| -> MonotoneMap<T> {
        // h(t + sign·c) − h(sign·c)
        let offset = h.expr().eval_raw(sign * c);
        MonotoneMap::new(MapExpr::Compose {
            outer: Box::new(MapExpr::Affine {
                a: T::one(),
                b: -offset,
            }),
            inner: Box::new(MapExpr::Compose {
                outer: Box::new(h.expr().clone()),
                inner: Box::new(MapExpr::Affine {
                    a: T::one(),
                    b: sign * c,
                }),
            }),
        })
    };
    let left = shifted(-T::one()).restrict_to(Interval {
        lo: h.domain().lo + c,
        hi: T::zero(),
    });
    let right = shifted(T::one()).restrict_to(Interval {
        lo: T::zero(),
        hi: h.domain().hi - c,
    });
    let hc = MonotoneMap::piecewise(T::zero(), left, right);
    if !hc.is_increasing() {
        return Err(LcError::NonPositiveDerivative);
    }
    Ok(LCMap::new(hc.clone(), hc))
}
