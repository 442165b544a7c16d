//! Algebra of strictly monotone real bijections.
//!
//! Maps are kept as recursive expression trees so that long composition
//! chains evaluate without accumulated table error; sampling only happens
//! in checks and rendering.

use std::sync::Arc;

use crate::error::{LcError, Result};
use crate::interval::Interval;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    fn combine(self, other: Direction) -> Direction {
        if self == other {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }
}

/// A user-supplied map given by closures, e.g. a numeric antiderivative.
#[derive(Clone)]
pub struct CustomMap<T> {
    pub f: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub inverse: Option<Arc<dyn Fn(T) -> T + Send + Sync>>,
    pub direction: Option<Direction>,
    pub label: String,
}

impl<T> std::fmt::Debug for CustomMap<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CustomMap({})", self.label)
    }
}

/// Recursive representation of a real map of one variable.
///
/// Monotone combinators (`Inverse`, `Tilde`, ...) are only meaningful for
/// monotone operands; folded (even, piecewise-monotone) maps are still
/// representable for evaluation, rendering and symmetry detection.
#[derive(Clone, Debug)]
pub enum MapExpr<T> {
    Identity,
    /// a·t + b with a ≠ 0.
    Affine { a: T, b: T },
    /// sgn(t)·|t|^p, odd and increasing for p > 0.
    PowerOdd { p: T },
    /// t^p; extends to t < 0 for integer p (even or odd), else half-line only.
    Power { p: T },
    /// |t|^p, even.
    AbsPow { p: T },
    /// e^t − 1.
    Exp1,
    Sin,
    Cos,
    /// sin restricted to [−π/2, π/2], increasing.
    SinMono,
    /// The ridge map: 2(1+a)t + t² for t ≥ 0, 2(1−a)t − t² for t ≤ 0.
    Ridge { a: T },
    /// c₀ + c₁t + c₂t² + ...
    Poly { coeffs: Vec<T> },
    PiecewiseLinear { xs: Vec<T>, ys: Vec<T> },
    Piecewise {
        split: T,
        left: Box<MapExpr<T>>,
        right: Box<MapExpr<T>>,
    },
    /// outer ∘ inner
    Compose {
        outer: Box<MapExpr<T>>,
        inner: Box<MapExpr<T>>,
    },
    Inverse { inner: Box<MapExpr<T>> },
    /// sgn(t)·half(|t|): the odd extension when half fixes 0.
    OddExtension { half: Box<MapExpr<T>> },
    /// s ↦ 1 − g(1−s) on [0, 1].
    Tilde { inner: Box<MapExpr<T>> },
    /// t ↦ −g(t).
    Negate { inner: Box<MapExpr<T>> },
    Custom(CustomMap<T>),
}

fn is_integer<T: Real>(p: T) -> Option<i64> {
    let r = p.round();
    if (p - r).abs() < T::epsilon() * T::of(8.0) {
        r.to_i64()
    } else {
        None
    }
}

impl<T: Real> MapExpr<T> {
    /// Raw structural evaluation; no domain checking, tolerates ±∞ inputs
    /// (IEEE limits are the intended values).
    pub fn eval_raw(&self, t: T) -> T {
        match self {
            MapExpr::Identity => t,
            MapExpr::Affine { a, b } => *a * t + *b,
            MapExpr::PowerOdd { p } => {
                if t >= T::zero() {
                    t.powf(*p)
                } else {
                    -(-t).powf(*p)
                }
            }
            MapExpr::Power { p } => {
                if t >= T::zero() {
                    t.powf(*p)
                } else {
                    match is_integer(*p) {
                        Some(n) if n % 2 == 0 => (-t).powf(*p),
                        Some(_) => -(-t).powf(*p),
                        None => T::nan(),
                    }
                }
            }
            MapExpr::AbsPow { p } => t.abs().powf(*p),
            MapExpr::Exp1 => t.exp_m1(),
            MapExpr::Sin => t.sin(),
            MapExpr::Cos => t.cos(),
            MapExpr::SinMono => t.sin(),
            MapExpr::Ridge { a } => {
                let two = T::of(2.0);
                if t >= T::zero() {
                    two * (T::one() + *a) * t + t * t
                } else {
                    two * (T::one() - *a) * t - t * t
                }
            }
            MapExpr::Poly { coeffs } => {
                let mut acc = T::zero();
                for &c in coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                acc
            }
            MapExpr::PiecewiseLinear { xs, ys } => pwl_eval(xs, ys, t),
            MapExpr::Piecewise { split, left, right } => {
                if t < *split {
                    left.eval_raw(t)
                } else {
                    right.eval_raw(t)
                }
            }
            MapExpr::Compose { outer, inner } => outer.eval_raw(inner.eval_raw(t)),
            MapExpr::Inverse { inner } => {
                invert_expr(inner, inner.natural_domain(), t).unwrap_or_else(|_| T::nan())
            }
            MapExpr::OddExtension { half } => {
                if t >= T::zero() {
                    half.eval_raw(t)
                } else {
                    -half.eval_raw(-t)
                }
            }
            MapExpr::Tilde { inner } => T::one() - inner.eval_raw(T::one() - t),
            MapExpr::Negate { inner } => -inner.eval_raw(t),
            MapExpr::Custom(c) => (c.f)(t),
        }
    }

    /// Domain the representation naturally lives on.
    pub fn natural_domain(&self) -> Interval<T> {
        match self {
            MapExpr::Power { p } => {
                if is_integer(*p).is_some() {
                    Interval::full()
                } else {
                    Interval::half_line()
                }
            }
            MapExpr::SinMono => {
                let h = T::of(std::f64::consts::FRAC_PI_2);
                Interval::new(-h, h)
            }
            MapExpr::PiecewiseLinear { xs, .. } => {
                Interval::new(*xs.first().unwrap(), *xs.last().unwrap())
            }
            MapExpr::Piecewise { split, left, right } => {
                let l = left.natural_domain();
                let r = right.natural_domain();
                Interval {
                    lo: l.lo.min(*split),
                    hi: r.hi.max(*split),
                }
            }
            MapExpr::Compose { outer, inner } => {
                compose_domain(outer, inner).unwrap_or_else(|| inner.natural_domain())
            }
            MapExpr::Inverse { inner } => {
                // domain of the inverse is the range of the inner map
                range_of(inner, inner.natural_domain())
            }
            MapExpr::OddExtension { half } => {
                let h = half.natural_domain();
                Interval {
                    lo: -h.hi,
                    hi: h.hi,
                }
            }
            MapExpr::Tilde { .. } => Interval::unit(),
            MapExpr::Negate { inner } => inner.natural_domain(),
            _ => Interval::full(),
        }
    }
}

fn pwl_eval<T: Real>(xs: &[T], ys: &[T], t: T) -> T {
    let n = xs.len();
    // extrapolate with the end segments so rounding slack is harmless
    let seg = if t <= xs[0] {
        0
    } else if t >= xs[n - 1] {
        n - 2
    } else {
        match xs.partition_point(|&x| x <= t) {
            0 => 0,
            k => k - 1,
        }
    };
    let (x0, x1, y0, y1) = (xs[seg], xs[seg + 1], ys[seg], ys[seg + 1]);
    y0 + (t - x0) * (y1 - y0) / (x1 - x0)
}

/// Range of `expr` restricted to `domain`, assuming monotone behaviour;
/// infinite endpoints are evaluated as IEEE limits.
pub fn range_of<T: Real>(expr: &MapExpr<T>, domain: Interval<T>) -> Interval<T> {
    let a = expr.eval_raw(domain.lo);
    let b = expr.eval_raw(domain.hi);
    if a.is_nan() || b.is_nan() {
        return Interval::full();
    }
    if a <= b {
        Interval { lo: a, hi: b }
    } else {
        Interval { lo: b, hi: a }
    }
}

fn compose_domain<T: Real>(outer: &MapExpr<T>, inner: &MapExpr<T>) -> Option<Interval<T>> {
    let di = inner.natural_domain();
    let d_outer = outer.natural_domain();
    let ri = range_of(inner, di);
    if ri.lo >= d_outer.lo && ri.hi <= d_outer.hi {
        return Some(di);
    }
    // shrink the inner domain so its image fits the outer domain
    let dir = direction_of(inner, di)?;
    let (target_lo, target_hi) = match dir {
        Direction::Increasing => (ri.lo.max(d_outer.lo), ri.hi.min(d_outer.hi)),
        Direction::Decreasing => (ri.lo.max(d_outer.lo), ri.hi.min(d_outer.hi)),
    };
    if target_lo > target_hi {
        return None;
    }
    let solve = |y: T, fallback: T| -> T {
        if y.is_infinite() {
            fallback
        } else {
            invert_expr(inner, di, y).unwrap_or(fallback)
        }
    };
    let (t0, t1) = match dir {
        Direction::Increasing => (solve(target_lo, di.lo), solve(target_hi, di.hi)),
        Direction::Decreasing => (solve(target_hi, di.lo), solve(target_lo, di.hi)),
    };
    if t0 < t1 {
        Some(Interval { lo: t0, hi: t1 })
    } else {
        None
    }
}

/// Structural direction inference, aware of the domain restriction.
pub fn direction_of<T: Real>(expr: &MapExpr<T>, domain: Interval<T>) -> Option<Direction> {
    use Direction::*;
    match expr {
        MapExpr::Identity | MapExpr::Exp1 | MapExpr::SinMono => Some(Increasing),
        MapExpr::Affine { a, .. } => {
            if *a > T::zero() {
                Some(Increasing)
            } else if *a < T::zero() {
                Some(Decreasing)
            } else {
                None
            }
        }
        MapExpr::PowerOdd { p } => (*p > T::zero()).then_some(Increasing),
        MapExpr::Power { p } => {
            if *p <= T::zero() {
                return None;
            }
            match is_integer(*p) {
                Some(n) if n % 2 != 0 => Some(Increasing),
                _ => half_line_direction(domain, Increasing, is_integer(*p).is_some()),
            }
        }
        MapExpr::AbsPow { p } => {
            if *p <= T::zero() {
                None
            } else {
                half_line_direction(domain, Increasing, true)
            }
        }
        MapExpr::Sin => {
            let h = T::of(std::f64::consts::FRAC_PI_2);
            (domain.lo >= -h && domain.hi <= h).then_some(Increasing)
        }
        MapExpr::Cos => {
            let pi = T::of(std::f64::consts::PI);
            if domain.lo >= T::zero() && domain.hi <= pi {
                Some(Decreasing)
            } else if domain.lo >= -pi && domain.hi <= T::zero() {
                Some(Increasing)
            } else {
                None
            }
        }
        MapExpr::Ridge { a } => (a.abs() <= T::one()).then_some(Increasing),
        MapExpr::Poly { coeffs } => poly_direction(coeffs, domain),
        MapExpr::PiecewiseLinear { ys, .. } => {
            let inc = ys.windows(2).all(|w| w[0] < w[1]);
            let dec = ys.windows(2).all(|w| w[0] > w[1]);
            if inc {
                Some(Increasing)
            } else if dec {
                Some(Decreasing)
            } else {
                None
            }
        }
        MapExpr::Piecewise { split, left, right } => {
            let dl = Interval {
                lo: domain.lo,
                hi: *split,
            };
            let dr = Interval {
                lo: *split,
                hi: domain.hi,
            };
            let a = direction_of(left, dl)?;
            let b = direction_of(right, dr)?;
            if a != b {
                return None;
            }
            let lv = left.eval_raw(*split);
            let rv = right.eval_raw(*split);
            let jump_ok = match a {
                Increasing => lv <= rv + T::epsilon().sqrt(),
                Decreasing => lv >= rv - T::epsilon().sqrt(),
            };
            jump_ok.then_some(a)
        }
        MapExpr::Compose { outer, inner } => {
            let structural = || {
                let di = inner.natural_domain().intersect(&domain)?;
                let id = direction_of(inner, di)?;
                let od = direction_of(outer, range_of(inner, di))?;
                Some(od.combine(id))
            };
            structural().or_else(|| sampled_direction(expr, domain))
        }
        MapExpr::Inverse { inner } => direction_of(inner, inner.natural_domain())
            .or_else(|| sampled_direction(expr, domain)),
        MapExpr::OddExtension { half } => {
            let hd = half
                .natural_domain()
                .intersect(&Interval::half_line())?;
            let d = direction_of(half, hd)?;
            let at0 = half.eval_raw(T::zero());
            match d {
                Increasing if at0 >= -T::epsilon() => Some(Increasing),
                _ => None,
            }
        }
        MapExpr::Tilde { inner } => direction_of(inner, Interval::unit()),
        MapExpr::Negate { inner } => direction_of(inner, domain).map(Direction::flip),
        MapExpr::Custom(c) => c.direction,
    }
}

fn half_line_direction<T: Real>(
    domain: Interval<T>,
    on_positive: Direction,
    even_extends: bool,
) -> Option<Direction> {
    if domain.lo >= T::zero() {
        Some(on_positive)
    } else if even_extends && domain.hi <= T::zero() {
        Some(on_positive.flip())
    } else {
        None
    }
}

/// Fallback when structural direction derivation loses a domain
/// restriction (inverses of folded maps restricted to one branch): strict
/// monotonicity of sampled values on the clipped domain.
fn sampled_direction<T: Real>(expr: &MapExpr<T>, domain: Interval<T>) -> Option<Direction> {
    let iv = domain.clip(T::of(32.0));
    if !(iv.hi > iv.lo) {
        return None;
    }
    let n = 257;
    let step = (iv.hi - iv.lo) / T::of(n as f64 - 1.0);
    let mut prev = expr.eval_raw(iv.lo);
    let (mut inc, mut dec) = (true, true);
    for i in 1..n {
        let v = expr.eval_raw(iv.lo + step * T::of(i as f64));
        if !v.is_finite() {
            return None;
        }
        if v <= prev {
            inc = false;
        }
        if v >= prev {
            dec = false;
        }
        prev = v;
    }
    if inc {
        Some(Direction::Increasing)
    } else if dec {
        Some(Direction::Decreasing)
    } else {
        None
    }
}

fn poly_direction<T: Real>(coeffs: &[T], domain: Interval<T>) -> Option<Direction> {
    let nonzero = coeffs.iter().rposition(|c| *c != T::zero())?;
    if nonzero == 0 {
        return None; // constant
    }
    if nonzero == 1 {
        return if coeffs[1] > T::zero() {
            Some(Direction::Increasing)
        } else {
            Some(Direction::Decreasing)
        };
    }
    // heuristic: strict monotonicity of sampled values on the clipped domain
    let iv = domain.clip(T::of(32.0));
    let n = 513;
    let step = (iv.hi - iv.lo) / T::of(n as f64 - 1.0);
    let expr = MapExpr::Poly {
        coeffs: coeffs.to_vec(),
    };
    let mut prev = expr.eval_raw(iv.lo);
    let mut inc = true;
    let mut dec = true;
    for i in 1..n {
        let v = expr.eval_raw(iv.lo + step * T::of(i as f64));
        if v <= prev {
            inc = false;
        }
        if v >= prev {
            dec = false;
        }
        prev = v;
    }
    if inc {
        Some(Direction::Increasing)
    } else if dec {
        Some(Direction::Decreasing)
    } else {
        None
    }
}

const MAX_BISECT_ITERS: usize = 200;

/// Solves `expr(t) = y` on `domain`: closed forms where available, else
/// bracketed bisection (unconditionally convergent for monotone maps).
pub fn invert_expr<T: Real>(expr: &MapExpr<T>, domain: Interval<T>, y: T) -> Result<T> {
    match expr {
        MapExpr::Identity => Ok(y),
        MapExpr::Affine { a, b } => Ok((y - *b) / *a),
        MapExpr::PowerOdd { p } => Ok(if y >= T::zero() {
            y.powf(T::one() / *p)
        } else {
            -(-y).powf(T::one() / *p)
        }),
        MapExpr::Power { p } => {
            if y >= T::zero() {
                Ok(y.powf(T::one() / *p))
            } else if matches!(is_integer(*p), Some(n) if n % 2 != 0) {
                Ok(-(-y).powf(T::one() / *p))
            } else if domain.hi <= T::zero() && matches!(is_integer(*p), Some(n) if n % 2 == 0) {
                Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)))
            } else {
                Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)))
            }
        }
        MapExpr::AbsPow { p } => {
            if y < T::zero() {
                return Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)));
            }
            let r = y.powf(T::one() / *p);
            if domain.lo >= T::zero() {
                Ok(r)
            } else if domain.hi <= T::zero() {
                Ok(-r)
            } else {
                Err(LcError::NotInvertible)
            }
        }
        MapExpr::Exp1 => {
            if y > -T::one() {
                Ok(y.ln_1p())
            } else {
                Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)))
            }
        }
        MapExpr::SinMono => {
            if y.abs() <= T::one() {
                Ok(y.asin())
            } else {
                Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)))
            }
        }
        MapExpr::Ridge { a } => {
            let one = T::one();
            if y >= T::zero() {
                let c = one + *a;
                Ok(-c + (c * c + y).sqrt())
            } else {
                let c = one - *a;
                Ok(c - (c * c - y).sqrt())
            }
        }
        MapExpr::PiecewiseLinear { xs, ys } => {
            let inc = ys[0] < *ys.last().unwrap();
            let (xi, yi): (Vec<T>, Vec<T>) = if inc {
                (ys.clone(), xs.clone())
            } else {
                (
                    ys.iter().rev().cloned().collect(),
                    xs.iter().rev().cloned().collect(),
                )
            };
            if !xi.windows(2).all(|w| w[0] < w[1]) {
                return bisect(expr, domain, y);
            }
            Ok(pwl_eval(&xi, &yi, y))
        }
        MapExpr::Piecewise { split, left, right } => {
            let dir = direction_of(expr, domain).ok_or(LcError::NotInvertible)?;
            let lv = left.eval_raw(*split);
            let rv = right.eval_raw(*split);
            let dl = Interval {
                lo: domain.lo,
                hi: *split,
            };
            let dr = Interval {
                lo: *split,
                hi: domain.hi,
            };
            match dir {
                Direction::Increasing => {
                    if y >= rv {
                        invert_expr(right, dr, y)
                    } else if y <= lv {
                        invert_expr(left, dl, y)
                    } else {
                        // value falls in a jump; the split is the generalized preimage
                        Ok(*split)
                    }
                }
                Direction::Decreasing => {
                    if y <= rv {
                        invert_expr(right, dr, y)
                    } else if y >= lv {
                        invert_expr(left, dl, y)
                    } else {
                        Ok(*split)
                    }
                }
            }
        }
        MapExpr::Compose { outer, inner } => {
            let mid = invert_expr(outer, outer.natural_domain(), y)?;
            invert_expr(inner, inner.natural_domain().intersect(&domain).unwrap_or(domain), mid)
        }
        MapExpr::Inverse { inner } => Ok(inner.eval_raw(y)),
        MapExpr::OddExtension { half } => {
            // the half of an odd extension lives on [0, ∞) regardless of
            // the representation's natural domain
            let hd = half
                .natural_domain()
                .intersect(&Interval::half_line())
                .unwrap_or_else(Interval::half_line);
            if y >= T::zero() {
                invert_expr(half, hd, y)
            } else {
                invert_expr(half, hd, -y).map(|t| -t)
            }
        }
        MapExpr::Tilde { inner } => {
            invert_expr(inner, Interval::unit(), T::one() - y).map(|t| T::one() - t)
        }
        MapExpr::Negate { inner } => invert_expr(inner, domain, -y),
        MapExpr::Custom(c) => match &c.inverse {
            Some(g) => Ok((g)(y)),
            None => bisect(expr, domain, y),
        },
        _ => bisect(expr, domain, y),
    }
}

/// Bracketed bisection for monotone `expr` on `domain`.
fn bisect<T: Real>(expr: &MapExpr<T>, domain: Interval<T>, y: T) -> Result<T> {
    let dir = direction_of(expr, domain).ok_or(LcError::NotInvertible)?;
    // target in increasing orientation
    let f = |t: T| match dir {
        Direction::Increasing => expr.eval_raw(t),
        Direction::Decreasing => -expr.eval_raw(t),
    };
    let yy = match dir {
        Direction::Increasing => y,
        Direction::Decreasing => -y,
    };

    // find a bracket [a, b] with f(a) <= yy <= f(b)
    let (mut a, mut b);
    if domain.is_finite() {
        a = domain.lo;
        b = domain.hi;
        if yy < f(a) || yy > f(b) {
            return Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)));
        }
    } else {
        // range check via IEEE limits when they are meaningful
        let lim_lo = f(domain.lo);
        let lim_hi = f(domain.hi);
        if !lim_lo.is_nan() && yy < lim_lo {
            return Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)));
        }
        if !lim_hi.is_nan() && yy > lim_hi {
            return Err(LcError::Range(y.to_f64().unwrap_or(f64::NAN)));
        }
        let anchor = if domain.contains(T::zero()) {
            T::zero()
        } else if domain.lo.is_finite() {
            domain.lo
        } else {
            domain.hi
        };
        let mut step = T::one();
        a = anchor;
        b = anchor;
        let mut found_lo = f(a) <= yy;
        let mut found_hi = f(b) >= yy;
        let mut iters = 0;
        while !(found_lo && found_hi) {
            if !found_lo {
                let cand = (anchor - step).max(domain.lo);
                a = cand;
                found_lo = f(a) <= yy;
            }
            if !found_hi {
                let cand = (anchor + step).min(domain.hi);
                b = cand;
                found_hi = f(b) >= yy;
            }
            step = step * T::of(2.0);
            iters += 1;
            if iters > 120 {
                return Err(LcError::Convergence(y.to_f64().unwrap_or(f64::NAN)));
            }
        }
    }

    let tol = T::inverse_tol() * T::one().max(y.abs());
    let half = T::of(0.5);
    let mut mid = (a + b) * half;
    for _ in 0..MAX_BISECT_ITERS {
        mid = (a + b) * half;
        let v = f(mid);
        if (v - yy).abs() <= tol {
            return Ok(mid);
        }
        if v < yy {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= mid.abs().max(T::one()) * T::epsilon() * T::of(2.0) {
            break;
        }
    }
    Ok(mid)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Side {
    Left,
    Right,
    Central,
}

/// Structural derivative; `side` selects the one-sided branch at breakpoints.
pub fn derivative_expr<T: Real>(expr: &MapExpr<T>, t: T, side: Side) -> T {
    match expr {
        MapExpr::Identity => T::one(),
        MapExpr::Affine { a, .. } => *a,
        MapExpr::PowerOdd { p } => *p * t.abs().powf(*p - T::one()),
        MapExpr::Power { p } => {
            if t >= T::zero() {
                *p * t.powf(*p - T::one())
            } else {
                match is_integer(*p) {
                    Some(n) if n % 2 == 0 => -*p * (-t).powf(*p - T::one()),
                    Some(_) => *p * (-t).powf(*p - T::one()),
                    None => T::nan(),
                }
            }
        }
        MapExpr::AbsPow { p } => {
            let use_right = t > T::zero() || (t == T::zero() && side != Side::Left);
            let m = *p * t.abs().powf(*p - T::one());
            if use_right {
                m
            } else {
                -m
            }
        }
        MapExpr::Exp1 => t.exp(),
        MapExpr::Sin | MapExpr::SinMono => t.cos(),
        MapExpr::Cos => -t.sin(),
        MapExpr::Ridge { a } => {
            let two = T::of(2.0);
            let use_right = t > T::zero() || (t == T::zero() && side != Side::Left);
            if use_right {
                two * (T::one() + *a) + two * t
            } else {
                two * (T::one() - *a) - two * t
            }
        }
        MapExpr::Poly { coeffs } => {
            let mut acc = T::zero();
            for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
                acc = acc * t + c * T::of(i as f64);
            }
            acc
        }
        MapExpr::PiecewiseLinear { xs, ys } => {
            let n = xs.len();
            let seg = if t <= xs[0] {
                0
            } else if t >= xs[n - 1] {
                n - 2
            } else {
                let k = match xs.partition_point(|&x| x < t) {
                    0 => 0,
                    k => k,
                };
                // at an interior breakpoint choose by side
                if xs[k] == t && side == Side::Left && k > 0 {
                    k - 1
                } else if xs.get(k) == Some(&t) {
                    k.min(n - 2)
                } else {
                    k - 1
                }
            };
            (ys[seg + 1] - ys[seg]) / (xs[seg + 1] - xs[seg])
        }
        MapExpr::Piecewise { split, left, right } => {
            let use_right = t > *split || (t == *split && side != Side::Left);
            if use_right {
                derivative_expr(right, t, side)
            } else {
                derivative_expr(left, t, side)
            }
        }
        MapExpr::Compose { outer, inner } => {
            let u = inner.eval_raw(t);
            let di = derivative_expr(inner, t, side);
            let outer_side = match (side, di >= T::zero()) {
                (Side::Central, _) => Side::Central,
                (s, true) => s,
                (Side::Left, false) => Side::Right,
                (Side::Right, false) => Side::Left,
            };
            derivative_expr(outer, u, outer_side) * di
        }
        MapExpr::Inverse { inner } => {
            let u = invert_expr(inner, inner.natural_domain(), t).unwrap_or_else(|_| T::nan());
            T::one() / derivative_expr(inner, u, side)
        }
        MapExpr::OddExtension { half } => {
            if t > T::zero() || (t == T::zero() && side != Side::Left) {
                derivative_expr(half, t, side)
            } else {
                derivative_expr(half, -t, side_flip(side))
            }
        }
        MapExpr::Tilde { inner } => derivative_expr(inner, T::one() - t, side_flip(side)),
        MapExpr::Negate { inner } => -derivative_expr(inner, t, side),
        MapExpr::Custom(c) => {
            // one-sided finite difference with Richardson refinement
            let h0 = T::of(1e-4);
            let fd = |h: T| match side {
                Side::Central => ((c.f)(t + h) - (c.f)(t - h)) / (h + h),
                Side::Right => ((c.f)(t + h) - (c.f)(t)) / h,
                Side::Left => ((c.f)(t) - (c.f)(t - h)) / h,
            };
            let d1 = fd(h0);
            let d2 = fd(h0 * T::of(0.5));
            d2 + (d2 - d1)
        }
    }
}

fn side_flip(s: Side) -> Side {
    match s {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
        Side::Central => Side::Central,
    }
}

/// A real map with its domain and (when known) monotone direction.
///
/// Values are immutable after construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct MonotoneMap<T> {
    expr: MapExpr<T>,
    domain: Interval<T>,
    direction: Option<Direction>,
}

/// Result of a grid monotonicity check.
#[derive(Clone, Debug)]
pub struct MonotoneReport<T> {
    pub pass: bool,
    pub direction: Option<Direction>,
    /// First sampled pair violating strict monotonicity.
    pub violation: Option<((T, T), (T, T))>,
}

impl<T: Real> MonotoneMap<T> {
    /// Wraps an expression on its natural domain.
    pub fn new(expr: MapExpr<T>) -> Self {
        let domain = expr.natural_domain();
        let direction = direction_of(&expr, domain);
        MonotoneMap {
            expr,
            domain,
            direction,
        }
    }

    pub fn identity() -> Self {
        Self::new(MapExpr::Identity)
    }

    pub fn affine(a: T, b: T) -> Self {
        Self::new(MapExpr::Affine { a, b })
    }

    pub fn power_odd(p: T) -> Self {
        Self::new(MapExpr::PowerOdd { p })
    }

    pub fn power(p: T) -> Self {
        Self::new(MapExpr::Power { p })
    }

    pub fn abs_pow(p: T) -> Self {
        Self::new(MapExpr::AbsPow { p })
    }

    pub fn exp1() -> Self {
        Self::new(MapExpr::Exp1)
    }

    pub fn sin_mono() -> Self {
        Self::new(MapExpr::SinMono)
    }

    pub fn ridge(a: T) -> Self {
        Self::new(MapExpr::Ridge { a })
    }

    pub fn poly(coeffs: Vec<T>) -> Self {
        Self::new(MapExpr::Poly { coeffs })
    }

    pub fn negate_of(self) -> Self {
        Self::new(MapExpr::Negate {
            inner: Box::new(self.expr),
        })
        .restrict_to(self.domain)
    }

    pub fn pwl(points: &[(T, T)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(LcError::Parse("pwl needs at least two points".into()));
        }
        let xs: Vec<T> = points.iter().map(|p| p.0).collect();
        let ys: Vec<T> = points.iter().map(|p| p.1).collect();
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(LcError::Parse("pwl x-coordinates must increase".into()));
        }
        Ok(Self::new(MapExpr::PiecewiseLinear { xs, ys }))
    }

    pub fn custom(
        label: &str,
        f: Arc<dyn Fn(T) -> T + Send + Sync>,
        inverse: Option<Arc<dyn Fn(T) -> T + Send + Sync>>,
        domain: Interval<T>,
        direction: Option<Direction>,
    ) -> Self {
        MonotoneMap {
            expr: MapExpr::Custom(CustomMap {
                f,
                inverse,
                direction,
                label: label.to_string(),
            }),
            domain,
            direction,
        }
    }

    /// Glues a piecewise map from two branches at `split`.
    pub fn piecewise(split: T, left: MonotoneMap<T>, right: MonotoneMap<T>) -> Self {
        let lo = left.domain.lo;
        let hi = right.domain.hi;
        let expr = MapExpr::Piecewise {
            split,
            left: Box::new(left.expr),
            right: Box::new(right.expr),
        };
        let domain = Interval { lo: lo.min(split), hi: hi.max(split) };
        let direction = direction_of(&expr, domain);
        MonotoneMap {
            expr,
            domain,
            direction,
        }
    }

    pub fn expr(&self) -> &MapExpr<T> {
        &self.expr
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn direction(&self) -> Option<Direction> {
        self.direction
    }

    pub fn is_increasing(&self) -> bool {
        self.direction == Some(Direction::Increasing)
    }

    pub fn is_monotone(&self) -> bool {
        self.direction.is_some()
    }

    pub fn range(&self) -> Interval<T> {
        range_of(&self.expr, self.domain)
    }

    /// Restricts the map to a subinterval, re-deriving the direction.
    pub fn restrict_to(mut self, domain: Interval<T>) -> Self {
        let d = self
            .domain
            .intersect(&domain)
            .unwrap_or(domain);
        self.domain = d;
        self.direction = direction_of(&self.expr, d);
        self
    }

    pub fn eval(&self, t: T) -> Result<T> {
        let t = self
            .domain
            .admit(t)
            .ok_or_else(|| LcError::Domain(
                t.to_f64().unwrap_or(f64::NAN),
                self.domain.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
                self.domain.hi.to_f64().unwrap_or(f64::INFINITY),
            ))?;
        Ok(self.expr.eval_raw(t))
    }

    /// Solves f(t) = y; closed forms where available, else bisection
    /// (relative tolerance 1e-12, 200 iteration cap).
    pub fn inverse_eval(&self, y: T) -> Result<T> {
        let t = invert_expr(&self.expr, self.domain, y)?;
        self.domain.admit(t).ok_or_else(|| {
            LcError::Range(y.to_f64().unwrap_or(f64::NAN))
        })
    }

    /// f ∘ g.
    pub fn compose(&self, g: &MonotoneMap<T>) -> Result<MonotoneMap<T>> {
        let expr = MapExpr::Compose {
            outer: Box::new(self.expr.clone()),
            inner: Box::new(g.expr.clone()),
        };
        // shrink g's domain so its image stays inside dom(f)
        let rg = g.range();
        let domain = if rg.lo >= self.domain.lo && rg.hi <= self.domain.hi {
            g.domain
        } else {
            let dir = g.direction.ok_or_else(|| {
                LcError::DomainMismatch("cannot chain through a folded inner map".into())
            })?;
            let lo_y = rg.lo.max(self.domain.lo);
            let hi_y = rg.hi.min(self.domain.hi);
            if lo_y > hi_y {
                return Err(LcError::DomainMismatch(
                    "inner range disjoint from outer domain".into(),
                ));
            }
            let solve = |y: T, fb: T| {
                if y.is_infinite() {
                    fb
                } else {
                    invert_expr(&g.expr, g.domain, y).unwrap_or(fb)
                }
            };
            match dir {
                Direction::Increasing => Interval {
                    lo: solve(lo_y, g.domain.lo),
                    hi: solve(hi_y, g.domain.hi),
                },
                Direction::Decreasing => Interval {
                    lo: solve(hi_y, g.domain.lo),
                    hi: solve(lo_y, g.domain.hi),
                },
            }
        };
        // the stored directions are authoritative on the restricted domains
        let direction = match (self.direction, g.direction) {
            (Some(a), Some(b)) => Some(a.combine(b)),
            _ => direction_of(&expr, domain),
        };
        Ok(MonotoneMap {
            expr,
            domain,
            direction,
        })
    }

    /// The inverse map, as a structural expression.
    pub fn invert(&self) -> Result<MonotoneMap<T>> {
        if self.direction.is_none() {
            return Err(LcError::NotInvertible);
        }
        let domain = self.range();
        let expr = MapExpr::Inverse {
            inner: Box::new(self.expr.clone()),
        };
        let direction = self.direction;
        Ok(MonotoneMap {
            expr,
            domain,
            direction,
        })
    }

    /// g̃(s) = 1 − g(1−s); requires g ∈ G_[0,1].
    pub fn tilde(&self) -> Result<MonotoneMap<T>> {
        let tol = T::of(1e-9);
        if !self.domain.approx_eq(&Interval::unit(), tol) {
            return Err(LcError::NotFixingEndpoints);
        }
        let at0 = self.eval(T::zero())?;
        let at1 = self.eval(T::one())?;
        if at0.abs() > tol || (at1 - T::one()).abs() > tol {
            return Err(LcError::NotFixingEndpoints);
        }
        let expr = MapExpr::Tilde {
            inner: Box::new(self.expr.clone()),
        };
        Ok(MonotoneMap {
            expr,
            domain: Interval::unit(),
            direction: self.direction,
        })
    }

    /// Odd extension of an increasing map p₊ on [0, ∞) (or [0, b]) with p₊(0)=0.
    pub fn odd_extend(&self) -> Result<MonotoneMap<T>> {
        let tol = T::of(1e-9);
        if self.domain.lo.abs() > tol {
            return Err(LcError::NotFixingOrigin);
        }
        if self.direction != Some(Direction::Increasing) {
            return Err(LcError::NotMonotone("odd extension needs an increasing map".into()));
        }
        if self.eval(T::zero())?.abs() > tol {
            return Err(LcError::NotFixingOrigin);
        }
        let hi = self.domain.hi;
        let expr = MapExpr::OddExtension {
            half: Box::new(self.expr.clone()),
        };
        Ok(MonotoneMap {
            expr,
            domain: Interval { lo: -hi, hi },
            direction: Some(Direction::Increasing),
        })
    }

    /// h₊(s) = h(s) for s ≥ 0: the restriction to the nonnegative part.
    pub fn positive_part(&self) -> Result<MonotoneMap<T>> {
        if self.domain.hi <= T::zero() {
            return Err(LcError::DomainMismatch("domain has no positive part".into()));
        }
        Ok(self.clone().restrict_to(Interval {
            lo: T::zero(),
            hi: self.domain.hi,
        }))
    }

    /// h₋(s) = −h(−s) for s ≥ 0.
    pub fn negative_part(&self) -> Result<MonotoneMap<T>> {
        if self.domain.lo >= T::zero() {
            return Err(LcError::DomainMismatch("domain has no negative part".into()));
        }
        let expr = MapExpr::Negate {
            inner: Box::new(MapExpr::Compose {
                outer: Box::new(self.expr.clone()),
                inner: Box::new(MapExpr::Affine {
                    a: -T::one(),
                    b: T::zero(),
                }),
            }),
        };
        let domain = Interval {
            lo: T::zero(),
            hi: -self.domain.lo,
        };
        let direction = direction_of(&expr, domain);
        Ok(MonotoneMap {
            expr,
            domain,
            direction,
        })
    }

    /// Reassembles a map from half-line parts: h(t) = pos(t) for t ≥ 0,
    /// −neg(−t) for t ≤ 0 (the inverse of the positive/negative-part split).
    pub fn from_parts(neg: &MonotoneMap<T>, pos: &MonotoneMap<T>) -> Result<MonotoneMap<T>> {
        let left_expr = MapExpr::Negate {
            inner: Box::new(MapExpr::Compose {
                outer: Box::new(neg.expr.clone()),
                inner: Box::new(MapExpr::Affine {
                    a: -T::one(),
                    b: T::zero(),
                }),
            }),
        };
        let left = MonotoneMap {
            domain: Interval {
                lo: -neg.domain.hi,
                hi: T::zero(),
            },
            direction: direction_of(&left_expr, Interval {
                lo: -neg.domain.hi,
                hi: T::zero(),
            }),
            expr: left_expr,
        };
        let pos = pos.clone();
        let glued = MonotoneMap::piecewise(T::zero(), left, pos);
        if glued.direction.is_none() {
            return Err(LcError::NotMonotone("glued parts are not monotone".into()));
        }
        Ok(glued)
    }

    /// Grid check of strict monotonicity; report-returning, never errors.
    pub fn check_monotone(&self, grid_size: usize) -> MonotoneReport<T> {
        let grid = self.domain.grid(grid_size.max(2));
        let mut pts: Vec<(T, T)> = Vec::with_capacity(grid.len());
        for t in grid {
            if let Ok(v) = self.eval(t) {
                pts.push((t, v));
            }
        }
        let mut inc = true;
        let mut dec = true;
        let mut violation = None;
        for w in pts.windows(2) {
            if w[1].1 <= w[0].1 {
                if inc && violation.is_none() && !dec {
                    violation = Some((w[0], w[1]));
                }
                inc = false;
            }
            if w[1].1 >= w[0].1 {
                if dec && violation.is_none() && !inc {
                    violation = Some((w[0], w[1]));
                }
                dec = false;
            }
            if !inc && !dec {
                if violation.is_none() {
                    violation = Some((w[0], w[1]));
                }
                break;
            }
        }
        let pass = inc || dec;
        MonotoneReport {
            pass,
            direction: if inc {
                Some(Direction::Increasing)
            } else if dec {
                Some(Direction::Decreasing)
            } else {
                None
            },
            violation: if pass { None } else { violation },
        }
    }

    /// Structural derivative (central convention at breakpoints).
    pub fn derivative_at(&self, t: T) -> T {
        derivative_expr(&self.expr, t, Side::Central)
    }

    pub fn one_sided_derivative(&self, t: T, side: Side) -> T {
        derivative_expr(&self.expr, t, side)
    }

    /// Max |f − g| over an n-point grid of the common domain.
    pub fn max_difference(&self, other: &MonotoneMap<T>, n: usize) -> Result<T> {
        let dom = self
            .domain
            .intersect(&other.domain)
            .ok_or_else(|| LcError::DomainMismatch("disjoint domains".into()))?;
        let mut worst = T::zero();
        for t in dom.grid(n) {
            let d = (self.eval(t)? - other.eval(t)?).abs();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    }

    /// Max |f(−t) + f(t)| over a symmetric grid: the oddness residual.
    pub fn oddness_residual(&self, n: usize) -> Result<T> {
        let hi = self.domain.hi.min(-self.domain.lo);
        if hi <= T::zero() {
            return Err(LcError::DomainMismatch("domain not symmetric about 0".into()));
        }
        let iv = Interval { lo: -hi, hi };
        let mut worst = T::zero();
        for t in iv.grid(n) {
            let r = (self.eval(t)? + self.eval(-t)?).abs();
            if r > worst {
                worst = r;
            }
        }
        Ok(worst)
    }

    /// Max |f(−t) − f(t)| over a symmetric grid: the evenness residual.
    pub fn evenness_residual(&self, n: usize) -> Result<T> {
        let hi = self.domain.hi.min(-self.domain.lo);
        if hi <= T::zero() {
            return Err(LcError::DomainMismatch("domain not symmetric about 0".into()));
        }
        let iv = Interval { lo: -hi, hi };
        let mut worst = T::zero();
        for t in iv.grid(n) {
            let r = (self.eval(t)? - self.eval(-t)?).abs();
            if r > worst {
                worst = r;
            }
        }
        Ok(worst)
    }
}
