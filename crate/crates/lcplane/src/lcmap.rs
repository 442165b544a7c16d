//! The Lorentz-conformal map object and its analysis operations.

use std::sync::Arc;

use crate::coords::{from_characteristic, to_characteristic, PointChar, PointXY};
use crate::error::{LcError, Result};
use crate::interval::Interval;
use crate::monotone::{Direction, MonotoneMap};
use crate::scalar::Real;

/// Contour family: u = const or v = const.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    U,
    V,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::U => write!(f, "u"),
            Family::V => write!(f, "v"),
        }
    }
}

/// A transformation decoupling the characteristic coordinates:
/// (U, V) = (h(X), k(Y)), or (k(Y), h(X)) when swapped.
#[derive(Clone, Debug)]
pub struct LCMap<T> {
    h: MonotoneMap<T>,
    k: MonotoneMap<T>,
    swapped: bool,
}

impl<T: Real> LCMap<T> {
    pub fn new(h: MonotoneMap<T>, k: MonotoneMap<T>) -> Self {
        LCMap {
            h,
            k,
            swapped: false,
        }
    }

    pub fn new_swapped(h: MonotoneMap<T>, k: MonotoneMap<T>) -> Self {
        LCMap {
            h,
            k,
            swapped: true,
        }
    }

    pub fn identity() -> Self {
        LCMap::new(MonotoneMap::identity(), MonotoneMap::identity())
    }

    pub fn h(&self) -> &MonotoneMap<T> {
        &self.h
    }

    pub fn k(&self) -> &MonotoneMap<T> {
        &self.k
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// True when both components are monotone bijections, so the whole
    /// plane map is invertible.
    pub fn is_invertible(&self) -> bool {
        self.h.is_monotone() && self.k.is_monotone()
    }

    /// Image in characteristic coordinates: (U, V).
    pub fn eval_char(&self, p: PointChar<T>) -> Result<PointChar<T>> {
        let hx = self.h.eval(p.cx)?;
        let ky = self.k.eval(p.cy)?;
        Ok(if self.swapped {
            PointChar::new(ky, hx)
        } else {
            PointChar::new(hx, ky)
        })
    }

    /// Image in standard coordinates: (u, v).
    pub fn eval(&self, p: PointXY<T>) -> Result<PointXY<T>> {
        Ok(from_characteristic(
            self.eval_char(to_characteristic(p))?,
        ))
    }

    pub fn invert_char(&self, q: PointChar<T>) -> Result<PointChar<T>> {
        if !self.is_invertible() {
            return Err(LcError::NotInvertible);
        }
        let (hu, kv) = if self.swapped {
            (q.cy, q.cx)
        } else {
            (q.cx, q.cy)
        };
        Ok(PointChar::new(
            self.h.inverse_eval(hu)?,
            self.k.inverse_eval(kv)?,
        ))
    }

    pub fn invert_point(&self, q: PointXY<T>) -> Result<PointXY<T>> {
        Ok(from_characteristic(
            self.invert_char(to_characteristic(q))?,
        ))
    }

    /// Signed coefficients of the contour equation k(Y) = sh·h(X) + sl·2·level.
    fn contour_signs(&self, family: Family) -> (T, T) {
        let one = T::one();
        match (family, self.swapped) {
            (Family::U, false) => (one, -one),
            (Family::V, false) => (-one, one),
            (Family::U, true) => (one, one),
            (Family::V, true) => (-one, one),
        }
    }

    /// |h(X) ∓ k(Y) − 2·level| at a candidate contour point.
    pub fn contour_residual(&self, family: Family, level: T, p: PointChar<T>) -> Result<T> {
        let (sh, sl) = self.contour_signs(family);
        let target = sh * self.h.eval(p.cx)? + sl * (level + level);
        Ok((self.k.eval(p.cy)? - target).abs())
    }

    /// Contour sampled over explicit X values; folded k yields one polyline
    /// per monotone branch. X values with no solution are counted as skipped.
    pub fn contour(&self, family: Family, level: T, xs: &[T]) -> Contour<T> {
        self.contour_in(family, level, xs, self.k.domain())
    }

    fn contour_in(&self, family: Family, level: T, xs: &[T], y_window: Interval<T>) -> Contour<T> {
        let (sh, sl) = self.contour_signs(family);
        let solver = BranchSolver::new(&self.k, y_window);
        let mut branches: Vec<Vec<PointChar<T>>> = vec![Vec::new(); solver.branch_count()];
        let mut skipped = 0usize;
        for &x in xs {
            let hx = match self.h.eval(x) {
                Ok(v) => v,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let target = sh * hx + sl * (level + level);
            let mut hit = false;
            for (bi, y) in solver.solve(target) {
                branches[bi].push(PointChar::new(x, y));
                hit = true;
            }
            if !hit {
                skipped += 1;
            }
        }
        branches.retain(|b| !b.is_empty());
        Contour {
            family,
            level,
            branches,
            skipped,
        }
    }

    /// Contour over a rectangular window in characteristic coordinates.
    ///
    /// Samples along X by default, but switches to sampling along Y when h
    /// barely varies over the window (near-characteristic contours would
    /// otherwise collapse to a few points).
    pub fn contour_window(
        &self,
        family: Family,
        level: T,
        window: (Interval<T>, Interval<T>),
        resolution: usize,
    ) -> Contour<T> {
        let (wx, wy) = window;
        let h_span = span_over(&self.h, wx, resolution);
        let k_span = span_over(&self.k, wy, resolution);
        let steep = h_span < k_span * T::of(1e-3);
        if !steep {
            let xs = clamp_grid(wx, self.h.domain(), resolution);
            return self.contour_in(family, level, &xs, wy);
        }
        // drive Y and solve for X: h(X) = sh·(k(Y) − sl·2·level)
        let (sh, sl) = self.contour_signs(family);
        let ys = clamp_grid(wy, self.k.domain(), resolution);
        let solver = BranchSolver::new(&self.h, wx);
        let mut branches: Vec<Vec<PointChar<T>>> = vec![Vec::new(); solver.branch_count()];
        let mut skipped = 0usize;
        for &y in &ys {
            let ky = match self.k.eval(y) {
                Ok(v) => v,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let target = (ky - sl * (level + level)) / sh;
            let mut hit = false;
            for (bi, x) in solver.solve(target) {
                branches[bi].push(PointChar::new(x, y));
                hit = true;
            }
            if !hit {
                skipped += 1;
            }
        }
        branches.retain(|b| !b.is_empty());
        Contour {
            family,
            level,
            branches,
            skipped,
        }
    }

    /// Finite-difference Jacobian in standard coordinates, classified
    /// against the two Lorentz-conformal matrix forms.
    pub fn jacobian(&self, p: PointXY<T>, step: T) -> Result<JacobianData<T>> {
        jacobian_of(|q| self.eval(q).ok(), p, step)
    }

    /// Grid points where the contour families are tangent: |h'(X)/k'(Y)|
    /// below `threshold` or above its reciprocal.
    pub fn tangency_locus(
        &self,
        region: (Interval<T>, Interval<T>),
        resolution: usize,
        threshold: T,
    ) -> TangencyReport<T> {
        let xs = region.0.grid(resolution);
        let ys = region.1.grid(resolution);
        let mut tangent = Vec::new();
        let mut total = 0usize;
        for &x in &xs {
            let hp = self.h.derivative_at(x).abs();
            for &y in &ys {
                let kp = self.k.derivative_at(y).abs();
                total += 1;
                let is_tangent = if kp == T::zero() {
                    hp != T::zero() || true
                } else {
                    let r = hp / kp;
                    r < threshold || r > T::one() / threshold
                };
                if is_tangent {
                    tangent.push(PointChar::new(x, y));
                }
            }
        }
        TangencyReport { tangent, total }
    }

    /// Finite-difference check of the Lorentz Cauchy-Riemann systems.
    pub fn verify_lorentz_cr(
        &self,
        region: (Interval<T>, Interval<T>),
        resolution: usize,
    ) -> CrReport<T> {
        verify_lorentz_cr_fn(|q| self.eval(q).ok(), region, resolution, T::of(1e-5))
    }
}

/// Sampled contour: one polyline per solvable monotone branch.
#[derive(Clone, Debug)]
pub struct Contour<T> {
    pub family: Family,
    pub level: T,
    pub branches: Vec<Vec<PointChar<T>>>,
    pub skipped: usize,
}

impl<T: Real> Contour<T> {
    pub fn points(&self) -> impl Iterator<Item = PointChar<T>> + '_ {
        self.branches.iter().flatten().copied()
    }

    pub fn xy_branches(&self) -> Vec<Vec<PointXY<T>>> {
        self.branches
            .iter()
            .map(|b| b.iter().map(|&p| from_characteristic(p)).collect())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

fn clamp_grid<T: Real>(window: Interval<T>, domain: Interval<T>, n: usize) -> Vec<T> {
    match window.intersect(&domain) {
        Some(iv) => iv.grid(n),
        None => Vec::new(),
    }
}

fn span_over<T: Real>(f: &MonotoneMap<T>, window: Interval<T>, n: usize) -> T {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for t in clamp_grid(window, f.domain(), n.max(16)) {
        if let Ok(v) = f.eval(t) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        T::zero()
    }
}

/// Solves f(y) = target per monotone branch of f within a window.
///
/// A globally monotone f gets one unbounded branch handled by its own
/// inverse; a folded f is split into sampled monotone runs first.
struct BranchSolver<'a, T> {
    f: &'a MonotoneMap<T>,
    window: Interval<T>,
    runs: Option<Vec<Interval<T>>>,
}

impl<'a, T: Real> BranchSolver<'a, T> {
    fn new(f: &'a MonotoneMap<T>, window: Interval<T>) -> Self {
        let runs = if f.is_monotone() {
            None
        } else {
            Some(monotone_runs(f, window, 2048))
        };
        BranchSolver { f, window, runs }
    }

    fn branch_count(&self) -> usize {
        match &self.runs {
            Some(r) => r.len(),
            None => 1,
        }
    }

    fn solve(&self, target: T) -> Vec<(usize, T)> {
        match &self.runs {
            None => match self.f.inverse_eval(target) {
                Ok(y) if self.window.contains(y) || self.window.admit(y).is_some() => {
                    vec![(0, self.window.admit(y).unwrap_or(y))]
                }
                _ => Vec::new(),
            },
            Some(runs) => runs
                .iter()
                .enumerate()
                .filter_map(|(i, run)| solve_on_run(self.f, run, target).map(|y| (i, y)))
                .collect(),
        }
    }
}

/// Maximal intervals on which `f` is strictly monotone, found by sampling.
fn monotone_runs<T: Real>(f: &MonotoneMap<T>, window: Interval<T>, n: usize) -> Vec<Interval<T>> {
    if f.is_monotone() {
        return match window.intersect(&f.domain()) {
            Some(iv) => vec![iv],
            None => Vec::new(),
        };
    }
    let grid = clamp_grid(window, f.domain(), n);
    if grid.len() < 2 {
        return Vec::new();
    }
    let vals: Vec<Option<T>> = grid.iter().map(|&t| f.eval(t).ok()).collect();
    let mut runs = Vec::new();
    let mut start = 0usize;
    let mut sign = 0i8;
    for i in 1..grid.len() {
        let (a, b) = match (vals[i - 1], vals[i]) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                if i - 1 > start {
                    runs.push(Interval::new(grid[start], grid[i - 1]));
                }
                start = i;
                sign = 0;
                continue;
            }
        };
        let s = if b > a {
            1
        } else if b < a {
            -1
        } else {
            0
        };
        if sign == 0 {
            sign = s;
        } else if s != 0 && s != sign {
            runs.push(Interval::new(grid[start], grid[i - 1]));
            start = i - 1;
            sign = s;
        }
    }
    if grid.len() - 1 > start {
        runs.push(Interval::new(grid[start], *grid.last().unwrap()));
    }
    runs
}

/// Bisection for f(y) = target on a run where f is monotone.
fn solve_on_run<T: Real>(f: &MonotoneMap<T>, run: &Interval<T>, target: T) -> Option<T> {
    let fa = f.eval(run.lo).ok()?;
    let fb = f.eval(run.hi).ok()?;
    let (mut a, mut b, ya, yb) = if fa <= fb {
        (run.lo, run.hi, fa, fb)
    } else {
        (run.hi, run.lo, fb, fa)
    };
    if target < ya || target > yb {
        return None;
    }
    let tol = T::inverse_tol() * T::one().max(target.abs());
    let half = T::of(0.5);
    for _ in 0..200 {
        let mid = (a + b) * half;
        let v = f.eval(mid).ok()?;
        if (v - target).abs() <= tol {
            return Some(mid);
        }
        if v < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some((a + b) * half)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianForm {
    /// [[a, b], [b, a]]
    Standard,
    /// [[−a, −b], [b, a]]
    Flipped,
}

#[derive(Clone, Copy, Debug)]
pub struct JacobianData<T> {
    pub ux: T,
    pub uy: T,
    pub vx: T,
    pub vy: T,
    /// conformal factor H² = |u_x² − v_x²|
    pub h2: T,
    pub form: JacobianForm,
    /// +1 orientation-preserving, −1 reversing
    pub orientation: i8,
    /// +1 when du² − dv² = +H²(dx² − dy²), −1 for the sign-reversed metric
    pub signature: i8,
    pub residual: T,
}

/// Central-difference Jacobian of an arbitrary plane map, classified against
/// the two Lorentz-conformal forms.
pub fn jacobian_of<T, F>(f: F, p: PointXY<T>, step: T) -> Result<JacobianData<T>>
where
    T: Real,
    F: Fn(PointXY<T>) -> Option<PointXY<T>>,
{
    let h = step;
    let at = |x, y| f(PointXY::new(x, y));
    let (xp, xm) = (at(p.x + h, p.y), at(p.x - h, p.y));
    let (yp, ym) = (at(p.x, p.y + h), at(p.x, p.y - h));
    let ((xp, xm), (yp, ym)) = match (xp, xm, yp, ym) {
        (Some(a), Some(b), Some(c), Some(d)) => ((a, b), (c, d)),
        _ => {
            return Err(LcError::Domain(
                p.x.to_f64().unwrap_or(f64::NAN),
                f64::NEG_INFINITY,
                f64::INFINITY,
            ))
        }
    };
    let two_h = h + h;
    let ux = (xp.x - xm.x) / two_h;
    let vx = (xp.y - xm.y) / two_h;
    let uy = (yp.x - ym.x) / two_h;
    let vy = (yp.y - ym.y) / two_h;
    let scale = T::one().max(ux.abs().max(uy.abs()).max(vx.abs()).max(vy.abs()));
    let r_std = (ux - vy).abs().max((uy - vx).abs());
    let r_flip = (ux + vy).abs().max((uy + vx).abs());
    let (form, residual) = if r_std <= r_flip {
        (JacobianForm::Standard, r_std)
    } else {
        (JacobianForm::Flipped, r_flip)
    };
    if residual > T::of(1e-5) * scale {
        return Err(LcError::DegeneratePoint(
            (residual / scale).to_f64().unwrap_or(f64::NAN),
        ));
    }
    let det = ux * vy - uy * vx;
    let sig = ux * ux - vx * vx;
    Ok(JacobianData {
        ux,
        uy,
        vx,
        vy,
        h2: sig.abs(),
        form,
        orientation: if det >= T::zero() { 1 } else { -1 },
        signature: if sig >= T::zero() { 1 } else { -1 },
        residual,
    })
}

#[derive(Clone, Debug)]
pub struct CrReport<T> {
    pub pass: bool,
    pub max_residual: T,
    pub max_metric_residual: T,
    pub points_checked: usize,
}

/// Checks that one of the two Lorentz Cauchy-Riemann systems
/// (u_x = v_y, u_y = v_x) or (u_x = −v_y, u_y = −v_x) holds on a grid,
/// together with the metric scaling du² − dv² = ±H²(dx² − dy²).
///
/// The grid is offset by half a step so stored breakpoints are avoided.
pub fn verify_lorentz_cr_fn<T, F>(
    f: F,
    region: (Interval<T>, Interval<T>),
    resolution: usize,
    tol: T,
) -> CrReport<T>
where
    T: Real,
    F: Fn(PointXY<T>) -> Option<PointXY<T>>,
{
    let n = resolution.max(2);
    let (rx, ry) = region;
    let half = T::of(0.5);
    let sx = (rx.hi - rx.lo) / T::from_usize(n).unwrap();
    let sy = (ry.hi - ry.lo) / T::from_usize(n).unwrap();
    let step = T::of(1e-6);
    let mut max_residual = T::zero();
    let mut max_metric = T::zero();
    let mut points = 0usize;
    for i in 0..n {
        for j in 0..n {
            let x = rx.lo + sx * (T::from_usize(i).unwrap() + half);
            let y = ry.lo + sy * (T::from_usize(j).unwrap() + half);
            let jac = match jacobian_raw(&f, PointXY::new(x, y), step) {
                Some(j) => j,
                None => continue,
            };
            let (ux, uy, vx, vy) = jac;
            let scale = T::one().max(ux.abs().max(uy.abs()).max(vx.abs()).max(vy.abs()));
            let r_std = (ux - vy).abs().max((uy - vx).abs());
            let r_flip = (ux + vy).abs().max((uy + vx).abs());
            let r = r_std.min(r_flip) / scale;
            // du² − dv² proportional to dx² − dy²: no cross term, and the
            // dx², dy² coefficients opposite
            let m1 = ((ux * ux - vx * vx) + (uy * uy - vy * vy)).abs();
            let m2 = (ux * uy - vx * vy).abs();
            let m = m1.max(m2) / (scale * scale);
            max_residual = max_residual.max(r);
            max_metric = max_metric.max(m);
            points += 1;
        }
    }
    CrReport {
        pass: points > 0 && max_residual < tol && max_metric < tol,
        max_residual,
        max_metric_residual: max_metric,
        points_checked: points,
    }
}

fn jacobian_raw<T, F>(f: &F, p: PointXY<T>, h: T) -> Option<(T, T, T, T)>
where
    T: Real,
    F: Fn(PointXY<T>) -> Option<PointXY<T>>,
{
    let at = |x, y| f(PointXY::new(x, y));
    let xp = at(p.x + h, p.y)?;
    let xm = at(p.x - h, p.y)?;
    let yp = at(p.x, p.y + h)?;
    let ym = at(p.x, p.y - h)?;
    let two_h = h + h;
    Some((
        (xp.x - xm.x) / two_h,
        (yp.x - ym.x) / two_h,
        (xp.y - xm.y) / two_h,
        (yp.y - ym.y) / two_h,
    ))
}

#[derive(Clone, Debug)]
pub struct TangencyReport<T> {
    pub tangent: Vec<PointChar<T>>,
    pub total: usize,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport<T> {
    pub pass: bool,
    pub max_secant_slope: T,
    /// index range of a sampled sub-interval whose secants are all ±1
    pub unit_run: Option<(usize, usize)>,
}

/// Rule 1 check on a sampled curve given as consecutive (x, f(x)) pairs:
/// admissible iff every secant slope has magnitude ≤ 1 and no sub-interval
/// of at least three samples has all secants equal to ±1.
pub fn admissible_contour<T: Real>(samples: &[(T, T)]) -> AdmissibilityReport<T> {
    let tol = T::of(1e-9);
    let mut max_slope = T::zero();
    let mut slopes = Vec::with_capacity(samples.len().saturating_sub(1));
    for w in samples.windows(2) {
        let dx = w[1].0 - w[0].0;
        let dy = w[1].1 - w[0].1;
        let s = (dy / dx).abs();
        max_slope = max_slope.max(s);
        slopes.push(s);
    }
    let mut unit_run = None;
    let mut run_start = 0usize;
    let mut run_len = 0usize;
    for (i, &s) in slopes.iter().enumerate() {
        if (s - T::one()).abs() <= tol {
            if run_len == 0 {
                run_start = i;
            }
            run_len += 1;
            if run_len >= 2 {
                unit_run = Some((run_start, i + 1));
            }
        } else {
            run_len = 0;
        }
    }
    AdmissibilityReport {
        pass: max_slope <= T::one() + tol && unit_run.is_none(),
        max_secant_slope: max_slope,
        unit_run,
    }
}

#[derive(Clone, Debug)]
pub struct Rule2Report<T> {
    pub m_minus: T,
    pub m_plus: T,
    pub n_minus: T,
    pub n_plus: T,
    pub pass: bool,
}

/// Rule 2 at a nonsmooth crossing: one-sided slopes (in characteristic
/// coordinates) of the u-contour are m∓ and of the v-contour are −n∓; the
/// crossing is consistent iff m₋m₊ = n₋n₊.
pub fn crossing_tangent_check<T: Real>(
    contour_u: &[PointChar<T>],
    contour_v: &[PointChar<T>],
    crossing: PointChar<T>,
) -> Result<Rule2Report<T>> {
    let (m_minus, m_plus) = one_sided_slopes(contour_u, crossing)?;
    let (vm, vp) = one_sided_slopes(contour_v, crossing)?;
    let (n_minus, n_plus) = (-vm, -vp);
    let lhs = m_minus * m_plus;
    let rhs = n_minus * n_plus;
    let pass = (lhs - rhs).abs() <= T::of(1e-6) * T::one().max(lhs.abs());
    Ok(Rule2Report {
        m_minus,
        m_plus,
        n_minus,
        n_plus,
        pass,
    })
}

/// Left and right dY/dX of a polyline at a crossing on the polyline.
fn one_sided_slopes<T: Real>(poly: &[PointChar<T>], at: PointChar<T>) -> Result<(T, T)> {
    // nearest sample strictly left / right of the crossing, plus one more
    // for a convergence sanity check
    let mut left: Vec<PointChar<T>> = poly.iter().filter(|p| p.cx < at.cx).copied().collect();
    let mut right: Vec<PointChar<T>> = poly.iter().filter(|p| p.cx > at.cx).copied().collect();
    left.sort_by(|a, b| b.cx.partial_cmp(&a.cx).unwrap());
    right.sort_by(|a, b| a.cx.partial_cmp(&b.cx).unwrap());
    if left.is_empty() || right.is_empty() {
        return Err(LcError::NondifferentiableCrossing);
    }
    let secant = |p: PointChar<T>| (p.cy - at.cy) / (p.cx - at.cx);
    let sl = secant(left[0]);
    let sr = secant(right[0]);
    for (cands, s) in [(&left, sl), (&right, sr)] {
        if cands.len() > 1 {
            let s2 = secant(cands[1]);
            if (s2 - s).abs() > T::of(0.2) * (T::one() + s.abs()) {
                return Err(LcError::NondifferentiableCrossing);
            }
        }
    }
    Ok((sl, sr))
}

/// Builds the Lorentz-conformal map whose components flatten the given
/// Klein-Gordon densities: h' = ν, k' = μ, anchored h(0) = k(0) = 0.
pub fn klein_gordon_flatten<T, F, G>(nu: F, mu: G, domain: Interval<T>) -> Result<LCMap<T>>
where
    T: Real,
    F: Fn(T) -> T + Send + Sync + 'static,
    G: Fn(T) -> T + Send + Sync + 'static,
{
    let h = antiderivative("kg-h", nu, domain)?;
    let k = antiderivative("kg-k", mu, domain)?;
    Ok(LCMap::new(h, k))
}

/// Numeric antiderivative of a strictly positive density: cumulative Simpson
/// over a node table, with Gauss quadrature inside the active cell; anchored
/// to vanish at 0 (or the nearest domain point).
pub fn antiderivative<T, F>(label: &str, f: F, domain: Interval<T>) -> Result<MonotoneMap<T>>
where
    T: Real,
    F: Fn(T) -> T + Send + Sync + 'static,
{
    if !domain.is_finite() {
        return Err(LcError::DomainMismatch(
            "antiderivative needs a finite domain".into(),
        ));
    }
    const CELLS: usize = 1024;
    let n_t = T::from_usize(CELLS).unwrap();
    let dt = (domain.hi - domain.lo) / n_t;
    let half = T::of(0.5);
    let sixth = T::one() / T::of(6.0);
    let mut nodes = Vec::with_capacity(CELLS + 1);
    let mut acc = T::zero();
    nodes.push(acc);
    let mut prev_t = domain.lo;
    let mut prev_v = f(prev_t);
    check_positive(prev_t, prev_v)?;
    for i in 1..=CELLS {
        let t = domain.lo + dt * T::from_usize(i).unwrap();
        let v = f(t);
        check_positive(t, v)?;
        let mid = f((prev_t + t) * half);
        check_positive((prev_t + t) * half, mid)?;
        acc = acc + dt * sixth * (prev_v + T::of(4.0) * mid + v);
        nodes.push(acc);
        prev_t = t;
        prev_v = v;
    }
    let nodes = Arc::new(nodes);
    let f = Arc::new(f);
    let lo = domain.lo;
    let raw = {
        let nodes = nodes.clone();
        let f = f.clone();
        move |t: T| {
            let pos = ((t - lo) / dt).floor();
            let i = pos
                .to_usize()
                .unwrap_or(0)
                .min(CELLS.saturating_sub(1));
            let t_i = lo + dt * T::from_usize(i).unwrap();
            nodes[i] + gauss5(f.as_ref(), t_i, t)
        }
    };
    let anchor = domain.admit(T::zero()).unwrap_or(lo);
    let offset = raw(anchor);
    let eval = Arc::new(move |t: T| raw(t) - offset);
    Ok(MonotoneMap::custom(
        label,
        eval,
        None,
        domain,
        Some(Direction::Increasing),
    ))
}

fn check_positive<T: Real>(t: T, v: T) -> Result<()> {
    if v > T::zero() {
        Ok(())
    } else {
        Err(LcError::NonPositiveDensity(
            v.to_f64().unwrap_or(f64::NAN),
            t.to_f64().unwrap_or(f64::NAN),
        ))
    }
}

/// 5-point Gauss-Legendre quadrature of f over [a, b].
fn gauss5<T: Real, F: Fn(T) -> T + ?Sized>(f: &F, a: T, b: T) -> T {
    const XS: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const WS: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let half = T::of(0.5);
    let c = (a + b) * half;
    let r = (b - a) * half;
    let mut acc = T::zero();
    for (x, w) in XS.iter().zip(WS) {
        acc = acc + T::of(w) * f(c + r * T::of(*x));
    }
    acc * r
}
