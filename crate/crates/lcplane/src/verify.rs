//! Independent geometric oracles: the rectangle-rule test for ray and side
//! families and the signal-bounce construction of the fourth side.

use rand::Rng;

use crate::coords::PointChar;
use crate::error::{LcError, Result};
use crate::monotone::MonotoneMap;
use crate::scalar::{fmt_sig, Real};

/// Which four-curve configuration a rectangle test runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// Crossing rays: Y = g₁(X) in the first quadrant, −X = g₂(Y),
    /// −Y = g₃(−X), X = g₄(−Y).
    CrossingRays,
    /// Square sides: Y = g₁(1−X), −X = g₂(1−Y), −Y = g₃(1+X), X = g₄(1+Y).
    SquareSides,
}

#[derive(Clone, Debug)]
pub struct RectTrial<T> {
    pub index: usize,
    pub residual: T,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct RectReport<T> {
    pub kind: CurveKind,
    pub trials: Vec<RectTrial<T>>,
    pub skipped: usize,
    pub max_residual: T,
    pub pass: bool,
}

impl<T: Real> RectReport<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,max_residual,pass\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{}\n",
                t.index,
                fmt_sig(t.residual),
                t.pass
            ));
        }
        out
    }
}

/// Draws characteristic-parallel rectangles with three vertices anchored on
/// three of the curves and measures the distance from the fourth vertex to
/// the fourth curve. A family satisfying the cyclic condition passes with
/// residuals at solver tolerance.
///
/// The first vertex coordinate is drawn stratified over the sampling span,
/// so local perturbations of a curve cannot slip between trials.
pub fn rectangle_rule_test<T: Real>(
    kind: CurveKind,
    g: &[MonotoneMap<T>; 4],
    trials: usize,
    seed: u64,
) -> RectReport<T> {
    let mut rng = crate::random::rng(seed);
    let mut out = Vec::with_capacity(trials);
    let mut skipped = 0usize;
    let mut max_residual = T::zero();
    let span = match kind {
        CurveKind::CrossingRays => 3.0,
        CurveKind::SquareSides => 1.0,
    };
    let tol = T::of(1e-6);
    for i in 0..trials {
        let frac = (i as f64 + rng.gen_range(0.0..1.0)) / trials as f64;
        let x_plus = T::of(span * frac.max(1e-6));
        // walk the three curves to the three determined vertices, then
        // compare the predicted fourth vertex coordinate
        let chain = |x_plus: T| -> Result<T> {
            match kind {
                CurveKind::CrossingRays => {
                    let y_plus = g[0].eval(x_plus)?;
                    let x_minus = g[1].eval(y_plus)?;
                    let y_minus = g[2].eval(x_minus)?;
                    g[3].eval(y_minus)
                }
                CurveKind::SquareSides => {
                    let y_plus = g[0].eval(T::one() - x_plus)?;
                    let x_minus = g[1].eval(T::one() - y_plus)?;
                    let y_minus = g[2].eval(T::one() - x_minus)?;
                    g[3].eval(T::one() - y_minus)
                }
            }
        };
        match chain(x_plus) {
            Ok(back) => {
                let scale = T::one().max(x_plus.abs());
                let residual = (back - x_plus).abs() / scale;
                max_residual = max_residual.max(residual);
                out.push(RectTrial {
                    index: i,
                    residual,
                    pass: residual < tol,
                });
            }
            Err(_) => skipped += 1,
        }
    }
    let pass = !out.is_empty() && out.iter().all(|t| t.pass);
    RectReport {
        kind,
        trials: out,
        skipped,
        max_residual,
        pass,
    }
}

/// Traces unit-celerity signals from sample points on the bottom side of a
/// normalized quadrilateral: each signal runs along a characteristic line,
/// reflects off a lateral side, and the two reflected characteristics meet
/// at a point of the top side.
///
/// Inputs are the side bijections g₃ (bottom), g₂ (left) and g₄ (right) of
/// the quadrilateral; the returned polyline is the top side C₁, ordered by
/// increasing X.
pub fn signal_bounce_top<T: Real>(
    bottom: &MonotoneMap<T>,
    left: &MonotoneMap<T>,
    right: &MonotoneMap<T>,
    samples: usize,
) -> Result<Vec<PointChar<T>>> {
    let n = samples.max(2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = T::of(i as f64 / (n - 1) as f64);
        // bottom point B: X_B = s − 1 ∈ [−1, 0], −Y_B = g₃(1 + X_B)
        let x_b = s - T::one();
        let y_b = -bottom.eval(s)?;
        // constant-Y signal meets the right side C₄ at X_R = g₄(1 + Y_B)
        let x_r = right
            .eval(T::one() + y_b)
            .map_err(|_| LcError::RayEscapes)?;
        // constant-X signal meets the left side C₂ where −X_B = g₂(1 − Y),
        // so Y_L = 1 − g₂⁻¹(−X_B)
        let y_l = T::one()
            - left
                .inverse_eval(-x_b)
                .map_err(|_| LcError::RayEscapes)?;
        out.push(PointChar { cx: x_r, cy: y_l });
    }
    out.sort_by(|a, b| a.cx.partial_cmp(&b.cx).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Max residual of a polyline against the top-side relation Y = g₁(1 − X).
pub fn top_side_residual<T: Real>(top: &MonotoneMap<T>, polyline: &[PointChar<T>]) -> Result<T> {
    let mut worst = T::zero();
    for p in polyline {
        let expect = top.eval(T::one() - p.cx)?;
        worst = worst.max((p.cy - expect).abs());
    }
    Ok(worst)
}
