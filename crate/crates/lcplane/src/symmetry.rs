//! D4 symmetry detection and classification of Lorentz-conformal maps.
//!
//! A pair (g, g') belongs to the symmetry set of α when α∘g = g'∘α. The
//! set is the graph of a surjective homomorphism Φ: S₁ → S₂ between
//! subgroups of D4, and the possible Φ are classified by parity and
//! equality conditions on (h, k).

use crate::coords::{d4_apply_char, d4_compose, D4Element, PointChar, Subgroup, D4_ALL};
use crate::error::{LcError, Result};
use crate::lcmap::LCMap;
use crate::monotone::MonotoneMap;
use crate::scalar::Real;

const GRID: usize = 17;
const GRID_SPAN: f64 = 1.3;
const DEFAULT_TOL: f64 = 1e-9;

/// One sampled condition: whether it holds and the residual that decided it.
#[derive(Clone, Copy, Debug)]
pub struct Flag<T> {
    pub holds: bool,
    pub residual: T,
}

/// The parity and equality conditions of Tables 3 to 5.
#[derive(Clone, Debug)]
pub struct ConditionProfile<T> {
    pub h_even: Flag<T>,
    pub h_odd: Flag<T>,
    pub k_even: Flag<T>,
    pub k_odd: Flag<T>,
    pub h_eq_k: Flag<T>,
    pub h_eq_neg_k: Flag<T>,
    /// h(−t) = k(t)
    pub h_neg_eq_k: Flag<T>,
    /// h(−t) = −k(t)
    pub h_neg_eq_neg_k: Flag<T>,
}

fn sample_ts<T: Real>(f: &MonotoneMap<T>, g: &MonotoneMap<T>, n: usize) -> Vec<T> {
    let hi = f
        .domain()
        .hi
        .min(-f.domain().lo)
        .min(g.domain().hi)
        .min(-g.domain().lo)
        .min(T::of(GRID_SPAN));
    (0..n)
        .map(|i| hi * T::of((i as f64 + 0.53) / n as f64))
        .collect()
}

fn residual_on<T: Real>(
    f: &MonotoneMap<T>,
    g: &MonotoneMap<T>,
    n: usize,
    rel: impl Fn(&MonotoneMap<T>, &MonotoneMap<T>, T) -> Result<T>,
) -> T {
    let mut worst = T::zero();
    for t in sample_ts(f, g, n) {
        match rel(f, g, t) {
            Ok(r) => worst = worst.max(r),
            Err(_) => worst = T::infinity(),
        }
    }
    worst
}

/// Samples the eight condition flags. Constant h or k is rejected: it
/// would make every condition hold vacuously.
pub fn detect_conditions<T: Real>(m: &LCMap<T>, samples: usize, tol: T) -> Result<ConditionProfile<T>> {
    let n = samples.max(8);
    let h = m.h();
    let k = m.k();
    for f in [h, k] {
        let ts = sample_ts(f, f, n);
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &t in &ts {
            let v = f.eval(t)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if (hi - lo).abs() < T::of(DEFAULT_TOL) {
            return Err(LcError::ConstantFunction);
        }
    }
    let flag = |r: T| Flag {
        holds: r < tol,
        residual: r,
    };
    let even = |f: &MonotoneMap<T>| {
        residual_on(f, f, n, |f, _, t| Ok((f.eval(-t)? - f.eval(t)?).abs()))
    };
    let odd = |f: &MonotoneMap<T>| {
        residual_on(f, f, n, |f, _, t| Ok((f.eval(-t)? + f.eval(t)?).abs()))
    };
    let both = |s: T| {
        residual_on(h, k, n, move |h, k, t| {
            Ok((h.eval(s * t)? - k.eval(t)?).abs().max((h.eval(-s * t)? - k.eval(-t)?).abs()))
        })
    };
    let both_neg = |s: T| {
        residual_on(h, k, n, move |h, k, t| {
            Ok((h.eval(s * t)? + k.eval(t)?).abs().max((h.eval(-s * t)? + k.eval(-t)?).abs()))
        })
    };
    Ok(ConditionProfile {
        h_even: flag(even(h)),
        h_odd: flag(odd(h)),
        k_even: flag(even(k)),
        k_odd: flag(odd(k)),
        h_eq_k: flag(both(T::one())),
        h_eq_neg_k: flag(both_neg(T::one())),
        h_neg_eq_k: flag(both(-T::one())),
        h_neg_eq_neg_k: flag(both_neg(-T::one())),
    })
}

fn swaps_characteristics(g: D4Element) -> bool {
    g.matrix_char()[0][0] == 0
}

/// Max over an off-axis grid of |α(g·p) − g'·α(p)|, in characteristic
/// coordinates. Samples where either side fails to evaluate are skipped;
/// at least a quarter of the grid must evaluate.
pub fn verify_pair<T: Real>(
    m: &LCMap<T>,
    g: D4Element,
    gp: D4Element,
    samples: usize,
) -> Result<T> {
    let n = samples.max(3);
    let span = m
        .h()
        .domain()
        .hi
        .min(-m.h().domain().lo)
        .min(m.k().domain().hi)
        .min(-m.k().domain().lo)
        .min(T::of(GRID_SPAN));
    // offset 0.53 keeps every sample off both coordinate axes and the
    // diagonals X = ±Y, where degenerate pairs would look symmetric
    let coord = |i: usize| -span + (span + span) * T::of((i as f64 + 0.53) / n as f64);
    let mut worst = T::zero();
    let mut used = 0usize;
    for i in 0..n {
        for j in 0..n {
            let p = PointChar {
                cx: coord(i),
                cy: coord(j),
            };
            let lhs = m.eval_char(d4_apply_char(g, p));
            let rhs = m.eval_char(p).map(|q| d4_apply_char(gp, q));
            if let (Ok(a), Ok(b)) = (lhs, rhs) {
                worst = worst.max((a.cx - b.cx).abs().max((a.cy - b.cy).abs()));
                used += 1;
            }
        }
    }
    if used * 4 < n * n {
        return Err(LcError::DomainMismatch(
            "too few evaluable symmetry samples".into(),
        ));
    }
    Ok(worst)
}

/// The full symmetry set of α as a homomorphism Φ: S₁ → S₂.
#[derive(Clone, Debug)]
pub struct SymmetryHom {
    pub pairs: Vec<(D4Element, D4Element)>,
    pub s1: Subgroup,
    pub s2: Subgroup,
}

impl SymmetryHom {
    pub fn image_of(&self, g: D4Element) -> Option<D4Element> {
        self.pairs.iter().find(|(a, _)| *a == g).map(|(_, b)| *b)
    }
}

/// Tests all 64 pairs. Pairs mixing a characteristic-swapping element with
/// a non-swapping one are excluded up front: for a map of either canonical
/// form they force h or k to be constant, and constants are rejected.
pub fn full_symmetry_group<T: Real>(m: &LCMap<T>) -> Result<SymmetryHom> {
    detect_conditions(m, 33, T::of(DEFAULT_TOL))?;
    let tol = T::of(DEFAULT_TOL);
    let mut pairs = Vec::new();
    for g in D4_ALL {
        let mut images = Vec::new();
        for gp in D4_ALL {
            if swaps_characteristics(g) != swaps_characteristics(gp) {
                continue;
            }
            if verify_pair(m, g, gp, GRID)? < tol {
                images.push(gp);
            }
        }
        match images.len() {
            0 => {}
            1 => pairs.push((g, images[0])),
            _ => {
                return Err(LcError::NonUniqueImage(format!(
                    "{g} has {} images",
                    images.len()
                )))
            }
        }
    }
    let s1_elems: Vec<D4Element> = pairs.iter().map(|(a, _)| *a).collect();
    let s2_elems: Vec<D4Element> = pairs.iter().map(|(_, b)| *b).collect();
    let s1 = Subgroup::identify(&s1_elems);
    let s2 = Subgroup::identify(&s2_elems);
    // Φ must respect the group table
    let hom = SymmetryHom { pairs, s1, s2 };
    for &(a, fa) in &hom.pairs {
        for &(b, fb) in &hom.pairs {
            let ab = d4_compose(a, b);
            if let Some(fab) = hom.image_of(ab) {
                if fab != d4_compose(fa, fb) {
                    return Err(LcError::NonUniqueImage(format!(
                        "homomorphism law fails at {a}·{b}"
                    )));
                }
            }
        }
    }
    Ok(hom)
}

/// A table row of the classification: (3, 1) is Table 3 row 1, and so on.
#[derive(Clone, Debug)]
pub struct Classification<T> {
    pub conditions: ConditionProfile<T>,
    pub hom: SymmetryHom,
    pub table: Option<(u8, u8)>,
    pub unfolding: Vec<String>,
}

fn table_row<T: Real>(c: &ConditionProfile<T>) -> Option<(u8, u8)> {
    let (he, ho) = (c.h_even.holds, c.h_odd.holds);
    let (ke, ko) = (c.k_even.holds, c.k_odd.holds);
    if c.h_eq_k.holds && he {
        return Some((3, 1));
    }
    if c.h_eq_k.holds && ho {
        return Some((3, 2));
    }
    if c.h_eq_neg_k.holds && he {
        return Some((3, 3));
    }
    if c.h_eq_neg_k.holds && ho {
        return Some((3, 4));
    }
    match (he, ho, ke, ko) {
        (true, _, true, _) => return Some((4, 1)),
        (true, _, _, true) => return Some((4, 2)),
        (_, true, true, _) => return Some((4, 3)),
        (_, true, _, true) => return Some((4, 4)),
        _ => {}
    }
    if he {
        return Some((5, 1));
    }
    if ho {
        return Some((5, 2));
    }
    if ke {
        return Some((5, 3));
    }
    if ko {
        return Some((5, 4));
    }
    if c.h_neg_eq_k.holds {
        return Some((5, 5));
    }
    if c.h_neg_eq_neg_k.holds {
        return Some((5, 6));
    }
    if c.h_eq_k.holds {
        return Some((5, 7));
    }
    if c.h_eq_neg_k.holds {
        return Some((5, 8));
    }
    None
}

/// Identifies the table row of the detected symmetry and, when h or k is
/// even, suggests the odd-extension unfolding and its predicted class.
pub fn classify<T: Real>(m: &LCMap<T>) -> Result<Classification<T>> {
    let conditions = detect_conditions(m, 33, T::of(DEFAULT_TOL))?;
    let hom = full_symmetry_group(m)?;
    let table = table_row(&conditions);
    let mut unfolding = Vec::new();
    let mut predicted = conditions.clone();
    let mut any = false;
    let yes = Flag {
        holds: true,
        residual: T::zero(),
    };
    let no = Flag {
        holds: false,
        residual: T::infinity(),
    };
    if conditions.h_even.holds {
        unfolding.push("replace h by the odd extension of its positive part".to_string());
        predicted.h_even = no;
        predicted.h_odd = yes;
        any = true;
    }
    if conditions.k_even.holds {
        unfolding.push("replace k by the odd extension of its positive part".to_string());
        predicted.k_even = no;
        predicted.k_odd = yes;
        any = true;
    }
    if any {
        // equality conditions between h and k survive only if both or
        // neither component is unfolded and the halves already agree
        if conditions.h_even.holds != conditions.k_even.holds {
            predicted.h_eq_k = no;
            predicted.h_eq_neg_k = no;
            predicted.h_neg_eq_k = no;
            predicted.h_neg_eq_neg_k = no;
        }
        match table_row(&predicted) {
            Some((t, r)) => unfolding.push(format!("predicted class: Table {t} row {r}")),
            None => unfolding.push("predicted class: no D4 symmetry".to_string()),
        }
    }
    Ok(Classification {
        conditions,
        hom,
        table,
        unfolding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::D4Element::*;
    use crate::grammar::parse;

    fn map(h: &str, k: &str) -> LCMap<f64> {
        LCMap::new(parse(h).unwrap(), parse(k).unwrap())
    }

    #[test]
    fn conditions_quadratic() {
        let c = detect_conditions(&map("pow:2", "pow:2"), 33, 1e-9).unwrap();
        assert!(c.h_even.holds && c.k_even.holds && c.h_eq_k.holds);
        assert!(!c.h_odd.holds && !c.k_odd.holds);
        let c = detect_conditions(&map("odd(pow:2)", "id"), 33, 1e-9).unwrap();
        assert!(c.h_odd.holds && c.k_odd.holds && !c.h_eq_k.holds);
        let c = detect_conditions(&LCMap::identity(), 33, 1e-9).unwrap();
        assert!(c.h_odd.holds && c.k_odd.holds && c.h_eq_k.holds);
    }

    #[test]
    fn constant_component_rejected() {
        let m = LCMap::new(parse("poly:5,0").unwrap(), MonotoneMap::identity());
        assert!(matches!(
            detect_conditions(&m, 33, 1e-9),
            Err(LcError::ConstantFunction)
        ));
    }

    #[test]
    fn pair_residuals() {
        let m = map("pow:2", "pow:2");
        assert_eq!(verify_pair(&m, E, E, 17).unwrap(), 0.0);
        // h even: α∘στ = (h(−Y), h(X)) = (h(Y), h(X)) = τ∘α
        assert!(verify_pair(&m, St, T, 17).unwrap() < 1e-12);
        // (e, τ) would force h(X) = k(Y)
        assert!(verify_pair(&m, E, T, 17).unwrap() > 0.1);
    }

    #[test]
    fn table3_rows() {
        // row 1: h = k even, D4 → R_u, (σ, στ) ↦ (e, τ)
        let hom = full_symmetry_group(&map("pow:2", "pow:2")).unwrap();
        assert_eq!(hom.s1, Subgroup::D4);
        assert_eq!(hom.s2, Subgroup::Rx);
        assert_eq!(hom.image_of(S), Some(E));
        assert_eq!(hom.image_of(St), Some(T));
        // row 2: h = k odd, the identity isomorphism
        let hom = full_symmetry_group(&map("odd(pow:2)", "odd(pow:2)")).unwrap();
        assert_eq!(hom.s1, Subgroup::D4);
        assert_eq!(hom.s2, Subgroup::D4);
        for g in D4_ALL {
            assert_eq!(hom.image_of(g), Some(g));
        }
        // row 3: h = −k even, D4 → R_v, (σ, στ) ↦ (e, στσ)
        let hom = full_symmetry_group(&map("pow:2", "neg(pow:2)")).unwrap();
        assert_eq!(hom.s1, Subgroup::D4);
        assert_eq!(hom.s2, Subgroup::Ry);
        assert_eq!(hom.image_of(S), Some(E));
        assert_eq!(hom.image_of(St), Some(Sts));
        // row 4: h = −k odd, (σ, στ) ↦ (σ, (στ)³)
        let hom = full_symmetry_group(&map("odd(pow:2)", "neg(odd(pow:2))")).unwrap();
        assert_eq!(hom.s1, Subgroup::D4);
        assert_eq!(hom.s2, Subgroup::D4);
        assert_eq!(hom.image_of(S), Some(S));
        assert_eq!(hom.image_of(St), Some(St3));
    }

    #[test]
    fn table4_rows() {
        // h even, k even (h ≠ k): R_XY → I
        let hom = full_symmetry_group(&map("pow:2", "abs")).unwrap();
        assert_eq!(hom.s1, Subgroup::RXY);
        assert_eq!(hom.s2, Subgroup::Trivial);
        // h even, k odd: R_XY → R_V, (σ, τστ) ↦ (e, τστ)
        let hom = full_symmetry_group(&map("pow:2", "id")).unwrap();
        assert_eq!(hom.s1, Subgroup::RXY);
        assert_eq!(hom.s2, Subgroup::RY);
        assert_eq!(hom.image_of(S), Some(E));
        assert_eq!(hom.image_of(Tst), Some(Tst));
        // h odd, k even: R_XY → R_U, (σ, τστ) ↦ (σ, e)
        let hom = full_symmetry_group(&map("odd(pow:2)", "abs")).unwrap();
        assert_eq!(hom.s1, Subgroup::RXY);
        assert_eq!(hom.s2, Subgroup::RX);
        assert_eq!(hom.image_of(S), Some(S));
        assert_eq!(hom.image_of(Tst), Some(E));
        // h odd, k odd (h ≠ ±k): R_XY → R_UV identity on generators
        let hom = full_symmetry_group(&map("odd(pow:2)", "id")).unwrap();
        assert_eq!(hom.s1, Subgroup::RXY);
        assert_eq!(hom.s2, Subgroup::RXY);
        assert_eq!(hom.image_of(S), Some(S));
        assert_eq!(hom.image_of(Tst), Some(Tst));
        assert_eq!(hom.image_of(St2), Some(St2));
    }

    #[test]
    fn table5_rows() {
        // only h even: R_X → I
        let hom = full_symmetry_group(&map("cos", "comp(affine:0.5,0,poly:0,-1,1)")).unwrap();
        assert_eq!(hom.s1, Subgroup::RX);
        assert_eq!(hom.s2, Subgroup::Trivial);
        assert_eq!(hom.image_of(S), Some(E));
        // only k odd: R_Y → R_V
        let hom = full_symmetry_group(&map("ridge:0.5", "id")).unwrap();
        assert_eq!(hom.s1, Subgroup::RY);
        assert_eq!(hom.s2, Subgroup::RY);
        assert_eq!(hom.image_of(Tst), Some(Tst));
        // h = k, neither parity: R_x → R_u
        let hom = full_symmetry_group(&map("ridge:0.5", "ridge:0.5")).unwrap();
        assert_eq!(hom.s1, Subgroup::Rx);
        assert_eq!(hom.s2, Subgroup::Rx);
        assert_eq!(hom.image_of(T), Some(T));
        // no symmetry at all
        let hom = full_symmetry_group(&map("ridge:0.5", "exp1")).unwrap();
        assert_eq!(hom.s1, Subgroup::Trivial);
        assert_eq!(hom.pairs, vec![(E, E)]);
    }

    #[test]
    fn classify_rows_and_unfolding() {
        let c = classify(&map("pow:2", "pow:2")).unwrap();
        assert_eq!(c.table, Some((3, 1)));
        assert!(c.unfolding.iter().any(|s| s.contains("Table 3 row 2")));
        let c = classify(&map("pow:2", "abs")).unwrap();
        assert_eq!(c.table, Some((4, 1)));
        let c = classify(&map("ridge:0.5", "exp1")).unwrap();
        assert_eq!(c.table, None);
        assert!(c.unfolding.is_empty());
    }
}
