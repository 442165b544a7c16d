//! Acceptance suite: one test per release criterion, each printing a single
//! pass/fail line with the decisive residual before asserting.

use lcplane::constructions::{
    crop, cyclic_residual, realize_crossing, realize_square, recover_gauge, unfold, Quadrilateral,
    RayFamily,
};
use lcplane::grammar::parse;
use lcplane::lcmap::{
    crossing_tangent_check, klein_gordon_flatten, verify_lorentz_cr_fn,
};
use lcplane::random::{four_scale, four_scale_map, ray_bijection, rng, unit_bijection};
use lcplane::render::{render_contours, RenderOptions};
use lcplane::symmetry::full_symmetry_group;
use lcplane::verify::{rectangle_rule_test, signal_bounce_top, top_side_residual, CurveKind};
use lcplane::{
    D4Element, Family, Interval, LCMap, MapExpr, MonotoneMap, PointChar, PointXY, Subgroup,
};

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n:>2} {name}: {} ({detail})",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} {name} failed: {detail}");
}

fn ray_id() -> MonotoneMap<f64> {
    MonotoneMap::identity().restrict_to(Interval::half_line())
}

fn ray_triple(seed: u64, missing: usize) -> RayFamily<f64> {
    let mut r = rng(seed);
    let mut g: [Option<MonotoneMap<f64>>; 4] = [None, None, None, None];
    for slot in g.iter_mut().enumerate().filter(|(i, _)| *i != missing) {
        *slot.1 = Some(ray_bijection(&mut r, 3));
    }
    RayFamily::new(g)
}

fn quad_triple(seed: u64, missing: usize) -> Quadrilateral<f64> {
    let mut r = rng(seed);
    let mut g: [Option<MonotoneMap<f64>>; 4] = [None, None, None, None];
    for slot in g.iter_mut().enumerate().filter(|(i, _)| *i != missing) {
        *slot.1 = Some(unit_bijection(&mut r, 3));
    }
    Quadrilateral::unit(g)
}

#[test]
fn c01_ridge_contour_profile() {
    let a = 0.5;
    let h = parse::<f64>(&format!("ridge:{a}")).unwrap();
    let m = LCMap::new(h.clone(), h);
    // the v = 0 contour solves h(x+y) + h(y-x) = 0 for y at fixed x;
    // the left side is strictly increasing in y
    let mut worst = 0.0f64;
    for i in 0..201 {
        let x = -3.0 + 6.0 * i as f64 / 200.0;
        let f = |y: f64| m.h().eval(x + y).unwrap() + m.k().eval(y - x).unwrap();
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = 0.5 * (lo + hi);
        let expect = -a * x.abs() / (1.0 + x.abs());
        worst = worst.max((y - expect).abs());
    }
    let xs = Interval::new(-3.0, 3.0).grid(201);
    let contour = m.contour(Family::U, 0.0, &xs);
    let mut axis = 0.0f64;
    let mut n = 0usize;
    for p in contour.points() {
        axis = axis.max(((p.cx - p.cy) / 2.0).abs());
        n += 1;
    }
    let ok = worst < 1e-9 && axis < 1e-12 && n > 100;
    report(
        1,
        "ridge contour profile",
        ok,
        &format!("v=0 residual {worst:.2e}, u=0 axis offset {axis:.2e}"),
    );
}

#[test]
fn c02_folded_quadratic_identity() {
    let m = LCMap::new(parse::<f64>("pow:2").unwrap(), parse("pow:2").unwrap());
    let mut worst = 0.0f64;
    for i in 0..21 {
        for j in 0..21 {
            let x = -2.0 + 4.0 * i as f64 / 20.0;
            let y = -2.0 + 4.0 * j as f64 / 20.0;
            let q = m.eval(PointXY::new(x, y)).unwrap();
            worst = worst
                .max((q.x - 2.0 * x * y).abs())
                .max((q.y - (x * x + y * y)).abs());
        }
    }
    report(
        2,
        "folded quadratic identity",
        worst < 1e-12,
        &format!("max deviation {worst:.2e}"),
    );
}

#[test]
fn c03_crossing_realization() {
    let mut worst_cyc = 0.0f64;
    let mut worst_ray = 0.0f64;
    for i in 0..50u64 {
        let fam = ray_triple(300 + i, (i % 4) as usize);
        let g = fam.complete().unwrap();
        worst_cyc = worst_cyc.max(cyclic_residual(&g, 101));
        let m = realize_crossing(&fam, &ray_id()).unwrap();
        // 25 sample points on each of the four rays must sit on the u = 0
        // or v = 0 contour of the realized map
        for j in 0..25 {
            let t = 3.0 * (j + 1) as f64 / 25.0;
            let pts = [
                (Family::U, PointChar::new(t, g[0].eval(t).unwrap())),
                (Family::V, PointChar::new(-g[1].eval(t).unwrap(), t)),
                (Family::U, PointChar::new(-t, -g[2].eval(t).unwrap())),
                (Family::V, PointChar::new(g[3].eval(t).unwrap(), -t)),
            ];
            for (family, p) in pts {
                worst_ray = worst_ray.max(m.contour_residual(family, 0.0, p).unwrap());
            }
        }
    }
    let ok = worst_cyc < 1e-9 && worst_ray < 1e-8;
    report(
        3,
        "crossing realization",
        ok,
        &format!("cyclic {worst_cyc:.2e}, ray incidence {worst_ray:.2e}"),
    );
}

#[test]
fn c04_gauge_freedom() {
    let mut worst_odd = 0.0f64;
    let mut worst_shared = 0.0f64;
    for i in 0..20u64 {
        let fam = ray_triple(400 + i, (i % 4) as usize);
        let mut r = rng(450 + i);
        let p1 = ray_bijection::<f64>(&mut r, 3);
        let p2 = ray_bijection::<f64>(&mut r, 3);
        let m1 = realize_crossing(&fam, &p1).unwrap();
        let m2 = realize_crossing(&fam, &p2).unwrap();
        let ell = recover_gauge(&m1, &m2).unwrap();
        worst_odd = worst_odd.max(ell.oddness_residual(65).unwrap());
        // the two maps have identical u = 0 and v = 0 contours
        let xs = Interval::new(-3.0, 3.0).grid(41);
        for family in [Family::U, Family::V] {
            for p in m1.contour(family, 0.0, &xs).points() {
                if let Ok(res) = m2.contour_residual(family, 0.0, p) {
                    worst_shared = worst_shared.max(res);
                }
            }
        }
    }
    let ok = worst_odd < 1e-10 && worst_shared < 1e-8;
    report(
        4,
        "gauge freedom",
        ok,
        &format!("oddness {worst_odd:.2e}, shared contours {worst_shared:.2e}"),
    );
}

#[test]
fn c05_square_realization() {
    let mut worst_side = 0.0f64;
    let mut worst_bounce = 0.0f64;
    let mut corners_exact = true;
    for i in 0..50u64 {
        let q = quad_triple(500 + i, (i % 4) as usize);
        let g = q.complete().unwrap();
        let m = realize_square(&q, &MonotoneMap::identity().restrict_to(Interval::unit()))
            .unwrap();
        for j in 0..13 {
            let t = j as f64 / 12.0;
            // side points in characteristic coordinates and the square side
            // relation their image must satisfy: h ± k = ±1
            let cases = [
                (t, g[0].eval(1.0 - t).unwrap(), 1.0, 1.0, 1.0),
                (-g[1].eval(1.0 - t).unwrap(), t, -1.0, 1.0, 1.0),
                (t - 1.0, -g[2].eval(t).unwrap(), 1.0, 1.0, -1.0),
                (g[3].eval(1.0 - t).unwrap(), -t, 1.0, -1.0, 1.0),
            ];
            for (cx, cy, sh, sk, rhs) in cases {
                let val = sh * m.h().eval(cx).unwrap() + sk * m.k().eval(cy).unwrap();
                worst_side = worst_side.max((val - rhs).abs());
            }
        }
        for f in [m.h(), m.k()] {
            for t in [-1.0, 0.0, 1.0] {
                corners_exact &= f.eval(t).unwrap() == t;
            }
        }
        let top = signal_bounce_top(&g[2], &g[1], &g[3], 50).unwrap();
        worst_bounce = worst_bounce.max(top_side_residual(&g[0], &top).unwrap());
    }
    let ok = worst_side < 1e-8 && corners_exact && worst_bounce < 1e-7;
    report(
        5,
        "square realization",
        ok,
        &format!(
            "side incidence {worst_side:.2e}, corners exact {corners_exact}, bounce {worst_bounce:.2e}"
        ),
    );
}

#[test]
fn c06_rectangle_rules() {
    let mut worst_good = 0.0f64;
    let mut best_bad = f64::INFINITY;
    for i in 0..50u64 {
        let g = ray_triple(300 + i, (i % 4) as usize).complete().unwrap();
        let rep = rectangle_rule_test(CurveKind::CrossingRays, &g, 200, 600 + i);
        assert!(rep.pass, "ray family {i} failed the rectangle rule");
        worst_good = worst_good.max(rep.max_residual);
        if i < 5 {
            // scale the fourth ray by 1.1 above t = 1; the rule must notice
            let mut bad = g.clone();
            bad[3] = MonotoneMap::new(MapExpr::Piecewise {
                split: 1.0,
                left: Box::new(g[3].expr().clone()),
                right: Box::new(MapExpr::Compose {
                    outer: Box::new(MapExpr::Affine { a: 1.1, b: 0.0 }),
                    inner: Box::new(g[3].expr().clone()),
                }),
            })
            .restrict_to(Interval::half_line());
            let rep = rectangle_rule_test(CurveKind::CrossingRays, &bad, 200, 600 + i);
            assert!(!rep.pass);
            best_bad = best_bad.min(rep.max_residual);
        }
    }
    let bump = parse::<f64>("pwl:0,0;0.5,0.65;1,1").unwrap();
    for i in 0..50u64 {
        let g = quad_triple(500 + i, (i % 4) as usize).complete().unwrap();
        let rep = rectangle_rule_test(CurveKind::SquareSides, &g, 200, 650 + i);
        assert!(rep.pass, "side family {i} failed the rectangle rule");
        worst_good = worst_good.max(rep.max_residual);
        if i < 5 {
            let mut bad = g.clone();
            bad[3] = bump.compose(&g[3]).unwrap();
            let rep = rectangle_rule_test(CurveKind::SquareSides, &bad, 200, 650 + i);
            assert!(!rep.pass);
            best_bad = best_bad.min(rep.max_residual);
        }
    }
    let ok = worst_good < 1e-6 && best_bad > 1e-2;
    report(
        6,
        "rectangle rules",
        ok,
        &format!("valid families {worst_good:.2e}, perturbed families {best_bad:.2e}"),
    );
}

#[test]
fn c07_crossing_slope_products() {
    let mut r = rng(700);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let params = four_scale::<f64>(&mut r);
        let m = four_scale_map(&params);
        let (x0, y0) = params.center;
        let (u0, v0) = params.shift;
        let xs = Interval::new(x0 - 0.4, x0 + 0.4).grid(41);
        let cu: Vec<PointChar<f64>> =
            m.contour(Family::U, (u0 - v0) / 2.0, &xs).points().collect();
        let cv: Vec<PointChar<f64>> =
            m.contour(Family::V, (u0 + v0) / 2.0, &xs).points().collect();
        let rep = crossing_tangent_check(&cu, &cv, PointChar::new(x0, y0)).unwrap();
        worst = worst.max((rep.m_minus * rep.m_plus - rep.n_minus * rep.n_plus).abs());
    }
    report(
        7,
        "crossing slope products",
        worst < 1e-10,
        &format!("max |m-m+ - n-n+| = {worst:.2e}"),
    );
}

#[test]
fn c08_unfolding() {
    let mut worst_quad = 0.0f64;
    let mut worst_round = 0.0f64;
    for spec in ["pow:2", "comp(exp1,abs)", "abspow:3"] {
        let p = parse::<f64>(spec).unwrap();
        let folded = LCMap::new(p.clone(), p.clone());
        let unfolded = unfold(&p, false).unwrap();
        // agreement where both characteristic coordinates are positive
        for i in 0..10 {
            for j in 0..10 {
                let cx = 0.1 + 1.8 * i as f64 / 9.0;
                let cy = 0.1 + 1.8 * j as f64 / 9.0;
                let pt = PointXY::new((cx - cy) / 2.0, (cx + cy) / 2.0);
                let a = folded.eval(pt).unwrap();
                let b = unfolded.eval(pt).unwrap();
                worst_quad = worst_quad.max((a.x - b.x).abs()).max((a.y - b.y).abs());
            }
        }
        assert!(unfolded.is_invertible());
        for i in 0..8 {
            for j in 0..8 {
                let pt = PointXY::new(-1.5 + 3.0 * i as f64 / 7.0, -1.5 + 3.0 * j as f64 / 7.0);
                let back = unfolded.invert_point(unfolded.eval(pt).unwrap()).unwrap();
                worst_round = worst_round.max((back.x - pt.x).abs()).max((back.y - pt.y).abs());
            }
        }
    }
    let ok = worst_quad < 1e-12 && worst_round < 1e-9;
    report(
        8,
        "unfolding",
        ok,
        &format!("first quadrant {worst_quad:.2e}, round trip {worst_round:.2e}"),
    );
}

#[test]
fn c09_cropping() {
    let h = parse::<f64>("odd(pow:2)").unwrap();
    let region = (Interval::new(-3.0, 3.0), Interval::new(-3.0, 3.0));
    let mut worst = 0.0f64;
    let mut cropped_clear = true;
    for c in [0.1, 1.0, 5.0] {
        let m = crop(&h, c).unwrap();
        for i in 0..121 {
            let t = -3.0 + 6.0 * i as f64 / 120.0;
            // h(t ± c) − h(±c) with h(s) = sgn(s)s²: t² + 2ct for t ≥ 0,
            // −t² + 2ct for t ≤ 0
            let expect = if t >= 0.0 {
                t * t + 2.0 * c * t
            } else {
                -t * t + 2.0 * c * t
            };
            worst = worst.max((m.h().eval(t).unwrap() - expect).abs());
        }
        cropped_clear &= m.tangency_locus(region, 41, 1e-2).tangent.is_empty();
    }
    let m0 = crop(&h, 0.0).unwrap();
    let locus = m0.tangency_locus(region, 41, 1e-2);
    let on_axes = !locus.tangent.is_empty()
        && locus.tangent.iter().all(|p| p.cx == 0.0 || p.cy == 0.0);
    let ok = worst < 1e-12 && cropped_clear && on_axes;
    report(
        9,
        "cropping",
        ok,
        &format!("closed form {worst:.2e}, c>0 locus empty {cropped_clear}, c=0 locus on axes {on_axes}"),
    );
}

#[test]
fn c10_symmetry_tables() {
    use D4Element::*;
    struct Case {
        name: &'static str,
        h: &'static str,
        k: &'static str,
        s1: Subgroup,
        s2: Subgroup,
        images: &'static [(D4Element, D4Element)],
    }
    let cases = [
        // h = k with a parity: the full D4 homomorphisms
        Case { name: "diag even", h: "pow:2", k: "pow:2", s1: Subgroup::D4, s2: Subgroup::Rx, images: &[(S, E), (St, T)] },
        Case { name: "diag odd", h: "odd(pow:2)", k: "odd(pow:2)", s1: Subgroup::D4, s2: Subgroup::D4, images: &[(S, S), (St, St)] },
        Case { name: "antidiag even", h: "pow:2", k: "neg(pow:2)", s1: Subgroup::D4, s2: Subgroup::Ry, images: &[(S, E), (St, Sts)] },
        Case { name: "antidiag odd", h: "odd(pow:2)", k: "neg(odd(pow:2))", s1: Subgroup::D4, s2: Subgroup::D4, images: &[(S, S), (St, St3)] },
        // independent parities of h and k
        Case { name: "even/even", h: "pow:2", k: "abs", s1: Subgroup::RXY, s2: Subgroup::Trivial, images: &[(S, E), (Tst, E)] },
        Case { name: "even/odd", h: "pow:2", k: "id", s1: Subgroup::RXY, s2: Subgroup::RY, images: &[(S, E), (Tst, Tst)] },
        Case { name: "odd/even", h: "odd(pow:2)", k: "abs", s1: Subgroup::RXY, s2: Subgroup::RX, images: &[(S, S), (Tst, E)] },
        Case { name: "odd/odd", h: "odd(pow:2)", k: "id", s1: Subgroup::RXY, s2: Subgroup::RXY, images: &[(S, S), (Tst, Tst)] },
        Case { name: "even/odd quadratic", h: "pow:2", k: "odd(pow:2)", s1: Subgroup::RXY, s2: Subgroup::RY, images: &[(S, E), (Tst, Tst)] },
        Case { name: "odd sine/even root", h: "sin", k: "abspow:0.5", s1: Subgroup::RXY, s2: Subgroup::RX, images: &[(S, S), (Tst, E)] },
        Case { name: "even sine/odd", h: "comp(sin,abs)", k: "id", s1: Subgroup::RXY, s2: Subgroup::RY, images: &[(S, E), (Tst, Tst)] },
        Case { name: "even sine/odd cosine", h: "comp(sin,abs)", k: "odd(cos)", s1: Subgroup::RXY, s2: Subgroup::RY, images: &[(S, E), (Tst, Tst)] },
        // a single order-two symmetry
        Case { name: "plain/odd", h: "piece(0,poly:0,1,1,poly:0,3,1)", k: "id", s1: Subgroup::RY, s2: Subgroup::RY, images: &[(Tst, Tst)] },
        Case { name: "plain/even", h: "piece(0,poly:0,1,1,poly:0,3,1)", k: "pow:2", s1: Subgroup::RY, s2: Subgroup::Trivial, images: &[(Tst, E)] },
        Case { name: "even cosine/plain", h: "cos", k: "comp(affine:0.5,0,poly:0,-1,1)", s1: Subgroup::RX, s2: Subgroup::Trivial, images: &[(S, E)] },
        Case { name: "odd/plain", h: "odd(pow:2)", k: "comp(affine:0.5,0,poly:0,-1,1)", s1: Subgroup::RX, s2: Subgroup::RX, images: &[(S, S)] },
        Case { name: "reflected pair", h: "comp(ridge:0.5,affine:-1,0)", k: "ridge:0.5", s1: Subgroup::Ry, s2: Subgroup::Rx, images: &[(Sts, T)] },
        Case { name: "antireflected pair", h: "neg(comp(ridge:0.5,affine:-1,0))", k: "ridge:0.5", s1: Subgroup::Ry, s2: Subgroup::Ry, images: &[(Sts, Sts)] },
        Case { name: "diag ridge", h: "ridge:0.5", k: "ridge:0.5", s1: Subgroup::Rx, s2: Subgroup::Rx, images: &[(T, T)] },
        Case { name: "antidiag ridge", h: "ridge:0.5", k: "neg(ridge:0.5)", s1: Subgroup::Rx, s2: Subgroup::Ry, images: &[(T, Sts)] },
        // no symmetry at all
        Case { name: "asymmetric a", h: "piece(0,id,pow:2)", k: "piece(0,poly:0,3,1,poly:0,1,-1)", s1: Subgroup::Trivial, s2: Subgroup::Trivial, images: &[(E, E)] },
        Case { name: "asymmetric b", h: "piece(0,poly:0,1,1,poly:0,3,1)", k: "piece(0,poly:0,3,1,poly:0,1,1)", s1: Subgroup::Trivial, s2: Subgroup::Trivial, images: &[(E, E)] },
        Case { name: "asymmetric c", h: "ridge:0.5", k: "piece(0,poly:0,3,1,poly:0,1,-1)", s1: Subgroup::Trivial, s2: Subgroup::Trivial, images: &[(E, E)] },
    ];
    let mut ok = true;
    let mut detail = String::new();
    for case in &cases {
        let m = LCMap::new(parse::<f64>(case.h).unwrap(), parse(case.k).unwrap());
        let hom = full_symmetry_group(&m).unwrap();
        let mut good = hom.s1 == case.s1 && hom.s2 == case.s2;
        for &(g, gp) in case.images {
            good &= hom.image_of(g) == Some(gp);
        }
        if !good {
            ok = false;
            detail.push_str(&format!(
                "{}: got {:?}->{:?}; ",
                case.name, hom.s1, hom.s2
            ));
        }
    }
    if detail.is_empty() {
        detail = format!("{} classes match", cases.len());
    }
    report(10, "symmetry tables", ok, &detail);
}

#[test]
fn c11_lorentz_cauchy_riemann() {
    let pool = [
        "exp1",
        "sinmono",
        "poly:0,1,0,0.3",
        "poly:0,2,0.4,0.1",
        "comp(affine:0.5,0,exp1)",
        "affine:2,0.3",
    ];
    let mut r = rng(1100);
    use rand::Rng;
    let region = (Interval::new(-0.4, 0.4), Interval::new(-0.4, 0.4));
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let h = parse::<f64>(pool[r.gen_range(0..pool.len())]).unwrap();
        let k = parse::<f64>(pool[r.gen_range(0..pool.len())]).unwrap();
        let m = LCMap::new(h, k);
        let rep = verify_lorentz_cr_fn(|q| m.eval(q).ok(), region, 9, 1e-5);
        assert!(rep.pass, "smooth pair failed: {:.2e}", rep.max_residual);
        worst = worst.max(rep.max_residual);
    }
    // coupling v to X breaks the decoupled characteristic structure
    let h = parse::<f64>("exp1").unwrap();
    let k = parse::<f64>("sinmono").unwrap();
    let perturbed = move |p: PointXY<f64>| -> Option<PointXY<f64>> {
        let (cx, cy) = (p.x + p.y, p.y - p.x);
        let u = h.eval(cx).ok()?;
        let v = k.eval(cy).ok()? + 0.1 * cx;
        Some(PointXY::new((u - v) / 2.0, (u + v) / 2.0))
    };
    let bad = verify_lorentz_cr_fn(perturbed, region, 9, 1e-5);
    let ok = worst < 1e-5 && !bad.pass;
    report(
        11,
        "Lorentz Cauchy-Riemann",
        ok,
        &format!("smooth {worst:.2e}, perturbed residual {:.2e}", bad.max_residual),
    );
}

#[test]
fn c12_wave_density_flattening() {
    let m = klein_gordon_flatten(
        |t: f64| t.exp(),
        |t: f64| 1.0 + t * t,
        Interval::new(-2.0, 2.0),
    )
    .unwrap();
    let mut worst = 0.0f64;
    for i in 0..81 {
        let t = -2.0 + 4.0 * i as f64 / 80.0;
        worst = worst.max((m.h().eval(t).unwrap() - (t.exp() - 1.0)).abs());
        worst = worst.max((m.k().eval(t).unwrap() - (t + t * t * t / 3.0)).abs());
    }
    report(
        12,
        "wave density flattening",
        worst < 1e-8,
        &format!("antiderivative error {worst:.2e}"),
    );
}

#[test]
fn c13_render_determinism() {
    let h = parse::<f64>("ridge:0.5").unwrap();
    let m = LCMap::new(h.clone(), h);
    let opts = RenderOptions {
        window_x: Interval::new(-2.0, 2.0),
        window_y: Interval::new(-2.0, 2.0),
        levels_u: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        levels_v: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        resolution: 81,
        highlights: vec![(Family::V, 0.0)],
    };
    let a = render_contours(&m, &opts).unwrap();
    let b = render_contours(&m, &opts).unwrap();
    let ok = a.csv == b.csv && a.svg == b.svg && a.csv.lines().count() > 50;
    report(
        13,
        "render determinism",
        ok,
        &format!("{} CSV rows byte-identical", a.csv.lines().count() - 1),
    );
}
