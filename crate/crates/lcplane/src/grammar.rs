//! Textual function-spec grammar used by the CLI and serialized families.
//!
//! Builtins: `id`, `affine:a,b`, `pow:p`, `exp1`, `ridge:a`, `sinmono`,
//! `pwl:x0,y0;x1,y1;...`, plus the folded helpers `sq` (alias for `pow:2`),
//! `abs`, `abspow:p`, `sin`, `cos` and `poly:c0,c1,...`.
//! Combinators: `odd(f)`, `tilde(f)`, `inv(f)`, `comp(f,g)` meaning f∘g,
//! `neg(f)`, `piece(split,left,right)`.
//!
//! Whitespace is ignored everywhere; reals accept decimal or scientific
//! notation. `pow:p` is t^p, an even function for even integer p; the odd
//! branch sgn(t)|t|^p is written `odd(pow:p)`.

use crate::error::{LcError, Result};
use crate::monotone::{MapExpr, MonotoneMap};
use crate::scalar::Real;

pub fn parse<T: Real>(spec: &str) -> Result<MonotoneMap<T>> {
    let cleaned: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(LcError::Parse("empty function spec".into()));
    }
    let expr = parse_expr(&cleaned)?;
    Ok(MonotoneMap::new(expr))
}

fn parse_expr<T: Real>(s: &str) -> Result<MapExpr<T>> {
    // combinator form: name(args)
    if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(LcError::Parse(format!("unbalanced parentheses in `{s}`")));
        }
        let name = &s[..open];
        let inner = &s[open + 1..s.len() - 1];
        let tokens = split_top_level(inner)?;
        return match name {
            "odd" | "tilde" | "inv" | "neg" => {
                let f = Box::new(parse_expr(&tokens.join(","))?);
                Ok(match name {
                    "odd" => MapExpr::OddExtension { half: f },
                    "tilde" => MapExpr::Tilde { inner: f },
                    "inv" => MapExpr::Inverse { inner: f },
                    _ => MapExpr::Negate { inner: f },
                })
            }
            "comp" => {
                let [f, g]: [MapExpr<T>; 2] = parse_expr_args(&tokens)?
                    .try_into()
                    .map_err(|_| LcError::Parse("internal arity error".into()))?;
                Ok(MapExpr::Compose {
                    outer: Box::new(f),
                    inner: Box::new(g),
                })
            }
            "piece" => {
                if tokens.len() < 3 {
                    return Err(LcError::Parse(format!("piece needs 3 arguments in `{s}`")));
                }
                let split = parse_real(tokens[0])?;
                let [left, right]: [MapExpr<T>; 2] = parse_expr_args(&tokens[1..])?
                    .try_into()
                    .map_err(|_| LcError::Parse("internal arity error".into()))?;
                Ok(MapExpr::Piecewise {
                    split,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
            _ => Err(LcError::Parse(format!("unknown combinator `{name}`"))),
        };
    }

    // builtin form: name or name:params
    let (name, params) = match s.find(':') {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => (s, ""),
    };
    match name {
        "id" => Ok(MapExpr::Identity),
        "exp1" => Ok(MapExpr::Exp1),
        "sinmono" => Ok(MapExpr::SinMono),
        "sin" => Ok(MapExpr::Sin),
        "cos" => Ok(MapExpr::Cos),
        "abs" => Ok(MapExpr::AbsPow { p: T::one() }),
        "sq" => Ok(MapExpr::Power { p: T::of(2.0) }),
        "affine" => {
            let v = parse_reals::<T>(params, 2)?;
            if v[0] == T::zero() {
                return Err(LcError::Parse("affine slope must be nonzero".into()));
            }
            Ok(MapExpr::Affine { a: v[0], b: v[1] })
        }
        "pow" => Ok(MapExpr::Power {
            p: parse_real(params)?,
        }),
        "abspow" => Ok(MapExpr::AbsPow {
            p: parse_real(params)?,
        }),
        "ridge" => Ok(MapExpr::Ridge {
            a: parse_real(params)?,
        }),
        "poly" => {
            let coeffs: Result<Vec<T>> = params.split(',').map(parse_real).collect();
            let coeffs = coeffs?;
            if coeffs.len() < 2 {
                return Err(LcError::Parse("poly needs at least two coefficients".into()));
            }
            Ok(MapExpr::Poly { coeffs })
        }
        "pwl" => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for pair in params.split(';') {
                let v = parse_reals::<T>(pair, 2)?;
                xs.push(v[0]);
                ys.push(v[1]);
            }
            if xs.len() < 2 {
                return Err(LcError::Parse("pwl needs at least two points".into()));
            }
            if !xs.windows(2).all(|w| w[0] < w[1]) {
                return Err(LcError::Parse("pwl x-coordinates must increase".into()));
            }
            Ok(MapExpr::PiecewiseLinear { xs, ys })
        }
        _ => Err(LcError::Parse(format!("unknown function `{name}`"))),
    }
}

/// Splits two expression arguments whose builtin parameters may themselves
/// contain top-level commas (e.g. `comp(affine:2,0,pwl:0,0;1,1)`): tries
/// partition points left to right and takes the first where both sides parse.
fn parse_expr_args<T: Real>(tokens: &[&str]) -> Result<Vec<MapExpr<T>>> {
    for i in 1..tokens.len() {
        let left = tokens[..i].join(",");
        let right = tokens[i..].join(",");
        if let (Ok(a), Ok(b)) = (parse_expr::<T>(&left), parse_expr::<T>(&right)) {
            return Ok(vec![a, b]);
        }
    }
    Err(LcError::Parse(format!(
        "cannot split `{}` into two function specs",
        tokens.join(",")
    )))
}

fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| LcError::Parse(format!("unbalanced parentheses in `{s}`")))?
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(LcError::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_real<T: Real>(s: &str) -> Result<T> {
    let v: f64 = s
        .parse()
        .map_err(|_| LcError::Parse(format!("bad number `{s}`")))?;
    Ok(T::of(v))
}

fn parse_reals<T: Real>(s: &str, n: usize) -> Result<Vec<T>> {
    let v: Result<Vec<T>> = s.split(',').map(parse_real).collect();
    let v = v?;
    if v.len() != n {
        return Err(LcError::Parse(format!(
            "expected {n} numbers, found {} in `{s}`",
            v.len()
        )));
    }
    Ok(v)
}

/// Canonical spec for an expression; `parse(print(e))` evaluates identically.
pub fn print<T: Real>(expr: &MapExpr<T>) -> String {
    match expr {
        MapExpr::Identity => "id".into(),
        MapExpr::Affine { a, b } => format!("affine:{a},{b}"),
        MapExpr::PowerOdd { p } => format!("odd(pow:{p})"),
        MapExpr::Power { p } => format!("pow:{p}"),
        MapExpr::AbsPow { p } => {
            if *p == T::one() {
                "abs".into()
            } else {
                format!("abspow:{p}")
            }
        }
        MapExpr::Exp1 => "exp1".into(),
        MapExpr::Sin => "sin".into(),
        MapExpr::Cos => "cos".into(),
        MapExpr::SinMono => "sinmono".into(),
        MapExpr::Ridge { a } => format!("ridge:{a}"),
        MapExpr::Poly { coeffs } => {
            let cs: Vec<String> = coeffs.iter().map(|c| format!("{c}")).collect();
            format!("poly:{}", cs.join(","))
        }
        MapExpr::PiecewiseLinear { xs, ys } => {
            let pts: Vec<String> = xs
                .iter()
                .zip(ys)
                .map(|(x, y)| format!("{x},{y}"))
                .collect();
            format!("pwl:{}", pts.join(";"))
        }
        MapExpr::Piecewise { split, left, right } => {
            format!("piece({split},{},{})", print(left), print(right))
        }
        MapExpr::Compose { outer, inner } => format!("comp({},{})", print(outer), print(inner)),
        MapExpr::Inverse { inner } => format!("inv({})", print(inner)),
        MapExpr::OddExtension { half } => format!("odd({})", print(half)),
        MapExpr::Tilde { inner } => format!("tilde({})", print(inner)),
        MapExpr::Negate { inner } => format!("neg({})", print(inner)),
        MapExpr::Custom(c) => format!("custom:{}", c.label),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn p(s: &str) -> MonotoneMap<f64> {
        parse(s).unwrap()
    }

    #[test]
    fn builtins_evaluate() {
        assert_eq!(p("id").eval(0.3).unwrap(), 0.3);
        assert_eq!(p("affine:2,1").eval(3.0).unwrap(), 7.0);
        assert_eq!(p("pow:2").eval(-3.0).unwrap(), 9.0);
        assert_eq!(p("odd(pow:2)").eval(-3.0).unwrap(), -9.0);
        assert_eq!(p("ridge:0.5").eval(1.0).unwrap(), 4.0);
        assert_eq!(p("sq").eval(-2.0).unwrap(), 4.0);
        assert_eq!(p("abs").eval(-2.5).unwrap(), 2.5);
    }

    #[test]
    fn whitespace_is_ignored() {
        let a = p("comp( affine:2,0 , pwl: 0,0 ; 1, 3 )");
        let b = p("comp(affine:2,0,pwl:0,0;1,3)");
        assert_eq!(a.eval(0.5).unwrap(), b.eval(0.5).unwrap());
        assert_eq!(a.eval(0.5).unwrap(), 3.0);
    }

    #[test]
    fn combinators_nest() {
        let f = p("tilde(comp(pow:2,pow:2))");
        // 1 - (1-s)^4 at s = 0.5
        assert!((f.eval(0.5).unwrap() - (1.0 - 0.5f64.powi(4))).abs() < 1e-15);
        let g = p("piece(0,affine:3,0,comp(affine:1,0,poly:0,1,1))");
        assert_eq!(g.eval(-1.0).unwrap(), -3.0);
        assert_eq!(g.eval(2.0).unwrap(), 6.0);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse::<f64>("nope").is_err());
        assert!(parse::<f64>("comp(id)").is_err());
        assert!(parse::<f64>("affine:0,1").is_err());
        assert!(parse::<f64>("pwl:1,0;0,1").is_err());
        assert!(parse::<f64>("odd(pow:2").is_err());
    }

    #[test]
    fn print_round_trips() {
        for spec in [
            "id",
            "affine:2,1",
            "pow:2.5",
            "exp1",
            "ridge:0.5",
            "sinmono",
            "pwl:0,0;0.25,0.5;1,1",
            "odd(pow:2)",
            "tilde(pow:3)",
            "inv(ridge:0.25)",
            "comp(exp1,affine:0.5,0)",
            "neg(id)",
            "piece(0,affine:0.5,0,pow:3)",
            "poly:0,3,-3,1",
        ] {
            let f = p(spec);
            let g = p(&print(f.expr()));
            let dom = f.domain().intersect(&Interval::new(-0.9, 0.9)).unwrap();
            for t in dom.grid(37) {
                let (a, b) = (f.eval(t), g.eval(t));
                match (a, b) {
                    (Ok(a), Ok(b)) => assert!((a - b).abs() < 1e-12, "{spec} at {t}"),
                    _ => panic!("{spec} failed to evaluate at {t}"),
                }
            }
        }
    }
}
