use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lcplane::constructions::{
    crop, flat_top_bottom, left_right_symmetric, realize_crossing, realize_square, unfold,
    Quadrilateral, RayFamily,
};
use lcplane::grammar;
use lcplane::lcmap::{klein_gordon_flatten, Family};
use lcplane::render::{render_contours, RenderOptions};
use lcplane::symmetry::classify;
use lcplane::verify::{rectangle_rule_test, CurveKind};
use lcplane::{Interval64, LcError, Map64, Monotone64, Point64};

#[derive(Parser)]
#[command(name = "lcplane", about = "Lorentz-conformal transformations of the plane", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a map at a point
    Eval {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        swapped: bool,
        /// Point as x,y
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Extract one contour as CSV
    Contour {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        family: String,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        /// Window as xlo,xhi,ylo,yhi in standard coordinates
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 101)]
        res: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Complete a crossing-ray family and realize it
    RealizeCrossing {
        #[arg(long)]
        g1: Option<String>,
        #[arg(long)]
        g2: Option<String>,
        #[arg(long)]
        g3: Option<String>,
        #[arg(long)]
        g4: Option<String>,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Complete a quadrilateral and realize the square map
    RealizeSquare {
        #[arg(long)]
        g1: Option<String>,
        #[arg(long)]
        g2: Option<String>,
        #[arg(long)]
        g3: Option<String>,
        #[arg(long)]
        g4: Option<String>,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Flat top and bottom square map from g and p
    FlatTop {
        #[arg(long)]
        g: String,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Left-right symmetric square map from g and p
    LrSym {
        #[arg(long)]
        g: String,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Unfold an even function into an invertible map
    Unfold {
        #[arg(long)]
        p: String,
        #[arg(long)]
        negated: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Crop characteristic strips of width c
    Crop {
        #[arg(long)]
        h: String,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Identify the D4 symmetry class
    Classify {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        swapped: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rectangle-rule test on a four-curve family file
    VerifyRect {
        /// File: first line `rays` or `sides`, then four function specs
        #[arg(long)]
        curves: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Defaults to the LC_SEED environment variable, then 0
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Render contour families as SVG (and CSV with --csv-out)
    Render {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        swapped: bool,
        /// Window as xlo,xhi,ylo,yhi
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        window: String,
        /// Comma-separated u levels
        #[arg(long, default_value = "-1,-0.5,0,0.5,1", allow_hyphen_values = true)]
        levels_u: String,
        /// Comma-separated v levels
        #[arg(long, default_value = "-1,-0.5,0,0.5,1", allow_hyphen_values = true)]
        levels_v: String,
        /// Highlight as FAMILY:LEVEL, repeatable
        #[arg(long)]
        highlight: Vec<String>,
        #[arg(long, default_value_t = 101)]
        res: usize,
        #[command(flatten)]
        out: OutArg,
        /// Write the CSV companion here
        #[arg(long)]
        csv_out: Option<String>,
    },
    /// Build the map flattening Klein-Gordon densities nu, mu
    KgFlatten {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        mu: String,
        /// Domain as a,b
        #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
        domain: String,
        #[arg(long, default_value_t = 33)]
        samples: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                LcError::Convergence(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn parse_map(spec: &str) -> Result<Monotone64, LcError> {
    grammar::parse(spec)
}

/// Construction inputs must be invertible; folded specs are only meaningful
/// under eval and render.
fn parse_monotone(spec: &str) -> Result<Monotone64, LcError> {
    let m = parse_map(spec)?;
    if !m.is_monotone() {
        return Err(LcError::Parse(format!(
            "`{spec}` is not monotone on its domain; construction inputs must be bijections"
        )));
    }
    Ok(m)
}

fn parse_numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, LcError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(str::trim).map(str::parse).collect();
    let v = v.map_err(|_| LcError::Parse(format!("bad {what} `{s}`")))?;
    if v.len() != n {
        return Err(LcError::Parse(format!(
            "{what} needs {n} numbers, found {}",
            v.len()
        )));
    }
    Ok(v)
}

fn parse_levels(s: &str) -> Result<Vec<f64>, LcError> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(str::trim)
        .map(|t| {
            t.parse()
                .map_err(|_| LcError::Parse(format!("bad level `{t}`")))
        })
        .collect()
}

fn parse_family(s: &str) -> Result<Family, LcError> {
    match s {
        "u" => Ok(Family::U),
        "v" => Ok(Family::V),
        _ => Err(LcError::Parse(format!("family must be u or v, got `{s}`"))),
    }
}

fn parse_window(s: &str) -> Result<(Interval64, Interval64), LcError> {
    let v = parse_numbers(s, 4, "window")?;
    if !(v[1] > v[0]) || !(v[3] > v[2]) {
        return Err(LcError::EmptyWindow);
    }
    Ok((Interval64::new(v[0], v[1]), Interval64::new(v[2], v[3])))
}

fn build_map(h: &str, k: &str, swapped: bool) -> Result<Map64, LcError> {
    let h = parse_map(h)?;
    let k = parse_map(k)?;
    Ok(if swapped {
        Map64::new_swapped(h, k)
    } else {
        Map64::new(h, k)
    })
}

fn emit(out: &OutArg, text: &str) -> Result<(), LcError> {
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| LcError::Parse(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn describe_map(m: &Map64) -> String {
    format!(
        "h = {}\nk = {}\n",
        grammar::print(m.h().expr()),
        grammar::print(m.k().expr())
    )
}

fn ray_family(
    g1: Option<String>,
    g2: Option<String>,
    g3: Option<String>,
    g4: Option<String>,
) -> Result<[Option<Monotone64>; 4], LcError> {
    let half = Interval64::half_line();
    let parse_ray = |s: Option<String>| -> Result<Option<Monotone64>, LcError> {
        s.map(|s| parse_monotone(&s).map(|m| m.restrict_to(half)))
            .transpose()
    };
    Ok([parse_ray(g1)?, parse_ray(g2)?, parse_ray(g3)?, parse_ray(g4)?])
}

fn side_family(
    g1: Option<String>,
    g2: Option<String>,
    g3: Option<String>,
    g4: Option<String>,
) -> Result<[Option<Monotone64>; 4], LcError> {
    let unit = Interval64::unit();
    let parse_side = |s: Option<String>| -> Result<Option<Monotone64>, LcError> {
        s.map(|s| parse_monotone(&s).map(|m| m.restrict_to(unit)))
            .transpose()
    };
    Ok([parse_side(g1)?, parse_side(g2)?, parse_side(g3)?, parse_side(g4)?])
}

fn run(cmd: Command) -> Result<(), LcError> {
    match cmd {
        Command::Eval {
            h,
            k,
            swapped,
            point,
        } => {
            let m = build_map(&h, &k, swapped)?;
            let p = parse_numbers(&point, 2, "point")?;
            let q = m.eval(Point64::new(p[0], p[1]))?;
            println!("u={} v={}", q.x, q.y);
            Ok(())
        }
        Command::Contour {
            h,
            k,
            family,
            level,
            window,
            res,
            out,
        } => {
            let m = build_map(&h, &k, false)?;
            let family = parse_family(&family)?;
            let (wx, wy) = parse_window(&window)?;
            let opts = RenderOptions {
                window_x: wx,
                window_y: wy,
                levels_u: if family == Family::U { vec![level] } else { vec![] },
                levels_v: if family == Family::V { vec![level] } else { vec![] },
                resolution: res,
                highlights: vec![],
            };
            let rendered = render_contours(&m, &opts)?;
            emit(&out, &rendered.csv)
        }
        Command::RealizeCrossing {
            g1,
            g2,
            g3,
            g4,
            p,
            out,
        } => {
            let fam = RayFamily::new(ray_family(g1, g2, g3, g4)?);
            let p = parse_monotone(&p)?.restrict_to(Interval64::half_line());
            let complete = fam.complete()?;
            let m = realize_crossing(&fam, &p)?;
            let rect = rectangle_rule_test(CurveKind::CrossingRays, &complete, 200, seed_from_env(None));
            let mut text = String::new();
            for (j, g) in complete.iter().enumerate() {
                text.push_str(&format!("g{} = {}\n", j + 1, grammar::print(g.expr())));
            }
            text.push_str(&describe_map(&m));
            text.push_str(&format!(
                "rectangle-rule: pass={} max_residual={:.3e} trials={}\n",
                rect.pass,
                rect.max_residual,
                rect.trials.len()
            ));
            emit(&out, &text)
        }
        Command::RealizeSquare {
            g1,
            g2,
            g3,
            g4,
            p,
            out,
        } => {
            let q = Quadrilateral::unit(side_family(g1, g2, g3, g4)?);
            let p = parse_monotone(&p)?.restrict_to(Interval64::unit());
            let complete = q.complete()?;
            let m = realize_square(&q, &p)?;
            let rect = rectangle_rule_test(CurveKind::SquareSides, &complete, 200, seed_from_env(None));
            let mut text = String::new();
            for (j, g) in complete.iter().enumerate() {
                text.push_str(&format!("g{} = {}\n", j + 1, grammar::print(g.expr())));
            }
            text.push_str(&describe_map(&m));
            text.push_str(&format!(
                "rectangle-rule: pass={} max_residual={:.3e} trials={}\n",
                rect.pass,
                rect.max_residual,
                rect.trials.len()
            ));
            emit(&out, &text)
        }
        Command::FlatTop { g, p, out } => {
            let g = parse_monotone(&g)?.restrict_to(Interval64::unit());
            let p = parse_monotone(&p)?.restrict_to(Interval64::unit());
            let (q, m) = flat_top_bottom(&g, &p)?;
            let mut text = String::new();
            for (j, g) in q.complete()?.iter().enumerate() {
                text.push_str(&format!("g{} = {}\n", j + 1, grammar::print(g.expr())));
            }
            text.push_str(&describe_map(&m));
            emit(&out, &text)
        }
        Command::LrSym { g, p, out } => {
            let g = parse_monotone(&g)?.restrict_to(Interval64::unit());
            let p = parse_monotone(&p)?.restrict_to(Interval64::unit());
            let (q, m) = left_right_symmetric(&g, &p)?;
            let mut text = String::new();
            for (j, g) in q.complete()?.iter().enumerate() {
                text.push_str(&format!("g{} = {}\n", j + 1, grammar::print(g.expr())));
            }
            text.push_str(&describe_map(&m));
            emit(&out, &text)
        }
        Command::Unfold { p, negated, out } => {
            let p = parse_map(&p)?;
            let m = unfold(&p, negated)?;
            emit(&out, &describe_map(&m))
        }
        Command::Crop { h, c, out } => {
            let h = parse_monotone(&h)?;
            let m = crop(&h, c)?;
            emit(&out, &describe_map(&m))
        }
        Command::Classify {
            h,
            k,
            swapped,
            out,
        } => {
            let m = build_map(&h, &k, swapped)?;
            let c = classify(&m)?;
            let mut text = String::new();
            match c.table {
                Some((t, r)) => text.push_str(&format!("Table{t}:row{r} ")),
                None => text.push_str("no-D4-symmetry "),
            }
            text.push_str(&format!("{}->{}\n", c.hom.s1, c.hom.s2));
            for (g, gp) in &c.hom.pairs {
                text.push_str(&format!("  {g} -> {gp}\n"));
            }
            for s in &c.unfolding {
                text.push_str(&format!("unfolding: {s}\n"));
            }
            emit(&out, &text)
        }
        Command::VerifyRect {
            curves,
            trials,
            seed,
            out,
        } => {
            let content = fs::read_to_string(&curves)
                .map_err(|e| LcError::Parse(format!("cannot read {curves}: {e}")))?;
            let lines: Vec<&str> = content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect();
            if lines.len() != 5 {
                return Err(LcError::Parse(
                    "curves file needs a kind line (`rays` or `sides`) and four specs".into(),
                ));
            }
            let (kind, dom) = match lines[0] {
                "rays" => (CurveKind::CrossingRays, Interval64::half_line()),
                "sides" => (CurveKind::SquareSides, Interval64::unit()),
                other => {
                    return Err(LcError::Parse(format!(
                        "kind must be `rays` or `sides`, got `{other}`"
                    )))
                }
            };
            let mut g = Vec::new();
            for line in &lines[1..] {
                g.push(parse_monotone(line)?.restrict_to(dom));
            }
            let g: [Monotone64; 4] = g.try_into().expect("length checked above");
            let report = rectangle_rule_test(kind, &g, trials, seed_from_env(seed));
            let mut text = report.to_csv();
            text.push_str(&format!(
                "# pass={} max_residual={:.3e} skipped={}\n",
                report.pass, report.max_residual, report.skipped
            ));
            emit(&out, &text)
        }
        Command::Render {
            h,
            k,
            swapped,
            window,
            levels_u,
            levels_v,
            highlight,
            res,
            out,
            csv_out,
        } => {
            let m = build_map(&h, &k, swapped)?;
            let (wx, wy) = parse_window(&window)?;
            let mut highlights = Vec::new();
            for spec in &highlight {
                let (f, l) = spec.split_once(':').ok_or_else(|| {
                    LcError::Parse(format!("highlight must be FAMILY:LEVEL, got `{spec}`"))
                })?;
                let level: f64 = l
                    .parse()
                    .map_err(|_| LcError::Parse(format!("bad level `{l}`")))?;
                highlights.push((parse_family(f)?, level));
            }
            let opts = RenderOptions {
                window_x: wx,
                window_y: wy,
                levels_u: parse_levels(&levels_u)?,
                levels_v: parse_levels(&levels_v)?,
                resolution: res,
                highlights,
            };
            let rendered = render_contours(&m, &opts)?;
            if let Some(path) = &csv_out {
                fs::write(path, &rendered.csv)
                    .map_err(|e| LcError::Parse(format!("cannot write {path}: {e}")))?;
            }
            emit(&out, &rendered.svg)
        }
        Command::KgFlatten {
            nu,
            mu,
            domain,
            samples,
            out,
        } => {
            let d = parse_numbers(&domain, 2, "domain")?;
            if !(d[1] > d[0]) {
                return Err(LcError::EmptyWindow);
            }
            let dom = Interval64::new(d[0], d[1]);
            let nu = parse_map(&nu)?;
            let mu = parse_map(&mu)?;
            let nu_f = move |t: f64| nu.expr().eval_raw(t);
            let mu_f = move |t: f64| mu.expr().eval_raw(t);
            let m = klein_gordon_flatten(nu_f, mu_f, dom)?;
            let mut text = String::from("t,h,k\n");
            for t in dom.grid(samples.max(2)) {
                text.push_str(&format!(
                    "{t},{},{}\n",
                    m.h().eval(t)?,
                    m.k().eval(t)?
                ));
            }
            emit(&out, &text)
        }
    }
}

fn seed_from_env(explicit: Option<u64>) -> u64 {
    explicit.or_else(|| {
        std::env::var("LC_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}
