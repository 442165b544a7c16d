//! Contour plots as SVG and CSV. Output is a pure function of the inputs,
//! so repeated runs are byte-identical.

use crate::error::{LcError, Result};
use crate::interval::Interval;
use crate::lcmap::{Family, LCMap};
use crate::scalar::{fmt_sig, Real};

/// A (family, level) pair to draw with the highlight style.
pub type Highlight<T> = (Family, T);

#[derive(Clone, Debug)]
pub struct RenderOptions<T> {
    pub window_x: Interval<T>,
    pub window_y: Interval<T>,
    pub levels_u: Vec<T>,
    pub levels_v: Vec<T>,
    pub resolution: usize,
    pub highlights: Vec<Highlight<T>>,
}

#[derive(Clone, Debug)]
pub struct RenderOutput {
    pub svg: String,
    pub csv: String,
}

const STYLE: &str = "polyline{fill:none;stroke-width:0.02}\n\
.u{stroke:#1f6fb2}\n\
.v{stroke:#b26f1f}\n\
.hl{stroke:#c92a2a;stroke-width:0.04}\n\
.origin{fill:#000}";

/// Renders the u and v contour families of a map over an (x, y) window.
/// Levels with no points inside the window are omitted from both outputs.
/// Every polyline vertex in the SVG appears verbatim in the CSV.
pub fn render_contours<T: Real>(m: &LCMap<T>, opts: &RenderOptions<T>) -> Result<RenderOutput> {
    let (wx, wy) = (opts.window_x, opts.window_y);
    if !(wx.hi > wx.lo) || !(wy.hi > wy.lo) || opts.resolution < 2 {
        return Err(LcError::EmptyWindow);
    }
    // characteristic window covering the xy window
    let wcx = Interval {
        lo: wx.lo + wy.lo,
        hi: wx.hi + wy.hi,
    };
    let wcy = Interval {
        lo: wy.lo - wx.hi,
        hi: wy.hi - wx.lo,
    };
    let mut csv = String::from("family,level,X,Y,x,y\n");
    let mut body = String::new();
    let jobs: Vec<(Family, &[T])> = vec![
        (Family::U, &opts.levels_u),
        (Family::V, &opts.levels_v),
    ]
    .into_iter()
    .map(|(f, ls)| (f, ls.as_slice()))
    .collect();
    for (family, levels) in jobs {
        for &level in levels {
            let contour = m.contour_window(family, level, (wcx, wcy), opts.resolution);
            let highlighted = opts
                .highlights
                .iter()
                .any(|&(f, l)| f == family && (l - level).abs() < T::of(1e-12));
            let class = if highlighted {
                format!("{family} hl")
            } else {
                family.to_string()
            };
            for branch in contour.xy_branches() {
                let inside: Vec<(String, String)> = branch
                    .iter()
                    .filter(|p| {
                        p.x >= wx.lo && p.x <= wx.hi && p.y >= wy.lo && p.y <= wy.hi
                    })
                    .map(|p| (fmt_sig(p.x), fmt_sig(p.y)))
                    .collect();
                if inside.len() < 2 {
                    continue;
                }
                let mut pts = String::new();
                for (x, y) in &inside {
                    if !pts.is_empty() {
                        pts.push(' ');
                    }
                    pts.push_str(&format!("{x},{y}"));
                    csv.push_str(&format!(
                        "{family},{},{},{},{x},{y}\n",
                        fmt_sig(level),
                        // characteristic coordinates recomputed from the
                        // formatted xy values keep the two files consistent
                        fmt_sig(parse_back::<T>(x) + parse_back::<T>(y)),
                        fmt_sig(parse_back::<T>(y) - parse_back::<T>(x)),
                    ));
                }
                body.push_str(&format!(
                    "  <polyline class=\"{class}\" points=\"{pts}\"/>\n"
                ));
            }
        }
    }
    let origin_r = fmt_sig((wx.hi - wx.lo).to_f64().unwrap_or(2.0) / 100.0);
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
         <style>{STYLE}</style>\n\
         <g transform=\"scale(1,-1)\">\n\
         {body}  <circle class=\"origin\" cx=\"0\" cy=\"0\" r=\"{origin_r}\"/>\n\
         </g>\n\
         </svg>\n",
        fmt_sig(wx.lo),
        fmt_sig(-wy.hi),
        fmt_sig(wx.hi - wx.lo),
        fmt_sig(wy.hi - wy.lo),
    );
    Ok(RenderOutput { svg, csv })
}

fn parse_back<T: Real>(s: &str) -> T {
    T::of(s.parse::<f64>().unwrap_or(f64::NAN))
}
