//! Characteristic coordinates and the dihedral group acting on the plane.

use std::fmt;
use std::str::FromStr;

use crate::error::LcError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointXY<T> {
    pub x: T,
    pub y: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointChar<T> {
    pub cx: T,
    pub cy: T,
}

impl<T: Real> PointXY<T> {
    pub fn new(x: T, y: T) -> Self {
        PointXY { x, y }
    }
}

impl<T: Real> PointChar<T> {
    pub fn new(cx: T, cy: T) -> Self {
        PointChar { cx, cy }
    }
}

/// (X, Y) = (x + y, −x + y).
pub fn to_characteristic<T: Real>(p: PointXY<T>) -> PointChar<T> {
    PointChar {
        cx: p.x + p.y,
        cy: -p.x + p.y,
    }
}

/// (x, y) = ((X − Y)/2, (X + Y)/2).
pub fn from_characteristic<T: Real>(p: PointChar<T>) -> PointXY<T> {
    let half = T::of(0.5);
    PointXY {
        x: (p.cx - p.cy) * half,
        y: (p.cx + p.cy) * half,
    }
}

/// The eight elements of the dihedral group of the square, named by their
/// word in the generators: s is the reflection negating X, t the reflection
/// swapping X and Y (st is rotation by π/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum D4Element {
    E,
    St,
    St2,
    St3,
    S,
    T,
    Tst,
    Sts,
}

pub const D4_ALL: [D4Element; 8] = [
    D4Element::E,
    D4Element::St,
    D4Element::St2,
    D4Element::St3,
    D4Element::S,
    D4Element::T,
    D4Element::Tst,
    D4Element::Sts,
];

type Mat = [[i32; 2]; 2];

impl D4Element {
    /// Integer matrix acting on (X, Y).
    pub fn matrix_char(self) -> Mat {
        match self {
            D4Element::E => [[1, 0], [0, 1]],
            D4Element::St => [[0, -1], [1, 0]],
            D4Element::St2 => [[-1, 0], [0, -1]],
            D4Element::St3 => [[0, 1], [-1, 0]],
            D4Element::S => [[-1, 0], [0, 1]],
            D4Element::T => [[0, 1], [1, 0]],
            D4Element::Tst => [[1, 0], [0, -1]],
            D4Element::Sts => [[0, -1], [-1, 0]],
        }
    }

    /// Integer matrix acting on (x, y); conjugate of `matrix_char` by the
    /// coordinate change, precomputed so both actions stay exact.
    pub fn matrix_xy(self) -> Mat {
        match self {
            D4Element::E => [[1, 0], [0, 1]],
            D4Element::St => [[0, -1], [1, 0]],
            D4Element::St2 => [[-1, 0], [0, -1]],
            D4Element::St3 => [[0, 1], [-1, 0]],
            D4Element::S => [[0, -1], [-1, 0]],
            D4Element::T => [[-1, 0], [0, 1]],
            D4Element::Tst => [[0, 1], [1, 0]],
            D4Element::Sts => [[1, 0], [0, -1]],
        }
    }

    pub fn inverse(self) -> D4Element {
        for g in D4_ALL {
            if d4_compose(self, g) == D4Element::E {
                return g;
            }
        }
        unreachable!("every group element has an inverse")
    }
}

fn mat_mul(a: Mat, b: Mat) -> Mat {
    let mut c = [[0; 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn element_of(m: Mat) -> D4Element {
    for g in D4_ALL {
        if g.matrix_char() == m {
            return g;
        }
    }
    unreachable!("product of D4 matrices is a D4 matrix")
}

/// Group product: the element acting as g1 after g2.
pub fn d4_compose(g1: D4Element, g2: D4Element) -> D4Element {
    element_of(mat_mul(g1.matrix_char(), g2.matrix_char()))
}

pub fn d4_apply_char<T: Real>(g: D4Element, p: PointChar<T>) -> PointChar<T> {
    let m = g.matrix_char();
    let at = |v: i32, c: T| match v {
        0 => T::zero(),
        1 => c,
        -1 => -c,
        _ => unreachable!(),
    };
    PointChar {
        cx: at(m[0][0], p.cx) + at(m[0][1], p.cy),
        cy: at(m[1][0], p.cx) + at(m[1][1], p.cy),
    }
}

pub fn d4_apply_xy<T: Real>(g: D4Element, p: PointXY<T>) -> PointXY<T> {
    let m = g.matrix_xy();
    let at = |v: i32, c: T| match v {
        0 => T::zero(),
        1 => c,
        -1 => -c,
        _ => unreachable!(),
    };
    PointXY {
        x: at(m[0][0], p.x) + at(m[0][1], p.y),
        y: at(m[1][0], p.x) + at(m[1][1], p.y),
    }
}

impl fmt::Display for D4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            D4Element::E => "e",
            D4Element::St => "st",
            D4Element::St2 => "st2",
            D4Element::St3 => "st3",
            D4Element::S => "s",
            D4Element::T => "t",
            D4Element::Tst => "tst",
            D4Element::Sts => "sts",
        };
        write!(f, "{s}")
    }
}

impl FromStr for D4Element {
    type Err = LcError;

    fn from_str(s: &str) -> Result<Self, LcError> {
        Ok(match s {
            "e" => D4Element::E,
            "st" => D4Element::St,
            "st2" => D4Element::St2,
            "st3" => D4Element::St3,
            "s" => D4Element::S,
            "t" => D4Element::T,
            "tst" => D4Element::Tst,
            "sts" => D4Element::Sts,
            _ => return Err(LcError::Parse(format!("unknown group element `{s}`"))),
        })
    }
}

/// The ten subgroups of the dihedral group, by the names used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subgroup {
    D4,
    /// reflections of the characteristic axes: {e, s, tst, st2}
    RXY,
    /// reflections of the standard axes: {e, t, sts, st2}
    Rxy,
    /// rotations: {e, st, st2, st3}
    T,
    RX,
    RY,
    Rx,
    Ry,
    /// {e, st2}, rotation by π
    Tpi,
    Trivial,
}

pub const SUBGROUPS: [Subgroup; 10] = [
    Subgroup::D4,
    Subgroup::RXY,
    Subgroup::Rxy,
    Subgroup::T,
    Subgroup::RX,
    Subgroup::RY,
    Subgroup::Rx,
    Subgroup::Ry,
    Subgroup::Tpi,
    Subgroup::Trivial,
];

impl Subgroup {
    pub fn elements(self) -> &'static [D4Element] {
        use D4Element::*;
        match self {
            Subgroup::D4 => &[E, St, St2, St3, S, T, Tst, Sts],
            Subgroup::RXY => &[E, S, Tst, St2],
            Subgroup::Rxy => &[E, T, Sts, St2],
            Subgroup::T => &[E, St, St2, St3],
            Subgroup::RX => &[E, S],
            Subgroup::RY => &[E, Tst],
            Subgroup::Rx => &[E, T],
            Subgroup::Ry => &[E, Sts],
            Subgroup::Tpi => &[E, St2],
            Subgroup::Trivial => &[E],
        }
    }

    /// The subgroup generated by `set`, if it is one of the ten; `set` need
    /// not be closed.
    pub fn identify(set: &[D4Element]) -> Subgroup {
        let mut members = vec![D4Element::E];
        for &g in set {
            if !members.contains(&g) {
                members.push(g);
            }
        }
        loop {
            let mut grew = false;
            for i in 0..members.len() {
                for j in 0..members.len() {
                    let p = d4_compose(members[i], members[j]);
                    if !members.contains(&p) {
                        members.push(p);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for s in SUBGROUPS {
            let e = s.elements();
            if e.len() == members.len() && members.iter().all(|g| e.contains(g)) {
                return s;
            }
        }
        unreachable!("every subset generates one of the ten subgroups")
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subgroup::D4 => "D4",
            Subgroup::RXY => "RXY",
            Subgroup::Rxy => "Rxy",
            Subgroup::T => "T",
            Subgroup::RX => "RX",
            Subgroup::RY => "RY",
            Subgroup::Rx => "Rx",
            Subgroup::Ry => "Ry",
            Subgroup::Tpi => "Tpi",
            Subgroup::Trivial => "e",
        };
        write!(f, "{s}")
    }
}
