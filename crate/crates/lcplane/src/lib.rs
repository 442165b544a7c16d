//! Lorentz-conformal transformations of the plane.

pub mod constructions;
pub mod coords;
pub mod error;
pub mod grammar;
pub mod interval;
pub mod lcmap;
pub mod monotone;
pub mod random;
pub mod render;
pub mod scalar;
pub mod symmetry;
pub mod verify;

pub use constructions::{GaugeMap, Quadrilateral, RayFamily};
pub use coords::{D4Element, PointChar, PointXY, Subgroup};
pub use error::{LcError, Result};
pub use lcmap::{Contour, Family, JacobianData, LCMap};
pub use interval::Interval;
pub use monotone::{Direction, MapExpr, MonotoneMap, Side};
pub use scalar::Real;
pub use symmetry::{Classification, ConditionProfile, SymmetryHom};

/// Concrete double-precision aliases for the common case.
pub type Map64 = LCMap<f64>;
pub type Monotone64 = MonotoneMap<f64>;
pub type Interval64 = Interval<f64>;
pub type Point64 = PointXY<f64>;
pub type PointChar64 = PointChar<f64>;
