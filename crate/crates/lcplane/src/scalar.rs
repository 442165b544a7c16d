//! Scalar abstraction: the whole library is generic over the float type.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar the library computes with (f32 or f64).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for lossy conversion of an f64 constant.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Default relative tolerance for numeric inversion.
    ///
    /// 1e-12 for f64; widens to a multiple of machine epsilon for
    /// narrower types where 1e-12 is unreachable.
    fn inverse_tol() -> Self {
        let eps_based = Self::epsilon() * Self::of(64.0);
        let pinned = Self::of(1e-12);
        if eps_based > pinned {
            eps_based
        } else {
            pinned
        }
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Formats a scalar with 12 significant digits, plain decimal where practical.
pub fn fmt_sig<T: Real>(v: T) -> String {
    let x = v.to_f64().unwrap_or(f64::NAN);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        // trim trailing zeros but keep at least one digit after the point
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        format!("{:.11e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0f64), "0");
        assert_eq!(fmt_sig(1.0f64), "1");
        assert_eq!(fmt_sig(0.5f64), "0.5");
        assert_eq!(fmt_sig(-1.25f64), "-1.25");
        assert_eq!(fmt_sig(1234.5f64), "1234.5");
        assert_eq!(fmt_sig(1e20f64), "1.00000000000e20");
    }

    #[test]
    fn inverse_tol_is_pinned_for_f64() {
        assert_eq!(f64::inverse_tol(), 1e-12);
    }
}
