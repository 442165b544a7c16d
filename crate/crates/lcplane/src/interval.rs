//! Closed intervals with possibly infinite endpoints.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo < hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    /// The whole real line.
    pub fn full() -> Self {
        Interval {
            lo: T::neg_infinity(),
            hi: T::infinity(),
        }
    }

    pub fn unit() -> Self {
        Interval {
            lo: T::zero(),
            hi: T::one(),
        }
    }

    pub fn half_line() -> Self {
        Interval {
            lo: T::zero(),
            hi: T::infinity(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// Slack used when accepting points that drifted just outside by rounding.
    fn slack(&self) -> T {
        let scale = if self.is_finite() {
            T::one().max(self.lo.abs().max(self.hi.abs()))
        } else {
            T::one()
        };
        scale * T::epsilon() * T::of(1e4) + T::of(1e-12)
    }

    /// Accepts `t` inside the interval up to rounding slack, clamping it back.
    pub fn admit(&self, t: T) -> Option<T> {
        if self.contains(t) {
            return Some(t);
        }
        let s = self.slack();
        if t < self.lo && self.lo - t <= s {
            Some(self.lo)
        } else if t > self.hi && t - self.hi <= s {
            Some(self.hi)
        } else {
            None
        }
    }

    pub fn intersect(&self, other: &Interval<T>) -> Option<Interval<T>> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Interval { lo, hi })
        } else if lo == hi {
            // degenerate but tolerated for endpoint-only overlaps
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Clips to `[-w, w]` for sampling purposes.
    pub fn clip(&self, w: T) -> Interval<T> {
        Interval {
            lo: self.lo.max(-w),
            hi: self.hi.min(w),
        }
    }

    /// Evenly spaced samples across the (clipped) interval.
    pub fn grid(&self, n: usize) -> Vec<T> {
        let iv = self.clip(T::of(10.0));
        let n = n.max(2);
        let step = (iv.hi - iv.lo) / T::from_usize(n - 1).unwrap();
        (0..n)
            .map(|i| iv.lo + step * T::from_usize(i).unwrap())
            .collect()
    }

    pub fn approx_eq(&self, other: &Interval<T>, tol: T) -> bool {
        let close = |a: T, b: T| {
            (a.is_infinite() && b.is_infinite() && a.signum() == b.signum())
                || (a - b).abs() <= tol
        };
        close(self.lo, other.lo) && close(self.hi, other.hi)
    }
}
