//! Fixed-point truncation of quaternion components.
//!
//! A `p`-bit sign-magnitude number with the most significant magnitude bit
//! worth ½ represents the grid `{ ±m / 2^(p-1) : 0 ≤ m < 2^(p-1) }`. Values are
//! truncated toward zero. Only `a`, `b`, `c` are stored; `d` is rebuilt from
//! the unit-norm condition at full precision, keeps the sign of the original
//! `d`, and is truncated onto the same grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Su2;
use crate::lattice::GaugeField;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPointSpec {
    p: u32,
}

impl FixedPointSpec {
    pub const MIN_BITS: u32 = 2;
    pub const MAX_BITS: u32 = 62;

    pub fn new(p: u32) -> Result<Self> {
        if !(Self::MIN_BITS..=Self::MAX_BITS).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "fixed-point precision must be in {}..={}, got {p}",
                Self::MIN_BITS,
                Self::MAX_BITS
            )));
        }
        Ok(FixedPointSpec { p })
    }

    /// Bits per real number, sign included.
    #[inline]
    pub fn bits(self) -> u32 {
        self.p
    }

    /// Three stored numbers per link.
    pub fn bits_per_link(self) -> f64 {
        3.0 * self.p as f64
    }

    #[inline]
    fn scale(self) -> f64 {
        (1u64 << (self.p - 1)) as f64
    }

    #[inline]
    fn max_magnitude(self) -> u64 {
        (1u64 << (self.p - 1)) - 1
    }

    /// Sign bit and magnitude code of `x` after truncation.
    pub fn encode(self, x: f64) -> (bool, u64) {
        let m = ((x.abs() * self.scale()).floor() as u64).min(self.max_magnitude());
        (x.is_sign_negative(), m)
    }

    pub fn decode(self, negative: bool, magnitude: u64) -> f64 {
        let v = magnitude as f64 / self.scale();
        if negative {
            -v
        } else {
            v
        }
    }

    /// `fp_p(x) = sign(x)·floor(|x|·2^(p-1)) / 2^(p-1)`, saturating below 1.
    pub fn truncate(self, x: f64) -> f64 {
        let (neg, m) = self.encode(x);
        self.decode(neg, m)
    }

    /// Upper bound on `|‖g'‖² - 1|` after [`fixed_point_truncate`].
    pub fn norm_deviation_bound(self) -> f64 {
        8.0 / self.scale()
    }

    /// Magnitude of `d` implied by already-truncated `a`, `b`, `c`.
    pub fn implied_d_magnitude(self, a: f64, b: f64, c: f64) -> f64 {
        self.truncate((1.0 - a * a - b * b - c * c).max(0.0).sqrt())
    }
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Truncate one link. The result is generally not exactly unitary.
pub fn fixed_point_truncate<T: Real>(g: Su2<T>, spec: FixedPointSpec) -> Su2<T> {
    let a = spec.truncate(g.a.as_f64());
    let b = spec.truncate(g.b.as_f64());
    let c = spec.truncate(g.c.as_f64());
    // `+ 0.0` folds −0 into +0 so truncation is idempotent
    let d = signum0(g.d.as_f64()) * spec.implied_d_magnitude(a, b, c) + 0.0;
    Su2::new(T::lit(a), T::lit(b), T::lit(c), T::lit(d))
}

/// Truncate every link; the result is flagged off-manifold.
pub fn project_fixed_point<T: Real>(field: &GaugeField<T>, spec: FixedPointSpec) -> GaugeField<T> {
    let mut out = field.clone();
    for u in out.links_mut() {
        *u = fixed_point_truncate(*u, spec);
    }
    out.mark_off_manifold(true);
    out
}
