//! SU(2) in the quaternion representation.
//!
//! An element `(a, b, c, d)` stands for the matrix
//!
//! ```text
//!     | a + ib   -c + id |
//!     | c + id    a - ib |
//! ```
//!
//! with `a² + b² + c² + d² = 1`. The basis matrices are `iσ₃`, `-iσ₂` and
//! `iσ₁`, which multiply with the opposite handedness to Hamilton's units, so
//! the product below carries a minus sign on the cross term. Every product is
//! exactly the 2×2 matrix product of the represented matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit quaternion representing an SU(2) matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Su2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// Unnormalized quaternion: an element of the real span of SU(2), such as a
/// sum of staples. Its norm is `√det` of the represented matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuatSum<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

#[inline(always)]
fn qmul<T: Real>(x: [T; 4], y: [T; 4]) -> [T; 4] {
    let [a1, b1, c1, d1] = x;
    let [a2, b2, c2, d2] = y;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 - c1 * d2 + d1 * c2,
        a1 * c2 + c1 * a2 - d1 * b2 + b1 * d2,
        a1 * d2 + d1 * a2 - b1 * c2 + c1 * b2,
    ]
}

impl<T: Real> Su2<T> {
    /// Build from raw components without checking the norm.
    #[inline]
    pub const fn new(a: T, b: T, c: T, d: T) -> Self {
        Su2 { a, b, c, d }
    }

    #[inline]
    pub fn identity() -> Self {
        Su2::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn from_array(q: [T; 4]) -> Self {
        Su2::new(q[0], q[1], q[2], q[3])
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Hermitian conjugate, which is the inverse on the group.
    #[inline]
    pub fn dagger(self) -> Self {
        Su2::new(self.a, -self.b, -self.c, -self.d)
    }

    /// `Re Tr` of the represented matrix, `2a`.
    #[inline]
    pub fn re_trace(self) -> T {
        (T::one() + T::one()) * self.a
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// Euclidean dot product of the two points on S³.
    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    /// `Δa² + Δb² + Δc² + Δd²`, half of `Tr((A-B)†(A-B))`.
    #[inline]
    pub fn distance_sq(self, other: Self) -> T {
        let (da, db, dc, dd) = (self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d);
        da * da + db * db + dc * dc + dd * dd
    }

    /// `self · other†` without materializing the conjugate.
    #[inline]
    pub fn mul_dagger(self, other: Self) -> Self {
        self * other.dagger()
    }

    /// Project back onto S³. Used once per Monte Carlo trajectory to remove
    /// floating point drift.
    #[inline]
    pub fn reunitarized(self) -> Self {
        let n = self.norm_sq().sqrt();
        Su2::new(self.a / n, self.b / n, self.c / n, self.d / n)
    }

    #[inline]
    pub fn to_sum(self) -> QuatSum<T> {
        QuatSum::new(self.a, self.b, self.c, self.d)
    }

    /// Convert the component type.
    pub fn cast<U: Real>(self) -> Su2<U> {
        Su2::new(
            U::lit(self.a.as_f64()),
            U::lit(self.b.as_f64()),
            U::lit(self.c.as_f64()),
            U::lit(self.d.as_f64()),
        )
    }
}

impl<T: Real> Mul for Su2<T> {
    type Output = Su2<T>;
    #[inline]
    fn mul(self, rhs: Su2<T>) -> Su2<T> {
        Su2::from_array(qmul(self.to_array(), rhs.to_array()))
    }
}

impl<T: Real> Neg for Su2<T> {
    type Output = Su2<T>;
    #[inline]
    fn neg(self) -> Su2<T> {
        Su2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl<T: Real> QuatSum<T> {
    #[inline]
    pub const fn new(a: T, b: T, c: T, d: T) -> Self {
        QuatSum { a, b, c, d }
    }

    #[inline]
    pub fn zero() -> Self {
        QuatSum::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `k = √(a² + b² + c² + d²)`.
    #[inline]
    pub fn norm(self) -> T {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    #[inline]
    pub fn re_trace(self) -> T {
        (T::one() + T::one()) * self.a
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        QuatSum::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl<T: Real> Add for QuatSum<T> {
    type Output = QuatSum<T>;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        QuatSum::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl<T: Real> Sub for QuatSum<T> {
    type Output = QuatSum<T>;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        QuatSum::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

impl<T: Real> AddAssign for QuatSum<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> AddAssign<Su2<T>> for QuatSum<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Su2<T>) {
        *self = *self + rhs.to_sum();
    }
}

impl<T: Real> Mul<Su2<T>> for QuatSum<T> {
    type Output = QuatSum<T>;
    #[inline]
    fn mul(self, rhs: Su2<T>) -> QuatSum<T> {
        let [a, b, c, d] = qmul(self.to_array(), rhs.to_array());
        QuatSum::new(a, b, c, d)
    }
}

impl<T: Real> Mul<QuatSum<T>> for Su2<T> {
    type Output = QuatSum<T>;
    #[inline]
    fn mul(self, rhs: QuatSum<T>) -> QuatSum<T> {
        let [a, b, c, d] = qmul(self.to_array(), rhs.to_array());
        QuatSum::new(a, b, c, d)
    }
}

/// Group product `g·h`. No renormalization is applied.
#[inline]
pub fn multiply<T: Real>(g: Su2<T>, h: Su2<T>) -> Su2<T> {
    g * h
}

#[inline]
pub fn dagger<T: Real>(g: Su2<T>) -> Su2<T> {
    g.dagger()
}

#[inline]
pub fn re_trace<T: Real>(g: Su2<T>) -> T {
    g.re_trace()
}

#[inline]
pub fn distance_sq<T: Real>(a: Su2<T>, b: Su2<T>) -> T {
    a.distance_sq(b)
}

/// Split `q` into its direction on S³ and its norm `k`.
pub fn normalize<T: Real>(q: QuatSum<T>) -> Result<(Su2<T>, T)> {
    let k = q.norm();
    if k == T::zero() || !k.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok((Su2::new(q.a / k, q.b / k, q.c / k, q.d / k), k))
}

/// Haar-uniform element: four standard normals projected onto S³.
pub fn haar_sample<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Su2<T> {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if n > 0.0 {
            return Su2::new(T::lit(q[0] / n), T::lit(q[1] / n), T::lit(q[2] / n), T::lit(q[3] / n));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use num_complex::Complex64 as C;

    type M = [[C; 2]; 2];

    fn mat(g: Su2<f64>) -> M {
        [
            [C::new(g.a, g.b), C::new(-g.c, g.d)],
            [C::new(g.c, g.d), C::new(g.a, -g.b)],
        ]
    }

    fn matmul(x: M, y: M) -> M {
        let mut z = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    z[i][j] += x[i][k] * y[k][j];
                }
            }
        }
        z
    }

    fn unmat(m: M) -> [f64; 4] {
        [m[0][0].re, m[0][0].im, m[1][0].re, m[1][0].im]
    }

    fn close(x: Su2<f64>, y: Su2<f64>, tol: f64) -> bool {
        x.distance_sq(y).sqrt() < tol
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = seeded(1);
        let g: Su2<f64> = haar_sample(&mut rng);
        assert_eq!(multiply(Su2::identity(), g), g);
        assert_eq!(multiply(g, Su2::identity()), g);
    }

    #[test]
    fn unit_products_follow_matrix_convention() {
        let i = Su2::new(0.0, 1.0, 0.0, 0.0);
        let j = Su2::new(0.0, 0.0, 1.0, 0.0);
        let ij = multiply(i, j);
        assert_eq!(unmat(matmul(mat(i), mat(j))), ij.to_array());
        assert_eq!(ij, Su2::new(0.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn product_matches_matrix_oracle() {
        let mut rng = seeded(11);
        for _ in 0..1000 {
            let g: Su2<f64> = haar_sample(&mut rng);
            let h: Su2<f64> = haar_sample(&mut rng);
            let want = unmat(matmul(mat(g), mat(h)));
            let got = (g * h).to_array();
            for k in 0..4 {
                assert!((want[k] - got[k]).abs() < 1e-14);
            }
            // the off-diagonal entries must agree too
            let m = matmul(mat(g), mat(h));
            let gm = mat(g * h);
            assert!((m[0][1] - gm[0][1]).norm() < 1e-14);
            assert!((m[1][1] - gm[1][1]).norm() < 1e-14);
        }
    }

    #[test]
    fn dagger_inverts() {
        assert_eq!(dagger(Su2::<f64>::identity()), Su2::identity());
        assert_eq!(dagger(Su2::new(0.0, 1.0, 0.0, 0.0)), Su2::new(0.0, -1.0, -0.0, -0.0));
        let mut rng = seeded(2);
        for _ in 0..1000 {
            let g: Su2<f64> = haar_sample(&mut rng);
            assert!(close(g * g.dagger(), Su2::identity(), 1e-12));
            assert!(close(g.dagger() * g, Su2::identity(), 1e-12));
        }
    }

    #[test]
    fn re_trace_examples() {
        assert_eq!(re_trace(Su2::<f64>::identity()), 2.0);
        assert_eq!(re_trace(Su2::new(-1.0, 0.0, 0.0, 0.0)), -2.0);
        assert!((re_trace(Su2::new(0.6f64, 0.8, 0.0, 0.0)) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn group_axioms_and_cyclicity() {
        let mut rng = seeded(3);
        for _ in 0..1000 {
            let g: Su2<f64> = haar_sample(&mut rng);
            let h: Su2<f64> = haar_sample(&mut rng);
            let k: Su2<f64> = haar_sample(&mut rng);
            assert!(close((g * h) * k, g * (h * k), 1e-12));
            assert!(((g * h).re_trace() - (h * g).re_trace()).abs() < 1e-12);
            assert!(((g * h).norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_examples_and_invariance() {
        let id = Su2::<f64>::identity();
        assert_eq!(distance_sq(id, id), 0.0);
        assert_eq!(distance_sq(id, -id), 4.0);
        let mut rng = seeded(4);
        for _ in 0..1000 {
            let g: Su2<f64> = haar_sample(&mut rng);
            let a: Su2<f64> = haar_sample(&mut rng);
            let b: Su2<f64> = haar_sample(&mut rng);
            let d0 = distance_sq(a, b);
            assert!((distance_sq(g * a, g * b) - d0).abs() < 1e-12);
            assert!((distance_sq(a * g, b * g) - d0).abs() < 1e-12);
            assert_eq!(distance_sq(a, b), distance_sq(b, a));
        }
    }

    #[test]
    fn haar_is_deterministic_and_unit() {
        let mut r1 = seeded(99);
        let mut r2 = seeded(99);
        for _ in 0..1000 {
            let g: Su2<f64> = haar_sample(&mut r1);
            let h: Su2<f64> = haar_sample(&mut r2);
            assert_eq!(g, h);
            assert!((g.norm_sq() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn haar_moments() {
        // <a> = 0 and <a²> = 1/4 with standard errors estimated from the
        // sample itself.
        let n = 200_000;
        let mut rng = seeded(5);
        let mut s = [0.0f64; 4];
        let mut s2 = [0.0f64; 4];
        for _ in 0..n {
            let g: Su2<f64> = haar_sample(&mut rng);
            for (k, x) in g.to_array().into_iter().enumerate() {
                s[k] += x;
                s2[k] += x * x;
            }
        }
        let nf = n as f64;
        for k in 0..4 {
            let mean = s[k] / nf;
            let m2 = s2[k] / nf;
            // Var(x) = 1/4, Var(x²) = <x⁴> - 1/16 = 1/8 - 1/16
            assert!(mean.abs() < 5.0 * (0.25 / nf).sqrt(), "mean {k} = {mean}");
            assert!((m2 - 0.25).abs() < 5.0 * (0.0625 / nf).sqrt(), "m2 {k} = {m2}");
        }
    }

    #[test]
    fn normalize_examples() {
        let (g, k) = normalize(QuatSum::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!((g, k), (Su2::identity(), 2.0));
        let mut q = QuatSum::zero();
        q += Su2::<f64>::identity();
        q += Su2::<f64>::identity();
        assert_eq!(normalize(q).unwrap(), (Su2::identity(), 2.0));
        assert!(matches!(normalize(QuatSum::<f64>::zero()), Err(Error::ZeroNorm)));
    }

    #[test]
    fn normalize_norm_is_sqrt_det() {
        let mut rng = seeded(6);
        for _ in 0..200 {
            let mut q = QuatSum::zero();
            let mut m = [[C::new(0.0, 0.0); 2]; 2];
            for _ in 0..6 {
                let g: Su2<f64> = haar_sample(&mut rng);
                q += g;
                let gm = mat(g);
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] += gm[i][j];
                    }
                }
            }
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!(det.im.abs() < 1e-12);
            let (u, k) = normalize(q).unwrap();
            assert!((k - det.re.sqrt()).abs() < 1e-12);
            assert!((u.norm_sq() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quatsum_closed_under_group_action() {
        let mut rng = seeded(8);
        let g: Su2<f64> = haar_sample(&mut rng);
        let h: Su2<f64> = haar_sample(&mut rng);
        let q = g.to_sum() + h.to_sum();
        let left = g * q;
        let expect = (g * g).to_sum() + (g * h).to_sum();
        for (x, y) in left.to_array().iter().zip(expect.to_array()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let mut rng = seeded(9);
        let g: Su2<f32> = haar_sample(&mut rng);
        let e = g * g.dagger();
        assert!((e.a - 1.0).abs() < 1e-6);
    }
}
