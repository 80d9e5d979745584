//! Upper half-plane and Poincaré disk geometry.
//!
//! Comparisons between distances are always done on the point-pair
//! invariant `u(z, w) = |z - w|^2 / (4 Im z Im w)`, which is exact for
//! rational points; `d = arcosh(1 + 2u)` is only evaluated for reporting.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Num, One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numutil::Rational;

/// Tolerance for real-valued identities.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("point is not in the open upper half-plane")]
    NotInUpperHalfPlane,
    #[error("determinant is {0}, expected 1")]
    DetNotOne(String),
    #[error("motion is a rotation about the disk centre: no isometric circle")]
    Rotation,
    #[error("candidate list is empty")]
    EmptyCandidates,
}

/// A point `x + i y` of the upper half-plane with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UHPoint {
    x: Rational,
    y: Rational,
}

impl UHPoint {
    pub fn new(x: Rational, y: Rational) -> Result<Self, HypError> {
        if y.is_positive() {
            Ok(Self { x, y })
        } else {
            Err(HypError::NotInUpperHalfPlane)
        }
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn to_complex(&self) -> Complex<Rational> {
        Complex::new(self.x.clone(), self.y.clone())
    }

    pub fn to_c64(&self) -> Complex<f64> {
        Complex::new(rat_to_f64(&self.x), rat_to_f64(&self.y))
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// A 2x2 matrix `(a b; c d)` acting by Möbius transformations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Motion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// A motion in `SL_2(R)` with floating point entries.
pub type RealMotion = Motion<f64>;
/// A motion in `SL_2(Q)`.
pub type RatMotion = Motion<Rational>;

fn two<T: Num>() -> T {
    T::one() + T::one()
}

impl<T: Clone + Num> Motion<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn compose(&self, o: &Self) -> Self {
        let m = |x: &T, y: &T, z: &T, w: &T| x.clone() * y.clone() + z.clone() * w.clone();
        Self::new(
            m(&self.a, &o.a, &self.b, &o.c),
            m(&self.a, &o.b, &self.b, &o.d),
            m(&self.c, &o.a, &self.d, &o.c),
            m(&self.c, &o.b, &self.d, &o.d),
        )
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_unimodular(&self) -> Self {
        let z = T::zero;
        Self::new(
            self.d.clone(),
            z() - self.b.clone(),
            z() - self.c.clone(),
            self.a.clone(),
        )
    }

    /// Squared Frobenius norm `a^2 + b^2 + c^2 + d^2`.
    pub fn frobenius_sq(&self) -> T {
        self.a.clone() * self.a.clone()
            + self.b.clone() * self.b.clone()
            + self.c.clone() * self.c.clone()
            + self.d.clone() * self.d.clone()
    }

    /// `(a z + b) / (c z + d)`; `None` when the denominator vanishes.
    pub fn act(&self, z: &Complex<T>) -> Option<Complex<T>> {
        let num = z.clone() * self.a.clone() + Complex::new(self.b.clone(), T::zero());
        let den = z.clone() * self.c.clone() + Complex::new(self.d.clone(), T::zero());
        if den.re.is_zero() && den.im.is_zero() {
            return None;
        }
        Some(num / den)
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        let one = T::one();
        let neg_one = T::zero() - T::one();
        self.b.is_zero()
            && self.c.is_zero()
            && ((self.a == one && self.d == one) || (self.a == neg_one && self.d == neg_one))
    }
}

impl RealMotion {
    /// Checked constructor: `|ad - bc - 1| <= 1e-12`.
    pub fn checked(a: f64, b: f64, c: f64, d: f64) -> Result<Self, HypError> {
        let m = Self::new(a, b, c, d);
        let det = m.det();
        if (det - 1.0).abs() > REAL_TOL {
            return Err(HypError::DetNotOne(det.to_string()));
        }
        Ok(m)
    }
}

impl RatMotion {
    pub fn checked(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, HypError> {
        let m = Self::new(a, b, c, d);
        let det = m.det();
        if !det.is_one() {
            return Err(HypError::DetNotOne(det.to_string()));
        }
        Ok(m)
    }

    pub fn from_integers(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Self {
        let r = |v: &BigInt| Rational::from_integer(v.clone());
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn to_real(&self) -> RealMotion {
        Motion::new(
            rat_to_f64(&self.a),
            rat_to_f64(&self.b),
            rat_to_f64(&self.c),
            rat_to_f64(&self.d),
        )
    }
}

/// Exact Möbius action on a rational point.
pub fn mobius_act(g: &RatMotion, z: &UHPoint) -> Result<UHPoint, HypError> {
    let w = g.act(&z.to_complex()).ok_or(HypError::NotInUpperHalfPlane)?;
    UHPoint::new(w.re, w.im)
}

/// Point-pair invariant `u(z, w) = (cosh d(z, w) - 1) / 2`.
pub fn point_pair_u(z: &UHPoint, w: &UHPoint) -> Rational {
    let dx = &z.x - &w.x;
    let dy = &z.y - &w.y;
    let four = Rational::from_integer(BigInt::from(4));
    (&dx * &dx + &dy * &dy) / (four * &z.y * &w.y)
}

/// Floating point `u` for complex upper half-plane points.
pub fn point_pair_u_c64(z: Complex<f64>, w: Complex<f64>) -> f64 {
    (z - w).norm_sqr() / (4.0 * z.im * w.im)
}

pub fn dist_from_u(u: f64) -> f64 {
    (1.0 + 2.0 * u).acosh()
}

/// Hyperbolic distance on the upper half-plane.
pub fn hyp_dist(z: &UHPoint, w: &UHPoint) -> f64 {
    dist_from_u(rat_to_f64(&point_pair_u(z, w)))
}

pub fn hyp_dist_c64(z: Complex<f64>, w: Complex<f64>) -> f64 {
    dist_from_u(point_pair_u_c64(z, w))
}

/// `u(g) = tr(g g^t)/4 - 1/2`, equal to `u(i, g i)`.
pub fn motion_u<T: Clone + Num>(g: &Motion<T>) -> T {
    let four = two::<T>() * two::<T>();
    g.frobenius_sq() / four - T::one() / two::<T>()
}

/// A motion of the unit disk `(conj F, conj E; E, F)` with `|F|^2 - |E|^2 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskMotion<T> {
    pub e: Complex<T>,
    pub f: Complex<T>,
}

impl<T: Clone + Num> DiskMotion<T> {
    /// `|F|^2 - |E|^2`, which is 1 for every transferred motion.
    pub fn determinant(&self) -> T {
        self.f.norm_sqr() - self.e.norm_sqr()
    }
}

/// Conjugate a motion of the upper half-plane to the disk by the Cayley map
/// `z -> (z - i)/(z + i)`.
pub fn cayley_motion<T: Clone + Num>(g: &Motion<T>) -> DiskMotion<T> {
    let h = two::<T>();
    let e = Complex::new(
        (g.a.clone() - g.d.clone()) / h.clone(),
        (g.b.clone() + g.c.clone()) / h.clone(),
    );
    let f = Complex::new(
        (g.a.clone() + g.d.clone()) / h.clone(),
        (g.c.clone() - g.b.clone()) / h,
    );
    DiskMotion { e, f }
}

/// The circle `|E z + F| = 1`: centre `-F/E`, radius `1/|E|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometricCircle<T> {
    pub center: Complex<T>,
    pub radius_sq: T,
    pub source: DiskMotion<T>,
}

impl IsometricCircle<f64> {
    pub fn radius(&self) -> f64 {
        self.radius_sq.sqrt()
    }

    /// Whether the circle meets the closed hyperbolic ball of radius `r`
    /// about the disk centre (Euclidean radius `tanh(r/2)`).
    pub fn meets_ball(&self, r: f64) -> bool {
        self.center.norm() - self.radius() <= (r / 2.0).tanh() + REAL_TOL
    }
}

pub fn isometric_circle<T: Clone + Num>(m: &DiskMotion<T>) -> Result<IsometricCircle<T>, HypError> {
    if m.e.re.is_zero() && m.e.im.is_zero() {
        return Err(HypError::Rotation);
    }
    let zero = Complex::new(T::zero(), T::zero());
    let center = zero - m.f.clone() / m.e.clone();
    let radius_sq = T::one() / m.e.norm_sqr();
    Ok(IsometricCircle {
        center,
        radius_sq,
        source: m.clone(),
    })
}

/// `||g||_F^2 = 4|E|^2 + 2`.
pub fn norm_from_disk<T: Clone + Num>(m: &DiskMotion<T>) -> T {
    let four = two::<T>() * two::<T>();
    four * m.e.norm_sqr() + two::<T>()
}

/// Frobenius-norm bound `4 sinh^2(r) + 2` for motions whose isometric circle
/// meets the hyperbolic ball of radius `r` about the disk centre.
pub fn radius_to_norm_bound(r: f64) -> f64 {
    let s = r.sinh();
    4.0 * s * s + 2.0
}

/// Cayley transform of an upper half-plane point into the unit disk.
pub fn to_disk(z: Complex<f64>) -> Complex<f64> {
    let i = Complex::new(0.0, 1.0);
    (z - i) / (z + i)
}

/// Membership in the normal (Dirichlet) polygon centred at `w`, relative to
/// the supplied candidates: `d(z, w) < d(g z, w)` for every `g != +-I`.
pub fn dirichlet_member(z: &UHPoint, w: &UHPoint, candidates: &[RatMotion]) -> Result<bool, HypError> {
    if candidates.is_empty() {
        return Err(HypError::EmptyCandidates);
    }
    let base = point_pair_u(z, w);
    for g in candidates.iter().filter(|g| !g.is_plus_minus_identity()) {
        let gz = mobius_act(g, z)?;
        if point_pair_u(&gz, w) <= base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All of `SL_2(Z)` with `a^2 + b^2 + c^2 + d^2 <= bound`.
pub fn integer_ball(bound: i64) -> Vec<RatMotion> {
    let m = (bound as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let partial = a * a + b * b + c * c;
                if partial > bound {
                    continue;
                }
                for d in -m..=m {
                    if partial + d * d <= bound && a * d - b * c == 1 {
                        let r = |v: i64| Rational::from_integer(BigInt::from(v));
                        out.push(Motion::new(r(a), r(b), r(c), r(d)));
                    }
                }
            }
        }
    }
    out
}
