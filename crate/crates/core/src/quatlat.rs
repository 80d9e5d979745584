//! Indefinite quaternion algebras over `Q`, Eichler orders, norm-one units of
//! bounded Frobenius norm and covering-radius estimates.
//!
//! Elements are coordinate vectors in `(1, i, j, k)` with `i^2 = a`,
//! `j^2 = b`, `k = ij = -ji`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{self, cayley_motion, hyp_dist_c64, isometric_circle, IsometricCircle, RealMotion, UHPoint};
use crate::numutil::Rational;

/// Relative slack on the Frobenius bound, absorbing rounding in `q(x)`.
pub const NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QuatError {
    #[error("a and b must be nonzero")]
    ZeroParameter,
    #[error("algebra ({0}, {1}) is ramified at infinity")]
    Definite(String, String),
    #[error("bad order data: {0}")]
    BadOrder(String),
    #[error("Frobenius Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("norm bound must be at least 2")]
    BoundTooSmall,
    #[error("invalid discriminant/level ({0}, {1}): {2}")]
    InvalidVolume(u64, u64, String),
    #[error("radius must be positive")]
    BadRadius,
    #[error("no Dirichlet radius certified up to {0}")]
    NoDirichletRadius(f64),
    #[error("empty grid")]
    EmptyGrid,
    #[error("unknown order {0:?}")]
    UnknownOrder(String),
}

pub type Quat = [Rational; 4];

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    let mut r: i64 = 1;
    let mut b = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == p - 1 {
        -1
    } else {
        r
    }
}

fn split_valuation(mut x: i64, p: i64) -> (u32, i64) {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// Local Hilbert symbol `(a, b)_p` of nonzero integers at a finite prime.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i64 {
    let p = p as i64;
    let (alpha, u) = split_valuation(a, p);
    let (beta, v) = split_valuation(b, p);
    if p == 2 {
        let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + alpha as i64 * omega(v) + beta as i64 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = if (alpha as i64 * beta as i64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        if beta % 2 == 1 {
            s *= legendre(u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(v, p);
        }
        s
    }
}

/// Ramification of `(a, b)_Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ramification {
    pub primes: Vec<u64>,
    pub at_infinity: bool,
}

/// `n/d` and `n d` differ by a square.
fn square_class_int(x: &Rational) -> Result<i64, QuatError> {
    if x.is_zero() {
        return Err(QuatError::ZeroParameter);
    }
    (x.numer() * x.denom())
        .to_i64()
        .ok_or_else(|| QuatError::BadOrder("parameter too large".into()))
}

pub fn hilbert_ramified(a: &Rational, b: &Rational) -> Result<Ramification, QuatError> {
    let ai = square_class_int(a)?;
    let bi = square_class_int(b)?;
    let mut candidates: Vec<u64> = vec![2];
    for n in [ai, bi] {
        for (p, _) in trial_factor(n.unsigned_abs()) {
            candidates.push(p);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let primes = candidates.into_iter().filter(|&p| hilbert_symbol(ai, bi, p) == -1).collect();
    Ok(Ramification {
        primes,
        at_infinity: ai < 0 && bi < 0,
    })
}

/// An indefinite quaternion algebra `(a, b)_Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuatAlgebra {
    pub a: Rational,
    pub b: Rational,
    pub ramified: Vec<u64>,
}

impl QuatAlgebra {
    pub fn new(a: Rational, b: Rational) -> Result<Self, QuatError> {
        let ram = hilbert_ramified(&a, &b)?;
        if ram.at_infinity {
            return Err(QuatError::Definite(a.to_string(), b.to_string()));
        }
        Ok(Self {
            a,
            b,
            ramified: ram.primes,
        })
    }

    /// Reduced discriminant: product of the ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.ramified.iter().product()
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let (a, b) = (&self.a, &self.b);
        let ab = a * b;
        [
            &x[0] * &y[0] + a * &x[1] * &y[1] + b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - b * &x[2] * &y[3] + b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + a * &x[1] * &y[3] - a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conj(&self, x: &Quat) -> Quat {
        [x[0].clone(), -&x[1], -&x[2], -&x[3]]
    }

    pub fn nrd(&self, x: &Quat) -> Rational {
        let (a, b) = (&self.a, &self.b);
        &x[0] * &x[0] - a * &x[1] * &x[1] - b * &x[2] * &x[2] + a * b * &x[3] * &x[3]
    }

    pub fn trd(&self, x: &Quat) -> Rational {
        &x[0] * Rational::from_integer(BigInt::from(2))
    }

    /// Images of `i` and `j` in `M_2(R)`.
    fn generators(&self) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
        let a = hyperbolic::rat_to_f64(&self.a);
        let b = hyperbolic::rat_to_f64(&self.b);
        if a > 0.0 {
            let r = a.sqrt();
            ([[r, 0.0], [0.0, -r]], [[0.0, b], [1.0, 0.0]])
        } else {
            let r = b.sqrt();
            ([[0.0, a], [1.0, 0.0]], [[r, 0.0], [0.0, -r]])
        }
    }
}

fn mat_mul(x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

/// `iota(x)` in `M_2(R)`: `i -> diag(sqrt a, -sqrt a)`, `j -> (0 b; 1 0)` when
/// `a > 0`, and the roles of `i` and `j` exchanged otherwise.
pub fn real_embedding(alg: &QuatAlgebra, x: &Quat) -> [[f64; 2]; 2] {
    let xf: Vec<f64> = x.iter().map(hyperbolic::rat_to_f64).collect();
    real_embedding_f64(alg, &[xf[0], xf[1], xf[2], xf[3]])
}

pub fn real_embedding_f64(alg: &QuatAlgebra, x: &[f64; 4]) -> [[f64; 2]; 2] {
    let (i, j) = alg.generators();
    let k = mat_mul(&i, &j);
    let mut m = [[x[0], 0.0], [0.0, x[0]]];
    for (c, g) in [(x[1], i), (x[2], j), (x[3], k)] {
        for r in 0..2 {
            for s in 0..2 {
                m[r][s] += c * g[r][s];
            }
        }
    }
    m
}

fn frob_sq(m: &[[f64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|v| v * v).sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OrderJson {
    a: String,
    b: String,
    level: u64,
    basis: Vec<Vec<String>>,
}

fn parse_rational(s: &str) -> Result<Rational, QuatError> {
    let bad = || QuatError::BadOrder(format!("cannot parse rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `det` and inverse of a rational 4x4 matrix by Gauss-Jordan elimination.
fn det_and_inverse(m: &[Quat; 4]) -> (Rational, Option<[Quat; 4]>) {
    let n = 4;
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return (Rational::zero(), None);
        };
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for k in 0..n {
            a[col][k] = &a[col][k] / &p;
            inv[col][k] = &inv[col][k] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let t = &f * &a[col][k];
                    a[r][k] -= t;
                    let t = &f * &inv[col][k];
                    inv[r][k] -= t;
                }
            }
        }
    }
    let to_arr = |r: &Vec<Rational>| [r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()];
    (det, Some([to_arr(&inv[0]), to_arr(&inv[1]), to_arr(&inv[2]), to_arr(&inv[3])]))
}

/// An Eichler order given by a `Z`-basis of rational coordinate rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EichlerOrderData {
    pub algebra: QuatAlgebra,
    pub basis: [Quat; 4],
    pub level: u64,
    /// `basis^{-1}`, converting `(1, i, j, k)` coordinates to basis coordinates.
    #[serde(skip)]
    inverse: Option<[Quat; 4]>,
}

pub const BUNDLED_ORDERS: &[(&str, &str)] = &[
    ("d6", include_str!("../data/d6.json")),
    ("d10", include_str!("../data/d10.json")),
    ("d22", include_str!("../data/d22.json")),
    ("d6-level5", include_str!("../data/d6_level5.json")),
];

pub fn bundled_order(name: &str) -> Result<EichlerOrderData, QuatError> {
    let (_, text) = BUNDLED_ORDERS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| QuatError::UnknownOrder(name.to_string()))?;
    EichlerOrderData::from_json(text)
}

impl EichlerOrderData {
    pub fn from_json(text: &str) -> Result<Self, QuatError> {
        let raw: OrderJson = serde_json::from_str(text).map_err(|e| QuatError::BadOrder(e.to_string()))?;
        if raw.basis.len() != 4 || raw.basis.iter().any(|r| r.len() != 4) {
            return Err(QuatError::BadOrder("basis must be 4x4".into()));
        }
        let mut basis: Vec<Quat> = Vec::new();
        for row in &raw.basis {
            let r: Vec<Rational> = row.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
            basis.push([r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()]);
        }
        let algebra = QuatAlgebra::new(parse_rational(&raw.a)?, parse_rational(&raw.b)?)?;
        Self::new(
            algebra,
            [basis[0].clone(), basis[1].clone(), basis[2].clone(), basis[3].clone()],
            raw.level,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = OrderJson {
            a: format_rational(&self.algebra.a),
            b: format_rational(&self.algebra.b),
            level: self.level,
            basis: self.basis.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serialisable")
    }

    /// Validates the order axioms and the discriminant.
    pub fn new(algebra: QuatAlgebra, basis: [Quat; 4], level: u64) -> Result<Self, QuatError> {
        let (_, inverse) = det_and_inverse(&basis);
        if inverse.is_none() {
            return Err(QuatError::BadOrder("basis is singular".into()));
        }
        let order = Self {
            algebra,
            basis,
            level,
            inverse,
        };
        let one = [Rational::one(), Rational::zero(), Rational::zero(), Rational::zero()];
        if !order.coords(&one).iter().all(|c| c.is_integer()) {
            return Err(QuatError::BadOrder("1 is not in the lattice".into()));
        }
        for e in &order.basis {
            for f in &order.basis {
                let prod = order.algebra.mul(e, f);
                if !order.coords(&prod).iter().all(|c| c.is_integer()) {
                    return Err(QuatError::BadOrder("not closed under multiplication".into()));
                }
            }
        }
        let dq = BigInt::from(order.algebra.discriminant()) * BigInt::from(level);
        let expected = Rational::from_integer(-(&dq * &dq));
        let det = order.trace_gram_det();
        if det != expected {
            return Err(QuatError::BadOrder(format!(
                "trace-form determinant {det} differs from -(DQ)^2 = {expected}"
            )));
        }
        Ok(order)
    }

    /// Coordinates of `x` with respect to the basis.
    pub fn coords(&self, x: &Quat) -> [Rational; 4] {
        let inv = self.inverse.clone().unwrap_or_else(|| det_and_inverse(&self.basis).1.expect("nonsingular"));
        let mut out: [Rational; 4] = Default::default();
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|r| &x[r] * &inv[r][k]).fold(Rational::zero(), |s, t| s + t);
        }
        out
    }

    /// `sum_r c_r e_r`.
    pub fn element(&self, c: &[i64; 4]) -> Quat {
        let mut out: Quat = Default::default();
        for (r, &cr) in c.iter().enumerate() {
            let cr = Rational::from_integer(BigInt::from(cr));
            for (s, o) in out.iter_mut().enumerate() {
                *o += &cr * &self.basis[r][s];
            }
        }
        out
    }

    /// `det(trd(e_r e_s))`.
    pub fn trace_gram_det(&self) -> Rational {
        let g: [Quat; 4] = std::array::from_fn(|r| std::array::from_fn(|s| self.algebra.trd(&self.algebra.mul(&self.basis[r], &self.basis[s]))));
        det_and_inverse(&g).0
    }

    pub fn matrix(&self, c: &[i64; 4]) -> [[f64; 2]; 2] {
        real_embedding(&self.algebra, &self.element(c))
    }

    pub fn motion(&self, c: &[i64; 4]) -> RealMotion {
        let m = self.matrix(c);
        RealMotion::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    /// Gram matrix of `c -> ||iota(sum c_r e_r)||_F^2`.
    pub fn frobenius_gram(&self) -> [[f64; 4]; 4] {
        let mats: Vec<[[f64; 2]; 2]> = self.basis.iter().map(|e| real_embedding(&self.algebra, e)).collect();
        let mut g = [[0.0; 4]; 4];
        for r in 0..4 {
            for s in 0..4 {
                g[r][s] = (0..2).flat_map(|u| (0..2).map(move |v| (u, v))).map(|(u, v)| mats[r][u][v] * mats[s][u][v]).sum();
            }
        }
        g
    }

    /// `(M, L)` with `nrd(sum c_r e_r) = c^T M c / L`, `M` integral.
    fn integer_norm_form(&self) -> ([[i128; 4]; 4], i128) {
        let (a, b) = (&self.algebra.a, &self.algebra.b);
        let diag = [Rational::one(), -a.clone(), -b.clone(), a * b];
        let mut form: [[Rational; 4]; 4] = Default::default();
        let mut l = BigInt::one();
        for r in 0..4 {
            for s in 0..4 {
                let v = (0..4).map(|t| &self.basis[r][t] * &diag[t] * &self.basis[s][t]).fold(Rational::zero(), |x, y| x + y);
                l = l.lcm(v.denom());
                form[r][s] = v;
            }
        }
        let lr = Rational::from_integer(l.clone());
        let m = std::array::from_fn(|r| std::array::from_fn(|s| (&form[r][s] * &lr).to_integer().to_i128().expect("small form")));
        (m, l.to_i128().expect("small denominator"))
    }
}

/// One unit: basis coordinates and `||iota(x)||_F^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub coords: [i64; 4],
    pub norm_sq: f64,
}

/// Norm-one elements with `||iota(x)||_F^2 <= bound`, one per sign pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitBallResult {
    pub bound: f64,
    pub elements: Vec<Unit>,
}

fn canonical_sign(c: [i64; 4]) -> [i64; 4] {
    match c.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => c.map(|v| -v),
        _ => c,
    }
}

/// `q(c) <= bound` for integer `c`, by Fincke-Pohst on the LDL form of `g`.
pub fn fincke_pohst(g: &[[f64; 4]; 4], bound: f64) -> Result<Vec<[i64; 4]>, QuatError> {
    let n = 4;
    let mut q = *g;
    for i in 0..n {
        if q[i][i] <= 0.0 {
            return Err(QuatError::NotPositiveDefinite);
        }
        for j in (i + 1)..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in (i + 1)..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut c = [0i64; 4];
    fn rec(i: usize, q: &[[f64; 4]; 4], remaining: f64, c: &mut [i64; 4], out: &mut Vec<[i64; 4]>) {
        let center: f64 = -((i + 1)..4).map(|j| q[i][j] * c[j] as f64).sum::<f64>();
        let half = (remaining.max(0.0) / q[i][i]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            c[i] = v;
            let rest = remaining - q[i][i] * (v as f64 - center).powi(2);
            if rest < -1e-9 * remaining.abs().max(1.0) {
                continue;
            }
            if i == 0 {
                out.push(*c);
            } else {
                rec(i - 1, q, rest, c, out);
            }
        }
        c[i] = 0;
    }
    rec(n - 1, &q, bound * (1.0 + NORM_SLACK) + NORM_SLACK, &mut c, &mut out);
    Ok(out)
}

/// Complete enumeration of norm-one units with `||iota(x)||_F^2 <= bound`.
pub fn unit_ball(order: &EichlerOrderData, bound: f64) -> Result<UnitBallResult, QuatError> {
    if !(bound >= 2.0) {
        return Err(QuatError::BoundTooSmall);
    }
    let g = order.frobenius_gram();
    let (m, l) = order.integer_norm_form();
    let limit = bound * (1.0 + NORM_SLACK);
    let mut elements: Vec<Unit> = Vec::new();
    for c in fincke_pohst(&g, bound)? {
        let nrd: i128 = (0..4)
            .flat_map(|r| (0..4).map(move |s| (r, s)))
            .map(|(r, s)| m[r][s] * c[r] as i128 * c[s] as i128)
            .sum();
        if nrd != l {
            continue;
        }
        let canon = canonical_sign(c);
        if canon != c {
            continue;
        }
        let norm_sq = frob_sq(&order.matrix(&c));
        if norm_sq <= limit {
            elements.push(Unit { coords: c, norm_sq });
        }
    }
    elements.sort_by(|x, y| x.norm_sq.total_cmp(&y.norm_sq).then(x.coords.cmp(&y.coords)));
    Ok(UnitBallResult { bound, elements })
}

/// Hyperbolic area of `Gamma \ H` for an Eichler order of level `Q` in the
/// algebra of discriminant `D`: `(pi/3) D Q prod_{p|D} (1 - 1/p) prod_{p|Q} (1 + 1/p)`.
pub fn covolume(d: u64, q: u64) -> Result<f64, QuatError> {
    let bad = |m: &str| QuatError::InvalidVolume(d, q, m.to_string());
    if d == 0 || q == 0 {
        return Err(bad("must be positive"));
    }
    let fd = trial_factor(d);
    if fd.iter().any(|&(_, e)| e > 1) {
        return Err(bad("D is not squarefree"));
    }
    if fd.len() % 2 == 1 {
        return Err(bad("D has an odd number of prime factors"));
    }
    if d.gcd(&q) != 1 {
        return Err(bad("gcd(D, Q) > 1"));
    }
    let mut v = PI / 3.0 * d as f64 * q as f64;
    for (p, _) in fd {
        v *= 1.0 - 1.0 / p as f64;
    }
    for (p, _) in trial_factor(q) {
        v *= 1.0 + 1.0 / p as f64;
    }
    Ok(v)
}

/// Conversion factor from hyperbolic area to the volume of `Gamma \ SL_2(R)`
/// when the `SO(2)` fibre is included.
pub const FIBRE_FACTOR: f64 = 2.0 * PI;

/// Point at hyperbolic distance `rho` from `w` in direction `theta`.
pub fn polar_point(w: Complex64, rho: f64, theta: f64) -> Complex64 {
    let zeta = Complex64::from_polar((rho / 2.0).tanh(), theta);
    let i = Complex64::i();
    let z = i * (1.0 + zeta) / (1.0 - zeta);
    Complex64::new(w.re + w.im * z.re, w.im * z.im)
}

fn act(m: &RealMotion, z: Complex64) -> Complex64 {
    (z * m.a + m.b) / (z * m.c + m.d)
}

fn ball_for_radius(order: &EichlerOrderData, w: Complex64, reach: f64) -> Result<Vec<RealMotion>, QuatError> {
    let dwi = hyp_dist_c64(w, Complex64::i());
    let b = 2.0 * (reach + 2.0 * dwi).cosh();
    let ball = unit_ball(order, b.max(2.0))?;
    Ok(ball.elements.iter().map(|u| order.motion(&u.coords)).collect())
}

/// Whether every point of the circle `S(w, r)` is strictly closer to another
/// orbit point than to `w`, with a Lipschitz margin for the sampling gap.
/// If so the Dirichlet domain centred at `w` lies inside `B(w, r)`.
pub fn sphere_test(order: &EichlerOrderData, w: Complex64, r: f64, spacing: f64) -> Result<bool, QuatError> {
    let motions = ball_for_radius(order, w, 2.0 * r)?;
    let orbit: Vec<Complex64> = motions
        .iter()
        .map(|m| act(m, w))
        .filter(|&gw| hyp_dist_c64(gw, w) > 1e-9)
        .collect();
    let m = ((2.0 * PI * r.sinh()) / spacing).ceil().max(8.0) as usize;
    let margin = r.sinh() * 2.0 * PI / m as f64;
    for s in 0..m {
        let z = polar_point(w, r, 2.0 * PI * s as f64 / m as f64);
        let best = orbit.iter().map(|&gw| hyp_dist_c64(z, gw)).fold(f64::INFINITY, f64::min);
        if !(best < r - margin) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest radius on the ladder `step, 2 step, ...` passing [`sphere_test`].
pub fn dirichlet_radius(order: &EichlerOrderData, w: Complex64, step: f64, max: f64) -> Result<f64, QuatError> {
    let mut r = step;
    while r <= max + 1e-12 {
        if sphere_test(order, w, r, 0.02)? {
            return Ok(r);
        }
        r += step;
    }
    Err(QuatError::NoDirichletRadius(max))
}

/// `count` points uniform in hyperbolic area on `B(w, radius)`.
pub fn disk_grid(w: &UHPoint, radius: f64, count: usize, seed: u64) -> Vec<UHPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wc = w.to_c64();
    let ch = radius.cosh() - 1.0;
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let rho = (1.0 + u * ch).acosh();
            let theta = rng.gen::<f64>() * 2.0 * PI;
            let z = polar_point(wc, rho, theta);
            UHPoint::new(
                Rational::from_float(z.re).expect("finite"),
                Rational::from_float(z.im).expect("finite"),
            )
            .expect("inside the upper half-plane")
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverReport {
    pub r_max: f64,
    /// `4 sinh^2(r_max) + 2`.
    pub norm_bound: f64,
    /// Bound actually enumerated; see [`covering_radius_estimate`].
    pub effective_bound: f64,
    pub units: usize,
    /// `min_gamma d(gamma z, w)` per grid point.
    pub distances: Vec<f64>,
    pub estimate: f64,
    /// Every grid point has an orbit point of `w` within `r_max`.
    pub covered: bool,
}

/// `max_z min_gamma d(gamma z, w)` over the units with `||gamma||_F^2 <= B(r_max)`.
///
/// The identity already gives `d(z, w) <= rho := max_z d(z, w)`, and any
/// `gamma` with `d(gamma z, w) <= rho` satisfies
/// `d(gamma i, i) <= 2 rho + 2 d(i, w)`. Enumerating the ball of Frobenius
/// norm `2 cosh(2 rho + 2 d(i, w))` (when smaller than `B`) therefore yields
/// the same minimum.
pub fn covering_radius_estimate(
    order: &EichlerOrderData,
    w: &UHPoint,
    grid: &[UHPoint],
    r_max: f64,
) -> Result<CoverReport, QuatError> {
    if grid.is_empty() {
        return Err(QuatError::EmptyGrid);
    }
    if !(r_max > 0.0) {
        return Err(QuatError::BadRadius);
    }
    let wc = w.to_c64();
    let pts: Vec<Complex64> = grid.iter().map(|z| z.to_c64()).collect();
    let rho = pts.iter().map(|&z| hyp_dist_c64(z, wc)).fold(0.0, f64::max);
    let norm_bound = hyperbolic::radius_to_norm_bound(r_max);
    let reach = 2.0 * rho + 2.0 * hyp_dist_c64(wc, Complex64::i());
    let effective_bound = norm_bound.min(2.0 * reach.cosh() * (1.0 + 1e-9)).max(2.0);
    let ball = unit_ball(order, effective_bound)?;
    let motions: Vec<RealMotion> = ball.elements.iter().map(|u| order.motion(&u.coords)).collect();
    let distances: Vec<f64> = pts
        .iter()
        .map(|&z| motions.iter().map(|m| hyp_dist_c64(act(m, z), wc)).fold(f64::INFINITY, f64::min))
        .collect();
    let estimate = distances.iter().copied().fold(0.0, f64::max);
    Ok(CoverReport {
        r_max,
        norm_bound,
        effective_bound,
        units: motions.len(),
        covered: estimate <= r_max,
        distances,
        estimate,
    })
}

/// Monte Carlo area of the Dirichlet domain at `w`, assuming it lies in `B(w, radius)`.
pub fn dirichlet_area_estimate(
    order: &EichlerOrderData,
    w: Complex64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<f64, QuatError> {
    let motions = ball_for_radius(order, w, 2.0 * radius)?;
    let orbit: Vec<Complex64> = motions
        .iter()
        .map(|m| act(m, w))
        .filter(|&gw| hyp_dist_c64(gw, w) > 1e-9)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ch = radius.cosh() - 1.0;
    let mut inside = 0usize;
    for _ in 0..samples {
        let rho = (1.0 + rng.gen::<f64>() * ch).acosh();
        let z = polar_point(w, rho, rng.gen::<f64>() * 2.0 * PI);
        let dw = hyp_dist_c64(z, w);
        if orbit.iter().all(|&gw| hyp_dist_c64(z, gw) >= dw) {
            inside += 1;
        }
    }
    let disk_area = 2.0 * PI * ch;
    Ok(disk_area * inside as f64 / samples as f64)
}

/// A unit with its disk-model data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub unit: Unit,
    /// `|E|`; zero for rotations about the disk centre.
    pub e_abs: f64,
    pub circle: Option<IsometricCircle<f64>>,
    pub meets_ball: bool,
}

/// Units with `||gamma||_F^2 <= 4 sinh^2(r) + 2`, annotated with isometric circles.
pub fn small_generator_candidates(order: &EichlerOrderData, r: f64) -> Result<Vec<Candidate>, QuatError> {
    if !(r > 0.0) {
        return Err(QuatError::BadRadius);
    }
    let ball = unit_ball(order, hyperbolic::radius_to_norm_bound(r))?;
    Ok(ball
        .elements
        .into_iter()
        .map(|unit| {
            let disk = cayley_motion(&order.motion(&unit.coords));
            let circle = isometric_circle(&disk).ok();
            let meets_ball = circle.as_ref().map_or(true, |c| c.meets_ball(r));
            Candidate {
                e_abs: disk.e.norm(),
                unit,
                circle,
                meets_ball,
            }
        })
        .collect())
}
