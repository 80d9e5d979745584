//! Ford domains and certified generating sets of `Gamma_0(Q)`.
//!
//! The Ford domain is `{ |Re z| <= 1/2, |cQ z + d| >= 1 for all coprime (cQ, d) }`.
//! Every isometric circle `|m z + d| = 1` is centred on the real axis, so its
//! squared height over `x` is `L(x) - x^2` with
//! `L(x) = -2(d/m) x + (1 - d^2)/m^2` linear in `x`. The floor of the domain
//! is therefore the upper envelope of a family of lines, which is computed
//! exactly in rational arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{rat_to_f64, RatMotion, UHPoint};
use crate::numutil::{self, default_constant, jacobsthal_shift, ApproxResult, NumError, Rational};

/// Reduction gives up after this many steps.
pub const MAX_REDUCTION_STEPS: usize = 1_000_000;

/// Recorded constant in `||g||_F^2 <= KAPPA Q^2 (1 + ln(Q + 2))^4`.
pub const NORM_KAPPA: f64 = 128.0;

#[derive(Debug, Error)]
pub enum Gamma0Error {
    #[error("level must be positive")]
    ZeroLevel,
    #[error("not an element of Gamma_0({level}): {reason}")]
    NotInGroup { level: u64, reason: String },
    #[error("envelope leaves x = {x} uncovered; cutoff |cQ| <= {r_max} is insufficient")]
    Uncovered { x: String, r_max: u64 },
    #[error("base point 2i is not interior to the computed domain")]
    BadBasePoint,
    #[error("generation not certified after {steps} steps")]
    NotCertified { steps: usize },
    #[error("reduction residual is not +-T^m: {0}")]
    BadResidual(String),
    #[error("internal error: word does not evaluate to its source element")]
    WordMismatch,
    #[error("reduction failed to increase Im w")]
    NoProgress,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// An element `(a b; c d)` of `Gamma_0(Q)`: determinant one and `Q | c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeElement {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub level: u64,
}

impl LatticeElement {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt, level: u64) -> Result<Self, Gamma0Error> {
        if level == 0 {
            return Err(Gamma0Error::ZeroLevel);
        }
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Gamma0Error::NotInGroup {
                level,
                reason: "determinant is not 1".into(),
            });
        }
        if !c.is_multiple_of(&BigInt::from(level)) {
            return Err(Gamma0Error::NotInGroup {
                level,
                reason: format!("{level} does not divide c = {c}"),
            });
        }
        Ok(Self { a, b, c, d, level })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64, level: u64) -> Result<Self, Gamma0Error> {
        Self::new(a.into(), b.into(), c.into(), d.into(), level)
    }

    pub fn identity(level: u64) -> Self {
        Self::unchecked(1, 0, 0, 1, level)
    }

    pub fn neg_identity(level: u64) -> Self {
        Self::unchecked(-1, 0, 0, -1, level)
    }

    /// `T^n = (1 n; 0 1)`.
    pub fn translation(n: BigInt, level: u64) -> Self {
        Self {
            a: BigInt::one(),
            b: n,
            c: BigInt::zero(),
            d: BigInt::one(),
            level,
        }
    }

    fn unchecked(a: i64, b: i64, c: i64, d: i64, level: u64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            level,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
            level: self.level,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
            level: self.level,
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::identity(self.level);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn frobenius_sq(&self) -> BigInt {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }

    pub fn to_motion(&self) -> RatMotion {
        RatMotion::from_integers(&self.a, &self.b, &self.c, &self.d)
    }

    /// Exact action on a rational point.
    pub fn act(&self, z: &UHPoint) -> UHPoint {
        crate::hyperbolic::mobius_act(&self.to_motion(), z).expect("c z + d != 0 off the real axis")
    }

    /// `+-T^m`, i.e. stabilises the cusp at infinity.
    pub fn is_parabolic_at_infinity(&self) -> bool {
        self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }
}

/// One isometric circle `|cQ z + d| = 1` on the floor of the Ford domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCircle {
    /// Lower-left entry `cQ`, normalised positive.
    pub cq: BigInt,
    pub d: BigInt,
    /// Closed interval of `x` where this circle attains the envelope.
    pub arc: (Rational, Rational),
}

impl BoundaryCircle {
    pub fn center(&self) -> Rational {
        Rational::new(-&self.d, self.cq.clone())
    }

    pub fn radius(&self) -> Rational {
        Rational::new(BigInt::one(), self.cq.clone())
    }

    /// `r^2 - (x - x0)^2`.
    pub fn height_sq(&self, x: &Rational) -> Rational {
        height_sq(&self.cq, &self.d, x)
    }

    /// Strictly inside the circle.
    pub fn contains_strictly(&self, z: &UHPoint) -> bool {
        z.y() * z.y() < self.height_sq(z.x())
    }
}

fn height_sq(m: &BigInt, d: &BigInt, x: &Rational) -> Rational {
    let mx_d = Rational::from_integer(m.clone()) * x + Rational::from_integer(d.clone());
    (Rational::one() - &mx_d * &mx_d) / Rational::from_integer(m * m)
}

/// Floor of the Ford domain of `Gamma_0(Q)` on `[-1/2, 1/2]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FordBoundary {
    pub level: u64,
    /// Explicit constant `C` used for the cutoff.
    pub constant: u64,
    /// Cutoff `R_max = 2 (1 + C)^2 Q` on `|cQ|`.
    pub r_max: u64,
    /// Sorted left to right; arcs tile `[-1/2, 1/2]`.
    pub circles: Vec<BoundaryCircle>,
}

impl FordBoundary {
    /// Index of the arc containing `x` (the left one at a shared endpoint).
    pub fn locate(&self, x: &Rational) -> Option<usize> {
        let idx = self.circles.partition_point(|c| &c.arc.1 < x);
        (idx < self.circles.len() && &self.circles[idx].arc.0 <= x).then_some(idx)
    }

    /// Squared height of the floor over `x`.
    pub fn floor_height_sq(&self, x: &Rational) -> Option<Rational> {
        self.locate(x).map(|i| self.circles[i].height_sq(x))
    }

    /// Cusps on the floor: arc endpoints at height zero.
    pub fn cusps(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for c in &self.circles {
            for x in [&c.arc.0, &c.arc.1] {
                if c.height_sq(x).is_zero() && out.last() != Some(x) {
                    out.push(x.clone());
                }
            }
        }
        out
    }

    /// Hyperbolic area of the domain, `sum of integral dx / h(x)` over the arcs.
    pub fn hyperbolic_area(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| {
                // arcsin((x - x0)/r) via the exact height, which stays accurate near the cusps.
                let s = |x: &Rational| {
                    let off = rat_to_f64(&(x - c.center()));
                    off.atan2(rat_to_f64(&c.height_sq(x)).max(0.0).sqrt())
                };
                s(&c.arc.1) - s(&c.arc.0)
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
struct Line {
    m: BigInt,
    d: BigInt,
    slope: Rational,
    icpt: Rational,
}

impl Line {
    fn new(m: BigInt, d: BigInt) -> Self {
        let mr = Rational::from_integer(m.clone());
        let slope = Rational::from_integer(-BigInt::from(2) * &d) / &mr;
        let icpt = Rational::from_integer(BigInt::one() - &d * &d) / (&mr * &mr);
        Self { m, d, slope, icpt }
    }

    fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.icpt
    }

    fn meet(&self, o: &Line) -> Rational {
        (&o.icpt - &self.icpt) / (&self.slope - &o.slope)
    }
}

/// Upper envelope of lines restricted to `[lo, hi]`.
struct Envelope {
    lines: Vec<Line>,
    /// `starts[k]..ends[k]` is where `lines[k]` is maximal.
    starts: Vec<Rational>,
    ends: Vec<Rational>,
}

impl Envelope {
    fn build(mut lines: Vec<Line>, lo: &Rational, hi: &Rational) -> Self {
        lines.sort_by(|p, q| p.slope.cmp(&q.slope));
        lines.dedup_by(|p, q| p.slope == q.slope && p.icpt == q.icpt);
        let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
        for line in lines {
            if let Some(last) = hull.last() {
                if last.slope == line.slope {
                    if last.icpt >= line.icpt {
                        continue;
                    }
                    hull.pop();
                }
            }
            while hull.len() >= 2 {
                let n = hull.len();
                if hull[n - 2].meet(&line) <= hull[n - 2].meet(&hull[n - 1]) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(line);
        }
        let mut out = Envelope {
            lines: Vec::new(),
            starts: Vec::new(),
            ends: Vec::new(),
        };
        for k in 0..hull.len() {
            let mut s = if k == 0 { lo.clone() } else { hull[k - 1].meet(&hull[k]) };
            let mut e = if k + 1 == hull.len() {
                hi.clone()
            } else {
                hull[k].meet(&hull[k + 1])
            };
            if &s < lo {
                s = lo.clone();
            }
            if &e > hi {
                e = hi.clone();
            }
            if s < e {
                out.lines.push(hull[k].clone());
                out.starts.push(s);
                out.ends.push(e);
            }
        }
        out
    }

    fn locate(&self, x: &Rational) -> usize {
        let idx = self.ends.partition_point(|e| e < x);
        idx.min(self.lines.len() - 1)
    }

    fn eval(&self, x: &Rational) -> Rational {
        self.lines[self.locate(x)].eval(x)
    }

    /// Whether `line <= envelope` on all of `[lo, hi]`.
    fn dominates(&self, line: &Line, lo: &Rational, hi: &Rational) -> bool {
        // envelope - line is convex; its minimum sits where the envelope's
        // slope crosses the line's slope.
        let j = self.lines.partition_point(|l| l.slope < line.slope);
        let x = if j == 0 {
            lo.clone()
        } else if j == self.lines.len() {
            hi.clone()
        } else {
            self.starts[j].clone()
        };
        self.eval(&x) >= line.eval(&x)
    }

    /// Intervals (as f64, slightly widened) where the squared height is below `h_sq`.
    fn low_set(&self, h_sq: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (k, line) in self.lines.iter().enumerate() {
            let s = rat_to_f64(&self.starts[k]);
            let e = rat_to_f64(&self.ends[k]);
            let m = line.m.to_f64().unwrap();
            let x0 = -line.d.to_f64().unwrap() / m;
            let gap = 1.0 / (m * m) - h_sq;
            let mut push = |a: f64, b: f64| {
                if a < b {
                    out.push((a, b));
                }
            };
            if gap <= 0.0 {
                push(s, e);
            } else {
                let w = gap.sqrt() * (1.0 - 1e-9) - 1e-15;
                push(s, e.min(x0 - w));
                push(s.max(x0 + w), e);
            }
        }
        out
    }
}

fn center_range_to_d(m: i64, lo: f64, hi: f64) -> (i64, i64) {
    // centre -d/m in [lo, hi] with slack
    let mf = m as f64;
    ((-hi * mf).floor() as i64 - 2, (-lo * mf).ceil() as i64 + 2)
}

/// Exact Ford-domain floor of `Gamma_0(Q)` from all circles with `|cQ| <= R_max`.
pub fn boundary_circles(level: u64) -> Result<FordBoundary, Gamma0Error> {
    if level == 0 {
        return Err(Gamma0Error::ZeroLevel);
    }
    let constant = default_constant(level);
    let c_max = 2 * (1 + constant) * (1 + constant);
    let r_max = c_max * level;
    let lo = numutil::rat(-1, 2);
    let hi = numutil::rat(1, 2);
    let q = level as i64;

    // c = 1 covers everything except neighbourhoods of the cusps.
    let first: Vec<Line> = (-(q / 2) - 2..=(q / 2) + 2)
        .filter(|d| d.gcd(&q) == 1)
        .map(|d| Line::new(BigInt::from(q), BigInt::from(d)))
        .collect();
    let mut env = Envelope::build(first, &lo, &hi);

    for c in 2..=c_max as i64 {
        let m = c * q;
        let mf = m as f64;
        let low = env.low_set(1.0 / (mf * mf));
        let mut ds = BTreeSet::new();
        for (l, u) in low {
            let (d_lo, d_hi) = center_range_to_d(m, l - 1.0 / mf, u + 1.0 / mf);
            for d in d_lo..=d_hi {
                if d.gcd(&m) == 1 && (d as f64 / mf).abs() <= 0.5 + 2.0 / mf {
                    ds.insert(d);
                }
            }
        }
        let survivors: Vec<Line> = ds
            .into_iter()
            .map(|d| Line::new(BigInt::from(m), BigInt::from(d)))
            .filter(|line| !env.dominates(line, &lo, &hi))
            .collect();
        if !survivors.is_empty() {
            let mut all = env.lines.clone();
            all.extend(survivors);
            env = Envelope::build(all, &lo, &hi);
        }
    }

    // Height^2 along an arc is concave, so checking the vertices suffices.
    for (k, line) in env.lines.iter().enumerate() {
        for x in [&env.starts[k], &env.ends[k]] {
            if height_sq(&line.m, &line.d, x).is_negative() {
                return Err(Gamma0Error::Uncovered {
                    x: x.to_string(),
                    r_max,
                });
            }
        }
    }

    let circles = env
        .lines
        .iter()
        .enumerate()
        .map(|(k, l)| BoundaryCircle {
            cq: l.m.clone(),
            d: l.d.clone(),
            arc: (env.starts[k].clone(), env.ends[k].clone()),
        })
        .collect();
    Ok(FordBoundary {
        level,
        constant,
        r_max,
        circles,
    })
}

/// Smallest radius `1/|cQ|` among the boundary circles.
pub fn min_boundary_radius(boundary: &FordBoundary) -> Rational {
    let m = boundary.circles.iter().map(|c| c.cq.clone()).max().expect("nonempty boundary");
    Rational::new(BigInt::one(), m)
}

/// Membership in the Ford domain, checked against every coprime `(cQ, d)`
/// with `|cQ| <= 1/Im z`; larger `|cQ|` cannot violate `|cQ z + d| >= 1`.
pub fn ford_member(z: &UHPoint, level: u64) -> bool {
    let half = numutil::rat(1, 2);
    if z.x().abs() > half {
        return false;
    }
    let one = Rational::one();
    let q = BigInt::from(level);
    let mut m = q.clone();
    loop {
        let my = Rational::from_integer(m.clone()) * z.y();
        if my >= one {
            return true;
        }
        let mx = Rational::from_integer(m.clone()) * z.x();
        let base = (-&mx).floor().to_integer();
        for d in [base.clone(), base + 1] {
            if !d.gcd(&m).is_one() {
                continue;
            }
            let re = &mx + Rational::from_integer(d);
            if &re * &re + &my * &my < one {
                return false;
            }
        }
        m += &q;
    }
}

/// Which regime of the cusp analysis a point falls into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointCase {
    /// `|b Q x - a| <= 1/2` with `gcd(a, bQ) = 1`: away from cusps other than infinity.
    AwayFromCusps { a: BigInt, b: BigInt, min_height_sq: Rational },
    /// `|Q x - c|` small with `gcd(c, Q) = 1`.
    NearCoprime { c: BigInt, min_height_sq: Rational },
    /// `|Q x - c|` small with `gcd(c, Q) > 1`: the cusp `c/Q` is flanked by
    /// the mediant circles `|k Q w - (k c +- 1)| = 1`.
    NearCusp {
        c: BigInt,
        k_minus: u64,
        k_plus: u64,
        /// `(cQ, d)` of the two mediant circles, minus side first.
        mediants: [(BigInt, BigInt); 2],
        /// `(k_- c - 1)/(k_- Q) < x < (k_+ c + 1)/(k_+ Q)`.
        flanked: bool,
    },
}

/// Classify `z` (with `|Re z| <= 1/2`) by coprime approximation of `Q x`.
pub fn classify_point(z: &UHPoint, level: u64) -> Result<PointCase, Gamma0Error> {
    if level == 0 {
        return Err(Gamma0Error::ZeroLevel);
    }
    let constant = default_constant(level);
    let qr = Rational::from_integer(BigInt::from(level));
    let qx = &qr * z.x();
    let q = BigInt::from(level);
    match numutil::coprime_approx(&qx, level, constant)? {
        ApproxResult::Fraction { a, b } => {
            let bq = &b * &q;
            let r = Rational::from_integer(bq.clone()) * z.x() - Rational::from_integer(a.clone());
            let min_height_sq = (Rational::one() - &r * &r) / Rational::from_integer(&bq * &bq);
            Ok(PointCase::AwayFromCusps { a, b, min_height_sq })
        }
        ApproxResult::Integral(c) if c.gcd(&q).is_one() => {
            let r = &qx - Rational::from_integer(c.clone());
            let min_height_sq = (Rational::one() - &r * &r) / (&qr * &qr);
            Ok(PointCase::NearCoprime { c, min_height_sq })
        }
        ApproxResult::Integral(c) => {
            let one = BigInt::one();
            let k_minus = jacobsthal_shift(&-&one, &c, level)?;
            let k_plus = jacobsthal_shift(&one, &c, level)?;
            let km = BigInt::from(k_minus);
            let kp = BigInt::from(k_plus);
            let lo = Rational::new(&km * &c - &one, &km * &q);
            let hi = Rational::new(&kp * &c + &one, &kp * &q);
            let flanked = &lo < z.x() && z.x() < &hi;
            let mediants = [
                (&km * &q, -(&km * &c - &one)),
                (&kp * &q, -(&kp * &c + &one)),
            ];
            Ok(PointCase::NearCusp {
                c,
                k_minus,
                k_plus,
                mediants,
                flanked,
            })
        }
    }
}

/// `T`, `-I` and one side-pairing motion `(a b; cQ d)` per boundary circle,
/// normalised with `a = d^{-1} mod cQ`, `|a| <= cQ/2`.
pub fn side_pairing_generators(boundary: &FordBoundary) -> Vec<LatticeElement> {
    let level = boundary.level;
    let mut gens = vec![
        LatticeElement::translation(BigInt::one(), level),
        LatticeElement::neg_identity(level),
    ];
    for circle in &boundary.circles {
        gens.push(completion(&circle.cq, &circle.d, level));
    }
    gens
}

/// Complete a coprime bottom row `(m, d)`, `m > 0`, to an element with `|a| <= m/2`.
pub fn completion(m: &BigInt, d: &BigInt, level: u64) -> LatticeElement {
    let a = if m.is_one() {
        BigInt::zero()
    } else {
        let inv = numutil::mod_inverse(d, m).expect("coprime bottom row");
        if &inv * 2 > *m {
            inv - m
        } else {
            inv
        }
    };
    let b = (&a * d - BigInt::one()) / m;
    LatticeElement::new(a, b, m.clone(), d.clone(), level).expect("completion is unimodular")
}

/// `KAPPA Q^2 (1 + ln(Q + 2))^4`, the recorded envelope for squared generator norms.
pub fn generator_norm_bound_sq(level: u64) -> f64 {
    let q = level as f64;
    NORM_KAPPA * q * q * (1.0 + (q + 2.0).ln()).powi(4)
}

/// A random element with bottom row bounded by `size` in absolute value.
pub fn random_element<R: Rng + ?Sized>(level: u64, size: u64, rng: &mut R) -> LatticeElement {
    let q = level as i64;
    let size = size.max(1) as i64;
    let c_max = size / q;
    loop {
        let c = rng.gen_range(-c_max..=c_max) * q;
        if c == 0 {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let n = rng.gen_range(-size..=size);
            let t = LatticeElement::translation(BigInt::from(n), level);
            return if sign == 1 { t } else { t.mul(&LatticeElement::neg_identity(level)) };
        }
        let d = rng.gen_range(-size..=size);
        if d.gcd(&c) != 1 {
            continue;
        }
        let (m, dd, flip) = if c > 0 { (c, d, false) } else { (-c, -d, true) };
        let mut g = completion(&BigInt::from(m), &BigInt::from(dd), level);
        if flip {
            g = g.mul(&LatticeElement::neg_identity(level));
        }
        return g;
    }
}

/// A random word of the given length in `T^{+-1}` and `(1 0; Q 1)^{+-1}`.
pub fn random_word_element<R: Rng + ?Sized>(level: u64, len: usize, rng: &mut R) -> LatticeElement {
    let t = LatticeElement::translation(BigInt::one(), level);
    let l = LatticeElement::new(
        BigInt::one(),
        BigInt::zero(),
        BigInt::from(level),
        BigInt::one(),
        level,
    )
    .expect("lower unipotent lies in Gamma_0(Q)");
    let mut g = LatticeElement::identity(level);
    for _ in 0..len {
        let step = match rng.gen_range(0..4) {
            0 => t.clone(),
            1 => t.inverse(),
            2 => l.clone(),
            _ => l.inverse(),
        };
        g = g.mul(&step);
    }
    g
}

/// One letter of a [`Word`]: `gens[gen]^power`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub power: i64,
}

/// A word in the side-pairing generators followed by `sign * T^translation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<Letter>,
    pub sign: i8,
    pub translation: BigInt,
}

impl Word {
    pub fn evaluate(&self, gens: &[LatticeElement]) -> LatticeElement {
        let level = gens[0].level;
        let mut g = LatticeElement::identity(level);
        for letter in &self.letters {
            g = g.mul(&gens[letter.gen].pow(letter.power));
        }
        g = g.mul(&LatticeElement::translation(self.translation.clone(), level));
        if self.sign < 0 {
            g = g.mul(&LatticeElement::neg_identity(level));
        }
        g
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Ford reduction of `gamma` against the side-pairing generators of `boundary`.
///
/// Tracks `w = delta * 2i` where `delta` starts at `gamma`; each step either
/// translates `Re w` into `[-1/2, 1/2]` or applies the generator whose
/// boundary circle strictly contains `w`, which strictly increases `Im w`.
/// When `w` lands in the domain, `delta` must be `+-T^m`.
pub fn reduce(
    gamma: &LatticeElement,
    boundary: &FordBoundary,
    gens: &[LatticeElement],
) -> Result<Word, Gamma0Error> {
    let level = boundary.level;
    let base = UHPoint::new(Rational::zero(), Rational::from_integer(BigInt::from(2))).expect("2i");
    if !ford_member(&base, level) || boundary.floor_height_sq(base.x()).map_or(true, |h| h >= numutil::rat_int(4)) {
        return Err(Gamma0Error::BadBasePoint);
    }
    let t = LatticeElement::translation(BigInt::one(), level);
    debug_assert_eq!(gens[0], t);
    let half = numutil::rat(1, 2);

    let mut delta = gamma.clone();
    let mut w = gamma.act(&base);
    let mut letters: Vec<Letter> = Vec::new();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(Gamma0Error::NotCertified { steps });
        }
        // Shift Re w into [-1/2, 1/2].
        let shifted = w.x() + &half;
        let n = shifted.floor().to_integer();
        let n = if &shifted - Rational::from_integer(n.clone()) == Rational::zero() && !n.is_zero() {
            // Re w = n - 1/2: keep it on the left edge.
            n - 1
        } else {
            n
        };
        if !n.is_zero() {
            let shift = LatticeElement::translation(-&n, level);
            delta = shift.mul(&delta);
            w = UHPoint::new(w.x() - Rational::from_integer(n.clone()), w.y().clone()).expect("same height");
            letters.push(Letter {
                gen: 0,
                power: n.to_i64().expect("translation fits in i64"),
            });
        }
        let Some(idx) = boundary.locate(w.x()) else {
            return Err(Gamma0Error::NotCertified { steps });
        };
        let circle = &boundary.circles[idx];
        if !circle.contains_strictly(&w) {
            break;
        }
        let g = &gens[idx + 2];
        let next = g.act(&w);
        if next.y() <= w.y() {
            return Err(Gamma0Error::NoProgress);
        }
        w = next;
        delta = g.mul(&delta);
        letters.push(Letter {
            gen: idx + 2,
            power: -1,
        });
    }

    if !delta.is_parabolic_at_infinity() {
        return Err(Gamma0Error::BadResidual(format!(
            "({} {}; {} {})",
            delta.a, delta.b, delta.c, delta.d
        )));
    }
    let sign: i8 = if delta.a.is_positive() { 1 } else { -1 };
    let translation = if sign > 0 { delta.b.clone() } else { -&delta.b };
    let word = Word {
        letters: merge_letters(letters),
        sign,
        translation,
    };
    if &word.evaluate(gens) != gamma {
        return Err(Gamma0Error::WordMismatch);
    }
    Ok(word)
}

fn merge_letters(letters: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for l in letters {
        match out.last_mut() {
            Some(prev) if prev.gen == l.gen => {
                prev.power += l.power;
                if prev.power == 0 {
                    out.pop();
                }
            }
            _ => out.push(l),
        }
    }
    out
}

/// Result of certifying a generating set on random elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certification {
    pub level: u64,
    pub trials: usize,
    pub certified: usize,
    pub max_word_len: usize,
    pub generator_count: usize,
    pub max_generator_norm_sq: BigInt,
}

/// Reduce `trials` random elements; every one must produce a verified word.
pub fn certify<R: Rng + ?Sized>(level: u64, trials: usize, size: u64, rng: &mut R) -> Result<Certification, Gamma0Error> {
    let boundary = boundary_circles(level)?;
    let gens = side_pairing_generators(&boundary);
    let mut max_word_len = 0;
    for _ in 0..trials {
        let g = random_element(level, size, rng);
        let word = reduce(&g, &boundary, &gens)?;
        max_word_len = max_word_len.max(word.len());
    }
    let max_generator_norm_sq = gens.iter().map(|g| g.frobenius_sq()).max().unwrap_or_default();
    Ok(Certification {
        level,
        trials,
        certified: trials,
        max_word_len,
        generator_count: gens.len(),
        max_generator_norm_sq,
    })
}
