//! Exact integer and rational approximation primitives.
//!
//! Two lemmas drive the Ford-domain analysis of `Gamma_0(Q)`:
//!
//! * a Jacobsthal-type shift: for coprime `a, b` there is a small `k` with
//!   `gcd(a + k b, D) = 1`;
//! * a coprime rational approximation: every `x` is either close to an
//!   integer, or some `a/b` with small `b` and `gcd(a, b D) = 1` satisfies
//!   `|b x - a| <= 1/2`.
//!
//! Both are implemented in exact arithmetic so their postconditions are
//! decidable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always reduced with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("gcd({a}, {b}) = {g} is not 1")]
    NotCoprime { a: BigInt, b: BigInt, g: BigInt },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("approximation bound must be positive")]
    ZeroBound,
    #[error("no coprime approximation of {x} with modulus {modulus} and constant {constant}")]
    NoApproximation {
        x: Rational,
        modulus: u64,
        constant: u64,
    },
}

/// Outcome of [`coprime_approx`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxResult {
    /// `|x - c| <= 1 / (2 (1 + C))`.
    Integral(BigInt),
    /// `1 <= b <= 2 (1 + C)^2`, `gcd(a, b D) = 1` and `|b x - a| <= 1/2`.
    Fraction { a: BigInt, b: BigInt },
}

/// Default explicit constant standing in for `C_eps D^eps`: `max(1, ceil(ln(D + 2)))`.
pub fn default_constant(modulus: u64) -> u64 {
    let c = ((modulus as f64) + 2.0).ln().ceil() as u64;
    c.max(1)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn modulo_u64(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

/// Smallest positive `k` with `gcd(a + k b, D) = 1`.
pub fn jacobsthal_shift(a: &BigInt, b: &BigInt, modulus: u64) -> Result<u64, NumError> {
    if modulus == 0 {
        return Err(NumError::ZeroModulus);
    }
    let g = a.gcd(b);
    if !g.is_one() {
        return Err(NumError::NotCoprime {
            a: a.clone(),
            b: b.clone(),
            g,
        });
    }
    let ar = modulo_u64(a, modulus);
    let br = modulo_u64(b, modulus);
    // Each prime p | D kills at most one residue class of k mod p, so a
    // solution exists below D + 1.
    let mut value = ar;
    for k in 1..=modulus + 1 {
        value = (value + br) % modulus;
        if value.gcd(&modulus) == 1 {
            return Ok(k);
        }
    }
    unreachable!("coprime a, b always admit a shift below D + 1")
}

/// Continued-fraction convergents `p_k / q_k` of a rational number.
pub fn convergents(x: &Rational) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    // Seeds p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0.
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let a = num.div_floor(&den);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
        let r = &num - &a * &den;
        num = std::mem::replace(&mut den, r);
    }
    out
}

/// Dirichlet approximation: `(c, d)` with `1 <= d <= K`, `|d x - c| <= 1/K` and
/// `gcd(c, d) = 1`. Returns the convergent of smallest denominator that
/// meets the bound.
pub fn dirichlet_approx(x: &Rational, bound: u64) -> Result<(BigInt, BigInt), NumError> {
    if bound == 0 {
        return Err(NumError::ZeroBound);
    }
    let tol = Rational::new(BigInt::one(), BigInt::from(bound));
    for (p, q) in convergents(x) {
        let err = (Rational::from_integer(q.clone()) * x - Rational::from_integer(p.clone())).abs();
        if err <= tol {
            debug_assert!(q <= BigInt::from(bound));
            return Ok((p, q));
        }
    }
    unreachable!("the last convergent is x itself")
}

/// Coprime approximation of `x` relative to modulus `D` with explicit constant `C`.
///
/// Follows the constructive proof: Dirichlet approximation `c/d` with
/// `K = 2(1 + C)`; for `d >= 2` take the unimodular neighbour of `c/d` on the
/// side of `x`, shifted along `(a + k c, b + k d)` until `gcd(a, D) = 1`.
/// When `x = c/d` both neighbours qualify and the one with the smaller final
/// `b` (then smaller `|a|`) wins. If the required shift exceeds `C` the
/// proof's bound no longer applies and the smallest valid `b` is found by
/// direct search instead.
pub fn coprime_approx(x: &Rational, modulus: u64, constant: u64) -> Result<ApproxResult, NumError> {
    if modulus == 0 {
        return Err(NumError::ZeroModulus);
    }
    if constant == 0 {
        return Err(NumError::ZeroBound);
    }
    let k_bound = 2 * (1 + constant);
    let (c, d) = dirichlet_approx(x, k_bound)?;
    if d.is_one() {
        return Ok(ApproxResult::Integral(c));
    }

    let center = Rational::new(c.clone(), d.clone());
    let mut best: Option<(BigInt, BigInt)> = None;
    for sign in [1i64, -1] {
        let side_ok = match x.cmp(&center) {
            std::cmp::Ordering::Greater => sign == 1,
            std::cmp::Ordering::Less => sign == -1,
            std::cmp::Ordering::Equal => true,
        };
        if !side_ok {
            continue;
        }
        let s = BigInt::from(sign);
        // a d - b c = s  =>  b = -s c^{-1} mod d, with 0 < b < d.
        let c_inv = mod_inverse(&c, &d).expect("convergents are reduced");
        let b = (-&s * c_inv).mod_floor(&d);
        debug_assert!(!b.is_zero());
        let a = (&s + &b * &c) / &d;
        debug_assert_eq!(&a * &d - &b * &c, s);

        // Minimal k >= 0 with gcd(a + k c, D) = 1, via the positive shift of (a - c, c).
        let k = jacobsthal_shift(&(&a - &c), &c, modulus)? - 1;
        if k > constant {
            continue;
        }
        let kk = BigInt::from(k);
        let cand = (&a + &kk * &c, &b + &kk * &d);
        best = Some(match best {
            None => cand,
            Some(prev) => {
                if (&cand.1, cand.0.abs()) < (&prev.1, prev.0.abs()) {
                    cand
                } else {
                    prev
                }
            }
        });
    }
    if let Some((a, b)) = best {
        return Ok(ApproxResult::Fraction { a, b });
    }
    fallback_search(x, modulus, constant)
}

fn fallback_search(x: &Rational, modulus: u64, constant: u64) -> Result<ApproxResult, NumError> {
    let half = rat(1, 2);
    let b_max = 2 * (1 + constant) * (1 + constant);
    let dm = BigInt::from(modulus);
    for b in 1..=b_max {
        let bb = BigInt::from(b);
        let bx = Rational::from_integer(bb.clone()) * x;
        let mut options = vec![bx.floor().to_integer(), bx.ceil().to_integer()];
        options.dedup();
        options.sort_by_key(|a| a.abs());
        for a in options {
            let err = (&bx - Rational::from_integer(a.clone())).abs();
            if err <= half && a.gcd(&(&bb * &dm)).is_one() {
                return Ok(ApproxResult::Fraction { a, b: bb });
            }
        }
    }
    Err(NumError::NoApproximation {
        x: x.clone(),
        modulus,
        constant,
    })
}

/// Inverse of `a` modulo `m > 1`, in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn brute_jacobsthal(a: i64, b: i64, d: u64) -> u64 {
        (1..).find(|k| (a + *k as i64 * b).gcd(&(d as i64)) == 1).unwrap() as u64
    }

    #[test]
    fn jacobsthal_examples() {
        assert_eq!(jacobsthal_shift(&bi(1), &bi(0), 15).unwrap(), 1);
        assert_eq!(jacobsthal_shift(&bi(3), &bi(2), 10).unwrap(), 2);
        assert_eq!(jacobsthal_shift(&bi(2), &bi(1), 6).unwrap(), 3);
        assert_eq!(brute_jacobsthal(2, 1, 6), 3);
    }

    #[test]
    fn jacobsthal_rejects_common_factor() {
        assert!(matches!(
            jacobsthal_shift(&bi(4), &bi(6), 7),
            Err(NumError::NotCoprime { .. })
        ));
        assert!(jacobsthal_shift(&bi(0), &bi(0), 7).is_err());
        assert_eq!(jacobsthal_shift(&bi(1), &bi(1), 0), Err(NumError::ZeroModulus));
    }

    #[test]
    fn jacobsthal_handles_negative_inputs() {
        for (a, b, d) in [(-7, 3, 30), (5, -4, 210), (-1, -1, 6)] {
            assert_eq!(jacobsthal_shift(&bi(a), &bi(b), d).unwrap(), brute_jacobsthal(a, b, d));
        }
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(&rat(0, 1), 7).unwrap(), (bi(0), bi(1)));
        assert_eq!(dirichlet_approx(&rat(1, 3), 4).unwrap(), (bi(1), bi(3)));
        assert_eq!(dirichlet_approx(&rat(5, 7), 3).unwrap(), (bi(1), bi(1)));
        assert_eq!(dirichlet_approx(&rat(1, 2), 0), Err(NumError::ZeroBound));
    }

    #[test]
    fn convergents_of_negative_rational() {
        let cs = convergents(&rat(-7, 5));
        assert_eq!(cs.first().unwrap(), &(bi(-2), bi(1)));
        assert_eq!(cs.last().unwrap(), &(bi(-7), bi(5)));
    }

    #[test]
    fn coprime_examples() {
        assert_eq!(coprime_approx(&rat(0, 1), 100, 5).unwrap(), ApproxResult::Integral(bi(0)));
        assert_eq!(
            coprime_approx(&rat(1, 2), 3, 1).unwrap(),
            ApproxResult::Fraction { a: bi(1), b: bi(1) }
        );
        assert_eq!(
            coprime_approx(&rat(1, 3), 2, 1).unwrap(),
            ApproxResult::Fraction { a: bi(1), b: bi(2) }
        );
    }

    #[test]
    fn coprime_fallback_path() {
        // The proof route needs a shift of 3 > C here; direct search finds b = 3.
        let x = rat(-7928, 4539);
        let r = coprime_approx(&x, 784, 1).unwrap();
        match r {
            ApproxResult::Fraction { a, b } => {
                assert!(b <= bi(8));
                assert!(a.gcd(&(&b * bi(784))).is_one());
                let err = (Rational::from_integer(b) * &x - Rational::from_integer(a)).abs();
                assert!(err <= rat(1, 2));
            }
            ApproxResult::Integral(_) => panic!("x is far from an integer"),
        }
    }

    #[test]
    fn default_constant_values() {
        assert_eq!(default_constant(1), 2);
        assert_eq!(default_constant(12), 3);
        assert_eq!(default_constant(300), 6);
    }
}
