//! Supersingular `l`-isogeny graphs over `F_{p^2}` for `p = 1 mod 12`.
//!
//! Vertices are supersingular j-invariants; `A[x][y]` counts the roots `y`
//! of `Phi_l(x, Y)` with multiplicity. Starting from an `F_p`-rational seed
//! found by point counting, the vertex set is the BFS closure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this prime roots are found by evaluating at every field element.
pub const EXHAUSTIVE_ROOT_LIMIT: u64 = 300;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} must be at least 5")]
    TooSmall(u64),
    #[error("p = {0} is not 1 mod 12")]
    NotOneMod12(u64),
    #[error("unsupported l = {0}; supported: 2, 3")]
    UnsupportedEll(u64),
    #[error("l must differ from p")]
    EllEqualsP,
    #[error("j = {0:?} has {1} roots in F_p^2 instead of l + 1")]
    NotSupersingular(Fp2Elem, usize),
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn legendre(a: u64, p: u64) -> i64 {
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// An element `u + v t` of `F_{p^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fp2Elem {
    pub u: u64,
    pub v: u64,
}

/// The field `F_p[t]/(t^2 - s)` with `s` the smallest quadratic non-residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fp2 {
    p: u64,
    s: u64,
}

impl Fp2 {
    pub fn new(p: u64) -> Result<Self, GraphError> {
        if !is_prime(p) {
            return Err(GraphError::NotPrime(p));
        }
        if p < 5 {
            return Err(GraphError::TooSmall(p));
        }
        let s = (2..p).find(|&s| legendre(s, p) == -1).expect("odd primes have non-residues");
        Ok(Self { p, s })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nonresidue(&self) -> u64 {
        self.s
    }

    pub fn elem(&self, u: u64, v: u64) -> Fp2Elem {
        Fp2Elem {
            u: u % self.p,
            v: v % self.p,
        }
    }

    pub fn zero(&self) -> Fp2Elem {
        Fp2Elem { u: 0, v: 0 }
    }

    pub fn one(&self) -> Fp2Elem {
        Fp2Elem { u: 1, v: 0 }
    }

    pub fn from_i128(&self, n: i128) -> Fp2Elem {
        let p = self.p as i128;
        Fp2Elem {
            u: n.rem_euclid(p) as u64,
            v: 0,
        }
    }

    pub fn add(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            u: (x.u + y.u) % self.p,
            v: (x.v + y.v) % self.p,
        }
    }

    pub fn neg(&self, x: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            u: (self.p - x.u) % self.p,
            v: (self.p - x.v) % self.p,
        }
    }

    pub fn sub(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        let p = self.p;
        let vv = mul_mod(mul_mod(x.v, y.v, p), self.s, p);
        Fp2Elem {
            u: (mul_mod(x.u, y.u, p) + vv) % p,
            v: (mul_mod(x.u, y.v, p) + mul_mod(x.v, y.u, p)) % p,
        }
    }

    pub fn pow(&self, mut x: Fp2Elem, mut e: u128) -> Fp2Elem {
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        r
    }

    /// Frobenius `x -> x^p`, i.e. `u + v t -> u - v t`.
    pub fn conj(&self, x: Fp2Elem) -> Fp2Elem {
        Fp2Elem {
            u: x.u,
            v: (self.p - x.v) % self.p,
        }
    }

    pub fn norm(&self, x: Fp2Elem) -> u64 {
        let p = self.p;
        let uu = mul_mod(x.u, x.u, p);
        let svv = mul_mod(self.s, mul_mod(x.v, x.v, p), p);
        (uu + p - svv) % p
    }

    pub fn inv(&self, x: Fp2Elem) -> Option<Fp2Elem> {
        let n = self.norm(x);
        if n == 0 {
            return None;
        }
        let ni = pow_mod(n, self.p - 2, self.p);
        let c = self.conj(x);
        Some(Fp2Elem {
            u: mul_mod(c.u, ni, self.p),
            v: mul_mod(c.v, ni, self.p),
        })
    }

    pub fn is_zero(&self, x: Fp2Elem) -> bool {
        x.u == 0 && x.v == 0
    }

    /// Field order `p^2`.
    pub fn order(&self) -> u128 {
        self.p as u128 * self.p as u128
    }

    /// All `p^2` elements, in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Fp2Elem> + '_ {
        (0..self.p).flat_map(move |u| (0..self.p).map(move |v| Fp2Elem { u, v }))
    }
}

/// Dense univariate polynomials over `F_{p^2}`, lowest degree first.
pub mod poly {
    use super::{Fp2, Fp2Elem};
    use rand::Rng;

    pub type Poly = Vec<Fp2Elem>;

    pub fn trim(f: &mut Poly) {
        while f.last().is_some_and(|c| c.u == 0 && c.v == 0) {
            f.pop();
        }
    }

    pub fn degree(f: &Poly) -> Option<usize> {
        f.len().checked_sub(1)
    }

    pub fn eval(k: &Fp2, f: &Poly, x: Fp2Elem) -> Fp2Elem {
        f.iter().rev().fold(k.zero(), |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn sub(k: &Fp2, f: &Poly, g: &Poly) -> Poly {
        let n = f.len().max(g.len());
        let mut out: Poly = (0..n)
            .map(|i| {
                let a = f.get(i).copied().unwrap_or(k.zero());
                let b = g.get(i).copied().unwrap_or(k.zero());
                k.sub(a, b)
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(k: &Fp2, f: &Poly, g: &Poly) -> Poly {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![k.zero(); f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, &b) in g.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `g` must be nonzero.
    pub fn divmod(k: &Fp2, f: &Poly, g: &Poly) -> (Poly, Poly) {
        let dg = degree(g).expect("nonzero divisor");
        let lead_inv = k.inv(g[dg]).expect("nonzero leading coefficient");
        let mut r = f.clone();
        trim(&mut r);
        if r.len() <= dg {
            return (Vec::new(), r);
        }
        let mut q = vec![k.zero(); r.len() - dg];
        while r.len() > dg {
            let dr = r.len() - 1;
            let c = k.mul(r[dr], lead_inv);
            q[dr - dg] = c;
            for (i, &b) in g.iter().enumerate() {
                let idx = dr - dg + i;
                r[idx] = k.sub(r[idx], k.mul(c, b));
            }
            r.pop();
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(k: &Fp2, f: &Poly, g: &Poly) -> Poly {
        divmod(k, f, g).1
    }

    pub fn monic(k: &Fp2, f: &Poly) -> Poly {
        match f.last() {
            None => Vec::new(),
            Some(&l) => {
                let li = k.inv(l).expect("nonzero");
                f.iter().map(|&c| k.mul(c, li)).collect()
            }
        }
    }

    pub fn gcd(k: &Fp2, f: &Poly, g: &Poly) -> Poly {
        let mut a = f.clone();
        let mut b = g.clone();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(k, &a, &b);
            a = b;
            b = r;
        }
        monic(k, &a)
    }

    pub fn pow_mod(k: &Fp2, base: &Poly, mut e: u128, m: &Poly) -> Poly {
        let mut result = vec![k.one()];
        let mut b = rem(k, base, m);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(k, &mul(k, &result, &b), m);
            }
            b = rem(k, &mul(k, &b, &b), m);
            e >>= 1;
        }
        result
    }

    /// Distinct roots of `f` in `F_{p^2}` by `gcd(f, Y^q - Y)` and equal-degree splitting.
    pub fn distinct_roots<R: Rng>(k: &Fp2, f: &Poly, rng: &mut R) -> Vec<Fp2Elem> {
        let y = vec![k.zero(), k.one()];
        let yq = pow_mod(k, &y, k.order(), f);
        let g = gcd(k, f, &sub(k, &yq, &y));
        let mut out = Vec::new();
        split(k, &g, rng, &mut out);
        out.sort();
        out
    }

    fn split<R: Rng>(k: &Fp2, g: &Poly, rng: &mut R, out: &mut Vec<Fp2Elem>) {
        match degree(g) {
            None | Some(0) => {}
            Some(1) => out.push(k.neg(k.mul(g[0], k.inv(g[1]).expect("monic")))),
            Some(d) => loop {
                let alpha = k.elem(rng.gen_range(0..k.p()), rng.gen_range(0..k.p()));
                let shifted = vec![alpha, k.one()];
                let h = pow_mod(k, &shifted, (k.order() - 1) / 2, g);
                let h = sub(k, &h, &vec![k.one()]);
                let f1 = gcd(k, &h, g);
                let d1 = degree(&f1).unwrap_or(0);
                if d1 > 0 && d1 < d {
                    let f2 = divmod(k, g, &f1).0;
                    split(k, &f1, rng, out);
                    split(k, &f2, rng, out);
                    return;
                }
            },
        }
    }

    /// Distinct roots by evaluating at every element.
    pub fn distinct_roots_exhaustive(k: &Fp2, f: &Poly) -> Vec<Fp2Elem> {
        k.elements().filter(|&x| k.is_zero(eval(k, f, x))).collect()
    }

    pub fn multiplicity(k: &Fp2, f: &Poly, r: Fp2Elem) -> usize {
        let lin = vec![k.neg(r), k.one()];
        let mut g = f.clone();
        let mut m = 0;
        loop {
            let (q, rm) = divmod(k, &g, &lin);
            if !rm.is_empty() {
                return m;
            }
            g = q;
            m += 1;
        }
    }
}

/// Classical modular polynomial `Phi_l(X, Y)` as a list of `(i, k, coefficient)` for `X^i Y^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPoly {
    pub ell: u64,
    pub terms: Vec<(usize, usize, i128)>,
}

const PHI2: &[(usize, usize, i128)] = &[
    (3, 0, 1),
    (2, 2, -1),
    (2, 1, 1488),
    (2, 0, -162_000),
    (1, 1, 40_773_375),
    (1, 0, 8_748_000_000),
    (0, 0, -157_464_000_000_000),
];

const PHI3: &[(usize, usize, i128)] = &[
    (4, 0, 1),
    (3, 3, -1),
    (3, 2, 2232),
    (3, 1, -1_069_956),
    (3, 0, 36_864_000),
    (2, 2, 2_587_918_086),
    (2, 1, 8_900_222_976_000),
    (2, 0, 452_984_832_000_000),
    (1, 1, -770_845_966_336_000_000),
    (1, 0, 1_855_425_871_872_000_000_000),
];

pub fn modular_poly(ell: u64) -> Result<ModularPoly, GraphError> {
    let half = match ell {
        2 => PHI2,
        3 => PHI3,
        _ => return Err(GraphError::UnsupportedEll(ell)),
    };
    // Listed with i >= k; mirror the off-diagonal terms.
    let mut map = BTreeMap::new();
    for &(i, k, c) in half {
        map.insert((i, k), c);
        map.insert((k, i), c);
    }
    Ok(ModularPoly {
        ell,
        terms: map.into_iter().map(|((i, k), c)| (i, k, c)).collect(),
    })
}

impl ModularPoly {
    pub fn coeff(&self, i: usize, k: usize) -> i128 {
        self.terms
            .iter()
            .find(|t| t.0 == i && t.1 == k)
            .map_or(0, |t| t.2)
    }

    pub fn degrees(&self) -> (usize, usize) {
        let dx = self.terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = self.terms.iter().map(|t| t.1).max().unwrap_or(0);
        (dx, dy)
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|&(i, k, c)| self.coeff(k, i) == c)
    }

    /// `Phi_l = (X^l - Y)(X - Y^l) mod l`.
    pub fn kronecker_check(&self) -> bool {
        let l = self.ell as usize;
        let expected = [(l + 1, 0, 1i128), (l, l, -1), (1, 1, -1), (0, l + 1, 1)];
        let m = self.ell as i128;
        let dx = self.degrees().0;
        (0..=dx).all(|i| {
            (0..=dx).all(|k| {
                let want = expected.iter().find(|e| e.0 == i && e.1 == k).map_or(0, |e| e.2);
                (self.coeff(i, k) - want).rem_euclid(m) == 0
            })
        })
    }

    /// `Phi_l(x, Y)` as a polynomial in `Y` over `F_{p^2}`.
    pub fn specialize(&self, k: &Fp2, x: Fp2Elem) -> poly::Poly {
        let dy = self.degrees().1;
        let mut out = vec![k.zero(); dy + 1];
        for &(i, e, c) in &self.terms {
            let term = k.mul(k.from_i128(c), k.pow(x, i as u128));
            out[e] = k.add(out[e], term);
        }
        poly::trim(&mut out);
        out
    }

    pub fn eval(&self, k: &Fp2, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        poly::eval(k, &self.specialize(k, x), y)
    }
}

/// Trace of Frobenius `a` of the curve with j-invariant `j`, so `#E(F_p) = p + 1 - a`.
pub fn frobenius_trace(j: u64, p: u64) -> i64 {
    let j = j % p;
    let (a, b) = if j == 0 {
        (0, 1)
    } else if j == 1728 % p {
        (1, 0)
    } else {
        let k = mul_mod(j, pow_mod((1728 + p - j) % p, p - 2, p), p);
        (mul_mod(3, k, p), mul_mod(2, k, p))
    };
    let mut table = vec![0i8; p as usize];
    for x in 1..p {
        table[mul_mod(x, x, p) as usize] = 1;
    }
    let mut s = 0i64;
    for x in 0..p {
        let rhs = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(a, x, p) + b) % p;
        if rhs != 0 {
            s += if table[rhs as usize] == 1 { 1 } else { -1 };
        }
    }
    -s
}

/// Every `j in F_p` whose curve has exactly `p + 1` points.
pub fn supersingular_fp(p: u64) -> Vec<u64> {
    (0..p).filter(|&j| frobenius_trace(j, p) == 0).collect()
}

/// First `j in F_p` with `#E(F_p) = p + 1`.
pub fn supersingular_seed(p: u64) -> Result<u64, GraphError> {
    check_prime(p)?;
    Ok((0..p)
        .find(|&j| frobenius_trace(j, p) == 0)
        .expect("an F_p-rational supersingular j always exists"))
}

fn check_prime(p: u64) -> Result<(), GraphError> {
    if !is_prime(p) {
        return Err(GraphError::NotPrime(p));
    }
    if p < 5 {
        return Err(GraphError::TooSmall(p));
    }
    if p % 12 != 1 {
        return Err(GraphError::NotOneMod12(p));
    }
    Ok(())
}

/// The supersingular `l`-isogeny graph with adjacency counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSGraph {
    pub p: u64,
    pub ell: u64,
    /// Sorted lexicographically by `(u, v)`.
    pub vertices: Vec<Fp2Elem>,
    pub adjacency: Vec<Vec<u64>>,
}

/// Roots of `f` with multiplicity.
pub fn roots_with_multiplicity(k: &Fp2, f: &poly::Poly, rng: &mut ChaCha8Rng) -> Vec<(Fp2Elem, usize)> {
    let distinct = if k.p() <= EXHAUSTIVE_ROOT_LIMIT {
        poly::distinct_roots_exhaustive(k, f)
    } else {
        poly::distinct_roots(k, f, rng)
    };
    distinct
        .into_iter()
        .map(|r| (r, poly::multiplicity(k, f, r)))
        .collect()
}

pub fn build_graph(p: u64, ell: u64) -> Result<SSGraph, GraphError> {
    check_prime(p)?;
    let seed = supersingular_seed(p)?;
    build_graph_from(p, ell, Fp2Elem { u: seed, v: 0 })
}

/// BFS closure of `seed` under `l`-isogenies.
pub fn build_graph_from(p: u64, ell: u64, seed: Fp2Elem) -> Result<SSGraph, GraphError> {
    check_prime(p)?;
    if ell == p {
        return Err(GraphError::EllEqualsP);
    }
    let phi = modular_poly(ell)?;
    let k = Fp2::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ (ell << 32));

    let mut neighbours: BTreeMap<Fp2Elem, Vec<(Fp2Elem, usize)>> = BTreeMap::new();
    let mut queue = VecDeque::from([seed]);
    let mut seen = BTreeSet::from([seed]);
    while let Some(j) = queue.pop_front() {
        let f = phi.specialize(&k, j);
        let roots = roots_with_multiplicity(&k, &f, &mut rng);
        let total: usize = roots.iter().map(|r| r.1).sum();
        if total != ell as usize + 1 {
            return Err(GraphError::NotSupersingular(j, total));
        }
        for &(r, _) in &roots {
            if seen.insert(r) {
                queue.push_back(r);
            }
        }
        neighbours.insert(j, roots);
    }

    let vertices: Vec<Fp2Elem> = seen.into_iter().collect();
    let index: BTreeMap<Fp2Elem, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vertices.len();
    let mut adjacency = vec![vec![0u64; n]; n];
    for (j, roots) in &neighbours {
        for (r, m) in roots {
            adjacency[index[j]][index[r]] += *m as u64;
        }
    }
    let g = SSGraph {
        p,
        ell,
        vertices,
        adjacency,
    };
    g.check_invariants()?;
    Ok(g)
}

impl SSGraph {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let n = self.n();
        for (i, row) in self.adjacency.iter().enumerate() {
            if row.iter().sum::<u64>() != self.ell + 1 {
                return Err(GraphError::Invariant(format!("row {i} does not sum to l + 1")));
            }
            for k in 0..n {
                if row[k] != self.adjacency[k][i] {
                    return Err(GraphError::Invariant(format!("asymmetric at ({i}, {k})")));
                }
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Invariant("disconnected".into()));
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if self.adjacency[x][y] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Graphviz export; one undirected edge per unordered pair, labelled by multiplicity.
    pub fn to_dot(&self) -> String {
        let mut s = format!("graph G_{}_{} {{\n", self.p, self.ell);
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("  {i} [label=\"{}+{}t\"];\n", v.u, v.v));
        }
        for i in 0..self.n() {
            for k in i..self.n() {
                let m = self.adjacency[i][k];
                if m > 0 {
                    s.push_str(&format!("  {i} -- {k} [label=\"{m}\"];\n"));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Primes `p = 1 mod 12` with `p <= pmax`.
pub fn primes_one_mod_12(pmax: u64) -> Vec<u64> {
    (13..=pmax).step_by(12).filter(|&p| is_prime(p)).collect()
}

/// A random element of `F_{p^2}` from a seeded generator, for tests and benches.
pub fn random_elem<R: Rng>(k: &Fp2, rng: &mut R) -> Fp2Elem {
    k.elem(rng.gen_range(0..k.p()), rng.gen_range(0..k.p()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let k = Fp2::new(13).unwrap();
        assert_eq!(k.nonresidue(), 2);
        let t = k.elem(0, 1);
        assert_eq!(k.mul(t, t), k.elem(2, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_elem(&k, &mut rng);
            if let Some(xi) = k.inv(x) {
                assert_eq!(k.mul(x, xi), k.one());
            }
            assert_eq!(k.pow(x, 13), k.conj(x));
        }
        assert!(Fp2::new(15).is_err());
    }

    #[test]
    fn modular_polys_structure() {
        let p2 = modular_poly(2).unwrap();
        assert!(p2.is_symmetric());
        assert_eq!(p2.degrees(), (3, 3));
        assert!(p2.kronecker_check());
        let p3 = modular_poly(3).unwrap();
        assert!(p3.is_symmetric());
        assert_eq!(p3.degrees(), (4, 4));
        assert!(p3.kronecker_check());
        assert_eq!(modular_poly(5), Err(GraphError::UnsupportedEll(5)));
    }

    #[test]
    fn modular_polys_vanish_on_cm_pairs() {
        // j = 1728 and 287496 are 2-isogenous; 8000 and -3375 have 2-endomorphisms.
        let k = Fp2::new(1_000_003).unwrap();
        let e = |n: i128| k.from_i128(n);
        let p2 = modular_poly(2).unwrap();
        assert!(k.is_zero(p2.eval(&k, e(1728), e(287_496))));
        assert!(k.is_zero(p2.eval(&k, e(8000), e(8000))));
        assert!(k.is_zero(p2.eval(&k, e(-3375), e(-3375))));
        let p3 = modular_poly(3).unwrap();
        assert!(k.is_zero(p3.eval(&k, e(0), e(0))));
        assert!(k.is_zero(p3.eval(&k, e(8000), e(8000))));
        assert!(k.is_zero(p3.eval(&k, e(-32768), e(-32768))));
    }

    #[test]
    fn seeds() {
        assert_eq!(supersingular_seed(13).unwrap(), 5);
        assert_eq!(supersingular_fp(13), vec![5]);
        let j = supersingular_seed(37).unwrap();
        assert_eq!(frobenius_trace(j, 37), 0);
        assert_eq!(supersingular_seed(17), Err(GraphError::NotOneMod12(17)));
    }

    #[test]
    fn root_finders_agree() {
        let k = Fp2::new(61).unwrap();
        let phi = modular_poly(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = random_elem(&k, &mut rng);
            let f = phi.specialize(&k, x);
            assert_eq!(poly::distinct_roots(&k, &f, &mut rng), poly::distinct_roots_exhaustive(&k, &f));
        }
    }

    #[test]
    fn small_graphs() {
        let g = build_graph(13, 2).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.adjacency, vec![vec![3]]);
        let g = build_graph(37, 2).unwrap();
        assert_eq!(g.n(), 3);
        let g = build_graph(61, 2).unwrap();
        assert_eq!(g.n(), 5);
        let g = build_graph(61, 3).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.to_dot().starts_with("graph G_61_3 {"));
        assert_eq!(build_graph(61, 61), Err(GraphError::EllEqualsP));
    }
}
