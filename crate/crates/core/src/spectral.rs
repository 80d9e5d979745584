//! Eigendata of `(l+1)`-regular multigraphs, Hecke and non-backtracking
//! walk identities, density and fourth-moment statistics, and diameter
//! certificates.
//!
//! Eigenvectors are normalised so that `sum_x f_j(x)^2 = n` and `f_0 = 1`,
//! which gives `B(l^t) = (1/n) sum_j lambda_j(l^t) f_j f_j^T`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Off-diagonal threshold of the Jacobi sweeps, relative to the Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-14;
/// Relative margin of the exact certificate.
pub const EXACT_MARGIN: f64 = 1e-6;
/// Largest `t` a certificate search will try.
pub const MAX_CERT_T: usize = 256;

pub type IntMatrix = Vec<Vec<i128>>;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("row {0} does not sum to l + 1")]
    NotRegular(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("eigensolver residual {0:e} exceeds tolerance")]
    NotConverged(f64),
    #[error("integer overflow at t = {0}")]
    Overflow(usize),
    #[error("t must be at least 1")]
    ZeroLength,
    #[error("no certificate found for t <= {0}")]
    NoCertificate(usize),
}

/// Eigenvalues in decreasing order with eigenvectors `f_j` normalised to `sum f_j^2 = n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumBundle {
    pub n: usize,
    pub ell: u64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Non-backtracking walk counts `K_t(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCounts {
    pub t: usize,
    pub k: IntMatrix,
}

fn validate(a: &[Vec<u64>], ell: u64) -> Result<usize, SpectralError> {
    let n = a.len();
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(SpectralError::NotSquare);
        }
        for k in 0..i {
            if row[k] != a[k][i] {
                return Err(SpectralError::Asymmetric(i, k));
            }
        }
        if row.iter().sum::<u64>() != ell + 1 {
            return Err(SpectralError::NotRegular(i));
        }
    }
    Ok(n)
}

/// Cyclic Jacobi on a dense symmetric matrix. Returns eigenvalues and the
/// eigenvector matrix (columns, row-major `n x n`).
pub fn jacobi_eigen(m: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = m.len();
    let mut a: Vec<f64> = m.iter().flat_map(|r| r.iter().copied()).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off.sqrt() <= JACOBI_TOL * norm.max(1.0) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        let np = c * akp - s * akq;
                        let nq = s * akp + c * akq;
                        a[k * n + p] = np;
                        a[p * n + k] = np;
                        a[k * n + q] = nq;
                        a[q * n + k] = nq;
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

pub fn eigendecompose(a: &[Vec<u64>], ell: u64) -> Result<SpectrumBundle, SpectralError> {
    let n = validate(a, ell)?;
    if diameter_bfs(a).is_err() {
        return Err(SpectralError::Disconnected);
    }
    let m: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let (vals, vecs) = jacobi_eigen(&m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let scale = (n as f64).sqrt();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        let mut f: Vec<f64> = (0..n).map(|x| vecs[x * n + j] * scale).collect();
        if rank == 0 {
            // Connected and regular: the top eigenspace is the constants.
            f = vec![1.0; n];
        } else if let Some(first) = f.iter().find(|x| x.abs() > 1e-8) {
            if *first < 0.0 {
                f.iter_mut().for_each(|x| *x = -*x);
            }
        }
        eigenvalues.push(if rank == 0 { (ell + 1) as f64 } else { vals[j] });
        eigenvectors.push(f);
    }
    let spec = SpectrumBundle {
        n,
        ell,
        eigenvalues,
        eigenvectors,
    };
    let residual = spec.max_residual(a);
    if residual > 1e-8 * (ell + 1) as f64 * scale {
        return Err(SpectralError::NotConverged(residual));
    }
    Ok(spec)
}

impl SpectrumBundle {
    /// `max_j ||A f_j - lambda_j f_j||_2`.
    pub fn max_residual(&self, a: &[Vec<u64>]) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&l, f)| {
                a.iter()
                    .zip(f)
                    .map(|(row, &fx)| {
                        let af: f64 = row.iter().zip(f).map(|(&ax, &fy)| ax as f64 * fy).sum();
                        (af - l * fx).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{i != j} |<f_i, f_j>| / n`.
    pub fn max_orthogonality_defect(&self) -> f64 {
        let n = self.n as f64;
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let dot: f64 = self.eigenvectors[i].iter().zip(&self.eigenvectors[j]).map(|(a, b)| a * b).sum();
                worst = worst.max((dot / n).abs());
            }
        }
        worst
    }

    /// `(1/n) sum_j c_j f_j(x) f_j(y)`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut out = vec![vec![0.0; n]; n];
        for (c, f) in coeffs.iter().zip(&self.eigenvectors) {
            for x in 0..n {
                let cf = c * f[x] / n as f64;
                for y in 0..n {
                    out[x][y] += cf * f[y];
                }
            }
        }
        out
    }

    /// `lambda_j(l^t)` for every `j`.
    pub fn hecke_eigenvalues(&self, t: usize) -> Vec<f64> {
        self.eigenvalues.iter().map(|&l| hecke_power(l, self.ell, t)).collect()
    }

    /// `max_{j != 0} |lambda_j|`.
    pub fn max_nontrivial(&self) -> f64 {
        self.eigenvalues.iter().skip(1).fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// `lambda(l^t)` from `lambda(1) = 1`, `lambda(l) = lambda` and
/// `lambda(l^{t+1}) = lambda lambda(l^t) - l lambda(l^{t-1})`.
pub fn hecke_power(lambda: f64, ell: u64, t: usize) -> f64 {
    let l = ell as f64;
    let (mut prev, mut cur) = (1.0, lambda);
    if t == 0 {
        return 1.0;
    }
    for _ in 1..t {
        let next = lambda * cur - l * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact integer version of [`hecke_power`].
pub fn hecke_power_int(lambda: i128, ell: u64, t: usize) -> Option<i128> {
    let l = ell as i128;
    if t == 0 {
        return Some(1);
    }
    let (mut prev, mut cur) = (1i128, lambda);
    for _ in 1..t {
        let next = lambda.checked_mul(cur)?.checked_sub(l.checked_mul(prev)?)?;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// `(l^{t+1} - 1) / (l - 1)`.
pub fn trivial_hecke_eigenvalue(ell: u64, t: usize) -> Option<i128> {
    let l = ell as i128;
    let mut acc: i128 = 0;
    let mut pw: i128 = 1;
    for _ in 0..=t {
        acc = acc.checked_add(pw)?;
        pw = pw.checked_mul(l)?;
    }
    Some(acc)
}

fn sparse(a: &[Vec<u64>]) -> Vec<Vec<(usize, i128)>> {
    a.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(y, &x)| (y, x as i128))
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|k| i128::from(i == k)).collect()).collect()
}

/// `m A - c prev`, with `A` sparse.
fn step(m: &IntMatrix, a: &[Vec<(usize, i128)>], c: i128, prev: &IntMatrix, t: usize) -> Result<IntMatrix, SpectralError> {
    let n = m.len();
    let ovf = || SpectralError::Overflow(t);
    let mut out = vec![vec![0i128; n]; n];
    for x in 0..n {
        for (z, row) in a.iter().enumerate() {
            let mxz = m[x][z];
            if mxz == 0 {
                continue;
            }
            for &(y, azy) in row {
                out[x][y] = out[x][y].checked_add(mxz.checked_mul(azy).ok_or_else(ovf)?).ok_or_else(ovf)?;
            }
        }
        for y in 0..n {
            out[x][y] = out[x][y]
                .checked_sub(c.checked_mul(prev[x][y]).ok_or_else(ovf)?)
                .ok_or_else(ovf)?;
        }
    }
    Ok(out)
}

/// `B(l^0), ..., B(l^t)` by `B(l^{s+1}) = B(l^s) A - l B(l^{s-1})`.
pub fn brandt_powers(a: &[Vec<u64>], ell: u64, t: usize) -> Result<Vec<IntMatrix>, SpectralError> {
    let n = a.len();
    let sp = sparse(a);
    let mut out = vec![identity(n)];
    if t >= 1 {
        out.push(a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
    }
    for s in 2..=t {
        let next = step(&out[s - 1], &sp, ell as i128, &out[s - 2], s)?;
        out.push(next);
    }
    Ok(out)
}

pub fn brandt_power(a: &[Vec<u64>], ell: u64, t: usize) -> Result<IntMatrix, SpectralError> {
    Ok(brandt_powers(a, ell, t)?.pop().expect("at least B(1)"))
}

/// `K_0, ..., K_t` with `K_0 = I`, `K_1 = A`, `K_2 = A^2 - (l+1) I` and
/// `K_{s+1} = K_s A - l K_{s-1}` for `s >= 2`.
pub fn nonbacktracking_sequence(a: &[Vec<u64>], ell: u64, t: usize) -> Result<Vec<IntMatrix>, SpectralError> {
    let n = a.len();
    let sp = sparse(a);
    let mut out = vec![identity(n)];
    if t >= 1 {
        out.push(a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
    }
    if t >= 2 {
        let k2 = step(&out[1], &sp, ell as i128 + 1, &out[0], 2)?;
        out.push(k2);
    }
    for s in 3..=t {
        let next = step(&out[s - 1], &sp, ell as i128, &out[s - 2], s)?;
        out.push(next);
    }
    Ok(out)
}

pub fn nonbacktracking(a: &[Vec<u64>], ell: u64, t: usize) -> Result<WalkCounts, SpectralError> {
    if t == 0 {
        return Err(SpectralError::ZeroLength);
    }
    let k = nonbacktracking_sequence(a, ell, t)?.pop().expect("t >= 1");
    Ok(WalkCounts { t, k })
}

/// `sum_{0 <= i <= t/2} K_{t-2i}` from a precomputed sequence.
pub fn walk_sum(seq: &[IntMatrix], t: usize) -> IntMatrix {
    let n = seq[0].len();
    let mut out = vec![vec![0i128; n]; n];
    let mut s = t as isize;
    while s >= 0 {
        for x in 0..n {
            for y in 0..n {
                out[x][y] += seq[s as usize][x][y];
            }
        }
        s -= 2;
    }
    out
}

/// Second moment of the nontrivial `lambda_j(l^t)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DensityReport {
    pub t: usize,
    /// `sum_{j != 0} lambda_j(l^t)^2`.
    pub sum: f64,
    /// `sum / (p + l^{t/2})`.
    pub ratio: f64,
    /// Same with `lambda_j(l^t)` divided by `l^{t/2}`.
    pub normalized_sum: f64,
    pub normalized_ratio: f64,
}

pub fn density_sum(spec: &SpectrumBundle, p: u64, t: usize) -> DensityReport {
    let half = (spec.ell as f64).powf(t as f64 / 2.0);
    let sum: f64 = spec.hecke_eigenvalues(t).iter().skip(1).map(|l| l * l).sum();
    let normalized_sum = sum / (half * half);
    let denom = p as f64 + half;
    DensityReport {
        t,
        sum,
        ratio: sum / denom,
        normalized_sum,
        normalized_ratio: normalized_sum / denom,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FourthMoment {
    /// `sup_{x,y} sum_{j != 0} (f_j(x)^2 - f_j(y)^2)^2`.
    pub sup: f64,
    pub ratio: f64,
}

pub fn fourth_moment(spec: &SpectrumBundle, p: u64) -> FourthMoment {
    let n = spec.n;
    let sq: Vec<Vec<f64>> = spec.eigenvectors.iter().skip(1).map(|f| f.iter().map(|v| v * v).collect()).collect();
    let mut sup: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            let s: f64 = sq.iter().map(|f| (f[x] - f[y]).powi(2)).sum();
            sup = sup.max(s);
        }
    }
    FourthMoment {
        sup,
        ratio: sup / p as f64,
    }
}

/// Eccentricity of `src` on the positive-entry support.
pub fn bfs_distances(a: &[Vec<u64>], src: usize) -> Vec<Option<usize>> {
    let n = a.len();
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].expect("queued vertices are reached");
        for y in 0..n {
            if a[x][y] > 0 && dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

pub fn diameter_bfs(a: &[Vec<u64>]) -> Result<usize, SpectralError> {
    if a.is_empty() {
        return Err(SpectralError::Empty);
    }
    let mut diam = 0;
    for src in 0..a.len() {
        for d in bfs_distances(a, src) {
            diam = diam.max(d.ok_or(SpectralError::Disconnected)?);
        }
    }
    Ok(diam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    Exact,
    PaperChain,
    Ramanujan,
}

impl std::str::FromStr for CertMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "paper-chain" => Ok(Self::PaperChain),
            "ramanujan" => Ok(Self::Ramanujan),
            _ => Err(format!("unknown method {s:?}; expected exact, paper-chain or ramanujan")),
        }
    }
}

/// One row of a certificate trace: the main term against the error bound at `t`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertStep {
    pub t: usize,
    pub main: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiameterCertificate {
    pub method: CertMethod,
    pub t_star: usize,
    pub fourth_moment_sup: Option<f64>,
    pub trace: Vec<CertStep>,
}

/// Smallest `t` at which the chosen bound forces `B(l^t)(x, y) > 0` for all `x, y`.
///
/// * `exact`: `min_{x,y} sum_j lambda_j(l^t) f_j(x) f_j(y) > 1e-6 lambda_0(l^t)`.
/// * `paper-chain`: `lambda_0 > S1 + sqrt(S2) sqrt(M4)` with `S1 = sum_{j!=0} |lambda_j(l^t)|`,
///   `S2 = sum_{j!=0} lambda_j(l^t)^2` and `M4` the fourth-moment sup. Uses only
///   the computed eigenvalues.
/// * `ramanujan`: `lambda_0 > (n-1) (t+1) l^{t/2}`, valid whenever every
///   `|lambda_j| <= 2 sqrt(l)`.
pub fn certify_diameter(spec: &SpectrumBundle, method: CertMethod) -> Result<DiameterCertificate, SpectralError> {
    let n = spec.n;
    let ell = spec.ell as f64;
    let m4 = match method {
        CertMethod::PaperChain => Some(fourth_moment(spec, 1).sup),
        _ => None,
    };
    let mut trace = Vec::new();
    for t in 0..=MAX_CERT_T {
        let lams = spec.hecke_eigenvalues(t);
        let main = lams[0];
        let (lhs, bound) = match method {
            CertMethod::Exact => {
                let mut worst = f64::INFINITY;
                for x in 0..n {
                    for y in x..n {
                        let s: f64 = lams
                            .iter()
                            .zip(&spec.eigenvectors)
                            .map(|(l, f)| l * f[x] * f[y])
                            .sum();
                        worst = worst.min(s);
                    }
                }
                (worst, EXACT_MARGIN * main)
            }
            CertMethod::PaperChain => {
                let s1: f64 = lams.iter().skip(1).map(|l| l.abs()).sum();
                let s2: f64 = lams.iter().skip(1).map(|l| l * l).sum();
                let b = s1 + s2.sqrt() * m4.expect("computed above").sqrt();
                (main, b * (1.0 + 1e-9) + 1e-9)
            }
            CertMethod::Ramanujan => {
                let b = (n - 1) as f64 * (t + 1) as f64 * ell.powf(t as f64 / 2.0);
                (main, b)
            }
        };
        let holds = lhs > bound;
        trace.push(CertStep {
            t,
            main: lhs,
            bound,
            holds,
        });
        if holds {
            return Ok(DiameterCertificate {
                method,
                t_star: t,
                fourth_moment_sup: m4,
                trace,
            });
        }
    }
    Err(SpectralError::NoCertificate(MAX_CERT_T))
}
