//! `alk`: command-line front end for the alk-core library.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use alk_core::gamma0::{self, LatticeElement};
use alk_core::hyperbolic::UHPoint;
use alk_core::numutil::{self, ApproxResult, Rational};
use alk_core::quatlat::{self, format_rational};
use alk_core::spectral::{self, CertMethod};
use alk_core::ssgraph;
use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;
const DEFAULT_SEED: u64 = 0x5eed;

/// Exit status for computational failures such as an uncertified generating set.
const EXIT_COMPUTE: u8 = 3;
/// Exit status for invalid parameters.
const EXIT_INVALID: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "alk", version, about = "Ford domains, isogeny graph spectra and quaternion unit lattices")]
struct Cli {
    /// Seed for every randomised step; recorded in the output.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Congruence subgroups Gamma_0(Q).
    #[command(subcommand)]
    Gamma0(Gamma0Cmd),
    /// Supersingular isogeny graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Quaternion unit lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Direct access to the approximation lemmas.
    #[command(subcommand)]
    Approx(ApproxCmd),
}

#[derive(Subcommand, Debug)]
enum Gamma0Cmd {
    /// Side-pairing generators with Frobenius norms, certified by reduction.
    Gens {
        #[arg(long)]
        level: u64,
        /// Random elements reduced to certify the set.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Certify generation for every level in a range.
    Certify {
        /// Single level; shorthand for `--qmin Q --qmax Q`.
        #[arg(long, conflicts_with_all = ["qmin", "qmax"])]
        level: Option<u64>,
        #[arg(long, default_value_t = 1)]
        qmin: u64,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Bound on the bottom row of the random elements; defaults to 10 Q^2.
        #[arg(long)]
        size: Option<u64>,
    },
    /// Boundary arcs of the Ford domain.
    Domain {
        #[arg(long)]
        level: u64,
        /// Emit the arc table (cq, d, x_lo, x_hi) as CSV.
        #[arg(long)]
        emit_csv: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Build the graph and optionally export it.
    Build {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        /// Write Graphviz output here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Adjacency spectrum and Ramanujan check.
    Spectrum {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Diameter certificate.
    Certify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value = "exact")]
        method: CertMethod,
    },
    /// All primes p = 1 mod 12 up to pmax.
    Sweep {
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        ell: u64,
        /// Largest t in the density statistics.
        #[arg(long, default_value_t = 8)]
        tmax: usize,
        /// Emit CSV rows instead of JSON/text.
        #[arg(long)]
        emit_csv: bool,
        /// Write the output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Norm-one units with Frobenius norm squared at most B.
    Units {
        #[arg(long)]
        order: String,
        #[arg(long)]
        norm_bound: f64,
    },
    /// Covering-radius estimate on a seeded grid.
    Cover {
        #[arg(long)]
        order: String,
        /// Radius whose norm ball 4 sinh^2(r) + 2 is searched; defaults to 2.2 log(3V).
        #[arg(long)]
        rmax: Option<f64>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ApproxCmd {
    /// Smallest k >= 1 with gcd(a + k b, D) = 1.
    Jacobsthal {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        modulus: u64,
    },
    /// Integral or coprime-fraction approximation of x.
    Coprime {
        /// Rational as "num/den".
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        modulus: u64,
        /// Defaults to max(1, ceil(ln(D + 2))).
        #[arg(long)]
        constant: Option<u64>,
    },
}

enum Failure {
    Invalid(anyhow::Error),
    Compute(anyhow::Error),
}

type Outcome = Result<Value, Failure>;

fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

fn compute<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Compute(e.into())
}

fn point_i() -> UHPoint {
    UHPoint::new(numutil::rat_int(0), numutil::rat_int(1)).expect("i lies in the upper half-plane")
}

fn gamma0_failure(e: gamma0::Gamma0Error) -> Failure {
    match e {
        gamma0::Gamma0Error::ZeroLevel => invalid(e),
        _ => compute(e),
    }
}

fn big(x: &impl ToString) -> Value {
    Value::String(x.to_string())
}

fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_json(r: &Rational) -> Value {
    Value::String(fraction(r))
}

fn to_csv<F>(fill: F) -> Result<String, Failure>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(compute)?;
    let bytes = w.into_inner().map_err(|e| compute(anyhow!("{e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn element_json(g: &LatticeElement) -> Value {
    json!({
        "a": big(&g.a), "b": big(&g.b), "c": big(&g.c), "d": big(&g.d),
        "frobenius_sq": big(&g.frobenius_sq()),
    })
}

fn envelope(command: &str, seed: u64, params: Value, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "params": params,
        "result": result,
    })
}

fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn gamma0_cmd(cmd: &Gamma0Cmd, seed: u64) -> Result<(Value, Option<String>), Failure> {
    match cmd {
        Gamma0Cmd::Gens { level, trials } => {
            let level = *level;
            let boundary = gamma0::boundary_circles(level).map_err(gamma0_failure)?;
            let gens = gamma0::side_pairing_generators(&boundary);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let size = 10 * level * level + 10;
            let mut max_len = 0;
            for _ in 0..*trials {
                let g = gamma0::random_element(level, size, &mut rng);
                let w = gamma0::reduce(&g, &boundary, &gens).map_err(gamma0_failure)?;
                max_len = max_len.max(w.len());
            }
            let v = envelope(
                "gamma0 gens",
                seed,
                json!({"level": level, "trials": trials}),
                json!({
                    "generators": gens.iter().map(element_json).collect::<Vec<_>>(),
                    "count": gens.len(),
                    "certified": trials,
                    "max_word_len": max_len,
                    "norm_bound_sq": gamma0::generator_norm_bound_sq(level),
                }),
            );
            Ok((v, None))
        }
        Gamma0Cmd::Certify { level, qmin, qmax, trials, size } => {
            let (qmin, qmax) = match (level, qmax) {
                (Some(q), _) => (*q, *q),
                (None, Some(hi)) => (*qmin, *hi),
                (None, None) => return Err(invalid(anyhow!("give --level or --qmax"))),
            };
            if qmin == 0 || qmin > qmax {
                return Err(invalid(anyhow!("need 1 <= qmin <= qmax")));
            }
            let levels: Vec<u64> = (qmin..=qmax).collect();
            let rows: Vec<Result<Value, Failure>> = levels
                .par_iter()
                .map(|&q| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q.wrapping_mul(0x9e37_79b9));
                    let s = size.unwrap_or(10 * q * q + 10);
                    let cert = gamma0::certify(q, *trials, s, &mut rng).map_err(gamma0_failure)?;
                    Ok(json!({
                        "level": q,
                        "certified": cert.certified,
                        "trials": cert.trials,
                        "generators": cert.generator_count,
                        "max_generator_norm_sq": big(&cert.max_generator_norm_sq),
                        "max_word_len": cert.max_word_len,
                    }))
                })
                .collect();
            let mut out = Vec::new();
            for r in rows {
                out.push(r?);
            }
            let pts: Vec<(f64, f64)> = out
                .iter()
                .filter(|r| r["level"].as_u64().unwrap() > 1)
                .map(|r| {
                    let q = r["level"].as_u64().unwrap() as f64;
                    let n: f64 = r["max_generator_norm_sq"].as_str().unwrap().parse().unwrap();
                    (q, n.sqrt())
                })
                .collect();
            let v = envelope(
                "gamma0 certify",
                seed,
                json!({"qmin": qmin, "qmax": qmax, "trials": trials, "size": size}),
                json!({"levels": out, "norm_slope": log_log_slope(&pts)}),
            );
            Ok((v, None))
        }
        Gamma0Cmd::Domain { level, emit_csv } => {
            let b = gamma0::boundary_circles(*level).map_err(gamma0_failure)?;
            let csv_text = if *emit_csv {
                Some(to_csv(|w| {
                    w.write_record(["cq", "d", "x_lo", "x_hi"])?;
                    for c in &b.circles {
                        w.write_record([c.cq.to_string(), c.d.to_string(), fraction(&c.arc.0), fraction(&c.arc.1)])?;
                    }
                    Ok(())
                })?)
            } else {
                None
            };
            let circles: Vec<Value> = b
                .circles
                .iter()
                .map(|c| json!({"cq": big(&c.cq), "d": big(&c.d), "arc": [rat_json(&c.arc.0), rat_json(&c.arc.1)]}))
                .collect();
            let v = envelope(
                "gamma0 domain",
                seed,
                json!({"level": level}),
                json!({
                    "constant": b.constant,
                    "r_max": b.r_max,
                    "circles": circles,
                    "cusps": b.cusps().iter().map(rat_json).collect::<Vec<_>>(),
                    "min_radius": rat_json(&gamma0::min_boundary_radius(&b)),
                    "hyperbolic_area": b.hyperbolic_area(),
                }),
            );
            Ok((v, csv_text))
        }
    }
}

fn build(p: u64, ell: u64) -> Result<ssgraph::SSGraph, Failure> {
    ssgraph::build_graph(p, ell).map_err(|e| match e {
        ssgraph::GraphError::NotSupersingular(..) | ssgraph::GraphError::Invariant(_) => compute(e),
        _ => invalid(e),
    })
}

#[derive(Serialize)]
struct SweepRow {
    p: u64,
    n: usize,
    diameter: usize,
    t_exact: usize,
    t_chain: usize,
    t_ram: usize,
    density_ratio: f64,
    density_ratio_normalized: f64,
    fourth_moment: f64,
}

fn sweep_row(p: u64, ell: u64, tmax: usize) -> Result<SweepRow, Failure> {
    let g = build(p, ell)?;
    let spec = spectral::eigendecompose(&g.adjacency, ell).map_err(compute)?;
    let cert = |m| spectral::certify_diameter(&spec, m).map(|c| c.t_star).map_err(compute);
    let dens: Vec<_> = (0..=tmax).map(|t| spectral::density_sum(&spec, p, t)).collect();
    Ok(SweepRow {
        p,
        n: g.n(),
        diameter: spectral::diameter_bfs(&g.adjacency).map_err(compute)?,
        t_exact: cert(CertMethod::Exact)?,
        t_chain: cert(CertMethod::PaperChain)?,
        t_ram: cert(CertMethod::Ramanujan)?,
        density_ratio: dens.iter().map(|d| d.ratio).fold(0.0, f64::max) + 0.0,
        density_ratio_normalized: dens.iter().map(|d| d.normalized_ratio).fold(0.0, f64::max) + 0.0,
        fourth_moment: spectral::fourth_moment(&spec, p).sup,
    })
}

fn graph_cmd(cmd: &GraphCmd, seed: u64) -> Result<(Value, Option<String>), Failure> {
    match cmd {
        GraphCmd::Build { p, ell, dot } => {
            let g = build(*p, *ell)?;
            if let Some(path) = dot {
                std::fs::write(path, g.to_dot()).with_context(|| format!("writing {}", path.display())).map_err(invalid)?;
            }
            let v = envelope(
                "graph build",
                seed,
                json!({"p": p, "ell": ell}),
                json!({
                    "p": p, "ell": ell, "n": g.n(),
                    "vertices": g.vertices.iter().map(|v| [v.u, v.v]).collect::<Vec<_>>(),
                    "adjacency": g.adjacency,
                }),
            );
            Ok((v, None))
        }
        GraphCmd::Spectrum { p, ell } => {
            let g = build(*p, *ell)?;
            let s = spectral::eigendecompose(&g.adjacency, *ell).map_err(compute)?;
            let bound = 2.0 * (*ell as f64).sqrt();
            let v = envelope(
                "graph spectrum",
                seed,
                json!({"p": p, "ell": ell}),
                json!({
                    "n": s.n,
                    "eigenvalues": s.eigenvalues,
                    "max_nontrivial": s.max_nontrivial(),
                    "ramanujan_bound": bound,
                    "ramanujan": s.max_nontrivial() <= bound + 1e-9,
                    "non_bipartite": s.eigenvalues.last().copied().unwrap_or(0.0) > -((*ell + 1) as f64) + 1e-9,
                    "max_residual": s.max_residual(&g.adjacency),
                }),
            );
            Ok((v, None))
        }
        GraphCmd::Certify { p, ell, method } => {
            let g = build(*p, *ell)?;
            let s = spectral::eigendecompose(&g.adjacency, *ell).map_err(compute)?;
            let c = spectral::certify_diameter(&s, *method).map_err(compute)?;
            let d = spectral::diameter_bfs(&g.adjacency).map_err(compute)?;
            let v = envelope(
                "graph certify",
                seed,
                json!({"p": p, "ell": ell, "method": method}),
                json!({
                    "n": g.n(),
                    "t_star": c.t_star,
                    "bfs_diameter": d,
                    "fourth_moment_sup": c.fourth_moment_sup,
                    "trace": c.trace,
                }),
            );
            Ok((v, None))
        }
        GraphCmd::Sweep { pmax, ell, tmax, emit_csv, .. } => {
            if !matches!(ell, 2 | 3) {
                return Err(invalid(anyhow!("unsupported l = {ell}; supported: 2, 3")));
            }
            let primes = ssgraph::primes_one_mod_12(*pmax);
            if primes.is_empty() {
                return Err(invalid(anyhow!("no primes p = 1 mod 12 up to {pmax}")));
            }
            let rows: Vec<Result<SweepRow, Failure>> = primes.par_iter().map(|&p| sweep_row(p, *ell, *tmax)).collect();
            let mut ok = Vec::new();
            for r in rows {
                ok.push(r?);
            }
            ok.sort_by_key(|r| r.p);
            let csv_text = if *emit_csv {
                Some(to_csv(|w| ok.iter().try_for_each(|r| w.serialize(r)))?)
            } else {
                None
            };
            let pts: Vec<(f64, f64)> = ok.iter().filter(|r| r.n > 1).map(|r| (r.p as f64, r.fourth_moment)).collect();
            let v = envelope(
                "graph sweep",
                seed,
                json!({"pmax": pmax, "ell": ell, "tmax": tmax}),
                json!({"rows": ok, "fourth_moment_slope": log_log_slope(&pts)}),
            );
            Ok((v, csv_text))
        }
    }
}

fn lattice_cmd(cmd: &LatticeCmd, seed: u64) -> Outcome {
    match cmd {
        LatticeCmd::Units { order, norm_bound } => {
            let o = quatlat::bundled_order(order).map_err(invalid)?;
            let ball = quatlat::unit_ball(&o, *norm_bound).map_err(invalid)?;
            let elems: Vec<Value> = ball
                .elements
                .iter()
                .map(|u| {
                    let q = o.element(&u.coords);
                    json!({
                        "coords": u.coords,
                        "quaternion": q.iter().map(format_rational).collect::<Vec<_>>(),
                        "norm_sq": u.norm_sq,
                    })
                })
                .collect();
            Ok(envelope(
                "lattice units",
                seed,
                json!({"order": order, "norm_bound": norm_bound}),
                json!({"count": elems.len(), "elements": elems}),
            ))
        }
        LatticeCmd::Cover { order, rmax, grid } => {
            let o = quatlat::bundled_order(order).map_err(invalid)?;
            if *grid == 0 {
                return Err(invalid(anyhow!("grid must contain at least one point")));
            }
            let v = quatlat::covolume(o.algebra.discriminant(), o.level).map_err(invalid)?;
            let r = rmax.unwrap_or(2.2 * (3.0 * v).ln());
            let w = point_i();
            let radius = quatlat::dirichlet_radius(&o, w.to_c64(), 0.25, 12.0).map_err(compute)?;
            let pts = quatlat::disk_grid(&w, radius, *grid, seed);
            let rep = quatlat::covering_radius_estimate(&o, &w, &pts, r).map_err(invalid)?;
            let out = envelope(
                "lattice cover",
                seed,
                json!({"order": order, "rmax": r, "grid": grid}),
                json!({
                    "covolume": v,
                    "covolume_with_fibre": v * quatlat::FIBRE_FACTOR,
                    "dirichlet_radius": radius,
                    "norm_bound": rep.norm_bound,
                    "effective_bound": rep.effective_bound,
                    "units": rep.units,
                    "estimate": rep.estimate,
                    "covered": rep.covered,
                }),
            );
            if !rep.covered {
                return Err(compute(anyhow!("grid not covered within r = {r}")));
            }
            Ok(out)
        }
    }
}

fn approx_cmd(cmd: &ApproxCmd, seed: u64) -> Outcome {
    match cmd {
        ApproxCmd::Jacobsthal { a, b, modulus } => {
            let k = numutil::jacobsthal_shift(&(*a).into(), &(*b).into(), *modulus).map_err(invalid)?;
            Ok(envelope(
                "approx jacobsthal",
                seed,
                json!({"a": a, "b": b, "modulus": modulus}),
                json!({"k": k}),
            ))
        }
        ApproxCmd::Coprime { x, modulus, constant } => {
            let xr = parse_rational(x).map_err(invalid)?;
            let c = constant.unwrap_or_else(|| numutil::default_constant(*modulus));
            let r = numutil::coprime_approx(&xr, *modulus, c).map_err(invalid)?;
            let result = match r {
                ApproxResult::Integral(n) => json!({"kind": "integral", "c": big(&n)}),
                ApproxResult::Fraction { a, b } => json!({"kind": "fraction", "a": big(&a), "b": big(&b)}),
            };
            Ok(envelope(
                "approx coprime",
                seed,
                json!({"x": rat_json(&xr), "modulus": modulus, "constant": c}),
                result,
            ))
        }
    }
}

fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
    let d: i64 = d.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
    if d == 0 {
        return Err(anyhow!("zero denominator in {s:?}"));
    }
    Ok(numutil::rat(n, d))
}

/// Plain-text rendering: scalars of the result as `key: value`, arrays summarised.
fn render_text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(cmd) = v["command"].as_str() {
        out.push_str(&format!("{cmd} (seed {})\n", v["seed"]));
    }
    if let Value::Object(map) = &v["result"] {
        for (k, val) in map {
            match val {
                Value::Array(items) if items.len() > 8 => out.push_str(&format!("{k}: [{} entries]\n", items.len())),
                _ => out.push_str(&format!("{k}: {val}\n")),
            }
        }
    }
    out
}

fn run(cli: &Cli) -> Result<(Value, Option<String>), Failure> {
    match &cli.command {
        Command::Gamma0(c) => gamma0_cmd(c, cli.seed),
        Command::Graph(c) => graph_cmd(c, cli.seed),
        Command::Lattice(c) => lattice_cmd(c, cli.seed).map(|v| (v, None)),
        Command::Approx(c) => approx_cmd(c, cli.seed).map(|v| (v, None)),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(s) = std::env::var("ALK_THREADS") {
        let n: usize = s.parse().with_context(|| format!("ALK_THREADS={s:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INVALID);
    }
    let out_path = match &cli.command {
        Command::Graph(GraphCmd::Sweep { out, .. }) => out.clone(),
        _ => None,
    };
    match run(&cli) {
        Ok((value, csv_text)) => {
            let text = match csv_text {
                Some(c) => c,
                None if cli.json => serde_json::to_string_pretty(&value).expect("serialisable") + "\n",
                None => render_text(&value),
            };
            let written = match out_path {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display())),
                None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_INVALID);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("computation failed: {e:#}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}
