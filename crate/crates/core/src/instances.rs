//! Seeded instance generators for the benchmark families and the plain-text
//! quadratic file format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{FwError, Result};
use crate::linalg::{ColMatrix, DenseVector};
use crate::objective::QuadraticObjective;
use crate::polytope::{hungarian, parse_graph, BipartiteGraph, BipartiteMatching, DagPaths, Polytope};

/// Rows of `A` unless stated otherwise.
pub const DEFAULT_M: usize = 200;

/// Retries per permutation when building a k-regular bipartite graph.
const PERMUTATION_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `min ‖b − A(z⁺ − z⁻)‖²` over `τΔ₂ₙ`, with `x*` holding `ones` leading ones.
    SparseRecovery { n: usize, ones: usize, tau: f64 },
    /// Unit s-t flows through `layers` layers of `labels` nodes.
    DagChain { layers: usize, labels: usize },
    /// Perfect matchings of a random `k`-regular bipartite graph on `2n` nodes.
    PmBipartite { n: usize, k: usize },
    /// Least squares over the probability simplex `Δⁿ`.
    SimplexLs { n: usize },
    /// An explicit general quadratic over `Δⁿ`, or over the polytope of
    /// `graph` when given.
    QuadFile { path: PathBuf, graph: Option<PathBuf> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SparseRecovery { .. } => "sparse-recovery",
            Self::DagChain { .. } => "dag-chain",
            Self::PmBipartite { .. } => "pm-bipartite",
            Self::SimplexLs { .. } => "simplex-ls",
            Self::QuadFile { .. } => "quad-file",
        }
    }

    /// Whether `σ` has any effect on the generated instance.
    pub fn has_noise(&self) -> bool {
        !matches!(self, Self::QuadFile { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub m: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: Family, sigma: f64, seed: u64) -> Self {
        Self {
            family,
            m: DEFAULT_M,
            sigma,
            seed,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub polytope: Polytope,
    pub objective: QuadraticObjective,
    /// The planted solution, in the polytope's coordinates.
    pub x_star: DenseVector,
}

/// Build the instance. Draw order from the seeded stream: graph (matching
/// family only), `A` column by column, the planted atom, then the noise.
/// Noise is `σ·z` for standard normal `z`, so the same seed gives the same
/// noise direction for every `σ`.
pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(FwError::InvalidInstance(format!(
            "sigma must be finite and ≥ 0, got {}",
            spec.sigma
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.m;
    match &spec.family {
        Family::QuadFile { path, graph } => {
            let objective = read_quad_file(path)?;
            let polytope = match graph {
                Some(g) => parse_graph(&read_text(g)?)?.into_polytope()?,
                None => Polytope::simplex(objective.dim()),
            };
            if polytope.dim() != objective.dim() {
                return Err(FwError::Dimension {
                    expected: polytope.dim(),
                    got: objective.dim(),
                });
            }
            let x_star = polytope.initial_atom().to_dense(polytope.dim());
            Ok(Instance {
                polytope,
                objective,
                x_star,
            })
        }
        Family::SparseRecovery { n, ones, tau } => {
            if *n == 0 || m == 0 || ones > n || !(*tau > 0.0) {
                return Err(FwError::InvalidInstance(format!(
                    "sparse recovery needs n ≥ 1, m ≥ 1, ones ≤ n, tau > 0 (n={n}, m={m}, ones={ones}, tau={tau})"
                )));
            }
            let a = uniform_matrix(&mut rng, m, *n);
            let x: Vec<f64> = (0..*n).map(|i| if i < *ones { 1.0 } else { 0.0 }).collect();
            let b = noisy_rhs(&mut rng, &a, &x, spec.sigma);
            let mut cols = Vec::with_capacity(2 * n * m);
            for sign in [1.0, -1.0] {
                for j in 0..*n {
                    cols.extend(a.col(j).iter().map(|v| sign * tau * v));
                }
            }
            let mut x_star = vec![0.0; 2 * n];
            for (i, &v) in x.iter().enumerate() {
                x_star[i] = v.max(0.0) / tau;
                x_star[n + i] = (-v).max(0.0) / tau;
            }
            Ok(Instance {
                polytope: Polytope::simplex(2 * n),
                objective: QuadraticObjective::least_squares(ColMatrix::from_col_major(m, 2 * n, cols), b),
                x_star: x_star.into(),
            })
        }
        Family::DagChain { layers, labels } => {
            if *layers == 0 || *labels == 0 {
                return Err(FwError::InvalidInstance(
                    "dag chain needs at least one layer and label".into(),
                ));
            }
            planted(
                &mut rng,
                Polytope::Dag(DagPaths::chain(*layers, *labels)),
                m,
                spec.sigma,
            )
        }
        Family::PmBipartite { n, k } => {
            let graph = regular_bipartite(&mut rng, *n, *k)?;
            planted(
                &mut rng,
                Polytope::Matching(BipartiteMatching::new(graph)?),
                m,
                spec.sigma,
            )
        }
        Family::SimplexLs { n } => {
            if *n == 0 {
                return Err(FwError::InvalidInstance("simplex needs n ≥ 1".into()));
            }
            planted(&mut rng, Polytope::simplex(*n), m, spec.sigma)
        }
    }
}

fn planted(rng: &mut ChaCha8Rng, polytope: Polytope, m: usize, sigma: f64) -> Result<Instance> {
    if m == 0 {
        return Err(FwError::InvalidInstance("m must be at least 1".into()));
    }
    let n = polytope.dim();
    let a = uniform_matrix(rng, m, n);
    let cost: DenseVector = (0..n).map(|_| rng.random::<f64>()).collect::<Vec<_>>().into();
    let x_star = polytope.min_oracle(&cost).to_dense(n);
    let b = noisy_rhs(rng, &a, x_star.as_slice(), sigma);
    Ok(Instance {
        polytope,
        objective: QuadraticObjective::least_squares(a, b),
        x_star,
    })
}

fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ColMatrix {
    ColMatrix::from_col_major(m, n, (0..m * n).map(|_| rng.random::<f64>()).collect())
}

fn noisy_rhs(rng: &mut ChaCha8Rng, a: &ColMatrix, x: &[f64], sigma: f64) -> Vec<f64> {
    let mut b = a.mul_vec(x);
    for v in &mut b {
        let z: f64 = rng.sample(StandardNormal);
        *v += sigma * z;
    }
    b
}

/// Union of `k` edge-disjoint random perfect matchings on `n + n` nodes;
/// `K_{n,n}` when `k = n`. Each round shuffles a permutation until it avoids
/// the edges taken so far, and after [`PERMUTATION_RETRIES`] misses takes a
/// minimum-cost perfect matching of the unused edges under random costs,
/// which exists because the unused edges form an `(n − round)`-regular graph.
pub fn regular_bipartite(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<BipartiteGraph> {
    if n == 0 || k == 0 || k > n {
        return Err(FwError::InvalidInstance(format!("need 1 ≤ k ≤ n, got n={n}, k={k}")));
    }
    if k == n {
        return Ok(BipartiteGraph::complete(n));
    }
    let mut used = vec![vec![false; n]; n];
    let mut edges = Vec::with_capacity(n * k);
    let mut perm: Vec<usize> = (0..n).collect();
    let complete = BipartiteGraph::complete(n);
    for _ in 0..k {
        let mut found = false;
        for _ in 0..PERMUTATION_RETRIES {
            perm.shuffle(rng);
            if perm.iter().enumerate().all(|(l, &r)| !used[l][r]) {
                found = true;
                break;
            }
        }
        if !found {
            let costs: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
            let res = hungarian(&complete, &costs, &|e| !used[e / n][e % n])?;
            for e in res.edges {
                perm[e / n] = e % n;
            }
        }
        for (l, &r) in perm.iter().enumerate() {
            used[l][r] = true;
            edges.push((l, r));
        }
    }
    edges.sort_unstable();
    BipartiteGraph::new(n, n, edges)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FwError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_quad_file(path: &Path) -> Result<QuadraticObjective> {
    parse_quad(&read_text(path)?)
}

/// Parse `quad n`, then `n` rows of `A`, then one row of `b`, describing
/// `½xᵀAx + bᵀx`.
pub fn parse_quad(text: &str) -> Result<QuadraticObjective> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or(FwError::Parse {
        line: 0,
        msg: "empty quad file".into(),
    })?;
    let mut head = header.split_whitespace();
    if head.next() != Some("quad") {
        return Err(FwError::Parse {
            line,
            msg: "expected header `quad n`".into(),
        });
    }
    let n: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n > 0)
        .ok_or(FwError::Parse {
            line,
            msg: "bad dimension in header".into(),
        })?;
    let mut row = |what: &str| -> Result<Vec<f64>> {
        let (line, text) = lines.next().ok_or(FwError::Parse {
            line: 0,
            msg: format!("missing {what}"),
        })?;
        let vals = text
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| FwError::Parse {
                line,
                msg: format!("{what}: {e}"),
            })?;
        if vals.len() != n || vals.iter().any(|v| !v.is_finite()) {
            return Err(FwError::Parse {
                line,
                msg: format!("{what}: expected {n} finite values, got {}", vals.len()),
            });
        }
        Ok(vals)
    };
    let rows = (0..n)
        .map(|i| row(&format!("row {i} of A")))
        .collect::<Result<Vec<_>>>()?;
    let b = row("vector b")?;
    for i in 0..n {
        for j in 0..i {
            if (rows[i][j] - rows[j][i]).abs() > 1e-12 * (1.0 + rows[i][j].abs()) {
                return Err(FwError::Parse {
                    line: 0,
                    msg: format!("A is not symmetric at ({i},{j})"),
                });
            }
        }
    }
    Ok(QuadraticObjective::general(ColMatrix::from_rows(&rows), b))
}

/// The objective in `quad` format, dropping any additive constant.
/// Least squares `‖Ax − b‖²` becomes `A' = 2AᵀA`, `b' = −2Aᵀb`.
pub fn write_quad(obj: &QuadraticObjective) -> String {
    let n = obj.dim();
    let (a, b) = match obj {
        QuadraticObjective::General { a, b, .. } => (a.clone(), b.clone()),
        QuadraticObjective::LeastSquares { a, b } => {
            let mut h = ColMatrix::zeros(n, n);
            for j in 0..n {
                for i in 0..=j {
                    let v = 2.0 * crate::linalg::dot(a.col(i), a.col(j));
                    h.set(i, j, v);
                    h.set(j, i, v);
                }
            }
            let lin = a.mul_t_vec(b).into_iter().map(|v| -2.0 * v).collect();
            (h, lin)
        }
    };
    let mut out = String::new();
    writeln!(out, "quad {n}").unwrap();
    let fmt_row = |vals: &mut dyn Iterator<Item = f64>| vals.map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
    for i in 0..n {
        writeln!(out, "{}", fmt_row(&mut (0..n).map(|j| a.get(i, j)))).unwrap();
    }
    writeln!(out, "{}", fmt_row(&mut b.iter().copied())).unwrap();
    out
}
