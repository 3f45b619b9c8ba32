use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default node count for matrices whose entries carry no samples.
pub const DEFAULT_NODES: usize = 1001;

/// Nodewise threshold below which `A⁺` and `A` are treated as equal.
pub const LAGRANGE_SYMMETRY_TOL: f64 = 1e-12;

/// One coefficient function `a_rs` of a Shin-Zettl matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Zero,
    Constant(Complex64),
    /// `c₀ + c₁x + c₂x² + …`
    Polynomial(Vec<Complex64>),
    /// Values on the uniform node grid of the owning matrix.
    Sampled(Vec<Complex64>),
}

impl Coefficient {
    pub fn real(c: f64) -> Self {
        if c == 0.0 {
            Coefficient::Zero
        } else {
            Coefficient::Constant(Complex64::new(c, 0.0))
        }
    }

    /// Exactly zero as data (not merely small).
    pub fn is_identically_zero(&self) -> bool {
        match self {
            Coefficient::Zero => true,
            Coefficient::Constant(c) => *c == Complex64::new(0.0, 0.0),
            Coefficient::Polynomial(cs) | Coefficient::Sampled(cs) => cs.iter().all(|c| *c == Complex64::new(0.0, 0.0)),
        }
    }

    /// `scale · conj(self)` with the same representation.
    fn conj_scaled(&self, scale: f64) -> Coefficient {
        let f = |c: &Complex64| c.conj() * scale;
        match self {
            Coefficient::Zero => Coefficient::Zero,
            Coefficient::Constant(c) => Coefficient::Constant(f(c)),
            Coefficient::Polynomial(cs) => Coefficient::Polynomial(cs.iter().map(f).collect()),
            Coefficient::Sampled(cs) => Coefficient::Sampled(cs.iter().map(f).collect()),
        }
    }
}

/// Uniform node grid of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub nodes: usize,
}

impl Grid {
    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.nodes - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.nodes {
            self.b
        } else {
            self.a + j as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|j| self.node(j)).collect()
    }
}

/// Cubic Lagrange interpolation of uniformly spaced samples.
pub fn interpolate_uniform(grid: Grid, samples: &[Complex64], x: f64) -> Complex64 {
    let m = samples.len();
    if m == 1 {
        return samples[0];
    }
    let h = grid.step();
    let t = ((x - grid.a) / h).clamp(0.0, (m - 1) as f64);
    let j = t.floor() as usize;
    if t == j as f64 {
        return samples[j];
    }
    if m < 4 {
        let j = j.min(m - 2);
        let u = t - j as f64;
        return samples[j] * (1.0 - u) + samples[j + 1] * u;
    }
    let start = j.saturating_sub(1).min(m - 4);
    let u = t - start as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let mut w = 1.0;
        for l in 0..4 {
            if l != k {
                w *= (u - l as f64) / (k as f64 - l as f64);
            }
        }
        acc += samples[start + k] * w;
    }
    acc
}

/// Which Shin-Zettl condition a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Samples must be finite.
    LocallyIntegrable,
    /// `a_{r,r+1}` must not vanish.
    NonVanishingSuperdiagonal,
    /// `a_rs` must vanish identically for `s ≥ r+2`.
    ZeroAboveSuperdiagonal,
}

/// One failed condition at one entry (1-based `row`, `col`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub node: usize,
    pub x: f64,
    pub condition: Condition,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            Condition::LocallyIntegrable => "non-finite value",
            Condition::NonVanishingSuperdiagonal => "superdiagonal entry vanishes",
            Condition::ZeroAboveSuperdiagonal => "entry above superdiagonal is nonzero",
        };
        write!(
            f,
            "a_{}{} at node {} (x = {}): {}",
            self.row, self.col, self.node, self.x, what
        )
    }
}

/// An `n × n` Shin-Zettl coefficient matrix on a compact interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ShinZettlMatrix {
    n: usize,
    grid: Grid,
    entries: Vec<Coefficient>,
}

impl ShinZettlMatrix {
    /// Checks shape only; the Shin-Zettl conditions are reported by
    /// [`ShinZettlMatrix::validate`].
    pub fn new(interval: (f64, f64), nodes: usize, rows: Vec<Vec<Coefficient>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!("order {n} is below 2")));
        }
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidMatrix(format!(
                "interval [{a}, {b}] is not a compact interval"
            )));
        }
        if nodes < 2 {
            return Err(Error::InvalidMatrix("at least two grid nodes are needed".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    r + 1,
                    row.len()
                )));
            }
            for (s, e) in row.into_iter().enumerate() {
                if let Coefficient::Sampled(v) = &e {
                    if v.len() != nodes {
                        return Err(Error::InvalidMatrix(format!(
                            "a_{}{} has {} samples, expected {nodes}",
                            r + 1,
                            s + 1,
                            v.len()
                        )));
                    }
                }
                entries.push(e);
            }
        }
        Ok(ShinZettlMatrix {
            n,
            grid: Grid { a, b, nodes },
            entries,
        })
    }

    /// Constant real matrix given row by row.
    pub fn constant(interval: (f64, f64), rows: &[&[f64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&c| Coefficient::real(c)).collect())
            .collect();
        Self::new(interval, DEFAULT_NODES, rows)
    }

    /// `[[0,1],[0,0]]`, for which `M_A[f] = −f″`.
    pub fn second_derivative(interval: (f64, f64)) -> Self {
        Self::constant(interval, &[&[0.0, 1.0], &[0.0, 0.0]]).expect("valid constant matrix")
    }

    /// Samples `f(r, s, x)` (0-based indices) on a uniform grid.
    /// Entries above the superdiagonal that sample to exact zeros become `Zero`.
    pub fn from_fn(
        interval: (f64, f64),
        n: usize,
        nodes: usize,
        f: impl Fn(usize, usize, f64) -> Complex64,
    ) -> Result<Self> {
        let grid = Grid {
            a: interval.0,
            b: interval.1,
            nodes: nodes.max(2),
        };
        let xs = grid.points();
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .map(|s| {
                        let v: Vec<Complex64> = xs.iter().map(|&x| f(r, s, x)).collect();
                        let c = Coefficient::Sampled(v);
                        if c.is_identically_zero() {
                            Coefficient::Zero
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(interval, nodes, rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.grid.a, self.grid.b)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// 0-based entry access.
    pub fn entry(&self, r: usize, s: usize) -> &Coefficient {
        &self.entries[r * self.n + s]
    }

    /// Value of `a_rs` (0-based) at `x`.
    pub fn eval(&self, r: usize, s: usize, x: f64) -> Complex64 {
        match self.entry(r, s) {
            Coefficient::Zero => Complex64::new(0.0, 0.0),
            Coefficient::Constant(c) => *c,
            Coefficient::Polynomial(cs) => cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c),
            Coefficient::Sampled(v) => interpolate_uniform(self.grid, v, x),
        }
    }

    fn node_value(&self, r: usize, s: usize, j: usize) -> Complex64 {
        match self.entry(r, s) {
            Coefficient::Sampled(v) => v[j],
            _ => self.eval(r, s, self.grid.node(j)),
        }
    }

    /// Dense matrix at `x`, row-major.
    pub fn eval_matrix(&self, x: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for r in 0..self.n {
            for s in 0..self.n {
                out.push(self.eval(r, s, x));
            }
        }
        out
    }

    /// Reports every node where a Shin-Zettl condition fails.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n;
        let mut out = Vec::new();
        let mut push = |r: usize, s: usize, j: usize, condition| {
            out.push(Violation {
                row: r + 1,
                col: s + 1,
                node: j,
                x: self.grid.node(j),
                condition,
            });
        };
        for r in 0..n {
            for s in 0..n {
                let entry = self.entry(r, s);
                let finite = match entry {
                    Coefficient::Zero => true,
                    Coefficient::Constant(c) => c.is_finite(),
                    Coefficient::Polynomial(cs) => cs.iter().all(|c| c.is_finite()),
                    Coefficient::Sampled(_) => true,
                };
                if !finite {
                    push(r, s, 0, Condition::LocallyIntegrable);
                    continue;
                }
                if s >= r + 2 {
                    if !entry.is_identically_zero() {
                        let j = (0..self.grid.nodes)
                            .find(|&j| self.node_value(r, s, j) != Complex64::new(0.0, 0.0))
                            .unwrap_or(0);
                        push(r, s, j, Condition::ZeroAboveSuperdiagonal);
                    }
                    continue;
                }
                for j in 0..self.grid.nodes {
                    let v = self.node_value(r, s, j);
                    if !v.is_finite() {
                        push(r, s, j, Condition::LocallyIntegrable);
                    } else if s == r + 1 && v == Complex64::new(0.0, 0.0) {
                        push(r, s, j, Condition::NonVanishingSuperdiagonal);
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn require_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidMatrix(v.to_string())),
        }
    }

    /// `A⁺ = −Lₙ⁻¹ A* Lₙ`, entrywise `A⁺_rs = −(−1)^{r+s} conj(a_{n+1−s, n+1−r})`.
    pub fn lagrange_adjoint(&self) -> Result<ShinZettlMatrix> {
        self.require_valid()?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for s in 0..n {
                let sign = if (r + s) % 2 == 0 { -1.0 } else { 1.0 };
                entries.push(self.entry(n - 1 - s, n - 1 - r).conj_scaled(sign));
            }
        }
        Ok(ShinZettlMatrix {
            n,
            grid: self.grid,
            entries,
        })
    }

    /// Largest nodewise entry difference to another matrix on the same grid.
    pub fn max_node_difference(&self, other: &ShinZettlMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.grid != other.grid {
            return Err(Error::InvalidMatrix("matrices live on different grids".into()));
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for s in 0..self.n {
                for j in 0..self.grid.nodes {
                    let d = (self.node_value(r, s, j) - other.node_value(r, s, j)).norm();
                    worst = worst.max(d);
                }
            }
        }
        Ok(worst)
    }

    /// `max |A⁺ − A| < 1e−12` over the grid.
    pub fn is_lagrange_symmetric(&self) -> Result<bool> {
        let plus = self.lagrange_adjoint()?;
        Ok(self.max_node_difference(&plus)? < LAGRANGE_SYMMETRY_TOL)
    }
}

/// Free function form of [`ShinZettlMatrix::validate`].
pub fn validate_shin_zettl(a: &ShinZettlMatrix) -> Vec<Violation> {
    a.validate()
}

/// Free function form of [`ShinZettlMatrix::lagrange_adjoint`].
pub fn lagrange_adjoint(a: &ShinZettlMatrix) -> Result<ShinZettlMatrix> {
    a.lagrange_adjoint()
}

// JSON: {"n": 2, "interval": [a, b], "nodes"?: m, "entries": [[...]]}
// where an entry is a number, {"re","im"}, {"samples": [...]} or {"poly": [...]}.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        match c {
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
            ComplexRepr::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexRepr {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            ComplexRepr::Real(c.re)
        } else {
            ComplexRepr::Complex { re: c.re, im: c.im }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Samples { samples: Vec<ComplexRepr> },
    Poly { poly: Vec<ComplexRepr> },
    Value(ComplexRepr),
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    interval: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<usize>,
    entries: Vec<Vec<EntryRepr>>,
}

fn complex_vec(v: Vec<ComplexRepr>) -> Vec<Complex64> {
    v.into_iter().map(Complex64::from).collect()
}

impl TryFrom<MatrixRepr> for ShinZettlMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.entries.len() != r.n {
            return Err(Error::InvalidMatrix(format!(
                "declared order {} but {} rows given",
                r.n,
                r.entries.len()
            )));
        }
        let mut sampled_len = None;
        let rows: Vec<Vec<Coefficient>> = r
            .entries
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        EntryRepr::Value(c) => {
                            let c = Complex64::from(c);
                            if c == Complex64::new(0.0, 0.0) {
                                Coefficient::Zero
                            } else {
                                Coefficient::Constant(c)
                            }
                        }
                        EntryRepr::Poly { poly } => Coefficient::Polynomial(complex_vec(poly)),
                        EntryRepr::Samples { samples } => {
                            sampled_len.get_or_insert(samples.len());
                            Coefficient::Sampled(complex_vec(samples))
                        }
                    })
                    .collect()
            })
            .collect();
        let nodes = r.nodes.or(sampled_len).unwrap_or(DEFAULT_NODES);
        ShinZettlMatrix::new((r.interval[0], r.interval[1]), nodes, rows)
    }
}

impl From<&ShinZettlMatrix> for MatrixRepr {
    fn from(m: &ShinZettlMatrix) -> Self {
        let entries = (0..m.n)
            .map(|r| {
                (0..m.n)
                    .map(|s| match m.entry(r, s) {
                        Coefficient::Zero => EntryRepr::Value(ComplexRepr::Real(0.0)),
                        Coefficient::Constant(c) => EntryRepr::Value((*c).into()),
                        Coefficient::Polynomial(cs) => EntryRepr::Poly {
                            poly: cs.iter().map(|c| (*c).into()).collect(),
                        },
                        Coefficient::Sampled(v) => EntryRepr::Samples {
                            samples: v.iter().map(|c| (*c).into()).collect(),
                        },
                    })
                    .collect()
            })
            .collect();
        MatrixRepr {
            n: m.n,
            interval: [m.grid.a, m.grid.b],
            nodes: Some(m.grid.nodes),
            entries,
        }
    }
}

impl Serialize for ShinZettlMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShinZettlMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        ShinZettlMatrix::try_from(repr).map_err(de::Error::custom)
    }
}
