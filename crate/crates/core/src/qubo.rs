//! Quadratic unconstrained binary optimization problems.
//!
//! A [`Qubo`] stores an upper-triangular quadratic form: one coefficient per
//! key `(i, j)` with `i <= j`, where diagonal keys are the linear terms
//! (`x_i * x_i = x_i`). Off-diagonal keys carry the full coefficient; there
//! is no symmetric halving. The energy of `x ∈ {0,1}^n` is
//!
//! ```text
//! E(x) = constant + Σ_i Q_ii x_i + Σ_{i<j} Q_ij x_i x_j
//! ```
//!
//! Max-Cut instances map to integer QUBOs ([`maxcut_to_qubo`]), so their
//! energies are exact. A floating coefficient type is available for
//! general problems exchanged with remote solvers.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::graph::GraphInstance;

/// Numeric type of QUBO coefficients.
pub trait Coefficient:
    Copy
    + Debug
    + Default
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn to_f64(self) -> f64;
}

impl Coefficient for i64 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Coefficient for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Qubo<T = i64> {
    n: usize,
    linear: Vec<T>,
    // Sorted by (i, j), i < j, unique keys, zeros dropped.
    quadratic: Vec<(u32, u32, T)>,
    constant: T,
}

impl<T: Coefficient> Qubo<T> {
    /// An all-zero QUBO over `n` variables.
    pub fn zero(n: usize) -> Self {
        Qubo {
            n,
            linear: vec![T::zero(); n],
            quadratic: Vec::new(),
            constant: T::zero(),
        }
    }

    /// Builds a QUBO from `(i, j, coefficient)` triples with `i <= j`.
    /// Each key may appear at most once.
    pub fn from_terms(
        n: usize,
        constant: T,
        terms: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::input(format!("variable count {n} exceeds u32 range")));
        }
        let mut linear = vec![T::zero(); n];
        let mut seen_linear = vec![false; n];
        let mut quadratic = Vec::new();
        for (i, j, c) in terms {
            if i > j {
                return Err(Error::input(format!("term ({i}, {j}) must have i <= j")));
            }
            if j >= n {
                return Err(Error::input(format!(
                    "term ({i}, {j}) has an index outside [0, {n})"
                )));
            }
            if i == j {
                if std::mem::replace(&mut seen_linear[i], true) {
                    return Err(Error::input(format!("duplicate term ({i}, {i})")));
                }
                linear[i] = c;
            } else {
                quadratic.push((i as u32, j as u32, c));
            }
        }
        quadratic.sort_unstable_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = quadratic
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::input(format!("duplicate term ({}, {})", w[0].0, w[0].1)));
        }
        quadratic.retain(|t| !t.2.is_zero());
        Ok(Qubo {
            n,
            linear,
            quadratic,
            constant,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    /// Off-diagonal terms `(i, j, Q_ij)` with `i < j`, sorted.
    pub fn quadratic(&self) -> impl ExactSizeIterator<Item = (usize, usize, T)> + '_ {
        self.quadratic
            .iter()
            .map(|&(i, j, c)| (i as usize, j as usize, c))
    }

    pub fn quadratic_len(&self) -> usize {
        self.quadratic.len()
    }

    /// Coefficient stored under key `(min(i,j), max(i,j))`, zero if absent.
    pub fn coefficient(&self, i: usize, j: usize) -> T {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if a == b {
            return self.linear.get(a).copied().unwrap_or_default();
        }
        self.quadratic
            .binary_search_by_key(&(a as u32, b as u32), |&(x, y, _)| (x, y))
            .map(|k| self.quadratic[k].2)
            .unwrap_or_default()
    }

    /// All nonzero terms including the diagonal, sorted by `(i, j)`.
    pub fn terms(&self) -> Vec<(usize, usize, T)> {
        let mut out: Vec<(usize, usize, T)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, i, c))
            .chain(self.quadratic())
            .collect();
        out.sort_unstable_by_key(|&(i, j, _)| (i, j));
        out
    }

    pub fn energy(&self, x: &Assignment) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::input(format!(
                "assignment has length {}, QUBO has {} variables",
                x.len(),
                self.n
            )));
        }
        let bits = x.bits();
        let mut e = self.constant;
        for (i, &c) in self.linear.iter().enumerate() {
            if bits[i] {
                e += c;
            }
        }
        for &(i, j, c) in &self.quadratic {
            if bits[i as usize] && bits[j as usize] {
                e += c;
            }
        }
        Ok(e)
    }

    pub fn to_json(&self) -> QuboJson<T> {
        QuboJson {
            n: self.n,
            constant: self.constant,
            terms: self.terms(),
        }
    }

    pub fn from_json(json: QuboJson<T>) -> Result<Self> {
        Qubo::from_terms(json.n, json.constant, json.terms)
    }
}

impl Qubo<i64> {
    /// Lossless conversion to floating coefficients.
    pub fn to_f64(&self) -> Qubo<f64> {
        Qubo {
            n: self.n,
            linear: self.linear.iter().map(|&c| c as f64).collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|&(i, j, c)| (i, j, c as f64))
                .collect(),
            constant: self.constant as f64,
        }
    }
}

/// JSON form `{"n": int, "constant": number, "terms": [[i, j, coeff], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Coefficient"))]
pub struct QuboJson<T> {
    pub n: usize,
    pub constant: T,
    pub terms: Vec<(usize, usize, T)>,
}

/// Max-Cut as a minimization QUBO.
///
/// `cut(x) = Σ_{(i,j)∈E} (x_i + x_j - 2 x_i x_j)`, negated: each vertex gets
/// linear coefficient `-deg(i)`, each edge gets `+2`, and the constant is 0.
/// Hence `energy(Q, x) == -cut_cost(g, x)` for every `x`.
pub fn maxcut_to_qubo(graph: &GraphInstance) -> Qubo<i64> {
    let linear = graph.degrees().into_iter().map(|d| -(d as i64)).collect();
    // Graph edges are already sorted and unique with i < j.
    let quadratic = graph
        .edges()
        .map(|(i, j)| (i as u32, j as u32, 2i64))
        .collect();
    Qubo {
        n: graph.n(),
        linear,
        quadratic,
        constant: 0,
    }
}

/// Clamps every variable outside `vars` to its value in `fixed` and returns
/// the QUBO over `vars` alone, re-indexed in the order given.
///
/// For every sub-assignment `y`, the result's energy equals the energy of
/// `fixed` with `y` written onto `vars`: cross terms with clamped variables
/// fold into the linear coefficients, clamped-clamped terms into the
/// constant.
pub fn extract_subqubo<T: Coefficient>(
    qubo: &Qubo<T>,
    vars: &[usize],
    fixed: &Assignment,
) -> Result<Qubo<T>> {
    if vars.is_empty() {
        return Err(Error::input("subproblem variable set is empty"));
    }
    if fixed.len() != qubo.n {
        return Err(Error::input(format!(
            "assignment has length {}, QUBO has {} variables",
            fixed.len(),
            qubo.n
        )));
    }
    let mut local = vec![u32::MAX; qubo.n];
    for (k, &v) in vars.iter().enumerate() {
        if v >= qubo.n {
            return Err(Error::input(format!(
                "subproblem variable {v} outside [0, {})",
                qubo.n
            )));
        }
        if local[v] != u32::MAX {
            return Err(Error::input(format!("subproblem variable {v} listed twice")));
        }
        local[v] = k as u32;
    }
    let bits = fixed.bits();
    let inside = |v: u32| local[v as usize] != u32::MAX;

    let mut constant = qubo.constant;
    let mut linear = vec![T::zero(); vars.len()];
    for (v, &c) in qubo.linear.iter().enumerate() {
        if inside(v as u32) {
            linear[local[v] as usize] += c;
        } else if bits[v] {
            constant += c;
        }
    }
    let mut quadratic = Vec::new();
    for &(i, j, c) in &qubo.quadratic {
        match (inside(i), inside(j)) {
            (true, true) => {
                let (a, b) = (local[i as usize], local[j as usize]);
                quadratic.push((a.min(b), a.max(b), c));
            }
            (true, false) => {
                if bits[j as usize] {
                    linear[local[i as usize] as usize] += c;
                }
            }
            (false, true) => {
                if bits[i as usize] {
                    linear[local[j as usize] as usize] += c;
                }
            }
            (false, false) => {
                if bits[i as usize] && bits[j as usize] {
                    constant += c;
                }
            }
        }
    }
    quadratic.sort_unstable_by_key(|&(i, j, _)| (i, j));
    Ok(Qubo {
        n: vars.len(),
        linear,
        quadratic,
        constant,
    })
}
