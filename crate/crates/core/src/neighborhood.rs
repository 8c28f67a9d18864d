//! Incremental single-flip evaluation for local search.
//!
//! [`QuboAdjacency`] is a compressed row view of a [`Qubo`] in which every
//! off-diagonal term appears in both endpoint rows. A [`NeighborhoodCache`]
//! holds the current assignment together with the local field of every
//! variable,
//!
//! ```text
//! field_i = Q_ii + Σ_{j≠i} Q_ij x_j
//! ```
//!
//! so the energy change of flipping `i` is `field_i` when `x_i = 0` and
//! `-field_i` when `x_i = 1`. Flipping updates the fields of the neighbors
//! of `i` only, in time proportional to its degree.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::qubo::{Coefficient, Qubo};

#[derive(Clone, Debug)]
pub struct QuboAdjacency<T = i64> {
    n: usize,
    constant: T,
    linear: Vec<T>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    coefficients: Vec<T>,
}

impl<T: Coefficient> QuboAdjacency<T> {
    pub fn new(qubo: &Qubo<T>) -> Self {
        let n = qubo.n();
        let mut offsets = vec![0usize; n + 1];
        for (i, j, _) in qubo.quadratic() {
            offsets[i + 1] += 1;
            offsets[j + 1] += 1;
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let total = offsets[n];
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; total];
        let mut coefficients = vec![T::zero(); total];
        for (i, j, c) in qubo.quadratic() {
            neighbors[cursor[i]] = j as u32;
            coefficients[cursor[i]] = c;
            cursor[i] += 1;
            neighbors[cursor[j]] = i as u32;
            coefficients[cursor[j]] = c;
            cursor[j] += 1;
        }
        QuboAdjacency {
            n,
            constant: qubo.constant(),
            linear: qubo.linear().to_vec(),
            offsets,
            neighbors,
            coefficients,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn linear(&self, i: usize) -> T {
        self.linear[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let range = self.offsets[i]..self.offsets[i + 1];
        (&self.neighbors[range.clone()], &self.coefficients[range])
    }

    /// Full energy evaluation, `O(n + nnz)`.
    pub fn energy(&self, x: &Assignment) -> Result<T> {
        check_len(x, self.n)?;
        let bits = x.bits();
        let mut e = self.constant;
        for i in 0..self.n {
            if !bits[i] {
                continue;
            }
            e += self.linear[i];
            let (nbrs, coeffs) = self.row(i);
            for (&j, &c) in nbrs.iter().zip(coeffs) {
                if (j as usize) > i && bits[j as usize] {
                    e += c;
                }
            }
        }
        Ok(e)
    }

    /// Sub-QUBO over `vars` with every other variable clamped to its value
    /// in `cache`. Uses the cached energy for the constant, so the cost is
    /// proportional to the total degree of `vars`.
    ///
    /// `position` is scratch space of length `n` that must hold `u32::MAX`
    /// everywhere on entry; it is restored before returning.
    pub(crate) fn extract_with_cache(
        &self,
        cache: &NeighborhoodCache<T>,
        vars: &[usize],
        position: &mut [u32],
    ) -> Qubo<T> {
        for (k, &v) in vars.iter().enumerate() {
            position[v] = k as u32;
        }
        let bits = cache.assignment().bits();
        let mut linear = vec![T::zero(); vars.len()];
        let mut terms = Vec::new();
        let mut constant = cache.energy();
        for (a, &v) in vars.iter().enumerate() {
            let mut outside = self.linear[v];
            let (nbrs, coeffs) = self.row(v);
            for (&w, &c) in nbrs.iter().zip(coeffs) {
                let b = position[w as usize];
                if b == u32::MAX {
                    if bits[w as usize] {
                        outside += c;
                    }
                } else if (a as u32) < b {
                    terms.push((a, b as usize, c));
                    if bits[v] && bits[w as usize] {
                        constant -= c;
                    }
                }
            }
            linear[a] = outside;
            if bits[v] {
                constant -= outside;
            }
        }
        for &v in vars {
            position[v] = u32::MAX;
        }
        let terms = linear
            .into_iter()
            .enumerate()
            .map(|(a, c)| (a, a, c))
            .chain(terms);
        Qubo::from_terms(vars.len(), constant, terms)
            .expect("sub-QUBO keys are unique and in range")
    }
}

fn check_len(x: &Assignment, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::input(format!(
            "assignment has length {}, QUBO has {n} variables",
            x.len()
        )));
    }
    Ok(())
}

/// Current assignment plus per-variable local fields and running energy.
///
/// Owned by a single solver run.
#[derive(Clone, Debug)]
pub struct NeighborhoodCache<'a, T = i64> {
    adjacency: &'a QuboAdjacency<T>,
    x: Assignment,
    field: Vec<T>,
    energy: T,
}

impl<'a, T: Coefficient> NeighborhoodCache<'a, T> {
    pub fn new(adjacency: &'a QuboAdjacency<T>, x: Assignment) -> Result<Self> {
        check_len(&x, adjacency.n)?;
        let field = compute_fields(adjacency, &x);
        let energy = adjacency.energy(&x)?;
        Ok(NeighborhoodCache {
            adjacency,
            x,
            field,
            energy,
        })
    }

    pub fn assignment(&self) -> &Assignment {
        &self.x
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn field(&self, i: usize) -> T {
        self.field[i]
    }

    /// `energy(x with bit i flipped) - energy(x)`, in `O(1)`.
    #[inline]
    pub fn flip_delta(&self, i: usize) -> T {
        if self.x.get(i) {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    /// Flips bit `i`, updates the neighbor fields and returns the delta.
    #[inline]
    pub fn flip(&mut self, i: usize) -> T {
        let delta = self.flip_delta(i);
        let now_set = !self.x.get(i);
        self.x.flip(i);
        self.energy += delta;
        let (nbrs, coeffs) = self.adjacency.row(i);
        if now_set {
            for (&j, &c) in nbrs.iter().zip(coeffs) {
                self.field[j as usize] += c;
            }
        } else {
            for (&j, &c) in nbrs.iter().zip(coeffs) {
                self.field[j as usize] -= c;
            }
        }
        delta
    }

    /// Replaces the assignment, recomputing everything in `O(n + nnz)`.
    pub fn reset(&mut self, x: Assignment) -> Result<()> {
        check_len(&x, self.adjacency.n)?;
        self.field = compute_fields(self.adjacency, &x);
        self.energy = self.adjacency.energy(&x)?;
        self.x = x;
        Ok(())
    }

    /// Recomputes fields and energy from scratch and reports any drift.
    pub fn validate(&self) -> Result<()> {
        let fresh = compute_fields(self.adjacency, &self.x);
        if let Some(i) = (0..fresh.len()).find(|&i| fresh[i] != self.field[i]) {
            return Err(Error::input(format!(
                "stale neighborhood cache: field {i} is {:?}, expected {:?}",
                self.field[i], fresh[i]
            )));
        }
        let energy = self.adjacency.energy(&self.x)?;
        if energy != self.energy {
            return Err(Error::input(format!(
                "stale neighborhood cache: energy is {:?}, expected {energy:?}",
                self.energy
            )));
        }
        Ok(())
    }
}

fn compute_fields<T: Coefficient>(adjacency: &QuboAdjacency<T>, x: &Assignment) -> Vec<T> {
    let bits = x.bits();
    (0..adjacency.n)
        .map(|i| {
            let (nbrs, coeffs) = adjacency.row(i);
            let mut f = adjacency.linear[i];
            for (&j, &c) in nbrs.iter().zip(coeffs) {
                if bits[j as usize] {
                    f += c;
                }
            }
            f
        })
        .collect()
}
