//! Finite ground spaces and dense real-valued tables on their squares.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered, finite set of labelled points. Point ids are positions in the
/// label list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSpace {
    labels: Vec<String>,
}

impl GroundSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Ground space labelled `0, 1, ..., n-1`.
    pub fn indexed(n: usize) -> Self {
        Self {
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn ids(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn subspace(&self, ids: &[usize]) -> Self {
        Self {
            labels: ids.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// Structural flags of a table, as measured (never assumed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TableProperties {
    pub symmetric: bool,
    pub zero_diagonal: bool,
    pub nonnegative: bool,
    pub triangle: bool,
}

impl TableProperties {
    pub fn is_pseudometric(&self) -> bool {
        self.symmetric && self.zero_diagonal && self.nonnegative && self.triangle
    }
}

/// A real function `p : X x X -> R` stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionTable {
    ground: GroundSpace,
    values: Vec<f64>,
}

impl FunctionTable {
    pub fn new(ground: GroundSpace, values: Vec<f64>) -> Result<Self> {
        let n = ground.len();
        if values.len() != n * n {
            return Err(Error::NotSquare {
                expected: n,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k / n, k % n));
        }
        Ok(Self { ground, values })
    }

    pub fn from_rows(ground: GroundSpace, rows: &[Vec<f64>]) -> Result<Self> {
        let n = ground.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            let got = rows.iter().map(Vec::len).sum();
            return Err(Error::NotSquare { expected: n, got });
        }
        Self::new(ground, rows.concat())
    }

    pub fn from_fn(ground: GroundSpace, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = ground.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self::new(ground, values)
    }

    pub fn constant(ground: GroundSpace, c: f64) -> Result<Self> {
        let n = ground.len();
        Self::new(ground, vec![c; n * n])
    }

    pub fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ground.len() + j]
    }

    pub fn try_get(&self, i: usize, j: usize) -> Result<f64> {
        let len = self.len();
        for id in [i, j] {
            if id >= len {
                return Err(Error::UnknownId { id, len });
            }
        }
        Ok(self.get(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.ground.len();
        self.values[i * n + j] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// `sup |p(x, y)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Restriction to the given ids, in the given order.
    pub fn restrict(&self, ids: &[usize]) -> Self {
        let values = ids
            .iter()
            .flat_map(|&i| ids.iter().map(move |&j| self.get(i, j)))
            .collect();
        Self {
            ground: self.ground.subspace(ids),
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            ground: self.ground.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `alpha * self + beta * other` on a common ground space.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!(self.len(), other.len(), "tables on different ground spaces");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Self {
            ground: self.ground.clone(),
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "tables on different ground spaces");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn properties(&self, tol: f64) -> TableProperties {
        let n = self.len();
        let mut props = TableProperties {
            symmetric: true,
            zero_diagonal: true,
            nonnegative: true,
            triangle: true,
        };
        for i in 0..n {
            if self.get(i, i).abs() > tol {
                props.zero_diagonal = false;
            }
            for j in 0..n {
                let v = self.get(i, j);
                if v < -tol {
                    props.nonnegative = false;
                }
                if v != self.get(j, i) {
                    props.symmetric = false;
                }
                if props.triangle {
                    for k in 0..n {
                        if v > self.get(i, k) + self.get(k, j) + tol {
                            props.triangle = false;
                            break;
                        }
                    }
                }
            }
        }
        props
    }

    pub fn is_pseudometric(&self, tol: f64) -> bool {
        self.properties(tol).is_pseudometric()
    }

    /// Pseudometric that is strictly positive (beyond `tol`) off the diagonal.
    pub fn is_metric(&self, tol: f64) -> bool {
        self.is_pseudometric(tol)
            && (0..self.len()).all(|i| (0..self.len()).all(|j| i == j || self.get(i, j) > tol))
    }
}
