use std::collections::BTreeMap;

use rayon::prelude::*;

use super::pipeline::Pipeline;
use crate::error::{Error, Result};
use crate::sj::pair_weights;
use crate::table::{FunctionTable, GroundSpace};

/// The extension operator as an explicit sparse matrix: every output entry
/// `(y, y')` is a fixed combination of input entries `p(i, j)`.
///
/// Only `y <= y'` is stored; the entry `(y', y)` uses the same coefficients on
/// the transposed input, which is exactly how the lift treats swapped
/// arguments. Symmetric inputs therefore give bitwise symmetric outputs.
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    ground: GroundSpace,
    nx: usize,
    kernels: Vec<Vec<((usize, usize), f64)>>,
}

fn triangle_index(n: usize, y: usize, y2: usize) -> usize {
    y * n - y * (y + 1) / 2 + y2
}

impl CompiledOperator {
    pub(crate) fn from_pipeline(pipeline: &Pipeline) -> Self {
        let space = pipeline.space();
        let n = space.len();
        let nx = space.subset().len();
        let (a, b) = pipeline.base_points();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|y| (y..n).map(move |y2| (y, y2))).collect();
        let kernels = pairs
            .par_iter()
            .map(|&(y, y2)| {
                let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                let mut add = |i: usize, j: usize, c: f64| *acc.entry((i, j)).or_insert(0.0) += c;
                for (level, &w) in pipeline.levels().iter().zip(pipeline.weights()) {
                    for ((i, j), c) in pair_weights(&level.f[y], &level.f[y2]) {
                        let c = w * c;
                        match (i < nx, j < nx) {
                            (true, true) => add(i, j, c),
                            (true, false) => {
                                add(i, a, 0.5 * c);
                                add(i, b, 0.5 * c);
                            }
                            (false, true) => {
                                add(a, j, 0.5 * c);
                                add(b, j, 0.5 * c);
                            }
                            (false, false) if i == j => {
                                add(a, a, 0.5 * c);
                                add(b, b, 0.5 * c);
                            }
                            (false, false) => {
                                add(a, b, 0.5 * c);
                                add(b, a, 0.5 * c);
                            }
                        }
                    }
                }
                acc.into_iter().filter(|&(_, c)| c != 0.0).collect()
            })
            .collect();
        Self {
            ground: space.ground().clone(),
            nx,
            kernels,
        }
    }

    pub fn input_len(&self) -> usize {
        self.nx
    }

    pub fn output_len(&self) -> usize {
        self.ground.len()
    }

    /// Number of stored coefficients.
    pub fn nnz(&self) -> usize {
        self.kernels.iter().map(Vec::len).sum()
    }

    /// Coefficients of output entry `(y, y')` on the input entries.
    pub fn coefficients(&self, y: usize, y2: usize) -> Vec<((usize, usize), f64)> {
        let n = self.output_len();
        if y <= y2 {
            self.kernels[triangle_index(n, y, y2)].clone()
        } else {
            let mut out: Vec<_> = self.kernels[triangle_index(n, y2, y)]
                .iter()
                .map(|&((i, j), c)| ((j, i), c))
                .collect();
            out.sort_by_key(|&(ij, _)| ij);
            out
        }
    }

    pub fn apply(&self, p: &FunctionTable) -> Result<FunctionTable> {
        if p.len() != self.nx {
            return Err(Error::Config(format!(
                "p must be indexed by the {} points of X, got {}",
                self.nx,
                p.len()
            )));
        }
        let n = self.output_len();
        let values: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (y, y2) = (k / n, k % n);
                if y <= y2 {
                    self.kernels[triangle_index(n, y, y2)]
                        .iter()
                        .map(|&((i, j), c)| c * p.get(i, j))
                        .sum()
                } else {
                    self.kernels[triangle_index(n, y2, y)]
                        .iter()
                        .map(|&((i, j), c)| c * p.get(j, i))
                        .sum()
                }
            })
            .collect();
        FunctionTable::new(self.ground.clone(), values)
    }
}
