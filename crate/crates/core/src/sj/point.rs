use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A point of the iterated squeezed join `SJ^∞(X)` over a finite ground
/// alphabet of ids.
///
/// `Join` denotes the class `[left, right; t]` inside the segment that lives
/// in `SJ^level(X)`; both children are points of `SJ^(level-1)(X)`. Levels
/// are carried explicitly because the same pair of children joined in
/// different copies of the squeezed join are different points, and collapsing
/// a degenerate child must not move its parent to another copy.
#[derive(Debug, Clone, PartialEq)]
pub enum SjPoint {
    Leaf(usize),
    Join(Box<Join>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Join {
    left: SjPoint,
    right: SjPoint,
    t: f64,
    level: u32,
}

impl Join {
    pub fn left(&self) -> &SjPoint {
        &self.left
    }

    pub fn right(&self) -> &SjPoint {
        &self.right
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn level(&self) -> u32 {
        self.level
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

impl SjPoint {
    pub fn leaf(id: usize) -> Self {
        SjPoint::Leaf(id)
    }

    /// `[left, right; t]` in the lowest copy of the squeezed join that
    /// contains both children.
    pub fn join(left: SjPoint, right: SjPoint, t: f64) -> Result<Self> {
        let level = 1 + left.level().max(right.level());
        Self::join_at(left, right, t, level)
    }

    /// `[left, right; t]_level`.
    pub fn join_at(left: SjPoint, right: SjPoint, t: f64, level: u32) -> Result<Self> {
        check_unit("t", t)?;
        let child_max = left.level().max(right.level());
        if level <= child_max {
            return Err(Error::InvalidLevel { level, child_max });
        }
        Ok(SjPoint::Join(Box::new(Join {
            left,
            right,
            t,
            level,
        })))
    }

    pub fn level(&self) -> u32 {
        match self {
            SjPoint::Leaf(_) => 0,
            SjPoint::Join(j) => j.level,
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            SjPoint::Leaf(_) => 0,
            SjPoint::Join(j) => 1 + j.left.depth().max(j.right.depth()),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SjPoint::Leaf(_))
    }

    pub fn as_join(&self) -> Option<&Join> {
        match self {
            SjPoint::Leaf(_) => None,
            SjPoint::Join(j) => Some(j),
        }
    }

    /// Unique representative of the equivalence class: bottom-up,
    /// `[l, r; 0] -> l`, `[l, r; 1] -> r` and `[u, u; t] -> u`.
    pub fn canonicalize(&self) -> SjPoint {
        match self {
            SjPoint::Leaf(_) => self.clone(),
            SjPoint::Join(j) => {
                if j.t == 0.0 {
                    return j.left.canonicalize();
                }
                if j.t == 1.0 {
                    return j.right.canonicalize();
                }
                let left = j.left.canonicalize();
                let right = j.right.canonicalize();
                if left == right {
                    left
                } else {
                    SjPoint::Join(Box::new(Join {
                        left,
                        right,
                        t: j.t,
                        level: j.level,
                    }))
                }
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            SjPoint::Leaf(_) => true,
            SjPoint::Join(j) => {
                j.t > 0.0
                    && j.t < 1.0
                    && j.left != j.right
                    && j.left.is_canonical()
                    && j.right.is_canonical()
            }
        }
    }

    /// Ground ids the point depends on, computed on the canonical form.
    pub fn support(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.canonicalize().collect_leaves(&mut out);
        out
    }

    /// Every leaf id occurring in the tree, degenerate branches included.
    pub fn leaves(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<usize>) {
        match self {
            SjPoint::Leaf(x) => {
                out.insert(*x);
            }
            SjPoint::Join(j) => {
                j.left.collect_leaves(out);
                j.right.collect_leaves(out);
            }
        }
    }

    pub fn max_id(&self) -> usize {
        match self {
            SjPoint::Leaf(x) => *x,
            SjPoint::Join(j) => j.left.max_id().max(j.right.max_id()),
        }
    }

    /// Convex weights on ground points such that for every `p` and ground `x`,
    /// `sj(p)(self, x) = Σ w_i p(x_i, x)`. Sorted by id, zero weights dropped.
    pub fn base_weights(&self) -> Vec<(usize, f64)> {
        let mut acc = BTreeMap::new();
        self.accumulate_weights(1.0, &mut acc);
        acc.into_iter().filter(|&(_, w)| w > 0.0).collect()
    }

    fn accumulate_weights(&self, scale: f64, acc: &mut BTreeMap<usize, f64>) {
        match self {
            SjPoint::Leaf(x) => *acc.entry(*x).or_insert(0.0) += scale,
            SjPoint::Join(j) => {
                j.left.accumulate_weights(scale * (1.0 - j.t), acc);
                j.right.accumulate_weights(scale * j.t, acc);
            }
        }
    }

    /// Image under a map of ground alphabets (the functor `SJ^∞(f)`).
    pub fn relabel(&self, f: &impl Fn(usize) -> usize) -> SjPoint {
        match self {
            SjPoint::Leaf(x) => SjPoint::Leaf(f(*x)),
            SjPoint::Join(j) => SjPoint::Join(Box::new(Join {
                left: j.left.relabel(f),
                right: j.right.relabel(f),
                t: j.t,
                level: j.level,
            })),
        }
    }
}

impl fmt::Display for SjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SjPoint::Leaf(x) => write!(f, "{x}"),
            SjPoint::Join(j) => write!(f, "[{}, {}; {}]_{}", j.left, j.right, j.t, j.level),
        }
    }
}
