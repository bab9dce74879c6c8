//! Finite covers, partitions of unity and the maps from nerve simplices into
//! the iterated squeezed join.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sj::SjPoint;
use crate::table::{FunctionTable, GroundSpace};
use crate::verify::check_metric;

/// A finite metric space `(Y, d)` with a distinguished subset `X`.
///
/// `d` is stored rescaled so that `max d = 1`; `scale` recovers the input
/// units. Points of `X` are addressed either by their id in `Y` or by their
/// position in the subset list.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    d: FunctionTable,
    scale: f64,
    subset: Vec<usize>,
    x_position: Vec<Option<usize>>,
}

impl AmbientSpace {
    /// Validates that `d` is a metric (asymmetry up to `tol` is averaged out)
    /// and that `subset` is a nonempty list of distinct ids.
    pub fn new(d: FunctionTable, subset: Vec<usize>, tol: f64) -> Result<Self> {
        let n = d.len();
        let mut asym = (0.0, vec![]);
        for i in 0..n {
            for j in 0..n {
                let dev = (d.get(i, j) - d.get(j, i)).abs();
                if dev > asym.0 {
                    asym = (dev, vec![i, j]);
                }
            }
        }
        if asym.0 > tol {
            return Err(Error::NotAMetric {
                check: "symmetry".into(),
                witness: asym.1,
                worst: asym.0,
            });
        }
        let d =
            FunctionTable::from_fn(d.ground().clone(), |i, j| 0.5 * (d.get(i, j) + d.get(j, i)))?;
        let report = check_metric(&d, tol);
        if let Some(fail) = report.failures().next() {
            return Err(Error::NotAMetric {
                check: fail.name.clone(),
                witness: fail.witness.clone(),
                worst: fail.worst,
            });
        }

        if subset.is_empty() {
            return Err(Error::Degenerate("the subset X is empty".into()));
        }
        let mut x_position = vec![None; n];
        for (pos, &y) in subset.iter().enumerate() {
            if y >= n {
                return Err(Error::UnknownId { id: y, len: n });
            }
            if x_position[y].replace(pos).is_some() {
                return Err(Error::Config(format!(
                    "point {y} listed twice in the subset"
                )));
            }
        }

        let max = d.max_value();
        let scale = if max > 0.0 { max } else { 1.0 };
        let d = d.scale(1.0 / scale);
        Ok(Self {
            d,
            scale,
            subset,
            x_position,
        })
    }

    /// Normalized metric, `‖d‖ <= 1`.
    pub fn d(&self) -> &FunctionTable {
        &self.d
    }

    pub fn dist(&self, y: usize, z: usize) -> f64 {
        self.d.get(y, z)
    }

    /// Factor by which the input metric was divided.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn ground(&self) -> &GroundSpace {
        self.d.ground()
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// `X` as ids of `Y`, in subset order.
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn x_position(&self, y: usize) -> Option<usize> {
        self.x_position[y]
    }

    pub fn in_subset(&self, y: usize) -> bool {
        self.x_position[y].is_some()
    }

    /// `Y \ X` in id order.
    pub fn exterior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&y| !self.in_subset(y)).collect()
    }

    /// Normalized `d` restricted to `X`, indexed by subset position.
    pub fn d_x(&self) -> FunctionTable {
        self.d.restrict(&self.subset)
    }

    /// `d(y, X)`.
    pub fn dist_to_subset(&self, y: usize) -> f64 {
        self.subset
            .iter()
            .map(|&x| self.dist(y, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest positive distance between distinct points of `ids`.
    pub fn min_separation(&self, ids: &[usize]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (k, &a) in ids.iter().enumerate() {
            for &b in &ids[k + 1..] {
                let v = self.dist(a, b);
                best = Some(best.map_or(v, |m| m.min(v)));
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSet {
    /// Sorted ids of `Y`.
    pub members: Vec<usize>,
    pub center: usize,
    pub radius: f64,
}

impl CoverSet {
    pub fn contains(&self, y: usize) -> bool {
        self.members.binary_search(&y).is_ok()
    }

    pub fn diameter(&self, space: &AmbientSpace) -> f64 {
        let mut diam: f64 = 0.0;
        for &a in &self.members {
            for &b in &self.members {
                diam = diam.max(space.dist(a, b));
            }
        }
        diam
    }
}

/// A finite cover of `region` with optional anchors `a(U)`, given as subset
/// positions of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub sets: Vec<CoverSet>,
    pub region: Vec<usize>,
    pub anchors: Option<Vec<usize>>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn containing(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.contains(y))
            .map(|(k, _)| k)
    }

    pub fn is_complete(&self) -> bool {
        self.region
            .iter()
            .all(|&y| self.containing(y).next().is_some())
    }

    pub fn max_diameter(&self, space: &AmbientSpace) -> f64 {
        self.sets
            .iter()
            .map(|s| s.diameter(space))
            .fold(0.0, f64::max)
    }

    /// `u(y)`: `{y}` for `y` in `X`, otherwise the anchors of the sets
    /// containing `y`. Subset positions.
    pub fn anchor_set(&self, space: &AmbientSpace, y: usize) -> BTreeSet<usize> {
        if let Some(pos) = space.x_position(y) {
            return BTreeSet::from([pos]);
        }
        match &self.anchors {
            Some(anchors) => self.containing(y).map(|k| anchors[k]).collect(),
            None => BTreeSet::new(),
        }
    }
}

/// Cover of `region` by the open balls `{y : d(c, y) < radius}` centered at
/// every point `c` of the region. Each set has diameter `< 2 radius`.
pub fn build_cover(space: &AmbientSpace, region: &[usize], radius: f64) -> Result<Cover> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!(
            "cover radius must be positive, got {radius}"
        )));
    }
    let mut region = region.to_vec();
    region.sort_unstable();
    region.dedup();
    if let Some(&bad) = region.iter().find(|&&y| y >= space.len()) {
        return Err(Error::UnknownId {
            id: bad,
            len: space.len(),
        });
    }
    let sets = region
        .iter()
        .map(|&c| CoverSet {
            members: region
                .iter()
                .copied()
                .filter(|&y| space.dist(c, y) < radius)
                .collect(),
            center: c,
            radius,
        })
        .collect();
    Ok(Cover {
        sets,
        region,
        anchors: None,
    })
}

/// Anchors every set at the point of `X` nearest to its center, ties to the
/// smallest id.
pub fn anchor_cover(space: &AmbientSpace, cover: Cover) -> Result<Cover> {
    if space.subset().is_empty() {
        return Err(Error::Degenerate(
            "cannot anchor a cover without points of X".into(),
        ));
    }
    let anchors = cover
        .sets
        .iter()
        .map(|s| {
            let (_, _, pos) = space
                .subset()
                .iter()
                .enumerate()
                .map(|(pos, &x)| (space.dist(s.center, x), x, pos))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("nonempty subset");
            pos
        })
        .collect();
    Ok(Cover {
        anchors: Some(anchors),
        ..cover
    })
}

/// Normalized tent weights `λ_U(y)`, stored sparsely per point of `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    weights: Vec<Vec<(usize, f64)>>,
}

impl PartitionOfUnity {
    /// Nonzero `(set id, λ)` pairs at `y`, sorted by set id. Empty outside the
    /// covered region.
    pub fn weights(&self, y: usize) -> &[(usize, f64)] {
        &self.weights[y]
    }

    pub fn nerve_point(&self, y: usize) -> Result<NervePoint> {
        NervePoint::new(self.weights[y].clone())
    }
}

/// `λ_U(y) = μ_U(y) / Σ_V μ_V(y)` with `μ_U(y) = max(0, 1 - d(y, c_U) / r_U)`
/// for `y ∈ U`.
pub fn partition_of_unity(space: &AmbientSpace, cover: &Cover) -> Result<PartitionOfUnity> {
    let mut weights = vec![Vec::new(); space.len()];
    for &y in &cover.region {
        let raw: Vec<(usize, f64)> = cover
            .sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(y))
            .map(|(k, s)| (k, (1.0 - space.dist(y, s.center) / s.radius).max(0.0)))
            .filter(|&(_, mu)| mu > 0.0)
            .collect();
        let total: f64 = raw.iter().map(|&(_, mu)| mu).sum();
        if !(total > 0.0) {
            return Err(Error::Uncovered(y));
        }
        weights[y] = raw.into_iter().map(|(k, mu)| (k, mu / total)).collect();
    }
    Ok(PartitionOfUnity { weights })
}

/// Barycentric coordinates of a point in a simplex of a nerve.
#[derive(Debug, Clone, PartialEq)]
pub struct NervePoint {
    coords: Vec<(usize, f64)>,
}

const BARYCENTRIC_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-13;

impl NervePoint {
    /// Positive weights summing to one; vertex order is normalized.
    pub fn new(mut coords: Vec<(usize, f64)>) -> Result<Self> {
        let sum: f64 = coords.iter().map(|&(_, w)| w).sum();
        if coords.is_empty()
            || coords.iter().any(|&(_, w)| !(w > 0.0))
            || (sum - 1.0).abs() > BARYCENTRIC_TOL
        {
            return Err(Error::InvalidBarycentric { sum });
        }
        coords.sort_by_key(|&(v, _)| v);
        if coords.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidBarycentric { sum });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[(usize, f64)] {
        &self.coords
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.iter().map(|&(v, _)| v)
    }

    /// Writes the point as `(1 - t) y + t b`, with `b` the barycenter of its
    /// simplex and `y` on the proper face spanned by the non-minimal vertices.
    /// `None` for a vertex. At the barycenter `t = 1` and the face is empty.
    pub fn radial_decomposition(&self) -> Option<(f64, Vec<(usize, f64)>)> {
        if self.coords.len() == 1 {
            return None;
        }
        let k1 = self.coords.len() as f64;
        let min = self
            .coords
            .iter()
            .map(|&(_, w)| w)
            .fold(f64::INFINITY, f64::min);
        let t = k1 * min;
        if t >= 1.0 - TIE_TOL {
            return Some((1.0, Vec::new()));
        }
        let face: Vec<(usize, f64)> = self
            .coords
            .iter()
            .map(|&(v, w)| (v, w - min))
            .filter(|&(_, w)| w > TIE_TOL)
            .collect();
        let total: f64 = face.iter().map(|&(_, w)| w).sum();
        Some((t, face.into_iter().map(|(v, w)| (v, w / total)).collect()))
    }
}

/// Maps a point of a nerve simplex into `SJ^∞` by radial decomposition: the
/// barycenter goes to the label of the smallest vertex and `(1 - t) y + t b`
/// goes to `[image(y), label(b); t]` in the copy `offset + k` for a
/// `k`-simplex, where `offset` is the highest label level.
pub fn simplex_to_sj<L>(point: &NervePoint, labels: L) -> Result<SjPoint>
where
    L: Fn(usize) -> Option<SjPoint>,
{
    let mut offset = 0;
    for v in point.vertices() {
        offset = offset.max(labels(v).ok_or(Error::MissingLabel(v))?.level());
    }
    radial(point, &labels, offset)
}

fn radial<L>(point: &NervePoint, labels: &L, offset: u32) -> Result<SjPoint>
where
    L: Fn(usize) -> Option<SjPoint>,
{
    let first = point.coords[0].0;
    let barycenter_label = labels(first).ok_or(Error::MissingLabel(first))?;
    match point.radial_decomposition() {
        None => Ok(barycenter_label),
        Some((t, _)) if t >= 1.0 => Ok(barycenter_label),
        Some((t, face)) => {
            let k = (point.coords.len() - 1) as u32;
            let inner = radial(&NervePoint { coords: face }, labels, offset)?;
            Ok(SjPoint::join_at(inner, barycenter_label, t, offset + k)?.canonicalize())
        }
    }
}

/// `h : Y -> SJ^∞(X)`: the identity on `X` and, off `X`, the radial image of
/// the nerve coordinates under the labels `U ↦ a(U)`. Leaves are subset
/// positions.
pub fn borges_map_h(space: &AmbientSpace, exterior_cover: &Cover) -> Result<Vec<SjPoint>> {
    let anchors = exterior_cover
        .anchors
        .as_ref()
        .ok_or_else(|| Error::Precondition("the exterior cover has no anchors".into()))?;
    if let Some(&y) = space
        .exterior()
        .iter()
        .find(|&&y| exterior_cover.containing(y).next().is_none())
    {
        return Err(Error::Uncovered(y));
    }
    let pou = partition_of_unity(space, exterior_cover)?;
    (0..space.len())
        .map(|y| match space.x_position(y) {
            Some(pos) => Ok(SjPoint::leaf(pos)),
            None => {
                let point = pou.nerve_point(y)?;
                simplex_to_sj(&point, |k| anchors.get(k).map(|&a| SjPoint::leaf(a)))
            }
        })
        .collect()
}
