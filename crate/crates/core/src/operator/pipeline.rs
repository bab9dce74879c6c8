use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compiled::CompiledOperator;
use super::config::ExtensionConfig;
use crate::error::{Error, Result};
use crate::nerve::{
    anchor_cover, borges_map_h, build_cover, partition_of_unity, simplex_to_sj, AmbientSpace, Cover,
};
use crate::sj::{sj_eval, sj_eval_with, SjPoint};
use crate::table::{FunctionTable, GroundSpace};
use crate::verify::check_metric;

/// Largest truncation the default rule may pick before asking for an
/// explicit value.
pub const MAX_DEFAULT_TRUNCATION: u32 = 4096;

/// `χ(y) = min_x d(y, x) + sj^∞(d_X)(h(y), x)`.
pub fn chi(space: &AmbientSpace, h: &[SjPoint], y: usize) -> f64 {
    let d_x = space.d_x();
    chi_with(space, &d_x, h, y)
}

fn chi_with(space: &AmbientSpace, d_x: &FunctionTable, h: &[SjPoint], y: usize) -> f64 {
    space
        .subset()
        .iter()
        .enumerate()
        .map(|(pos, &x)| {
            space.dist(y, x) + sj_eval_with(&|i, j| d_x.get(i, j), &h[y], &SjPoint::leaf(pos))
        })
        .fold(f64::INFINITY, f64::min)
}

/// `χ_n(y) = min(1, n χ(y))`.
pub fn chi_n(chi: f64, n: u32) -> f64 {
    (n as f64 * chi).min(1.0)
}

/// Entry of `E_n(p)` on `X ⊔ U_n`, where ids below `nx` are points of `X`
/// and the rest are sets of `U_n`.
///
/// On the `U_n` diagonal the value is `(p(a,a) + p(b,b)) / 2`, which is zero
/// for pseudometrics and keeps the unit function fixed. Between distinct sets
/// the value is the symmetric part of `p(a, b)`.
#[inline]
pub fn e_n_entry(p: &FunctionTable, a: usize, b: usize, nx: usize, i: usize, j: usize) -> f64 {
    match (i < nx, j < nx) {
        (true, true) => p.get(i, j),
        (true, false) => 0.5 * p.get(i, a) + 0.5 * p.get(i, b),
        (false, true) => 0.5 * p.get(a, j) + 0.5 * p.get(b, j),
        (false, false) if i == j => 0.5 * (p.get(a, a) + p.get(b, b)),
        (false, false) => 0.5 * (p.get(a, b) + p.get(b, a)),
    }
}

/// The table `E_n(p)` on `X ⊔ U_n` with `sets` elements in `U_n`.
pub fn e_n(p: &FunctionTable, a: usize, b: usize, sets: usize) -> Result<FunctionTable> {
    let nx = p.len();
    for id in [a, b] {
        if id >= nx {
            return Err(Error::UnknownId { id, len: nx });
        }
    }
    if a == b {
        return Err(Error::Config(format!(
            "base points must be distinct, got a = b = {a}"
        )));
    }
    let mut labels: Vec<String> = p.ground().labels().to_vec();
    labels.extend((0..sets).map(|k| format!("U{k}")));
    let ground = GroundSpace::new(labels).unwrap_or_else(|_| GroundSpace::indexed(nx + sets));
    FunctionTable::from_fn(ground, |i, j| e_n_entry(p, a, b, nx, i, j))
}

/// The pair of `X` positions with the largest `p` value, ties broken
/// lexicographically.
pub fn default_base_points(p: &FunctionTable) -> Result<(usize, usize)> {
    let n = p.len();
    if n < 2 {
        return Err(Error::Degenerate(
            "X needs at least two points to fix a base pair".into(),
        ));
    }
    let mut best = (0, 1);
    for i in 0..n {
        for j in 0..n {
            if i != j && p.get(i, j) > p.get(best.0, best.1) {
                best = (i, j);
            }
        }
    }
    Ok(best)
}

/// Smallest `N >= 1` with `2^{1-N}` below every distinct distance of `Y` and
/// `N χ(y) >= 1` for every `y` off `X`.
pub fn default_truncation(space: &AmbientSpace, chi: &[f64]) -> Result<u32> {
    let ids: Vec<usize> = (0..space.len()).collect();
    let min_sep = space.min_separation(&ids);
    let min_chi = space
        .exterior()
        .iter()
        .map(|&y| chi[y])
        .fold(f64::INFINITY, f64::min);
    let mut n = 1u32;
    while !truncation_is_sufficient(n, min_sep, min_chi) {
        n += 1;
        if n > MAX_DEFAULT_TRUNCATION {
            return Err(Error::Config(format!(
                "the default truncation would exceed {MAX_DEFAULT_TRUNCATION} levels; pass one explicitly"
            )));
        }
    }
    Ok(n)
}

fn truncation_is_sufficient(n: u32, min_sep: Option<f64>, min_chi: f64) -> bool {
    let separated = min_sep.is_none_or(|s| 0.5f64.powi(n as i32 - 1) < s);
    let saturated = !min_chi.is_finite() || n as f64 * min_chi >= 1.0;
    separated && saturated
}

/// Per-level artifacts: the cover `U_n` of `Y`, the nerve map `q_n`, the
/// cutoff `χ_n` and the composite `f_n`. Leaves of `f_n` below `|X|` are
/// subset positions; leaf `|X| + k` is the set `k` of `U_n`.
#[derive(Debug, Clone)]
pub struct Level {
    pub n: u32,
    pub radius: f64,
    pub cover: Cover,
    pub q: Vec<SjPoint>,
    pub chi_n: Vec<f64>,
    pub join_level: u32,
    pub f: Vec<SjPoint>,
}

impl Level {
    pub fn sets(&self) -> usize {
        self.cover.len()
    }
}

/// Settings actually used for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExtensionConfig,
    /// Base points as subset positions.
    pub a: usize,
    pub b: usize,
    pub a_label: String,
    pub b_label: String,
    pub truncation: u32,
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
    pub exterior_radius: Option<f64>,
    /// Factor the input metric was divided by.
    pub d_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedTable {
    pub values: FunctionTable,
    pub provenance: Provenance,
    /// Bound on the distance to the untruncated series, in sup norm.
    pub tail_bound: f64,
}

/// All data of the extension operator for a fixed space, configuration and
/// base pair. Immutable once built; applying it to `p` is linear.
#[derive(Debug, Clone)]
pub struct Pipeline {
    space: AmbientSpace,
    config: ExtensionConfig,
    a: usize,
    b: usize,
    exterior_cover: Option<Cover>,
    exterior_radius: Option<f64>,
    h: Vec<SjPoint>,
    chi: Vec<f64>,
    levels: Vec<Level>,
    weights: Vec<f64>,
}

impl Pipeline {
    /// Builds every level for base points `(a, b)` given as subset positions.
    pub fn build(
        space: &AmbientSpace,
        config: &ExtensionConfig,
        (a, b): (usize, usize),
    ) -> Result<Self> {
        config.validate()?;
        let nx = space.subset().len();
        if nx < 2 {
            return Err(Error::Degenerate("X needs at least two points".into()));
        }
        for id in [a, b] {
            if id >= nx {
                return Err(Error::UnknownId { id, len: nx });
            }
        }
        if a == b {
            return Err(Error::Config(format!(
                "base points must be distinct, got a = b = {a}"
            )));
        }

        let exterior = space.exterior();
        let (exterior_cover, exterior_radius, h) = if exterior.is_empty() {
            let h = (0..space.len())
                .map(|y| SjPoint::leaf(space.x_position(y).expect("every point is in X")))
                .collect();
            (None, None, h)
        } else {
            let radius = match config.exterior_radius {
                Some(r) => r,
                None => {
                    0.5 * exterior
                        .iter()
                        .map(|&y| space.dist_to_subset(y))
                        .fold(f64::INFINITY, f64::min)
                }
            };
            let cover = anchor_cover(space, build_cover(space, &exterior, radius)?)?;
            let h = borges_map_h(space, &cover)?;
            (Some(cover), Some(radius), h)
        };

        let d_x = space.d_x();
        let chi: Vec<f64> = (0..space.len())
            .map(|y| chi_with(space, &d_x, &h, y))
            .collect();

        let truncation = match config.truncation {
            Some(n) => {
                if config.require_metric {
                    let ids: Vec<usize> = (0..space.len()).collect();
                    let min_chi = exterior
                        .iter()
                        .map(|&y| chi[y])
                        .fold(f64::INFINITY, f64::min);
                    if !truncation_is_sufficient(n, space.min_separation(&ids), min_chi) {
                        return Err(Error::Config(format!(
                            "truncation N = {n} is too small for the positivity floors to apply to every pair"
                        )));
                    }
                }
                n
            }
            None => default_truncation(space, &chi)?,
        };

        let all: Vec<usize> = (0..space.len()).collect();
        let levels = (1..=truncation)
            .into_par_iter()
            .map(|n| build_level(space, config, &h, &chi, &all, n))
            .collect::<Result<Vec<_>>>()?;

        let raw: Vec<f64> = (1..=truncation).map(|n| 0.5f64.powi(n as i32)).collect();
        let weights = if config.normalize_weights {
            let mass = 1.0 - 0.5f64.powi(truncation as i32);
            raw.iter().map(|w| w / mass).collect()
        } else {
            raw
        };

        Ok(Self {
            space: space.clone(),
            config: config.clone(),
            a,
            b,
            exterior_cover,
            exterior_radius,
            h,
            chi,
            levels,
            weights,
        })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn config(&self) -> &ExtensionConfig {
        &self.config
    }

    pub fn base_points(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn truncation(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn h(&self) -> &[SjPoint] {
        &self.h
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, n: u32) -> Option<&Level> {
        n.checked_sub(1).and_then(|k| self.levels.get(k as usize))
    }

    pub fn exterior_cover(&self) -> Option<&Cover> {
        self.exterior_cover.as_ref()
    }

    fn check_input(&self, p: &FunctionTable) -> Result<()> {
        let nx = self.space.subset().len();
        if p.len() != nx {
            return Err(Error::Config(format!(
                "p must be indexed by the {nx} points of X, got {}",
                p.len()
            )));
        }
        Ok(())
    }

    fn check_pair(&self, y: usize, y2: usize) -> Result<()> {
        let len = self.space.len();
        match [y, y2].into_iter().find(|&id| id >= len) {
            Some(id) => Err(Error::UnknownId { id, len }),
            None => Ok(()),
        }
    }

    /// `T_n(p)(y, y') = sj^∞(E_n(p))(f_n(y), f_n(y'))`.
    pub fn t_n(&self, p: &FunctionTable, n: u32, y: usize, y2: usize) -> Result<f64> {
        self.check_input(p)?;
        self.check_pair(y, y2)?;
        let level = self
            .level(n)
            .ok_or_else(|| Error::Config(format!("level {n} is beyond the truncation")))?;
        let e = e_n(p, self.a, self.b, level.sets())?;
        sj_eval(&e, &level.f[y], &level.f[y2])
    }

    fn value_unchecked(&self, p: &FunctionTable, y: usize, y2: usize) -> f64 {
        let nx = p.len();
        let (a, b) = (self.a, self.b);
        let kernel = |i: usize, j: usize| e_n_entry(p, a, b, nx, i, j);
        self.levels
            .iter()
            .zip(&self.weights)
            .map(|(level, w)| w * sj_eval_with(&kernel, &level.f[y], &level.f[y2]))
            .sum()
    }

    /// `Σ_n w_n T_n(p)(y, y')`.
    pub fn value_at(&self, p: &FunctionTable, y: usize, y2: usize) -> Result<f64> {
        self.check_input(p)?;
        self.check_pair(y, y2)?;
        Ok(self.value_unchecked(p, y, y2))
    }

    /// The truncated extension `Σ_n w_n T_n(p)` on `Y x Y`.
    pub fn apply(&self, p: &FunctionTable) -> Result<FunctionTable> {
        self.check_input(p)?;
        let ny = self.space.len();
        let values: Vec<f64> = (0..ny * ny)
            .into_par_iter()
            .map(|k| self.value_unchecked(p, k / ny, k % ny))
            .collect();
        FunctionTable::new(self.space.ground().clone(), values)
    }

    /// Precomputes, for every output entry, its coefficients on `p`.
    pub fn compile(&self) -> CompiledOperator {
        CompiledOperator::from_pipeline(self)
    }

    /// `2^{-N} ‖p‖` for raw weights; `2^{1-N} ‖p‖` when the kept weights are
    /// rescaled, since the rescaling itself moves the sum by `2^{-N} ‖p‖`.
    pub fn tail_bound(&self, p: &FunctionTable) -> f64 {
        let tail = 0.5f64.powi(self.truncation() as i32) * p.sup_norm();
        if self.config.normalize_weights {
            2.0 * tail
        } else {
            tail
        }
    }

    /// Smallest level `n <= N` with `n χ(y) >= 1`.
    pub fn saturation_level(&self, y: usize) -> Option<u32> {
        (1..=self.truncation()).find(|&n| n as f64 * self.chi[y] >= 1.0)
    }

    /// Smallest level `n <= N` with `d(y, y') > 2^{1-n}`.
    pub fn separation_level(&self, y: usize, y2: usize) -> Option<u32> {
        let d = self.space.dist(y, y2);
        (1..=self.truncation()).find(|&n| d > 0.5f64.powi(n as i32 - 1))
    }

    /// Guaranteed lower bound on the output at `(y, y')` for a metric `p`,
    /// when one of the floor levels exists.
    pub fn metric_floor(&self, p: &FunctionTable, y: usize, y2: usize) -> Option<f64> {
        let pab = p.get(self.a, self.b).min(p.get(self.b, self.a));
        let (in_y, in_y2) = (self.space.in_subset(y), self.space.in_subset(y2));
        match (in_y, in_y2) {
            (true, true) => None,
            (false, true) => self
                .saturation_level(y)
                .map(|n| self.weights[n as usize - 1] * 0.5 * pab),
            (true, false) => self
                .saturation_level(y2)
                .map(|n| self.weights[n as usize - 1] * 0.5 * pab),
            (false, false) if y == y2 => None,
            (false, false) => self.separation_level(y, y2).map(|n| {
                let c = chi_n(self.chi[y], n).min(chi_n(self.chi[y2], n));
                self.weights[n as usize - 1] * c * pab
            }),
        }
    }

    pub fn provenance(&self) -> Provenance {
        let labels = self.space.ground();
        let subset = self.space.subset();
        Provenance {
            config: self.config.clone(),
            a: self.a,
            b: self.b,
            a_label: labels.label(subset[self.a]).to_string(),
            b_label: labels.label(subset[self.b]).to_string(),
            truncation: self.truncation(),
            weights: self.weights.clone(),
            radii: self.levels.iter().map(|l| l.radius).collect(),
            exterior_radius: self.exterior_radius,
            d_scale: self.space.scale(),
            group_order: None,
            eps: None,
        }
    }

    pub fn extend(&self, p: &FunctionTable) -> Result<ExtendedTable> {
        Ok(ExtendedTable {
            values: self.apply(p)?,
            provenance: self.provenance(),
            tail_bound: self.tail_bound(p),
        })
    }
}

fn build_level(
    space: &AmbientSpace,
    config: &ExtensionConfig,
    h: &[SjPoint],
    chi: &[f64],
    all: &[usize],
    n: u32,
) -> Result<Level> {
    let nx = space.subset().len();
    let radius = config.radius_schedule.radius(n)?;
    let cover = build_cover(space, all, radius)?;
    let pou = partition_of_unity(space, &cover)?;
    let q = all
        .iter()
        .map(|&y| {
            simplex_to_sj(&pou.nerve_point(y)?, |k| {
                (k < cover.len()).then(|| SjPoint::leaf(k))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let chi_n: Vec<f64> = chi.iter().map(|&c| chi_n(c, n)).collect();
    let join_level = 1 + h.iter().chain(&q).map(SjPoint::level).max().unwrap_or(0);
    let f = all
        .iter()
        .map(|&y| {
            let shifted = q[y].relabel(&|k| nx + k);
            Ok(SjPoint::join_at(h[y].clone(), shifted, chi_n[y], join_level)?.canonicalize())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Level {
        n,
        radius,
        cover,
        q,
        chi_n,
        join_level,
        f,
    })
}

/// Resolves the base points and builds the pipeline, checking that `p` is a
/// metric when the configuration asks for metric guarantees.
pub fn build_for(
    p: &FunctionTable,
    space: &AmbientSpace,
    config: &ExtensionConfig,
) -> Result<Pipeline> {
    let nx = space.subset().len();
    if p.len() != nx {
        return Err(Error::Config(format!(
            "p must be indexed by the {nx} points of X, got {}",
            p.len()
        )));
    }
    if config.require_metric {
        if nx < 2 {
            return Err(Error::Degenerate(
                "metric preservation needs at least two points in X".into(),
            ));
        }
        if let Some(fail) = check_metric(p, config.tolerance).failures().next() {
            return Err(Error::NotAMetric {
                check: fail.name.clone(),
                witness: fail.witness.clone(),
                worst: fail.worst,
            });
        }
    }
    let ab = match config.base_points {
        Some(ab) => ab,
        None => default_base_points(p)?,
    };
    Pipeline::build(space, config, ab)
}

/// The truncated extension of `p` from `X` to `Y`.
pub fn extend(
    p: &FunctionTable,
    space: &AmbientSpace,
    config: &ExtensionConfig,
) -> Result<ExtendedTable> {
    build_for(p, space, config)?.extend(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::demo;

    fn line(coords: &[f64], subset: Vec<usize>) -> AmbientSpace {
        let d = FunctionTable::from_fn(GroundSpace::indexed(coords.len()), |i, j| {
            (coords[i] - coords[j]).abs()
        })
        .unwrap();
        AmbientSpace::new(d, subset, 1e-12).unwrap()
    }

    fn discrete(n: usize) -> FunctionTable {
        FunctionTable::from_fn(
            GroundSpace::indexed(n),
            |i, j| if i == j { 0.0 } else { 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn chi_examples() {
        let s = line(&[0.0, 1.0, 0.3], vec![0, 1]);
        let p =
            Pipeline::build(&s, &ExtensionConfig::default().with_truncation(4), (0, 1)).unwrap();
        assert_eq!(p.h()[2], SjPoint::leaf(0));
        assert_eq!(p.chi()[0], 0.0);
        assert_eq!(p.chi()[1], 0.0);
        assert!((p.chi()[2] - 0.3).abs() < 1e-15);
        assert_eq!(chi(&s, p.h(), 2), p.chi()[2]);
        assert_eq!(chi_n(0.3, 4), 1.0);
        assert!((chi_n(0.3, 2) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn e_n_examples() {
        let p = discrete(3);
        let e = e_n(&p, 0, 1, 2).unwrap();
        assert_eq!(e.get(1, 2), 1.0);
        assert_eq!(e.get(0, 3), 0.5);
        assert_eq!(e.get(3, 0), 0.5);
        assert_eq!(e.get(2, 3), 1.0);
        assert_eq!(e.get(3, 3), 0.0);
        assert_eq!(e.get(3, 4), 1.0);
        assert!(e.is_pseudometric(1e-12));
        assert!(matches!(e_n(&p, 1, 1, 2), Err(Error::Config(_))));
    }

    #[test]
    fn e_n_keeps_the_unit() {
        let one = FunctionTable::constant(GroundSpace::indexed(3), 1.0).unwrap();
        let e = e_n(&one, 0, 2, 4).unwrap();
        assert!(e.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn f_n_cases() {
        let s = line(&[0.0, 1.0, 0.2, 0.6], vec![0, 1]);
        let pipe =
            Pipeline::build(&s, &ExtensionConfig::default().with_truncation(3), (0, 1)).unwrap();
        let nx = 2;
        for level in pipe.levels() {
            assert_eq!(level.f[0], SjPoint::leaf(0));
            assert_eq!(level.f[1], SjPoint::leaf(1));
        }
        // χ(y3) = 0.4, so χ_3 = 1 and f_3 is q_3 moved to the set ids.
        let l3 = pipe.level(3).unwrap();
        assert_eq!(l3.chi_n[3], 1.0);
        assert_eq!(l3.f[3], l3.q[3].relabel(&|k| nx + k));
        // χ(y2) = 0.2, so χ_1 is strictly inside (0, 1).
        let l1 = pipe.level(1).unwrap();
        let j = l1.f[2].as_join().expect("genuine join");
        assert!((j.t() - 0.2).abs() < 1e-15);
        assert_eq!(j.level(), l1.join_level);
    }

    #[test]
    fn t_n_floors() {
        let s = line(&[0.0, 1.0, 0.3, 0.7], vec![0, 1]);
        let pipe =
            Pipeline::build(&s, &ExtensionConfig::default().with_truncation(4), (0, 1)).unwrap();
        let p = discrete(2);
        for n in 1..=4 {
            for y in 0..2 {
                for x in 0..2 {
                    assert_eq!(pipe.t_n(&p, n, x, y).unwrap(), p.get(x, y));
                }
            }
        }
        // χ = 0.3 for both exterior points, so level 4 has χ_4 = 1.
        let l4 = pipe.level(4).unwrap();
        assert_eq!(l4.chi_n[2], 1.0);
        assert_eq!(l4.chi_n[3], 1.0);
        assert!(pipe.t_n(&p, 4, 0, 3).unwrap() >= 0.5);
        // d(y2, y3) = 0.4 > 2^{-3}.
        assert_eq!(pipe.t_n(&p, 4, 2, 3).unwrap(), 1.0);
    }

    #[test]
    fn demo_matches_the_hand_trace() {
        let d = demo();
        let pipe = build_for(&d.p, &d.space, &d.config).unwrap();
        assert_eq!(pipe.h()[2], SjPoint::leaf(0));
        assert!((pipe.chi()[2] - 0.2).abs() < 1e-15);
        let q1 = pipe.level(1).unwrap().q[2].as_join().unwrap().clone();
        assert_eq!(
            (q1.left(), q1.right()),
            (&SjPoint::leaf(2), &SjPoint::leaf(0))
        );
        assert!((q1.t() - 1.0 / 3.0).abs() < 1e-15);
        assert!((pipe.t_n(&d.p, 1, 0, 2).unwrap() - 0.1).abs() < 1e-15);
        assert!((pipe.t_n(&d.p, 1, 1, 2).unwrap() - 0.9).abs() < 1e-15);
        assert!((pipe.t_n(&d.p, 2, 0, 2).unwrap() - 0.2).abs() < 1e-15);
        assert!((pipe.t_n(&d.p, 2, 1, 2).unwrap() - 0.8).abs() < 1e-15);
        let out = pipe.apply(&d.p).unwrap();
        let expected = [
            [0.0, 1.0, 2.0 / 15.0],
            [1.0, 0.0, 13.0 / 15.0],
            [2.0 / 15.0, 13.0 / 15.0, 0.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((out.get(i, j) - expected[i][j]).abs() < 1e-12, "({i}, {j})");
            }
        }
    }

    #[test]
    fn default_truncation_on_the_demo() {
        // min distance 0.2 needs 2^{1-N} < 0.2 (N = 4); min χ 0.2 needs N >= 5.
        let d = demo();
        let config = ExtensionConfig {
            truncation: None,
            ..d.config
        };
        let pipe = build_for(&d.p, &d.space, &config).unwrap();
        assert_eq!(pipe.truncation(), 5);
        assert!(pipe.saturation_level(2).is_some());
    }

    #[test]
    fn metric_request_checks_the_truncation_and_p() {
        let d = demo();
        let config = ExtensionConfig {
            require_metric: true,
            ..d.config.clone()
        };
        assert!(matches!(
            build_for(&d.p, &d.space, &config),
            Err(Error::Config(_))
        ));
        let config = ExtensionConfig {
            require_metric: true,
            truncation: None,
            ..d.config
        };
        assert!(build_for(&d.p, &d.space, &config).is_ok());
        let zero = FunctionTable::constant(d.p.ground().clone(), 0.0).unwrap();
        assert!(matches!(
            build_for(&zero, &d.space, &config),
            Err(Error::NotAMetric { .. })
        ));
    }

    #[test]
    fn weights_and_tail_bounds() {
        let d = demo();
        let pipe = build_for(&d.p, &d.space, &d.config).unwrap();
        assert_eq!(pipe.weights(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(pipe.tail_bound(&d.p), 0.5);
        let raw = ExtensionConfig {
            normalize_weights: false,
            ..d.config
        };
        let pipe = build_for(&d.p, &d.space, &raw).unwrap();
        assert_eq!(pipe.weights(), &[0.5, 0.25]);
        assert_eq!(pipe.tail_bound(&d.p), 0.25);
    }

    #[test]
    fn unit_maps_to_unit() {
        let s = line(&[0.0, 1.0, 0.25, 0.5, 0.8, 0.55], vec![0, 1, 4]);
        let one = FunctionTable::constant(GroundSpace::indexed(3), 1.0).unwrap();
        let out = extend(&one, &s, &ExtensionConfig::default()).unwrap();
        assert!(out.values.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn compiled_matches_direct() {
        let s = line(&[0.0, 1.0, 0.25, 0.5, 0.8, 0.55], vec![0, 1, 4]);
        let p = FunctionTable::from_fn(GroundSpace::indexed(3), |i, j| {
            ((i * 7 + j * 3) % 5) as f64 - 2.0
        })
        .unwrap();
        let pipe = Pipeline::build(&s, &ExtensionConfig::default(), (2, 0)).unwrap();
        let direct = pipe.apply(&p).unwrap();
        let compiled = pipe.compile().apply(&p).unwrap();
        assert!(direct.max_abs_diff(&compiled) < 1e-12);
    }

    #[test]
    fn symmetric_input_gives_symmetric_output() {
        let s = line(&[0.0, 1.0, 0.25, 0.5, 0.8, 0.55], vec![0, 1, 4]);
        let p = discrete(3);
        let pipe = Pipeline::build(&s, &ExtensionConfig::default(), (0, 1)).unwrap();
        for out in [pipe.apply(&p).unwrap(), pipe.compile().apply(&p).unwrap()] {
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(out.get(i, j).to_bits(), out.get(j, i).to_bits());
                }
            }
        }
    }

    #[test]
    fn wrong_input_size_is_rejected() {
        let d = demo();
        let pipe = build_for(&d.p, &d.space, &d.config).unwrap();
        assert!(pipe.apply(&discrete(3)).is_err());
        assert!(pipe.value_at(&d.p, 0, 7).is_err());
    }
}
