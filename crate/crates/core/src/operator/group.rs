use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::config::ExtensionConfig;
use super::pipeline::{build_for, ExtendedTable};
use crate::error::{Error, Result};
use crate::nerve::AmbientSpace;
use crate::table::FunctionTable;

/// A finite group acting on `Y` by permutations that map `X` onto itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAction {
    elements: Vec<Vec<usize>>,
}

fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&i| g[i]).collect()
}

fn inverse(g: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; g.len()];
    for (i, &gi) in g.iter().enumerate() {
        inv[gi] = i;
    }
    inv
}

fn check_permutation(g: &[usize], n: usize) -> Result<()> {
    if g.len() != n {
        return Err(Error::InvalidGroup(format!(
            "permutation {g:?} has length {}, expected {n}",
            g.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in g {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidGroup(format!(
                "{g:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

impl GroupAction {
    /// Validates closure, identity, inverses and that every element maps `X`
    /// onto `X`. Duplicate elements are dropped.
    pub fn new(elements: Vec<Vec<usize>>, space: &AmbientSpace) -> Result<Self> {
        let n = space.len();
        for g in &elements {
            check_permutation(g, n)?;
        }
        let set: BTreeSet<Vec<usize>> = elements.iter().cloned().collect();
        let identity: Vec<usize> = (0..n).collect();
        if !set.contains(&identity) {
            return Err(Error::InvalidGroup(
                "the identity permutation is missing".into(),
            ));
        }
        for g in &set {
            if !set.contains(&inverse(g)) {
                return Err(Error::InvalidGroup(format!(
                    "the inverse of {g:?} is missing"
                )));
            }
            for h in &set {
                let gh = compose(g, h);
                if !set.contains(&gh) {
                    return Err(Error::InvalidGroup(format!(
                        "{g:?} o {h:?} = {gh:?} is missing"
                    )));
                }
            }
            if let Some(&x) = space.subset().iter().find(|&&x| !space.in_subset(g[x])) {
                return Err(Error::InvalidGroup(format!(
                    "{g:?} moves point {x} of X outside X"
                )));
            }
        }
        let mut elements: Vec<Vec<usize>> = Vec::with_capacity(set.len());
        elements.push(identity.clone());
        elements.extend(set.into_iter().filter(|g| *g != identity));
        Ok(Self { elements })
    }

    /// The group generated by `generators`.
    pub fn generate(generators: &[Vec<usize>], space: &AmbientSpace) -> Result<Self> {
        let n = space.len();
        for g in generators {
            check_permutation(g, n)?;
        }
        let identity: Vec<usize> = (0..n).collect();
        let mut seen = BTreeSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(g) = queue.pop_front() {
            for s in generators {
                let next = compose(s, &g);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Self::new(seen.into_iter().collect(), space)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            elements: vec![(0..n).collect()],
        }
    }

    /// Elements with the identity first.
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Largest `|m(gy, gy') - m(y, y')|` over the group, with witness
    /// `[element, y, y']`.
    pub fn invariance_deviation(&self, m: &FunctionTable) -> (f64, Vec<usize>) {
        let n = m.len();
        let mut worst = (0.0, Vec::new());
        for (k, g) in self.elements.iter().enumerate() {
            for y in 0..n {
                for y2 in 0..n {
                    let dev = (m.get(g[y], g[y2]) - m.get(y, y2)).abs();
                    if dev > worst.0 {
                        worst = (dev, vec![k, y, y2]);
                    }
                }
            }
        }
        worst
    }

    /// Errors unless `m` on `Y` is invariant within `tol`.
    pub fn check_invariant(&self, m: &FunctionTable, tol: f64) -> Result<()> {
        let (deviation, witness) = self.invariance_deviation(m);
        if deviation > tol {
            Err(Error::NotInvariant { witness, deviation })
        } else {
            Ok(())
        }
    }

    /// Errors unless `p`, indexed by subset positions of `X`, is invariant
    /// within `tol`.
    pub fn check_invariant_on_subset(
        &self,
        p: &FunctionTable,
        space: &AmbientSpace,
        tol: f64,
    ) -> Result<()> {
        let subset = space.subset();
        if p.len() != subset.len() {
            return Err(Error::Config(format!(
                "p must be indexed by the {} points of X, got {}",
                subset.len(),
                p.len()
            )));
        }
        let pos = |y: usize| space.x_position(y).expect("group preserves X");
        let mut worst = (0.0, Vec::new());
        for (k, g) in self.elements.iter().enumerate() {
            for (i, &x) in subset.iter().enumerate() {
                for (j, &x2) in subset.iter().enumerate() {
                    let dev = (p.get(pos(g[x]), pos(g[x2])) - p.get(i, j)).abs();
                    if dev > worst.0 {
                        worst = (dev, vec![k, x, x2]);
                    }
                }
            }
        }
        if worst.0 > tol {
            Err(Error::NotInvariant {
                witness: worst.1,
                deviation: worst.0,
            })
        } else {
            Ok(())
        }
    }

    /// `(1/|G|) Σ_g m(gy, gy')`.
    pub fn average(&self, m: &FunctionTable) -> Result<FunctionTable> {
        let order = self.order() as f64;
        FunctionTable::from_fn(m.ground().clone(), |y, y2| {
            self.elements
                .iter()
                .map(|g| m.get(g[y], g[y2]))
                .sum::<f64>()
                / order
        })
    }
}

fn check_group_len(group: &GroupAction, space: &AmbientSpace) -> Result<()> {
    match group.elements.first() {
        Some(g) if g.len() == space.len() => Ok(()),
        _ => Err(Error::InvalidGroup(format!(
            "group does not act on {} points",
            space.len()
        ))),
    }
}

/// Group average of the extension of an invariant `p`.
pub fn equivariant_extend(
    p: &FunctionTable,
    space: &AmbientSpace,
    group: &GroupAction,
    config: &ExtensionConfig,
) -> Result<ExtendedTable> {
    check_group_len(group, space)?;
    let group = GroupAction::new(group.elements.clone(), space)?;
    group.check_invariant_on_subset(p, space, config.tolerance)?;
    let base = build_for(p, space, config)?.extend(p)?;
    let values = group.average(&base.values)?;
    let mut provenance = base.provenance;
    provenance.group_order = Some(group.order());
    Ok(ExtendedTable {
        values,
        provenance,
        tail_bound: base.tail_bound,
    })
}

/// `d̃(y, y') = min(d(y, y'), d(y, X) + d(y', X))` for `d` rescaled so that
/// `‖d‖ = eps / 2`.
pub fn truncated_distance(space: &AmbientSpace, eps: f64) -> Result<FunctionTable> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let c = 0.5 * eps;
    let to_x: Vec<f64> = (0..space.len())
        .map(|y| c * space.dist_to_subset(y))
        .collect();
    FunctionTable::from_fn(space.ground().clone(), |y, y2| {
        (c * space.dist(y, y2)).min(to_x[y] + to_x[y2])
    })
}

/// `equivariant_extend(p) + p(a, b) d̃`, an extension operator of norm at
/// most `1 + eps` that separates points off `X` for metric `p`.
pub fn near_isometric_extend(
    p: &FunctionTable,
    space: &AmbientSpace,
    group: &GroupAction,
    eps: f64,
    config: &ExtensionConfig,
) -> Result<ExtendedTable> {
    let d_tilde = truncated_distance(space, eps)?;
    check_group_len(group, space)?;
    group.check_invariant(space.d(), config.tolerance)?;
    let base = equivariant_extend(p, space, group, config)?;
    let (a, b) = (base.provenance.a, base.provenance.b);
    let pab = 0.5 * (p.get(a, b) + p.get(b, a));
    let values = base.values.combine(1.0, &d_tilde, pab);
    let mut provenance = base.provenance;
    provenance.eps = Some(eps);
    Ok(ExtendedTable {
        values,
        provenance,
        tail_bound: base.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::extend;
    use crate::table::GroundSpace;

    fn line(coords: &[f64], subset: Vec<usize>) -> AmbientSpace {
        let d = FunctionTable::from_fn(GroundSpace::indexed(coords.len()), |i, j| {
            (coords[i] - coords[j]).abs()
        })
        .unwrap();
        AmbientSpace::new(d, subset, 1e-12).unwrap()
    }

    fn symmetric_line() -> AmbientSpace {
        // X = {-1, 1}; exterior points at -0.4 and 0.4 swap under reflection.
        line(&[-1.0, 1.0, -0.4, 0.4], vec![0, 1])
    }

    fn reflection() -> Vec<usize> {
        vec![1, 0, 3, 2]
    }

    fn discrete(n: usize) -> FunctionTable {
        FunctionTable::from_fn(
            GroundSpace::indexed(n),
            |i, j| if i == j { 0.0 } else { 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let s = symmetric_line();
        assert!(GroupAction::new(vec![vec![0, 1, 2, 3], reflection()], &s).is_ok());
        assert!(matches!(
            GroupAction::new(vec![reflection()], &s),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            GroupAction::new(vec![vec![0, 1, 2, 3], vec![0, 0, 2, 3]], &s),
            Err(Error::InvalidGroup(_))
        ));
        let moves_x = vec![2, 1, 0, 3];
        assert!(matches!(
            GroupAction::new(vec![vec![0, 1, 2, 3], moves_x], &s),
            Err(Error::InvalidGroup(_))
        ));
        let three_cycle = vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3], vec![0, 1, 3, 2]];
        assert!(matches!(
            GroupAction::new(three_cycle, &s),
            Err(Error::InvalidGroup(_))
        ));
    }

    #[test]
    fn generation() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0], vec![0, 1, 2, 3, 4]);
        let g = GroupAction::generate(&[vec![1, 2, 3, 4, 0]], &s).unwrap();
        assert_eq!(g.order(), 5);
        assert_eq!(g.elements()[0], vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn identity_group_reproduces_extend() {
        let s = symmetric_line();
        let p = discrete(2);
        let config = ExtensionConfig::default();
        let plain = extend(&p, &s, &config).unwrap();
        let eq = equivariant_extend(&p, &s, &GroupAction::identity(4), &config).unwrap();
        assert_eq!(plain.values, eq.values);
        assert_eq!(eq.provenance.group_order, Some(1));
    }

    #[test]
    fn swap_group_gives_invariant_output() {
        let s = symmetric_line();
        let g = GroupAction::generate(&[reflection()], &s).unwrap();
        let p = discrete(2);
        let out = equivariant_extend(&p, &s, &g, &ExtensionConfig::default()).unwrap();
        assert!(g.invariance_deviation(&out.values).0 <= 1e-9);
        assert_eq!(out.values.get(0, 1), 1.0);
        assert!(out.values.is_pseudometric(1e-9));
    }

    #[test]
    fn non_invariant_p_is_rejected() {
        let s = line(&[-1.0, 1.0, 0.0, -0.4, 0.4], vec![0, 1, 2]);
        let g = GroupAction::generate(&[vec![1, 0, 2, 4, 3]], &s).unwrap();
        let p = FunctionTable::from_rows(
            GroundSpace::indexed(3),
            &[
                vec![0.0, 2.0, 1.0],
                vec![2.0, 0.0, 1.5],
                vec![1.0, 1.5, 0.0],
            ],
        )
        .unwrap();
        assert!(matches!(
            equivariant_extend(&p, &s, &g, &ExtensionConfig::default()),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn truncated_distance_example() {
        let s = line(&[0.0, 0.7, 1.0, 0.2], vec![0, 1, 2]);
        let dt = truncated_distance(&s, 2.0).unwrap();
        assert!((dt.get(3, 1) - 0.2).abs() < 1e-15);
        assert_eq!(dt.get(0, 1), 0.0);
        assert!(truncated_distance(&s, 0.0).is_err());
    }

    #[test]
    fn near_isometric_extension() {
        let s = symmetric_line();
        let g = GroupAction::generate(&[reflection()], &s).unwrap();
        let p = discrete(2);
        let eps = 0.1;
        let out = near_isometric_extend(&p, &s, &g, eps, &ExtensionConfig::default()).unwrap();
        let v = &out.values;
        assert_eq!(v.get(0, 1), 1.0);
        assert!(v.sup_norm() <= 1.0 + eps + 1e-9);
        assert!(v.is_metric(1e-12));
        assert!(g.invariance_deviation(v).0 <= 1e-9);
        assert_eq!(out.provenance.eps, Some(eps));
    }

    #[test]
    fn near_isometric_requires_invariant_d() {
        let s = line(&[-1.0, 1.0, -0.4, 0.3], vec![0, 1]);
        let g = GroupAction::new(vec![vec![0, 1, 2, 3], reflection()], &s).unwrap();
        assert!(matches!(
            near_isometric_extend(&discrete(2), &s, &g, 0.5, &ExtensionConfig::default()),
            Err(Error::NotInvariant { .. })
        ));
    }
}
