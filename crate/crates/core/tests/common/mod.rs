#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqjoin::operator::GroupAction;
use sqjoin::{AmbientSpace, FunctionTable, GroundSpace, SjPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shortest-path closure of a symmetric weight matrix.
pub fn path_closure(mut w: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = w.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    w
}

fn random_weights(n: usize, rng: &mut impl Rng, lo: f64, zero_prob: f64) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if rng.random_bool(zero_prob) {
                0.0
            } else {
                rng.random_range(lo..=1.0)
            };
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    w
}

/// A pseudometric that identifies some points with probability about
/// `zero_prob` per edge.
pub fn random_pseudometric(n: usize, rng: &mut impl Rng, zero_prob: f64) -> FunctionTable {
    let rows = path_closure(random_weights(n, rng, 0.05, zero_prob));
    FunctionTable::from_rows(GroundSpace::indexed(n), &rows).unwrap()
}

pub fn random_metric(n: usize, rng: &mut impl Rng) -> FunctionTable {
    let rows = path_closure(random_weights(n, rng, 0.1, 0.0));
    FunctionTable::from_rows(GroundSpace::indexed(n), &rows).unwrap()
}

/// Points of the unit square at pairwise distance at least `min_sep`.
pub fn random_points(n: usize, min_sep: f64, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(n);
    while pts.len() < n {
        let c = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        if pts.iter().all(|q| dist(&c, q) >= min_sep) {
            pts.push(c);
        }
    }
    pts
}

pub fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn euclidean(pts: &[[f64; 2]]) -> FunctionTable {
    FunctionTable::from_fn(GroundSpace::indexed(pts.len()), |i, j| {
        dist(&pts[i], &pts[j])
    })
    .unwrap()
}

/// Random subset of `0..n` of size `k`, in random order.
pub fn random_subset(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    ids.truncate(k);
    ids
}

pub struct Instance {
    pub space: AmbientSpace,
    pub p: FunctionTable,
    pub p_is_metric: bool,
}

/// Euclidean `Y` of size at most `max_y`, `2 <= |X| <= |Y| - 1`, and a random
/// metric or pseudometric on `X`.
pub fn random_instance(rng: &mut impl Rng, max_y: usize, metric: bool) -> Instance {
    let ny = rng.random_range(3..=max_y);
    let nx = rng.random_range(2..ny);
    let pts = random_points(ny, 0.08, rng);
    let subset = random_subset(ny, nx, rng);
    let space = AmbientSpace::new(euclidean(&pts), subset, 1e-12).unwrap();
    let p = if metric {
        random_metric(nx, rng)
    } else {
        random_pseudometric(nx, rng, 0.3)
    };
    Instance {
        space,
        p,
        p_is_metric: metric,
    }
}

pub struct SymmetricInstance {
    pub space: AmbientSpace,
    pub generators: Vec<Vec<usize>>,
    pub group: GroupAction,
    pub p: FunctionTable,
    pub p_is_metric: bool,
}

fn orbit_instance(
    orbits: Vec<Vec<[f64; 2]>>,
    in_x: Vec<bool>,
    metric: bool,
    pseudo: impl Fn(&[f64; 2], &[f64; 2]) -> f64,
) -> SymmetricInstance {
    let mut pts = Vec::new();
    let mut starts = Vec::new();
    for orbit in &orbits {
        starts.push(pts.len());
        pts.extend_from_slice(orbit);
    }
    let mut generator = vec![0; pts.len()];
    for (o, orbit) in orbits.iter().enumerate() {
        for k in 0..orbit.len() {
            generator[starts[o] + k] = starts[o] + (k + 1) % orbit.len();
        }
    }
    let subset: Vec<usize> = orbits
        .iter()
        .enumerate()
        .filter(|(o, _)| in_x[*o])
        .flat_map(|(o, orbit)| {
            let s = starts[o];
            (0..orbit.len()).map(move |k| s + k)
        })
        .collect();
    let d = euclidean(&pts);
    let space = AmbientSpace::new(d, subset.clone(), 1e-12).unwrap();
    let radius = |i: usize| pts[subset[i]][0].hypot(pts[subset[i]][1]);
    let n = subset.len();
    let p = if metric {
        FunctionTable::from_fn(GroundSpace::indexed(n), |i, j| {
            dist(&pts[subset[i]], &pts[subset[j]]) + (radius(i) - radius(j)).abs()
        })
        .unwrap()
    } else {
        FunctionTable::from_fn(GroundSpace::indexed(n), |i, j| {
            pseudo(&pts[subset[i]], &pts[subset[j]])
        })
        .unwrap()
    };
    let generators = vec![generator];
    let group = GroupAction::generate(&generators, &space).unwrap();
    SymmetricInstance {
        space,
        generators,
        group,
        p,
        p_is_metric: metric,
    }
}

/// Orbits of the rotation by `2π/m` about the origin; the first orbits form
/// `X`. The pseudometric compares squares in the complex plane, so it
/// identifies antipodal points when `m` is even.
pub fn cyclic_instance(rng: &mut impl Rng, m: usize, metric: bool) -> SymmetricInstance {
    let orbit_count = rng.random_range(2..=3);
    let mut radii: Vec<f64> = Vec::new();
    while radii.len() < orbit_count {
        let r = rng.random_range(0.3..1.0);
        if radii.iter().all(|&q: &f64| (q - r).abs() > 0.1) {
            radii.push(r);
        }
    }
    let orbits: Vec<Vec<[f64; 2]>> = radii
        .iter()
        .map(|&r| {
            let phase = rng.random_range(0.0..TAU / m as f64);
            (0..m)
                .map(|k| {
                    let a = phase + TAU * k as f64 / m as f64;
                    [r * a.cos(), r * a.sin()]
                })
                .collect()
        })
        .collect();
    let x_orbits = rng.random_range(1..orbit_count);
    let in_x = (0..orbit_count).map(|o| o < x_orbits).collect();
    orbit_instance(orbits, in_x, metric, |z, w| {
        let sq = |q: &[f64; 2]| [q[0] * q[0] - q[1] * q[1], 2.0 * q[0] * q[1]];
        dist(&sq(z), &sq(w))
    })
}

/// Mirror pairs `(u, v), (u, -v)` across the horizontal axis; some pairs form
/// `X`, the rest lie outside it. The pseudometric identifies mirror images.
pub fn swap_instance(rng: &mut impl Rng, metric: bool) -> SymmetricInstance {
    let pairs = rng.random_range(3..=6);
    let mut halves: Vec<[f64; 2]> = Vec::new();
    while halves.len() < pairs {
        let c = [rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)];
        let mirror = |q: &[f64; 2]| [q[0], -q[1]];
        if halves
            .iter()
            .all(|q| dist(&c, q) > 0.1 && dist(&c, &mirror(q)) > 0.1)
        {
            halves.push(c);
        }
    }
    let orbits: Vec<Vec<[f64; 2]>> = halves.iter().map(|c| vec![*c, [c[0], -c[1]]]).collect();
    let x_pairs = rng.random_range(2..pairs);
    let in_x = (0..pairs).map(|o| o < x_pairs).collect();
    orbit_instance(orbits, in_x, metric, |z, w| {
        (z[0] - w[0]).abs() + (z[1].abs() - w[1].abs()).abs()
    })
}

/// Random point of depth at most `depth` over `leaves` ground ids, with
/// occasional endpoint parameters and explicit levels.
pub fn random_sj_point(rng: &mut impl Rng, leaves: usize, depth: u32) -> SjPoint {
    if depth == 0 || rng.random_bool(0.25) {
        return SjPoint::leaf(rng.random_range(0..leaves));
    }
    let left = random_sj_point(rng, leaves, depth - 1);
    let right = random_sj_point(rng, leaves, depth - 1);
    let t = match rng.random_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.0..=1.0),
    };
    let min_level = 1 + left.level().max(right.level());
    let level = if rng.random_bool(0.2) {
        min_level + 1
    } else {
        min_level
    };
    SjPoint::join_at(left, right, t, level).unwrap()
}

pub fn random_table(n: usize, rng: &mut impl Rng, lo: f64, hi: f64) -> FunctionTable {
    FunctionTable::from_fn(GroundSpace::indexed(n), |_, _| rng.random_range(lo..=hi)).unwrap()
}
