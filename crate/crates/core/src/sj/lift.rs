//! Lifting functions on `X x X` to the iterated squeezed join.

use std::collections::BTreeMap;

use super::point::{check_unit, SjPoint};
use crate::error::{Error, Result};
use crate::table::FunctionTable;

/// Coefficients `(c_xx, c_xy, c_yx, c_yy)` of the four corner values in the
/// lift of `p` to a pair `[x, y; t]`, `[x', y'; t2]`.
#[inline]
pub fn magic_coefficients(t: f64, t2: f64) -> [f64; 4] {
    [
        (1.0 - t).min(1.0 - t2),
        (t2 - t).max(0.0),
        (t - t2).max(0.0),
        t.min(t2),
    ]
}

#[inline]
fn combine(q_xx: f64, q_xy: f64, q_yx: f64, q_yy: f64, t: f64, t2: f64) -> f64 {
    let [c_xx, c_xy, c_yx, c_yy] = magic_coefficients(t, t2);
    // Grouped so that swapping the two arguments reproduces the value bit for bit.
    (c_xx * q_xx + c_yy * q_yy) + (c_xy * q_xy + c_yx * q_yx)
}

/// `min{1-t,1-t2} q_xx + max{0,t2-t} q_xy + max{0,t-t2} q_yx + min{t,t2} q_yy`.
pub fn magic_formula(q_xx: f64, q_xy: f64, q_yx: f64, q_yy: f64, t: f64, t2: f64) -> Result<f64> {
    check_unit("t", t)?;
    check_unit("t2", t2)?;
    Ok(combine(q_xx, q_xy, q_yx, q_yy, t, t2))
}

/// Value of `sj^∞(p)(u, v)`.
pub fn sj_eval(p: &FunctionTable, u: &SjPoint, v: &SjPoint) -> Result<f64> {
    let len = p.len();
    for point in [u, v] {
        let id = point.max_id();
        if id >= len {
            return Err(Error::UnknownId { id, len });
        }
    }
    Ok(sj_eval_with(&|i, j| p.get(i, j), u, v))
}

/// `sj^∞` of an arbitrary kernel on ground ids. The caller guarantees every
/// leaf id is in the kernel's domain.
pub fn sj_eval_with<F: Fn(usize, usize) -> f64>(p: &F, u: &SjPoint, v: &SjPoint) -> f64 {
    match (u, v) {
        (SjPoint::Leaf(x), SjPoint::Leaf(y)) => p(*x, *y),
        _ => {
            let (lu, lv) = (u.level(), v.level());
            if lu > lv {
                // v sits in a lower copy, embedded as [v, v; 0].
                let j = u.as_join().expect("positive level");
                let t = j.t();
                (1.0 - t) * sj_eval_with(p, j.left(), v) + t * sj_eval_with(p, j.right(), v)
            } else if lv > lu {
                let j = v.as_join().expect("positive level");
                let t = j.t();
                (1.0 - t) * sj_eval_with(p, u, j.left()) + t * sj_eval_with(p, u, j.right())
            } else {
                let (a, b) = (u.as_join().expect("joins"), v.as_join().expect("joins"));
                combine(
                    sj_eval_with(p, a.left(), b.left()),
                    sj_eval_with(p, a.left(), b.right()),
                    sj_eval_with(p, a.right(), b.left()),
                    sj_eval_with(p, a.right(), b.right()),
                    a.t(),
                    b.t(),
                )
            }
        }
    }
}

/// Bilinear weights on ground pairs: `sj^∞(p)(u, v) = Σ c_ij p(i, j)` for
/// every `p`. Sorted by pair, zero coefficients dropped.
pub fn pair_weights(u: &SjPoint, v: &SjPoint) -> Vec<((usize, usize), f64)> {
    let mut acc = BTreeMap::new();
    accumulate_pairs(u, v, 1.0, &mut acc);
    acc.into_iter().filter(|&(_, c)| c > 0.0).collect()
}

fn accumulate_pairs(u: &SjPoint, v: &SjPoint, scale: f64, acc: &mut BTreeMap<(usize, usize), f64>) {
    if scale == 0.0 {
        return;
    }
    match (u, v) {
        (SjPoint::Leaf(x), SjPoint::Leaf(y)) => *acc.entry((*x, *y)).or_insert(0.0) += scale,
        _ => {
            let (lu, lv) = (u.level(), v.level());
            if lu > lv {
                let j = u.as_join().expect("positive level");
                accumulate_pairs(j.left(), v, scale * (1.0 - j.t()), acc);
                accumulate_pairs(j.right(), v, scale * j.t(), acc);
            } else if lv > lu {
                let j = v.as_join().expect("positive level");
                accumulate_pairs(u, j.left(), scale * (1.0 - j.t()), acc);
                accumulate_pairs(u, j.right(), scale * j.t(), acc);
            } else {
                let (a, b) = (u.as_join().expect("joins"), v.as_join().expect("joins"));
                let [c_xx, c_xy, c_yx, c_yy] = magic_coefficients(a.t(), b.t());
                accumulate_pairs(a.left(), b.left(), scale * c_xx, acc);
                accumulate_pairs(a.left(), b.right(), scale * c_xy, acc);
                accumulate_pairs(a.right(), b.left(), scale * c_yx, acc);
                accumulate_pairs(a.right(), b.right(), scale * c_yy, acc);
            }
        }
    }
}
