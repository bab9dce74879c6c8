use super::point::SjPoint;
use crate::error::{Error, Result};
use crate::table::FunctionTable;

/// Greedy `radius`-net of a finite pseudometric space: every point is at
/// distance `< radius` from some returned id.
pub fn ground_net(p: &FunctionTable, radius: f64) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for x in p.ground().ids() {
        if net.iter().all(|&a| p.get(x, a) >= radius) {
            net.push(x);
        }
    }
    net
}

/// Uniform grid `{0, 1/m, ..., 1}` with the coarsest step `1/m <= step`.
pub fn unit_grid(step: f64) -> Vec<f64> {
    let m = (1.0 / step).ceil().max(1.0) as usize;
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

/// Finite `eps`-net of the depth-one squeezed join `(SJ(X), sj(p))`.
///
/// Built as all `[x, y; t]` with `x, y` from an `eps/4`-net of `X` and `t`
/// from an `eps/(4‖p‖)`-net of `[0, 1]`; when `eps` exceeds `‖p‖` a single
/// point already covers everything. Points are canonical; repeated classes are
/// kept so the net has exactly `|A|^2 |B|` entries.
pub fn epsilon_net(p: &FunctionTable, eps: f64) -> Result<Vec<SjPoint>> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let norm = p.sup_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate(
            "epsilon net needs a pseudometric with nonzero norm".into(),
        ));
    }
    if !p.is_pseudometric(1e-12) {
        return Err(Error::Precondition(
            "epsilon net requires a pseudometric".into(),
        ));
    }
    if eps > norm {
        return Ok(vec![SjPoint::leaf(0)]);
    }
    let anchors = ground_net(p, eps / 4.0);
    let grid = unit_grid(eps / (4.0 * norm));
    let mut net = Vec::with_capacity(anchors.len() * anchors.len() * grid.len());
    for &x in &anchors {
        for &y in &anchors {
            for &t in &grid {
                let point = SjPoint::join(SjPoint::leaf(x), SjPoint::leaf(y), t)?;
                net.push(point.canonicalize());
            }
        }
    }
    Ok(net)
}
