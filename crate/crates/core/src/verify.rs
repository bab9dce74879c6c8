//! Black-box validators: pseudometric axioms, regularity of linear operators,
//! locality and net coverage.
//!
//! Every check reads raw values and recomputes what it needs; none of them
//! calls back into the extension pipeline. `worst` is the largest observed
//! violation margin (0 when nothing is violated) and a failed check always
//! carries a witness.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sj::{sj_eval, SjPoint};
use crate::table::{FunctionTable, GroundSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    pub witness: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, pass: bool, worst: f64, witness: Vec<usize>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            worst,
            witness,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn new(tolerance: f64) -> Self {
        Self {
            checks: Vec::new(),
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    /// Union of two reports, ordered by check name. The looser tolerance is kept.
    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.checks.extend(other.checks);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.tolerance = self.tolerance.max(other.tolerance);
        self
    }
}

/// Seed, trial count and tolerance shared by the sampling checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub trials: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            trials: 100,
            tolerance: 1e-9,
            seed: 0x5eed,
        }
    }
}

#[derive(Default)]
struct Worst {
    value: f64,
    witness: Vec<usize>,
}

impl Worst {
    fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Vec<usize>) {
        if violation > self.value {
            self.value = violation;
            self.witness = witness();
        }
    }
}

/// Symmetry (exact), zero diagonal, nonnegativity and all `n^3` triangle
/// inequalities, each up to `tol`.
pub fn check_pseudometric(m: &FunctionTable, tol: f64) -> VerificationReport {
    let n = m.len();
    let mut symmetry = Worst::default();
    let mut diagonal = Worst::default();
    let mut nonneg = Worst::default();
    let mut triangle = Worst::default();
    for i in 0..n {
        diagonal.observe(m.get(i, i).abs(), || vec![i]);
        for j in 0..n {
            let v = m.get(i, j);
            symmetry.observe((v - m.get(j, i)).abs(), || vec![i, j]);
            nonneg.observe(-v, || vec![i, j]);
        }
    }
    for i in 0..n {
        let row_i = m.row(i);
        for j in 0..n {
            let row_j = m.row(j);
            let d_ij = row_i[j];
            for k in 0..n {
                // witness (i, j, k): m(i, k) > m(i, j) + m(j, k)
                triangle.observe(row_i[k] - d_ij - row_j[k], || vec![i, j, k]);
            }
        }
    }
    let mut report = VerificationReport::new(tol);
    report.push(CheckResult::new(
        "symmetry",
        symmetry.value == 0.0,
        symmetry.value,
        symmetry.witness,
    ));
    for (name, w) in [
        ("zero_diagonal", diagonal),
        ("nonnegativity", nonneg),
        ("triangle", triangle),
    ] {
        report.push(CheckResult::new(name, w.value <= tol, w.value, w.witness));
    }
    report
}

/// Pseudometric axioms plus strict positivity (`> tol`) off the diagonal.
pub fn check_metric(m: &FunctionTable, tol: f64) -> VerificationReport {
    let mut report = check_pseudometric(m, tol);
    let n = m.len();
    let mut fail: Option<(f64, Vec<usize>)> = None;
    for i in 0..n {
        for j in 0..n {
            let margin = tol - m.get(i, j);
            if i != j && margin >= 0.0 && fail.as_ref().is_none_or(|(w, _)| margin > *w) {
                fail = Some((margin, vec![i, j]));
            }
        }
    }
    let check = match fail {
        None => CheckResult::new("separation", true, 0.0, vec![]),
        Some((worst, witness)) => CheckResult::new("separation", false, worst, witness),
    };
    report.push(check);
    report
}

fn random_table(ground: &GroundSpace, rng: &mut impl Rng, lo: f64, hi: f64) -> FunctionTable {
    FunctionTable::from_fn(ground.clone(), |_, _| rng.random_range(lo..=hi)).expect("finite values")
}

/// Samples linearity, positivity, unit preservation and sup-norm
/// nonexpansiveness of `op` on functions over `domain`.
///
/// Witnesses are `[trial, i, j]`: the failing trial index (reproducible from
/// the seed) and the output entry where the worst deviation occurred.
pub fn check_regular_operator<F>(
    op: F,
    domain: &GroundSpace,
    sampling: Sampling,
) -> Result<VerificationReport>
where
    F: Fn(&FunctionTable) -> Result<FunctionTable>,
{
    let tol = sampling.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut linear = Worst::default();
    let mut positive = Worst::default();
    let mut norm = Worst::default();

    for trial in 0..sampling.trials {
        let p = random_table(domain, &mut rng, -1.0, 1.0);
        let q = random_table(domain, &mut rng, -1.0, 1.0);
        let alpha = rng.random_range(-2.0..=2.0);
        let beta = rng.random_range(-2.0..=2.0);
        let op_p = op(&p)?;
        let op_q = op(&q)?;
        let op_mix = op(&p.combine(alpha, &q, beta))?;
        let expected = op_p.combine(alpha, &op_q, beta);
        for (k, (a, b)) in op_mix.values().iter().zip(expected.values()).enumerate() {
            let n = op_mix.len();
            linear.observe((a - b).abs(), || vec![trial, k / n, k % n]);
        }

        let bound = p.sup_norm();
        for (k, v) in op_p.values().iter().enumerate() {
            let n = op_p.len();
            norm.observe(v.abs() - bound, || vec![trial, k / n, k % n]);
        }

        let nonneg = random_table(domain, &mut rng, 0.0, 1.0);
        let out = op(&nonneg)?;
        for (k, v) in out.values().iter().enumerate() {
            let n = out.len();
            positive.observe(-v, || vec![trial, k / n, k % n]);
        }
    }

    let mut unit = Worst::default();
    let one = FunctionTable::constant(domain.clone(), 1.0)?;
    let out = op(&one)?;
    for (k, v) in out.values().iter().enumerate() {
        let n = out.len();
        unit.observe((v - 1.0).abs(), || vec![0, k / n, k % n]);
    }

    let mut report = VerificationReport::new(tol);
    for (name, w) in [
        ("linearity", linear),
        ("positivity", positive),
        ("unit", unit),
        ("norm", norm),
    ] {
        report.push(CheckResult::new(name, w.value <= tol, w.value, w.witness));
    }
    Ok(report)
}

/// A single output entry `(y, y')` together with the set `mask` on which the
/// probing functions agree and the ids `required` that `mask` must contain.
#[derive(Debug, Clone)]
pub struct LocalityProbe {
    pub y: usize,
    pub y_prime: usize,
    pub mask: BTreeSet<usize>,
    pub required: BTreeSet<usize>,
}

/// Draws pairs `p, p'` equal on `mask x mask` (values in `[-1, 1]`) and wildly
/// different elsewhere, and checks that `op(p)(y, y') = op(p')(y, y')` and
/// that `|op(p')(y, y')| <= 1`.
pub fn check_locality<F>(
    op: F,
    domain: &GroundSpace,
    probe: &LocalityProbe,
    sampling: Sampling,
) -> Result<VerificationReport>
where
    F: Fn(&FunctionTable, usize, usize) -> Result<f64>,
{
    if let Some(missing) = probe.required.difference(&probe.mask).next() {
        return Err(Error::Precondition(format!(
            "mask set is missing required point {missing}"
        )));
    }
    if let Some(&bad) = probe.mask.iter().find(|&&i| i >= domain.len()) {
        return Err(Error::UnknownId {
            id: bad,
            len: domain.len(),
        });
    }
    let tol = sampling.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut local = Worst::default();
    let mut bounded = Worst::default();
    for trial in 0..sampling.trials {
        let p = random_table(domain, &mut rng, -1.0, 1.0);
        let p_prime = FunctionTable::from_fn(domain.clone(), |i, j| {
            let wild = rng.random_range(-1000.0..=1000.0);
            if probe.mask.contains(&i) && probe.mask.contains(&j) {
                p.get(i, j)
            } else {
                wild
            }
        })?;
        let a = op(&p, probe.y, probe.y_prime)?;
        let b = op(&p_prime, probe.y, probe.y_prime)?;
        local.observe((a - b).abs(), || vec![trial, probe.y, probe.y_prime]);
        bounded.observe(b.abs() - 1.0, || vec![trial, probe.y, probe.y_prime]);
    }
    let mut report = VerificationReport::new(tol);
    report.push(CheckResult::new(
        "locality",
        local.value <= tol,
        local.value,
        local.witness,
    ));
    report.push(CheckResult::new(
        "local_bound",
        bounded.value <= tol,
        bounded.value,
        bounded.witness,
    ));
    Ok(report)
}

/// Samples depth-one points `[x, y; t]` and checks each lies within `eps` of
/// some point of `net` in the lifted pseudometric. Witness `[x, y]`, with `t`
/// in the detail.
pub fn check_net(
    net: &[SjPoint],
    p: &FunctionTable,
    eps: f64,
    sampling: Sampling,
) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let n = p.len();
    let mut worst = Worst::default();
    let mut worst_t = 0.0;
    let mut pass = true;
    for _ in 0..sampling.trials {
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        let t: f64 = rng.random_range(0.0..=1.0);
        let sample = SjPoint::join(SjPoint::leaf(x), SjPoint::leaf(y), t)?;
        let mut dist = f64::INFINITY;
        for c in net {
            dist = dist.min(sj_eval(p, &sample, c)?);
        }
        if dist >= eps {
            let margin = if dist.is_finite() {
                dist - eps
            } else {
                f64::MAX
            };
            if pass || margin > worst.value {
                worst.value = margin;
                worst.witness = vec![x, y];
                worst_t = t;
            }
            pass = false;
        }
    }
    let mut report = VerificationReport::new(sampling.tolerance);
    let detail = (!pass).then(|| {
        format!(
            "sample [{}, {}; {worst_t}] is not eps-close to the net",
            worst.witness[0], worst.witness[1]
        )
    });
    let mut check = CheckResult::new("net_coverage", pass, worst.value, worst.witness);
    if let Some(detail) = detail {
        check = check.with_detail(detail);
    }
    report.push(check);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sj::epsilon_net;

    fn table(rows: &[Vec<f64>]) -> FunctionTable {
        FunctionTable::from_rows(GroundSpace::indexed(rows.len()), rows).unwrap()
    }

    #[test]
    fn valid_metric_passes() {
        let m = table(&[
            vec![0.0, 1.0, 1.5],
            vec![1.0, 0.0, 1.0],
            vec![1.5, 1.0, 0.0],
        ]);
        assert!(check_pseudometric(&m, 1e-12).passed());
        assert!(check_metric(&m, 1e-12).passed());
    }

    #[test]
    fn triangle_failure_has_witness() {
        let m = table(&[
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ]);
        let report = check_pseudometric(&m, 1e-12);
        let tri = report.check("triangle").unwrap();
        assert!(!tri.pass);
        assert_eq!(tri.witness, vec![0, 1, 2]);
        assert_eq!(tri.worst, 1.0);
    }

    #[test]
    fn asymmetry_is_reported_with_pair() {
        let m = table(&[vec![0.0, 1.0], vec![1.5, 0.0]]);
        let report = check_pseudometric(&m, 1e-12);
        let sym = report.check("symmetry").unwrap();
        assert!(!sym.pass);
        assert_eq!(sym.witness, vec![0, 1]);
    }

    #[test]
    fn pseudometric_is_not_a_metric() {
        let m = table(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(check_pseudometric(&m, 1e-12).passed());
        let report = check_metric(&m, 1e-12);
        assert!(!report.check("separation").unwrap().pass);
        assert_eq!(report.check("separation").unwrap().witness, vec![0, 1]);
    }

    #[test]
    fn squaring_is_not_linear() {
        let ground = GroundSpace::indexed(3);
        let report =
            check_regular_operator(|p| Ok(p.map(|v| v * v)), &ground, Sampling::default()).unwrap();
        assert!(!report.check("linearity").unwrap().pass);
        assert!(report.check("unit").unwrap().pass);
        assert_eq!(report.check("linearity").unwrap().witness.len(), 3);
    }

    #[test]
    fn identity_is_regular() {
        let ground = GroundSpace::indexed(4);
        let report =
            check_regular_operator(|p| Ok(p.clone()), &ground, Sampling::default()).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn locality_guard_rejects_incomplete_mask() {
        let ground = GroundSpace::indexed(3);
        let probe = LocalityProbe {
            y: 0,
            y_prime: 1,
            mask: BTreeSet::from([0]),
            required: BTreeSet::from([0, 1]),
        };
        let res = check_locality(
            |p, i, j| Ok(p.get(i, j)),
            &ground,
            &probe,
            Sampling::default(),
        );
        assert!(matches!(res, Err(Error::Precondition(_))));
    }

    #[test]
    fn full_mask_always_passes() {
        let ground = GroundSpace::indexed(3);
        let all: BTreeSet<usize> = ground.ids().collect();
        let probe = LocalityProbe {
            y: 2,
            y_prime: 1,
            mask: all.clone(),
            required: all,
        };
        let report = check_locality(
            |p, i, j| Ok(0.5 * p.get(i, j) + 0.5 * p.get(0, 0)),
            &ground,
            &probe,
            Sampling::default(),
        )
        .unwrap();
        assert!(report.passed());
    }

    #[test]
    fn non_local_operator_is_caught() {
        let ground = GroundSpace::indexed(3);
        let probe = LocalityProbe {
            y: 0,
            y_prime: 1,
            mask: BTreeSet::from([0, 1]),
            required: BTreeSet::from([0, 1]),
        };
        let report = check_locality(
            |p, _, _| Ok(p.get(2, 2)),
            &ground,
            &probe,
            Sampling::default(),
        )
        .unwrap();
        assert!(!report.check("locality").unwrap().pass);
    }

    #[test]
    fn net_checks() {
        let p = table(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let sampling = Sampling {
            trials: 2000,
            ..Sampling::default()
        };
        let net = epsilon_net(&p, 0.5).unwrap();
        assert!(check_net(&net, &p, 0.5, sampling).unwrap().passed());

        let empty = check_net(&[], &p, 0.5, sampling).unwrap();
        assert!(!empty.passed());
        assert_eq!(empty.checks[0].witness.len(), 2);

        let single = check_net(&[SjPoint::leaf(1)], &p, 1.5, sampling).unwrap();
        assert!(single.passed());
    }

    #[test]
    fn merge_orders_by_name() {
        let mut a = VerificationReport::new(1e-12);
        a.push(CheckResult::new("zeta", true, 0.0, vec![]));
        let mut b = VerificationReport::new(1e-9);
        b.push(CheckResult::new("alpha", false, 1.0, vec![1]));
        let merged = a.merge(b);
        assert_eq!(merged.checks[0].name, "alpha");
        assert_eq!(merged.tolerance, 1e-9);
        assert!(!merged.passed());
    }
}
