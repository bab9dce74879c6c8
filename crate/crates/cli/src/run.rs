use std::path::Path;

use serde_json::{json, Value};
use sqjoin::operator::{
    build_for, equivariant_extend, near_isometric_extend, ExtendedTable, ExtensionConfig,
    GroupAction, Pipeline,
};
use sqjoin::sj::epsilon_net;
use sqjoin::verify::{
    check_metric, check_net, check_pseudometric, check_regular_operator, CheckResult, Sampling,
    VerificationReport,
};
use sqjoin::{AmbientSpace, FunctionTable};

use crate::error::CliError;
use crate::io::{self, Format};
use crate::{Command, ExtendArgs, NetCheckArgs, VerifyArgs};

enum Variant {
    Plain,
    Equivariant(GroupAction),
    NearIsometric(GroupAction, f64),
}

struct Inputs {
    space: AmbientSpace,
    p: FunctionTable,
    config: ExtensionConfig,
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Extend(args) => extend(&args, |_| Ok(Variant::Plain)),
        Command::Equivariant { base, group } => extend(&base, |space| {
            let gens = io::read_group(&group, space.ground())?;
            Ok(Variant::Equivariant(GroupAction::generate(&gens, space)?))
        }),
        Command::NearIsometric { base, group, eps } => extend(&base, |space| {
            let group = match &group {
                Some(path) => GroupAction::generate(&io::read_group(path, space.ground())?, space)?,
                None => GroupAction::identity(space.len()),
            };
            Ok(Variant::NearIsometric(group, eps))
        }),
        Command::Verify(args) => verify(&args),
        Command::NetCheck(args) => net_check(&args),
        Command::Demo {
            format,
            out,
            report,
        } => demo(format, out.as_deref(), report.as_deref()),
    }
}

/// The space together with the distance matrix as read, before normalization.
fn load_space(
    path: &Path,
    subset: &str,
    tolerance: f64,
) -> Result<(AmbientSpace, FunctionTable), CliError> {
    let d = io::read_matrix(path)?;
    let ids = io::resolve_ids(subset, d.ground(), "subset")?;
    Ok((AmbientSpace::new(d.clone(), ids, tolerance)?, d))
}

fn subset_labels(space: &AmbientSpace) -> Vec<String> {
    space
        .subset()
        .iter()
        .map(|&y| space.ground().label(y).to_string())
        .collect()
}

fn load_inputs(args: &ExtendArgs) -> Result<Inputs, CliError> {
    let (space, d) = load_space(&args.metric_d, &args.subset, args.tolerance)?;
    let labels = subset_labels(&space);
    let p = match &args.pseudometric_p {
        Some(path) => io::align_to(&io::read_matrix(path)?, &labels, "pseudometric-p")?,
        None => d.restrict(space.subset()),
    };

    let mut config = ExtensionConfig {
        tolerance: args.tolerance,
        normalize_weights: !args.raw_weights,
        ..Default::default()
    };
    config.truncation = args.truncation;
    if let Some(spec) = &args.points_ab {
        let ids = io::resolve_ids(spec, space.ground(), "points-ab")?;
        let pos: Vec<usize> = ids
            .iter()
            .map(|&y| {
                space.x_position(y).ok_or_else(|| {
                    CliError::Validation(format!(
                        "points-ab: {:?} is not in the subset",
                        space.ground().label(y)
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        match pos[..] {
            [a, b] if a != b => config.base_points = Some((a, b)),
            _ => {
                return Err(CliError::Validation(
                    "points-ab needs two distinct points".into(),
                ))
            }
        }
    }
    config.require_metric = args.truncation.is_none() && p.is_metric(args.tolerance);
    config.validate()?;
    Ok(Inputs { space, p, config })
}

fn check(name: &str, worst: f64, witness: Vec<usize>, tol: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass: worst <= tol,
        worst,
        witness,
        detail: None,
    }
}

/// Output-side checks: agreement with `p` on X, the norm bound, and the
/// pseudometric or metric axioms `p` satisfies.
fn output_checks(inputs: &Inputs, out: &FunctionTable, norm_factor: f64) -> VerificationReport {
    let Inputs { space, p, config } = inputs;
    let tol = config.tolerance;
    let x = space.subset();
    let (mut ext, mut ext_at) = (0.0f64, Vec::new());
    for (i, &yi) in x.iter().enumerate() {
        for (j, &yj) in x.iter().enumerate() {
            let gap = (out.get(yi, yj) - p.get(i, j)).abs();
            if gap > ext {
                ext = gap;
                ext_at = vec![yi, yj];
            }
        }
    }
    let bound = norm_factor * p.sup_norm();
    let (mut over, mut over_at) = (0.0f64, Vec::new());
    for y in 0..out.len() {
        for y2 in 0..out.len() {
            let excess = out.get(y, y2).abs() - bound;
            if excess > over {
                over = excess;
                over_at = vec![y, y2];
            }
        }
    }
    let mut report = VerificationReport::new(tol);
    report.push(check("extension", ext, ext_at, tol));
    report.push(check("norm", over, over_at, tol));
    if config.require_metric {
        report = report.merge(check_metric(out, tol));
    } else if p.is_pseudometric(tol) {
        report = report.merge(check_pseudometric(out, tol));
    }
    report
}

fn write_matrix(m: &FunctionTable, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = io::render_matrix(m, format);
    match out {
        Some(path) => io::write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_report(path: Option<&Path>, report: &Value) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(report).expect("report serializes");
        text.push('\n');
        io::write_text(path, &text)?;
    }
    Ok(())
}

fn outcome(report: &VerificationReport) -> Result<(), CliError> {
    if report.passed() {
        return Ok(());
    }
    let failed: Vec<String> = report
        .failures()
        .map(|c| format!("{} (worst {:e}, witness {:?})", c.name, c.worst, c.witness))
        .collect();
    Err(CliError::Check(format!(
        "failed checks: {}",
        failed.join("; ")
    )))
}

fn extend(
    args: &ExtendArgs,
    variant: impl FnOnce(&AmbientSpace) -> Result<Variant, CliError>,
) -> Result<(), CliError> {
    let inputs = load_inputs(args)?;
    let variant = variant(&inputs.space)?;
    let Inputs { space, p, config } = &inputs;
    let (operation, result, norm_factor, group): (&str, ExtendedTable, f64, Option<&GroupAction>) =
        match &variant {
            Variant::Plain => ("extend", build_for(p, space, config)?.extend(p)?, 1.0, None),
            Variant::Equivariant(g) => (
                "equivariant",
                equivariant_extend(p, space, g, config)?,
                1.0,
                Some(g),
            ),
            Variant::NearIsometric(g, eps) => (
                "near-isometric",
                near_isometric_extend(p, space, g, *eps, config)?,
                1.0 + eps,
                Some(g),
            ),
        };
    let mut report = output_checks(&inputs, &result.values, norm_factor);
    if let Some(g) = group {
        let (dev, witness) = g.invariance_deviation(&result.values);
        report.push(check("invariance", dev, witness, config.tolerance));
    }

    let format = args
        .format
        .unwrap_or_else(|| Format::of_path(&args.metric_d));
    write_matrix(&result.values, format, args.out.as_deref())?;
    write_report(
        args.report.as_deref(),
        &json!({
            "operation": operation,
            "seed": args.seed,
            "provenance": result.provenance,
            "tail_bound": result.tail_bound,
            "tolerance": report.tolerance,
            "checks": report.checks,
            "passed": report.passed(),
        }),
    )?;
    outcome(&report)
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.matrix.is_none() && args.metric_d.is_none() {
        return Err(CliError::Validation(
            "verify needs --matrix or --metric-d with --subset".into(),
        ));
    }
    let mut report = VerificationReport::new(args.tolerance);
    if let Some(path) = &args.matrix {
        let m = io::read_matrix(path)?;
        let axioms = if args.require_metric {
            check_metric(&m, args.tolerance)
        } else {
            check_pseudometric(&m, args.tolerance)
        };
        report = report.merge(axioms);
    }
    if let Some(path) = &args.metric_d {
        let subset = args
            .subset
            .as_deref()
            .ok_or_else(|| CliError::Validation("--metric-d needs --subset".into()))?;
        let (space, _) = load_space(path, subset, args.tolerance)?;
        let config = ExtensionConfig {
            truncation: args.truncation,
            tolerance: args.tolerance,
            normalize_weights: !args.raw_weights,
            ..Default::default()
        };
        let pipeline = Pipeline::build(&space, &config, (0, 1))?;
        let domain = space.ground().subspace(space.subset());
        let sampling = Sampling {
            trials: args.trials,
            tolerance: args.tolerance,
            seed: args.seed,
        };
        let mut regularity = check_regular_operator(|q| pipeline.apply(q), &domain, sampling)?;
        for c in &mut regularity.checks {
            c.name = format!("operator_{}", c.name);
        }
        report = report.merge(regularity);
    }
    let doc = json!({
        "operation": "verify",
        "seed": args.seed,
        "tolerance": report.tolerance,
        "checks": report.checks,
        "passed": report.passed(),
    });
    match &args.report {
        Some(_) => write_report(args.report.as_deref(), &doc)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serializes")
        ),
    }
    outcome(&report)
}

fn net_check(args: &NetCheckArgs) -> Result<(), CliError> {
    let p = io::read_matrix(&args.pseudometric_p)?;
    let net = epsilon_net(&p, args.eps)?;
    let sampling = Sampling {
        trials: args.trials,
        tolerance: 0.0,
        seed: args.seed,
    };
    let report = check_net(&net, &p, args.eps, sampling)?;
    let doc = json!({
        "operation": "net-check",
        "seed": args.seed,
        "eps": args.eps,
        "net_size": net.len(),
        "checks": report.checks,
        "passed": report.passed(),
    });
    match &args.report {
        Some(_) => write_report(args.report.as_deref(), &doc)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serializes")
        ),
    }
    outcome(&report)
}

fn demo(format: Format, out: Option<&Path>, report: Option<&Path>) -> Result<(), CliError> {
    let sqjoin::demo::Demo { space, p, config } = sqjoin::demo::demo();
    let result = build_for(&p, &space, &config)?.extend(&p)?;
    let inputs = Inputs { space, p, config };
    let checks = output_checks(&inputs, &result.values, 1.0);
    write_matrix(&result.values, format, out)?;
    write_report(
        report,
        &json!({
            "operation": "demo",
            "provenance": result.provenance,
            "tail_bound": result.tail_bound,
            "tolerance": checks.tolerance,
            "checks": checks.checks,
            "passed": checks.passed(),
        }),
    )?;
    outcome(&checks)
}
