use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sphereflow::dualflow::{dual_run, profile_from_support};
use sphereflow::flow::{advance_state, evolution_residual_f, evolution_residual_u, quermass_rates, run as flow_run};
use sphereflow::flow::{FlowConfig, Termination};
use sphereflow::hypersurface::{geometry, minkowski_residual, Checkpoint, RadialProfile};
use sphereflow::quermass::{audit_inequalities, quermass_vector, AuditReport};
use sphereflow::symfunc::suite::{run_suite, SuiteConfig};
use sphereflow::Quermass;

use crate::overrides::{configs, parse_shape};
use crate::{AuditArgs, FlowArgs, StudyArgs, SuiteArgs};

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// CSV file whose first line is a `#` comment naming the command and seed.
fn csv_file(path: &Path, header: &str) -> Result<fs::File> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(f, "# {header}")?;
    Ok(f)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunSummary<'a> {
    command: &'static str,
    seed: u64,
    config: &'a FlowConfig,
    termination: Termination,
    final_time: f64,
    accepted_steps: usize,
    rejected_steps: usize,
    violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_lambda_seen: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eig_w_seen: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown_time: Option<f64>,
}

#[derive(Serialize)]
struct SupportSnapshot<'a> {
    seed: u64,
    t: f64,
    theta: &'a [f64],
    u: &'a [f64],
}

fn run_one(cfg: &FlowConfig, seed: u64, dir: &Path, dual: bool) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let command = if dual { "dual-run" } else { "run" };
    let header = format!(
        "sphereflow {command} seed={seed} n={} k={} N={}",
        cfg.n, cfg.k, cfg.nodes
    );
    let trace_path = dir.join("trace.csv");
    let summary = if dual {
        let out = dual_run(cfg)?;
        out.write_csv(csv_file(&trace_path, &header)?)?;
        let profile = cfg.initial_profile()?;
        write_json(
            &dir.join("final_support.json"),
            &SupportSnapshot {
                seed,
                t: out.final_time,
                theta: profile.theta(),
                u: &out.final_support,
            },
        )?;
        if let Ok(p) = profile_from_support(profile.grid(), &out.final_support) {
            write_json(
                &dir.join("final.json"),
                &p.to_checkpoint(cfg.k, out.final_time, Some(seed)),
            )?;
        }
        eprintln!(
            "{command}: {:?} at t = {} after {} steps",
            out.termination, out.final_time, out.accepted_steps
        );
        RunSummary {
            command,
            seed,
            config: cfg,
            termination: out.termination,
            final_time: out.final_time,
            accepted_steps: out.accepted_steps,
            rejected_steps: out.rejected_steps,
            violations: out.trace.violations().iter().map(ToString::to_string).collect(),
            max_drift: None,
            min_lambda_seen: None,
            min_eig_w_seen: Some(out.min_eig_w_seen),
            breakdown_time: out.breakdown_time,
        }
    } else {
        let out = flow_run(cfg)?;
        out.trace.write_csv(csv_file(&trace_path, &header)?)?;
        write_json(&dir.join("final.json"), &out.final_checkpoint(cfg.k, Some(seed)))?;
        if !out.checkpoints.is_empty() {
            let cp_dir = dir.join("checkpoints");
            fs::create_dir_all(&cp_dir)?;
            for (i, cp) in out.checkpoints.iter().enumerate() {
                let mut cp = cp.clone();
                cp.seed = Some(seed);
                write_json(&cp_dir.join(format!("cp-{:04}.json", i + 1)), &cp)?;
            }
        }
        eprintln!(
            "{command}: {:?} at t = {} after {} steps",
            out.termination, out.final_time, out.accepted_steps
        );
        let breakdown = matches!(out.termination, Termination::ConvexityLoss | Termination::Blowup);
        RunSummary {
            command,
            seed,
            config: cfg,
            termination: out.termination,
            final_time: out.final_time,
            accepted_steps: out.accepted_steps,
            rejected_steps: out.rejected_steps,
            violations: out.trace.violations().iter().map(ToString::to_string).collect(),
            max_drift: Some(out.max_drift),
            min_lambda_seen: Some(out.min_lambda_seen),
            min_eig_w_seen: None,
            breakdown_time: breakdown.then_some(out.final_time),
        }
    };
    write_json(&dir.join("summary.json"), &summary)
}

pub fn run(args: &FlowArgs, dual: bool) -> Result<ExitCode> {
    let list = configs(args)?;
    if args.sweep.is_none() {
        run_one(&list[0], args.seed, &args.out, dual)?;
        return Ok(ExitCode::SUCCESS);
    }
    let results: Vec<Result<()>> = std::thread::scope(|scope| {
        let handles: Vec<_> = list
            .iter()
            .enumerate()
            .map(|(i, cfg)| {
                let dir = args.out.join(format!("run-{i:03}"));
                scope.spawn(move || run_one(cfg, args.seed, &dir, dual))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(anyhow::anyhow!("sweep worker panicked")))
            })
            .collect()
    });
    for (i, r) in results.into_iter().enumerate() {
        r.with_context(|| format!("sweep entry {i}"))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    seed: u64,
    t: f64,
    k: usize,
    quermass: &'a Quermass,
    audit: &'a AuditReport,
}

pub fn audit(args: &AuditArgs) -> Result<ExitCode> {
    let cp = Checkpoint::read(&args.checkpoint).with_context(|| format!("reading {}", args.checkpoint.display()))?;
    let profile = RadialProfile::from_checkpoint(&cp)?;
    let k = args.k.unwrap_or(cp.k);
    let state = geometry(&profile, k)?;
    let q = quermass_vector(&state)?;
    let report = audit_inequalities(&q);
    let out = AuditOutput {
        seed: args.seed,
        t: cp.t,
        k,
        quermass: &q,
        audit: &report,
    };
    match &args.out {
        Some(path) => write_json(path, &out)?,
        None => println!("{}", serde_json::to_string_pretty(&out)?),
    }
    eprintln!(
        "audit: {} entries, {} violated",
        report.entries.len(),
        report.violations()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn identity_suite(args: &SuiteArgs) -> Result<ExitCode> {
    if args.n_max < 2 {
        bail!("--n-max must be at least 2");
    }
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let report = run_suite(&SuiteConfig {
        n_max: args.n_max,
        samples: args.samples,
        seed: args.seed,
    });
    match &args.out {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    for c in report.checks.iter().filter(|c| c.failures > 0) {
        eprintln!(
            "FAIL {} n={} index={}: {} of {}",
            c.check, c.n, c.index, c.failures, c.samples
        );
    }
    eprintln!(
        "identity-suite: {} checks, {} failures (seed {})",
        report.checks.len(),
        report.total_failures(),
        args.seed
    );
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StudyLevel {
    #[serde(rename = "N")]
    nodes: usize,
    h: f64,
    dt: f64,
    residual_u: f64,
    residual_f: f64,
    /// Hsiung–Minkowski defects for `m = 0..n−1`.
    minkowski: Vec<f64>,
    /// First-variation defects for `l = −1..n`.
    quermass_rates: Vec<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StudyReport {
    seed: u64,
    n: usize,
    k: usize,
    shape: String,
    levels: Vec<StudyLevel>,
    /// Observed orders between consecutive levels, same layout as a level.
    orders: Vec<StudyOrders>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StudyOrders {
    residual_u: f64,
    residual_f: f64,
    minkowski: Vec<f64>,
    quermass_rates: Vec<f64>,
}

pub fn convergence_study(args: &StudyArgs) -> Result<ExitCode> {
    if args.levels.len() < 2 {
        bail!("--levels needs at least two grid sizes");
    }
    let shape = parse_shape(&args.shape)?;
    let mut cfg = FlowConfig::standard();
    cfg.n = args.n;
    cfg.k = args.k;
    cfg.initial_shape = shape;
    let mut levels = Vec::new();
    for &nodes in &args.levels {
        cfg.nodes = nodes;
        cfg.validate()?;
        let profile = cfg.initial_profile()?;
        let state = geometry(&profile, args.k)?;
        let h = state.grid().spacing();
        let dt = args.dt_ratio * h * h;
        let (_, next) = advance_state(&state, dt)?;
        levels.push(StudyLevel {
            nodes,
            h,
            dt,
            residual_u: evolution_residual_u(&state, &next, dt)?,
            residual_f: evolution_residual_f(&state, &next, dt)?,
            minkowski: (0..args.n)
                .map(|m| minkowski_residual(&state, m))
                .collect::<sphereflow::Result<_>>()?,
            quermass_rates: quermass_rates(&profile, args.k, 1e-5)?
                .iter()
                .map(|r| r.residual())
                .collect(),
        });
    }
    let order = |a: f64, b: f64, ha: f64, hb: f64| (a / b).ln() / (ha / hb).ln();
    let orders = levels
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let each = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| order(*p, *q, a.h, b.h)).collect();
            StudyOrders {
                residual_u: order(a.residual_u, b.residual_u, a.h, b.h),
                residual_f: order(a.residual_f, b.residual_f, a.h, b.h),
                minkowski: each(&a.minkowski, &b.minkowski),
                quermass_rates: each(&a.quermass_rates, &b.quermass_rates),
            }
        })
        .collect();
    let report = StudyReport {
        seed: args.seed,
        n: args.n,
        k: args.k,
        shape: args.shape.clone(),
        levels,
        orders,
    };
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_json(&args.out.join("convergence.json"), &report)?;

    let header = format!(
        "sphereflow convergence-study seed={} n={} k={}",
        args.seed, args.n, args.k
    );
    let mut w = csv::Writer::from_writer(csv_file(&args.out.join("convergence.csv"), &header)?);
    let mut cols = vec![
        "N".to_string(),
        "h".into(),
        "dt".into(),
        "residualU".into(),
        "residualF".into(),
    ];
    cols.extend((0..args.n).map(|m| format!("minkowski_{m}")));
    cols.extend((-1..=args.n as isize).map(|l| format!("rate_{l}")));
    w.write_record(&cols)?;
    for l in &report.levels {
        let mut row = vec![l.nodes.to_string(), l.h.to_string(), l.dt.to_string()];
        row.extend(
            [l.residual_u, l.residual_f]
                .iter()
                .chain(&l.minkowski)
                .chain(&l.quermass_rates)
                .map(f64::to_string),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    for (i, o) in report.orders.iter().enumerate() {
        eprintln!(
            "levels {} -> {}: order u {:.2}, F {:.2}",
            report.levels[i].nodes,
            report.levels[i + 1].nodes,
            o.residual_u,
            o.residual_f
        );
    }
    Ok(ExitCode::SUCCESS)
}
