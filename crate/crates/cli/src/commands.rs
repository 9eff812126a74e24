//! Subcommand implementations.

use crate::config::{DampingLawConfig, ScenarioConfig};
use crate::output::{speed_tag, write_atomic};
use crate::{CliError, CommonArgs, DampingProfileArgs, TransformArgs};
use contact_dynamics::dynamics::{simulate_reference_with, IntegrationOptions};
use contact_dynamics::potentials::turning_point;
use contact_dynamics::regularize::transform_trajectory;
use contact_dynamics::stability::{stability_report, Regime};
use contact_dynamics::{action_angle, ContactPotential, DampingSpec, ImpactScenario, Trajectory};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Loaded run context shared by every subcommand.
pub struct Run {
    pub config: ScenarioConfig,
    pub pot: Arc<dyn ContactPotential>,
    pub out_dir: PathBuf,
}

pub fn load(args: &CommonArgs) -> Result<Run, CliError> {
    let config = ScenarioConfig::load(&args.config)?;
    let config_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let pot = config.build_potential(&config_dir)?;
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Run {
        config,
        pot,
        out_dir,
    })
}

fn scenario(run: &Run, v0: f64, damped: bool) -> Result<ImpactScenario, CliError> {
    let scn = ImpactScenario::new(
        Arc::clone(&run.pot),
        run.config.m,
        v0,
        run.config.reference_constants()?,
    )?;
    if !damped {
        return Ok(scn);
    }
    let damping = run
        .config
        .damping
        .as_ref()
        .expect("caller checks damping presence");
    Ok(match damping.law {
        DampingLawConfig::Universal => scn.with_universal_damping(damping.c0)?,
        DampingLawConfig::ConstantPhysical => scn.with_constant_damping(damping.c0)?,
    })
}

fn damping_label(config: &ScenarioConfig) -> String {
    match &config.damping {
        None => "none".into(),
        Some(d) => match d.law {
            DampingLawConfig::Universal => format!("universal C0={}", d.c0),
            DampingLawConfig::ConstantPhysical => format!("constant_physical C={}", d.c0),
        },
    }
}

/// Runs `job` for every configured speed concurrently and returns the
/// results in configuration order.
fn per_speed<T: Send>(
    run: &Run,
    job: impl Fn(f64) -> Result<T, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    let speeds = &run.config.v0.0;
    let mut results: Vec<Option<Result<T, CliError>>> = Vec::new();
    results.resize_with(speeds.len(), || None);
    std::thread::scope(|scope| {
        for (slot, &v0) in results.iter_mut().zip(speeds) {
            let job = &job;
            scope.spawn(move || *slot = Some(job(v0)));
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("scoped thread always fills its slot"))
        .collect()
}

pub fn simulate(args: &CommonArgs) -> Result<(), CliError> {
    let run = load(args)?;
    let damped_variant = run.config.damping.as_ref().map(|d| d.c0 > 0.0) == Some(true);
    let opts = IntegrationOptions {
        rtol: args.rtol,
        atol: args.atol,
        ..Default::default()
    };

    // (file name, contents) pairs computed per speed, written afterwards
    let batches = per_speed(&run, |v0| {
        let mut files = Vec::new();
        let variants: &[(&str, bool)] = if damped_variant {
            &[("conservative", false), ("damped", true)]
        } else {
            &[("conservative", false)]
        };
        for (label, damped) in variants {
            let scn = scenario(&run, v0, *damped)?;
            let traj = simulate_reference_with(&scn, opts)?;
            let transformed =
                transform_trajectory(run.pot.as_ref(), scn.refs(), run.config.m, &traj)?;
            let comments = vec![
                format!("scenario: {}", run.config.echo),
                format!("v0: {v0}"),
                format!(
                    "damping: {}",
                    if *damped {
                        damping_label(&run.config)
                    } else {
                        "none".into()
                    }
                ),
            ];
            let tag = speed_tag(v0);
            let mut physical = Vec::new();
            traj.write_csv(&mut physical, &comments)?;
            files.push((format!("physical_v0_{tag}_{label}.csv"), physical));
            let mut virt = Vec::new();
            transformed.write_csv(&mut virt, &comments)?;
            files.push((format!("transformed_v0_{tag}_{label}.csv"), virt));
        }
        Ok(files)
    })?;

    for (name, contents) in batches.into_iter().flatten() {
        let path = write_atomic(&run.out_dir, &name, &contents)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn transform(args: &TransformArgs) -> Result<(), CliError> {
    let run = load(&args.common)?;
    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::config(format!("cannot open {}: {e}", args.input.display())))?;
    let traj = Trajectory::read_csv(BufReader::new(file))?;
    let transformed = transform_trajectory(
        run.pot.as_ref(),
        run.config.reference_constants()?,
        run.config.m,
        &traj,
    )?;
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("input");
    let comments = vec![
        format!("scenario: {}", run.config.echo),
        format!("source: {}", args.input.display()),
    ];
    let mut out = Vec::new();
    transformed.write_csv(&mut out, &comments)?;
    let path = write_atomic(&run.out_dir, &format!("transformed_{stem}.csv"), &out)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn bound(args: &CommonArgs) -> Result<(), CliError> {
    let run = load(args)?;
    let reports = per_speed(&run, |v0| {
        let report = stability_report(run.pot.as_ref(), run.config.m, v0)?;
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Config(format!("cannot serialise report: {e}")))?;
        Ok((v0, json))
    })?;
    for (v0, json) in reports {
        let name = format!("bound_v0_{}.json", speed_tag(v0));
        let path = write_atomic(&run.out_dir, &name, json.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn table1(args: &CommonArgs) -> Result<(), CliError> {
    let run = load(args)?;
    let rows = per_speed(&run, |v0| {
        let report = stability_report(run.pot.as_ref(), run.config.m, v0)?;
        if report.regime == Regime::Degenerate {
            return Err(contact_dynamics::Error::DegenerateBound.into());
        }
        Ok(format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            v0,
            report.q_max * 1e3,
            report.force_at_qmax,
            report.dt_safe * 1e3
        ))
    })?;
    let mut csv = String::from("v0,delta_max_mm,force_N,dt_safe_ms\n");
    for row in rows {
        csv.push_str(&row);
    }
    let path = write_atomic(&run.out_dir, "table1.csv", csv.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn action(args: &CommonArgs) -> Result<(), CliError> {
    let run = load(args)?;
    let reports = per_speed(&run, |v0| {
        let e = 0.5 * run.config.m * v0 * v0;
        let report = action_angle::report(run.pot.as_ref(), run.config.m, e)?;
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Config(format!("cannot serialise report: {e}")))?;
        Ok((v0, json))
    })?;
    for (v0, json) in reports {
        let name = format!("action_v0_{}.json", speed_tag(v0));
        let path = write_atomic(&run.out_dir, &name, json.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn damping_profile(args: &DampingProfileArgs) -> Result<(), CliError> {
    let run = load(&args.common)?;
    let damping = run.config.damping.as_ref().ok_or_else(|| {
        CliError::config("damping-profile requires a 'damping' section in the config".into())
    })?;
    if args.points < 2 {
        return Err(CliError::config("need at least 2 grid points".into()));
    }

    let v_max = run.config.v0.0.iter().cloned().fold(0.0_f64, f64::max);
    let q_ref = turning_point(run.pot.as_ref(), 0.5 * run.config.m * v_max * v_max)?;
    let q_hi = args.q_max.unwrap_or(q_ref);
    let q_lo = args.q_min.unwrap_or(q_hi * 1e-3);
    if !(q_lo > 0.0) || !(q_hi > q_lo) {
        return Err(CliError::config(format!("invalid q-grid [{q_lo}, {q_hi}]")));
    }

    let refs = run.config.reference_constants()?;
    let spec = DampingSpec::new(damping.c0, refs, run.config.m)?;
    let mut csv = String::from("q,C\n");
    for i in 0..args.points {
        let q = q_lo + (q_hi - q_lo) * i as f64 / (args.points - 1) as f64;
        let c = match damping.law {
            DampingLawConfig::Universal => spec.universal_coefficient(run.pot.as_ref(), q)?,
            DampingLawConfig::ConstantPhysical => damping.c0,
        };
        csv.push_str(&format!("{q:.16e},{c:.16e}\n"));
    }
    let path = write_atomic(&run.out_dir, "damping_profile.csv", csv.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}
