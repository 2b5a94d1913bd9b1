use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use magnomech::dynamics::TrajectoryJson;
use magnomech::fingerprint::fingerprint;
use magnomech::sweeps::{find_preset, parse_grid_spec, Evaluation, Preset};
use magnomech::table::{format_float, write_csv};
use magnomech::{
    build_diffusion, build_drift, evolve, initial_cm, log_negativity, stability, steady_state,
    Bipartition, CovarianceMatrix, Error, IntegratorSettings, Result, Scenario, ScenarioConfig,
    SweepSettings,
};
use serde::Serialize;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{LnArgs, SimulateArgs, SteadyArgs, SweepArgs, ValidateArgs};

fn load(path: &Path) -> Result<Scenario> {
    ScenarioConfig::from_path(path)?.build()
}

fn partitions(specs: &[String], n_nodes: usize) -> Result<Vec<Bipartition>> {
    specs
        .iter()
        .map(|s| Bipartition::parse_for(s, n_nodes))
        .collect()
}

fn write(
    dir: &Path,
    name: &str,
    contents: impl AsRef<[u8]>,
    manifest: &mut RunManifest,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    info!("wrote {}", path.display());
    manifest.outputs.push(path);
    Ok(())
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    manifest: &mut RunManifest,
) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, text, manifest)
}

fn finish(dir: &Path, mut manifest: RunManifest) -> Result<()> {
    manifest.outputs.push(dir.join("manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

fn ln_rows(v: &CovarianceMatrix, parts: &[Bipartition]) -> Result<Vec<f64>> {
    parts
        .iter()
        .map(|p| log_negativity(v, p).map(|r| r.value))
        .collect()
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let scenario = load(&args.config)?;
    let parts = partitions(&args.partitions, scenario.n_nodes())?;
    let integrator = IntegratorSettings::with_dt(args.dt)?;
    if args.sample_every == 0 {
        return Err(Error::invalid("sample-every", "must be at least 1"));
    }
    let Evaluation::Trajectory(times) =
        Evaluation::time_grid(args.t_max, args.dt * args.sample_every as f64)?
    else {
        unreachable!("time_grid returns a trajectory")
    };
    let a = build_drift(&scenario);
    let d = build_diffusion(&scenario);
    let report = stability(&a)?;
    if !report.stable {
        warn!(
            "drift is unstable (spectral abscissa {:.6e}); the covariance grows without bound",
            report.spectral_abscissa
        );
    }
    let traj = evolve(&a, &d, &initial_cm(&scenario), &times, &integrator)?;

    let mut header = vec!["t".to_string()];
    header.extend(parts.iter().map(ToString::to_string));
    let mut rows = Vec::with_capacity(traj.len());
    for v in traj.snapshots() {
        let mut row = vec![format_float(v.time())];
        row.extend(ln_rows(v, &parts)?.into_iter().map(format_float));
        rows.push(row);
    }

    let settings = json!({
        "t_max": args.t_max,
        "dt": args.dt,
        "sample_every": args.sample_every,
        "partitions": &args.partitions,
        "units": scenario.units(),
    });
    let mut manifest = RunManifest::new(
        "simulate",
        Some(&args.config),
        settings,
        scenario.fingerprint(),
    );
    write(
        &args.out,
        "simulate.csv",
        write_csv(&header, rows)?,
        &mut manifest,
    )?;
    if args.trajectory {
        write_json(
            &args.out,
            "trajectory.json",
            &TrajectoryJson::from(&traj),
            &mut manifest,
        )?;
    }
    finish(&args.out, manifest)
}

#[derive(Serialize)]
struct StabilityJson<'a> {
    #[serde(flatten)]
    report: &'a magnomech::StabilityReport,
    steady_residual: Option<f64>,
}

pub fn steady(args: &SteadyArgs) -> Result<()> {
    let scenario = load(&args.config)?;
    let parts = partitions(&args.partitions, scenario.n_nodes())?;
    let a = build_drift(&scenario);
    let d = build_diffusion(&scenario);
    let report = stability(&a)?;
    let settings = json!({ "partitions": &args.partitions, "units": scenario.units() });
    let mut manifest = RunManifest::new(
        "steady",
        Some(&args.config),
        settings,
        scenario.fingerprint(),
    );

    let outcome = steady_state(&a, &d);
    let stability_json = StabilityJson {
        report: &report,
        steady_residual: outcome.as_ref().ok().map(|s| s.residual),
    };
    write_json(&args.out, "stability.json", &stability_json, &mut manifest)?;
    let ss = match outcome {
        Ok(ss) => ss,
        Err(e) => {
            finish(&args.out, manifest)?;
            return Err(e);
        }
    };
    let values = ln_rows(&ss.covariance, &parts)?;
    let header = ["partition".to_string(), "ln".to_string()];
    let rows = parts
        .iter()
        .zip(values)
        .map(|(p, v)| vec![p.to_string(), format_float(v)]);
    write(
        &args.out,
        "steady.csv",
        write_csv(&header, rows)?,
        &mut manifest,
    )?;
    write_json(&args.out, "steady_cm.json", &ss.covariance, &mut manifest)?;
    finish(&args.out, manifest)
}

pub fn ln(args: &LnArgs) -> Result<()> {
    let text = fs::read_to_string(&args.cm)?;
    let v: CovarianceMatrix = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", args.cm.display())))?;
    // reduced matrices carry their own labels; open ranges run to the highest node present
    let n_nodes = v.modes().iter().map(|m| m.node + 1).max().unwrap_or(1);
    let mut parts = Vec::with_capacity(args.partitions.len());
    for spec in &args.partitions {
        let p = Bipartition::parse_for(spec, n_nodes)?;
        if let Some(m) = p.modes().find(|m| !v.modes().contains(m)) {
            return Err(Error::UnknownMode(m.to_string()));
        }
        parts.push(p);
    }
    let values = ln_rows(&v, &parts)?;
    let header = ["partition".to_string(), "ln".to_string()];
    let rows = parts
        .iter()
        .zip(values)
        .map(|(p, v)| vec![p.to_string(), format_float(v)]);
    print!("{}", write_csv(&header, rows)?);
    Ok(())
}

fn sweep_source(args: &SweepArgs) -> Result<(Preset, Option<PathBuf>)> {
    match (&args.preset, &args.grid) {
        (Some(name), None) => Ok((find_preset(name, args.resolution)?, None)),
        (None, Some(path)) => Ok((
            parse_grid_spec(&fs::read_to_string(path)?)?,
            Some(path.clone()),
        )),
        _ => Err(Error::invalid(
            "sweep",
            "give exactly one of --preset or --grid",
        )),
    }
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    if args.resolution < 2 {
        return Err(Error::invalid("resolution", "must be at least 2"));
    }
    let (preset, grid_path) = sweep_source(args)?;
    let settings = SweepSettings {
        integrator: IntegratorSettings::with_dt(args.dt)?,
        workers: args.workers,
        steady: args.steady,
    };
    info!("running {} ({} grid points)", preset.name, preset.points());
    let result = preset.run(&settings)?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        warn!("{failed} of {} rows carry an error", result.rows.len());
    }

    let engine = json!({
        "dt": args.dt,
        "steady": args.steady,
        "resolution": args.resolution,
    });
    let mut manifest = RunManifest::new(
        "sweep",
        grid_path.as_deref(),
        engine,
        result.metadata.fingerprint.clone(),
    );
    write(
        &args.out,
        &format!("{}.csv", preset.name),
        result.to_csv()?,
        &mut manifest,
    )?;
    let sidecar = json!({
        "metadata": &result.metadata,
        "description": &preset.description,
        "rows": result.rows.len(),
        "failed_rows": failed,
    });
    write_json(
        &args.out,
        &format!("{}.json", preset.name),
        &sidecar,
        &mut manifest,
    )?;
    finish(&args.out, manifest)
}

fn describe_evaluation(e: &Evaluation) -> String {
    match e {
        Evaluation::Trajectory(t) => format!(
            "t=0..{} ({} samples)",
            t.last().copied().unwrap_or(0.0),
            t.len()
        ),
        Evaluation::FixedTime(t) => format!("tau={t}"),
        Evaluation::Steady => "steady".into(),
    }
}

pub fn presets_list() -> Result<()> {
    for p in magnomech::preset_catalog() {
        println!(
            "{:<6} {:>5} points  {:<22} {}  [{}]",
            p.name,
            p.points(),
            describe_evaluation(&p.evaluation),
            p.description,
            p.partitions.join("; ")
        );
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let config = ScenarioConfig::from_path(&args.config)?;
    let scenario = config.build()?;
    let u = scenario.units();
    let report = stability(&build_drift(&scenario))?;
    let list = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("config:       {}", args.config.display());
    println!("rate units:   {}", u.describe());
    println!("              presets use cyclic units; simulate/steady use the config's units");
    println!("nodes:        {}", scenario.n_nodes());
    println!("delta:        [{}]", list(scenario.delta()));
    println!("omega_b:      {:.6}", scenario.omega_b());
    println!("g:            [{}]", list(scenario.g()));
    println!("kappa:        [{}]", list(scenario.kappa()));
    println!("gamma:        [{}]", list(scenario.gamma()));
    println!("kappa_b:      {:.6e}", scenario.kappa_b());
    println!("phi:          [{}]", list(scenario.phi()));
    println!("n_bar_m:      {:.6e}", scenario.n_bar_m());
    println!("n_bar_b:      {:.6e}", scenario.n_bar_b());
    println!(
        "stability:    {} (spectral abscissa {:.6e} per time unit of {} us)",
        if report.stable { "stable" } else { "UNSTABLE" },
        report.spectral_abscissa,
        u.time_unit_us()
    );
    println!("fingerprint:  {}", fingerprint(scenario.params()));
    Ok(())
}
