use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qfridge_core::model::NoiseModel;
use qfridge_core::observables::{rhp_concurrence_series, rhp_nonmonotonicity, witness_mc, MarkovFamily};
use qfridge_core::scenario::run::fmt_float;
use qfridge_core::scenario::{
    list_presets, load_targets, preset, run_config, run_regression, sweep_noise, write_atomic, Criterion,
    ScenarioConfig, Threshold,
};
use qfridge_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qfridge", version, about = "Few-qubit absorption refrigerator dynamics")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "QFRIDGE_OUT", default_value = "out")]
    out: PathBuf,
    /// Override a configuration field, e.g. `--set model.g=0.5` (repeatable).
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    set: Vec<String>,
    /// Number of samples in the fine part of the time grid.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// End time of the run.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run presets (or JSON scenario files) and write trajectory and feature CSVs.
    Run {
        #[arg(required = true)]
        presets: Vec<String>,
    },
    /// Sweep the strength of a noise model on its base scenario.
    SweepNoise {
        model: NoiseModel,
        /// Comma-separated ascending strengths.
        #[arg(long, value_delimiter = ',')]
        strengths: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = CriterionArg::Trajectory)]
        criterion: CriterionArg,
    },
    /// Temperature witness of the spin-environment qubit channel.
    Witness,
    /// Concurrence of the qubit with a free auxiliary qubit.
    Rhp,
    /// List the preset catalog.
    ListPresets,
    /// Run the presets named in a targets file and compare.
    Regress { targets: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Trajectory,
    ProbeTimes,
}

fn load(name: &str, cli: &Cli) -> Result<ScenarioConfig> {
    let base = if name.ends_with(".json") && Path::new(name).exists() {
        ScenarioConfig::from_json(&std::fs::read_to_string(name)?)?
    } else {
        preset(name)?
    };
    let mut cfg = base.apply_overrides(&cli.set)?;
    if let Some(h) = cli.horizon {
        cfg = cfg.with_horizon(h)?;
    }
    if let Some(n) = cli.grid {
        cfg = cfg.with_grid_points(n)?;
    }
    Ok(cfg)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), fmt_float)
}

fn run(cli: &Cli, names: &[String]) -> Result<()> {
    let configs: Vec<ScenarioConfig> = names.iter().map(|n| load(n, cli)).collect::<Result<_>>()?;
    let outputs: Vec<_> = configs.par_iter().map(run_config).collect::<Result<_>>()?;
    for out in &outputs {
        let (traj, feats) = out.write(&cli.out, out.name())?;
        println!("{}: {} and {}", out.name(), traj.display(), feats.display());
        for (q, v) in out.features() {
            let shown = match v {
                qfridge_core::scenario::FeatureValue::Number(x) => format!("{x:.6}"),
                qfridge_core::scenario::FeatureValue::Text(s) => s,
                qfridge_core::scenario::FeatureValue::Missing => "NONE".into(),
            };
            println!("  {q:<28} {shown}");
        }
    }
    Ok(())
}

fn sweep(cli: &Cli, model: NoiseModel, strengths: Option<Vec<f64>>, criterion: CriterionArg) -> Result<()> {
    let (base, default): (&str, Vec<f64>) = match model {
        NoiseModel::I => ("N1-A1-S3", (0..=12).map(|k| 1e-4 * 10f64.powf(k as f64 / 2.0)).collect()),
        NoiseModel::II => ("N2-A1-S3", (0..=10).map(|k| 1e-4 * 10f64.powf(k as f64 / 2.0)).collect()),
    };
    let cfg = load(base, cli)?;
    let criterion = match criterion {
        CriterionArg::Trajectory => Criterion::Trajectory,
        CriterionArg::ProbeTimes => Criterion::ProbeTimes,
    };
    let result = sweep_noise(&cfg, &strengths.unwrap_or(default), criterion)?;
    std::fs::create_dir_all(&cli.out)?;
    let path = cli.out.join(format!("sweep_{}.csv", cfg.name));
    write_atomic(&path, &result.to_csv()?)?;
    println!("{}: {}", cfg.name, path.display());
    println!("  probe time {}, noiseless reference {:.6}", result.probe_time, result.reference);
    match result.threshold {
        Threshold::Found { strength, lower, upper } => {
            println!("  threshold {strength:.6e} (bracket {lower:.6e} .. {upper:.6e})")
        }
        Threshold::BelowRange => println!("  threshold below the swept range"),
        Threshold::AboveRange => println!("  threshold above the swept range"),
    }
    Ok(())
}

fn witness(cli: &Cli) -> Result<()> {
    let cfg = load("witness", cli)?;
    let out = run_config(&cfg)?;
    let q = &cfg.model.build()?.qubits[0];
    let traj = &out.simulation.trajectory;
    let lambda = traj.excited_population(0)?;
    let rho0 = traj.reduced(0, 0)?.clone();
    let e = q.energy;
    let res = witness_mc(&traj.times, &lambda, &MarkovFamily::standard(q.tau), e / 2.0, -e / 2.0, &rho0)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["t", "lambda_nm", "T_nm", "lambda_m_best", "T_m_best", "mc"]).map_err(err)?;
    for r in &res {
        w.write_record([fmt_float(r.t), fmt_float(r.lambda_nm), opt(r.t_nm), opt(r.lambda_m_best), opt(r.t_m_best), opt(r.mc)])
            .map_err(err)?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let path = cli.out.join("witness.csv");
    write_atomic(&path, &w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
    let positive = res.iter().filter(|r| r.t > 0.0 && r.mc.is_some_and(|m| m > 0.0)).count();
    let total = res.iter().filter(|r| r.t > 0.0).count();
    println!("witness: {}", path.display());
    println!("  M_C > 0 at {positive} of {total} sample points with t > 0");
    Ok(())
}

fn rhp(cli: &Cli) -> Result<()> {
    let cfg = load("witness", cli)?;
    let model = cfg.model.build()?;
    let (_, env) = *model.finite_envs().first().ok_or_else(|| Error::Config("witness scenario needs a spin environment".into()))?;
    let times = cfg.grid.times()?;
    let c = rhp_concurrence_series(model.qubits[0].energy, &env, &times)?;
    let (flag, rise) = rhp_nonmonotonicity(&c)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["t", "concurrence"]).map_err(err)?;
    for (t, v) in times.iter().zip(&c) {
        w.write_record([fmt_float(*t), fmt_float(*v)]).map_err(err)?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let path = cli.out.join("rhp.csv");
    write_atomic(&path, &w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
    println!("rhp: {}", path.display());
    println!("  non-monotonic: {flag}, total rise {rise:.6e}");
    Ok(())
}

fn list() -> Result<()> {
    for p in list_presets()? {
        let aliases = if p.aliases.is_empty() { String::new() } else { format!(" (alias {})", p.aliases.join(", ")) };
        println!("{:<18} {}{}", p.name, p.description, aliases);
    }
    Ok(())
}

/// Exit code 4: some regression target failed.
struct RegressionFailed;

fn regress(cli: &Cli, targets: &Path) -> Result<Option<RegressionFailed>> {
    let file = load_targets(targets)?;
    let rows = run_regression(&file, &cli.set)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    for r in &rows {
        println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.message);
    }
    println!("{} of {} targets passed", rows.len() - failed, rows.len());
    Ok((failed > 0).then_some(RegressionFailed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { presets } => run(&cli, presets).map(|_| None),
        Command::SweepNoise { model, strengths, criterion } => sweep(&cli, *model, strengths.clone(), *criterion).map(|_| None),
        Command::Witness => witness(&cli).map(|_| None),
        Command::Rhp => rhp(&cli).map(|_| None),
        Command::ListPresets => list().map(|_| None),
        Command::Regress { targets } => regress(&cli, targets),
    };
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(RegressionFailed)) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() || matches!(e, Error::Io(_)) { 2 } else { 3 })
        }
    }
}
