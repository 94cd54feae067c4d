//! Command-line front end: run simulations and sweeps from TOML
//! configurations, execute the built-in verification checks, and summarize
//! or compare artifact directories.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chrelax::config::ExperimentConfig;
use chrelax::integrate::run;
use chrelax::lab::sweep_tau;
use chrelax::output::{
    read_errors, read_manifest, read_ratefit, read_stability, write_simulation, write_sweep,
    ArtifactKind, MONITORS_FILE,
};
use chrelax::verify::{check_names, run_checks, FaultInjection};
use chrelax::{Error, Result};

#[derive(Parser)]
#[command(name = "chrelax", version, about = "Damped-relaxation phase-field solver and verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write trajectory, velocity, and monitor files.
    Simulate {
        /// TOML experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Artifact tag (overrides [output] tag).
        #[arg(long)]
        tag: Option<String>,
    },
    /// Run every tau in run.tau_list against the parabolic reference and fit
    /// the error decay rates.
    SweepTau {
        /// TOML experiment configuration with run.tau_list.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the tau runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in verification checks.
    Verify {
        /// Print the available check names and exit.
        #[arg(long)]
        list: bool,
        /// Run only checks whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Inject a named fault to prove the checks catch it
        /// (supported: neumann-sign).
        #[arg(long)]
        fault: Option<String>,
    },
    /// Summarize the artifacts in a directory.
    Report {
        /// Artifact directory holding a manifest.
        #[arg(long)]
        dir: PathBuf,
        /// Compare against a second artifact directory byte by byte.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, out, tag } => simulate(&config, out, tag),
        Command::SweepTau { config, out, jobs } => sweep(&config, out, jobs),
        Command::Verify { list, filter, fault } => verify(list, filter.as_deref(), fault.as_deref()),
        Command::Report { dir, compare } => report(&dir, compare.as_deref()),
    }
}

fn resolve_out(flag: Option<PathBuf>, config: &ExperimentConfig) -> Result<PathBuf> {
    flag.or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| {
            Error::InvalidConfig("no output directory; pass --out or set [output] dir".into())
        })
}

fn simulate(config_path: &Path, out: Option<PathBuf>, tag: Option<String>) -> Result<ExitCode> {
    let mut config = ExperimentConfig::from_file(config_path)?;
    if let Some(tag) = tag {
        config.output.tag = Some(tag);
    }
    if config.is_sweep() {
        return Err(Error::InvalidConfig(
            "this configuration sweeps run.tau_list; use the sweep-tau subcommand".into(),
        ));
    }
    let out = resolve_out(out, &config)?;
    let single = config.build_single()?;
    let traj = run(
        &single.system,
        single.state,
        &single.cfg,
        single.t_final,
        single.save_every,
    )?;
    let written = write_simulation(&out, &config, &traj)?;

    println!("config hash: {}", config.canonical_hash()?);
    println!(
        "ran {} with dt = {:e} to t = {:e} ({} samples)",
        single.cfg.scheme.name(),
        single.cfg.dt,
        single.t_final,
        traj.len()
    );
    if let Some(last) = traj.monitors().last() {
        println!(
            "final energy = {:.6e}, lyapunov = {:.6e}, mean = {:.6e}",
            last.energy_total, last.lyapunov, last.mean
        );
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(config_path: &Path, out: Option<PathBuf>, jobs: usize) -> Result<ExitCode> {
    let config = ExperimentConfig::from_file(config_path)?;
    if !config.is_sweep() {
        return Err(Error::InvalidConfig(
            "this configuration has a single run.tau; use the simulate subcommand".into(),
        ));
    }
    let out = resolve_out(out, &config)?;
    let plan = config.build_sweep()?;
    let outcome = sweep_tau(&plan, jobs)?;
    let written = write_sweep(&out, &config, &outcome)?;

    println!("config hash: {}", config.canonical_hash()?);
    println!("tau          c0_vstar     l2_w         l2_wstar_mu  l2_h_w");
    for r in &outcome.reports {
        println!(
            "{:<12.6e} {:<12.6e} {:<12.6e} {:<12.6e} {:<12.6e}",
            r.tau, r.c0_vstar, r.l2_w, r.l2_wstar_mu, r.l2_h_w
        );
    }
    for (name, fit) in &outcome.fits {
        println!(
            "fit {name}: slope = {:.4}, r^2 = {:.6}",
            fit.slope, fit.r_squared
        );
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(list: bool, filter: Option<&str>, fault: Option<&str>) -> Result<ExitCode> {
    if list {
        for name in check_names() {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let faults = match fault {
        None => FaultInjection::default(),
        Some("neumann-sign") => FaultInjection { neumann_sign: true },
        Some(other) => {
            return Err(Error::InvalidParameter(format!(
                "unknown fault '{other}'; supported: neumann-sign"
            )))
        }
    };
    let results = run_checks(filter, &faults);
    if results.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no check name contains '{}'",
            filter.unwrap_or_default()
        )));
    }
    let mut failed = 0usize;
    for r in &results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}", r.name, r.detail);
        if !r.pass {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn report(dir: &Path, compare: Option<&Path>) -> Result<ExitCode> {
    let manifest = read_manifest(dir)?;
    let kind = match manifest.kind {
        ArtifactKind::Simulate => "simulate",
        ArtifactKind::Sweep => "sweep",
    };
    println!("kind: {kind}");
    println!("config hash: {}", manifest.config_hash);
    let domain = &manifest.config.domain;
    println!(
        "domain: {}d, lengths {:?}, modes {:?}",
        domain.dim, domain.lengths, domain.modes
    );
    let run_cfg = &manifest.config.run;
    println!(
        "scheme: {}, dt = {:e}, t_final = {:e}",
        run_cfg.scheme.name(),
        run_cfg.dt,
        run_cfg.t_final
    );

    match manifest.kind {
        ArtifactKind::Simulate => {
            let (_, rows) = chrelax::output::read_csv(&dir.join(MONITORS_FILE))?;
            println!("samples: {}", rows.len());
            if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
                println!(
                    "energy: {:.6e} at t = {:e}, {:.6e} at t = {:e}",
                    first[1], first[0], last[1], last[0]
                );
            }
        }
        ArtifactKind::Sweep => {
            let errors = read_errors(dir)?;
            println!("tau          c0_vstar     l2_w         l2_wstar_mu  l2_h_w");
            for r in &errors {
                println!(
                    "{:<12.6e} {:<12.6e} {:<12.6e} {:<12.6e} {:<12.6e}",
                    r.tau, r.c0_vstar, r.l2_w, r.l2_wstar_mu, r.l2_h_w
                );
            }
            for (name, fit) in read_ratefit(dir)? {
                println!(
                    "fit {name}: slope = {:.4}, r^2 = {:.6}",
                    fit.slope, fit.r_squared
                );
            }
            let stability = read_stability(dir)?;
            println!("stability ratios (max/median over the tau runs):");
            for (i, (field, _)) in stability.reference.fields().iter().enumerate() {
                let mut values: Vec<f64> = stability
                    .runs
                    .iter()
                    .map(|(_, report)| report.fields()[i].1)
                    .collect();
                values.sort_by(|a, b| a.total_cmp(b));
                let max = values.last().copied().unwrap_or(0.0);
                let median = values[values.len() / 2];
                let ratio = if median > 0.0 { max / median } else { f64::NAN };
                println!("  {field}: max = {max:.6e}, median = {median:.6e}, ratio = {ratio:.3}");
            }
        }
    }

    if let Some(other) = compare {
        return compare_dirs(dir, other);
    }
    Ok(ExitCode::SUCCESS)
}

/// Byte-compare the regular files of two artifact directories.
fn compare_dirs(a: &Path, b: &Path) -> Result<ExitCode> {
    let list = |dir: &Path| -> Result<Vec<String>> {
        let mut names = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            if entry.path().is_file() {
                names.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        names.sort();
        Ok(names)
    };
    let names_a = list(a)?;
    let names_b = list(b)?;
    let mut clean = true;
    for name in &names_a {
        if !names_b.contains(name) {
            println!("only in {}: {name}", a.display());
            clean = false;
        }
    }
    for name in &names_b {
        if !names_a.contains(name) {
            println!("only in {}: {name}", b.display());
            clean = false;
        }
    }
    for name in names_a.iter().filter(|n| names_b.contains(n)) {
        let bytes_a = std::fs::read(a.join(name)).map_err(|e| Error::io(&a.join(name), e))?;
        let bytes_b = std::fs::read(b.join(name)).map_err(|e| Error::io(&b.join(name), e))?;
        if bytes_a == bytes_b {
            println!("identical: {name}");
        } else {
            println!("DIFFERS: {name}");
            clean = false;
        }
    }
    Ok(if clean {
        println!("directories match byte for byte");
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
