//! Artifact layout: a manifest plus flat CSV/JSON files, written with fixed
//! field order and 17-significant-digit floats so reruns of the same
//! configuration are byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::lab::{ErrorReport, RateFit, StabilityReport, SweepOutcome};

pub const ARTIFACT_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MONITORS_FILE: &str = "monitors.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const RATEFIT_FILE: &str = "ratefit.json";
pub const STABILITY_FILE: &str = "stability.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Simulate,
    Sweep,
}

/// Reproducibility record written next to every artifact set. Deliberately
/// free of timestamps and host details: equal configurations must produce
/// equal bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact_version: u32,
    pub kind: ArtifactKind,
    pub config_hash: String,
    pub config: ExperimentConfig,
}

/// Stability reports of a sweep: the parabolic reference and one per tau.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityArtifact {
    pub reference: StabilityReport,
    pub runs: Vec<(f64, StabilityReport)>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn fmt_row<W: std::fmt::Write>(out: &mut W, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.write_char(',').expect("string writes are infallible");
        }
        write!(out, "{v:.16e}").expect("string writes are infallible");
        first = false;
    }
    out.write_char('\n').expect("string writes are infallible");
}

fn trajectory_csv(traj: &Trajectory, velocities: bool) -> String {
    let n_coeffs = traj.phi(0).to_flat().len();
    let mut text = String::from("t");
    for i in 0..n_coeffs {
        text.push_str(&format!(",c{i}"));
    }
    text.push('\n');
    for i in 0..traj.len() {
        let field = if velocities {
            traj.rho(i).expect("velocity CSV requested for tau = 0 run")
        } else {
            traj.phi(i)
        };
        fmt_row(
            &mut text,
            std::iter::once(traj.times()[i]).chain(field.to_flat()),
        );
    }
    text
}

fn monitors_csv(traj: &Trajectory) -> String {
    let mut text = String::from(
        "t,energy_total,energy_willmore,energy_gl,lyapunov,norm_h,norm_vstar,norm_w,mean\n",
    );
    for row in traj.monitors() {
        fmt_row(
            &mut text,
            [
                row.t,
                row.energy_total,
                row.energy_willmore,
                row.energy_gl,
                row.lyapunov,
                row.norm_h,
                row.norm_vstar,
                row.norm_w,
                row.mean,
            ],
        );
    }
    text
}

fn errors_csv(reports: &[ErrorReport]) -> String {
    let mut text = String::from("tau,c0_vstar,l2_w,l2_wstar_mu,l2_h_w\n");
    for r in reports {
        fmt_row(&mut text, [r.tau, r.c0_vstar, r.l2_w, r.l2_wstar_mu, r.l2_h_w]);
    }
    text
}

fn manifest_json(config: &ExperimentConfig, kind: ArtifactKind) -> Result<String> {
    let manifest = Manifest {
        artifact_version: ARTIFACT_VERSION,
        kind,
        config_hash: config.canonical_hash()?,
        config: config.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    Ok(text)
}

/// Write the artifacts of one run: manifest, trajectory CSV (plus a velocity
/// CSV for tau > 0), and the monitor table. Returns the written paths.
pub fn write_simulation(
    dir: &Path,
    config: &ExperimentConfig,
    traj: &Trajectory,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tag = config.tag();
    let mut written = Vec::new();
    written.push(write_file(dir, MANIFEST_FILE, &manifest_json(config, ArtifactKind::Simulate)?)?);
    written.push(write_file(
        dir,
        &format!("trajectory_{tag}.csv"),
        &trajectory_csv(traj, false),
    )?);
    if traj.rho(0).is_some() {
        written.push(write_file(
            dir,
            &format!("velocity_{tag}.csv"),
            &trajectory_csv(traj, true),
        )?);
    }
    written.push(write_file(dir, MONITORS_FILE, &monitors_csv(traj))?);
    Ok(written)
}

/// Write the artifacts of one sweep: manifest, per-tau error table, rate
/// fits, and stability reports. Returns the written paths.
pub fn write_sweep(
    dir: &Path,
    config: &ExperimentConfig,
    outcome: &SweepOutcome,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    written.push(write_file(dir, MANIFEST_FILE, &manifest_json(config, ArtifactKind::Sweep)?)?);
    written.push(write_file(dir, ERRORS_FILE, &errors_csv(&outcome.reports))?);
    let mut ratefit = serde_json::to_string_pretty(&outcome.fits)?;
    ratefit.push('\n');
    written.push(write_file(dir, RATEFIT_FILE, &ratefit)?);
    let stability = StabilityArtifact {
        reference: outcome.reference_stability,
        runs: outcome.stability.clone(),
    };
    let mut text = serde_json::to_string_pretty(&stability)?;
    text.push('\n');
    written.push(write_file(dir, STABILITY_FILE, &text)?);
    Ok(written)
}

fn read_to_string(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = read_to_string(&path)?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    if manifest.artifact_version != ARTIFACT_VERSION {
        return Err(Error::MalformedArtifact {
            path: path.display().to_string(),
            detail: format!(
                "artifact version {} is not the supported {ARTIFACT_VERSION}",
                manifest.artifact_version
            ),
        });
    }
    Ok(manifest)
}

/// Parse a numeric CSV written by this module: header names plus rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::MalformedArtifact {
            path: path.display().to_string(),
            detail: "empty file".into(),
        })?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.parse::<f64>().map_err(|e| Error::MalformedArtifact {
                    path: path.display().to_string(),
                    detail: format!("line {}: {e}", lineno + 2),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(Error::MalformedArtifact {
                path: path.display().to_string(),
                detail: format!(
                    "line {}: {} cells under a {}-column header",
                    lineno + 2,
                    row.len(),
                    header.len()
                ),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn read_errors(dir: &Path) -> Result<Vec<ErrorReport>> {
    let path = dir.join(ERRORS_FILE);
    let (header, rows) = read_csv(&path)?;
    let expect = ["tau", "c0_vstar", "l2_w", "l2_wstar_mu", "l2_h_w"];
    if header != expect {
        return Err(Error::MalformedArtifact {
            path: path.display().to_string(),
            detail: format!("unexpected header {header:?}"),
        });
    }
    Ok(rows
        .into_iter()
        .map(|r| ErrorReport {
            tau: r[0],
            c0_vstar: r[1],
            l2_w: r[2],
            l2_wstar_mu: r[3],
            l2_h_w: r[4],
        })
        .collect())
}

pub fn read_ratefit(dir: &Path) -> Result<BTreeMap<String, RateFit>> {
    let path = dir.join(RATEFIT_FILE);
    let text = read_to_string(&path)?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

pub fn read_stability(dir: &Path) -> Result<StabilityArtifact> {
    let path = dir.join(STABILITY_FILE);
    let text = read_to_string(&path)?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}
