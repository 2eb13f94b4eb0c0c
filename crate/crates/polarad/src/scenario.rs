//! Scenario configs, the end-to-end run pipeline, bundled presets, and the
//! artifacts a run leaves behind (CSV data, fit summaries, a manifest with
//! checksums).
//!
//! A scenario is a TOML file; see `examples/` and the repository README for
//! the schema. Every run writes `manifest.json` into its output directory,
//! including on numeric failure (the manifest then carries an error record).

use crate::coupling::{
    build_matrices, evolution_matrix, AtomArray, BuildOptions, DetuningConvention,
};
use crate::dielectric::{Permittivity, TabPoint};
use crate::dynamics::{
    decay_trace, drive_vector, fit_decay, fitted_decay_time, steady_state, DecayFit,
    DriveDirection,
};
use crate::error::{Error, Result};
use crate::green_free::CouplingScale;
use crate::green_surface::SommerfeldConfig;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Cs 6D_3/2 -> 7P_1/2 transition wavelength in vacuum.
pub const CS_WAVELENGTH_UM: f64 = 12.15;
/// Free-space linewidth Gamma/2pi of that transition, in kHz.
pub const CS_GAMMA_KHZ: f64 = 14.32;

/// Sapphire permittivity across the phonon band that straddles the Cs
/// 12.15 um line, including the surface-polariton region where
/// Re eps < -1.
pub fn sapphire() -> Permittivity {
    let pts = [
        (8.15, 1.8, 0.015),
        (10.15, 0.78, 0.040),
        (12.15, -0.95, 0.11),
        (14.15, -4.6, 0.43),
        (16.15, -12.0, 4.0),
    ];
    Permittivity::Tabulated {
        points: pts
            .iter()
            .map(|&(wavelength_um, eps_re, eps_im)| TabPoint {
                wavelength_um,
                eps_re,
                eps_im,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// config schema

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub atoms: AtomsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSection>,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub options: OptionsSection,
    #[serde(default)]
    pub sommerfeld: SommerfeldConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsSection {
    pub n: usize,
    #[serde(default)]
    pub kd: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kh_sweep: Option<SweepRange>,
    #[serde(default = "default_d_hat")]
    pub d_hat: [f64; 3],
}

fn default_d_hat() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub wavelength_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_gamma_khz: Option<f64>,
    pub model: Permittivity,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub delta_over_gamma: f64,
    pub rabi: f64,
    pub direction: DriveDirection,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection {
            delta_over_gamma: 10.0,
            rabi: 1e-3,
            direction: DriveDirection::NormalZ,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeGridKind {
    #[default]
    Uniform,
    /// t = 0 followed by geometric spacing down to t_max * 1e-9
    Log,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_max: f64,
    pub n_points: usize,
    pub grid: TimeGridKind,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            t_max: 10.0,
            n_points: 1001,
            grid: TimeGridKind::Uniform,
        }
    }
}

impl TimeSection {
    pub fn points(&self) -> Vec<f64> {
        match self.grid {
            TimeGridKind::Uniform => (0..self.n_points)
                .map(|i| self.t_max * i as f64 / (self.n_points - 1) as f64)
                .collect(),
            TimeGridKind::Log => {
                let lo = self.t_max * 1e-9;
                let m = self.n_points - 1;
                let mut ts = vec![0.0];
                ts.extend((0..m).map(|i| {
                    lo * (self.t_max / lo).powf(i as f64 / (m - 1) as f64)
                }));
                ts
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// explicit end of the fit window, in units of the free-space
    /// lifetime; omitted = automatic (see [`crate::dynamics::auto_fit_window`])
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_end: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptionsSection {
    pub scale: CouplingScale,
    pub include_surface_pair_terms: bool,
    pub convention: DetuningConvention,
}

impl Default for OptionsSection {
    fn default() -> Self {
        OptionsSection {
            scale: CouplingScale::Reduced,
            include_surface_pair_terms: true,
            convention: DetuningConvention::FromShifted,
        }
    }
}

enum RunKind {
    Trace { kh: f64, with_surface: bool },
    Sweep { khs: Vec<f64> },
}

impl Scenario {
    fn plan(&self) -> Result<RunKind> {
        let a = &self.atoms;
        if a.n == 0 {
            return Err(Error::Config("atoms.n must be at least 1".into()));
        }
        if a.n > 1 && !(a.kd > 0.0) {
            return Err(Error::Config("atoms.kd must be positive for more than one atom".into()));
        }
        if !(self.time.t_max > 0.0) || self.time.n_points < 2 {
            return Err(Error::Config(
                "time.t_max must be positive and time.n_points at least 2".into(),
            ));
        }
        if !(self.drive.rabi > 0.0) {
            return Err(Error::Config("drive.rabi must be positive".into()));
        }
        if let Some(w) = self.fit.window_end {
            if !(w > 0.0) {
                return Err(Error::Config("fit.window_end must be positive".into()));
            }
        }
        match (&self.surface, a.kh, &a.kh_sweep) {
            (None, None, None) => Ok(RunKind::Trace {
                kh: 0.0,
                with_surface: false,
            }),
            (None, _, _) => Err(Error::Config(
                "atoms.kh / atoms.kh_sweep need a [surface] section to act on".into(),
            )),
            (Some(_), Some(kh), None) => {
                if !(kh > 0.0) {
                    return Err(Error::Config("atoms.kh must be positive".into()));
                }
                Ok(RunKind::Trace {
                    kh,
                    with_surface: true,
                })
            }
            (Some(_), None, Some(sw)) => {
                if !(sw.start > 0.0 && sw.stop > sw.start) || sw.points < 2 {
                    return Err(Error::Config(
                        "atoms.kh_sweep needs 0 < start < stop and at least 2 points".into(),
                    ));
                }
                Ok(RunKind::Sweep {
                    khs: (0..sw.points)
                        .map(|i| {
                            sw.start
                                + (sw.stop - sw.start) * i as f64 / (sw.points - 1) as f64
                        })
                        .collect(),
                })
            }
            (Some(_), None, None) => Err(Error::Config(
                "a [surface] run needs exactly one of atoms.kh or atoms.kh_sweep".into(),
            )),
            (Some(_), Some(_), Some(_)) => Err(Error::Config(
                "atoms.kh and atoms.kh_sweep are mutually exclusive".into(),
            )),
        }
    }

    fn surface_eps(&self) -> Result<Option<Complex64>> {
        match &self.surface {
            None => Ok(None),
            Some(s) => Ok(Some(s.model.at_wavelength(s.wavelength_um)?)),
        }
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            scale: self.options.scale,
            include_surface_pair_terms: self.options.include_surface_pair_terms,
            sommerfeld: self.sommerfeld,
        }
    }
}

// ---------------------------------------------------------------------------
// artifacts

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGridEcho {
    pub t_max: f64,
    pub n_points: usize,
    pub kind: TimeGridKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub label: String,
    pub config_sha256: String,
    pub elapsed_ms: u64,
    /// worst surface-quadrature error estimate across the run
    pub green_err_max: f64,
    /// total quadrature segments spent on surface terms
    pub green_segments: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<DecayFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub outputs: Vec<OutputFile>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// 17 significant digits: round-trips f64 exactly and is stable across runs.
fn fmt_g(x: f64) -> String {
    format!("{x:.16e}")
}

struct Recorder {
    dir: PathBuf,
    outputs: Vec<OutputFile>,
}

impl Recorder {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Recorder {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
            bytes: content.len() as u64,
        });
        Ok(())
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable artifact");
    s.push('\n');
    s
}

fn mat_rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

#[derive(Serialize)]
struct MatricesOut {
    self_shift: f64,
    self_rate: f64,
    v: Vec<Vec<f64>>,
    gamma: Vec<Vec<f64>>,
    v_free: Vec<Vec<f64>>,
    gamma_free: Vec<Vec<f64>>,
    v_surface: Vec<Vec<f64>>,
    gamma_surface: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct FitOut {
    tau: f64,
    window_end: f64,
    p0: f64,
}

// ---------------------------------------------------------------------------
// runners

/// Run the scenario in `config_path`, writing artifacts into `out_dir`.
pub fn run_scenario_file(config_path: &Path, out_dir: &Path) -> Result<RunManifest> {
    let bytes = fs::read(config_path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Config(format!("{} is not UTF-8", config_path.display())))?;
    let sc: Scenario = toml::from_str(&text).map_err(|e| {
        Error::Config(format!("{}: {e}", config_path.display()))
    })?;
    let label = sc.label.clone().unwrap_or_else(|| {
        config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    });
    run_scenario(&sc, &label, &sha256_hex(&bytes), out_dir)
}

/// Run an in-memory scenario. `config_hash` identifies the config in the
/// manifest (the file hash when loaded from disk).
pub fn run_scenario(
    sc: &Scenario,
    label: &str,
    config_hash: &str,
    out_dir: &Path,
) -> Result<RunManifest> {
    let kind = sc.plan()?;
    let mut rec = Recorder::new(out_dir)?;
    let start = Instant::now();
    let mut green_err = 0.0f64;
    let mut green_segments = 0usize;
    let mut fit_echo = None;
    let mut grid_echo = None;

    let outcome: Result<()> = (|| {
        let eps = sc.surface_eps()?;
        let opts = sc.build_options();
        match &kind {
            RunKind::Trace { kh, with_surface } => {
                let array = AtomArray {
                    n: sc.atoms.n,
                    kd: sc.atoms.kd,
                    kh: *kh,
                    d_hat: sc.atoms.d_hat,
                };
                let mats = build_matrices(&array, if *with_surface { eps } else { None }, &opts)?;
                green_err = mats.green_err;
                green_segments = mats.green_segments;
                let m = evolution_matrix(&mats, sc.drive.delta_over_gamma, sc.options.convention);
                let omega =
                    drive_vector(sc.drive.direction, sc.drive.rabi, sc.atoms.n, sc.atoms.kd);
                let beta0 = steady_state(&m, &omega)?;
                let ts = sc.time.points();
                let ps = decay_trace(&m, &mats.gamma, &beta0, &ts)?;
                let p0 = ps[0];
                if !(p0 > 0.0) {
                    return Err(Error::Numeric(
                        "initial emitted power vanishes; check the drive parameters".into(),
                    ));
                }
                let fit = match sc.fit.window_end {
                    None => fitted_decay_time(&m, &mats.gamma, &beta0)?,
                    Some(w) => {
                        let n = 400;
                        let fts: Vec<f64> =
                            (0..n).map(|i| w * i as f64 / (n - 1) as f64).collect();
                        let fps = decay_trace(&m, &mats.gamma, &beta0, &fts)?;
                        fit_decay(&fts, &fps, w)?
                    }
                };
                fit_echo = Some(fit);
                grid_echo = Some(TimeGridEcho {
                    t_max: sc.time.t_max,
                    n_points: sc.time.n_points,
                    kind: sc.time.grid,
                });

                let mut csv = String::from("t,p,p_over_p0\n");
                for (t, p) in ts.iter().zip(&ps) {
                    let _ = writeln!(csv, "{},{},{}", fmt_g(*t), fmt_g(*p), fmt_g(p / p0));
                }
                rec.write("trace.csv", &csv)?;
                rec.write(
                    "fit.json",
                    &json_line(&FitOut {
                        tau: fit.tau,
                        window_end: fit.window_end,
                        p0,
                    }),
                )?;
                rec.write(
                    "matrices.json",
                    &json_line(&MatricesOut {
                        self_shift: mats.self_shift(),
                        self_rate: mats.self_rate(),
                        v: mat_rows(&mats.v),
                        gamma: mat_rows(&mats.gamma),
                        v_free: mat_rows(&mats.v_free),
                        gamma_free: mat_rows(&mats.gamma_free),
                        v_surface: mat_rows(&mats.v_surface),
                        gamma_surface: mat_rows(&mats.gamma_surface),
                    }),
                )?;
                Ok(())
            }
            RunKind::Sweep { khs } => {
                let eps = eps.expect("sweep implies a surface section");
                let rows: Result<Vec<(f64, f64, usize)>> = khs
                    .par_iter()
                    .map(|&kh| {
                        let array = AtomArray {
                            n: sc.atoms.n,
                            kd: sc.atoms.kd,
                            kh,
                            d_hat: sc.atoms.d_hat,
                        };
                        let mats = build_matrices(&array, Some(eps), &opts)?;
                        let m = evolution_matrix(
                            &mats,
                            sc.drive.delta_over_gamma,
                            sc.options.convention,
                        );
                        let omega = drive_vector(
                            sc.drive.direction,
                            sc.drive.rabi,
                            sc.atoms.n,
                            sc.atoms.kd,
                        );
                        let beta0 = steady_state(&m, &omega)?;
                        let fit = fitted_decay_time(&m, &mats.gamma, &beta0)?;
                        Ok((fit.tau, mats.green_err, mats.green_segments))
                    })
                    .collect();
                let rows = rows?;
                let mut csv = String::from("kh,tau\n");
                for (kh, (tau, err, segs)) in khs.iter().zip(&rows) {
                    green_err = green_err.max(*err);
                    green_segments += segs;
                    let _ = writeln!(csv, "{},{}", fmt_g(*kh), fmt_g(*tau));
                }
                rec.write("sweep.csv", &csv)?;
                Ok(())
            }
        }
    })();

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        label: label.to_string(),
        config_sha256: config_hash.to_string(),
        elapsed_ms: start.elapsed().as_millis() as u64,
        green_err_max: green_err,
        green_segments,
        time_grid: grid_echo,
        fit: fit_echo,
        error: outcome.as_ref().err().map(|e| ErrorRecord {
            kind: match e {
                Error::Numeric(_) => "numeric".into(),
                Error::Config(_) => "config".into(),
                Error::Unsupported(_) => "unsupported".into(),
                Error::Io(_) => "io".into(),
            },
            message: e.to_string(),
        }),
        outputs: rec.outputs.clone(),
    };
    rec.write("manifest.json", &json_line(&manifest))?;
    outcome.map(|()| manifest)
}

// ---------------------------------------------------------------------------
// comparison of two finished runs

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub points: usize,
    /// max over the grid of |P_a(t)/P_a(0) - P_b(t)/P_b(0)|
    pub max_abs_dev: f64,
    pub tau_a: Option<f64>,
    pub tau_b: Option<f64>,
    pub tau_diff: Option<f64>,
}

fn load_manifest(path: &Path) -> Result<(RunManifest, PathBuf)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
    let m: RunManifest = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{} is not a run manifest: {e}", path.display())))?;
    let dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((m, dir))
}

fn load_trace(manifest: &RunManifest, dir: &Path, which: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let entry = manifest
        .outputs
        .iter()
        .find(|o| o.path == "trace.csv")
        .ok_or_else(|| {
            Error::Config(format!("{which} run has no trace.csv; compare needs trace runs"))
        })?;
    let text = fs::read_to_string(dir.join(&entry.path))?;
    let mut ts = Vec::new();
    let mut rel = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let mut cols = line.split(',');
        let t: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Config(format!("{which} trace.csv line {} malformed", i + 1)))?;
        let p_rel: f64 = cols
            .nth(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Config(format!("{which} trace.csv line {} malformed", i + 1)))?;
        ts.push(t);
        rel.push(p_rel);
    }
    Ok((ts, rel))
}

/// Compare two finished runs by their manifests.
pub fn compare_runs(manifest_a: &Path, manifest_b: &Path) -> Result<CompareReport> {
    let (ma, dir_a) = load_manifest(manifest_a)?;
    let (mb, dir_b) = load_manifest(manifest_b)?;
    match (&ma.time_grid, &mb.time_grid) {
        (Some(ga), Some(gb)) if ga == gb => {}
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "runs use different time grids; re-run with matching [time] sections".into(),
            ))
        }
        _ => {
            return Err(Error::Config(
                "both manifests must come from trace runs with a time grid".into(),
            ))
        }
    }
    let (ta, ra) = load_trace(&ma, &dir_a, "first")?;
    let (tb, rb) = load_trace(&mb, &dir_b, "second")?;
    if ta.len() != tb.len() {
        return Err(Error::Config(format!(
            "trace lengths differ: {} vs {}",
            ta.len(),
            tb.len()
        )));
    }
    let mut max_dev = 0.0f64;
    for i in 0..ta.len() {
        if (ta[i] - tb[i]).abs() > 1e-12 * ta[i].abs().max(1.0) {
            return Err(Error::Config(format!(
                "time grids differ at sample {i}: {} vs {}",
                ta[i], tb[i]
            )));
        }
        max_dev = max_dev.max((ra[i] - rb[i]).abs());
    }
    let tau_a = ma.fit.map(|f| f.tau);
    let tau_b = mb.fit.map(|f| f.tau);
    Ok(CompareReport {
        points: ta.len(),
        max_abs_dev: max_dev,
        tau_a,
        tau_b,
        tau_diff: tau_a.zip(tau_b).map(|(a, b)| a - b),
    })
}

// ---------------------------------------------------------------------------
// presets

pub const PRESET_NAMES: [&str; 6] = ["table1", "fig4a", "fig4b", "fig4c", "fig5", "fig7"];

/// Run one of the bundled presets into `out_dir/<name>/`.
pub fn run_preset(name: &str, out_dir: &Path) -> Result<RunManifest> {
    match name {
        "table1" => preset_table1(&out_dir.join(name)),
        "fig4a" => preset_fig4(&out_dir.join(name), name, 0.25),
        "fig4b" => preset_fig4(&out_dir.join(name), name, 0.5),
        "fig4c" => preset_fig4(&out_dir.join(name), name, 2.5),
        "fig5" => preset_fig5(&out_dir.join(name)),
        "fig7" => preset_fig7(&out_dir.join(name)),
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn finish_preset(
    mut rec: Recorder,
    label: &str,
    params_json: String,
    start: Instant,
    green_err: f64,
    green_segments: usize,
) -> Result<RunManifest> {
    rec.write("params.json", &params_json)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        label: label.to_string(),
        config_sha256: sha256_hex(params_json.as_bytes()),
        elapsed_ms: start.elapsed().as_millis() as u64,
        green_err_max: green_err,
        green_segments,
        time_grid: None,
        fit: None,
        error: None,
        outputs: rec.outputs.clone(),
    };
    rec.write("manifest.json", &json_line(&manifest))?;
    Ok(manifest)
}

/// Single-atom shift and total rate vs height; the canonical eight rows.
pub const TABLE1_ROWS: [(f64, f64); 8] = [
    (0.100, 0.05),
    (0.500, 0.25),
    (1.0, 0.5),
    (2.0, 1.0),
    (3.0, 1.5),
    (4.0, 2.0),
    (5.0, 2.5),
    (10.0, 5.0),
];

fn preset_table1(dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let mut rec = Recorder::new(dir)?;
    let model = sapphire();
    let eps = model.at_wavelength(CS_WAVELENGTH_UM)?;
    let opts = BuildOptions::default();
    let mut green_err = 0.0f64;
    let mut green_segments = 0usize;
    let mut csv = String::from("h_um,kh,delta_over_gamma,gamma_tot_over_gamma\n");
    for &(h_um, kh) in &TABLE1_ROWS {
        let mats = build_matrices(&AtomArray::line(1, 0.0, kh), Some(eps), &opts)?;
        green_err = green_err.max(mats.green_err);
        green_segments += mats.green_segments;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_g(h_um),
            fmt_g(kh),
            fmt_g(-mats.self_shift()),
            fmt_g(mats.self_rate())
        );
    }
    rec.write("table1.csv", &csv)?;
    let params = json_line(&serde_json::json!({
        "preset": "table1",
        "wavelength_um": CS_WAVELENGTH_UM,
        "rows": TABLE1_ROWS.iter().map(|r| r.1).collect::<Vec<_>>(),
        "note": "kh column uses the two-digit heights; delta is minus the diagonal shift",
    }));
    finish_preset(rec, "table1", params, start, green_err, green_segments)
}

struct TraceCase {
    label: String,
    n: usize,
    kd: f64,
    eps: Option<Complex64>,
    kh: f64,
}

/// Run the standard pipeline for several cases on a common time grid;
/// returns per-case normalized traces and fits.
fn traced_cases(
    cases: &[TraceCase],
    ts: &[f64],
    delta: f64,
    rabi: f64,
) -> Result<(Vec<Vec<f64>>, Vec<DecayFit>, f64, usize)> {
    let opts = BuildOptions::default();
    let results: Result<Vec<_>> = cases
        .par_iter()
        .map(|case| {
            let array = AtomArray::line(case.n, case.kd, case.kh);
            let mats = build_matrices(&array, case.eps, &opts)?;
            let m = evolution_matrix(&mats, delta, DetuningConvention::FromShifted);
            let omega = drive_vector(DriveDirection::NormalZ, rabi, case.n, case.kd);
            let beta0 = steady_state(&m, &omega)?;
            let ps = decay_trace(&m, &mats.gamma, &beta0, ts)?;
            let p0 = ps[0];
            if !(p0 > 0.0) {
                return Err(Error::Numeric(format!(
                    "case {}: initial emitted power vanishes",
                    case.label
                )));
            }
            let fit = fitted_decay_time(&m, &mats.gamma, &beta0)?;
            let rel: Vec<f64> = ps.iter().map(|p| p / p0).collect();
            Ok((rel, fit, mats.green_err, mats.green_segments))
        })
        .collect();
    let results = results?;
    let mut traces = Vec::with_capacity(cases.len());
    let mut fits = Vec::with_capacity(cases.len());
    let mut err = 0.0f64;
    let mut segs = 0usize;
    for (rel, fit, e, s) in results {
        traces.push(rel);
        fits.push(fit);
        err = err.max(e);
        segs += s;
    }
    Ok((traces, fits, err, segs))
}

fn wide_csv(ts: &[f64], labels: &[String], traces: &[Vec<f64>]) -> String {
    let mut csv = String::from("t");
    for l in labels {
        csv.push(',');
        csv.push_str(l);
    }
    csv.push('\n');
    for (i, t) in ts.iter().enumerate() {
        csv.push_str(&fmt_g(*t));
        for tr in traces {
            csv.push(',');
            csv.push_str(&fmt_g(tr[i]));
        }
        csv.push('\n');
    }
    csv
}

fn fits_json(labels: &[String], fits: &[DecayFit]) -> String {
    let map: serde_json::Map<String, serde_json::Value> = labels
        .iter()
        .zip(fits)
        .map(|(l, f)| (l.clone(), serde_json::json!({"tau": f.tau, "window_end": f.window_end})))
        .collect();
    json_line(&map)
}

fn gnuplot_script(csv: &str, title: &str, ycol_count: usize, logy: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead outside");
    let _ = writeln!(s, "set title '{title}'");
    if logy {
        let _ = writeln!(s, "set logscale y");
    }
    let _ = writeln!(s, "set xlabel 't / tau_0'");
    let cols: Vec<String> = (2..2 + ycol_count)
        .map(|c| format!("'{csv}' using 1:{c} with lines"))
        .collect();
    let _ = writeln!(s, "plot {}", cols.join(", \\\n     "));
    s
}

fn preset_fig4(dir: &Path, name: &str, kh: f64) -> Result<RunManifest> {
    let start = Instant::now();
    let mut rec = Recorder::new(dir)?;
    let eps = sapphire().at_wavelength(CS_WAVELENGTH_UM)?;
    let geometries = [(1usize, 0.0f64), (5, 1.0), (5, 3.0), (5, 10.0)];
    let mut cases = Vec::new();
    for &(n, kd) in &geometries {
        let tag = if n == 1 {
            "n1".to_string()
        } else {
            format!("n5_kd{kd:.0}")
        };
        cases.push(TraceCase {
            label: format!("{tag}_surface"),
            n,
            kd,
            eps: Some(eps),
            kh,
        });
    }
    for &(n, kd) in &geometries {
        let tag = if n == 1 {
            "n1".to_string()
        } else {
            format!("n5_kd{kd:.0}")
        };
        cases.push(TraceCase {
            label: format!("{tag}_free"),
            n,
            kd,
            eps: None,
            kh: 0.0,
        });
    }
    let time = TimeSection::default();
    let ts = time.points();
    let (traces, fits, err, segs) = traced_cases(&cases, &ts, 10.0, 1e-3)?;
    let labels: Vec<String> = cases.iter().map(|c| c.label.clone()).collect();
    let csv_name = format!("{name}.csv");
    rec.write(&csv_name, &wide_csv(&ts, &labels, &traces))?;
    rec.write("fits.json", &fits_json(&labels, &fits))?;
    rec.write(
        &format!("{name}.gp"),
        &gnuplot_script(&csv_name, &format!("emitted power, kh = {kh}"), labels.len(), true),
    )?;
    let params = json_line(&serde_json::json!({
        "preset": name,
        "kh": kh,
        "wavelength_um": CS_WAVELENGTH_UM,
        "geometries": geometries.iter().map(|g| [g.0 as f64, g.1]).collect::<Vec<_>>(),
        "delta_over_gamma": 10.0,
        "rabi": 1e-3,
        "time": {"t_max": time.t_max, "n_points": time.n_points},
    }));
    finish_preset(rec, name, params, start, err, segs)
}

fn preset_fig5(dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let mut rec = Recorder::new(dir)?;
    let eps = sapphire().at_wavelength(CS_WAVELENGTH_UM)?;
    let points = 60;
    let khs: Vec<f64> = (0..points)
        .map(|i| 0.1 + (6.0 - 0.1) * i as f64 / (points - 1) as f64)
        .collect();
    let opts = BuildOptions::default();
    let rows: Result<Vec<(f64, f64, f64, usize)>> = khs
        .par_iter()
        .map(|&kh| {
            let mut taus = [0.0f64; 2];
            let mut err = 0.0f64;
            let mut segs = 0usize;
            for (slot, &(n, kd)) in [(5usize, 1.0f64), (1, 0.0)].iter().enumerate() {
                let array = AtomArray::line(n, kd, kh);
                let mats = build_matrices(&array, Some(eps), &opts)?;
                let m = evolution_matrix(&mats, 10.0, DetuningConvention::FromShifted);
                let omega = drive_vector(DriveDirection::NormalZ, 1e-3, n, kd);
                let beta0 = steady_state(&m, &omega)?;
                taus[slot] = fitted_decay_time(&m, &mats.gamma, &beta0)?.tau;
                err = err.max(mats.green_err);
                segs += mats.green_segments;
            }
            Ok((taus[0], taus[1], err, segs))
        })
        .collect();
    let rows = rows?;
    let mut green_err = 0.0f64;
    let mut green_segments = 0usize;
    let mut csv = String::from("kh,tau_n5_kd1,tau_n1\n");
    for (kh, (t5, t1, e, s)) in khs.iter().zip(&rows) {
        green_err = green_err.max(*e);
        green_segments += s;
        let _ = writeln!(csv, "{},{},{}", fmt_g(*kh), fmt_g(*t5), fmt_g(*t1));
    }
    rec.write("fig5.csv", &csv)?;
    rec.write(
        "fig5.gp",
        &gnuplot_script("fig5.csv", "fitted decay time vs height", 2, false),
    )?;
    let params = json_line(&serde_json::json!({
        "preset": "fig5",
        "wavelength_um": CS_WAVELENGTH_UM,
        "kh_grid": {"start": 0.1, "stop": 6.0, "points": points},
        "systems": [{"n": 5, "kd": 1.0}, {"n": 1}],
        "delta_over_gamma": 10.0,
        "rabi": 1e-3,
    }));
    finish_preset(rec, "fig5", params, start, green_err, green_segments)
}

fn preset_fig7(dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let mut rec = Recorder::new(dir)?;
    let model = sapphire();
    let wavelengths = [8.15, 10.15, 12.15, 14.15, 16.15];
    let kh = 0.25;
    let mut cases = Vec::new();
    for &lam in &wavelengths {
        cases.push(TraceCase {
            label: format!("lam{lam}"),
            n: 5,
            kd: 1.0,
            eps: Some(model.at_wavelength(lam)?),
            kh,
        });
    }
    cases.push(TraceCase {
        label: "free_n5_kd1".into(),
        n: 5,
        kd: 1.0,
        eps: None,
        kh: 0.0,
    });
    cases.push(TraceCase {
        label: "free_n1".into(),
        n: 1,
        kd: 0.0,
        eps: None,
        kh: 0.0,
    });
    let time = TimeSection {
        t_max: 8.0,
        n_points: 2000,
        grid: TimeGridKind::Log,
    };
    let ts = time.points();
    let (traces, fits, err, segs) = traced_cases(&cases, &ts, 10.0, 1e-3)?;
    let labels: Vec<String> = cases.iter().map(|c| c.label.clone()).collect();
    rec.write("fig7.csv", &wide_csv(&ts, &labels, &traces))?;
    rec.write("fits.json", &fits_json(&labels, &fits))?;
    rec.write(
        "fig7.gp",
        &gnuplot_script("fig7.csv", "emitted power vs wavelength detuning from the polariton", labels.len(), true),
    )?;
    let params = json_line(&serde_json::json!({
        "preset": "fig7",
        "wavelengths_um": wavelengths,
        "kh": kh,
        "n": 5,
        "kd": 1.0,
        "delta_over_gamma": 10.0,
        "rabi": 1e-3,
        "time": {"t_max": time.t_max, "n_points": time.n_points, "grid": "log"},
    }));
    finish_preset(rec, "fig7", params, start, err, segs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_dir(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("polarad_{name}_{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        fs::create_dir_all(&d).unwrap();
        d
    }

    const VACUUM_TOML: &str = r#"
[atoms]
n = 1

[drive]
delta_over_gamma = 10.0
rabi = 1e-3

[time]
t_max = 5.0
n_points = 501
"#;

    const SURFACE_TOML: &str = r#"
label = "surface_case"

[atoms]
n = 2
kd = 1.0
kh = 0.5

[surface]
wavelength_um = 12.15
model = { kind = "constant", eps_re = -0.95, eps_im = 0.11 }
"#;

    #[test]
    fn config_round_trip_is_stable() {
        for toml_text in [VACUUM_TOML, SURFACE_TOML] {
            let sc: Scenario = toml::from_str(toml_text).unwrap();
            let once = toml::to_string(&sc).unwrap();
            let again: Scenario = toml::from_str(&once).unwrap();
            assert_eq!(once, toml::to_string(&again).unwrap());
        }
    }

    #[test]
    fn vacuum_single_atom_trace_is_pure_exponential() {
        let dir = test_dir("vacuum");
        let sc: Scenario = toml::from_str(VACUUM_TOML).unwrap();
        let manifest = run_scenario(&sc, "vacuum", "test", &dir).unwrap();
        assert!(manifest.error.is_none());
        let text = fs::read_to_string(dir.join("trace.csv")).unwrap();
        for line in text.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!(
                (cols[2] - (-cols[0]).exp()).abs() < 1e-9,
                "t={}: {} vs {}",
                cols[0],
                cols[2],
                (-cols[0]).exp()
            );
        }
        let fit = manifest.fit.unwrap();
        assert!((fit.tau - 1.0).abs() < 1e-9);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn identical_runs_are_byte_identical_and_compare_clean() {
        let da = test_dir("det_a");
        let db = test_dir("det_b");
        let sc: Scenario = toml::from_str(SURFACE_TOML).unwrap();
        run_scenario(&sc, "a", "h", &da).unwrap();
        run_scenario(&sc, "b", "h", &db).unwrap();
        let ba = fs::read(da.join("trace.csv")).unwrap();
        let bb = fs::read(db.join("trace.csv")).unwrap();
        assert_eq!(ba, bb);
        let report = compare_runs(&da.join("manifest.json"), &db.join("manifest.json")).unwrap();
        assert_eq!(report.max_abs_dev, 0.0);
        assert_eq!(report.tau_diff, Some(0.0));
        let _ = fs::remove_dir_all(&da);
        let _ = fs::remove_dir_all(&db);
    }

    #[test]
    fn geometry_height_validation() {
        let mut sc: Scenario = toml::from_str(SURFACE_TOML).unwrap();
        sc.atoms.kh_sweep = Some(SweepRange {
            start: 0.1,
            stop: 1.0,
            points: 4,
        });
        assert!(matches!(sc.plan(), Err(Error::Config(_))));
        sc.atoms.kh = None;
        assert!(matches!(sc.plan(), Ok(RunKind::Sweep { .. })));
        sc.atoms.kh_sweep = None;
        assert!(matches!(sc.plan(), Err(Error::Config(_))));
        sc.surface = None;
        assert!(matches!(sc.plan(), Ok(RunKind::Trace { .. })));
        sc.atoms.kh = Some(0.5);
        assert!(matches!(sc.plan(), Err(Error::Config(_))));
    }

    #[test]
    fn manifest_written_even_on_numeric_failure() {
        let dir = test_dir("numfail");
        let toml_text = r#"
[atoms]
n = 1
kh = 0.5

[surface]
wavelength_um = 12.15
model = { kind = "constant", eps_re = -2.0, eps_im = 0.0 }
"#;
        let sc: Scenario = toml::from_str(toml_text).unwrap();
        let err = run_scenario(&sc, "numfail", "h", &dir).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
        let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
        let m: RunManifest = serde_json::from_str(&text).unwrap();
        let record = m.error.expect("error record present");
        assert_eq!(record.kind, "numeric");
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn sweep_writes_decay_times() {
        let dir = test_dir("sweep");
        let toml_text = r#"
[atoms]
n = 2
kd = 1.0
kh_sweep = { start = 0.5, stop = 1.0, points = 3 }

[surface]
wavelength_um = 12.15
model = { kind = "constant", eps_re = -0.95, eps_im = 0.11 }
"#;
        let sc: Scenario = toml::from_str(toml_text).unwrap();
        let manifest = run_scenario(&sc, "sweep", "h", &dir).unwrap();
        assert!(manifest.outputs.iter().any(|o| o.path == "sweep.csv"));
        let text = fs::read_to_string(dir.join("sweep.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        for line in &lines[1..] {
            let tau: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(tau > 0.0);
        }
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn table1_preset_values() {
        let dir = test_dir("table1");
        run_preset("table1", &dir).unwrap();
        let text = fs::read_to_string(dir.join("table1/table1.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        let row2: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert!((row2[1] - 0.25).abs() < 1e-15);
        assert!((row2[2] - 65.9385).abs() < 1e-3);
        assert!((row2[3] - 175.326).abs() < 1e-2);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn unknown_preset_rejected() {
        let dir = test_dir("nopreset");
        assert!(matches!(
            run_preset("fig9", &dir),
            Err(Error::Config(_))
        ));
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn sapphire_interpolates_exactly_at_the_tabulated_lines() {
        let m = sapphire();
        let eps = m.at_wavelength(12.15).unwrap();
        assert!((eps - Complex64::new(-0.95, 0.11)).norm() < 1e-12);
        let eps = m.at_wavelength(16.15).unwrap();
        assert!((eps - Complex64::new(-12.0, 4.0)).norm() < 1e-12);
    }
}
