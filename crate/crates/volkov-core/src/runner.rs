//! Batch scenario driver behind the command-line interface: parameter
//! resolution (flags > config file > defaults, with sweeps on top), scenario
//! execution, CSV/JSON artifact emission, and the reproducibility manifest.
//!
//! Every run writes a `manifest.json` holding the fully resolved scenario,
//! the unit system, the tolerances in force, the wall time and the SHA-256
//! of each artifact. The scenario section alone suffices to re-run the
//! computation bit-identically; outputs are independent of the sweep
//! parallelism degree.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::{FourMomentum, Spin};
use crate::barrier::{BarrierSpec, Segment};
use crate::grid::{
    commensurate_volkov_grid, gaussian_packet, sample_volkov, translate, FrequencySign, GridSpec,
};
use crate::modes::{
    mode_coefficients_bessel, mode_coefficients_quadrature, negative_energy_content, ModeTable,
};
use crate::observables::{dominant_frequency, trajectory, windowed_spectrum, PositionMode};
use crate::scattering::{
    born_solve_with_tol, channel_split, free_history, post_pulse_free_deviation, CompactField,
};
use crate::separation::{split, time_of_flight};
use crate::util::{detrended_rms, loglog_slope};
use crate::volkov::{
    residual_convergence, volkov_eval, Envelope, PlaneWaveFieldSpec, SpacetimePoint,
};
use crate::{Error, Result};

pub const UNIT_SYSTEM: &str = "natural units: hbar = c = 1, energies/momenta in m, lengths/times in 1/m";

/// Environment variable bounding the sweep thread pool.
pub const THREADS_ENV: &str = "VOLKOV_THREADS";

#[derive(Clone, Debug, Serialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub unit_system: String,
    pub scenario: BTreeMap<String, serde_json::Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub wall_time_s: f64,
    pub artifacts: Vec<ArtifactRecord>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            tool_version: crate::VERSION.to_string(),
            unit_system: UNIT_SYSTEM.to_string(),
            scenario: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            results: BTreeMap::new(),
            wall_time_s: 0.0,
            artifacts: Vec::new(),
        }
    }

    fn set_scenario<T: Serialize>(&mut self, params: &T) {
        if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(params) {
            self.scenario = map.into_iter().collect();
        }
    }

    fn record<T: Serialize>(&mut self, key: &str, value: T) {
        if let Ok(v) = serde_json::to_value(value) {
            self.results.insert(key.to_string(), v);
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn register_artifact(manifest: &mut Manifest, dir: &Path, name: &str) -> Result<()> {
    let path = dir.join(name);
    manifest.artifacts.push(ArtifactRecord {
        path: name.to_string(),
        sha256: sha256_file(&path)?,
    });
    Ok(())
}

fn finish(mut manifest: Manifest, dir: &Path, started: Instant) -> Result<Manifest> {
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Numerical(format!("manifest serialization: {e}")))?;
    std::fs::write(dir.join("manifest.json"), json)?;
    Ok(manifest)
}

fn create_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(dir: &Path, name: &str, body: &[u8]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
    f.write_all(body)?;
    Ok(())
}

/// Flat key=value configuration file: `#` starts a comment, keys are the
/// long flag names, unknown keys are ignored (one file may serve several
/// subcommands).
pub fn parse_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Validation(format!(
                "config line {} is not KEY=VALUE: {raw:?}",
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Layered parameter lookup: sweep overrides > command-line flag > config
/// file > built-in default.
pub struct Resolver {
    pub config: BTreeMap<String, String>,
    pub sweep: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(config: BTreeMap<String, String>, sweep: BTreeMap<String, String>) -> Self {
        Resolver { config, sweep }
    }

    pub fn get<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: std::str::FromStr + Clone,
    {
        if let Some(raw) = self.sweep.get(key) {
            return raw.parse::<T>().map_err(|_| {
                Error::Validation(format!("sweep value for {key} does not parse: {raw:?}"))
            });
        }
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(raw) = self.config.get(key) {
            return raw.parse::<T>().map_err(|_| {
                Error::Validation(format!("config value for {key} does not parse: {raw:?}"))
            });
        }
        Ok(default)
    }

    pub fn get_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: std::str::FromStr + Clone,
    {
        if let Some(raw) = self.sweep.get(key) {
            return raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Validation(format!("sweep value for {key}: {raw:?}")));
        }
        if let Some(v) = flag {
            return Ok(Some(v));
        }
        if let Some(raw) = self.config.get(key) {
            return raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Validation(format!("config value for {key}: {raw:?}")));
        }
        Ok(None)
    }
}

/// Expand repeatable `--sweep key=v1,v2,...` specifications into the
/// cartesian product of per-key assignments, each with a filesystem label.
pub fn expand_sweeps(specs: &[String]) -> Result<Vec<(String, BTreeMap<String, String>)>> {
    let mut axes: Vec<(String, Vec<String>)> = Vec::new();
    for spec in specs {
        let (key, values) = spec.split_once('=').ok_or_else(|| {
            Error::Validation(format!("sweep spec must be key=v1,v2,...: {spec:?}"))
        })?;
        let vals: Vec<String> = values
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if vals.is_empty() {
            return Err(Error::Validation(format!("sweep {key} has no values")));
        }
        axes.push((key.trim().to_string(), vals));
    }
    let mut combos: Vec<(String, BTreeMap<String, String>)> =
        vec![(String::new(), BTreeMap::new())];
    for (key, vals) in &axes {
        let mut next = Vec::with_capacity(combos.len() * vals.len());
        for (label, map) in &combos {
            for v in vals {
                let mut m = map.clone();
                m.insert(key.clone(), v.clone());
                let piece = format!("{key}={v}");
                let l = if label.is_empty() {
                    piece
                } else {
                    format!("{label}_{piece}")
                };
                next.push((l, m));
            }
        }
        combos = next;
    }
    Ok(combos)
}

/// Run scenario combos in parallel on a pool sized by `VOLKOV_THREADS`
/// (default: one thread per core). Each combo writes into its own labeled
/// subdirectory, so the artifacts are independent of the parallelism.
pub fn run_sweep<F>(
    out_dir: &Path,
    combos: Vec<(String, BTreeMap<String, String>)>,
    run_one: F,
) -> Result<()>
where
    F: Fn(&Path, BTreeMap<String, String>) -> Result<Manifest> + Sync,
{
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(n) = std::env::var(THREADS_ENV) {
        let n: usize = n.parse().map_err(|_| {
            Error::Validation(format!("{THREADS_ENV} must be a thread count, got {n:?}"))
        })?;
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| {
        combos
            .into_par_iter()
            .map(|(label, sweep)| {
                let dir = out_dir.join(sanitize(&label));
                run_one(&dir, sweep).map(|_| ())
            })
            .collect::<Result<Vec<()>>>()
    })?;
    Ok(())
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '=' || c == '_' || c == '.' || c == '-' {
            c
        } else {
            '_'
        })
        .collect()
}

// ---------------------------------------------------------------------------
// volkov: pointwise samples and the residual convergence table
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct VolkovParams {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub a: f64,
    pub omega: f64,
    pub m: f64,
    pub nt: usize,
    pub nz: usize,
    pub t0: f64,
    pub t1: f64,
    pub z0: f64,
    pub z1: f64,
    pub x: f64,
    pub y: f64,
    pub residual: bool,
}

pub fn run_volkov(params: &VolkovParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("volkov");
    manifest.set_scenario(params);
    if params.m <= 0.0 {
        return Err(Error::Validation("mass must be positive".to_string()));
    }
    let p = FourMomentum::on_shell(params.px, params.py, params.pz, params.m);
    let field = PlaneWaveFieldSpec::new(params.a, params.omega);
    field.validate()?;
    if params.nt == 0 || params.nz == 0 {
        return Err(Error::Validation("need at least one sample point".to_string()));
    }

    let mut csv = Vec::new();
    writeln!(
        csv,
        "t,x,y,z,re0,im0,re1,im1,re2,im2,re3,im3,abs2"
    )
    .map_err(Error::Io)?;
    for it in 0..params.nt {
        let t = if params.nt == 1 {
            params.t0
        } else {
            params.t0 + (params.t1 - params.t0) * it as f64 / (params.nt - 1) as f64
        };
        for iz in 0..params.nz {
            let z = if params.nz == 1 {
                params.z0
            } else {
                params.z0 + (params.z1 - params.z0) * iz as f64 / (params.nz - 1) as f64
            };
            let pt = SpacetimePoint::new(t, params.x, params.y, z);
            let psi = volkov_eval(&p, &field, &pt, params.m)?;
            write!(csv, "{},{},{},{}", t, params.x, params.y, z).map_err(Error::Io)?;
            for c in psi.0.iter() {
                write!(csv, ",{},{}", c.re, c.im).map_err(Error::Io)?;
            }
            writeln!(csv, ",{}", psi.norm2()).map_err(Error::Io)?;
        }
    }
    write_file(dir, "samples.csv", &csv)?;
    register_artifact(&mut manifest, dir, "samples.csv")?;

    if params.residual {
        let steps = [4e-3, 2e-3, 1e-3];
        let points: Vec<SpacetimePoint> = (0..5)
            .map(|i| {
                let f = i as f64 / 5.0;
                SpacetimePoint::new(
                    params.t0 + (params.t1 - params.t0) * f,
                    params.x,
                    params.y,
                    params.z0 + (params.z1 - params.z0) * f,
                )
            })
            .collect();
        let residuals = residual_convergence(&p, &field, params.m, &steps, &points)?;
        let mut rcsv = Vec::new();
        writeln!(rcsv, "h,residual").map_err(Error::Io)?;
        for (h, r) in steps.iter().zip(&residuals) {
            writeln!(rcsv, "{h},{r}").map_err(Error::Io)?;
        }
        write_file(dir, "residual.csv", &rcsv)?;
        register_artifact(&mut manifest, dir, "residual.csv")?;
        let order = loglog_slope(&steps, &residuals);
        manifest.record("residual_convergence_order", order);
        manifest.record("residual_at_finest_step", residuals[2]);
        manifest
            .tolerances
            .insert("residual_order_target".to_string(), 2.0);
    }
    finish(manifest, dir, started)
}

// ---------------------------------------------------------------------------
// modes: ladder coefficient tables and positron-content fractions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ModesParams {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub a: f64,
    pub omega: f64,
    pub m: f64,
    pub nmax: Option<usize>,
    pub method: String,
}

fn write_mode_table(
    manifest: &mut Manifest,
    dir: &Path,
    name: &str,
    table: &ModeTable,
) -> Result<()> {
    let mut csv = Vec::new();
    table.to_csv(&mut csv).map_err(Error::Io)?;
    write_file(dir, name, &csv)?;
    register_artifact(manifest, dir, name)
}

pub fn run_modes(params: &ModesParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("modes");
    manifest.set_scenario(params);
    manifest
        .tolerances
        .insert("tail_tolerance".to_string(), crate::modes::TAIL_TOL);
    let p = FourMomentum::on_shell(params.px, params.py, params.pz, params.m);
    let field = PlaneWaveFieldSpec::new(params.a, params.omega);

    let table = match params.method.as_str() {
        "quadrature" => {
            let t = mode_coefficients_quadrature(&p, &field, params.m, params.nmax)?;
            write_mode_table(&mut manifest, dir, "modes.csv", &t)?;
            t
        }
        "bessel" => {
            let t = mode_coefficients_bessel(&p, &field, params.m, params.nmax)?;
            write_mode_table(&mut manifest, dir, "modes.csv", &t)?;
            t
        }
        "both" => {
            let tq = mode_coefficients_quadrature(&p, &field, params.m, params.nmax)?;
            let tb = mode_coefficients_bessel(&p, &field, params.m, Some(tq.truncation))?;
            write_mode_table(&mut manifest, dir, "modes_quadrature.csv", &tq)?;
            write_mode_table(&mut manifest, dir, "modes_bessel.csv", &tb)?;
            let max_diff = tq
                .entries
                .iter()
                .zip(tb.entries.iter())
                .map(|(a, b)| (a.w - b.w).norm())
                .fold(0.0, f64::max);
            manifest.record("method_max_entry_diff", max_diff);
            manifest
                .tolerances
                .insert("method_agreement".to_string(), 1e-12);
            tq
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown method {other:?}; expected quadrature, bessel or both"
            )))
        }
    };
    let (sign, projector) = negative_energy_content(&table)?;
    let fractions = serde_json::json!({
        "fraction_sign": sign,
        "fraction_projector": projector,
        "truncation": table.truncation,
        "drift": table.drift,
    });
    write_file(
        dir,
        "fractions.json",
        serde_json::to_string_pretty(&fractions)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .as_bytes(),
    )?;
    register_artifact(&mut manifest, dir, "fractions.json")?;
    manifest.record("fraction_sign", sign);
    manifest.record("fraction_projector", projector);
    manifest.record("truncation", table.truncation);
    finish(manifest, dir, started)
}

// ---------------------------------------------------------------------------
// separate: time-of-flight separation of the sampled wave
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SeparateParams {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub a: f64,
    pub omega: f64,
    pub m: f64,
    pub samples_per_omega: usize,
    pub phases: usize,
    pub horizon: f64,
    pub flight_samples: usize,
}

pub fn run_separate(params: &SeparateParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("separate");
    manifest.set_scenario(params);
    manifest
        .tolerances
        .insert("mode_agreement_relative".to_string(), 1e-6);
    let p = FourMomentum::on_shell(params.px, params.py, params.pz, params.m);
    let field = PlaneWaveFieldSpec::new(params.a, params.omega);
    if params.phases == 0 {
        return Err(Error::Validation("need at least one phase".to_string()));
    }
    let (grid, table) =
        commensurate_volkov_grid(&p, &field, params.m, params.samples_per_omega)?;
    let (_, frac_modes) = negative_energy_content(&table)?;
    manifest.record("fraction_projector_modes", frac_modes);
    manifest.record("grid_points", grid.points[2]);
    manifest.record("grid_length", grid.lens[2]);

    let mut fractions = Vec::with_capacity(params.phases);
    let mut csv = Vec::new();
    writeln!(csv, "phase_index,t0,negative_fraction").map_err(Error::Io)?;
    for i in 0..params.phases {
        let t0 = field.period() * i as f64 / params.phases as f64;
        let snap = sample_volkov(&p, &field, params.m, grid, t0)?;
        let (_, _, report) = split(&snap)?;
        let name = format!("separation_{i}.json");
        write_file(dir, &name, report.to_json().as_bytes())?;
        register_artifact(&mut manifest, dir, &name)?;
        writeln!(csv, "{},{},{}", i, t0, report.negative_fraction()).map_err(Error::Io)?;
        fractions.push(report.negative_fraction());
    }
    write_file(dir, "phases.csv", &csv)?;
    register_artifact(&mut manifest, dir, "phases.csv")?;

    // density profile and audit-trail flight for the first phase
    let snap = sample_volkov(&p, &field, params.m, grid, 0.0)?;
    let mut dcsv = Vec::new();
    snap.write_density_csv(&mut dcsv).map_err(Error::Io)?;
    write_file(dir, "density.csv", &dcsv)?;
    register_artifact(&mut manifest, dir, "density.csv")?;
    let series = time_of_flight(&snap, params.horizon, params.flight_samples)?;
    let mut tof = Vec::new();
    writeln!(tof, "t,total_norm2,positive_norm2,negative_norm2").map_err(Error::Io)?;
    for r in &series {
        writeln!(
            tof,
            "{},{},{},{}",
            r.t0, r.total_norm2, r.positive_norm2, r.negative_norm2
        )
        .map_err(Error::Io)?;
    }
    write_file(dir, "tof.csv", &tof)?;
    register_artifact(&mut manifest, dir, "tof.csv")?;

    let lo = fractions.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = fractions.iter().cloned().fold(0.0f64, f64::max);
    let worst_dev = fractions
        .iter()
        .map(|f| (f - frac_modes).abs() / frac_modes.max(1e-300))
        .fold(0.0f64, f64::max);
    manifest.record("negative_fraction_mean", fractions.iter().sum::<f64>() / fractions.len() as f64);
    manifest.record("phase_spread", hi - lo);
    manifest.record("max_relative_deviation_from_modes", worst_dev);
    finish(manifest, dir, started)
}

// ---------------------------------------------------------------------------
// born: integral-equation solve and four-channel decomposition
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct BornParams {
    pub a: f64,
    pub omega: f64,
    pub m: f64,
    pub coupling: f64,
    pub ramp_periods: f64,
    pub plateau_periods: f64,
    pub pad_periods: f64,
    pub slices_per_period: usize,
    pub box_wavelengths: usize,
    pub points: usize,
    pub kbar: f64,
    pub sigma: f64,
    pub order: usize,
    pub tol: f64,
    pub check_step: bool,
    pub dump_fields: bool,
    /// Slice stride for the binary history dump (1 = every slice).
    pub dump_every: usize,
}

fn born_scenario(
    params: &BornParams,
    slices_per_period: usize,
) -> Result<(CompactField, crate::scattering::SliceHistory)> {
    let period = 2.0 * std::f64::consts::PI / params.omega;
    let spec = PlaneWaveFieldSpec::new(params.a, params.omega).with_envelope(Envelope {
        t_on: 0.0,
        ramp: params.ramp_periods * period,
        plateau: params.plateau_periods * period,
    });
    let grid = GridSpec::one_d(
        params.box_wavelengths as f64 * period, // c = 1: wavelength = period
        params.points,
    )?;
    let field = CompactField::new(spec, grid, slices_per_period, params.pad_periods)?;
    let mut f0 = gaussian_packet(
        grid,
        [0.0, 0.0, params.kbar],
        params.sigma,
        FrequencySign::Positive,
        Spin::Up,
        params.m,
        field.times[0],
    )?;
    translate(&mut f0, [0.0, 0.0, grid.lens[2] / 2.0]);
    let incoming = free_history(&f0, &field.times)?;
    Ok((field, incoming))
}

pub fn run_born(params: &BornParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("born");
    manifest.set_scenario(params);
    manifest
        .tolerances
        .insert("born_tolerance".to_string(), params.tol);
    let (field, incoming) = born_scenario(params, params.slices_per_period)?;
    let sol = born_solve_with_tol(&incoming, &field, params.coupling, params.order, Some(params.tol))?;

    let mut rcsv = Vec::new();
    writeln!(rcsv, "iteration,residual,ratio").map_err(Error::Io)?;
    for (i, r) in sol.residuals.iter().enumerate() {
        let ratio = if i > 0 {
            format!("{}", sol.residuals[i] / sol.residuals[i - 1])
        } else {
            String::new()
        };
        writeln!(rcsv, "{},{},{}", i + 1, r, ratio).map_err(Error::Io)?;
    }
    write_file(dir, "residuals.csv", &rcsv)?;
    register_artifact(&mut manifest, dir, "residuals.csv")?;

    let channels = channel_split(&sol.history, &incoming, &field, params.coupling)?;
    let mut ccsv = Vec::new();
    channels.write_csv(&mut ccsv).map_err(Error::Io)?;
    write_file(dir, "channels.csv", &ccsv)?;
    register_artifact(&mut manifest, dir, "channels.csv")?;

    // post-pulse separation series
    let idx0 = field.first_post_pulse_slice();
    let mut scsv = Vec::new();
    writeln!(scsv, "t,negative_fraction").map_err(Error::Io)?;
    for i in idx0..sol.history.fields.len() {
        let (_, _, rep) = split(&sol.history.fields[i])?;
        writeln!(scsv, "{},{}", sol.history.times[i], rep.negative_fraction())
            .map_err(Error::Io)?;
    }
    write_file(dir, "post_pulse_fractions.csv", &scsv)?;
    register_artifact(&mut manifest, dir, "post_pulse_fractions.csv")?;

    manifest.record("iterations", sol.residuals.len());
    manifest.record("final_residual", *sol.residuals.last().unwrap_or(&0.0));
    manifest.record(
        "max_residual_ratio",
        sol.residual_ratios().iter().cloned().fold(0.0f64, f64::max),
    );
    manifest.record(
        "post_pulse_free_deviation",
        post_pulse_free_deviation(&sol.history, &field)?,
    );
    manifest.record(
        "max_delta",
        channels.delta.iter().cloned().fold(0.0f64, f64::max),
    );

    if params.dump_fields {
        if params.dump_every == 0 {
            return Err(Error::Validation("dump-every must be at least 1".to_string()));
        }
        let last = sol.history.fields.len() - 1;
        sol.history.fields[last]
            .to_position()?
            .write_binary(&dir.join("solution_final.vksf"))?;
        register_artifact(&mut manifest, dir, "solution_final.vksf")?;
        // solution history snapshots, strided to taste, plus a density
        // profile of the final state
        std::fs::create_dir_all(dir.join("history"))?;
        for i in (0..sol.history.fields.len()).step_by(params.dump_every) {
            let name = format!("history/solution_{i:05}.vksf");
            sol.history.fields[i]
                .to_position()?
                .write_binary(&dir.join(&name))?;
            register_artifact(&mut manifest, dir, &name)?;
        }
        let mut dcsv = Vec::new();
        sol.history.fields[last]
            .to_position()?
            .write_density_csv(&mut dcsv)
            .map_err(Error::Io)?;
        write_file(dir, "density_final.csv", &dcsv)?;
        register_artifact(&mut manifest, dir, "density_final.csv")?;
    }

    if params.check_step {
        let (field2, incoming2) = born_scenario(params, 2 * params.slices_per_period)?;
        let sol2 =
            born_solve_with_tol(&incoming2, &field2, params.coupling, params.order, Some(params.tol))?;
        let channels2 = channel_split(&sol2.history, &incoming2, &field2, params.coupling)?;
        let n1 = channels.norms();
        let n2 = channels2.norms();
        let mut worst: f64 = 0.0;
        for (i, t) in channels.a.times.iter().enumerate() {
            if let Some(j) = channels2.a.times.iter().position(|s| (s - t).abs() < 1e-9) {
                for d in 0..4 {
                    worst = worst.max((n1[i][d] - n2[j][d]).abs());
                }
            }
        }
        manifest.record("step_doubling_max_channel_change", worst);
        manifest
            .tolerances
            .insert("step_doubling_bound".to_string(), 1e-6);
    }
    finish(manifest, dir, started)
}

// ---------------------------------------------------------------------------
// zitter: packet trajectories and the oscillation spectrum
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ZitterParams {
    pub kbar: f64,
    pub sigma: f64,
    pub m: f64,
    pub mix: String,
    pub project: String,
    pub horizon: f64,
    pub samples: usize,
    pub box_len: f64,
    pub points: usize,
}

pub fn run_zitter(params: &ZitterParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("zitter");
    manifest.set_scenario(params);
    let grid = GridSpec::one_d(params.box_len, params.points)?;
    let center = [0.0, 0.0, params.kbar];
    let mut f = match params.mix.as_str() {
        "electron" => gaussian_packet(
            grid,
            center,
            params.sigma,
            FrequencySign::Positive,
            Spin::Up,
            params.m,
            0.0,
        )?,
        "positron" => gaussian_packet(
            grid,
            center,
            params.sigma,
            FrequencySign::Negative,
            Spin::Up,
            params.m,
            0.0,
        )?,
        "mixed" => {
            let mut plus = gaussian_packet(
                grid,
                center,
                params.sigma,
                FrequencySign::Positive,
                Spin::Up,
                params.m,
                0.0,
            )?;
            let minus = gaussian_packet(
                grid,
                center,
                params.sigma,
                FrequencySign::Negative,
                Spin::Up,
                params.m,
                0.0,
            )?;
            plus.add_assign(&minus);
            let n = plus.norm2().sqrt();
            plus.scale(num_complex::Complex64::new(1.0 / n, 0.0));
            plus
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown mix {other:?}; expected mixed, electron or positron"
            )))
        }
    };
    translate(&mut f, [0.0, 0.0, params.box_len / 2.0]);
    let projection = match params.project.as_str() {
        "none" => None,
        "plus" => Some(FrequencySign::Positive),
        "minus" => Some(FrequencySign::Negative),
        other => {
            return Err(Error::Validation(format!(
                "unknown projection {other:?}; expected none, plus or minus"
            )))
        }
    };
    let traj = trajectory(
        &f,
        params.horizon,
        params.samples,
        projection,
        PositionMode::CircularMean,
    )?;
    let mut tcsv = Vec::new();
    traj.write_csv(&mut tcsv).map_err(Error::Io)?;
    write_file(dir, "trajectory.csv", &tcsv)?;
    register_artifact(&mut manifest, dir, "trajectory.csv")?;

    let zs = traj.unwrapped_position(2, params.box_len);
    let spec = windowed_spectrum(&traj.times, &zs)?;
    let mut scsv = Vec::new();
    writeln!(scsv, "omega,magnitude").map_err(Error::Io)?;
    for (w, mag) in &spec {
        writeln!(scsv, "{},{}", w, mag).map_err(Error::Io)?;
    }
    write_file(dir, "spectrum.csv", &scsv)?;
    register_artifact(&mut manifest, dir, "spectrum.csv")?;

    manifest.record("oscillation_rms", detrended_rms(&traj.times, &zs));
    if let Ok(freq) = dominant_frequency(&traj.times, &zs) {
        manifest.record("dominant_frequency", freq);
        manifest.record(
            "gap_frequency_2e",
            2.0 * (params.m * params.m + params.kbar * params.kbar).sqrt(),
        );
    }
    finish(manifest, dir, started)
}

// ---------------------------------------------------------------------------
// barrier: transfer-matrix energy sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct BarrierParams {
    pub segments: String,
    pub emin: f64,
    pub emax: f64,
    pub ne: usize,
}

/// Parse "V:a,V:a,..." into a barrier specification.
pub fn parse_segments(text: &str) -> Result<BarrierSpec> {
    let mut segments = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (v, a) = piece.split_once(':').ok_or_else(|| {
            Error::Validation(format!("segment must be HEIGHT:WIDTH, got {piece:?}"))
        })?;
        let height: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad segment height {v:?}")))?;
        let width: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad segment width {a:?}")))?;
        segments.push(Segment { height, width });
    }
    BarrierSpec::new(segments)
}

pub fn run_barrier(params: &BarrierParams, dir: &Path) -> Result<Manifest> {
    let started = Instant::now();
    create_out_dir(dir)?;
    let mut manifest = Manifest::new("barrier");
    manifest.set_scenario(params);
    let spec = parse_segments(&params.segments)?;
    if params.ne == 0 || !(params.emin > 0.0) || params.emax < params.emin {
        return Err(Error::Validation(
            "need ne >= 1 and 0 < emin <= emax".to_string(),
        ));
    }
    let energies: Vec<f64> = (0..params.ne)
        .map(|i| {
            if params.ne == 1 {
                params.emin
            } else {
                params.emin
                    + (params.emax - params.emin) * i as f64 / (params.ne - 1) as f64
            }
        })
        .collect();
    let mut csv = Vec::new();
    crate::barrier::sweep_csv(&spec, &energies, &mut csv)?;
    write_file(dir, "barrier.csv", &csv)?;
    register_artifact(&mut manifest, dir, "barrier.csv")?;
    let c0 = crate::barrier::scattering_coefficients(&spec, energies[0])?;
    manifest.record("t_lr_at_emin", c0.t_lr);
    finish(manifest, dir, started)
}
