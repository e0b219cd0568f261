//! Batch command-line driver for the plane-wave Dirac toolkit.
//!
//! Subcommands map one-to-one onto the library scenarios: `volkov` samples
//! the analytic wavefunction and its Dirac residual, `modes` builds the
//! plane-wave ladder, `separate` runs the time-of-flight separation, `born`
//! solves the compact-field integral equation and splits the four channels,
//! `zitter` records packet trajectories, `barrier` sweeps the 1D analog.
//!
//! Parameter precedence: `--sweep key=v1,v2` > command-line flags > config
//! file (`--config`, flat KEY=VALUE lines) > built-in defaults. Exit codes:
//! 0 success, 2 validation failure, 3 numerical failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use volkov_core::runner::{
    expand_sweeps, parse_config, run_barrier, run_born, run_modes, run_separate, run_sweep,
    run_volkov, run_zitter, BarrierParams, BornParams, ModesParams, Resolver, SeparateParams,
    VolkovParams, ZitterParams,
};
use volkov_core::{Error, Result};

#[derive(Parser)]
#[command(name = "volkov", version, about = "Plane-wave Dirac toolkit: Volkov states, pair content, scattering channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory for artifacts and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Flat KEY=VALUE configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter sweep `key=v1,v2,...`; repeatable, runs the cartesian
    /// product in parallel (thread count from VOLKOV_THREADS).
    #[arg(long = "sweep")]
    sweep: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the analytic wavefunction on a (t, z) grid; optionally verify
    /// the Dirac equation by finite differences.
    Volkov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        px: Option<f64>,
        #[arg(long)]
        py: Option<f64>,
        #[arg(long)]
        pz: Option<f64>,
        /// Wave amplitude (charge included), units of m.
        #[arg(long)]
        a: Option<f64>,
        /// Wave frequency, units of m.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        nt: Option<usize>,
        #[arg(long)]
        nz: Option<usize>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long)]
        z1: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        /// Also emit the residual convergence table.
        #[arg(long)]
        residual: bool,
    },
    /// Expand the wave into its plane-wave ladder and report the
    /// positron-content fractions.
    Modes {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        px: Option<f64>,
        #[arg(long)]
        py: Option<f64>,
        #[arg(long)]
        pz: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// Fixed truncation (default: adaptive).
        #[arg(long)]
        nmax: Option<usize>,
        /// quadrature | bessel | both
        #[arg(long)]
        method: Option<String>,
    },
    /// Sample the wave on a commensurate grid and separate the frequency
    /// branches by time of flight, across snapshot phases.
    Separate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        px: Option<f64>,
        #[arg(long)]
        py: Option<f64>,
        #[arg(long)]
        pz: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// Momentum-lattice points per ω.
        #[arg(long = "samples-per-omega")]
        samples_per_omega: Option<usize>,
        /// Snapshot phases across one wave period.
        #[arg(long)]
        phases: Option<usize>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long = "flight-samples")]
        flight_samples: Option<usize>,
    },
    /// Solve the compact-field integral equation by the Born series and
    /// decompose the four scattering channels.
    Born {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        coupling: Option<f64>,
        #[arg(long = "ramp-periods")]
        ramp_periods: Option<f64>,
        #[arg(long = "plateau-periods")]
        plateau_periods: Option<f64>,
        #[arg(long = "pad-periods")]
        pad_periods: Option<f64>,
        #[arg(long = "slices-per-period")]
        slices_per_period: Option<usize>,
        #[arg(long = "box-wavelengths")]
        box_wavelengths: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        /// Incoming packet mean momentum.
        #[arg(long)]
        kbar: Option<f64>,
        /// Incoming packet momentum width.
        #[arg(long)]
        sigma: Option<f64>,
        /// Maximum Born order.
        #[arg(long)]
        order: Option<usize>,
        /// Early-stop tolerance on the relative update.
        #[arg(long)]
        tol: Option<f64>,
        /// Re-run at doubled time resolution and record the channel-norm
        /// change.
        #[arg(long = "check-step")]
        check_step: bool,
        /// Dump the solution history in the binary snapshot format.
        #[arg(long = "dump-fields")]
        dump_fields: bool,
        /// Slice stride for the history dump (1 = every slice).
        #[arg(long = "dump-every")]
        dump_every: Option<usize>,
    },
    /// Free-flight packet trajectories: centroid, velocity, spectrum.
    Zitter {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kbar: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// mixed | electron | positron
        #[arg(long)]
        mix: Option<String>,
        /// none | plus | minus
        #[arg(long)]
        project: Option<String>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "box")]
        box_len: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Transfer-matrix scattering off a piecewise-constant barrier.
    Barrier {
        #[command(flatten)]
        common: Common,
        /// Segments as HEIGHT:WIDTH,HEIGHT:WIDTH,...
        #[arg(long)]
        segments: Option<String>,
        #[arg(long)]
        emin: Option<f64>,
        #[arg(long)]
        emax: Option<f64>,
        #[arg(long)]
        ne: Option<usize>,
        /// Single energy (sets emin = emax = E, ne = 1).
        #[arg(long)]
        e: Option<f64>,
    },
}

fn dispatch(common: &Common, build_and_run: impl Fn(&Resolver, &std::path::Path) -> Result<()> + Sync) -> Result<()> {
    let config = match &common.config {
        Some(path) => parse_config(path)?,
        None => BTreeMap::new(),
    };
    if common.sweep.is_empty() {
        let resolver = Resolver::new(config, BTreeMap::new());
        build_and_run(&resolver, &common.out)
    } else {
        let combos = expand_sweeps(&common.sweep)?;
        run_sweep(&common.out, combos, |dir, sweep| {
            let resolver = Resolver::new(config.clone(), sweep);
            build_and_run(&resolver, dir)?;
            // the per-run manifest was already written by the scenario
            Ok(volkov_core::runner::Manifest {
                command: String::new(),
                tool_version: String::new(),
                unit_system: String::new(),
                scenario: BTreeMap::new(),
                tolerances: BTreeMap::new(),
                results: BTreeMap::new(),
                wall_time_s: 0.0,
                artifacts: Vec::new(),
            })
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Volkov {
            common,
            px,
            py,
            pz,
            a,
            omega,
            m,
            nt,
            nz,
            t0,
            t1,
            z0,
            z1,
            x,
            y,
            residual,
        } => dispatch(common, |r, dir| {
            let params = VolkovParams {
                px: r.get("px", *px, 0.0)?,
                py: r.get("py", *py, 0.0)?,
                pz: r.get("pz", *pz, 0.0)?,
                a: r.get("a", *a, 0.5)?,
                omega: r.get("omega", *omega, 0.8)?,
                m: r.get("m", *m, 1.0)?,
                nt: r.get("nt", *nt, 16)?,
                nz: r.get("nz", *nz, 64)?,
                t0: r.get("t0", *t0, 0.0)?,
                t1: r.get("t1", *t1, 10.0)?,
                z0: r.get("z0", *z0, 0.0)?,
                z1: r.get("z1", *z1, 10.0)?,
                x: r.get("x", *x, 0.0)?,
                y: r.get("y", *y, 0.0)?,
                residual: *residual || r.get("residual", None::<bool>, false)?,
            };
            run_volkov(&params, dir).map(|_| ())
        }),
        Command::Modes {
            common,
            px,
            py,
            pz,
            a,
            omega,
            m,
            nmax,
            method,
        } => dispatch(common, |r, dir| {
            let params = ModesParams {
                px: r.get("px", *px, 0.0)?,
                py: r.get("py", *py, 0.0)?,
                pz: r.get("pz", *pz, 0.0)?,
                a: r.get("a", *a, 0.5)?,
                omega: r.get("omega", *omega, 0.8)?,
                m: r.get("m", *m, 1.0)?,
                nmax: r.get_opt("nmax", *nmax)?,
                method: r.get("method", method.clone(), "both".to_string())?,
            };
            run_modes(&params, dir).map(|_| ())
        }),
        Command::Separate {
            common,
            px,
            py,
            pz,
            a,
            omega,
            m,
            samples_per_omega,
            phases,
            horizon,
            flight_samples,
        } => dispatch(common, |r, dir| {
            let params = SeparateParams {
                px: r.get("px", *px, 0.0)?,
                py: r.get("py", *py, 0.0)?,
                pz: r.get("pz", *pz, 0.0)?,
                a: r.get("a", *a, 0.5)?,
                omega: r.get("omega", *omega, 0.8)?,
                m: r.get("m", *m, 1.0)?,
                samples_per_omega: r.get("samples-per-omega", *samples_per_omega, 16)?,
                phases: r.get("phases", *phases, 8)?,
                horizon: r.get("horizon", *horizon, 20.0)?,
                flight_samples: r.get("flight-samples", *flight_samples, 8)?,
            };
            run_separate(&params, dir).map(|_| ())
        }),
        Command::Born {
            common,
            a,
            omega,
            m,
            coupling,
            ramp_periods,
            plateau_periods,
            pad_periods,
            slices_per_period,
            box_wavelengths,
            points,
            kbar,
            sigma,
            order,
            tol,
            check_step,
            dump_fields,
            dump_every,
        } => dispatch(common, |r, dir| {
            let params = BornParams {
                a: r.get("a", *a, 0.5)?,
                omega: r.get("omega", *omega, 0.8)?,
                m: r.get("m", *m, 1.0)?,
                coupling: r.get("coupling", *coupling, 0.05)?,
                ramp_periods: r.get("ramp-periods", *ramp_periods, 4.0)?,
                plateau_periods: r.get("plateau-periods", *plateau_periods, 2.0)?,
                pad_periods: r.get("pad-periods", *pad_periods, 0.5)?,
                slices_per_period: r.get("slices-per-period", *slices_per_period, 512)?,
                box_wavelengths: r.get("box-wavelengths", *box_wavelengths, 8)?,
                points: r.get("points", *points, 128)?,
                kbar: r.get("kbar", *kbar, 0.4)?,
                sigma: r.get("sigma", *sigma, 0.08)?,
                order: r.get("order", *order, 12)?,
                tol: r.get("tol", *tol, 1e-11)?,
                check_step: *check_step || r.get("check-step", None::<bool>, false)?,
                dump_fields: *dump_fields || r.get("dump-fields", None::<bool>, false)?,
                dump_every: r.get("dump-every", *dump_every, 16)?,
            };
            run_born(&params, dir).map(|_| ())
        }),
        Command::Zitter {
            common,
            kbar,
            sigma,
            m,
            mix,
            project,
            horizon,
            samples,
            box_len,
            points,
        } => dispatch(common, |r, dir| {
            let params = ZitterParams {
                kbar: r.get("kbar", *kbar, 0.0)?,
                sigma: r.get("sigma", *sigma, 0.1)?,
                m: r.get("m", *m, 1.0)?,
                mix: r.get("mix", mix.clone(), "mixed".to_string())?,
                project: r.get("project", project.clone(), "none".to_string())?,
                horizon: r.get("horizon", *horizon, 40.0)?,
                samples: r.get("samples", *samples, 512)?,
                box_len: r.get("box", *box_len, 160.0)?,
                points: r.get("points", *points, 512)?,
            };
            run_zitter(&params, dir).map(|_| ())
        }),
        Command::Barrier {
            common,
            segments,
            emin,
            emax,
            ne,
            e,
        } => dispatch(common, |r, dir| {
            let single = r.get_opt("e", *e)?;
            let params = match single {
                Some(energy) => BarrierParams {
                    segments: r.get("segments", segments.clone(), "1.0:1.0".to_string())?,
                    emin: energy,
                    emax: energy,
                    ne: 1,
                },
                None => BarrierParams {
                    segments: r.get("segments", segments.clone(), "1.0:1.0".to_string())?,
                    emin: r.get("emin", *emin, 0.1)?,
                    emax: r.get("emax", *emax, 5.0)?,
                    ne: r.get("ne", *ne, 64)?,
                },
            };
            run_barrier(&params, dir).map(|_| ())
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = match &err {
                Error::Validation(_) => "validation",
                Error::Numerical(_) => "numerical",
                Error::Io(_) => "io",
            };
            let msg = err.to_string().replace('\n', " ");
            eprintln!("error: kind={kind} code={} msg={msg:?}", err.exit_code());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
