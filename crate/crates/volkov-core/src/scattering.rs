//! Integral-equation formulation for compactly supported fields: Born-series
//! solution through the Feynman propagator and the decomposition of the
//! solved wavefunction into the four scattering channels (electron
//! scattering, positron scattering, pair creation, pair annihilation).
//!
//! The propagator acts per momentum node as
//!
//!   (S_F ⋆ σ)(t) = ∫dt' [ θ(t-t') (-i) e^{-iE(t-t')} Λ₊
//!                        + θ(t'-t) (+i) e^{+iE(t-t')} Λ₋ ] γ⁰ σ(t'),
//!
//! the unique combination for which (iγ^μ∂_μ - m) S_F = δ⁴ holds, i.e. for
//! which the fixed point of ψ = ψ_F + S_F[c γ^μ𝒜_μ ψ] solves the Dirac
//! equation (verified against direct split-operator integration in the test
//! suite). The channel decomposition instead applies the gated integrals with
//! the bare ±i prefactors of the positive/negative frequency kernels and no
//! time-ordering sign, and the deficit Δ(t) = ‖ψ - ½(ψ_a+ψ_b+ψ_c+ψ_d)‖ is
//! measured and reported, never asserted zero.
//!
//! Time integrals use the uniform trapezoid rule with the θ(0) = ½
//! convention (the sub-integrals split at the evaluation time carry half
//! weights at their shared endpoint).

use num_complex::Complex64;

use crate::algebra::{Bispinor, GammaSet};
use crate::grid::{GridSpec, Representation, SpinorField};
use crate::separation::{evolve_in_place, split_with, ProjectorTable};
use crate::volkov::PlaneWaveFieldSpec;
use crate::{Error, Result};

/// The external wave sampled on a time×space lattice, compactly supported in
/// time through a mandatory C¹ envelope.
#[derive(Clone, Debug)]
pub struct CompactField {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    /// Support window (t_on, t_off) of the envelope.
    pub window: (f64, f64),
    pub spec: PlaneWaveFieldSpec,
    /// Slice-major samples of the wave component (e𝒜)^x(t_i, z_j).
    ax: Vec<f64>,
}

impl CompactField {
    /// Sample the enveloped wave on `grid` with `slices_per_period` time
    /// slices per wave period, padded by `pad_periods` of field-free slices
    /// on both sides of the support window.
    ///
    /// The envelope ramps must span at least 4 wave periods, and the box
    /// must be commensurate with the wave (the potential is z-periodic).
    pub fn new(
        spec: PlaneWaveFieldSpec,
        grid: GridSpec,
        slices_per_period: usize,
        pad_periods: f64,
    ) -> Result<Self> {
        spec.validate()?;
        grid.validate()?;
        if !grid.is_one_d() {
            return Err(Error::Validation(
                "the scattering lattice is 1D along z".to_string(),
            ));
        }
        let env = spec.envelope.ok_or_else(|| {
            Error::Validation("a compact field requires a temporal envelope".to_string())
        })?;
        let period = spec.period();
        if env.ramp < 4.0 * period {
            return Err(Error::Validation(format!(
                "envelope ramps must span at least 4 wave periods ({} < {})",
                env.ramp,
                4.0 * period
            )));
        }
        let ratio = grid.lens[2] * spec.omega / (2.0 * std::f64::consts::PI);
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "box length {} is not a whole number of wavelengths 2π/ω",
                grid.lens[2]
            )));
        }
        if slices_per_period < 2 {
            return Err(Error::Validation(
                "need at least 2 slices per period".to_string(),
            ));
        }
        let dt = period / slices_per_period as f64;
        let t_start = env.t_on - pad_periods * period;
        let t_end = env.t_off() + pad_periods * period;
        let count = ((t_end - t_start) / dt).ceil() as usize + 1;
        let times: Vec<f64> = (0..count).map(|i| t_start + i as f64 * dt).collect();
        let n = grid.points[2];
        let mut ax = Vec::with_capacity(count * n);
        for &t in &times {
            for j in 0..n {
                ax.push(spec.a_x(t, grid.r_at(2, j)));
            }
        }
        // support invariant: identically zero outside the window
        for (i, &t) in times.iter().enumerate() {
            if t < env.t_on || t > env.t_off() {
                for j in 0..n {
                    if ax[i * n + j].abs() > 1e-15 {
                        return Err(Error::Numerical(
                            "field leaks outside its support window".to_string(),
                        ));
                    }
                }
            }
        }
        Ok(CompactField {
            grid,
            times,
            window: (env.t_on, env.t_off()),
            spec,
            ax,
        })
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn slice_count(&self) -> usize {
        self.times.len()
    }

    pub fn ax_at(&self, slice: usize) -> &[f64] {
        let n = self.grid.points[2];
        &self.ax[slice * n..(slice + 1) * n]
    }

    /// Index of the first slice at or after the end of the support window.
    pub fn first_post_pulse_slice(&self) -> usize {
        self.times
            .iter()
            .position(|&t| t >= self.window.1)
            .unwrap_or(self.times.len() - 1)
    }
}

/// A field per stored time slice, kept in momentum representation.
#[derive(Clone, Debug)]
pub struct SliceHistory {
    pub times: Vec<f64>,
    pub fields: Vec<SpinorField>,
}

impl SliceHistory {
    pub fn norms(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.norm2().sqrt()).collect()
    }

    pub fn index_of_time(&self, t: f64) -> Option<usize> {
        let dt = self.times[1] - self.times[0];
        self.times
            .iter()
            .position(|&ti| (ti - t).abs() <= 1e-9 * dt.abs().max(1.0))
    }

    fn max_norm(&self) -> f64 {
        self.fields
            .iter()
            .map(|f| f.norm2().sqrt())
            .fold(0.0, f64::max)
    }

    fn max_diff_norm(&self, other: &SliceHistory) -> f64 {
        self.fields
            .iter()
            .zip(other.fields.iter())
            .map(|(a, b)| {
                let mut d = a.clone();
                for (x, y) in d.values_mut().iter_mut().zip(b.values().iter()) {
                    *x = *x - *y;
                }
                d.norm2().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Free evolution of `f0` (momentum representation, f0.t = times[0]) along
/// the slice grid.
pub fn free_history(f0: &SpinorField, times: &[f64]) -> Result<SliceHistory> {
    if f0.rep != Representation::Momentum {
        return Err(Error::Validation(
            "histories are built in momentum representation".to_string(),
        ));
    }
    if times.len() < 2 {
        return Err(Error::Validation("need at least two slices".to_string()));
    }
    if (f0.t - times[0]).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "initial field sits at t = {}, history starts at {}",
            f0.t, times[0]
        )));
    }
    let table = ProjectorTable::for_field(f0);
    let dt = times[1] - times[0];
    let step = table.evolution_operators(dt);
    let mut fields = Vec::with_capacity(times.len());
    fields.push(f0.clone());
    let mut cur = f0.clone();
    for _ in 1..times.len() {
        evolve_in_place(&mut cur, &step, dt);
        fields.push(cur.clone());
    }
    Ok(SliceHistory {
        times: times.to_vec(),
        fields,
    })
}

/// Covariant interaction sources σ(t_i) = coupling·γ^μ(e𝒜)_μ ψ(t_i)
/// = -coupling·a_x·γ¹ψ, returned in momentum representation.
pub fn raw_sources(
    field: &CompactField,
    coupling: f64,
    history: &SliceHistory,
) -> Result<SliceHistory> {
    let g = GammaSet::dirac();
    let gamma1 = *g.gamma(1);
    let n = field.grid.points[2];
    let mut fields = Vec::with_capacity(history.fields.len());
    for (i, f) in history.fields.iter().enumerate() {
        let pos = f.to_position()?;
        let ax = field.ax_at(i);
        let mut src = pos.clone();
        for j in 0..n {
            let v = gamma1
                .mul_vec(&pos.values()[j])
                .scaled(Complex64::new(-coupling * ax[j], 0.0));
            src.values_mut()[j] = v;
        }
        fields.push(src.to_momentum()?);
    }
    Ok(SliceHistory {
        times: history.times.clone(),
        fields,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Gate {
    Retarded,
    Advanced,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    Plus,
    Minus,
}

/// All gated frequency-branch integrals at once via prefix/suffix sums:
///
///   I(t_i) = prefactor · Σ_j w_j e^{∓iE(t_i - t_j)} Λ_± [γ⁰σ(t_j)],
///
/// trapezoid weights on the sub-interval selected by the gate.
fn gated_integral(
    sources: &SliceHistory,
    table: &ProjectorTable,
    branch: Branch,
    gate: Gate,
    prefactor: Complex64,
) -> Vec<Vec<Bispinor>> {
    let g = GammaSet::dirac();
    let gamma0 = g.beta();
    let slices = sources.fields.len();
    let nodes = sources.fields[0].values().len();
    let dt = sources.times[1] - sources.times[0];
    // projected, phase-referenced terms P_j(k) = Λ_± γ⁰σ_j(k) e^{±iE t_j}
    let mut terms = vec![vec![Bispinor::zero(); nodes]; slices];
    for (j, src) in sources.fields.iter().enumerate() {
        let tj = sources.times[j];
        for k in 0..nodes {
            let e = table.energies[k];
            let proj = match branch {
                Branch::Plus => &table.plus[k],
                Branch::Minus => &table.minus[k],
            };
            let phase = match branch {
                Branch::Plus => Complex64::new(0.0, e * tj).exp(),
                Branch::Minus => Complex64::new(0.0, -e * tj).exp(),
            };
            terms[j][k] = proj
                .mul_vec(&gamma0.mul_vec(&src.values()[k]))
                .scaled(phase);
        }
    }
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let mut out = vec![vec![Bispinor::zero(); nodes]; slices];
    match gate {
        Gate::Retarded => {
            // cumulative with [dt/2, dt, ..., dt]; subtracting half of the
            // current term yields the [dt/2, dt, ..., dt/2] sub-trapezoid
            let mut acc = vec![Bispinor::zero(); nodes];
            for i in 0..slices {
                let w = if i == 0 { half } else { full };
                for k in 0..nodes {
                    acc[k] = acc[k] + terms[i][k].scaled(w);
                    out[i][k] = acc[k] - terms[i][k].scaled(half);
                }
            }
        }
        Gate::Advanced => {
            let mut acc = vec![Bispinor::zero(); nodes];
            for i in (0..slices).rev() {
                let w = if i == slices - 1 { half } else { full };
                for k in 0..nodes {
                    acc[k] = acc[k] + terms[i][k].scaled(w);
                    out[i][k] = acc[k] - terms[i][k].scaled(half);
                }
            }
        }
    }
    // restore the evaluation-time phase and the prefactor
    for (i, row) in out.iter_mut().enumerate() {
        let ti = sources.times[i];
        for (k, v) in row.iter_mut().enumerate() {
            let e = table.energies[k];
            let phase = match branch {
                Branch::Plus => Complex64::new(0.0, -e * ti).exp(),
                Branch::Minus => Complex64::new(0.0, e * ti).exp(),
            };
            *v = v.scaled(prefactor * phase);
        }
    }
    out
}

fn history_from_rows(
    template: &SliceHistory,
    rows: Vec<Vec<Bispinor>>,
) -> SliceHistory {
    let fields = template
        .fields
        .iter()
        .zip(rows)
        .map(|(f, row)| {
            let mut out = f.clone();
            out.values_mut().copy_from_slice(&row);
            out
        })
        .collect();
    SliceHistory {
        times: template.times.clone(),
        fields,
    }
}

/// Feynman-propagator image of a covariant source history at every slice:
/// retarded positive-frequency plus advanced negative-frequency branches
/// with the Green-function prefactors (-i, +i).
pub fn apply_feynman_all(sources: &SliceHistory) -> SliceHistory {
    let table = ProjectorTable::for_field(&sources.fields[0]);
    let minus_i = Complex64::new(0.0, -1.0);
    let plus_i = Complex64::new(0.0, 1.0);
    let ret = gated_integral(sources, &table, Branch::Plus, Gate::Retarded, minus_i);
    let adv = gated_integral(sources, &table, Branch::Minus, Gate::Advanced, plus_i);
    let rows = ret
        .into_iter()
        .zip(adv)
        .map(|(r, a)| r.iter().zip(a.iter()).map(|(x, y)| *x + *y).collect())
        .collect();
    history_from_rows(sources, rows)
}

/// Feynman-propagator image of a covariant source history at one slice time.
pub fn apply_feynman_propagator(sources: &SliceHistory, t_eval: f64) -> Result<SpinorField> {
    let idx = sources.index_of_time(t_eval).ok_or_else(|| {
        Error::Validation(format!(
            "t_eval = {t_eval} is outside the computable slice range [{}, {}]",
            sources.times.first().unwrap(),
            sources.times.last().unwrap()
        ))
    })?;
    let all = apply_feynman_all(sources);
    Ok(all.fields[idx].clone())
}

/// Result of a Born iteration: the solved history and the per-iteration
/// update norms (relative to the incoming wave).
#[derive(Clone, Debug)]
pub struct BornSolution {
    pub history: SliceHistory,
    pub residuals: Vec<f64>,
}

impl BornSolution {
    /// Ratios of successive residuals; all below 1 for a contracting series.
    pub fn residual_ratios(&self) -> Vec<f64> {
        self.residuals.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Solve ψ = ψ_F + S_F[coupling·γ^μ𝒜_μ ψ] by fixed-point iteration to the
/// requested order (ψ^{(K)} contains all terms through coupling^K).
///
/// The iteration refuses to continue when the update norms stop decaying
/// geometrically (non-contraction), reporting the measured ratio.
pub fn born_solve(
    incoming: &SliceHistory,
    field: &CompactField,
    coupling: f64,
    order: usize,
) -> Result<BornSolution> {
    born_solve_with_tol(incoming, field, coupling, order, None)
}

/// Born iteration that stops early once the relative update falls below
/// `tol` (if given), still bounded by `order` iterations.
pub fn born_solve_with_tol(
    incoming: &SliceHistory,
    field: &CompactField,
    coupling: f64,
    order: usize,
    tol: Option<f64>,
) -> Result<BornSolution> {
    if order == 0 {
        return Err(Error::Validation(
            "the Born order must be at least 1".to_string(),
        ));
    }
    if incoming.times.len() != field.times.len() {
        return Err(Error::Validation(
            "incoming history and field are on different slice grids".to_string(),
        ));
    }
    let scale = incoming.max_norm();
    let mut current = incoming.clone();
    let mut residuals = Vec::with_capacity(order);
    for _ in 0..order {
        let sources = raw_sources(field, coupling, &current)?;
        let scattered = apply_feynman_all(&sources);
        let mut next_fields = Vec::with_capacity(incoming.fields.len());
        for (f, s) in incoming.fields.iter().zip(scattered.fields.iter()) {
            let mut out = f.clone();
            out.add_assign(s);
            next_fields.push(out);
        }
        let next = SliceHistory {
            times: incoming.times.clone(),
            fields: next_fields,
        };
        let update = next.max_diff_norm(&current) / scale;
        residuals.push(update);
        if residuals.len() >= 2 {
            let ratio = residuals[residuals.len() - 1] / residuals[residuals.len() - 2];
            if ratio >= 1.0 {
                return Err(Error::Numerical(format!(
                    "Born iteration does not contract: residual ratio {ratio:.3}"
                )));
            }
        }
        current = next;
        if let Some(tol) = tol {
            if update < tol {
                break;
            }
        }
    }
    Ok(BornSolution {
        history: current,
        residuals,
    })
}

/// Residual ‖ψ - ψ_F - S_F[c γ𝒜 ψ]‖ / ‖ψ_F‖ of the integral equation for a
/// candidate solution history (max over slices).
pub fn integral_equation_residual(
    solution: &SliceHistory,
    incoming: &SliceHistory,
    field: &CompactField,
    coupling: f64,
) -> Result<f64> {
    let sources = raw_sources(field, coupling, solution)?;
    let scattered = apply_feynman_all(&sources);
    let mut worst: f64 = 0.0;
    for ((sol, inc), sc) in solution
        .fields
        .iter()
        .zip(incoming.fields.iter())
        .zip(scattered.fields.iter())
    {
        let mut r = sol.clone();
        for ((x, y), z) in r
            .values_mut()
            .iter_mut()
            .zip(inc.values().iter())
            .zip(sc.values().iter())
        {
            *x = *x - *y - *z;
        }
        worst = worst.max(r.norm2().sqrt());
    }
    Ok(worst / incoming.max_norm())
}

/// The four channel wavefunctions, built from the gated frequency-branch
/// integrals, and the measured closure deficit Δ(t) = ‖ψ - ½(ψ_a+ψ_b+ψ_c+ψ_d)‖.
#[derive(Clone, Debug)]
pub struct ChannelSet {
    /// Electron scattering: forward positive-frequency propagation.
    pub a: SliceHistory,
    /// Positron scattering: backward negative-frequency propagation.
    pub b: SliceHistory,
    /// Pair creation: backward positive-frequency propagation.
    pub c: SliceHistory,
    /// Pair annihilation: forward negative-frequency propagation.
    pub d: SliceHistory,
    /// Closure deficit per slice; reported, not asserted zero.
    pub delta: Vec<f64>,
}

impl ChannelSet {
    /// Per-slice channel norms (a, b, c, d).
    pub fn norms(&self) -> Vec<[f64; 4]> {
        (0..self.a.fields.len())
            .map(|i| {
                [
                    self.a.fields[i].norm2().sqrt(),
                    self.b.fields[i].norm2().sqrt(),
                    self.c.fields[i].norm2().sqrt(),
                    self.d.fields[i].norm2().sqrt(),
                ]
            })
            .collect()
    }

    pub fn write_csv(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        writeln!(out, "t,norm_a,norm_b,norm_c,norm_d,delta")?;
        for (i, t) in self.a.times.iter().enumerate() {
            let n = [
                self.a.fields[i].norm2().sqrt(),
                self.b.fields[i].norm2().sqrt(),
                self.c.fields[i].norm2().sqrt(),
                self.d.fields[i].norm2().sqrt(),
            ];
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t, n[0], n[1], n[2], n[3], self.delta[i]
            )?;
        }
        Ok(())
    }
}

/// Split the solved history into the four channels: the converged ψ enters
/// the integrals, the incoming wave supplies ψ_F^{(±)}, and both frequency
/// branches keep the bare +i composite prefactor of their kernels.
pub fn channel_split(
    solution: &SliceHistory,
    incoming: &SliceHistory,
    field: &CompactField,
    coupling: f64,
) -> Result<ChannelSet> {
    let table = ProjectorTable::for_field(&solution.fields[0]);
    let sources = raw_sources(field, coupling, solution)?;
    let plus_i = Complex64::new(0.0, 1.0);
    let ret_plus = gated_integral(&sources, &table, Branch::Plus, Gate::Retarded, plus_i);
    let adv_minus = gated_integral(&sources, &table, Branch::Minus, Gate::Advanced, plus_i);
    let adv_plus = gated_integral(&sources, &table, Branch::Plus, Gate::Advanced, plus_i);
    let ret_minus = gated_integral(&sources, &table, Branch::Minus, Gate::Retarded, plus_i);

    let slices = solution.fields.len();
    let nodes = solution.fields[0].values().len();
    let mut a_rows = vec![vec![Bispinor::zero(); nodes]; slices];
    let mut b_rows = a_rows.clone();
    let mut c_rows = a_rows.clone();
    let mut d_rows = a_rows.clone();
    for i in 0..slices {
        let (fp, fm, _) = split_with(&incoming.fields[i], &table)?;
        for k in 0..nodes {
            a_rows[i][k] = fp.values()[k] + ret_plus[i][k];
            b_rows[i][k] = fm.values()[k] + adv_minus[i][k];
            c_rows[i][k] = fm.values()[k] + adv_plus[i][k];
            d_rows[i][k] = fp.values()[k] + ret_minus[i][k];
        }
    }
    let a = history_from_rows(solution, a_rows);
    let b = history_from_rows(solution, b_rows);
    let c = history_from_rows(solution, c_rows);
    let d = history_from_rows(solution, d_rows);
    let mut delta = Vec::with_capacity(slices);
    for i in 0..slices {
        let mut diff = solution.fields[i].clone();
        let half = Complex64::new(0.5, 0.0);
        for (k, v) in diff.values_mut().iter_mut().enumerate() {
            let sum = a.fields[i].values()[k]
                + b.fields[i].values()[k]
                + c.fields[i].values()[k]
                + d.fields[i].values()[k];
            *v = *v - sum.scaled(half);
        }
        delta.push(diff.norm2().sqrt());
    }
    Ok(ChannelSet { a, b, c, d, delta })
}

/// Maximum relative deviation between the stored post-pulse slices and the
/// free evolution of the first post-pulse slice: in the field-free region
/// the solved history must coast.
pub fn post_pulse_free_deviation(
    solution: &SliceHistory,
    field: &CompactField,
) -> Result<f64> {
    let idx0 = field.first_post_pulse_slice();
    if idx0 + 1 >= solution.fields.len() {
        return Err(Error::Validation(
            "no post-pulse slices to compare".to_string(),
        ));
    }
    let table = ProjectorTable::for_field(&solution.fields[idx0]);
    let dt = solution.times[1] - solution.times[0];
    let step = table.evolution_operators(dt);
    let mut coast = solution.fields[idx0].clone();
    let scale = solution.fields[idx0].norm2().sqrt();
    let mut worst: f64 = 0.0;
    for i in idx0 + 1..solution.fields.len() {
        evolve_in_place(&mut coast, &step, dt);
        let mut diff = coast.clone();
        for (x, y) in diff
            .values_mut()
            .iter_mut()
            .zip(solution.fields[i].values().iter())
        {
            *x = *x - *y;
        }
        worst = worst.max(diff.norm2().sqrt() / scale);
    }
    Ok(worst)
}
