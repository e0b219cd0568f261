//! Discretized spinor wavefunctions on a periodic spatial grid with exact
//! round-trip position/momentum transforms.
//!
//! Grids are 1D along z (the default: the plane wave depends on t - z and
//! the transverse momenta enter analytically as parameters of the reduced
//! field) or full 3D at small sizes for the on-grid transverse observables.
//! Active dimensions use power-of-two point counts on a box of length L with
//! the momentum lattice k_j = 2πj/L, j ∈ [-n/2, n/2).
//!
//! Conventions: position values live on the lattice r_i = i·Δ, the forward
//! transform is ψ̂(k) = (1/N) Σ ψ(r) e^{-ik·r}, so a unit plane wave occupies
//! a single momentum node with coefficient 1. Norms carry the cell volume in
//! position representation and the box volume in momentum representation,
//! which makes them equal (Parseval).
//!
//! Field snapshots serialize to a flat little-endian binary layout (header
//! with dims, lengths, points, representation, t, m, transverse momenta,
//! then interleaved f64 re/im for the 4 components per node) and to a CSV of
//! per-node densities.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{free_spinors, Bispinor, FourMomentum, Spin};
use crate::modes::{mode_coefficients_bessel, ModeTable};
use crate::volkov::{quasimomentum_drift, volkov_eval, PlaneWaveFieldSpec, SpacetimePoint};
use crate::{Error, Result};

/// Positive (electron) or negative (positron) frequency branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencySign {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

/// Periodic box: lengths in 1/m and per-dimension point counts. Inactive
/// dimensions carry a single point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub lens: [f64; 3],
    pub points: [usize; 3],
}

impl GridSpec {
    /// One-dimensional grid along z.
    pub fn one_d(len: f64, points: usize) -> Result<Self> {
        let g = GridSpec {
            lens: [1.0, 1.0, len],
            points: [1, 1, points],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn three_d(lens: [f64; 3], points: [usize; 3]) -> Result<Self> {
        let g = GridSpec { lens, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut active = 0;
        for d in 0..3 {
            if !(self.lens[d] > 0.0) {
                return Err(Error::Validation(format!(
                    "box length must be positive, got {}",
                    self.lens[d]
                )));
            }
            let n = self.points[d];
            if n == 1 {
                continue;
            }
            active += 1;
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Validation(format!(
                    "active dimensions need a power-of-two point count >= 8, got {n}"
                )));
            }
        }
        if active == 0 {
            return Err(Error::Validation("grid has no active dimension".to_string()));
        }
        if active == 2 {
            return Err(Error::Validation(
                "grids are 1D along z or full 3D".to_string(),
            ));
        }
        if active == 1 && self.points[2] == 1 {
            return Err(Error::Validation(
                "one-dimensional grids run along z".to_string(),
            ));
        }
        Ok(())
    }

    pub fn is_one_d(&self) -> bool {
        self.points[0] == 1 && self.points[1] == 1
    }

    pub fn total_points(&self) -> usize {
        self.points[0] * self.points[1] * self.points[2]
    }

    /// Volume element of the position lattice (active dimensions only).
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for d in 0..3 {
            if self.points[d] > 1 {
                v *= self.lens[d] / self.points[d] as f64;
            }
        }
        v
    }

    pub fn box_volume(&self) -> f64 {
        self.cell_volume() * self.total_points() as f64
    }

    /// Momentum spacing 2π/L per dimension.
    pub fn dk(&self, d: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.lens[d]
    }

    /// Signed frequency index in FFT storage order.
    fn freq_index(n: usize, j: usize) -> i64 {
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Momentum component at storage index j of dimension d.
    pub fn k_at(&self, d: usize, j: usize) -> f64 {
        if self.points[d] == 1 {
            0.0
        } else {
            Self::freq_index(self.points[d], j) as f64 * self.dk(d)
        }
    }

    /// Position coordinate at storage index j of dimension d.
    pub fn r_at(&self, d: usize, j: usize) -> f64 {
        if self.points[d] == 1 {
            0.0
        } else {
            self.lens[d] * j as f64 / self.points[d] as f64
        }
    }

    fn decompose(&self, idx: usize) -> [usize; 3] {
        let nz = self.points[2];
        let ny = self.points[1];
        [idx / (ny * nz), (idx / nz) % ny, idx % nz]
    }
}

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static FFT_PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

fn fft_plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    FFT_PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(n)
                } else {
                    planner.plan_fft_inverse(n)
                }
            })
            .clone()
    })
}

/// A bispinor field sampled on a periodic grid, in position or momentum
/// representation, at one instant.
#[derive(Clone, Debug)]
pub struct SpinorField {
    pub grid: GridSpec,
    pub rep: Representation,
    /// Snapshot time, units 1/m.
    pub t: f64,
    pub mass: f64,
    /// Analytic transverse momenta (p_x, p_y) of the 1D-reduced field;
    /// [0, 0] for full 3D grids.
    pub transverse: [f64; 2],
    values: Vec<Bispinor>,
}

impl SpinorField {
    pub fn zero(grid: GridSpec, rep: Representation, t: f64, mass: f64) -> Self {
        SpinorField {
            grid,
            rep,
            t,
            mass,
            transverse: [0.0, 0.0],
            values: vec![Bispinor::zero(); grid.total_points()],
        }
    }

    pub fn from_values(
        grid: GridSpec,
        rep: Representation,
        t: f64,
        mass: f64,
        transverse: [f64; 2],
        values: Vec<Bispinor>,
    ) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::Validation(format!(
                "value count {} does not match the grid ({} nodes)",
                values.len(),
                grid.total_points()
            )));
        }
        Ok(SpinorField {
            grid,
            rep,
            t,
            mass,
            transverse,
            values,
        })
    }

    pub fn values(&self) -> &[Bispinor] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Bispinor] {
        &mut self.values
    }

    /// Full momentum 3-vector at a node, transverse parameters included.
    pub fn momentum_at(&self, idx: usize) -> [f64; 3] {
        let ijk = self.grid.decompose(idx);
        if self.grid.is_one_d() {
            [
                self.transverse[0],
                self.transverse[1],
                self.grid.k_at(2, ijk[2]),
            ]
        } else {
            [
                self.grid.k_at(0, ijk[0]),
                self.grid.k_at(1, ijk[1]),
                self.grid.k_at(2, ijk[2]),
            ]
        }
    }

    /// Position 3-vector at a node.
    pub fn position_at(&self, idx: usize) -> [f64; 3] {
        let ijk = self.grid.decompose(idx);
        [
            self.grid.r_at(0, ijk[0]),
            self.grid.r_at(1, ijk[1]),
            self.grid.r_at(2, ijk[2]),
        ]
    }

    fn weight(&self) -> f64 {
        match self.rep {
            Representation::Position => self.grid.cell_volume(),
            Representation::Momentum => self.grid.box_volume(),
        }
    }

    /// ‖ψ‖² with the representation's volume weight; identical in both
    /// representations (Parseval).
    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm2()).sum::<f64>() * self.weight()
    }

    /// Hermitian inner product ⟨self|other⟩ with volume weight.
    pub fn overlap(&self, other: &SpinorField) -> Result<Complex64> {
        if self.rep != other.rep || self.grid != other.grid {
            return Err(Error::Validation(
                "overlap requires matching grids and representations".to_string(),
            ));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.dot(b))
            .sum();
        Ok(s * self.weight())
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in &mut self.values {
            *v = v.scaled(s);
        }
    }

    pub fn add_assign(&mut self, other: &SpinorField) {
        assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a = *a + *b;
        }
    }

    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    fn transform(&self, forward: bool) -> SpinorField {
        let mut out = self.clone();
        let [nx, ny, nz] = self.grid.points;
        // FFT along each active dimension, componentwise.
        for comp in 0..4 {
            if nz > 1 {
                let plan = fft_plan(nz, forward);
                let mut line = vec![Complex64::new(0.0, 0.0); nz];
                for ix in 0..nx {
                    for iy in 0..ny {
                        let base = (ix * ny + iy) * nz;
                        for iz in 0..nz {
                            line[iz] = out.values[base + iz].0[comp];
                        }
                        plan.process(&mut line);
                        for iz in 0..nz {
                            out.values[base + iz].0[comp] = line[iz];
                        }
                    }
                }
            }
            if ny > 1 {
                let plan = fft_plan(ny, forward);
                let mut line = vec![Complex64::new(0.0, 0.0); ny];
                for ix in 0..nx {
                    for iz in 0..nz {
                        for iy in 0..ny {
                            line[iy] = out.values[(ix * ny + iy) * nz + iz].0[comp];
                        }
                        plan.process(&mut line);
                        for iy in 0..ny {
                            out.values[(ix * ny + iy) * nz + iz].0[comp] = line[iy];
                        }
                    }
                }
            }
            if nx > 1 {
                let plan = fft_plan(nx, forward);
                let mut line = vec![Complex64::new(0.0, 0.0); nx];
                for iy in 0..ny {
                    for iz in 0..nz {
                        for ix in 0..nx {
                            line[ix] = out.values[(ix * ny + iy) * nz + iz].0[comp];
                        }
                        plan.process(&mut line);
                        for ix in 0..nx {
                            out.values[(ix * ny + iy) * nz + iz].0[comp] = line[ix];
                        }
                    }
                }
            }
        }
        if forward {
            let scale = Complex64::new(1.0 / self.grid.total_points() as f64, 0.0);
            for v in &mut out.values {
                *v = v.scaled(scale);
            }
        }
        out
    }

    /// Discrete Fourier transform to momentum representation.
    pub fn to_momentum(&self) -> Result<SpinorField> {
        if self.rep != Representation::Position {
            return Err(Error::Validation(
                "to_momentum expects a position-representation field".to_string(),
            ));
        }
        let mut out = self.transform(true);
        out.rep = Representation::Momentum;
        Ok(out)
    }

    /// Inverse transform to position representation.
    pub fn to_position(&self) -> Result<SpinorField> {
        if self.rep != Representation::Momentum {
            return Err(Error::Validation(
                "to_position expects a momentum-representation field".to_string(),
            ));
        }
        let mut out = self.transform(false);
        out.rep = Representation::Position;
        Ok(out)
    }

    /// Field in momentum representation, transforming if needed.
    pub fn into_momentum(self) -> SpinorField {
        match self.rep {
            Representation::Momentum => self,
            Representation::Position => self.to_momentum().expect("position field"),
        }
    }

    /// Write the flat binary snapshot format.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(b"VKSF")?;
        f.write_all(&1u32.to_le_bytes())?;
        for d in 0..3 {
            f.write_all(&(self.grid.points[d] as u64).to_le_bytes())?;
        }
        for d in 0..3 {
            f.write_all(&self.grid.lens[d].to_le_bytes())?;
        }
        let rep: u8 = match self.rep {
            Representation::Position => 0,
            Representation::Momentum => 1,
        };
        f.write_all(&[rep])?;
        f.write_all(&self.t.to_le_bytes())?;
        f.write_all(&self.mass.to_le_bytes())?;
        f.write_all(&self.transverse[0].to_le_bytes())?;
        f.write_all(&self.transverse[1].to_le_bytes())?;
        for v in &self.values {
            for c in v.0.iter() {
                f.write_all(&c.re.to_le_bytes())?;
                f.write_all(&c.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Read the flat binary snapshot format.
    pub fn read_binary(path: &Path) -> Result<SpinorField> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"VKSF" {
            return Err(Error::Validation("not a field snapshot file".to_string()));
        }
        let mut u4 = [0u8; 4];
        f.read_exact(&mut u4)?;
        if u32::from_le_bytes(u4) != 1 {
            return Err(Error::Validation("unsupported snapshot version".to_string()));
        }
        let mut u8b = [0u8; 8];
        let mut points = [0usize; 3];
        for p in &mut points {
            f.read_exact(&mut u8b)?;
            *p = u64::from_le_bytes(u8b) as usize;
        }
        let mut lens = [0.0f64; 3];
        for l in &mut lens {
            f.read_exact(&mut u8b)?;
            *l = f64::from_le_bytes(u8b);
        }
        let mut rep_b = [0u8; 1];
        f.read_exact(&mut rep_b)?;
        let rep = match rep_b[0] {
            0 => Representation::Position,
            1 => Representation::Momentum,
            other => {
                return Err(Error::Validation(format!(
                    "unknown representation tag {other}"
                )))
            }
        };
        let mut scalar = || -> Result<f64> {
            let mut b = [0u8; 8];
            f.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let t = scalar()?;
        let mass = scalar()?;
        let transverse = [scalar()?, scalar()?];
        let grid = GridSpec { lens, points };
        grid.validate()?;
        let mut values = Vec::with_capacity(grid.total_points());
        for _ in 0..grid.total_points() {
            let mut comps = [Complex64::new(0.0, 0.0); 4];
            for c in &mut comps {
                let re = scalar()?;
                let im = scalar()?;
                *c = Complex64::new(re, im);
            }
            values.push(Bispinor(comps));
        }
        SpinorField::from_values(grid, rep, t, mass, transverse, values)
    }

    /// CSV of per-node density |ψ|² (coordinates of active dimensions
    /// followed by the density).
    pub fn write_density_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        if self.grid.is_one_d() {
            writeln!(out, "z,density")?;
            for (i, v) in self.values.iter().enumerate() {
                writeln!(out, "{},{}", self.position_at(i)[2], v.norm2())?;
            }
        } else {
            writeln!(out, "x,y,z,density")?;
            for (i, v) in self.values.iter().enumerate() {
                let r = self.position_at(i);
                writeln!(out, "{},{},{},{}", r[0], r[1], r[2], v.norm2())?;
            }
        }
        Ok(())
    }
}

fn lattice_index(value: f64, dk: f64, name: &str) -> Result<i64> {
    let ratio = value / dk;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "{name} = {value} is not on the momentum lattice (spacing {dk}); \
             offending wavenumbers {name} and 2π/L"
        )));
    }
    Ok(rounded as i64)
}

/// Snapshot of the Volkov state on a 1D grid at time t0, in position
/// representation, with the lightlike drift factor e^{-iδ(t0-z)} removed so
/// that the momentum support is exactly the mode ladder {p_z + nω}.
///
/// The removed factor is a constant pure phase times a z-plane wave of
/// wavenumber δ (a constant lightlike gauge shift of the potential); it
/// carries no density and no norm. Requires both p_z and ω on the momentum
/// lattice, i.e. a box commensurate with the wave period.
pub fn sample_volkov(
    p: &FourMomentum,
    field: &PlaneWaveFieldSpec,
    m: f64,
    grid: GridSpec,
    t0: f64,
) -> Result<SpinorField> {
    grid.validate()?;
    if !grid.is_one_d() {
        return Err(Error::Validation(
            "volkov snapshots are sampled on 1D grids along z".to_string(),
        ));
    }
    let dk = grid.dk(2);
    let omega_idx = lattice_index(field.omega, dk, "omega")?;
    let pz_idx = lattice_index(p.pz, dk, "p_z")?;
    let drift = quasimomentum_drift(p, field);
    let n = grid.points[2];
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let z = grid.r_at(2, j);
        let psi = volkov_eval(p, field, &SpacetimePoint::new(t0, 0.0, 0.0, z), m)?;
        let strip = Complex64::new(0.0, drift * (t0 - z)).exp();
        values.push(psi.scaled(strip));
    }
    let out = SpinorField::from_values(
        grid,
        Representation::Position,
        t0,
        m,
        [p.px, p.py],
        values,
    )?;
    // Leakage guard: all weight must sit on the ladder coset
    // {j : k_j ≡ p_z (mod gcd(ω, n·Δk))}.
    let hat = out.to_momentum()?;
    let stride = gcd(omega_idx.unsigned_abs(), n as u64) as i64;
    let mut off_ladder = 0.0;
    let mut total = 0.0;
    for (j, v) in hat.values().iter().enumerate() {
        let idx = GridSpec::freq_index(n, j);
        let w = v.norm2();
        total += w;
        if (idx - pz_idx).rem_euclid(stride) != 0 {
            off_ladder += w;
        }
    }
    if off_ladder > 1e-12 * total {
        return Err(Error::Numerical(format!(
            "momentum leakage off the mode ladder: {:.3e} of the norm",
            off_ladder / total
        )));
    }
    Ok(out)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A 1D grid commensurate with the wave and wide enough in momentum to hold
/// the full mode ladder of (p, field): Δk = ω/`samples_per_omega`, box
/// L = 2π/Δk, band chosen from the Bessel-route truncation.
pub fn commensurate_volkov_grid(
    p: &FourMomentum,
    field: &PlaneWaveFieldSpec,
    m: f64,
    samples_per_omega: usize,
) -> Result<(GridSpec, ModeTable)> {
    let table = mode_coefficients_bessel(p, field, m, None)?;
    let dk = field.omega / samples_per_omega as f64;
    lattice_index(p.pz, dk, "p_z")?;
    let k_need = p.pz.abs() + (table.truncation as f64 + 2.0) * field.omega;
    let mut n = 8usize;
    while (n / 2) as f64 * dk < k_need {
        n *= 2;
        if n > (1 << 22) {
            return Err(Error::Validation(
                "commensurate grid would be unreasonably large".to_string(),
            ));
        }
    }
    Ok((GridSpec::one_d(2.0 * std::f64::consts::PI / dk, n)?, table))
}

/// Normalized Gaussian wave packet in momentum representation: weights
/// exp(-(k-k̄)²/4σ²) times u(k,s) (positive branch) or v(-k,s) (negative
/// branch). For 1D grids the first two components of `center` become the
/// analytic transverse momenta.
pub fn gaussian_packet(
    grid: GridSpec,
    center: [f64; 3],
    sigma: f64,
    sign: FrequencySign,
    spin: Spin,
    m: f64,
    t0: f64,
) -> Result<SpinorField> {
    grid.validate()?;
    if !(sigma > 0.0) {
        return Err(Error::Validation(format!(
            "packet width must be positive, got {sigma}"
        )));
    }
    let mut out = SpinorField::zero(grid, Representation::Momentum, t0, m);
    if grid.is_one_d() {
        out.transverse = [center[0], center[1]];
    }
    // Band guard: the spectrum must decay below 1e-12 of its peak inside the
    // lattice band in every active dimension.
    for d in 0..3 {
        if grid.points[d] == 1 {
            continue;
        }
        let k_edge = grid.points[d] as f64 / 2.0 * grid.dk(d);
        let dist = (k_edge - center[d].abs()).max(0.0);
        if (-(dist * dist) / (4.0 * sigma * sigma)).exp() > 1e-12 {
            return Err(Error::Validation(format!(
                "packet spectrum reaches the band edge of dimension {d} (aliasing)"
            )));
        }
    }
    let n_total = grid.total_points();
    for idx in 0..n_total {
        let k = out.momentum_at(idx);
        let mut q2 = 0.0;
        for d in 0..3 {
            if grid.points[d] > 1 {
                let dkd = k[d] - center[d];
                q2 += dkd * dkd;
            }
        }
        let weight = (-q2 / (4.0 * sigma * sigma)).exp();
        if weight < 1e-300 {
            continue;
        }
        let spinor = match sign {
            FrequencySign::Positive => {
                let pk = FourMomentum::on_shell(k[0], k[1], k[2], m);
                free_spinors(&pk, spin, m)?.0
            }
            FrequencySign::Negative => {
                let pk = FourMomentum::on_shell(-k[0], -k[1], -k[2], m);
                free_spinors(&pk, spin, m)?.1
            }
        };
        out.values_mut()[idx] = spinor.scaled(Complex64::new(weight, 0.0));
    }
    let norm = out.norm2().sqrt();
    if norm <= 0.0 {
        return Err(Error::Numerical("packet has zero norm".to_string()));
    }
    out.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(out)
}

/// Translate a momentum-representation field by `shift` in position space
/// (multiplies each node by e^{-ik·shift}).
pub fn translate(f: &mut SpinorField, shift: [f64; 3]) {
    assert_eq!(f.rep, Representation::Momentum, "translate momentum fields");
    for idx in 0..f.grid.total_points() {
        let k = f.momentum_at(idx);
        let mut arg = 0.0;
        for d in 0..3 {
            if f.grid.points[d] > 1 {
                arg -= k[d] * shift[d];
            }
        }
        let v = f.values()[idx].scaled(Complex64::new(0.0, arg).exp());
        f.values_mut()[idx] = v;
    }
}

/// Mean momentum ⟨k⟩ of a momentum-representation field (active dims).
pub fn mean_momentum(f: &SpinorField) -> Result<[f64; 3]> {
    if f.rep != Representation::Momentum {
        return Err(Error::Validation(
            "mean momentum needs the momentum representation".to_string(),
        ));
    }
    let total = f.norm2();
    let mut mean = [0.0; 3];
    for (idx, v) in f.values().iter().enumerate() {
        let w = v.norm2();
        let k = f.momentum_at(idx);
        for d in 0..3 {
            mean[d] += w * k[d];
        }
    }
    let weight = f.weight();
    for md in &mut mean {
        *md *= weight / total;
    }
    Ok(mean)
}
