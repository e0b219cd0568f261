//! Time-of-flight separation: split a field snapshot into positive and
//! negative frequency parts with the momentum-space energy projectors, evolve
//! each part freely forward or backward, and quantify the pair content.
//!
//! Free evolution acts per momentum node as
//!
//!   f(k) -> e^{-iE_k Δt} Λ₊(k) f(k) + e^{+iE_k Δt} Λ₋(k) f(k),
//!
//! which commutes with the projectors, so the separation performed at the
//! snapshot instant is already the asymptotic one; the recorded flight series
//! is an audit trail demonstrating that the fractions are constant in time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{energy_projectors, Matrix4};
use crate::grid::{Representation, SpinorField};
use crate::{Error, Result};

/// Per-node projectors and energies for one grid/mass/transverse-momentum
/// combination; build once and share across split and evolution calls.
#[derive(Clone, Debug)]
pub struct ProjectorTable {
    pub energies: Vec<f64>,
    pub plus: Vec<Matrix4>,
    pub minus: Vec<Matrix4>,
}

impl ProjectorTable {
    pub fn for_field(f: &SpinorField) -> Self {
        let n = f.grid.total_points();
        let mut energies = Vec::with_capacity(n);
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        let m = f.mass;
        for idx in 0..n {
            let k = f.momentum_at(idx);
            let (p, q) = energy_projectors(k, m);
            energies.push((m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt());
            plus.push(p);
            minus.push(q);
        }
        ProjectorTable {
            energies,
            plus,
            minus,
        }
    }

    /// Evolution operators e^{-iE_kΔt}Λ₊ + e^{+iE_kΔt}Λ₋ per node.
    pub fn evolution_operators(&self, dt: f64) -> Vec<Matrix4> {
        self.energies
            .iter()
            .zip(self.plus.iter().zip(self.minus.iter()))
            .map(|(&e, (p, q))| {
                let fwd = Complex64::new(0.0, -e * dt).exp();
                let bwd = Complex64::new(0.0, e * dt).exp();
                p.scaled(fwd).add(&q.scaled(bwd))
            })
            .collect()
    }
}

/// Norm bookkeeping of one separation: totals and the per-node breakdown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationReport {
    pub t0: f64,
    pub total_norm2: f64,
    pub positive_norm2: f64,
    pub negative_norm2: f64,
    pub nodes: Vec<NodeSplit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeSplit {
    pub k: [f64; 3],
    pub pos2: f64,
    pub neg2: f64,
}

impl SeparationReport {
    pub fn negative_fraction(&self) -> f64 {
        self.negative_norm2 / self.total_norm2
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Split a field into its positive- and negative-frequency parts. Position
/// fields are converted to momentum representation first; the returned parts
/// are in momentum representation and satisfy f₊ + f₋ = f exactly.
pub fn split(f: &SpinorField) -> Result<(SpinorField, SpinorField, SeparationReport)> {
    let hat = match f.rep {
        Representation::Momentum => f.clone(),
        Representation::Position => f.to_momentum()?,
    };
    let table = ProjectorTable::for_field(&hat);
    split_with(&hat, &table)
}

/// Split with a prebuilt projector table (must match the field's grid).
pub fn split_with(
    hat: &SpinorField,
    table: &ProjectorTable,
) -> Result<(SpinorField, SpinorField, SeparationReport)> {
    if hat.rep != Representation::Momentum {
        return Err(Error::Validation(
            "split_with expects a momentum-representation field".to_string(),
        ));
    }
    let mut plus = hat.clone();
    let mut minus = hat.clone();
    let weight = hat.grid.box_volume();
    let mut nodes = Vec::with_capacity(hat.grid.total_points());
    let mut pos_total = 0.0;
    let mut neg_total = 0.0;
    for idx in 0..hat.grid.total_points() {
        let v = hat.values()[idx];
        let vp = table.plus[idx].mul_vec(&v);
        let vm = v - vp; // completeness is exact by construction
        plus.values_mut()[idx] = vp;
        minus.values_mut()[idx] = vm;
        let pos2 = vp.norm2() * weight;
        let neg2 = vm.norm2() * weight;
        pos_total += pos2;
        neg_total += neg2;
        nodes.push(NodeSplit {
            k: hat.momentum_at(idx),
            pos2,
            neg2,
        });
    }
    let report = SeparationReport {
        t0: hat.t,
        total_norm2: hat.norm2(),
        positive_norm2: pos_total,
        negative_norm2: neg_total,
        nodes,
    };
    Ok((plus, minus, report))
}

/// Free Dirac evolution of a momentum-representation field by Δt.
pub fn free_evolve(f: &SpinorField, dt: f64) -> Result<SpinorField> {
    if f.rep != Representation::Momentum {
        return Err(Error::Validation(
            "free evolution expects the momentum representation".to_string(),
        ));
    }
    let table = ProjectorTable::for_field(f);
    let ops = table.evolution_operators(dt);
    let mut out = f.clone();
    evolve_in_place(&mut out, &ops, dt);
    Ok(out)
}

/// Apply precomputed per-node evolution operators (one step of Δt).
pub fn evolve_in_place(f: &mut SpinorField, ops: &[Matrix4], dt: f64) {
    for (v, op) in f.values_mut().iter_mut().zip(ops.iter()) {
        *v = op.mul_vec(v);
    }
    f.t += dt;
}

/// Free flight in both time directions from the snapshot: `samples` reports
/// over [t0 - horizon, t0] and [t0, t0 + horizon], recording that the
/// positive/negative fractions stay constant (the projectors commute with
/// the free Hamiltonian).
pub fn time_of_flight(
    f: &SpinorField,
    horizon: f64,
    samples: usize,
) -> Result<Vec<SeparationReport>> {
    if !(horizon > 0.0) {
        return Err(Error::Validation(format!(
            "flight horizon must be positive, got {horizon}"
        )));
    }
    if samples == 0 {
        return Err(Error::Validation("need at least one flight sample".to_string()));
    }
    let hat = match f.rep {
        Representation::Momentum => f.clone(),
        Representation::Position => f.to_momentum()?,
    };
    let table = ProjectorTable::for_field(&hat);
    let dt = horizon / samples as f64;
    let step_back = table.evolution_operators(-dt);
    let step_fwd = table.evolution_operators(dt);

    let mut reports = Vec::with_capacity(2 * samples + 1);
    let mut past = hat.clone();
    let mut past_reports = Vec::with_capacity(samples);
    for _ in 0..samples {
        evolve_in_place(&mut past, &step_back, -dt);
        let (_, _, rep) = split_with(&past, &table)?;
        past_reports.push(rep);
    }
    past_reports.reverse();
    reports.extend(past_reports);
    let (_, _, rep0) = split_with(&hat, &table)?;
    reports.push(rep0);
    let mut future = hat;
    for _ in 0..samples {
        evolve_in_place(&mut future, &step_fwd, dt);
        let (_, _, rep) = split_with(&future, &table)?;
        reports.push(rep);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FourMomentum, Spin};
    use crate::grid::{
        commensurate_volkov_grid, gaussian_packet, sample_volkov, FrequencySign, GridSpec,
    };
    use crate::modes::{mode_coefficients_quadrature, negative_energy_content};
    use crate::volkov::PlaneWaveFieldSpec;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn positive_packet(kbar: f64) -> SpinorField {
        let grid = GridSpec::one_d(64.0, 256).unwrap();
        gaussian_packet(
            grid,
            [0.0, 0.0, kbar],
            0.1,
            FrequencySign::Positive,
            Spin::Up,
            1.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn positive_packet_splits_cleanly() {
        let f = positive_packet(0.3);
        let (plus, minus, rep) = split(&f).unwrap();
        assert!(minus.norm2() <= 1e-13);
        assert_relative_eq!(plus.norm2(), f.norm2(), max_relative = 1e-12);
        assert!(rep.negative_fraction() <= 1e-13);
        // idempotence: splitting the positive part changes nothing
        let (pp, pm, _) = split(&plus).unwrap();
        assert!(pm.norm2() <= 1e-20);
        assert!(pp.max_abs_diff(&plus) <= 1e-14);
    }

    #[test]
    fn split_is_complete() {
        let f = positive_packet(0.5);
        let mut mixed = f.clone();
        let g = gaussian_packet(
            f.grid,
            [0.0, 0.0, -0.2],
            0.1,
            FrequencySign::Negative,
            Spin::Down,
            1.0,
            0.0,
        )
        .unwrap();
        mixed.add_assign(&g);
        let (plus, minus, rep) = split(&mixed).unwrap();
        let mut sum = plus.clone();
        sum.add_assign(&minus);
        // f₋ is defined as f - f₊, so the resummation differs from f only by
        // the rounding of the final addition (one ulp).
        assert!(sum.max_abs_diff(&mixed) <= 1e-18);
        assert_relative_eq!(
            rep.positive_norm2 + rep.negative_norm2,
            rep.total_norm2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn volkov_snapshot_fraction_matches_mode_expansion() {
        // Cross-module oracle: the time-of-flight split of the sampled state
        // reproduces the projector fraction of the analytic ladder.
        let m = 1.0;
        let field = PlaneWaveFieldSpec::new(0.5, 0.8);
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, m);
        let (grid, _) = commensurate_volkov_grid(&p, &field, m, 16).unwrap();
        let table = mode_coefficients_quadrature(&p, &field, m, None).unwrap();
        let (_, frac_modes) = negative_energy_content(&table).unwrap();
        let snap = sample_volkov(&p, &field, m, grid, 0.0).unwrap();
        let (_, _, rep) = split(&snap).unwrap();
        assert_relative_eq!(rep.negative_fraction(), frac_modes, max_relative = 1e-6);
    }

    #[test]
    fn free_evolution_identity_and_unitarity() {
        let f = positive_packet(0.3).into_momentum();
        let same = free_evolve(&f, 0.0).unwrap();
        assert!(f.max_abs_diff(&same) <= 1e-15);
        let there = free_evolve(&f, 0.7).unwrap();
        let back = free_evolve(&there, -0.7).unwrap();
        assert!(f.max_abs_diff(&back) <= 1e-12);
        assert_relative_eq!(there.norm2(), f.norm2(), max_relative = 1e-12);
    }

    #[test]
    fn long_flight_norm_drift_stays_small() {
        // 10⁴ steps of the cached per-node evolution operator.
        let f = positive_packet(0.3).into_momentum();
        let table = ProjectorTable::for_field(&f);
        let ops = table.evolution_operators(1e-3);
        let mut g = f.clone();
        for _ in 0..10_000 {
            evolve_in_place(&mut g, &ops, 1e-3);
        }
        assert!(
            (g.norm2() - f.norm2()).abs() <= 1e-12 * f.norm2(),
            "norm drift {}",
            (g.norm2() - f.norm2()).abs() / f.norm2()
        );
    }

    #[test]
    fn evolution_dephases_mixed_content() {
        // A 50/50 mixture keeps its fractions but not its pointwise values.
        let mut mixed = positive_packet(0.0);
        let g = gaussian_packet(
            mixed.grid,
            [0.0, 0.0, 0.0],
            0.1,
            FrequencySign::Negative,
            Spin::Up,
            1.0,
            0.0,
        )
        .unwrap();
        mixed.add_assign(&g);
        mixed.scale(Complex64::new(1.0 / mixed.norm2().sqrt(), 0.0));
        let evolved = free_evolve(&mixed, 1.3).unwrap();
        assert!(evolved.max_abs_diff(&mixed) > 1e-3);
        let (_, _, r0) = split(&mixed).unwrap();
        let (_, _, r1) = split(&evolved).unwrap();
        assert_relative_eq!(
            r0.negative_fraction(),
            r1.negative_fraction(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn flight_series_fractions_are_constant() {
        let m = 1.0;
        let field = PlaneWaveFieldSpec::new(0.5, 0.8);
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, m);
        let (grid, _) = commensurate_volkov_grid(&p, &field, m, 16).unwrap();
        let snap = sample_volkov(&p, &field, m, grid, 0.0).unwrap();
        let reports = time_of_flight(&snap, 20.0, 8).unwrap();
        assert_eq!(reports.len(), 17);
        let f0 = reports[8].negative_fraction();
        for r in &reports {
            assert!(
                (r.negative_fraction() - f0).abs() <= 1e-12,
                "fraction drifted to {} at t = {}",
                r.negative_fraction(),
                r.t0
            );
        }
        // times are ordered and centered on the snapshot
        assert_relative_eq!(reports[8].t0, snap.t, epsilon = 1e-12);
        assert!(reports.windows(2).all(|w| w[0].t0 < w[1].t0));
    }

    #[test]
    fn mixed_packet_flight_keeps_half_fractions() {
        let mut mixed = positive_packet(0.0);
        let g = gaussian_packet(
            mixed.grid,
            [0.0, 0.0, 0.0],
            0.1,
            FrequencySign::Negative,
            Spin::Up,
            1.0,
            0.0,
        )
        .unwrap();
        mixed.add_assign(&g);
        mixed.scale(Complex64::new(1.0 / mixed.norm2().sqrt(), 0.0));
        let reports = time_of_flight(&mixed, 10.0, 4).unwrap();
        for r in &reports {
            assert!((r.negative_fraction() - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn snapshot_phase_independence_of_volkov_fraction() {
        // The single-quasimomentum state populates each ladder node with a
        // pure phase, so the instantaneous fraction is t0-independent; the
        // spread over a wave cycle is recorded here.
        let m = 1.0;
        let field = PlaneWaveFieldSpec::new(0.5, 0.8);
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, m);
        let (grid, _) = commensurate_volkov_grid(&p, &field, m, 16).unwrap();
        let mut fracs = Vec::new();
        for i in 0..8 {
            let t0 = field.period() * i as f64 / 8.0;
            let snap = sample_volkov(&p, &field, m, grid, t0).unwrap();
            let (_, _, rep) = split(&snap).unwrap();
            fracs.push(rep.negative_fraction());
        }
        let lo = fracs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = fracs.iter().cloned().fold(0.0, f64::max);
        assert!((hi - lo) / hi <= 1e-10, "cycle spread {}", (hi - lo) / hi);
    }

    #[test]
    fn report_round_trips_through_json() {
        let f = positive_packet(0.3);
        let (_, _, rep) = split(&f).unwrap();
        let json = rep.to_json();
        let back: SeparationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.nodes.len(), rep.nodes.len());
        assert_eq!(back.total_norm2, rep.total_norm2);
    }

    #[test]
    fn position_input_is_auto_converted() {
        let m = 1.0;
        let field = PlaneWaveFieldSpec::new(0.5, 0.8);
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, m);
        let (grid, _) = commensurate_volkov_grid(&p, &field, m, 16).unwrap();
        let snap = sample_volkov(&p, &field, m, grid, 0.0).unwrap();
        assert_eq!(snap.rep, Representation::Position);
        let (plus, _, _) = split(&snap).unwrap();
        assert_eq!(plus.rep, Representation::Momentum);
        // but free_evolve is strict about its precondition
        assert!(free_evolve(&snap, 0.1).is_err());
    }
}
