//! One-dimensional scattering off a compact piecewise-constant potential by
//! the transfer-matrix method: the elementary analog in which a single
//! stationary solution carries all four processes (transmission in both
//! directions, reflection from both sides).
//!
//! Units: hbar = 1 and particle mass 1/2, so the free wavenumber is
//! k = sqrt(E). Segments admit exact (ψ, ψ′) transfer matrices — the
//! trigonometric branch above the segment height, the hyperbolic branch
//! below it — so the method itself introduces no discretization error.

use num_complex::Complex64;

use crate::{Error, Result};

/// Compact potential: consecutive segments of height `height` (units of m)
/// and width `width` (units 1/m), zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierSpec {
    pub segments: Vec<Segment>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub height: f64,
    pub width: f64,
}

impl BarrierSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.width > 0.0) {
                return Err(Error::Validation(format!(
                    "segment widths must be positive, got {}",
                    s.width
                )));
            }
            if !s.height.is_finite() {
                return Err(Error::Validation("non-finite segment height".to_string()));
            }
        }
        Ok(BarrierSpec { segments })
    }

    pub fn reversed(&self) -> BarrierSpec {
        BarrierSpec {
            segments: self.segments.iter().rev().copied().collect(),
        }
    }
}

/// 2×2 complex matrix in the plane-wave amplitude basis.
#[derive(Clone, Copy, Debug)]
pub struct Matrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub fn identity() -> Self {
        Matrix2 {
            m: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// (ψ, ψ′) propagation matrix across one segment: trigonometric for E above
/// the segment, hyperbolic (evanescent) below it, linear at the crossover.
fn segment_matrix(height: f64, width: f64, e: f64) -> [[f64; 2]; 2] {
    let diff = e - height;
    let a = width;
    // series switchover keeps sin(ka)/k and sinh(κa)/κ accurate as k -> 0
    if diff.abs() < 1e-12 {
        return [[1.0, a], [0.0, 1.0]];
    }
    if diff > 0.0 {
        let k = diff.sqrt();
        [[(k * a).cos(), (k * a).sin() / k], [-k * (k * a).sin(), (k * a).cos()]]
    } else {
        let kappa = (-diff).sqrt();
        [
            [(kappa * a).cosh(), (kappa * a).sinh() / kappa],
            [kappa * (kappa * a).sinh(), (kappa * a).cosh()],
        ]
    }
}

/// Transfer matrix M relating plane-wave amplitudes (measured at the outer
/// edges) on the two sides of the potential: (C, D)_right = M (A, B)_left
/// for ψ = A e^{ikx} + B e^{-ikx}. det M = 1.
pub fn transfer_matrix(spec: &BarrierSpec, e: f64) -> Result<Matrix2> {
    if !(e > 0.0) {
        return Err(Error::Validation(format!(
            "scattering energy must be positive, got {e}"
        )));
    }
    // total (ψ, ψ′) matrix left -> right
    let mut w = [[1.0, 0.0], [0.0, 1.0]];
    for s in &spec.segments {
        let m = segment_matrix(s.height, s.width, e);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = m[i][0] * w[0][j] + m[i][1] * w[1][j];
            }
        }
        w = out;
    }
    // basis change (ψ, ψ′) = P (A, B): P = [[1, 1], [ik, -ik]]
    let k = e.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let ik = i * k;
    let wc = |r: usize, c: usize| Complex64::new(w[r][c], 0.0);
    // M = P⁻¹ W P with P⁻¹ = ½[[1, 1/(ik)], [1, -1/(ik)]]
    let half = Complex64::new(0.5, 0.0);
    let m00 = half * (wc(0, 0) + wc(0, 1) * ik + (wc(1, 0) + wc(1, 1) * ik) / ik);
    let m01 = half * (wc(0, 0) - wc(0, 1) * ik + (wc(1, 0) - wc(1, 1) * ik) / ik);
    let m10 = half * (wc(0, 0) + wc(0, 1) * ik - (wc(1, 0) + wc(1, 1) * ik) / ik);
    let m11 = half * (wc(0, 0) - wc(0, 1) * ik - (wc(1, 0) - wc(1, 1) * ik) / ik);
    Ok(Matrix2 {
        m: [[m00, m01], [m10, m11]],
    })
}

/// The four process probabilities of the barrier problem.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ScatteringCoefficients {
    /// Transmission left to right.
    pub t_lr: f64,
    /// Reflection for a left-incident wave.
    pub r_l: f64,
    /// Transmission right to left.
    pub t_rl: f64,
    /// Reflection for a right-incident wave.
    pub r_r: f64,
}

/// Transmission and reflection for both incidence directions. T_rl is
/// computed from the reversed potential so that the reciprocity identity
/// T_lr = T_rl is a genuine numerical check rather than an alias.
pub fn scattering_coefficients(spec: &BarrierSpec, e: f64) -> Result<ScatteringCoefficients> {
    let m = transfer_matrix(spec, e)?;
    // left-incident: (t, 0) = M (1, r)  =>  r = -M10/M11, t = det M / M11
    let r_l = (-m.m[1][0] / m.m[1][1]).norm_sqr();
    let t_lr = (m.det() / m.m[1][1]).norm_sqr();
    let mr = transfer_matrix(&spec.reversed(), e)?;
    let t_rl = (mr.det() / mr.m[1][1]).norm_sqr();
    let r_r = (mr.m[1][0] / mr.m[1][1]).norm_sqr();
    Ok(ScatteringCoefficients { t_lr, r_l, t_rl, r_r })
}

/// CSV export of an energy sweep: E, T_lr, R_l, T_rl, R_r.
pub fn sweep_csv(
    spec: &BarrierSpec,
    energies: &[f64],
    out: &mut dyn std::io::Write,
) -> Result<()> {
    writeln!(out, "E,T_lr,R_l,T_rl,R_r").map_err(Error::Io)?;
    for &e in energies {
        let c = scattering_coefficients(spec, e)?;
        writeln!(out, "{},{},{},{},{}", e, c.t_lr, c.r_l, c.t_rl, c.r_r).map_err(Error::Io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{rk4_scattering, square_barrier_transmission};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(segments: &[(f64, f64)]) -> BarrierSpec {
        BarrierSpec::new(
            segments
                .iter()
                .map(|&(height, width)| Segment { height, width })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_potential_is_identity() {
        let m = transfer_matrix(&spec(&[]), 0.7).unwrap();
        assert!((m.m[0][0] - Complex64::new(1.0, 0.0)).norm() <= 1e-15);
        assert!(m.m[0][1].norm() <= 1e-15);
        assert!(m.m[1][0].norm() <= 1e-15);
        let c = scattering_coefficients(&spec(&[]), 0.7).unwrap();
        assert_eq!(c.t_lr, 1.0);
        assert_eq!(c.r_l, 0.0);
    }

    #[test]
    fn free_segment_is_transparent() {
        let c = scattering_coefficients(&spec(&[(0.0, 3.0)]), 0.8).unwrap();
        assert_relative_eq!(c.t_lr, 1.0, max_relative = 1e-14);
        assert!(c.r_l <= 1e-14);
    }

    #[test]
    fn tunneling_matches_closed_form() {
        let c = scattering_coefficients(&spec(&[(1.0, 1.0)]), 0.5).unwrap();
        let exact = square_barrier_transmission(1.0, 1.0, 0.5);
        assert_relative_eq!(c.t_lr, exact, max_relative = 1e-10);
        assert_relative_eq!(c.t_rl, exact, max_relative = 1e-10);
    }

    #[test]
    fn above_barrier_matches_closed_form() {
        let c = scattering_coefficients(&spec(&[(1.0, 2.0)]), 3.7).unwrap();
        let exact = square_barrier_transmission(1.0, 2.0, 3.7);
        assert_relative_eq!(c.t_lr, exact, max_relative = 1e-12);
    }

    #[test]
    fn high_energy_is_transparent() {
        let c = scattering_coefficients(&spec(&[(1.0, 1.0)]), 100.0).unwrap();
        assert!(c.t_lr >= 1.0 - 1e-3, "T = {}", c.t_lr);
    }

    #[test]
    fn energy_at_segment_height_uses_linear_branch() {
        let c = scattering_coefficients(&spec(&[(0.5, 1.0)]), 0.5).unwrap();
        let exact = square_barrier_transmission(0.5, 1.0, 0.5);
        assert_relative_eq!(c.t_lr, exact, max_relative = 1e-9);
    }

    #[test]
    fn asymmetric_barrier_reciprocity() {
        let s = spec(&[(1.0, 0.8), (0.3, 1.7)]);
        for e in [0.2, 0.7, 1.5, 4.0] {
            let c = scattering_coefficients(&s, e).unwrap();
            assert!(
                (c.t_lr - c.t_rl).abs() <= 1e-12,
                "E={e}: T_lr={}, T_rl={}",
                c.t_lr,
                c.t_rl
            );
            // reflections generally differ in phase but not in magnitude
            assert_relative_eq!(c.r_l, c.r_r, max_relative = 1e-10);
        }
    }

    #[test]
    fn rk4_oracle_agreement() {
        let cases: Vec<(BarrierSpec, f64)> = vec![
            (spec(&[(1.0, 1.0)]), 0.5),
            (spec(&[(1.0, 0.8), (0.3, 1.7)]), 0.9),
            (spec(&[(-0.4, 1.2), (0.9, 0.6)]), 1.3),
            (spec(&[(0.7, 0.5), (0.0, 1.0), (0.7, 0.5)]), 0.65),
        ];
        for (s, e) in cases {
            let c = scattering_coefficients(&s, e).unwrap();
            let pairs: Vec<(f64, f64)> =
                s.segments.iter().map(|seg| (seg.height, seg.width)).collect();
            let (t_rk, r_rk) = rk4_scattering(&pairs, e, 400.0);
            assert_relative_eq!(c.t_lr, t_rk, epsilon = 1e-8);
            assert_relative_eq!(c.r_l, r_rk, epsilon = 1e-8);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BarrierSpec::new(vec![Segment {
            height: 1.0,
            width: 0.0
        }])
        .is_err());
        assert!(transfer_matrix(&spec(&[(1.0, 1.0)]), -0.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn unitarity_and_unimodularity(
            // ranges keep cosh²(κa) ≲ 1e4 so the absolute det tolerance is
            // meaningful for every drawn case
            heights in proptest::collection::vec(-1.5f64..2.0, 1..4),
            widths in proptest::collection::vec(0.05f64..1.2, 1..4),
            e in 0.2f64..6.0,
        ) {
            let n = heights.len().min(widths.len());
            let s = BarrierSpec::new(
                (0..n)
                    .map(|i| Segment { height: heights[i], width: widths[i] })
                    .collect(),
            )
            .unwrap();
            let m = transfer_matrix(&s, e).unwrap();
            prop_assert!((m.det() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
            let c = scattering_coefficients(&s, e).unwrap();
            prop_assert!((c.t_lr + c.r_l - 1.0).abs() <= 1e-12);
            prop_assert!((c.t_rl + c.r_r - 1.0).abs() <= 1e-12);
            prop_assert!((c.t_lr - c.t_rl).abs() <= 1e-12);
        }
    }
}
