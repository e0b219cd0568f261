//! Gamma-matrix conventions and dense bispinor algebra.
//!
//! Everything downstream consumes the conventions fixed here:
//!
//! * metric g = diag(+1,-1,-1,-1),
//! * Dirac (standard) representation, so the upper two components are large
//!   for a particle at rest,
//! * natural units hbar = c = 1 with the mass m as a runtime parameter,
//! * free-spinor normalization u†u = v†v = 2E_p/m, which makes the energy
//!   projectors expressible as spinor outer products
//!   Λ₊(k) = (m/2E_k) Σ_s u(k,s)u†(k,s), Λ₋(k) = (m/2E_k) Σ_s v(-k,s)v†(-k,s).
//!
//! The two Volkov bispinors u₁(p), u₂(p) are stored in their conventional
//! closed form, prefactors included; they are intentionally not
//! unit-normalized.

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative tolerance for the on-shell check E = sqrt(m² + p²).
pub const ONSHELL_RTOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Four-component complex amplitude of the Dirac field at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bispinor(pub [Complex64; 4]);

impl Bispinor {
    pub fn zero() -> Self {
        Bispinor([ZERO; 4])
    }

    pub fn from_reals(c: [f64; 4]) -> Self {
        Bispinor(c.map(|x| Complex64::new(x, 0.0)))
    }

    /// Squared norm Σ|component|².
    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// Hermitian inner product ⟨self|other⟩, conjugate-linear in `self`.
    pub fn dot(&self, other: &Bispinor) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Bispinor(self.0.map(|c| c * s))
    }

    pub fn conj(&self) -> Self {
        Bispinor(self.0.map(|c| c.conj()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Add for Bispinor {
    type Output = Bispinor;
    fn add(self, rhs: Bispinor) -> Bispinor {
        Bispinor([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl std::ops::Sub for Bispinor {
    type Output = Bispinor;
    fn sub(self, rhs: Bispinor) -> Bispinor {
        Bispinor([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }
}

impl std::ops::Neg for Bispinor {
    type Output = Bispinor;
    fn neg(self) -> Bispinor {
        Bispinor(self.0.map(|c| -c))
    }
}

impl std::ops::Index<usize> for Bispinor {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Dense complex 4x4 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix4 {
    pub m: [[Complex64; 4]; 4],
}

impl Matrix4 {
    pub fn zero() -> Self {
        Matrix4 { m: [[ZERO; 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            out.m[i][i] = ONE;
        }
        out
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            out.m[i][i] = Complex64::new(d[i], 0.0);
        }
        out
    }

    pub fn mul_vec(&self, v: &Bispinor) -> Bispinor {
        let mut out = [ZERO; 4];
        for (i, row) in self.m.iter().enumerate() {
            let mut acc = ZERO;
            for (j, e) in row.iter().enumerate() {
                acc += e * v.0[j];
            }
            out[i] = acc;
        }
        Bispinor(out)
    }

    pub fn mul(&self, rhs: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.m[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.m[i][j] += a * rhs.m[k][j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix4) -> Matrix4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix4) -> Matrix4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] -= rhs.m[i][j];
            }
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> Matrix4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    /// Largest entry magnitude; the norm used by the algebra invariants.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    /// Outer product a b†.
    pub fn outer(a: &Bispinor, b: &Bispinor) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = a.0[i] * b.0[j].conj();
            }
        }
        out
    }
}

/// On-shell or off-shell four-momentum (E, px, py, pz), metric (+,-,-,-).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourMomentum {
    pub e: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    on_shell: bool,
}

impl FourMomentum {
    /// Positive-energy mass shell: E = +sqrt(m² + p²).
    pub fn on_shell(px: f64, py: f64, pz: f64, m: f64) -> Self {
        let e = (m * m + px * px + py * py + pz * pz).sqrt();
        FourMomentum {
            e,
            px,
            py,
            pz,
            on_shell: true,
        }
    }

    /// Explicitly off-shell momentum, e.g. the shifted ladder entries q_n.
    pub fn off_shell(e: f64, px: f64, py: f64, pz: f64) -> Self {
        FourMomentum {
            e,
            px,
            py,
            pz,
            on_shell: false,
        }
    }

    pub fn is_on_shell(&self) -> bool {
        self.on_shell
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }

    pub fn spatial_norm2(&self) -> f64 {
        self.px * self.px + self.py * self.py + self.pz * self.pz
    }

    /// Invariant p² = E² - |p|².
    pub fn mass2(&self) -> f64 {
        self.e * self.e - self.spatial_norm2()
    }

    /// Checks the flag and the numerical mass-shell relation against `m`.
    pub fn validate_on_shell(&self, m: f64) -> Result<()> {
        if !self.on_shell {
            return Err(Error::Validation(
                "momentum is flagged off-shell".to_string(),
            ));
        }
        let e_shell = (m * m + self.spatial_norm2()).sqrt();
        if (self.e - e_shell).abs() > ONSHELL_RTOL * e_shell {
            return Err(Error::Validation(format!(
                "momentum violates the mass shell: E = {}, sqrt(m^2+p^2) = {}",
                self.e, e_shell
            )));
        }
        Ok(())
    }

    /// Minkowski product p·x = E t - p·r.
    pub fn dot_spacetime(&self, t: f64, x: f64, y: f64, z: f64) -> f64 {
        self.e * t - self.px * x - self.py * y - self.pz * z
    }
}

/// Spin label along the z axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn two_component(self) -> [Complex64; 2] {
        match self {
            Spin::Up => [ONE, ZERO],
            Spin::Down => [ZERO, ONE],
        }
    }
}

/// The four gamma matrices in the Dirac representation, with derived
/// α_i = γ⁰γ^i and β = γ⁰.
#[derive(Clone, Copy, Debug)]
pub struct GammaSet {
    gammas: [Matrix4; 4],
}

impl GammaSet {
    /// Standard (Dirac) representation satisfying {γ^μ, γ^ν} = 2 g^{μν}.
    pub fn dirac() -> Self {
        let i = Complex64::new(0.0, 1.0);
        let g0 = Matrix4::diagonal([1.0, 1.0, -1.0, -1.0]);

        // γ^i = [[0, σ_i], [-σ_i, 0]]
        let mut g1 = Matrix4::zero();
        g1.m[0][3] = ONE;
        g1.m[1][2] = ONE;
        g1.m[2][1] = -ONE;
        g1.m[3][0] = -ONE;

        let mut g2 = Matrix4::zero();
        g2.m[0][3] = -i;
        g2.m[1][2] = i;
        g2.m[2][1] = i;
        g2.m[3][0] = -i;

        let mut g3 = Matrix4::zero();
        g3.m[0][2] = ONE;
        g3.m[1][3] = -ONE;
        g3.m[2][0] = -ONE;
        g3.m[3][1] = ONE;

        GammaSet {
            gammas: [g0, g1, g2, g3],
        }
    }

    pub fn gamma(&self, mu: usize) -> &Matrix4 {
        &self.gammas[mu]
    }

    pub fn beta(&self) -> Matrix4 {
        self.gammas[0]
    }

    /// α_i = γ⁰ γ^i, i = 1..3.
    pub fn alpha(&self, i: usize) -> Matrix4 {
        debug_assert!((1..=3).contains(&i));
        self.gammas[0].mul(&self.gammas[i])
    }

    /// Feynman slash p̸ = γ^μ p_μ = γ⁰E - γ·p.
    pub fn slash(&self, p: &FourMomentum) -> Matrix4 {
        let mut out = self.gammas[0].scaled(Complex64::new(p.e, 0.0));
        out = out.sub(&self.gammas[1].scaled(Complex64::new(p.px, 0.0)));
        out = out.sub(&self.gammas[2].scaled(Complex64::new(p.py, 0.0)));
        out = out.sub(&self.gammas[3].scaled(Complex64::new(p.pz, 0.0)));
        out
    }
}

/// Construct the gamma-matrix set used everywhere in the crate.
pub fn make_gamma_set() -> GammaSet {
    GammaSet::dirac()
}

fn sigma_dot_p(k: [f64; 3]) -> [[Complex64; 2]; 2] {
    let (kx, ky, kz) = (k[0], k[1], k[2]);
    [
        [Complex64::new(kz, 0.0), Complex64::new(kx, -ky)],
        [Complex64::new(kx, ky), Complex64::new(-kz, 0.0)],
    ]
}

fn apply2(m: &[[Complex64; 2]; 2], v: &[Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Free positive- and negative-frequency spinors u(p,s), v(p,s) with
/// normalization u†u = v†v = 2E_p/m.
///
/// u multiplies e^{-ip·x}, v multiplies e^{+ip·x}. At fixed spatial momentum
/// the four spinors {u(p,±), v(-p,±)} are mutually orthogonal.
pub fn free_spinors(p: &FourMomentum, s: Spin, m: f64) -> Result<(Bispinor, Bispinor)> {
    if m <= 0.0 {
        return Err(Error::Validation(format!("mass must be positive, got {m}")));
    }
    p.validate_on_shell(m)?;
    let e = p.e;
    let n = ((e + m) / m).sqrt();
    let chi = s.two_component();
    let sp = sigma_dot_p(p.spatial());
    let lower = apply2(&sp, &chi);
    let denom = Complex64::new(e + m, 0.0);
    let nn = Complex64::new(n, 0.0);
    let u = Bispinor([
        nn * chi[0],
        nn * chi[1],
        nn * lower[0] / denom,
        nn * lower[1] / denom,
    ]);
    let v = Bispinor([
        nn * lower[0] / denom,
        nn * lower[1] / denom,
        nn * chi[0],
        nn * chi[1],
    ]);
    Ok((u, v))
}

/// The two Volkov bispinors for spin along z in their conventional closed
/// form, including the prefactors 1/(E_p+m) and 1/[2(E_p+m)(E_p-p_z)].
pub fn volkov_spinors(p: &FourMomentum, m: f64) -> Result<(Bispinor, Bispinor)> {
    if m <= 0.0 {
        return Err(Error::Validation(format!(
            "mass must be positive (E_p - p_z can vanish only at m = 0), got {m}"
        )));
    }
    p.validate_on_shell(m)?;
    let e = p.e;
    let pxy = Complex64::new(p.px, p.py);
    let u1 = Bispinor([
        Complex64::new(e + m, 0.0),
        ZERO,
        Complex64::new(p.pz, 0.0),
        pxy,
    ])
    .scaled(Complex64::new(1.0 / (e + m), 0.0));
    let u2 = Bispinor([
        pxy,
        Complex64::new(-(e + m - p.pz), 0.0),
        pxy,
        Complex64::new(e + m - p.pz, 0.0),
    ])
    .scaled(Complex64::new(1.0 / (2.0 * (e + m) * (e - p.pz)), 0.0));
    Ok((u1, u2))
}

/// Charge conjugation ψ -> ψ_C = iγ²ψ*, an antiunitary involution that maps
/// solutions for the potential 𝒜_μ to solutions for -𝒜_μ.
pub fn charge_conjugate(psi: &Bispinor) -> Bispinor {
    // iγ² in the Dirac representation is the real matrix
    // [[0,0,0,1],[0,0,-1,0],[0,-1,0,0],[1,0,0,0]].
    let c = psi.conj();
    Bispinor([c.0[3], -c.0[2], -c.0[1], c.0[0]])
}

/// Free Dirac Hamiltonian in momentum space, H(k) = α·k + βm.
pub fn dirac_hamiltonian(k: [f64; 3], m: f64) -> Matrix4 {
    let g = GammaSet::dirac();
    let mut h = g.beta().scaled(Complex64::new(m, 0.0));
    for (i, ki) in k.iter().enumerate() {
        h = h.add(&g.alpha(i + 1).scaled(Complex64::new(*ki, 0.0)));
    }
    h
}

/// Energy projectors Λ±(k) = (E_k ± H(k)) / (2E_k) onto the ±E_k eigenspaces
/// of the free Hamiltonian. Λ₊ + Λ₋ = I, Λ±² = Λ±, Λ₊Λ₋ = 0, rank 2 each.
pub fn energy_projectors(k: [f64; 3], m: f64) -> (Matrix4, Matrix4) {
    let e = (m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let h = dirac_hamiltonian(k, m);
    let half = Complex64::new(0.5, 0.0);
    let scale = Complex64::new(0.5 / e, 0.0);
    let plus = Matrix4::identity().scaled(half).add(&h.scaled(scale));
    let minus = Matrix4::identity().scaled(half).sub(&h.scaled(scale));
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn metric(mu: usize, nu: usize) -> f64 {
        if mu != nu {
            0.0
        } else if mu == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn random_momentum(rng: &mut impl Rng, m: f64, scale: f64) -> FourMomentum {
        FourMomentum::on_shell(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            m,
        )
    }

    #[test]
    fn clifford_algebra() {
        let g = GammaSet::dirac();
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = g.gamma(mu).mul(g.gamma(nu)).add(&g.gamma(nu).mul(g.gamma(mu)));
                let expected = Matrix4::identity().scaled(Complex64::new(2.0 * metric(mu, nu), 0.0));
                assert!(
                    anti.sub(&expected).max_abs() <= 1e-14,
                    "anticommutator failed for mu={mu}, nu={nu}"
                );
            }
        }
    }

    #[test]
    fn gamma_hermiticity() {
        let g = GammaSet::dirac();
        assert!(g.gamma(0).adjoint().sub(g.gamma(0)).max_abs() <= 1e-15);
        for i in 1..4 {
            assert!(g.gamma(i).adjoint().add(g.gamma(i)).max_abs() <= 1e-15);
        }
    }

    #[test]
    fn gamma0_is_diag() {
        let g = GammaSet::dirac();
        let expected = Matrix4::diagonal([1.0, 1.0, -1.0, -1.0]);
        assert_eq!(g.gamma(0).sub(&expected).max_abs(), 0.0);
    }

    #[test]
    fn gamma2_squares_to_minus_identity() {
        let g = GammaSet::dirac();
        let sq = g.gamma(2).mul(g.gamma(2));
        assert!(sq.add(&Matrix4::identity()).max_abs() <= 1e-14);
    }

    #[test]
    fn free_spinors_satisfy_dirac_equation() {
        let g = GammaSet::dirac();
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_momentum(&mut rng, m, 2.0);
            for s in [Spin::Up, Spin::Down] {
                let (u, v) = free_spinors(&p, s, m).unwrap();
                let slash = g.slash(&p);
                let mi = Matrix4::identity().scaled(Complex64::new(m, 0.0));
                let ru = slash.sub(&mi).mul_vec(&u);
                let rv = slash.add(&mi).mul_vec(&v);
                assert!(ru.norm() <= 1e-12 * u.norm(), "(p̸-m)u != 0: {}", ru.norm());
                assert!(rv.norm() <= 1e-12 * v.norm(), "(p̸+m)v != 0: {}", rv.norm());
            }
        }
    }

    #[test]
    fn rest_frame_spinor() {
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, 1.0);
        let (u, _) = free_spinors(&p, Spin::Up, 1.0).unwrap();
        // proportional to (1,0,0,0)
        assert!(u.0[1].norm() + u.0[2].norm() + u.0[3].norm() <= 1e-15);
        assert!(u.0[0].norm() > 0.0);
    }

    #[test]
    fn spinor_normalization() {
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = random_momentum(&mut rng, m, 2.0);
            for s in [Spin::Up, Spin::Down] {
                let (u, v) = free_spinors(&p, s, m).unwrap();
                assert_relative_eq!(u.norm2(), 2.0 * p.e / m, max_relative = 1e-12);
                assert_relative_eq!(v.norm2(), 2.0 * p.e / m, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn u_v_orthogonality_at_fixed_spatial_momentum() {
        // u†(p,s) v(-p,s') = 0: the spinors attached to e^{-ip·x} and
        // e^{+i(-p)·x} share the spatial plane wave and must be orthogonal.
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = random_momentum(&mut rng, m, 2.0);
            let pm = FourMomentum::on_shell(-p.px, -p.py, -p.pz, m);
            for s in [Spin::Up, Spin::Down] {
                for sp in [Spin::Up, Spin::Down] {
                    let (u, _) = free_spinors(&p, s, m).unwrap();
                    let (_, v) = free_spinors(&pm, sp, m).unwrap();
                    assert!(u.dot(&v).norm() <= 1e-12, "u†v = {}", u.dot(&v).norm());
                }
            }
        }
    }

    #[test]
    fn rejects_off_shell() {
        let q = FourMomentum::off_shell(0.5, 0.0, 0.0, 0.3);
        assert!(free_spinors(&q, Spin::Up, 1.0).is_err());
        assert!(volkov_spinors(&q, 1.0).is_err());
    }

    #[test]
    fn volkov_spinors_at_rest() {
        let p = FourMomentum::on_shell(0.0, 0.0, 0.0, 1.0);
        let (u1, u2) = volkov_spinors(&p, 1.0).unwrap();
        let e1 = Bispinor::from_reals([1.0, 0.0, 0.0, 0.0]);
        let e2 = Bispinor::from_reals([0.0, -0.5, 0.0, 0.5]);
        assert!((u1 - e1).norm() <= 1e-15);
        assert!((u2 - e2).norm() <= 1e-15);
    }

    #[test]
    fn volkov_u2_has_negative_frequency_content() {
        // The v-projection of u₂ does not vanish: the field-dependent part of
        // the Volkov spinor carries antiparticle content.
        let m = 1.0;
        let p = FourMomentum::on_shell(0.3, 0.1, 0.2, m);
        let (_, u2) = volkov_spinors(&p, m).unwrap();
        let (_, minus) = energy_projectors(p.spatial(), m);
        let proj = minus.mul_vec(&u2);
        assert!(proj.norm2() > 1e-6, "Λ₋ u₂ = {}", proj.norm2());

        // Cross-check through the outer-product form of the projector.
        let pm = FourMomentum::on_shell(-p.px, -p.py, -p.pz, m);
        let mut outer = Matrix4::zero();
        for s in [Spin::Up, Spin::Down] {
            let (_, v) = free_spinors(&pm, s, m).unwrap();
            outer = outer.add(&Matrix4::outer(&v, &v));
        }
        outer = outer.scaled(Complex64::new(m / (2.0 * p.e), 0.0));
        let proj2 = outer.mul_vec(&u2);
        assert!((proj - proj2).norm() <= 1e-13);
    }

    #[test]
    fn charge_conjugation_is_involution_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let psi = Bispinor([
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let cc = charge_conjugate(&charge_conjugate(&psi));
            assert_eq!((cc - psi).norm(), 0.0);
            assert_relative_eq!(charge_conjugate(&psi).norm(), psi.norm(), max_relative = 1e-15);
        }
        assert_eq!(charge_conjugate(&Bispinor::zero()).norm(), 0.0);
    }

    #[test]
    fn charge_conjugate_of_u_is_v_type() {
        // C[u(p,s)e^{-ip·x}] ∝ (v-type spinor) e^{+ip·x}: the conjugated
        // spinor must satisfy (p̸ + m)ψ = 0.
        let g = GammaSet::dirac();
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let p = random_momentum(&mut rng, m, 2.0);
            for s in [Spin::Up, Spin::Down] {
                let (u, _) = free_spinors(&p, s, m).unwrap();
                let cu = charge_conjugate(&u);
                let res = g
                    .slash(&p)
                    .add(&Matrix4::identity().scaled(Complex64::new(m, 0.0)))
                    .mul_vec(&cu);
                assert!(res.norm() <= 1e-12 * cu.norm());
                assert!(cu.norm() > 0.0);
            }
        }
    }

    #[test]
    fn projector_identities_at_random_momenta() {
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let k = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let (plus, minus) = energy_projectors(k, m);
            let sum = plus.add(&minus).sub(&Matrix4::identity());
            assert!(sum.max_abs() <= 1e-12, "completeness: {}", sum.max_abs());
            assert!(plus.mul(&plus).sub(&plus).max_abs() <= 1e-12);
            assert!(minus.mul(&minus).sub(&minus).max_abs() <= 1e-12);
            assert!(plus.mul(&minus).max_abs() <= 1e-12);
            // rank 2 each: trace of a projector equals its rank
            assert!((plus.trace().re - 2.0).abs() <= 1e-12);
            assert!((minus.trace().re - 2.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn projectors_at_rest() {
        let (plus, _) = energy_projectors([0.0, 0.0, 0.0], 1.0);
        let expected = Matrix4::diagonal([1.0, 1.0, 0.0, 0.0]);
        assert!(plus.sub(&expected).max_abs() <= 1e-15);
    }

    #[test]
    fn projectors_select_spinor_branches() {
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let p = random_momentum(&mut rng, m, 2.0);
            let k = p.spatial();
            let (plus, minus) = energy_projectors(k, m);
            let pm = FourMomentum::on_shell(-k[0], -k[1], -k[2], m);
            for s in [Spin::Up, Spin::Down] {
                let (u, _) = free_spinors(&p, s, m).unwrap();
                let (_, v) = free_spinors(&pm, s, m).unwrap();
                assert!((plus.mul_vec(&u) - u).norm() <= 1e-12 * u.norm());
                assert!(plus.mul_vec(&v).norm() <= 1e-12 * v.norm());
                assert!((minus.mul_vec(&v) - v).norm() <= 1e-12 * v.norm());
                assert!(minus.mul_vec(&u).norm() <= 1e-12 * u.norm());
            }
        }
    }

    #[test]
    fn projectors_as_outer_products() {
        // Λ₊(k) = (m/2E) Σ_s u(k,s)u†(k,s) — the normalization choice makes
        // the completeness constant a single factor.
        let m = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = random_momentum(&mut rng, m, 2.0);
            let (plus, _) = energy_projectors(p.spatial(), m);
            let mut outer = Matrix4::zero();
            for s in [Spin::Up, Spin::Down] {
                let (u, _) = free_spinors(&p, s, m).unwrap();
                outer = outer.add(&Matrix4::outer(&u, &u));
            }
            outer = outer.scaled(Complex64::new(m / (2.0 * p.e), 0.0));
            assert!(plus.sub(&outer).max_abs() <= 1e-13);
        }
    }
}
