//! Sum-of-squares certificate for the two-input bilocal optimum.
//!
//! The register is `A ⊗ B_A ⊗ B_C ⊗ C`: Alice¹ and Bob's first system share
//! one source, Bob's second system and Alice² share the other. With
//!
//! ```text
//! (ω₁)_A = ‖(A₀ + A₁)|ψ⟩‖ = √(2 + ⟨{A₀, A₁}⟩),   (ω₂)_A = √(2 − ⟨{A₀, A₁}⟩)
//! ```
//!
//! (likewise for `C`), `ω_r = (ω_r)_A (ω_r)_C`, and the normalized products
//! `X̃₁ = (A₀+A₁)/(ω₁)_A ⊗ (C₀+C₁)/(ω₁)_C`, `X̃₂ = (A₀−A₁)/(ω₂)_A ⊗ (C₀−C₁)/(ω₂)_C`,
//! the operators `L_r = X̃_r − s_r B_r` (with `s_r` the sign of the matching
//! correlator) satisfy `⟨L_r†L_r⟩ = 2(1 − |I_r|/ω_r)` on product states. The
//! weighted sum
//!
//! ```text
//! ⟨γ⟩ = Σ_r ω_r / (2(√ω_r + √|I_r|)) · ⟨L_r†L_r⟩ = √ω₁ + √ω₂ − S₂
//! ```
//!
//! is manifestly nonnegative, so `S₂ ≤ √ω₁ + √ω₂ ≤ 2√2`, with equality
//! exactly when both `L_r|ψ⟩` vanish.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::observables::clifford_generators;
use crate::tensor::{anticommutator, embed, kron, kron_all, partial_trace, pauli, Complex64, ComplexMatrix};
use crate::tolerance;
use crate::{Error, Result};

/// Observables and state of a bilocal experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SosConfig {
    pub a0: ComplexMatrix,
    pub a1: ComplexMatrix,
    pub c0: ComplexMatrix,
    pub c1: ComplexMatrix,
    /// Bob's observables on `B_A ⊗ B_C`.
    pub b0: ComplexMatrix,
    pub b1: ComplexMatrix,
    pub state: ComplexMatrix,
    edge_dim: usize,
}

impl SosConfig {
    /// Builds a configuration on the product state `ab_state ⊗ bc_state`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        b0: ComplexMatrix,
        b1: ComplexMatrix,
        c0: ComplexMatrix,
        c1: ComplexMatrix,
        ab_state: &ComplexMatrix,
        bc_state: &ComplexMatrix,
    ) -> Result<Self> {
        Self::from_state(a0, a1, b0, b1, c0, c1, kron(ab_state, bc_state))
    }

    /// Builds a configuration on an arbitrary tripartite state, which must
    /// factorize across the two sources.
    #[allow(clippy::too_many_arguments)]
    pub fn from_state(
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        b0: ComplexMatrix,
        b1: ComplexMatrix,
        c0: ComplexMatrix,
        c1: ComplexMatrix,
        state: ComplexMatrix,
    ) -> Result<Self> {
        let d = a0.dim();
        for op in [&a1, &c0, &c1] {
            if op.dim() != d {
                return Err(Error::DimensionMismatch { left: d, right: op.dim() });
            }
        }
        for op in [&b0, &b1] {
            if op.dim() != d * d {
                return Err(Error::DimensionMismatch { left: d * d, right: op.dim() });
            }
        }
        if state.dim() != d.pow(4) {
            return Err(Error::DimensionMismatch { left: d.pow(4), right: state.dim() });
        }
        if [&a0, &a1, &b0, &b1, &c0, &c1].iter().any(|o| !o.is_dichotomic(tolerance::PHYSICS)) {
            return Err(Error::NonDichotomicObservable);
        }
        if !state.is_density_matrix(tolerance::PHYSICS) {
            return Err(Error::NotADensityMatrix);
        }
        let config = Self { a0, a1, c0, c1, b0, b1, state, edge_dim: d };
        let gap = config.factorization_gap()?;
        if gap > tolerance::PHYSICS {
            return Err(Error::NotFactorized(gap));
        }
        Ok(config)
    }

    /// Qubit observables `A₀ = C₀ = (σz+σx)/√2`, `A₁ = C₁ = (σz−σx)/√2`,
    /// `B₀ = σz⊗σz`, `B₁ = σx⊗σx` on two copies of `|φ⁺⟩`.
    pub fn optimal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a0 = (&pauli::z() + &pauli::x()).scale_real(s);
        let a1 = (&pauli::z() - &pauli::x()).scale_real(s);
        let phi = crate::observables::max_entangled_state(2).expect("d = 2");
        Self::new(
            a0.clone(),
            a1.clone(),
            kron(&pauli::z(), &pauli::z()),
            kron(&pauli::x(), &pauli::x()),
            a0,
            a1,
            &phi,
            &phi,
        )
        .expect("optimal configuration is valid")
    }

    /// Random qubit configuration: edge observables along random Bloch
    /// directions, Bob's observables along random directions of the five
    /// two-qubit gamma matrices, and two random pure source states.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let paulis = [pauli::x(), pauli::y(), pauli::z()];
        let gammas = clifford_generators(2);
        let a0 = random_dichotomic(&paulis, rng);
        let a1 = random_dichotomic(&paulis, rng);
        let c0 = random_dichotomic(&paulis, rng);
        let c1 = random_dichotomic(&paulis, rng);
        let b0 = random_dichotomic(&gammas, rng);
        let b1 = random_dichotomic(&gammas, rng);
        let ab = random_pure_state(4, rng);
        let bc = random_pure_state(4, rng);
        Self::new(a0, a1, b0, b1, c0, c1, &ab, &bc).expect("random configuration is valid")
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_dim
    }

    fn dims(&self) -> [usize; 4] {
        [self.edge_dim; 4]
    }

    /// Reduced states of the two sources.
    pub fn edge_states(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let dims = self.dims();
        Ok((partial_trace(&self.state, &dims, &[0, 1])?, partial_trace(&self.state, &dims, &[2, 3])?))
    }

    /// `‖ρ − ρ_AB ⊗ ρ_BC‖_F`.
    pub fn factorization_gap(&self) -> Result<f64> {
        let (ab, bc) = self.edge_states()?;
        Ok(self.state.frobenius_distance(&kron(&ab, &bc)))
    }

    fn on_alice(&self, op: &ComplexMatrix) -> ComplexMatrix {
        embed(op, &self.dims(), 0).expect("edge-sized operator")
    }

    fn on_charlie(&self, op: &ComplexMatrix) -> ComplexMatrix {
        embed(op, &self.dims(), 3).expect("edge-sized operator")
    }

    fn on_bob(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.edge_dim);
        kron_all([&id, op, &id])
    }

    fn expect(&self, op: &ComplexMatrix) -> Result<f64> {
        crate::tensor::expectation(op, &self.state)
    }

    fn norm_route(&self, op: &ComplexMatrix) -> Result<f64> {
        let sq = self.state.trace_product(&(&op.adjoint() * op))?.re;
        Ok(sq.max(0.0).sqrt())
    }

    /// `(I, J)`: the two correlator combinations of the bilocal functional.
    pub fn correlators(&self) -> Result<(f64, f64)> {
        let i = self.expect(&self.product_term(true, &self.b0))?;
        let j = self.expect(&self.product_term(false, &self.b1))?;
        Ok((i, j))
    }

    /// `(A₀ ± A₁) ⊗ B ⊗ (C₀ ± C₁)` on the full register.
    fn product_term(&self, plus: bool, bob: &ComplexMatrix) -> ComplexMatrix {
        let (a, c) = self.sums(plus);
        &(&self.on_alice(&a) * &self.on_bob(bob)) * &self.on_charlie(&c)
    }

    fn sums(&self, plus: bool) -> (ComplexMatrix, ComplexMatrix) {
        if plus {
            (&self.a0 + &self.a1, &self.c0 + &self.c1)
        } else {
            (&self.a0 - &self.a1, &self.c0 - &self.c1)
        }
    }

    /// `S₂ = √|I| + √|J|` evaluated on the state.
    pub fn s2(&self) -> Result<f64> {
        let (i, j) = self.correlators()?;
        Ok(i.abs().sqrt() + j.abs().sqrt())
    }
}

/// `Σ_i u_i G_i` for a uniformly random real unit vector `u`.
pub fn random_dichotomic<R: Rng + ?Sized>(generators: &[ComplexMatrix], rng: &mut R) -> ComplexMatrix {
    let u: Vec<f64> = generators.iter().map(|_| rng.sample(StandardNormal)).collect();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    generators
        .iter()
        .zip(&u)
        .fold(ComplexMatrix::zeros(generators[0].dim()), |acc, (g, &x)| &acc + &g.scale_real(x / norm))
}

/// Haar-random pure state on `dim` levels, as a density matrix.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let psi: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    ComplexMatrix::pure_state(&psi)
}

/// The four normalizations, each computed twice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omegas {
    /// `(ω₁)_A`
    pub a1: f64,
    /// `(ω₂)_A`
    pub a2: f64,
    /// `(ω₁)_C`
    pub c1: f64,
    /// `(ω₂)_C`
    pub c2: f64,
    /// Largest disagreement between the norm and anticommutator routes.
    pub route_gap: f64,
}

impl Omegas {
    pub fn omega1(&self) -> f64 {
        self.a1 * self.c1
    }

    pub fn omega2(&self) -> f64 {
        self.a2 * self.c2
    }

    /// `√ω₁ + √ω₂`.
    pub fn sqrt_sum(&self) -> f64 {
        self.omega1().sqrt() + self.omega2().sqrt()
    }

    /// `√((ω₁)_A + (ω₂)_A) · √((ω₁)_C + (ω₂)_C)`, an upper bound on
    /// [`Omegas::sqrt_sum`] that is itself at most `2√2`.
    pub fn cauchy_schwarz_bound(&self) -> f64 {
        (self.a1 + self.a2).sqrt() * (self.c1 + self.c2).sqrt()
    }
}

pub fn omega(config: &SosConfig) -> Result<Omegas> {
    let anti_a = config.expect(&config.on_alice(&anticommutator(&config.a0, &config.a1)?))?;
    let anti_c = config.expect(&config.on_charlie(&anticommutator(&config.c0, &config.c1)?))?;
    let formula = |sign: f64, anti: f64| (2.0 + sign * anti).max(0.0).sqrt();

    let (a_plus, c_plus) = config.sums(true);
    let (a_minus, c_minus) = config.sums(false);
    let norms = [
        config.norm_route(&config.on_alice(&a_plus))?,
        config.norm_route(&config.on_alice(&a_minus))?,
        config.norm_route(&config.on_charlie(&c_plus))?,
        config.norm_route(&config.on_charlie(&c_minus))?,
    ];
    let formulas = [formula(1.0, anti_a), formula(-1.0, anti_a), formula(1.0, anti_c), formula(-1.0, anti_c)];
    let route_gap = norms.iter().zip(&formulas).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if let Some(&small) = norms.iter().find(|&&w| w < tolerance::DEGENERATE_OMEGA) {
        return Err(Error::DegenerateDirection(small));
    }
    Ok(Omegas { a1: norms[0], a2: norms[1], c1: norms[2], c2: norms[3], route_gap })
}

/// Per-branch ingredients: `ω_r`, `⟨L_r†L_r⟩` with sign-matched `L_r`, and
/// the correlator `I_r`.
struct Branch {
    omega: f64,
    l_norm_sq: f64,
    correlator: f64,
}

fn branches(config: &SosConfig, omegas: &Omegas, sign_matched: bool) -> Result<[Branch; 2]> {
    let (i, j) = config.correlators()?;
    let build = |plus: bool, wa: f64, wc: f64, bob: &ComplexMatrix, corr: f64| -> Result<Branch> {
        let (a, c) = config.sums(plus);
        let x = &config.on_alice(&a.scale_real(1.0 / wa)) * &config.on_charlie(&c.scale_real(1.0 / wc));
        let sign = if sign_matched && corr < 0.0 { -1.0 } else { 1.0 };
        let l = &x - &config.on_bob(bob).scale_real(sign);
        Ok(Branch { omega: wa * wc, l_norm_sq: config.norm_route(&l)?.powi(2), correlator: corr })
    };
    Ok([
        build(true, omegas.a1, omegas.c1, &config.b0, i)?,
        build(false, omegas.a2, omegas.c2, &config.b1, j)?,
    ])
}

/// `⟨γ⟩ = Σ_r ω_r / (2(√ω_r + √|I_r|)) ⟨L_r†L_r⟩`.
pub fn gamma_expectation(config: &SosConfig) -> Result<f64> {
    let omegas = omega(config)?;
    Ok(branches(config, &omegas, true)?
        .iter()
        .map(|b| b.omega / (2.0 * (b.omega.sqrt() + b.correlator.abs().sqrt())) * b.l_norm_sq)
        .sum())
}

/// `⟨γ⟩` with fixed weights `√ω_r / 2` and `L_r = X̃_r − B_r`. Nonnegative,
/// vanishes at the optimum, but does not equal `√ω₁ + √ω₂ − S₂` elsewhere.
pub fn gamma_fixed_weights(config: &SosConfig) -> Result<f64> {
    let omegas = omega(config)?;
    Ok(branches(config, &omegas, false)?.iter().map(|b| b.omega.sqrt() / 2.0 * b.l_norm_sq).sum())
}

/// Scalars `√‖X̃_r|ψ⟩‖ − √‖B_r|ψ⟩‖` for `r = 1, 2`. With the ω normalization
/// both norms are 1 on product states, so this reading of the "norm
/// difference" is identically zero; kept as a diagnostic.
pub fn norm_difference_diagnostic(config: &SosConfig) -> Result<(f64, f64)> {
    let omegas = omega(config)?;
    let diff = |plus: bool, wa: f64, wc: f64, bob: &ComplexMatrix| -> Result<f64> {
        let (a, c) = config.sums(plus);
        let x = &config.on_alice(&a.scale_real(1.0 / wa)) * &config.on_charlie(&c.scale_real(1.0 / wc));
        Ok(config.norm_route(&x)?.sqrt() - config.norm_route(&config.on_bob(bob))?.sqrt())
    };
    Ok((diff(true, omegas.a1, omegas.c1, &config.b0)?, diff(false, omegas.a2, omegas.c2, &config.b1)?))
}

/// `|⟨γ⟩ − (√ω₁ + √ω₂ − S₂)|`.
pub fn sos_identity_check(config: &SosConfig) -> Result<f64> {
    let gap = config.factorization_gap()?;
    if gap > tolerance::PHYSICS {
        return Err(Error::NotFactorized(gap));
    }
    let omegas = omega(config)?;
    let gamma = gamma_expectation(config)?;
    Ok((gamma - (omegas.sqrt_sum() - config.s2()?)).abs())
}

/// Everything the certificate asserts about one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SosReport {
    pub gamma: f64,
    pub s2: f64,
    pub sqrt_omega_sum: f64,
    pub cauchy_schwarz_bound: f64,
    pub identity_residual: f64,
    pub route_gap: f64,
}

impl SosReport {
    /// `√ω₁ + √ω₂ − 2√2`; nonpositive when the bound holds.
    pub fn bound_excess(&self) -> f64 {
        self.sqrt_omega_sum - 2.0 * std::f64::consts::SQRT_2
    }
}

pub fn certify(config: &SosConfig) -> Result<SosReport> {
    let omegas = omega(config)?;
    Ok(SosReport {
        gamma: gamma_expectation(config)?,
        s2: config.s2()?,
        sqrt_omega_sum: omegas.sqrt_sum(),
        cauchy_schwarz_bound: omegas.cauchy_schwarz_bound(),
        identity_residual: sos_identity_check(config)?,
        route_gap: omegas.route_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    #[test]
    fn optimal_config_has_all_omegas_sqrt_two() {
        let o = omega(&SosConfig::optimal()).unwrap();
        for w in [o.a1, o.a2, o.c1, o.c2] {
            assert!((w - SQRT_2).abs() < 1e-12);
        }
        assert!(o.route_gap < 1e-12);
    }

    #[test]
    fn parallel_observables_are_degenerate() {
        let phi = crate::observables::max_entangled_state(2).unwrap();
        let base = SosConfig::optimal();
        let config = SosConfig::new(
            pauli::z(),
            pauli::z(),
            base.b0.clone(),
            base.b1.clone(),
            base.c0.clone(),
            base.c1.clone(),
            &phi,
            &phi,
        )
        .unwrap();
        assert!(matches!(omega(&config), Err(Error::DegenerateDirection(_))));
        // The first direction is still well defined: ‖2σz|ψ⟩‖ = 2.
        let (a_plus, _) = config.sums(true);
        assert!((config.norm_route(&config.on_alice(&a_plus)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_omega_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let o = omega(&SosConfig::random(&mut rng)).unwrap();
            assert!(o.route_gap < 1e-10);
            for w in [o.a1, o.a2, o.c1, o.c2] {
                assert!((0.0..=4.0).contains(&(w * w)));
            }
        }
    }

    #[test]
    fn optimal_gamma_vanishes() {
        let config = SosConfig::optimal();
        assert!(gamma_expectation(&config).unwrap().abs() < 1e-10);
        assert!(gamma_fixed_weights(&config).unwrap().abs() < 1e-10);
        assert!(sos_identity_check(&config).unwrap() < 1e-12);
        assert!((config.s2().unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn flipped_b0_costs_two_sqrt_omega_with_fixed_weights() {
        let mut config = SosConfig::optimal();
        config.b0 = config.b0.scale_real(-1.0);
        // ‖X̃ + B₀‖² = ⟨X̃²⟩ + 2⟨X̃B₀⟩ + 1 = 4, weighted by √ω₁/2 = √2/2.
        let value = gamma_fixed_weights(&config).unwrap();
        assert!((value - 2.0 * SQRT_2).abs() < 1e-10);
        // The sign-matched certificate only sees |I|, which is unchanged.
        assert!(gamma_expectation(&config).unwrap().abs() < 1e-10);
    }

    #[test]
    fn random_configs_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let config = SosConfig::random(&mut rng);
            let r = certify(&config).unwrap();
            assert!(r.gamma >= -1e-12);
            assert!(r.gamma > 0.0);
            assert!(r.identity_residual < 1e-10);
            assert!(r.s2 <= r.sqrt_omega_sum + 1e-10);
            assert!(r.sqrt_omega_sum <= r.cauchy_schwarz_bound + 1e-10);
            assert!(r.bound_excess() <= 1e-10);
            assert!(gamma_fixed_weights(&config).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn norm_difference_reading_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (l1, l2) = norm_difference_diagnostic(&SosConfig::random(&mut rng)).unwrap();
        assert!(l1.abs() < 1e-10 && l2.abs() < 1e-10);
    }

    #[test]
    fn entangled_across_sources_is_rejected() {
        let base = SosConfig::optimal();
        // GHZ-like state on the four qubits does not factorize.
        let mut psi = vec![Complex64::new(0.0, 0.0); 16];
        psi[0] = Complex64::new(1.0, 0.0);
        psi[15] = Complex64::new(1.0, 0.0);
        let ghz = ComplexMatrix::pure_state(&psi);
        let err = SosConfig::from_state(
            base.a0.clone(),
            base.a1.clone(),
            base.b0.clone(),
            base.b1.clone(),
            base.c0.clone(),
            base.c1.clone(),
            ghz,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotFactorized(_)));
    }
}
