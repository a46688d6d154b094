//! Unbiased unsharp measurements and the relay channel.
//!
//! An unsharp measurement of a dichotomic observable `A = Π⁺ − Π⁻` with
//! strength `λ ∈ [0, 1]` has effects
//!
//! ```text
//! E± = (1 ± λ)/2 · Π⁺ + (1 ∓ λ)/2 · Π⁻
//! ```
//!
//! and Lüders (positive square-root) Kraus operators
//! `M± = √((1 ± λ)/2) Π⁺ + √((1 ∓ λ)/2) Π⁻ = γ⁺ I ± γ⁻ A`.
//!
//! An observer who picks one of `m` settings uniformly at random and forgets
//! the outcome leaves the next observer the averaged state produced by
//! [`relay_channel`]. For anticommuting settings every correlator that
//! involves the measured system shrinks by [`correlator_factor`].

use crate::observables::ObservableSet;
use crate::tensor::{embed, ComplexMatrix};
use crate::tolerance;
use crate::{Error, Result};

/// Outcome of a two-outcome measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(())
}

/// A dichotomic observable measured with unsharpness `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnsharpMeasurement {
    observable: ComplexMatrix,
    lambda: f64,
}

impl UnsharpMeasurement {
    pub fn new(observable: ComplexMatrix, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !observable.is_dichotomic(tolerance::PHYSICS) {
            return Err(Error::NonDichotomicObservable);
        }
        Ok(Self { observable, lambda })
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Kraus operators `M⁺`, `M⁻` of an unsharp measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub m_plus: ComplexMatrix,
    pub m_minus: ComplexMatrix,
}

impl KrausPair {
    pub fn operator(&self, outcome: Outcome) -> &ComplexMatrix {
        match outcome {
            Outcome::Plus => &self.m_plus,
            Outcome::Minus => &self.m_minus,
        }
    }

    /// `(E⁺, E⁻) = (M⁺†M⁺, M⁻†M⁻)`.
    pub fn effects(&self) -> (ComplexMatrix, ComplexMatrix) {
        (&self.m_plus.adjoint() * &self.m_plus, &self.m_minus.adjoint() * &self.m_minus)
    }

    /// `‖E⁺ + E⁻ − I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let (e_plus, e_minus) = self.effects();
        (&e_plus + &e_minus).frobenius_distance(&ComplexMatrix::identity(self.m_plus.dim()))
    }
}

/// Coefficients `γ± = (√(1+λ) ± √(1−λ)) / (2√2)` so that `M± = γ⁺ I ± γ⁻ A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausCoefficients {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

pub fn kraus_coefficients(lambda: f64) -> Result<KrausCoefficients> {
    check_lambda(lambda)?;
    let (p, q) = ((1.0 + lambda).sqrt(), (1.0 - lambda).sqrt());
    let norm = 2.0 * std::f64::consts::SQRT_2;
    Ok(KrausCoefficients { gamma_plus: (p + q) / norm, gamma_minus: (p - q) / norm })
}

/// `Π± = (I ± A)/2`.
pub fn projectors(observable: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !observable.is_dichotomic(tolerance::PHYSICS) {
        return Err(Error::NonDichotomicObservable);
    }
    let id = ComplexMatrix::identity(observable.dim());
    Ok(((&id + observable).scale_real(0.5), (&id - observable).scale_real(0.5)))
}

/// Lüders Kraus operators built from the spectral projectors.
pub fn kraus(meas: &UnsharpMeasurement) -> Result<KrausPair> {
    check_lambda(meas.lambda)?;
    let (pi_plus, pi_minus) = projectors(&meas.observable)?;
    let hi = ((1.0 + meas.lambda) / 2.0).sqrt();
    let lo = ((1.0 - meas.lambda) / 2.0).sqrt();
    Ok(KrausPair {
        m_plus: &pi_plus.scale_real(hi) + &pi_minus.scale_real(lo),
        m_minus: &pi_plus.scale_real(lo) + &pi_minus.scale_real(hi),
    })
}

/// `M ρ M†` for the chosen outcome.
pub fn unnormalized_branch(rho: &ComplexMatrix, kp: &KrausPair, outcome: Outcome) -> Result<ComplexMatrix> {
    let m = kp.operator(outcome);
    m.checked_mul(rho)?.checked_mul(&m.adjoint())
}

/// Post-measurement state `MρM†/p` and outcome probability `p = Tr(MρM†)`.
pub fn luders_update(rho: &ComplexMatrix, kp: &KrausPair, outcome: Outcome) -> Result<(ComplexMatrix, f64)> {
    let branch = unnormalized_branch(rho, kp, outcome)?;
    let p = branch.trace().re;
    if p < tolerance::ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    Ok((branch.scale_real(1.0 / p), p))
}

/// Setting-averaged Lüders channel on subsystem `site` of a register with
/// local dimensions `dims`:
///
/// ```text
/// ρ ↦ (1/m) Σ_x Σ_± M±_x ρ M±_x†
/// ```
///
/// Branches are summed unnormalized, so the map is exactly trace preserving.
pub fn relay_channel(
    rho: &ComplexMatrix,
    settings: &ObservableSet,
    lambda: f64,
    site: usize,
    dims: &[usize],
) -> Result<ComplexMatrix> {
    check_lambda(lambda)?;
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: total });
    }
    let weight = 1.0 / settings.m() as f64;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for observable in settings {
        let kp = kraus(&UnsharpMeasurement::new(observable.clone(), lambda)?)?;
        for outcome in Outcome::BOTH {
            let k = embed(kp.operator(outcome), dims, site)?;
            let branch = &(&k * rho) * &k.adjoint();
            out = &out + &branch.scale_real(weight);
        }
    }
    Ok(out)
}

/// Closed-form shrink factor `(1 + (m−1)√(1−λ²)) / m` that one relay applies
/// to every correlator on the relayed system.
pub fn correlator_factor(lambda: f64, m: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if m < 2 {
        return Err(Error::InvalidInputCount(m));
    }
    let m = m as f64;
    Ok((1.0 + (m - 1.0) * (1.0 - lambda * lambda).sqrt()) / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{anticommuting_set, max_entangled_state, ObservableSet};
    use crate::tensor::{expectation, kron, pauli, Complex64};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket_plus() -> ComplexMatrix {
        ComplexMatrix::pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    #[test]
    fn projectors_of_sigma_z() {
        let (p, q) = projectors(&pauli::z()).unwrap();
        assert_eq!(p, ComplexMatrix::pure_state(&pauli::basis(0)));
        assert_eq!(q, ComplexMatrix::pure_state(&pauli::basis(1)));
    }

    #[test]
    fn projectors_of_rotated_observable_match_eigenvectors() {
        let a = ObservableSet::rotated_pair().get(0).unwrap().clone();
        let (p, q) = projectors(&a).unwrap();
        // Eigen-decomposition oracle: A = cos(π/4) σz + sin(π/4) σx has +1
        // eigenvector (cos π/8, sin π/8) and -1 eigenvector (−sin π/8, cos π/8).
        let t = std::f64::consts::PI / 8.0;
        let plus = [Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)];
        let minus = [Complex64::new(-t.sin(), 0.0), Complex64::new(t.cos(), 0.0)];
        assert!(p.frobenius_distance(&ComplexMatrix::pure_state(&plus)) < 1e-14);
        assert!(q.frobenius_distance(&ComplexMatrix::pure_state(&minus)) < 1e-14);
        assert!((&p * &p).frobenius_distance(&p) < 1e-14);
        assert!((&p - &q).frobenius_distance(&a) < 1e-14);
    }

    #[test]
    fn identity_is_not_dichotomic() {
        assert_eq!(projectors(&ComplexMatrix::identity(2)).unwrap_err(), Error::NonDichotomicObservable);
    }

    #[test]
    fn sharp_and_trivial_limits() {
        let (p, q) = projectors(&pauli::z()).unwrap();
        let sharp = kraus(&UnsharpMeasurement::new(pauli::z(), 1.0).unwrap()).unwrap();
        assert!(sharp.m_plus.frobenius_distance(&p) < 1e-15);
        assert!(sharp.m_minus.frobenius_distance(&q) < 1e-15);

        let trivial = kraus(&UnsharpMeasurement::new(pauli::z(), 0.0).unwrap()).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2);
        assert!(trivial.m_plus.frobenius_distance(&half) < 1e-15);
        assert!(trivial.m_minus.frobenius_distance(&half) < 1e-15);
    }

    #[test]
    fn kraus_coefficients_at_inverse_sqrt2() {
        let lambda = FRAC_1_SQRT_2;
        let k = kraus_coefficients(lambda).unwrap();
        // Closed form evaluated independently.
        let gp = ((1.0 + lambda).sqrt() + (1.0 - lambda).sqrt()) / (2.0 * 2f64.sqrt());
        assert!((k.gamma_plus - gp).abs() < 1e-15);
        assert!((k.gamma_plus - 0.6533).abs() < 1e-4);
        assert!((k.gamma_minus - 0.2706).abs() < 1e-4);
        assert!((k.gamma_plus.powi(2) + k.gamma_minus.powi(2) - 0.5).abs() < 1e-15);

        let kp = kraus(&UnsharpMeasurement::new(pauli::z(), lambda).unwrap()).unwrap();
        let id = ComplexMatrix::identity(2);
        let expected = &id.scale_real(k.gamma_plus) + &pauli::z().scale_real(k.gamma_minus);
        assert!(kp.m_plus.frobenius_distance(&expected) < 1e-14);
    }

    #[test]
    fn lambda_range_is_enforced() {
        assert_eq!(UnsharpMeasurement::new(pauli::z(), 1.5), Err(Error::LambdaOutOfRange(1.5)));
        assert!(UnsharpMeasurement::new(pauli::z(), -0.1).is_err());
        assert!(UnsharpMeasurement::new(ComplexMatrix::identity(2), 0.5).is_err());
        assert!(correlator_factor(f64::NAN, 2).is_err());
    }

    #[test]
    fn luders_examples() {
        let zero = ComplexMatrix::pure_state(&pauli::basis(0));
        let sharp = kraus(&UnsharpMeasurement::new(pauli::z(), 1.0).unwrap()).unwrap();
        let (post, p) = luders_update(&zero, &sharp, Outcome::Plus).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(post.frobenius_distance(&zero) < 1e-15);
        assert!(matches!(luders_update(&zero, &sharp, Outcome::Minus), Err(Error::ZeroProbabilityBranch(_))));

        let rho = ket_plus();
        let none = kraus(&UnsharpMeasurement::new(pauli::x(), 0.0).unwrap()).unwrap();
        for outcome in Outcome::BOTH {
            let (post, p) = luders_update(&rho, &none, outcome).unwrap();
            assert!((p - 0.5).abs() < 1e-15);
            assert!(post.frobenius_distance(&rho) < 1e-15);
        }

        let lambda = FRAC_1_SQRT_2;
        let weak = kraus(&UnsharpMeasurement::new(pauli::z(), lambda).unwrap()).unwrap();
        let (post, p) = luders_update(&rho, &weak, Outcome::Plus).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let sx = expectation(&pauli::x(), &post).unwrap();
        assert!((sx - (1.0 - lambda * lambda).sqrt()).abs() < 1e-14);
        assert!((sx - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn relay_with_zero_strength_is_identity_channel() {
        let rho = max_entangled_state(2).unwrap();
        let set = anticommuting_set(2).unwrap();
        let out = relay_channel(&rho, &set, 0.0, 0, &[2, 2]).unwrap();
        assert!(out.frobenius_distance(&rho) < 1e-14);
    }

    fn relayed_correlator_ratio(m: usize, lambda: f64) -> f64 {
        let set = anticommuting_set(m).unwrap();
        let d = set.dim();
        let rho = max_entangled_state(d).unwrap();
        let relayed = relay_channel(&rho, &set, lambda, 0, &[d, d]).unwrap();
        let a = set.get(0).unwrap();
        let op = kron(a, &a.conj());
        expectation(&op, &relayed).unwrap() / expectation(&op, &rho).unwrap()
    }

    #[test]
    fn relay_shrinks_two_setting_correlators() {
        let lambda: f64 = 0.6;
        let expected = (1.0 + (1.0 - lambda * lambda).sqrt()) / 2.0;
        assert!((relayed_correlator_ratio(2, lambda) - expected).abs() < 1e-12);
    }

    #[test]
    fn relay_shrinks_three_setting_correlators() {
        let lambda: f64 = 0.6;
        let expected = (1.0 + 2.0 * (1.0 - lambda * lambda).sqrt()) / 3.0;
        assert!((relayed_correlator_ratio(3, lambda) - expected).abs() < 1e-12);
    }

    #[test]
    fn correlator_factor_values() {
        for m in 2..6 {
            assert!((correlator_factor(1.0, m).unwrap() - 1.0 / m as f64).abs() < 1e-15);
            assert_eq!(correlator_factor(0.0, m).unwrap(), 1.0);
        }
        let f = correlator_factor(FRAC_1_SQRT_2, 2).unwrap();
        assert!((f - (1.0 + FRAC_1_SQRT_2) / 2.0).abs() < 1e-15);
        assert!((f - 0.85355).abs() < 1e-5);
        assert_eq!(correlator_factor(0.5, 1), Err(Error::InvalidInputCount(1)));
    }

    fn arb_dichotomic() -> impl Strategy<Value = ComplexMatrix> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
            .prop_map(|(x, y, z)| {
                let n = (x * x + y * y + z * z).sqrt();
                &(&pauli::x().scale_real(x / n) + &pauli::y().scale_real(y / n))
                    + &pauli::z().scale_real(z / n)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn effects_are_complete(a in arb_dichotomic(), lambda in 0.0f64..=1.0) {
            let kp = kraus(&UnsharpMeasurement::new(a, lambda).unwrap()).unwrap();
            prop_assert!(kp.completeness_defect() < 1e-10);
            let (ep, em) = kp.effects();
            prop_assert!(ep.is_positive_semidefinite(1e-10));
            prop_assert!(em.is_positive_semidefinite(1e-10));
        }

        #[test]
        fn relay_preserves_trace(lambda in 0.0f64..=1.0, m in 2usize..=4, site in 0usize..2) {
            let set = anticommuting_set(m).unwrap();
            let d = set.dim();
            let rho = max_entangled_state(d).unwrap();
            let out = relay_channel(&rho, &set, lambda, site, &[d, d]).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(out.is_density_matrix(1e-10));
        }
    }
}
