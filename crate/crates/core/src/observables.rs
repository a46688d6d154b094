//! Optimal measurement operators and source states.
//!
//! The quantum optimum of the m-input star-network functional is reached when
//! every edge party measures a set of `m` mutually anticommuting dichotomic
//! observables and every source emits a maximally entangled pair. Bob's
//! setting `i` is a product over edges of the component
//! `(Σ_x s_{i,x} A_x) / √m`, where the signs `s_{i,x}` come from the
//! random-access-code encoding returned by [`rac_sign_matrix`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::tensor::{anticommutator, kron_all, pauli, Complex64, ComplexMatrix};
use crate::tolerance;
use crate::{Error, Result};

/// `m` dichotomic observables acting on one edge party's system.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    observables: Vec<ComplexMatrix>,
}

impl ObservableSet {
    /// Wraps user-supplied observables. Each must be dichotomic and all must
    /// share a dimension; anticommutation is not required here.
    pub fn new(observables: Vec<ComplexMatrix>) -> Result<Self> {
        if observables.len() < 2 {
            return Err(Error::InvalidInputCount(observables.len()));
        }
        let dim = observables[0].dim();
        for obs in &observables {
            if obs.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: obs.dim() });
            }
            if !obs.is_dichotomic(tolerance::PHYSICS) {
                return Err(Error::NonDichotomicObservable);
            }
        }
        Ok(Self { observables })
    }

    /// The rotated qubit pair `A_0 = (σz + σx)/√2`, `A_1 = (σz − σx)/√2`,
    /// for which Bob's components are exactly `σz` and `σx`.
    pub fn rotated_pair() -> Self {
        let a0 = (&pauli::z() + &pauli::x()).scale_real(FRAC_1_SQRT_2);
        let a1 = (&pauli::z() - &pauli::x()).scale_real(FRAC_1_SQRT_2);
        Self { observables: vec![a0, a1] }
    }

    /// `σx, σy, σz`.
    pub fn pauli_triple() -> Self {
        Self { observables: vec![pauli::x(), pauli::y(), pauli::z()] }
    }

    pub fn m(&self) -> usize {
        self.observables.len()
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn get(&self, x: usize) -> Option<&ComplexMatrix> {
        self.observables.get(x)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.observables.iter()
    }

    /// Largest `‖{A_i, A_j}‖_F` over distinct pairs.
    pub fn max_anticommutator_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.observables.iter().enumerate() {
            for b in &self.observables[i + 1..] {
                let norm = anticommutator(a, b).expect("equal dims").frobenius_norm();
                worst = worst.max(norm);
            }
        }
        worst
    }

    pub fn is_anticommuting(&self, tol: f64) -> bool {
        self.max_anticommutator_norm() <= tol
    }
}

impl<'a> IntoIterator for &'a ObservableSet {
    type Item = &'a ComplexMatrix;
    type IntoIter = std::slice::Iter<'a, ComplexMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// The `2k + 1` anticommuting generators of the Clifford algebra on `k`
/// qubits: `σx⊗I…`, `σy⊗I…`, `σz⊗σx⊗I…`, `σz⊗σy⊗I…`, …, `σz⊗…⊗σz`.
pub fn clifford_generators(qubits: usize) -> Vec<ComplexMatrix> {
    assert!(qubits >= 1, "need at least one qubit");
    let mut out = Vec::with_capacity(2 * qubits + 1);
    for site in 0..qubits {
        for head in [pauli::x(), pauli::y()] {
            let factors: Vec<ComplexMatrix> = (0..qubits)
                .map(|q| match q.cmp(&site) {
                    std::cmp::Ordering::Less => pauli::z(),
                    std::cmp::Ordering::Equal => head.clone(),
                    std::cmp::Ordering::Greater => pauli::identity(),
                })
                .collect();
            out.push(kron_all(&factors));
        }
    }
    let all_z: Vec<ComplexMatrix> = (0..qubits).map(|_| pauli::z()).collect();
    out.push(kron_all(&all_z));
    out
}

/// Number of qubits needed to host `m` anticommuting dichotomic observables:
/// `⌈(m − 1)/2⌉`, and at least one.
pub fn qubits_for(m: usize) -> usize {
    (m.saturating_sub(1)).div_ceil(2).max(1)
}

/// First `m` generators of the smallest Clifford ladder that holds them, on
/// dimension `2^⌈(m−1)/2⌉`.
pub fn anticommuting_set(m: usize) -> Result<ObservableSet> {
    if m < 2 {
        return Err(Error::InvalidInputCount(m));
    }
    let mut observables = clifford_generators(qubits_for(m));
    observables.truncate(m);
    Ok(ObservableSet { observables })
}

/// ±1 sign patterns defining Bob's `2^(m−1)` settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    m: usize,
    rows: Vec<Vec<i8>>,
}

impl SignMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of rows, `2^(m−1)`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row `i` (0-based; row 0 is all `+1`).
    pub fn row(&self, i: usize) -> Option<&[i8]> {
        self.rows.get(i).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.rows.iter().map(Vec::as_slice)
    }
}

/// All length-`m` bit strings with a leading 0, in ascending binary order;
/// entry `(i, x)` is `(−1)^{bit x of string i}`.
pub fn rac_sign_matrix(m: usize) -> Result<SignMatrix> {
    if m < 2 {
        return Err(Error::InvalidInputCount(m));
    }
    if m > 40 {
        // 2^(m-1) rows would not fit in memory anyway.
        return Err(Error::InvalidInputCount(m));
    }
    let rows = (0..1usize << (m - 1))
        .map(|i| {
            // Bit x counted from the most significant of m bits; x = 0 is
            // always the leading 0.
            (0..m).map(|x| if (i >> (m - 1 - x)) & 1 == 1 { -1 } else { 1 }).collect()
        })
        .collect();
    Ok(SignMatrix { m, rows })
}

/// `(Σ_x signs[x] · A_x) / √m`, checked to be dichotomic.
pub fn bob_component(signs: &[i8], set: &ObservableSet) -> Result<ComplexMatrix> {
    if signs.len() != set.m() {
        return Err(Error::DimensionMismatch { left: signs.len(), right: set.m() });
    }
    let sum = signed_sum(signs, set);
    let component = sum.scale_real(1.0 / (set.m() as f64).sqrt());
    if !component.is_dichotomic(tolerance::PHYSICS) {
        return Err(Error::NonUnitalComponent);
    }
    Ok(component)
}

/// `Σ_x signs[x] · A_x` without normalization.
pub(crate) fn signed_sum(signs: &[i8], set: &ObservableSet) -> ComplexMatrix {
    set.iter()
        .zip(signs)
        .fold(ComplexMatrix::zeros(set.dim()), |acc, (a, &s)| &acc + &a.scale_real(f64::from(s)))
}

/// `|Φ_d⟩⟨Φ_d|` with `|Φ_d⟩ = Σ_i |ii⟩ / √d`.
pub fn max_entangled_state(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = Complex64::new(1.0, 0.0);
    }
    Ok(ComplexMatrix::pure_state(&psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{expectation, kron, partial_trace};

    #[test]
    fn m2_set_is_an_anticommuting_pair() {
        let set = anticommuting_set(2).unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(set.get(0).unwrap(), &pauli::x());
        assert_eq!(set.get(1).unwrap(), &pauli::y());
        assert!(set.is_anticommuting(1e-12));
    }

    #[test]
    fn m3_set_is_the_pauli_triple() {
        assert_eq!(anticommuting_set(3).unwrap(), ObservableSet::pauli_triple());
    }

    #[test]
    fn m5_set_is_five_gamma_matrices() {
        let set = anticommuting_set(5).unwrap();
        assert_eq!(set.dim(), 4);
        let id = ComplexMatrix::identity(4);
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                let expected = if i == j { id.scale_real(2.0) } else { ComplexMatrix::zeros(4) };
                assert!(anticommutator(a, b).unwrap().frobenius_distance(&expected) < 1e-12);
            }
        }
    }

    #[test]
    fn generated_dimension_formula() {
        for (m, dim) in [(2, 2), (3, 2), (4, 4), (5, 4), (6, 8), (7, 8), (8, 16)] {
            let set = anticommuting_set(m).unwrap();
            assert_eq!(set.dim(), dim, "m = {m}");
            assert!(set.is_anticommuting(1e-10), "m = {m}");
            assert!(set.iter().all(|a| a.is_dichotomic(1e-10)));
        }
        assert_eq!(anticommuting_set(1), Err(Error::InvalidInputCount(1)));
    }

    #[test]
    fn sign_matrix_m2_matches_i_and_j_patterns() {
        let s = rac_sign_matrix(2).unwrap();
        assert_eq!(s.rows().collect::<Vec<_>>(), vec![&[1, 1][..], &[1, -1][..]]);
    }

    #[test]
    fn sign_matrix_m3() {
        let s = rac_sign_matrix(3).unwrap();
        assert_eq!(s.row(0).unwrap(), &[1, 1, 1]);
        let expected: Vec<&[i8]> = vec![&[1, 1, 1], &[1, 1, -1], &[1, -1, 1], &[1, -1, -1]];
        assert_eq!(s.rows().collect::<Vec<_>>(), expected);
        assert_eq!(rac_sign_matrix(0), Err(Error::InvalidInputCount(0)));
    }

    #[test]
    fn sign_rows_distinct_with_leading_plus() {
        for m in 2..=8 {
            let s = rac_sign_matrix(m).unwrap();
            assert_eq!(s.len(), 1 << (m - 1));
            let mut rows: Vec<_> = s.rows().map(<[i8]>::to_vec).collect();
            assert!(rows.iter().all(|r| r[0] == 1 && r.len() == m));
            rows.sort();
            rows.dedup();
            assert_eq!(rows.len(), 1 << (m - 1));
        }
    }

    #[test]
    fn bob_components_of_rotated_pair() {
        let set = ObservableSet::rotated_pair();
        let b0 = bob_component(&[1, 1], &set).unwrap();
        let b1 = bob_component(&[1, -1], &set).unwrap();
        assert!(b0.frobenius_distance(&pauli::z()) < 1e-15);
        assert!(b1.frobenius_distance(&pauli::x()) < 1e-15);
    }

    #[test]
    fn bob_component_of_pauli_triple() {
        let b = bob_component(&[1, 1, 1], &ObservableSet::pauli_triple()).unwrap();
        let expected = (&(&pauli::x() + &pauli::y()) + &pauli::z()).scale_real(1.0 / 3f64.sqrt());
        assert!(b.frobenius_distance(&expected) < 1e-15);
        assert!((&b * &b).frobenius_distance(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn bob_component_rejects_commuting_sets() {
        let set = ObservableSet::new(vec![pauli::z(), pauli::z()]).unwrap();
        assert_eq!(bob_component(&[1, 1], &set), Err(Error::NonUnitalComponent));
        assert!(bob_component(&[1], &set).is_err());
    }

    #[test]
    fn bob_components_square_to_identity() {
        for m in 2..=6 {
            let set = anticommuting_set(m).unwrap();
            let id = ComplexMatrix::identity(set.dim());
            for row in rac_sign_matrix(m).unwrap().rows() {
                let b = bob_component(row, &set).unwrap();
                assert!((&b * &b).frobenius_distance(&id) < 1e-10);
            }
        }
    }

    #[test]
    fn max_entangled_qubit_pair() {
        let rho = max_entangled_state(2).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let zz = kron(&pauli::z(), &pauli::z());
        let xx = kron(&pauli::x(), &pauli::x());
        assert!((expectation(&zz, &rho).unwrap() - 1.0).abs() < 1e-14);
        assert!((expectation(&xx, &rho).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(max_entangled_state(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn max_entangled_d4_has_maximally_mixed_marginals() {
        let rho = max_entangled_state(4).unwrap();
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        for keep in [0, 1] {
            let r = partial_trace(&rho, &[4, 4], &[keep]).unwrap();
            assert!(r.frobenius_distance(&mixed) < 1e-14);
        }
    }

    #[test]
    fn user_sets_are_validated() {
        assert!(ObservableSet::new(vec![pauli::z()]).is_err());
        assert_eq!(
            ObservableSet::new(vec![pauli::z(), ComplexMatrix::identity(2).scale_real(0.5)]),
            Err(Error::NonDichotomicObservable)
        );
        assert!(ObservableSet::new(vec![pauli::z(), ComplexMatrix::identity(4)]).is_err());
    }
}
