//! Exact simulation of a star network with sequential edge observers.
//!
//! Sources are independent and every operation acts locally on one edge, so
//! the global state stays a product of per-edge two-body states and every
//! correlator of the functional factorizes over edges. [`run_sequence`]
//! exploits this and costs O(n). [`full_tensor_check`] builds the monolithic
//! state and the explicit joint Kraus operators instead; it is the oracle for
//! the factorized engine and is capped at a 64-dimensional register.
//!
//! Conventions:
//!
//! * Sequence positions `k` are 1-based; sign rows `i` are 0-based.
//! * Edge `l` holds the ordered pair (Alice^l, Bob's l-th system).
//! * The `k`-th observer's own measurement enters through its effects,
//!   `E⁺ − E⁻ = λ_k A`; only observers before `k` disturb the state.
//! * Bob's local factor on each edge is the complex conjugate of
//!   [`bob_component`]: on a maximally entangled pair
//!   `(A ⊗ I)|Φ⟩ = (I ⊗ Aᵀ)|Φ⟩`, and `Aᵀ = Ā` for Hermitian `A`. For real
//!   observable sets this is a no-op.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::measurement::{kraus, relay_channel, Outcome, UnsharpMeasurement};
use crate::observables::{
    anticommuting_set, bob_component, max_entangled_state, rac_sign_matrix, ObservableSet,
};
use crate::tensor::{kron, kron_all, ComplexMatrix};
use crate::tolerance;
use crate::{Error, Result};

/// Which edges run a sequential chain of unsharp observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SharingMode {
    /// Every edge runs a chain of the same length.
    Symmetric,
    /// Only edge 1 runs a chain; every other edge party measures sharply once.
    Asymmetric,
}

impl fmt::Display for SharingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SharingMode::Symmetric => "symmetric",
            SharingMode::Asymmetric => "asymmetric",
        })
    }
}

impl FromStr for SharingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(SharingMode::Symmetric),
            "asymmetric" | "asym" => Ok(SharingMode::Asymmetric),
            other => Err(Error::InvalidScenario(format!("unknown sharing mode `{other}`"))),
        }
    }
}

/// A complete experiment: `n` edges, `m` inputs per edge party and the
/// unsharpness schedule of every edge (index `k − 1` holds position `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    n: usize,
    m: usize,
    mode: SharingMode,
    schedules: Vec<Vec<f64>>,
}

impl Scenario {
    pub fn new(n: usize, m: usize, mode: SharingMode, schedules: Vec<Vec<f64>>) -> Result<Self> {
        let scenario = Self { n, m, mode, schedules };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Every edge follows the same schedule.
    pub fn symmetric(n: usize, m: usize, schedule: Vec<f64>) -> Result<Self> {
        Self::new(n, m, SharingMode::Symmetric, vec![schedule; n])
    }

    /// Edge 1 follows `schedule`; the other edges measure sharply.
    pub fn asymmetric(n: usize, m: usize, schedule: Vec<f64>) -> Result<Self> {
        let mut schedules = vec![vec![1.0]; n];
        if n >= 1 {
            schedules[0] = schedule;
        }
        Self::new(n, m, SharingMode::Asymmetric, schedules)
    }

    /// A single round of sharp measurements on every edge.
    pub fn sharp(n: usize, m: usize) -> Result<Self> {
        Self::symmetric(n, m, vec![1.0])
    }

    /// Appends a sharp (`λ = 1`) final observer to every sequenced edge.
    pub fn with_final_sharp(mut self) -> Self {
        for edge in 0..self.n {
            if self.is_sequenced(edge) {
                self.schedules[edge].push(1.0);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidScenario("edge count must be positive".into()));
        }
        if self.m < 2 {
            return Err(Error::InvalidInputCount(self.m));
        }
        if self.schedules.len() != self.n {
            return Err(Error::InvalidScenario(format!(
                "{} schedules given for {} edges",
                self.schedules.len(),
                self.n
            )));
        }
        for schedule in &self.schedules {
            if schedule.is_empty() {
                return Err(Error::EmptySchedule);
            }
            if let Some(&bad) = schedule.iter().find(|l| !(0.0..=1.0).contains(*l)) {
                return Err(Error::LambdaOutOfRange(bad));
            }
        }
        match self.mode {
            SharingMode::Symmetric => {
                let len = self.schedules[0].len();
                if self.schedules.iter().any(|s| s.len() != len) {
                    return Err(Error::InvalidScenario(
                        "symmetric sharing needs equal-length schedules".into(),
                    ));
                }
            }
            SharingMode::Asymmetric => {
                if self.schedules[1..].iter().any(|s| s.as_slice() != [1.0]) {
                    return Err(Error::InvalidScenario(
                        "asymmetric sharing: edges other than edge 1 must have schedule [1.0]".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> SharingMode {
        self.mode
    }

    pub fn schedules(&self) -> &[Vec<f64>] {
        &self.schedules
    }

    /// Whether `edge` runs a chain of observers that relay between positions.
    pub fn is_sequenced(&self, edge: usize) -> bool {
        match self.mode {
            SharingMode::Symmetric => true,
            SharingMode::Asymmetric => edge == 0,
        }
    }

    /// Number of sequence positions.
    pub fn positions(&self) -> usize {
        self.schedules[0].len()
    }

    /// Unsharpness used on `edge` at position `k` (1-based).
    pub fn lambda(&self, edge: usize, k: usize) -> Result<f64> {
        let schedule = self.schedules.get(edge).ok_or(Error::IndexOutOfRange { index: edge, len: self.n })?;
        if k == 0 || k > self.positions() {
            return Err(Error::ScheduleTooShort { needed: k, got: self.positions() });
        }
        Ok(if self.is_sequenced(edge) { schedule[k - 1] } else { schedule[0] })
    }

    /// Same scenario with edge labels permuted: new edge `j` is old edge
    /// `perm[j]`.
    pub fn permute_edges(&self, perm: &[usize]) -> Result<Self> {
        let schedules = perm
            .iter()
            .map(|&p| self.schedules.get(p).cloned().ok_or(Error::IndexOutOfRange { index: p, len: self.n }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.m, self.mode, schedules)
    }
}

/// Outcome of one sequence position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    /// Sequence position, 1-based.
    pub k: usize,
    /// `J_i` for every sign row `i`; for `m = 2` these are `I` and `J`.
    pub j_values: Vec<f64>,
    /// `Σ_i |J_i|^(1/n)`.
    pub s_value: f64,
    /// Classical bound `α_m`.
    pub bound: f64,
    pub violated: bool,
}

impl SequenceReport {
    pub fn new(k: usize, j_values: Vec<f64>, n: usize, bound: f64) -> Self {
        let s_value = functional(&j_values, n);
        Self { k, j_values, s_value, bound, violated: s_value > bound + tolerance::VIOLATION_MARGIN }
    }
}

/// `Σ_i |J_i|^(1/n)`.
pub fn functional(j_values: &[f64], n: usize) -> f64 {
    let inv = 1.0 / n as f64;
    j_values.iter().map(|j| j.abs().powf(inv)).sum()
}

/// `⟨edge_obs ⊗ bob_comp⟩` in a two-subsystem edge state.
pub fn edge_correlator(
    edge_state: &ComplexMatrix,
    edge_obs: &ComplexMatrix,
    bob_comp: &ComplexMatrix,
) -> Result<f64> {
    let op = kron(edge_obs, bob_comp);
    if op.dim() != edge_state.dim() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: edge_state.dim() });
    }
    crate::tensor::expectation(&op, edge_state)
}

/// Bob's local factor for sign row `signs`.
fn bob_factor(signs: &[i8], set: &ObservableSet) -> Result<ComplexMatrix> {
    Ok(bob_component(signs, set)?.conj())
}

fn check_set(scenario: &Scenario, set: &ObservableSet) -> Result<()> {
    if set.m() != scenario.m() {
        return Err(Error::InvalidScenario(format!(
            "observable set has {} settings, scenario needs {}",
            set.m(),
            scenario.m()
        )));
    }
    Ok(())
}

/// `J_i` at position `k`, evaluated as a product over edges of
/// `λ_{l,k} Σ_x s_{i,x} ⟨A_x ⊗ B̄_i⟩_l` on the current edge states.
pub fn j_value(
    scenario: &Scenario,
    set: &ObservableSet,
    states: &[ComplexMatrix],
    row: usize,
    k: usize,
) -> Result<f64> {
    check_set(scenario, set)?;
    if states.len() != scenario.n() {
        return Err(Error::DimensionMismatch { left: states.len(), right: scenario.n() });
    }
    let signs_matrix = rac_sign_matrix(scenario.m())?;
    let signs =
        signs_matrix.row(row).ok_or(Error::IndexOutOfRange { index: row, len: signs_matrix.len() })?;
    let bob = bob_factor(signs, set)?;
    let mut product = 1.0;
    for (edge, state) in states.iter().enumerate() {
        let lambda = scenario.lambda(edge, k)?;
        let mut sum = 0.0;
        for (a, &s) in set.iter().zip(signs) {
            sum += f64::from(s) * edge_correlator(state, a, &bob)?;
        }
        product *= lambda * sum;
    }
    Ok(product)
}

/// Runs the scenario with the default anticommuting observables.
pub fn run_sequence(scenario: &Scenario) -> Result<Vec<SequenceReport>> {
    run_sequence_with(scenario, &anticommuting_set(scenario.m())?)
}

/// Factorized engine: one two-body state per edge, relayed between positions.
pub fn run_sequence_with(scenario: &Scenario, set: &ObservableSet) -> Result<Vec<SequenceReport>> {
    scenario.validate()?;
    check_set(scenario, set)?;
    let d = set.dim();
    let bound = analytic::alpha(scenario.m())? as f64;
    let rows = rac_sign_matrix(scenario.m())?.len();
    let mut states = vec![max_entangled_state(d)?; scenario.n()];
    let mut reports = Vec::with_capacity(scenario.positions());
    for k in 1..=scenario.positions() {
        let j_values =
            (0..rows).map(|row| j_value(scenario, set, &states, row, k)).collect::<Result<Vec<_>>>()?;
        reports.push(SequenceReport::new(k, j_values, scenario.n(), bound));
        if k < scenario.positions() {
            for (edge, state) in states.iter_mut().enumerate() {
                if scenario.is_sequenced(edge) {
                    *state = relay_channel(state, set, scenario.lambda(edge, k)?, 0, &[d, d])?;
                }
            }
        }
    }
    Ok(reports)
}

/// Largest edge count accepted by [`full_tensor_check`].
pub const FULL_TENSOR_MAX_N: usize = 3;
/// Largest input count accepted by [`full_tensor_check`].
pub const FULL_TENSOR_MAX_M: usize = 3;

/// Monolithic oracle with the default anticommuting observables.
pub fn full_tensor_check(scenario: &Scenario) -> Result<Vec<SequenceReport>> {
    if scenario.n() > FULL_TENSOR_MAX_N || scenario.m() > FULL_TENSOR_MAX_M {
        return Err(Error::ResourceLimitExceeded { n: scenario.n(), m: scenario.m() });
    }
    full_tensor_check_with(scenario, &anticommuting_set(scenario.m())?)
}

/// Same contract as [`run_sequence_with`], computed on the full register
/// `A_1 B_1 A_2 B_2 …` with joint Kraus operators
/// `M_{x⃗}^{a⃗} = ⊗_l (M^{a_l}_{x_l} ⊗ I)` summed over every setting and
/// outcome tuple of the relaying edges, and with each `J_i` expanded into its
/// `m^n` individual correlators.
pub fn full_tensor_check_with(scenario: &Scenario, set: &ObservableSet) -> Result<Vec<SequenceReport>> {
    scenario.validate()?;
    check_set(scenario, set)?;
    let (n, m, d) = (scenario.n(), scenario.m(), set.dim());
    if d.pow(2 * n as u32) > 64 {
        return Err(Error::ResourceLimitExceeded { n, m });
    }
    let bound = analytic::alpha(m)? as f64;
    let signs = rac_sign_matrix(m)?;
    let id = ComplexMatrix::identity(d);
    let pair = max_entangled_state(d)?;
    let mut rho = kron_all(std::iter::repeat_n(&pair, n));

    let mut reports = Vec::with_capacity(scenario.positions());
    for k in 1..=scenario.positions() {
        // Effect observables E⁺ − E⁻ of the k-th observer on every edge.
        let mut effect_obs: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(n);
        for edge in 0..n {
            let lambda = scenario.lambda(edge, k)?;
            let per_setting = set
                .iter()
                .map(|a| {
                    let (ep, em) = kraus(&UnsharpMeasurement::new(a.clone(), lambda)?)?.effects();
                    Ok(&ep - &em)
                })
                .collect::<Result<Vec<_>>>()?;
            effect_obs.push(per_setting);
        }

        let mut j_values = Vec::with_capacity(signs.len());
        for row in signs.rows() {
            let bob = bob_factor(row, set)?;
            let mut total = 0.0;
            for settings in tuples(m, n) {
                let factors: Vec<ComplexMatrix> = settings
                    .iter()
                    .enumerate()
                    .flat_map(|(edge, &x)| [effect_obs[edge][x].clone(), bob.clone()])
                    .collect();
                let op = kron_all(&factors);
                let sign: f64 = settings.iter().map(|&x| f64::from(row[x])).product();
                total += sign * op.trace_product(&rho)?.re;
            }
            j_values.push(total);
        }
        reports.push(SequenceReport::new(k, j_values, n, bound));

        if k < scenario.positions() {
            let relaying: Vec<usize> = (0..n).filter(|&e| scenario.is_sequenced(e)).collect();
            let local: Vec<Vec<ComplexMatrix>> = relaying
                .iter()
                .map(|&edge| {
                    let lambda = scenario.lambda(edge, k)?;
                    let mut ops = Vec::with_capacity(2 * m);
                    for a in set {
                        let kp = kraus(&UnsharpMeasurement::new(a.clone(), lambda)?)?;
                        ops.extend(Outcome::BOTH.map(|o| kp.operator(o).clone()));
                    }
                    Ok(ops)
                })
                .collect::<Result<_>>()?;
            let weight = (m as f64).powi(-(relaying.len() as i32));
            let mut next = ComplexMatrix::zeros(rho.dim());
            for choice in tuples(2 * m, relaying.len()) {
                let mut factors: Vec<ComplexMatrix> = Vec::with_capacity(2 * n);
                for edge in 0..n {
                    let alice = match relaying.iter().position(|&e| e == edge) {
                        Some(slot) => local[slot][choice[slot]].clone(),
                        None => id.clone(),
                    };
                    factors.push(alice);
                    factors.push(id.clone());
                }
                let joint = kron_all(&factors);
                let branch = &(&joint * &rho) * &joint.adjoint();
                next = &next + &branch.scale_real(weight);
            }
            rho = next;
        }
    }
    Ok(reports)
}

/// All `len`-tuples over `0..base`, lexicographic.
fn tuples(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = base.pow(len as u32);
    (0..count).map(move |mut idx| {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = idx % base;
            idx /= base;
        }
        digits
    })
}
