//! Pure states, density matrices, measurements and the seeded randomness
//! that drives sampling.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. For the protocol that makes particle `a` qubit 0, `b` qubit 1
//! and `c` qubit 2.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_traits::{Float, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::qmath::{hermitian_eig, r, trace_norm_of_difference, ComplexMatrix, C64};

/// Tolerance for unit norm, unit trace, PSD and POVM completeness checks.
pub const STATE_TOL: f64 = 1e-10;

/// Amplitudes below this modulus are ignored when fixing a global phase.
const PHASE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps `2^n` amplitudes, rejecting anything not unit-norm within [`STATE_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { num_qubits, amps })
    }

    /// Scales the amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let inv = 1.0 / Float::sqrt(norm_sqr);
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { num_qubits, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| r(x)).collect())
    }

    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::zero(); 1 << num_qubits];
        amps[index] = r(1.0);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `⟨self|other⟩`; zero for mismatched dimensions is not meaningful, so this panics.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "inner product of mismatched states"
        );
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    pub fn to_column(&self) -> ComplexMatrix {
        ComplexMatrix::column(&self.amps)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        let col = self.to_column();
        &col * &col.adjoint()
    }

    /// Largest `|Im a_i|`.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Same ray, with the first non-negligible amplitude made real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let Some(lead) = self.amps.iter().position(|a| a.norm() > PHASE_EPS) else {
            return self.clone();
        };
        let phase = (self.amps[lead] / self.amps[lead].norm()).conj();
        let mut amps: Vec<C64> = self.amps.iter().map(|a| a * phase).collect();
        // drop rounding residue on the amplitude that is real by construction
        amps[lead] = r(self.amps[lead].norm());
        Self {
            num_qubits: self.num_qubits,
            amps,
        }
    }
}

fn qubits_for_dim(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadAmplitudeCount { len });
    }
    Ok(len.trailing_zeros() as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    op: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(op: ComplexMatrix) -> Result<Self> {
        if !op.is_square() {
            return Err(Error::NotSquare {
                rows: op.rows(),
                cols: op.cols(),
            });
        }
        let num_qubits = qubits_for_dim(op.rows())?;
        let eig = hermitian_eig(&op)?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        if eig.min() < -STATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {}",
                eig.min()
            )));
        }
        Ok(Self { num_qubits, op })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            num_qubits: state.num_qubits(),
            op: state.projector(),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            num_qubits,
            op: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.op.rows()
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.op
    }
}

/// Finite set of positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidPovm("no elements".into()));
        };
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: e.rows().max(e.cols()),
                });
            }
            let eig = hermitian_eig(e)?;
            if eig.min() < -STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has negative eigenvalue {}",
                    eig.min()
                )));
            }
            sum = &sum + e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > STATE_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Rank-one projectors onto an orthonormal basis.
    pub fn from_orthonormal(states: &[StateVector]) -> Result<Self> {
        Self::new(states.iter().map(StateVector::projector).collect())
    }

    pub fn computational(num_qubits: usize) -> Self {
        let states: Vec<_> = (0..1 << num_qubits)
            .map(|i| StateVector::basis(num_qubits, i))
            .collect();
        Self {
            elements: states.iter().map(StateVector::projector).collect(),
        }
    }

    /// Bell-basis measurement; outcome `k` is `BellLabel::ALL[k]`.
    pub fn bell() -> Self {
        Self {
            elements: BellLabel::ALL
                .iter()
                .map(|&l| make_bell(l).projector())
                .collect(),
        }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Every element idempotent within [`STATE_TOL`].
    pub fn is_projective(&self) -> bool {
        self.elements
            .iter()
            .all(|e| (e * e).approx_eq(e, STATE_TOL))
    }
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    /// Bell basis order: Φ+, Φ−, Ψ+, Ψ−.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`.
pub fn make_bell(label: BellLabel) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let amps = match label {
        BellLabel::PhiPlus => [h, 0.0, 0.0, h],
        BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
        BellLabel::PsiPlus => [0.0, h, h, 0.0],
        BellLabel::PsiMinus => [0.0, h, -h, 0.0],
    };
    StateVector {
        num_qubits: 2,
        amps: amps.iter().map(|&x| r(x)).collect(),
    }
}

/// Seeded uniform `[0, 1)` stream. Identical seeds give bit-identical draws.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent source for the `index`-th unit of work under `master`.
    pub fn child(master: u64, index: u64) -> Self {
        Self::new(child_seed(master, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// SplitMix64 finalizer over `(master, index)`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidQubits("empty target list".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::InvalidQubits(format!(
                "qubit {t} out of range for {num_qubits} qubits"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidQubits(format!("qubit {t} repeated")));
        }
    }
    Ok(())
}

#[inline]
fn bit_of(index: usize, qubit: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - qubit)) & 1
}

/// Index into the target register; `targets[0]` is its most significant bit.
fn sub_index(index: usize, targets: &[usize], num_qubits: usize) -> usize {
    targets
        .iter()
        .fold(0, |acc, &t| (acc << 1) | bit_of(index, t, num_qubits))
}

fn with_sub_index(index: usize, targets: &[usize], num_qubits: usize, sub: usize) -> usize {
    let k = targets.len();
    targets.iter().enumerate().fold(index, |acc, (pos, &t)| {
        let shift = num_qubits - 1 - t;
        let bit = (sub >> (k - 1 - pos)) & 1;
        (acc & !(1 << shift)) | (bit << shift)
    })
}

/// `(op on targets ⊗ I elsewhere)|ψ⟩`, unnormalized.
fn apply_operator(
    amps: &[C64],
    num_qubits: usize,
    op: &ComplexMatrix,
    targets: &[usize],
) -> Vec<C64> {
    let sub_dim = 1usize << targets.len();
    let mut out = vec![C64::zero(); amps.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let row = sub_index(i, targets, num_qubits);
        for col in 0..sub_dim {
            let g = op[(row, col)];
            if g.is_zero() {
                continue;
            }
            *slot += g * amps[with_sub_index(i, targets, num_qubits, col)];
        }
    }
    out
}

fn check_operator_dim(op: &ComplexMatrix, targets: &[usize]) -> Result<()> {
    let expected = 1usize << targets.len();
    if op.rows() != expected || op.cols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: op.rows().max(op.cols()),
        });
    }
    Ok(())
}

/// Applies a unitary to `targets`, identity elsewhere.
pub fn apply_gate(
    state: &StateVector,
    gate: &ComplexMatrix,
    targets: &[usize],
) -> Result<StateVector> {
    check_targets(state.num_qubits, targets)?;
    check_operator_dim(gate, targets)?;
    let deviation = gate.unitarity_deviation();
    if deviation > STATE_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    StateVector::normalized(apply_operator(&state.amps, state.num_qubits, gate, targets))
}

fn check_measurement(state: &StateVector, povm: &Povm, targets: &[usize]) -> Result<()> {
    check_targets(state.num_qubits, targets)?;
    let expected = 1usize << targets.len();
    if povm.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: povm.dim(),
        });
    }
    Ok(())
}

/// Born probabilities `⟨ψ|(E_k ⊗ I)|ψ⟩` for every outcome.
pub fn outcome_probabilities(
    state: &StateVector,
    povm: &Povm,
    targets: &[usize],
) -> Result<Vec<f64>> {
    check_measurement(state, povm, targets)?;
    Ok(povm
        .elements()
        .iter()
        .map(|e| {
            let image = apply_operator(&state.amps, state.num_qubits, e, targets);
            let p: C64 = state
                .amps
                .iter()
                .zip(&image)
                .map(|(a, b)| a.conj() * b)
                .sum();
            p.re.max(0.0)
        })
        .collect())
}

fn sample_index(probs: &[f64], rng: &mut RandomSource) -> usize {
    let u = rng.next_f64();
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p / total;
        if u < acc {
            return k;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Samples an outcome without computing a post-measurement state; any POVM is allowed.
pub fn sample_outcome(
    state: &StateVector,
    povm: &Povm,
    targets: &[usize],
    rng: &mut RandomSource,
) -> Result<(usize, f64)> {
    let probs = outcome_probabilities(state, povm, targets)?;
    let k = sample_index(&probs, rng);
    Ok((k, probs[k]))
}

/// Result of a projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    pub post_state: StateVector,
    /// Exact Born probability of `outcome`.
    pub probability: f64,
}

/// Deterministic branch of a projective measurement: the Born probability of
/// `outcome` and the normalized projected state.
pub fn branch(
    state: &StateVector,
    povm: &Povm,
    targets: &[usize],
    outcome: usize,
) -> Result<(f64, StateVector)> {
    check_measurement(state, povm, targets)?;
    if !povm.is_projective() {
        return Err(Error::NotProjective);
    }
    let e = povm
        .elements()
        .get(outcome)
        .ok_or_else(|| Error::InvalidPovm(format!("no outcome {outcome}")))?;
    let projected = apply_operator(&state.amps, state.num_qubits, e, targets);
    let p: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
    Ok((p, StateVector::normalized(projected)?))
}

/// Samples a projective measurement on `targets` and collapses the state.
pub fn measure(
    state: &StateVector,
    povm: &Povm,
    targets: &[usize],
    rng: &mut RandomSource,
) -> Result<Measurement> {
    check_measurement(state, povm, targets)?;
    if !povm.is_projective() {
        return Err(Error::NotProjective);
    }
    let probs = outcome_probabilities(state, povm, targets)?;
    let outcome = sample_index(&probs, rng);
    let (probability, post_state) = branch(state, povm, targets, outcome)?;
    Ok(Measurement {
        outcome,
        post_state,
        probability,
    })
}

/// Contracts `⟨factor|` against `targets` and returns the normalized state of
/// the remaining qubits, in increasing qubit order.
pub fn factor_out(
    state: &StateVector,
    targets: &[usize],
    factor: &StateVector,
) -> Result<StateVector> {
    check_targets(state.num_qubits, targets)?;
    if factor.num_qubits != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            actual: factor.num_qubits,
        });
    }
    if targets.len() == state.num_qubits {
        return Err(Error::InvalidQubits(
            "nothing left after contraction".into(),
        ));
    }
    let n = state.num_qubits;
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let mut amps = vec![C64::zero(); 1 << rest.len()];
    for (i, a) in state.amps.iter().enumerate() {
        let f = factor.amps[sub_index(i, targets, n)];
        amps[sub_index(i, &rest, n)] += f.conj() * a;
    }
    StateVector::normalized(amps)
}

/// Partial trace over every qubit not in `keep`; `keep` order sets the output factor order.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    check_targets(state.num_qubits, keep)?;
    let n = state.num_qubits;
    let d = 1usize << keep.len();
    let mut op = ComplexMatrix::zeros(d, d);
    for (i, a) in state.amps.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let row = sub_index(i, keep, n);
        for col in 0..d {
            let j = with_sub_index(i, keep, n, col);
            op[(row, col)] += a * state.amps[j].conj();
        }
    }
    DensityMatrix::new(op.hermitian_part())
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|`.
pub fn ensemble_density(members: &[(f64, StateVector)]) -> Result<DensityMatrix> {
    let Some((_, first)) = members.first() else {
        return Err(Error::InvalidProbabilities("empty ensemble".into()));
    };
    let d = first.dim();
    let mut total = 0.0;
    let mut op = ComplexMatrix::zeros(d, d);
    for (p, psi) in members {
        if !p.is_finite() || *p < 0.0 {
            return Err(Error::InvalidProbabilities(format!("probability {p}")));
        }
        if psi.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: psi.dim(),
            });
        }
        total += p;
        op = &op + &psi.projector().scale_real(*p);
    }
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidProbabilities(format!(
            "probabilities sum to {total}"
        )));
    }
    DensityMatrix::new(op)
}

/// `(1/2)‖a − b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok((0.5 * trace_norm_of_difference(a.operator(), b.operator())?).min(1.0))
}
