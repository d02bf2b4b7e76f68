//! The teleportation-based key agreement protocol, honest and with a
//! malicious Bob.
//!
//! Alice shares a singlet `|Ψ⁻⟩_ab` with Bob. Bob Bell-measures `b` together
//! with his qubit `c = α|0⟩ + β|1⟩`, which leaves Alice's qubit in one of four
//! Pauli images of `c`, and keeps the outcome as his two key bits. He sends a
//! copy `d` of `c` and Alice is supposed to learn her key from `⟨φ_a|φ_d⟩`.
//!
//! No physical device returns that inner product. [`oracle_inner_product`]
//! reads it off the simulator's amplitudes and every value it produces is
//! tagged unphysical.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::qmath::{pauli_x, pauli_z, r, ComplexMatrix, C64};
use crate::qsim::{
    apply_gate, branch, factor_out, make_bell, measure, BellLabel, Povm, RandomSource, StateVector,
    STATE_TOL,
};

/// Default tolerance for matching an inner product against the key table.
pub const KEY_TOL: f64 = 1e-6;

/// Minimum separation between key-table values (in absolute value).
pub const TABLE_SEPARATION: f64 = 1e-6;

/// Imaginary parts above this make an amplitude complex.
const REAL_TOL: f64 = 1e-12;

/// Bob's single-qubit preparation `α|0⟩ + β|1⟩` with real amplitudes.
///
/// This only guarantees a real unit vector; [`ProtocolParams`] adds the
/// key-table separation the protocol needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPrep {
    alpha: f64,
    beta: f64,
}

impl QubitPrep {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let norm_sqr = alpha * alpha + beta * beta;
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    /// `α = cos θ`, `β = sin θ`.
    pub fn from_theta(theta: f64) -> Self {
        Self {
            alpha: Float::cos(theta),
            beta: Float::sin(theta),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        Float::atan2(self.beta, self.alpha)
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_real(&[self.alpha, self.beta]).expect("normalized at construction")
    }

    /// `⟨φ_a|φ_d⟩` for each key, indexed by [`KeyBits::bits`]:
    /// `[1, α²−β², 2αβ, 0]`.
    pub fn table_values(&self) -> [f64; 4] {
        let (a, b) = (self.alpha, self.beta);
        [1.0, a * a - b * b, 2.0 * a * b, 0.0]
    }
}

/// Validated protocol parameters: a real preparation whose four key-table
/// values are pairwise distinguishable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    prep: QubitPrep,
}

const TABLE_NAMES: [&str; 4] = ["1", "α²−β²", "2αβ", "0"];

/// Checks normalization and that `{1, α²−β², 2αβ, 0}` are separated by at
/// least [`TABLE_SEPARATION`] in absolute value.
pub fn validate_params(alpha: f64, beta: f64) -> Result<ProtocolParams> {
    let prep = QubitPrep::new(alpha, beta)?;
    let values = prep.table_values();
    let mut collisions = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let gap = (values[i].abs() - values[j].abs()).abs();
            if gap < TABLE_SEPARATION {
                collisions.push(format!(
                    "{} = {:.6} collides with {} = {:.6} (keys {} and {})",
                    TABLE_NAMES[i],
                    values[i].abs(),
                    TABLE_NAMES[j],
                    values[j].abs(),
                    KeyBits(i as u8),
                    KeyBits(j as u8),
                ));
            }
        }
    }
    if !collisions.is_empty() {
        return Err(Error::DegenerateParams(collisions.join("; ")));
    }
    Ok(ProtocolParams { prep })
}

/// As [`validate_params`], for amplitudes that arrive as complex numbers.
pub fn validate_complex_params(alpha: C64, beta: C64) -> Result<ProtocolParams> {
    let imag = alpha.im.abs().max(beta.im.abs());
    if imag > REAL_TOL {
        return Err(Error::ComplexAmplitude { imag });
    }
    validate_params(alpha.re, beta.re)
}

impl ProtocolParams {
    pub fn from_theta(theta: f64) -> Result<Self> {
        let prep = QubitPrep::from_theta(theta);
        validate_params(prep.alpha, prep.beta)
    }

    pub fn prep(&self) -> &QubitPrep {
        &self.prep
    }

    pub fn alpha(&self) -> f64 {
        self.prep.alpha
    }

    pub fn beta(&self) -> f64 {
        self.prep.beta
    }

    pub fn theta(&self) -> f64 {
        self.prep.theta()
    }

    pub fn table_values(&self) -> [f64; 4] {
        self.prep.table_values()
    }

    pub fn table_value(&self, key: KeyBits) -> f64 {
        self.table_values()[key.bits() as usize]
    }
}

/// Two classical key bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyBits(u8);

impl KeyBits {
    pub const K00: KeyBits = KeyBits(0b00);
    pub const K01: KeyBits = KeyBits(0b01);
    pub const K10: KeyBits = KeyBits(0b10);
    pub const K11: KeyBits = KeyBits(0b11);
    pub const ALL: [KeyBits; 4] = [Self::K00, Self::K01, Self::K10, Self::K11];

    pub fn new(bits: u8) -> Option<Self> {
        (bits < 4).then_some(Self(bits))
    }

    /// Parses `"00"`, `"01"`, `"10"` or `"11"`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "00" => Some(Self::K00),
            "01" => Some(Self::K01),
            "10" => Some(Self::K10),
            "11" => Some(Self::K11),
            _ => None,
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl fmt::Display for KeyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

/// Bob's key for a Bell outcome on `(b, c)`.
pub fn key_for_outcome(label: BellLabel) -> KeyBits {
    match label {
        BellLabel::PsiMinus => KeyBits::K00,
        BellLabel::PsiPlus => KeyBits::K01,
        BellLabel::PhiMinus => KeyBits::K10,
        BellLabel::PhiPlus => KeyBits::K11,
    }
}

/// Which candidate state (0-based, `φ_a¹..φ_a⁴`) Alice holds after `label`.
pub fn candidate_for_outcome(label: BellLabel) -> usize {
    match label {
        BellLabel::PsiMinus => 0,
        BellLabel::PhiMinus => 1,
        BellLabel::PsiPlus => 2,
        BellLabel::PhiPlus => 3,
    }
}

/// Pauli correction that maps Alice's post-measurement qubit back to `φ_c`.
pub fn correction(label: BellLabel) -> ComplexMatrix {
    match label {
        BellLabel::PsiMinus => ComplexMatrix::identity(2),
        BellLabel::PsiPlus => pauli_z(),
        BellLabel::PhiMinus => pauli_x(),
        BellLabel::PhiPlus => &pauli_x() * &pauli_z(),
    }
}

/// `[φ_c, σ_x φ_c, σ_z φ_c, σ_z σ_x φ_c]`.
pub fn candidate_states(prep: &QubitPrep) -> [StateVector; 4] {
    let phi = prep.state();
    let x = apply_gate(&phi, &pauli_x(), &[0]).expect("Pauli X on one qubit");
    let z = apply_gate(&phi, &pauli_z(), &[0]).expect("Pauli Z on one qubit");
    let zx = apply_gate(&x, &pauli_z(), &[0]).expect("Pauli Z on one qubit");
    [phi, x, z, zx]
}

/// Output of the inner-product oracle. There is no measurement that
/// produces it; it exists to run the protocol as written.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: f64,
}

impl OracleValue {
    pub const UNPHYSICAL: bool = true;

    pub fn unphysical(&self) -> bool {
        Self::UNPHYSICAL
    }
}

/// `⟨alice|phi_d⟩` computed from the amplitudes. Both states must be real
/// single-qubit vectors.
pub fn oracle_inner_product(alice_state: &StateVector, phi_d: &StateVector) -> Result<OracleValue> {
    for s in [alice_state, phi_d] {
        if s.num_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: s.num_qubits(),
            });
        }
        let imag = s.max_imag();
        if imag > REAL_TOL {
            return Err(Error::ComplexAmplitude { imag });
        }
    }
    Ok(OracleValue {
        value: alice_state.inner(phi_d).re,
    })
}

/// Key whose table value matches `|v|` within `tol`.
pub fn key_from_value(v: f64, params: &ProtocolParams, tol: f64) -> Result<KeyBits> {
    let mut found = None;
    for (i, t) in params.table_values().iter().enumerate() {
        if (v.abs() - t.abs()).abs() <= tol {
            if found.is_some() {
                return Err(Error::Ambiguous { value: v });
            }
            found = Some(KeyBits(i as u8));
        }
    }
    found.ok_or(Error::Inconclusive { value: v })
}

/// Complete record of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub params: ProtocolParams,
    /// Seed of the run's random source; `None` for a forced branch.
    pub seed: Option<u64>,
    pub malicious: bool,
    /// Bob's chosen key in a malicious run.
    pub target: Option<KeyBits>,
    pub bell_outcome: BellLabel,
    /// Exact Born probability of `bell_outcome`.
    pub bell_probability: f64,
    /// Alice's qubit after Bob's measurement, phase fixed so its leading
    /// amplitude is real and positive.
    pub alice_state: StateVector,
    pub phi_d: StateVector,
    pub oracle: OracleValue,
    pub bob_key: KeyBits,
    pub alice_key: KeyBits,
}

impl Transcript {
    pub fn keys_agree(&self) -> bool {
        self.bob_key == self.alice_key
    }

    /// Fidelity with `φ_c` after applying the outcome's Pauli correction.
    pub fn teleportation_fidelity(&self) -> f64 {
        let corrected = apply_gate(&self.alice_state, &correction(self.bell_outcome), &[0])
            .expect("Pauli correction on one qubit");
        corrected.fidelity(&self.params.prep().state())
    }
}

struct BellStep {
    outcome: BellLabel,
    probability: f64,
    alice_state: StateVector,
}

/// Bob's Bell measurement: sampled, or pinned to one branch.
enum Outcome<'a> {
    Sampled(&'a mut RandomSource),
    Forced(BellLabel),
}

/// Singlet on `(a, b)`, `φ_c` on `c`, Bell measurement on `(b, c)`.
fn bell_step(params: &ProtocolParams, outcome: Outcome<'_>) -> Result<BellStep> {
    let composite = make_bell(BellLabel::PsiMinus).tensor(&params.prep().state());
    let bell = Povm::bell();
    let (label, probability, post) = match outcome {
        Outcome::Sampled(rng) => {
            let m = measure(&composite, &bell, &[1, 2], rng)?;
            (BellLabel::ALL[m.outcome], m.probability, m.post_state)
        }
        Outcome::Forced(label) => {
            let (p, post) = branch(&composite, &bell, &[1, 2], label.index())?;
            (label, p, post)
        }
    };
    let alice_state = factor_out(&post, &[1, 2], &make_bell(label))?.with_canonical_phase();
    Ok(BellStep {
        outcome: label,
        probability,
        alice_state,
    })
}

fn honest(params: &ProtocolParams, step: BellStep, seed: Option<u64>) -> Result<Transcript> {
    let phi_d = params.prep().state();
    let oracle = oracle_inner_product(&step.alice_state, &phi_d)?;
    let alice_key = key_from_value(oracle.value, params, KEY_TOL)?;
    Ok(Transcript {
        params: *params,
        seed,
        malicious: false,
        target: None,
        bell_outcome: step.outcome,
        bell_probability: step.probability,
        alice_state: step.alice_state,
        phi_d,
        oracle,
        bob_key: key_for_outcome(step.outcome),
        alice_key,
    })
}

/// One honest run: `φ_d = φ_c`, both parties derive their keys.
pub fn run_honest(params: &ProtocolParams, rng: &mut RandomSource) -> Result<Transcript> {
    let seed = rng.seed();
    let step = bell_step(params, Outcome::Sampled(rng))?;
    honest(params, step, Some(seed))
}

/// The honest run conditioned on Bob obtaining `outcome`.
pub fn honest_branch(params: &ProtocolParams, outcome: BellLabel) -> Result<Transcript> {
    honest(params, bell_step(params, Outcome::Forced(outcome))?, None)
}

/// Bob measures first, then prepares `φ_d′ = v·φ_a + √(1−v²)·φ_a⊥` with `v`
/// the table value of `target`, so Alice's oracle reads `v`.
pub fn run_malicious_bob(
    params: &ProtocolParams,
    target: KeyBits,
    rng: &mut RandomSource,
) -> Result<Transcript> {
    let seed = rng.seed();
    let step = bell_step(params, Outcome::Sampled(rng))?;
    let v = params.table_value(target);
    let a = step.alice_state.amplitudes();
    let (a0, a1) = (a[0].re, a[1].re);
    let w = Float::sqrt((1.0 - v * v).max(0.0));
    let phi_d = StateVector::normalized([r(v * a0 - w * a1), r(v * a1 + w * a0)].into())?;
    let oracle = oracle_inner_product(&step.alice_state, &phi_d)?;
    let alice_key = key_from_value(oracle.value, params, KEY_TOL)?;
    Ok(Transcript {
        params: *params,
        seed: Some(seed),
        malicious: true,
        target: Some(target),
        bell_outcome: step.outcome,
        bell_probability: step.probability,
        alice_state: step.alice_state,
        phi_d,
        oracle,
        bob_key: target,
        alice_key,
    })
}

/// Human-readable name of a key-table entry, e.g. `"2αβ"`.
pub fn table_entry_name(key: KeyBits) -> String {
    TABLE_NAMES[key.bits() as usize].into()
}
