//! Bob measures his half of a singlet in one of two bases built from the
//! candidate states; Alice's reduced state is `I/2` either way.
//!
//! A device that told the four candidate states apart would let Alice read
//! Bob's basis choice off her own qubit, which is signalling.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use crate::discrim::helstrom_density;
use crate::error::{Error, Result};
use crate::qka::{candidate_states, QubitPrep};
use crate::qmath::r;
use crate::qsim::{
    branch, ensemble_density, factor_out, make_bell, trace_distance, BellLabel, DensityMatrix,
    Povm, StateVector,
};

/// Trace distance below which the two remote ensembles count as identical.
pub const NO_SIGNAL_TOL: f64 = 1e-12;

/// Fidelity above which the hypothetical device names a candidate state.
const IDENTIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    /// `{φ_a¹, φ_a⁴}`
    M1,
    /// `{φ_a², φ_a³}`
    M2,
}

impl BasisLabel {
    pub fn name(self) -> &'static str {
        match self {
            BasisLabel::M1 => "M1",
            BasisLabel::M2 => "M2",
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bob's measurement: a labelled orthonormal pair and its projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisChoice {
    pub label: BasisLabel,
    states: [StateVector; 2],
    povm: Povm,
}

impl BasisChoice {
    pub fn new(label: BasisLabel, first: StateVector, second: StateVector) -> Result<Self> {
        if first.num_qubits() != 1 || second.num_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: first.num_qubits().max(second.num_qubits()),
            });
        }
        let povm = Povm::from_orthonormal(&[first.clone(), second.clone()])?;
        Ok(Self {
            label,
            states: [first, second],
            povm,
        })
    }

    pub fn m1(prep: &QubitPrep) -> Self {
        let [p1, _, _, p4] = candidate_states(prep);
        Self::new(BasisLabel::M1, p1, p4).expect("φ_a¹ ⟂ φ_a⁴")
    }

    pub fn m2(prep: &QubitPrep) -> Self {
        let [_, p2, p3, _] = candidate_states(prep);
        Self::new(BasisLabel::M2, p2, p3).expect("φ_a² ⟂ φ_a³")
    }

    pub fn states(&self) -> &[StateVector; 2] {
        &self.states
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }
}

/// `(|ψ⟩|ψ̄⟩ − |ψ̄⟩|ψ⟩)/√2` with `ψ̄ = (−β*, α*)` orthogonal to `ψ = (α, β)`.
pub fn singlet_in_basis(psi: &StateVector) -> Result<StateVector> {
    if psi.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: psi.num_qubits(),
        });
    }
    let a = psi.amplitudes();
    let perp = StateVector::new([-a[1].conj(), a[0].conj()].into())?;
    let fwd = psi.tensor(&perp);
    let bwd = perp.tensor(psi);
    let amps = fwd
        .amplitudes()
        .iter()
        .zip(bwd.amplitudes())
        .map(|(x, y)| (x - y) * r(FRAC_1_SQRT_2))
        .collect();
    StateVector::normalized(amps)
}

/// Alice's side after Bob measures qubit 1 of `|Ψ⁻⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct RemoteEnsemble {
    pub density: DensityMatrix,
    /// `(probability, Alice's conditional state)` per Bob outcome.
    pub branches: Vec<(f64, StateVector)>,
}

pub fn remote_ensemble(basis: &BasisChoice) -> Result<RemoteEnsemble> {
    let singlet = make_bell(BellLabel::PsiMinus);
    let branches = basis
        .states
        .iter()
        .enumerate()
        .map(|(k, bob)| {
            let (p, post) = branch(&singlet, &basis.povm, &[1], k)?;
            Ok((p, factor_out(&post, &[1], bob)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RemoteEnsemble {
        density: ensemble_density(&branches)?,
        branches,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoSignalReport {
    pub theta: f64,
    /// Alice's state when Bob measures in M1.
    pub rho14: DensityMatrix,
    /// Alice's state when Bob measures in M2.
    pub rho23: DensityMatrix,
    pub trace_distance: f64,
    /// Best probability of telling the two preparations apart, equal priors.
    pub helstrom_success: f64,
    /// Probability that a perfect four-state discriminator in Alice's hands
    /// names Bob's basis correctly, with Bob choosing uniformly.
    pub device_basis_identification: f64,
}

impl NoSignalReport {
    pub fn no_signalling_upheld(&self) -> bool {
        self.trace_distance < NO_SIGNAL_TOL && (self.helstrom_success - 0.5).abs() < NO_SIGNAL_TOL
    }

    /// The device beats guessing, so it would carry Bob's choice to Alice.
    pub fn device_would_signal(&self) -> bool {
        self.device_basis_identification > 0.5 + IDENTIFY_TOL
    }

    pub fn verdict(&self) -> &'static str {
        match (self.no_signalling_upheld(), self.device_would_signal()) {
            (true, true) => "no signalling upheld; hypothetical device would signal",
            (true, false) => "no signalling upheld",
            (false, _) => "signalling detected",
        }
    }
}

pub fn nosignal_report(prep: &QubitPrep) -> Result<NoSignalReport> {
    let bases = [BasisChoice::m1(prep), BasisChoice::m2(prep)];
    let [e14, e23] = [remote_ensemble(&bases[0])?, remote_ensemble(&bases[1])?];
    let trace_distance = trace_distance(&e14.density, &e23.density)?;
    let helstrom_success = helstrom_density(&e14.density, &e23.density, 0.5)?.success_probability;

    let candidates = candidate_states(prep);
    let mut device_basis_identification = 0.0;
    for (basis, ensemble) in bases.iter().zip([&e14, &e23]) {
        for (p, alice) in &ensemble.branches {
            let named = candidates
                .iter()
                .position(|c| c.fidelity(alice) >= 1.0 - IDENTIFY_TOL);
            let inferred = match named {
                Some(0 | 3) => Some(BasisLabel::M1),
                Some(_) => Some(BasisLabel::M2),
                None => None,
            };
            if inferred == Some(basis.label) {
                device_basis_identification += 0.5 * p;
            }
        }
    }

    Ok(NoSignalReport {
        theta: prep.theta(),
        rho14: e14.density,
        rho23: e23.density,
        trace_distance,
        helstrom_success,
        device_basis_identification,
    })
}
