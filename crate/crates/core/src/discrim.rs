//! Minimum-error discrimination of pure-state ensembles.
//!
//! Three independent routes to the optimal success probability:
//!
//! - [`helstrom_pair`]: closed form for two states.
//! - [`pgm`]: the square-root ("pretty good") measurement, a lower bound that
//!   is tight for symmetric ensembles.
//! - [`povm_optimize`]: a fixed-point iteration on the optimality conditions
//!   with a dual certificate.
//!
//! Together with the trace bound `P ≤ d/N` they pin the optimum for the
//! four candidate states of the key agreement protocol at exactly 1/2, while
//! an inner-product device would identify them with certainty.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::qka::{candidate_states, oracle_inner_product, QubitPrep, TABLE_SEPARATION};
use crate::qmath::{
    difference_floor, hermitian_eig, inv_sqrt_scalar, sqrt_psd, ComplexMatrix, PINV_CUTOFF,
};
use crate::qsim::{DensityMatrix, Povm, StateVector, STATE_TOL};

/// Success at or above `1 - PERFECT_TOL` counts as perfect discrimination.
pub const PERFECT_TOL: f64 = 1e-9;

/// Allowed negativity in the dual feasibility check.
pub const CERTIFY_TOL: f64 = 1e-8;

pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest permitted distance between the three routes in [`lemma1_verdict`].
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Component of a state outside the average's support above which
/// [`pgm`] refuses the ensemble.
const SUPPORT_TOL: f64 = 1e-6;

/// Pure states with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    states: Vec<StateVector>,
    priors: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<StateVector>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != priors.len() {
            return Err(Error::InvalidProbabilities(format!(
                "{} states with {} priors",
                states.len(),
                priors.len()
            )));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        if let Some(p) = priors.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbabilities(format!("prior {p}")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "priors sum to {total}"
            )));
        }
        Ok(Self { states, priors })
    }

    pub fn equal(states: Vec<StateVector>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    fn weighted(&self) -> Vec<ComplexMatrix> {
        self.states
            .iter()
            .zip(&self.priors)
            .map(|(s, &p)| s.projector().scale_real(p))
            .collect()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn average(&self) -> ComplexMatrix {
        let d = self.dim();
        self.weighted()
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, w| &acc + w)
    }

    /// `Σ p_i ⟨ψ_i|M_i|ψ_i⟩`; elements past the ensemble length are ignored.
    pub fn success_probability(&self, povm: &Povm) -> f64 {
        self.states
            .iter()
            .zip(&self.priors)
            .zip(povm.elements())
            .map(|((s, &p), m)| p * (&(&s.to_column().adjoint() * m) * &s.to_column())[(0, 0)].re)
            .sum()
    }

    pub fn max_prior(&self) -> f64 {
        self.priors.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Helstrom,
    Pgm,
    Optimizer,
    Bound,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Helstrom => "helstrom",
            Method::Pgm => "pgm",
            Method::Optimizer => "optimizer",
            Method::Bound => "bound",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminationReport {
    pub ensemble: Ensemble,
    pub method: Method,
    /// Absent for [`Method::Bound`].
    pub povm: Option<Povm>,
    pub success_probability: f64,
    pub perfectly_distinguishable: bool,
    /// Optimizer iterations; zero for the closed forms.
    pub iterations: usize,
    /// Last change in success probability; zero for the closed forms.
    pub residual: f64,
    /// Whether the dual feasibility check passed. `None` when not evaluated.
    pub certified: Option<bool>,
}

impl DiscriminationReport {
    fn new(
        ensemble: Ensemble,
        method: Method,
        povm: Option<Povm>,
        success_probability: f64,
    ) -> Self {
        Self {
            ensemble,
            method,
            povm,
            success_probability,
            perfectly_distinguishable: success_probability >= 1.0 - PERFECT_TOL,
            iterations: 0,
            residual: 0.0,
            certified: None,
        }
    }
}

/// Optimal measurement for telling `a` (prior `p`) from `b` (prior `1 - p`).
#[derive(Clone, Debug, PartialEq)]
pub struct Helstrom {
    pub success_probability: f64,
    /// `[M_a, M_b]`: projector onto the positive part of `p·ρ_a − (1−p)·ρ_b`, and its complement.
    pub povm: Povm,
}

/// `1/2 (1 + ‖p·ρ_a − (1−p)·ρ_b‖₁)` for two density matrices.
pub fn helstrom_density(a: &DensityMatrix, b: &DensityMatrix, p: f64) -> Result<Helstrom> {
    helstrom_operators(a.operator(), b.operator(), p)
}

fn helstrom_operators(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<Helstrom> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.rows(),
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbabilities(format!("prior {p}")));
    }
    let (pa, qb) = (a.scale_real(p), b.scale_real(1.0 - p));
    let floor = difference_floor(&pa, &qb);
    let eig = hermitian_eig(&(&pa - &qb).hermitian_part())?;
    let positive = eig.map(|x| if x > floor { 1.0 } else { 0.0 });
    let rest = &ComplexMatrix::identity(a.rows()) - &positive;
    let norm = eig
        .values
        .iter()
        .map(|x| x.abs())
        .filter(|&x| x > floor)
        .sum::<f64>()
        + 0.0;
    Ok(Helstrom {
        success_probability: (0.5 * (1.0 + norm)).min(1.0),
        povm: Povm::new(vec![positive, rest])?,
    })
}

/// Closed-form optimum for two pure states.
pub fn helstrom_pair(a: &StateVector, b: &StateVector, p: f64) -> Result<DiscriminationReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let h = helstrom_operators(&a.projector(), &b.projector(), p)?;
    let ensemble = Ensemble::new(vec![a.clone(), b.clone()], vec![p, 1.0 - p])?;
    let mut report = DiscriminationReport::new(
        ensemble,
        Method::Helstrom,
        Some(h.povm),
        h.success_probability,
    );
    report.certified = Some(true);
    Ok(report)
}

/// Square-root measurement `M_i = ρ^{-1/2} p_i|ψ_i⟩⟨ψ_i| ρ^{-1/2}`, with the
/// projector off the support of `ρ` appended when `ρ` is rank deficient.
pub fn pgm(e: &Ensemble) -> Result<DiscriminationReport> {
    let d = e.dim();
    let eig = hermitian_eig(&e.average().hermitian_part())?;
    let s = eig.map(inv_sqrt_scalar);
    let support = eig.map(|x| if x > PINV_CUTOFF { 1.0 } else { 0.0 });
    let off_support = &ComplexMatrix::identity(d) - &support;

    for (i, (psi, &p)) in e.states().iter().zip(e.priors()).enumerate() {
        if p == 0.0 {
            continue;
        }
        let leak = &off_support * &psi.to_column();
        let leak_norm = Float::sqrt(leak.entries().iter().map(|z| z.norm_sqr()).sum::<f64>());
        if leak_norm > SUPPORT_TOL {
            return Err(Error::SupportViolation { index: i });
        }
    }

    let mut elements: Vec<ComplexMatrix> = e
        .weighted()
        .iter()
        .map(|w| (&(&s * w) * &s).hermitian_part())
        .collect();
    if off_support.trace().re > 0.5 {
        elements.push(off_support.hermitian_part());
    }
    let povm = Povm::new(elements)?;
    let success = e.success_probability(&povm);
    Ok(DiscriminationReport::new(
        e.clone(),
        Method::Pgm,
        Some(povm),
        success,
    ))
}

/// Dual check: `Λ = Herm(Σ_i p_i ρ_i M_i)` must dominate every `p_j ρ_j`.
/// Returns the most negative eigenvalue found (non-negative when feasible).
fn dual_shortfall(weighted: &[ComplexMatrix], elements: &[ComplexMatrix]) -> Result<f64> {
    let d = weighted[0].rows();
    let lambda = weighted
        .iter()
        .zip(elements)
        .fold(ComplexMatrix::zeros(d, d), |acc, (w, m)| &acc + &(w * m))
        .hermitian_part();
    let mut worst = f64::INFINITY;
    for w in weighted {
        worst = worst.min(hermitian_eig(&(&lambda - w).hermitian_part())?.min());
    }
    Ok(worst)
}

/// Fixed-point ascent for the minimum-error POVM.
///
/// Each step maps `M_j` to `A_j = p_jρ_j M_j p_jρ_j` and renormalizes
/// symmetrically, `M_j ← Σ^{-1/2} A_j Σ^{-1/2}` with `Σ = Σ_j A_j`. Stops once
/// the success probability moves by less than `tol`.
pub fn povm_optimize(e: &Ensemble, max_iters: usize, tol: f64) -> Result<DiscriminationReport> {
    let n = e.len();
    let d = e.dim();
    let weighted = e.weighted();
    let mut elements = vec![ComplexMatrix::identity(d).scale_real(1.0 / n as f64); n];
    let mut success = success_of(&weighted, &elements);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        // A_j = G_j G_j† with G_j = p_jρ_j M_j^{1/2}, so every update stays PSD.
        let factors: Vec<ComplexMatrix> = weighted
            .iter()
            .zip(&elements)
            .map(|(w, m)| Ok(w * &sqrt_psd(m)?))
            .collect::<Result<_>>()?;
        elements = symmetric_normalize(&factors)?;
        // Second pass on a near-identity sum restores completeness lost to conditioning.
        let factors: Vec<ComplexMatrix> = elements.iter().map(sqrt_psd).collect::<Result<_>>()?;
        elements = symmetric_normalize(&factors)?;

        let next = success_of(&weighted, &elements);
        residual = (next - success).abs();
        success = next;
        if residual < tol {
            break;
        }
    }

    let certified = dual_shortfall(&weighted, &elements)? >= -CERTIFY_TOL;
    let povm = Povm::new(elements)?;
    let mut report = DiscriminationReport::new(e.clone(), Method::Optimizer, Some(povm), success);
    report.iterations = iterations;
    report.residual = residual;
    report.certified = Some(certified);
    if residual >= tol {
        return Err(Error::NotConverged(alloc::boxed::Box::new(report)));
    }
    Ok(report)
}

/// `Σ^{-1/2} G_j G_j† Σ^{-1/2}` with `Σ = Σ_j G_j G_j†`, evaluated as an outer
/// product so the result is PSD. Directions outside the support of `Σ` are
/// shared out evenly; no state reaches them.
fn symmetric_normalize(factors: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let d = factors[0].rows();
    let n = factors.len();
    let sigma = factors
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, g| {
            &acc + &(g * &g.adjoint())
        })
        .hermitian_part();
    let scale = sigma.trace().re;
    let eig = hermitian_eig(&sigma.scale_real(1.0 / scale))?;
    let s = eig
        .map(inv_sqrt_scalar)
        .scale_real(1.0 / Float::sqrt(scale));
    let spare = (&ComplexMatrix::identity(d)
        - &eig.map(|x| if x > PINV_CUTOFF { 1.0 } else { 0.0 }))
        .scale_real(1.0 / n as f64);
    Ok(factors
        .iter()
        .map(|g| {
            let t = &s * g;
            &(&t * &t.adjoint()).hermitian_part() + &spare
        })
        .collect())
}

fn success_of(weighted: &[ComplexMatrix], elements: &[ComplexMatrix]) -> f64 {
    weighted
        .iter()
        .zip(elements)
        .map(|(w, m)| (w * m).trace().re)
        .sum()
}

/// Equal-prior ceiling `min(1, d/N)`: `Σ tr M_i = d` and each term is at most `tr M_i / N`.
pub fn perfect_discrimination_bound(num_states: usize, dim: usize) -> f64 {
    if num_states == 0 {
        return 1.0;
    }
    (dim as f64 / num_states as f64).min(1.0)
}

/// Outcome of the four-state impossibility check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// An inner-product device would beat the quantum optimum.
    Impossible,
    /// The device's implied success does not exceed the optimum.
    NotExcluded,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Impossible => "impossible",
            Verdict::NotExcluded => "not excluded",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Verdict {
    pub prep: QubitPrep,
    pub pgm: DiscriminationReport,
    /// Certified optimizer result; its success probability is the optimum.
    pub report: DiscriminationReport,
    pub bound: f64,
    /// Success an inner-product device would achieve: one guess per group of
    /// candidates sharing the same device reading.
    pub device_success: f64,
    pub verdict: Verdict,
}

impl Lemma1Verdict {
    pub fn success_probability(&self) -> f64 {
        self.report.success_probability
    }
}

/// Runs the PGM, the optimizer and the `d/N` ceiling on the four equiprobable
/// candidate states and checks that they agree.
pub fn lemma1_verdict(prep: &QubitPrep) -> Result<Lemma1Verdict> {
    let states = candidate_states(prep);
    let phi_d = prep.state();
    let readings: Vec<f64> = states
        .iter()
        .map(|s| oracle_inner_product(s, &phi_d).map(|o| o.value.abs()))
        .collect::<Result<_>>()?;
    let ensemble = Ensemble::equal(states.to_vec())?;

    let pgm_report = pgm(&ensemble)?;
    let report = povm_optimize(&ensemble, DEFAULT_MAX_ITERS, DEFAULT_TOL)?;
    let bound = perfect_discrimination_bound(ensemble.len(), ensemble.dim());

    let optimum = report.success_probability;
    if (pgm_report.success_probability - optimum).abs() > AGREEMENT_TOL
        || (bound - optimum).abs() > AGREEMENT_TOL
    {
        return Err(Error::SelfCheck(format!(
            "pgm {} / optimizer {} / bound {} disagree",
            pgm_report.success_probability, optimum, bound
        )));
    }
    if report.certified != Some(true) {
        return Err(Error::SelfCheck(
            "optimizer result failed the dual check".into(),
        ));
    }

    // Equal priors: the device guesses right once per distinct reading.
    let mut groups: Vec<f64> = Vec::new();
    for r in readings {
        if groups.iter().all(|g| (g - r).abs() >= TABLE_SEPARATION) {
            groups.push(r);
        }
    }
    let device_success = groups.len() as f64 / ensemble.len() as f64;
    let verdict = if device_success > optimum + AGREEMENT_TOL {
        Verdict::Impossible
    } else {
        Verdict::NotExcluded
    };

    Ok(Lemma1Verdict {
        prep: *prep,
        pgm: pgm_report,
        report,
        bound,
        device_success,
        verdict,
    })
}
