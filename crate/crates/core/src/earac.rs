//! Entanglement-assisted random access codes as a Bell functional.
//!
//! Alice holds x = (x_1, …, x_{n−1}) as her setting and sends m = a + x_0;
//! Bob outputs m + b. Averaging over x_0 leaves the linear game
//! "a + b ≡ target(x, y) (mod d)" with target(x, 0) = 0 and
//! target(x, y) = x_y for y ≥ 1. At (n, d) = (2, 2) this is CHSH.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Ket};
use crate::measurement::{MeasurementFamily, Povm};
use crate::qudit::{self, root_of_unity, wrap, ShiftConvention};
use crate::scenario::{digits, Scenario};
use crate::tolerance;

/// The Bell game attached to an n^(d)→1 scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellRacInstance {
    pub scenario: Scenario,
}

impl BellRacInstance {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario }
    }

    /// d^{n−1}.
    pub fn alice_settings(&self) -> usize {
        self.scenario.d.pow(self.scenario.n as u32 - 1)
    }

    /// n.
    pub fn bob_settings(&self) -> usize {
        self.scenario.n
    }

    pub fn outcomes(&self) -> usize {
        self.scenario.d
    }

    /// 1/(n d^{n−1}).
    pub fn normalization(&self) -> f64 {
        1.0 / (self.bob_settings() * self.alice_settings()) as f64
    }

    /// Required value of (a + b) mod d for settings (x, y).
    pub fn target(&self, x: usize, y: usize) -> usize {
        if y == 0 {
            0
        } else {
            digits(x, self.scenario.n - 1, self.scenario.d)[y - 1]
        }
    }
}

/// Shared pure state plus both parties' measurement families.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteStrategy {
    pub state: Ket,
    pub dim_a: usize,
    pub dim_b: usize,
    pub alice: MeasurementFamily,
    pub bob: MeasurementFamily,
}

impl BipartiteStrategy {
    pub fn validate(&self, inst: &BellRacInstance) -> Result<()> {
        if self.dim_a == 0 || self.dim_b == 0 || self.state.dim() != self.dim_a * self.dim_b {
            return Err(Error::contract(format!(
                "state of dimension {} does not match local dimensions {}x{}",
                self.state.dim(),
                self.dim_a,
                self.dim_b
            )));
        }
        if !self.state.is_normalized(tolerance::ALGEBRA) {
            return Err(Error::contract(format!(
                "state not normalized (norm² = {})",
                self.state.norm_sqr()
            )));
        }
        let d = inst.outcomes();
        self.alice
            .validate_shape(inst.alice_settings(), d, self.dim_a)?;
        self.bob.validate_shape(inst.bob_settings(), d, self.dim_b)
    }

    /// Amplitudes ψ_{ik} of the state as a dA×dB matrix.
    pub fn state_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.dim_a, self.dim_b, self.state.amplitudes().to_vec())
            .expect("validated state dimension")
    }

    /// Applies local unitaries U ⊗ V to the state and conjugates every
    /// measurement operator accordingly.
    pub fn locally_rotated(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Self {
        Self {
            state: u.kron(v).apply(&self.state),
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            alice: self.alice.conjugated(u),
            bob: self.bob.conjugated(v),
        }
    }
}

/// P(a, b | x, y) stored densely, indexed (x, y, a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    alice_settings: usize,
    bob_settings: usize,
    outcomes: usize,
    data: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(alice_settings: usize, bob_settings: usize, outcomes: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != alice_settings * bob_settings * outcomes * outcomes {
            return Err(Error::contract("probability table has the wrong size"));
        }
        Ok(Self {
            alice_settings,
            bob_settings,
            outcomes,
            data,
        })
    }

    /// Every cell 1/d².
    pub fn uniform(alice_settings: usize, bob_settings: usize, outcomes: usize) -> Self {
        let p = 1.0 / (outcomes * outcomes) as f64;
        Self {
            alice_settings,
            bob_settings,
            outcomes,
            data: vec![p; alice_settings * bob_settings * outcomes * outcomes],
        }
    }

    pub fn alice_settings(&self) -> usize {
        self.alice_settings
    }

    pub fn bob_settings(&self) -> usize {
        self.bob_settings
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    fn offset(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let d = self.outcomes;
        ((x * self.bob_settings + y) * d + a) * d + b
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.data[self.offset(x, y, a, b)]
    }

    /// Σ_b P(a, b | x, y).
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        (0..self.outcomes).map(|b| self.get(x, y, a, b)).sum()
    }

    /// Σ_a P(a, b | x, y).
    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        (0..self.outcomes).map(|a| self.get(x, y, a, b)).sum()
    }

    /// Worst negative entry and worst normalization defect.
    pub fn normalization_defects(&self) -> (f64, f64) {
        let min = self.data.iter().copied().fold(f64::INFINITY, f64::min);
        let mut worst = 0.0_f64;
        for x in 0..self.alice_settings {
            for y in 0..self.bob_settings {
                let s: f64 = (0..self.outcomes)
                    .map(|a| self.alice_marginal(x, y, a))
                    .sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        (min, worst)
    }

    /// Largest violation of no-signalling in either direction.
    pub fn signalling_defect(&self) -> f64 {
        let d = self.outcomes;
        let mut worst = 0.0_f64;
        for x in 0..self.alice_settings {
            for a in 0..d {
                let ref_val = self.alice_marginal(x, 0, a);
                for y in 1..self.bob_settings {
                    worst = worst.max((self.alice_marginal(x, y, a) - ref_val).abs());
                }
            }
        }
        for y in 0..self.bob_settings {
            for b in 0..d {
                let ref_val = self.bob_marginal(0, y, b);
                for x in 1..self.alice_settings {
                    worst = worst.max((self.bob_marginal(x, y, b) - ref_val).abs());
                }
            }
        }
        worst
    }
}

/// P(a, b | x, y) = ⟨ψ| A_x^a ⊗ B_y^b |ψ⟩, evaluated as Tr(Ψ† A Ψ Bᵀ) with Ψ
/// the dA×dB amplitude matrix of the state.
pub fn probability_table(inst: &BellRacInstance, s: &BipartiteStrategy) -> Result<ProbabilityTable> {
    s.validate(inst)?;
    Ok(probability_table_unchecked(inst, s))
}

pub(crate) fn probability_table_unchecked(inst: &BellRacInstance, s: &BipartiteStrategy) -> ProbabilityTable {
    let d = inst.outcomes();
    let (na, nb) = (inst.alice_settings(), inst.bob_settings());
    let psi = s.state_matrix();
    let psi_dag = psi.adjoint();
    let cells: Vec<Vec<f64>> = (0..na)
        .into_par_iter()
        .map(|x| {
            let reduced: Vec<ComplexMatrix> = (0..d)
                .map(|a| psi_dag.matmul(s.alice.element(x, a)).matmul(&psi))
                .collect();
            let mut out = Vec::with_capacity(nb * d * d);
            for y in 0..nb {
                for m in &reduced {
                    for b in 0..d {
                        // Tr(M Bᵀ) = Σ_kl M_kl B_kl
                        let bm = s.bob.element(y, b);
                        let v: Complex64 = m
                            .entries()
                            .iter()
                            .zip(bm.entries())
                            .map(|(u, w)| u * w)
                            .sum();
                        out.push(v.re);
                    }
                }
            }
            out
        })
        .collect();
    ProbabilityTable {
        alice_settings: na,
        bob_settings: nb,
        outcomes: d,
        data: cells.into_iter().flatten().collect(),
    }
}

/// The RAC success probability: normalized sum of P(a + b ≡ target | x, y).
pub fn bell_rac_value(inst: &BellRacInstance, t: &ProbabilityTable) -> Result<f64> {
    check_table(inst, t)?;
    Ok(displacement_probability(inst, t, 0))
}

fn check_table(inst: &BellRacInstance, t: &ProbabilityTable) -> Result<()> {
    if t.alice_settings != inst.alice_settings()
        || t.bob_settings != inst.bob_settings()
        || t.outcomes != inst.outcomes()
    {
        return Err(Error::contract(format!(
            "table shape ({}, {}, {}) does not match instance {}",
            t.alice_settings, t.bob_settings, t.outcomes, inst.scenario
        )));
    }
    Ok(())
}

/// Average probability that a + b ≡ target + k.
pub(crate) fn displacement_probability(inst: &BellRacInstance, t: &ProbabilityTable, k: usize) -> f64 {
    let d = inst.outcomes();
    let mut total = 0.0;
    for x in 0..inst.alice_settings() {
        for y in 0..inst.bob_settings() {
            let want = inst.target(x, y) + k;
            for a in 0..d {
                let b = wrap(want as i64 - a as i64, d);
                total += t.get(x, y, a, b);
            }
        }
    }
    total * inst.normalization()
}

/// The rank-one 3×3 operator A_0^0 of the explicit 2^(3)→1 strategy, built
/// from closed-form entries (rationals and √3). Entry (k, k') is λ_{k,k'}.
pub fn explicit_a00() -> ComplexMatrix {
    let r3 = 3f64.sqrt();
    let c = Complex64::new;
    let omega = c(-0.5, r3 / 2.0);
    let entries = vec![
        c(7.0 / 9.0, 0.0),
        -c(1.0, -3.0 * r3) / 18.0,
        -c(2.0, r3) / 9.0,
        -c(1.0, 3.0 * r3) / 18.0,
        c(1.0 / 9.0, 0.0),
        omega / 9.0,
        c(-2.0, r3) / 9.0,
        omega * omega / 9.0,
        c(1.0 / 9.0, 0.0),
    ];
    ComplexMatrix::from_vec(3, 3, entries).expect("3x3")
}

/// A_x^a = U A_0^0 U† with U = X^a Z^{a−x}, X the raising shift.
pub fn explicit_alice_family() -> MeasurementFamily {
    let a00 = explicit_a00();
    let x_op = qudit::shift_operator(3, ShiftConvention::Raise).expect("d = 3");
    let z_op = qudit::clock_operator(3).expect("d = 3");
    let povms = (0..3)
        .map(|x| {
            Povm::new(
                (0..3)
                    .map(|a| {
                        let u = x_op.pow(a).matmul(&z_op.pow(wrap(a as i64 - x as i64, 3)));
                        a00.conjugate_by(&u)
                    })
                    .collect(),
            )
        })
        .collect();
    MeasurementFamily::new(povms)
}

/// Relabeling offset of Bob's Fourier measurement: B_1^b = |e_{b+s}⟩⟨e_{b+s}|.
pub const BOB_FOURIER_OFFSET: usize = 1;

/// B_0^b = |b⟩⟨b| and B_1^b = |e_{b+1}⟩⟨e_{b+1}|.
///
/// With A_0^0 as given, the offset s = 1 is the one that aligns Bob's
/// Fourier outcomes with Alice's conjugated family; s = 2 leaves the
/// y = 1 correlations peaked at a + b ≡ x − 1 and the value drops to 4/9.
pub fn explicit_bob_family() -> MeasurementFamily {
    bob_family_with_offset(BOB_FOURIER_OFFSET)
}

pub fn bob_family_with_offset(offset: usize) -> MeasurementFamily {
    let computational: Vec<Ket> = (0..3).map(|b| Ket::basis(3, b)).collect();
    let fourier: Vec<Ket> = (0..3)
        .map(|b| qudit::fourier_ket(3, (b + offset) % 3).expect("in range"))
        .collect();
    MeasurementFamily::new(vec![
        Povm::projective(&computational),
        Povm::projective(&fourier),
    ])
}

pub fn explicit_23_instance() -> BellRacInstance {
    BellRacInstance::new(Scenario { n: 2, d: 3 })
}

/// The explicit 2^(3)→1 strategy on the maximally entangled qutrit pair.
pub fn explicit_23_strategy() -> BipartiteStrategy {
    BipartiteStrategy {
        state: qudit::max_entangled(3).expect("d = 3"),
        dim_a: 3,
        dim_b: 3,
        alice: explicit_alice_family(),
        bob: explicit_bob_family(),
    }
}

/// Closed form of the explicit strategy's value from the entries λ of A_0^0
/// when Bob's Fourier outcomes carry offset `s`:
///
/// ```text
///   λ_00/2 + (1/6) Σ_{k,k'} λ_{k,k'} ω^{s(k−k')}
/// ```
///
/// For s = 2 the sum is 1 + 2 Re(ω² λ_10 + ω λ_20 + ω² λ_21); for s = 1 it
/// is 1 + 2 Re(ω λ_10 + ω² λ_20 + ω λ_21).
pub fn explicit_23_closed_form_with_offset(lambda: &ComplexMatrix, offset: usize) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..3 {
        for kp in 0..3 {
            sum += lambda[(k, kp)] * root_of_unity(3, offset as i64 * (k as i64 - kp as i64));
        }
    }
    lambda[(0, 0)].re / 2.0 + sum.re / 6.0
}

/// Closed-form value of the explicit strategy.
pub fn explicit_23_closed_form() -> f64 {
    let l = explicit_a00();
    let w = root_of_unity(3, 1);
    let w2 = root_of_unity(3, 2);
    let mixed = w * l[(1, 0)] + w2 * l[(2, 0)] + w * l[(2, 1)];
    l[(0, 0)].re / 2.0 + (1.0 + 2.0 * mixed.re) / 6.0
}

/// Success probability of the explicit 2^(3)→1 strategy, evaluated through
/// the probability table and cross-checked against the closed form.
pub fn earac_23_success() -> Result<f64> {
    let inst = explicit_23_instance();
    let table = probability_table(&inst, &explicit_23_strategy())?;
    let value = bell_rac_value(&inst, &table)?;
    let closed = explicit_23_closed_form();
    if (value - closed).abs() > tolerance::ALGEBRA {
        return Err(Error::Consistency(format!(
            "table value {value} disagrees with closed form {closed}"
        )));
    }
    Ok(value)
}

/// Projective qubit measurement along Bloch angle θ in the x–z plane.
fn qubit_measurement(theta: f64) -> Povm {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let up = Ket::new(vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]);
    let down = Ket::new(vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]);
    Povm::projective(&[up, down])
}

/// Optimal CHSH strategy for the 2^(2)→1 game on (|00⟩ + |11⟩)/√2: Alice at
/// Bloch angles 0, π/2; Bob at π/4 (always correlate) and −π/4.
pub fn chsh_strategy() -> BipartiteStrategy {
    BipartiteStrategy {
        state: qudit::max_entangled(2).expect("d = 2"),
        dim_a: 2,
        dim_b: 2,
        alice: MeasurementFamily::new(vec![qubit_measurement(0.0), qubit_measurement(PI / 2.0)]),
        bob: MeasurementFamily::new(vec![
            qubit_measurement(PI / 4.0),
            qubit_measurement(-PI / 4.0),
        ]),
    }
}

/// Product state |0…0⟩ with computational-basis measurements everywhere.
pub fn product_strategy(inst: &BellRacInstance) -> BipartiteStrategy {
    let d = inst.outcomes();
    let basis: Vec<Ket> = (0..d).map(|k| Ket::basis(d, k)).collect();
    let comp = Povm::projective(&basis);
    BipartiteStrategy {
        state: Ket::basis(d * d, 0),
        dim_a: d,
        dim_b: d,
        alice: MeasurementFamily::new(vec![comp.clone(); inst.alice_settings()]),
        bob: MeasurementFamily::new(vec![comp; inst.bob_settings()]),
    }
}
