//! Prepare-and-measure random access codes: Alice sends one qudit per data
//! string, Bob measures setting y and reads off his guess for x_y.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, Ket};
use crate::measurement::{MeasurementFamily, Povm};
use crate::qudit::{self, ShiftConvention};
use crate::scenario::Scenario;
use crate::sdp::{solve_povm, PovmSubproblem};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct PrepareAndMeasureProtocol {
    pub scenario: Scenario,
    /// One state per data string, indexed as in [`Scenario::digits`].
    pub preparations: Vec<Ket>,
    /// One d-outcome POVM per setting y.
    pub measurements: MeasurementFamily,
}

impl PrepareAndMeasureProtocol {
    pub fn validate(&self) -> Result<()> {
        let Scenario { n, d } = self.scenario;
        if self.preparations.len() != self.scenario.strings() {
            return Err(Error::contract(format!(
                "expected {} preparations, got {}",
                self.scenario.strings(),
                self.preparations.len()
            )));
        }
        for (i, p) in self.preparations.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::contract(format!(
                    "preparation {i} has dimension {}, expected {d}",
                    p.dim()
                )));
            }
            if !p.is_normalized(tolerance::ALGEBRA) {
                return Err(Error::contract(format!(
                    "preparation {i} not normalized (norm² = {})",
                    p.norm_sqr()
                )));
            }
        }
        self.measurements.validate_shape(n, d, d)
    }
}

/// The explicit n = 2 protocol: |φ_{x0 x1}⟩ = X^{x0} Z^{x1} |φ_00⟩ with
/// |φ_00⟩ ∝ |0⟩ + |e_0⟩, Bob measuring the computational basis for x0 and
/// the Fourier basis for x1. X is the lowering-convention shift.
pub fn mub_qcrac_protocol(d: usize) -> Result<PrepareAndMeasureProtocol> {
    if d < 2 {
        return Err(Error::contract(format!("QCRAC needs d >= 2, got {d}")));
    }
    let scenario = Scenario::new(2, d)?;
    let e0 = qudit::fourier_ket(d, 0)?;
    let norm = (2.0 + 2.0 / (d as f64).sqrt()).sqrt();
    let phi00 = Ket::basis(d, 0)
        .add(&e0)
        .scale(Complex64::new(1.0 / norm, 0.0));
    let x = qudit::shift_operator(d, ShiftConvention::Lower)?;
    let z = qudit::clock_operator(d)?;

    let preparations = (0..scenario.strings())
        .map(|idx| {
            let digits = scenario.digits(idx);
            let u = x.pow(digits[0]).matmul(&z.pow(digits[1]));
            u.apply(&phi00)
        })
        .collect();

    let computational: Vec<Ket> = (0..d).map(|l| Ket::basis(d, l)).collect();
    let fourier = (0..d)
        .map(|l| qudit::fourier_ket(d, l))
        .collect::<Result<Vec<_>>>()?;
    let measurements = MeasurementFamily::new(vec![
        Povm::projective(&computational),
        Povm::projective(&fourier),
    ]);
    Ok(PrepareAndMeasureProtocol {
        scenario,
        preparations,
        measurements,
    })
}

/// Average probability that Bob's outcome for setting y equals x_y.
pub fn sequential_success(p: &PrepareAndMeasureProtocol) -> Result<f64> {
    p.validate()?;
    Ok(success_unchecked(p))
}

fn success_unchecked(p: &PrepareAndMeasureProtocol) -> f64 {
    let Scenario { n, .. } = p.scenario;
    // Fixed-order reduction keeps the sum bit-stable regardless of threads.
    let per_string: Vec<f64> = p
        .preparations
        .par_iter()
        .enumerate()
        .map(|(idx, phi)| {
            let digits = p.scenario.digits(idx);
            (0..n)
                .map(|y| p.measurements.element(y, digits[y]).expectation(phi).re)
                .sum::<f64>()
        })
        .collect();
    per_string.iter().sum::<f64>() / (n * p.scenario.strings()) as f64
}

/// 1/2 + 1/(2√d).
pub fn qcrac_analytic(d: usize) -> f64 {
    0.5 + 0.5 / (d as f64).sqrt()
}

/// Result of a prepare-and-measure see-saw.
#[derive(Debug, Clone)]
pub struct QcracSearch {
    pub value: f64,
    pub protocol: PrepareAndMeasureProtocol,
    pub restart_values: Vec<f64>,
}

/// Lower bound on the optimal qudit RAC for scenarios without a closed
/// form: alternate optimal preparations (top eigenvectors of Σ_y M_y^{x_y})
/// with optimal measurements (POVM subproblems per setting).
pub fn optimize_protocol(
    scenario: Scenario,
    restarts: usize,
    max_sweeps: usize,
    improvement_floor: f64,
    seed: u64,
) -> Result<QcracSearch> {
    if restarts == 0 {
        return Err(Error::contract("need at least one restart"));
    }
    let runs: Vec<Result<(f64, PrepareAndMeasureProtocol)>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = qudit::seeded_rng(seed, r as u64);
            let d = scenario.d;
            let measurements = MeasurementFamily::new(
                (0..scenario.n)
                    .map(|_| Povm::from_unitary_columns(&qudit::random_unitary(d, &mut rng)))
                    .collect(),
            );
            let mut protocol = PrepareAndMeasureProtocol {
                scenario,
                preparations: vec![Ket::basis(d, 0); scenario.strings()],
                measurements,
            };
            let mut prev = f64::NEG_INFINITY;
            for _ in 0..max_sweeps {
                protocol.preparations = best_preparations(&protocol)?;
                protocol.measurements = best_measurements(&protocol)?;
                let v = success_unchecked(&protocol);
                if v - prev < improvement_floor {
                    break;
                }
                prev = v;
            }
            Ok((success_unchecked(&protocol), protocol))
        })
        .collect();
    let mut restart_values = Vec::with_capacity(restarts);
    let mut best: Option<(f64, PrepareAndMeasureProtocol)> = None;
    for run in runs {
        let (v, p) = run?;
        restart_values.push(v);
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, p));
        }
    }
    let (value, protocol) = best.expect("restarts >= 1");
    Ok(QcracSearch {
        value,
        protocol,
        restart_values,
    })
}

fn best_preparations(p: &PrepareAndMeasureProtocol) -> Result<Vec<Ket>> {
    (0..p.scenario.strings())
        .map(|idx| {
            let digits = p.scenario.digits(idx);
            let d = p.scenario.d;
            let mut op = ComplexMatrix::zeros(d, d);
            for (y, &g) in digits.iter().enumerate() {
                op = &op + p.measurements.element(y, g);
            }
            let eig = hermitian_eig(&op.hermitian_part())?;
            Ok(eig.eigenvectors[0].clone())
        })
        .collect()
}

fn best_measurements(p: &PrepareAndMeasureProtocol) -> Result<MeasurementFamily> {
    let Scenario { n, d } = p.scenario;
    let povms = (0..n)
        .map(|y| {
            let mut rewards = vec![ComplexMatrix::zeros(d, d); d];
            for (idx, phi) in p.preparations.iter().enumerate() {
                let g = p.scenario.digits(idx)[y];
                rewards[g] = &rewards[g] + &phi.projector();
            }
            let current: f64 = rewards
                .iter()
                .zip(p.measurements.povm(y).elements())
                .map(|(r, e)| r.trace_product(e).re)
                .sum();
            let sol = solve_povm(&PovmSubproblem::new(rewards)?).map_err(|e| Error::Setting {
                setting: y,
                source: Box::new(e),
            })?;
            Ok(if sol.primal_value >= current {
                sol.povm
            } else {
                p.measurements.povm(y).clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementFamily::new(povms))
}
