//! See-saw maximization of the Bell RAC functional.
//!
//! With two of (state, Alice, Bob) fixed the third subproblem is solved
//! exactly: the state by the top eigenvector of the Bell operator, each
//! measurement setting by a POVM subproblem. Values only go up, so every
//! result is a certified lower bound realized by its witness.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::earac::{bell_rac_value, probability_table_unchecked, BellRacInstance, BipartiteStrategy};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, Ket};
use crate::measurement::{MeasurementFamily, Povm};
use crate::qudit::{self, wrap};
use crate::scenario::Scenario;
use crate::sdp::{self, solve_povm, PovmSubproblem};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub scenario: Scenario,
    pub local_dims: (usize, usize),
    pub restarts: usize,
    pub max_sweeps: usize,
    pub improvement_floor: f64,
    pub seed: u64,
}

impl SeesawConfig {
    /// Local dimension d per side, 200 sweeps, floor 1e-9, 20 restarts
    /// (50 for the 3^(3)→1 case).
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        let restarts = if scenario.n == 3 && scenario.d == 3 { 50 } else { 20 };
        Self {
            scenario,
            local_dims: (scenario.d, scenario.d),
            restarts,
            max_sweeps: 200,
            improvement_floor: 1e-9,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (da, db) = self.local_dims;
        if self.restarts == 0 {
            return Err(Error::contract("need at least one restart"));
        }
        if !(self.improvement_floor > 0.0) {
            return Err(Error::contract("improvement floor must be positive"));
        }
        if da == 0 || db == 0 || da > sdp::MAX_DIM || db > sdp::MAX_DIM || da * db > tolerance::MAX_EIG_DIM {
            return Err(Error::contract(format!(
                "local dimensions {da}x{db} out of range"
            )));
        }
        if self.scenario.d > 4 * da.min(db) {
            return Err(Error::contract("too many outcomes for the local dimension"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub final_value: f64,
    pub sweeps: usize,
    /// Objective after every update step, starting from the initial point.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best_value: f64,
    pub strategy: BipartiteStrategy,
    /// Trace of the winning restart.
    pub trace: Vec<f64>,
    pub restarts_summary: Vec<RestartSummary>,
}

/// G = (1/(n d^{n−1})) Σ_{x,y} Σ_a A_x^a ⊗ B_y^{target(x,y) − a}.
pub fn bell_operator(
    inst: &BellRacInstance,
    alice: &MeasurementFamily,
    bob: &MeasurementFamily,
) -> Result<ComplexMatrix> {
    let d = inst.outcomes();
    let (da, db) = (family_dim(alice)?, family_dim(bob)?);
    alice.validate_shape(inst.alice_settings(), d, da)?;
    bob.validate_shape(inst.bob_settings(), d, db)?;
    let mut g = ComplexMatrix::zeros(da * db, da * db);
    for x in 0..inst.alice_settings() {
        for y in 0..inst.bob_settings() {
            let t = inst.target(x, y);
            for a in 0..d {
                let b = wrap(t as i64 - a as i64, d);
                g = &g + &alice.element(x, a).kron(bob.element(y, b));
            }
        }
    }
    Ok(g.scale_real(inst.normalization()).hermitian_part())
}

fn family_dim(f: &MeasurementFamily) -> Result<usize> {
    f.povms()
        .first()
        .map(Povm::dim)
        .ok_or_else(|| Error::contract("measurement family has no settings"))
}

/// Top eigenvector of G; ties go to the eigensolver's first vector.
pub fn state_update(g: &ComplexMatrix) -> Result<Ket> {
    let eig = hermitian_eig(&g.hermitian_part())?;
    Ok(eig.eigenvectors[0].clone())
}

/// R_x^a for every Alice setting: Σ_y Ψ (B_y^b)ᵀ Ψ† with b = target − a,
/// i.e. Tr_B[(I ⊗ B_y^b)|ψ⟩⟨ψ|], normalized.
pub fn alice_rewards(inst: &BellRacInstance, s: &BipartiteStrategy) -> Vec<Vec<ComplexMatrix>> {
    let d = inst.outcomes();
    let psi = s.state_matrix();
    let psi_dag = psi.adjoint();
    // Reduced Bob operators depend only on (y, b).
    let reduced: Vec<Vec<ComplexMatrix>> = (0..inst.bob_settings())
        .map(|y| {
            (0..d)
                .map(|b| psi.matmul(&s.bob.element(y, b).transpose()).matmul(&psi_dag))
                .collect()
        })
        .collect();
    (0..inst.alice_settings())
        .map(|x| {
            (0..d)
                .map(|a| {
                    let mut r = ComplexMatrix::zeros(s.dim_a, s.dim_a);
                    for (y, red) in reduced.iter().enumerate() {
                        let b = wrap(inst.target(x, y) as i64 - a as i64, d);
                        r = &r + &red[b];
                    }
                    r.scale_real(inst.normalization()).hermitian_part()
                })
                .collect()
        })
        .collect()
}

/// R_y^b for every Bob setting: Σ_x (Ψ† A_x^a Ψ)ᵀ with a = target − b.
pub fn bob_rewards(inst: &BellRacInstance, s: &BipartiteStrategy) -> Vec<Vec<ComplexMatrix>> {
    let d = inst.outcomes();
    let psi = s.state_matrix();
    let psi_dag = psi.adjoint();
    let reduced: Vec<Vec<ComplexMatrix>> = (0..inst.alice_settings())
        .map(|x| {
            (0..d)
                .map(|a| psi_dag.matmul(s.alice.element(x, a)).matmul(&psi).transpose())
                .collect()
        })
        .collect();
    (0..inst.bob_settings())
        .map(|y| {
            (0..d)
                .map(|b| {
                    let mut r = ComplexMatrix::zeros(s.dim_b, s.dim_b);
                    for (x, red) in reduced.iter().enumerate() {
                        let a = wrap(inst.target(x, y) as i64 - b as i64, d);
                        r = &r + &red[a];
                    }
                    r.scale_real(inst.normalization()).hermitian_part()
                })
                .collect()
        })
        .collect()
}

/// Solves every setting's subproblem; a setting keeps its current POVM when
/// the solver does not beat it.
fn best_family(rewards: Vec<Vec<ComplexMatrix>>, current: &MeasurementFamily) -> Result<MeasurementFamily> {
    let povms = rewards
        .into_par_iter()
        .enumerate()
        .map(|(setting, r)| {
            let wrap_err = |e| Error::Setting {
                setting,
                source: Box::new(e),
            };
            let p = PovmSubproblem::new(r).map_err(wrap_err)?;
            let old = current.povm(setting);
            let sol = solve_povm(&p).map_err(wrap_err)?;
            Ok(if p.objective(&sol.povm) > p.objective(old) {
                sol.povm
            } else {
                old.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementFamily::new(povms))
}

/// Optimal Alice family for the current state and Bob.
pub fn measurement_update_alice(inst: &BellRacInstance, s: &BipartiteStrategy) -> Result<MeasurementFamily> {
    s.validate(inst)?;
    best_family(alice_rewards(inst, s), &s.alice)
}

/// Optimal Bob family for the current state and Alice.
pub fn measurement_update_bob(inst: &BellRacInstance, s: &BipartiteStrategy) -> Result<MeasurementFamily> {
    s.validate(inst)?;
    best_family(bob_rewards(inst, s), &s.bob)
}

fn value_of(inst: &BellRacInstance, s: &BipartiteStrategy) -> f64 {
    bell_rac_value(inst, &probability_table_unchecked(inst, s)).expect("shape checked")
}

/// Projective measurement onto groups of Haar-random columns: column j goes
/// to outcome j mod `outcomes`.
pub fn random_projective<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    let u = qudit::random_unitary(dim, rng);
    let mut elements = vec![ComplexMatrix::zeros(dim, dim); outcomes];
    for j in 0..dim {
        let col = Ket::new((0..dim).map(|i| u[(i, j)]).collect());
        let k = j % outcomes;
        elements[k] = &elements[k] + &col.projector();
    }
    Povm::new(elements)
}

fn initial_strategy(inst: &BellRacInstance, cfg: &SeesawConfig, restart: usize) -> Result<BipartiteStrategy> {
    let (da, db) = cfg.local_dims;
    let d = inst.outcomes();
    let mut rng = qudit::seeded_rng(cfg.seed, restart as u64);
    let alice = (0..inst.alice_settings())
        .map(|_| random_projective(da, d, &mut rng))
        .collect();
    let bob = (0..inst.bob_settings())
        .map(|_| random_projective(db, d, &mut rng))
        .collect();
    let state = if restart == 0 && da == db {
        qudit::max_entangled(da)?
    } else {
        qudit::random_ket(da * db, &mut rng)
    };
    Ok(BipartiteStrategy {
        state,
        dim_a: da,
        dim_b: db,
        alice: MeasurementFamily::new(alice),
        bob: MeasurementFamily::new(bob),
    })
}

fn run_restart(
    inst: &BellRacInstance,
    cfg: &SeesawConfig,
    restart: usize,
) -> Result<(BipartiteStrategy, RestartSummary)> {
    let mut s = initial_strategy(inst, cfg, restart)?;
    let mut trace = vec![value_of(inst, &s)];
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let start = *trace.last().expect("non-empty");

        let g = bell_operator(inst, &s.alice, &s.bob)?;
        let candidate = BipartiteStrategy {
            state: state_update(&g)?,
            ..s.clone()
        };
        let v = value_of(inst, &candidate);
        if v >= start {
            s = candidate;
        }
        trace.push(value_of(inst, &s));

        s.alice = measurement_update_alice(inst, &s)?;
        trace.push(value_of(inst, &s));
        s.bob = measurement_update_bob(inst, &s)?;
        let end = value_of(inst, &s);
        trace.push(end);

        if end - start < cfg.improvement_floor {
            break;
        }
    }
    let final_value = *trace.last().expect("non-empty");
    Ok((
        s,
        RestartSummary {
            restart,
            final_value,
            sweeps,
            trace,
        },
    ))
}

/// Best see-saw value over all restarts, with its witness. Restarts run in
/// parallel; the winner is the highest value, lowest restart index on ties.
pub fn seesaw(inst: &BellRacInstance, cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    if inst.scenario != cfg.scenario {
        return Err(Error::contract("config scenario does not match the instance"));
    }
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(inst, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, (_, summary)) in runs.iter().enumerate() {
        if summary.final_value > runs[best].1.final_value {
            best = i;
        }
    }
    let strategy = runs[best].0.clone();
    let trace = runs[best].1.trace.clone();
    let best_value = runs[best].1.final_value;
    Ok(SeesawResult {
        best_value,
        strategy,
        trace,
        restarts_summary: runs.into_iter().map(|(_, s)| s).collect(),
    })
}
