//! Exact solver for the measurement step of the see-saw:
//!
//! ```text
//!   maximize   Σ_a Tr(A_a R_a)   over POVMs {A_a}
//!   minimize   Tr Y              subject to Y ⪰ R_a for every a   (dual)
//! ```
//!
//! The dual has a single d×d Hermitian variable, so it is solved with a
//! log-det barrier method. On the central path `μ (Y − R_a)^{-1}` is a POVM
//! up to O(μ) completeness error; it is renormalized to exact completeness
//! and the duality gap is computed from the recovered pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hpd_inverse_sqrt, ComplexMatrix, ZERO};
use crate::measurement::Povm;
use crate::tolerance;

/// Largest dimension accepted by [`solve_povm`].
pub const MAX_DIM: usize = 16;
/// Barrier parameter shrink factor between centering rounds.
pub const MU_SHRINK: f64 = 0.2;
/// Newton decrement (λ²/2) at which a centering round stops.
pub const NEWTON_TOLERANCE: f64 = 1e-12;
/// Total Newton steps allowed per solve.
pub const MAX_NEWTON_STEPS: usize = 500;
/// Duality gap that counts as certified.
pub const GAP_TOLERANCE: f64 = 1e-8;
/// Path-following stops once `outcomes · dim · μ` falls below this.
const TARGET_PATH_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PovmSubproblem {
    dim: usize,
    rewards: Vec<ComplexMatrix>,
}

impl PovmSubproblem {
    /// One Hermitian reward operator per outcome.
    pub fn new(rewards: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = rewards.first().map_or(0, ComplexMatrix::rows);
        if rewards.is_empty() || dim == 0 {
            return Err(Error::contract("POVM subproblem needs at least one reward"));
        }
        if dim > MAX_DIM {
            return Err(Error::contract(format!(
                "POVM subproblem dimension {dim} exceeds {MAX_DIM}"
            )));
        }
        if rewards.len() > 4 * dim {
            return Err(Error::contract(format!(
                "{} outcomes exceed 4·dim = {}",
                rewards.len(),
                4 * dim
            )));
        }
        for (a, r) in rewards.iter().enumerate() {
            if !r.is_square() || r.dim() != dim {
                return Err(Error::contract(format!("reward {a} has the wrong shape")));
            }
            if r.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::contract(format!("reward {a} has non-finite entries")));
            }
            let scale = r.frobenius_norm().max(1.0);
            if r.hermiticity_defect() > tolerance::ALGEBRA * scale {
                return Err(Error::contract(format!("reward {a} is not Hermitian")));
            }
        }
        Ok(Self {
            dim,
            rewards: rewards.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.rewards.len()
    }

    pub fn rewards(&self) -> &[ComplexMatrix] {
        &self.rewards
    }

    /// Σ_a Tr(A_a R_a) for a candidate POVM.
    pub fn objective(&self, povm: &Povm) -> f64 {
        self.rewards
            .iter()
            .zip(povm.elements())
            .map(|(r, a)| a.trace_product(r).re)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct PovmSolution {
    pub povm: Povm,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Y with Y ⪰ R_a for all a.
    pub dual_witness: ComplexMatrix,
    pub newton_steps: usize,
}

impl PovmSolution {
    pub fn gap(&self) -> f64 {
        self.dual_value - self.primal_value
    }
}

/// Solves the POVM subproblem to a certified duality gap.
pub fn solve_povm(p: &PovmSubproblem) -> Result<PovmSolution> {
    let dim = p.dim;
    let m = p.outcomes();

    if m == 1 {
        let r = &p.rewards[0];
        let v = r.trace().re;
        return Ok(PovmSolution {
            povm: Povm::new(vec![ComplexMatrix::identity(dim)]),
            primal_value: v,
            dual_value: v,
            dual_witness: r.clone(),
            newton_steps: 0,
        });
    }
    if p.rewards.iter().all(|r| r.max_abs_diff(&p.rewards[0]) == 0.0) {
        let r = &p.rewards[0];
        let v = r.trace().re;
        return Ok(PovmSolution {
            povm: Povm::uniform(dim, m),
            primal_value: v,
            dual_value: v,
            dual_witness: r.clone(),
            newton_steps: 0,
        });
    }

    let top = p
        .rewards
        .iter()
        .map(|r| hermitian_eig(r).map(|e| e.max_eigenvalue()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut y = ComplexMatrix::identity(dim).scale_real(top + 1.0);
    let mut mu = 1.0;
    let mut steps = 0;
    let mut state = Barrier::evaluate(p, &y, mu)?;

    loop {
        // Centering by damped Newton.
        loop {
            let (delta, decrement_sq) = newton_direction(&state, mu)?;
            if decrement_sq / (2.0 * mu) <= NEWTON_TOLERANCE {
                break;
            }
            if steps == MAX_NEWTON_STEPS {
                let gap = recover(p, &y, &state, mu).map_or(f64::INFINITY, |s| s.gap());
                return Err(Error::Barrier {
                    newton_steps: steps,
                    gap,
                });
            }
            steps += 1;
            let slope = -decrement_sq;
            let mut alpha = 1.0;
            let mut progressed = false;
            for _ in 0..40 {
                let trial = &y + &delta.scale_real(alpha);
                if let Ok(next) = Barrier::evaluate(p, &trial, mu) {
                    if next.value <= state.value + 0.25 * alpha * slope {
                        progressed = next.value < state.value;
                        y = trial;
                        state = next;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !progressed {
                // Decrease no longer measurable at working precision.
                break;
            }
        }
        if (m * dim) as f64 * mu <= TARGET_PATH_GAP {
            break;
        }
        mu *= MU_SHRINK;
        state = Barrier::evaluate(p, &y, mu)?;
    }

    let mut sol = recover(p, &y, &state, mu)?;
    sol.newton_steps = steps;
    if !(sol.gap() <= GAP_TOLERANCE) {
        return Err(Error::Barrier {
            newton_steps: steps,
            gap: sol.gap(),
        });
    }
    Ok(sol)
}

/// Barrier objective Tr Y − μ Σ_a log det(Y − R_a) with the slack inverses.
struct Barrier {
    value: f64,
    slack_inverses: Vec<ComplexMatrix>,
}

impl Barrier {
    fn evaluate(p: &PovmSubproblem, y: &ComplexMatrix, mu: f64) -> Result<Self> {
        let mut value = y.trace().re;
        let mut slack_inverses = Vec::with_capacity(p.outcomes());
        for r in &p.rewards {
            let (inv, logdet) = (y - r).hpd_inverse_logdet()?;
            value -= mu * logdet;
            slack_inverses.push(inv);
        }
        Ok(Self {
            value,
            slack_inverses,
        })
    }
}

/// Newton step for the barrier objective and its squared decrement.
///
/// Gradient: I − μ Σ W_a. Hessian: Δ ↦ μ Σ W_a Δ W_a, which in row-major
/// vectorization is μ Σ W_a ⊗ W_aᵀ (Hermitian positive definite).
fn newton_direction(state: &Barrier, mu: f64) -> Result<(ComplexMatrix, f64)> {
    let n = state.slack_inverses[0].dim();
    let mut grad = ComplexMatrix::identity(n);
    for w in &state.slack_inverses {
        grad = &grad - &w.scale_real(mu);
    }
    let nn = n * n;
    let mut hess = ComplexMatrix::zeros(nn, nn);
    for w in &state.slack_inverses {
        for i in 0..n {
            for k in 0..n {
                let wik = w[(i, k)] * mu;
                if wik == ZERO {
                    continue;
                }
                for j in 0..n {
                    for l in 0..n {
                        // (W ⊗ Wᵀ)[(i,j),(k,l)] = W_ik W_lj
                        hess[(i * n + j, k * n + l)] += wik * w[(l, j)];
                    }
                }
            }
        }
    }
    let hess = hess.hermitian_part();
    let rhs: Vec<Complex64> = grad.entries().iter().map(|z| -z).collect();
    let sol = hess.hpd_solve(&rhs)?;
    let delta = ComplexMatrix::from_vec(n, n, sol)?.hermitian_part();
    let decrement_sq = -grad.trace_product(&delta).re;
    Ok((delta, decrement_sq.max(0.0)))
}

/// Primal POVM from the central-path slack inverses, renormalized to sum
/// to the identity exactly.
fn recover(p: &PovmSubproblem, y: &ComplexMatrix, state: &Barrier, mu: f64) -> Result<PovmSolution> {
    let dim = p.dim;
    let raw: Vec<ComplexMatrix> = state
        .slack_inverses
        .iter()
        .map(|w| w.scale_real(mu))
        .collect();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for a in &raw {
        total = &total + a;
    }
    let fix = hpd_inverse_sqrt(&total.hermitian_part())?;
    let elements: Vec<ComplexMatrix> = raw
        .iter()
        .map(|a| fix.matmul(a).matmul(&fix).hermitian_part())
        .collect();
    let povm = Povm::new(elements);
    let primal_value = p.objective(&povm);
    Ok(PovmSolution {
        povm,
        primal_value,
        dual_value: y.trace().re,
        dual_witness: y.clone(),
        newton_steps: 0,
    })
}

/// Residuals and gap of a solution recomputed from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub min_povm_eigenvalue: f64,
    pub completeness_residual: f64,
    /// min over a of λ_min(Y − R_a).
    pub min_dual_slack: f64,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
}

impl Certificate {
    pub fn max_residual(&self) -> f64 {
        self.completeness_residual
            .max(-self.min_povm_eigenvalue)
            .max(-self.min_dual_slack)
    }

    pub fn is_certified(&self) -> bool {
        self.min_povm_eigenvalue >= tolerance::PSD
            && self.completeness_residual <= tolerance::COMPLETENESS
            && self.min_dual_slack >= -1e-9
            && self.gap >= -1e-12
            && self.gap <= GAP_TOLERANCE
    }
}

/// Recomputes feasibility of both sides and the duality gap. Shape
/// mismatches are reported as infinite residuals.
pub fn certify(sol: &PovmSolution, p: &PovmSubproblem) -> Certificate {
    let dim = p.dim;
    let bad = Certificate {
        min_povm_eigenvalue: f64::NEG_INFINITY,
        completeness_residual: f64::INFINITY,
        min_dual_slack: f64::NEG_INFINITY,
        primal_value: f64::NAN,
        dual_value: f64::NAN,
        gap: f64::INFINITY,
    };
    if sol.povm.outcomes() != p.outcomes()
        || sol.povm.dim() != dim
        || sol.dual_witness.dim() != dim
        || !sol.dual_witness.is_square()
    {
        return bad;
    }
    let Ok(res) = sol.povm.residuals() else {
        return bad;
    };
    let y = sol.dual_witness.hermitian_part();
    let mut min_dual_slack = f64::INFINITY;
    for r in &p.rewards {
        match hermitian_eig(&(&y - r)) {
            Ok(e) => min_dual_slack = min_dual_slack.min(e.min_eigenvalue()),
            Err(_) => return bad,
        }
    }
    let primal_value = p.objective(&sol.povm);
    let dual_value = y.trace().re;
    Certificate {
        min_povm_eigenvalue: res.min_eigenvalue,
        completeness_residual: res.completeness,
        min_dual_slack,
        primal_value,
        dual_value,
        gap: dual_value - primal_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::seeded_rng;
    use rand::Rng;

    fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .hermitian_part()
    }

    #[test]
    fn zero_rewards() {
        let p = PovmSubproblem::new(vec![ComplexMatrix::zeros(3, 3); 3]).unwrap();
        let sol = solve_povm(&p).unwrap();
        assert_eq!(sol.primal_value, 0.0);
        assert_eq!(sol.povm, Povm::uniform(3, 3));
        assert!(certify(&sol, &p).is_certified());
    }

    #[test]
    fn single_outcome() {
        let mut rng = seeded_rng(1, 0);
        let r = random_hermitian(&mut rng, 4);
        let p = PovmSubproblem::new(vec![r.clone()]).unwrap();
        let sol = solve_povm(&p).unwrap();
        assert!((sol.primal_value - r.trace().re).abs() < 1e-14);
        assert_eq!(sol.povm.element(0), &ComplexMatrix::identity(4));
        assert!(certify(&sol, &p).is_certified());
    }

    #[test]
    fn diagonal_rewards_match_greedy_assignment() {
        let mut rng = seeded_rng(2, 0);
        for _ in 0..20 {
            let dim = rng.random_range(1..=5);
            let m = rng.random_range(2..=4 * dim.min(2));
            let diags: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let oracle: f64 = (0..dim)
                .map(|k| diags.iter().map(|d| d[k]).fold(f64::NEG_INFINITY, f64::max))
                .sum();
            let p = PovmSubproblem::new(diags.iter().map(|d| ComplexMatrix::from_real_diag(d)).collect())
                .unwrap();
            let sol = solve_povm(&p).unwrap();
            assert!((sol.primal_value - oracle).abs() < 1e-9, "{} vs {oracle}", sol.primal_value);
            assert!(certify(&sol, &p).is_certified());
        }
    }

    #[test]
    fn random_rewards_certify() {
        let mut rng = seeded_rng(3, 0);
        for _ in 0..50 {
            let rewards = (0..3).map(|_| random_hermitian(&mut rng, 3)).collect();
            let p = PovmSubproblem::new(rewards).unwrap();
            let sol = solve_povm(&p).unwrap();
            let cert = certify(&sol, &p);
            assert!(cert.is_certified(), "{cert:?}");
            assert!(sol.primal_value <= sol.dual_value + 1e-12);
        }
    }

    #[test]
    fn tampered_povm_is_flagged() {
        let p = PovmSubproblem::new(vec![
            ComplexMatrix::from_real_diag(&[1.0, 0.0]),
            ComplexMatrix::from_real_diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let mut sol = solve_povm(&p).unwrap();
        assert!(certify(&sol, &p).is_certified());
        sol.povm = Povm::new(sol.povm.elements().iter().map(|e| e.scale_real(1.01)).collect());
        let cert = certify(&sol, &p);
        assert!((cert.completeness_residual - 0.01).abs() < 1e-6);
        assert!(!cert.is_certified());
    }

    #[test]
    fn identity_shift_moves_optimum_by_trace() {
        let mut rng = seeded_rng(4, 0);
        for _ in 0..10 {
            let rewards: Vec<_> = (0..3).map(|_| random_hermitian(&mut rng, 3)).collect();
            let c = rng.random_range(-2.0..2.0);
            let shifted = rewards
                .iter()
                .map(|r| r + &ComplexMatrix::identity(3).scale_real(c))
                .collect();
            let v0 = solve_povm(&PovmSubproblem::new(rewards).unwrap()).unwrap().primal_value;
            let v1 = solve_povm(&PovmSubproblem::new(shifted).unwrap()).unwrap().primal_value;
            assert!((v1 - v0 - 3.0 * c).abs() < 1e-9);
        }
    }

    #[test]
    fn outcome_permutation_equivariance() {
        let mut rng = seeded_rng(5, 0);
        let rewards: Vec<_> = (0..3).map(|_| random_hermitian(&mut rng, 3)).collect();
        let perm = [2, 0, 1];
        let permuted: Vec<_> = perm.iter().map(|&i| rewards[i].clone()).collect();
        let s0 = solve_povm(&PovmSubproblem::new(rewards).unwrap()).unwrap();
        let s1 = solve_povm(&PovmSubproblem::new(permuted).unwrap()).unwrap();
        assert!((s0.primal_value - s1.primal_value).abs() < 1e-10);
        for (k, &i) in perm.iter().enumerate() {
            assert!(s1.povm.element(k).max_abs_diff(s0.povm.element(i)) < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let non_herm = ComplexMatrix::from_vec(
            2,
            2,
            vec![ZERO, Complex64::new(1.0, 0.0), ZERO, ZERO],
        )
        .unwrap();
        assert!(PovmSubproblem::new(vec![non_herm]).unwrap_err().is_contract_violation());
        assert!(PovmSubproblem::new(vec![]).is_err());
        assert!(PovmSubproblem::new(vec![ComplexMatrix::zeros(2, 2); 9]).is_err());
        assert!(PovmSubproblem::new(vec![ComplexMatrix::zeros(17, 17)]).is_err());
        assert!(
            PovmSubproblem::new(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(3, 3)]).is_err()
        );
    }
}
