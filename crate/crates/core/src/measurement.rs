//! POVMs and indexed families of them.

use crate::error::{Error, Result};
use rand::Rng;

use crate::linalg::{hermitian_eig, hpd_inverse_sqrt, ComplexMatrix, Ket};
use crate::qudit::random_ket;
use crate::tolerance;

/// A measurement: positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

/// Residuals of a POVM against its defining constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmResiduals {
    /// Smallest eigenvalue over all elements.
    pub min_eigenvalue: f64,
    /// max-entry norm of Σ_a E_a − I.
    pub completeness: f64,
    /// Largest hermiticity defect over all elements.
    pub hermiticity: f64,
}

impl PovmResiduals {
    pub fn is_valid(&self) -> bool {
        self.min_eigenvalue >= tolerance::PSD
            && self.completeness <= tolerance::COMPLETENESS
            && self.hermiticity <= tolerance::ALGEBRA
    }
}

impl Povm {
    /// Wraps elements without checking them; see [`Povm::validated`].
    pub fn new(elements: Vec<ComplexMatrix>) -> Self {
        Self { elements }
    }

    /// Wraps elements after checking shape, positivity and completeness.
    pub fn validated(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let povm = Self { elements };
        povm.validate()?;
        Ok(povm)
    }

    /// Projective measurement onto the given kets.
    pub fn projective(basis: &[Ket]) -> Self {
        Self {
            elements: basis.iter().map(Ket::projector).collect(),
        }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Self {
        let d = u.rows();
        let cols: Vec<Ket> = (0..u.cols())
            .map(|j| Ket::new((0..d).map(|i| u[(i, j)]).collect()))
            .collect();
        Self::projective(&cols)
    }

    /// d-outcome measurement with every element I/d.
    pub fn uniform(dim: usize, outcomes: usize) -> Self {
        let e = ComplexMatrix::identity(dim).scale_real(1.0 / outcomes as f64);
        Self {
            elements: vec![e; outcomes],
        }
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    /// Hilbert-space dimension the elements act on (0 if empty).
    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, ComplexMatrix::dim)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, outcome: usize) -> &ComplexMatrix {
        &self.elements[outcome]
    }

    pub fn into_elements(self) -> Vec<ComplexMatrix> {
        self.elements
    }

    /// Checks element shapes, then computes residuals.
    pub fn residuals(&self) -> Result<PovmResiduals> {
        let dim = self.dim();
        if self.elements.is_empty() || dim == 0 {
            return Err(Error::contract("POVM needs at least one element"));
        }
        if self.elements.iter().any(|e| !e.is_square() || e.dim() != dim) {
            return Err(Error::contract("POVM elements must share one square shape"));
        }
        let hermiticity = self
            .elements
            .iter()
            .map(ComplexMatrix::hermiticity_defect)
            .fold(0.0, f64::max);
        let mut min_eigenvalue = f64::INFINITY;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &self.elements {
            let eig = hermitian_eig(&e.hermitian_part())?;
            min_eigenvalue = min_eigenvalue.min(eig.min_eigenvalue());
            sum = &sum + e;
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        Ok(PovmResiduals {
            min_eigenvalue,
            completeness,
            hermiticity,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.residuals()?;
        if !r.is_valid() {
            return Err(Error::contract(format!(
                "invalid POVM: min eigenvalue {:e}, completeness residual {:e}, hermiticity {:e}",
                r.min_eigenvalue, r.completeness, r.hermiticity
            )));
        }
        Ok(())
    }

    /// Conjugates every element: E ↦ U E U†.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self {
            elements: self.elements.iter().map(|e| e.conjugate_by(u)).collect(),
        }
    }

    /// Outcome probabilities ⟨ψ|E_a|ψ⟩.
    pub fn probabilities(&self, state: &Ket) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| e.expectation(state).re)
            .collect()
    }
}

/// One POVM per setting.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    povms: Vec<Povm>,
}

impl MeasurementFamily {
    pub fn new(povms: Vec<Povm>) -> Self {
        Self { povms }
    }

    pub fn settings(&self) -> usize {
        self.povms.len()
    }

    pub fn povm(&self, setting: usize) -> &Povm {
        &self.povms[setting]
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn into_povms(self) -> Vec<Povm> {
        self.povms
    }

    /// Operator for `outcome` of `setting`.
    pub fn element(&self, setting: usize, outcome: usize) -> &ComplexMatrix {
        self.povms[setting].element(outcome)
    }

    /// Checks the family has `settings` POVMs of `outcomes` outcomes on
    /// dimension `dim`, each valid.
    pub fn validate_shape(&self, settings: usize, outcomes: usize, dim: usize) -> Result<()> {
        if self.povms.len() != settings {
            return Err(Error::contract(format!(
                "expected {settings} settings, got {}",
                self.povms.len()
            )));
        }
        for (s, p) in self.povms.iter().enumerate() {
            if p.outcomes() != outcomes || p.dim() != dim {
                return Err(Error::contract(format!(
                    "setting {s}: expected {outcomes} outcomes on dimension {dim}, got {} on {}",
                    p.outcomes(),
                    p.dim()
                )));
            }
            p.validate().map_err(|e| Error::Setting {
                setting: s,
                source: Box::new(e),
            })?;
        }
        Ok(())
    }

    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self {
            povms: self.povms.iter().map(|p| p.conjugated(u)).collect(),
        }
    }
}

/// Generic POVM: random positive operators G_a (weighted sums of `rank`
/// random projectors), normalized as S^{-1/2} G_a S^{-1/2} with S = Σ G_a.
/// Needs outcomes · rank ≥ dim so that S is invertible.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rank: usize, rng: &mut R) -> Result<Povm> {
    if dim == 0 || outcomes == 0 || rank == 0 {
        return Err(Error::contract("random POVM needs positive dimension, outcomes and rank"));
    }
    if outcomes * rank < dim {
        return Err(Error::contract(format!(
            "{outcomes} outcomes of rank {rank} cannot resolve dimension {dim}"
        )));
    }
    let raw: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let mut g = ComplexMatrix::zeros(dim, dim);
            for _ in 0..rank {
                g = &g + &random_ket(dim, rng).projector().scale_real(rng.random_range(0.1..1.0));
            }
            g
        })
        .collect();
    let total = raw.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, g| &acc + g);
    let s = hpd_inverse_sqrt(&total.hermitian_part())?;
    Ok(Povm::new(
        raw.iter()
            .map(|g| s.matmul(g).matmul(&s).hermitian_part())
            .collect(),
    ))
}
