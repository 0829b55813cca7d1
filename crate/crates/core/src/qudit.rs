//! Qudit toolbox: clock and shift operators, the Fourier basis, maximally
//! entangled states and Haar-random unitaries.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Ket, ONE, ZERO};

/// Which way the shift operator moves computational basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftConvention {
    /// X = Σ_k |k⟩⟨k+1|, so X|j⟩ = |j−1⟩.
    Raise,
    /// X = Σ_k |k⟩⟨k−1|, so X|j⟩ = |j+1⟩.
    Lower,
}

/// Reduces a (possibly negative) index modulo `d`. All outcome and ket
/// index arithmetic goes through here.
pub fn wrap(index: i64, d: usize) -> usize {
    index.rem_euclid(d as i64) as usize
}

/// ω^k with ω = e^{2πi/d}, reduced exactly before taking the exponential.
pub fn root_of_unity(d: usize, k: i64) -> Complex64 {
    let r = wrap(k, d);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
}

fn require_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::contract("qudit dimension must be at least 1"));
    }
    Ok(())
}

/// Z = Σ_k ω^k |k⟩⟨k|.
pub fn clock_operator(d: usize) -> Result<ComplexMatrix> {
    require_dim(d)?;
    let diag: Vec<_> = (0..d).map(|k| root_of_unity(d, k as i64)).collect();
    Ok(ComplexMatrix::from_diag(&diag))
}

pub fn shift_operator(d: usize, conv: ShiftConvention) -> Result<ComplexMatrix> {
    require_dim(d)?;
    let offset: i64 = match conv {
        ShiftConvention::Raise => 1,
        ShiftConvention::Lower => -1,
    };
    Ok(ComplexMatrix::from_fn(d, d, |row, col| {
        if col == wrap(row as i64 + offset, d) {
            ONE
        } else {
            ZERO
        }
    }))
}

/// |e_l⟩ = d^{-1/2} Σ_k ω^{kl} |k⟩.
pub fn fourier_ket(d: usize, l: usize) -> Result<Ket> {
    if l >= d {
        return Err(Error::contract(format!(
            "Fourier index {l} out of range for d = {d}"
        )));
    }
    let norm = 1.0 / (d as f64).sqrt();
    Ok(Ket::new(
        (0..d)
            .map(|k| root_of_unity(d, (k * l) as i64) * norm)
            .collect(),
    ))
}

/// d^{-1/2} Σ_k |kk⟩ on C^d ⊗ C^d.
pub fn max_entangled(d: usize) -> Result<Ket> {
    require_dim(d)?;
    let mut amps = vec![ZERO; d * d];
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        amps[k * d + k] = a;
    }
    Ok(Ket::new(amps))
}

/// Seeded generator for stream `stream` of run `seed`. Streams of the same
/// seed are independent and reproducible across platforms.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Ginibre
/// matrix. Gram-Schmidt yields a positive real R diagonal, which is the
/// phase correction that makes the law Haar.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "random_unitary needs d >= 1");
    let g: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for col in g {
        let mut v = col;
        // Two passes of modified Gram-Schmidt for orthogonality to 1e-15.
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= n;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Haar-random pure state.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    let v = Ket::new((0..d).map(|_| complex_gaussian(rng)).collect());
    v.normalized().expect("Gaussian vector is almost surely nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;

    const TOL: f64 = 1e-12;

    #[test]
    fn clock_small_cases() {
        assert_eq!(clock_operator(1).unwrap(), ComplexMatrix::identity(1));
        let z2 = clock_operator(2).unwrap();
        assert!(z2.max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, -1.0])) < TOL);
        let z3 = clock_operator(3).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(z3.max_abs_diff(&ComplexMatrix::from_diag(&[ONE, w, w * w])) < TOL);
        assert!(clock_operator(0).unwrap_err().is_contract_violation());
    }

    #[test]
    fn clock_and_shift_are_unitary_of_order_d() {
        for d in 1..=6 {
            let z = clock_operator(d).unwrap();
            assert!(z.pow(d).max_abs_diff(&ComplexMatrix::identity(d)) < TOL);
            for conv in [ShiftConvention::Raise, ShiftConvention::Lower] {
                let x = shift_operator(d, conv).unwrap();
                assert!(x.matmul(&x.adjoint()).max_abs_diff(&ComplexMatrix::identity(d)) < TOL);
                assert_eq!(x.pow(d), ComplexMatrix::identity(d));
            }
        }
        assert!(shift_operator(0, ShiftConvention::Lower).is_err());
    }

    #[test]
    fn qubit_shift_is_pauli_x() {
        let px = ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert_eq!(shift_operator(2, ShiftConvention::Raise).unwrap(), px);
        assert_eq!(shift_operator(2, ShiftConvention::Lower).unwrap(), px);
    }

    #[test]
    fn lower_shift_raises_basis_index() {
        let x = shift_operator(3, ShiftConvention::Lower).unwrap();
        assert_eq!(x.apply(&Ket::basis(3, 0)), Ket::basis(3, 1));
        let x = shift_operator(3, ShiftConvention::Raise).unwrap();
        assert_eq!(x.apply(&Ket::basis(3, 0)), Ket::basis(3, 2));
    }

    #[test]
    fn weyl_commutation() {
        for d in 2..=6 {
            let z = clock_operator(d).unwrap();
            let w = root_of_unity(d, 1);
            let xl = shift_operator(d, ShiftConvention::Lower).unwrap();
            let xr = shift_operator(d, ShiftConvention::Raise).unwrap();
            assert!(z.matmul(&xl).max_abs_diff(&xl.matmul(&z).scale(w)) < TOL);
            assert!(z.matmul(&xr).max_abs_diff(&xr.matmul(&z).scale(w.conj())) < TOL);
        }
    }

    #[test]
    fn fourier_kets() {
        let e0 = fourier_ket(2, 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e0.amplitudes()[0] - s).norm() < TOL && (e0.amplitudes()[1] - s).norm() < TOL);
        let e1 = fourier_ket(3, 1).unwrap();
        let w = root_of_unity(3, 1);
        let r = 1.0 / 3f64.sqrt();
        for (k, want) in [ONE, w, w * w].iter().enumerate() {
            assert!((e1.amplitudes()[k] - want * r).norm() < TOL);
        }
        assert!(fourier_ket(3, 3).unwrap_err().is_contract_violation());
    }

    #[test]
    fn fourier_basis_is_orthonormal_and_unbiased() {
        for d in 2..=6 {
            let basis: Vec<_> = (0..d).map(|l| fourier_ket(d, l).unwrap()).collect();
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((a.inner(b) - Complex64::new(want, 0.0)).norm() < TOL);
                }
                for k in 0..d {
                    let overlap = Ket::basis(d, k).inner(a).norm_sqr();
                    assert!((overlap - 1.0 / d as f64).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn fourier_kets_diagonalize_shift() {
        for d in 2..=6 {
            let x = shift_operator(d, ShiftConvention::Lower).unwrap();
            for l in 0..d {
                let e = fourier_ket(d, l).unwrap();
                let xe = x.apply(&e);
                // X|e_l⟩ = c|e_l⟩ with |c| = 1.
                let c = e.inner(&xe);
                assert!((c.norm() - 1.0).abs() < TOL);
                let resid = xe.add(&e.scale(-c));
                assert!(resid.norm() < TOL);
            }
        }
    }

    #[test]
    fn max_entangled_marginals() {
        let s = max_entangled(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = Ket::new(vec![
            Complex64::new(h, 0.0),
            ZERO,
            ZERO,
            Complex64::new(h, 0.0),
        ]);
        assert!(s.add(&want.scale(-ONE)).norm() < TOL);
        for d in 1..=4 {
            let rho = max_entangled(d).unwrap().projector();
            let id = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            assert!(rho.partial_trace_b(d, d).unwrap().max_abs_diff(&id) < TOL);
            assert!(rho.partial_trace_a(d, d).unwrap().max_abs_diff(&id) < TOL);
        }
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = seeded_rng(42, 0);
        let u = random_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        for _ in 0..100 {
            let u = random_unitary(3, &mut rng);
            assert!(u.matmul(&u.adjoint()).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
        }
    }

    #[test]
    fn random_unitary_moments() {
        // For Haar U on C^d, E|U_ij|^2 = 1/d and E|U_ij|^4 = 2/(d(d+1)).
        let d = 3;
        let mut rng = seeded_rng(2024, 1);
        let draws = 10_000;
        let mut m2 = vec![0.0; d * d];
        let mut m4 = 0.0;
        for _ in 0..draws {
            let u = random_unitary(d, &mut rng);
            for i in 0..d {
                for j in 0..d {
                    let p = u[(i, j)].norm_sqr();
                    m2[i * d + j] += p;
                    m4 += p * p;
                }
            }
        }
        for s in &m2 {
            // std of |U_ij|^2 is sqrt(1/6 - 1/9) ~ 0.236; 4 sigma on the mean.
            assert!((s / draws as f64 - 1.0 / 3.0).abs() < 4.0 * 0.236 / (draws as f64).sqrt());
        }
        let m4 = m4 / (draws * d * d) as f64;
        assert!((m4 - 2.0 / 12.0).abs() < 0.01);
    }

    #[test]
    fn seeded_streams_reproduce() {
        let a = random_unitary(4, &mut seeded_rng(9, 3));
        let b = random_unitary(4, &mut seeded_rng(9, 3));
        let c = random_unitary(4, &mut seeded_rng(9, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_ket_is_normalized() {
        let mut rng = seeded_rng(1, 1);
        let k = random_ket(9, &mut rng);
        assert!(k.is_normalized(1e-12));
        // Spectrum of a rank-one projector.
        let eig = hermitian_eig(&k.projector()).unwrap();
        assert!((eig.max_eigenvalue() - 1.0).abs() < 1e-10);
    }
}
