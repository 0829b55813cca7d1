//! The explicit 2^(3)→1 strategy checked against expressions derived by
//! hand from its entries, independently of the probability-table code.

use num_complex::Complex64;
use rac_core::earac::{
    bell_rac_value, earac_23_success, explicit_23_closed_form, explicit_23_instance, explicit_23_strategy,
    explicit_a00, probability_table,
};
use rac_core::linalg::ComplexMatrix;
use rac_core::qudit::root_of_unity;

fn det2(m: &ComplexMatrix, i: usize, j: usize) -> Complex64 {
    m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)]
}

/// A_0^0 is a rank-one projector: characteristic polynomial t³ − t².
#[test]
fn a00_characteristic_polynomial() {
    let a = explicit_a00();
    let trace = a.trace();
    let minors = det2(&a, 0, 1) + det2(&a, 0, 2) + det2(&a, 1, 2);
    let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    assert!((trace - 1.0).norm() < 1e-14);
    assert!(minors.norm() < 1e-14);
    assert!(det.norm() < 1e-14);
    assert!(a.matmul(&a).max_abs_diff(&a) < 1e-14);
    assert!(a.is_hermitian(1e-15));
}

/// y = 0: P(a, b | x, 0) = λ_{a+b, a+b} / 3, so 7/27 on a + b ≡ 0 and 1/27
/// elsewhere.
#[test]
fn computational_setting_structure() {
    let inst = explicit_23_instance();
    let t = probability_table(&inst, &explicit_23_strategy()).unwrap();
    for x in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let want = if (a + b) % 3 == 0 { 7.0 / 27.0 } else { 1.0 / 27.0 };
                assert!((t.get(x, 0, a, b) - want).abs() < 1e-14, "x={x} a={a} b={b}");
            }
        }
    }
}

/// y = 1: P(a, b | x, 1) = (1/9) Σ_{k,k'} λ_{k,k'} ω^{(k−k')(a+b−x+1)}.
#[test]
fn fourier_setting_matches_entry_sum() {
    let inst = explicit_23_instance();
    let t = probability_table(&inst, &explicit_23_strategy()).unwrap();
    let l = explicit_a00();
    for x in 0..3i64 {
        for a in 0..3i64 {
            for b in 0..3i64 {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..3i64 {
                    for kp in 0..3i64 {
                        sum += l[(k as usize, kp as usize)] * root_of_unity(3, (k - kp) * (a + b - x + 1));
                    }
                }
                let want = sum.re / 9.0;
                assert!(sum.im.abs() < 1e-14);
                let got = t.get(x as usize, 1, a as usize, b as usize);
                assert!((got - want).abs() < 1e-14, "x={x} a={a} b={b}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn both_paths_give_seven_ninths() {
    let inst = explicit_23_instance();
    let t = probability_table(&inst, &explicit_23_strategy()).unwrap();
    assert!((bell_rac_value(&inst, &t).unwrap() - 7.0 / 9.0).abs() < 1e-12);
    assert!((explicit_23_closed_form() - 7.0 / 9.0).abs() < 1e-12);
    assert!((earac_23_success().unwrap() - 7.0 / 9.0).abs() < 1e-12);
}
