#![allow(dead_code)]

use rac_core::earac::{BellRacInstance, BipartiteStrategy};
use rac_core::linalg::ComplexMatrix;
use rac_core::measurement::{random_povm, MeasurementFamily};
use rac_core::qudit::{random_ket, random_unitary};
use rac_core::scenario::Scenario;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SCENARIOS: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)];

pub fn random_instance(rng: &mut ChaCha8Rng) -> BellRacInstance {
    let (n, d) = SCENARIOS[rng.random_range(0..SCENARIOS.len())];
    BellRacInstance::new(Scenario::new(n, d).unwrap())
}

/// Generic POVMs (not projective), random local dimensions d or d + 1.
pub fn random_strategy(inst: &BellRacInstance, rng: &mut ChaCha8Rng) -> BipartiteStrategy {
    let d = inst.outcomes();
    let da = d + rng.random_range(0..2);
    let db = d + rng.random_range(0..2);
    let family = |settings: usize, dim: usize, rng: &mut ChaCha8Rng| {
        MeasurementFamily::new(
            (0..settings)
                .map(|_| {
                    let rank = rng.random_range(dim.div_ceil(d)..=dim);
                    random_povm(dim, d, rank, rng).unwrap()
                })
                .collect(),
        )
    };
    let alice = family(inst.alice_settings(), da, rng);
    let bob = family(inst.bob_settings(), db, rng);
    BipartiteStrategy {
        state: random_ket(da * db, rng),
        dim_a: da,
        dim_b: db,
        alice,
        bob,
    }
}

/// U diag(λ) U† with λ uniform in [−1, 1].
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u = random_unitary(dim, rng);
    ComplexMatrix::from_real_diag(&spectrum).conjugate_by(&u).hermitian_part()
}
