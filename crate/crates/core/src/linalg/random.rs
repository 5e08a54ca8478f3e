//! Seeded random structured matrices.

use super::{hamiltonian_part, hermitian_part, mat_exp, CMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    Hermitian,
    Hamiltonian,
    Symplectic,
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Deterministic in `(kind, n, seed)`:
/// - `Hermitian`: symmetrization of a random `n x n` matrix;
/// - `Hamiltonian`: Hamiltonian projection of a random `2n x 2n` matrix;
/// - `Symplectic`: exponential of a random Hamiltonian, normalized so the
///   exponential stays well conditioned.
pub fn random_instance(kind: RandomKind, n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5f3759df);
    match kind {
        RandomKind::Hermitian => hermitian_part(&random_complex(&mut rng, n, n)),
        RandomKind::Hamiltonian => {
            hamiltonian_part(&random_complex(&mut rng, 2 * n, 2 * n)).expect("even dimension")
        }
        RandomKind::Symplectic => {
            let h = hamiltonian_part(&random_complex(&mut rng, 2 * n, 2 * n)).expect("even");
            let h = h.scale(1.0 / h.norm().max(1.0));
            mat_exp(&h).expect("bounded norm")
        }
    }
}
