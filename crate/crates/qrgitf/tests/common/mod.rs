//! Shared helpers for the integration suites: seeded random two-qubit states
//! drawn from the Ginibre construction G G-dagger / tr.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qrgitf::qcore::{ComplexMatrix4, TwoQubitDensityMatrix};

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// Random mixed state of the given rank (1..=4); rank 1 gives a pure state.
pub fn random_state(rng: &mut ChaCha8Rng, rank: usize) -> TwoQubitDensityMatrix {
    assert!((1..=4).contains(&rank));
    loop {
        let g: Vec<Vec<Complex64>> = (0..4)
            .map(|_| {
                (0..rank)
                    .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                    .collect()
            })
            .collect();
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        let mut tr = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..rank {
                    acc += g[r][k] * g[c][k].conj();
                }
                entries[r][c] = acc;
                if r == c {
                    tr += acc.re;
                }
            }
        }
        if tr < 1e-6 {
            continue;
        }
        for row in &mut entries {
            for z in row.iter_mut() {
                *z /= tr;
            }
        }
        match TwoQubitDensityMatrix::new(ComplexMatrix4::new(entries).unwrap()) {
            Ok(rho) => return rho,
            Err(_) => continue,
        }
    }
}

