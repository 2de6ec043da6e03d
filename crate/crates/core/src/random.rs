//! Seeded random sampling of matrices, states and permutations.
//!
//! All randomness in the crate flows through an explicit seed so that
//! generated documents and test fixtures are reproducible.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, StateVector, ZERO};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// Random unit vector of dimension `dim`.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    StateVector::new(v.into_iter().map(|z| z / norm).collect()).expect("finite gaussian sample")
}

/// Haar-distributed unitary via Gram-Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v: Vec<Complex64> = (0..d).map(|i| g[(i, j)]).collect();
        // two passes keep the columns orthogonal to rounding
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Random full-rank density operator `G G* / tr(G G*)`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    let mut rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    // exact Hermiticity
    for i in 0..d {
        rho[(i, i)].im = 0.0;
        for j in i + 1..d {
            let z = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
            rho[(i, j)] = z;
            rho[(j, i)] = z.conj();
        }
    }
    rho
}

pub fn random_permutation(rng: &mut impl Rng, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    p
}

/// Diagonal unitary with uniformly random phases.
pub fn random_diagonal_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let phases: Vec<Complex64> = (0..d).map(|_| random_phase(rng)).collect();
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, p) in phases.into_iter().enumerate() {
        m[(i, i)] = p;
    }
    debug_assert!(m.as_slice().iter().any(|z| *z != ZERO));
    m
}
