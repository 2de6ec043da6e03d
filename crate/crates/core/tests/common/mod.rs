#![allow(dead_code)]

use unibasis::designs::{hadamard_d4_family, HadamardMatrix};
use unibasis::linalg::{pauli_x, pauli_y, pauli_z, trace_inner};
use unibasis::random::{random_phase, seeded};
use unibasis::{
    fourier_hadamard, latin_from_cyclic, shift_multiply_basis, tensor_bases, weyl_basis, Complex64, ComplexMatrix,
    UnitaryBasis,
};

pub struct NamedBasis {
    pub name: String,
    pub basis: UnitaryBasis,
}

fn named(name: impl Into<String>, basis: UnitaryBasis) -> NamedBasis {
    NamedBasis {
        name: name.into(),
        basis,
    }
}

pub fn cyclic_fourier(d: usize) -> UnitaryBasis {
    let h: Vec<HadamardMatrix> = (0..d).map(|_| fourier_hadamard(d)).collect();
    shift_multiply_basis(&latin_from_cyclic(d), &h).unwrap()
}

/// Five phases drawn from a fixed seed.
pub fn d4_phases() -> Vec<Complex64> {
    let mut rng = seeded(0xd4);
    (0..5).map(|_| random_phase(&mut rng)).collect()
}

pub fn d4_family_basis(u: Complex64) -> UnitaryBasis {
    let h = hadamard_d4_family(u).unwrap();
    shift_multiply_basis(&latin_from_cyclic(4), &vec![h; 4]).unwrap()
}

/// Every construction path exercised by the acceptance suite.
pub fn basis_set() -> Vec<NamedBasis> {
    let mut out = Vec::new();
    for d in 2..=6 {
        out.push(named(format!("weyl d={}", d), weyl_basis(d)));
    }
    for d in 2..=5 {
        out.push(named(
            format!("shift-multiply cyclic/fourier d={}", d),
            cyclic_fourier(d),
        ));
    }
    for (n, u) in d4_phases().into_iter().enumerate() {
        out.push(named(
            format!("shift-multiply d4-family u#{} (arg {:.3})", n, u.arg()),
            d4_family_basis(u),
        ));
    }
    out.push(named("tensor (2,2)", tensor_bases(&weyl_basis(2), &weyl_basis(2))));
    out.push(named("tensor (2,3)", tensor_bases(&weyl_basis(2), &weyl_basis(3))));
    out
}

/// If `u` is a unimodular multiple of one of `I, σx, σy, σz`, returns its index.
pub fn pauli_match(u: &ComplexMatrix, tol: f64) -> Option<usize> {
    let paulis = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    paulis.iter().position(|p| {
        let c = trace_inner(p, u).unwrap();
        (c.norm() - 1.0).abs() <= tol && p.scale(c).max_abs_diff(u) <= tol
    })
}

/// Schmidt-form resource `√p e0e0 + √(1-p) e1e1` as a density matrix.
pub fn partially_entangled(p: f64) -> ComplexMatrix {
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    psi[0] = Complex64::new(p.sqrt(), 0.0);
    psi[3] = Complex64::new((1.0 - p).sqrt(), 0.0);
    ComplexMatrix::from_fn(4, 4, |i, j| psi[i] * psi[j].conj())
}

/// Regression floor for the rigidity suite.
pub fn rigidity_floor(p: f64) -> f64 {
    (1.0 - 2.0 * (p * (1.0 - p)).sqrt()) / 4.0 * 0.5
}
