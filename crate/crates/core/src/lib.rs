//! Unitary operator bases and the objects equivalent to them: orthonormal
//! bases of maximally entangled vectors, unitary depolarizers, and tight
//! teleportation and dense-coding schemes.
//!
//! Bases are built from Latin squares and complex Hadamard matrices
//! (shift-and-multiply construction), converted into the other objects, and
//! every defining identity can be checked numerically. Checks return the
//! measured deviation so callers choose their own thresholds.
//!
//! Indices are zero based throughout; composite indices on `C^a ⊗ C^b` are
//! row-major with the first factor slowest.

pub mod bases;
pub mod cli;
pub mod designs;
pub mod document;
pub mod error;
pub mod linalg;
pub mod random;
pub mod schemes;

pub use bases::{
    apply_equivalence, recover_weight_from_unitary_gram, shift_multiply_basis, tensor_bases, verify_depolarizer,
    verify_orthonormal, weighted_gram, weyl_basis, GramReport, UnitaryBasis,
};
pub use designs::{
    count_normalized_latin, dephase_hadamard, fourier_hadamard, hadamard_d4_family, latin_equivalence_apply,
    latin_from_cyclic, periodic_phase_hadamard, validate_hadamard, validate_latin, HadamardMatrix, LatinSquare,
};
pub use error::{Error, Result};
pub use linalg::{Check, ComplexMatrix, StateVector, DEFAULT_TOL};
pub use schemes::{
    basis_to_entangled, build_scheme, entangled_to_basis, extract_basis_from_scheme, swap_roles, teleport_state,
    verify_dense_coding, verify_teleportation, MaxEntangledBasis, Mode, SchemeVerdict, TightScheme,
};

pub use num_complex::Complex64;
