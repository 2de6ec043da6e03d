//! Dense complex linear algebra for bipartite systems.
//!
//! Indices run over `0..d`. A composite index over a product space
//! `C^a ⊗ C^b` is flattened row-major with the first factor slowest:
//! `(i, k) ↦ i * b + k`. Every tensor product, partial trace and
//! vector/operator correspondence in the crate uses that convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance on max-entry deviations.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// True when `deviation` is above `tol` or NaN.
pub(crate) fn exceeds(deviation: f64, tol: f64) -> bool {
    deviation.is_nan() || deviation > tol
}

/// Outcome of a numerical check: pass/fail together with the measured margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub deviation: f64,
}

impl Check {
    /// A NaN deviation never passes.
    pub fn against(deviation: f64, tol: f64) -> Self {
        Check {
            passed: deviation <= tol,
            deviation,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{} (deviation {:.3e})", verdict, self.deviation)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {}x{} must be positive",
                rows, cols
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let d = diag.len();
        Self::from_fn(d, d, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// The matrix unit `|i⟩⟨j|` in dimension `d`.
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(StateVector { entries })
    }

    /// Largest entrywise modulus `max |A[i,j]|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry deviation `max |A[i,j] - B[i,j]|`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation of `A*A` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint() * self;
        gram.max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Max-entry deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("eigenvalues need a square matrix".into()));
        }
        let h = (self.clone() + &self.adjoint()).scale(Complex64::new(0.5, 0.0));
        let eig = nalgebra::SymmetricEigen::new(h.to_nalgebra());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({}, {}) out of bounds", i, j);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({}, {}) out of bounds", i, j);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; use `matmul` for a fallible product.
impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        self
    }
}

impl Sub<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(mut self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        self
    }
}

/// Complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Complex64>,
}

impl StateVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("vector dimension must be positive".into()));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch(format!("entry {} is not finite", pos)));
        }
        Ok(StateVector { entries })
    }

    /// Standard basis vector `e_k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut entries = vec![ZERO; dim];
        entries[k] = ONE;
        StateVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        StateVector {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &StateVector) -> Self {
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        StateVector { entries }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &StateVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.entries[i] * other.entries[j].conj()
        })
    }

    /// The projector `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Factorization `C^dim_a ⊗ C^dim_b` of a flat index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::DimensionMismatch(format!(
                "bipartite shape ({}, {}) must be positive",
                dim_a, dim_b
            )));
        }
        Ok(BipartiteShape { dim_a, dim_b })
    }

    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn flat(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Kronecker product; entry `((i,k),(j,l)) = A[i,j] * B[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Traces out `factor` of a square matrix on `C^dim_a ⊗ C^dim_b`.
pub fn partial_trace(m: &ComplexMatrix, shape: BipartiteShape, factor: Factor) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != shape.total() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not act on a {}x{} bipartite space",
            m.rows(),
            m.cols(),
            shape.dim_a,
            shape.dim_b
        )));
    }
    let out = match factor {
        Factor::Second => ComplexMatrix::from_fn(shape.dim_a, shape.dim_a, |i, j| {
            (0..shape.dim_b).map(|k| m[(shape.flat(i, k), shape.flat(j, k))]).sum()
        }),
        Factor::First => ComplexMatrix::from_fn(shape.dim_b, shape.dim_b, |k, l| {
            (0..shape.dim_a).map(|i| m[(shape.flat(i, k), shape.flat(i, l))]).sum()
        }),
    };
    Ok(out)
}

/// Normalized trace inner product `tr(A* B) / d`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "trace inner product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let sum: Complex64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum();
    Ok(sum / a.rows() as f64)
}

/// Reference maximally entangled vector `d^{-1/2} Σ_k e_k ⊗ e_k`.
pub fn omega_vector(d: usize) -> StateVector {
    assert!(d >= 1, "dimension must be positive");
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut entries = vec![ZERO; d * d];
    for k in 0..d {
        entries[k * d + k] = amp;
    }
    StateVector { entries }
}

/// `(A ⊗ 1) Ω` for the reference vector `Ω = omega_vector(d)`.
///
/// Component `(i, k)` equals `A[i, k] / √d`.
pub fn operator_to_vector(a: &ComplexMatrix, d: usize) -> Result<StateVector> {
    if a.rows() != d || a.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "expected a {}x{} operator, got {}x{}",
            d,
            d,
            a.rows(),
            a.cols()
        )));
    }
    let s = 1.0 / (d as f64).sqrt();
    Ok(StateVector {
        entries: a.as_slice().iter().map(|z| z * s).collect(),
    })
}

/// Inverse of [`operator_to_vector`]: `A[k, l] = √d ⟨e_k ⊗ e_l, Ψ⟩`.
pub fn vector_to_operator(psi: &StateVector, d: usize) -> Result<ComplexMatrix> {
    if psi.dim() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of dim {} is not on C^{} ⊗ C^{}",
            psi.dim(),
            d,
            d
        )));
    }
    let s = (d as f64).sqrt();
    Ok(ComplexMatrix {
        rows: d,
        cols: d,
        data: psi.entries().iter().map(|z| z * s).collect(),
    })
}

/// Transpose with respect to the computational basis.
pub fn transpose_in_basis(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "transpose_in_basis needs a square matrix".into(),
        ));
    }
    Ok(a.transpose())
}

/// Applies `A` to the first tensor factor of a vector on `C^d ⊗ C^m`.
pub fn apply_on_first(a: &ComplexMatrix, psi: &StateVector) -> Result<StateVector> {
    let d = a.rows();
    if !a.is_square() || !psi.dim().is_multiple_of(d) {
        return Err(Error::DimensionMismatch(format!(
            "cannot apply {}x{} on the first factor of dim {}",
            a.rows(),
            a.cols(),
            psi.dim()
        )));
    }
    let m = psi.dim() / d;
    let v = psi.entries();
    let mut out = vec![ZERO; psi.dim()];
    for i in 0..d {
        for j in 0..d {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..m {
                out[i * m + k] += aij * v[j * m + k];
            }
        }
    }
    Ok(StateVector { entries: out })
}

/// Checks that `Ψ` on `C^d ⊗ C^d` has maximally mixed reduction `1/d`.
pub fn is_maximally_entangled(psi: &StateVector, d: usize, tol: f64) -> Result<Check> {
    if psi.dim() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of dim {} is not on C^{} ⊗ C^{}",
            psi.dim(),
            d,
            d
        )));
    }
    let norm_dev = (psi.norm_sqr() - 1.0).abs();
    if norm_dev > tol {
        return Err(Error::NotNormalized { deviation: norm_dev });
    }
    let shape = BipartiteShape::square(d)?;
    let reduced = partial_trace(&psi.projector(), shape, Factor::Second)?;
    let target = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
    Ok(Check::against(reduced.max_abs_diff(&target), tol))
}

/// Completeness test: `Σ_k |φ_k⟩⟨φ_k| = 1` for exactly `D`
/// vectors of dimension `D`.
///
/// The reported deviation is the larger of the completeness deviation and
/// the Gram-matrix deviation from the identity, so a pass certifies both
/// sides of the equivalence.
pub fn check_projector_completeness(vectors: &[StateVector], tol: f64) -> Result<Check> {
    let dim = match vectors.first() {
        Some(v) => v.dim(),
        None => return Err(Error::CountMismatch { expected: 1, found: 0 }),
    };
    if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "vectors of dims {} and {} in one family",
            dim,
            bad.dim()
        )));
    }
    if vectors.len() != dim {
        return Err(Error::CountMismatch {
            expected: dim,
            found: vectors.len(),
        });
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for v in vectors {
        let e = v.entries();
        for i in 0..dim {
            for j in 0..dim {
                sum[(i, j)] += e[i] * e[j].conj();
            }
        }
    }
    let completeness = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    let gram = ComplexMatrix::from_fn(dim, dim, |i, j| vectors[i].inner(&vectors[j]));
    let orthonormality = gram.max_abs_diff(&ComplexMatrix::identity(dim));
    Ok(Check::against(completeness.max(orthonormality), tol))
}

/// The Pauli matrices `σ_x, σ_y, σ_z`.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, -ONE])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_unitary, seeded};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_shape() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c((i + j) as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c((i * j) as f64));
        let t = tensor_product(&a, &b);
        assert_eq!((t.rows(), t.cols()), (6, 6));
    }

    #[test]
    fn sigma_x_tensor_sigma_z() {
        // σx ⊗ σz = [[0, σz], [σz, 0]]
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(tensor_product(&pauli_x(), &pauli_z()), expected);
    }

    #[test]
    fn partial_trace_of_omega_is_maximally_mixed() {
        for d in 1..=5 {
            let rho = omega_vector(d).projector();
            let red = partial_trace(&rho, BipartiteShape::square(d).unwrap(), Factor::Second).unwrap();
            let target = ComplexMatrix::identity(d).scale(c(1.0 / d as f64));
            assert!(red.max_abs_diff(&target) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded(1);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 3, 3);
        let shape = BipartiteShape::new(2, 3).unwrap();
        let ab = tensor_product(&a, &b);
        let red = partial_trace(&ab, shape, Factor::Second).unwrap();
        assert!(red.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        let red = partial_trace(&ab, shape, Factor::First).unwrap();
        assert!(red.max_abs_diff(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn partial_trace_matches_index_sum_oracle() {
        let mut rng = seeded(2);
        let m = random_matrix(&mut rng, 6, 6);
        let shape = BipartiteShape::new(2, 3).unwrap();
        // Oracle: explicit triple loop over the unflattened indices.
        let mut oracle = [[ZERO; 2]; 2];
        for (i, row) in oracle.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                for k in 0..3 {
                    *entry += m.as_slice()[(i * 3 + k) * 6 + (j * 3 + k)];
                }
            }
        }
        let red = partial_trace(&m, shape, Factor::Second).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((red[(i, j)] - oracle[i][j]).norm() < 1e-14);
            }
        }
        assert!((red.trace() - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_shape() {
        let m = ComplexMatrix::identity(5);
        let err = partial_trace(&m, BipartiteShape::new(2, 3).unwrap(), Factor::First).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn trace_inner_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(trace_inner(&id, &id).unwrap(), ONE);
        assert_eq!(trace_inner(&pauli_x(), &pauli_z()).unwrap(), ZERO);
        let mut rng = seeded(3);
        let u = random_unitary(&mut rng, 4);
        assert!((trace_inner(&u, &u).unwrap() - ONE).norm() < 1e-13);
        assert!(trace_inner(&id, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn omega_vector_examples() {
        assert_eq!(omega_vector(1).entries(), &[ONE]);
        let o2 = omega_vector(2);
        let expected = StateVector::new(vec![c(H), ZERO, ZERO, c(H)]).unwrap();
        assert!(o2.max_abs_diff(&expected) < 1e-15);
        let o3 = omega_vector(3);
        for (k, z) in o3.entries().iter().enumerate() {
            let expected = if [0, 4, 8].contains(&k) { 1.0 / 3f64.sqrt() } else { 0.0 };
            assert!((z - c(expected)).norm() < 1e-15);
        }
    }

    #[test]
    fn operator_to_vector_examples() {
        let d = 2;
        assert_eq!(
            operator_to_vector(&ComplexMatrix::identity(d), d).unwrap(),
            omega_vector(d)
        );
        let sx = operator_to_vector(&pauli_x(), d).unwrap();
        assert!(sx.max_abs_diff(&StateVector::new(vec![ZERO, c(H), c(H), ZERO]).unwrap()) < 1e-15);
        let p = ComplexMatrix::diagonal(&[ONE, ZERO]);
        let v = operator_to_vector(&p, d).unwrap();
        assert!(v.max_abs_diff(&StateVector::new(vec![c(H), ZERO, ZERO, ZERO]).unwrap()) < 1e-15);
        assert!((v.norm_sqr() - 0.5).abs() < 1e-15);
        assert!(operator_to_vector(&p, 3).is_err());
    }

    #[test]
    fn vector_to_operator_examples() {
        assert!(
            vector_to_operator(&omega_vector(3), 3)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(3))
                < 1e-15
        );
        let v = StateVector::new(vec![ZERO, c(H), c(H), ZERO]).unwrap();
        assert!(vector_to_operator(&v, 2).unwrap().max_abs_diff(&pauli_x()) < 1e-15);
        assert!(vector_to_operator(&v, 3).is_err());
    }

    #[test]
    fn vector_operator_round_trip() {
        let mut rng = seeded(4);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 3, 3);
            let back = vector_to_operator(&operator_to_vector(&a, 3).unwrap(), 3).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-14);
        }
    }

    #[test]
    fn transpose_examples() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(transpose_in_basis(&id).unwrap(), id);
        let sy = pauli_y();
        assert_eq!(transpose_in_basis(&sy).unwrap(), sy.scale(-ONE));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(transpose_in_basis(&rect).is_err());
    }

    #[test]
    fn transpose_trick_on_omega() {
        // (A ⊗ 1)Ω = (1 ⊗ A^T)Ω
        let mut rng = seeded(5);
        let d = 3;
        let omega = omega_vector(d);
        let id = ComplexMatrix::identity(d);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, d, d);
            let lhs = tensor_product(&a, &id).apply(&omega).unwrap();
            let rhs = tensor_product(&id, &transpose_in_basis(&a).unwrap())
                .apply(&omega)
                .unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn apply_on_first_matches_kron() {
        let mut rng = seeded(6);
        let a = random_matrix(&mut rng, 3, 3);
        let psi = StateVector::new(random_matrix(&mut rng, 12, 1).as_slice().to_vec()).unwrap();
        let direct = tensor_product(&a, &ComplexMatrix::identity(4)).apply(&psi).unwrap();
        assert!(apply_on_first(&a, &psi).unwrap().max_abs_diff(&direct) < 1e-13);
    }

    #[test]
    fn maximal_entanglement_examples() {
        for d in 1..=4 {
            let chk = is_maximally_entangled(&omega_vector(d), d, DEFAULT_TOL).unwrap();
            assert!(chk.passed);
            // 0 up to the rounding of (1/√d)² against 1/d
            assert!(chk.deviation < 1e-15);
        }
        let prod = StateVector::basis(4, 0);
        let chk = is_maximally_entangled(&prod, 2, DEFAULT_TOL).unwrap();
        assert!(!chk.passed);
        assert!((chk.deviation - 0.5).abs() < 1e-15);

        let mut rng = seeded(7);
        let u = random_unitary(&mut rng, 3);
        let psi = apply_on_first(&u, &omega_vector(3)).unwrap();
        assert!(is_maximally_entangled(&psi, 3, DEFAULT_TOL).unwrap().passed);
        // and the extracted operator is unitary
        assert!(vector_to_operator(&psi, 3).unwrap().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn maximal_entanglement_errors() {
        let v = StateVector::basis(4, 0).scale(c(2.0));
        assert!(matches!(
            is_maximally_entangled(&v, 2, DEFAULT_TOL),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            is_maximally_entangled(&StateVector::basis(5, 0), 2, DEFAULT_TOL),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn projector_completeness_examples() {
        let std3: Vec<_> = (0..3).map(|k| StateVector::basis(3, k)).collect();
        let chk = check_projector_completeness(&std3, DEFAULT_TOL).unwrap();
        assert!(chk.passed);
        assert_eq!(chk.deviation, 0.0);

        let copies = vec![StateVector::basis(3, 0); 3];
        assert!(!check_projector_completeness(&copies, DEFAULT_TOL).unwrap().passed);

        let too_few = vec![StateVector::basis(3, 0); 2];
        assert!(matches!(
            check_projector_completeness(&too_few, DEFAULT_TOL),
            Err(Error::CountMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn projector_completeness_of_pauli_bell_family() {
        let ops = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
        let vecs: Vec<_> = ops
            .iter()
            .map(|u| apply_on_first(u, &omega_vector(2)).unwrap())
            .collect();
        assert!(check_projector_completeness(&vecs, DEFAULT_TOL).unwrap().passed);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let err = ComplexMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
    }
}
