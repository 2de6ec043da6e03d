//! Unitary operator bases: shift-and-multiply and group-type constructions,
//! orthonormality and depolarizer checks, weighted Gram matrices.
//!
//! A shift-and-multiply element acts as `U_ij |k⟩ = H^j[i, k] |λ(j, k)⟩` and
//! carries the flat label `x = i * d + j`.

use num_complex::Complex64;

use crate::designs::{
    fourier_hadamard, latin_from_cyclic, validate_hadamard, validate_latin, HadamardMatrix, LatinSquare,
};
use crate::error::{Error, Result};
use crate::linalg::{exceeds, tensor_product, trace_inner, Check, ComplexMatrix, DEFAULT_TOL, ZERO};

/// A family of `d²` operators on `C^d`, intended to be an orthonormal
/// unitary basis.
///
/// Values built by the constructors in this module are verified bases.
/// [`UnitaryBasis::from_raw`] only checks shapes, so that deliberately
/// broken families can be fed to the verifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBasis {
    d: usize,
    elements: Vec<ComplexMatrix>,
    labels: Option<Vec<(usize, usize)>>,
}

impl UnitaryBasis {
    /// Checks only that there are `d²` square matrices of size `d`.
    pub fn from_raw(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let d = match elements.first() {
            Some(m) => m.rows(),
            None => return Err(Error::CountMismatch { expected: 1, found: 0 }),
        };
        if elements.len() != d * d {
            return Err(Error::CountMismatch {
                expected: d * d,
                found: elements.len(),
            });
        }
        if let Some(x) = elements.iter().position(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "element {} is {}x{}, expected {}x{}",
                x,
                elements[x].rows(),
                elements[x].cols(),
                d,
                d
            )));
        }
        Ok(UnitaryBasis {
            d,
            elements,
            labels: None,
        })
    }

    /// Like [`from_raw`](Self::from_raw) but rejects families that fail
    /// [`verify_orthonormal`] at `tol`.
    pub fn new(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let basis = Self::from_raw(elements)?;
        let report = verify_orthonormal(&basis, tol);
        if !report.passed {
            return Err(Error::DesignInvalid(format!(
                "not an orthonormal unitary basis (gram deviation {:.3e}, unitarity deviation {:.3e})",
                report.max_deviation,
                report.unitarity_deviation.unwrap_or(0.0)
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &ComplexMatrix {
        &self.elements[x]
    }

    pub fn into_elements(self) -> Vec<ComplexMatrix> {
        self.elements
    }

    /// Shift-and-multiply label `(i, j)` of element `x`, if recorded.
    pub fn label(&self, x: usize) -> Option<(usize, usize)> {
        self.labels.as_ref().map(|l| l[x])
    }

    pub fn labels(&self) -> Option<&[(usize, usize)]> {
        self.labels.as_deref()
    }

    /// Attaches `(i, j)` labels; they must be distinct pairs in `0..d`.
    pub fn with_labels(mut self, labels: Vec<(usize, usize)>) -> Result<Self> {
        let d = self.d;
        let mut seen = vec![false; d * d];
        let ok = labels.len() == self.elements.len()
            && labels
                .iter()
                .all(|&(i, j)| i < d && j < d && !std::mem::replace(&mut seen[i * d + j], true));
        if !ok {
            return Err(Error::DesignInvalid(
                "labels must be distinct (i, j) pairs covering 0..d".into(),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Flat index of the element labelled `(i, j)`.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|&l| l == (i, j))
    }
}

/// Gram matrix of a family under a (possibly weighted) trace form.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub gram: ComplexMatrix,
    /// `max |gram - 1|`.
    pub max_deviation: f64,
    /// Worst `max |U*U - 1|` over elements; `None` for weighted Gram matrices.
    pub unitarity_deviation: Option<f64>,
    pub passed: bool,
}

/// Builds `U_ij` from raw data without validating the design.
///
/// `U_ij[λ(j, k), k] = H^j[i, k]`. Only shapes and symbol ranges are
/// checked, so non-Latin grids or non-Hadamard matrices produce a family
/// that is generally not a basis.
pub fn shift_multiply_operators(grid: &[Vec<usize>], hadamards: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let d = grid.len();
    if d == 0 || grid.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch("grid must be square and non-empty".into()));
    }
    if hadamards.len() != d {
        return Err(Error::DesignInvalid(format!(
            "need exactly {} Hadamard matrices, got {}",
            d,
            hadamards.len()
        )));
    }
    if let Some(h) = hadamards.iter().find(|h| h.rows() != d || h.cols() != d) {
        return Err(Error::DimensionMismatch(format!(
            "Hadamard matrix is {}x{}, expected {}x{}",
            h.rows(),
            h.cols(),
            d,
            d
        )));
    }
    for (row, line) in grid.iter().enumerate() {
        if let Some(col) = line.iter().position(|&s| s >= d) {
            return Err(Error::SymbolOutOfRange {
                row,
                col,
                symbol: line[col],
                d,
            });
        }
    }
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for (j, h) in hadamards.iter().enumerate() {
            let mut u = ComplexMatrix::zeros(d, d);
            for k in 0..d {
                u[(grid[j][k], k)] = h[(i, k)];
            }
            out.push(u);
        }
    }
    Ok(out)
}

fn shift_multiply_labels(d: usize) -> Vec<(usize, usize)> {
    (0..d * d).map(|x| (x / d, x % d)).collect()
}

/// Shift-and-multiply basis from an unvalidated grid and matrices; rejects
/// non-Latin grids and non-Hadamard matrices with [`Error::DesignInvalid`].
pub fn shift_multiply_basis_from_raw(grid: &[Vec<usize>], hadamards: &[ComplexMatrix]) -> Result<UnitaryBasis> {
    if let Err(v) = validate_latin(grid)? {
        return Err(Error::DesignInvalid(format!("not a Latin square: {}", v)));
    }
    for (j, h) in hadamards.iter().enumerate() {
        let chk = validate_hadamard(h, DEFAULT_TOL);
        if !chk.passed {
            return Err(Error::DesignInvalid(format!(
                "H^{} is not a Hadamard matrix (deviation {:.3e})",
                j, chk.deviation
            )));
        }
    }
    let elements = shift_multiply_operators(grid, hadamards)?;
    let d = grid.len();
    Ok(UnitaryBasis {
        d,
        elements,
        labels: Some(shift_multiply_labels(d)),
    })
}

pub fn shift_multiply_basis(latin: &LatinSquare, hadamards: &[HadamardMatrix]) -> Result<UnitaryBasis> {
    let mats: Vec<ComplexMatrix> = hadamards.iter().map(|h| h.matrix().clone()).collect();
    shift_multiply_basis_from_raw(latin.grid(), &mats)
}

/// Discrete Weyl system: cyclic Latin square with `d` copies of the cyclic
/// Fourier matrix, so `U_ij |k⟩ = exp(2πi ik/d) |j + k⟩`.
pub fn weyl_basis(d: usize) -> UnitaryBasis {
    let f = fourier_hadamard(d);
    shift_multiply_basis(&latin_from_cyclic(d), &vec![f; d]).expect("cyclic designs are valid")
}

/// Computes `gram[x, y] = tr(U_x* U_y) / d` and rechecks unitarity.
pub fn verify_orthonormal(basis: &UnitaryBasis, tol: f64) -> GramReport {
    let n = basis.len();
    let els = basis.elements();
    let mut gram = ComplexMatrix::zeros(n, n);
    for x in 0..n {
        for y in x..n {
            let g = trace_inner(&els[x], &els[y]).expect("basis elements share a shape");
            gram[(x, y)] = g;
            gram[(y, x)] = g.conj();
        }
    }
    let max_deviation = gram.max_abs_diff(&ComplexMatrix::identity(n));
    let unitarity = els.iter().map(ComplexMatrix::unitarity_deviation).fold(0.0, f64::max);
    GramReport {
        gram,
        max_deviation,
        unitarity_deviation: Some(unitarity),
        passed: max_deviation <= tol && unitarity <= tol,
    }
}

/// `Σ_x U_x* A U_x`.
pub fn depolarizer_sum(ops: &[ComplexMatrix], a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = a.rows();
    let mut sum = ComplexMatrix::zeros(d, a.cols());
    for u in ops {
        sum = sum + &u.adjoint().matmul(a)?.matmul(u)?;
    }
    Ok(sum)
}

/// Result of a depolarizer check: the probe index with the largest deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct DepolarizerReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub worst_probe: usize,
}

/// Checks `Σ_x U_x* A U_x = d tr(A) 1` for each probe `A`. An empty probe
/// list means all `d²` matrix units.
pub fn verify_depolarizer(basis: &UnitaryBasis, probes: &[ComplexMatrix], tol: f64) -> Result<DepolarizerReport> {
    let d = basis.dim();
    let units: Vec<ComplexMatrix>;
    let probes = if probes.is_empty() {
        units = (0..d * d).map(|n| ComplexMatrix::unit(d, n / d, n % d)).collect();
        &units[..]
    } else {
        probes
    };
    let mut worst = (0.0f64, 0usize);
    for (p, a) in probes.iter().enumerate() {
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "probe {} is {}x{}, expected {}x{}",
                p,
                a.rows(),
                a.cols(),
                d,
                d
            )));
        }
        let lhs = depolarizer_sum(basis.elements(), a)?;
        let rhs = ComplexMatrix::identity(d).scale(a.trace() * d as f64);
        let dev = lhs.max_abs_diff(&rhs);
        // NaN compares false, so keep it explicitly
        if dev > worst.0 || dev.is_nan() {
            worst = (dev, p);
        }
    }
    Ok(DepolarizerReport {
        passed: worst.0 <= tol,
        max_deviation: worst.0,
        worst_probe: worst.1,
    })
}

/// `gram[x, y] = tr(K_x* W K_y)` for a positive definite weight `W`
/// (the inverse of the density-like operator `R`).
pub fn weighted_gram(ops: &[ComplexMatrix], weight: &ComplexMatrix, tol: f64) -> Result<GramReport> {
    let d = weight.rows();
    if !weight.is_square() {
        return Err(Error::DimensionMismatch("weight must be square".into()));
    }
    if ops.len() != d * d {
        return Err(Error::CountMismatch {
            expected: d * d,
            found: ops.len(),
        });
    }
    if let Some(k) = ops.iter().find(|k| k.rows() != d || k.cols() != d) {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{}",
            k.rows(),
            k.cols(),
            d,
            d
        )));
    }
    let herm = weight.hermiticity_deviation();
    let min_eigenvalue = weight.hermitian_eigenvalues()?[0];
    if herm > 1e-12 || min_eigenvalue <= 1e-12 {
        return Err(Error::WeightNotPositive { min_eigenvalue });
    }
    let weighted: Vec<ComplexMatrix> = ops.iter().map(|k| weight * k).collect();
    let n = ops.len();
    let mut gram = ComplexMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            // tr(K_x* M) = Σ conj(K_x[i,j]) M[i,j]
            gram[(x, y)] = ops[x]
                .as_slice()
                .iter()
                .zip(weighted[y].as_slice())
                .map(|(a, b)| a.conj() * b)
                .sum();
        }
    }
    let max_deviation = gram.max_abs_diff(&ComplexMatrix::identity(n));
    Ok(GramReport {
        gram,
        max_deviation,
        unitarity_deviation: None,
        passed: max_deviation <= tol,
    })
}

/// Density operator recovered from the constraints `tr(U_x* ρ U_y) = δ_xy`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecovery {
    pub rho: ComplexMatrix,
    /// Max absolute residual of the constraint system at the solution.
    pub residual: f64,
    /// Max-entry deviation of `rho` from `1/d`.
    pub deviation_from_maximally_mixed: f64,
}

/// Solves for the Hermitian `ρ` satisfying `tr(U_x* ρ U_y) = δ_xy` for all
/// `d⁴` pairs by least squares over its `d²` real parameters, then rescales
/// to unit trace.
pub fn recover_weight_from_unitary_gram(basis: &UnitaryBasis, tol: f64) -> Result<WeightRecovery> {
    let d = basis.dim();
    let n = basis.len();
    let els = basis.elements();

    // Real basis of Hermitian d×d matrices, each given by its (k, l, value) entries.
    let mut herm_basis: Vec<Vec<(usize, usize, Complex64)>> = Vec::with_capacity(d * d);
    for k in 0..d {
        herm_basis.push(vec![(k, k, Complex64::new(1.0, 0.0))]);
        for l in k + 1..d {
            herm_basis.push(vec![(k, l, Complex64::new(1.0, 0.0)), (l, k, Complex64::new(1.0, 0.0))]);
            herm_basis.push(vec![
                (k, l, Complex64::new(0.0, 1.0)),
                (l, k, Complex64::new(0.0, -1.0)),
            ]);
        }
    }

    let rows = 2 * n * n;
    let mut a = nalgebra::DMatrix::<f64>::zeros(rows, d * d);
    let mut b = nalgebra::DVector::<f64>::zeros(rows);
    for x in 0..n {
        let ux_adj = els[x].adjoint();
        for (y, uy) in els.iter().enumerate() {
            // tr(U_x* G U_y) = Σ_{k,l} G[k,l] M[l,k] with M = U_y U_x*
            let m = uy * &ux_adj;
            let r = 2 * (x * n + y);
            for (p, g) in herm_basis.iter().enumerate() {
                let val: Complex64 = g.iter().map(|&(k, l, v)| v * m[(l, k)]).sum();
                a[(r, p)] = val.re;
                a[(r + 1, p)] = val.im;
            }
            if x == y {
                b[r] = 1.0;
            }
        }
    }
    // The map ρ ↦ (tr(U_x* ρ U_y)) is injective for a basis, so the tall
    // system has full column rank and QR gives the least-squares solution.
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * &b;
    let theta = qr.r().solve_upper_triangular(&qtb).ok_or(Error::NoSolution {
        residual: f64::INFINITY,
    })?;
    let residual = (&a * &theta - &b).amax();
    if exceeds(residual, tol) {
        return Err(Error::NoSolution { residual });
    }

    let mut rho = ComplexMatrix::zeros(d, d);
    for (p, g) in herm_basis.iter().enumerate() {
        for &(k, l, v) in g {
            rho[(k, l)] += v * theta[p];
        }
    }
    let tr = rho.trace().re;
    if tr.abs() < 1e-300 {
        return Err(Error::NoSolution { residual });
    }
    let rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    let target = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
    let deviation_from_maximally_mixed = rho.max_abs_diff(&target);
    Ok(WeightRecovery {
        rho,
        residual,
        deviation_from_maximally_mixed,
    })
}

/// Elements `U_x ⊗ V_y` with flat index `x * n2 + y`.
pub fn tensor_bases(b1: &UnitaryBasis, b2: &UnitaryBasis) -> UnitaryBasis {
    let mut elements = Vec::with_capacity(b1.len() * b2.len());
    for u in b1.elements() {
        for v in b2.elements() {
            elements.push(tensor_product(u, v));
        }
    }
    UnitaryBasis {
        d: b1.dim() * b2.dim(),
        elements,
        labels: None,
    }
}

/// `U'_x = V1 U_{relabel[x]} V2`.
pub fn apply_equivalence(
    basis: &UnitaryBasis,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    relabel: &[usize],
) -> Result<UnitaryBasis> {
    let d = basis.dim();
    let n = basis.len();
    for v in [v1, v2] {
        if v.rows() != d || v.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "equivalence unitary is {}x{}, expected {}x{}",
                v.rows(),
                v.cols(),
                d,
                d
            )));
        }
        let deviation = v.unitarity_deviation();
        if exceeds(deviation, DEFAULT_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
    }
    let mut seen = vec![false; n];
    if relabel.len() != n || !relabel.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true)) {
        return Err(Error::BadPermutation {
            d: n,
            perm: relabel.to_vec(),
        });
    }
    let elements = relabel.iter().map(|&x| &(v1 * basis.element(x)) * v2).collect();
    let labels = basis.labels.as_ref().map(|l| relabel.iter().map(|&x| l[x]).collect());
    Ok(UnitaryBasis { d, elements, labels })
}

/// Checks the group law `U_x U_y = μ(x, y) U_{x+y}` with `|μ| = 1`, where
/// labels add componentwise mod `d`.
///
/// The deviation for a pair is the larger of `max |U_x U_y U_{x+y}* - μ 1|`
/// (with `μ = tr(U_x U_y U_{x+y}*)/d`) and `||μ| - 1|`.
pub fn verify_group_law(basis: &UnitaryBasis, tol: f64) -> Result<Check> {
    let d = basis.dim();
    let labels = basis
        .labels()
        .ok_or_else(|| Error::DesignInvalid("basis carries no (i, j) labels".into()))?;
    let id = ComplexMatrix::identity(d);
    let mut worst = 0.0f64;
    for x in 0..basis.len() {
        for y in 0..basis.len() {
            let (i1, j1) = labels[x];
            let (i2, j2) = labels[y];
            let z = basis
                .index_of((i1 + i2) % d, (j1 + j2) % d)
                .ok_or_else(|| Error::DesignInvalid("labels are not closed under addition".into()))?;
            let m = &(basis.element(x) * basis.element(y)) * &basis.element(z).adjoint();
            let mu = m.trace() / d as f64;
            let dev = m.max_abs_diff(&id.scale(mu)).max((mu.norm() - 1.0).abs());
            worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
        }
    }
    Ok(Check::against(worst, tol))
}

/// Phase `μ(x, y)` with `U_x U_y ≈ μ U_z`, taken as `tr(U_z* U_x U_y)/d`.
pub fn product_phase(basis: &UnitaryBasis, x: usize, y: usize, z: usize) -> Complex64 {
    let prod = basis.element(x) * basis.element(y);
    trace_inner(basis.element(z), &prod).unwrap_or(ZERO)
}
