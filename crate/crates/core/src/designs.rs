//! Latin squares and complex Hadamard matrices: construction, validation,
//! enumeration and equivalence transforms.
//!
//! A Latin square is stored as `grid[j][k] = λ(j, k)` where `j` is the
//! index that also selects the Hadamard matrix `H^j` in a shift-and-multiply
//! basis.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{tensor_product, Check, ComplexMatrix, ONE};

/// Largest order accepted by [`count_normalized_latin`].
pub const MAX_COUNT_ORDER: usize = 5;

/// Largest order accepted by [`find_permutation_equivalence`].
pub const MAX_EQUIVALENCE_SEARCH_ORDER: usize = 6;

/// Where a grid first fails to be Latin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatinViolation {
    /// `row` repeats a symbol.
    Row { index: usize },
    /// `column` repeats a symbol.
    Column { index: usize },
}

impl fmt::Display for LatinViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatinViolation::Row { index } => write!(f, "row {} repeats a symbol", index),
            LatinViolation::Column { index } => write!(f, "column {} repeats a symbol", index),
        }
    }
}

/// Rows are checked before columns; the first offending line is reported.
pub fn validate_latin(grid: &[Vec<usize>]) -> Result<std::result::Result<(), LatinViolation>> {
    let d = grid.len();
    if d == 0 {
        return Err(Error::DimensionMismatch("empty grid".into()));
    }
    for (row, line) in grid.iter().enumerate() {
        if line.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                row,
                line.len(),
                d
            )));
        }
        for (col, &symbol) in line.iter().enumerate() {
            if symbol >= d {
                return Err(Error::SymbolOutOfRange { row, col, symbol, d });
            }
        }
    }
    for (j, line) in grid.iter().enumerate() {
        let mut seen = vec![false; d];
        for &s in line {
            if std::mem::replace(&mut seen[s], true) {
                return Ok(Err(LatinViolation::Row { index: j }));
            }
        }
    }
    for k in 0..d {
        let mut seen = vec![false; d];
        for line in grid {
            if std::mem::replace(&mut seen[line[k]], true) {
                return Ok(Err(LatinViolation::Column { index: k }));
            }
        }
    }
    Ok(Ok(()))
}

/// A validated Latin square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    grid: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        match validate_latin(&grid)? {
            Ok(()) => Ok(LatinSquare { grid }),
            Err(v) => Err(Error::DesignInvalid(format!("not a Latin square: {}", v))),
        }
    }

    pub fn order(&self) -> usize {
        self.grid.len()
    }

    /// `λ(j, k)`.
    pub fn symbol(&self, j: usize, k: usize) -> usize {
        self.grid[j][k]
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }

    pub fn into_grid(self) -> Vec<Vec<usize>> {
        self.grid
    }
}

/// Addition table of the cyclic group: `λ(j, k) = (j + k) mod d`.
pub fn latin_from_cyclic(d: usize) -> LatinSquare {
    assert!(d >= 1, "order must be positive");
    LatinSquare {
        grid: (0..d).map(|j| (0..d).map(|k| (j + k) % d).collect()).collect(),
    }
}

fn check_permutation(p: &[usize], d: usize) -> Result<()> {
    let mut seen = vec![false; d];
    let ok = p.len() == d && p.iter().all(|&x| x < d && !std::mem::replace(&mut seen[x], true));
    if ok {
        Ok(())
    } else {
        Err(Error::BadPermutation { d, perm: p.to_vec() })
    }
}

/// Isotopy: `result(j, k) = r(λ(p(j), q(k)))`.
pub fn latin_equivalence_apply(latin: &LatinSquare, p: &[usize], q: &[usize], r: &[usize]) -> Result<LatinSquare> {
    let d = latin.order();
    for perm in [p, q, r] {
        check_permutation(perm, d)?;
    }
    let grid = (0..d)
        .map(|j| (0..d).map(|k| r[latin.symbol(p[j], q[k])]).collect())
        .collect();
    Ok(LatinSquare { grid })
}

/// Direct product square on `d1 * d2` symbols; composite indices are
/// flattened first-factor-slowest.
pub fn latin_tensor(a: &LatinSquare, b: &LatinSquare) -> LatinSquare {
    let (d1, d2) = (a.order(), b.order());
    let d = d1 * d2;
    let grid = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| a.symbol(j / d2, k / d2) * d2 + b.symbol(j % d2, k % d2))
                .collect()
        })
        .collect();
    LatinSquare { grid }
}

/// Counts Latin squares of order `d` whose first row and first column are
/// `0, 1, …, d-1`, by depth-first search with row/column bitmasks.
pub fn count_normalized_latin(d: usize) -> Result<u64> {
    if d == 0 {
        return Err(Error::DimensionMismatch("order must be positive".into()));
    }
    if d > MAX_COUNT_ORDER {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_COUNT_ORDER,
        });
    }
    let mut rows = vec![0u32; d];
    let mut cols = vec![0u32; d];
    for i in 0..d {
        rows[0] |= 1 << i;
        cols[i] |= 1 << i;
        rows[i] |= 1 << i;
        cols[0] |= 1 << i;
    }
    fn fill(cell: usize, d: usize, rows: &mut [u32], cols: &mut [u32]) -> u64 {
        let free_cells = (d - 1) * (d - 1);
        if cell == free_cells {
            return 1;
        }
        let (r, c) = (1 + cell / (d - 1), 1 + cell % (d - 1));
        let mut avail = !(rows[r] | cols[c]) & ((1u32 << d) - 1);
        let mut total = 0;
        while avail != 0 {
            let bit = avail & avail.wrapping_neg();
            avail ^= bit;
            rows[r] |= bit;
            cols[c] |= bit;
            total += fill(cell + 1, d, rows, cols);
            rows[r] ^= bit;
            cols[c] ^= bit;
        }
        total
    }
    Ok(fill(0, d, &mut rows, &mut cols))
}

/// A validated complex Hadamard matrix: unimodular entries, `H H* = d 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardMatrix {
    matrix: ComplexMatrix,
}

/// Checks unimodularity and row orthogonality. The deviation is the larger
/// of `max ||H[i,k]| - 1|` and the max-entry deviation of `H H*` from `d 1`.
pub fn validate_hadamard(h: &ComplexMatrix, tol: f64) -> Check {
    if !h.is_square() {
        return Check::against(f64::INFINITY, tol);
    }
    let d = h.rows();
    let modulus = h.as_slice().iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let target = ComplexMatrix::identity(d).scale(Complex64::new(d as f64, 0.0));
    let orth = (h * &h.adjoint()).max_abs_diff(&target);
    Check::against(modulus.max(orth), tol)
}

impl HadamardMatrix {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let chk = validate_hadamard(&matrix, tol);
        if chk.passed {
            Ok(HadamardMatrix { matrix })
        } else {
            Err(Error::DesignInvalid(format!(
                "not a Hadamard matrix (deviation {:.3e})",
                chk.deviation
            )))
        }
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `H'[i, k] = row_phases[i] * H[row_perm[i], col_perm[k]] * col_phases[k]`.
    pub fn transformed(
        &self,
        row_perm: &[usize],
        col_perm: &[usize],
        row_phases: &[Complex64],
        col_phases: &[Complex64],
    ) -> Result<HadamardMatrix> {
        let d = self.order();
        check_permutation(row_perm, d)?;
        check_permutation(col_perm, d)?;
        if row_phases.len() != d || col_phases.len() != d {
            return Err(Error::DimensionMismatch(format!("need {} phases per side", d)));
        }
        for z in row_phases.iter().chain(col_phases) {
            check_unimodular(*z, 1e-12)?;
        }
        Ok(HadamardMatrix {
            matrix: ComplexMatrix::from_fn(d, d, |i, k| {
                row_phases[i] * self.matrix[(row_perm[i], col_perm[k])] * col_phases[k]
            }),
        })
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<HadamardMatrix> {
        let ones = vec![ONE; self.order()];
        self.transformed(row_perm, col_perm, &ones, &ones)
    }
}

fn check_unimodular(u: Complex64, tol: f64) -> Result<()> {
    let deviation = (u.norm() - 1.0).abs();
    if deviation > tol {
        Err(Error::NotUnimodular { deviation })
    } else {
        Ok(())
    }
}

fn root_of_unity(k: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, TAU * ((k % d) as f64) / d as f64)
}

/// Fourier matrix of the cyclic group: `H[k, l] = exp(2πi k l / d)`.
pub fn fourier_hadamard(d: usize) -> HadamardMatrix {
    assert!(d >= 1, "order must be positive");
    HadamardMatrix {
        matrix: ComplexMatrix::from_fn(d, d, |k, l| root_of_unity(k * l, d)),
    }
}

/// Fourier matrix of the Klein four group, `F_2 ⊗ F_2`.
pub fn klein_four_fourier() -> HadamardMatrix {
    hadamard_tensor(&fourier_hadamard(2), &fourier_hadamard(2))
}

/// The one-parameter family of 4×4 Hadamard matrices
///
/// ```text
/// 1  1  1  1
/// 1  1 -1 -1
/// 1 -1  u -u
/// 1 -1 -u  u
/// ```
pub fn hadamard_d4_family(u: Complex64) -> Result<HadamardMatrix> {
    check_unimodular(u, 1e-12)?;
    let m = ComplexMatrix::from_rows(vec![
        vec![ONE, ONE, ONE, ONE],
        vec![ONE, ONE, -ONE, -ONE],
        vec![ONE, -ONE, u, -u],
        vec![ONE, -ONE, -u, u],
    ])?;
    Ok(HadamardMatrix { matrix: m })
}

/// `H[k, l] = V[k, l] exp(2πi k l / d)` with `d = p q` and a phase matrix
/// `V` that is `p`-periodic in `k` and `q`-periodic in `l`.
pub fn periodic_phase_hadamard(p: usize, q: usize, phases: &ComplexMatrix) -> Result<HadamardMatrix> {
    let d = p * q;
    if d == 0 || phases.rows() != d || phases.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "phase matrix must be {}x{} for p={}, q={}",
            d, d, p, q
        )));
    }
    for z in phases.as_slice() {
        check_unimodular(*z, 1e-12)?;
    }
    for k in 0..d {
        for l in 0..d {
            let v = phases[(k, l)];
            if (v - phases[((k + p) % d, l)]).norm() > 1e-12 || (v - phases[(k, (l + q) % d)]).norm() > 1e-12 {
                return Err(Error::PeriodicityViolated { row: k, col: l });
            }
        }
    }
    Ok(HadamardMatrix {
        matrix: ComplexMatrix::from_fn(d, d, |k, l| phases[(k, l)] * root_of_unity(k * l, d)),
    })
}

/// Tiles a `p × q` fundamental cell into the `pq × pq` periodic phase matrix.
pub fn periodic_phases_from_cell(p: usize, q: usize, cell: &ComplexMatrix) -> Result<ComplexMatrix> {
    if cell.rows() != p || cell.cols() != q {
        return Err(Error::DimensionMismatch(format!(
            "fundamental cell must be {}x{}, got {}x{}",
            p,
            q,
            cell.rows(),
            cell.cols()
        )));
    }
    let d = p * q;
    Ok(ComplexMatrix::from_fn(d, d, |k, l| cell[(k % p, l % q)]))
}

pub fn hadamard_tensor(a: &HadamardMatrix, b: &HadamardMatrix) -> HadamardMatrix {
    HadamardMatrix {
        matrix: tensor_product(&a.matrix, &b.matrix),
    }
}

/// Dephased representative: divide row `i` by `H[i, 0]`, then column `j`
/// by the resulting `[0, j]` entry.
pub fn dephase_hadamard(h: &HadamardMatrix) -> HadamardMatrix {
    let d = h.order();
    let m = &h.matrix;
    let rows_fixed = ComplexMatrix::from_fn(d, d, |i, j| m[(i, j)] / m[(i, 0)]);
    let out = ComplexMatrix::from_fn(d, d, |i, j| rows_fixed[(i, j)] / rows_fixed[(0, j)]);
    HadamardMatrix { matrix: out }
}

/// All permutations of `0..d` in lexicographic order.
pub fn all_permutations(d: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..d).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (1..d).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..d)
            .rev()
            .find(|&j| perm[j] > perm[i - 1])
            .expect("pivot has a successor");
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
}

/// Searches row and column permutations `(P, Q)` such that the dephased
/// form of `a` permuted by `(P, Q)` matches the dephased form of `b`.
///
/// Phase moves are absorbed by dephasing, so a hit certifies Hadamard
/// equivalence. Exhaustive, hence capped at
/// [`MAX_EQUIVALENCE_SEARCH_ORDER`].
pub fn find_permutation_equivalence(
    a: &HadamardMatrix,
    b: &HadamardMatrix,
    tol: f64,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let d = a.order();
    if b.order() != d {
        return Err(Error::DimensionMismatch(format!(
            "orders {} and {} differ",
            d,
            b.order()
        )));
    }
    if d > MAX_EQUIVALENCE_SEARCH_ORDER {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_EQUIVALENCE_SEARCH_ORDER,
        });
    }
    let target = dephase_hadamard(b);
    let perms = all_permutations(d);
    for p in &perms {
        for q in &perms {
            let candidate = dephase_hadamard(&a.permuted(p, q)?);
            if candidate.matrix.max_abs_diff(&target.matrix) <= tol {
                return Ok(Some((p.clone(), q.clone())));
            }
        }
    }
    Ok(None)
}
