//! Tight teleportation and dense-coding schemes built from a unitary basis,
//! their verifiers, a protocol simulator, and the inverse constructions.
//!
//! For a basis `{U_x}` and the reference vector `Ω`:
//!
//! * resource `ω = |Ω⟩⟨Ω|`
//! * effects `F_x = |Φ_x⟩⟨Φ_x|` with `Φ_x = (U_x ⊗ 1) Ω`
//! * channels `T_x(A) = U_x* A U_x` (Heisenberg picture); in the
//!   Schrödinger picture Bob's correction is `σ ↦ U_x σ U_x*`.
//!
//! Three-party indices are ordered (input, Alice's half, Bob's half).

use std::fmt;

use num_complex::Complex64;

use crate::bases::UnitaryBasis;
use crate::error::{Error, Result};
use crate::linalg::{
    apply_on_first, check_projector_completeness, exceeds, is_maximally_entangled, omega_vector, vector_to_operator,
    Check, ComplexMatrix, StateVector, DEFAULT_TOL, ZERO,
};

/// Outcome probabilities below this are treated as impossible outcomes.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

/// `d²` vectors on `C^d ⊗ C^d`, intended to be an orthonormal basis of
/// maximally entangled vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntangledBasis {
    d: usize,
    vectors: Vec<StateVector>,
}

/// Deviations of a family from being an orthonormal maximally entangled basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledBasisReport {
    pub passed: bool,
    /// `max |⟨Φ_x, Φ_y⟩ - δ_xy|`.
    pub orthonormality_deviation: f64,
    /// Worst reduced-state deviation from `1/d`.
    pub entanglement_deviation: f64,
    pub worst_vector: usize,
}

impl MaxEntangledBasis {
    /// Checks only counts and dimensions.
    pub fn from_raw(d: usize, vectors: Vec<StateVector>) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        if vectors.len() != d * d {
            return Err(Error::CountMismatch {
                expected: d * d,
                found: vectors.len(),
            });
        }
        if let Some(x) = vectors.iter().position(|v| v.dim() != d * d) {
            return Err(Error::DimensionMismatch(format!(
                "vector {} has dim {}, expected {}",
                x,
                vectors[x].dim(),
                d * d
            )));
        }
        Ok(MaxEntangledBasis { d, vectors })
    }

    /// Rejects families failing [`MaxEntangledBasis::verify`] at `tol`.
    pub fn new(d: usize, vectors: Vec<StateVector>, tol: f64) -> Result<Self> {
        let basis = Self::from_raw(d, vectors)?;
        let report = basis.verify(tol);
        if !report.passed {
            return Err(Error::DesignInvalid(format!(
                "not an orthonormal maximally entangled basis (orthonormality {:.3e}, entanglement {:.3e})",
                report.orthonormality_deviation, report.entanglement_deviation
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<StateVector> {
        self.vectors
    }

    pub fn verify(&self, tol: f64) -> EntangledBasisReport {
        let n = self.vectors.len();
        let mut orth = 0.0f64;
        for x in 0..n {
            for y in x..n {
                let expected = if x == y { 1.0 } else { 0.0 };
                let dev = (self.vectors[x].inner(&self.vectors[y]) - expected).norm();
                orth = if dev.is_nan() { f64::NAN } else { orth.max(dev) };
            }
        }
        let mut ent = 0.0f64;
        let mut worst_vector = 0;
        for (x, v) in self.vectors.iter().enumerate() {
            // an unnormalized vector fails with its norm defect as the deviation
            let dev = match is_maximally_entangled(v, self.d, tol) {
                Ok(chk) => chk.deviation,
                Err(Error::NotNormalized { deviation }) => deviation,
                Err(_) => f64::INFINITY,
            };
            if dev > ent || dev.is_nan() {
                ent = dev;
                worst_vector = x;
            }
        }
        EntangledBasisReport {
            passed: orth <= tol && ent <= tol,
            orthonormality_deviation: orth,
            entanglement_deviation: ent,
            worst_vector,
        }
    }
}

/// `Φ_x = (U_x ⊗ 1) Ω`.
pub fn basis_to_entangled(basis: &UnitaryBasis, omega: &StateVector) -> Result<MaxEntangledBasis> {
    let d = basis.dim();
    require_maximally_entangled(omega, d)?;
    let vectors = basis
        .elements()
        .iter()
        .map(|u| apply_on_first(u, omega))
        .collect::<Result<Vec<_>>>()?;
    MaxEntangledBasis::from_raw(d, vectors)
}

fn require_maximally_entangled(omega: &StateVector, d: usize) -> Result<()> {
    match is_maximally_entangled(omega, d, DEFAULT_TOL) {
        Ok(chk) if chk.passed => Ok(()),
        Ok(chk) => Err(Error::NotMaximallyEntangled {
            deviation: chk.deviation,
        }),
        Err(Error::NotNormalized { deviation }) => Err(Error::NotMaximallyEntangled { deviation }),
        Err(e) => Err(e),
    }
}

/// Inverts [`basis_to_entangled`] for the reference vector `Ω`.
///
/// Writing `Ω = (W ⊗ 1) Ω₀` with `Ω₀ = omega_vector(d)` and `W` unitary,
/// each element is `U_x = V(Φ_x) W*` where `V` is [`vector_to_operator`].
pub fn entangled_to_basis(phi: &MaxEntangledBasis, omega: &StateVector) -> Result<UnitaryBasis> {
    let d = phi.dim();
    require_maximally_entangled(omega, d)?;
    let w_adj = vector_to_operator(omega, d)?.adjoint();
    let mut elements = Vec::with_capacity(d * d);
    for (index, v) in phi.vectors().iter().enumerate() {
        let u = &vector_to_operator(v, d)? * &w_adj;
        let deviation = u.unitarity_deviation();
        if exceeds(deviation, DEFAULT_TOL) {
            return Err(Error::NotUnitaryExtraction { index, deviation });
        }
        elements.push(u);
    }
    UnitaryBasis::from_raw(elements)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Teleportation,
    DenseCoding,
}

impl Mode {
    pub fn flipped(self) -> Mode {
        match self {
            Mode::Teleportation => Mode::DenseCoding,
            Mode::DenseCoding => Mode::Teleportation,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Teleportation => "teleportation",
            Mode::DenseCoding => "dense_coding",
        })
    }
}

/// Resource state, channel unitaries and effect vectors of a tight scheme.
///
/// The resource is held as a density operator so that mixed or partially
/// entangled resources can be checked by the verifiers; [`build_scheme`]
/// always produces a pure maximally entangled one.
#[derive(Debug, Clone, PartialEq)]
pub struct TightScheme {
    d: usize,
    omega: ComplexMatrix,
    unitaries: Vec<ComplexMatrix>,
    effects: Vec<StateVector>,
    mode: Mode,
}

/// Deviations of a scheme's components from their defining properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeInvariants {
    pub resource_entanglement: f64,
    pub effect_completeness: f64,
    pub unitarity: f64,
}

impl SchemeInvariants {
    pub fn max(&self) -> f64 {
        self.resource_entanglement
            .max(self.effect_completeness)
            .max(self.unitarity)
    }
}

impl TightScheme {
    /// Assembles a scheme from parts, checking shapes only.
    pub fn from_parts(
        omega: ComplexMatrix,
        unitaries: Vec<ComplexMatrix>,
        effects: Vec<StateVector>,
        mode: Mode,
    ) -> Result<Self> {
        let d = unitaries.first().map(ComplexMatrix::rows).unwrap_or(0);
        if d == 0 {
            return Err(Error::CountMismatch { expected: 1, found: 0 });
        }
        let n = d * d;
        if unitaries.len() != n || effects.len() != n {
            return Err(Error::CountMismatch {
                expected: n,
                found: unitaries.len().min(effects.len()),
            });
        }
        if unitaries.iter().any(|u| u.rows() != d || u.cols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "channel unitaries must be {}x{}",
                d, d
            )));
        }
        if effects.iter().any(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch(format!("effect vectors must have dim {}", n)));
        }
        if omega.rows() != n || omega.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "resource must be {}x{}, got {}x{}",
                n,
                n,
                omega.rows(),
                omega.cols()
            )));
        }
        Ok(TightScheme {
            d,
            omega,
            unitaries,
            effects,
            mode,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The resource density operator `ω`.
    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn channel_unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn effect_vectors(&self) -> &[StateVector] {
        &self.effects
    }

    /// `F_x = |Φ_x⟩⟨Φ_x|`.
    pub fn effect(&self, x: usize) -> ComplexMatrix {
        self.effects[x].projector()
    }

    /// Applies `T_x` (Heisenberg picture) to an observable on Bob's side.
    pub fn channel(&self, x: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = &self.unitaries[x];
        u.adjoint().matmul(a)?.matmul(u)
    }

    /// Same components with the resource replaced.
    pub fn with_resource(&self, omega: ComplexMatrix) -> Result<Self> {
        Self::from_parts(omega, self.unitaries.clone(), self.effects.clone(), self.mode)
    }

    /// Same components with one channel unitary replaced.
    pub fn with_unitary(&self, x: usize, u: ComplexMatrix) -> Result<Self> {
        let mut unitaries = self.unitaries.clone();
        if x >= unitaries.len() {
            return Err(Error::DimensionMismatch(format!("no channel with index {}", x)));
        }
        unitaries[x] = u;
        Self::from_parts(self.omega.clone(), unitaries, self.effects.clone(), self.mode)
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        TightScheme { mode, ..self.clone() }
    }

    /// Measures how far the components are from the structure a tight
    /// scheme must have: pure maximally entangled resource, complete
    /// effects and unitary channels.
    pub fn invariants(&self) -> SchemeInvariants {
        let resource_entanglement = match extract_pure_vector(&self.omega) {
            Some((v, purity)) => match is_maximally_entangled(&v, self.d, f64::INFINITY) {
                Ok(chk) => chk.deviation.max(purity),
                Err(_) => f64::INFINITY,
            },
            None => f64::INFINITY,
        };
        let effect_completeness = check_projector_completeness(&self.effects, f64::INFINITY)
            .map(|c| c.deviation)
            .unwrap_or(f64::INFINITY);
        let unitarity = self
            .unitaries
            .iter()
            .map(ComplexMatrix::unitarity_deviation)
            .fold(0.0, f64::max);
        SchemeInvariants {
            resource_entanglement,
            effect_completeness,
            unitarity,
        }
    }
}

/// Recovers `Ω` from `ω = |Ω⟩⟨Ω|` via the column with the largest diagonal
/// entry, phased so that entry is real positive. Also returns the
/// max-entry deviation of `ω` from `|Ω⟩⟨Ω|`.
fn extract_pure_vector(omega: &ComplexMatrix) -> Option<(StateVector, f64)> {
    let n = omega.rows();
    let (j, diag) = (0..n)
        .map(|j| (j, omega[(j, j)].re))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if diag.is_nan() || diag <= 0.0 {
        return None;
    }
    let s = 1.0 / diag.sqrt();
    let v = StateVector::new((0..n).map(|i| omega[(i, j)] * s).collect()).ok()?;
    let purity = omega.max_abs_diff(&v.projector());
    Some((v, purity))
}

/// Builds the scheme with `ω = |Ω⟩⟨Ω|`, `Ω = omega_vector(d)`,
/// `Φ_x = (U_x ⊗ 1)Ω` and channels implemented by `U_x`.
pub fn build_scheme(basis: &UnitaryBasis, mode: Mode) -> TightScheme {
    let d = basis.dim();
    let omega = omega_vector(d);
    let effects = basis
        .elements()
        .iter()
        .map(|u| apply_on_first(u, &omega).expect("basis elements are d×d"))
        .collect();
    TightScheme {
        d,
        omega: omega.projector(),
        unitaries: basis.elements().to_vec(),
        effects,
        mode,
    }
}

/// Result of checking a scheme against its defining identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeVerdict {
    pub mode: Mode,
    pub passed: bool,
    pub max_deviation: f64,
    /// Probe achieving `max_deviation`.
    pub worst_case: String,
    /// Dense coding only: `P[x][y] = tr(ω (T_x ⊗ id)(F_y))`.
    pub probabilities: Option<Vec<Vec<f64>>>,
}

impl fmt::Display for SchemeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (max deviation {:.3e} at {})",
            self.mode,
            if self.passed { "pass" } else { "FAIL" },
            self.max_deviation,
            self.worst_case
        )
    }
}

/// Bob's unnormalized conditional state for outcome `x`:
/// `tr_12[(ρ ⊗ ω)(F_x ⊗ 1)]`, with `F_x = |Φ_x⟩⟨Φ_x|`.
///
/// Component form:
/// `σ[k, k'] = Σ ρ[i, i'] ω[(j, k), (j', k')] Φ[(i', j')] conj(Φ[(i, j)])`.
fn conditional_state(scheme: &TightScheme, x: usize, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = scheme.d;
    let phi = scheme.effects[x].entries();
    let omega = &scheme.omega;
    let mut sigma = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for ip in 0..d {
            let r = rho[(i, ip)];
            if r == ZERO {
                continue;
            }
            for j in 0..d {
                let left = r * phi[i * d + j].conj();
                if left == ZERO {
                    continue;
                }
                for jp in 0..d {
                    let coeff = left * phi[ip * d + jp];
                    if coeff == ZERO {
                        continue;
                    }
                    for k in 0..d {
                        let orow = omega.row(j * d + k);
                        for kp in 0..d {
                            sigma[(k, kp)] += coeff * orow[jp * d + kp];
                        }
                    }
                }
            }
        }
    }
    sigma
}

/// Output of the protocol on an arbitrary input operator (linear in `rho`):
/// `Σ_x U_x σ_x U_x*` together with the outcome weights `tr σ_x`.
fn teleport_linear(scheme: &TightScheme, rho: &ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let d = scheme.d;
    let mut out = ComplexMatrix::zeros(d, d);
    let mut weights = Vec::with_capacity(d * d);
    for (x, u) in scheme.unitaries.iter().enumerate() {
        let sigma = conditional_state(scheme, x, rho);
        weights.push(sigma.trace());
        out = out + &(&(u * &sigma) * &u.adjoint());
    }
    (out, weights)
}

/// Checks `Σ_x tr[(ρ ⊗ ω)(F_x ⊗ T_x(A))] = tr(ρ A)` for all matrix units
/// `ρ = |a⟩⟨b|`, `A = |c⟩⟨e|`.
///
/// For fixed `ρ` the left side equals `⟨e| Σ_x U_x σ_x U_x* |c⟩` with `σ_x`
/// Bob's conditional state, so each `ρ` is processed once and all `d²`
/// observables are read off the resulting matrix.
pub fn verify_teleportation(scheme: &TightScheme, tol: f64) -> SchemeVerdict {
    let d = scheme.d;
    let mut worst = (0.0f64, String::from("none"));
    for a in 0..d {
        for b in 0..d {
            let rho = ComplexMatrix::unit(d, a, b);
            let (out, _) = teleport_linear(scheme, &rho);
            for c in 0..d {
                for e in 0..d {
                    let lhs = out[(e, c)];
                    // tr(|a⟩⟨b| |c⟩⟨e|) = δ_bc δ_ae
                    let rhs = if b == c && a == e { 1.0 } else { 0.0 };
                    let dev = (lhs - rhs).norm();
                    if dev > worst.0 || (dev.is_nan() && !worst.0.is_nan()) {
                        worst = (dev, format!("rho=|{}><{}|, A=|{}><{}|", a, b, c, e));
                    }
                }
            }
        }
    }
    SchemeVerdict {
        mode: Mode::Teleportation,
        passed: worst.0 <= tol,
        max_deviation: worst.0,
        worst_case: worst.1,
        probabilities: None,
    }
}

/// Computes `P[x, y] = tr(ω (T_x ⊗ id)(F_y)) = ⟨χ_xy| ω |χ_xy⟩` with
/// `χ_xy = (U_x* ⊗ 1) Φ_y`, and checks `P = 1`.
pub fn verify_dense_coding(scheme: &TightScheme, tol: f64) -> SchemeVerdict {
    let n = scheme.unitaries.len();
    let mut probabilities = vec![vec![0.0; n]; n];
    let mut worst = (0.0f64, String::from("none"));
    for (x, u) in scheme.unitaries.iter().enumerate() {
        let u_adj = u.adjoint();
        for (y, effect) in scheme.effects.iter().enumerate() {
            let chi = apply_on_first(&u_adj, effect).expect("shapes checked at construction");
            let omega_chi = scheme.omega.apply(&chi).expect("shapes checked at construction");
            let p = chi.inner(&omega_chi);
            probabilities[x][y] = p.re;
            let expected = if x == y { 1.0 } else { 0.0 };
            let dev = (p - expected).norm();
            if dev > worst.0 || (dev.is_nan() && !worst.0.is_nan()) {
                worst = (dev, format!("x={}, y={}", x, y));
            }
        }
    }
    SchemeVerdict {
        mode: Mode::DenseCoding,
        passed: worst.0 <= tol,
        max_deviation: worst.0,
        worst_case: worst.1,
        probabilities: Some(probabilities),
    }
}

/// Runs the verifier matching the scheme's mode.
pub fn verify_scheme(scheme: &TightScheme, tol: f64) -> SchemeVerdict {
    match scheme.mode {
        Mode::Teleportation => verify_teleportation(scheme, tol),
        Mode::DenseCoding => verify_dense_coding(scheme, tol),
    }
}

/// Same equipment, opposite role.
pub fn swap_roles(scheme: &TightScheme) -> TightScheme {
    scheme.with_mode(scheme.mode.flipped())
}

/// Simulated teleportation run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationRun {
    /// Bob's state averaged over outcomes.
    pub output: ComplexMatrix,
    /// `p_x = tr[(ρ ⊗ ω)(F_x ⊗ 1)]`.
    pub outcome_probabilities: Vec<f64>,
}

/// Checks Hermiticity, unit trace and positivity, each to `tol`.
pub fn check_density_operator(rho: &ComplexMatrix, d: usize, tol: f64) -> Result<()> {
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, expected {}x{}",
            rho.rows(),
            rho.cols(),
            d,
            d
        )));
    }
    let herm = rho.hermiticity_deviation();
    if exceeds(herm, tol) {
        return Err(Error::NotDensityOperator(format!(
            "not Hermitian (deviation {:.3e})",
            herm
        )));
    }
    let tr = rho.trace();
    if exceeds((tr - 1.0).norm(), tol) {
        return Err(Error::NotDensityOperator(format!("trace is {}", tr)));
    }
    let min = rho.hermitian_eigenvalues()?[0];
    if min < -tol {
        return Err(Error::NotDensityOperator(format!("negative eigenvalue {:.3e}", min)));
    }
    Ok(())
}

/// Simulates the protocol: Alice measures `F` on (input, her half), Bob
/// applies the correction for outcome `x`. Outcomes with probability below
/// [`NEGLIGIBLE_PROBABILITY`] are dropped.
pub fn teleport_state(scheme: &TightScheme, rho: &ComplexMatrix) -> Result<TeleportationRun> {
    let d = scheme.d;
    check_density_operator(rho, d, DEFAULT_TOL)?;
    let mut output = ComplexMatrix::zeros(d, d);
    let mut outcome_probabilities = Vec::with_capacity(d * d);
    for (x, u) in scheme.unitaries.iter().enumerate() {
        let sigma = conditional_state(scheme, x, rho);
        let p = sigma.trace().re;
        outcome_probabilities.push(p);
        if p < NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let conditional = sigma.scale(Complex64::new(1.0 / p, 0.0));
        let corrected = &(u * &conditional) * &u.adjoint();
        output = output + &corrected.scale(Complex64::new(p, 0.0));
    }
    Ok(TeleportationRun {
        output,
        outcome_probabilities,
    })
}

/// Recovers the unitary basis from the scheme's resource and effects.
///
/// Gated on the scheme passing its own verifier at [`DEFAULT_TOL`]. The
/// recovered `U_x` may differ from the scheme's channel unitaries by phases.
pub fn extract_basis_from_scheme(scheme: &TightScheme) -> Result<UnitaryBasis> {
    let verdict = verify_scheme(scheme, DEFAULT_TOL);
    if !verdict.passed {
        return Err(Error::SchemeInvalid {
            deviation: verdict.max_deviation,
        });
    }
    let (omega, purity) = extract_pure_vector(&scheme.omega).ok_or(Error::SchemeInvalid {
        deviation: f64::INFINITY,
    })?;
    if exceeds(purity, DEFAULT_TOL) {
        return Err(Error::SchemeInvalid { deviation: purity });
    }
    let phi = MaxEntangledBasis::from_raw(scheme.d, scheme.effects.clone())?;
    entangled_to_basis(&phi, &omega)
}

/// Product check used by callers that only need pass/fail of both verifiers.
pub fn verify_both(scheme: &TightScheme, tol: f64) -> (Check, Check) {
    let t = verify_teleportation(scheme, tol);
    let c = verify_dense_coding(scheme, tol);
    (
        Check::against(t.max_deviation, tol),
        Check::against(c.max_deviation, tol),
    )
}
