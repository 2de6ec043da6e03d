//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::bases::{shift_multiply_basis_from_raw, tensor_bases, weyl_basis, UnitaryBasis};
use crate::designs::{
    count_normalized_latin, fourier_hadamard, hadamard_d4_family, klein_four_fourier, latin_equivalence_apply,
    latin_from_cyclic, periodic_phase_hadamard, periodic_phases_from_cell, MAX_COUNT_ORDER,
};
use crate::document::{DesignDocument, Kind, Payload};
use crate::linalg::{omega_vector, ComplexMatrix, DEFAULT_TOL};
use crate::random::{random_density, random_permutation, random_phase, seeded};
use crate::schemes::{basis_to_entangled, build_scheme, teleport_state, Mode};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "unibasis",
    version,
    about = "Unitary bases, entangled bases and tight teleportation / dense-coding schemes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a design, basis or scheme and write it as JSON.
    Generate(GenerateArgs),
    /// Check a JSON document against the defining identities of its kind.
    Verify(VerifyArgs),
    /// Run the teleportation protocol of a scheme document on input states.
    Simulate(SimulateArgs),
    /// Count normalized Latin squares of order d (d <= 5).
    CountLatin(CountLatinArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Latin,
    Hadamard,
    UnitaryBasis,
    EntangledBasis,
    Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Cyclic group: Latin square, Fourier matrix, or Weyl basis.
    Cyclic,
    Fourier,
    Weyl,
    /// Klein four group Fourier matrix (d = 4).
    Klein,
    /// 4x4 Hadamard family with phase u = exp(i * u_phase).
    D4Family,
    /// Periodic-phase Hadamard of order p*q with a random cell (needs --rng-seed).
    Periodic,
    /// Random isotope of the cyclic Latin square (needs --rng-seed).
    Isotope,
    /// Shift-and-multiply basis from --latin and --hadamards files.
    ShiftMultiply,
    /// Tensor product of two basis files (--left, --right).
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Teleportation,
    DenseCoding,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Teleportation => Mode::Teleportation,
            ModeArg::DenseCoding => Mode::DenseCoding,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenerateKind,
    #[arg(long, value_enum)]
    pub construction: Option<Construction>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Phase angle in radians for the d4-family.
    #[arg(long, allow_hyphen_values = true)]
    pub u_phase: Option<f64>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub latin: Option<PathBuf>,
    /// One Hadamard file (used for every j) or exactly d files.
    #[arg(long, num_args = 1..)]
    pub hadamards: Vec<PathBuf>,
    #[arg(long)]
    pub from_basis: Option<PathBuf>,
    #[arg(long)]
    pub left: Option<PathBuf>,
    #[arg(long)]
    pub right: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "teleportation")]
    pub mode: ModeArg,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scheme: PathBuf,
    /// `pure:i`, `maximally-mixed`, or `random` (with --rng-seed).
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CountLatinArgs {
    pub d: usize,
}

/// An input problem: bad parameters, unreadable or malformed files.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<crate::Error> for InputError {
    fn from(e: crate::Error) -> Self {
        InputError(e.to_string())
    }
}

fn bad(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

pub fn load_document(path: &Path) -> Result<DesignDocument, InputError> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {}", path.display(), e)))?;
    DesignDocument::from_json(&text).map_err(|e| bad(format!("{}: {}", path.display(), e)))
}

fn load_basis(path: &Path) -> Result<UnitaryBasis, InputError> {
    match load_document(path)?.payload {
        Payload::UnitaryBasis(b) => Ok(b),
        other => Err(bad(format!(
            "{}: expected a unitary_basis document, found {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T, InputError> {
    v.ok_or_else(|| bad(format!("{} requires {}", what, flag)))
}

/// Builds the document requested by `generate` without touching the filesystem
/// except to read input documents.
pub fn generate_document(args: &GenerateArgs) -> Result<DesignDocument, InputError> {
    use Construction as C;
    let construction = args.construction;
    let doc = match args.kind {
        GenerateKind::Latin => match construction.unwrap_or(C::Cyclic) {
            C::Cyclic => {
                let d = need(args.d, "--d", "latin cyclic")?;
                positive(d)?;
                DesignDocument::new(
                    Payload::Latin(latin_from_cyclic(d).into_grid()),
                    format!("construction=cyclic d={}", d),
                )
            }
            C::Isotope => {
                let d = need(args.d, "--d", "latin isotope")?;
                positive(d)?;
                let seed = need(args.rng_seed, "--rng-seed", "latin isotope")?;
                let mut rng = seeded(seed);
                let (p, q, r) = (
                    random_permutation(&mut rng, d),
                    random_permutation(&mut rng, d),
                    random_permutation(&mut rng, d),
                );
                let l = latin_equivalence_apply(&latin_from_cyclic(d), &p, &q, &r)?;
                DesignDocument::new(
                    Payload::Latin(l.into_grid()),
                    format!(
                        "construction=isotope d={} rng_seed={} p={:?} q={:?} r={:?}",
                        d, seed, p, q, r
                    ),
                )
            }
            other => return Err(bad(format!("construction {:?} does not produce a Latin square", other))),
        },
        GenerateKind::Hadamard => match construction.unwrap_or(C::Fourier) {
            C::Fourier | C::Cyclic => {
                let d = need(args.d, "--d", "hadamard fourier")?;
                positive(d)?;
                DesignDocument::new(
                    Payload::Hadamard(fourier_hadamard(d).into_matrix()),
                    format!("construction=fourier d={}", d),
                )
            }
            C::Klein => DesignDocument::new(
                Payload::Hadamard(klein_four_fourier().into_matrix()),
                "construction=klein d=4",
            ),
            C::D4Family => {
                let theta = need(args.u_phase, "--u-phase", "hadamard d4-family")?;
                let h = hadamard_d4_family(Complex64::from_polar(1.0, theta))?;
                DesignDocument::new(
                    Payload::Hadamard(h.into_matrix()),
                    format!("construction=d4-family u_phase={}", theta),
                )
            }
            C::Periodic => {
                let p = need(args.p, "--p", "hadamard periodic")?;
                let q = need(args.q, "--q", "hadamard periodic")?;
                positive(p * q)?;
                let seed = need(args.rng_seed, "--rng-seed", "hadamard periodic")?;
                let mut rng = seeded(seed);
                let cell = ComplexMatrix::from_fn(p, q, |_, _| random_phase(&mut rng));
                let v = periodic_phases_from_cell(p, q, &cell)?;
                let h = periodic_phase_hadamard(p, q, &v)?;
                DesignDocument::new(
                    Payload::Hadamard(h.into_matrix()),
                    format!("construction=periodic p={} q={} rng_seed={}", p, q, seed),
                )
            }
            other => {
                return Err(bad(format!(
                    "construction {:?} does not produce a Hadamard matrix",
                    other
                )))
            }
        },
        GenerateKind::UnitaryBasis => {
            let (basis, meta) = basis_from_args(args)?;
            DesignDocument::new(Payload::UnitaryBasis(basis), meta)
        }
        GenerateKind::EntangledBasis => {
            let (basis, meta) = basis_from_args(args)?;
            let d = basis.dim();
            let e = basis_to_entangled(&basis, &omega_vector(d))?;
            DesignDocument::new(Payload::EntangledBasis(e), format!("{} reference=omega", meta))
        }
        GenerateKind::Scheme => {
            let (basis, meta) = basis_from_args(args)?;
            let mode: Mode = args.mode.into();
            DesignDocument::new(
                Payload::Scheme(build_scheme(&basis, mode)),
                format!("{} mode={}", meta, mode),
            )
        }
    };
    Ok(doc)
}

fn positive(d: usize) -> Result<(), InputError> {
    if d == 0 {
        Err(bad("dimension must be positive"))
    } else {
        Ok(())
    }
}

fn basis_from_args(args: &GenerateArgs) -> Result<(UnitaryBasis, String), InputError> {
    use Construction as C;
    if let Some(path) = &args.from_basis {
        if args.construction.is_some() {
            return Err(bad("--from-basis and --construction are exclusive"));
        }
        return Ok((load_basis(path)?, format!("from_basis={}", path.display())));
    }
    match need(args.construction, "--construction or --from-basis", "this kind")? {
        C::Weyl | C::Cyclic => {
            let d = need(args.d, "--d", "weyl basis")?;
            positive(d)?;
            Ok((weyl_basis(d), format!("construction=weyl d={}", d)))
        }
        C::D4Family => {
            let theta = need(args.u_phase, "--u-phase", "d4-family basis")?;
            let h = hadamard_d4_family(Complex64::from_polar(1.0, theta))?.into_matrix();
            let b = shift_multiply_basis_from_raw(latin_from_cyclic(4).grid(), &vec![h; 4])?;
            Ok((b, format!("construction=d4-family u_phase={} latin=cyclic", theta)))
        }
        C::ShiftMultiply => {
            let latin_path = need(args.latin.as_ref(), "--latin", "shift-multiply")?;
            let grid = match load_document(latin_path)?.payload {
                Payload::Latin(g) => g,
                other => {
                    return Err(bad(format!(
                        "{}: expected a latin document, found {}",
                        latin_path.display(),
                        other.kind()
                    )))
                }
            };
            let d = grid.len();
            let mut hs = Vec::new();
            for path in &args.hadamards {
                match load_document(path)?.payload {
                    Payload::Hadamard(m) => hs.push(m),
                    other => {
                        return Err(bad(format!(
                            "{}: expected a hadamard document, found {}",
                            path.display(),
                            other.kind()
                        )))
                    }
                }
            }
            if hs.len() == 1 {
                hs = vec![hs[0].clone(); d];
            }
            if hs.len() != d {
                return Err(bad(format!(
                    "shift-multiply needs 1 or {} --hadamards files, got {}",
                    d,
                    hs.len()
                )));
            }
            let b = shift_multiply_basis_from_raw(&grid, &hs)?;
            Ok((b, format!("construction=shift-multiply latin={}", latin_path.display())))
        }
        C::Tensor => {
            let left = need(args.left.as_ref(), "--left", "tensor")?;
            let right = need(args.right.as_ref(), "--right", "tensor")?;
            let b = tensor_bases(&load_basis(left)?, &load_basis(right)?);
            Ok((
                b,
                format!("construction=tensor left={} right={}", left.display(), right.display()),
            ))
        }
        other => Err(bad(format!(
            "construction {:?} does not produce a unitary basis",
            other
        ))),
    }
}

pub fn run_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let doc = generate_document(args)?;
    fs::write(&args.output, doc.to_json()).map_err(|e| bad(format!("{}: {}", args.output.display(), e)))?;
    let _ = writeln!(
        out,
        "wrote {} document (d={}) to {}",
        doc.kind(),
        doc.dim(),
        args.output.display()
    );
    Ok(EXIT_PASS)
}

pub fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let doc = load_document(&args.file)?;
    let report = doc.validate(args.tol);
    let _ = writeln!(out, "{} (d={}) {}", doc.kind(), doc.dim(), args.file.display());
    if !doc.meta.is_empty() {
        let _ = writeln!(out, "  meta: {}", doc.meta);
    }
    for line in &report.lines {
        let _ = writeln!(out, "  {}", line);
    }
    let _ = writeln!(
        out,
        "{} (max deviation {:.3e}, tol {:.1e})",
        if report.passed { "PASS" } else { "FAIL" },
        report.max_deviation,
        args.tol
    );
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StateSpec {
    Pure(usize),
    MaximallyMixed,
    Random,
}

fn parse_state(spec: &str) -> Result<StateSpec, InputError> {
    match spec {
        "maximally-mixed" => Ok(StateSpec::MaximallyMixed),
        "random" => Ok(StateSpec::Random),
        s => match s.strip_prefix("pure:").map(str::parse::<usize>) {
            Some(Ok(i)) => Ok(StateSpec::Pure(i)),
            _ => Err(bad(format!(
                "bad state spec {:?}; expected pure:<i>, maximally-mixed or random",
                spec
            ))),
        },
    }
}

pub fn run_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    let spec = parse_state(&args.state)?;
    let scheme = match load_document(&args.scheme)?.payload {
        Payload::Scheme(s) => s,
        other => return Err(bad(format!("expected a scheme document, found {}", other.kind()))),
    };
    let d = scheme.dim();
    if args.trials == 0 {
        return Err(bad("--trials must be positive"));
    }
    let mut rng = match (spec, args.rng_seed) {
        (StateSpec::Random, None) => return Err(bad("--state random requires --rng-seed")),
        (_, seed) => seeded(seed.unwrap_or(0)),
    };
    if let StateSpec::Pure(i) = spec {
        if i >= d {
            return Err(bad(format!("pure:{} is out of range for d={}", i, d)));
        }
    }

    let n = d * d;
    let mut histogram = vec![0.0; n];
    let mut worst = 0.0f64;
    for _ in 0..args.trials {
        let rho = match spec {
            StateSpec::Pure(i) => ComplexMatrix::unit(d, i, i),
            StateSpec::MaximallyMixed => ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
            StateSpec::Random => random_density(&mut rng, d),
        };
        let run = teleport_state(&scheme, &rho)?;
        let dev = run.output.max_abs_diff(&rho);
        worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
        for (h, p) in histogram.iter_mut().zip(&run.outcome_probabilities) {
            *h += p / args.trials as f64;
        }
    }
    let passed = worst <= args.tol;
    let _ = writeln!(out, "scheme d={} state={} trials={}", d, args.state, args.trials);
    let _ = writeln!(out, "max-entry deviation |output - input| = {:.3e}", worst);
    let formatted: Vec<String> = histogram.iter().map(|p| format!("{:.6}", p)).collect();
    let _ = writeln!(out, "outcome histogram: [{}]", formatted.join(", "));
    let _ = writeln!(out, "{}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

pub fn run_count_latin(args: &CountLatinArgs, out: &mut dyn Write) -> Result<i32, InputError> {
    if args.d > MAX_COUNT_ORDER {
        return Err(bad(format!(
            "d={} is beyond exhaustive search (supported d <= {}); the count grows super-exponentially, about 7.5e24 at d=10",
            args.d, MAX_COUNT_ORDER
        )));
    }
    let count = count_normalized_latin(args.d)?;
    let _ = writeln!(out, "{}", count);
    Ok(EXIT_PASS)
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Generate(a) => run_generate(a, out),
        Command::Verify(a) => run_verify(a, out),
        Command::Simulate(a) => run_simulate(a, out),
        Command::CountLatin(a) => run_count_latin(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_INPUT_ERROR
        }
    }
}

/// The document kind each `generate` kind produces.
pub fn kind_of(kind: GenerateKind) -> Kind {
    match kind {
        GenerateKind::Latin => Kind::Latin,
        GenerateKind::Hadamard => Kind::Hadamard,
        GenerateKind::UnitaryBasis => Kind::UnitaryBasis,
        GenerateKind::EntangledBasis => Kind::EntangledBasis,
        GenerateKind::Scheme => Kind::Scheme,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_specs() {
        assert_eq!(parse_state("pure:3").unwrap(), StateSpec::Pure(3));
        assert_eq!(parse_state("maximally-mixed").unwrap(), StateSpec::MaximallyMixed);
        assert_eq!(parse_state("random").unwrap(), StateSpec::Random);
        assert!(parse_state("pure:x").is_err());
        assert!(parse_state("mixed").is_err());
    }

    #[test]
    fn count_latin_guard() {
        let mut out = Vec::new();
        assert!(run_count_latin(&CountLatinArgs { d: 6 }, &mut out).is_err());
        assert_eq!(run_count_latin(&CountLatinArgs { d: 5 }, &mut out).unwrap(), EXIT_PASS);
        assert_eq!(String::from_utf8(out).unwrap().trim(), "56");
    }
}
