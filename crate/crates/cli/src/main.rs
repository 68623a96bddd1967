//! `momentlab` command-line front end.
//!
//! Every subcommand reads JSON (a file path, or stdin when the path is `-`)
//! and writes JSON to stdout or `--output`. Errors are reported as
//! `{"kind": ..., "message": ...}` on stderr with exit status 1, or 2 when
//! the arguments or input files do not parse.

mod demos;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use momentlab::extensions::{build_extension, RepresentingPair};
use momentlab::geometry::{
    classify_flat_support, curve_catalog, flatness_for_support, localization_residual, marginal_transport, psi_injectivity_sample_test,
    Curve,
};
use momentlab::measures::{discrete_moments, transport_phi, transport_psi, trig_moments, HerglotzTable};
use momentlab::positivity::{hankel, is_psd, moment_matrix_halfplane, moment_matrix_quadrant, toeplitz, HermitianMatrix};
use momentlab::quadrature::{digits_to_bits, QuadratureSpec};
use momentlab::recovery::{hankel_to_jacobi, jacobi_to_atoms, stieltjes_exact_moment, stieltjes_moment, stieltjes_perturbation, tensor_sequence, StieltjesFamily};
use momentlab::sequences::{detect_flatness, flatness, is_extension, restrict, HamburgerJson, HamburgerTable};
use momentlab::{DiscreteMeasure, Error, ExtendedMomentTable, MomentTable, RealMomentTable2D};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "momentlab", version, about = "Complex moment problems on the quadrant and the half-plane")]
struct Cli {
    /// Working precision in decimal digits for multiprecision steps.
    #[arg(long, global = true, default_value_t = 39)]
    precision: u32,
    /// Compact single-line JSON instead of pretty output.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment table of a discrete measure.
    Moments {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = MomentKind::Complex)]
        kind: MomentKind,
    },
    /// Positive semidefiniteness of a moment matrix.
    CheckPd {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        /// Half-size of the index set. Ignored for explicit matrices.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Extended table of a representing pair on the half-plane.
    Extend {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        window: usize,
    },
    /// Quadrant part of an extended table, optionally compared with a table.
    Restrict {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Flatness along the lines km + ln = c, or detection of all (k, l) up to a bound.
    Flatness {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true, requires = "l", conflicts_with = "detect")]
        k: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "k")]
        l: Option<i64>,
        #[arg(long)]
        detect: Option<usize>,
    },
    /// Support class forced by (k, l)-flatness.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
    },
    /// Pushforward of a measure.
    Transport {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long, value_enum)]
        map: TransportMap,
    },
    /// Sampling search for two curve points with the same z/z̄.
    Injectivity {
        /// Curve JSON. Omit to run the built-in catalog.
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Largest |p| over the atoms of a measure.
    Localize {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
    /// N-atom Gauss measure from Hamburger moments s_0..s_{2N-1}.
    Recover {
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        atoms: usize,
    },
    /// Moments of the log-normal family sharing all moments.
    Stieltjes {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda: f64,
        /// Integrate x^n f_0(x) sin(2π ln x) instead.
        #[arg(long)]
        perturbation: bool,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
        #[arg(long)]
        max_subdivisions: Option<usize>,
    },
    /// Two-dimensional table s_m t_n of two Hamburger sequences.
    Tensor {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
    },
    /// Scripted end-to-end scenarios.
    Demo {
        #[command(subcommand)]
        scenario: demos::Scenario,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MomentKind {
    /// γ_{m,n} = ∫ z^m z̄^n, square table of the given degree.
    Complex,
    /// ∫ x^k y^l on a plane measure, square table.
    Real2d,
    /// s_k = ∫ x^k on a real-line measure, k ≤ degree.
    Hamburger,
    /// s_n = ∫ z^n on a circle measure, 0 ≤ n ≤ degree.
    Trig,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TransportMap {
    /// z ↦ z² on the circle.
    Phi,
    /// z ↦ z/z̄ on ℂ*.
    Psi,
    /// (x, y) ↦ x.
    X,
    /// (x, y) ↦ y.
    Y,
}

/// Trigonometric moments s_0..s_D as [re, im] pairs.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigJson {
    trig: Vec<[f64; 2]>,
}

impl TrigJson {
    fn from_table(t: &HerglotzTable) -> Self {
        TrigJson {
            trig: (0..=t.degree() as i64)
                .map(|n| {
                    let v = t.get(n).unwrap();
                    [v.re, v.im]
                })
                .collect(),
        }
    }

    fn to_value(&self) -> Value {
        json!({ "trig": self.trig })
    }
}

/// Failure of a run, split by exit status.
enum Failure {
    Parse(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn read_text(path: &PathBuf) -> std::result::Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
    }
}

fn read_value(path: &PathBuf) -> std::result::Result<Value, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(value: Value, what: &str) -> std::result::Result<T, Failure> {
    serde_json::from_value(value).map_err(|e| Failure::Parse(format!("not a valid {what}: {e}")))
}

fn read<T: DeserializeOwned>(path: &PathBuf, what: &str) -> std::result::Result<T, Failure> {
    parse(read_value(path)?, what)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable output")
}

fn hamburger(path: &PathBuf, bits: u32) -> std::result::Result<HamburgerTable, Failure> {
    Ok(read::<HamburgerJson>(path, "Hamburger sequence")?.into_table(bits)?)
}

fn require_d(d: Option<usize>) -> std::result::Result<usize, Failure> {
    d.ok_or_else(|| Failure::Compute(Error::Precondition("--d is required for moment tables and sequences".into())))
}

/// Chooses the moment matrix from the shape of the input JSON.
fn check_pd(value: Value, d: Option<usize>, bits: u32) -> Outcome {
    let has = |k: &str| value.get(k).is_some();
    let (kind, matrix) = if has("dimension") {
        ("matrix", parse::<HermitianMatrix>(value, "Hermitian matrix")?)
    } else if has("window") {
        let t: ExtendedMomentTable = parse(value, "extended moment table")?;
        ("half-plane", moment_matrix_halfplane(&t, require_d(d)?)?)
    } else if has("moments") {
        let s = parse::<HamburgerJson>(value, "Hamburger sequence")?.into_table(bits)?;
        ("hankel", hankel(&s, require_d(d)?)?)
    } else if has("trig") {
        let t: TrigJson = parse(value, "trigonometric sequence")?;
        let values: Vec<Complex64> = t.trig.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        ("toeplitz", toeplitz(&HerglotzTable::from_nonnegative(&values)?, require_d(d)?)?)
    } else {
        let t: MomentTable = parse(value, "moment table")?;
        ("quadrant", moment_matrix_quadrant(&t, require_d(d)?)?)
    };
    let report = is_psd(&matrix);
    let mut out = to_value(&report);
    out["matrix"] = json!(kind);
    out["dimension"] = json!(matrix.dimension());
    out["index"] = to_value(&matrix.labels());
    Ok(out)
}

fn run(cli: &Cli) -> Outcome {
    let bits = digits_to_bits(cli.precision);
    match &cli.command {
        Command::Moments { input, degree, kind } => {
            let mu: DiscreteMeasure = read(input, "measure")?;
            match kind {
                MomentKind::Complex => Ok(to_value(&discrete_moments(&mu, *degree)?)),
                MomentKind::Real2d => Ok(to_value(&RealMomentTable2D::of_measure(&mu, *degree)?)),
                MomentKind::Hamburger => {
                    let s = HamburgerTable::of_measure(&mu, degree + 1, bits)?;
                    Ok(to_value(&HamburgerJson::from_table(&s)))
                }
                MomentKind::Trig => Ok(TrigJson::from_table(&trig_moments(&mu, *degree)?).to_value()),
            }
        }
        Command::CheckPd { input, d } => check_pd(read_value(input)?, *d, bits),
        Command::Extend { input, window } => {
            let pair: RepresentingPair = read(input, "representing pair")?;
            Ok(to_value(&build_extension(&pair, *window)?))
        }
        Command::Restrict { input, against } => {
            let big: ExtendedMomentTable = read(input, "extended moment table")?;
            match against {
                None => Ok(to_value(&restrict(&big))),
                Some(path) => {
                    let gamma: MomentTable = read(path, "moment table")?;
                    Ok(to_value(&is_extension(&big, &gamma)?))
                }
            }
        }
        Command::Flatness { input, k, l, detect } => {
            let gamma: MomentTable = read(input, "moment table")?;
            match (k, l, detect) {
                (Some(k), Some(l), None) => Ok(to_value(&flatness(&gamma, *k, *l)?)),
                (None, None, Some(bound)) => Ok(to_value(&detect_flatness(&gamma, *bound))),
                _ => Err(Failure::Compute(Error::Precondition("give either --k and --l, or --detect".into()))),
            }
        }
        Command::Classify { k, l } => {
            let class = classify_flat_support(*k, *l)?;
            let (ck, cl) = flatness_for_support(class);
            Ok(json!({
                "class": to_value(&class),
                "canonical_flatness": [ck, cl],
                "note": class.note(),
            }))
        }
        Command::Transport { input, map } => {
            let mu: DiscreteMeasure = read(input, "measure")?;
            let out = match map {
                TransportMap::Phi => transport_phi(&mu)?,
                TransportMap::Psi => transport_psi(&mu)?,
                TransportMap::X => marginal_transport(&mu, 1)?,
                TransportMap::Y => marginal_transport(&mu, 2)?,
            };
            Ok(to_value(&out))
        }
        Command::Injectivity { input, samples } => match input {
            Some(path) => {
                let curve: Curve = read(path, "curve")?;
                Ok(json!({ "curve": curve.name(), "result": to_value(&psi_injectivity_sample_test(&curve, *samples)?) }))
            }
            None => {
                let results = curve_catalog()
                    .iter()
                    .map(|c| Ok(json!({ "curve": c.name(), "result": to_value(&psi_injectivity_sample_test(c, *samples)?) })))
                    .collect::<std::result::Result<Vec<_>, Error>>()?;
                Ok(Value::Array(results))
            }
        },
        Command::Localize { input, curve } => {
            let mu: DiscreteMeasure = read(input, "measure")?;
            let curve: Curve = read(curve, "curve")?;
            Ok(json!({ "curve": curve.name(), "residual": localization_residual(&mu, &curve) }))
        }
        Command::Recover { input, atoms } => {
            let s = hamburger(input, bits)?;
            let jacobi = hankel_to_jacobi(&s, *atoms)?;
            let mass = s.get(0).map(|v| v.to_f64()).unwrap_or(0.0);
            let measure = jacobi_to_atoms(&jacobi, mass)?;
            Ok(json!({ "jacobi": to_value(&jacobi), "measure": to_value(&measure) }))
        }
        Command::Stieltjes {
            n,
            lambda,
            perturbation,
            rel_tol,
            abs_tol,
            max_subdivisions,
        } => {
            let mut spec = QuadratureSpec::with_digits(cli.precision);
            if let Some(v) = rel_tol {
                spec.rel_tol = *v;
            }
            if let Some(v) = abs_tol {
                spec.abs_tol = *v;
            }
            if let Some(v) = max_subdivisions {
                spec.max_subdivisions = *v;
            }
            spec.validate()?;
            let exact = stieltjes_exact_moment(*n, spec.precision_bits());
            let digits = cli.precision as usize;
            let result = if *perturbation {
                stieltjes_perturbation(*n, &spec)?
            } else {
                stieltjes_moment(*n, &StieltjesFamily::new(*lambda)?, &spec)?
            };
            Ok(json!({
                "n": n,
                "lambda": if *perturbation { Value::Null } else { json!(lambda) },
                "integral": if *perturbation { "perturbation" } else { "moment" },
                "value": result.value.to_string_radix(10, Some(digits)),
                "error_estimate": result.error.to_f64(),
                "subdivisions": result.subdivisions,
                "exact_moment": exact.to_string_radix(10, Some(digits)),
            }))
        }
        Command::Tensor { s, t } => {
            let s = hamburger(s, bits)?;
            let t = hamburger(t, bits)?;
            Ok(to_value(&tensor_sequence(&s, &t)?))
        }
        Command::Demo { scenario } => demos::run(scenario, bits),
    }
}

fn emit(cli: &Cli, value: &Value) -> io::Result<()> {
    let mut text = if cli.json {
        serde_json::to_string(value)?
    } else {
        serde_json::to_string_pretty(value)?
    };
    text.push('\n');
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", json!({ "kind": kind, "message": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report("parse", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(value) => match emit(&cli, &value) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                report("io", &e.to_string());
                ExitCode::from(1)
            }
        },
        Err(Failure::Parse(msg)) => {
            report("parse", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            report(e.kind(), &e.to_string());
            ExitCode::from(1)
        }
    }
}
