//! Scripted scenarios. Each one builds its inputs, runs the checks that
//! characterize the construction and fails with an invariant error if any
//! check does not hold.

use clap::Subcommand;
use momentlab::extensions::{build_extension, measure_to_pair, snu2_family, RepresentingPair};
use momentlab::geometry::{agnesi_fiber, InjectivityVerdict, localization_residual, psi_injectivity_sample_test, Curve, CurveKind, ZPoly};
use momentlab::measures::{discrete_moments, monomial, psi, shift_to_horizontal_line, Atom};
use momentlab::positivity::{hankel, is_psd, moment_matrix_halfplane, moment_matrix_quadrant};
use momentlab::recovery::{dc1_example_configuration, dc1_property_suite, recover_atomic};
use momentlab::sequences::{flatness, from_hamburger, restrict, HamburgerTable};
use momentlab::{DiscreteMeasure, Domain, Error, MomentTable, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::{to_value, Outcome};

#[derive(Subcommand, Debug)]
pub enum Scenario {
    /// Convex family of extensions of a measure with an atom at 0.
    Snu2 {
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Mass of the atom at 0.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 4)]
        window: usize,
    },
    /// Without an atom at 0 the extension does not depend on the circle profile.
    Null {
        #[arg(long, default_value_t = 6)]
        window: usize,
    },
    /// Hamburger sequence embedded as a (1,1)-flat complex table.
    HamC {
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Two measures on ℝ + i with the same truncated complex moments.
    NoAtom,
    /// Product measures μ⊗ν₁, μ⊗ν₂ with shared moments.
    Dc1 {
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 2)]
        density_degree: u32,
    },
    /// Fibers of the Witch of Agnesi and a measure on them.
    Agnesi,
    /// Distinct measures on a curve where z/z̄ is injective give distinct extensions.
    #[command(name = "0notatom")]
    ZeroNotAtom {
        #[arg(long, default_value_t = 4)]
        window: usize,
    },
}

struct Checks(Vec<Value>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn add(&mut self, name: &str, passed: bool, value: Value) {
        self.0.push(json!({ "check": name, "passed": passed, "value": value }));
    }

    fn finish(self, scenario: &str, exercises: &str, mut data: Value) -> Outcome {
        let failed: Vec<String> = self
            .0
            .iter()
            .filter(|c| c["passed"] != json!(true))
            .map(|c| c["check"].as_str().unwrap_or_default().to_string())
            .collect();
        if !failed.is_empty() {
            return Err(Error::Invariant(format!("{scenario}: failed checks {}", failed.join(", "))).into());
        }
        data["scenario"] = json!(scenario);
        data["exercises"] = json!(exercises);
        data["checks"] = Value::Array(self.0);
        Ok(data)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pair_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn quadrant_gap(a: &MomentTable, b: &MomentTable) -> f64 {
    a.max_difference(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

fn snu2(t: f64, alpha: f64, window: usize) -> Outcome {
    let mu = DiscreteMeasure::from_pairs(Domain::ComplexPlane, &[(c(0.0, 0.0), alpha)])?;
    let big = snu2_family(&mu, t, window)?;
    let gamma = discrete_moments(&mu, window)?;
    let anchor = big.get(1, -1).expect("window is at least 1");
    let expected = alpha * (2.0 * t - 1.0);
    let mut checks = Checks::new();
    checks.add("quadrant equals the moments of μ", quadrant_gap(&restrict(&big), &gamma) <= 1e-12, json!(quadrant_gap(&restrict(&big), &gamma)));
    checks.add("Γ(1,−1) = α(2t−1)", (anchor - c(expected, 0.0)).norm() <= 1e-12, pair_value(anchor));
    if window >= 2 {
        let report = is_psd(&moment_matrix_halfplane(&big, window / 2)?);
        checks.add("half-plane matrix is PSD", report.is_psd(), json!(report.min_eigenvalue));
    }
    checks.finish(
        "snu2",
        "an atom of mass α at 0 splits into α(t δ₁ + (1−t) δ₋₁) on the circle, giving a segment of extensions",
        json!({ "t": t, "alpha": alpha, "entry_1_-1": pair_value(anchor), "table": to_value(&big) }),
    )
}

fn null(window: usize) -> Outcome {
    let mu = DiscreteMeasure::dirac(Domain::ComplexPlane, c(2.0, 0.0))?;
    let uniform: Vec<(Complex64, f64)> = (0..64)
        .map(|k| (Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0), 1.0 / 64.0))
        .collect();
    let profiles = [
        ("δ₁", DiscreteMeasure::dirac(Domain::UnitCircle, c(1.0, 0.0))?),
        ("δ_i", DiscreteMeasure::dirac(Domain::UnitCircle, c(0.0, 1.0))?),
        ("uniform-64", DiscreteMeasure::from_pairs(Domain::UnitCircle, &uniform)?),
    ];
    let tables = profiles
        .iter()
        .map(|(_, p)| build_extension(&measure_to_pair(&mu, p)?, window))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Checks::new();
    for (i, (name, _)) in profiles.iter().enumerate().skip(1) {
        let gap = tables[i].max_difference(&tables[0]);
        checks.add(&format!("profile {name} matches δ₁"), gap <= 1e-12, json!(gap));
    }
    checks.finish(
        "null",
        "a measure without an atom at 0 has exactly one half-plane extension",
        json!({ "measure": to_value(&mu), "window": window, "table": to_value(&tables[0]) }),
    )
}

fn ham_c(degree: usize, bits: u32) -> Outcome {
    let tau = DiscreteMeasure::real(&[(-1.0, 0.25), (0.5, 0.5), (2.0, 0.25)])?;
    let s = HamburgerTable::of_measure(&tau, 4 * degree + 1, bits)?;
    let gamma = from_hamburger(&s, 2 * degree)?;
    let direct = discrete_moments(&tau, 2 * degree)?;
    let mut checks = Checks::new();
    let gap = quadrant_gap(&gamma, &direct);
    checks.add("embedding equals the complex moments of the measure", gap <= 1e-12, json!(gap));
    let cert = flatness(&gamma, 1, 1)?;
    checks.add("table is (1,1)-flat", cert.confirmed(), to_value(&cert));
    let quad = is_psd(&moment_matrix_quadrant(&gamma, degree)?);
    checks.add("quadrant matrix is PSD", quad.is_psd(), json!(quad.min_eigenvalue));
    let hk = is_psd(&hankel(&s, 2 * degree)?);
    checks.add("Hankel matrix is PSD", hk.is_psd(), json!(hk.min_eigenvalue));
    checks.finish(
        "ham-c",
        "a Hamburger sequence is a complex moment sequence constant along m + n",
        json!({ "measure": to_value(&tau), "table": to_value(&gamma) }),
    )
}

/// Five-atom real measure and its three-point Gauss compression, moved to ℝ + i.
fn shifted_pair(bits: u32) -> Result<(DiscreteMeasure, DiscreteMeasure, usize)> {
    let tau1 = DiscreteMeasure::real(&[(-2.0, 0.15), (-0.6, 0.25), (0.4, 0.2), (1.3, 0.3), (2.7, 0.1)])?;
    let n = 3;
    let tau2 = recover_atomic(&HamburgerTable::of_measure(&tau1, 2 * n, bits.max(128))?, n)?;
    Ok((shift_to_horizontal_line(&tau1, 1.0)?, shift_to_horizontal_line(&tau2, 1.0)?, n))
}

fn no_atom(bits: u32) -> Outcome {
    let (mu1, mu2, n) = shifted_pair(bits)?;
    let line = ZPoly::new([((1, 0), c(1.0, 0.0)), ((0, 1), c(-1.0, 0.0)), ((0, 0), c(0.0, -2.0))])?;
    let curve = Curve::implicit("z - conj(z) - 2i", line.to_real())?;
    let order = 2 * n - 1;
    let g1 = discrete_moments(&mu1, order)?;
    let g2 = discrete_moments(&mu2, order)?;
    let scale = 1.0 + g1.max_abs();
    let (mut shared, mut beyond) = (0.0f64, 0.0f64);
    for (m, k) in g1.indices() {
        let gap = (g1.get(m, k).unwrap() - g2.get(m, k).unwrap()).norm() / scale;
        if m + k <= order {
            shared = shared.max(gap);
        } else {
            beyond = beyond.max(gap);
        }
    }
    let mut checks = Checks::new();
    let res = localization_residual(&mu1, &curve).max(localization_residual(&mu2, &curve));
    checks.add("both measures lie on z − z̄ = 2i", res <= 1e-12, json!(res));
    checks.add(&format!("moments agree for m + n ≤ {order}"), shared <= 1e-10, json!(shared));
    checks.add("moments differ beyond that order", beyond > 1e-6, json!(beyond));
    checks.add("the measures differ", !mu1.approx_eq(&mu2, 1e-6, 1e-6), json!(true));
    checks.finish(
        "no-atom",
        "measures on ℝ + i need not be determined by a truncated complex moment table",
        json!({ "measures": [to_value(&mu1), to_value(&mu2)], "shared_order": order }),
    )
}

fn dc1(degree: usize, density_degree: u32) -> Outcome {
    let (mu, nu1, nu2) = dc1_example_configuration()?;
    let report = dc1_property_suite(&mu, &nu1, &nu2, degree, density_degree)?;
    let mut checks = Checks::new();
    checks.add("two-dimensional moments shared", report.shared_moments.passed, to_value(&report.shared_moments));
    checks.add("no mass on {0} × ℝ", report.no_mass_on_axis.passed, to_value(&report.no_mass_on_axis));
    checks.add("supports are Zariski dense", report.zariski_dense.passed, to_value(&report.zariski_dense));
    checks.finish(
        "dc1",
        "products μ⊗ν₁ and μ⊗ν₂ share moments, avoid the axis and are not cut out by a low-degree curve",
        json!({ "mu": to_value(&mu), "nu1": to_value(&nu1), "nu2": to_value(&nu2) }),
    )
}

fn agnesi() -> Outcome {
    let witch = Curve::from_kind(CurveKind::Agnesi { a: 1.0, b: 1.0 })?;
    let mut fibers = Vec::new();
    let mut atoms = Vec::new();
    let mut checks = Checks::new();
    for (y, want) in [(1.0, 1usize), (0.5, 2), (0.2, 2)] {
        let fiber = agnesi_fiber(1.0, 1.0, y)?;
        checks.add(&format!("fiber at y = {y} has {want} point(s)"), fiber.len() == want, to_value(&fiber));
        atoms.extend(fiber.iter().map(|&(x, y)| Atom::new(c(x, y), 1.0)));
        fibers.push(json!({ "y": y, "points": to_value(&fiber) }));
    }
    let count = atoms.len() as f64;
    let mu = DiscreteMeasure::new(Domain::ComplexPlane, atoms.into_iter().map(|a| Atom::new(a.location, 1.0 / count)))?;
    let res = localization_residual(&mu, &witch);
    checks.add("measure on the fibers lies on the curve", res <= 1e-12, json!(res));
    let verdict = psi_injectivity_sample_test(&witch, 500)?;
    checks.add("no two sampled points share z/z̄", matches!(verdict, InjectivityVerdict::NoViolationFound { .. }), to_value(&verdict));
    checks.finish(
        "agnesi",
        "each horizontal line meets the Witch of Agnesi in at most two points, symmetric about the axis",
        json!({ "fibers": fibers, "measure": to_value(&mu) }),
    )
}

fn zero_not_atom(window: usize, bits: u32) -> Outcome {
    let (mu1, mu2, _) = shifted_pair(bits)?;
    let empty = || DiscreteMeasure::empty(Domain::UnitCircle);
    let g1 = build_extension(&RepresentingPair::new(mu1.clone(), empty())?, window)?;
    let g2 = build_extension(&RepresentingPair::new(mu2.clone(), empty())?, window)?;
    let oracle = |mu: &DiscreteMeasure, m: i64| -> Result<Complex64> {
        mu.atoms().iter().map(|a| Ok(a.weight * monomial(psi(a.location)?, m, 0))).sum()
    };
    let w = window as i64;
    let mut oracle_gap = 0.0f64;
    let mut best = (0i64, 0.0f64);
    for m in -w..=w {
        oracle_gap = oracle_gap
            .max((g1.get(m, -m).unwrap() - oracle(&mu1, m)?).norm())
            .max((g2.get(m, -m).unwrap() - oracle(&mu2, m)?).norm());
        let gap = (g1.get(m, -m).unwrap() - g2.get(m, -m).unwrap()).norm();
        if gap > best.1 {
            best = (m, gap);
        }
    }
    let mut checks = Checks::new();
    checks.add("anti-diagonal equals ∫ψ^m dμ", oracle_gap <= 1e-12, json!(oracle_gap));
    checks.add("extensions differ on the anti-diagonal", best.1 > 1e-6, json!({ "m": best.0, "difference": best.1 }));
    let line = Curve::implicit("z - conj(z) - 2i", ZPoly::new([((1, 0), c(1.0, 0.0)), ((0, 1), c(-1.0, 0.0)), ((0, 0), c(0.0, -2.0))])?.to_real())?;
    let parameterized = Curve::from_kind(CurveKind::Line { a: 0.0, b: 1.0, c: 1.0 })?;
    let verdict = psi_injectivity_sample_test(&parameterized, 500)?;
    checks.add("z/z̄ is injective on ℝ + i (sampled)", matches!(verdict, InjectivityVerdict::NoViolationFound { .. }), to_value(&verdict));
    let res = localization_residual(&mu1, &line).max(localization_residual(&mu2, &line));
    checks.add("both measures lie on ℝ + i", res <= 1e-12, json!(res));
    checks.finish(
        "0notatom",
        "on a curve where z/z̄ is injective, distinct measures without an atom at 0 have distinct extensions",
        json!({ "measures": [to_value(&mu1), to_value(&mu2)], "tables": [to_value(&g1), to_value(&g2)] }),
    )
}

pub fn run(scenario: &Scenario, bits: u32) -> Outcome {
    match *scenario {
        Scenario::Snu2 { t, alpha, window } => snu2(t, alpha, window),
        Scenario::Null { window } => null(window),
        Scenario::HamC { degree } => ham_c(degree, bits),
        Scenario::NoAtom => no_atom(bits),
        Scenario::Dc1 { degree, density_degree } => dc1(degree, density_degree),
        Scenario::Agnesi => agnesi(),
        Scenario::ZeroNotAtom { window } => zero_not_atom(window, bits),
    }
}
