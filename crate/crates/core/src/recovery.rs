//! Atomic recovery from Hamburger moments (Hankel Cholesky → Jacobi matrix →
//! Gauss nodes and weights), the log-normal Stieltjes family, tensor
//! sequences, and the product-measure property suite.

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{marginal_transport, zariski_density_test, ZariskiVerdict};
use crate::measures::{product_measure, Atom, DiscreteMeasure, Domain};
use crate::quadrature::{integrate_with_breakpoints, QuadratureResult, QuadratureSpec};
use crate::sequences::{HamburgerTable, RealMomentTable2D};

/// Default working precision for recovery, in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// QL sweeps allowed per eigenvalue.
const MAX_QL_ITERATIONS: usize = 60;

/// Symmetric tridiagonal matrix of the three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    alpha: Vec<Float>,
    beta: Vec<Float>,
}

impl JacobiMatrix {
    /// Diagonal α_0..α_{N−1}, off-diagonal β_1..β_{N−1} (all positive).
    pub fn new(alpha: Vec<Float>, beta: Vec<Float>) -> Result<Self> {
        if alpha.is_empty() || beta.len() + 1 != alpha.len() {
            return Err(Error::Range(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                alpha.len(),
                alpha.len().saturating_sub(1),
                beta.len()
            )));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::Domain("Jacobi entries must be finite".into()));
        }
        if beta.iter().any(|b| *b <= 0) {
            return Err(Error::Domain("off-diagonal entries must be positive".into()));
        }
        Ok(JacobiMatrix { alpha, beta })
    }

    pub fn from_f64(alpha: &[f64], beta: &[f64], prec: u32) -> Result<Self> {
        Self::new(
            alpha.iter().map(|&a| Float::with_val(prec, a)).collect(),
            beta.iter().map(|&b| Float::with_val(prec, b)).collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Float] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Float] {
        &self.beta
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(Float::to_f64).collect()
    }

    pub fn beta_f64(&self) -> Vec<f64> {
        self.beta.iter().map(Float::to_f64).collect()
    }

    fn precision(&self) -> u32 {
        self.alpha.iter().chain(&self.beta).map(Float::prec).max().unwrap_or(DEFAULT_PRECISION)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobiJson {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Serialize for JacobiMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        JacobiJson {
            alpha: self.alpha_f64(),
            beta: self.beta_f64(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JacobiMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = JacobiJson::deserialize(deserializer)?;
        JacobiMatrix::from_f64(&raw.alpha, &raw.beta, DEFAULT_PRECISION).map_err(serde::de::Error::custom)
    }
}

/// Pivots with d_k ≤ 2^{−0.8·bits}·H_kk count as zero.
fn rank_threshold(bits: u32) -> f64 {
    2f64.powf(-0.8 * bits as f64)
}

/// Cholesky rows 0..N−1 of the N × (N+1) Hankel block, at `prec` bits.
fn recurrence_by_cholesky(s: &HamburgerTable, n: usize, prec: u32, threshold: f64) -> Result<JacobiMatrix> {
    let h = |i: usize, j: usize| Float::with_val(prec, s.get(i + j).expect("length checked"));
    let mut r: Vec<Vec<Float>> = vec![vec![Float::with_val(prec, 0); n + 1]; n];
    for k in 0..n {
        let mut pivot = h(k, k);
        for row in r.iter().take(k) {
            pivot -= Float::with_val(prec, row[k].square_ref());
        }
        let scale = h(k, k).abs();
        if pivot <= Float::with_val(prec, &scale * threshold) {
            if pivot < -Float::with_val(prec, &scale * threshold) {
                return Err(Error::Domain(format!("Hankel matrix is not positive semidefinite (pivot {k} is negative)")));
            }
            return Err(Error::RankDeficient { rank: k, requested: n });
        }
        let rkk = pivot.sqrt();
        for j in k + 1..=n {
            let mut v = h(k, j);
            for row in r.iter().take(k) {
                v -= Float::with_val(prec, &row[k] * &row[j]);
            }
            r[k][j] = v / &rkk;
        }
        r[k][k] = rkk;
    }
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let mut a = Float::with_val(prec, &r[k][k + 1] / &r[k][k]);
        if k > 0 {
            a -= Float::with_val(prec, &r[k - 1][k] / &r[k - 1][k - 1]);
            beta.push(Float::with_val(prec, &r[k][k] / &r[k - 1][k - 1]));
        }
        alpha.push(a);
    }
    JacobiMatrix::new(alpha, beta)
}

/// Recurrence coefficients α_0..α_{N−1}, β_1..β_{N−1} from s_0..s_{2N−1}.
///
/// Rank is judged against the precision of the data; arithmetic runs at the
/// larger of that precision and `DEFAULT_PRECISION`, and is retried once at
/// twice the precision when a pivot fails.
pub fn hankel_to_jacobi(s: &HamburgerTable, n: usize) -> Result<JacobiMatrix> {
    if n == 0 {
        return Err(Error::Range("at least one node is required".into()));
    }
    if s.len() < 2 * n {
        return Err(Error::Range(format!("{n} nodes need s_0..s_{}, got {} moments", 2 * n - 1, s.len())));
    }
    if *s.get(0).unwrap() <= 0 {
        return Err(Error::RankDeficient { rank: 0, requested: n });
    }
    let threshold = rank_threshold(s.precision());
    let prec = s.precision().max(DEFAULT_PRECISION);
    match recurrence_by_cholesky(s, n, prec, threshold) {
        Ok(j) => Ok(j),
        Err(Error::RankDeficient { .. }) | Err(Error::Domain(_)) => recurrence_by_cholesky(s, n, 2 * prec, threshold),
        Err(e) => Err(e),
    }
}

/// Eigenvalues of J and squared first eigenvector components, by implicit QL.
fn gauss_nodes(j: &JacobiMatrix) -> Result<(Vec<Float>, Vec<Float>)> {
    let n = j.order();
    let prec = j.precision();
    let eps = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
    let mut d: Vec<Float> = j.alpha.iter().map(|a| Float::with_val(prec, a)).collect();
    let mut e: Vec<Float> = j.beta.iter().map(|b| Float::with_val(prec, b)).collect();
    e.push(Float::with_val(prec, 0));
    let mut z: Vec<Float> = (0..n).map(|i| Float::with_val(prec, if i == 0 { 1 } else { 0 })).collect();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = Float::with_val(prec, d[m].abs_ref()) + Float::with_val(prec, d[m + 1].abs_ref());
                if Float::with_val(prec, e[m].abs_ref()) <= Float::with_val(prec, &dd * &eps) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::Numeric(format!("QL iteration did not converge for eigenvalue {l}")));
            }
            let mut g = Float::with_val(prec, &d[l + 1] - &d[l]) / Float::with_val(prec, 2 * &e[l]);
            let mut r = Float::with_val(prec, g.hypot_ref(&Float::with_val(prec, 1)));
            let signed_r = if g.is_sign_negative() { -r.clone() } else { r.clone() };
            g = Float::with_val(prec, &d[m] - &d[l]) + Float::with_val(prec, &e[l] / Float::with_val(prec, &g + &signed_r));
            let mut s = Float::with_val(prec, 1);
            let mut c = Float::with_val(prec, 1);
            let mut p = Float::with_val(prec, 0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = Float::with_val(prec, &s * &e[i]);
                let b = Float::with_val(prec, &c * &e[i]);
                r = Float::with_val(prec, f.hypot_ref(&g));
                e[i + 1] = r.clone();
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = Float::with_val(prec, 0);
                    deflated = true;
                    break;
                }
                s = Float::with_val(prec, &f / &r);
                c = Float::with_val(prec, &g / &r);
                g = Float::with_val(prec, &d[i + 1] - &p);
                r = Float::with_val(prec, &d[i] - &g) * &s + Float::with_val(prec, 2 * &c) * &b;
                p = Float::with_val(prec, &s * &r);
                d[i + 1] = Float::with_val(prec, &g + &p);
                g = Float::with_val(prec, &c * &r) - &b;
                let zi1 = z[i + 1].clone();
                z[i + 1] = Float::with_val(prec, &s * &z[i]) + Float::with_val(prec, &c * &zi1);
                z[i] = Float::with_val(prec, &c * &z[i]) - Float::with_val(prec, &s * &zi1);
            }
            if deflated {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::with_val(prec, 0);
        }
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigenvalues are not finite".into()));
    }
    let mut pairs: Vec<(Float, Float)> = d.into_iter().zip(z.into_iter().map(|v| v.square())).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    Ok(pairs.into_iter().unzip())
}

/// Gauss measure of J: atoms at the eigenvalues, weights mass × (first eigenvector component)².
pub fn jacobi_to_atoms(j: &JacobiMatrix, total_mass: f64) -> Result<DiscreteMeasure> {
    if !(total_mass.is_finite() && total_mass >= 0.0) {
        return Err(Error::Domain(format!("total mass {total_mass} must be finite and nonnegative")));
    }
    let (nodes, weights) = gauss_nodes(j)?;
    DiscreteMeasure::new(
        Domain::RealLine,
        nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| Atom::new(num_complex::Complex64::new(x.to_f64(), 0.0), total_mass * w.to_f64())),
    )
}

/// N-point Gauss measure of s; reproduces s_0..s_{2N−1}.
pub fn recover_atomic(s: &HamburgerTable, n: usize) -> Result<DiscreteMeasure> {
    let j = hankel_to_jacobi(s, n)?;
    jacobi_to_atoms(&j, s.get(0).unwrap().to_f64())
}

/// Densities π^{−1/2} e^{−(ln x)²}(1 + λ sin(2π ln x)) on (0, ∞), all with moments e^{(n+1)²/4}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StieltjesFamily {
    lambda: f64,
}

impl StieltjesFamily {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && (-1.0..=1.0).contains(&lambda)) {
            return Err(Error::Domain(format!("λ = {lambda} is outside [-1, 1]")));
        }
        Ok(StieltjesFamily { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// f_λ(x) at the precision of x; zero for x ≤ 0.
    pub fn density(&self, x: &Float) -> Float {
        let prec = x.prec();
        if *x <= 0 {
            return Float::with_val(prec, 0);
        }
        let u = Float::with_val(prec, x.ln_ref());
        self.log_profile(&u)
    }

    /// f_λ(e^u) = π^{−1/2} e^{−u²}(1 + λ sin 2πu).
    fn log_profile(&self, u: &Float) -> Float {
        let prec = u.prec();
        let gauss = Float::with_val(prec, -Float::with_val(prec, u.square_ref())).exp();
        let pi = Float::with_val(prec, Constant::Pi);
        let wave = Float::with_val(prec, &pi * 2u32) * u;
        let factor = Float::with_val(prec, wave.sin()) * self.lambda + 1u32;
        gauss * factor / pi.sqrt()
    }
}

/// e^{(n+1)²/4} at `prec` bits.
pub fn stieltjes_exact_moment(n: u32, prec: u32) -> Float {
    let e = Float::with_val(prec, (n as u64 + 1) * (n as u64 + 1)) / 4u32;
    e.exp()
}

/// Integration range [−L, n+1+L] in u = ln x with unit breakpoints.
fn log_breakpoints(n: u32, spec: &QuadratureSpec) -> Vec<Float> {
    let prec = spec.precision_bits();
    let half_width = ((spec.digits as f64 + 5.0) * std::f64::consts::LN_10).sqrt().max(7.0).ceil() as i64;
    let lo = -half_width;
    let hi = n as i64 + 1 + half_width;
    (lo..=hi).map(|k| Float::with_val(prec, k)).collect()
}

/// ∫₀^∞ x^n f_λ(x) dx, integrated in u = ln x as ∫ e^{(n+1)u} f_λ(e^u) du.
pub fn stieltjes_moment(n: u32, family: &StieltjesFamily, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let prec = spec.precision_bits();
    let integrand = |u: &Float| {
        let growth = Float::with_val(prec, u * (n + 1)).exp();
        family.log_profile(u) * growth
    };
    integrate_with_breakpoints(integrand, &log_breakpoints(n, spec), spec)
}

/// ∫₀^∞ x^n f_0(x) sin(2π ln x) dx, which vanishes for every n.
///
/// The absolute tolerance is raised to rel_tol × e^{(n+1)²/4}, since a zero
/// integral has no relative scale of its own.
pub fn stieltjes_perturbation(n: u32, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let prec = spec.precision_bits();
    let scale = stieltjes_exact_moment(n, 53).to_f64();
    let spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(spec.rel_tol * scale),
        ..*spec
    };
    let pi = Float::with_val(prec, Constant::Pi);
    let root_pi = Float::with_val(prec, pi.sqrt_ref());
    let integrand = |u: &Float| {
        let exponent = Float::with_val(prec, u * (n + 1)) - Float::with_val(prec, u.square_ref());
        let wave = Float::with_val(prec, &pi * 2u32) * u;
        exponent.exp() * wave.sin() / &root_pi
    };
    integrate_with_breakpoints(integrand, &log_breakpoints(n, &spec), &spec)
}

/// a_{m,n} = s_m t_n for m, n ≤ min(len s, len t) − 1.
pub fn tensor_sequence(s: &HamburgerTable, t: &HamburgerTable) -> Result<RealMomentTable2D> {
    let len = s.len().min(t.len());
    if len == 0 {
        return Err(Error::Range("tensor product needs nonempty sequences".into()));
    }
    let sv = s.to_f64();
    let tv = t.to_f64();
    Ok(RealMomentTable2D::square(len - 1, |m, n| sv[m] * tv[n]))
}

/// Outcome of one check of the product-measure suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dc1Report {
    pub degree: usize,
    pub density_degree: u32,
    /// Two-dimensional moments of μ⊗ν₁ and μ⊗ν₂ agree to the degree while the products differ.
    pub shared_moments: CheckOutcome,
    /// Neither product charges the line {0} × ℝ.
    pub no_mass_on_axis: CheckOutcome,
    /// The union of supports is not contained in a curve of degree ≤ density_degree.
    pub zariski_dense: CheckOutcome,
}

impl Dc1Report {
    pub fn all_passed(&self) -> bool {
        self.shared_moments.passed && self.no_mass_on_axis.passed && self.zariski_dense.passed
    }
}

/// Runs the three product-measure checks on μ⊗ν₁ and μ⊗ν₂.
///
/// Failed preconditions (ν₁ = ν₂, an atom of μ at 0, too few points) are
/// reported as failed checks, not as errors.
pub fn dc1_property_suite(
    mu: &DiscreteMeasure,
    nu1: &DiscreteMeasure,
    nu2: &DiscreteMeasure,
    degree: usize,
    density_degree: u32,
) -> Result<Dc1Report> {
    for m in [mu, nu1, nu2] {
        if m.domain() != Domain::RealLine {
            return Err(Error::Domain(format!("the suite takes real-line measures, got {}", m.domain())));
        }
    }
    let p1 = product_measure(mu, nu1)?;
    let p2 = product_measure(mu, nu2)?;

    let a1 = RealMomentTable2D::of_measure(&p1, degree)?;
    let a2 = RealMomentTable2D::of_measure(&p2, degree)?;
    let diff = a1.max_difference(&a2);
    let tol = 1e-10 * (1.0 + a1.max_abs());
    let products_differ = !p1.approx_eq(&p2, 1e-9, 1e-9);
    let shared_moments = CheckOutcome {
        passed: diff <= tol && products_differ,
        residual: diff,
        detail: if !products_differ {
            "the two products coincide".to_string()
        } else if diff > tol {
            format!("moments differ by {diff:e} (tolerance {tol:e})")
        } else {
            format!("moments agree to degree {degree} within {tol:e}; the products differ")
        },
    };

    let axis_mass = [&p1, &p2]
        .iter()
        .map(|p| marginal_transport(p, 1).map(|m| m.mass_at(num_complex::Complex64::new(0.0, 0.0))))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let no_mass_on_axis = CheckOutcome {
        passed: axis_mass == 0.0,
        residual: axis_mass,
        detail: format!("largest mass on {{0}} × ℝ is {axis_mass:e}"),
    };

    let points: Vec<(f64, f64)> = p1.plus(&p2)?.atoms().iter().map(|a| (a.location.re, a.location.im)).collect();
    let zariski_dense = match zariski_density_test(&points, density_degree) {
        Ok(ZariskiVerdict::DenseAtDegree { sigma_min, sigma_max, .. }) => CheckOutcome {
            passed: true,
            residual: sigma_min / sigma_max,
            detail: format!("{} points, dense at degree {density_degree}", points.len()),
        },
        Ok(ZariskiVerdict::Annihilated { sigma_min, sigma_max, .. }) => CheckOutcome {
            passed: false,
            residual: sigma_min / sigma_max,
            detail: format!("{} points lie on a curve of degree ≤ {density_degree}", points.len()),
        },
        Err(e) => CheckOutcome {
            passed: false,
            residual: f64::NAN,
            detail: e.to_string(),
        },
    };

    Ok(Dc1Report {
        degree,
        density_degree,
        shared_moments,
        no_mass_on_axis,
        zariski_dense,
    })
}

/// Standard configuration: μ uniform on {1, …, 6}, ν₁ with four atoms, ν₂ its 2-point Gauss compression.
pub fn dc1_example_configuration() -> Result<(DiscreteMeasure, DiscreteMeasure, DiscreteMeasure)> {
    let mu = DiscreteMeasure::real(&(1..=6).map(|k| (k as f64, 1.0 / 6.0)).collect::<Vec<_>>())?;
    let nu1 = DiscreteMeasure::real(&[(-1.5, 0.1), (-0.2, 0.3), (0.7, 0.4), (2.0, 0.2)])?;
    let s = HamburgerTable::of_measure(&nu1, 4, DEFAULT_PRECISION)?;
    let nu2 = recover_atomic(&s, 2)?;
    Ok((mu, nu1, nu2))
}
