//! Plane algebraic curves, support localization, flat-support classification,
//! sampling tests for injectivity of z ↦ z/z̄ on a curve, Agnesi fibers,
//! coordinate marginals and a bounded-degree Zariski density test.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, Domain};
use crate::sequences::alpha_coefficients;

/// Collinearity tolerance relative to |z1|·|z2|.
pub const COLLINEAR_TOLERANCE: f64 = 1e-10;
/// Relative singular-value gap below which the evaluation matrix has a kernel.
pub const ZARISKI_TOLERANCE: f64 = 1e-8;
/// Residual allowed for parameterized points, relative to 1 + Σ|coefficients|.
pub const CURVE_TOLERANCE: f64 = 1e-8;

/// Real polynomial Σ c_{i,j} x^i y^j.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (key, c) in terms {
            if !c.is_finite() {
                return Err(Error::Domain(format!("coefficient of x^{} y^{} is not finite", key.0, key.1)));
            }
            *coeffs.entry(key).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Ok(Poly2 { coeffs })
    }

    fn from_map(mut coeffs: BTreeMap<(u32, u32), f64>) -> Self {
        coeffs.retain(|_, c| *c != 0.0);
        Poly2 { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), f64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Σ |c|.
    pub fn coefficient_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs.iter().map(|(&(i, j), c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    /// Evaluation at z = x + iy.
    pub fn eval_z(&self, z: Complex64) -> f64 {
        self.eval(z.re, z.im)
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = BTreeMap::new();
        for (&(i, j), a) in &self.coeffs {
            for (&(k, l), b) in &other.coeffs {
                *out.entry((i + k, j + l)).or_insert(0.0) += a * b;
            }
        }
        Poly2::from_map(out)
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.coeffs.clone();
        for (&key, b) in &other.coeffs {
            *out.entry(key).or_insert(0.0) += b;
        }
        Poly2::from_map(out)
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2::from_map(self.coeffs.iter().map(|(&k, c)| (k, c * s)).collect())
    }
}

/// Complex polynomial Σ c_{a,b} z^a z̄^b.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZPoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl ZPoly {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), Complex64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (key, c) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain(format!("coefficient of z^{} z̄^{} is not finite", key.0, key.1)));
            }
            *coeffs.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(ZPoly { coeffs })
    }

    /// p(z, z̄) = Re + i·Im with Re, Im real polynomials in (x, y).
    pub fn real_parts(&self) -> (Poly2, Poly2) {
        let mut re = BTreeMap::new();
        let mut im = BTreeMap::new();
        for (&(a, b), c) in &self.coeffs {
            for (k, l, alpha) in alpha_coefficients(a as usize, b as usize) {
                let term = c * alpha;
                *re.entry((k as u32, l as u32)).or_insert(0.0) += term.re;
                *im.entry((k as u32, l as u32)).or_insert(0.0) += term.im;
            }
        }
        (Poly2::from_map(re), Poly2::from_map(im))
    }

    /// A real polynomial with the same zero set: the nonvanishing part when
    /// the other is identically zero, Re² + Im² otherwise.
    pub fn to_real(&self) -> Poly2 {
        let (re, im) = self.real_parts();
        match (re.is_zero(), im.is_zero()) {
            (_, true) => re,
            (true, false) => im,
            (false, false) => re.mul(&re).add(&im.mul(&im)),
        }
    }
}

/// Named parameter families of the curves the module knows how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveKind {
    /// a x + b y = c with a² + b² > 0 and c ≠ 0.
    Line { a: f64, b: f64, c: f64 },
    /// (y − y0)^l = a x^{2k} with l > 2k odd, a > 0, y0 > 0.
    ShiftedNeil { k: u32, l: u32, a: f64, y0: f64 },
    /// y (x² + a) = b with a, b > 0.
    Agnesi { a: f64, b: f64 },
    /// ((x − x0)² + y²)(x − x0) = 2a y² with a > 0, x0 > 0.
    Cissoid { a: f64, x0: f64 },
    /// y^l x^{2k} = a with l odd positive and a ≠ 0.
    PowerHyperbola { k: u32, l: u32, a: f64 },
    /// x² + y² = 1.
    UnitCircle,
    /// y = x² + c.
    Parabola { c: f64 },
    /// Given only by its polynomial; cannot be sampled.
    Implicit,
}

/// Real algebraic curve with an optional parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    name: String,
    implicit: Poly2,
    kind: CurveKind,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// (y − y0)^l as a polynomial.
fn shifted_power_y(y0: f64, l: u32) -> Poly2 {
    Poly2::from_map((0..=l).map(|j| ((0, j), binomial(l, j) * (-y0).powi((l - j) as i32))).collect())
}

fn real_root(v: f64, l: u32) -> f64 {
    v.signum() * v.abs().powf(1.0 / l as f64)
}

impl Curve {
    pub fn from_kind(kind: CurveKind) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Domain(msg.to_string()));
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let (name, poly) = match kind {
            CurveKind::Line { a, b, c } => {
                if !finite(&[a, b, c]) || a * a + b * b <= 0.0 || c == 0.0 {
                    return bad("line needs a² + b² > 0 and c ≠ 0");
                }
                ("line", Poly2::from_map([((1, 0), a), ((0, 1), b), ((0, 0), -c)].into_iter().collect()))
            }
            CurveKind::ShiftedNeil { k, l, a, y0 } => {
                if !finite(&[a, y0]) || l % 2 == 0 || l <= 2 * k || a <= 0.0 || y0 <= 0.0 {
                    return bad("shifted Neil curve needs l > 2k odd, a > 0, y0 > 0");
                }
                let rhs = Poly2::from_map([((2 * k, 0), -a)].into_iter().collect());
                ("shifted-neil", shifted_power_y(y0, l).add(&rhs))
            }
            CurveKind::Agnesi { a, b } => {
                if !finite(&[a, b]) || a <= 0.0 || b <= 0.0 {
                    return bad("Witch of Agnesi needs a, b > 0");
                }
                ("agnesi", Poly2::from_map([((2, 1), 1.0), ((0, 1), a), ((0, 0), -b)].into_iter().collect()))
            }
            CurveKind::Cissoid { a, x0 } => {
                if !finite(&[a, x0]) || a <= 0.0 || x0 <= 0.0 {
                    return bad("cissoid needs a > 0, x0 > 0");
                }
                // u³ + u y² − 2a y² with u = x − x0
                let terms = [
                    ((3, 0), 1.0),
                    ((2, 0), -3.0 * x0),
                    ((1, 0), 3.0 * x0 * x0),
                    ((0, 0), -x0 * x0 * x0),
                    ((1, 2), 1.0),
                    ((0, 2), -x0 - 2.0 * a),
                ];
                ("cissoid", Poly2::from_map(terms.into_iter().collect()))
            }
            CurveKind::PowerHyperbola { k, l, a } => {
                if !a.is_finite() || l % 2 == 0 || a == 0.0 {
                    return bad("power hyperbola needs l odd positive and a ≠ 0");
                }
                ("power-hyperbola", Poly2::from_map([((2 * k, l), 1.0), ((0, 0), -a)].into_iter().collect()))
            }
            CurveKind::UnitCircle => (
                "unit-circle",
                Poly2::from_map([((2, 0), 1.0), ((0, 2), 1.0), ((0, 0), -1.0)].into_iter().collect()),
            ),
            CurveKind::Parabola { c } => {
                if !c.is_finite() {
                    return bad("parabola offset must be finite");
                }
                ("parabola", Poly2::from_map([((0, 1), 1.0), ((2, 0), -1.0), ((0, 0), -c)].into_iter().collect()))
            }
            CurveKind::Implicit => return bad("implicit curves are built with Curve::implicit"),
        };
        Ok(Curve {
            name: name.to_string(),
            implicit: poly,
            kind,
        })
    }

    pub fn implicit(name: impl Into<String>, poly: Poly2) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::Domain("the zero polynomial does not define a curve".into()));
        }
        Ok(Curve {
            name: name.into(),
            implicit: poly,
            kind: CurveKind::Implicit,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polynomial(&self) -> &Poly2 {
        &self.implicit
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn has_parameterization(&self) -> bool {
        self.kind != CurveKind::Implicit
    }

    /// Parameter interval sampled by the injectivity test.
    pub fn parameter_interval(&self) -> Option<(f64, f64)> {
        match self.kind {
            CurveKind::Line { .. } | CurveKind::ShiftedNeil { .. } | CurveKind::Agnesi { .. } => Some((-10.0, 10.0)),
            CurveKind::Cissoid { .. } => Some((-1.4, 1.4)),
            CurveKind::PowerHyperbola { .. } => Some((-1.0, 1.0)),
            CurveKind::UnitCircle => Some((0.0, 2.0 * PI)),
            CurveKind::Parabola { .. } => Some((-8.0, 8.0)),
            CurveKind::Implicit => None,
        }
    }

    /// Point x(t) + i y(t) of the parameterization.
    pub fn point(&self, t: f64) -> Option<Complex64> {
        let p = match self.kind {
            CurveKind::Line { a, b, c } => {
                // Foot of the perpendicular from 0 plus t along the direction (−b, a).
                let n2 = a * a + b * b;
                let (fx, fy) = (a * c / n2, b * c / n2);
                let s = n2.sqrt();
                Complex64::new(fx - b / s * t, fy + a / s * t)
            }
            CurveKind::ShiftedNeil { k, l, a, y0 } => Complex64::new(t, y0 + real_root(a * t.powi(2 * k as i32), l)),
            CurveKind::Agnesi { a, b } => Complex64::new(t, b / (t * t + a)),
            CurveKind::Cissoid { a, x0 } => {
                let (s, c) = t.sin_cos();
                Complex64::new(x0 + 2.0 * a * s * s, 2.0 * a * s * s * s / c)
            }
            CurveKind::PowerHyperbola { k, l, a } => {
                let x = t.signum() * (0.1 + 9.9 * t.abs());
                let x = if t == 0.0 { 0.1 } else { x };
                Complex64::new(x, real_root(a / x.powi(2 * k as i32), l))
            }
            CurveKind::UnitCircle => Complex64::new(t.cos(), t.sin()),
            CurveKind::Parabola { c } => Complex64::new(t, t * t + c),
            CurveKind::Implicit => return None,
        };
        Some(p)
    }

    /// |p(x, y)| ≤ CURVE_TOLERANCE·(1 + Σ|c|).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.implicit.eval(x, y).abs() <= CURVE_TOLERANCE * (1.0 + self.implicit.coefficient_norm())
    }
}

/// Σ w |p(x, y)|² over the atoms z = x + iy.
pub fn localization_residual(mu: &DiscreteMeasure, curve: &Curve) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| a.weight * curve.polynomial().eval_z(a.location).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupportKind {
    /// {0} ∪ G_r, the r-th roots of unity with or without the origin.
    ZeroAndRoots { r: u32 },
    Circle,
    RealLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportClass {
    #[serde(flatten)]
    pub kind: SupportKind,
    pub zero_excluded: bool,
}

impl SupportClass {
    pub fn zero_and_roots(r: u32, zero_excluded: bool) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("r must be at least 1".into()));
        }
        Ok(SupportClass {
            kind: SupportKind::ZeroAndRoots { r },
            zero_excluded,
        })
    }

    pub fn circle() -> Self {
        SupportClass {
            kind: SupportKind::Circle,
            zero_excluded: true,
        }
    }

    pub fn real_line() -> Self {
        SupportClass {
            kind: SupportKind::RealLine,
            zero_excluded: false,
        }
    }

    /// Caveat attached to root-of-unity classes.
    pub fn note(&self) -> Option<String> {
        match self.kind {
            SupportKind::ZeroAndRoots { r } if r > 1 => Some(format!(
                "r = {r} is the smallest order consistent with the flatness; finite windows cannot rule out G_r' for multiples r' of {r}"
            )),
            _ => None,
        }
    }

    /// Whether z belongs to the class (|z| and angles checked to `tol`).
    pub fn admits(&self, z: Complex64, tol: f64) -> bool {
        match self.kind {
            SupportKind::RealLine => z.im.abs() <= tol * (1.0 + z.norm()),
            SupportKind::Circle => (z.norm() - 1.0).abs() <= tol,
            SupportKind::ZeroAndRoots { r } => {
                if z.norm() <= tol {
                    return !self.zero_excluded;
                }
                let w = crate::measures::ipow(z, r as i64);
                (w - Complex64::new(1.0, 0.0)).norm() <= tol * r as f64 && (z.norm() - 1.0).abs() <= tol
            }
        }
    }
}

/// Support class forced by (k, l)-flatness.
pub fn classify_flat_support(k: i64, l: i64) -> Result<SupportClass> {
    if k < 0 {
        return Err(Error::Domain(format!("k must be nonnegative, got {k}")));
    }
    if k == 0 && l == 0 {
        return SupportClass::zero_and_roots(1, true);
    }
    if k == l {
        return Ok(SupportClass::real_line());
    }
    if k == -l {
        return Ok(SupportClass::circle());
    }
    let r = (k + l).unsigned_abs();
    let r = u32::try_from(r).map_err(|_| Error::Range(format!("|k + l| = {r} is too large")))?;
    SupportClass::zero_and_roots(r, l <= 0)
}

/// Canonical flatness (k, l) of a support class.
pub fn flatness_for_support(class: SupportClass) -> (i64, i64) {
    match class.kind {
        SupportKind::ZeroAndRoots { r: 1 } => (1, 1),
        SupportKind::ZeroAndRoots { r } => (1, r as i64 - 1),
        SupportKind::Circle => (1, -1),
        SupportKind::RealLine => (1, 1),
    }
}

/// Im(z1 z̄2) = 0 up to COLLINEAR_TOLERANCE·|z1||z2|; equivalently ψ(z1) = ψ(z2).
pub fn collinear_through_origin(z1: Complex64, z2: Complex64) -> Result<bool> {
    if z1.norm() == 0.0 || z2.norm() == 0.0 {
        return Err(Error::Domain("collinearity through the origin needs nonzero points".into()));
    }
    Ok((z1 * z2.conj()).im.abs() <= COLLINEAR_TOLERANCE * z1.norm() * z2.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum InjectivityVerdict {
    /// No pair of samples shares a line through the origin. Not a proof.
    NoViolationFound { samples: usize },
    /// Two distinct samples on one line through the origin.
    Violated {
        first: [f64; 2],
        second: [f64; 2],
        sample_indices: [usize; 2],
    },
}

/// i-th point of the base-2 van der Corput sequence in [0, 1).
pub fn van_der_corput(mut i: usize) -> f64 {
    let mut v = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            v += scale;
        }
        i >>= 1;
        scale *= 0.5;
    }
    v
}

/// Samples t_i = lo + (hi − lo)·vdc(i), i < N, and reports the first pair
/// (by larger index, then smaller index) of distinct points collinear with 0.
pub fn psi_injectivity_sample_test(curve: &Curve, samples: usize) -> Result<InjectivityVerdict> {
    let (lo, hi) = curve
        .parameter_interval()
        .ok_or_else(|| Error::Precondition(format!("curve '{}' has no parameterization", curve.name())))?;
    let points: Vec<Complex64> = (0..samples)
        .map(|i| curve.point(lo + (hi - lo) * van_der_corput(i)).unwrap())
        .collect();
    if let Some(i) = points.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::Domain(format!("sample {i} of '{}' lies at the origin", curve.name())));
    }
    for j in 1..points.len() {
        for i in 0..j {
            let (a, b) = (points[i], points[j]);
            let distinct = (a - b).norm() > 1e-12 * (1.0 + a.norm().max(b.norm()));
            if distinct && collinear_through_origin(a, b)? {
                return Ok(InjectivityVerdict::Violated {
                    first: [a.re, a.im],
                    second: [b.re, b.im],
                    sample_indices: [i, j],
                });
            }
        }
    }
    Ok(InjectivityVerdict::NoViolationFound { samples })
}

/// The five injective families with one parameter choice each, then the
/// unit circle and the parabola y = x² + 1.
pub fn curve_catalog() -> Vec<Curve> {
    [
        CurveKind::Line { a: 0.0, b: 1.0, c: 1.0 },
        CurveKind::ShiftedNeil { k: 1, l: 3, a: 1.0, y0: 1.0 },
        CurveKind::Agnesi { a: 1.0, b: 1.0 },
        CurveKind::Cissoid { a: 1.0, x0: 1.0 },
        CurveKind::PowerHyperbola { k: 1, l: 1, a: 1.0 },
        CurveKind::UnitCircle,
        CurveKind::Parabola { c: 1.0 },
    ]
    .into_iter()
    .map(|k| Curve::from_kind(k).expect("catalog parameters are valid"))
    .collect()
}

/// Points of y(x² + a) = b at height y: {(x̂, y), (−x̂, y)} with x̂ = sqrt(b/y − a).
pub fn agnesi_fiber(a: f64, b: f64, y: f64) -> Result<Vec<(f64, f64)>> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("Witch of Agnesi needs a, b > 0".into()));
    }
    if !(y > 0.0 && y <= b / a) {
        return Err(Error::Domain(format!("height {y} is outside (0, {}]", b / a)));
    }
    let x2 = b / y - a;
    if x2 <= 0.0 {
        return Ok(vec![(0.0, y)]);
    }
    let x = x2.sqrt();
    Ok(vec![(x, y), (-x, y)])
}

/// Pushforward of a measure on ℝ² under (x, y) ↦ x (axis 1) or ↦ y (axis 2).
pub fn marginal_transport(rho: &DiscreteMeasure, axis: u8) -> Result<DiscreteMeasure> {
    if rho.domain() != Domain::RealPlane {
        return Err(Error::Domain(format!("marginals need a real-plane measure, got {}", rho.domain())));
    }
    match axis {
        1 => rho.pushforward(Domain::RealLine, |z| Complex64::new(z.re, 0.0)),
        2 => rho.pushforward(Domain::RealLine, |z| Complex64::new(z.im, 0.0)),
        _ => Err(Error::Domain(format!("axis must be 1 or 2, got {axis}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZariskiVerdict {
    DenseAtDegree {
        degree: u32,
        sigma_min: f64,
        sigma_max: f64,
    },
    /// A nonzero polynomial of degree ≤ d vanishing at every point.
    Annihilated {
        polynomial: Poly2,
        sigma_min: f64,
        sigma_max: f64,
    },
}

impl ZariskiVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, ZariskiVerdict::DenseAtDegree { .. })
    }
}

/// Monomials x^k y^l with k + l ≤ d, by total degree then decreasing k.
pub fn monomials_up_to(d: u32) -> Vec<(u32, u32)> {
    (0..=d).flat_map(|t| (0..=t).rev().map(move |k| (k, t - k))).collect()
}

/// Rank test of the monomial evaluation matrix at the points.
pub fn zariski_density_test(points: &[(f64, f64)], d: u32) -> Result<ZariskiVerdict> {
    let monos = monomials_up_to(d);
    if points.len() < monos.len() {
        return Err(Error::Range(format!(
            "degree {d} needs at least {} points, got {}",
            monos.len(),
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::Domain("points must be finite".into()));
    }
    let a = DMatrix::from_fn(points.len(), monos.len(), |i, j| {
        let (x, y) = points[i];
        x.powi(monos[j].0 as i32) * y.powi(monos[j].1 as i32)
    });
    let svd = a.svd(false, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let (imin, sigma_min) = sv
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 { (i, s) } else { acc });
    if sigma_min > ZARISKI_TOLERANCE * sigma_max {
        return Ok(ZariskiVerdict::DenseAtDegree { degree: d, sigma_min, sigma_max });
    }
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut kernel: Vec<f64> = vt.row(imin).iter().copied().collect();
    let big = kernel.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for c in kernel.iter_mut() {
        if c.abs() < 1e-10 * big {
            *c = 0.0;
        }
    }
    let lead = *kernel.iter().rev().find(|c| **c != 0.0).expect("kernel vector is nonzero");
    let polynomial = Poly2::from_map(monos.iter().zip(&kernel).map(|(&m, &c)| (m, c / lead.abs() * lead.signum())).collect());
    let polynomial = polynomial.scale(1.0 / polynomial.coeffs.values().fold(0.0f64, |m, c| m.max(c.abs())));
    Ok(ZariskiVerdict::Annihilated {
        polynomial,
        sigma_min,
        sigma_max,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    name: String,
    coeffs: Vec<(u32, u32, f64)>,
    #[serde(default = "implicit_params")]
    params: CurveKind,
}

fn implicit_params() -> CurveKind {
    CurveKind::Implicit
}

impl Serialize for Curve {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson {
            name: self.name.clone(),
            coeffs: self.implicit.coeffs.iter().map(|(&(i, j), &c)| (i, j, c)).collect(),
            params: self.kind,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Curve {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CurveJson::deserialize(deserializer)?;
        let poly = Poly2::new(raw.coeffs.iter().map(|&(i, j, c)| ((i, j), c))).map_err(D::Error::custom)?;
        if raw.params == CurveKind::Implicit {
            return Curve::implicit(raw.name, poly).map_err(D::Error::custom);
        }
        let curve = Curve::from_kind(raw.params).map_err(D::Error::custom)?.with_name(raw.name);
        let expected = curve.polynomial();
        let keys: std::collections::BTreeSet<_> = expected.coeffs.keys().chain(poly.coeffs.keys()).collect();
        let scale = 1.0 + expected.coefficient_norm();
        let mismatch = keys.into_iter().any(|k| {
            let a = expected.coeffs.get(k).copied().unwrap_or(0.0);
            let b = poly.coeffs.get(k).copied().unwrap_or(0.0);
            (a - b).abs() > 1e-12 * scale
        });
        if mismatch && !poly.is_zero() {
            return Err(D::Error::custom("coefficients do not match the parameter family"));
        }
        Ok(curve)
    }
}

impl Serialize for ZariskiVerdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        match self {
            ZariskiVerdict::DenseAtDegree { degree, sigma_min, sigma_max } => {
                map.serialize_entry("verdict", "dense-at-degree")?;
                map.serialize_entry("degree", degree)?;
                map.serialize_entry("sigma_min", sigma_min)?;
                map.serialize_entry("sigma_max", sigma_max)?;
            }
            ZariskiVerdict::Annihilated { polynomial, sigma_min, sigma_max } => {
                map.serialize_entry("verdict", "annihilating-polynomial")?;
                let coeffs: Vec<(u32, u32, f64)> = polynomial.coeffs.iter().map(|(&(i, j), &c)| (i, j, c)).collect();
                map.serialize_entry("coeffs", &coeffs)?;
                map.serialize_entry("sigma_min", sigma_min)?;
                map.serialize_entry("sigma_max", sigma_max)?;
            }
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{product_measure, shift_to_horizontal_line, transport_psi};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line_y1() -> Curve {
        Curve::from_kind(CurveKind::Line { a: 0.0, b: 1.0, c: 1.0 }).unwrap()
    }

    #[test]
    fn localization_examples() {
        let di = DiscreteMeasure::dirac(Domain::ComplexPlane, c(0.0, 1.0)).unwrap();
        assert_eq!(localization_residual(&di, &line_y1()), 0.0);
        let d1 = DiscreteMeasure::dirac(Domain::ComplexPlane, c(1.0, 0.0)).unwrap();
        assert_eq!(localization_residual(&d1, &line_y1()), 1.0);

        // z − z̄ − 2i
        let p = ZPoly::new([((1, 0), c(1.0, 0.0)), ((0, 1), c(-1.0, 0.0)), ((0, 0), c(0.0, -2.0))]).unwrap();
        let curve = Curve::implicit("R+i", p.to_real()).unwrap();
        assert_eq!(curve.polynomial(), &Poly2::new([((0, 1), 2.0), ((0, 0), -2.0)]).unwrap());
        let tau = DiscreteMeasure::real(&[(-1.5, 0.2), (0.0, 0.3), (4.0, 0.5)]).unwrap();
        let shifted = shift_to_horizontal_line(&tau, 1.0).unwrap();
        assert_eq!(localization_residual(&shifted, &curve), 0.0);
    }

    #[test]
    fn zpoly_with_both_parts_uses_sum_of_squares() {
        // z − 1 vanishes only at 1
        let p = ZPoly::new([((1, 0), c(1.0, 0.0)), ((0, 0), c(-1.0, 0.0))]).unwrap().to_real();
        assert_eq!(p.eval(1.0, 0.0), 0.0);
        assert!(p.eval(1.0, 0.5) > 0.0);
        assert!(p.eval(2.0, 0.0) > 0.0);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_flat_support(1, 1).unwrap(), SupportClass::real_line());
        assert_eq!(classify_flat_support(1, -1).unwrap(), SupportClass::circle());
        assert_eq!(classify_flat_support(2, 1).unwrap(), SupportClass::zero_and_roots(3, false).unwrap());
        assert_eq!(classify_flat_support(0, 0).unwrap(), SupportClass::zero_and_roots(1, true).unwrap());
        assert_eq!(classify_flat_support(3, -1).unwrap(), SupportClass::zero_and_roots(2, true).unwrap());
        assert!(matches!(classify_flat_support(-1, 2), Err(Error::Domain(_))));

        assert_eq!(flatness_for_support(SupportClass::circle()), (1, -1));
        assert_eq!(flatness_for_support(SupportClass::zero_and_roots(4, false).unwrap()), (1, 3));
        assert_eq!(flatness_for_support(SupportClass::real_line()), (1, 1));
        for r in 2..10 {
            let cls = classify_flat_support(1, r - 1).unwrap();
            assert_eq!(flatness_for_support(cls), (1, r - 1));
        }
    }

    #[test]
    fn collinearity_examples() {
        assert!(collinear_through_origin(c(1.0, 1.0), c(-2.0, -2.0)).unwrap());
        assert!(!collinear_through_origin(c(1.0, 0.0), c(0.0, 1.0)).unwrap());
        assert!(collinear_through_origin(c(2.0, 5.0), c(0.5, 1.25)).unwrap());
        assert!(matches!(collinear_through_origin(c(0.0, 0.0), c(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn collinearity_matches_psi_transport() {
        let pairs = [(c(1.0, 1.0), c(-2.0, -2.0)), (c(1.0, 0.0), c(0.0, 1.0)), (c(2.0, 5.0), c(0.5, 1.25))];
        for (a, b) in pairs {
            let mu = DiscreteMeasure::from_pairs(Domain::ComplexPlane, &[(a, 1.0), (b, 1.0)]).unwrap();
            let merged = transport_psi(&mu).unwrap().len() == 1;
            assert_eq!(merged, collinear_through_origin(a, b).unwrap());
        }
    }

    #[test]
    fn injectivity_examples() {
        let v = psi_injectivity_sample_test(&line_y1(), 200).unwrap();
        assert_eq!(v, InjectivityVerdict::NoViolationFound { samples: 200 });

        let circle = Curve::from_kind(CurveKind::UnitCircle).unwrap();
        match psi_injectivity_sample_test(&circle, 200).unwrap() {
            InjectivityVerdict::Violated { first, second, .. } => {
                assert_eq!(first, [1.0, 0.0]);
                assert!((second[0] + 1.0).abs() < 1e-15 && second[1].abs() < 1e-15);
            }
            other => panic!("expected a violation, got {other:?}"),
        }

        let parabola = Curve::from_kind(CurveKind::Parabola { c: 1.0 }).unwrap();
        match psi_injectivity_sample_test(&parabola, 200).unwrap() {
            InjectivityVerdict::Violated { first, second, .. } => {
                assert_eq!(first, [2.0, 5.0]);
                assert_eq!(second, [0.5, 1.25]);
            }
            other => panic!("expected a violation, got {other:?}"),
        }

        let implicit = Curve::implicit("x", Poly2::new([((1, 0), 1.0)]).unwrap()).unwrap();
        assert!(matches!(psi_injectivity_sample_test(&implicit, 10), Err(Error::Precondition(_))));
        let through_zero = Curve::from_kind(CurveKind::Parabola { c: 0.0 }).unwrap();
        assert!(matches!(psi_injectivity_sample_test(&through_zero, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn catalog_examples_and_parameterizations() {
        let agnesi = Curve::from_kind(CurveKind::Agnesi { a: 1.0, b: 1.0 }).unwrap();
        assert!(agnesi.contains(0.0, 1.0));
        let neil = Curve::from_kind(CurveKind::ShiftedNeil { k: 1, l: 3, a: 1.0, y0: 1.0 }).unwrap();
        assert!(neil.contains(1.0, 2.0));
        let cissoid = Curve::from_kind(CurveKind::Cissoid { a: 1.0, x0: 1.0 }).unwrap();
        assert!(cissoid.contains(1.0, 0.0));

        for curve in curve_catalog() {
            let (lo, hi) = curve.parameter_interval().unwrap();
            for i in 0..64 {
                let z = curve.point(lo + (hi - lo) * van_der_corput(i)).unwrap();
                let scale = 1.0 + curve.polynomial().coefficient_norm() * (1.0 + z.norm()).powi(curve.polynomial().degree() as i32);
                assert!(curve.polynomial().eval_z(z).abs() <= CURVE_TOLERANCE * scale, "{} at {z}", curve.name());
            }
        }
    }

    #[test]
    fn catalog_rejects_bad_parameters() {
        let bad = [
            CurveKind::Line { a: 0.0, b: 0.0, c: 1.0 },
            CurveKind::Line { a: 1.0, b: 0.0, c: 0.0 },
            CurveKind::ShiftedNeil { k: 1, l: 2, a: 1.0, y0: 1.0 },
            CurveKind::ShiftedNeil { k: 2, l: 3, a: 1.0, y0: 1.0 },
            CurveKind::Agnesi { a: -1.0, b: 1.0 },
            CurveKind::Cissoid { a: 1.0, x0: 0.0 },
            CurveKind::PowerHyperbola { k: 1, l: 2, a: 1.0 },
            CurveKind::PowerHyperbola { k: 1, l: 1, a: 0.0 },
        ];
        for kind in bad {
            assert!(matches!(Curve::from_kind(kind), Err(Error::Domain(_))), "{kind:?}");
        }
    }

    #[test]
    fn agnesi_fiber_examples() {
        assert_eq!(agnesi_fiber(1.0, 1.0, 0.5).unwrap(), vec![(1.0, 0.5), (-1.0, 0.5)]);
        assert_eq!(agnesi_fiber(1.0, 1.0, 1.0).unwrap(), vec![(0.0, 1.0)]);
        let f = agnesi_fiber(2.0, 4.0, 1.0).unwrap();
        assert!((f[0].0 - 2f64.sqrt()).abs() < 1e-15 && (f[1].0 + 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(agnesi_fiber(1.0, 1.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(agnesi_fiber(1.0, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn marginal_examples() {
        let rho = DiscreteMeasure::dirac(Domain::RealPlane, c(1.0, 2.0)).unwrap();
        let m = marginal_transport(&rho, 1).unwrap();
        assert!(m.approx_eq(&DiscreteMeasure::real(&[(1.0, 1.0)]).unwrap(), 0.0, 0.0));

        let rho = DiscreteMeasure::from_pairs(Domain::RealPlane, &[(c(0.0, 3.0), 0.5), (c(1.0, 3.0), 0.5)]).unwrap();
        let m = marginal_transport(&rho, 2).unwrap();
        assert!(m.approx_eq(&DiscreteMeasure::real(&[(3.0, 1.0)]).unwrap(), 0.0, 0.0));

        let mu = DiscreteMeasure::real(&[(1.0, 0.25), (2.0, 0.5)]).unwrap();
        let nu = DiscreteMeasure::real(&[(-1.0, 1.0), (5.0, 2.0)]).unwrap();
        let prod = product_measure(&mu, &nu).unwrap();
        let m1 = marginal_transport(&prod, 1).unwrap();
        assert!(m1.approx_eq(&mu.scaled(3.0).unwrap(), 1e-15, 1e-15));
        let m2 = marginal_transport(&prod, 2).unwrap();
        assert!(m2.approx_eq(&nu.scaled(0.75).unwrap(), 1e-15, 1e-15));
        assert!(matches!(marginal_transport(&prod, 3), Err(Error::Domain(_))));
        assert!(matches!(marginal_transport(&mu, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn zariski_examples() {
        let diag: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.3, i as f64 * 0.3)).collect();
        match zariski_density_test(&diag, 1).unwrap() {
            ZariskiVerdict::Annihilated { polynomial, .. } => {
                assert!((polynomial.coeffs()[&(0, 1)] - 1.0).abs() < 1e-10);
                assert!((polynomial.coeffs()[&(1, 0)] + 1.0).abs() < 1e-10);
                assert!(polynomial.coeffs().get(&(0, 0)).is_none_or(|c| c.abs() < 1e-10));
            }
            v => panic!("expected annihilating polynomial, got {v:?}"),
        }

        let grid: Vec<(f64, f64)> = (0..3).flat_map(|i| (0..3).map(move |j| (i as f64, j as f64))).collect();
        assert!(zariski_density_test(&grid, 1).unwrap().is_dense());

        let three = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        match zariski_density_test(&three, 1).unwrap() {
            ZariskiVerdict::Annihilated { polynomial, .. } => {
                for &(x, y) in &three {
                    assert!(polynomial.eval(x, y).abs() < 1e-10);
                }
            }
            v => panic!("expected annihilating polynomial, got {v:?}"),
        }
        assert!(matches!(zariski_density_test(&three[..2], 1), Err(Error::Range(_))));
    }

    #[test]
    fn curve_json_round_trip() {
        let curve = Curve::from_kind(CurveKind::Agnesi { a: 1.0, b: 2.0 }).unwrap();
        let s = serde_json::to_string(&curve).unwrap();
        let back: Curve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, curve);
        let implicit = r#"{"name":"y=1","coeffs":[[0,1,1.0],[0,0,-1.0]]}"#;
        let c: Curve = serde_json::from_str(implicit).unwrap();
        assert!(!c.has_parameterization());
        let wrong = r#"{"name":"w","coeffs":[[0,1,1.0]],"params":{"family":"agnesi","a":1,"b":1}}"#;
        assert!(serde_json::from_str::<Curve>(wrong).is_err());
    }
}
