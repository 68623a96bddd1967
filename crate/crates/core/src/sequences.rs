//! Truncated moment tables on the quadrant and the half-plane, Hamburger and
//! Herglotz embeddings, the complex ↔ real two-dimensional conversion, and
//! flatness detection along Diophantine lines km + ln = c.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, Domain, HerglotzTable};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance used by Hermitian-symmetry checks, relative to the largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Relative tolerance of `is_extension`.
pub const EXTENSION_TOLERANCE: f64 = 1e-10;
/// Relative tolerance when comparing entries along a Diophantine line.
pub const FLATNESS_TOLERANCE: f64 = 1e-10;

/// Truncated complex moment sequence γ_{m,n}.
///
/// Entries exist for 0 ≤ m, n ≤ degree with m + n ≤ max_total. Tables of
/// measures are square (max_total = 2·degree); tables obtained from real
/// two-dimensional data are triangular (max_total = degree).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    degree: usize,
    max_total: usize,
    entries: Vec<Complex64>,
}

impl MomentTable {
    pub fn new<F>(degree: usize, max_total: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let max_total = max_total.min(2 * degree);
        let side = degree + 1;
        let mut entries = vec![ZERO; side * side];
        for m in 0..side {
            for n in 0..side {
                if m + n <= max_total {
                    entries[m * side + n] = f(m, n);
                }
            }
        }
        MomentTable {
            degree,
            max_total,
            entries,
        }
    }

    /// All entries with 0 ≤ m, n ≤ degree.
    pub fn square<F: FnMut(usize, usize) -> Complex64>(degree: usize, f: F) -> Self {
        Self::new(degree, 2 * degree, f)
    }

    /// Entries with m + n ≤ degree.
    pub fn triangular<F: FnMut(usize, usize) -> Complex64>(degree: usize, f: F) -> Self {
        Self::new(degree, degree, f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn is_square(&self) -> bool {
        self.max_total == 2 * self.degree
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        m <= self.degree && n <= self.degree && m + n <= self.max_total
    }

    pub fn get(&self, m: usize, n: usize) -> Option<Complex64> {
        self.contains(m, n).then(|| self.entries[m * (self.degree + 1) + n])
    }

    pub fn set(&mut self, m: usize, n: usize, value: Complex64) -> Result<()> {
        if !self.contains(m, n) {
            return Err(Error::Range(format!("({m},{n}) is outside the table")));
        }
        self.entries[m * (self.degree + 1) + n] = value;
        Ok(())
    }

    /// Present indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.degree;
        (0..=d).flat_map(move |m| (0..=d).map(move |n| (m, n))).filter(|&(m, n)| self.contains(m, n))
    }

    pub fn max_abs(&self) -> f64 {
        self.indices().map(|(m, n)| self.get(m, n).unwrap().norm()).fold(0.0, f64::max)
    }

    /// First index pair breaking γ_{n,m} = conj(γ_{m,n}), or γ_{0,0} not real and nonnegative.
    pub fn hermitian_defect(&self, rel_tol: f64) -> Option<(usize, usize)> {
        let tol = rel_tol * (1.0 + self.max_abs());
        let g00 = self.get(0, 0).unwrap();
        if g00.im.abs() > tol || g00.re < -tol {
            return Some((0, 0));
        }
        self.indices().find(|&(m, n)| {
            let a = self.get(m, n).unwrap();
            let b = self.get(n, m).unwrap();
            (a - b.conj()).norm() > tol
        })
    }

    pub fn check_hermitian(&self) -> Result<()> {
        match self.hermitian_defect(HERMITIAN_TOLERANCE) {
            None => Ok(()),
            Some((m, n)) => Err(Error::Invariant(format!(
                "table is not Hermitian at ({m},{n}): γ_(n,m) must equal conj(γ_(m,n)) and γ_(0,0) must be nonnegative"
            ))),
        }
    }

    /// Largest entrywise difference over indices present in both tables.
    pub fn max_difference(&self, other: &MomentTable) -> f64 {
        self.indices()
            .filter_map(|(m, n)| other.get(m, n).map(|b| (self.get(m, n).unwrap() - b).norm()))
            .fold(0.0, f64::max)
    }
}

/// Truncated sequence Γ_{m,n} on the half-plane m + n ≥ 0, |m|, |n| ≤ window.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMomentTable {
    window: usize,
    entries: Vec<Complex64>,
}

impl ExtendedMomentTable {
    pub fn new<F>(window: usize, mut f: F) -> Self
    where
        F: FnMut(i64, i64) -> Complex64,
    {
        let w = window as i64;
        let side = 2 * window + 1;
        let mut entries = vec![ZERO; side * side];
        for m in -w..=w {
            for n in -w..=w {
                if m + n >= 0 {
                    entries[((m + w) as usize) * side + (n + w) as usize] = f(m, n);
                }
            }
        }
        ExtendedMomentTable { window, entries }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn contains(&self, m: i64, n: i64) -> bool {
        let w = self.window as i64;
        m + n >= 0 && m.abs() <= w && n.abs() <= w
    }

    pub fn get(&self, m: i64, n: i64) -> Option<Complex64> {
        if !self.contains(m, n) {
            return None;
        }
        let w = self.window as i64;
        let side = 2 * self.window + 1;
        Some(self.entries[((m + w) as usize) * side + (n + w) as usize])
    }

    pub fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let w = self.window as i64;
        (-w..=w).flat_map(move |m| (-w..=w).map(move |n| (m, n))).filter(|&(m, n)| m + n >= 0)
    }

    /// t·self + (1 − t)·other on the common window.
    pub fn convex_combination(&self, other: &ExtendedMomentTable, t: f64) -> Result<ExtendedMomentTable> {
        if self.window != other.window {
            return Err(Error::Range("convex combination needs equal windows".into()));
        }
        Ok(ExtendedMomentTable::new(self.window, |m, n| {
            self.get(m, n).unwrap() * t + other.get(m, n).unwrap() * (1.0 - t)
        }))
    }

    pub fn max_difference(&self, other: &ExtendedMomentTable) -> f64 {
        self.indices()
            .filter_map(|(m, n)| other.get(m, n).map(|b| (self.get(m, n).unwrap() - b).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.indices().map(|(m, n)| self.get(m, n).unwrap().norm()).fold(0.0, f64::max)
    }
}

/// Hamburger moments s_0..s_L, held in binary floating point of a chosen precision.
#[derive(Debug, Clone, PartialEq)]
pub struct HamburgerTable {
    values: Vec<Float>,
}

impl HamburgerTable {
    pub fn from_floats(values: Vec<Float>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("Hamburger moments must be finite".into()));
        }
        Ok(HamburgerTable { values })
    }

    pub fn from_f64(values: &[f64], prec: u32) -> Result<Self> {
        Self::from_floats(values.iter().map(|&v| Float::with_val(prec, v)).collect())
    }

    /// s_k = Σ w x^k for k < len, evaluated at `prec` bits from the f64 atoms.
    pub fn of_measure(tau: &DiscreteMeasure, len: usize, prec: u32) -> Result<Self> {
        if tau.domain() != Domain::RealLine {
            return Err(Error::Domain("Hamburger moments need a real-line measure".into()));
        }
        let mut values = vec![Float::with_val(prec, 0); len];
        for atom in tau.atoms() {
            let x = Float::with_val(prec, atom.location.re);
            let mut power = Float::with_val(prec, atom.weight);
            for v in values.iter_mut() {
                *v += &power;
                power *= &x;
            }
        }
        Self::from_floats(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Option<&Float> {
        self.values.get(k)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Float::to_f64).collect()
    }

    /// Smallest precision among the entries.
    pub fn precision(&self) -> u32 {
        self.values.iter().map(Float::prec).min().unwrap_or(53)
    }
}

/// Real two-dimensional moments a_{k,l} = ∫ x^k y^l dϱ.
///
/// Entries exist for 0 ≤ k, l ≤ degree with k + l ≤ max_total, as for
/// `MomentTable`: square tables come from measures and tensor products,
/// triangular ones from the complex conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMomentTable2D {
    degree: usize,
    max_total: usize,
    entries: Vec<f64>,
}

impl RealMomentTable2D {
    pub fn new<F: FnMut(usize, usize) -> f64>(degree: usize, max_total: usize, mut f: F) -> Self {
        let max_total = max_total.min(2 * degree);
        let side = degree + 1;
        let mut entries = vec![0.0; side * side];
        for k in 0..side {
            for l in 0..side {
                if k + l <= max_total {
                    entries[k * side + l] = f(k, l);
                }
            }
        }
        RealMomentTable2D {
            degree,
            max_total,
            entries,
        }
    }

    pub fn square<F: FnMut(usize, usize) -> f64>(degree: usize, f: F) -> Self {
        Self::new(degree, 2 * degree, f)
    }

    pub fn triangular<F: FnMut(usize, usize) -> f64>(degree: usize, f: F) -> Self {
        Self::new(degree, degree, f)
    }

    /// Square table of moments of a measure on ℝ².
    pub fn of_measure(rho: &DiscreteMeasure, degree: usize) -> Result<Self> {
        if rho.domain() != Domain::RealPlane {
            return Err(Error::Domain("two-dimensional moments need a real-plane measure".into()));
        }
        Ok(Self::square(degree, |k, l| {
            rho.atoms()
                .iter()
                .map(|a| a.weight * a.location.re.powi(k as i32) * a.location.im.powi(l as i32))
                .sum()
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn contains(&self, k: usize, l: usize) -> bool {
        k <= self.degree && l <= self.degree && k + l <= self.max_total
    }

    pub fn get(&self, k: usize, l: usize) -> Option<f64> {
        self.contains(k, l).then(|| self.entries[k * (self.degree + 1) + l])
    }

    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.degree;
        (0..=d).flat_map(move |k| (0..=d).map(move |l| (k, l))).filter(|&(k, l)| self.contains(k, l))
    }

    pub fn max_abs(&self) -> f64 {
        self.indices().map(|(k, l)| self.get(k, l).unwrap().abs()).fold(0.0, f64::max)
    }

    /// Largest difference over indices present in both tables.
    pub fn max_difference(&self, other: &RealMomentTable2D) -> f64 {
        self.indices()
            .filter_map(|(k, l)| other.get(k, l).map(|b| (self.get(k, l).unwrap() - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// γ_{m,n} = s_{m+n} on the square of the given degree.
pub fn from_hamburger(s: &HamburgerTable, degree: usize) -> Result<MomentTable> {
    if s.len() < 2 * degree + 1 {
        return Err(Error::Range(format!(
            "degree {degree} needs s_0..s_{}, only {} moments given",
            2 * degree,
            s.len()
        )));
    }
    let vals = s.to_f64();
    Ok(MomentTable::square(degree, |m, n| Complex64::new(vals[m + n], 0.0)))
}

/// γ_{m,n} = s_{m−n} on the square of the given degree.
pub fn from_herglotz(s: &HerglotzTable, degree: usize) -> Result<MomentTable> {
    if s.degree() < degree {
        return Err(Error::Range(format!(
            "degree {degree} needs trigonometric moments up to |n| = {degree}, table has {}",
            s.degree()
        )));
    }
    Ok(MomentTable::square(degree, |m, n| s.get(m as i64 - n as i64).unwrap()))
}

/// Gaussian integer a + bi used for exact expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct GaussInt {
    re: i128,
    im: i128,
}

impl GaussInt {
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn scale(self, k: i128) -> GaussInt {
        GaussInt {
            re: self.re * k,
            im: self.im * k,
        }
    }

    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

fn i_power(j: usize) -> GaussInt {
    match j % 4 {
        0 => GaussInt { re: 1, im: 0 },
        1 => GaussInt { re: 0, im: 1 },
        2 => GaussInt { re: -1, im: 0 },
        _ => GaussInt { re: 0, im: -1 },
    }
}

/// Coefficients α^{m,n}_{k,l} of (x+iy)^m (x−iy)^n, indexed by l (k = m+n−l).
pub fn alpha_coefficients(m: usize, n: usize) -> Vec<(usize, usize, Complex64)> {
    let t = m + n;
    let mut coeffs = vec![GaussInt::default(); t + 1];
    for j in 0..=m {
        // (iy)^j
        let left = i_power(j).scale(binomial(m, j));
        for jj in 0..=n {
            // (−iy)^jj = (−i)^jj y^jj and (−i)^jj = i^{3 jj}
            let right = i_power(3 * jj).scale(binomial(n, jj));
            coeffs[j + jj] = coeffs[j + jj].add(left.mul(right));
        }
    }
    coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != GaussInt::default())
        .map(|(l, c)| (t - l, l, c.to_complex()))
        .collect()
}

/// Coefficients of x^k y^l = Σ β z^m z̄^n, as (m, n, β).
fn beta_coefficients(k: usize, l: usize) -> Vec<(usize, usize, Complex64)> {
    // x^k y^l = 2^{-(k+l)} i^{-l} (z + z̄)^k (z − z̄)^l
    let t = k + l;
    let mut ints = vec![0i128; t + 1];
    for j in 0..=k {
        let left = binomial(k, j);
        for jj in 0..=l {
            // z^jj (−z̄)^{l−jj}
            let sign = if (l - jj).is_multiple_of(2) { 1 } else { -1 };
            ints[j + jj] += left * binomial(l, jj) * sign;
        }
    }
    let unit = i_power(3 * l).to_complex();
    let scale = 0.5f64.powi(t as i32);
    ints.into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(m, c)| (m, t - m, unit * (c as f64 * scale)))
        .collect()
}

/// Converts complex moments to real two-dimensional moments of total degree ≤ min(D, total).
pub fn complex_to_real2d(gamma: &MomentTable) -> Result<RealMomentTable2D> {
    gamma.check_hermitian()?;
    let degree = gamma.degree().min(gamma.max_total());
    let table = RealMomentTable2D::triangular(degree, |k, l| {
        beta_coefficients(k, l)
            .into_iter()
            .map(|(m, n, b)| b * gamma.get(m, n).expect("m + n ≤ degree lies in the table"))
            .sum::<Complex64>()
            .re
    });
    Ok(table)
}

/// Converts real two-dimensional moments to the complex table of entries with m + n ≤ min(D, total).
pub fn real2d_to_complex(a: &RealMomentTable2D) -> MomentTable {
    MomentTable::triangular(a.degree().min(a.max_total()), |m, n| {
        alpha_coefficients(m, n)
            .into_iter()
            .map(|(k, l, c)| c * a.get(k, l).expect("k + l = m + n lies in the table"))
            .sum()
    })
}

/// Outcome of a flatness test on the finite window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FlatnessStatus {
    /// Constant along every Diophantine line that meets the window. Says nothing beyond it.
    ConfirmedOnWindow,
    /// Two entries on the same line differ.
    Violated {
        witness: [[usize; 2]; 2],
        difference: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessCertificate {
    pub k: i64,
    pub l: i64,
    pub window: usize,
    #[serde(flatten)]
    pub status: FlatnessStatus,
}

impl FlatnessCertificate {
    pub fn confirmed(&self) -> bool {
        self.status == FlatnessStatus::ConfirmedOnWindow
    }
}

/// Tests (k,l)-flatness of γ on its window.
pub fn flatness(gamma: &MomentTable, k: i64, l: i64) -> Result<FlatnessCertificate> {
    if k < 0 {
        return Err(Error::Domain(format!("flatness needs k ≥ 0, got {k}")));
    }
    let tol = FLATNESS_TOLERANCE * (1.0 + gamma.max_abs());
    let mut first_on_line: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut worst: Option<([[usize; 2]; 2], f64)> = None;
    for (m, n) in gamma.indices() {
        let key = k * m as i64 + l * n as i64;
        let here = gamma.get(m, n).unwrap();
        match first_on_line.get(&key) {
            None => {
                first_on_line.insert(key, (m, n));
            }
            Some(&(m0, n0)) => {
                let diff = (gamma.get(m0, n0).unwrap() - here).norm();
                if diff > tol && worst.as_ref().is_none_or(|w| diff > w.1) {
                    worst = Some(([[m0, n0], [m, n]], diff));
                }
            }
        }
    }
    let status = match worst {
        None => FlatnessStatus::ConfirmedOnWindow,
        Some((witness, difference)) => FlatnessStatus::Violated { witness, difference },
    };
    Ok(FlatnessCertificate {
        k,
        l,
        window: gamma.degree(),
        status,
    })
}

/// Flatness certificates for every 0 ≤ k ≤ bound, −bound ≤ l ≤ bound.
pub fn detect_flatness(gamma: &MomentTable, bound: usize) -> Vec<FlatnessCertificate> {
    let b = bound as i64;
    (0..=b)
        .flat_map(|k| (-b..=b).map(move |l| (k, l)))
        .map(|(k, l)| flatness(gamma, k, l).expect("k is nonnegative"))
        .collect()
}

/// Quadrant part of an extended table, as a square table of degree `window`.
pub fn restrict(big: &ExtendedMomentTable) -> MomentTable {
    MomentTable::square(big.window(), |m, n| big.get(m as i64, n as i64).unwrap())
}

/// Result of comparing an extended table against a quadrant table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub is_extension: bool,
    pub witness: Option<[usize; 2]>,
    pub max_deviation: f64,
}

/// Whether Γ agrees with γ on every quadrant entry of γ.
pub fn is_extension(big: &ExtendedMomentTable, gamma: &MomentTable) -> Result<ExtensionCheck> {
    if big.window() < gamma.degree() {
        return Err(Error::Range(format!(
            "window {} is smaller than table degree {}",
            big.window(),
            gamma.degree()
        )));
    }
    let tol = EXTENSION_TOLERANCE * (1.0 + gamma.max_abs());
    let mut witness = None;
    let mut max_deviation: f64 = 0.0;
    for (m, n) in gamma.indices() {
        let dev = (big.get(m as i64, n as i64).unwrap() - gamma.get(m, n).unwrap()).norm();
        if dev > tol && witness.is_none() {
            witness = Some([m, n]);
        }
        max_deviation = max_deviation.max(dev);
    }
    Ok(ExtensionCheck {
        is_extension: witness.is_none(),
        witness,
        max_deviation,
    })
}

// JSON formats: {"degree": D, "entries": [[m, n, re, im], ...]} and
// {"window": W, "entries": [[m, n, re, im], ...]}.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentTableJson {
    degree: usize,
    entries: Vec<(i64, i64, f64, f64)>,
}

impl Serialize for MomentTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MomentTableJson {
            degree: self.degree,
            entries: self
                .indices()
                .map(|(m, n)| {
                    let v = self.get(m, n).unwrap();
                    (m as i64, n as i64, v.re, v.im)
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MomentTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MomentTableJson::deserialize(deserializer)?;
        let d = raw.degree;
        let mut seen: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (m, n, re, im) in raw.entries {
            if m < 0 || n < 0 || m as usize > d || n as usize > d {
                return Err(D::Error::custom(format!("entry ({m},{n}) outside degree {d}")));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(D::Error::custom(format!("entry ({m},{n}) is not finite")));
            }
            if seen.insert((m as usize, n as usize), Complex64::new(re, im)).is_some() {
                return Err(D::Error::custom(format!("duplicate entry ({m},{n})")));
            }
        }
        let max_total = seen.keys().map(|&(m, n)| m + n).max().unwrap_or(0);
        let table = MomentTable::new(d, max_total, |m, n| seen.get(&(m, n)).copied().unwrap_or(ZERO));
        let missing = table.indices().find(|k| !seen.contains_key(k));
        if let Some((m, n)) = missing {
            return Err(D::Error::custom(format!("entry ({m},{n}) is missing")));
        }
        if !seen.contains_key(&(0, 0)) {
            return Err(D::Error::custom("entry (0,0) is missing"));
        }
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtendedTableJson {
    window: usize,
    entries: Vec<(i64, i64, f64, f64)>,
}

impl Serialize for ExtendedMomentTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ExtendedTableJson {
            window: self.window,
            entries: self
                .indices()
                .map(|(m, n)| {
                    let v = self.get(m, n).unwrap();
                    (m, n, v.re, v.im)
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtendedMomentTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ExtendedTableJson::deserialize(deserializer)?;
        let w = raw.window as i64;
        let mut seen: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
        for (m, n, re, im) in raw.entries {
            if m + n < 0 || m.abs() > w || n.abs() > w {
                return Err(D::Error::custom(format!("entry ({m},{n}) outside window {w}")));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(D::Error::custom(format!("entry ({m},{n}) is not finite")));
            }
            if seen.insert((m, n), Complex64::new(re, im)).is_some() {
                return Err(D::Error::custom(format!("duplicate entry ({m},{n})")));
            }
        }
        let table = ExtendedMomentTable::new(raw.window, |m, n| seen.get(&(m, n)).copied().unwrap_or(ZERO));
        if let Some((m, n)) = table.indices().find(|k| !seen.contains_key(k)) {
            return Err(D::Error::custom(format!("entry ({m},{n}) is missing")));
        }
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealTableJson {
    degree: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Serialize for RealMomentTable2D {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RealTableJson {
            degree: self.degree,
            entries: self.indices().map(|(k, l)| (k, l, self.get(k, l).unwrap())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RealMomentTable2D {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RealTableJson::deserialize(deserializer)?;
        let d = raw.degree;
        let mut seen = BTreeMap::new();
        for (k, l, v) in raw.entries {
            if k > d || l > d || !v.is_finite() {
                return Err(D::Error::custom(format!("entry ({k},{l}) invalid for degree {d}")));
            }
            if seen.insert((k, l), v).is_some() {
                return Err(D::Error::custom(format!("duplicate entry ({k},{l})")));
            }
        }
        let max_total = seen.keys().map(|&(k, l)| k + l).max().unwrap_or(0);
        let table = RealMomentTable2D::new(d, max_total, |k, l| seen.get(&(k, l)).copied().unwrap_or(0.0));
        if let Some((k, l)) = table.indices().find(|key| !seen.contains_key(key)) {
            return Err(D::Error::custom(format!("entry ({k},{l}) is missing")));
        }
        Ok(table)
    }
}

/// Moments as JSON numbers or decimal strings (strings keep full precision).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamburgerJson {
    pub moments: Vec<MomentValue>,
}

impl HamburgerJson {
    pub fn into_table(self, prec: u32) -> Result<HamburgerTable> {
        let values = self
            .moments
            .into_iter()
            .map(|v| match v {
                MomentValue::Number(x) => Ok(Float::with_val(prec, x)),
                MomentValue::Text(s) => Float::parse(&s)
                    .map(|p| Float::with_val(prec, p))
                    .map_err(|e| Error::Domain(format!("bad moment '{s}': {e}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        HamburgerTable::from_floats(values)
    }

    pub fn from_table(table: &HamburgerTable) -> Self {
        HamburgerJson {
            moments: table
                .values()
                .iter()
                .map(|v| {
                    let digits = (v.prec() as f64 / std::f64::consts::LOG2_10).floor() as usize;
                    MomentValue::Text(v.to_string_radix(10, Some(digits)))
                })
                .collect(),
        }
    }
}
