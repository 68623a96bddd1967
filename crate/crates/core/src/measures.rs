//! Discrete and one-dimensional density measures, their moments, and the
//! transports z ↦ z² on the circle and z ↦ z/z̄ on the punctured plane.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureResult, QuadratureSpec};
use crate::recovery::StieltjesFamily;
use crate::sequences::MomentTable;

/// A point of the complex plane; points of ℝ² are stored as x + iy.
pub type ComplexValue = Complex64;

/// Relative scale for merging coincident atoms.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of |z| from 1 for atoms on the unit circle.
pub const CIRCLE_TOLERANCE: f64 = 1e-10;

/// z^k for any integer k; z must be nonzero when k < 0.
pub fn ipow(z: Complex64, k: i64) -> Complex64 {
    let mut base = if k < 0 { z.inv() } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// z^m z̄^n.
pub fn monomial(z: Complex64, m: i64, n: i64) -> Complex64 {
    ipow(z, m) * ipow(z.conj(), n)
}

/// Where the atoms of a measure are allowed to sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    ComplexPlane,
    PuncturedPlane,
    UnitCircle,
    RealLine,
    RealPlane,
}

impl Domain {
    fn admits(self, z: Complex64) -> bool {
        match self {
            Domain::ComplexPlane | Domain::RealPlane => true,
            Domain::PuncturedPlane => z != Complex64::new(0.0, 0.0),
            Domain::UnitCircle => (z.norm() - 1.0).abs() <= CIRCLE_TOLERANCE,
            Domain::RealLine => z.im.abs() <= MERGE_TOLERANCE * (1.0 + z.re.abs()),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Domain::ComplexPlane => "complex-plane",
            Domain::PuncturedPlane => "punctured-plane",
            Domain::UnitCircle => "unit-circle",
            Domain::RealLine => "real-line",
            Domain::RealPlane => "real-plane",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: Complex64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: Complex64, weight: f64) -> Self {
        Atom { location, weight }
    }
}

/// A finite nonnegative combination of point masses.
///
/// Construction validates every atom against the domain, drops zero
/// weights, and merges atoms whose locations agree up to
/// `MERGE_TOLERANCE * (1 + max |z|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    domain: Domain,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn new(domain: Domain, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let raw: Vec<Atom> = atoms.into_iter().collect();
        for a in &raw {
            if !(a.location.re.is_finite() && a.location.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite atom location {}", a.location)));
            }
            if !a.weight.is_finite() || a.weight < 0.0 {
                return Err(Error::Domain(format!("atom weight {} is not a finite nonnegative number", a.weight)));
            }
            if !domain.admits(a.location) {
                return Err(Error::Domain(format!("atom at {} does not lie in the {domain}", a.location)));
            }
        }
        let scale = raw.iter().map(|a| a.location.norm()).fold(0.0, f64::max);
        let tol = MERGE_TOLERANCE * (1.0 + scale);
        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for mut a in raw.into_iter().filter(|a| a.weight > 0.0) {
            if domain == Domain::RealLine {
                a.location.im = 0.0;
            }
            match merged.iter_mut().find(|b| (b.location - a.location).norm() <= tol) {
                Some(b) => b.weight += a.weight,
                None => merged.push(a),
            }
        }
        Ok(DiscreteMeasure { domain, atoms: merged })
    }

    pub fn empty(domain: Domain) -> Self {
        DiscreteMeasure { domain, atoms: Vec::new() }
    }

    /// Unit point mass.
    pub fn dirac(domain: Domain, location: Complex64) -> Result<Self> {
        Self::new(domain, [Atom::new(location, 1.0)])
    }

    /// Atoms given as (location, weight) pairs.
    pub fn from_pairs(domain: Domain, pairs: &[(Complex64, f64)]) -> Result<Self> {
        Self::new(domain, pairs.iter().map(|&(z, w)| Atom::new(z, w)))
    }

    /// Real-line measure from (x, weight) pairs.
    pub fn real(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            Domain::RealLine,
            pairs.iter().map(|&(x, w)| Atom::new(Complex64::new(x, 0.0), w)),
        )
    }

    /// Uniform probability measure on the r-th roots of unity.
    pub fn roots_of_unity(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("need at least one root of unity".into()));
        }
        let w = 1.0 / r as f64;
        Self::new(
            Domain::UnitCircle,
            (0..r).map(|j| Atom::new(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / r as f64), w)),
        )
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn support(&self) -> Vec<Complex64> {
        self.atoms.iter().map(|a| a.location).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    fn merge_tol(&self) -> f64 {
        let scale = self.atoms.iter().map(|a| a.location.norm()).fold(0.0, f64::max);
        MERGE_TOLERANCE * (1.0 + scale)
    }

    /// Mass carried by the atom at `z` (within merge tolerance).
    pub fn mass_at(&self, z: Complex64) -> f64 {
        let tol = self.merge_tol().max(MERGE_TOLERANCE * (1.0 + z.norm()));
        self.atoms
            .iter()
            .filter(|a| (a.location - z).norm() <= tol)
            .map(|a| a.weight)
            .sum()
    }

    /// Same atoms, new domain tag (validated).
    pub fn retag(&self, domain: Domain) -> Result<Self> {
        Self::new(domain, self.atoms.iter().copied())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.domain,
            self.atoms.iter().map(|a| Atom::new(a.location, a.weight * factor)),
        )
    }

    /// Sum of two measures; the result carries `self`'s domain tag.
    pub fn plus(&self, other: &DiscreteMeasure) -> Result<Self> {
        Self::new(self.domain, self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    /// Pushforward under an arbitrary point map.
    pub fn pushforward<F>(&self, domain: Domain, map: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self::new(
            domain,
            self.atoms.iter().map(|a| Atom::new(map(a.location), a.weight)),
        )
    }

    /// Splits off the atom at the origin: returns (μ({0}), μ restricted to ℂ*).
    pub fn split_origin(&self) -> (f64, DiscreteMeasure) {
        let tol = self.merge_tol();
        let (origin, rest): (Vec<Atom>, Vec<Atom>) =
            self.atoms.iter().partition(|a| a.location.norm() <= tol);
        let mass = origin.iter().map(|a| a.weight).sum();
        (
            mass,
            DiscreteMeasure {
                domain: self.domain,
                atoms: rest,
            },
        )
    }

    /// True when both measures have the same atoms up to the given tolerances.
    pub fn approx_eq(&self, other: &DiscreteMeasure, loc_tol: f64, weight_tol: f64) -> bool {
        if self.atoms.len() != other.atoms.len() {
            return false;
        }
        self.atoms.iter().all(|a| {
            other.atoms.iter().any(|b| {
                (a.location - b.location).norm() <= loc_tol * (1.0 + a.location.norm())
                    && (a.weight - b.weight).abs() <= weight_tol * (1.0 + a.weight.abs())
            })
        })
    }

    /// Real moments Σ w x^k, k = 0..len, in f64.
    pub fn real_moments(&self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|k| self.atoms.iter().map(|a| a.weight * a.location.re.powi(k as i32)).sum())
            .collect()
    }
}

/// γ_{m,n} = Σ w z^m z̄^n for 0 ≤ m, n ≤ degree.
pub fn discrete_moments(mu: &DiscreteMeasure, degree: usize) -> Result<MomentTable> {
    match mu.domain() {
        Domain::ComplexPlane | Domain::PuncturedPlane | Domain::RealLine | Domain::UnitCircle => {}
        Domain::RealPlane => {
            return Err(Error::Domain(
                "complex moments need a measure tagged on ℂ, ℂ*, ℝ or 𝕋; retag real-plane measures first".into(),
            ))
        }
    }
    Ok(MomentTable::square(degree, |m, n| {
        mu.atoms()
            .iter()
            .map(|a| a.weight * monomial(a.location, m as i64, n as i64))
            .sum()
    }))
}

/// Pushforward of a circle measure under z ↦ z².
pub fn transport_phi(nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if nu.domain() != Domain::UnitCircle {
        return Err(Error::Domain(format!("z ↦ z² transports circle measures, got {}", nu.domain())));
    }
    nu.pushforward(Domain::UnitCircle, |z| z * z)
}

/// z/z̄ evaluated as (z/|z|)², which lands on the circle to rounding.
pub fn psi(z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::Domain("z/z̄ is undefined at 0".into()));
    }
    let u = z / r;
    Ok(u * u)
}

/// Pushforward of a measure on ℂ* under z ↦ z/z̄.
pub fn transport_psi(mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    match mu.domain() {
        Domain::ComplexPlane | Domain::PuncturedPlane | Domain::RealLine => {}
        other => return Err(Error::Domain(format!("z ↦ z/z̄ needs a planar measure, got {other}"))),
    }
    let images = mu
        .atoms()
        .iter()
        .map(|a| psi(a.location).map(|w| Atom::new(w, a.weight)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(Domain::UnitCircle, images)
}

/// Trigonometric moments s_n = ∫ z^n dν, |n| ≤ D.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzTable {
    degree: usize,
    /// Index n + degree holds s_n.
    entries: Vec<Complex64>,
}

impl HerglotzTable {
    /// Full table s_{-D}..s_D; Hermitian symmetry is checked.
    pub fn new(degree: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != 2 * degree + 1 {
            return Err(Error::Range(format!(
                "expected {} entries for degree {degree}, got {}",
                2 * degree + 1,
                entries.len()
            )));
        }
        let scale = entries.iter().map(|s| s.norm()).fold(0.0, f64::max);
        for n in 0..=degree {
            let a = entries[degree + n];
            let b = entries[degree - n];
            if (a - b.conj()).norm() > 1e-12 * (1.0 + scale) {
                return Err(Error::Invariant(format!("s_{n} is not the conjugate of s_-{n}")));
            }
        }
        Ok(HerglotzTable { degree, entries })
    }

    /// Table from s_0..s_D, filling negative indices by conjugation.
    pub fn from_nonnegative(values: &[Complex64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Range("need at least s_0".into()));
        }
        let degree = values.len() - 1;
        let mut entries = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (n, &s) in values.iter().enumerate() {
            entries[degree + n] = s;
            entries[degree - n] = s.conj();
        }
        entries[degree].im = 0.0;
        Ok(HerglotzTable { degree, entries })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n.unsigned_abs() as usize > self.degree {
            return None;
        }
        Some(self.entries[(n + self.degree as i64) as usize])
    }
}

/// Trigonometric moments of a circle measure.
pub fn trig_moments(nu: &DiscreteMeasure, degree: usize) -> Result<HerglotzTable> {
    if nu.domain() != Domain::UnitCircle {
        return Err(Error::Domain(format!("trigonometric moments need a circle measure, got {}", nu.domain())));
    }
    let values: Vec<Complex64> = (0..=degree)
        .map(|n| nu.atoms().iter().map(|a| a.weight * ipow(a.location, n as i64)).sum())
        .collect();
    HerglotzTable::from_nonnegative(&values)
}

/// μ ⊗ ν for two measures on ℝ; atom (x, y) is stored as x + iy.
pub fn product_measure(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if mu.domain() != Domain::RealLine || nu.domain() != Domain::RealLine {
        return Err(Error::Domain("product measure needs two real-line measures".into()));
    }
    let atoms = mu.atoms().iter().flat_map(|a| {
        nu.atoms()
            .iter()
            .map(move |b| Atom::new(Complex64::new(a.location.re, b.location.re), a.weight * b.weight))
    });
    DiscreteMeasure::new(Domain::RealPlane, atoms)
}

/// Moves a real measure onto the horizontal line ℝ + ih.
pub fn shift_to_horizontal_line(tau: &DiscreteMeasure, h: f64) -> Result<DiscreteMeasure> {
    if tau.domain() != Domain::RealLine {
        return Err(Error::Domain("only real-line measures can be shifted".into()));
    }
    if !h.is_finite() {
        return Err(Error::Domain("shift must be finite".into()));
    }
    tau.pushforward(Domain::ComplexPlane, |z| Complex64::new(z.re, h))
}

/// Where a density lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Support1D {
    Interval { a: f64, b: f64 },
    /// (a, ∞)
    HalfLine { a: f64 },
}

/// Named density presets accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensityPreset {
    /// Normalized Lebesgue measure on [a, b].
    Uniform { a: f64, b: f64 },
    /// π^{-1/2} e^{-(ln x)²} (1 + λ sin(2π ln x)) on (0, ∞).
    Stieltjes { lambda: f64 },
}

type DensityFn = dyn Fn(&Float) -> Float + Send + Sync;

/// A measure on ℝ given by a density and integrated by adaptive quadrature.
#[derive(Clone)]
pub struct DensityMeasure1D {
    density: Arc<DensityFn>,
    support: Support1D,
    spec: QuadratureSpec,
}

impl fmt::Debug for DensityMeasure1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMeasure1D")
            .field("support", &self.support)
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

impl DensityMeasure1D {
    pub fn new<F>(density: F, support: Support1D, spec: QuadratureSpec) -> Result<Self>
    where
        F: Fn(&Float) -> Float + Send + Sync + 'static,
    {
        match support {
            Support1D::Interval { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                return Err(Error::Domain(format!("invalid interval [{a}, {b}]")))
            }
            Support1D::HalfLine { a } if !a.is_finite() => {
                return Err(Error::Domain("half-line start must be finite".into()))
            }
            _ => {}
        }
        spec.validate()?;
        Ok(DensityMeasure1D {
            density: Arc::new(density),
            support,
            spec,
        })
    }

    pub fn from_preset(preset: DensityPreset, spec: QuadratureSpec) -> Result<Self> {
        match preset {
            DensityPreset::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
                }
                let prec = spec.precision_bits();
                let height = Float::with_val(prec, b - a).recip();
                Self::new(move |_x: &Float| height.clone(), Support1D::Interval { a, b }, spec)
            }
            DensityPreset::Stieltjes { lambda } => {
                let family = StieltjesFamily::new(lambda)?;
                Self::new(move |x: &Float| family.density(x), Support1D::HalfLine { a: 0.0 }, spec)
            }
        }
    }

    pub fn support(&self) -> Support1D {
        self.support
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn density_at(&self, x: &Float) -> Float {
        (self.density)(x)
    }
}

/// s_n = ∫ x^n dτ by adaptive quadrature at the measure's precision.
///
/// The density is checked for negativity at every node the quadrature visits.
pub fn density_moment(tau: &DensityMeasure1D, n: u32) -> Result<QuadratureResult> {
    let prec = tau.spec.precision_bits();
    let negative = Cell::new(None::<f64>);
    let integrand = |x: &Float| {
        let d = tau.density_at(x);
        if d.is_sign_negative() && !d.is_zero() && negative.get().is_none() {
            negative.set(Some(x.to_f64()));
        }
        let xn = quadrature::powu(&Float::with_val(prec, x), n);
        xn * d
    };
    let result = match tau.support {
        Support1D::Interval { a, b } => quadrature::integrate(
            integrand,
            &Float::with_val(prec, a),
            &Float::with_val(prec, b),
            &tau.spec,
        ),
        Support1D::HalfLine { a } => quadrature::integrate_half_line(integrand, &Float::with_val(prec, a), &tau.spec),
    };
    if let Some(x) = negative.get() {
        return Err(Error::Domain(format!("density is negative at x = {x}")));
    }
    result
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomJson {
    re: f64,
    #[serde(default)]
    im: f64,
    w: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureJson {
    domain: Domain,
    atoms: Vec<AtomJson>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson {
            domain: self.domain,
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson {
                    re: a.location.re,
                    im: a.location.im,
                    w: a.weight,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(deserializer)?;
        DiscreteMeasure::new(
            raw.domain,
            raw.atoms.into_iter().map(|a| Atom::new(Complex64::new(a.re, a.im), a.w)),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn moments_of_dirac_at_zero_and_one() {
        let d0 = DiscreteMeasure::dirac(Domain::ComplexPlane, c(0.0, 0.0)).unwrap();
        let g = discrete_moments(&d0, 2).unwrap();
        for m in 0..=2 {
            for n in 0..=2 {
                let expect = if m == 0 && n == 0 { 1.0 } else { 0.0 };
                assert_eq!(g.get(m, n).unwrap(), c(expect, 0.0));
            }
        }
        let d1 = DiscreteMeasure::dirac(Domain::ComplexPlane, c(1.0, 0.0)).unwrap();
        let g = discrete_moments(&d1, 2).unwrap();
        assert!(g.indices().all(|(m, n)| g.get(m, n).unwrap() == c(1.0, 0.0)));
    }

    #[test]
    fn moments_of_symmetric_pair_on_imaginary_axis() {
        let mu = DiscreteMeasure::from_pairs(Domain::ComplexPlane, &[(c(0.0, 1.0), 0.5), (c(0.0, -1.0), 0.5)]).unwrap();
        let g = discrete_moments(&mu, 2).unwrap();
        assert!(close(g.get(1, 0).unwrap(), c(0.0, 0.0)));
        assert!(close(g.get(1, 1).unwrap(), c(1.0, 0.0)));
        assert!(close(g.get(2, 0).unwrap(), c(-1.0, 0.0)));
    }

    #[test]
    fn real_plane_measures_need_retagging() {
        let mu = DiscreteMeasure::dirac(Domain::RealPlane, c(1.0, 2.0)).unwrap();
        assert!(matches!(discrete_moments(&mu, 1), Err(Error::Domain(_))));
        assert!(discrete_moments(&mu.retag(Domain::ComplexPlane).unwrap(), 1).is_ok());
    }

    #[test]
    fn merging_collects_coincident_atoms() {
        let mu = DiscreteMeasure::from_pairs(
            Domain::ComplexPlane,
            &[(c(1.0, 0.0), 0.25), (c(2.0, 0.0), 0.5), (c(1.0 + 1e-14, 0.0), 0.25), (c(3.0, 0.0), 0.0)],
        )
        .unwrap();
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.mass_at(c(1.0, 0.0)), 0.5);
    }

    #[test]
    fn domain_validation() {
        assert!(DiscreteMeasure::dirac(Domain::UnitCircle, c(1.1, 0.0)).is_err());
        assert!(DiscreteMeasure::dirac(Domain::PuncturedPlane, c(0.0, 0.0)).is_err());
        assert!(DiscreteMeasure::dirac(Domain::RealLine, c(0.0, 1.0)).is_err());
        assert!(DiscreteMeasure::new(Domain::ComplexPlane, [Atom::new(c(0.0, 0.0), -1.0)]).is_err());
        assert!(DiscreteMeasure::new(Domain::ComplexPlane, [Atom::new(c(f64::NAN, 0.0), 1.0)]).is_err());
    }

    #[test]
    fn phi_examples() {
        let m = DiscreteMeasure::dirac(Domain::UnitCircle, c(-1.0, 0.0)).unwrap();
        let t = transport_phi(&m).unwrap();
        assert_eq!(t.len(), 1);
        assert!(close(t.atoms()[0].location, c(1.0, 0.0)));

        let m = DiscreteMeasure::from_pairs(Domain::UnitCircle, &[(c(1.0, 0.0), 0.5), (c(-1.0, 0.0), 0.5)]).unwrap();
        let t = transport_phi(&m).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.mass_at(c(1.0, 0.0)), 1.0);

        let m = DiscreteMeasure::dirac(Domain::UnitCircle, c(0.0, 1.0)).unwrap();
        let t = transport_phi(&m).unwrap();
        assert!(close(t.atoms()[0].location, c(-1.0, 0.0)));
    }

    #[test]
    fn psi_examples() {
        for r in [0.1, 1.0, 7.5] {
            let t = transport_psi(&DiscreteMeasure::dirac(Domain::PuncturedPlane, c(r, 0.0)).unwrap()).unwrap();
            assert!(close(t.atoms()[0].location, c(1.0, 0.0)));
        }
        let t = transport_psi(&DiscreteMeasure::dirac(Domain::PuncturedPlane, c(0.0, 1.0)).unwrap()).unwrap();
        assert!(close(t.atoms()[0].location, c(-1.0, 0.0)));

        let m = DiscreteMeasure::from_pairs(Domain::PuncturedPlane, &[(c(1.0, 1.0), 0.5), (c(-1.0, -1.0), 0.5)]).unwrap();
        let t = transport_psi(&m).unwrap();
        assert_eq!(t.len(), 1);
        assert!(close(t.atoms()[0].location, c(0.0, 1.0)));
        assert!((t.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_rejects_origin() {
        let m = DiscreteMeasure::dirac(Domain::ComplexPlane, c(0.0, 0.0)).unwrap();
        assert!(matches!(transport_psi(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn trig_moment_examples() {
        let s = trig_moments(&DiscreteMeasure::dirac(Domain::UnitCircle, c(1.0, 0.0)).unwrap(), 3).unwrap();
        for n in -3..=3 {
            assert!(close(s.get(n).unwrap(), c(1.0, 0.0)));
        }
        let m = DiscreteMeasure::from_pairs(Domain::UnitCircle, &[(c(1.0, 0.0), 0.5), (c(-1.0, 0.0), 0.5)]).unwrap();
        let s = trig_moments(&m, 4).unwrap();
        for n in -4i64..=4 {
            let expect = if n % 2 == 0 { 1.0 } else { 0.0 };
            assert!(close(s.get(n).unwrap(), c(expect, 0.0)));
        }
        let s = trig_moments(&DiscreteMeasure::dirac(Domain::UnitCircle, c(0.0, 1.0)).unwrap(), 2).unwrap();
        assert!(close(s.get(1).unwrap(), c(0.0, 1.0)));
        assert!(close(s.get(2).unwrap(), c(-1.0, 0.0)));
        assert!(close(s.get(-1).unwrap(), c(0.0, -1.0)));
        assert!(s.get(3).is_none());
    }

    #[test]
    fn herglotz_table_checks_symmetry() {
        let bad = HerglotzTable::new(1, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(bad, Err(Error::Invariant(_))));
        let good = HerglotzTable::new(1, vec![c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(good.get(1), Some(c(0.0, 1.0)));
    }

    #[test]
    fn product_examples() {
        let p = product_measure(&DiscreteMeasure::real(&[(1.0, 1.0)]).unwrap(), &DiscreteMeasure::real(&[(2.0, 1.0)]).unwrap()).unwrap();
        assert_eq!(p.atoms(), &[Atom::new(c(1.0, 2.0), 1.0)]);

        let mu = DiscreteMeasure::real(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let p = product_measure(&mu, &DiscreteMeasure::real(&[(3.0, 1.0)]).unwrap()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.mass_at(c(0.0, 3.0)), 0.5);
        assert_eq!(p.mass_at(c(1.0, 3.0)), 0.5);

        let p = product_measure(&DiscreteMeasure::empty(Domain::RealLine), &mu).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.domain(), Domain::RealPlane);
    }

    #[test]
    fn shift_examples() {
        let s = shift_to_horizontal_line(&DiscreteMeasure::real(&[(0.0, 1.0)]).unwrap(), 1.0).unwrap();
        assert!(close(s.atoms()[0].location, c(0.0, 1.0)));
        let s = shift_to_horizontal_line(&DiscreteMeasure::real(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap(), 1.0).unwrap();
        assert_eq!(s.mass_at(c(-1.0, 1.0)), 0.5);
        assert_eq!(s.mass_at(c(1.0, 1.0)), 0.5);
    }

    #[test]
    fn uniform_density_moments() {
        let tau = DensityMeasure1D::from_preset(DensityPreset::Uniform { a: 0.0, b: 1.0 }, QuadratureSpec::default()).unwrap();
        let m3 = density_moment(&tau, 3).unwrap();
        let diff = Float::with_val(130, &m3.value - 0.25f64).abs();
        assert!(diff < 1e-30);
        let m0 = density_moment(&tau, 0).unwrap();
        assert!(Float::with_val(130, &m0.value - 1u32).abs() < 1e-30);
    }

    #[test]
    fn lognormal_total_mass() {
        // ∫ e^{u - u²} du / √π = e^{1/4}
        let tau = DensityMeasure1D::from_preset(DensityPreset::Stieltjes { lambda: 0.0 }, QuadratureSpec::default()).unwrap();
        let m0 = density_moment(&tau, 0).unwrap();
        let exact = Float::with_val(130, 0.25f64).exp();
        let rel = Float::with_val(130, &m0.value - &exact).abs() / &exact;
        assert!(rel < 1e-20, "rel {rel}");
        assert!((m0.value.to_f64() - 1.2840254).abs() < 1e-7);
    }

    #[test]
    fn negative_density_is_rejected() {
        let tau = DensityMeasure1D::new(
            |x: &Float| Float::with_val(x.prec(), x - 0.5f64),
            Support1D::Interval { a: 0.0, b: 1.0 },
            QuadratureSpec::default(),
        )
        .unwrap();
        assert!(matches!(density_moment(&tau, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn measure_json_shape() {
        let mu = DiscreteMeasure::from_pairs(Domain::UnitCircle, &[(c(0.0, 1.0), 0.5)]).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        assert_eq!(s, r#"{"domain":"unit-circle","atoms":[{"re":0.0,"im":1.0,"w":0.5}]}"#);
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mu);
        assert!(serde_json::from_str::<DiscreteMeasure>(r#"{"domain":"unit-circle","atoms":[{"re":2,"w":1}]}"#).is_err());
        assert!(serde_json::from_str::<DiscreteMeasure>(r#"{"domain":"real-line","atoms":[],"x":1}"#).is_err());
    }
}
