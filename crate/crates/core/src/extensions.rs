//! Representing pairs (μ on ℂ*, ν on 𝕋) and the half-plane extensions they
//! generate: Γ_{m,n} = ∫ z^m z̄^n dμ + [m + n = 0] ∫ z^m z̄^n dν.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{monomial, transport_phi, transport_psi, Atom, DiscreteMeasure, Domain};
use crate::sequences::ExtendedMomentTable;

/// Allowed deviation of a circle profile's mass from 1.
pub const PROFILE_MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct RepresentingPair {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
}

impl TryFrom<PairJson> for RepresentingPair {
    type Error = Error;

    fn try_from(raw: PairJson) -> Result<Self> {
        RepresentingPair::new(raw.mu, raw.nu)
    }
}

impl From<RepresentingPair> for PairJson {
    fn from(p: RepresentingPair) -> Self {
        PairJson { mu: p.mu, nu: p.nu }
    }
}

impl RepresentingPair {
    /// μ is retagged onto ℂ* (an atom at 0 is a domain error); ν must live on 𝕋.
    pub fn new(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Result<Self> {
        let mu = match mu.domain() {
            Domain::PuncturedPlane => mu,
            Domain::ComplexPlane | Domain::RealLine => mu
                .retag(Domain::PuncturedPlane)
                .map_err(|_| Error::Domain("μ of a representing pair must not charge the origin".into()))?,
            other => return Err(Error::Domain(format!("μ must be a planar measure, got {other}"))),
        };
        let nu = match nu.domain() {
            Domain::UnitCircle => nu,
            _ if nu.is_empty() => DiscreteMeasure::empty(Domain::UnitCircle),
            other => return Err(Error::Domain(format!("ν must be a circle measure, got {other}"))),
        };
        Ok(RepresentingPair { mu, nu })
    }

    pub fn mu(&self) -> &DiscreteMeasure {
        &self.mu
    }

    pub fn nu(&self) -> &DiscreteMeasure {
        &self.nu
    }
}

/// Γ on the window |m|, |n| ≤ W, m + n ≥ 0.
pub fn build_extension(pair: &RepresentingPair, window: usize) -> Result<ExtendedMomentTable> {
    if window < 1 {
        return Err(Error::Range("window must be at least 1".into()));
    }
    Ok(ExtendedMomentTable::new(window, |m, n| {
        let bulk: Complex64 = pair.mu.atoms().iter().map(|a| a.weight * monomial(a.location, m, n)).sum();
        if m + n == 0 {
            bulk + pair.nu.atoms().iter().map(|a| a.weight * monomial(a.location, m, n)).sum::<Complex64>()
        } else {
            bulk
        }
    }))
}

/// μ + ν(𝕋)·δ₀ on ℂ.
pub fn pair_to_measure(pair: &RepresentingPair) -> DiscreteMeasure {
    let origin = Atom::new(Complex64::new(0.0, 0.0), pair.nu.total_mass());
    DiscreteMeasure::new(Domain::ComplexPlane, pair.mu.atoms().iter().copied().chain([origin]))
        .expect("atoms of a valid pair are valid on ℂ")
}

/// Splits μ = μ' + tδ₀ and returns (μ', t·profile).
pub fn measure_to_pair(mu: &DiscreteMeasure, profile: &DiscreteMeasure) -> Result<RepresentingPair> {
    if profile.domain() != Domain::UnitCircle {
        return Err(Error::Domain(format!("circle profile must live on 𝕋, got {}", profile.domain())));
    }
    let mass = profile.total_mass();
    if (mass - 1.0).abs() > PROFILE_MASS_TOLERANCE {
        return Err(Error::Precondition(format!("circle profile must have unit mass, got {mass}")));
    }
    let (t, rest) = mu.split_origin();
    let nu = if t == 0.0 {
        DiscreteMeasure::empty(Domain::UnitCircle)
    } else {
        profile.scaled(t)?
    };
    RepresentingPair::new(rest.retag(Domain::PuncturedPlane)?, nu)
}

/// Γ_t = tΓ₁ + (1 − t)Γ₂ with Γ₁ from (μ − αδ₀, αδ₁) and Γ₂ from (μ − αδ₀, αδ_i), α = μ({0}).
pub fn snu2_family(mu: &DiscreteMeasure, t: f64, window: usize) -> Result<ExtendedMomentTable> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("convex parameter t = {t} is outside [0, 1]")));
    }
    let (alpha, rest) = mu.split_origin();
    if alpha <= 0.0 {
        return Err(Error::Precondition("the measure has no atom at the origin".into()));
    }
    let rest = rest.retag(Domain::PuncturedPlane)?;
    let at = |z: Complex64| -> Result<ExtendedMomentTable> {
        let nu = DiscreteMeasure::from_pairs(Domain::UnitCircle, &[(z, alpha)])?;
        build_extension(&RepresentingPair::new(rest.clone(), nu)?, window)
    };
    let one = at(Complex64::new(1.0, 0.0))?;
    let i = at(Complex64::new(0.0, 1.0))?;
    one.convex_combination(&i, t)
}

/// max_{|n| ≤ D} of the trigonometric-moment gap between ψ#μ₁ + φ#ν₁ and ψ#μ₂ + φ#ν₂.
pub fn quasi_det_residual(p1: &RepresentingPair, p2: &RepresentingPair, degree: usize) -> Result<f64> {
    let circle_image = |p: &RepresentingPair| -> Result<DiscreteMeasure> {
        transport_psi(&p.mu)?.plus(&transport_phi(&p.nu)?)
    };
    let a = circle_image(p1)?;
    let b = circle_image(p2)?;
    let moment = |nu: &DiscreteMeasure, n: i64| -> Complex64 {
        nu.atoms().iter().map(|x| x.weight * monomial(x.location, n, 0)).sum()
    };
    let d = degree as i64;
    Ok((-d..=d).map(|n| (moment(&a, n) - moment(&b, n)).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::discrete_moments;
    use crate::sequences::restrict;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(pairs: &[(Complex64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::from_pairs(Domain::UnitCircle, pairs).unwrap()
    }

    fn plane(pairs: &[(Complex64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::from_pairs(Domain::ComplexPlane, pairs).unwrap()
    }

    fn empty_mu() -> DiscreteMeasure {
        DiscreteMeasure::empty(Domain::PuncturedPlane)
    }

    #[test]
    fn build_extension_examples() {
        let p = RepresentingPair::new(plane(&[(c(1.0, 0.0), 1.0)]), DiscreteMeasure::empty(Domain::UnitCircle)).unwrap();
        let g = build_extension(&p, 3).unwrap();
        assert!(g.indices().all(|(m, n)| g.get(m, n) == Some(c(1.0, 0.0))));

        let p = RepresentingPair::new(empty_mu(), circle(&[(c(1.0, 0.0), 1.0)])).unwrap();
        let g = build_extension(&p, 3).unwrap();
        assert!(g.indices().all(|(m, n)| g.get(m, n).unwrap() == c(if m + n == 0 { 1.0 } else { 0.0 }, 0.0)));

        let p = RepresentingPair::new(empty_mu(), circle(&[(c(0.0, 1.0), 1.0)])).unwrap();
        let g = build_extension(&p, 3).unwrap();
        for m in -3..=3i64 {
            let expect = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g.get(m, -m).unwrap() - c(expect, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(build_extension(&p, 0), Err(Error::Range(_))));
    }

    #[test]
    fn pair_rejects_origin_atom() {
        let r = RepresentingPair::new(plane(&[(c(0.0, 0.0), 1.0)]), DiscreteMeasure::empty(Domain::UnitCircle));
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = RepresentingPair::new(empty_mu(), plane(&[(c(2.0, 0.0), 1.0)]));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn pair_to_measure_examples() {
        let p = RepresentingPair::new(plane(&[(c(1.0, 0.0), 1.0)]), DiscreteMeasure::empty(Domain::UnitCircle)).unwrap();
        assert!(pair_to_measure(&p).approx_eq(&plane(&[(c(1.0, 0.0), 1.0)]), 1e-15, 1e-15));

        let p = RepresentingPair::new(empty_mu(), circle(&[(c(0.0, 1.0), 1.0)])).unwrap();
        assert!(pair_to_measure(&p).approx_eq(&plane(&[(c(0.0, 0.0), 1.0)]), 1e-15, 1e-15));

        let p = RepresentingPair::new(plane(&[(c(2.0, 0.0), 0.5)]), circle(&[(c(1.0, 0.0), 0.5)])).unwrap();
        let m = pair_to_measure(&p);
        assert!(m.approx_eq(&plane(&[(c(2.0, 0.0), 0.5), (c(0.0, 0.0), 0.5)]), 1e-15, 1e-15));
        let check = crate::sequences::is_extension(&build_extension(&p, 4).unwrap(), &discrete_moments(&m, 4).unwrap());
        assert!(check.unwrap().is_extension);
    }

    #[test]
    fn measure_to_pair_examples() {
        let p = measure_to_pair(&plane(&[(c(1.0, 0.0), 1.0)]), &circle(&[(c(0.0, 1.0), 1.0)])).unwrap();
        assert!(p.nu().is_empty());
        assert_eq!(p.mu().atoms().len(), 1);

        let p = measure_to_pair(&plane(&[(c(0.0, 0.0), 1.0)]), &circle(&[(c(1.0, 0.0), 1.0)])).unwrap();
        assert!(p.mu().is_empty());
        assert!(p.nu().approx_eq(&circle(&[(c(1.0, 0.0), 1.0)]), 1e-15, 1e-15));

        let mu = plane(&[(c(0.0, 0.0), 0.5), (c(2.0, 0.0), 0.5)]);
        let p = measure_to_pair(&mu, &circle(&[(c(0.0, 1.0), 1.0)])).unwrap();
        assert!(p.mu().approx_eq(&plane(&[(c(2.0, 0.0), 0.5)]), 1e-15, 1e-15));
        assert!(p.nu().approx_eq(&circle(&[(c(0.0, 1.0), 0.5)]), 1e-15, 1e-15));

        let heavy = circle(&[(c(1.0, 0.0), 2.0)]);
        assert!(matches!(measure_to_pair(&mu, &heavy), Err(Error::Precondition(_))));
    }

    #[test]
    fn convex_family_examples() {
        let delta0 = plane(&[(c(0.0, 0.0), 1.0)]);
        let g1 = snu2_family(&delta0, 1.0, 3).unwrap();
        assert!((g1.get(1, -1).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let g0 = snu2_family(&delta0, 0.0, 3).unwrap();
        assert!((g0.get(1, -1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let half = snu2_family(&delta0, 0.5, 3).unwrap();
        assert!(half.get(1, -1).unwrap().norm() < 1e-15);
        let gamma = discrete_moments(&delta0, 3).unwrap();
        assert!(restrict(&half).max_difference(&gamma) < 1e-15);

        assert!(matches!(snu2_family(&plane(&[(c(1.0, 0.0), 1.0)]), 0.5, 3), Err(Error::Precondition(_))));
        assert!(matches!(snu2_family(&delta0, 1.5, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn quasi_det_residual_examples() {
        let mu = plane(&[(c(1.0, 2.0), 0.3), (c(-0.5, 0.1), 0.2)]);
        let alpha = 0.5;
        let p1 = RepresentingPair::new(mu.clone(), circle(&[(c(1.0, 0.0), alpha)])).unwrap();
        assert_eq!(quasi_det_residual(&p1, &p1, 8).unwrap(), 0.0);

        let p2 = RepresentingPair::new(mu, circle(&[(c(1.0, 0.0), alpha / 2.0), (c(-1.0, 0.0), alpha / 2.0)])).unwrap();
        assert!(quasi_det_residual(&p1, &p2, 8).unwrap() < 1e-12);

        let a = RepresentingPair::new(empty_mu(), circle(&[(c(1.0, 0.0), 1.0)])).unwrap();
        let b = RepresentingPair::new(empty_mu(), circle(&[(c(0.0, 1.0), 1.0)])).unwrap();
        assert!((quasi_det_residual(&a, &b, 1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pair_json_round_trip() {
        let p = RepresentingPair::new(plane(&[(c(1.0, 1.0), 0.25)]), circle(&[(c(0.0, 1.0), 0.5)])).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: RepresentingPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"mu":{"domain":"complex-plane","atoms":[{"re":0,"w":1}]},"nu":{"domain":"unit-circle","atoms":[]}}"#;
        assert!(serde_json::from_str::<RepresentingPair>(bad).is_err());
    }
}
