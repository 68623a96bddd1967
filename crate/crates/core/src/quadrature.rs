//! Adaptive Gauss–Legendre quadrature in configurable binary precision.
//!
//! Panels are refined globally: the panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance or the subdivision
//! budget is exhausted. The estimate for a panel is the difference between the
//! rule applied to the whole panel and to its two halves.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes per panel.
const RULE_ORDER: usize = 20;
/// Dyadic levels of initial panels at each end of the mapped half-line.
const HALF_LINE_LEVELS: i32 = 40;

/// Working precision and stopping rule for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Decimal digits of working precision.
    pub digits: u32,
    /// Maximum number of panel bisections.
    pub max_subdivisions: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    /// 39 digits, i.e. a 130-bit mantissa.
    fn default() -> Self {
        QuadratureSpec {
            digits: 39,
            max_subdivisions: 4000,
            abs_tol: 1e-30,
            rel_tol: 1e-25,
        }
    }
}

impl QuadratureSpec {
    pub fn with_digits(digits: u32) -> Self {
        QuadratureSpec {
            digits,
            ..QuadratureSpec::default()
        }
    }

    /// Mantissa bits corresponding to `digits`, never below double precision.
    pub fn precision_bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits == 0 {
            return Err(Error::Precondition("precision digits must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Precondition("subdivision limit must be positive".into()));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::Precondition(
                "tolerances must be nonnegative and not both zero".into(),
            ));
        }
        Ok(())
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil().max(53.0) as u32
}

/// Result of a converged integration.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: Float,
    pub error: Float,
    pub subdivisions: usize,
}

/// Gauss–Legendre rule on [-1, 1] at a fixed precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
    prec: u32,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on the Legendre recurrence.
    pub fn new(order: usize, prec: u32) -> Self {
        assert!(order >= 1);
        let work = prec + 32;
        let pi = Float::with_val(work, Constant::Pi);
        let eps = Float::with_val(work, 1) >> (prec as i32 + 4);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for i in 0..order {
            let guess = Float::with_val(
                work,
                &pi * ((i as f64 + 0.75) / (order as f64 + 0.5)),
            );
            let mut x = guess.cos();
            let mut deriv = Float::with_val(work, 0);
            for _ in 0..200 {
                let (p, dp) = legendre_with_derivative(order, &x);
                let step = Float::with_val(work, &p / &dp);
                x -= &step;
                deriv = dp;
                if step.abs() < eps {
                    let (_, dp) = legendre_with_derivative(order, &x);
                    deriv = dp;
                    break;
                }
            }
            let one_minus_x2 = Float::with_val(work, 1 - Float::with_val(work, x.square_ref()));
            let w = Float::with_val(work, 2) / (one_minus_x2 * deriv.square());
            nodes.push(Float::with_val(prec, &x));
            weights.push(Float::with_val(prec, &w));
        }
        GaussLegendre { nodes, weights, prec }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Float] {
        &self.weights
    }

    /// Apply the rule on [a, b].
    pub fn apply<F: Fn(&Float) -> Float>(&self, f: &F, a: &Float, b: &Float) -> Float {
        let p = self.prec;
        let half = Float::with_val(p, b - a) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        let mut sum = Float::with_val(p, 0);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            let x = Float::with_val(p, &half * t) + &mid;
            sum += Float::with_val(p, w * f(&x));
        }
        sum * half
    }
}

fn legendre_with_derivative(order: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p_prev = Float::with_val(prec, 1);
    let mut p = Float::with_val(prec, x);
    for k in 2..=order {
        let kf = k as u32;
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let a = Float::with_val(prec, x * &p) * (2 * kf - 1);
        let b = Float::with_val(prec, &p_prev * (kf - 1));
        let next = (a - b) / kf;
        p_prev = std::mem::replace(&mut p, next);
    }
    if order == 1 {
        p_prev = Float::with_val(prec, 1);
    }
    // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = (Float::with_val(prec, x * &p) - &p_prev) * order as u32;
    let den = Float::with_val(prec, x.square_ref()) - 1u32;
    (p, num / den)
}

struct Panel {
    a: Float,
    b: Float,
    left: Float,
    right: Float,
    error: Float,
}

impl Panel {
    fn evaluate<F: Fn(&Float) -> Float>(rule: &GaussLegendre, f: &F, a: Float, b: Float, whole: Float) -> Panel {
        let p = rule.prec;
        let m = Float::with_val(p, &a + &b) / 2u32;
        let left = rule.apply(f, &a, &m);
        let right = rule.apply(f, &m, &b);
        let error = (Float::with_val(p, &left + &right) - &whole).abs();
        Panel { a, b, left, right, error }
    }
}

/// Integrate `f` over [a, b].
pub fn integrate<F>(f: F, a: &Float, b: &Float, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Float) -> Float,
{
    integrate_with_breakpoints(f, &[a.clone(), b.clone()], spec)
}

/// Integrate `f` over [points[0], points[last]], starting from the given panels.
pub fn integrate_with_breakpoints<F>(f: F, points: &[Float], spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Float) -> Float,
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two breakpoints".into()));
    }
    if points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::Precondition("breakpoints must be strictly increasing".into()));
    }
    let prec = spec.precision_bits();
    let rule = GaussLegendre::new(RULE_ORDER, prec);

    let mut panels: Vec<Panel> = points
        .windows(2)
        .map(|w| {
            let a = Float::with_val(prec, &w[0]);
            let b = Float::with_val(prec, &w[1]);
            let whole = rule.apply(&f, &a, &b);
            Panel::evaluate(&rule, &f, a, b, whole)
        })
        .collect();

    let mut subdivisions = 0usize;
    loop {
        let mut total = Float::with_val(prec, 0);
        let mut total_err = Float::with_val(prec, 0);
        let mut worst = 0usize;
        for (i, panel) in panels.iter().enumerate() {
            total += &panel.left;
            total += &panel.right;
            total_err += &panel.error;
            if panel.error > panels[worst].error {
                worst = i;
            }
        }
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Numeric("integrand produced a non-finite value".into()));
        }
        let tol = Float::with_val(prec, total.abs_ref()) * spec.rel_tol;
        let tol = tol.max(&Float::with_val(prec, spec.abs_tol));
        if total_err <= tol {
            return Ok(QuadratureResult {
                value: total,
                error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total.to_f64(),
                error: total_err.to_f64(),
                subdivisions,
            });
        }
        let panel = panels.swap_remove(worst);
        let m = Float::with_val(prec, &panel.a + &panel.b) / 2u32;
        panels.push(Panel::evaluate(&rule, &f, panel.a, m.clone(), panel.left));
        panels.push(Panel::evaluate(&rule, &f, m, panel.b, panel.right));
        subdivisions += 1;
    }
}

/// Integrate `f` over (a, ∞) through the substitution x = a + t / (1 - t).
pub fn integrate_half_line<F>(f: F, a: &Float, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&Float) -> Float,
{
    let prec = spec.precision_bits();
    let mapped = |t: &Float| {
        let one_minus = Float::with_val(prec, 1 - t);
        let x = Float::with_val(prec, t / &one_minus) + a;
        let jac = Float::with_val(prec, one_minus.square_ref()).recip();
        let fx = f(&x);
        if fx.is_zero() {
            fx
        } else {
            fx * jac
        }
    };
    // Dyadic breakpoints toward both ends keep every scale of x visible to the
    // error estimate.
    let mut points = vec![Float::with_val(prec, 0)];
    points.extend((1..=HALF_LINE_LEVELS).rev().map(|k| Float::with_val(prec, Float::i_exp(1, -k))));
    points.extend((2..=HALF_LINE_LEVELS).map(|k| Float::with_val(prec, 1) - Float::with_val(prec, Float::i_exp(1, -k))));
    points.push(Float::with_val(prec, 1));
    integrate_with_breakpoints(mapped, &points, spec)
}

/// x^n at the precision of `x`.
pub(crate) fn powu(x: &Float, n: u32) -> Float {
    Float::with_val(x.prec(), x.pow(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64, prec: u32) -> Float {
        Float::with_val(prec, v)
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5, 128);
        let a = f(0.0, 128);
        let b = f(1.0, 128);
        // degree 9 is the limit for 5 nodes
        let v = rule.apply(&|x: &Float| powu(x, 9), &a, &b);
        let exact = Float::with_val(128, 1) / 10u32;
        assert!(Float::with_val(128, v - exact).abs() < 1e-35);
        let wsum: Float = rule.weights().iter().fold(Float::with_val(128, 0), |acc, w| acc + w);
        assert!(Float::with_val(128, wsum - 2u32).abs() < 1e-35);
    }

    #[test]
    fn adaptive_exp_to_high_precision() {
        let spec = QuadratureSpec::default();
        let prec = spec.precision_bits();
        let r = integrate(|x: &Float| Float::with_val(prec, x.exp_ref()), &f(0.0, prec), &f(1.0, prec), &spec).unwrap();
        let exact = Float::with_val(prec, 1).exp() - 1u32;
        let diff = Float::with_val(prec, &r.value - &exact).abs();
        assert!(diff < 1e-30, "diff {diff}");
    }

    #[test]
    fn half_line_gaussian() {
        let spec = QuadratureSpec::default();
        let prec = spec.precision_bits();
        let r = integrate_half_line(
            |x: &Float| {
                let x2 = Float::with_val(prec, x.square_ref());
                (-x2).exp()
            },
            &f(0.0, prec),
            &spec,
        )
        .unwrap();
        let exact = Float::with_val(prec, Constant::Pi).sqrt() / 2u32;
        let diff = Float::with_val(prec, &r.value - &exact).abs();
        assert!(diff < 1e-25, "diff {diff}");
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..QuadratureSpec::default()
        };
        let prec = spec.precision_bits();
        // sqrt has an endpoint singularity in its derivative
        let err = integrate(|x: &Float| Float::with_val(prec, x.sqrt_ref()), &f(0.0, prec), &f(1.0, prec), &spec)
            .unwrap_err();
        match err {
            Error::Convergence { estimate, subdivisions, .. } => {
                assert_eq!(subdivisions, 3);
                assert!((estimate - 2.0 / 3.0).abs() < 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            rel_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(spec.validate().is_err());
        assert_eq!(QuadratureSpec::with_digits(1).precision_bits(), 53);
    }
}
