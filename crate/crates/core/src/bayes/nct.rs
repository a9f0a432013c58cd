//! Log-density of the non-central t distribution.
//!
//! Uses the integral representation
//! `f(x) = C(x) * J(a)` with `J(a) = ∫_0^∞ y^ν exp(-(y - a)^2 / 2) dy` and
//! `a = μx / sqrt(x² + ν)`, evaluating `J` in log space around its peak.

use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate, QuadratureError, Tolerance};

const INNER_TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-11, max_panels: 400 };
/// The integrand is log-concave with curvature at least 1, so it is below
/// exp(-800) this far from its peak.
const TAIL_SPAN: f64 = 40.0;

/// `ln ∫_0^∞ y^ν exp(-(y - a)^2 / 2) dy`.
fn ln_j(nu: f64, a: f64) -> Result<f64, QuadratureError> {
    let root = (a * a + 4.0 * nu).sqrt();
    // Stable for large negative a.
    let peak = if a >= 0.0 { 0.5 * (a + root) } else { 2.0 * nu / (root - a) };
    let log_g = |y: f64| nu * y.ln() - 0.5 * (y - a) * (y - a);
    let top = log_g(peak);
    let width = 1.0 / (1.0 + nu / (peak * peak)).sqrt();
    let lo = (peak - TAIL_SPAN).max(0.0);
    let hi = peak + TAIL_SPAN;
    let breaks = [peak - 4.0 * width, peak, peak + 4.0 * width];
    let r = integrate(|y| if y <= 0.0 { 0.0 } else { (log_g(y) - top).exp() }, lo, hi, &breaks, INNER_TOL)?;
    Ok(top + r.value.ln())
}

/// `ln f(x; ν, μ)` for the non-central t with `ν` degrees of freedom and
/// non-centrality `μ`.
pub fn ln_pdf(x: f64, nu: f64, mu: f64) -> Result<f64, QuadratureError> {
    let s = x * x + nu;
    let a = mu * x / s.sqrt();
    let ln_c = 0.5 * nu * nu.ln() - nu * mu * mu / (2.0 * s) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(0.5 * nu)
        - 0.5 * (nu - 1.0) * std::f64::consts::LN_2
        - 0.5 * (nu + 1.0) * s.ln();
    Ok(ln_c + ln_j(nu, a)?)
}

/// `ln f(x; ν, 0)`, the central t density, in closed form.
pub fn ln_pdf_central(x: f64, nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * (nu * std::f64::consts::PI).ln()
        - 0.5 * (nu + 1.0) * (1.0 + x * x / nu).ln()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn zero_noncentrality_matches_closed_form() {
        for nu in [1.0, 4.0, 11.0, 24.0, 100.0] {
            for x in [-6.0, -1.0, 0.0, 0.3, 2.5, 9.0] {
                let numeric = ln_pdf(x, nu, 0.0).unwrap();
                assert!((numeric - ln_pdf_central(x, nu)).abs() < 1e-10, "nu {nu} x {x}");
            }
        }
    }

    #[test]
    fn integrates_to_one() {
        for (nu, mu) in [(9.0, 1.5), (11.0, -2.0), (24.0, 4.0)] {
            let tol = Tolerance { abs: 1e-12, rel: 1e-10, max_panels: 400 };
            let mass = integrate(|x| ln_pdf(x, nu, mu).unwrap().exp(), -60.0, 60.0, &[mu], tol).unwrap();
            assert!((mass.value - 1.0).abs() < 1e-8, "nu {nu} mu {mu}: {}", mass.value);
        }
    }

    #[test]
    fn known_values() {
        // Chi-mixture definition integrated at 30-digit precision.
        let cases = [
            (2.0, 11.0, 1.0, -1.483_638_548_174_191_0),
            (3.0, 24.0, 2.0, -1.460_113_451_262_394_7),
            (-1.0, 5.0, 1.5, -3.994_048_952_601_039_8),
        ];
        for (x, nu, mu, expected) in cases {
            let got = ln_pdf(x, nu, mu).unwrap();
            assert!((got - expected).abs() < 1e-9, "({x}, {nu}, {mu}): {got} vs {expected}");
        }
    }
}
