//! Minimum of the relational spread over the rod width and the clock's time spread.
//!
//! With u = ħ/(m_r c²), X = Δ²x_r and s = Δ²τ_c the lower bound reads
//!
//! F(X, s) = X + [(ħτ₀/2m̄_r)²(1 + u²/(2s)) + (2/3)(ħ/2m_r)² s] / X,
//!
//! where the time-energy relation ΔH_c Δτ_c ≥ ħ/2 has replaced the energy
//! spread. The ordering correction −(5/4)(ħ/2m_r)² u²/X is left out and
//! reported separately.

use crate::error::{Error, Result};
use crate::optimize::golden_section_min;
use crate::params::PhysicalParams;
use crate::scalar::{lit, to_f64, Real};

/// |τ₀| must exceed this many Compton times ħ/(m_r c²).
pub const ELAPSED_TIME_MIN: f64 = 10.0;
const LOG_BRACKET: f64 = 9.2; // ln 1e4

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationalMinimum<T> {
    /// Minimum found minimizing over X first, then s.
    pub spread_first: T,
    /// Minimum found minimizing over s first, then X.
    pub time_first: T,
    /// ħ|τ₀|/m̄_r + (1/√3)(ħ/m_r c)².
    pub closed_form: T,
    /// (minimum − ħ|τ₀|/m̄_r) / (ħ/m_r c)².
    pub compton_coefficient: T,
    pub optimal_var_x: T,
    pub optimal_var_tau: T,
    /// Value of the omitted ordering correction at the optimum.
    pub dropped_term: T,
}

impl<T: Real> RelationalMinimum<T> {
    pub fn value(&self) -> T {
        self.spread_first
    }

    /// Relative disagreement between the two minimization orders.
    pub fn order_gap(&self) -> T {
        (self.spread_first - self.time_first).abs() / self.spread_first
    }
}

/// Nested golden-section search in log coordinates.
fn nested<T: Real>(f: impl Fn(T, T) -> T, outer0: T, inner0: T) -> (T, T, T) {
    let tol = lit::<T>(1e-11);
    let b = lit::<T>(LOG_BRACKET);
    let inner_min = |o: T| golden_section_min(|li: T| f(o, inner0 * li.exp()), -b, b, tol);
    let (lo, v) = golden_section_min(|lo: T| inner_min(outer0 * lo.exp()).1, -b, b, tol);
    let o = outer0 * lo.exp();
    let (li, _) = inner_min(o);
    (o, inner0 * li.exp(), v)
}

/// Minimizes the relational spread bound in both orders.
pub fn relational_minimum<T: Real>(
    params: &PhysicalParams<T>,
    mbar: T,
    tau0: T,
) -> Result<RelationalMinimum<T>> {
    let hbar = params.hbar;
    let m = params.m;
    let u = hbar / params.rest_energy();
    if !(tau0.abs() >= u * lit(ELAPSED_TIME_MIN)) {
        return Err(Error::RegimeViolation(format!(
            "|tau0| = {} is not large compared with hbar/(m c^2) = {}",
            to_f64(tau0.abs()),
            to_f64(u)
        )));
    }
    let two = lit::<T>(2.0);
    let a = (hbar * tau0 / (two * mbar)).powi(2);
    let b = (hbar / (two * m)).powi(2) * two / lit(3.0);
    let f = |x: T, s: T| x + (a * (T::one() + u * u / (two * s)) + b * s) / x;

    let x_scale = hbar * tau0.abs() / m;
    let s_scale = u * tau0.abs();
    let (s_opt, x_opt, spread_first) = nested(|s, x| f(x, s), s_scale, x_scale);
    let (_, _, time_first) = nested(f, x_scale, s_scale);

    let lead = hbar * tau0.abs() / mbar;
    let compton2 = (hbar / (m * params.c)).powi(2);
    Ok(RelationalMinimum {
        spread_first,
        time_first,
        closed_form: lead + compton2 / lit::<T>(3.0).sqrt(),
        compton_coefficient: (spread_first - lead) / compton2,
        optimal_var_x: x_opt,
        optimal_var_tau: s_opt,
        dropped_term: -lit::<T>(1.25) * (hbar / (two * m)).powi(2) * u * u / x_opt,
    })
}

/// Minimum over Δ²x_r of Δ²x_r + (ħ/2m_r)²(τ₀² + Δ²τ_c)/Δ²x_r.
pub fn relational_minimum_nonrelativistic<T: Real>(
    params: &PhysicalParams<T>,
    tau0: T,
    var_tau: T,
) -> T {
    let k = (params.hbar / (lit::<T>(2.0) * params.m)).powi(2) * (tau0 * tau0 + var_tau);
    let scale = k.sqrt();
    let b = lit::<T>(LOG_BRACKET);
    golden_section_min(
        |l: T| scale * l.exp() + k / (scale * l.exp()),
        -b,
        b,
        lit(1e-11),
    )
    .1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PhysicalParams<f64> {
        PhysicalParams::new(1.0, 10.0, 1.0).unwrap()
    }

    #[test]
    fn nonrelativistic_minimum_matches_closed_form() {
        let p = params();
        for &(tau0, vt) in &[(1.0, 0.0), (2.0, 0.3), (0.0, 0.5)] {
            let got = relational_minimum_nonrelativistic(&p, tau0, vt);
            let expected = (tau0 * tau0 + vt).sqrt();
            assert!(
                (got - expected).abs() < 1e-12 * expected.max(1e-300),
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn compton_coefficient_is_inverse_sqrt_three() {
        let p = params();
        let u = 1.0 / p.rest_energy();
        let r = relational_minimum(&p, 1.0, 100.0 * u).unwrap();
        let target = 1.0 / 3f64.sqrt();
        assert!(
            (r.compton_coefficient - target).abs() < 0.01 * target,
            "{}",
            r.compton_coefficient
        );
        assert!(r.order_gap() < 1e-6, "{}", r.order_gap());
        assert!(r.dropped_term < 0.0);
    }

    #[test]
    fn optimal_time_spread_scales_linearly_with_elapsed_time() {
        let p = params();
        let u = 1.0 / p.rest_energy();
        let taus = [1e2 * u, 1e3 * u, 1e4 * u];
        let s: Vec<f64> = taus
            .iter()
            .map(|&t| relational_minimum(&p, 1.0, t).unwrap().optimal_var_tau)
            .collect();
        let slope = (s[2] / s[0]).ln() / (taus[2] / taus[0]).ln();
        assert!((slope - 1.0).abs() < 0.01, "{slope}");
    }

    #[test]
    fn short_elapsed_time_is_rejected() {
        let p = params();
        assert!(matches!(
            relational_minimum(&p, 1.0, 0.05),
            Err(Error::RegimeViolation(_))
        ));
    }
}
