//! Lower bounds on the position spread of a free composite particle and the
//! two families of states that approach them.

use crate::clock::DiscreteClockSpec;
use crate::dynamics::compute_moments_with;
use crate::error::{Error, Result};
use crate::optimize::golden_section_min;
use crate::params::PhysicalParams;
use crate::scalar::{lit, to_f64, Real};
use crate::state::CompositeState;
use crate::HamiltonianOrder;

/// Largest |Corr(x, v)| admitted by the symmetric-preparation bounds.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Moments of the mass operator and internal energy for a discrete clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockStats<T> {
    pub mean_energy: T,
    pub var_energy: T,
    pub mean_inv_mass: T,
    pub mean_inv_mass_sq: T,
    pub mbar: T,
}

impl<T: Real> ClockStats<T> {
    pub fn new(params: &PhysicalParams<T>, clock: &DiscreteClockSpec<T>) -> Self {
        let mut s = [T::zero(); 4];
        for l in clock.levels() {
            let w = l.phi.norm_sqr();
            let inv = params.mass_of(l.epsilon).recip();
            s[0] += w * l.epsilon;
            s[1] += w * l.epsilon * l.epsilon;
            s[2] += w * inv;
            s[3] += w * inv * inv;
        }
        Self {
            mean_energy: s[0],
            var_energy: s[1] - s[0] * s[0],
            mean_inv_mass: s[2],
            mean_inv_mass_sq: s[3],
            mbar: params.m + s[0] / (params.c * params.c),
        }
    }

    /// Δ²(m̂⁻¹).
    pub fn var_inv_mass(&self) -> T {
        self.mean_inv_mass_sq - self.mean_inv_mass * self.mean_inv_mass
    }

    /// Δ²H_c / (m c²)² = λ².
    pub fn lambda_sq(&self, params: &PhysicalParams<T>) -> T {
        self.var_energy / params.rest_energy().powi(2)
    }
}

/// Minimum position spreads at time `t` for a symmetric preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadBoundReport<T> {
    pub t: T,
    /// ħ|t|⟨m̂⁻¹⟩.
    pub bound_exact: T,
    /// ħ|t|/m · (1 − ⟨H⟩/mc² + (Δ²H + ⟨H⟩²)/m²c⁴).
    pub bound_expanded: T,
    /// ħ|t|/m̄ + (ħ|t|/m) Δ²H/m²c⁴.
    pub bound_final: T,
    /// ħ|t|/m.
    pub salecker_wigner: T,
}

/// Standard quantum limit ħ|t|/m for a structureless particle.
pub fn salecker_wigner_bound<T: Real>(params: &PhysicalParams<T>, t: T) -> T {
    params.hbar * t.abs() / params.m
}

fn bounds_from<T: Real>(
    params: &PhysicalParams<T>,
    t: T,
    mean_e: T,
    var_e: T,
    mean_inv: T,
) -> SpreadBoundReport<T> {
    let mc2 = params.rest_energy();
    let sw = salecker_wigner_bound(params, t);
    let mbar = params.m + mean_e / (params.c * params.c);
    SpreadBoundReport {
        t,
        bound_exact: params.hbar * t.abs() * mean_inv,
        bound_expanded: sw * (T::one() - mean_e / mc2 + (var_e + mean_e * mean_e) / (mc2 * mc2)),
        bound_final: params.hbar * t.abs() / mbar + sw * var_e / (mc2 * mc2),
        salecker_wigner: sw,
    }
}

/// Spread bounds for a prepared state after free evolution for `t`.
///
/// The state must have Cov(x, v) = 0, checked on the exact velocity
/// (relative to Δx Δv).
pub fn general_min_spread<T: Real>(
    state: &CompositeState<T>,
    t: T,
) -> Result<SpreadBoundReport<T>> {
    let m = compute_moments_with(state, HamiltonianOrder::Exact)?;
    let scale = (m.var_x * m.var_v).sqrt();
    let corr = if scale > T::zero() {
        m.cov_xv / scale
    } else {
        T::zero()
    };
    if corr.abs() > lit(SYMMETRY_TOLERANCE) {
        return Err(Error::SymmetryViolation(to_f64(corr)));
    }
    Ok(bounds_from(
        &state.params,
        t,
        m.mean_hc,
        m.var_hc,
        m.mean_inv_mass,
    ))
}

/// Spread bounds computed from the clock alone.
pub fn clock_min_spread<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    t: T,
) -> SpreadBoundReport<T> {
    let s = ClockStats::new(params, clock);
    bounds_from(params, t, s.mean_energy, s.var_energy, s.mean_inv_mass)
}

/// Position variance of the separable Gaussian family at time `t`.
pub fn gaussian_family_spread<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    sigma: T,
    p0: T,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    let h = params.hbar;
    sigma * sigma
        + (h * h * t * t) / (lit::<T>(4.0) * sigma * sigma) * s.mean_inv_mass_sq
        + p0 * p0 * t * t * s.var_inv_mass()
}

/// Width σ minimizing [`gaussian_family_spread`] at time `t`.
pub fn gaussian_family_optimal_sigma<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    (params.hbar * t.abs() * s.mean_inv_mass_sq.sqrt() / lit(2.0)).sqrt()
}

/// p0² t² Δ²(m̂⁻¹) + ħ|t| √⟨m̂⁻²⟩.
pub fn gaussian_family_min<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    p0: T,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    p0 * p0 * t * t * s.var_inv_mass() + params.hbar * t.abs() * s.mean_inv_mass_sq.sqrt()
}

/// Second-order expansion of [`gaussian_family_min`].
pub fn gaussian_family_min_expanded<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    p0: T,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    let l2 = s.lambda_sq(params);
    let sw = salecker_wigner_bound(params, t);
    (p0 * t / params.m).powi(2) * l2 + params.hbar * t.abs() / s.mbar + lit::<T>(1.5) * sw * l2
}

/// ⟨ħ(1 + Ω²t²)/(2 m̂ Ω)⟩ for the minimum-uncertainty family.
pub fn mus_family_spread<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    omega: T,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    params.hbar * (T::one() + omega * omega * t * t) / (lit::<T>(2.0) * omega) * s.mean_inv_mass
}

/// ħ|t|⟨m̂⁻¹⟩, reached at Ω = 1/|t|.
pub fn mus_family_min<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    t: T,
) -> T {
    ClockStats::new(params, clock).mean_inv_mass * params.hbar * t.abs()
}

pub fn mus_family_optimal_omega<T: Real>(t: T) -> T {
    t.abs().recip()
}

/// Minimizes `f` over a positive parameter by golden section in its logarithm,
/// bracketing a factor of 10⁴ either side of `guess`.
fn scan_positive<T: Real>(f: impl Fn(T) -> T, guess: T) -> (T, T) {
    let span = lit::<T>(4.0) * lit::<T>(10.0).ln();
    let (u, v) = golden_section_min(
        |u: T| f(u.exp()),
        guess.ln() - span,
        guess.ln() + span,
        lit(1e-12),
    );
    (u.exp(), v)
}

/// Scan-based cross-check of the Gaussian minimizer: (σ*, minimum).
pub fn gaussian_family_min_scan<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    p0: T,
    t: T,
) -> (T, T) {
    let guess = (params.hbar * t.abs() / params.m).sqrt();
    scan_positive(|s| gaussian_family_spread(params, clock, s, p0, t), guess)
}

/// Scan-based cross-check of the MUS minimizer: (Ω*, minimum).
pub fn mus_family_min_scan<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    t: T,
) -> (T, T) {
    scan_positive(|w| mus_family_spread(params, clock, w, t), t.abs().recip())
}

/// Normalized excess of a family minimum over the renormalized-mass term,
/// min · m/(ħ|t|) − m/m̄.
pub fn normalized_excess<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
    family_min: T,
    t: T,
) -> T {
    let s = ClockStats::new(params, clock);
    family_min / salecker_wigner_bound(params, t) - params.m / s.mbar
}

/// Least-squares coefficient `a` of y ≈ a λ².
pub fn fit_lambda_squared<T: Real>(lambdas: &[T], ys: &[T]) -> T {
    let num: T = lambdas.iter().zip(ys).map(|(l, y)| *y * *l * *l).sum();
    let den: T = lambdas.iter().map(|l| l.powi(4)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn qubit_at(lambda: f64) -> (PhysicalParams<f64>, DiscreteClockSpec<f64>) {
        let clock = DiscreteClockSpec::balanced_qubit(2.0).unwrap();
        (PhysicalParams::for_lambda(1.0, lambda).unwrap(), clock)
    }

    #[test]
    fn standard_quantum_limit() {
        let p = PhysicalParams::<f64>::natural(1.0).unwrap();
        assert_eq!(salecker_wigner_bound(&p, 1.0), 1.0);
        assert_eq!(salecker_wigner_bound(&p, 0.0), 0.0);
        assert_eq!(salecker_wigner_bound(&p, 4.0), 4.0);
        assert_eq!(
            salecker_wigner_bound(&p, -4.0).sqrt(),
            2.0 * salecker_wigner_bound(&p, 1.0).sqrt()
        );
    }

    #[test]
    fn single_level_reduces_to_standard_limit() {
        let p = PhysicalParams::natural(3.0).unwrap();
        let r = clock_min_spread(&p, &DiscreteClockSpec::single(0.0), 2.5);
        assert_relative_eq!(r.bound_exact, r.salecker_wigner, max_relative = 1e-15);
        let c = DiscreteClockSpec::single(0.0);
        assert_relative_eq!(
            gaussian_family_min(&p, &c, 0.0, 2.5),
            mus_family_min(&p, &c, 2.5),
            max_relative = 1e-15
        );
    }

    #[test]
    fn energy_spread_raises_bound() {
        let (p, c) = qubit_at(0.1);
        let r = clock_min_spread(&p, &c, 1.0);
        assert!(r.bound_final > r.salecker_wigner);
        assert!(r.bound_exact > r.salecker_wigner);
    }

    #[test]
    fn expanded_bound_error_is_cubic_or_better() {
        let rel = |l: f64| {
            let (p, c) = qubit_at(l);
            let r = clock_min_spread(&p, &c, 1.0);
            (r.bound_exact - r.bound_expanded).abs() / r.salecker_wigner
        };
        assert!(rel(0.05) < 0.05f64.powi(3));
        assert!(rel(0.025) < rel(0.05) / 7.0);
    }

    #[test]
    fn analytic_minimizers_match_scan() {
        let (p, c) = qubit_at(0.15);
        let t = 2.3;
        let (s_scan, g_scan) = gaussian_family_min_scan(&p, &c, 0.4, t);
        assert_relative_eq!(
            s_scan,
            gaussian_family_optimal_sigma(&p, &c, t),
            max_relative = 1e-6
        );
        assert_relative_eq!(
            g_scan,
            gaussian_family_min(&p, &c, 0.4, t),
            max_relative = 1e-12
        );
        let (w_scan, m_scan) = mus_family_min_scan(&p, &c, t);
        assert_relative_eq!(w_scan, 1.0 / t, max_relative = 1e-6);
        assert_relative_eq!(m_scan, mus_family_min(&p, &c, t), max_relative = 1e-12);
    }

    #[test]
    fn gaussian_never_beats_mus() {
        for l in [0.01, 0.05, 0.1, 0.2] {
            let (p, c) = qubit_at(l);
            assert!(gaussian_family_min(&p, &c, 0.0, 1.0) > mus_family_min(&p, &c, 1.0));
        }
    }

    #[test]
    fn gap_to_general_bound_is_half_lambda_squared() {
        let l = 0.02;
        let (p, c) = qubit_at(l);
        let gap = gaussian_family_min_expanded(&p, &c, 0.0, 1.0)
            - clock_min_spread(&p, &c, 1.0).bound_final;
        assert_relative_eq!(
            gap,
            0.5 * l * l * salecker_wigner_bound(&p, 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn fit_recovers_exact_coefficient() {
        let ls = [0.01, 0.02, 0.05];
        let ys: Vec<f64> = ls.iter().map(|l| 1.5 * l * l).collect();
        assert_relative_eq!(fit_lambda_squared(&ls, &ys), 1.5, max_relative = 1e-14);
    }
}
