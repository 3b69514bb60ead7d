//! Space–time trade-off relations between the position spread of the centre
//! of mass and the distinguishability time of the clock.

use crate::clock::DiscreteClockSpec;
use crate::dynamics::{compute_moments_with, evolve, threshold_time, HamiltonianOrder};
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::optimize::golden_section_min;
use crate::params::PhysicalParams;
use crate::qsl::{dephasing_functional, dynamical_qsl_bound, mt_bound_pure};
use crate::scalar::{lit, Real};
use crate::spatial::{general_min_spread, ClockStats};
use crate::state::{make_gaussian_phase_space, make_mus_configuration_space, CompositeState};

/// Δx(t) t_⊥ against (π/2)√(ħ|t|/m̄) ħ/(mc²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport<T> {
    pub t: T,
    /// Δx(t) from the exact evolution.
    pub dx: T,
    /// Mandelstam–Tamm time πħ/(2ΔH_c).
    pub t_perp: T,
    /// Larger of `t_perp` and the static distance-threshold bound 2ħ/F.
    pub t_perp_threshold: T,
    pub lhs: T,
    pub rhs: T,
    /// lhs / rhs.
    pub slack: T,
    /// Slack with `t_perp_threshold` in place of `t_perp`.
    pub slack_threshold: T,
}

/// Evaluates the trade-off for a symmetric prepared state evolved for `t`
/// under the exact Hamiltonian. The grid must resolve the evolution.
pub fn tradeoff_check<T: Real>(state: &CompositeState<T>, t: T) -> Result<TradeoffReport<T>> {
    if t == T::zero() {
        return Err(Error::ConfigInvalid("trade-off needs t != 0".into()));
    }
    general_min_spread(state, t)?;
    let params = state.params();
    let h = params.hbar;
    let var_hc = state.var_energy();
    let t_perp = mt_bound_pure(h, var_hc)?;
    let static_two = lit::<T>(2.0) * h / dephasing_functional(state)?.value;
    let t_perp_threshold = t_perp.max(static_two);
    let evolved = evolve(state, t, HamiltonianOrder::Exact);
    let m = compute_moments_with(&evolved, HamiltonianOrder::Exact)?;
    let dx = m.var_x.sqrt();
    let mbar = params.m + state.mean_energy() / (params.c * params.c);
    let rhs = T::FRAC_PI_2() * (h * t.abs() / mbar).sqrt() * h / params.rest_energy();
    let lhs = dx * t_perp;
    Ok(TradeoffReport {
        t,
        dx,
        t_perp,
        t_perp_threshold,
        lhs,
        rhs,
        slack: lhs / rhs,
        slack_threshold: dx * t_perp_threshold / rhs,
    })
}

/// Squared distinguishability time and position variance in units of their
/// leading values δħ/(2ΔH_c) and ħ|t|/m̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPair<T> {
    pub dt2_tilde: T,
    pub dx2_tilde: T,
}

impl<T: Real> DimensionlessPair<T> {
    pub fn sum(&self) -> T {
        self.dt2_tilde + self.dx2_tilde
    }
}

/// |(dt² + dx²)_Gaussian − (dt² + dx²)_MUS|.
pub fn rest_frame_tradeoff<T: Real>(
    gaussian: &DimensionlessPair<T>,
    mus: &DimensionlessPair<T>,
) -> T {
    (gaussian.sum() - mus.sum()).abs()
}

/// Rest-frame pairs of matched Gaussian and minimum-uncertainty qubit states
/// with levels ±ΔH_c and equal weights, both with momentum variance `var_p`.
///
/// Spatial entries are the exact family minima, m̄√⟨m̂⁻²⟩ and m̄⟨m̂⁻¹⟩.
/// Temporal entries use the refined speed limit evaluated on the states.
pub fn rest_frame_pairs<T: Real>(
    params: &PhysicalParams<T>,
    spread_h: T,
    var_p: T,
    delta: T,
) -> Result<(DimensionlessPair<T>, DimensionlessPair<T>)> {
    let clock = DiscreteClockSpec::balanced_qubit(spread_h * lit(2.0))?;
    let stats = ClockStats::new(params, &clock);
    let h = params.hbar;
    let std = var_p.sqrt();
    // The widest MUS branch has spread √(m_max/m̄) times the Gaussian one.
    let widest = std * (params.mass_of(spread_h) / stats.mbar).sqrt() * lit(1.05);
    let grid = MomentumGrid::covering(T::zero(), T::zero(), widest, 2048)?;
    let sigma = h / (lit::<T>(2.0) * std);
    let omega = lit::<T>(2.0) * var_p / (h * stats.mbar);
    let g = make_gaussian_phase_space(*params, grid, clock.clone(), sigma, T::zero(), T::zero())?;
    let m = make_mus_configuration_space(*params, grid, clock, omega, T::zero(), T::zero())?;
    let lead = delta * h / (lit::<T>(2.0) * spread_h);
    let dt2 = |s: &CompositeState<T>| -> Result<T> {
        Ok((dynamical_qsl_bound(s, delta)?.bound_time / lead).powi(2))
    };
    Ok((
        DimensionlessPair {
            dt2_tilde: dt2(&g)?,
            dx2_tilde: stats.mbar * stats.mean_inv_mass_sq.sqrt(),
        },
        DimensionlessPair {
            dt2_tilde: dt2(&m)?,
            dx2_tilde: stats.mbar * stats.mean_inv_mass,
        },
    ))
}

/// The same pairs from the second-order closed forms, whose sums agree identically.
pub fn closed_form_pairs<T: Real>(
    params: &PhysicalParams<T>,
    spread_h: T,
    var_p: T,
    delta: T,
) -> (DimensionlessPair<T>, DimensionlessPair<T>) {
    let mc2 = params.rest_energy();
    let m2c2 = params.m * mc2;
    let l2 = (spread_h / mc2).powi(2);
    let a = var_p / (lit::<T>(2.0) * m2c2);
    // Refined correction δ²Δ²_r/(96 m⁴c⁴ |ρ_01|²) with |ρ_01| = 1/2 and Δ²_r = 2Δ⁴p.
    let dyn_ = delta * delta * lit::<T>(2.0) * var_p * var_p / (lit::<T>(24.0) * m2c2 * m2c2);
    let base = T::one() + lit::<T>(2.0) * (a + dyn_);
    (
        DimensionlessPair {
            dt2_tilde: base,
            dx2_tilde: T::one() + lit::<T>(1.5) * l2,
        },
        DimensionlessPair {
            dt2_tilde: base + l2 / lit(2.0),
            dx2_tilde: T::one() + l2,
        },
    )
}

/// Kinematical trade-off Δx(t) t_δ ≥ (ħδ/2mc)(|p0 t|/mc) with each side's own floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicalReport<T> {
    pub dx: T,
    pub t_delta: T,
    pub lhs: T,
    pub rhs: T,
    /// Δ²x(t) over its kinematical floor (ΔH_c/mc²)²(p0 t/m)².
    pub spatial_excess: T,
    /// t_δ² over its entanglement floor (δħ/2mc²)²(1/2 + p0²/Δ²p).
    pub temporal_excess: T,
}

impl<T: Real> KinematicalReport<T> {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Evaluates the kinematical trade-off with the exact Δx(t) and threshold time.
pub fn kinematical_tradeoff<T: Real>(
    state: &CompositeState<T>,
    t: T,
    delta: T,
) -> Result<KinematicalReport<T>> {
    let params = state.params();
    let h = params.hbar;
    let mc = params.m * params.c;
    let m0 = compute_moments_with(state, HamiltonianOrder::Exact)?;
    let p0 = m0.mean_p;
    let evolved = evolve(state, t, HamiltonianOrder::Exact);
    let dx = compute_moments_with(&evolved, HamiltonianOrder::Exact)?
        .var_x
        .sqrt();
    let t_delta = threshold_time(state, delta, HamiltonianOrder::Exact)?;
    let rhs = h * delta / (lit::<T>(2.0) * mc) * (p0 * t).abs() / mc;
    let l2 = m0.var_hc / params.rest_energy().powi(2);
    let spatial_floor = l2 * (p0 * t / params.m).powi(2);
    let temporal_floor = (delta * h / (lit::<T>(2.0) * params.rest_energy())).powi(2)
        * (lit::<T>(0.5) + p0 * p0 / m0.var_p);
    Ok(KinematicalReport {
        dx,
        t_delta,
        lhs: dx * t_delta,
        rhs,
        spatial_excess: if spatial_floor > T::zero() {
            dx * dx / spatial_floor
        } else {
            T::infinity()
        },
        temporal_excess: t_delta * t_delta / temporal_floor,
    })
}

/// Contraction window and two-time product bound of a prepared state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractiveReport<T> {
    pub cov_xv: T,
    pub var_v: T,
    /// |Cov(x,v)|/Δ²v when Cov(x,v) < 0, else 0.
    pub window_tau_c: T,
    pub var_x0: T,
    hbar: T,
    mean_inv_mass: T,
    mbar: T,
    lambda_sq: T,
}

impl<T: Real> ContractiveReport<T> {
    /// (ħ|t|/2)⟨m̂⁻¹⟩, the floor of Δx(t)Δx(0).
    pub fn two_time_bound(&self, t: T) -> T {
        self.hbar * t.abs() / lit::<T>(2.0) * self.mean_inv_mass
    }

    /// (ħ|t|/2m̄)(1 + Δ²H_c/m²c⁴).
    pub fn two_time_bound_expanded(&self, t: T) -> T {
        self.hbar * t.abs() / (lit::<T>(2.0) * self.mbar) * (T::one() + self.lambda_sq)
    }
}

pub fn contractive_diagnostics<T: Real>(state: &CompositeState<T>) -> Result<ContractiveReport<T>> {
    let params = state.params();
    let m = compute_moments_with(state, HamiltonianOrder::Exact)?;
    let window = if m.cov_xv < T::zero() {
        -m.cov_xv / m.var_v
    } else {
        T::zero()
    };
    Ok(ContractiveReport {
        cov_xv: m.cov_xv,
        var_v: m.var_v,
        window_tau_c: window,
        var_x0: m.var_x,
        hbar: params.hbar,
        mean_inv_mass: m.mean_inv_mass,
        mbar: m.mbar,
        lambda_sq: m.var_hc / params.rest_energy().powi(2),
    })
}

/// Time in `[0, t_hi]` minimizing the exact Δ²x(t), with that variance.
pub fn min_variance_time<T: Real>(state: &CompositeState<T>, t_hi: T) -> Result<(T, T)> {
    let var = |t: T| -> T {
        compute_moments_with(
            &evolve(state, t, HamiltonianOrder::Exact),
            HamiltonianOrder::Exact,
        )
        .map(|m| m.var_x)
        .unwrap_or(T::infinity())
    };
    let (t, v) = golden_section_min(var, T::zero(), t_hi, t_hi * lit(1e-9));
    if !v.is_finite() {
        return Err(Error::DerivativeNoise(f64::INFINITY));
    }
    Ok((t, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::make_contractive;
    use approx::assert_relative_eq;

    #[test]
    fn trade_off_holds_for_mus_qubit() {
        let p = PhysicalParams::for_lambda(1.0, 0.05).unwrap();
        let t = 2.0;
        let g = MomentumGrid::for_evolution(0.0, 0.0, (0.25f64).sqrt(), t, 0.9, 1.0).unwrap();
        let s = make_mus_configuration_space(
            p,
            g,
            DiscreteClockSpec::balanced_qubit(2.0).unwrap(),
            0.5,
            0.0,
            0.0,
        )
        .unwrap();
        let r = tradeoff_check(&s, t).unwrap();
        assert!(r.slack >= 1.0 / 0.05);
        assert!(r.slack_threshold >= r.slack);
    }

    #[test]
    fn closed_form_sums_agree() {
        let p = PhysicalParams::for_lambda(1.0, 0.07).unwrap();
        let (g, m) = closed_form_pairs(&p, 1.0, 0.3, 0.2);
        assert!(rest_frame_tradeoff(&g, &m) < 1e-15);
        assert_relative_eq!(
            g.dx2_tilde - m.dx2_tilde,
            0.5 * 0.07 * 0.07,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            m.dt2_tilde - g.dt2_tilde,
            0.5 * 0.07 * 0.07,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rest_frame_residual_vanishes_with_lambda() {
        let res = |l: f64| {
            let p = PhysicalParams::for_lambda(1.0, l).unwrap();
            let (g, m) = rest_frame_pairs(&p, 1.0, 0.3, 0.2).unwrap();
            rest_frame_tradeoff(&g, &m)
        };
        let (a, b) = (res(0.02), res(0.04));
        assert!(a < 0.02f64.powi(3));
        assert!(b / a > 6.0);
    }

    #[test]
    fn contractive_window() {
        let p = PhysicalParams::natural(10.0).unwrap();
        let g = MomentumGrid::covering(0.0, 0.0, 5f64.sqrt() / 2.0, 1024).unwrap();
        let s = make_contractive(p, g, DiscreteClockSpec::single(0.0), 1.0, 1.0).unwrap();
        let r = contractive_diagnostics(&s).unwrap();
        // τ_c = 4γσ²m/(ħ(1+4γ²)).
        assert_relative_eq!(r.window_tau_c, 0.8, max_relative = 1e-8);
        let s0 =
            make_gaussian_phase_space(p, g, DiscreteClockSpec::single(0.0), 1.0, 0.0, 0.0).unwrap();
        assert_eq!(contractive_diagnostics(&s0).unwrap().window_tau_c, 0.0);
    }
}
