//! Numerical experiments shared by the scenarios and the acceptance suite.
//!
//! Units follow the config convention: ħ = m = 1, ΔH_c = 1, c = λ^{-1/2}.

use stqrf_core::dynamics::{compute_moments_with, evolve, CoherenceTrajectory};
use stqrf_core::optimize::golden_section_min;
use stqrf_core::qsl::{var_p2_gaussian, var_p2_mus};
use stqrf_core::spatial::{gaussian_family_min, mus_family_min, normalized_excess};
use stqrf_core::state::{
    make_contractive, make_gaussian_phase_space, make_ideal_clock_state,
    make_mus_configuration_space,
};
use stqrf_core::{
    Clock, ComFamily, Family, Grid, HamiltonianOrder, IdealClock, Params, QubitRecipe, Result,
    State, SystemSpec,
};

pub fn params_for(lambda: f64) -> Result<Params> {
    Params::for_lambda(1.0, lambda)
}

/// Exact position variance after free evolution for `t`.
pub fn oracle_var_x(state: &State, t: f64) -> Result<f64> {
    Ok(compute_moments_with(
        &evolve(state, t, HamiltonianOrder::Exact),
        HamiltonianOrder::Exact,
    )?
    .var_x)
}

pub fn qubit_state(
    family: Family,
    lambda: f64,
    theta: f64,
    kappa: f64,
    drift: f64,
    t_max: f64,
) -> Result<State> {
    Ok(QubitRecipe {
        family,
        lambda,
        theta,
        kappa,
        drift,
        t_max,
    }
    .build::<f64>()?
    .state)
}

/// Contractive qubit state with momentum spread κ m c and correlation γ.
pub fn contractive_state(
    lambda: f64,
    theta: f64,
    kappa: f64,
    gamma: f64,
    t_max: f64,
) -> Result<State> {
    let params = params_for(lambda)?;
    let gap = 2.0 / (2.0 * theta).sin();
    let clock = Clock::qubit(gap, theta)?;
    let dp = kappa * params.m * params.c;
    let sigma = params.hbar * (1.0 + 4.0 * gamma * gamma).sqrt() / (2.0 * dp);
    // The initial chirp carries the phase of a packet already evolved for τ_c.
    let tau_c =
        4.0 * gamma * sigma * sigma * params.m / (params.hbar * (1.0 + 4.0 * gamma * gamma));
    let grid = Grid::for_evolution(
        0.0,
        0.0,
        dp,
        t_max + tau_c,
        params.mass_of(-gap / 2.0),
        params.hbar,
    )?;
    make_contractive(params, grid, clock, sigma, gamma)
}

/// Minimum over the family width of the exact variance at time `t`, for an
/// equal-weight qubit at rest, reported as the normalized excess
/// min · m/(ħ|t|) − m/m̄ from the oracle and from the closed form.
pub fn family_excess(family: Family, lambda: f64, t: f64) -> Result<(f64, f64)> {
    let params = params_for(lambda)?;
    let clock = Clock::balanced_qubit(2.0)?;
    let (m_min, m_max) = (params.mass_of(-1.0), params.mass_of(1.0));
    let build = |w: f64| -> Result<State> {
        match family {
            Family::Gaussian => {
                let std = params.hbar / (2.0 * w);
                let grid = Grid::for_evolution(0.0, 0.0, std, t, m_min, params.hbar)?;
                make_gaussian_phase_space(params, grid, clock.clone(), w, 0.0, 0.0)
            }
            Family::Mus => {
                let std = (m_max * params.hbar * w / 2.0).sqrt() * 1.05;
                let grid = Grid::for_evolution(0.0, 0.0, std, t, m_min, params.hbar)?;
                make_mus_configuration_space(params, grid, clock.clone(), w, 0.0, 0.0)
            }
        }
    };
    let guess = match family {
        Family::Gaussian => (params.hbar * t / (2.0 * params.m)).sqrt(),
        Family::Mus => 1.0 / t,
    };
    let var = |u: f64| {
        build(guess * u.exp())
            .and_then(|s| oracle_var_x(&s, t))
            .unwrap_or(f64::INFINITY)
    };
    let (_, oracle_min) = golden_section_min(var, -0.7, 0.7, 1e-7);
    if !oracle_min.is_finite() {
        build(guess)?;
        return Err(stqrf_core::Error::DerivativeNoise(f64::INFINITY));
    }
    let closed = match family {
        Family::Gaussian => gaussian_family_min(&params, &clock, 0.0, t),
        Family::Mus => mus_family_min(&params, &clock, t),
    };
    Ok((
        normalized_excess(&params, &clock, oracle_min, t),
        normalized_excess(&params, &clock, closed, t),
    ))
}

/// Short-time coherence decay of an equal-weight qubit: the t² coefficient
/// fitted to the exact |ρ_01(t)|/|ρ_01(0)| together with the prediction
/// ½ (Δε/(2ħm·mc²))² Δ²_r(p²) from the family's closed-form Δ²_r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub fitted: f64,
    pub predicted: f64,
    /// Decay 1 − |ρ_01(t)|/|ρ_01(0)| at the last fitted time.
    pub max_decay: f64,
}

pub fn decay_fit(family: Family, lambda: f64, kappa: f64, drift: f64) -> Result<DecayFit> {
    let params = params_for(lambda)?;
    let state = qubit_state(
        family,
        lambda,
        std::f64::consts::FRAC_PI_4,
        kappa,
        drift,
        1.0,
    )?;
    let dp = kappa * params.m * params.c;
    let p0 = dp * drift;
    let var_r = match family {
        Family::Gaussian => var_p2_gaussian(dp * dp, p0),
        Family::Mus => var_p2_mus(
            &params,
            2.0 * dp * dp / (params.hbar * params.m),
            p0 / params.m,
        ),
    };
    let gap = 2.0;
    let predicted =
        (gap / (2.0 * params.hbar * params.m * params.rest_energy())).powi(2) * var_r / 2.0;

    let traj = CoherenceTrajectory::new(&state, HamiltonianOrder::Exact)?;
    let r0 = traj.coherence(0, 0.0).norm();
    let t_end = (0.01 / predicted).sqrt();
    // Least squares of 1 − r(t) on (t², −t⁴).
    let (mut s22, mut s24, mut s44, mut y2, mut y4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut max_decay = 0.0;
    for j in 1..=10 {
        let t = t_end * j as f64 / 10.0;
        let y = 1.0 - traj.coherence(0, t).norm() / r0;
        let (a, b) = (t * t, -(t.powi(4)));
        s22 += a * a;
        s24 += a * b;
        s44 += b * b;
        y2 += a * y;
        y4 += b * y;
        max_decay = y;
    }
    let fitted = (y2 * s44 - y4 * s24) / (s22 * s44 - s24 * s24);
    Ok(DecayFit {
        fitted,
        predicted,
        max_decay,
    })
}

/// Ideal-clock Gaussian frame at rest with σ_H = ΔH_c = 1 and momentum spread κ m c.
pub fn ideal_frame(lambda: f64, kappa: f64, n_p: usize, n_e: usize) -> Result<State> {
    let params = params_for(lambda)?;
    let dp = kappa * params.m * params.c;
    let grid = Grid::covering(0.0, 0.0, dp, n_p)?;
    let clock = IdealClock::centered(0.0, 1.0, 10.0, n_e)?;
    let sigma = params.hbar / (2.0 * dp);
    make_ideal_clock_state(
        params,
        grid,
        clock,
        ComFamily::Gaussian {
            sigma,
            p0: 0.0,
            x0: 0.0,
        },
    )
}

/// Gaussian system of mass `m_s` at rest with momentum spread `dp`, centred on `x0`.
pub fn system(m_s: f64, dp: f64, x0: f64, n: usize) -> Result<SystemSpec<f64>> {
    let grid = Grid::covering(0.0, 0.0, dp, n)?;
    SystemSpec::gaussian(m_s, grid, 1.0, 1.0 / (2.0 * dp), 0.0, x0)
}
