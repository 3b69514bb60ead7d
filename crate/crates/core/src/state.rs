//! Composite clock ⊗ centre-of-mass states and their constructors.

use num_complex::Complex;

use crate::clock::{ClockSpec, DiscreteClockSpec, IdealClockSpec};
use crate::dynamics::{evolve, HamiltonianOrder};
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::params::PhysicalParams;
use crate::scalar::{lit, to_f64, tolerance, Real};

/// Largest admitted edge-to-peak amplitude ratio on the momentum grid.
pub const EDGE_RATIO_MAX: f64 = 1e-10;
/// Largest admitted normalization defect for discrete-clock states.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Centre-of-mass profile attached to an ideal clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComFamily<T> {
    /// Energy-independent phase-space Gaussian.
    Gaussian { sigma: T, p0: T, x0: T },
    /// Minimum-uncertainty state whose width follows the energy-dependent mass.
    Mus { omega: T, v0: T, x0: T },
}

/// Family tag and parameters sufficient to rebuild a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preparation<T> {
    PhaseSpaceGaussian { sigma: T, p0: T, x0: T },
    Mus { omega: T, v0: T, x0: T },
    Contractive { sigma: T, gamma: T },
    IdealClock(ComFamily<T>),
}

impl<T: Real> Preparation<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Preparation::PhaseSpaceGaussian { .. } => "gaussian",
            Preparation::Mus { .. } => "mus",
            Preparation::Contractive { .. } => "contractive",
            Preparation::IdealClock(ComFamily::Gaussian { .. }) => "ideal-gaussian",
            Preparation::IdealClock(ComFamily::Mus { .. }) => "ideal-mus",
        }
    }
}

/// Accumulated free evolution applied since preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution<T> {
    pub t: T,
    pub order: HamiltonianOrder,
}

/// Joint clock ⊗ centre-of-mass amplitude Ψ(p, level).
///
/// Amplitudes are stored row-major with one row per clock level (or energy
/// grid point) and one column per momentum grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState<T> {
    pub(crate) params: PhysicalParams<T>,
    pub(crate) grid: MomentumGrid<T>,
    pub(crate) clock: ClockSpec<T>,
    pub(crate) amplitudes: Vec<Complex<T>>,
    pub(crate) preparation: Preparation<T>,
    pub(crate) evolution: Evolution<T>,
    pub(crate) norm_loss: T,
}

impl<T: Real> CompositeState<T> {
    pub fn params(&self) -> &PhysicalParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &MomentumGrid<T> {
        &self.grid
    }

    pub fn clock(&self) -> &ClockSpec<T> {
        &self.clock
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn preparation(&self) -> &Preparation<T> {
        &self.preparation
    }

    pub fn evolution(&self) -> &Evolution<T> {
        &self.evolution
    }

    /// Norm removed by renormalization after truncation to the grids.
    pub fn norm_loss(&self) -> T {
        self.norm_loss
    }

    pub fn n_p(&self) -> usize {
        self.grid.n_points
    }

    pub fn n_rows(&self) -> usize {
        self.clock.n_levels()
    }

    pub fn row(&self, l: usize) -> &[Complex<T>] {
        let n = self.n_p();
        &self.amplitudes[l * n..(l + 1) * n]
    }

    /// Quadrature weight of one array element.
    pub fn cell_weight(&self) -> T {
        self.grid.spacing() * self.clock.row_weight()
    }

    /// Probability of each clock row.
    pub fn row_probabilities(&self) -> Vec<T> {
        let w = self.cell_weight();
        (0..self.n_rows())
            .map(|l| self.row(l).iter().map(|a| a.norm_sqr()).sum::<T>() * w)
            .collect()
    }

    pub fn norm(&self) -> T {
        self.row_probabilities().into_iter().sum()
    }

    pub fn mean_energy(&self) -> T {
        self.row_probabilities()
            .into_iter()
            .zip(self.clock.energies())
            .map(|(w, e)| w * e)
            .sum()
    }

    pub fn var_energy(&self) -> T {
        let mean = self.mean_energy();
        self.row_probabilities()
            .into_iter()
            .zip(self.clock.energies())
            .map(|(w, e)| w * (e - mean).powi(2))
            .sum()
    }

    /// Regime parameter ΔH_c / (m c²).
    pub fn lambda(&self) -> T {
        self.params.lambda_of(self.var_energy().sqrt())
    }

    /// Rebuilds the state from its preparation and evolution records alone.
    pub fn rebuild(&self) -> Result<Self> {
        let fresh = match (&self.preparation, &self.clock) {
            (Preparation::PhaseSpaceGaussian { sigma, p0, x0 }, ClockSpec::Discrete(c)) => {
                make_gaussian_phase_space(self.params, self.grid, c.clone(), *sigma, *p0, *x0)
            }
            (Preparation::Mus { omega, v0, x0 }, ClockSpec::Discrete(c)) => {
                make_mus_configuration_space(self.params, self.grid, c.clone(), *omega, *v0, *x0)
            }
            (Preparation::Contractive { sigma, gamma }, ClockSpec::Discrete(c)) => {
                make_contractive(self.params, self.grid, c.clone(), *sigma, *gamma)
            }
            (Preparation::IdealClock(com), ClockSpec::Ideal(c)) => {
                make_ideal_clock_state(self.params, self.grid, *c, *com)
            }
            _ => Err(Error::ConfigInvalid(
                "preparation does not match clock kind".into(),
            )),
        }?;
        if self.evolution.t == T::zero() {
            Ok(fresh)
        } else {
            Ok(evolve(&fresh, self.evolution.t, self.evolution.order))
        }
    }
}

fn gaussian_amplitude<T: Real>(hbar: T, sigma: T, p0: T, x0: T, p: T) -> Complex<T> {
    let norm = (lit::<T>(2.0) * sigma * sigma / (T::PI() * hbar * hbar)).powf(lit(0.25));
    let d = p - p0;
    Complex::new(-(d * d) * sigma * sigma / (hbar * hbar), -d * x0 / hbar).exp() * norm
}

fn mus_amplitude<T: Real>(hbar: T, mass: T, omega: T, v0: T, x0: T, p: T) -> Complex<T> {
    let norm = (T::PI() * hbar * mass * omega).powf(lit(-0.25));
    let d = p - mass * v0;
    Complex::new(
        -(d * d) / (lit::<T>(2.0) * mass * hbar * omega),
        -d * x0 / hbar,
    )
    .exp()
        * norm
}

fn check_discrete_regime<T: Real>(
    params: &PhysicalParams<T>,
    clock: &DiscreteClockSpec<T>,
) -> Result<()> {
    let rest = params.rest_energy();
    if let Some(l) = clock.levels().iter().find(|l| l.epsilon.abs() >= rest) {
        return Err(Error::RegimeViolation(format!(
            "level energy {} is not below m c^2 = {}",
            to_f64(l.epsilon),
            to_f64(rest)
        )));
    }
    params.check_lambda(params.lambda_of(clock.var_energy().sqrt()))
}

fn check_ideal_regime<T: Real>(
    params: &PhysicalParams<T>,
    clock: &IdealClockSpec<T>,
) -> Result<()> {
    let rest = params.rest_energy();
    if clock.epsilon0.abs() + clock.sigma_h * lit(4.0) >= rest {
        return Err(Error::RegimeViolation(
            "|epsilon0| + 4 sigma_H must stay below m c^2".into(),
        ));
    }
    if params.mass_of(clock.eps_min) <= T::zero() {
        return Err(Error::RegimeViolation(format!(
            "energy grid reaches non-positive mass at epsilon = {}",
            to_f64(clock.eps_min)
        )));
    }
    params.check_lambda(params.lambda_of(clock.sigma_h))
}

/// Fills the amplitude array, checks the box and renormalizes.
fn assemble<T: Real>(
    params: PhysicalParams<T>,
    grid: MomentumGrid<T>,
    clock: ClockSpec<T>,
    preparation: Preparation<T>,
    amp: impl Fn(T, usize) -> Complex<T>,
) -> Result<CompositeState<T>> {
    let n = grid.n_points;
    let rows = clock.n_levels();
    let ps = grid.points();
    let mut amplitudes = Vec::with_capacity(n * rows);
    for l in 0..rows {
        amplitudes.extend(ps.iter().map(|&p| amp(p, l)));
    }
    let peak = amplitudes.iter().map(|a| a.norm()).fold(T::zero(), T::max);
    let edge = (0..rows)
        .map(|l| {
            amplitudes[l * n]
                .norm()
                .max(amplitudes[l * n + n - 1].norm())
        })
        .fold(T::zero(), T::max);
    let ratio = edge / peak;
    if !(ratio < lit(EDGE_RATIO_MAX)) {
        return Err(Error::GridOverflow {
            ratio: to_f64(ratio),
        });
    }
    let weight = grid.spacing() * clock.row_weight();
    let raw: T = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>() * weight;
    let norm_loss = T::one() - raw;
    if matches!(clock, ClockSpec::Discrete(_)) && norm_loss.abs() > tolerance::<T>(NORM_TOLERANCE) {
        return Err(Error::ConfigInvalid(format!(
            "momentum grid too coarse for the state (norm = {})",
            to_f64(raw)
        )));
    }
    let scale = raw.sqrt().recip();
    for a in amplitudes.iter_mut() {
        *a = *a * scale;
    }
    Ok(CompositeState {
        params,
        grid,
        clock,
        amplitudes,
        preparation,
        evolution: Evolution {
            t: T::zero(),
            order: HamiltonianOrder::Exact,
        },
        norm_loss,
    })
}

/// Separable state: phase-space Gaussian of width `sigma` times the clock amplitudes.
pub fn make_gaussian_phase_space<T: Real>(
    params: PhysicalParams<T>,
    grid: MomentumGrid<T>,
    clock: DiscreteClockSpec<T>,
    sigma: T,
    p0: T,
    x0: T,
) -> Result<CompositeState<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::ConfigInvalid("sigma must be positive".into()));
    }
    check_discrete_regime(&params, &clock)?;
    let phis: Vec<_> = clock.levels().iter().map(|l| l.phi).collect();
    let hbar = params.hbar;
    assemble(
        params,
        grid,
        ClockSpec::Discrete(clock),
        Preparation::PhaseSpaceGaussian { sigma, p0, x0 },
        |p, l| phis[l] * gaussian_amplitude(hbar, sigma, p0, x0, p),
    )
}

/// Entangled minimum-uncertainty state: branch i is a Gaussian of mean m_i v0
/// and variance m_i ħ Ω / 2.
pub fn make_mus_configuration_space<T: Real>(
    params: PhysicalParams<T>,
    grid: MomentumGrid<T>,
    clock: DiscreteClockSpec<T>,
    omega: T,
    v0: T,
    x0: T,
) -> Result<CompositeState<T>> {
    if !(omega > T::zero()) {
        return Err(Error::ConfigInvalid("Omega must be positive".into()));
    }
    check_discrete_regime(&params, &clock)?;
    let branches: Vec<_> = clock
        .levels()
        .iter()
        .map(|l| (l.phi, params.mass_of(l.epsilon)))
        .collect();
    let hbar = params.hbar;
    assemble(
        params,
        grid,
        ClockSpec::Discrete(clock),
        Preparation::Mus { omega, v0, x0 },
        |p, l| branches[l].0 * mus_amplitude(hbar, branches[l].1, omega, v0, x0, p),
    )
}

/// Phase-space-correlated Gaussian with Cov(x,p) = −ħγ; γ > 0 contracts first.
pub fn make_contractive<T: Real>(
    params: PhysicalParams<T>,
    grid: MomentumGrid<T>,
    clock: DiscreteClockSpec<T>,
    sigma: T,
    gamma: T,
) -> Result<CompositeState<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::ConfigInvalid("sigma must be positive".into()));
    }
    check_discrete_regime(&params, &clock)?;
    let phis: Vec<_> = clock.levels().iter().map(|l| l.phi).collect();
    let hbar = params.hbar;
    let g = T::one() + lit::<T>(4.0) * gamma * gamma;
    let norm = (lit::<T>(2.0) * sigma * sigma / (T::PI() * hbar * hbar * g)).powf(lit(0.25));
    let b = Complex::new(T::one(), -lit::<T>(2.0) * gamma) * (sigma * sigma / (hbar * hbar * g));
    assemble(
        params,
        grid,
        ClockSpec::Discrete(clock),
        Preparation::Contractive { sigma, gamma },
        |p, l| phis[l] * (-(b * p * p)).exp() * norm,
    )
}

/// Ideal clock state Ψ(p, ε) = ψ(p; ε) φ(ε) with a Gaussian energy profile.
pub fn make_ideal_clock_state<T: Real>(
    params: PhysicalParams<T>,
    grid: MomentumGrid<T>,
    clock: IdealClockSpec<T>,
    com: ComFamily<T>,
) -> Result<CompositeState<T>> {
    check_ideal_regime(&params, &clock)?;
    let hbar = params.hbar;
    let rows: Vec<(T, T)> = (0..clock.n_eps)
        .map(|l| {
            let e = clock.point(l);
            (clock.amplitude(e), params.mass_of(e))
        })
        .collect();
    let amp = move |p: T, l: usize| -> Complex<T> {
        let (phi, mass) = rows[l];
        let psi = match com {
            ComFamily::Gaussian { sigma, p0, x0 } => gaussian_amplitude(hbar, sigma, p0, x0, p),
            ComFamily::Mus { omega, v0, x0 } => mus_amplitude(hbar, mass, omega, v0, x0, p),
        };
        psi * phi
    };
    match com {
        ComFamily::Gaussian { sigma, .. } if !(sigma > T::zero()) => {
            return Err(Error::ConfigInvalid("sigma must be positive".into()))
        }
        ComFamily::Mus { omega, .. } if !(omega > T::zero()) => {
            return Err(Error::ConfigInvalid("Omega must be positive".into()))
        }
        _ => {}
    }
    assemble(
        params,
        grid,
        ClockSpec::Ideal(clock),
        Preparation::IdealClock(com),
        amp,
    )
}

/// Free particle used as the system whose position is read relationally.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T> {
    pub m_s: T,
    pub grid: MomentumGrid<T>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> SystemSpec<T> {
    pub fn new(m_s: T, grid: MomentumGrid<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if !(m_s > T::zero()) {
            return Err(Error::ConfigInvalid("system mass must be positive".into()));
        }
        if amplitudes.len() != grid.n_points {
            return Err(Error::ConfigInvalid(
                "system amplitudes do not match grid".into(),
            ));
        }
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>() * grid.spacing();
        if (norm - T::one()).abs() > tolerance::<T>(NORM_TOLERANCE) {
            return Err(Error::ConfigInvalid(format!(
                "system state not normalized (norm = {})",
                to_f64(norm)
            )));
        }
        Ok(Self {
            m_s,
            grid,
            amplitudes,
        })
    }

    /// Phase-space Gaussian system state.
    pub fn gaussian(
        m_s: T,
        grid: MomentumGrid<T>,
        hbar: T,
        sigma: T,
        p0: T,
        x0: T,
    ) -> Result<Self> {
        let amps: Vec<_> = grid
            .points()
            .into_iter()
            .map(|p| gaussian_amplitude(hbar, sigma, p0, x0, p))
            .collect();
        let peak = amps.iter().map(|a| a.norm()).fold(T::zero(), T::max);
        let edge = amps[0].norm().max(amps[amps.len() - 1].norm());
        if !(edge / peak < lit(EDGE_RATIO_MAX)) {
            return Err(Error::GridOverflow {
                ratio: to_f64(edge / peak),
            });
        }
        Self::new(m_s, grid, amps)
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::compute_moments;
    use approx::assert_relative_eq;

    fn params() -> PhysicalParams<f64> {
        PhysicalParams::natural(10.0).unwrap()
    }

    fn grid(center: f64, std: f64) -> MomentumGrid<f64> {
        MomentumGrid::covering(center, center, std, 1024).unwrap()
    }

    #[test]
    fn gaussian_unit_width() {
        let s = make_gaussian_phase_space(
            params(),
            grid(0.0, 0.5),
            DiscreteClockSpec::single(0.0),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let m = compute_moments(&s).unwrap();
        assert_relative_eq!(m.var_x, 1.0, max_relative = 1e-10);
        assert_relative_eq!(m.var_p, 0.25, max_relative = 1e-10);
    }

    #[test]
    fn gaussian_moments_round_trip() {
        let s = make_gaussian_phase_space(
            params(),
            grid(2.0, 1.0 / 1.4),
            DiscreteClockSpec::single(0.0),
            0.7,
            2.0,
            0.3,
        )
        .unwrap();
        let m = compute_moments(&s).unwrap();
        assert_relative_eq!(m.var_x, 0.49, max_relative = 1e-8);
        assert_relative_eq!(m.mean_p, 2.0, max_relative = 1e-8);
        assert_relative_eq!(m.mean_x, 0.3, max_relative = 1e-8);
    }

    #[test]
    fn overflow_is_reported() {
        let g = MomentumGrid::new(-1.0, 1.0, 256).unwrap();
        let r =
            make_gaussian_phase_space(params(), g, DiscreteClockSpec::single(0.0), 0.5, 0.0, 0.0);
        assert!(matches!(r, Err(Error::GridOverflow { .. })));
    }

    #[test]
    fn regime_is_enforced() {
        let p = PhysicalParams::natural(1.0).unwrap();
        let clock = DiscreteClockSpec::balanced_qubit(0.6).unwrap();
        let r = make_gaussian_phase_space(p, grid(0.0, 0.5), clock, 1.0, 0.0, 0.0);
        assert!(matches!(r, Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn mus_with_degenerate_levels_is_gaussian() {
        let p = params();
        let omega: f64 = 0.8;
        // A single-level MUS is the Gaussian with σ² = ħ/(2mΩ).
        let sigma = (1.0 / (2.0 * omega)).sqrt();
        let g = grid(0.0, (omega / 2.0).sqrt());
        let a = make_mus_configuration_space(p, g, DiscreteClockSpec::single(0.0), omega, 0.0, 0.4)
            .unwrap();
        let b = make_gaussian_phase_space(p, g, DiscreteClockSpec::single(0.0), sigma, 0.0, 0.4)
            .unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn mus_initial_spreads() {
        let p = params();
        let omega = 1.3;
        let s = make_mus_configuration_space(
            p,
            grid(0.0, 1.0),
            DiscreteClockSpec::single(0.0),
            omega,
            0.0,
            0.0,
        )
        .unwrap();
        let m = compute_moments(&s).unwrap();
        assert_relative_eq!(m.var_x, 1.0 / (2.0 * omega), max_relative = 1e-9);
        assert_relative_eq!(m.var_v, omega / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn contractive_moments() {
        let s = make_contractive(
            params(),
            grid(0.0, 5f64.sqrt() / 2.0),
            DiscreteClockSpec::single(0.0),
            1.0,
            1.0,
        )
        .unwrap();
        let m = compute_moments(&s).unwrap();
        assert_relative_eq!(m.var_p, 1.25, max_relative = 1e-9);
        assert_relative_eq!(m.var_x, 1.0, max_relative = 1e-9);
        assert_relative_eq!(m.cov_xp, -1.0, max_relative = 1e-9);
    }

    #[test]
    fn contractive_without_chirp_is_gaussian() {
        let g = grid(0.0, 0.5);
        let clock = DiscreteClockSpec::balanced_qubit(1.0).unwrap();
        let a = make_contractive(params(), g, clock.clone(), 1.0, 0.0).unwrap();
        let b = make_gaussian_phase_space(params(), g, clock, 1.0, 0.0, 0.0).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn ideal_clock_spreads() {
        let p = params();
        let sh = 0.05 * p.rest_energy();
        let clock = IdealClockSpec::centered(0.0, sh, 7.0, 128).unwrap();
        let g = MomentumGrid::covering(0.0, 0.0, 0.6, 512).unwrap();
        let s = make_ideal_clock_state(
            p,
            g,
            clock,
            ComFamily::Mus {
                omega: 0.5,
                v0: 0.0,
                x0: 0.0,
            },
        )
        .unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);
        let m = compute_moments(&s).unwrap();
        assert_relative_eq!(m.var_hc.sqrt(), sh, max_relative = 1e-6);
        let gs = make_ideal_clock_state(
            p,
            g,
            clock,
            ComFamily::Gaussian {
                sigma: 1.0,
                p0: 0.0,
                x0: 0.0,
            },
        )
        .unwrap();
        let mg = compute_moments(&gs).unwrap();
        assert_relative_eq!(
            mg.var_tau.unwrap().sqrt(),
            1.0 / (2.0 * sh),
            max_relative = 1e-6
        );
    }

    #[test]
    fn rebuild_is_bit_exact() {
        let clock = DiscreteClockSpec::qubit(2.0, 0.6).unwrap();
        let s =
            make_mus_configuration_space(params(), grid(0.0, 0.8), clock, 1.1, 0.2, -0.3).unwrap();
        let e = evolve(&s, 1.7, HamiltonianOrder::FirstOrder);
        assert_eq!(e.rebuild().unwrap(), e);
    }
}
