//! Seeded random states for Monte-Carlo checks.
//!
//! Every sample is drawn from its own ChaCha8 stream (seed, index), so a sample
//! can be regenerated from those two numbers alone. Units are ħ = m = 1 with
//! the clock's energy spread set to 1; λ is tuned through c.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::{DiscreteClockSpec, IdealClockSpec};
use crate::error::Result;
use crate::grid::MomentumGrid;
use crate::params::PhysicalParams;
use crate::scalar::{lit, Real};
use crate::state::{
    make_gaussian_phase_space, make_ideal_clock_state, make_mus_configuration_space, ComFamily,
    CompositeState,
};

pub const LAMBDA_RANGE: (f64, f64) = (0.01, 0.1);
/// λ range for ideal clocks, whose energy grid spans ±10 σ_H.
pub const IDEAL_LAMBDA_RANGE: (f64, f64) = (0.01, 0.05);
/// Mixing angle range [margin, π/2 − margin].
pub const THETA_MARGIN: f64 = 0.2;
/// Momentum spread in units of m c.
pub const SPREAD_RANGE: (f64, f64) = (0.002, 0.03);
/// Largest |p0| in units of the momentum spread.
pub const DRIFT_MAX: f64 = 2.0;
/// Elapsed clock time in units of ħ/(m c²).
pub const ELAPSED_RANGE: (f64, f64) = (10.0, 1000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    Mus,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Mus => "mus",
        }
    }
}

/// Deterministic description of a qubit-clock state: ΔH_c = 1, levels at
/// ±1/sin 2θ, momentum spread κ m c and mean momentum drift · κ m c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitRecipe {
    pub family: Family,
    pub lambda: f64,
    pub theta: f64,
    pub kappa: f64,
    pub drift: f64,
    /// Latest time the momentum grid must resolve.
    pub t_max: f64,
}

/// A state built from a [`QubitRecipe`].
#[derive(Debug, Clone)]
pub struct BuiltQubit<T> {
    pub gap: T,
    pub dp: T,
    pub p0: T,
    pub state: CompositeState<T>,
}

impl QubitRecipe {
    pub fn build<T: Real>(&self) -> Result<BuiltQubit<T>> {
        let params = PhysicalParams::<T>::for_lambda(T::one(), lit(self.lambda))?;
        let gap = lit::<T>(2.0 / (2.0 * self.theta).sin());
        let clock = DiscreteClockSpec::qubit(gap, lit(self.theta))?;
        let dp = lit::<T>(self.kappa) * params.m * params.c;
        let p0 = dp * lit(self.drift);
        let m_min = params.mass_of(-gap / lit(2.0));
        let m_max = params.mass_of(gap / lit(2.0));
        // MUS branches are centred on m_i v0 with spread ∝ √m_i.
        let (lo, hi, std) = match self.family {
            Family::Gaussian => (p0, p0, dp),
            Family::Mus => (
                (p0 * m_min / params.m).min(p0 * m_max / params.m),
                (p0 * m_min / params.m).max(p0 * m_max / params.m),
                dp * (m_max / params.m).sqrt() * lit(1.05),
            ),
        };
        let grid = MomentumGrid::for_evolution(lo, hi, std, lit(self.t_max), m_min, params.hbar)?;
        let hbar = params.hbar;
        let state = match self.family {
            Family::Gaussian => make_gaussian_phase_space(
                params,
                grid,
                clock,
                hbar / (lit::<T>(2.0) * dp),
                p0,
                T::zero(),
            )?,
            Family::Mus => {
                let mbar = params.m + clock.mean_energy() / (params.c * params.c);
                let omega = lit::<T>(2.0) * dp * dp / (hbar * params.m);
                make_mus_configuration_space(params, grid, clock, omega, p0 / mbar, T::zero())?
            }
        };
        Ok(BuiltQubit { gap, dp, p0, state })
    }
}

/// A qubit-clock state with the parameters it was drawn from.
#[derive(Debug, Clone)]
pub struct QubitSample<T> {
    pub index: u64,
    pub family: Family,
    pub lambda: T,
    pub theta: T,
    /// Level splitting; the levels sit at ±gap/2.
    pub gap: T,
    pub var_p: T,
    pub p0: T,
    /// Evaluation time drawn for time-dependent checks.
    pub t: T,
    pub state: CompositeState<T>,
}

/// An ideal-clock frame with a readout time.
#[derive(Debug, Clone)]
pub struct IdealSample<T> {
    pub index: u64,
    pub lambda: T,
    pub var_p: T,
    pub tau0: T,
    pub state: CompositeState<T>,
}

/// Deterministic state generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSampler {
    pub seed: u64,
    /// Restricts draws to one family; `None` alternates at random.
    pub family: Option<Family>,
    /// Draw a non-zero mean momentum.
    pub moving: bool,
    /// Range of the evaluation time, in units of ħ/ΔH_c.
    pub t_range: (f64, f64),
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            family: None,
            moving: false,
            t_range: (0.2, 5.0),
        }
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    pub fn moving(mut self, moving: bool) -> Self {
        self.moving = moving;
        self
    }

    pub fn with_times(mut self, lo: f64, hi: f64) -> Self {
        self.t_range = (lo, hi);
        self
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn sample<T: Real>(&self, index: u64) -> Result<QubitSample<T>> {
        let mut rng = self.rng(index);
        let family = self.family.unwrap_or_else(|| {
            if rng.random_bool(0.5) {
                Family::Gaussian
            } else {
                Family::Mus
            }
        });
        let lambda = log_uniform(&mut rng, LAMBDA_RANGE);
        let theta = rng.random_range(THETA_MARGIN..=std::f64::consts::FRAC_PI_2 - THETA_MARGIN);
        let kappa = log_uniform(&mut rng, SPREAD_RANGE);
        let drift = if self.moving {
            rng.random_range(-DRIFT_MAX..=DRIFT_MAX)
        } else {
            0.0
        };
        let t = log_uniform(&mut rng, self.t_range);

        let recipe = QubitRecipe {
            family,
            lambda,
            theta,
            kappa,
            drift,
            t_max: self.t_range.1,
        };
        let built = recipe.build::<T>()?;
        Ok(QubitSample {
            index,
            family,
            lambda: lit(lambda),
            theta: lit(theta),
            gap: built.gap,
            var_p: built.dp * built.dp,
            p0: built.p0,
            t: lit(t),
            state: built.state,
        })
    }

    /// Ideal-clock Gaussian frame at rest with σ_H = 1 and a readout time τ₀.
    pub fn ideal_sample<T: Real>(&self, index: u64) -> Result<IdealSample<T>> {
        let mut rng = self.rng(index);
        let lambda = log_uniform(&mut rng, IDEAL_LAMBDA_RANGE);
        let kappa = log_uniform(&mut rng, SPREAD_RANGE);
        let elapsed = log_uniform(&mut rng, ELAPSED_RANGE);
        let params = PhysicalParams::<T>::for_lambda(T::one(), lit(lambda))?;
        let dp = lit::<T>(kappa) * params.m * params.c;
        let grid = MomentumGrid::covering(T::zero(), T::zero(), dp, 512)?;
        let clock = IdealClockSpec::centered(T::zero(), T::one(), lit(10.0), 128)?;
        let sigma = params.hbar / (lit::<T>(2.0) * dp);
        let state = make_ideal_clock_state(
            params,
            grid,
            clock,
            ComFamily::Gaussian {
                sigma,
                p0: T::zero(),
                x0: T::zero(),
            },
        )?;
        Ok(IdealSample {
            index,
            lambda: lit(lambda),
            var_p: dp * dp,
            tau0: lit::<T>(elapsed) * params.hbar / params.rest_energy(),
            state,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::compute_moments;

    #[test]
    fn samples_are_reproducible() {
        let s = StateSampler::new(11).moving(true);
        let a = s.sample::<f64>(3).unwrap();
        let b = s.sample::<f64>(3).unwrap();
        assert_eq!(a.state.amplitudes(), b.state.amplitudes());
        let c = s.sample::<f64>(4).unwrap();
        assert_ne!(a.lambda, c.lambda);
    }

    #[test]
    fn clock_spread_is_unity_and_lambda_in_range() {
        let s = StateSampler::new(5);
        for i in 0..8 {
            let q = s.sample::<f64>(i).unwrap();
            let m = compute_moments(&q.state).unwrap();
            assert!((m.var_hc - 1.0).abs() < 1e-10, "{}", m.var_hc);
            assert!(q.lambda >= LAMBDA_RANGE.0 && q.lambda <= LAMBDA_RANGE.1);
            assert!((m.lambda - q.lambda).abs() < 1e-10);
        }
    }

    #[test]
    fn ideal_samples_build() {
        let s = StateSampler::new(2);
        let q = s.ideal_sample::<f64>(0).unwrap();
        assert!(q.tau0 > 0.0);
        assert!(q.state.norm_loss().abs() < 1e-8);
    }
}
