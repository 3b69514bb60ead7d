use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, to_f64, tolerance, Real};

/// One internal energy level with its amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<T> {
    pub epsilon: T,
    pub phi: Complex<T>,
}

/// Clock with finitely many internal levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteClockSpec<T> {
    levels: Vec<Level<T>>,
}

impl<T: Real> DiscreteClockSpec<T> {
    pub fn new(levels: Vec<Level<T>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::ConfigInvalid(
                "clock needs at least one level".into(),
            ));
        }
        if levels.windows(2).any(|w| !(w[1].epsilon > w[0].epsilon)) {
            return Err(Error::ConfigInvalid(
                "level energies must be strictly increasing".into(),
            ));
        }
        let norm: T = levels.iter().map(|l| l.phi.norm_sqr()).sum();
        if (norm - T::one()).abs() > tolerance::<T>(1e-12) {
            return Err(Error::ConfigInvalid(format!(
                "clock amplitudes not normalized (sum |phi|^2 = {})",
                to_f64(norm)
            )));
        }
        Ok(Self { levels })
    }

    /// Builds a clock from energies and real amplitudes, normalizing the amplitudes.
    pub fn from_parts(energies: &[T], amplitudes: &[T]) -> Result<Self> {
        if energies.len() != amplitudes.len() {
            return Err(Error::ConfigInvalid(
                "energies and amplitudes differ in length".into(),
            ));
        }
        let norm = amplitudes.iter().map(|a| *a * *a).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::ConfigInvalid("clock amplitudes vanish".into()));
        }
        Self::new(
            energies
                .iter()
                .zip(amplitudes)
                .map(|(&epsilon, &a)| Level {
                    epsilon,
                    phi: Complex::new(a / norm, T::zero()),
                })
                .collect(),
        )
    }

    pub fn single(epsilon: T) -> Self {
        Self {
            levels: vec![Level {
                epsilon,
                phi: Complex::new(T::one(), T::zero()),
            }],
        }
    }

    /// Qubit with levels `±gap/2` and amplitudes `(cos θ, sin θ)`.
    pub fn qubit(gap: T, theta: T) -> Result<Self> {
        let half = gap / lit(2.0);
        Self::from_parts(&[-half, half], &[theta.cos(), theta.sin()])
    }

    /// Equal-weight qubit with levels `±gap/2`.
    pub fn balanced_qubit(gap: T) -> Result<Self> {
        Self::qubit(gap, T::FRAC_PI_4())
    }

    pub fn levels(&self) -> &[Level<T>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.epsilon).collect()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.phi.norm_sqr()).collect()
    }

    pub fn mean_energy(&self) -> T {
        self.levels
            .iter()
            .map(|l| l.phi.norm_sqr() * l.epsilon)
            .sum()
    }

    pub fn var_energy(&self) -> T {
        let mean = self.mean_energy();
        self.levels
            .iter()
            .map(|l| l.phi.norm_sqr() * (l.epsilon - mean).powi(2))
            .sum()
    }
}

/// Clock with a Gaussian energy distribution on a truncated uniform energy grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealClockSpec<T> {
    pub eps_min: T,
    pub eps_max: T,
    pub n_eps: usize,
    pub epsilon0: T,
    pub sigma_h: T,
}

impl<T: Real> IdealClockSpec<T> {
    pub fn new(eps_min: T, eps_max: T, n_eps: usize, epsilon0: T, sigma_h: T) -> Result<Self> {
        if !(sigma_h > T::zero()) {
            return Err(Error::ConfigInvalid("sigma_H must be positive".into()));
        }
        if n_eps < 16 {
            return Err(Error::ConfigInvalid(
                "energy grid needs at least 16 points".into(),
            ));
        }
        let four = sigma_h * lit(4.0);
        if eps_min > epsilon0 - four || eps_max < epsilon0 + four {
            return Err(Error::ConfigInvalid(
                "energy grid must cover at least 8 standard deviations".into(),
            ));
        }
        Ok(Self {
            eps_min,
            eps_max,
            n_eps,
            epsilon0,
            sigma_h,
        })
    }

    /// Grid spanning `epsilon0 ± half_width_stds · sigma_h`.
    pub fn centered(epsilon0: T, sigma_h: T, half_width_stds: T, n_eps: usize) -> Result<Self> {
        let half = sigma_h * half_width_stds;
        Self::new(epsilon0 - half, epsilon0 + half, n_eps, epsilon0, sigma_h)
    }

    pub fn spacing(&self) -> T {
        (self.eps_max - self.eps_min) / count(self.n_eps - 1)
    }

    pub fn point(&self, l: usize) -> T {
        self.eps_min + self.spacing() * count(l)
    }

    /// Energy amplitude φ(ε) of the Gaussian clock state.
    pub fn amplitude(&self, eps: T) -> T {
        let s2 = self.sigma_h * self.sigma_h;
        (lit::<T>(2.0) * T::PI() * s2).powf(lit(-0.25))
            * (-(eps - self.epsilon0).powi(2) / (lit::<T>(4.0) * s2)).exp()
    }
}

/// Either kind of internal clock.
#[derive(Debug, Clone, PartialEq)]
pub enum ClockSpec<T> {
    Discrete(DiscreteClockSpec<T>),
    Ideal(IdealClockSpec<T>),
}

impl<T: Real> ClockSpec<T> {
    /// Number of rows in the amplitude array (levels or energy grid points).
    pub fn n_levels(&self) -> usize {
        match self {
            ClockSpec::Discrete(d) => d.len(),
            ClockSpec::Ideal(i) => i.n_eps,
        }
    }

    pub fn energy(&self, l: usize) -> T {
        match self {
            ClockSpec::Discrete(d) => d.levels[l].epsilon,
            ClockSpec::Ideal(i) => i.point(l),
        }
    }

    pub fn energies(&self) -> Vec<T> {
        (0..self.n_levels()).map(|l| self.energy(l)).collect()
    }

    /// Quadrature weight of one row: 1 for discrete levels, dε for the energy grid.
    pub fn row_weight(&self) -> T {
        match self {
            ClockSpec::Discrete(_) => T::one(),
            ClockSpec::Ideal(i) => i.spacing(),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteClockSpec<T>> {
        match self {
            ClockSpec::Discrete(d) => Some(d),
            ClockSpec::Ideal(_) => None,
        }
    }

    pub fn as_ideal(&self) -> Option<&IdealClockSpec<T>> {
        match self {
            ClockSpec::Ideal(i) => Some(i),
            ClockSpec::Discrete(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_statistics() {
        let q = DiscreteClockSpec::<f64>::balanced_qubit(2.0).unwrap();
        assert!(q.mean_energy().abs() < 1e-15);
        assert!((q.var_energy() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unsorted_or_unnormalized() {
        let l = |e: f64, a: f64| Level {
            epsilon: e,
            phi: Complex::new(a, 0.0),
        };
        assert!(DiscreteClockSpec::new(vec![l(1.0, 0.6), l(0.0, 0.8)]).is_err());
        assert!(DiscreteClockSpec::new(vec![l(0.0, 0.6), l(1.0, 0.6)]).is_err());
        assert!(DiscreteClockSpec::new(vec![l(0.0, 0.6), l(1.0, 0.8)]).is_ok());
    }

    #[test]
    fn ideal_clock_coverage() {
        assert!(IdealClockSpec::new(-1.0, 1.0, 64, 0.0, 0.5).is_err());
        let c = IdealClockSpec::<f64>::centered(0.0, 0.1, 6.0, 129).unwrap();
        let norm: f64 = (0..c.n_eps)
            .map(|l| c.amplitude(c.point(l)).powi(2))
            .sum::<f64>()
            * c.spacing();
        assert!((norm - 1.0).abs() < 1e-8);
    }
}
