use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Largest admitted ratio of internal-energy scale to rest energy.
pub const LAMBDA_MAX: f64 = 0.2;

/// Rest mass, speed of light and reduced Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub m: T,
    pub c: T,
    pub hbar: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(m: T, c: T, hbar: T) -> Result<Self> {
        if !(m > T::zero() && c > T::zero() && hbar > T::zero()) {
            return Err(Error::ConfigInvalid(format!(
                "m, c and hbar must be positive (got m={}, c={}, hbar={})",
                m, c, hbar
            )));
        }
        Ok(Self { m, c, hbar })
    }

    /// Natural units with ħ = m = 1 and the given speed of light.
    pub fn natural(c: T) -> Result<Self> {
        Self::new(T::one(), c, T::one())
    }

    /// Natural units with c chosen so that an energy spread `spread` sits at
    /// regime parameter `lambda`.
    pub fn for_lambda(spread: T, lambda: T) -> Result<Self> {
        if !(spread > T::zero() && lambda > T::zero()) {
            return Err(Error::ConfigInvalid(
                "spread and lambda must be positive".into(),
            ));
        }
        Self::natural((spread / lambda).sqrt())
    }

    pub fn rest_energy(&self) -> T {
        self.m * self.c * self.c
    }

    /// Mass of the internal level with energy `eps`.
    pub fn mass_of(&self, eps: T) -> T {
        self.m + eps / (self.c * self.c)
    }

    /// Regime parameter for an energy scale.
    pub fn lambda_of(&self, energy_scale: T) -> T {
        energy_scale / self.rest_energy()
    }

    pub fn check_lambda(&self, lambda: T) -> Result<()> {
        if lambda > lit(LAMBDA_MAX) {
            return Err(Error::RegimeViolation(format!(
                "lambda = {:.4} exceeds {}",
                to_f64(lambda),
                LAMBDA_MAX
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(PhysicalParams::new(1.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lambda_tuned_through_c() {
        let p = PhysicalParams::<f64>::for_lambda(2.0, 0.05).unwrap();
        assert!((p.lambda_of(2.0) - 0.05).abs() < 1e-15);
        assert!(p.check_lambda(0.3).is_err());
    }
}
