use crate::dynamics::HamiltonianOrder;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::scalar::{to_f64, Real};

/// Time-dilation factor Δ(p, ε) = ∂E/∂ε and the mass-energy m(ε) of the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationSpectrum<T> {
    pub params: PhysicalParams<T>,
    pub order: HamiltonianOrder,
}

impl<T: Real> DilationSpectrum<T> {
    pub fn new(params: PhysicalParams<T>, order: HamiltonianOrder) -> Self {
        Self { params, order }
    }

    pub fn mass(&self, eps: T) -> T {
        self.params.mass_of(eps)
    }

    /// Δ(p, ε) truncated consistently with the order.
    pub fn value(&self, p: T, eps: T) -> T {
        self.order.dilation(&self.params, eps, p)
    }

    /// E(p, ε) without the common rest energy.
    pub fn energy(&self, p: T, eps: T) -> T {
        self.order.energy(&self.params, eps, p)
    }

    /// (m̂ Δ̂)⁻¹ with the order-matching inverse mass.
    pub fn inverse_mass_dilation(&self, p: T, eps: T) -> T {
        self.order.inverse_mass(&self.params, eps) / self.value(p, eps)
    }

    /// Smallest Δ over the product grid; fails unless strictly positive.
    pub fn check_positive(&self, ps: &[T], eps: &[T]) -> Result<T> {
        let mut min = T::infinity();
        for &e in eps {
            for &p in ps {
                min = min.min(self.value(p, e));
            }
        }
        if !(min > T::zero()) {
            return Err(Error::DilationNonPositive(to_f64(min)));
        }
        Ok(min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_is_energy_slope() {
        let params = PhysicalParams::new(1.0, 3.0, 1.0).unwrap();
        for order in HamiltonianOrder::ALL {
            let d = DilationSpectrum::new(params, order);
            for &(p, e) in &[(0.4, 0.3), (-1.1, -0.7), (2.0, 1.5)] {
                let h = 1e-4f64;
                let fd = (d.energy(p, e + h) - d.energy(p, e - h)) / (2.0 * h);
                assert!(
                    (fd - d.value(p, e)).abs() < 1e-7,
                    "{order}: {fd} vs {}",
                    d.value(p, e)
                );
            }
        }
    }

    #[test]
    fn non_positive_dilation_is_rejected() {
        let params = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
        let d = DilationSpectrum::new(params, HamiltonianOrder::Exact);
        assert!(d.check_positive(&[0.5], &[0.0]).is_ok());
        assert!(matches!(
            d.check_positive(&[2.0], &[0.0]),
            Err(Error::DilationNonPositive(_))
        ));
    }
}
