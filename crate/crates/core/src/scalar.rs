//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use nalgebra as na;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type usable as the scalar of states, grids and reports.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Eigenvalues of the Hermitian matrix stored row-major in `a` (size `n`×`n`).
    fn hermitian_eigenvalues(a: &[Complex<Self>], n: usize) -> Vec<Self>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn hermitian_eigenvalues(a: &[Complex<Self>], n: usize) -> Vec<Self> {
                assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
                let m = na::DMatrix::from_fn(n, n, |i, j| {
                    // Symmetrize so round-off never breaks Hermiticity.
                    (a[i * n + j] + a[j * n + i].conj()) * 0.5
                });
                m.symmetric_eigenvalues().iter().copied().collect()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// `base`, widened to 64 ulps for scalars too coarse to reach it.
#[inline]
pub fn tolerance<T: Real>(base: f64) -> T {
    lit::<T>(base).max(lit::<T>(64.0) * T::epsilon())
}

/// Converts a count into the working scalar.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Lossy conversion to `f64`, used for error payloads and reports.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Sum of absolute eigenvalues of a Hermitian matrix (its trace norm).
pub fn hermitian_trace_norm<T: Real>(a: &[Complex<T>], n: usize) -> T {
    T::hermitian_eigenvalues(a, n)
        .into_iter()
        .map(|e| e.abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_eigenvalues() {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        let mut ev = f64::hermitian_eigenvalues(&[z, o, o, z], 2);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_single_precision() {
        let z = Complex::new(0.0f32, 0.0);
        let i = Complex::new(0.0f32, 1.0);
        let norm = hermitian_trace_norm(&[z, i, -i, z], 2);
        assert!((norm - 2.0).abs() < 1e-6);
    }
}
