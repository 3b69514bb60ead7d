//! Central finite differences on row-major arrays, with Richardson extrapolation.
//!
//! Samples outside the grid are taken as zero, which keeps the discrete
//! operator `i ħ D` exactly Hermitian for the plain Riemann inner product.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Fourth-order central difference along one axis with stencil spacing `step` cells.
///
/// The axis has `len` points and consecutive points are `stride` elements apart.
pub fn central_difference<T: Real>(
    f: &[Complex<T>],
    len: usize,
    stride: usize,
    h: T,
    step: usize,
) -> Vec<Complex<T>> {
    let scale = T::one() / (lit::<T>(12.0) * h * lit(step as f64));
    let eight = lit::<T>(8.0);
    let at = |i: usize, a: usize, off: isize| -> Complex<T> {
        let b = a as isize + off * step as isize;
        if b < 0 || b >= len as isize {
            Complex::new(T::zero(), T::zero())
        } else {
            f[(i as isize + (b - a as isize) * stride as isize) as usize]
        }
    };
    (0..f.len())
        .map(|i| {
            let a = (i / stride) % len;
            (at(i, a, -2) - at(i, a, -1) * eight + at(i, a, 1) * eight - at(i, a, 2)) * scale
        })
        .collect()
}

/// Derivative estimates at two resolutions.
pub struct Derivative<T> {
    /// Fourth-order estimate on the native spacing.
    pub fine: Vec<Complex<T>>,
    /// Richardson combination of native and doubled spacing (sixth order).
    pub extrapolated: Vec<Complex<T>>,
}

pub fn derivative<T: Real>(f: &[Complex<T>], len: usize, stride: usize, h: T) -> Derivative<T> {
    let fine = central_difference(f, len, stride, h, 1);
    let coarse = central_difference(f, len, stride, h, 2);
    let k = lit::<T>(16.0);
    let d = lit::<T>(15.0);
    let extrapolated = fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a * k - b) / d)
        .collect();
    Derivative { fine, extrapolated }
}

/// Sixth-order derivative alone.
pub fn derivative_extrapolated<T: Real>(
    f: &[Complex<T>],
    len: usize,
    stride: usize,
    h: T,
) -> Vec<Complex<T>> {
    derivative(f, len, stride, h).extrapolated
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, h: f64) -> Vec<Complex<f64>> {
        (0..n)
            .map(|k| {
                let x = -8.0 + h * k as f64;
                Complex::new((-x * x / 2.0).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn gaussian_derivative_orders() {
        let n = 321;
        let h = 16.0 / (n - 1) as f64;
        let f = gaussian(n, h);
        let d = derivative(&f, n, 1, h);
        let mut err4: f64 = 0.0;
        let mut err6: f64 = 0.0;
        for k in 0..n {
            let x = -8.0 + h * k as f64;
            let exact = -x * (-x * x / 2.0).exp();
            err4 = err4.max((d.fine[k].re - exact).abs());
            err6 = err6.max((d.extrapolated[k].re - exact).abs());
        }
        assert!(err4 < 1e-5, "{err4}");
        assert!(err6 < err4 / 10.0, "{err6} vs {err4}");
    }

    #[test]
    fn strided_axis_matches_contiguous() {
        let n = 80;
        let h = 16.0 / (n - 1) as f64;
        let col = gaussian(n, h);
        // Two columns interleaved: derivative along the row index.
        let mut grid = Vec::new();
        for v in &col {
            grid.push(*v);
            grid.push(*v * 2.0);
        }
        let d = central_difference(&grid, n, 2, h, 1);
        let c = central_difference(&col, n, 1, h, 1);
        for k in 0..n {
            assert!((d[2 * k] - c[k]).norm() < 1e-15);
            assert!((d[2 * k + 1] - c[k] * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn operator_is_antisymmetric() {
        let n = 70;
        let a: Vec<Complex<f64>> = (0..n)
            .map(|k| Complex::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let b: Vec<Complex<f64>> = (0..n)
            .map(|k| Complex::new((k as f64 * 0.7).cos(), 0.1 * k as f64))
            .collect();
        let da = derivative_extrapolated(&a, n, 1, 0.1);
        let db = derivative_extrapolated(&b, n, 1, 0.1);
        let lhs: Complex<f64> = a.iter().zip(&db).map(|(x, y)| x.conj() * y).sum();
        let rhs: Complex<f64> = da.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        assert!((lhs + rhs).norm() < 1e-10);
    }
}
