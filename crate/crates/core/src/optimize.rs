//! One-dimensional minimization by golden-section search.

use crate::scalar::{lit, Real};

/// Minimizes `f` on `[a, b]` until the bracket is narrower than `tol`.
///
/// Returns the abscissa and value of the best point seen. Assumes `f` is
/// unimodal on the interval.
pub fn golden_section_min<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> (T, T) {
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` on `[a, b]`; see [`golden_section_min`].
pub fn golden_section_max<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> (T, T) {
    let (x, v) = golden_section_min(|x| -f(x), a, b, tol);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, v) = golden_section_min(|x: f64| (x - 0.3).powi(2) + 2.0, -1.0, 4.0, 1e-10);
        // Flatness at the extremum limits the abscissa to about √ε.
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn maximizes_sine() {
        let (x, v) = golden_section_max(|x: f64| x.sin(), 0.0, 3.0, 1e-10);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }
}
