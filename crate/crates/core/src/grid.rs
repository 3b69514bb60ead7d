use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Smallest admitted number of grid points.
pub const MIN_POINTS: usize = 64;
/// Default number of momentum grid points.
pub const DEFAULT_POINTS: usize = 1024;
/// Half-width of a fitted box in standard deviations.
pub const BOX_STDS: f64 = 10.0;

/// Uniform grid including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid<T> {
    pub p_min: T,
    pub p_max: T,
    pub n_points: usize,
}

impl<T: Real> MomentumGrid<T> {
    pub fn new(p_min: T, p_max: T, n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::ConfigInvalid(format!(
                "grid needs at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        if !(p_max > p_min) {
            return Err(Error::ConfigInvalid(
                "grid bounds must satisfy p_min < p_max".into(),
            ));
        }
        Ok(Self {
            p_min,
            p_max,
            n_points,
        })
    }

    /// Box spanning `[lo - 10 std, hi + 10 std]`.
    pub fn covering(lo: T, hi: T, std: T, n_points: usize) -> Result<Self> {
        let pad = std * lit(BOX_STDS);
        Self::new(lo - pad, hi + pad, n_points)
    }

    /// Box as in [`covering`](Self::covering) with enough points to resolve the
    /// free-evolution phase `p t / m_min` up to time `t_max`.
    pub fn for_evolution(lo: T, hi: T, std: T, t_max: T, m_min: T, hbar: T) -> Result<Self> {
        let pad = std * lit(BOX_STDS);
        let (a, b) = (lo - pad, hi + pad);
        let p_edge = a.abs().max(b.abs());
        // Keep the phase advance per grid cell at the bulk (|p| within 3 std of
        // the centre) below 0.02 rad.
        let p_bulk = (lo.abs().max(hi.abs()) + std * lit(3.0)).min(p_edge);
        let k_max = p_bulk * t_max.abs() / (m_min * hbar);
        let needed = ((b - a) * k_max / lit(0.02))
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX);
        let n = needed.clamp(DEFAULT_POINTS, 1 << 16);
        Self::new(a, b, n)
    }

    pub fn spacing(&self) -> T {
        (self.p_max - self.p_min) / count(self.n_points - 1)
    }

    pub fn point(&self, k: usize) -> T {
        self.p_min + self.spacing() * count(k)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = MomentumGrid::<f64>::new(-1.0, 1.0, 101).unwrap();
        assert!((g.spacing() - 0.02).abs() < 1e-15);
        assert!((g.point(100) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(MomentumGrid::new(-1.0, 1.0, 10).is_err());
        assert!(MomentumGrid::new(1.0, -1.0, 100).is_err());
    }

    #[test]
    fn evolution_grid_grows_with_time() {
        let short = MomentumGrid::for_evolution(0.0, 0.0, 0.5, 0.1, 1.0, 1.0).unwrap();
        let long = MomentumGrid::for_evolution(0.0, 0.0, 0.5, 20.0, 1.0, 1.0).unwrap();
        assert_eq!(short.n_points, DEFAULT_POINTS);
        assert!(long.n_points > short.n_points);
    }
}
