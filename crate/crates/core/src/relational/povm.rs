//! Normalization audit of the space-time covariant POVM on conjugate grids.
//!
//! The (x, t) grids are discrete Fourier partners of the (p, ε) grids, so the
//! twirl integrals are finite sums. The x-sum is diagonal in momentum exactly;
//! the t-sum is a Dirichlet kernel in the phase difference E(p, ε) − E(p, ε').

use num_complex::Complex;

use super::dilation::DilationSpectrum;
use crate::dynamics::HamiltonianOrder;
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::params::PhysicalParams;
use crate::scalar::{count, lit, Real};

/// Number of probe functions spanning the band-limited test subspace.
pub const PROBE_FUNCTIONS: usize = 6;
/// Probe width as a fraction of the energy range.
pub const PROBE_WIDTH_FRACTION: f64 = 1.0 / 64.0;

/// How the sharp seed |x₀⟩⟨x₀| ⊗ |τ₀⟩⟨τ₀| is dressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedWeighting {
    /// Δ^{1/2} (…) Δ^{1/2}.
    Sandwiched,
    /// The bare projector product.
    Unweighted,
}

/// Uniform energy grid with `n` points starting at `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid<T> {
    pub min: T,
    pub spacing: T,
    pub n: usize,
}

impl<T: Real> EnergyGrid<T> {
    pub fn spanning(min: T, max: T, n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::ConfigInvalid(
                "energy grid needs an even number (>= 8) of points".into(),
            ));
        }
        if !(max > min) {
            return Err(Error::ConfigInvalid(
                "energy grid bounds must be increasing".into(),
            ));
        }
        Ok(Self {
            min,
            spacing: (max - min) / count(n),
            n,
        })
    }

    pub fn point(&self, l: usize) -> T {
        self.min + self.spacing * count(l)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|l| self.point(l)).collect()
    }

    pub fn range(&self) -> T {
        self.spacing * count(self.n)
    }
}

/// Seed readout, discretization and Hamiltonian order of the audited POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSpec<T> {
    pub x0: T,
    pub tau0: T,
    pub momentum: MomentumGrid<T>,
    pub energy: EnergyGrid<T>,
    pub order: HamiltonianOrder,
    pub weighting: SeedWeighting,
}

impl<T: Real> PovmSpec<T> {
    /// Position spacing conjugate to the momentum grid: N dx dp = 2πħ.
    pub fn dx(&self, hbar: T) -> T {
        T::TAU() * hbar / (count::<T>(self.momentum.n_points) * self.momentum.spacing())
    }

    /// Time spacing conjugate to the energy grid: N dt dε = 2πħ.
    pub fn dt(&self, hbar: T) -> T {
        T::TAU() * hbar / (count::<T>(self.energy.n) * self.energy.spacing)
    }
}

/// Outcome of the normalization audit.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmAudit<T> {
    /// max over p of the operator norm of Σ Ê(x,t) dx dt − 1 on the probe subspace.
    pub deviation: T,
    /// max over p of the Frobenius norm of the same block.
    pub frobenius: T,
    /// Largest departure of the x-summed kernel from δ_kk'.
    pub spatial_deviation: T,
    /// Momentum points and the probe-averaged diagonal of Σ Ê at each.
    pub momenta: Vec<T>,
    pub mean_diagonal: Vec<T>,
    /// Smallest eigenvalue among the spot-checked elements Ê(x, t).
    pub min_eigenvalue: T,
}

/// Orthonormal Hermite-Gauss functions on the energy grid, centred on the grid.
fn probe_basis<T: Real>(grid: &EnergyGrid<T>, k: usize) -> Vec<Vec<T>> {
    let centre = grid.min + grid.range() * lit(0.5);
    let width = grid.range() * lit(PROBE_WIDTH_FRACTION);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(k);
    for n in 0..k {
        let mut v: Vec<T> = (0..grid.n)
            .map(|l| {
                let u = (grid.point(l) - centre) / width;
                // h_{j+1} = √(2/(j+1)) u h_j − √(j/(j+1)) h_{j−1}, normalized Hermite recursion.
                let (mut h0, mut h1) = (T::zero(), T::one());
                for j in 0..n {
                    let jf = lit::<T>(j as f64);
                    let h2 = (lit::<T>(2.0) / (jf + T::one())).sqrt() * u * h1
                        - (jf / (jf + T::one())).sqrt() * h0;
                    h0 = h1;
                    h1 = h2;
                }
                h1 * (-(u * u) * lit(0.5)).exp()
            })
            .collect();
        // Two Gram-Schmidt passes.
        for _ in 0..2 {
            for b in &basis {
                let proj: T = b.iter().zip(&v).map(|(a, c)| *a * *c).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= proj * *y;
                }
            }
        }
        let norm = v.iter().map(|a| *a * *a).sum::<T>().sqrt();
        basis.push(v.into_iter().map(|a| a / norm).collect());
    }
    basis
}

/// Σ_{n} e^{iθ(n − N/2)} for n = 0..N−1 (N even).
fn dirichlet<T: Real>(theta: T, n: usize) -> Complex<T> {
    let two_pi = T::TAU();
    let r = theta - (theta / two_pi).round() * two_pi;
    let half = r * lit(0.5);
    if half.abs() < lit(1e-12) {
        return Complex::new(count(n), T::zero());
    }
    let amp = (count::<T>(n) * half).sin() / half.sin();
    Complex::from_polar(amp, -half)
}

/// Audits Σ_{x,t} Ê(x,t) dx dt = 1 for the spec's seed and Hamiltonian order.
pub fn povm_normalization_audit<T: Real>(
    spec: &PovmSpec<T>,
    params: &PhysicalParams<T>,
) -> Result<PovmAudit<T>> {
    let hbar = params.hbar;
    let dil = DilationSpectrum::new(*params, spec.order);
    let ps = spec.momentum.points();
    let eps = spec.energy.points();
    dil.check_positive(&ps, &eps)?;

    let dx = spec.dx(hbar);
    let dt = spec.dt(hbar);
    let n_p = spec.momentum.n_points;
    let n_e = spec.energy.n;
    let dp = spec.momentum.spacing();
    let de = spec.energy.spacing;

    // x-sum: dx dp/(2πħ) Σ_j exp(−i (x_j + x₀)(p_k − p_k')/ħ), a function of k − k'.
    let mut spatial_deviation = T::zero();
    let pref = dx * dp / (T::TAU() * hbar);
    for d in 0..n_p {
        let q = dp * count(d);
        let sum: Complex<T> = (0..n_p)
            .map(|j| {
                let x = (count::<T>(j) - count::<T>(n_p / 2)) * dx + spec.x0;
                Complex::from_polar(T::one(), -x * q / hbar)
            })
            .sum::<Complex<T>>()
            * pref;
        let target = if d == 0 { T::one() } else { T::zero() };
        spatial_deviation = spatial_deviation.max((sum - Complex::new(target, T::zero())).norm());
    }

    let basis = probe_basis(&spec.energy, PROBE_FUNCTIONS);
    let tiny = lit::<T>(1e-18);
    let support: Vec<usize> = (0..n_e)
        .filter(|&l| basis.iter().any(|b| b[l].abs() > tiny))
        .collect();
    let k = basis.len();
    let time_pref = de * dt / (T::TAU() * hbar);

    let mut deviation = T::zero();
    let mut frobenius = T::zero();
    let mut mean_diagonal = Vec::with_capacity(n_p);
    for &p in &ps {
        let weight: Vec<T> = eps
            .iter()
            .map(|&e| match spec.weighting {
                SeedWeighting::Sandwiched => dil.value(p, e).sqrt(),
                SeedWeighting::Unweighted => T::one(),
            })
            .collect();
        let energies: Vec<T> = eps.iter().map(|&e| dil.energy(p, e)).collect();
        // (M V) restricted to the probe support.
        let mut mv = vec![Complex::new(T::zero(), T::zero()); support.len() * k];
        for (ia, &l) in support.iter().enumerate() {
            for &lp in &support {
                let theta = dt * (energies[l] - energies[lp]) / hbar;
                let phase = Complex::from_polar(T::one(), -spec.tau0 * (eps[l] - eps[lp]) / hbar);
                let m = dirichlet(theta, n_e) * phase * (time_pref * weight[l] * weight[lp]);
                for b in 0..k {
                    mv[ia * k + b] = mv[ia * k + b] + m * basis[b][lp];
                }
            }
        }
        let mut block = vec![Complex::new(T::zero(), T::zero()); k * k];
        for a in 0..k {
            for b in 0..k {
                let s: Complex<T> = support
                    .iter()
                    .enumerate()
                    .map(|(ia, &l)| mv[ia * k + b] * basis[a][l])
                    .sum();
                block[a * k + b] = s;
            }
        }
        let trace: T = (0..k).map(|a| block[a * k + a].re).sum();
        mean_diagonal.push(trace / count(k));
        for a in 0..k {
            block[a * k + a] = block[a * k + a] - Complex::new(T::one(), T::zero());
        }
        let fro = block.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let op = T::hermitian_eigenvalues(&block, k)
            .into_iter()
            .fold(T::zero(), |acc, e| acc.max(e.abs()));
        deviation = deviation.max(op);
        frobenius = frobenius.max(fro);
    }

    Ok(PovmAudit {
        deviation,
        frobenius,
        spatial_deviation,
        momenta: ps,
        mean_diagonal,
        min_eigenvalue: positivity_spot_check(spec, &dil, hbar),
    })
}

/// Assembles Ê(x, t) = U† Ê₀ U densely on an 8 × 8 subsample of the grids at a
/// few (x, t) points and returns the smallest eigenvalue found.
fn positivity_spot_check<T: Real>(spec: &PovmSpec<T>, dil: &DilationSpectrum<T>, hbar: T) -> T {
    const SUB: usize = 8;
    let pick = |n: usize| -> Vec<usize> { (0..SUB).map(|i| i * (n - 1) / (SUB - 1)).collect() };
    let ks = pick(spec.momentum.n_points);
    let ls = pick(spec.energy.n);
    let ps: Vec<T> = ks.iter().map(|&k| spec.momentum.point(k)).collect();
    let es: Vec<T> = ls.iter().map(|&l| spec.energy.point(l)).collect();
    let dim = SUB * SUB;
    let dx = spec.dx(hbar);
    let dt = spec.dt(hbar);
    let mut min = T::infinity();
    for &(jx, jt) in &[(0i64, 0i64), (3, -2), (-5, 7)] {
        let x = dx * lit(jx as f64);
        let t = dt * lit(jt as f64);
        // Seed vector s_a e^{−i(p x₀ + ε τ₀)/ħ}, evolved by U†.
        let v: Vec<Complex<T>> = (0..dim)
            .map(|a| {
                let (p, e) = (ps[a / SUB], es[a % SUB]);
                let s = match spec.weighting {
                    SeedWeighting::Sandwiched => dil.value(p, e).sqrt(),
                    SeedWeighting::Unweighted => T::one(),
                };
                let phase = -(p * spec.x0 + e * spec.tau0) + (x * p + t * dil.energy(p, e));
                Complex::from_polar(s, phase / hbar)
            })
            .collect();
        let mut e_mat = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                e_mat[a * dim + b] = v[a] * v[b].conj();
            }
        }
        let lowest = T::hermitian_eigenvalues(&e_mat, dim)
            .into_iter()
            .fold(T::infinity(), T::min);
        min = min.min(lowest);
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(
        order: HamiltonianOrder,
        weighting: SeedWeighting,
        n_e: usize,
    ) -> (PovmSpec<f64>, PhysicalParams<f64>) {
        let params = PhysicalParams::new(1.0, 2.0, 1.0).unwrap();
        let spec = PovmSpec {
            x0: 0.3,
            tau0: -0.2,
            momentum: MomentumGrid::new(-1.0, 1.0, 64).unwrap(),
            energy: EnergyGrid::spanning(-1.0, 1.0, n_e).unwrap(),
            order,
            weighting,
        };
        (spec, params)
    }

    #[test]
    fn probe_basis_is_orthonormal() {
        let g = EnergyGrid::spanning(-1.0f64, 1.0, 512).unwrap();
        let b = probe_basis(&g, PROBE_FUNCTIONS);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let s: f64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dirichlet_matches_direct_sum() {
        for &theta in &[0.0, 0.3, 2.0, 7.5, -13.1] {
            let n = 16;
            let direct: Complex<f64> = (0..n)
                .map(|j| Complex::from_polar(1.0, theta * (j as f64 - (n / 2) as f64)))
                .sum();
            assert!(
                (direct - dirichlet(theta, n)).norm() < 1e-12,
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn nonrelativistic_seed_is_normalized() {
        let (s, p) = spec(
            HamiltonianOrder::NonRelativistic,
            SeedWeighting::Unweighted,
            128,
        );
        let a = povm_normalization_audit(&s, &p).unwrap();
        assert!(a.deviation < 1e-10, "{}", a.deviation);
        assert!(a.spatial_deviation < 1e-10);
        assert!(a.min_eigenvalue > -1e-10);
    }

    #[test]
    fn unweighted_first_order_seed_overcounts_by_inverse_dilation() {
        let (s, p) = spec(HamiltonianOrder::FirstOrder, SeedWeighting::Unweighted, 512);
        let a = povm_normalization_audit(&s, &p).unwrap();
        let dil = DilationSpectrum::new(p, HamiltonianOrder::FirstOrder);
        for (&q, &d) in a.momenta.iter().zip(&a.mean_diagonal) {
            let expected = 1.0 / dil.value(q, 0.0);
            assert!(
                (d - expected).abs() < 1e-6 * expected,
                "p = {q}: {d} vs {expected}"
            );
        }
    }

    #[test]
    fn all_orders_seed_converges_under_refinement() {
        let devs: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| {
                let (s, p) = spec(HamiltonianOrder::Exact, SeedWeighting::Sandwiched, n);
                povm_normalization_audit(&s, &p).unwrap().deviation
            })
            .collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
        assert!(devs[3] < 1e-8, "{devs:?}");
    }
}
