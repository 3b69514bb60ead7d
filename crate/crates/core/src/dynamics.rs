//! Brute-force evolution and moment extraction.
//!
//! Every Hamiltonian considered here is diagonal in (p, level), so evolution
//! is a pointwise phase and all conserved quantities are conserved to
//! rounding.

use num_complex::Complex;

use crate::clock::ClockSpec;
use crate::deriv::derivative;
use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::params::PhysicalParams;
use crate::scalar::{count, hermitian_trace_norm, lit, to_f64, tolerance, Real};
use crate::state::{CompositeState, Evolution};

/// Largest admitted relative disagreement between the native and extrapolated
/// position variance.
pub const DERIVATIVE_NOISE_MAX: f64 = 1e-6;
/// Default scan horizon for threshold times, in units of ħ/ΔH_c.
pub const THRESHOLD_HORIZON: f64 = 1e3;

/// Truncation order of the clock-particle Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianOrder {
    /// E_i(p) = p²/(2 m_i) + m_i c².
    Exact,
    /// First order in ε/(m c²): the internal energy is dilated by 1 − p²/(2m²c²).
    FirstOrder,
    /// First order plus the ε² p²/(2 m³ c⁴) mass-renormalization term.
    SecondOrder,
    /// p²/(2m) + ε with no coupling and no rest energy.
    NonRelativistic,
}

impl HamiltonianOrder {
    pub const ALL: [HamiltonianOrder; 4] = [
        HamiltonianOrder::Exact,
        HamiltonianOrder::FirstOrder,
        HamiltonianOrder::SecondOrder,
        HamiltonianOrder::NonRelativistic,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            HamiltonianOrder::Exact => "exact",
            HamiltonianOrder::FirstOrder => "first_order",
            HamiltonianOrder::SecondOrder => "second_order",
            HamiltonianOrder::NonRelativistic => "nonrelativistic",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.tag() == tag)
    }

    /// Energy of level `eps` at momentum `p`, excluding the common rest energy m c².
    pub fn energy<T: Real>(&self, params: &PhysicalParams<T>, eps: T, p: T) -> T {
        let m = params.m;
        let mc2 = params.rest_energy();
        let kin = p * p / (lit::<T>(2.0) * m);
        match self {
            HamiltonianOrder::Exact => p * p / (lit::<T>(2.0) * params.mass_of(eps)) + eps,
            HamiltonianOrder::FirstOrder => kin + eps * (T::one() - kin / mc2),
            HamiltonianOrder::SecondOrder => {
                kin + eps * (T::one() - kin / mc2) + eps * eps * kin / (mc2 * mc2)
            }
            HamiltonianOrder::NonRelativistic => kin + eps,
        }
    }

    /// Whether the evolution carries the global rest-energy phase.
    pub fn has_rest_energy(&self) -> bool {
        !matches!(self, HamiltonianOrder::NonRelativistic)
    }

    /// Inverse mass of level `eps` consistent with this order, so that the
    /// velocity is v = μ p.
    pub fn inverse_mass<T: Real>(&self, params: &PhysicalParams<T>, eps: T) -> T {
        let m = params.m;
        let e = eps / params.rest_energy();
        match self {
            HamiltonianOrder::Exact => params.mass_of(eps).recip(),
            HamiltonianOrder::FirstOrder => (T::one() - e) / m,
            HamiltonianOrder::SecondOrder => (T::one() - e + e * e) / m,
            HamiltonianOrder::NonRelativistic => m.recip(),
        }
    }

    /// Time-dilation factor ∂E/∂ε at momentum `p`.
    pub fn dilation<T: Real>(&self, params: &PhysicalParams<T>, eps: T, p: T) -> T {
        let c2 = params.c * params.c;
        let a = p * p / (lit::<T>(2.0) * params.m * params.m * c2);
        match self {
            HamiltonianOrder::Exact => {
                let mi = params.mass_of(eps);
                T::one() - p * p / (lit::<T>(2.0) * mi * mi * c2)
            }
            HamiltonianOrder::FirstOrder => T::one() - a,
            HamiltonianOrder::SecondOrder => {
                T::one() - a * (T::one() - lit::<T>(2.0) * eps / params.rest_energy())
            }
            HamiltonianOrder::NonRelativistic => T::one(),
        }
    }
}

impl std::fmt::Display for HamiltonianOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

fn rest_phase<T: Real>(params: &PhysicalParams<T>, t: T) -> T {
    let two_pi = T::TAU();
    let raw = params.rest_energy() * t / params.hbar;
    raw - (raw / two_pi).floor() * two_pi
}

/// Multiplies every amplitude by exp(−i E(p, level) t / ħ).
///
/// The evolution record keeps the last order used; rebuilding assumes one
/// order throughout.
pub fn evolve<T: Real>(
    state: &CompositeState<T>,
    t: T,
    order: HamiltonianOrder,
) -> CompositeState<T> {
    let mut out = state.clone();
    if t == T::zero() {
        return out;
    }
    let params = state.params;
    let hbar = params.hbar;
    let n = state.n_p();
    let ps = state.grid.points();
    let global = if order.has_rest_energy() {
        rest_phase(&params, t)
    } else {
        T::zero()
    };
    for l in 0..state.n_rows() {
        let eps = state.clock.energy(l);
        for (k, &p) in ps.iter().enumerate() {
            let phase = -(global + order.energy(&params, eps, p) * t / hbar);
            out.amplitudes[l * n + k] =
                out.amplitudes[l * n + k] * Complex::from_polar(T::one(), phase);
        }
    }
    out.evolution = Evolution {
        t: state.evolution.t + t,
        order,
    };
    out
}

/// Moments of the centre of mass and clock in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport<T> {
    pub t: T,
    pub norm: T,
    pub mean_x: T,
    pub var_x: T,
    pub mean_p: T,
    pub var_p: T,
    pub mean_v: T,
    /// Velocity variance with the order-matching inverse mass.
    pub var_v: T,
    /// Velocity variance with the exact inverse mass 1/m_i.
    pub var_v_exact: T,
    pub cov_xv: T,
    pub cov_xp: T,
    pub mean_hc: T,
    pub var_hc: T,
    /// ⟨m̂⁻¹⟩ from exact branch masses.
    pub mean_inv_mass: T,
    /// ⟨m̂⁻²⟩ from exact branch masses.
    pub mean_inv_mass_sq: T,
    pub mean_tau: Option<T>,
    pub var_tau: Option<T>,
    pub mbar: T,
    pub lambda: T,
    pub order: HamiltonianOrder,
}

/// Moments with the velocity defined by the order the state was evolved with.
pub fn compute_moments<T: Real>(state: &CompositeState<T>) -> Result<MomentReport<T>> {
    compute_moments_with(state, state.evolution.order)
}

/// Moments with the velocity v = μ(order) p.
pub fn compute_moments_with<T: Real>(
    state: &CompositeState<T>,
    order: HamiltonianOrder,
) -> Result<MomentReport<T>> {
    let params = state.params;
    let hbar = params.hbar;
    let n = state.n_p();
    let rows = state.n_rows();
    let w = state.cell_weight();
    let psi = &state.amplitudes;
    let ps = state.grid.points();

    let norm: T = psi.iter().map(|a| a.norm_sqr()).sum::<T>() * w;
    if (norm - T::one()).abs() > tolerance::<T>(1e-8) {
        return Err(Error::ConfigInvalid(format!(
            "state not normalized (norm = {})",
            to_f64(norm)
        )));
    }

    // x ψ = i ħ ∂_p ψ
    let d = derivative(psi, n, 1, state.grid.spacing());
    let i_hbar = Complex::new(T::zero(), hbar);
    let position_moments = |dpsi: &[Complex<T>]| -> (T, T, Vec<Complex<T>>) {
        let xpsi: Vec<_> = dpsi.iter().map(|a| a * i_hbar).collect();
        let mean = psi
            .iter()
            .zip(&xpsi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<T>()
            * w;
        let second = xpsi.iter().map(|a| a.norm_sqr()).sum::<T>() * w;
        (mean, second - mean * mean, xpsi)
    };
    let (_, var_x_fine, _) = position_moments(&d.fine);
    let (mean_x, var_x, xpsi) = position_moments(&d.extrapolated);
    let gap = (var_x_fine - var_x).abs() / var_x.abs().max(T::min_positive_value());
    if gap > lit(DERIVATIVE_NOISE_MAX) {
        return Err(Error::DerivativeNoise(to_f64(gap)));
    }

    let mut s = [T::zero(); 12];
    let mut xv = Complex::new(T::zero(), T::zero());
    let mut xp = Complex::new(T::zero(), T::zero());
    for l in 0..rows {
        let eps = state.clock.energy(l);
        let mu = order.inverse_mass(&params, eps);
        let inv_m = params.mass_of(eps).recip();
        let mut prob = T::zero();
        for (k, &p) in ps.iter().enumerate() {
            let idx = l * n + k;
            let a = psi[idx];
            let q = a.norm_sqr();
            prob += q;
            s[0] += q * p;
            s[1] += q * p * p;
            s[2] += q * mu * p;
            s[3] += q * mu * mu * p * p;
            s[4] += q * inv_m * p;
            s[5] += q * inv_m * inv_m * p * p;
            let xc = xpsi[idx].conj() * a;
            xv = xv + xc * (mu * p);
            xp = xp + xc * p;
        }
        s[6] += prob * eps;
        s[7] += prob * eps * eps;
        s[8] += prob * inv_m;
        s[9] += prob * inv_m * inv_m;
    }
    for v in s.iter_mut() {
        *v *= w;
    }
    let (xv, xp) = (xv * w, xp * w);
    let mean_p = s[0];
    let mean_v = s[2];
    let mean_v_exact = s[4];
    let mean_hc = s[6];

    let (mean_tau, var_tau) = match &state.clock {
        ClockSpec::Ideal(c) => {
            let dt = derivative(psi, rows, n, c.spacing());
            let tpsi: Vec<_> = dt.extrapolated.iter().map(|a| a * i_hbar).collect();
            let mean = psi
                .iter()
                .zip(&tpsi)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<T>()
                * w;
            let second = tpsi.iter().map(|a| a.norm_sqr()).sum::<T>() * w;
            (Some(mean), Some(second - mean * mean))
        }
        ClockSpec::Discrete(_) => (None, None),
    };

    let var_hc = s[7] - mean_hc * mean_hc;
    Ok(MomentReport {
        t: state.evolution.t,
        norm,
        mean_x,
        var_x,
        mean_p,
        var_p: s[1] - mean_p * mean_p,
        mean_v,
        var_v: s[3] - mean_v * mean_v,
        var_v_exact: s[5] - mean_v_exact * mean_v_exact,
        cov_xv: xv.re - mean_x * mean_v,
        cov_xp: xp.re - mean_x * mean_p,
        mean_hc,
        var_hc,
        mean_inv_mass: s[8],
        mean_inv_mass_sq: s[9],
        mean_tau,
        var_tau,
        mbar: params.m + mean_hc / (params.c * params.c),
        lambda: params.lambda_of(var_hc.max(T::zero()).sqrt()),
        order,
    })
}

/// Reduced density matrix of a discrete clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockReducedState<T> {
    n: usize,
    rho: Vec<Complex<T>>,
}

impl<T: Real> ClockReducedState<T> {
    /// Wraps a row-major `n × n` matrix.
    pub fn from_matrix(n: usize, rho: Vec<Complex<T>>) -> Self {
        assert_eq!(rho.len(), n * n, "matrix size mismatch");
        Self { n, rho }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.rho[i * self.n + j]
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.rho
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn purity(&self) -> T {
        self.rho.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        T::hermitian_eigenvalues(&self.rho, self.n)
    }

    /// Trace within 1e-10 of one and no eigenvalue below −1e-10.
    pub fn is_valid(&self) -> bool {
        let floor = lit::<T>(-1e-10);
        (self.trace() - T::one()).abs() <= lit(1e-10)
            && self.eigenvalues().into_iter().all(|e| e >= floor)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.eigenvalues().into_iter().filter(|e| *e > tol).count()
    }
}

/// Traces out the centre of mass: ρ_ij = ∫dp Ψ(p, i) Ψ*(p, j).
pub fn reduce_clock<T: Real>(state: &CompositeState<T>) -> Result<ClockReducedState<T>> {
    if !matches!(state.clock, ClockSpec::Discrete(_)) {
        return Err(Error::ConfigInvalid(
            "reduced clock state needs a discrete clock".into(),
        ));
    }
    let r = state.n_rows();
    let dp = state.grid.spacing();
    let mut rho = vec![Complex::new(T::zero(), T::zero()); r * r];
    for i in 0..r {
        for j in i..r {
            let v = state
                .row(i)
                .iter()
                .zip(state.row(j))
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                    acc + a * b.conj()
                })
                * dp;
            rho[i * r + j] = v;
            rho[j * r + i] = v.conj();
        }
    }
    Ok(ClockReducedState { n: r, rho })
}

/// ‖a − b‖₁, the sum of singular values of the difference (no factor ½).
pub fn trace_distance<T: Real>(a: &ClockReducedState<T>, b: &ClockReducedState<T>) -> T {
    assert_eq!(a.n, b.n, "reduced states differ in dimension");
    let diff: Vec<_> = a.rho.iter().zip(&b.rho).map(|(x, y)| x - y).collect();
    hermitian_trace_norm(&diff, a.n)
}

/// Closed-time evaluation of ρ_c(t) for one state, reusing the pair products.
///
/// Diagonal entries are constants of motion; each off-diagonal entry is
/// Σ_k c_k exp(−i ω_k t) over the momentum grid.
pub struct CoherenceTrajectory<T> {
    n: usize,
    initial: ClockReducedState<T>,
    pairs: Vec<PairSeries<T>>,
}

struct PairSeries<T> {
    i: usize,
    j: usize,
    weights: Vec<Complex<T>>,
    freqs: Vec<T>,
}

impl<T: Real> CoherenceTrajectory<T> {
    pub fn new(state: &CompositeState<T>, order: HamiltonianOrder) -> Result<Self> {
        let initial = reduce_clock(state)?;
        let n = initial.n;
        let params = state.params;
        let dp = state.grid.spacing();
        let ps = state.grid.points();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (ei, ej) = (state.clock.energy(i), state.clock.energy(j));
                let raw: Vec<(Complex<T>, T)> = ps
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| {
                        let w = state.row(i)[k] * state.row(j)[k].conj() * dp;
                        let f = (order.energy(&params, ei, p) - order.energy(&params, ej, p))
                            / params.hbar;
                        (w, f)
                    })
                    .collect();
                let peak = raw.iter().map(|(w, _)| w.norm()).fold(T::zero(), T::max);
                let keep = peak * lit(1e-17);
                let (weights, freqs) = raw.into_iter().filter(|(w, _)| w.norm() > keep).unzip();
                pairs.push(PairSeries {
                    i,
                    j,
                    weights,
                    freqs,
                });
            }
        }
        Ok(Self { n, initial, pairs })
    }

    pub fn initial(&self) -> &ClockReducedState<T> {
        &self.initial
    }

    /// Largest angular frequency carried by any coherence.
    pub fn max_frequency(&self) -> T {
        self.pairs
            .iter()
            .flat_map(|s| s.freqs.iter().map(|f| f.abs()))
            .fold(T::zero(), T::max)
    }

    pub fn coherence(&self, pair: usize, t: T) -> Complex<T> {
        let s = &self.pairs[pair];
        s.weights
            .iter()
            .zip(&s.freqs)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (w, f)| {
                acc + w * Complex::from_polar(T::one(), -*f * t)
            })
    }

    pub fn rho_at(&self, t: T) -> ClockReducedState<T> {
        let mut rho = self.initial.rho.clone();
        for (idx, s) in self.pairs.iter().enumerate() {
            let v = self.coherence(idx, t);
            rho[s.i * self.n + s.j] = v;
            rho[s.j * self.n + s.i] = v.conj();
        }
        ClockReducedState { n: self.n, rho }
    }

    /// ‖ρ_c(t) − ρ_c(0)‖₁.
    pub fn distance(&self, t: T) -> T {
        if self.n == 2 {
            let d = self.coherence(0, t) - self.initial.get(0, 1);
            return d.norm() * lit(2.0);
        }
        trace_distance(&self.rho_at(t), &self.initial)
    }
}

/// First time the clock state has moved by `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<T> {
    pub t: T,
    /// The distance touches `delta` at a local maximum instead of crossing it.
    pub tangent: bool,
}

/// First time at which ‖ρ_c(t) − ρ_c(0)‖₁ = delta, scanning up to 10³ ħ/ΔH_c.
pub fn threshold_time<T: Real>(
    state: &CompositeState<T>,
    delta: T,
    order: HamiltonianOrder,
) -> Result<T> {
    let spread = state.var_energy().sqrt();
    if !(spread > T::zero()) {
        return Err(Error::ZeroSpread);
    }
    let t_max = lit::<T>(THRESHOLD_HORIZON) * state.params.hbar / spread;
    threshold_time_within(state, delta, order, t_max).map(|c| c.t)
}

/// As [`threshold_time`] with an explicit horizon, also reporting tangency.
pub fn threshold_time_within<T: Real>(
    state: &CompositeState<T>,
    delta: T,
    order: HamiltonianOrder,
    t_max: T,
) -> Result<Crossing<T>> {
    if !(delta > T::zero() && delta <= lit(2.0)) {
        return Err(Error::ConfigInvalid("delta must lie in (0, 2]".into()));
    }
    let traj = CoherenceTrajectory::new(state, order)?;
    first_crossing(|t| traj.distance(t), traj.max_frequency(), delta, t_max)
}

/// Scans `dist` on a grid fine against `omega_max`, then bisects on the first
/// crossing of `delta` or accepts a tangency within 1e-10.
pub(crate) fn first_crossing<T: Real>(
    dist: impl Fn(T) -> T,
    omega_max: T,
    delta: T,
    t_max: T,
) -> Result<Crossing<T>> {
    if !(omega_max > T::zero()) {
        return Err(Error::NotReached(to_f64(t_max)));
    }
    let h = T::PI() / (lit::<T>(8.0) * omega_max);
    let steps = (t_max / h).ceil().to_usize().unwrap_or(usize::MAX);
    let near = delta * lit(0.1);
    let tangent_tol = lit::<T>(1e-10);
    // Locate the maximum of `dist` on [lo, hi]: golden section, then two
    // symmetric-difference vertex steps to beat the flatness of the peak.
    let refine = |lo: T, hi: T| -> T {
        let (mut tm, _) = golden_section_max(&dist, lo, hi, h * lit(1e-9));
        for eta in [lit::<T>(1e-2), lit(1e-3)] {
            let e = h * eta;
            let (a, b, c) = (dist(tm - e), dist(tm), dist(tm + e));
            let curv = a - b - b + c;
            if curv < T::zero() {
                tm -= e * (c - a) / (curv * lit(2.0));
            }
        }
        tm
    };
    let (mut d2, mut d1) = (T::zero(), T::zero());
    for n in 1..=steps {
        let t = h * count(n);
        let d = dist(t);
        if d > delta + tangent_tol {
            return Ok(Crossing {
                t: bisect(&dist, t - h, t, delta),
                tangent: false,
            });
        }
        let touching = d >= delta;
        let peaked = n >= 2 && d1 > d2 && d1 >= d && delta - d1 <= near;
        if touching || peaked {
            let lo = if touching { t - h } else { t - h - h };
            let hi = if touching { t + h } else { t };
            let tm = refine(lo, hi);
            let dm = dist(tm);
            if dm > delta + tangent_tol {
                return Ok(Crossing {
                    t: bisect(&dist, lo, tm, delta),
                    tangent: false,
                });
            }
            if delta - dm <= tangent_tol {
                return Ok(Crossing {
                    t: tm,
                    tangent: true,
                });
            }
        }
        d2 = d1;
        d1 = d;
    }
    Err(Error::NotReached(to_f64(t_max)))
}

fn bisect<T: Real>(dist: &impl Fn(T) -> T, mut lo: T, mut hi: T, delta: T) -> T {
    let tol = lit::<T>(1e-13);
    while hi - lo > tol * hi {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist(mid) >= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::DiscreteClockSpec;
    use crate::grid::MomentumGrid;
    use crate::state::{make_gaussian_phase_space, make_mus_configuration_space};
    use approx::assert_relative_eq;

    fn params(c: f64) -> PhysicalParams<f64> {
        PhysicalParams::natural(c).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let g = MomentumGrid::covering(0.0, 0.0, 0.5, 256).unwrap();
        let s = make_gaussian_phase_space(
            params(5.0),
            g,
            DiscreteClockSpec::balanced_qubit(1.0).unwrap(),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(evolve(&s, 0.0, HamiltonianOrder::Exact), s);
    }

    #[test]
    fn exact_and_nonrelativistic_differ_by_rest_phase() {
        let p = params(3.0);
        let g = MomentumGrid::covering(0.0, 0.0, 0.5, 256).unwrap();
        let s =
            make_gaussian_phase_space(p, g, DiscreteClockSpec::single(0.0), 1.0, 0.0, 0.0).unwrap();
        let t = 0.8;
        let a = evolve(&s, t, HamiltonianOrder::Exact);
        let b = evolve(&s, t, HamiltonianOrder::NonRelativistic);
        let phase = Complex::from_polar(1.0, -p.rest_energy() * t);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn single_level_spreading() {
        let p = params(10.0);
        let t = 3.0;
        let g = MomentumGrid::for_evolution(0.0, 0.0, 0.5, t, 1.0, 1.0).unwrap();
        let s =
            make_gaussian_phase_space(p, g, DiscreteClockSpec::single(0.0), 1.0, 0.0, 0.0).unwrap();
        let m = compute_moments(&evolve(&s, t, HamiltonianOrder::NonRelativistic)).unwrap();
        assert_relative_eq!(m.var_x, 1.0 + (t / 2.0).powi(2), max_relative = 1e-9);
    }

    #[test]
    fn order_energies_agree_to_their_order() {
        let p = params(10.0);
        let (eps, mom) = (3.0, 1.5);
        let exact = HamiltonianOrder::Exact.energy(&p, eps, mom);
        let first = HamiltonianOrder::FirstOrder.energy(&p, eps, mom);
        let second = HamiltonianOrder::SecondOrder.energy(&p, eps, mom);
        let e = eps / p.rest_energy();
        assert!((exact - first).abs() < 2.0 * e * e * mom * mom / 2.0);
        assert!((exact - second).abs() < 2.0 * e.powi(3) * mom * mom / 2.0);
        let h = 1e-5;
        for o in HamiltonianOrder::ALL {
            let fd = (o.energy(&p, eps + h, mom) - o.energy(&p, eps - h, mom)) / (2.0 * h);
            assert_relative_eq!(o.dilation(&p, eps, mom), fd, max_relative = 1e-8);
            let fd_p = (o.energy(&p, eps, mom + h) - o.energy(&p, eps, mom - h)) / (2.0 * h);
            assert_relative_eq!(o.inverse_mass(&p, eps) * mom, fd_p, max_relative = 1e-8);
        }
    }

    #[test]
    fn conserved_quantities() {
        let p = params(6.0);
        let g = MomentumGrid::covering(0.0, 0.0, 1.0, 1024).unwrap();
        let s = make_mus_configuration_space(
            p,
            g,
            DiscreteClockSpec::qubit(4.0, 0.5).unwrap(),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let e = evolve(&s, 2.5, HamiltonianOrder::Exact);
        assert!((e.norm() - s.norm()).abs() < 1e-12);
        assert!((e.mean_energy() - s.mean_energy()).abs() < 1e-12);
    }

    #[test]
    fn separable_reduction_is_rank_one() {
        let g = MomentumGrid::covering(0.0, 0.0, 0.5, 256).unwrap();
        let s = make_gaussian_phase_space(
            params(5.0),
            g,
            DiscreteClockSpec::qubit(1.0, 0.4).unwrap(),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let r = reduce_clock(&s).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.rank(1e-10), 1);
        assert_relative_eq!(
            r.get(0, 1).norm(),
            0.4f64.cos() * 0.4f64.sin(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn orthogonal_projectors_are_two_apart() {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        let a = ClockReducedState::from_matrix(2, vec![o, z, z, z]);
        let b = ClockReducedState::from_matrix(2, vec![z, z, z, o]);
        assert_relative_eq!(trace_distance(&a, &b), 2.0, epsilon = 1e-12);
        assert_eq!(trace_distance(&a, &a), 0.0);
    }

    #[test]
    fn isolated_qubit_orthogonalizes_at_pi_over_gap() {
        let gap = 0.7;
        let g = MomentumGrid::covering(0.0, 0.0, 0.5, 256).unwrap();
        let s = make_gaussian_phase_space(
            params(5.0),
            g,
            DiscreteClockSpec::balanced_qubit(gap).unwrap(),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let t = threshold_time(&s, 2.0, HamiltonianOrder::NonRelativistic).unwrap();
        assert_relative_eq!(t, std::f64::consts::PI / gap, max_relative = 1e-10);
        let half = threshold_time(&s, 1.0, HamiltonianOrder::NonRelativistic).unwrap();
        // 2|sin(gap t / 2)| = 1
        assert_relative_eq!(half, 2.0 * (0.5f64).asin() / gap, max_relative = 1e-12);
    }

    #[test]
    fn unreachable_threshold_is_reported() {
        let g = MomentumGrid::covering(0.0, 0.0, 0.5, 256).unwrap();
        let s = make_gaussian_phase_space(
            params(5.0),
            g,
            DiscreteClockSpec::qubit(1.0, 0.2).unwrap(),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let r = threshold_time(&s, 1.5, HamiltonianOrder::NonRelativistic);
        assert!(matches!(r, Err(Error::NotReached(_))));
    }
}
