//! The relational position operator and its variance.
//!
//! x̃ = x̂_s + (p̂_s/m_s){τ̂ − τ₀, Δ̂⁻¹} − (x̂_r + p̂_r{τ̂ − τ₀, (m̂Δ̂)⁻¹} − x₀)
//!
//! with x̂ = iħ∂_p, τ̂ = iħ∂_ε and {A, B} = (AB + BA)/2. Joint vectors are laid
//! out as index (l·n_p + k)·n_s + s over (energy, rod momentum, system momentum).

use num_complex::Complex;

use super::dilation::DilationSpectrum;
use crate::clock::IdealClockSpec;
use crate::deriv::derivative_extrapolated;
use crate::dynamics::{compute_moments_with, HamiltonianOrder};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{CompositeState, SystemSpec};

/// Largest admitted edge/peak ratio of Δ̂⁻¹Ψ.
pub const EDGE_AMPLIFICATION_MAX: f64 = 1e-8;
/// Slack budget of relativistic inequalities, in units of λ³.
pub const EXPANSION_SLACK: f64 = 10.0;

type C<T> = Complex<T>;

fn inner<T: Real>(a: &[C<T>], b: &[C<T>], w: T) -> C<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C<T>>() * w
}

/// Matrix-free action of the operator pieces on a (energy, rod, system) array.
struct Layout<T> {
    dil: DilationSpectrum<T>,
    clock: IdealClockSpec<T>,
    ps: Vec<T>,
    dp: T,
    n_s: usize,
    tau0: T,
}

impl<T: Real> Layout<T> {
    fn n_p(&self) -> usize {
        self.ps.len()
    }

    fn i_hbar(&self) -> C<T> {
        C::new(T::zero(), self.dil.params.hbar)
    }

    fn energy_of(&self, idx: usize) -> T {
        self.clock.point(idx / (self.n_p() * self.n_s))
    }

    fn momentum_of(&self, idx: usize) -> T {
        self.ps[(idx / self.n_s) % self.n_p()]
    }

    /// x̂_r v.
    fn rod_position(&self, v: &[C<T>]) -> Vec<C<T>> {
        let ih = self.i_hbar();
        derivative_extrapolated(v, self.n_p(), self.n_s, self.dp)
            .into_iter()
            .map(|a| a * ih)
            .collect()
    }

    /// (τ̂ − τ₀) v.
    fn shifted_time(&self, v: &[C<T>]) -> Vec<C<T>> {
        let ih = self.i_hbar();
        derivative_extrapolated(
            v,
            self.clock.n_eps,
            self.n_p() * self.n_s,
            self.clock.spacing(),
        )
        .into_iter()
        .zip(v)
        .map(|(d, a)| d * ih - a * self.tau0)
        .collect()
    }

    /// {τ̂ − τ₀, g} v for a real multiplier g(p_r, ε).
    fn anticommutator(&self, v: &[C<T>], g: impl Fn(T, T) -> T) -> Vec<C<T>> {
        let gv: Vec<C<T>> = v
            .iter()
            .enumerate()
            .map(|(i, a)| a * g(self.momentum_of(i), self.energy_of(i)))
            .collect();
        let t_gv = self.shifted_time(&gv);
        let tv = self.shifted_time(v);
        t_gv.iter()
            .zip(&tv)
            .enumerate()
            .map(|(i, (a, b))| (a + b * g(self.momentum_of(i), self.energy_of(i))) * lit::<T>(0.5))
            .collect()
    }

    /// {τ̂ − τ₀, Δ̂⁻¹} v.
    fn dilated_time(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.anticommutator(v, |p, e| self.dil.value(p, e).recip())
    }

    /// p̂_r {τ̂ − τ₀, (m̂Δ̂)⁻¹} v.
    fn rod_drift(&self, v: &[C<T>]) -> Vec<C<T>> {
        let b = self.anticommutator(v, |p, e| self.dil.inverse_mass_dilation(p, e));
        b.into_iter()
            .enumerate()
            .map(|(i, a)| a * self.momentum_of(i))
            .collect()
    }

    /// (x̂_r + p̂_r{τ̂ − τ₀, (m̂Δ̂)⁻¹} − x₀) v.
    fn rod_reading(&self, v: &[C<T>], x0: T) -> Vec<C<T>> {
        let x = self.rod_position(v);
        let d = self.rod_drift(v);
        x.iter()
            .zip(&d)
            .zip(v)
            .map(|((a, b), c)| a + b - c * x0)
            .collect()
    }
}

fn layout<T: Real>(
    state: &CompositeState<T>,
    n_s: usize,
    tau0: T,
    order: HamiltonianOrder,
) -> Result<Layout<T>> {
    let clock = *state.clock().as_ideal().ok_or_else(|| {
        Error::ConfigInvalid("the relational position needs an ideal (continuous) clock".into())
    })?;
    let dil = DilationSpectrum::new(*state.params(), order);
    let ps = state.grid().points();
    dil.check_positive(&ps, &clock_points(&clock))?;
    Ok(Layout {
        dil,
        clock,
        ps,
        dp: state.grid().spacing(),
        n_s,
        tau0,
    })
}

fn clock_points<T: Real>(c: &IdealClockSpec<T>) -> Vec<T> {
    (0..c.n_eps).map(|l| c.point(l)).collect()
}

/// Fails if Δ̂⁻¹ lifts the amplitude on the truncation edge above the threshold.
fn check_edges<T: Real>(lay: &Layout<T>, psi: &[C<T>]) -> Result<()> {
    let (n_p, n_e) = (lay.n_p(), lay.clock.n_eps);
    let mut peak = T::zero();
    let mut edge = T::zero();
    for l in 0..n_e {
        for k in 0..n_p {
            let a = psi[l * n_p + k].norm() / lay.dil.value(lay.ps[k], lay.clock.point(l));
            peak = peak.max(a);
            if l == 0 || l == n_e - 1 || k == 0 || k == n_p - 1 {
                edge = edge.max(a);
            }
        }
    }
    let ratio = edge / peak;
    if !(ratio <= lit(EDGE_AMPLIFICATION_MAX)) {
        return Err(Error::RegimeViolation(format!(
            "inverse dilation lifts truncation-edge amplitudes to {:e} of the peak",
            to_f64(ratio)
        )));
    }
    Ok(())
}

/// Applies x̃ to the product state Ψ_rc ⊗ χ_s and returns the joint vector.
pub fn relational_position_apply<T: Real>(
    state: &CompositeState<T>,
    system: &SystemSpec<T>,
    x0: T,
    tau0: T,
    order: HamiltonianOrder,
) -> Result<Vec<C<T>>> {
    let lay = layout(state, system.grid.n_points, tau0, order)?;
    check_edges(&lay, state.amplitudes())?;
    let joint = product(state.amplitudes(), system.amplitudes());
    Ok(apply_joint(&lay, system, &joint, x0))
}

fn product<T: Real>(psi: &[C<T>], chi: &[C<T>]) -> Vec<C<T>> {
    psi.iter()
        .flat_map(|a| chi.iter().map(move |b| a * b))
        .collect()
}

fn apply_joint<T: Real>(lay: &Layout<T>, system: &SystemSpec<T>, v: &[C<T>], x0: T) -> Vec<C<T>> {
    let n_s = lay.n_s;
    let ih = lay.i_hbar();
    let ps_s = system.grid.points();
    let xs = derivative_extrapolated(v, n_s, 1, system.grid.spacing());
    let a = lay.dilated_time(v);
    let r = lay.rod_reading(v, x0);
    (0..v.len())
        .map(|i| xs[i] * ih + a[i] * (ps_s[i % n_s] / system.m_s) - r[i])
        .collect()
}

/// Mean and variance of x̃ from one application to the full joint vector.
pub fn joint_variance<T: Real>(
    state: &CompositeState<T>,
    system: &SystemSpec<T>,
    x0: T,
    tau0: T,
    order: HamiltonianOrder,
) -> Result<(T, T)> {
    let x = relational_position_apply(state, system, x0, tau0, order)?;
    let joint = product(state.amplitudes(), system.amplitudes());
    let w = state.cell_weight() * system.grid.spacing();
    let mean = inner(&joint, &x, w).re;
    let second = inner(&x, &x, w).re;
    Ok((mean, second - mean * mean))
}

/// Moments of the free system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMoments<T> {
    pub mean_x: T,
    pub var_x: T,
    pub mean_p: T,
    pub var_p: T,
    pub cov_xp: T,
}

pub fn system_moments<T: Real>(system: &SystemSpec<T>, hbar: T) -> SystemMoments<T> {
    let chi = system.amplitudes();
    let w = system.grid.spacing();
    let ih = C::new(T::zero(), hbar);
    let x: Vec<_> = derivative_extrapolated(chi, chi.len(), 1, w)
        .into_iter()
        .map(|a| a * ih)
        .collect();
    let ps = system.grid.points();
    let mean_x = inner(chi, &x, w).re;
    let var_x = inner(&x, &x, w).re - mean_x * mean_x;
    let mean_p: T = chi
        .iter()
        .zip(&ps)
        .map(|(a, p)| a.norm_sqr() * *p)
        .sum::<T>()
        * w;
    let p2: T = chi
        .iter()
        .zip(&ps)
        .map(|(a, p)| a.norm_sqr() * *p * *p)
        .sum::<T>()
        * w;
    let xp = x
        .iter()
        .zip(chi)
        .zip(&ps)
        .map(|((a, b), p)| (a.conj() * b).re * *p)
        .sum::<T>()
        * w;
    SystemMoments {
        mean_x,
        var_x,
        mean_p,
        var_p: p2 - mean_p * mean_p,
        cov_xp: xp - mean_x * mean_p,
    }
}

/// Contributions to Δ²x̃ in the nonrelativistic decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationalTerms<T> {
    pub var_x_r: T,
    /// (Δ²p_r/m_r²)(⟨τ̂⟩ − τ₀)².
    pub drift_term: T,
    /// (Δ²p_r/m_r²)Δ²τ_c.
    pub clock_term: T,
    /// 2(⟨τ̂⟩ − τ₀) Cov(x_r, p_r)/m_r.
    pub rod_correlation_term: T,
    /// Δ²x_s + (Δ²p_s/m_s²)⟨(τ̂ − τ₀)²⟩ + 2(⟨τ̂⟩ − τ₀) Cov(x_s, p_s)/m_s.
    pub system_terms: T,
    /// (⟨p_s⟩/m_s − ⟨p_r⟩/m_r)² Δ²τ_c.
    pub relative_motion_term: T,
    /// (1/√3)(ħ/m_r c)², the clock's floor on the relational spread.
    pub compton_term: T,
}

impl<T: Real> RelationalTerms<T> {
    /// Sum of every term except the Compton floor.
    pub fn closed_form(&self) -> T {
        self.var_x_r
            + self.drift_term
            + self.clock_term
            + self.rod_correlation_term
            + self.system_terms
            + self.relative_motion_term
    }
}

/// Successive lower bounds on the rod part of Δ²x̃, from tightest to loosest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundChain<T> {
    /// Δ²x_r + Δ²v_r τ₀² + (2/3)(Δ²p_r/m_r²)Δ²τ_c.
    pub spread_bound: T,
    /// ħ|τ₀|/m̄_r + (ħ|τ₀|/m_r)Δ²H_c/(m_r²c⁴).
    pub energy_bound: T,
    /// ħ|τ₀|/m̄_r + (1/√3)(ħ/m_r c)², valid at the optimum over states.
    pub compton_bound: T,
    /// √(2/3)(ħ/m_r)Δτ_c, the floor when no proper time has elapsed.
    pub init_time_bound: T,
}

/// A term of the expansion omitted from the bounds, with its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroppedTerm<T> {
    pub name: &'static str,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationalVarianceReport<T> {
    /// Δ²x̃ including the system.
    pub total: T,
    /// Δ²x̃ in the classical-system limit m_s → ∞ (the rod part only).
    pub rod_total: T,
    pub mean: T,
    pub terms: RelationalTerms<T>,
    pub bound_chain: BoundChain<T>,
    pub dropped_terms: Vec<DroppedTerm<T>>,
    pub lambda: T,
    pub order: HamiltonianOrder,
}

impl<T: Real> RelationalVarianceReport<T> {
    /// 10 λ³, the relative slack allowed to relativistic inequalities.
    pub fn slack(&self) -> T {
        lit::<T>(EXPANSION_SLACK) * self.lambda.powi(3)
    }

    /// rod_total ≥ spread_bound ≥ energy_bound and rod_total ≥ compton_bound, each within the slack.
    pub fn chain_holds(&self) -> bool {
        let s = T::one() - self.slack();
        let b = &self.bound_chain;
        self.rod_total >= b.spread_bound * s
            && b.spread_bound >= b.energy_bound * s
            && self.rod_total >= b.compton_bound * s
            && self.rod_total >= b.init_time_bound * s
    }
}

/// Δ²x̃ for a product of the STQRF state and a system state.
///
/// The total comes from applying x̃ once to each factor and contracting the
/// Gram matrices of the pieces; the terms are closed forms in the moments.
pub fn relational_variance<T: Real>(
    state: &CompositeState<T>,
    system: &SystemSpec<T>,
    x0: T,
    tau0: T,
    order: HamiltonianOrder,
) -> Result<RelationalVarianceReport<T>> {
    let params = *state.params();
    let hbar = params.hbar;
    let m = params.m;
    let lay = layout(state, 1, tau0, order)?;
    let psi = state.amplitudes();
    check_edges(&lay, psi)?;
    let w = state.cell_weight();

    // Pieces of x̃ = Σ_a u_a ⊗ w_a.
    let a_psi = lay.dilated_time(psi);
    let r_psi = lay.rod_reading(psi, x0);
    let rc = [psi.to_vec(), a_psi, r_psi];

    let chi = system.amplitudes();
    let ws = system.grid.spacing();
    let ih = C::new(T::zero(), hbar);
    let ps_s = system.grid.points();
    let u_x: Vec<_> = derivative_extrapolated(chi, chi.len(), 1, ws)
        .into_iter()
        .map(|a| a * ih)
        .collect();
    let u_p: Vec<_> = chi
        .iter()
        .zip(&ps_s)
        .map(|(a, p)| a * (*p / system.m_s))
        .collect();
    let u_1: Vec<_> = chi.iter().map(|a| -a).collect();
    let sys = [u_x, u_p, u_1];

    let mut second = T::zero();
    let mut mean = T::zero();
    for i in 0..3 {
        mean += (inner(chi, &sys[i], ws) * inner(psi, &rc[i], w)).re;
        for j in 0..3 {
            second += (inner(&sys[i], &sys[j], ws) * inner(&rc[i], &rc[j], w)).re;
        }
    }
    let total = second - mean * mean;
    let r_mean = inner(psi, &rc[2], w).re;
    let rod_total = inner(&rc[2], &rc[2], w).re - r_mean * r_mean;

    let nr = compute_moments_with(state, HamiltonianOrder::NonRelativistic)?;
    let rel = compute_moments_with(state, order)?;
    let mean_tau = nr.mean_tau.unwrap_or_else(T::zero);
    let var_tau = nr.var_tau.unwrap_or_else(T::zero);
    let s = system_moments(system, hbar);
    let shift = mean_tau - tau0;
    let two = lit::<T>(2.0);
    let compton = (hbar / (m * params.c)).powi(2) / lit::<T>(3.0).sqrt();
    let terms = RelationalTerms {
        var_x_r: nr.var_x,
        drift_term: nr.var_p / (m * m) * shift * shift,
        clock_term: nr.var_p / (m * m) * var_tau,
        rod_correlation_term: two * shift * nr.cov_xp / m,
        system_terms: s.var_x
            + s.var_p / (system.m_s * system.m_s) * (var_tau + shift * shift)
            + two * shift * s.cov_xp / system.m_s,
        relative_motion_term: (s.mean_p / system.m_s - nr.mean_p / m).powi(2) * var_tau,
        compton_term: compton,
    };

    let c4 = params.rest_energy().powi(2) / (m * m);
    let elapsed = shift.abs();
    let lead = hbar * elapsed / rel.mbar;
    let bound_chain = BoundChain {
        spread_bound: rel.var_x
            + rel.var_v * shift * shift
            + two / lit(3.0) * rel.var_p / (m * m) * var_tau,
        energy_bound: lead + hbar * elapsed / m * rel.var_hc / (m * m * c4),
        compton_bound: lead + compton,
        init_time_bound: (two / lit(3.0)).sqrt() * hbar / m * var_tau.sqrt(),
    };
    let compton_time = hbar / params.rest_energy();
    let dropped_terms = vec![
        DroppedTerm {
            name: "ordering correction -(5/4)(var_p/m^2)(hbar/m c^2)^2",
            value: -lit::<T>(1.25) * rel.var_p / (m * m) * compton_time * compton_time,
        },
        DroppedTerm {
            name: "inverse-mass expansion remainder hbar|tau0|(<1/m> - (1/mbar)(1 + var_H/m^2c^4))",
            value: hbar
                * elapsed
                * (rel.mean_inv_mass - (T::one() + rel.var_hc / (m * m * c4)) / rel.mbar),
        },
    ];
    Ok(RelationalVarianceReport {
        total,
        rod_total,
        mean,
        terms,
        bound_chain,
        dropped_terms,
        lambda: rel.lambda,
        order,
    })
}

/// Relational space-time trade-off Δx̃ Δτ_c ≥ ½ √(ħ|τ₀|/m̄_r) ħ/(m_r c²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationalTradeoffReport<T> {
    pub dx: T,
    pub dtau: T,
    pub lhs: T,
    pub rhs: T,
    /// lhs / rhs.
    pub slack: T,
    /// Cov(p̂_r², τ̂_c²), assumed non-negative by the derivation.
    pub cov_p2_tau2: T,
    pub lambda: T,
}

impl<T: Real> RelationalTradeoffReport<T> {
    pub fn holds(&self) -> bool {
        self.slack >= T::one() - lit::<T>(EXPANSION_SLACK) * self.lambda.powi(3)
    }

    /// Reports a negative momentum-time correlation; tolerance is relative to ⟨p²⟩⟨τ²⟩ scale.
    pub fn assumption(&self) -> Result<()> {
        if self.cov_p2_tau2 < T::zero() {
            Err(Error::CorrelationAssumptionViolated(to_f64(
                self.cov_p2_tau2,
            )))
        } else {
            Ok(())
        }
    }
}

/// Evaluates the relational trade-off with the exact Hamiltonian and a classical system.
pub fn relational_tradeoff_check<T: Real>(
    state: &CompositeState<T>,
    x0: T,
    tau0: T,
) -> Result<RelationalTradeoffReport<T>> {
    let params = *state.params();
    let hbar = params.hbar;
    let lay = layout(state, 1, tau0, HamiltonianOrder::Exact)?;
    let psi = state.amplitudes();
    check_edges(&lay, psi)?;
    let w = state.cell_weight();
    let r = lay.rod_reading(psi, x0);
    let r_mean = inner(psi, &r, w).re;
    let var = inner(&r, &r, w).re - r_mean * r_mean;

    let ih = C::new(T::zero(), hbar);
    let n_p = lay.n_p();
    let t_psi: Vec<_> = derivative_extrapolated(psi, lay.clock.n_eps, n_p, lay.clock.spacing())
        .into_iter()
        .map(|a| a * ih)
        .collect();
    let mean_tau = inner(psi, &t_psi, w).re;
    let tau2 = inner(&t_psi, &t_psi, w).re;
    let p2 = |v: &[C<T>]| -> T {
        v.iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * lay.ps[i % n_p].powi(2))
            .sum::<T>()
            * w
    };
    let p2_tau2 = p2(&t_psi);
    let mean_p2 = p2(psi);
    let cov = p2_tau2 - mean_p2 * tau2;
    let scale = lit::<T>(1e-10) * mean_p2 * tau2;
    let cov = if cov.abs() < scale { T::zero() } else { cov };

    let moments = compute_moments_with(state, HamiltonianOrder::Exact)?;
    let dtau = (tau2 - mean_tau * mean_tau).sqrt();
    let dx = var.sqrt();
    let elapsed = (tau0 - mean_tau).abs();
    let lhs = dx * dtau;
    let rhs = lit::<T>(0.5) * (hbar * elapsed / moments.mbar).sqrt() * hbar / params.rest_energy();
    Ok(RelationalTradeoffReport {
        dx,
        dtau,
        lhs,
        rhs,
        slack: lhs / rhs,
        cov_p2_tau2: cov,
        lambda: moments.lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MomentumGrid;
    use crate::params::PhysicalParams;
    use crate::state::{make_ideal_clock_state, ComFamily};

    fn frame(
        c: f64,
        sigma_h: f64,
        sigma: f64,
        x0: f64,
        n_p: usize,
        n_e: usize,
    ) -> CompositeState<f64> {
        let params = PhysicalParams::new(1.0, c, 1.0).unwrap();
        let dp = 1.0 / (2.0 * sigma);
        let grid = MomentumGrid::covering(0.0, 0.0, dp, n_p).unwrap();
        let clock = IdealClockSpec::centered(0.0, sigma_h, 10.0, n_e).unwrap();
        make_ideal_clock_state(
            params,
            grid,
            clock,
            ComFamily::Gaussian { sigma, p0: 0.0, x0 },
        )
        .unwrap()
    }

    fn system(x0: f64, p0: f64, n: usize) -> SystemSpec<f64> {
        let grid = MomentumGrid::covering(p0, p0, 0.5, n).unwrap();
        SystemSpec::gaussian(1e4, grid, 1.0, 1.0, p0, x0).unwrap()
    }

    #[test]
    fn operator_is_hermitian_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let st = frame(10.0, 5.0, 1.0, 0.0, 64, 32);
        let sys = system(0.0, 0.0, 64);
        let lay = layout(&st, 64, 0.7, HamiltonianOrder::Exact).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 32 * 64 * 64;
        let mut rand_vec = || -> Vec<C<f64>> {
            (0..n)
                .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        };
        let (phi, psi) = (rand_vec(), rand_vec());
        let a = inner(&phi, &apply_joint(&lay, &sys, &psi, 0.3), 1.0);
        let b = inner(&apply_joint(&lay, &sys, &phi, 0.3), &psi, 1.0);
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn nonrelativistic_limit_is_relative_position_minus_drift() {
        let st = frame(10.0, 5.0, 1.0, 0.0, 64, 32);
        let grid = MomentumGrid::covering(0.0, 0.0, 0.5, 64).unwrap();
        let sys = SystemSpec::gaussian(1e12, grid, 1.0, 1.0, 0.0, 0.0).unwrap();
        let got = relational_position_apply(&st, &sys, 0.0, 0.0, HamiltonianOrder::NonRelativistic)
            .unwrap();
        // x̂_s − x̂_r − (p̂_r/m_r) τ̂_c assembled from independent pieces.
        let ih = C::new(0.0, 1.0);
        let psi = st.amplitudes();
        let chi = sys.amplitudes();
        let (n_p, n_s) = (st.n_p(), chi.len());
        let xs: Vec<_> = derivative_extrapolated(chi, n_s, 1, sys.grid.spacing())
            .into_iter()
            .map(|a| a * ih)
            .collect();
        let xr: Vec<_> = derivative_extrapolated(psi, n_p, 1, st.grid().spacing())
            .into_iter()
            .map(|a| a * ih)
            .collect();
        let clock = st.clock().as_ideal().unwrap();
        let tr: Vec<_> = derivative_extrapolated(psi, clock.n_eps, n_p, clock.spacing())
            .into_iter()
            .map(|a| a * ih)
            .collect();
        let ps = st.grid().points();
        let mut err = 0.0f64;
        for i in 0..psi.len() {
            for s in 0..n_s {
                let expected = psi[i] * xs[s] - xr[i] * chi[s] - tr[i] * ps[i % n_p] * chi[s];
                err = err.max((got[i * n_s + s] - expected).norm());
            }
        }
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn mean_is_relative_position_plus_offset() {
        let st = frame(10.0, 5.0, 1.0, 0.4, 512, 64);
        let sys = system(1.5, 0.0, 512);
        let r = relational_variance(&st, &sys, 0.25, 0.8, HamiltonianOrder::Exact).unwrap();
        assert!((r.mean - (1.5 - 0.4 + 0.25)).abs() < 1e-9, "{}", r.mean);
    }

    #[test]
    fn factorized_total_matches_joint_application() {
        let st = frame(10.0, 5.0, 1.0, 0.0, 512, 32);
        let sys = system(0.2, 0.3, 64);
        for order in [HamiltonianOrder::NonRelativistic, HamiltonianOrder::Exact] {
            let r = relational_variance(&st, &sys, 0.1, 0.9, order).unwrap();
            let (mean, var) = joint_variance(&st, &sys, 0.1, 0.9, order).unwrap();
            assert!(
                (r.total - var).abs() < 1e-10 * var,
                "{order}: {} vs {var}",
                r.total
            );
            assert!((r.mean - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn nonrelativistic_total_matches_closed_form() {
        let st = frame(10.0, 5.0, 0.8, 0.0, 512, 128);
        let sys = system(0.0, 0.0, 128);
        let r =
            relational_variance(&st, &sys, 0.0, 1.3, HamiltonianOrder::NonRelativistic).unwrap();
        let cf = r.terms.closed_form();
        assert!((r.total - cf).abs() < 1e-9 * cf, "{} vs {cf}", r.total);
    }

    #[test]
    fn translation_leaves_mean_and_variance_unchanged() {
        let sys_a = system(0.0, 0.0, 512);
        let sys_b = system(0.7, 0.0, 512);
        let a = relational_variance(
            &frame(10.0, 5.0, 1.0, 0.0, 512, 64),
            &sys_a,
            0.0,
            1.0,
            HamiltonianOrder::Exact,
        )
        .unwrap();
        let b = relational_variance(
            &frame(10.0, 5.0, 1.0, 0.7, 512, 64),
            &sys_b,
            0.0,
            1.0,
            HamiltonianOrder::Exact,
        )
        .unwrap();
        assert!((a.mean - b.mean).abs() < 1e-9, "{} vs {}", a.mean, b.mean);
        assert!(
            (a.total - b.total).abs() < 1e-9,
            "{} vs {}",
            a.total,
            b.total
        );
    }

    #[test]
    fn relativistic_chain_holds() {
        let st = frame(10.0, 5.0, 1.0, 0.0, 512, 128);
        let sys = system(0.0, 0.0, 64);
        for &tau0 in &[0.0, 0.3, 1.0] {
            let r = relational_variance(&st, &sys, 0.0, tau0, HamiltonianOrder::Exact).unwrap();
            assert!(r.chain_holds(), "tau0 = {tau0}: {r:?}");
        }
    }

    #[test]
    fn edge_amplification_is_rejected() {
        let params = PhysicalParams::new(1.0, 10.0, 1.0).unwrap();
        let grid = MomentumGrid::covering(0.0, 0.0, 0.5, 128).unwrap();
        let clock = IdealClockSpec::centered(0.0, 5.0, 4.0, 64).unwrap();
        let st = make_ideal_clock_state(
            params,
            grid,
            clock,
            ComFamily::Gaussian {
                sigma: 1.0,
                p0: 0.0,
                x0: 0.0,
            },
        )
        .unwrap();
        let sys = system(0.0, 0.0, 64);
        assert!(matches!(
            relational_variance(&st, &sys, 0.0, 1.0, HamiltonianOrder::Exact),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn tradeoff_holds_with_non_negative_correlation() {
        let st = frame(10.0, 5.0, 1.0, 0.0, 512, 128);
        let r = relational_tradeoff_check(&st, 0.0, 1.0).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.assumption().is_ok());
    }
}
