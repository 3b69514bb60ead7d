//! Quantum speed limits for a clock that dephases through its coupling to the
//! centre of mass.
//!
//! Pair sums run over ordered pairs i ≠ j. For an equal-weight qubit this
//! gives a leading time δħ/(2ΔH_c), which is what the exact pure-qubit
//! dynamics 2|sin(ΔH_c t/ħ)| requires.

use num_complex::Complex;

use crate::clock::ClockSpec;
use crate::dynamics::{reduce_clock, threshold_time, ClockReducedState, HamiltonianOrder};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::scalar::{hermitian_trace_norm, lit, to_f64, Real};
use crate::state::CompositeState;

/// Largest admitted relative size of the dynamical correction.
pub const DYNAMICAL_CORRECTION_MAX: f64 = 0.2;
/// Largest admitted second-order decay in the coherence prediction.
pub const DECAY_REGIME_MAX: f64 = 0.2;

/// Which bound a [`QslResult`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QslKind {
    MtPure,
    MixedTrace,
    DephasingStatic,
    DephasingDynamical,
}

/// Static rate S and dynamical coefficient D of the refined bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticDynamicSplit<T> {
    /// Σ |Δε_ij| |ρ_ij(0)| |1 − ⟨p²⟩_ij/2m²c²|.
    pub s: T,
    /// Σ |Δε_ij| |ρ_ij(0)| Δ²_r(p²_ij) (Δε_ij/2ħm²c²)².
    pub d: T,
}

/// A speed-limit time with the functional it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslResult<T> {
    pub delta: T,
    pub f_value: T,
    pub bound_time: T,
    /// First time the exact dynamics reaches `delta`; `None` if not within the horizon.
    pub oracle_time: Option<T>,
    pub kind: QslKind,
    pub split: Option<StaticDynamicSplit<T>>,
}

/// Mandelstam–Tamm orthogonalization bound πħ/(2ΔH).
pub fn mt_bound_pure<T: Real>(hbar: T, var_hc: T) -> Result<T> {
    if !(var_hc > T::zero()) {
        return Err(Error::ZeroSpread);
    }
    Ok(T::PI() * hbar / (lit::<T>(2.0) * var_hc.sqrt()))
}

/// ‖[ρ, H_c]‖₁ together with its triangle-inequality majorant Σ|ε_j − ε_i||ρ_ij|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceFunctional<T> {
    pub value: T,
    pub majorant: T,
}

pub fn coherence_functional_unitary<T: Real>(
    rho: &ClockReducedState<T>,
    energies: &[T],
) -> CoherenceFunctional<T> {
    let n = rho.dim();
    assert_eq!(
        energies.len(),
        n,
        "energies do not match the clock dimension"
    );
    let mut ic = vec![Complex::new(T::zero(), T::zero()); n * n];
    let mut majorant = T::zero();
    for i in 0..n {
        for j in 0..n {
            let gap = energies[j] - energies[i];
            ic[i * n + j] = rho.get(i, j) * Complex::new(T::zero(), gap);
            majorant += gap.abs() * rho.get(i, j).norm();
        }
    }
    CoherenceFunctional {
        value: hermitian_trace_norm(&ic, n),
        majorant,
    }
}

/// Mixed-state bound ħδ/‖[ρ, H_c]‖₁ for unitary clock dynamics.
pub fn mixed_trace_qsl<T: Real>(
    hbar: T,
    rho: &ClockReducedState<T>,
    energies: &[T],
    delta: T,
) -> QslResult<T> {
    let f = coherence_functional_unitary(rho, energies).value;
    QslResult {
        delta,
        f_value: f,
        bound_time: hbar * delta / f,
        oracle_time: None,
        kind: QslKind::MixedTrace,
        split: None,
    }
}

/// Cross-distribution moments of one ordered level pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossMoments<T> {
    pub i: usize,
    pub j: usize,
    /// ρ_ij = ∫dp Ψ(p,i) Ψ*(p,j).
    pub overlap: Complex<T>,
    pub mean_p2: Complex<T>,
    pub mean_p4: Complex<T>,
}

impl<T: Real> CrossMoments<T> {
    /// Modulus of ⟨p⁴⟩_ij − ⟨p²⟩_ij².
    pub fn var_p2(&self) -> T {
        (self.mean_p4 - self.mean_p2 * self.mean_p2).norm()
    }

    /// Modulus of ⟨Δ(p)⟩_ij with the first-order dilation 1 − p²/2m²c².
    pub fn mean_dilation(&self, params: &PhysicalParams<T>) -> T {
        let a = lit::<T>(2.0) * params.m * params.m * params.c * params.c;
        (Complex::new(T::one(), T::zero()) - self.mean_p2 / a).norm()
    }
}

fn discrete_energies<T: Real>(state: &CompositeState<T>) -> Result<Vec<T>> {
    match state.clock() {
        ClockSpec::Discrete(d) => Ok(d.energies()),
        ClockSpec::Ideal(_) => Err(Error::ConfigInvalid(
            "speed limits need a discrete clock".into(),
        )),
    }
}

/// Normalized cross averages of p² and p⁴ for levels (i, j).
pub fn cross_average<T: Real>(state: &CompositeState<T>, i: usize, j: usize) -> CrossMoments<T> {
    let dp = state.grid().spacing();
    let zero = Complex::new(T::zero(), T::zero());
    let (mut s0, mut s2, mut s4) = (zero, zero, zero);
    for ((a, b), p) in state
        .row(i)
        .iter()
        .zip(state.row(j))
        .zip(state.grid().points())
    {
        let w = a * b.conj();
        let p2 = p * p;
        s0 = s0 + w;
        s2 = s2 + w * p2;
        s4 = s4 + w * (p2 * p2);
    }
    CrossMoments {
        i,
        j,
        overlap: s0 * dp,
        mean_p2: s2 / s0,
        mean_p4: s4 / s0,
    }
}

fn check_dilation<T: Real>(state: &CompositeState<T>) -> Result<()> {
    let p = state.params();
    let g = state.grid();
    let edge = g.p_min.abs().max(g.p_max.abs());
    let min = T::one() - edge * edge / (lit::<T>(2.0) * p.m * p.m * p.c * p.c);
    if min <= T::zero() {
        return Err(Error::NegativeDilation(to_f64(min)));
    }
    Ok(())
}

/// Dephasing functional in integral form and in its explicit pair-sum form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingFunctional<T> {
    /// ∫dp Δ(p) ‖[⟨p|ρ|p⟩, H_c]‖₁.
    pub value: T,
    /// Σ |Δε_ij| |∫dp Δ(p) ρ_ij(p)|, equal to S.
    pub explicit: T,
}

/// Rate functional of a clock that dephases as a momentum-indexed mixture of
/// unitaries with first-order dilation Δ(p) = 1 − p²/2m²c².
pub fn dephasing_functional<T: Real>(state: &CompositeState<T>) -> Result<DephasingFunctional<T>> {
    let energies = discrete_energies(state)?;
    check_dilation(state)?;
    let params = state.params();
    let n = state.n_p();
    let a = lit::<T>(2.0) * params.m * params.m * params.c * params.c;
    let mut value = T::zero();
    for (k, p) in state.grid().points().into_iter().enumerate() {
        // ⟨p|ρ|p⟩ is rank one, so ‖[ρ_p, H]‖₁ = 2 √(w⟨H²⟩ − ⟨H⟩²) with unnormalized moments.
        let (mut w, mut h1, mut h2) = (T::zero(), T::zero(), T::zero());
        for (l, e) in energies.iter().enumerate() {
            let q = state.amplitudes()[l * n + k].norm_sqr();
            w += q;
            h1 += q * *e;
            h2 += q * *e * *e;
        }
        let spread = (w * h2 - h1 * h1).max(T::zero()).sqrt();
        value += (T::one() - p * p / a) * spread * lit(2.0);
    }
    value *= state.grid().spacing();
    let split = static_dynamic_split(state)?;
    Ok(DephasingFunctional {
        value,
        explicit: split.s,
    })
}

/// S and D from the cross distributions of every ordered pair.
pub fn static_dynamic_split<T: Real>(state: &CompositeState<T>) -> Result<StaticDynamicSplit<T>> {
    let energies = discrete_energies(state)?;
    check_dilation(state)?;
    let params = state.params();
    let k = lit::<T>(2.0) * params.hbar * params.m * params.m * params.c * params.c;
    let (mut s, mut d) = (T::zero(), T::zero());
    for i in 0..energies.len() {
        for j in (i + 1)..energies.len() {
            let cm = cross_average(state, i, j);
            let gap = (energies[j] - energies[i]).abs();
            let r = cm.overlap.norm();
            // Both orders (i, j) and (j, i) contribute equally.
            s += lit::<T>(2.0) * gap * r * cm.mean_dilation(params);
            d += lit::<T>(2.0) * gap * r * cm.var_p2() * (gap / k).powi(2);
        }
    }
    Ok(StaticDynamicSplit { s, d })
}

fn oracle<T: Real>(state: &CompositeState<T>, delta: T) -> Result<Option<T>> {
    match threshold_time(state, delta, HamiltonianOrder::Exact) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotReached(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check_delta<T: Real>(delta: T) -> Result<()> {
    if !(delta > T::zero() && delta < lit(2.0)) {
        return Err(Error::ConfigInvalid("delta must lie in (0, 2)".into()));
    }
    Ok(())
}

/// ħδ/F with the dephasing functional, without the oracle time.
pub fn static_qsl_bound<T: Real>(state: &CompositeState<T>, delta: T) -> Result<QslResult<T>> {
    check_delta(delta)?;
    let f = dephasing_functional(state)?.value;
    Ok(QslResult {
        delta,
        f_value: f,
        bound_time: state.params().hbar * delta / f,
        oracle_time: None,
        kind: QslKind::DephasingStatic,
        split: None,
    })
}

/// [`static_qsl_bound`] with the exact-dynamics threshold time attached.
pub fn static_qsl<T: Real>(state: &CompositeState<T>, delta: T) -> Result<QslResult<T>> {
    let mut r = static_qsl_bound(state, delta)?;
    r.oracle_time = oracle(state, delta)?;
    Ok(r)
}

/// (δħ/S)(1 + ħ²Dδ²/(6S³)) from S and D.
pub fn refined_time<T: Real>(hbar: T, split: &StaticDynamicSplit<T>, delta: T) -> Result<T> {
    if !(split.s > T::zero()) {
        return Err(Error::ZeroSpread);
    }
    let corr = hbar * hbar * split.d * delta * delta / (lit::<T>(6.0) * split.s.powi(3));
    if corr > lit(DYNAMICAL_CORRECTION_MAX) {
        return Err(Error::RegimeViolation(format!(
            "dynamical correction {:.3} exceeds {}",
            to_f64(corr),
            DYNAMICAL_CORRECTION_MAX
        )));
    }
    Ok(delta * hbar / split.s * (T::one() + corr))
}

/// Refined bound including the decay of coherence during the evolution, without the oracle time.
pub fn dynamical_qsl_bound<T: Real>(state: &CompositeState<T>, delta: T) -> Result<QslResult<T>> {
    check_delta(delta)?;
    let split = static_dynamic_split(state)?;
    Ok(QslResult {
        delta,
        f_value: split.s,
        bound_time: refined_time(state.params().hbar, &split, delta)?,
        oracle_time: None,
        kind: QslKind::DephasingDynamical,
        split: Some(split),
    })
}

/// [`dynamical_qsl_bound`] with the exact-dynamics threshold time attached.
pub fn dynamical_qsl<T: Real>(state: &CompositeState<T>, delta: T) -> Result<QslResult<T>> {
    let mut r = dynamical_qsl_bound(state, delta)?;
    r.oracle_time = oracle(state, delta)?;
    Ok(r)
}

/// Δ²(p²) of a Gaussian momentum distribution: 2Δ²p(Δ²p + 2p0²).
pub fn var_p2_gaussian<T: Real>(var_p: T, p0: T) -> T {
    lit::<T>(2.0) * var_p * (var_p + lit::<T>(2.0) * p0 * p0)
}

/// Leading-order Δ²_r(p²) of the minimum-uncertainty cross distribution:
/// (ħmΩ)²/2 + 2ħΩm³v0².
pub fn var_p2_mus<T: Real>(params: &PhysicalParams<T>, omega: T, v0: T) -> T {
    let (h, m) = (params.hbar, params.m);
    (h * m * omega).powi(2) / lit(2.0) + lit::<T>(2.0) * h * omega * m.powi(3) * v0 * v0
}

/// Closed-form pair data (|ρ_01(0)|, ⟨p²⟩_01, Δ²_r(p²_01)) of a two-level
/// minimum-uncertainty state, exact in the masses.
pub fn mus_pair_exact<T: Real>(
    params: &PhysicalParams<T>,
    weights: (T, T),
    eps: (T, T),
    omega: T,
    v0: T,
) -> (T, T, T) {
    let (mi, mj) = (params.mass_of(eps.0), params.mass_of(eps.1));
    let two = lit::<T>(2.0);
    let r = (weights.0 * weights.1).sqrt()
        * (two * (mi * mj).sqrt() / (mi + mj)).sqrt()
        * (-(mi - mj).powi(2) * v0 * v0 / (two * params.hbar * omega * (mi + mj))).exp();
    let s2 = mi * mj / (mi + mj) * params.hbar * omega;
    let mu = two * mi * mj / (mi + mj) * v0;
    let var = two * s2 * s2 + lit::<T>(4.0) * mu * mu * s2;
    (r, s2 + mu * mu, var)
}

/// Qubit specialization of the refined bound from pair data: gap Δε,
/// coherence |ρ_01(0)|, ⟨p²⟩_01 and Δ²_r(p²_01). With `var_p2 = 0` it is the
/// static bound.
pub fn qubit_qsl<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    gap: T,
    rho01: T,
    mean_p2: T,
    var_p2: T,
) -> T {
    let a = mean_p2 / (lit::<T>(2.0) * params.m * params.m * params.c * params.c);
    let s = lit::<T>(2.0) * gap * rho01 * (T::one() - a);
    let k = lit::<T>(2.0) * params.hbar * params.m * params.m * params.c * params.c;
    let d = lit::<T>(2.0) * gap * rho01 * var_p2 * (gap / k).powi(2);
    let h = params.hbar;
    delta * h / s * (T::one() + h * h * d * delta * delta / (lit::<T>(6.0) * s.powi(3)))
}

/// Separable Gaussian qubit with level weights (w0, w1): static bound.
pub fn qubit_static_gaussian<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    gap: T,
    weights: (T, T),
    var_p: T,
    p0: T,
) -> T {
    qubit_qsl(
        params,
        delta,
        gap,
        (weights.0 * weights.1).sqrt(),
        var_p + p0 * p0,
        T::zero(),
    )
}

/// Separable Gaussian qubit: refined bound.
pub fn qubit_dynamical_gaussian<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    gap: T,
    weights: (T, T),
    var_p: T,
    p0: T,
) -> T {
    let r = (weights.0 * weights.1).sqrt();
    qubit_qsl(
        params,
        delta,
        gap,
        r,
        var_p + p0 * p0,
        var_p2_gaussian(var_p, p0),
    )
}

/// Equal-weight separable Gaussian qubit, expanded to first order in the
/// dilation: (δħ/2ΔH)(1 + (Δ²p + p0²)/2m²c²).
pub fn qubit_static_gaussian_expanded<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    spread_h: T,
    var_p: T,
    p0: T,
) -> T {
    let a = (var_p + p0 * p0) / (lit::<T>(2.0) * params.m * params.m * params.c * params.c);
    delta * params.hbar / (lit::<T>(2.0) * spread_h) * (T::one() + a)
}

/// Two-level minimum-uncertainty state with levels `eps` and weights
/// `weights`: static (`dynamical = false`) or refined bound, exact in the masses.
pub fn qubit_qsl_mus<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    eps: (T, T),
    weights: (T, T),
    omega: T,
    v0: T,
    dynamical: bool,
) -> T {
    let (r, p2, var) = mus_pair_exact(params, weights, eps, omega, v0);
    let var = if dynamical { var } else { T::zero() };
    qubit_qsl(params, delta, (eps.1 - eps.0).abs(), r, p2, var)
}

/// Second-order expansion of the minimum-uncertainty static bound:
/// t_lead [1 + (ħΩm̄/2 + m̄²v0²)/2m²c² + (Δε/mc²)²(1/16 + m v0²/4ħΩ)] with
/// t_lead = δħ/(2Δε√(w0 w1)).
pub fn qubit_static_mus_expanded<T: Real>(
    params: &PhysicalParams<T>,
    delta: T,
    eps: (T, T),
    weights: (T, T),
    omega: T,
    v0: T,
) -> T {
    let (h, m) = (params.hbar, params.m);
    let mc2 = params.rest_energy();
    let gap = (eps.1 - eps.0).abs();
    let mbar = m + (eps.0 + eps.1) / (lit::<T>(2.0) * params.c * params.c);
    let lead = delta * h / (lit::<T>(2.0) * gap * (weights.0 * weights.1).sqrt());
    let dil = (h * omega * mbar / lit(2.0) + mbar * mbar * v0 * v0) / (lit::<T>(2.0) * m * mc2);
    let ent =
        (gap / mc2).powi(2) * (lit::<T>(1.0 / 16.0) + m * v0 * v0 / (lit::<T>(4.0) * h * omega));
    lead * (T::one() + dil + ent)
}

/// Predicted |ρ_ij(t)| for one level pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDecay<T> {
    pub i: usize,
    pub j: usize,
    pub initial: T,
    pub predicted: T,
    /// k in |ρ_ij(t)| ≈ |ρ_ij(0)| (1 − k t²).
    pub quadratic_coefficient: T,
}

/// Short-time coherence decay |ρ_ij(0)| [1 − ½ (tΔε_ij/(2ħm·mc²))² Δ²_r(p²_ij)].
pub fn coherence_decay_prediction<T: Real>(
    state: &CompositeState<T>,
    t: T,
) -> Result<Vec<PairDecay<T>>> {
    let energies = discrete_energies(state)?;
    let params = state.params();
    let k = lit::<T>(2.0) * params.hbar * params.m * params.rest_energy();
    let mut out = Vec::new();
    for i in 0..energies.len() {
        for j in (i + 1)..energies.len() {
            let cm = cross_average(state, i, j);
            let gap = energies[j] - energies[i];
            let coef = (gap / k).powi(2) * cm.var_p2() / lit(2.0);
            let decay = coef * t * t;
            if decay > lit(DECAY_REGIME_MAX) {
                return Err(Error::RegimeViolation(format!(
                    "predicted second-order decay {:.3} exceeds {}",
                    to_f64(decay),
                    DECAY_REGIME_MAX
                )));
            }
            let initial = cm.overlap.norm();
            out.push(PairDecay {
                i,
                j,
                initial,
                predicted: initial * (T::one() - decay),
                quadratic_coefficient: coef,
            });
        }
    }
    Ok(out)
}

/// Reduced state and |ρ_ij| table of the prepared state, as a convenience for reports.
pub fn coherence_table<T: Real>(state: &CompositeState<T>) -> Result<Vec<(usize, usize, T)>> {
    let rho = reduce_clock(state)?;
    let n = rho.dim();
    Ok((0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, rho.get(i, j).norm()))
        .collect())
}
