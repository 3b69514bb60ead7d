use approx::assert_relative_eq;
use proptest::prelude::*;
use stqrf_core::spatial::general_min_spread;
use stqrf_core::{
    compute_moments_with, evolve, reduce_clock, relational_tradeoff_check, HamiltonianOrder,
    StateSampler,
};

const ORDERS: [HamiltonianOrder; 4] = [
    HamiltonianOrder::Exact,
    HamiltonianOrder::FirstOrder,
    HamiltonianOrder::SecondOrder,
    HamiltonianOrder::NonRelativistic,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_is_unitary_and_composes(seed in any::<u64>(), index in 0u64..1000, k in 0usize..4) {
        let s = StateSampler::new(seed).moving(true).sample::<f64>(index).unwrap();
        let order = ORDERS[k];
        let (t1, t2) = (0.4 * s.t, 0.6 * s.t);
        let once = evolve(&s.state, s.t, order);
        let twice = evolve(&evolve(&s.state, t1, order), t2, order);
        prop_assert!((once.norm() - s.state.norm()).abs() < 1e-12);
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn clock_reduction_is_a_density_matrix(seed in any::<u64>(), index in 0u64..1000) {
        let s = StateSampler::new(seed).moving(true).sample::<f64>(index).unwrap();
        let rho = reduce_clock(&evolve(&s.state, s.t, HamiltonianOrder::Exact)).unwrap();
        prop_assert!(rho.is_valid());
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn oracle_spread_never_beats_the_bounds(seed in any::<u64>(), index in 0u64..1000) {
        let s = StateSampler::new(seed).sample::<f64>(index).unwrap();
        let bounds = general_min_spread(&s.state, s.t).unwrap();
        let m = compute_moments_with(&evolve(&s.state, s.t, HamiltonianOrder::Exact), HamiltonianOrder::Exact).unwrap();
        prop_assert!(m.var_x >= bounds.bound_exact * (1.0 - 1e-9));
        prop_assert!(bounds.bound_exact > 0.0);
    }

    #[test]
    fn sampling_is_a_pure_function_of_seed_and_index(seed in any::<u64>(), index in 0u64..1000) {
        let a = StateSampler::new(seed).moving(true).sample::<f64>(index).unwrap();
        let b = StateSampler::new(seed).moving(true).sample::<f64>(index).unwrap();
        prop_assert_eq!(a.state.amplitudes(), b.state.amplitudes());
        prop_assert_eq!(a.t, b.t);
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let sampler = StateSampler::new(5).moving(true);
    for index in 0..6 {
        let lo = sampler.sample::<f32>(index).unwrap();
        let hi = sampler.sample::<f64>(index).unwrap();
        let m32 = compute_moments_with(
            &evolve(&lo.state, lo.t, HamiltonianOrder::Exact),
            HamiltonianOrder::Exact,
        )
        .unwrap();
        let m64 = compute_moments_with(
            &evolve(&hi.state, hi.t, HamiltonianOrder::Exact),
            HamiltonianOrder::Exact,
        )
        .unwrap();
        assert!(m32.var_x.is_finite());
        assert_relative_eq!(m32.var_x as f64, m64.var_x, max_relative = 1e-3);
        assert_relative_eq!(m32.var_hc as f64, m64.var_hc, max_relative = 1e-3);
        assert_relative_eq!(m32.norm as f64, 1.0, epsilon = 1e-4);
    }
}

#[test]
fn relational_tradeoff_holds_over_ideal_frames() {
    let sampler = StateSampler::new(17);
    for index in 0..12 {
        let s = sampler.ideal_sample::<f64>(index).unwrap();
        let r = relational_tradeoff_check(&s.state, 0.0, s.tau0).unwrap();
        r.assumption().unwrap();
        assert!(r.holds(), "frame {index}: slack {}", r.slack);
        assert!(r.dx > 0.0 && r.dtau > 0.0);
    }
}
