//! Property-based checks of the structural invariants the library promises:
//! basis indexing is a bijection, generated Hamiltonians are Hermitian,
//! Lindblad generators preserve the trace, steady states and propagated
//! states are physical, and propagation composes as a semigroup.
//!
//! Parameter sets are drawn from wide but physically valid ranges; case
//! counts are kept modest because each case solves dense linear algebra.

use proptest::prelude::*;
use rydcav::dynamics::{
    g2_tau, g2_zero, steady_state, DensityMatrix, Liouvillian, SolverOptions, SteadyStateMethod,
};
use rydcav::hilbert::Basis;
use rydcav::models::{KerrVariant, ModelSystem, ModelVariant};
use rydcav::params::PhysicalParams;

/// A generous but valid parameter region: both signs of the intermediate
/// detuning, drives from zero to strong, couplings from none to large.
fn arb_params() -> impl Strategy<Value = PhysicalParams> {
    (
        1e-3..0.5f64,                       // gamma_r
        0.05..2.0f64,                       // gamma_c
        (5.0..60.0f64, any::<bool>()),      // |delta_e| and its sign
        -2.0..2.0f64,                       // delta_r
        -12.0..6.0f64,                      // delta_c
        0.0..20.0f64,                       // omega_cf
        0.0..0.05f64,                       // alpha
        0.0..800.0f64,                      // collective coupling g^2 N
        1u32..5,                            // bubble_count
    )
        .prop_map(
            |(gamma_r, gamma_c, (de, neg), delta_r, delta_c, omega_cf, alpha, g2n, nb)| {
                let mut p = PhysicalParams::reference();
                p.gamma_r = gamma_r;
                p.gamma_c = gamma_c;
                p.delta_e = if neg { -de } else { de };
                p.delta_r = delta_r;
                p.delta_c = delta_c;
                p.omega_cf = omega_cf;
                p.alpha = alpha;
                p.g2n_override = Some(g2n);
                p.bubble_count = nb;
                p.atom_density = None;
                p.volume = None;
                p
            },
        )
        .prop_filter("dressed two-photon detuning must stay positive", |p| {
            p.derive_effective().is_ok()
        })
}

fn variants() -> impl Strategy<Value = ModelVariant> {
    prop_oneof![
        Just(ModelVariant::SpinBubble),
        Just(ModelVariant::TwoBosonKappaBar),
        Just(ModelVariant::TwoBosonKappaBarPrime),
        Just(ModelVariant::CavityOnly),
    ]
}

fn build(p: &PhysicalParams, variant: ModelVariant, cutoff: u32) -> Option<ModelSystem> {
    let eff = p.derive_effective().ok()?;
    match variant {
        ModelVariant::SpinBubble => ModelSystem::spin_bubble(p, &eff, cutoff).ok(),
        ModelVariant::TwoBosonKappaBar => {
            ModelSystem::two_boson(p, &eff, KerrVariant::KappaBar, cutoff).ok()
        }
        ModelVariant::TwoBosonKappaBarPrime => {
            ModelSystem::two_boson(p, &eff, KerrVariant::KappaBarPrime, cutoff).ok()
        }
        ModelVariant::CavityOnly => ModelSystem::cavity_only(p, cutoff).ok(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spin_basis_indexing_is_a_bijection(cutoff in 1u32..8, bubbles in 1u32..12) {
        let basis = Basis::spin_fock(cutoff, bubbles);
        for i in 0..basis.dim() {
            let (nr, nc) = basis.state(i);
            prop_assert!(nr <= bubbles.min(cutoff));
            prop_assert!(nr + nc <= cutoff);
            prop_assert_eq!(basis.index_of(nr, nc), Some(i));
        }
        for idx in basis.boundary_indices() {
            let (nr, nc) = basis.state(idx);
            prop_assert_eq!(nr + nc, cutoff);
        }
    }

    #[test]
    fn boson_basis_indexing_is_a_bijection(cutoff in 1u32..8, matter_max in 1u32..8) {
        let basis = Basis::boson_fock(cutoff, matter_max);
        for i in 0..basis.dim() {
            let (nr, nc) = basis.state(i);
            prop_assert!(nr <= matter_max.min(cutoff));
            prop_assert!(nr + nc <= cutoff);
            prop_assert_eq!(basis.index_of(nr, nc), Some(i));
        }
    }

    #[test]
    fn hamiltonians_are_hermitian(p in arb_params(), variant in variants(), cutoff in 2u32..5) {
        prop_assume!(!(variant == ModelVariant::TwoBosonKappaBarPrime && p.bubble_count < 2));
        let model = build(&p, variant, cutoff).expect("valid params must build");
        prop_assert!(model.hamiltonian().hermiticity_error() < 1e-12);
    }

    #[test]
    fn generators_annihilate_the_trace(p in arb_params(), variant in variants(), cutoff in 2u32..5) {
        prop_assume!(!(variant == ModelVariant::TwoBosonKappaBarPrime && p.bubble_count < 2));
        let model = build(&p, variant, cutoff).expect("valid params must build");
        let l = Liouvillian::build(&model).expect("generator");
        prop_assert!(l.trace_functional_residual() < 1e-10);
    }

    #[test]
    fn steady_states_are_physical(p in arb_params(), cutoff in 2u32..5) {
        let model = build(&p, ModelVariant::SpinBubble, cutoff).expect("valid params must build");
        let l = Liouvillian::build(&model).expect("generator");
        let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())
            .expect("steady state");
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-8);
        prop_assert!(rho.trace().im.abs() < 1e-8);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-8);
        prop_assert!(l.residual(&rho).expect("same basis") < 1e-10);
    }

    #[test]
    fn propagation_preserves_physicality(
        p in arb_params(),
        variant in variants(),
        cutoff in 2u32..5,
        t in 0.1..5.0f64,
    ) {
        prop_assume!(!(variant == ModelVariant::TwoBosonKappaBarPrime && p.bubble_count < 2));
        let model = build(&p, variant, cutoff).expect("valid params must build");
        let l = Liouvillian::build(&model).expect("generator");
        let rho = l.propagate(&DensityMatrix::vacuum(model.basis()), t).expect("propagate");
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(rho.trace().im.abs() < 1e-9);
        prop_assert!(rho.hermiticity_error() < 1e-9);
        prop_assert!(rho.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn propagation_composes_as_a_semigroup(
        p in arb_params(),
        cutoff in 2u32..4,
        t1 in 0.1..3.0f64,
        t2 in 0.1..3.0f64,
    ) {
        let model = build(&p, ModelVariant::SpinBubble, cutoff).expect("valid params must build");
        let l = Liouvillian::build(&model).expect("generator");
        let rho0 = DensityMatrix::vacuum(model.basis());
        let direct = l.propagate(&rho0, t1 + t2).expect("one step");
        let split = l
            .propagate(&l.propagate(&rho0, t1).expect("first leg"), t2)
            .expect("second leg");
        prop_assert!(direct.trace_distance(&split).expect("same basis") < 1e-10);
    }

    #[test]
    fn delayed_correlation_at_zero_delay_matches_the_static_value(
        p in arb_params(),
        cutoff in 2u32..4,
    ) {
        // The regression pathway at τ = 0 must reproduce the direct
        // steady-state pair correlator — but the ratio only makes sense with
        // some drive, so pin a nonzero one.
        let mut p = p;
        p.alpha = 0.02;
        let model = build(&p, ModelVariant::SpinBubble, cutoff).expect("valid params must build");
        let l = Liouvillian::build(&model).expect("generator");
        let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())
            .expect("steady state");
        let direct = g2_zero(&model, &rho).expect("static correlator");
        let trace = g2_tau(&model, &l, &rho, &[0.0, 0.5]).expect("delayed correlator");
        prop_assert!((trace.values[0] - direct).abs() <= 1e-8 * direct.max(1.0));
    }
}
