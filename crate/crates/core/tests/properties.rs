use proptest::prelude::*;
use qrecover::divergences::{self, AlphaParameter};
use qrecover::linalg::{
    alpha_norm, eig, identity, kron, matrix_function, max_abs, mpow, partial_trace, support_projector, trace, CMat,
    SupportConvention,
};
use qrecover::measures::{self, ChannelTriple, MinMax, TripartiteState};
use qrecover::objects::{
    gaussian_matrix, petz_recovery, random_density, random_density_with, random_unitary, seeded_rng, stinespring,
    validate_density, Channel,
};
use rand::Rng;

fn conv() -> SupportConvention {
    SupportConvention::default()
}

fn hermitian(seed: u64, d: usize, rank: usize) -> CMat {
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(d, rank, &mut rng);
    let h = gaussian_matrix(d, rank, &mut rng);
    // indefinite, rank-limited
    &g * g.adjoint() - &h * h.adjoint().scale(0.5)
}

fn random_channel(seed: u64, din: usize, dout: usize) -> Channel {
    let mut rng = seeded_rng(seed);
    let k = rng.random_range(din.div_ceil(dout)..=din * dout);
    Channel::random(din, dout, k, &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identity_function_projects_onto_support(seed in any::<u64>(), rank in 1usize..=4) {
        let m = hermitian(seed, 4, rank);
        let f = matrix_function(&m, |x| x, conv()).unwrap();
        let p = support_projector(&m, conv()).unwrap();
        prop_assert!(max_abs(&(f - &p * &m * &p)) < 1e-10 * max_abs(&m).max(1.0));
    }

    #[test]
    fn powers_compose_on_the_support(seed in any::<u64>(), rank in 1usize..=5, pi in 0usize..4, qi in 0usize..4) {
        let exps = [-1.0, -0.5, 0.5, 1.0];
        let (p, q) = (exps[pi], exps[qi]);
        let rho = random_density(&[5], rank, seed).unwrap();
        let lhs = mpow(rho.matrix(), p, conv()).unwrap() * mpow(rho.matrix(), q, conv()).unwrap();
        let rhs = mpow(rho.matrix(), p + q, conv()).unwrap();
        let scale = eig(&rhs).unwrap().eigenvalues.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-8 * scale);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), which in 0usize..3) {
        let m = gaussian_matrix(12, 12, &mut seeded_rng(seed));
        let r = partial_trace(&m, &[2, 3, 2], &[which]).unwrap();
        prop_assert!((trace(&m) - trace(&r)).norm() < 1e-12 * trace(&m).norm().max(1.0) * 10.0);
    }

    #[test]
    fn alpha_norm_is_unitarily_invariant(seed in any::<u64>(), ai in 0usize..5) {
        let alphas = [0.5, 1.0, 1.7, 2.0, f64::INFINITY];
        let mut rng = seeded_rng(seed);
        let x = gaussian_matrix(4, 4, &mut rng);
        let u = random_unitary(4, &mut rng);
        let v = random_unitary(4, &mut rng);
        let a = alphas[ai];
        let n = alpha_norm(&x, a);
        prop_assert!((alpha_norm(&(&u * &x * &v), a) - n).abs() < 1e-10 * n);
    }

    #[test]
    fn gram_matrices_share_power_traces(seed in any::<u64>(), ai in 0usize..4) {
        let alphas = [0.25, 0.75, 1.5, 1.9];
        let a = alphas[ai];
        let x = gaussian_matrix(3, 5, &mut seeded_rng(seed));
        let left = trace(&mpow(&(&x * x.adjoint()), 1.0 / (1.0 - a), conv()).unwrap()).re;
        let right = trace(&mpow(&(x.adjoint() * &x), 1.0 / (1.0 - a), conv()).unwrap()).re;
        prop_assert!((left - right).abs() < 1e-9 * left.abs().max(1.0));
    }

    #[test]
    fn adjoint_is_unital(seed in any::<u64>(), din in 1usize..5, dout in 1usize..5) {
        let ch = random_channel(seed, din, dout);
        prop_assert!(max_abs(&(ch.adjoint_apply(&identity(dout)).unwrap() - identity(din))) < 1e-12);
    }

    #[test]
    fn stinespring_reproduces_channel(seed in any::<u64>()) {
        let ch = random_channel(seed, 3, 2);
        let st = stinespring(&ch).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut e = CMat::zeros(3, 3);
                e[(i, j)] = qrecover::linalg::c(1.0, 0.0);
                prop_assert!(max_abs(&(st.apply(&e).unwrap() - ch.apply(&e).unwrap())) < 1e-12);
            }
        }
    }

    #[test]
    fn random_states_are_valid(seed in any::<u64>(), rank in 1usize..=6) {
        let rho = random_density(&[2, 3], rank, seed).unwrap();
        prop_assert!(validate_density(rho.matrix(), &[2, 3], 1e-10).is_ok());
    }

    #[test]
    fn petz_recovery_is_trace_preserving_on_output_support(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let sigma = random_density_with(&[4], rank, &mut rng).unwrap();
        let ch = Channel::random(4, 3, 2, &mut rng);
        let r = petz_recovery(&sigma, &ch, conv()).unwrap();
        let p = support_projector(&ch.apply(sigma.matrix()).unwrap(), conv()).unwrap();
        prop_assert!(max_abs(&(r.kraus_gram() - &p)) < 1e-9);
    }

    #[test]
    fn min_max_divergences_are_nonnegative(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let omega = random_density_with(&[3], 3, &mut rng).unwrap();
        let tau = random_density_with(&[3], 3, &mut rng).unwrap().into_matrix().scale(rng.random_range(0.3..1.0));
        prop_assert!(divergences::d_min(&omega, &tau).unwrap() >= -1e-10);
        prop_assert!(divergences::d_max(&omega, &tau).unwrap() >= -1e-10);
        for a in [0.5, 0.8, 1.5, 3.0] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!(divergences::sandwiched_div(&omega, &tau, p).unwrap() >= -1e-10);
            if a < 2.0 {
                prop_assert!(divergences::renyi_div(&omega, &tau, p).unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn data_processing(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let rho = random_density_with(&[4], 4, &mut rng).unwrap();
        let sigma = random_density_with(&[4], 4, &mut rng).unwrap();
        let ch = Channel::random(4, 2, 3, &mut rng);
        let (nr, ns) = (ch.apply(rho.matrix()).unwrap(), ch.apply(sigma.matrix()).unwrap());
        for a in [0.3, 0.7, 1.4, 2.0] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!(divergences::renyi_div(&nr, &ns, p).unwrap() <= divergences::renyi_div(&rho, &sigma, p).unwrap() + 1e-9);
        }
        for a in [0.5, 0.75, 1.5, 4.0] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!(divergences::sandwiched_div(&nr, &ns, p).unwrap() <= divergences::sandwiched_div(&rho, &sigma, p).unwrap() + 1e-9);
        }
    }

    #[test]
    fn measures_are_locally_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let rho = random_density_with(&[2, 2, 2], 8, &mut rng).unwrap();
        let u = kron(&kron(&random_unitary(2, &mut rng), &random_unitary(2, &mut rng)), &random_unitary(2, &mut rng));
        let rot = validate_density(&(&u * rho.matrix() * u.adjoint()), &[2, 2, 2], 1e-9).unwrap();
        let (s, r) = (TripartiteState::new(rho).unwrap(), TripartiteState::new(rot).unwrap());
        prop_assert!((measures::von_neumann_cmi(&s).unwrap() - measures::von_neumann_cmi(&r).unwrap()).abs() < 1e-9);
        for a in [0.5, 1.5] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!((measures::renyi_cmi(&s, p).unwrap() - measures::renyi_cmi(&r, p).unwrap()).abs() < 1e-9);
            prop_assert!((measures::sandwiched_cmi(&s, p).unwrap() - measures::sandwiched_cmi(&r, p).unwrap()).abs() < 1e-9);
        }
        for kind in [MinMax::Min, MinMax::Max] {
            prop_assert!((measures::minmax_cmi(&s, kind).unwrap() - measures::minmax_cmi(&r, kind).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn cmi_equals_relative_entropy_difference(seed in any::<u64>()) {
        let s = TripartiteState::new(random_density(&[2, 3, 2], 12, seed).unwrap()).unwrap();
        let t = ChannelTriple::from_tripartite(&s).unwrap();
        for a in [0.25, 0.75, 1.25, 1.75] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!((measures::renyi_cmi(&s, p).unwrap() - measures::delta_alpha(&t, p).unwrap()).abs() < 1e-9);
        }
        for a in [0.6, 0.9, 2.0, 5.0] {
            let p = AlphaParameter::new(a).unwrap();
            prop_assert!((measures::sandwiched_cmi(&s, p).unwrap() - measures::delta_tilde_alpha(&t, p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn power_f_divergence_matches_renyi(seed in any::<u64>(), ai in 0usize..4) {
        let a = [0.3, 0.8, 1.5, 2.0][ai];
        let mut rng = seeded_rng(seed);
        let rho = random_density_with(&[3], 3, &mut rng).unwrap();
        let sigma = random_density_with(&[3], 3, &mut rng).unwrap();
        let f = divergences::f_divergence(&rho, &sigma, |x| x.powf(a)).unwrap();
        let d = divergences::renyi_div(&rho, &sigma, AlphaParameter::new(a).unwrap()).unwrap();
        let expect = ((a - 1.0) * d).exp2();
        prop_assert!((f - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn min_max_vanish_on_equal_states(seed in any::<u64>(), rank in 1usize..=3) {
        let omega = random_density(&[3], rank, seed).unwrap();
        prop_assert!(divergences::d_min(&omega, &omega).unwrap().abs() <= 1e-8);
        prop_assert!(divergences::d_max(&omega, &omega).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn min_max_separate_distant_states(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let omega = random_density_with(&[3], 3, &mut rng).unwrap();
        let tau = random_density_with(&[3], 3, &mut rng).unwrap();
        let dist = 0.5 * qrecover::linalg::trace_norm(&(omega.matrix() - tau.matrix()));
        prop_assume!(dist >= 0.1);
        prop_assert!(divergences::d_min(&omega, &tau).unwrap() > 1e-6);
        prop_assert!(divergences::d_max(&omega, &tau).unwrap() > 1e-6);
    }
}
