//! Property-based tests for the invariants of each module.

use mmd_core::algebra::{algebra_distance, commutant, MatrixStarAlgebra};
use mmd_core::amplifier::{Amplifier, CascadeConfig};
use mmd_core::crossed::{convolution_rep, convolve};
use mmd_core::group::{FiniteAbelianGroup, GroupFunction};
use mmd_core::instrument::Instrument;
use mmd_core::kt::{kt_v, kt_w, verify_relations};
use mmd_core::linalg::{
    identity, kron, random_density, random_matrix, random_unit_vector, unitarity_residual, CMatrix,
    C64,
};
use mmd_core::operator::{DensityState, Signature, StateVector};
use mmd_core::rep::{snag_decompose, UnitaryRep};
use mmd_core::ssb::{ssb_checks, SubgroupSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(1usize..=4, 1..=2)
        .prop_map(|orders| FiniteAbelianGroup::new(&orders).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characters_are_homomorphisms(g in small_group(), a in 0usize..16, b in 0usize..16, c in 0usize..16) {
        let n = g.order();
        let (gamma, u, v) = (a % n, b % n, c % n);
        let lhs = g.character(gamma, g.op(u, v));
        let rhs = g.character(gamma, u) * g.character(gamma, v);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn fourier_is_unitary_and_squares_to_parity(g in small_group(), seed in any::<u64>()) {
        let f = g.fourier_matrix();
        prop_assert!(unitarity_residual(&f) < 1e-12);
        let x = GroupFunction(random_unit_vector(&mut rng(seed), g.order()));
        let twice = g.fourier(&g.fourier(&x).unwrap()).unwrap();
        for u in g.elements() {
            prop_assert!((twice.values()[u] - x.values()[g.inverse(u)]).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_inverts_tensor(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut r = rng(seed);
        let a = DensityState::single(random_density(&mut r, d1)).unwrap();
        let b = DensityState::single(random_density(&mut r, d2)).unwrap();
        let ab = a.tensor(&b);
        prop_assert!((ab.partial_trace(&[0]).unwrap().matrix() - a.matrix()).norm() < 1e-12);
        prop_assert!((ab.partial_trace(&[1]).unwrap().matrix() - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn leg_application_matches_embedding(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sig = Signature::new(vec![2, 3, 2]);
        let op = random_matrix(&mut r, 4, 4);
        let v = random_unit_vector(&mut r, 12);
        let direct = sig.apply_on_legs(&op, &[2, 0], &v).unwrap();
        let embedded = sig.embed(&op, &[2, 0]).unwrap() * &v;
        prop_assert!((direct - embedded).norm() < 1e-12);
    }

    #[test]
    fn spectral_measure_reconstructs(g in small_group(), seed in any::<u64>(), dim in 1usize..5) {
        let rep = UnitaryRep::random(&g, dim, &mut rng(seed)).unwrap();
        prop_assert!(rep.homomorphism_residual() < 1e-10);
        let e = snag_decompose(&rep, seed).unwrap();
        prop_assert!(e.reconstruction_residual(&rep) < 1e-9);
        let total = e.support().iter().fold(CMatrix::zeros(dim, dim), |acc, &chi| acc + e.projection(chi));
        prop_assert!((total - identity(dim)).norm() < 1e-9);
    }

    #[test]
    fn kac_takesaki_relations(g in small_group(), seed in any::<u64>(), dim in 1usize..4) {
        prop_assert!(kt_w(&g).pentagon_residual() < 1e-10);
        prop_assert!(kt_v(&g.dual()).pentagon_residual() < 1e-10);
        let rep = UnitaryRep::random(&g, dim, &mut rng(seed)).unwrap();
        for check in verify_relations(&rep, seed).unwrap() {
            prop_assert!(check.pass, "{}: {:e}", check.relation, check.residual);
        }
    }

    #[test]
    fn instrument_is_additive_affine_and_repeatable(g in small_group(), seed in any::<u64>(), dim in 1usize..5) {
        let mut r = rng(seed);
        let rep = UnitaryRep::random(&g, dim, &mut r).unwrap();
        let inst = Instrument::on_full_system(&rep, seed).unwrap();
        let w1 = DensityState::single(random_density(&mut r, dim)).unwrap();
        let w2 = DensityState::single(random_density(&mut r, dim)).unwrap();
        let support = inst.support().to_vec();
        let total: f64 = support.iter().map(|&chi| inst.probability(&w1, &[chi]).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        if support.len() >= 2 {
            let (d1, d2) = support.split_at(support.len() / 2);
            let joint = inst.probability(&w1, &support).unwrap();
            let split = inst.probability(&w1, d1).unwrap() + inst.probability(&w1, d2).unwrap();
            prop_assert!((joint - split).abs() < 1e-12);
        }
        let delta = &support[..1];
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = DensityState::single(w1.matrix() * C64::from(t) + w2.matrix() * C64::from(1.0 - t)).unwrap();
            let lhs = inst.operation(mix.matrix(), delta).unwrap();
            let rhs = inst.operation(w1.matrix(), delta).unwrap() * C64::from(t)
                + inst.operation(w2.matrix(), delta).unwrap() * C64::from(1.0 - t);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
        for &chi in &support {
            if inst.probability(&w1, &[chi]).unwrap() > 1e-6 {
                let post = inst.posterior(&w1, &[chi]).unwrap();
                prop_assert!((inst.probability(&post, &[chi]).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cascade_preserves_norm_and_branches(g in small_group(), seed in any::<u64>(), dim in 1usize..4, stages in 1usize..4) {
        let mut r = rng(seed);
        let rep = UnitaryRep::random(&g, dim, &mut r).unwrap();
        let amp = Amplifier::new(&rep, CascadeConfig::new(stages).unwrap(), seed).unwrap();
        let xi = StateVector::single(random_unit_vector(&mut r, dim)).unwrap();
        let out = amp.amplify(&xi).unwrap();
        prop_assert!((out.vector().norm() - 1.0).abs() < 1e-10);
        let analytic = amp.amplify_analytic(&xi).unwrap().densify(1 << 14).unwrap();
        prop_assert!((out.vector() - analytic).norm() < 1e-9);
        let weight: f64 = out.branch_decompose().unwrap().iter().map(|b| b.amplitude * b.amplitude).sum();
        prop_assert!((weight - 1.0).abs() < 1e-10);
    }

    #[test]
    fn convolution_is_multiplicative(g in small_group(), seed in any::<u64>(), dim in 1usize..3) {
        let mut r = rng(seed);
        let rep = UnitaryRep::random(&g, dim, &mut r).unwrap();
        let f1: Vec<CMatrix> = g.elements().map(|_| random_matrix(&mut r, dim, dim)).collect();
        let f2: Vec<CMatrix> = g.elements().map(|_| random_matrix(&mut r, dim, dim)).collect();
        let lhs = convolution_rep(&convolve(&f1, &f2, &rep).unwrap(), &rep).unwrap();
        let rhs = convolution_rep(&f1, &rep).unwrap() * convolution_rep(&f2, &rep).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn double_commutant_is_stable(seed in any::<u64>(), n in 2usize..5, k in 1usize..3) {
        let mut r = rng(seed);
        // sparse-ish generators so that proper subalgebras appear
        let gens: Vec<CMatrix> = (0..k)
            .map(|_| {
                let d = CMatrix::from_diagonal(&mmd_core::linalg::random_vector(&mut r, n));
                let q = mmd_core::linalg::random_unitary(&mut r, n);
                if seed % 2 == 0 { &q * d * q.adjoint() } else { d }
            })
            .collect();
        let a = MatrixStarAlgebra::generate(n, &gens).unwrap();
        let aa = commutant(&commutant(&a));
        prop_assert!(algebra_distance(&a, &aa) < 1e-9);
        prop_assert!(a.closure_residual() < 1e-9);
    }

    #[test]
    fn subgroup_bookkeeping(g in small_group(), a in 0usize..16, b in 0usize..16) {
        let n = g.order();
        let spec = SubgroupSpec::generated(&g, &[a % n, b % n]);
        prop_assert!(ssb_checks(&spec).unwrap().all());
        prop_assert_eq!(spec.order() * spec.index(), n);
    }

    #[test]
    fn tensor_of_unitaries_is_unitary(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut r = rng(seed);
        let u = kron(&mmd_core::linalg::random_unitary(&mut r, d1), &mmd_core::linalg::random_unitary(&mut r, d2));
        prop_assert!(unitarity_residual(&u) < 1e-12);
    }
}
