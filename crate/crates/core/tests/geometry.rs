use proptest::prelude::*;

use symflow::cayley::{cayley, cayley_retract, contraction, omega_margin, sigma_commutation_check};
use symflow::flow::{flow_closed_form, flow_via_chart};
use symflow::group::{random_group_element, tangent_residual};
use symflow::harness::catalog::catalog;
use symflow::height::{height, HeightProblem};
use symflow::random::{random_skew, rng};
use symflow::scalar::Field;
use symflow::space::{cartan_embed, Manifold, Mode};
use symflow::tolerance::Tolerances;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::R), Just(Field::C), Just(Field::H)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_round_trip_and_tangency(f in field(), n in 1usize..=4, seed in any::<u64>()) {
        let a = random_group_element(n, f, seed).into_inner();
        let b = random_group_element(n, f, seed ^ 0x9e37).into_inner();
        prop_assume!(omega_margin(&a, &b) > 1e-3);
        let y = cayley(&a, &b).unwrap();
        let scale = y.norm_fro().max(1.0);
        prop_assert!(tangent_residual(&a.conj_transpose(), &y) < 1e-11 * scale);
        prop_assert!(cayley(&a.conj_transpose(), &y).unwrap().dist(&b) < 1e-11 * scale);
    }

    #[test]
    fn tangent_vectors_map_into_the_group(f in field(), n in 1usize..=4, seed in any::<u64>()) {
        let a = random_group_element(n, f, seed).into_inner();
        let mut r = rng(seed);
        let y = &random_skew(f, n, &mut r) * &a.conj_transpose();
        let g = cayley(&a.conj_transpose(), &y).unwrap();
        prop_assert!(g.unitary_defect() < 1e-12);
    }

    #[test]
    fn catalog_spaces_respect_sigma(space in 0usize..3, seed in any::<u64>()) {
        let e = &catalog()[space];
        let s = e.space.sigma().unwrap();
        let (f, n) = (e.space.field, e.space.n);
        let a = random_group_element(n, f, seed);
        let b = random_group_element(n, f, seed.wrapping_add(1));
        if omega_margin(&a, &b) > 1e-3 {
            prop_assert!(sigma_commutation_check(s, &a, &b).unwrap() < 1e-10);
        }
        let am = cartan_embed(s, &a).into_inner();
        let xm = cartan_embed(s, &b).into_inner();
        prop_assert!(s.model_defect(&am) < 1e-12);
        prop_assume!(omega_margin(&am, &xm) > 1e-3);
        for t in [0.0, 0.3, 0.7, 1.0] {
            let nu = contraction(&am, &xm, t).unwrap();
            prop_assert!(s.model_defect(&nu) < 1e-9);
            prop_assert!(nu.unitary_defect() < 1e-9);
        }
    }

    #[test]
    fn retraction_stays_on_manifold(space in 0usize..3, seed in any::<u64>(), scale in 0.01..3.0f64) {
        let e = &catalog()[space];
        for mode in [Mode::Group, Mode::Model] {
            let m = e.space.manifold(mode).unwrap();
            let mut r = rng(seed);
            let p = m.random_point(e.space.field, e.space.n, &mut r);
            let basis = m.tangent_basis(&p);
            let xi = basis.iter().enumerate().fold(p.scale(0.0), |acc, (k, b)| {
                &acc + &b.scale(scale * ((k as f64 + 1.0) * 0.37).sin())
            });
            let q = cayley_retract(&p, &xi).unwrap();
            prop_assert!(m.defect(&q) < 1e-10);
        }
    }

    #[test]
    fn gradient_flow_increases_height(seed in any::<u64>(), t in 0.05..3.0f64) {
        let e = &catalog()[2];
        let s = e.space.sigma().unwrap();
        let k = e.known_results.iter().find(|k| k.mode == Mode::Model).unwrap();
        let p = HeightProblem::new(Manifold::Model(s), k.x.clone()).unwrap();
        let tols = Tolerances::default();
        let center = &k.points[0];
        let alpha0 = cartan_embed(s, &random_group_element(2, Field::H, seed)).into_inner();
        prop_assume!(omega_margin(center, &alpha0) > 1e-3);
        let a0 = flow_closed_form(&p, center, &alpha0, 0.0, &tols).unwrap();
        let at = flow_closed_form(&p, center, &alpha0, t, &tols).unwrap();
        prop_assert!(a0.dist(&alpha0) < 1e-10);
        prop_assert!(s.model_defect(&at) < 1e-9);
        prop_assert!(height(&k.x, &at) >= height(&k.x, &alpha0) - 1e-10);
        let (beta, via) = flow_via_chart(&p, center, &alpha0, t, &tols).unwrap();
        prop_assert!(via.dist(&at) < 1e-9);
        prop_assert!(Manifold::Model(s).tangent_residual(&center.conj_transpose(), &beta) < 1e-9 * beta.norm_fro().max(1.0));
    }
}
