use std::sync::Arc;

use proptest::prelude::*;
use scw_core::forms::{boundary_stokes_check, random_point, random_tangent, BaseSpace, DifferentialForm, Tangent};
use scw_core::invariants::p1;
use scw_core::liegroup::MatrixGroup;
use scw_core::matrix::{max_abs_diff, CMat};
use scw_core::report::Tolerances;
use scw_core::sampling::{SampleRng, SeedStream};
use scw_core::shulman::{descent_suite, kappa};
use scw_core::simplicial::{eg_right_action, gamma, normal_form, MonotoneMap, NerveLevel};
use scw_core::suites::random_polynomial_one_form;

fn group(spec: &str) -> Arc<MatrixGroup> {
    Arc::new(spec.parse().unwrap())
}

fn rng(seed: u64) -> SampleRng {
    SeedStream::new(seed, "properties").rng(0)
}

fn tuple(g: &MatrixGroup, len: usize, rng: &mut SampleRng) -> Vec<CMat> {
    (0..len).map(|_| g.sample_group(rng)).collect()
}

fn tuple_diff(a: &[CMat], b: &[CMat]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| max_abs_diff(x, y)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_roundtrips(m in 0usize..6, mut values in prop::collection::vec(0usize..6, 1..7)) {
        for v in values.iter_mut() {
            *v = (*v).min(m);
        }
        values.sort();
        let f = MonotoneMap::new(m + 1, values).unwrap();
        prop_assert_eq!(normal_form(&f).recompose().unwrap(), f);
    }

    #[test]
    fn kappa_is_alternating_and_bilinear(seed in any::<u64>(), level in 1usize..4, a in -2.0f64..2.0) {
        let g = group("su:2");
        let k = kappa(level, g).form;
        let mut r = rng(seed);
        let base = k.base().clone();
        let p = random_point(&base, &mut r);
        let (u, v, w) = (random_tangent(&base, &p, &mut r), random_tangent(&base, &p, &mut r), random_tangent(&base, &p, &mut r));
        let uv = k.value(&p, &[u.clone(), v.clone()]);
        let vu = k.value(&p, &[v.clone(), u.clone()]);
        prop_assert!(uv.clone().add(vu).norm() < 1e-12 * (1.0 + uv.norm()));
        let mixed = k.value(&p, &[u.scaled(a).plus(&w), v.clone()]);
        let expected = uv.scale(a.into()).add(k.value(&p, &[w, v]));
        prop_assert!(mixed.max_abs_diff(&expected) < 1e-11 * (1.0 + expected.norm()));
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let g = group("so:3");
        let base = BaseSpace::new(1, 1, g);
        let w = DifferentialForm::maurer_cartan_left(base.clone(), 0);
        let cubic = w.wedge(&w).unwrap().wedge(&w).unwrap().trace_of_product().unwrap();
        let dt = DifferentialForm::dt(base.clone(), 1);
        let lhs = dt.wedge(&cubic).unwrap();
        let rhs = cubic.wedge(&dt).unwrap().scale(-1.0);
        let mut r = rng(seed);
        let p = random_point(&base, &mut r);
        let args: Vec<Tangent> = (0..4).map(|_| random_tangent(&base, &p, &mut r)).collect();
        let (a, b) = (lhs.value(&p, &args), rhs.value(&p, &args));
        prop_assert!(a.max_abs_diff(&b) < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn bg_faces_satisfy_simplicial_equations(seed in any::<u64>(), n in 2usize..5) {
        let g = group("su:2");
        let mut r = rng(seed);
        let x = tuple(&g, n, &mut r);
        let top = NerveLevel::base(n, 2);
        let below = NerveLevel::base(n - 1, 2);
        for j in 0..=n {
            for i in 0..j {
                let lhs = below.face(i, &top.face(j, &x).unwrap()).unwrap();
                let rhs = below.face(j - 1, &top.face(i, &x).unwrap()).unwrap();
                prop_assert!(tuple_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_is_invariant_and_simplicial(seed in any::<u64>(), n in 1usize..5) {
        let g = group("so:3");
        let mut r = rng(seed);
        let x = tuple(&g, n + 1, &mut r);
        let h = g.sample_group(&mut r);
        let gx = gamma(&x).unwrap();
        prop_assert!(tuple_diff(&gamma(&eg_right_action(&x, &h)).unwrap(), &gx) < 1e-12);
        let (eg, bg) = (NerveLevel::total(n, 3), NerveLevel::base(n, 3));
        for i in 0..=n {
            let lhs = gamma(&eg.face(i, &x).unwrap()).unwrap();
            prop_assert!(tuple_diff(&lhs, &bg.face(i, &gx).unwrap()) < 1e-12);
            let lhs = gamma(&eg.degeneracy(i, &x).unwrap()).unwrap();
            prop_assert!(tuple_diff(&lhs, &bg.degeneracy(i, &gx).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn stokes_on_random_polynomial_forms(seed in any::<u64>(), degree in 0u32..4) {
        let g = group("su:2");
        let phi = random_polynomial_one_form(2, degree, &mut rng(seed));
        let r = boundary_stokes_check(&phi.to_form(g.clone()), Some(&phi.exterior_derivative(g))).unwrap();
        prop_assert!(r < 1e-10);
    }

    #[test]
    fn p1_is_symmetric_and_invariant(seed in any::<u64>()) {
        let f = p1();
        for spec in ["su:3", "so:4"] {
            let g = group(spec);
            let mut r = rng(seed);
            let (a, b) = (g.sample_algebra(&mut r), g.sample_algebra(&mut r));
            let s = g.sample_group(&mut r);
            let ab = f.evaluate(&[a.clone(), b.clone()]).unwrap();
            let ba = f.evaluate(&[b.clone(), a.clone()]).unwrap();
            prop_assert!((ab - ba).norm() < 1e-12);
            prop_assert!(f.ad_invariance_residual(&s, &[a, b]).unwrap() < 1e-9);
        }
    }
}

#[test]
fn d_squared_vanishes_on_maurer_cartan_forms() {
    for spec in ["su:2", "so:3"] {
        let g = group(spec);
        let base = BaseSpace::new(1, 1, g.clone());
        let w = DifferentialForm::maurer_cartan_left(base.clone(), 0);
        let f = w.bracket_wedge(&w.times_function(|p| p.t[0] * p.t[0])).unwrap();
        let mut r = rng(5);
        for form in [w, f] {
            let dd = form.exterior_derivative().exterior_derivative();
            for _ in 0..5 {
                let p = random_point(&base, &mut r);
                let args: Vec<Tangent> = (0..dd.degree()).map(|_| random_tangent(&base, &p, &mut r)).collect();
                assert!(dd.value(&p, &args).norm() < 1e-4, "{spec}");
            }
        }
    }
}

#[test]
fn descent_is_lift_independent() {
    for spec in ["su:2", "so:3", "su:3"] {
        let report = descent_suite(group(spec), 10, 17, &Tolerances::default());
        for r in &report.records {
            assert!(r.pass, "{spec} {} {}", r.check_id, r.max_residual);
        }
    }
}
