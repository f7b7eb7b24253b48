use proptest::prelude::*;

use stratkit_core::homological::{CoverKind, Resolver};
use stratkit_core::linalg::Vector;
use stratkit_core::presentation::{parse_presentation_with, PathPoly};
use stratkit_core::stratification::{check_hypotheses, truncate, Poset};
use stratkit_core::{complete_rewriting, radical_and_simples, AlgebraTable, Field, Module, RewriteSystem};

const SL2: &str = include_str!("../../../corpus/sl2_z0.strat");

fn sl2(z: &str, field: Option<u64>) -> (RewriteSystem, AlgebraTable, Poset) {
    let text = match field {
        Some(p) => SL2.replace("FIELD rational", &format!("FIELD prime {p}")),
        None => SL2.to_owned(),
    };
    let p = parse_presentation_with(&text, &[("z".into(), z.into())]).unwrap();
    let sys = complete_rewriting(&p, 8).unwrap();
    let a = sys.build_algebra();
    (sys, a, Poset::from_presentation(&p).unwrap())
}

fn z_value() -> impl Strategy<Value = String> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| format!("{n}/{d}"))
}

/// Words over the three arrows with small integer coefficients; terms that
/// do not compose, or that have other endpoints than the first term, are
/// dropped.
fn expression() -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0usize..3, 1..7), -4i64..=4), 1..6)
}

fn build_expression(sys: &RewriteSystem, terms: &[(Vec<usize>, i64)]) -> PathPoly {
    let q = sys.quiver();
    let field = sys.field();
    let mut poly = PathPoly::zero(field);
    let mut ends = None;
    for (word, c) in terms {
        let Some(path) = q.path_from_arrows(word) else { continue };
        let e = path.endpoints();
        if *ends.get_or_insert(e) != e {
            continue;
        }
        poly.add_term(path, &field.int(*c));
    }
    poly
}

fn random_vector(field: Field, n: usize, seed: &[i64]) -> Vector {
    (0..n).map(|i| field.int(seed[i % seed.len()] * (i as i64 + 1) % 5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn randomized_reduction_orders_agree(z in z_value(), terms in expression(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (sys, _, _) = sl2(&z, None);
        let expr = build_expression(&sys, &terms);
        let left = sys.normal_form_randomized(&expr, s1);
        let right = sys.normal_form_randomized(&expr, s2);
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &sys.normal_form(&expr));
    }

    #[test]
    fn filtration_certificates_verify(z in z_value()) {
        let (_, a, p) = sl2(&z, None);
        let report = check_hypotheses(&a, &p).unwrap();
        prop_assert!(report.pass());
        for row in &report.filtrations {
            let cert = row.result.as_ref().unwrap();
            prop_assert!(cert.verify(&a, &report.standards).is_ok());
        }
    }

    #[test]
    fn filtration_certificates_verify_mod_p(p in prop::sample::select(vec![2u64, 3, 5, 7, 101]), z in 0i64..7) {
        let (_, a, poset) = sl2(&z.to_string(), Some(p));
        let report = check_hypotheses(&a, &poset).unwrap();
        prop_assert!(report.pass());
        for row in &report.filtrations {
            prop_assert!(row.result.as_ref().unwrap().verify(&a, &report.standards).is_ok());
        }
    }

    #[test]
    fn support_in_segment_iff_action_factors(z in z_value(), seed in prop::collection::vec(-3i64..=3, 1..5), cut in 0usize..6) {
        // Cyclic submodules of A and their quotients by a second cyclic
        // submodule give a supply of modules with varied supports.
        let (_, a, p) = sl2(&z, None);
        let regular = Module::regular(&a);
        let g = random_vector(a.field(), a.dim(), &seed);
        let (cyclic, _, sub) = regular.submodule_generated(&[g]).unwrap();
        let h = a.basis_vector(cut);
        let inner = regular.closure(&[h]).unwrap().intersection(&sub);
        let (quot, _) = regular.quotient(&inner).unwrap();
        for m in [cyclic, quot] {
            let support = m.support(&a);
            for ys in p.initial_segments().unwrap() {
                let t = truncate(&a, &p, &ys).unwrap();
                let inside = support.iter().all(|x| ys.contains(x));
                prop_assert_eq!(inside, t.factors(&m));
            }
        }
    }

    #[test]
    fn ext_is_additive(z in prop::sample::select(vec!["0", "1", "2"]), i in 0usize..4, j in 0usize..4) {
        let (_, a, _) = sl2(z, None);
        let simples = radical_and_simples(&a).unwrap();
        let mut pool: Vec<Module> = simples.simples.iter().map(|s| s.module.clone()).collect();
        pool.push(Module::regular_projective(&a, 0));
        pool.push(Module::regular_projective(&a, 1));
        let (v1, v2) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        let r = Resolver::new(&a).unwrap();
        let w = &simples.simples[0].module;
        let sum = r.ext_dims(&v1.direct_sum(v2), w, 3, CoverKind::Minimal).unwrap().dims;
        let x = r.ext_dims(v1, w, 3, CoverKind::Minimal).unwrap().dims;
        let y = r.ext_dims(v2, w, 3, CoverKind::Minimal).unwrap().dims;
        let expect: Vec<usize> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        prop_assert_eq!(sum, expect);
    }
}
