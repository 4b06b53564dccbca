//! Property tests over randomly generated inputs.

use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;

use hkmukai::catalog::{dn_transfer, k3_surface_space, k3n_space};
use hkmukai::exact::{
    format_rational, frac, parse_rational, rat, vec_add, vec_neg, zero_vec, RatVector,
};
use hkmukai::hk_space::ExtMukaiSpace;
use hkmukai::io::{canonical_json, lattice_from_json, lattice_to_json};
use hkmukai::isometry::{b_field, eichler_transvection, reflection};
use hkmukai::lattice::QuadLattice;
use hkmukai::moduli::{fineness, AlgebraicMukaiLattice, MukaiVectorK3};
use hkmukai::suites::custom_space;
use hkmukai::verbitsky::{laplacian, pairing_bn, project_t, psi_monomial, SymElement};

fn h2_vector(s: &ExtMukaiSpace, xs: &[i64]) -> RatVector {
    let mut v = zero_vec(s.dim());
    for (i, x) in xs.iter().enumerate().take(s.dtype.b2()) {
        v[i + 1] = rat(*x);
    }
    v
}

fn ambient(s: &ExtMukaiSpace, xs: &[i64]) -> RatVector {
    xs.iter().take(s.dim()).map(|x| rat(*x)).collect()
}

fn small() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 25)
}

fn toy_element(s: &Arc<ExtMukaiSpace>, a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> SymElement {
    let x = SymElement::product(s, &[ambient(s, a), ambient(s, b)]).unwrap();
    let y = SymElement::product(s, &[ambient(s, c), ambient(s, d)]).unwrap();
    x.add(&y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = frac(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn b_fields_compose_additively(l in small(), m in small()) {
        let s = k3n_space(2).unwrap();
        let (l, m) = (h2_vector(&s, &l), h2_vector(&s, &m));
        let bl = b_field(s.gram(), &l).unwrap();
        let bm = b_field(s.gram(), &m).unwrap();
        let sum = b_field(s.gram(), &vec_add(&l, &m)).unwrap();
        let composed = bl.compose(&bm).unwrap();
        prop_assert_eq!(composed.matrix(), sum.matrix());
    }

    #[test]
    fn transvections_are_invertible_isometries(a in small(), e_choice in 0usize..3) {
        let s = k3n_space(3).unwrap();
        let e = s.h2_basis(2 * e_choice);
        let mut a = h2_vector(&s, &a);
        a[2 * e_choice + 1] = rat(0);
        a[2 * e_choice + 2] = rat(0);
        let t = eichler_transvection(s.gram(), &e, &a).unwrap();
        let t_inv = eichler_transvection(s.gram(), &e, &vec_neg(&a)).unwrap();
        prop_assert!(t.compose(&t_inv).unwrap().is_identity());
        prop_assert_eq!(t.det(), 1);
        prop_assert_eq!(t.spinor_norm(), 1);
    }

    #[test]
    fn reflections_are_involutions(v in small()) {
        let s = k3n_space(2).unwrap();
        let v = ambient(&s, &v);
        prop_assume!(!s.pair(&v, &v).is_zero());
        let r = reflection(s.gram(), &v).unwrap();
        prop_assert!(r.compose(&r).unwrap().is_identity());
        prop_assert_eq!(r.det(), -1);
        prop_assert_eq!(r.apply(&v), vec_neg(&v));
    }

    #[test]
    fn dn_transfer_is_multiplicative(l in small(), m in small(), n in 2u32..=3) {
        let k3 = k3_surface_space().unwrap();
        let s = k3n_space(n).unwrap();
        let g = b_field(k3.gram(), &h2_vector(&k3, &l)).unwrap();
        let root = vec_add(&k3.alpha(), &k3.beta());
        let h = reflection(k3.gram(), &root).unwrap().compose(&b_field(k3.gram(), &h2_vector(&k3, &m)).unwrap()).unwrap();
        let lhs = dn_transfer(&s, &g.compose(&h).unwrap()).unwrap();
        let rhs = dn_transfer(&s, &g).unwrap().compose(&dn_transfer(&s, &h).unwrap()).unwrap();
        prop_assert_eq!(lhs.matrix(), rhs.matrix());
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint(
        a in small(), b in small(), c in small(), d in small(), e in small(), f in small()
    ) {
        let s = custom_space(2, 3).unwrap();
        let x = toy_element(&s, &a, &b, &c, &d);
        let y = toy_element(&s, &e, &f, &a, &c);
        let tx = project_t(&x).unwrap();
        prop_assert_eq!(&project_t(&tx).unwrap(), &tx);
        let ty = project_t(&y).unwrap();
        prop_assert_eq!(pairing_bn(&tx, &y).unwrap(), pairing_bn(&x, &ty).unwrap());
    }

    #[test]
    fn psi_lands_in_kernel_of_laplacian(a in small(), b in small(), n in 2u32..=3) {
        let s = custom_space(n, 3).unwrap();
        let ws = vec![h2_vector(&s, &a), h2_vector(&s, &b)];
        let psi = psi_monomial(&s, &ws).unwrap();
        prop_assert!(laplacian(&psi).unwrap().is_zero());
    }

    #[test]
    fn sym_element_dump_round_trip(a in small(), b in small(), c in small(), d in small()) {
        let s = custom_space(2, 3).unwrap();
        let x = toy_element(&s, &a, &b, &c, &d);
        let text = canonical_json(&x.to_json());
        let back = SymElement::from_json(&s, &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn fineness_criteria_agree(v in prop::collection::vec(-6i64..=6, 4)) {
        prop_assume!(v.iter().any(|x| *x != 0));
        let l = AlgebraicMukaiLattice::new(hkmukai::RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]])).unwrap();
        let v = MukaiVectorK3::from_slice(&v).unwrap();
        prop_assume!(v.is_primitive());
        prop_assert!(fineness(&l, &v).unwrap().consistent());
    }

    #[test]
    fn lattice_file_round_trip(d in prop::collection::vec(-5i64..=5, 3), o in -3i64..=3) {
        prop_assume!(d.iter().all(|x| *x != 0));
        let gram = hkmukai::RatMatrix::from_i64(&[
            vec![d[0], o, 0],
            vec![o, d[1], 0],
            vec![0, 0, d[2]],
        ]);
        let l = QuadLattice::from_gram(gram, Some("sample")).unwrap();
        let text = canonical_json(&lattice_to_json(&l));
        let back = lattice_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.gram(), l.gram());
        prop_assert_eq!(canonical_json(&lattice_to_json(&back)), text);
    }
}
