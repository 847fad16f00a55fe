use num_traits::{One, Zero};
use proptest::prelude::*;

use sosfact::generate::{generate, Family, GeneratorConfig};
use sosfact::matpoly::{cauchy_binet_extend, verify_factorization};
use sosfact::matrix::{FieldTag, Matrix, PolyMatrix};
use sosfact::scalar::{gi, Gauss, Rat};
use sosfact::smith::smith_normal_form;
use sosfact::twosquares::{enumerate_complex_scalar_classes, enumerate_two_squares_real};
use sosfact::Poly;

fn poly(max_deg: usize) -> impl Strategy<Value = Poly<Gauss>> {
    prop::collection::vec((-3i64..=3, -3i64..=3), 0..=max_deg + 1)
        .prop_map(|cs| Poly::new(cs.into_iter().map(|(a, b)| gi(a, b)).collect()))
}

fn real_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rat>> {
    prop::collection::vec(-3i64..=3, 0..=max_deg + 1).prop_map(|cs| Poly::from_i64s(&cs))
}

fn matrix(rows: usize, cols: usize, max_deg: usize) -> impl Strategy<Value = PolyMatrix<Gauss>> {
    prop::collection::vec(poly(max_deg), rows * cols).prop_map(move |e| Matrix::new(rows, cols, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn division_round_trip(a in poly(4), b in poly(3)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn gcd_divides_both(a in real_poly(4), b in real_poly(4)) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = a.gcd(&b);
        prop_assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn star_is_an_involution(a in poly(5), b in poly(5)) {
        prop_assert_eq!(a.star().star(), a.clone());
        prop_assert_eq!((&a * &b).star(), &a.star() * &b.star());
    }

    #[test]
    fn smith_form_verifies(m in matrix(2, 2, 2)) {
        let s = smith_normal_form(&m);
        prop_assert!(s.verify(&m));
    }

    #[test]
    fn cauchy_binet_identities(q in matrix(3, 2, 2)) {
        let Ok(v) = cauchy_binet_extend(&q) else {
            prop_assert!(q.gram().det().is_zero());
            return Ok(());
        };
        let col = Matrix::column(&v);
        prop_assert!(q.star().mul(&col).is_zero());
        prop_assert_eq!(col.gram().get(0, 0).clone(), q.gram().det());
    }

    #[test]
    fn gram_is_a_factorization(q in matrix(3, 2, 2)) {
        let f = verify_factorization(&q, &q.gram()).unwrap();
        prop_assert!(f.verified && f.residual.is_zero());
    }

    #[test]
    fn scalar_class_counts(mask in 1u32..64) {
        let pool = [gi(0, 1), gi(0, 2), gi(1, 1), gi(-1, 1), gi(1, 2), gi(-2, 1)];
        let mut d = Poly::<Gauss>::one();
        for (j, z) in pool.iter().enumerate() {
            if mask >> j & 1 == 1 {
                d = &d * &(&Poly::linear(z.clone()) * &Poly::linear(z.conj()));
            }
        }
        let d = d.to_rat().unwrap();
        let k = mask.count_ones();
        let real = enumerate_two_squares_real(&d).unwrap();
        let complex = enumerate_complex_scalar_classes(&d).unwrap();
        prop_assert_eq!(real.len(), 1 << (k - 1));
        prop_assert_eq!(complex.len(), 1 << k);
        prop_assert!(real.iter().chain(&complex).all(|c| c.holds()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generator_is_deterministic_and_planted(seed in 0u64..10_000, n in 1usize..=3, complex in any::<bool>()) {
        let cfg = GeneratorConfig {
            family: Family::PlantedUnimodular,
            field: if complex { FieldTag::Complex } else { FieldTag::Real },
            n,
            seed,
            ..GeneratorConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let q = a.ground_truth.as_ref().unwrap().factorization.clone().unwrap();
        prop_assert!(verify_factorization(&q, &a.matrix).unwrap().verified);
    }
}
