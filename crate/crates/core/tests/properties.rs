mod common;

use num_traits::Zero;
use proptest::prelude::*;

use fsos::certify::{Certificate, Metadata};
use fsos::charfn::{formula_char, objective, Mode};
use fsos::cnf::{parse_dimacs, CnfFormula};
use fsos::decimal::{exact_decimal, parse_decimal};
use fsos::fourier::{fourier_coeffs, ratio, Monomial, Rational, RationalPoly};
use fsos::validate::{extrapolation_bound, validate_exhaustive, validate_l1, validate_sampling};

fn poly(n: usize) -> impl Strategy<Value = RationalPoly> {
    prop::collection::vec((0u64..1 << n, -12i64..=12, 0u32..4), 0..8).prop_map(move |terms| {
        RationalPoly::from_terms(
            n,
            terms.into_iter().map(|(bits, c, e)| (Monomial::from_low_bits(n, bits), ratio(c, 1 << e))),
        )
        .unwrap()
    })
}

fn sized_poly() -> impl Strategy<Value = (RationalPoly, RationalPoly, RationalPoly)> {
    (1usize..=7).prop_flat_map(|n| (poly(n), poly(n), poly(n)))
}

/// Clause lists over `n` variables, widths 1..=3.
fn formula() -> impl Strategy<Value = CnfFormula> {
    (2usize..=7).prop_flat_map(|n| {
        let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        prop::collection::vec(prop::collection::vec(lit, 1..=3), 1..12)
            .prop_map(move |clauses| CnfFormula::new(n, &clauses).unwrap())
    })
}

fn mean(values: &[Rational]) -> Rational {
    values.iter().fold(Rational::zero(), |s, v| s + v) / Rational::from_integer(values.len().into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn xor_mul_is_the_pointwise_product((a, b, _) in sized_poly()) {
        let ab = a.xor_mul(&b).unwrap();
        let (va, vb) = (a.values_table(10).unwrap(), b.values_table(10).unwrap());
        let want: Vec<Rational> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
        prop_assert_eq!(ab.values_table(10).unwrap(), want);
    }

    #[test]
    fn xor_mul_is_commutative_and_associative((a, b, c) in sized_poly()) {
        prop_assert_eq!(a.xor_mul(&b).unwrap(), b.xor_mul(&a).unwrap());
        let left = a.xor_mul(&b).unwrap().xor_mul(&c).unwrap();
        let right = a.xor_mul(&b.xor_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn parseval((a, _, _) in sized_poly()) {
        let squares: Vec<Rational> = a.values_table(10).unwrap().iter().map(|v| v * v).collect();
        let energy = a.terms().fold(Rational::zero(), |s, (_, c)| s + c * c);
        prop_assert_eq!(mean(&squares), energy);
    }

    #[test]
    fn transform_round_trips((a, _, _) in sized_poly()) {
        let values = a.values_table(10).unwrap();
        prop_assert_eq!(fourier_coeffs(a.n(), &values).unwrap(), a);
    }

    #[test]
    fn characteristic_function_counts_falsified_clauses(phi in formula()) {
        let f = formula_char(&phi);
        prop_assert!(f.degree() <= phi.max_width());
        for (x, v) in f.values_table(10).unwrap().into_iter().enumerate() {
            prop_assert_eq!(v, Rational::from_integer(common::falsified(&phi, x as u64).into()));
        }
    }

    #[test]
    fn dimacs_round_trip_keeps_the_digest(phi in formula()) {
        let again = parse_dimacs(&phi.to_dimacs()).unwrap();
        prop_assert_eq!(again.digest(), phi.digest());
        prop_assert_eq!(again.m(), phi.m());
    }

    #[test]
    fn exact_decimals_round_trip(num in -1_000_000i64..1_000_000, e2 in 0u32..12, e5 in 0u32..6) {
        let r = ratio(num, 2i64.pow(e2) * 5i64.pow(e5));
        let text = exact_decimal(&r).unwrap();
        prop_assert_eq!(parse_decimal(&text).unwrap(), r);
    }

    #[test]
    fn certificate_json_round_trips(phi in formula(), l in 0i64..4, seed in poly(7)) {
        let n = phi.n();
        let g = RationalPoly::from_terms(
            n,
            seed.terms().map(|(m, c)| (Monomial::from_low_bits(n, m.low_bits() & ((1 << n) - 1)), c.clone())),
        ).unwrap();
        let cert = Certificate {
            mode: Mode::Maxsat,
            l,
            shift: ratio(1, 2),
            n,
            formula_digest: phi.digest(),
            numerators: vec![g],
            denominators: vec![],
            metadata: Metadata::default(),
        };
        prop_assert_eq!(Certificate::from_json(&cert.to_json().unwrap()).unwrap(), cert);
    }

    #[test]
    fn extrapolation_bound_grows_with_weight(d in 0usize..5, w in 0usize..20, eps in 1i64..50) {
        let eps = ratio(eps, 7);
        let here = extrapolation_bound(d, d + 1 + w, &eps).unwrap();
        let next = extrapolation_bound(d, d + 2 + w, &eps).unwrap();
        prop_assert!(here >= eps);
        prop_assert!(next >= here);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Arbitrary sums of squares never certify a false claim.
    #[test]
    fn validators_never_accept_false_claims(phi in formula(), extra in 0i64..3, g in poly(7), h in poly(7)) {
        let n = phi.n();
        let narrow = |p: &RationalPoly| RationalPoly::from_terms(
            n,
            p.terms().map(|(m, c)| (Monomial::from_low_bits(n, m.low_bits() & ((1 << n) - 1)), c.clone())),
        ).unwrap();
        let l_min = objective(&phi, Mode::Maxsat, None, 26).unwrap().l;
        let l = l_min + 1 + extra;
        let cert = Certificate {
            mode: Mode::Maxsat,
            l,
            shift: ratio(1, 2),
            n,
            formula_digest: phi.digest(),
            numerators: vec![narrow(&g)],
            denominators: vec![narrow(&h)],
            metadata: Metadata::default(),
        };
        prop_assert!(!common::claim_holds(&phi, Mode::Maxsat, l));
        for report in [validate_l1(&phi, &cert), validate_sampling(&phi, &cert), validate_exhaustive(&phi, &cert)] {
            prop_assert!(!report.unwrap().accepted);
        }
    }
}

#[test]
fn zero_denominators_are_rejected_without_panicking() {
    let phi = common::formula("running.cnf");
    let mut cert = common::certificate("running_linear.cert", &phi);
    cert.denominators = vec![RationalPoly::zero(3).unwrap()];
    for report in [validate_l1(&phi, &cert), validate_sampling(&phi, &cert), validate_exhaustive(&phi, &cert)] {
        assert!(!report.unwrap().accepted);
    }
}
