//! Randomized property checks for the arithmetic core: ring axioms of
//! the polynomial layer, division/gcd contracts, determinant and
//! inverse laws for the matrices, and interval sanity for the
//! estimator.

use proptest::prelude::*;

use sl2walk::polyring::PolyFp;
use sl2walk::quotient::ResidueRing;
use sl2walk::sl2::Mat2;
use sl2walk::walker::wilson_interval;

const P: u64 = 5;

fn arb_poly() -> impl Strategy<Value = PolyFp> {
    prop::collection::vec(0u64..P, 0..6).prop_map(|c| PolyFp::new(P, c))
}

fn arb_nonzero_poly() -> impl Strategy<Value = PolyFp> {
    arb_poly().prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_commutes_and_associates(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn multiplication_distributes(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn negation_cancels(a in arb_poly()) {
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn divmod_reconstructs(a in arb_poly(), b in arb_nonzero_poly()) {
        let (q, r) = a.divmod(&b).unwrap();
        prop_assert_eq!(q.mul(&b).add(&r), a);
        if !r.is_zero() {
            prop_assert!(r.degree().unwrap() < b.degree().unwrap());
        }
    }

    #[test]
    fn gcd_divides_both(a in arb_nonzero_poly(), b in arb_nonzero_poly()) {
        let g = a.gcd(&b).unwrap();
        prop_assert!(a.rem(&g).unwrap().is_zero());
        prop_assert!(b.rem(&g).unwrap().is_zero());
        // Bezout witness
        let (g2, u, v) = a.xgcd(&b).unwrap();
        prop_assert_eq!(&g, &g2);
        prop_assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
    }

    #[test]
    fn degree_of_product_adds(a in arb_nonzero_poly(), b in arb_nonzero_poly()) {
        let prod = a.mul(&b);
        prop_assert_eq!(
            prod.degree().unwrap(),
            a.degree().unwrap() + b.degree().unwrap()
        );
    }

    #[test]
    fn wilson_interval_brackets_estimate(s in 0u64..=500, extra in 0u64..=500) {
        let n = s + extra;
        if n > 0 {
            let (lo, hi) = wilson_interval(s, n);
            let phat = s as f64 / n as f64;
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!((0.0..=1.0).contains(&hi));
            prop_assert!(lo <= phat + 1e-12 && phat <= hi + 1e-12);
        }
    }
}

fn arb_residue_mat() -> impl Strategy<Value = Mat2<sl2walk::quotient::ResidueElem>> {
    // random SL2 element over F_5: pick b, c, nonzero a, solve for d
    (1u64..P, 0u64..P, 0u64..P).prop_map(|(a, b, c)| {
        let ring = ResidueRing::new("0,1@5".parse().unwrap()).unwrap();
        let ra = ring.constant(a);
        let rb = ring.constant(b);
        let rc = ring.constant(c);
        let d = ring
            .one()
            .add(&rb.mul(&rc))
            .mul(&ra.inverse().unwrap());
        Mat2::new_sl2(ra, rb, rc, d).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn det_multiplicative_and_inverse_law(g in arb_residue_mat(), h in arb_residue_mat()) {
        let prod = g.mul(&h);
        prop_assert!(prod.det().is_one());
        let gi = g.inv().unwrap();
        prop_assert!(g.mul(&gi).is_identity());
        // (gh)^-1 = h^-1 g^-1
        prop_assert_eq!(prod.inv().unwrap(), h.inv().unwrap().mul(&gi));
    }

    #[test]
    fn trace_is_conjugation_invariant(g in arb_residue_mat(), h in arb_residue_mat()) {
        let conj = h.mul(&g).mul(&h.inv().unwrap());
        prop_assert_eq!(conj.trace(), g.trace());
    }
}
