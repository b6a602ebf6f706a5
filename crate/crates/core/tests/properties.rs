mod common;

use eulerkit::bidual::{bidual_membership, bidual_membership_with, dual_lattice};
use eulerkit::cyclo::{CycElt, CyclotomicField};
use eulerkit::field::{norm, AbelianField};
use eulerkit::finite_field::DlogCache;
use eulerkit::group::Group;
use eulerkit::group_ring::{idempotent, IntGroupRing};
use eulerkit::kolyvagin::{residue_log, v_q, DerivativeOp, PrimeAboveData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODULI: [u64; 7] = [5, 7, 8, 9, 12, 15, 16];

fn elt(m: u64, terms: &[(i64, i64)]) -> CycElt {
    CycElt::from_zeta_sum(&CyclotomicField::new(m), terms)
}

fn terms() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..60, -4i64..=4), 1..5)
}

fn unit_residue(m: u64, s: i64) -> i64 {
    (1..m as i64).filter(|a| a.gcd(&(m as i64)) == 1).nth(s as usize % eulerkit::arith::totient(m) as usize).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn galois_is_a_ring_homomorphism(mi in 0..MODULI.len(), a in terms(), b in terms(), s in 0i64..32) {
        let m = MODULI[mi];
        let (a, b) = (elt(m, &a), elt(m, &b));
        let s = unit_residue(m, s);
        let g = |x: &CycElt| x.galois(s).unwrap();
        prop_assert_eq!(g(&a.mul(&b)), g(&a).mul(&g(&b)));
        prop_assert_eq!(g(&a.add(&b)), g(&a).add(&g(&b)));
    }

    #[test]
    fn lift_then_descend_is_identity(mi in 0..MODULI.len(), k in 1u64..8, a in terms()) {
        let m = MODULI[mi];
        let big = CyclotomicField::new(m * k);
        let a = elt(m, &a);
        let up = a.lift(&big).unwrap();
        prop_assert_eq!(up.descend(a.field()), Some(a));
    }

    #[test]
    fn norm_commutes_with_galois(mi in 0..MODULI.len(), a in terms(), s in 0i64..32) {
        let m = MODULI[mi];
        let a = elt(m, &a);
        let s = unit_residue(m, s);
        let (full, real) = (AbelianField::cyclotomic(m), AbelianField::real_cyclotomic(m));
        let lhs = norm(&a.galois(s).unwrap(), &full, &real).unwrap();
        let rhs = norm(&a, &full, &real).unwrap().galois(s).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn embedding_is_multiplicative(mi in 0..MODULI.len(), a in terms(), b in terms()) {
        let m = MODULI[mi];
        let (a, b) = (elt(m, &a), elt(m, &b));
        let prod = a.mul(&b).embed(1, 128).unwrap();
        let sep = a.embed(1, 128).unwrap().mul(&b.embed(1, 128).unwrap());
        let tol = BigRational::new(BigInt::from(1), BigInt::from(10).pow(25));
        prop_assert!(prod.sub(&sep).abs_upper() < tol);
    }

    #[test]
    fn v_q_is_additive(a in terms(), b in terms(), qi in 0usize..3) {
        let q = [11u64, 31, 41][qi];
        let (a, b) = (elt(5, &a), elt(5, &b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let data = PrimeAboveData::new(&AbelianField::cyclotomic(5), q).unwrap();
        let (va, vb) = (v_q(&a, &data).unwrap(), v_q(&b, &data).unwrap());
        prop_assert_eq!(v_q(&a.mul(&b), &data).unwrap(), va.add(&vb));
    }

    #[test]
    fn residue_log_is_a_homomorphism(a in terms(), b in terms(), qi in 0usize..4) {
        let q = [11u64, 31, 41, 61][qi];
        let (a, b) = (elt(5, &a), elt(5, &b));
        let data = PrimeAboveData::new(&AbelianField::cyclotomic(5), q).unwrap();
        let mut cache = DlogCache::new(None);
        let la = residue_log(&a, &data, 5, 1, &mut cache);
        let lb = residue_log(&b, &data, 5, 1, &mut cache);
        prop_assume!(la.is_ok() && lb.is_ok());
        let lab = residue_log(&a.mul(&b), &data, 5, 1, &mut cache).unwrap();
        prop_assert_eq!(lab, (la.unwrap() + lb.unwrap()) % 5);
    }

    #[test]
    fn derivative_telescopes(n in 1usize..=60) {
        prop_assert!(DerivativeOp::new(n).unwrap().telescopes());
    }

    #[test]
    fn idempotents_are_orthogonal(gi in 0..common::GROUPS.len()) {
        let g = Group::cyclic_product(common::GROUPS[gi]);
        let chars = g.characters();
        let es: Vec<_> = chars.iter().map(|c| idempotent(&g, c)).collect();
        for (i, ei) in es.iter().enumerate() {
            for (j, ej) in es.iter().enumerate() {
                let p = ei.mul(ej);
                if i == j {
                    prop_assert_eq!(&p, ei);
                } else {
                    prop_assert!(p.is_zero());
                }
            }
        }
        let sum = es.iter().skip(1).fold(es[0].clone(), |acc, e| acc.add(e));
        prop_assert_eq!(sum.to_rational().and_then(|s| s.to_integral()), Some(IntGroupRing::one(&g)));
    }

    #[test]
    fn membership_ignores_the_choice_of_dual_basis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = common::random_lattice(&mut rng);
        let r = rng.gen_range(1..=x.ambient().min(2));
        let w = common::random_wedge(&mut rng, &x, r);
        let mut basis = dual_lattice(&x).unwrap().basis().clone();
        // random elementary row operations keep the basis unimodular
        for _ in 0..4 {
            if basis.len() < 2 {
                break;
            }
            let i = rng.gen_range(0..basis.len());
            let j = (i + rng.gen_range(1..basis.len())) % basis.len();
            let k = BigInt::from(rng.gen_range(-3i64..=3));
            let rj = basis[j].clone();
            for (a, b) in basis[i].iter_mut().zip(&rj) {
                *a += &k * b;
            }
            basis.swap(i, j);
        }
        let before = bidual_membership(&w, &x).unwrap().member;
        prop_assert_eq!(bidual_membership_with(&w, &x, &basis).unwrap().member, before);
    }
}
