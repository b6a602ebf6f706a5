#![allow(dead_code)]

use eulerkit::bidual::{GLattice, WedgeElt};
use eulerkit::group_ring::RatGroupRing;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub const GROUPS: [&[usize]; 7] = [&[1], &[2], &[3], &[4], &[2, 2], &[5], &[6]];

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// A random ℤ[G]-lattice in ℚ[G]^d with |G| ≤ 6, d ≤ 4, generator entries in [-9, 9].
pub fn random_lattice<R: Rng>(rng: &mut R) -> GLattice {
    loop {
        let orders = GROUPS[rng.gen_range(0..GROUPS.len())];
        let n: usize = orders.iter().product();
        let d = rng.gen_range(1..=4usize.min(24 / n));
        let s = rng.gen_range(1..=d + 1);
        let gens: Vec<Vec<BigInt>> = (0..s)
            .map(|_| {
                // sparse generators produce more non-free lattices
                (0..d * n).map(|_| if rng.gen_bool(0.5) { BigInt::from(rng.gen_range(-9i64..=9)) } else { BigInt::from(0) }).collect()
            })
            .collect();
        if let Ok(x) = GLattice::span(orders, d, &gens) {
            if x.rank() > 0 {
                return x;
            }
        }
    }
}

/// ℤ[G]^s for a random group and s ≤ 3.
pub fn random_free<R: Rng>(rng: &mut R) -> GLattice {
    let orders = GROUPS[rng.gen_range(0..GROUPS.len())];
    let n: usize = orders.iter().product();
    let s = rng.gen_range(1..=3usize.min(24 / n));
    GLattice::free(orders, s).expect("free lattice")
}

/// Random element of ∧^r_{ℚ[G]}(ℚ ⊗ X): one or two decomposable terms whose
/// coordinates have denominator in {1, 2, 3}.
pub fn random_wedge<R: Rng>(rng: &mut R, x: &GLattice, r: usize) -> WedgeElt {
    let n = x.group().order();
    let den = BigInt::from(rng.gen_range(1i64..=3));
    let mut w = WedgeElt::new(r);
    for _ in 0..rng.gen_range(1..=2) {
        let coeff = RatGroupRing::new(x.group(), (0..n).map(|_| BigRational::from_integer(rng.gen_range(-2i64..=2).into())).collect());
        let vecs = (0..r)
            .map(|_| (0..x.rank()).map(|_| BigRational::new(BigInt::from(rng.gen_range(-3i64..=3)), den.clone())).collect())
            .collect();
        w.push(coeff, vecs).expect("degree");
    }
    w
}

/// A degree that keeps the number of dual wedges to check below `cap`.
pub fn random_degree<R: Rng>(rng: &mut R, x: &GLattice, cap: usize) -> usize {
    let mut r = rng.gen_range(0..=x.ambient().min(3));
    while r > 1 && eulerkit::bidual::subsets(x.rank(), r).len() > cap {
        r -= 1;
    }
    r
}
