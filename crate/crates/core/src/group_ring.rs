//! Group rings `R[G]` over a finite abelian [`Group`], generic in the scalar
//! ring.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::ball::{Ball, CBall};
use crate::cyclo::{CycElt, CyclotomicField};
use crate::error::{Error, Result};
use crate::field::AbelianField;
use crate::group::{CharTable, Group};

/// Scalars usable as group-ring coefficients.
pub trait Coeff: Clone + fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
}

impl Coeff for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigInt::from(n)
    }
}

impl Coeff for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

impl Coeff for CycElt {
    fn add(&self, o: &Self) -> Self {
        CycElt::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CycElt::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CycElt::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        CycElt::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        CycElt::zero(self.field())
    }
    fn one_like(&self) -> Self {
        CycElt::one(self.field())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        CycElt::from_int(self.field(), n)
    }
}

impl Coeff for Ball {
    fn add(&self, o: &Self) -> Self {
        Ball::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Ball::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Ball::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        self.is_exact() && Zero::is_zero(self.mid_raw())
    }
    fn zero_like(&self) -> Self {
        Ball::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        Ball::from_int(1, self.prec())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Ball::from_int(n, self.prec())
    }
}

impl Coeff for CBall {
    fn add(&self, o: &Self) -> Self {
        CBall::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CBall::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CBall::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(&self.re) && Coeff::is_zero(&self.im)
    }
    fn zero_like(&self) -> Self {
        CBall::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        CBall::one(self.prec())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        CBall::real(Ball::from_int(n, self.prec()))
    }
}

#[derive(Clone)]
pub struct GroupRingElt<S: Coeff> {
    group: Arc<Group>,
    coeffs: Vec<S>,
}

impl<S: Coeff + PartialEq> PartialEq for GroupRingElt<S> {
    fn eq(&self, o: &Self) -> bool {
        self.group == o.group && self.coeffs == o.coeffs
    }
}

impl<S: Coeff> fmt::Debug for GroupRingElt<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c:?}*s{}", self.group.label(i)))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl<S: Coeff> GroupRingElt<S> {
    pub fn new(group: &Arc<Group>, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), group.order(), "coefficient count must match the group order");
        GroupRingElt { group: group.clone(), coeffs }
    }

    /// `c · [g]`.
    pub fn monomial(group: &Arc<Group>, g: usize, c: S) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; group.order()];
        coeffs[g] = c;
        Self::new(group, coeffs)
    }

    pub fn zero_with(group: &Arc<Group>, zero: S) -> Self {
        Self::new(group, vec![zero; group.order()])
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> &S {
        &self.coeffs[g]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.group, &o.group) || self.group == o.group);
        Self::new(&self.group, self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.group, self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.group, self.coeffs.iter().map(|a| a.zero_like().sub(a)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.group, &o.group) || self.group == o.group);
        let n = self.group.order();
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let g = self.group.mul(a, b);
                out[g] = out[g].add(&x.mul(y));
            }
        }
        Self::new(&self.group, out)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(&self.group, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiply by the group element `g`.
    pub fn shift(&self, g: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len()];
        for (a, x) in self.coeffs.iter().enumerate() {
            out[self.group.mul(a, g)] = x.clone();
        }
        Self::new(&self.group, out)
    }

    /// The involution Σ a_g g ↦ Σ a_g g^{-1}.
    pub fn involution(&self) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len()];
        for (a, x) in self.coeffs.iter().enumerate() {
            out[self.group.inv(a)] = x.clone();
        }
        Self::new(&self.group, out)
    }

    pub fn augmentation(&self) -> S {
        self.coeffs.iter().fold(self.coeffs[0].zero_like(), |acc, c| acc.add(c))
    }

    /// Image under a group homomorphism given as an index map into `target`.
    pub fn push_forward(&self, target: &Arc<Group>, map: &[usize]) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; target.order()];
        for (a, x) in self.coeffs.iter().enumerate() {
            out[map[a]] = out[map[a]].add(x);
        }
        Self::new(target, out)
    }

    pub fn map<T: Coeff>(&self, f: impl Fn(&S) -> T) -> GroupRingElt<T> {
        GroupRingElt::new(&self.group, self.coeffs.iter().map(f).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::monomial(&self.group, 0, self.coeffs[0].one_like());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate a character: Σ a_g χ(g), with χ values supplied as scalars.
    pub fn eval_with(&self, chi_values: &[S]) -> S {
        self.coeffs
            .iter()
            .zip(chi_values)
            .fold(self.coeffs[0].zero_like(), |acc, (a, v)| acc.add(&a.mul(v)))
    }
}

pub type IntGroupRing = GroupRingElt<BigInt>;
pub type RatGroupRing = GroupRingElt<BigRational>;

impl GroupRingElt<BigInt> {
    pub fn from_i64(group: &Arc<Group>, c: &[i64]) -> Self {
        Self::new(group, c.iter().map(|&x| BigInt::from(x)).collect())
    }
    pub fn one(group: &Arc<Group>) -> Self {
        Self::monomial(group, 0, BigInt::one())
    }
    pub fn zero(group: &Arc<Group>) -> Self {
        Self::zero_with(group, BigInt::zero())
    }
    /// Norm element Σ_g g.
    pub fn norm_element(group: &Arc<Group>) -> Self {
        Self::new(group, vec![BigInt::one(); group.order()])
    }
    pub fn to_rational(&self) -> RatGroupRing {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
    pub fn to_json(&self) -> Value {
        let g = &self.group;
        let mut terms = serde_json::Map::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !Zero::is_zero(c) {
                terms.insert(g.label(i).to_string(), crate::cyclo::bigint_json(c));
            }
        }
        Value::Object(terms)
    }
}

impl GroupRingElt<BigRational> {
    pub fn one(group: &Arc<Group>) -> Self {
        Self::monomial(group, 0, BigRational::one())
    }
    pub fn zero(group: &Arc<Group>) -> Self {
        Self::zero_with(group, BigRational::zero())
    }
    /// Integral coefficients, if all are integers.
    pub fn to_integral(&self) -> Option<IntGroupRing> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(self.map(|c| c.to_integer()))
        } else {
            None
        }
    }
    pub fn to_json(&self) -> Value {
        let g = &self.group;
        let mut terms = serde_json::Map::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !Zero::is_zero(c) {
                terms.insert(g.label(i).to_string(), json!(c.to_string()));
            }
        }
        Value::Object(terms)
    }
}

impl GroupRingElt<CycElt> {
    /// Downgrade to rational coefficients, if every coefficient is rational.
    pub fn to_rational(&self) -> Option<RatGroupRing> {
        let cs = self.coeffs.iter().map(|c| c.as_rational()).collect::<Option<Vec<_>>>()?;
        Some(GroupRingElt::new(&self.group, cs))
    }
}

/// Scalars ℚ(ζ_k) for characters of a group of exponent dividing k.
pub fn character_field(group: &Group) -> Arc<CyclotomicField> {
    CyclotomicField::new(group.exponent() as u64)
}

/// e_χ = |G|^{-1} Σ_g χ(g) g^{-1} over ℚ(ζ_k), k = exponent of G.
pub fn idempotent(group: &Arc<Group>, chi: &CharTable) -> GroupRingElt<CycElt> {
    let k = character_field(group);
    assert_eq!(chi.exponent as u64, k.m(), "character table exponent must equal the group exponent");
    let n = BigRational::new(BigInt::one(), BigInt::from(group.order()));
    let mut coeffs = vec![CycElt::zero(&k); group.order()];
    for g in 0..group.order() {
        coeffs[group.inv(g)] = CycElt::zeta(&k, chi.values[g] as i64).scale(&n);
    }
    GroupRingElt::new(group, coeffs)
}

/// Σ_{χ ∈ set} e_χ, which must be rational (the set is Galois stable).
pub fn rational_idempotent(group: &Arc<Group>, chars: &[&CharTable]) -> Result<RatGroupRing> {
    let k = character_field(group);
    let mut acc = GroupRingElt::zero_with(group, CycElt::zero(&k));
    for chi in chars {
        acc = acc.add(&idempotent(group, chi));
    }
    acc.to_rational()
        .ok_or_else(|| Error::Precondition("character set is not Galois stable".into()))
}

/// χ applied to a rational group-ring element, as an element of ℚ(ζ_k).
pub fn eval_character_rat(x: &RatGroupRing, chi: &CharTable) -> CycElt {
    let k = CyclotomicField::new(chi.exponent as u64);
    let mut acc = CycElt::zero(&k);
    for (g, c) in x.coeffs().iter().enumerate() {
        if !Zero::is_zero(c) {
            acc = acc.add(&CycElt::zeta(&k, chi.values[g] as i64).scale(c));
        }
    }
    acc
}

/// χ applied to an integral group-ring element.
pub fn eval_character_int(x: &IntGroupRing, chi: &CharTable) -> CycElt {
    eval_character_rat(&x.to_rational(), chi)
}

/// Restriction map Gal(E'/ℚ) → Gal(E/ℚ) for E ⊆ E', as an index map.
pub fn restriction_map(big: &AbelianField, small: &AbelianField) -> Result<Vec<usize>> {
    if !big.contains(small) {
        return Err(Error::NotNested(format!("{small:?} ⊄ {big:?}")));
    }
    let mm = crate::arith::lcm(big.modulus(), small.modulus());
    big.reps()
        .iter()
        .map(|&r| {
            let mut s = r;
            while crate::arith::gcd(s, mm) != 1 {
                s += big.modulus();
            }
            small.index_of((s % small.modulus()) as i64)
        })
        .collect()
}

/// π_{E'/E} on integral group rings.
pub fn project(x: &IntGroupRing, big: &AbelianField, small: &AbelianField, small_group: &Arc<Group>) -> Result<IntGroupRing> {
    let map = restriction_map(big, small)?;
    Ok(x.push_forward(small_group, &map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_idempotents() {
        let g = Group::cyclic_product(&[2]);
        let chars = g.characters();
        let triv = chars.iter().find(|c| c.is_trivial()).unwrap();
        let sign = chars.iter().find(|c| !c.is_trivial()).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let et = idempotent(&g, triv).to_rational().unwrap();
        assert_eq!(et.coeffs(), &[half.clone(), half.clone()]);
        let es = idempotent(&g, sign).to_rational().unwrap();
        assert_eq!(es.coeffs(), &[half.clone(), -half]);
    }

    #[test]
    fn orthogonality_c3() {
        let g = Group::cyclic_product(&[3]);
        let chars = g.characters();
        let es: Vec<_> = chars.iter().map(|c| idempotent(&g, c)).collect();
        let k = character_field(&g);
        for (i, a) in es.iter().enumerate() {
            for (j, b) in es.iter().enumerate() {
                let p = a.mul(b);
                if i == j {
                    assert_eq!(&p, a);
                } else {
                    assert!(p.is_zero());
                }
            }
        }
        let total = es.iter().skip(1).fold(es[0].clone(), |acc, e| acc.add(e));
        assert_eq!(total, GroupRingElt::monomial(&g, 0, CycElt::one(&k)));
    }

    #[test]
    fn projection_is_ring_map() {
        let big = AbelianField::cyclotomic(15);
        let small = AbelianField::cyclotomic(5);
        let gb = Group::of_field(&big);
        let gs = Group::of_field(&small);
        let a = IntGroupRing::from_i64(&gb, &[1, 2, 0, -1, 3, 0, 1, 2]);
        let b = IntGroupRing::from_i64(&gb, &[0, 1, 1, 0, 0, -2, 0, 1]);
        let pa = project(&a, &big, &small, &gs).unwrap();
        let pb = project(&b, &big, &small, &gs).unwrap();
        assert_eq!(project(&a.mul(&b), &big, &small, &gs).unwrap(), pa.mul(&pb));
    }
}
