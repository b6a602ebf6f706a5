//! Abelian number fields as fixed fields `E = ℚ(ζ_m)^H`.
//!
//! The Galois group `G_E = (ℤ/m)^× / H` is represented by the sorted list of
//! least coset representatives; group elements are indices into that list,
//! with index 0 the identity.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::arith::{self, gcd, lcm, units};
use crate::cyclo::{CycElt, CyclotomicField};
use crate::error::{Error, Result};

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AbelianField {
    m: u64,
    h: Vec<u64>,
    reps: Vec<u64>,
    /// coset index of each residue mod m (usize::MAX for non-units)
    coset: Vec<usize>,
}

impl fmt::Debug for AbelianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianField(m={}, H={:?})", self.m, self.h)
    }
}

impl std::hash::Hash for AbelianField {
    fn hash<S: std::hash::Hasher>(&self, state: &mut S) {
        self.m.hash(state);
        self.h.hash(state);
    }
}

fn one_mod(m: u64) -> u64 {
    1 % m
}

/// Closure of a generating set inside (ℤ/m)^×.
pub fn generate_subgroup(m: u64, gens: &[u64]) -> Vec<u64> {
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(one_mod(m));
    let mut frontier = vec![one_mod(m)];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = arith::mul_mod(x, g % m.max(1), m.max(1));
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// All subgroups of (ℤ/m)^×, each sorted, in a deterministic order.
pub fn subgroups(m: u64) -> Vec<Vec<u64>> {
    let us = units(m);
    let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
    let trivial = vec![one_mod(m)];
    found.insert(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(s) = frontier.pop() {
        for &g in &us {
            if s.binary_search(&g).is_ok() {
                continue;
            }
            let mut gens = s.clone();
            gens.push(g);
            let t = generate_subgroup(m, &gens);
            if found.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let mut out: Vec<Vec<u64>> = found.into_iter().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    out
}

impl AbelianField {
    /// Fixed field of the subgroup `h` of (ℤ/m)^×; closure is checked.
    pub fn new(m: u64, h: &[u64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSubgroup("modulus must be positive".into()));
        }
        let mut hs: Vec<u64> = h.iter().map(|x| x % m).collect();
        hs.sort_unstable();
        hs.dedup();
        if !hs.contains(&one_mod(m)) {
            return Err(Error::InvalidSubgroup(format!("{h:?} does not contain 1 mod {m}")));
        }
        for &x in &hs {
            if m > 1 && gcd(x, m) != 1 {
                return Err(Error::InvalidSubgroup(format!("{x} is not a unit mod {m}")));
            }
        }
        for &a in &hs {
            for &b in &hs {
                if hs.binary_search(&arith::mul_mod(a, b, m)).is_err() {
                    return Err(Error::InvalidSubgroup(format!("{h:?} is not closed mod {m}")));
                }
            }
        }
        Ok(Self::build(m, hs))
    }

    fn build(m: u64, h: Vec<u64>) -> Self {
        let mut coset = vec![usize::MAX; m as usize];
        let mut reps = Vec::new();
        for u in units(m) {
            if coset[u as usize] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(u);
            for &x in &h {
                coset[arith::mul_mod(u, x, m) as usize] = idx;
            }
        }
        AbelianField { m, h, reps, coset }
    }

    pub fn from_generators(m: u64, gens: &[u64]) -> Result<Self> {
        for &g in gens {
            if m > 1 && gcd(g % m, m) != 1 {
                return Err(Error::InvalidSubgroup(format!("{g} is not a unit mod {m}")));
            }
        }
        Ok(Self::build(m, generate_subgroup(m, gens)))
    }

    pub fn rationals() -> Self {
        Self::build(1, vec![0])
    }

    /// ℚ(ζ_m).
    pub fn cyclotomic(m: u64) -> Self {
        Self::build(m, vec![one_mod(m)])
    }

    /// ℚ(ζ_m)^+.
    pub fn real_cyclotomic(m: u64) -> Self {
        Self::build(m, generate_subgroup(m, &[m.saturating_sub(1)]))
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.h
    }

    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    /// Least coset representatives; index `i` is the group element σ_{reps[i]}.
    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> u64 {
        self.reps[i]
    }

    /// Group index of the class of the unit residue `a` mod m.
    pub fn index_of(&self, a: i64) -> Result<usize> {
        let r = a.rem_euclid(self.m as i64) as usize;
        match self.coset[r] {
            usize::MAX => Err(Error::NotCoprime { s: r as u64, m: self.m }),
            i => Ok(i),
        }
    }

    pub fn mul_idx(&self, i: usize, j: usize) -> usize {
        self.coset[arith::mul_mod(self.reps[i], self.reps[j], self.m) as usize]
    }

    pub fn inv_idx(&self, i: usize) -> usize {
        let inv = arith::inv_mod(self.reps[i], self.m).unwrap_or(0);
        self.coset[inv as usize]
    }

    pub fn pow_idx(&self, i: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv_idx(i) } else { i };
        let r = arith::pow_mod(self.reps[base], e.unsigned_abs(), self.m.max(1));
        self.coset[(r % self.m) as usize]
    }

    pub fn order_of(&self, i: usize) -> usize {
        let mut k = 1;
        let mut x = i;
        while x != 0 {
            x = self.mul_idx(x, i);
            k += 1;
        }
        k
    }

    /// Exponent of the Galois group.
    pub fn exponent(&self) -> usize {
        (0..self.degree()).fold(1usize, |acc, i| lcm(acc as u64, self.order_of(i) as u64) as usize)
    }

    /// Subgroup of G_E generated by the given indices (sorted).
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::new();
        set.insert(0usize);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul_idx(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_real(&self) -> bool {
        self.m <= 2 || self.h.binary_search(&(self.m - 1)).is_ok()
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    /// Is `x mod m` in H?
    pub fn in_h(&self, x: u64) -> bool {
        self.h.binary_search(&(x % self.m)).is_ok()
    }

    /// The same field inside ℚ(ζ_{m'}) for a multiple `m'` of `m`.
    pub fn lift(&self, mp: u64) -> Result<AbelianField> {
        if !mp.is_multiple_of(self.m) {
            return Err(Error::ModulusMismatch(self.m, mp));
        }
        let h = units(mp).into_iter().filter(|&u| self.in_h(u % self.m)).collect();
        Ok(Self::build(mp, h))
    }

    /// Conductor: the least `f | m` with `ker((ℤ/m)^× → (ℤ/f)^×) ⊆ H`.
    pub fn conductor(&self) -> u64 {
        for f in arith::divisors(self.m) {
            if self.kernel_contained(f) {
                return f;
            }
        }
        self.m
    }

    fn kernel_contained(&self, f: u64) -> bool {
        units(self.m).into_iter().filter(|&u| u % f == 1 % f).all(|u| self.in_h(u))
    }

    /// The same field presented at its conductor.
    pub fn canonical(&self) -> AbelianField {
        let f = self.conductor();
        if f == self.m {
            return self.clone();
        }
        let mut h: Vec<u64> = self.h.iter().map(|&x| x % f).collect();
        h.sort_unstable();
        h.dedup();
        Self::build(f, h)
    }

    /// `other ⊆ self`?
    pub fn contains(&self, other: &AbelianField) -> bool {
        let big = lcm(self.m, other.m);
        let a = self.lift(big).expect("lcm");
        let b = other.lift(big).expect("lcm");
        // E_b ⊆ E_a  <=>  H_a ⊆ H_b
        a.h.iter().all(|x| b.h.binary_search(x).is_ok())
    }

    pub fn same_field(&self, other: &AbelianField) -> bool {
        self.contains(other) && other.contains(self)
    }

    /// Compositum of two fields.
    pub fn compositum(&self, other: &AbelianField) -> AbelianField {
        let big = lcm(self.m, other.m);
        let a = self.lift(big).expect("lcm");
        let b = other.lift(big).expect("lcm");
        let h = a.h.iter().copied().filter(|x| b.h.binary_search(x).is_ok()).collect();
        Self::build(big, h).canonical()
    }

    /// Class of a residue `x` modulo `d | m`, provided the kernel of the
    /// reduction to `d` lies in H (always true for `d` the conductor).
    pub fn class_mod(&self, x: u64, d: u64) -> Result<usize> {
        if !self.m.is_multiple_of(d) || !self.kernel_contained(d) {
            return Err(Error::Precondition(format!("{d} is not a valid level for {self:?}")));
        }
        if gcd(x % d.max(1), d) != 1 && d > 1 {
            return Err(Error::NotCoprime { s: x, m: d });
        }
        let mut a = x % d.max(1);
        loop {
            if gcd(a, self.m) == 1 || self.m == 1 {
                return self.index_of(a as i64);
            }
            a += d;
        }
    }

    /// Frobenius at an unramified prime (or any integer coprime to the conductor).
    pub fn frobenius(&self, q: u64) -> Result<usize> {
        let f = self.conductor();
        if f > 1 && gcd(q, f) != 1 {
            return Err(Error::Ramified(q));
        }
        self.class_mod(q, f)
    }

    /// Inertia subgroup at `p` (indices); trivial when `p ∤ m`.
    pub fn inertia(&self, p: u64) -> Vec<usize> {
        if !self.m.is_multiple_of(p) {
            return vec![0];
        }
        let pe = p.pow(arith::valuation(self.m, p));
        let rest = self.m / pe;
        let gens: Vec<usize> = units(self.m)
            .into_iter()
            .filter(|&u| u % rest == 1 % rest)
            .map(|u| self.coset[u as usize])
            .collect();
        self.subgroup_generated(&gens)
    }

    /// Primes ramified in E.
    pub fn ramified_primes(&self) -> Vec<u64> {
        arith::prime_divisors(self.m).into_iter().filter(|&p| self.inertia(p).len() > 1).collect()
    }

    /// Decomposition group of a place, as sorted indices.
    pub fn decomposition_group(&self, v: Place) -> Vec<usize> {
        match v {
            Place::Infinite => {
                let c = self.index_of(-1).unwrap_or(0);
                self.subgroup_generated(&[c])
            }
            Place::Finite(q) => {
                if !self.m.is_multiple_of(q) {
                    let fr = self.index_of(q as i64).expect("q coprime to m");
                    return self.subgroup_generated(&[fr]);
                }
                let pe = q.pow(arith::valuation(self.m, q));
                let rest = self.m / pe;
                let mut gens = self.inertia(q);
                if rest > 1 {
                    let (a, _) = arith::crt(&[(q % rest, rest), (1, pe)]);
                    gens.push(self.coset[a as usize]);
                }
                self.subgroup_generated(&gens)
            }
        }
    }

    /// Order of μ_E.
    pub fn roots_of_unity_order(&self) -> u64 {
        let big = lcm(self.m, 2);
        let mut w = big;
        for &h in &self.h {
            let lifted = if big == self.m || h % 2 == 1 { h } else { h + self.m };
            let d = (lifted + big - 1) % big;
            w = gcd(w, d);
        }
        w
    }

    /// A generator of μ_E as an element of ℚ(ζ_m).
    pub fn mu_generator(&self) -> CycElt {
        let w = self.roots_of_unity_order();
        let big = lcm(self.m, 2);
        let fb = CyclotomicField::new(big);
        let z = CycElt::zeta(&fb, (big / w) as i64);
        let fm = CyclotomicField::new(self.m);
        z.descend(&fm).expect("ℚ(ζ_2m) = ℚ(ζ_m) for odd m")
    }

    /// Is the element (of some ℚ(ζ_k)) fixed by H, i.e. does it lie in E?
    pub fn contains_element(&self, a: &CycElt) -> bool {
        let big = lcm(self.m, a.modulus());
        let fb = CyclotomicField::new(big);
        let al = a.lift(&fb).expect("lcm");
        let e = self.lift(big).expect("lcm");
        e.h.iter().all(|&s| al.galois(s as i64).expect("unit") == al)
    }

    /// Galois action of the group element `i` on an element of E (given in any ℚ(ζ_k), m | k).
    pub fn act(&self, i: usize, a: &CycElt) -> Result<CycElt> {
        let k = a.modulus();
        if !k.is_multiple_of(self.m) {
            return Err(Error::ModulusMismatch(self.m, k));
        }
        // any lift of the representative to a unit mod k
        let r = self.reps[i];
        let mut s = r;
        while gcd(s, k) != 1 {
            s += self.m;
        }
        a.galois(s as i64)
    }
}

/// Norm N_{from/to}(a) for `to ⊆ from` and `a ∈ from`. The result is returned
/// in ℚ(ζ_{to.modulus()}).
pub fn norm(a: &CycElt, from: &AbelianField, to: &AbelianField) -> Result<CycElt> {
    if !from.contains(to) {
        return Err(Error::NotNested(format!("{to:?} is not contained in {from:?}")));
    }
    let big = lcm(lcm(a.modulus(), from.modulus()), to.modulus());
    let fb = CyclotomicField::new(big);
    let al = a.lift(&fb)?;
    let hf = from.lift(big)?;
    let ht = to.lift(big)?;
    debug_assert!(hf.h.iter().all(|&s| al.galois(s as i64).unwrap() == al), "element not in the source field");
    // coset representatives of H_to / H_from
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut acc = CycElt::one(&fb);
    for &t in &ht.h {
        if seen.contains(&t) {
            continue;
        }
        for &s in &hf.h {
            seen.insert(arith::mul_mod(t, s, big));
        }
        acc = acc.mul(&al.galois(t as i64)?);
    }
    let ft = CyclotomicField::new(to.modulus());
    acc.descend(&ft)
        .ok_or_else(|| Error::NotNested("norm is not fixed by the target subgroup".into()))
}

/// All real abelian fields `E ≠ ℚ` with conductor at most `n`, each presented
/// at its conductor, ordered by (conductor, subgroup).
pub fn real_fields_up_to(n: u64) -> Vec<AbelianField> {
    let mut out = Vec::new();
    for m in 3..=n {
        if m % 4 == 2 {
            continue;
        }
        for h in subgroups(m) {
            if h.binary_search(&(m - 1)).is_err() {
                continue;
            }
            let e = AbelianField::build(m, h);
            if e.degree() > 1 && e.conductor() == m {
                out.push(e);
            }
        }
    }
    out
}

/// Shared cyclotomic field contexts keyed by modulus. Not global: callers own
/// one and pass it around.
#[derive(Default)]
pub struct FieldCache {
    fields: std::collections::HashMap<u64, Arc<CyclotomicField>>,
}

impl FieldCache {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn get(&mut self, m: u64) -> Arc<CyclotomicField> {
        self.fields.entry(m).or_insert_with(|| CyclotomicField::new(m)).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn basic_invariants() {
        let e = AbelianField::real_cyclotomic(12);
        assert_eq!(e.degree(), 2);
        assert!(e.is_real());
        assert_eq!(e.conductor(), 12);
        assert_eq!(e.ramified_primes(), vec![2, 3]);
        let q5 = AbelianField::real_cyclotomic(5);
        assert_eq!(q5.ramified_primes(), vec![5]);
        // ℚ(ζ_10) is ℚ(ζ_5)
        let c10 = AbelianField::cyclotomic(10);
        assert_eq!(c10.conductor(), 5);
        assert!(AbelianField::new(7, &[1, 2]).is_err());
        assert!(AbelianField::new(7, &[1, 2, 4]).is_ok());
    }

    #[test]
    fn frobenius_multiplicative() {
        let e = AbelianField::new(13, &[1, 5, 8, 12]).unwrap();
        for q1 in [2u64, 3, 7, 11] {
            for q2 in [17u64, 19, 23] {
                let a = e.frobenius(q1).unwrap();
                let b = e.frobenius(q2).unwrap();
                assert_eq!(e.frobenius(q1 * q2).unwrap(), e.mul_idx(a, b));
            }
        }
        assert!(e.frobenius(13).is_err());
    }

    #[test]
    fn decomposition_groups() {
        let c5 = AbelianField::cyclotomic(5);
        assert_eq!(c5.decomposition_group(Place::Infinite).len(), 2);
        assert_eq!(c5.decomposition_group(Place::Finite(11)).len(), 1);
        let e = AbelianField::real_cyclotomic(12);
        assert_eq!(e.decomposition_group(Place::Finite(2)).len(), 2);
        // 2 splits in ℚ(ζ_7)^+? 2 has order 3 mod 7, so Fr_2 has order 3 in C_3
        let e7 = AbelianField::real_cyclotomic(7);
        assert_eq!(e7.decomposition_group(Place::Finite(2)).len(), 3);
    }

    #[test]
    fn norms() {
        let c5 = AbelianField::cyclotomic(5);
        let q = AbelianField::rationals();
        let f5 = CyclotomicField::new(5);
        let n = norm(&CycElt::one_minus_zeta(&f5, 1), &c5, &q).unwrap();
        assert_eq!(n.as_rational().unwrap(), BigInt::from(5).into());
        let f9 = CyclotomicField::new(9);
        let f3 = CyclotomicField::new(3);
        let n = norm(&CycElt::one_minus_zeta(&f9, 1), &AbelianField::cyclotomic(9), &AbelianField::cyclotomic(3))
            .unwrap();
        assert_eq!(n, CycElt::one_minus_zeta(&f3, 1));
        assert!(norm(&CycElt::one(&f3), &AbelianField::cyclotomic(3), &c5).is_err());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(AbelianField::cyclotomic(3).roots_of_unity_order(), 6);
        assert_eq!(AbelianField::cyclotomic(4).roots_of_unity_order(), 4);
        assert_eq!(AbelianField::real_cyclotomic(5).roots_of_unity_order(), 2);
        assert_eq!(AbelianField::cyclotomic(5).roots_of_unity_order(), 10);
        let g = AbelianField::cyclotomic(3).mu_generator();
        assert_eq!(g.pow(6).unwrap(), CycElt::one(g.field()));
        assert_ne!(g.pow(3).unwrap(), CycElt::one(g.field()));
    }

    #[test]
    fn enumeration() {
        let fs = real_fields_up_to(13);
        // ℚ(√5), ℚ(ζ7)+, ℚ(√2), ℚ(ζ9)+, ℚ(√3), ℚ(ζ11)+ and its quadratic... 11 ≡ 3 mod 4, so only degree 5
        let conds: Vec<u64> = fs.iter().map(|e| e.modulus()).collect();
        assert!(conds.contains(&5) && conds.contains(&8) && conds.contains(&12));
        assert!(fs.iter().all(|e| e.is_real() && e.conductor() == e.modulus()));
        // ℚ(ζ13)^+ has subfields of degree 2, 3, 6
        let d13: Vec<usize> = fs.iter().filter(|e| e.modulus() == 13).map(|e| e.degree()).collect();
        assert_eq!(d13.len(), 3);
    }
}
