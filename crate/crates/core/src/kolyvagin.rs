//! Group-ring valuations v_q, the residue-field logarithm at a prime above q,
//! Kolyvagin derivative operators, S_m^𝔫 membership and the hypotheses
//! (H1)–(H5) over ℚ.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{gcd, is_prime, mult_order, prime_divisors};
use crate::characters::DirichletChar;
use crate::cyclo::{CycElt, CyclotomicField};
use crate::error::{Error, Result};
use crate::field::{AbelianField, Place};
use crate::finite_field::{DlogCache, FfElt};
use crate::group::Group;
use crate::group_ring::IntGroupRing;
use crate::lvalues::character_field;
use crate::valuation::{int_valuation, RamifiedPlace, UnramifiedPrime};

/// A prime 𝔔 of E above q ∤ m, fixed through a prime of ℚ(ζ_m) by ζ_m ↦ θ.
#[derive(Clone, Debug)]
pub struct PrimeAboveData {
    field: AbelianField,
    group: Arc<Group>,
    prime: UnramifiedPrime,
    /// residue degree of 𝔔 in E: order of Fr_q in G_E
    f_e: usize,
}

impl PrimeAboveData {
    pub fn new(e: &AbelianField, q: u64) -> Result<Self> {
        let prime = UnramifiedPrime::new(q, e.modulus())?;
        Self::from_prime(e, prime)
    }

    pub fn with_theta(e: &AbelianField, q: u64, theta: &[u64]) -> Result<Self> {
        let prime = UnramifiedPrime::with_theta(q, e.modulus(), theta)?;
        Self::from_prime(e, prime)
    }

    fn from_prime(e: &AbelianField, prime: UnramifiedPrime) -> Result<Self> {
        if !is_prime(prime.q()) {
            return Err(Error::Precondition(format!("{} is not prime", prime.q())));
        }
        let group = Group::of_field(e);
        let fr = e.index_of(prime.q() as i64)?;
        let f_e = e.order_of(fr);
        Ok(PrimeAboveData { field: e.clone(), group, prime, f_e })
    }

    pub fn field(&self) -> &AbelianField {
        &self.field
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn q(&self) -> u64 {
        self.prime.q()
    }

    pub fn prime(&self) -> &UnramifiedPrime {
        &self.prime
    }

    pub fn residue_degree(&self) -> usize {
        self.f_e
    }

    /// Number of primes of E above q.
    pub fn orbit_size(&self) -> usize {
        self.field.degree() / self.f_e
    }

    /// The prime σ^{-1}𝔔 for the group element σ.
    pub fn conjugate(&self, sigma: usize) -> Result<Self> {
        let s = self.field.rep(sigma);
        let m = self.field.modulus();
        let mut t = s;
        while gcd(t, m) != 1 {
            t += m;
        }
        Ok(PrimeAboveData { prime: self.prime.conjugate(t)?, ..self.clone() })
    }

    /// `{"q","m","H","theta","f"}` with f the degree of the residue field of ℚ(ζ_m) at 𝔔.
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.prime.q(),
            "m": self.field.modulus(),
            "H": self.field.subgroup(),
            "theta": self.prime.theta(),
            "f": self.prime.residue_field().degree(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get_u = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("prime data lacks integer {k:?}")));
        let q = get_u("q")?;
        let m = get_u("m")?;
        let h: Vec<u64> = match v.get("H") {
            Some(h) => serde_json::from_value(h.clone())?,
            None => vec![1 % m.max(1)],
        };
        let e = AbelianField::new(m, &h)?;
        let data = match v.get("theta") {
            Some(t) => Self::with_theta(&e, q, &serde_json::from_value::<Vec<u64>>(t.clone())?)?,
            None => Self::new(&e, q)?,
        };
        if let Some(f) = v.get("f") {
            let f = f.as_u64().ok_or_else(|| Error::Parse("\"f\" must be an integer".into()))?;
            if f != data.prime.residue_field().degree() as u64 {
                return Err(Error::Parse(format!("\"f\" = {f} but ord_{m}({q}) = {}", data.prime.residue_field().degree())));
            }
        }
        Ok(data)
    }
}

/// v_q(a) = Σ_σ ord_𝔔(σa)·σ^{-1} ∈ ℤ[G_E].
pub fn v_q(a: &CycElt, data: &PrimeAboveData) -> Result<IntGroupRing> {
    if a.is_zero() {
        return Err(Error::Precondition("v_q of zero".into()));
    }
    let e = &data.field;
    let a = to_field_level(a, e.modulus())?;
    if !e.contains_element(&a) {
        return Err(Error::Precondition(format!("{a} does not lie in {e:?}")));
    }
    let g = &data.group;
    let mut coeffs = vec![BigInt::zero(); g.order()];
    for s in 0..g.order() {
        coeffs[g.inv(s)] = BigInt::from(data.prime.ord(&e.act(s, &a)?)?);
    }
    Ok(IntGroupRing::new(g, coeffs))
}

fn to_field_level(a: &CycElt, m: u64) -> Result<CycElt> {
    let fm = CyclotomicField::new(m);
    if a.modulus() == m {
        Ok(a.clone())
    } else if m.is_multiple_of(a.modulus()) {
        a.lift(&fm)
    } else {
        a.descend(&fm).ok_or(Error::ModulusMismatch(a.modulus(), m))
    }
}

/// The coefficient sum of v_q(a) must equal ord_q N_{E/ℚ}(a).
pub fn orbit_sum_holds(a: &CycElt, data: &PrimeAboveData, v: &IntGroupRing) -> Result<bool> {
    let e = &data.field;
    let a = to_field_level(a, e.modulus())?;
    let n = a.norm_q();
    let total = int_valuation(n.numer(), data.q()) as i64 - int_valuation(n.denom(), data.q()) as i64;
    let rel = (crate::arith::totient(e.modulus()) as usize / e.degree()) as i64;
    let sum: BigInt = v.coeffs().iter().sum();
    Ok(total % rel == 0 && sum == BigInt::from(total / rel))
}

fn p_part_generator(data: &PrimeAboveData, p: u64, k: u32) -> Result<(u64, u64, FfElt)> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} must be an odd prime")));
    }
    let field = data.prime.residue_field();
    let n = field.size() - 1;
    if !n.is_multiple_of(p) {
        return Err(Error::Precondition(format!("the {p}-part of the residue field F_{}^× is trivial", field.size())));
    }
    let pk = p.checked_pow(k).ok_or_else(|| Error::Budget("p^k overflows".into()))?;
    if !n.is_multiple_of(pk) {
        return Err(Error::Precondition(format!("{p}^{k} does not divide {n}")));
    }
    let cof = n / pk;
    let g = field.pow(&field.primitive_element(), cof);
    Ok((pk, cof, g))
}

/// Discrete log of the residue of u at 𝔔 to the least primitive element,
/// reduced mod p^k.
pub fn residue_log(u: &CycElt, data: &PrimeAboveData, p: u64, k: u32, cache: &mut DlogCache) -> Result<u64> {
    let (pk, cof, g) = p_part_generator(data, p, k)?;
    residue_log_with(u, data, pk, cof, &g, cache)
}

fn residue_log_with(u: &CycElt, data: &PrimeAboveData, pk: u64, cof: u64, g: &[u64], cache: &mut DlogCache) -> Result<u64> {
    let field = data.prime.residue_field();
    let r = data
        .prime
        .residue(u)?
        .filter(|r| !field.is_zero(r))
        .ok_or_else(|| Error::Precondition(format!("{u} is not a unit at the prime above {}", data.q())))?;
    let t = field.pow(&r, cof);
    cache
        .get(field, g, pk)?
        .log(field, &t)
        .ok_or_else(|| Error::Precondition("p-part element outside the generated subgroup".into()))
}

/// Σ_σ λ(σu)·σ^{-1}, coefficients in ℤ/p^k indexed by G_E.
pub fn residue_log_vector(u: &CycElt, data: &PrimeAboveData, p: u64, k: u32, cache: &mut DlogCache) -> Result<Vec<u64>> {
    let (pk, cof, g) = p_part_generator(data, p, k)?;
    let e = &data.field;
    let u = to_field_level(u, e.modulus())?;
    let grp = &data.group;
    let mut out = vec![0; grp.order()];
    for s in 0..grp.order() {
        out[grp.inv(s)] = residue_log_with(&e.act(s, &u)?, data, pk, cof, &g, cache)?;
    }
    Ok(out)
}

/// D = Σ_{i=1}^{n-1} i·σ^i in ℤ[⟨σ⟩], ⟨σ⟩ cyclic of order n.
#[derive(Clone, Debug)]
pub struct DerivativeOp {
    pub n: usize,
    pub group: Arc<Group>,
    pub d: IntGroupRing,
}

impl DerivativeOp {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("cyclic group order must be positive".into()));
        }
        let group = Group::cyclic_product(&[n]);
        let coeffs = (0..n).map(BigInt::from).collect();
        let d = IntGroupRing::new(&group, coeffs);
        Ok(DerivativeOp { n, group, d })
    }

    /// (σ−1)·D = n − N.
    pub fn telescopes(&self) -> bool {
        let g = &self.group;
        let sigma = if self.n > 1 { 1 } else { 0 };
        let sm1 = IntGroupRing::monomial(g, sigma, BigInt::one()).sub(&IntGroupRing::one(g));
        let rhs = IntGroupRing::one(g).scale(&BigInt::from(self.n)).sub(&IntGroupRing::norm_element(g));
        sm1.mul(&self.d) == rhs
    }

    /// ∏_i σ^i(a)^i for the Galois element σ of E generating G_E.
    pub fn apply(&self, e: &AbelianField, sigma: usize, a: &CycElt) -> Result<CycElt> {
        self.check_generator(e, sigma)?;
        let mut acc = CycElt::one(a.field());
        let mut conj = a.clone();
        for i in 1..self.n {
            conj = e.act(sigma, &conj)?;
            acc = acc.mul(&conj.pow(i as i64)?);
        }
        Ok(acc)
    }

    fn check_generator(&self, e: &AbelianField, sigma: usize) -> Result<()> {
        if e.degree() != self.n || e.order_of(sigma) != self.n {
            return Err(Error::NonCyclic(format!(
                "{e:?} is not cyclic of order {} generated by {}",
                self.n,
                e.rep(sigma)
            )));
        }
        Ok(())
    }

    /// σ(Da)/Da = a^n / N(a), checked exactly.
    pub fn verify_apply(&self, e: &AbelianField, sigma: usize, a: &CycElt, da: &CycElt) -> Result<bool> {
        self.check_generator(e, sigma)?;
        let mut norm = a.clone();
        let mut conj = a.clone();
        for _ in 1..self.n {
            conj = e.act(sigma, &conj)?;
            norm = norm.mul(&conj);
        }
        let lhs = e.act(sigma, da)?.mul(&norm);
        let rhs = da.mul(&a.pow(self.n as i64)?);
        Ok(lhs == rhs)
    }
}

/// A generator of G_E when it is cyclic (the one with least residue representative).
pub fn cyclic_generator(e: &AbelianField) -> Result<usize> {
    (0..e.degree())
        .find(|&i| e.order_of(i) == e.degree())
        .ok_or_else(|| Error::NonCyclic(format!("{e:?} has non-cyclic Galois group")))
}

/// Prime factors of a nonzero integer by trial division up to `budget`; a
/// leftover cofactor below budget² is prime.
pub fn factor_bounded(n: &BigInt, budget: u64) -> Result<Vec<u64>> {
    let mut n = n.abs();
    if n.is_zero() {
        return Err(Error::Precondition("factoring zero".into()));
    }
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= budget {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        if n.is_multiple_of(&bd) {
            out.push(d);
            while n.is_multiple_of(&bd) {
                n /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let b = BigInt::from(budget);
        if n > &b * &b {
            return Err(Error::Budget(format!("cofactor {n} exceeds the trial-division budget {budget}")));
        }
        out.push(u64::try_from(&n).map_err(|_| Error::Budget("cofactor exceeds 64 bits".into()))?);
    }
    out.sort_unstable();
    Ok(out)
}

/// q ∈ 𝒫_level: q splits completely in E(μ_{p^level}), i.e. q ≡ 1 mod p^level and Fr_q = 1 in G_E.
pub fn in_kolyvagin_primes(q: u64, p: u64, level: u32, e: &AbelianField) -> bool {
    let pm = p.pow(level);
    if !is_prime(q) || q.is_multiple_of(p) || gcd(q, e.conductor()) != 1 {
        return false;
    }
    q % pm == 1 && e.frobenius(q).ok() == e.index_of(1).ok()
}

/// Oracle for [`in_kolyvagin_primes`]: Frobenius in the compositum E·ℚ(ζ_{p^level}).
pub fn splits_in_compositum(q: u64, p: u64, level: u32, e: &AbelianField) -> bool {
    let big = e.compositum(&AbelianField::cyclotomic(p.pow(level)));
    if !is_prime(q) || gcd(q, p * big.conductor()) != 1 {
        return false;
    }
    let fr = big.frobenius(q).expect("unramified");
    big.order_of(fr) == 1
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub prime: u64,
    /// coefficients of the valuation vector reduced mod p^level
    pub valuation: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub member: bool,
    pub checked_primes: Vec<u64>,
    pub witness: Option<Witness>,
}

/// Is a ∈ S^𝔫_level, i.e. v_𝔮(a) ≡ 0 mod p^level at every prime 𝔮 ∤ 𝔫 of E?
pub fn s_membership(a: &CycElt, e: &AbelianField, n: u64, p: u64, level: u32, budget: u64) -> Result<MembershipReport> {
    if n == 0 {
        return Err(Error::Precondition("𝔫 must be positive".into()));
    }
    let n_primes = prime_divisors(n);
    if n_primes.iter().any(|&q| (n / q).is_multiple_of(q)) {
        return Err(Error::Precondition(format!("𝔫 = {n} is not squarefree")));
    }
    for &q in &n_primes {
        if !in_kolyvagin_primes(q, p, level, e) {
            return Err(Error::Precondition(format!("{q} does not split completely in E(μ_{p}^{level})")));
        }
    }
    if a.is_zero() {
        return Err(Error::Precondition("zero is not in E^×".into()));
    }
    let e = e.canonical();
    let a = to_field_level(a, e.modulus())?;
    let c = CycElt::from_int_coeffs(a.field(), a.numerators().to_vec(), BigInt::one())?;
    let nc = c.norm_q();
    let mut cands = factor_bounded(nc.numer(), budget)?;
    cands.extend(factor_bounded(a.denominator(), budget)?);
    cands.sort_unstable();
    cands.dedup();
    let pm = BigInt::from(p.pow(level));
    let mut checked = Vec::new();
    for q in cands {
        if n_primes.contains(&q) {
            continue;
        }
        checked.push(q);
        let vals: Vec<BigInt> = if e.modulus().is_multiple_of(q) {
            let place = RamifiedPlace::new(&e, q)?;
            (0..e.degree()).map(|s| place.ord(&e.act(s, &a)?).map(BigInt::from)).collect::<Result<_>>()?
        } else {
            v_q(&a, &PrimeAboveData::new(&e, q)?)?.coeffs().to_vec()
        };
        let reduced: Vec<i64> = vals.iter().map(|v| i64::try_from(&v.mod_floor(&pm)).expect("small")).collect();
        if reduced.iter().any(|&v| v != 0) {
            return Ok(MembershipReport { member: false, checked_primes: checked, witness: Some(Witness { prime: q, valuation: reduced }) });
        }
    }
    Ok(MembershipReport { member: true, checked_primes: checked, witness: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesesReport {
    /// L ⊄ ℚ(μ_p)
    pub h1: bool,
    /// p ≠ 3 or χ² ≠ ω
    pub h2: bool,
    /// every prime ramified in F has nontrivial decomposition group in L; failures listed
    pub h3: bool,
    pub h3_split: Vec<u64>,
    /// χ even
    pub h4: bool,
    /// L/ℚ ramified
    pub h5: bool,
}

impl HypothesesReport {
    pub fn all(&self) -> bool {
        self.h1 && self.h2 && self.h3 && self.h4 && self.h5
    }
}

/// (H1)–(H5) for the odd prime p, a p-extension F/ℚ and χ of order prime to p.
pub fn hypotheses_check(p: u64, f: &AbelianField, chi: &DirichletChar) -> Result<HypothesesReport> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} must be an odd prime")));
    }
    let mut deg = f.degree() as u64;
    while deg.is_multiple_of(p) {
        deg /= p;
    }
    if deg != 1 {
        return Err(Error::Precondition(format!("[F:ℚ] = {} is not a power of {p}", f.degree())));
    }
    if chi.order().is_multiple_of(p) {
        return Err(Error::Precondition(format!("χ has order {} divisible by {p}", chi.order())));
    }
    let chi0 = chi.primitive();
    let cond = chi0.modulus();
    let (l, _) = character_field(&chi0)?;
    let h1 = !p.is_multiple_of(cond);
    let h2 = if p == 3 {
        let omega = DirichletChar::new(3, &[1])?;
        chi0.pow(2).primitive() != omega
    } else {
        true
    };
    let h3_split: Vec<u64> = f
        .ramified_primes()
        .into_iter()
        .filter(|&q| l.decomposition_group(Place::Finite(q)).len() == 1)
        .collect();
    let log = crate::characters::UnitLog::new(cond);
    Ok(HypothesesReport {
        h1,
        h2,
        h3: h3_split.is_empty(),
        h3_split,
        h4: chi0.is_even(&log),
        h5: cond != 1,
    })
}

/// Degree of the residue field of ℚ(ζ_m) at a prime above q.
pub fn coordinate_degree(q: u64, m: u64) -> u64 {
    if m <= 2 {
        1
    } else {
        mult_order(q % m, m).unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::dlog_naive;

    fn c5() -> (AbelianField, Arc<CyclotomicField>) {
        (AbelianField::cyclotomic(5), CyclotomicField::new(5))
    }

    #[test]
    fn valuation_vectors() {
        let (e, k) = c5();
        let data = PrimeAboveData::with_theta(&e, 11, &[3]).unwrap();
        let a = CycElt::from_zeta_sum(&k, &[(0, 3), (1, -1)]);
        let v = v_q(&a, &data).unwrap();
        // N(3 − ζ_5) = 11², concentrated at the prime ζ_5 ↦ 3
        assert_eq!(v, IntGroupRing::from_i64(data.group(), &[2, 0, 0, 0]));
        assert!(orbit_sum_holds(&a, &data, &v).unwrap());
        let b = CycElt::one_minus_zeta(&k, 1);
        assert!(v_q(&b, &data).unwrap().is_zero());
        let q = AbelianField::rationals();
        let d = PrimeAboveData::new(&q, 11).unwrap();
        let eleven = CycElt::from_int(&CyclotomicField::new(1), 11);
        assert_eq!(v_q(&eleven, &d).unwrap().coeffs(), &[BigInt::from(1)]);
        assert!(PrimeAboveData::new(&e, 5).is_err());
        assert!(v_q(&CycElt::zero(&k), &data).is_err());
    }

    #[test]
    fn residue_log_examples() {
        let (e, k) = c5();
        let data = PrimeAboveData::with_theta(&e, 11, &[3]).unwrap();
        let mut cache = DlogCache::new(None);
        let three = CycElt::from_int(&k, 3);
        assert_eq!(residue_log(&three, &data, 5, 1, &mut cache).unwrap(), 3);
        assert_eq!(residue_log(&CycElt::one(&k), &data, 5, 1, &mut cache).unwrap(), 0);
        let f = data.prime().residue_field().clone();
        for a in 1..11 {
            assert_eq!(dlog_naive(&f, &[2], &[a]).unwrap() % 5, residue_log(&CycElt::from_int(&k, a as i64), &data, 5, 1, &mut cache).unwrap());
        }
        assert!(residue_log(&CycElt::from_int(&k, 11), &data, 5, 1, &mut cache).is_err());
        assert!(residue_log(&three, &data, 3, 1, &mut cache).is_err());
    }

    #[test]
    fn residue_log_equivariance() {
        let (e, k) = c5();
        let data = PrimeAboveData::new(&e, 31).unwrap();
        let mut cache = DlogCache::new(None);
        let u = CycElt::from_zeta_sum(&k, &[(0, 2), (1, 1), (3, -1)]);
        let vec = residue_log_vector(&u, &data, 5, 1, &mut cache).unwrap();
        for s in 0..e.degree() {
            let moved = residue_log(&e.act(s, &u).unwrap(), &data, 5, 1, &mut cache).unwrap();
            let at_conj = residue_log(&u, &data.conjugate(s).unwrap(), 5, 1, &mut cache).unwrap();
            assert_eq!(moved, at_conj);
            assert_eq!(vec[data.group().inv(s)], moved);
        }
    }

    #[test]
    fn telescoping() {
        for n in 1..=50 {
            assert!(DerivativeOp::new(n).unwrap().telescopes(), "n = {n}");
        }
        let d2 = DerivativeOp::new(2).unwrap();
        assert_eq!(d2.d, IntGroupRing::from_i64(&d2.group, &[0, 1]));
    }

    #[test]
    fn derivative_on_q_zeta7() {
        let e = AbelianField::cyclotomic(7);
        let k = CyclotomicField::new(7);
        let sigma = cyclic_generator(&e).unwrap();
        assert_eq!(e.rep(sigma), 3);
        let op = DerivativeOp::new(6).unwrap();
        let a = CycElt::one_minus_zeta(&k, 1);
        let da = op.apply(&e, sigma, &a).unwrap();
        assert!(op.verify_apply(&e, sigma, &a, &da).unwrap());
        // exponent bookkeeping: ∏_i (1 − ζ^{3^i})^i
        let mut direct = CycElt::one(&k);
        for i in 1..6 {
            direct = direct.mul(&CycElt::one_minus_zeta(&k, crate::arith::pow_mod(3, i, 7) as i64).pow(i as i64).unwrap());
        }
        assert_eq!(da, direct);
        assert!(matches!(cyclic_generator(&AbelianField::cyclotomic(8)), Err(Error::NonCyclic(_))));
        assert!(op.apply(&AbelianField::cyclotomic(8), 1, &a).is_err());
    }

    #[test]
    fn membership() {
        let (e, k) = c5();
        let a = CycElt::from_zeta_sum(&k, &[(0, 3), (1, -1)]);
        assert!(s_membership(&a, &e, 11, 5, 1, 1 << 20).unwrap().member);
        let r = s_membership(&a, &e, 1, 5, 1, 1 << 20).unwrap();
        assert!(!r.member);
        assert_eq!(r.witness.unwrap().prime, 11);
        // (1 − ζ²)/(1 − ζ) is a unit
        let u = CycElt::one_minus_zeta(&k, 2).try_div(&CycElt::one_minus_zeta(&k, 1)).unwrap();
        assert!(s_membership(&u, &e, 1, 5, 1, 1 << 20).unwrap().member);
        // 1 − ζ_5 has valuation 1 at the prime above 5
        assert!(!s_membership(&CycElt::one_minus_zeta(&k, 1), &e, 1, 5, 1, 1 << 20).unwrap().member);
        assert!(s_membership(&a, &e, 121, 5, 1, 1 << 20).is_err());
        assert!(s_membership(&a, &e, 7, 5, 1, 1 << 20).is_err());
        // closed under the group action and under multiplication by units
        for s in 0..4 {
            let b = e.act(s, &a).unwrap().mul(&u);
            assert!(s_membership(&b, &e, 11, 5, 1, 1 << 20).unwrap().member);
        }
        // 11^5 vanishes mod 5
        let big = CycElt::from_int(&k, 11i64.pow(5));
        assert!(s_membership(&big, &e, 1, 5, 1, 1 << 20).unwrap().member);
    }

    #[test]
    fn bounded_factoring() {
        assert_eq!(factor_bounded(&BigInt::from(121), 100).unwrap(), vec![11]);
        assert_eq!(factor_bounded(&BigInt::from(2 * 1_000_003i64), 2000).unwrap(), vec![2, 1_000_003]);
        assert!(matches!(factor_bounded(&BigInt::from(1_000_003i64 * 1_000_033), 100), Err(Error::Budget(_))));
    }

    #[test]
    fn kolyvagin_primes_match_frobenius() {
        for e in [AbelianField::real_cyclotomic(13), AbelianField::cyclotomic(12), AbelianField::new(21, &[1, 4, 16]).unwrap()] {
            for (p, level) in [(3u64, 1u32), (5, 1), (3, 2)] {
                let primes: Vec<u64> = crate::arith::primes_up_to(5000).into_iter().take(200).collect();
                for q in primes {
                    assert_eq!(in_kolyvagin_primes(q, p, level, &e), splits_in_compositum(q, p, level, &e), "{q} {p}^{level} {e:?}");
                }
            }
        }
    }

    #[test]
    fn hypotheses() {
        let f = AbelianField::new(11, &[1, 10]).unwrap();
        assert_eq!(f.degree(), 5);
        let chi12 = DirichletChar::parse("12:quadratic").unwrap();
        let r = hypotheses_check(5, &f, &chi12).unwrap();
        assert!(r.h1 && r.h2 && r.h4 && r.h5);
        // ℚ(√3) is real, so Fr_11 = −1 is trivial there and 11 splits
        assert!(!r.h3);
        assert_eq!(r.h3_split, vec![11]);
        let chi12_odd = DirichletChar::parse("3:1").unwrap();
        assert!(hypotheses_check(5, &f, &chi12_odd).unwrap().h3);
        let chi5 = DirichletChar::parse("5:quadratic").unwrap();
        assert!(!hypotheses_check(5, &f, &chi5).unwrap().h1);
        let odd = DirichletChar::parse("4:1").unwrap();
        assert!(!hypotheses_check(5, &f, &odd).unwrap().h4);
        assert!(!hypotheses_check(5, &f, &DirichletChar::trivial(1)).unwrap().h5);
        let f3 = AbelianField::new(7, &[1, 6]).unwrap();
        let omega = DirichletChar::new(4, &[1]).unwrap();
        assert!(hypotheses_check(3, &f3, &omega).unwrap().h2);
        assert!(hypotheses_check(2, &f3, &omega).is_err());
        assert!(hypotheses_check(5, &f3, &omega).is_err());
    }

    #[test]
    fn prime_data_json() {
        let (e, _) = c5();
        let data = PrimeAboveData::with_theta(&e, 11, &[3]).unwrap();
        let v = data.to_json();
        assert_eq!(v["f"], 1);
        let back = PrimeAboveData::from_json(&v).unwrap();
        assert_eq!(back.prime().theta(), &vec![3]);
        assert_eq!(data.orbit_size(), 4);
        assert!(PrimeAboveData::from_json(&json!({"q": 11, "m": 5, "theta": [2]})).is_err());
    }
}
