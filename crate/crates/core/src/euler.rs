//! Rank-one Euler systems over abelian fields, distribution relations, the
//! cyclotomic system ε, circular distributions and the checks built on them.
//!
//! A system value is a pair `(v, d)` standing for the formal power `v^{1/d}`;
//! every identity is checked after raising both sides to a common multiple of
//! the denominators.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::{gcd, inv_mod, is_prime, lcm, pow_mod, primes_up_to, totient};
use crate::certificate::Check;
use crate::cyclo::{CycElt, CyclotomicField};
use crate::error::{Error, Result};
use crate::field::{norm, subgroups, AbelianField};
use crate::group::Group;
use crate::group_ring::{project, IntGroupRing};
use crate::kolyvagin::{factor_bounded, v_q, PrimeAboveData};
use crate::linalg::{self, IMat};
use crate::par::Exec;
use crate::places::{default_u, euler_factor, AnnihilatorIdeal, EulerVariant};
use crate::valuation::UnramifiedPrime;

/// `(conductor, H)` of the canonical presentation.
pub type FieldKey = (u64, Vec<u64>);

pub fn field_key(e: &AbelianField) -> FieldKey {
    let c = e.canonical();
    (c.modulus(), c.subgroup().to_vec())
}

/// u^x = ∏_σ σ(u)^{x_σ} for x ∈ ℤ[G_E].
pub fn apply_exponent(e: &AbelianField, x: &IntGroupRing, u: &CycElt) -> Result<CycElt> {
    let mut acc = CycElt::one(u.field());
    for (i, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.mul(&e.act(i, u)?.pow_big(c)?);
    }
    Ok(acc)
}

fn lift_to(u: &CycElt, m: u64) -> Result<CycElt> {
    let f = CyclotomicField::new(m);
    if u.modulus() == m {
        Ok(u.clone())
    } else if m.is_multiple_of(u.modulus()) {
        u.lift(&f)
    } else {
        u.descend(&f).ok_or(Error::ModulusMismatch(u.modulus(), m))
    }
}

fn is_torsion(u: &CycElt) -> bool {
    u.torsion_test().is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// values in O^× on the nose
    Classical,
    /// values modulo torsion
    RankOneTf,
    /// values in ℚ ⊗ O^×, with formal rational exponents
    Rational,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Classical => "classical",
            Flavor::RankOneTf => "rank-one-tf",
            Flavor::Rational => "rational",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Flavor::Classical),
            "rank-one-tf" => Ok(Flavor::RankOneTf),
            "rational" => Ok(Flavor::Rational),
            _ => Err(Error::Parse(format!("unknown flavor {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SystemEntry {
    pub field: AbelianField,
    pub value: CycElt,
    pub exp_den: u32,
}

/// A finite family of rank-one system values indexed by fields.
#[derive(Clone, Debug)]
pub struct EulerSystemData {
    pub flavor: Flavor,
    entries: BTreeMap<FieldKey, SystemEntry>,
}

impl EulerSystemData {
    pub fn new(flavor: Flavor) -> Self {
        EulerSystemData { flavor, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, e: &AbelianField, value: CycElt, exp_den: u32) -> Result<()> {
        if exp_den == 0 {
            return Err(Error::Precondition("exp_den must be positive".into()));
        }
        let e = e.canonical();
        if e.is_rationals() {
            return Err(Error::Precondition("systems have no component at ℚ".into()));
        }
        let value = lift_to(&value, lcm(value.modulus(), e.modulus()))?;
        let value = value.descend(&CyclotomicField::new(e.modulus())).unwrap_or(value);
        if value.is_zero() || !e.contains_element(&value) {
            return Err(Error::Precondition(format!("value {value} is not a nonzero element of {e:?}")));
        }
        self.entries.insert(field_key(&e), SystemEntry { field: e, value, exp_den });
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = &SystemEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, e: &AbelianField) -> Option<&SystemEntry> {
        self.entries.get(&field_key(e))
    }

    pub fn entry_mut(&mut self, e: &AbelianField) -> Option<&mut SystemEntry> {
        self.entries.get_mut(&field_key(e))
    }

    pub fn max_conductor(&self) -> u64 {
        self.entries.keys().map(|k| k.0).max().unwrap_or(1)
    }

    /// c_E, from a stored entry or by norm from the smallest stored field with
    /// the same ramification; the value lives in ℚ(ζ_f), f the conductor of E.
    pub fn value_at(&self, e: &AbelianField) -> Result<(CycElt, u32)> {
        let e = e.canonical();
        if let Some(s) = self.entries.get(&field_key(&e)) {
            return Ok((s.value.clone(), s.exp_den));
        }
        let ram = e.ramified_primes();
        let src = self
            .entries
            .values()
            .filter(|s| s.field.contains(&e) && s.field.ramified_primes() == ram)
            .min_by_key(|s| (s.field.degree(), field_key(&s.field)))
            .ok_or_else(|| Error::FieldMissing(format!("{e:?} is not covered by the family")))?;
        Ok((norm(&s_value(src), &src.field, &e)?, src.exp_den))
    }

    pub fn contains_field(&self, e: &AbelianField) -> bool {
        self.value_at(e).is_ok()
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .values()
            .map(|s| json!({"m": s.field.modulus(), "H": s.field.subgroup(), "value": s.value.to_json(), "exp_den": s.exp_den}))
            .collect();
        json!({"flavor": self.flavor.name(), "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let flavor = Flavor::parse(v["flavor"].as_str().ok_or_else(|| Error::Parse("system lacks \"flavor\"".into()))?)?;
        let entries = v["entries"].as_array().ok_or_else(|| Error::Parse("system lacks \"entries\"".into()))?;
        let mut sys = EulerSystemData::new(flavor);
        for (i, ent) in entries.iter().enumerate() {
            let at = |msg: &str| Error::Parse(format!("entries[{i}]: {msg}"));
            let m = ent["m"].as_u64().ok_or_else(|| at("missing \"m\""))?;
            let h: Vec<u64> = serde_json::from_value(ent["H"].clone()).map_err(|e| at(&e.to_string()))?;
            let e = AbelianField::new(m, &h).map_err(|e| at(&e.to_string()))?;
            let value = CycElt::from_json(&ent["value"]).map_err(|e| at(&e.to_string()))?;
            let d = ent.get("exp_den").and_then(Value::as_u64).unwrap_or(1) as u32;
            sys.insert(&e, value, d).map_err(|e| at(&e.to_string()))?;
        }
        Ok(sys)
    }
}

fn s_value(s: &SystemEntry) -> CycElt {
    s.value.clone()
}

fn check_ddagger(m: u64) -> Result<()> {
    if m <= 1 || m % 4 == 2 || m == 3 || m == 4 {
        return Err(Error::Precondition(format!("level {m} is not ≢ 2 mod 4 with ℚ({m})^+ ≠ ℚ")));
    }
    Ok(())
}

/// (1−ζ_m)^{1+τ} = 2 − ζ_m − ζ_m^{-1}.
pub fn epsilon_square(m: u64) -> CycElt {
    let f = CyclotomicField::new(m);
    CycElt::from_zeta_sum(&f, &[(0, 2), (1, -1), (m as i64 - 1, -1)])
}

/// ε_{ℚ(m)^+} = (1−ζ_m)^{(1+τ)/2}, stored as ((1−ζ_m)^{1+τ}, 2).
pub fn epsilon_system(levels: &[u64]) -> Result<EulerSystemData> {
    let mut sys = EulerSystemData::new(Flavor::Rational);
    for &m in levels {
        check_ddagger(m)?;
        sys.insert(&AbelianField::real_cyclotomic(m), epsilon_square(m), 2)?;
    }
    Ok(sys)
}

/// ℕ^‡ up to n.
pub fn ddagger_levels(n: u64) -> Vec<u64> {
    (5..=n).filter(|&m| m % 4 != 2).collect()
}

/// ℕ^† up to n.
pub fn dagger_levels(n: u64) -> Vec<u64> {
    (3..=n).filter(|&m| m % 4 != 2).collect()
}

/// c_{ℚ(m)} = 1 − ζ_m over ℕ^†.
pub fn cyclotomic_system(levels: &[u64]) -> Result<EulerSystemData> {
    let mut sys = EulerSystemData::new(Flavor::Classical);
    for &m in levels {
        if m <= 2 || m % 4 == 2 {
            return Err(Error::Precondition(format!("level {m} is not in ℕ^†")));
        }
        sys.insert(&AbelianField::cyclotomic(m), CycElt::one_minus_zeta(&CyclotomicField::new(m), 1), 1)?;
    }
    Ok(sys)
}

/// Abelian fields ≠ ℚ of conductor at most n, presented at their conductor.
pub fn fields_up_to(n: u64, real_only: bool) -> Vec<AbelianField> {
    let mut out = Vec::new();
    for m in 3..=n {
        if m % 4 == 2 {
            continue;
        }
        for h in subgroups(m) {
            if real_only && h.binary_search(&(m - 1)).is_err() {
                continue;
            }
            let e = AbelianField::new(m, &h).expect("subgroup");
            if e.degree() > 1 && e.conductor() == m {
                out.push(e);
            }
        }
    }
    out
}

/// N_{E'/E}(c_{E'}) = ∏_{v ∈ S(E')∖S(E)} (1 − Fr_v^{-1})·c_E.
pub fn verify_distribution(sys: &EulerSystemData, e: &AbelianField, ep: &AbelianField) -> Result<Check> {
    let big = sys.value_at(ep)?;
    let small = sys.value_at(e)?;
    distribution_check(sys.flavor, e, ep, &small, &big)
}

fn distribution_check(flavor: Flavor, e: &AbelianField, ep: &AbelianField, small: &(CycElt, u32), big: &(CycElt, u32)) -> Result<Check> {
    let e = e.canonical();
    let ep = ep.canonical();
    if !ep.contains(&e) {
        return Err(Error::NotNested(format!("{e:?} ⊄ {ep:?}")));
    }
    let group = Group::of_field(&e);
    let ram = e.ramified_primes();
    let new_primes: Vec<u64> = ep.ramified_primes().into_iter().filter(|p| !ram.contains(p)).collect();
    let mut x = IntGroupRing::one(&group);
    for &v in &new_primes {
        x = x.mul(&euler_factor(&e, &group, v, EulerVariant::Plain)?);
    }
    let lhs = norm(&big.0, &ep, &e)?;
    let rhs = apply_exponent(&e, &x, &small.0)?;
    let l = lcm(small.1 as u64, big.1 as u64);
    let lhs = lhs.pow((l / big.1 as u64) as i64)?;
    let rhs = rhs.pow((l / small.1 as u64) as i64)?;
    let ok = match flavor {
        Flavor::Classical => lhs == rhs,
        Flavor::RankOneTf | Flavor::Rational => is_torsion(&lhs.try_div(&rhs)?),
    };
    let name = format!("dist {:?} <= {:?}", field_key(&e), field_key(&ep));
    let details = json!({"E": field_json(&e), "E'": field_json(&ep), "euler_primes": new_primes, "power": l});
    if ok {
        Ok(Check::pass(name, details))
    } else {
        let q = lhs.try_div(&rhs)?;
        Ok(Check::fail(name, details, json!({"lhs": lhs.to_json(), "rhs": rhs.to_json(), "quotient": q.to_json()})))
    }
}

pub fn field_json(e: &AbelianField) -> Value {
    json!({"m": e.modulus(), "H": e.subgroup()})
}

/// verify_distribution over every nested pair E ⊊ E' of family fields with
/// conductor at most n.
pub fn distribution_suite(sys: &EulerSystemData, n: u64, exec: Exec) -> Result<Vec<Check>> {
    if n < 3 {
        return Ok(Vec::new());
    }
    let real_only = sys.entries().all(|s| s.field.is_real());
    let cands = fields_up_to(n, real_only);
    let values: Vec<Option<(CycElt, u32)>> = exec.map(&cands, |e| sys.value_at(e).ok());
    let fields: Vec<(AbelianField, (CycElt, u32))> =
        cands.into_iter().zip(values).filter_map(|(e, v)| v.map(|v| (e, v))).collect();
    let mut pairs = Vec::new();
    for (i, (ep, _)) in fields.iter().enumerate() {
        for (j, (e, _)) in fields.iter().enumerate() {
            if i != j && ep.contains(e) {
                pairs.push((j, i));
            }
        }
    }
    exec.map(&pairs, |&(j, i)| distribution_check(sys.flavor, &fields[j].0, &fields[i].0, &fields[j].1, &fields[i].1))
        .into_iter()
        .collect()
}

/// Every value is an S(E)-unit: v_q vanishes at all primes q ∉ S(E) dividing its norm.
pub fn s_unit_check(sys: &EulerSystemData, budget: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in sys.entries() {
        let e = &s.field;
        let c = CycElt::from_int_coeffs(s.value.field(), s.value.numerators().to_vec(), BigInt::one())?;
        let nc = c.norm_q();
        let mut primes = factor_bounded(nc.numer(), budget)?;
        primes.extend(factor_bounded(s.value.denominator(), budget)?);
        primes.sort_unstable();
        primes.dedup();
        let ram = e.ramified_primes();
        let name = format!("S-unit {:?}", field_key(e));
        let mut bad = None;
        for q in primes.into_iter().filter(|q| !ram.contains(q) && e.modulus() % q != 0) {
            let v = v_q(&s.value, &PrimeAboveData::new(e, q)?)?;
            if !v.is_zero() {
                bad = Some(json!({"q": q, "v_q": v.to_json()}));
                break;
            }
        }
        out.push(match bad {
            None => Check::pass(name, field_json(e)),
            Some(w) => Check::fail(name, field_json(e), w),
        });
    }
    Ok(out)
}

/// Representative of u·μ_E with the least coefficient vector.
pub fn normalize_mod_torsion(e: &AbelianField, u: &CycElt) -> Result<CycElt> {
    let xi = lift_to(&e.mu_generator(), u.modulus())?;
    let w = e.roots_of_unity_order();
    let mut best = u.clone();
    let mut cur = u.clone();
    for _ in 1..w {
        cur = cur.mul(&xi);
        if (cur.numerators(), cur.denominator()) < (best.numerators(), best.denominator()) {
            best = cur.clone();
        }
    }
    Ok(best)
}

/// Reduction of a classical system modulo torsion.
pub fn classical_to_rank_one(sys: &EulerSystemData) -> Result<EulerSystemData> {
    if sys.flavor != Flavor::Classical {
        return Err(Error::Precondition("expected a classical system".into()));
    }
    let mut out = EulerSystemData::new(Flavor::RankOneTf);
    for s in sys.entries() {
        out.insert(&s.field, normalize_mod_torsion(&s.field, &s.value)?, s.exp_den)?;
    }
    Ok(out)
}

/// c'_E = (c̃_E)^{a_E} for a_E ∈ A_E; the result does not depend on the lift c̃_E.
pub fn a_twist(sys: &EulerSystemData, a: &BTreeMap<FieldKey, IntGroupRing>) -> Result<EulerSystemData> {
    if sys.flavor != Flavor::RankOneTf {
        return Err(Error::Precondition("a_twist expects a rank-one-tf system".into()));
    }
    let mut out = EulerSystemData::new(Flavor::Classical);
    for s in sys.entries() {
        if s.exp_den != 1 {
            return Err(Error::Precondition("a_twist needs integral values".into()));
        }
        let e = &s.field;
        let x = a.get(&field_key(e)).ok_or_else(|| Error::FieldMissing(format!("no a_E given for {e:?}")))?;
        let group = Group::of_field(e);
        if x.coeffs().len() != group.order() {
            return Err(Error::Precondition(format!("a_E has the wrong length for {e:?}")));
        }
        let ideal = AnnihilatorIdeal::new(e, &group, &default_u(e))?;
        if !ideal.contains(x) {
            return Err(Error::NotInAnnihilator(format!("{x:?} ∉ A_E for {e:?}")));
        }
        let c = apply_exponent(e, x, &s.value)?;
        let xi = lift_to(&e.mu_generator(), s.value.modulus())?;
        let other = apply_exponent(e, x, &s.value.mul(&xi))?;
        if other != c {
            return Err(Error::Precondition(format!("a_E does not kill μ_E for {e:?}")));
        }
        out.insert(e, c, 1)?;
    }
    Ok(out)
}

/// A Galois-equivariant function on roots of unity of the given orders, stored
/// as values f(ζ_m^a) at chosen exponents a.
#[derive(Clone, Debug, PartialEq)]
pub struct CircularDist {
    values: BTreeMap<u64, Vec<(u64, CycElt)>>,
}

impl CircularDist {
    pub fn new() -> Self {
        CircularDist { values: BTreeMap::new() }
    }

    /// Set f(ζ_m^a), a coprime to m.
    pub fn set(&mut self, m: u64, a: u64, v: CycElt) -> Result<()> {
        if m < 2 {
            return Err(Error::Precondition("orders must be at least 2".into()));
        }
        if gcd(a, m) != 1 {
            return Err(Error::NotCoprime { s: a, m });
        }
        let v = lift_to(&v, m)?;
        if v.is_zero() {
            return Err(Error::Precondition("circular distributions take values in ℚ^c×".into()));
        }
        let slot = self.values.entry(m).or_default();
        slot.retain(|(b, _)| *b != a % m);
        slot.push((a % m, v));
        slot.sort_by_key(|(b, _)| *b);
        Ok(())
    }

    pub fn from_fn(levels: &[u64], f: impl Fn(u64) -> Result<CycElt>) -> Result<Self> {
        let mut d = CircularDist::new();
        for &m in levels {
            d.set(m, 1, f(m)?)?;
        }
        Ok(d)
    }

    pub fn levels(&self) -> BTreeSet<u64> {
        self.values.keys().copied().collect()
    }

    /// f(ζ_m^a) by equivariance from the first stored exponent at m.
    pub fn value(&self, m: u64, a: u64) -> Result<CycElt> {
        let (a0, v0) = self
            .values
            .get(&m)
            .and_then(|v| v.first())
            .ok_or_else(|| Error::FieldMissing(format!("no value at order {m}")))?;
        let s = crate::arith::mul_mod(a % m, inv_mod(*a0, m).ok_or(Error::NotCoprime { s: *a0, m })?, m);
        if m <= 2 {
            return Ok(v0.clone());
        }
        v0.galois(s as i64)
    }

    pub fn map(&self, f: impl Fn(&CycElt) -> Result<CycElt>) -> Result<Self> {
        let mut out = CircularDist::new();
        for (&m, vs) in &self.values {
            for (a, v) in vs {
                out.set(m, *a, f(v)?)?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .values
            .iter()
            .flat_map(|(m, vs)| vs.iter().map(move |(a, v)| json!({"m": m, "a": a, "value": v.to_json()})))
            .collect();
        json!({"levels": self.levels(), "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let entries = v["entries"].as_array().ok_or_else(|| Error::Parse("distribution lacks \"entries\"".into()))?;
        let mut d = CircularDist::new();
        for (i, ent) in entries.iter().enumerate() {
            let at = |msg: String| Error::Parse(format!("entries[{i}]: {msg}"));
            let m = ent["m"].as_u64().ok_or_else(|| at("missing \"m\"".into()))?;
            let a = ent.get("a").and_then(Value::as_u64).unwrap_or(1);
            let val = CycElt::from_json(&ent["value"]).map_err(|e| at(e.to_string()))?;
            d.set(m, a, val).map_err(|e| at(e.to_string()))?;
        }
        Ok(d)
    }
}

impl Default for CircularDist {
    fn default() -> Self {
        Self::new()
    }
}

/// Φ(ζ) = 1 − ζ on the given orders.
pub fn phi_distribution(levels: &[u64]) -> Result<CircularDist> {
    CircularDist::from_fn(levels, |m| Ok(CycElt::one_minus_zeta(&CyclotomicField::new(m), 1)))
}

/// f(ζ) = −1 when ζ has order a positive power of the odd prime p, else 1.
pub fn finite_order_distribution(p: u64, levels: &[u64]) -> Result<CircularDist> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition("p must be an odd prime".into()));
    }
    CircularDist::from_fn(levels, |m| {
        let mut k = m;
        while k % p == 0 {
            k /= p;
        }
        let s = if k == 1 { -1 } else { 1 };
        Ok(CycElt::from_int(&CyclotomicField::new(m), s))
    })
}

/// The (a, n) instance: ∏_{ζ^a = ζ_n} f(ζ) against f(ζ_n).
pub fn distribution_instance(f: &CircularDist, a: u64, n: u64) -> Result<Option<(CycElt, CycElt)>> {
    let levels = f.levels();
    let big = a * n;
    if !levels.contains(&n) {
        return Ok(None);
    }
    let mut orders = Vec::new();
    for j in 0..a {
        let e = (1 + n * j) % big;
        let d = big / gcd(e, big);
        if !levels.contains(&d) {
            return Ok(None);
        }
        orders.push((e, d));
    }
    let mut lhs = CycElt::one(&CyclotomicField::new(big));
    for (e, d) in orders {
        let ed = e / (big / d);
        lhs = lhs.mul(&lift_to(&f.value(d, ed)?, big)?);
    }
    let rhs = lift_to(&f.value(n, 1)?, big)?;
    Ok(Some((lhs, rhs)))
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub equivariance: Vec<Check>,
    pub instances: Vec<Check>,
    /// (a, n) pairs that failed
    pub exceptional: Vec<(u64, u64)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.equivariance.iter().chain(&self.instances).all(|c| c.passed)
    }

    pub fn checks(&self) -> Vec<Check> {
        self.equivariance.iter().chain(&self.instances).cloned().collect()
    }
}

/// Equivariance of the stored values and every product relation whose orders
/// all lie in the level set.
pub fn circular_axiom_check(f: &CircularDist, exec: Exec) -> Result<AxiomReport> {
    let mut equivariance = Vec::new();
    for (&m, vs) in &f.values {
        let (a0, v0) = &vs[0];
        for (a, v) in &vs[1..] {
            let s = crate::arith::mul_mod(*a, inv_mod(*a0, m).expect("unit"), m);
            let expect = if m <= 2 { v0.clone() } else { v0.galois(s as i64)? };
            let name = format!("equivariance m={m} a={a}");
            equivariance.push(if &expect == v {
                Check::pass(name, json!({"m": m, "a": a}))
            } else {
                Check::fail(name, json!({"m": m, "a": a}), json!({"stored": v.to_json(), "expected": expect.to_json()}))
            });
        }
    }
    let levels: Vec<u64> = f.levels().into_iter().collect();
    let max = levels.last().copied().unwrap_or(0);
    let mut pairs = Vec::new();
    for &n in &levels {
        for a in 2..=max / n {
            if f.levels().contains(&(a * n)) {
                pairs.push((a, n));
            }
        }
    }
    let results: Vec<Result<Option<Check>>> = exec.map(&pairs, |&(a, n)| {
        Ok(distribution_instance(f, a, n)?.map(|(lhs, rhs)| {
            let name = format!("relation a={a} n={n}");
            if lhs == rhs {
                Check::pass(name, json!({"a": a, "n": n}))
            } else {
                Check::fail(name, json!({"a": a, "n": n}), json!({"product": lhs.to_json(), "value": rhs.to_json()}))
            }
        }))
    });
    let mut instances = Vec::new();
    for r in results {
        if let Some(c) = r? {
            instances.push(c);
        }
    }
    let exceptional = instances
        .iter()
        .filter(|c| !c.passed)
        .map(|c| (c.details["a"].as_u64().unwrap_or(0), c.details["n"].as_u64().unwrap_or(0)))
        .collect();
    Ok(AxiomReport { equivariance, instances, exceptional })
}

/// f² = 1 at every stored value.
pub fn has_order_two(f: &CircularDist) -> bool {
    f.values.values().flatten().all(|(_, v)| v.mul(v).is_one())
}

/// The distribution f_c attached to a classical system over ℚ^ab.
pub fn es_to_distribution(c: &EulerSystemData, n: u64) -> Result<CircularDist> {
    if c.flavor != Flavor::Classical {
        return Err(Error::Precondition("expected a classical system".into()));
    }
    let mut d = CircularDist::new();
    for m in 2..=n {
        let val = if m % 4 != 2 {
            match c.value_at(&AbelianField::cyclotomic(m)) {
                Ok((v, 1)) => v,
                Ok(_) => return Err(Error::Precondition("classical values must be integral powers".into())),
                Err(_) => continue,
            }
        } else if m > 2 {
            let mp = m / 2;
            let e = AbelianField::cyclotomic(mp);
            let Ok((v, 1)) = c.value_at(&e) else { continue };
            let group = Group::of_field(&e);
            let x = euler_factor(&e, &group, 2, EulerVariant::Plain)?;
            apply_exponent(&e, &x, &v)?
        } else {
            let q4 = AbelianField::cyclotomic(4);
            let Ok((v, 1)) = c.value_at(&q4) else { continue };
            norm(&v, &q4, &AbelianField::rationals())?
        };
        d.set(m, 1, val)?;
    }
    Ok(d)
}

/// c_{f,ℚ(m)} = f(ζ_m) on m ∈ ℕ^†.
pub fn distribution_to_es(f: &CircularDist) -> Result<EulerSystemData> {
    let mut sys = EulerSystemData::new(Flavor::Classical);
    for m in f.levels() {
        if m > 2 && m % 4 != 2 {
            sys.insert(&AbelianField::cyclotomic(m), f.value(m, 1)?, 1)?;
        }
    }
    Ok(sys)
}

/// Compatible exponents r_m ∈ ℤ[G_{ℚ(m)}] at finitely many levels.
#[derive(Clone, Debug, Default)]
pub struct RFamily {
    levels: BTreeMap<u64, IntGroupRing>,
}

impl RFamily {
    pub fn new() -> Self {
        RFamily { levels: BTreeMap::new() }
    }

    pub fn insert(&mut self, m: u64, r: IntGroupRing) -> Result<()> {
        let e = AbelianField::cyclotomic(m);
        if r.coeffs().len() != e.degree() {
            return Err(Error::Precondition(format!("r_{m} has {} coefficients, expected {}", r.coeffs().len(), e.degree())));
        }
        self.levels.insert(m, r);
        Ok(())
    }

    /// Σ c·σ_s at every level coprime to all s.
    pub fn from_terms(terms: &[(i64, i64)], levels: &[u64]) -> Result<Self> {
        let mut fam = RFamily::new();
        for &m in levels {
            if terms.iter().any(|&(_, s)| gcd(s.rem_euclid(m as i64) as u64, m) != 1) {
                continue;
            }
            let e = AbelianField::cyclotomic(m);
            let g = Group::of_field(&e);
            let mut x = IntGroupRing::zero(&g);
            for &(c, s) in terms {
                x = x.add(&IntGroupRing::monomial(&g, e.index_of(s)?, BigInt::from(c)));
            }
            fam.insert(m, x)?;
        }
        Ok(fam)
    }

    pub fn get(&self, m: u64) -> Option<&IntGroupRing> {
        self.levels.get(&m)
    }

    pub fn levels(&self) -> Vec<u64> {
        self.levels.keys().copied().collect()
    }

    /// r_{m'} = π(r_m) whenever m' | m are both present.
    pub fn validate(&self) -> Result<()> {
        for (&m, r) in &self.levels {
            for (&mp, rp) in &self.levels {
                if mp < m && m % mp == 0 {
                    let big = AbelianField::cyclotomic(m);
                    let small = AbelianField::cyclotomic(mp);
                    let g = Group::of_field(&small);
                    if &project(r, &big, &small, &g)? != rp {
                        return Err(Error::Precondition(format!("incompatible r family at levels {mp} | {m}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn one_plus_tau(m: u64) -> Result<(AbelianField, IntGroupRing)> {
    let e = AbelianField::cyclotomic(m);
    let g = Group::of_field(&e);
    let tau = e.index_of(-1)?;
    let x = IntGroupRing::one(&g).add(&IntGroupRing::monomial(&g, tau, BigInt::one()));
    Ok((e, x))
}

/// (c_{ℚ(m)})^{t1(1+τ)} = (1−ζ_m)^{(1+τ)r_m} for m ∈ ℕ^†, m ≤ cutoff, t2 | m.
pub fn coleman_reduction_check(c: &EulerSystemData, r: &RFamily, t1: u32, t2: u64, cutoff: u64, exec: Exec) -> Result<Vec<Check>> {
    r.validate()?;
    if t1 == 0 || t2 == 0 {
        return Err(Error::Precondition("t1 and t2 must be positive".into()));
    }
    let levels: Vec<u64> = dagger_levels(cutoff).into_iter().filter(|m| m % t2 == 0 && r.get(*m).is_some()).collect();
    exec.map(&levels, |&m| {
        let (e, opt) = one_plus_tau(m)?;
        let (cm, d) = c.value_at(&e)?;
        if d != 1 {
            return Err(Error::Precondition("classical values must be integral powers".into()));
        }
        let rm = r.get(m).expect("filtered");
        let lhs = apply_exponent(&e, &opt.scale(&BigInt::from(t1)), &cm)?;
        let rhs = apply_exponent(&e, &opt.mul(rm), &CycElt::one_minus_zeta(&CyclotomicField::new(m), 1))?;
        let name = format!("coleman m={m}");
        Ok(if lhs == rhs {
            Check::pass(name, json!({"m": m, "t1": t1, "t2": t2}))
        } else {
            Check::fail(name, json!({"m": m, "t1": t1, "t2": t2}), json!({"lhs": lhs.to_json(), "rhs": rhs.to_json()}))
        })
    })
    .into_iter()
    .collect()
}

/// (1−ζ_m)^{r_m(τ−1)} = 1 level by level; also reports whether the image of
/// r_m in ℤ[Gal(ℚ(m)^+/ℚ)] has even augmentation, i.e. lies in A at that level.
pub fn tau_kernel_projection_check(r: &RFamily) -> Result<Vec<Check>> {
    r.validate()?;
    let mut out = Vec::new();
    for m in r.levels() {
        if m <= 2 {
            continue;
        }
        let e = AbelianField::cyclotomic(m);
        let g = Group::of_field(&e);
        let tau = e.index_of(-1)?;
        let x = IntGroupRing::monomial(&g, tau, BigInt::one()).sub(&IntGroupRing::one(&g));
        let rm = r.get(m).expect("level");
        let val = apply_exponent(&e, &rm.mul(&x), &CycElt::one_minus_zeta(&CyclotomicField::new(m), 1))?;
        let aug: BigInt = rm.coeffs().iter().sum();
        let even = (&aug % BigInt::from(2)).is_zero();
        let details = json!({"m": m, "augmentation_even": even});
        let name = format!("tau-kernel m={m}");
        out.push(if val.is_one() {
            Check::pass(name, details)
        } else {
            Check::fail(name, details, json!({"value": val.to_json()}))
        });
    }
    Ok(out)
}

/// Largest φ(p^N) accepted by the norm-coherence checker.
pub const NORM_COHERENCE_DEGREE_BOUND: u64 = 200;

/// Exact relation lattice {x ∈ ℤ[G_n] : (1−ζ_{p^n})^x = 1}.
#[derive(Clone, Debug)]
pub struct RelationLattice {
    pub m: u64,
    pub group: Arc<Group>,
    pub basis: IMat,
    /// primes ℓ whose residue logarithms certified independence mod torsion
    pub certificate_primes: Vec<u64>,
    pub modulus: u64,
}

impl RelationLattice {
    pub fn contains(&self, x: &IntGroupRing) -> bool {
        linalg::in_lattice(&self.basis, x.coeffs())
    }
}

/// Rank of an integer matrix over 𝔽_r.
fn rank_mod(rows: &[Vec<u64>], r: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|row| row.iter().map(|x| x % r).collect()).collect();
    let cols = a.first().map(|x| x.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        let inv = inv_mod(a[rank][c], r).expect("prime");
        for j in 0..cols {
            a[rank][j] = a[rank][j] * inv % r;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + (r - f) * a[rank][j]) % r;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Builds the relation lattice of 1 − ζ_{p^n}. Relations come from
/// (1−ζ)^{σ_a − σ_{−a}} = −ζ^a; the conjugates σ_a(1−ζ) for 0 < a < p^n/2 are
/// shown independent modulo torsion by residue logarithms mod a prime r ∤ 2p.
pub fn relation_lattice(p: u64, n: u32) -> Result<RelationLattice> {
    let m = p.pow(n);
    let e = AbelianField::cyclotomic(m);
    let group = Group::of_field(&e);
    let k = CyclotomicField::new(m);
    let base = CycElt::one_minus_zeta(&k, 1);
    let reps: Vec<(usize, usize)> = (0..e.degree())
        .filter(|&i| 2 * e.rep(i) < m)
        .map(|i| (i, e.index_of(-(e.rep(i) as i64)).expect("unit")))
        .collect();
    let conj: Vec<CycElt> = reps.iter().map(|&(i, _)| e.act(i, &base)).collect::<Result<_>>()?;
    let r = primes_up_to(100).into_iter().find(|&r| r != 2 && r != p).expect("small prime");
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut used = Vec::new();
    let step = r * m;
    let mut ell = step + 1;
    while rank_mod(&rows, r) < reps.len() {
        if used.len() >= 40 {
            return Err(Error::Budget(format!("independence of the conjugates of 1−ζ_{m} not certified")));
        }
        if is_prime(ell) {
            used.push(ell);
            let prime = UnramifiedPrime::new(ell, m)?;
            let g = crate::finite_field::least_primitive_root(ell);
            let h = pow_mod(g, (ell - 1) / r, ell);
            for s in crate::arith::units(m) {
                let pr = prime.conjugate(s)?;
                let mut row = Vec::with_capacity(conj.len());
                for c in &conj {
                    let res = pr.residue(c)?.ok_or_else(|| Error::Precondition("not integral".into()))?[0];
                    let t = pow_mod(res, (ell - 1) / r, ell);
                    row.push((0..r).find(|&j| pow_mod(h, j, ell) == t).expect("r-th root of unity"));
                }
                rows.push(row);
            }
        }
        ell += step;
    }
    // torsion exponents t_a with (1−ζ)^{σ_a − σ_{−a}} = ζ_{2m}^{t_a}
    let w = 2 * m;
    let mut t = Vec::new();
    for (&(i, j), c) in reps.iter().zip(&conj) {
        let q = c.try_div(&e.act(j, &base)?)?;
        let (sign, kk) = q.torsion_test().ok_or_else(|| Error::Precondition(format!("σ_{}-quotient is not torsion", e.rep(i))))?;
        t.push(if sign > 0 { 2 * kk } else { (m + 2 * kk) % w });
    }
    let mut row: Vec<BigInt> = t.iter().map(|&x| BigInt::from(x)).collect();
    row.push(BigInt::from(w));
    let ker = linalg::right_kernel(&[row], reps.len() + 1);
    let mut gens: IMat = Vec::new();
    for v in ker {
        let mut x = vec![BigInt::zero(); e.degree()];
        for (idx, &(i, j)) in reps.iter().enumerate() {
            x[i] += &v[idx];
            x[j] -= &v[idx];
        }
        gens.push(x);
    }
    let basis = linalg::hnf(&gens);
    for b in &basis {
        let x = IntGroupRing::new(&group, b.clone());
        if !apply_exponent(&e, &x, &base)?.is_one() {
            return Err(Error::Precondition("relation lattice basis element fails the exponent identity".into()));
        }
    }
    Ok(RelationLattice { m, group, basis, certificate_primes: used, modulus: r })
}

/// Sequences r_n ∈ ℤ[G_n], n = 1..=N, for norm_coherence_check.
pub fn constant_family(p: u64, depth: u32, f: impl Fn(&AbelianField, &Arc<Group>) -> Result<IntGroupRing>) -> Result<Vec<IntGroupRing>> {
    (1..=depth)
        .map(|n| {
            let e = AbelianField::cyclotomic(p.pow(n));
            let g = Group::of_field(&e);
            f(&e, &g)
        })
        .collect()
}

/// a_n = (1−ζ_{p^n})^{r_n}: checks N_{n+1→n}(a_{n+1}) = a_n and, independently,
/// π(r_{n+1}) − r_n ∈ relation lattice of 1 − ζ_{p^n}.
pub fn norm_coherence_check(p: u64, seq: &[IntGroupRing], depth: u32) -> Result<Vec<Check>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} must be an odd prime")));
    }
    if depth == 0 || seq.len() != depth as usize {
        return Err(Error::Precondition(format!("expected {depth} exponents, got {}", seq.len())));
    }
    let top = p.checked_pow(depth).ok_or_else(|| Error::Budget("p^N overflows".into()))?;
    if totient(top) > NORM_COHERENCE_DEGREE_BOUND {
        return Err(Error::Budget(format!("φ({p}^{depth}) exceeds {NORM_COHERENCE_DEGREE_BOUND}")));
    }
    let fields: Vec<AbelianField> = (1..=depth).map(|n| AbelianField::cyclotomic(p.pow(n))).collect();
    for (n, (r, e)) in seq.iter().zip(&fields).enumerate() {
        if r.coeffs().len() != e.degree() {
            return Err(Error::Precondition(format!("r_{} has the wrong length", n + 1)));
        }
    }
    let a: Vec<CycElt> = seq
        .iter()
        .zip(&fields)
        .map(|(r, e)| apply_exponent(e, r, &CycElt::one_minus_zeta(&CyclotomicField::new(e.modulus()), 1)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for n in 0..(depth as usize).saturating_sub(1) {
        let (e, ep) = (&fields[n], &fields[n + 1]);
        let nm = norm(&a[n + 1], ep, e)?;
        let norm_ok = nm == a[n];
        let lat = relation_lattice(p, n as u32 + 1)?;
        let diff = project(&seq[n + 1], ep, e, &lat.group)?.sub(&seq[n]);
        let lattice_ok = lat.contains(&diff);
        let details = json!({
            "n": n + 1,
            "norm_relation": norm_ok,
            "exponent_relation": lattice_ok,
            "relation_lattice_rank": lat.basis.len(),
            "independence_primes": lat.certificate_primes,
            "independence_modulus": lat.modulus,
        });
        let name = format!("coherence {}->{}", n + 2, n + 1);
        out.push(if norm_ok && lattice_ok {
            Check::pass(name, details)
        } else {
            Check::fail(name, details, json!({"norm": nm.to_json(), "a_n": a[n].to_json(), "exponent_difference": diff.to_json()}))
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_values() {
        let k5 = CyclotomicField::new(5);
        assert_eq!(epsilon_square(5), CycElt::from_zeta_sum(&k5, &[(0, 2), (1, -1), (4, -1)]));
        let k12 = CyclotomicField::new(12);
        let s = CycElt::one_minus_zeta(&k12, 1).mul(&CycElt::one_minus_zeta(&k12, 11));
        assert_eq!(epsilon_square(12), s);
        assert!(epsilon_system(&[4]).is_err());
        assert!(epsilon_system(&[6]).is_err());
        assert!(epsilon_system(&[3]).is_err());
    }

    #[test]
    fn cyclotomic_examples() {
        let sys = cyclotomic_system(&[3, 9, 15]).unwrap();
        let q3 = AbelianField::cyclotomic(3);
        let c = verify_distribution(&sys, &q3, &AbelianField::cyclotomic(15)).unwrap();
        assert!(c.passed);
        assert_eq!(c.details["euler_primes"], json!([5]));
        assert!(verify_distribution(&sys, &q3, &AbelianField::cyclotomic(9)).unwrap().passed);
        let mut bad = sys.clone();
        let ent = bad.entry_mut(&AbelianField::cyclotomic(15)).unwrap();
        ent.value = ent.value.mul(&CycElt::one_minus_zeta(&CyclotomicField::new(15), 5));
        let c = verify_distribution(&bad, &q3, &AbelianField::cyclotomic(15)).unwrap();
        assert!(!c.passed && !c.witnesses.is_empty());
        assert!(matches!(verify_distribution(&sys, &AbelianField::cyclotomic(9), &AbelianField::cyclotomic(15)), Err(Error::NotNested(_))));
        assert!(matches!(verify_distribution(&sys, &q3, &AbelianField::cyclotomic(21)), Err(Error::FieldMissing(_))));
    }

    #[test]
    fn epsilon_suite_small() {
        let sys = epsilon_system(&ddagger_levels(24)).unwrap();
        let checks = distribution_suite(&sys, 24, Exec::Parallel).unwrap();
        assert!(checks.len() > 10);
        assert!(checks.iter().all(|c| c.passed), "{:?}", checks.iter().find(|c| !c.passed));
        assert!(s_unit_check(&sys, 1 << 20).unwrap().iter().all(|c| c.passed));
        assert!(distribution_suite(&sys, 0, Exec::Sequential).unwrap().is_empty());
    }

    #[test]
    fn system_json_round_trip() {
        let sys = epsilon_system(&[5, 8, 12]).unwrap();
        let back = EulerSystemData::from_json(&sys.to_json()).unwrap();
        assert_eq!(back.to_json(), sys.to_json());
        let err = EulerSystemData::from_json(&json!({"flavor": "rational", "entries": [{"m": 5}]})).unwrap_err();
        assert!(err.to_string().contains("entries[0]"));
    }

    #[test]
    fn phi_axioms() {
        let levels: Vec<u64> = (2..=30).collect();
        let phi = phi_distribution(&levels).unwrap();
        let (lhs, rhs) = distribution_instance(&phi, 2, 3).unwrap().unwrap();
        assert_eq!(lhs, rhs);
        let rep = circular_axiom_check(&phi, Exec::Parallel).unwrap();
        assert!(rep.passed() && !rep.instances.is_empty());
        let sq = phi.map(|v| Ok(v.mul(v))).unwrap();
        assert!(circular_axiom_check(&sq, Exec::Sequential).unwrap().passed());
        let mut bad = phi.clone();
        let k3 = CyclotomicField::new(3);
        bad.set(3, 1, phi.value(3, 1).unwrap().mul(&CycElt::one_minus_zeta(&k3, 1))).unwrap();
        let rep = circular_axiom_check(&bad, Exec::Sequential).unwrap();
        assert!(rep.exceptional.contains(&(2, 3)));
        let mut neq = phi.clone();
        neq.set(5, 2, CycElt::one_minus_zeta(&CyclotomicField::new(5), 3)).unwrap();
        assert!(!circular_axiom_check(&neq, Exec::Sequential).unwrap().passed());
    }

    #[test]
    fn finite_order() {
        let levels: Vec<u64> = (2..=40).collect();
        for p in [3, 5] {
            let f = finite_order_distribution(p, &levels).unwrap();
            assert!(circular_axiom_check(&f, Exec::Sequential).unwrap().passed());
            assert!(has_order_two(&f));
        }
    }

    #[test]
    fn es_iso_branches() {
        let sys = cyclotomic_system(&dagger_levels(40)).unwrap();
        let f = es_to_distribution(&sys, 40).unwrap();
        assert!(f.levels().contains(&2) && f.levels().contains(&30));
        let phi = phi_distribution(&(2..=40).collect::<Vec<_>>()).unwrap();
        for m in [2, 6, 10, 30] {
            assert_eq!(f.value(m, 1).unwrap(), phi.value(m, 1).unwrap(), "m = {m}");
        }
        assert!(circular_axiom_check(&f, Exec::Parallel).unwrap().passed());
        let back = distribution_to_es(&f).unwrap();
        assert_eq!(back.to_json(), sys.to_json());
    }

    #[test]
    fn twist_and_reduction() {
        let q3 = AbelianField::cyclotomic(3);
        let sys = cyclotomic_system(&[3]).unwrap();
        let tf = classical_to_rank_one(&sys).unwrap();
        let u = tf.entry(&q3).unwrap().value.clone();
        assert!(is_torsion(&u.try_div(&sys.entry(&q3).unwrap().value).unwrap()));
        let g = Group::of_field(&q3);
        let a = euler_factor(&q3, &g, 7, EulerVariant::Norm).unwrap();
        let mut amap = BTreeMap::new();
        amap.insert(field_key(&q3), a.clone());
        let tw = a_twist(&tf, &amap).unwrap();
        let twisted = tw.entry(&q3).unwrap().value.clone();
        let k3 = CyclotomicField::new(3);
        let moved = CycElt::zeta(&k3, 1).neg().mul(&u);
        assert_eq!(apply_exponent(&q3, &a, &moved).unwrap(), twisted);
        let back = classical_to_rank_one(&tw).unwrap();
        assert_eq!(back.entry(&q3).unwrap().value, normalize_mod_torsion(&q3, &apply_exponent(&q3, &a, &u).unwrap()).unwrap());
        amap.insert(field_key(&q3), IntGroupRing::one(&g));
        assert!(matches!(a_twist(&tf, &amap), Err(Error::NotInAnnihilator(_))));
    }

    #[test]
    fn coleman_and_tau() {
        let sys = cyclotomic_system(&dagger_levels(30)).unwrap();
        let levels = dagger_levels(30);
        let one = RFamily::from_terms(&[(1, 1)], &levels).unwrap();
        assert!(coleman_reduction_check(&sys, &one, 1, 1, 30, Exec::Parallel).unwrap().iter().all(|c| c.passed));
        let odd: Vec<u64> = levels.iter().copied().filter(|m| m % 2 == 1).collect();
        let s2 = RFamily::from_terms(&[(1, 2)], &odd).unwrap();
        let mut moved = EulerSystemData::new(Flavor::Classical);
        for &m in &odd {
            moved.insert(&AbelianField::cyclotomic(m), CycElt::one_minus_zeta(&CyclotomicField::new(m), 2), 1).unwrap();
        }
        assert!(coleman_reduction_check(&moved, &s2, 1, 1, 30, Exec::Sequential).unwrap().iter().all(|c| c.passed));
        let mut bad = sys.clone();
        let e8 = bad.entry_mut(&AbelianField::cyclotomic(8)).unwrap();
        e8.value = e8.value.inv().unwrap();
        let res = coleman_reduction_check(&bad, &one, 1, 1, 30, Exec::Sequential).unwrap();
        let failed: Vec<&str> = res.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["coleman m=8"]);

        let opt = RFamily::from_terms(&[(1, 1), (1, -1)], &levels).unwrap();
        let res = tau_kernel_projection_check(&opt).unwrap();
        assert!(res.iter().all(|c| c.passed && c.details["augmentation_even"] == true));
        let res = tau_kernel_projection_check(&one).unwrap();
        assert!(!res.iter().find(|c| c.name == "tau-kernel m=5").unwrap().passed);
        let two_tau = RFamily::from_terms(&[(2, -1)], &levels).unwrap();
        assert!(tau_kernel_projection_check(&two_tau).unwrap().iter().any(|c| !c.passed));
    }

    #[test]
    fn incompatible_family() {
        let mut fam = RFamily::from_terms(&[(1, 1)], &[5, 15]).unwrap();
        let e = AbelianField::cyclotomic(5);
        let g = Group::of_field(&e);
        fam.insert(5, IntGroupRing::from_i64(&g, &[0, 1, 0, 0])).unwrap();
        assert!(fam.validate().is_err());
    }

    #[test]
    fn coherence_p3() {
        let one = constant_family(3, 3, |_, g| Ok(IntGroupRing::one(g))).unwrap();
        assert!(norm_coherence_check(3, &one, 3).unwrap().iter().all(|c| c.passed));
        let nrm = constant_family(3, 3, |_, g| Ok(IntGroupRing::norm_element(g))).unwrap();
        let res = norm_coherence_check(3, &nrm, 3).unwrap();
        assert!(res.iter().all(|c| !c.passed && c.details["exponent_relation"] == false));
        let sig = constant_family(3, 3, |e, g| Ok(IntGroupRing::monomial(g, e.index_of(2)?, BigInt::one()))).unwrap();
        assert!(norm_coherence_check(3, &sig, 3).unwrap().iter().all(|c| c.passed));
        assert!(norm_coherence_check(2, &one, 3).is_err());
        assert!(matches!(norm_coherence_check(3, &constant_family(3, 6, |_, g| Ok(IntGroupRing::one(g))).unwrap(), 6), Err(Error::Budget(_))));
    }

    #[test]
    fn relation_lattice_rank() {
        let lat = relation_lattice(3, 2).unwrap();
        assert_eq!(lat.basis.len(), 3);
        let g = &lat.group;
        assert!(!lat.contains(&IntGroupRing::one(g)));
        let e = AbelianField::cyclotomic(9);
        let tau = e.index_of(-1).unwrap();
        // (1−ζ)^{1−τ} = −ζ has order 18
        let x = IntGroupRing::one(g).sub(&IntGroupRing::monomial(g, tau, BigInt::one()));
        assert!(!lat.contains(&x));
        assert!(lat.contains(&x.scale(&BigInt::from(18))));
    }
}
