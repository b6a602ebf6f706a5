//! Leading terms of truncated Dirichlet L-functions at s = 0, the order
//! formula, θ*_{E,S(E)}(0), the Dirichlet regulator and the finite-level map
//! from θ* back to exponents on given S-units.
//!
//! L-values come from the conductor level. For even nontrivial primitive χ of
//! conductor f, `L'(χ,0) = Σ_a χ(a) log Γ(a/f)`; this follows from Lerch's
//! formula once `Σ χ(a) = 0` and `Σ χ(a)·a = 0`, which are checked exactly
//! for every character before the sum is used. For odd χ, `L(χ,0) = -Σ χ(a)a/f`
//! and for the trivial character `ζ(0) = -1/2`. Truncation at a finite prime
//! `p ∤ f` multiplies by `1 - χ(p)` or, when `χ(p) = 1`, raises the order by
//! one and multiplies by `log p`.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::{gcd, prime_divisors};
use crate::ball::{Ball, CBall, Numerics};
use crate::characters::{field_characters, DirichletChar, UnitLog};
use crate::cyclo::{CycElt, CyclotomicField, Embedding};
use crate::error::{Error, Result};
use crate::field::{AbelianField, Place};
use crate::group::{CharTable, Group};
use crate::group_ring::{rational_idempotent, GroupRingElt, RatGroupRing};
use crate::places::{e_field, e_field_characters, s_of, PlaceModuleDims};
use crate::valuation::RamifiedPlace;

/// The field cut out by χ, presented at the conductor, with χ's value table.
pub fn character_field(chi: &DirichletChar) -> Result<(AbelianField, CharTable)> {
    let chi0 = chi.primitive();
    let f = chi0.modulus();
    let log = UnitLog::new(f);
    let kernel: Vec<u64> = crate::arith::units(f)
        .into_iter()
        .filter(|&a| chi0.value_frac(&log, a as i64).map(|t| t.numer().is_zero()).unwrap_or(false))
        .collect();
    let e = AbelianField::new(f, &kernel)?;
    let t = chi0
        .table_on(&e, e.exponent())
        .ok_or_else(|| Error::Precondition("character does not factor through its kernel field".into()))?;
    Ok((e, t))
}

/// Order of vanishing at s = 0 before truncation: 1 for even nontrivial χ, 0 otherwise.
pub fn conductor_order(chi: &DirichletChar) -> usize {
    let chi0 = chi.primitive();
    let log = UnitLog::new(chi0.modulus());
    if !chi0.is_trivial() && chi0.is_even(&log) {
        1
    } else {
        0
    }
}

fn check_places(places: &[Place]) -> Result<()> {
    if !places.contains(&Place::Infinite) {
        return Err(Error::Precondition("the place set must contain ∞".into()));
    }
    Ok(())
}

/// ord_{s=0} L_Σ(χ, s) = dim X^χ_{E,Σ} with E the field cut out by χ.
pub fn l_order(chi: &DirichletChar, places: &[Place]) -> Result<usize> {
    check_places(places)?;
    let (e, t) = character_field(chi)?;
    let dims = PlaceModuleDims::new(&e, places);
    dims.dim_x_of(&t).ok_or_else(|| Error::Precondition("character table not found on its own field".into()))
}

/// Finite primes of Σ at which the truncation factor of χ vanishes at s = 0.
pub fn vanishing_factors(chi: &DirichletChar, places: &[Place]) -> Vec<u64> {
    let chi0 = chi.primitive();
    let f = chi0.modulus();
    let log = UnitLog::new(f);
    places
        .iter()
        .filter_map(|v| match v {
            Place::Finite(p) if gcd(*p, f) == 1 => {
                let t = chi0.value_frac(&log, (*p % f.max(1)) as i64)?;
                t.numer().is_zero().then_some(*p)
            }
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct LValueRequest {
    pub chi: DirichletChar,
    pub places: Vec<Place>,
    pub order: usize,
    pub precision: u32,
}

impl LValueRequest {
    pub fn new(chi: DirichletChar, places: &[Place], order: usize, precision: u32) -> Self {
        let mut places = places.to_vec();
        places.sort();
        places.dedup();
        LValueRequest { chi, places, order, precision }
    }

    pub fn canonical_json(&self) -> Value {
        json!({
            "chi": self.chi.to_json(),
            "order": self.order,
            "places": self.places.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "precision": self.precision,
        })
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let s = serde_json::to_string(&self.canonical_json()).expect("json");
        hex(&Sha256::digest(s.as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TruncationFactor {
    /// `1 - χ(p)`, nonzero at s = 0
    Value { p: u64 },
    /// `χ(p) = 1`: contributes order 1 and `log p`
    Vanishing { p: u64 },
}

#[derive(Clone, Debug)]
pub struct LeadingTerm {
    pub order: usize,
    pub value: CBall,
    pub factors: Vec<TruncationFactor>,
    /// set for the trivial character
    pub reduced_confidence: bool,
}

#[derive(Clone, Debug)]
pub struct LValue {
    /// order of vanishing at s = 0
    pub leading_order: usize,
    /// L^{(r)}_S(χ,0)/r! for the requested r
    pub value: CBall,
    pub exact_zero: bool,
    pub reduced_confidence: bool,
}

type MemoKey = (u64, Vec<u64>, Vec<u64>);

/// Evaluates leading terms at one precision; log Γ values and results are memoized.
pub struct LValueEngine {
    bits: u32,
    numerics: Numerics,
    log_gamma: HashMap<(u64, u64), Ball>,
    memo: HashMap<MemoKey, LeadingTerm>,
}

impl std::fmt::Debug for LValueEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LValueEngine").field("bits", &self.bits).finish()
    }
}

impl LValueEngine {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 64 {
            return Err(Error::Precondition("precision must be at least 64 bits".into()));
        }
        Ok(LValueEngine { bits, numerics: Numerics::new(bits), log_gamma: HashMap::new(), memo: HashMap::new() })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn numerics(&self) -> &Numerics {
        &self.numerics
    }

    fn char_value(&self, chi: &DirichletChar, log: &UnitLog, a: i64) -> Option<CBall> {
        let t = chi.value_frac(log, a)?;
        Some(self.numerics.root_of_unity(*t.numer() as i64, *t.denom()))
    }

    fn lgamma(&mut self, a: u64, f: u64) -> Result<Ball> {
        let g = gcd(a, f);
        let key = (a / g, f / g);
        if let Some(v) = self.log_gamma.get(&key) {
            return Ok(v.clone());
        }
        let v = self.numerics.log_gamma(&BigRational::new(BigInt::from(key.0), BigInt::from(key.1)))?;
        self.log_gamma.insert(key, v.clone());
        Ok(v)
    }

    /// `(Σ χ(a), Σ χ(a)·a)` over a mod f, exactly in ℚ(ζ_ord χ).
    pub fn character_sums(chi: &DirichletChar) -> (CycElt, CycElt) {
        let f = chi.modulus();
        let n = chi.order();
        let k = CyclotomicField::new(n);
        let log = UnitLog::new(f);
        let mut s0 = Vec::new();
        let mut s1 = Vec::new();
        for a in crate::arith::units(f) {
            let e = chi.value_exp(&log, a as i64, n).expect("unit") as i64;
            s0.push((e, 1));
            s1.push((e, a as i64));
        }
        (CycElt::from_zeta_sum(&k, &s0), CycElt::from_zeta_sum(&k, &s1))
    }

    /// L'(χ,0) = Σ_a χ(a) log Γ(a/f) for even nontrivial primitive χ.
    pub fn log_gamma_oracle(&mut self, chi: &DirichletChar) -> Result<CBall> {
        let log = UnitLog::new(chi.modulus());
        if chi.is_trivial() || !chi.is_primitive() || !chi.is_even(&log) {
            return Err(Error::Precondition("log-Gamma oracle needs an even nontrivial primitive character".into()));
        }
        let (s0, s1) = Self::character_sums(chi);
        if !s0.is_zero() || !s1.is_zero() {
            return Err(Error::Precondition(format!("Lerch cancellation fails for {chi:?}: Σχ(a) = {s0}, Σχ(a)a = {s1}")));
        }
        let f = chi.modulus();
        let mut acc = CBall::zero(self.numerics.prec());
        for a in crate::arith::units(f) {
            let lg = self.lgamma(a, f)?;
            let c = self.char_value(chi, &log, a as i64).expect("unit");
            acc = acc.add(&c.scale(&lg));
        }
        Ok(acc)
    }

    /// `-1/2 Σ_{σ ∈ Gal(ℚ(m)^+/ℚ)} χ(σ) log|(1-ζ_m^σ)^{1+τ}|` for an even
    /// character χ of modulus m, under the embedding ζ_m ↦ exp(2πi/m). This is
    /// L'_{S(m)}(χ,0), with S(m) the primes dividing m.
    pub fn cyclotomic_sum(&self, chi: &DirichletChar) -> Result<CBall> {
        let m = chi.modulus();
        let log = UnitLog::new(m);
        if m <= 2 || m % 4 == 2 || !chi.is_even(&log) {
            return Err(Error::Precondition("cyclotomic sum needs an even character of modulus m ≢ 2 mod 4, m > 2".into()));
        }
        let e = AbelianField::real_cyclotomic(m);
        let fm = CyclotomicField::new(m);
        let u = CycElt::from_zeta_sum(&fm, &[(0, 2), (1, -1), (m as i64 - 1, -1)]);
        let emb = Embedding::new(&self.numerics, m, 1);
        let mut acc = CBall::zero(self.numerics.prec());
        for &s in e.reps() {
            let l = emb.log_abs(&self.numerics, &u.galois(s as i64)?)?;
            let c = self.char_value(chi, &log, s as i64).expect("unit");
            acc = acc.add(&c.scale(&l));
        }
        Ok(acc.scale(&Ball::from_i64_ratio(-1, 2, self.numerics.prec())))
    }

    /// Leading term of L_Σ(χ, s) at s = 0 (χ need not be primitive).
    pub fn leading_term(&mut self, chi: &DirichletChar, places: &[Place]) -> Result<LeadingTerm> {
        check_places(places)?;
        let mut finite: Vec<u64> = places
            .iter()
            .filter_map(|v| match v {
                Place::Finite(p) => Some(*p),
                Place::Infinite => None,
            })
            .collect();
        finite.sort_unstable();
        finite.dedup();
        let key = (chi.modulus(), chi.exponents(), finite.clone());
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let chi0 = chi.primitive();
        let f = chi0.modulus();
        let log = UnitLog::new(f);
        let prec = self.numerics.prec();
        let (mut order, mut value, reduced) = if chi0.is_trivial() {
            (0, CBall::real(Ball::from_i64_ratio(-1, 2, prec)), true)
        } else if chi0.is_even(&log) {
            (1, self.log_gamma_oracle(&chi0)?, false)
        } else {
            // L(χ,0) = -B_{1,χ} = -(1/f) Σ χ(a) a
            let (_, s1) = Self::character_sums(&chi0);
            let emb = Embedding::new(&self.numerics, chi0.order(), 1);
            let v = emb.eval(&s1).div_int(&BigInt::from(f)).neg();
            (0, v, false)
        };
        let mut factors = Vec::new();
        for &p in &finite {
            if gcd(p, f) != 1 {
                continue;
            }
            let c = self.char_value(&chi0, &log, (p % f.max(1)) as i64).expect("coprime");
            if chi0.value_frac(&log, (p % f.max(1)) as i64).map(|t| t.numer().is_zero()).unwrap_or(false) {
                order += 1;
                let lp = self.numerics.log_ratio(&BigRational::from_integer(BigInt::from(p)))?;
                value = value.scale(&lp);
                factors.push(TruncationFactor::Vanishing { p });
            } else {
                value = CBall::one(prec).sub(&c).mul(&value);
                factors.push(TruncationFactor::Value { p });
            }
        }
        if value.contains_zero() {
            return Err(Error::Precision(format!("leading term of {chi:?} is not certified nonzero")));
        }
        let t = LeadingTerm { order, value, factors, reduced_confidence: reduced };
        self.memo.insert(key, t.clone());
        Ok(t)
    }

    /// The value L^{(r)}_S(χ,0)/r! for the requested r.
    pub fn evaluate(&mut self, req: &LValueRequest) -> Result<LValue> {
        let t = self.leading_term(&req.chi, &req.places)?;
        let prec = self.numerics.prec();
        if req.order < t.order {
            return Ok(LValue {
                leading_order: t.order,
                value: CBall::zero(prec),
                exact_zero: true,
                reduced_confidence: t.reduced_confidence,
            });
        }
        if req.order > t.order {
            return Err(Error::Unsupported(format!(
                "derivative order {} above the order of vanishing {} needs higher Taylor coefficients",
                req.order, t.order
            )));
        }
        Ok(LValue { leading_order: t.order, value: t.value, exact_zero: false, reduced_confidence: t.reduced_confidence })
    }
}

/// Evaluate a character table at a group-ring element with ball coefficients.
pub fn eval_table(n: &Numerics, chi: &CharTable, x: &[CBall]) -> CBall {
    let mut acc = CBall::zero(n.prec());
    for (g, c) in x.iter().enumerate() {
        let z = n.root_of_unity(chi.values[g] as i64, chi.exponent as u64);
        acc = acc.add(&z.mul(c));
    }
    acc
}

/// Σ_χ c_χ e_χ as a group-ring element, for character-indexed values c_χ.
pub fn from_components(n: &Numerics, group: &Arc<Group>, chars: &[CharTable], comps: &[CBall]) -> GroupRingElt<CBall> {
    let order = group.order();
    let inv_n = BigInt::from(order);
    let mut coeffs = vec![CBall::zero(n.prec()); order];
    for (chi, c) in chars.iter().zip(comps) {
        for (g, slot) in coeffs.iter_mut().enumerate() {
            // e_χ = |G|^{-1} Σ_h χ(h) h^{-1}: coefficient of g is χ(g^{-1})
            let z = n.root_of_unity(chi.values[group.inv(g)] as i64, chi.exponent as u64);
            *slot = slot.add(&z.mul(c));
        }
    }
    let coeffs = coeffs.into_iter().map(|c| c.div_int(&inv_n)).collect();
    GroupRingElt::new(group, coeffs)
}

#[derive(Clone, Debug)]
pub struct ThetaStar {
    pub field: AbelianField,
    pub group: Arc<Group>,
    pub chars: Vec<(DirichletChar, CharTable)>,
    /// χ(θ*) = L*_{S(E)}(χ^{-1}, 0)
    pub components: Vec<CBall>,
    pub orders: Vec<usize>,
    pub element: GroupRingElt<CBall>,
}

/// θ*_{E,S(E)}(0) = Σ_χ L*_{S(E)}(χ^{-1},0) e_χ for a real abelian field E ≠ ℚ.
pub fn theta_star(e: &AbelianField, engine: &mut LValueEngine) -> Result<ThetaStar> {
    if !e.is_real() || e.is_rationals() {
        return Err(Error::Precondition("θ* needs a real abelian field E ≠ ℚ".into()));
    }
    let e = e.canonical();
    let group = Group::of_field(&e);
    let chars = field_characters(&e);
    let s = s_of(&e);
    let mut components = Vec::new();
    let mut orders = Vec::new();
    for (chi, _) in &chars {
        let t = engine.leading_term(&chi.conj(), &s)?;
        orders.push(t.order);
        components.push(t.value);
    }
    let tables: Vec<CharTable> = chars.iter().map(|c| c.1.clone()).collect();
    let element = from_components(engine.numerics(), &group, &tables, &components);
    if element.coeffs().iter().any(|c| !c.im.contains_zero()) {
        return Err(Error::Precision("θ* has a coefficient that is not certified real".into()));
    }
    Ok(ThetaStar { field: e, group, chars, components, orders, element })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegulatorPlace {
    /// σ·w_j
    Archimedean { sigma: usize },
    /// σ·w_0 above p, σ a coset representative of G/G_p
    Finite { p: u64, sigma: usize },
}

#[derive(Clone, Debug)]
struct FiniteColumns {
    p: u64,
    decomposition: Vec<usize>,
    coset_reps: Vec<usize>,
    /// per unit, coefficient of σ in L_p(u)/log p
    coeffs: Vec<Vec<BigRational>>,
    log_p: Ball,
}

/// Matrix of −log|u|_w over the places of E above S(E).
#[derive(Clone, Debug)]
pub struct RegulatorMatrix {
    pub field: AbelianField,
    pub group: Arc<Group>,
    pub units: Vec<CycElt>,
    pub places: Vec<RegulatorPlace>,
    pub entries: Vec<Vec<Ball>>,
    /// per unit, Λ_∞(u) = −Σ_σ log|σu| σ^{-1}
    arch: Vec<Vec<Ball>>,
    finite: Vec<FiniteColumns>,
    prec: u32,
}

impl RegulatorMatrix {
    pub fn new(e: &AbelianField, units: &[CycElt], n: &Numerics) -> Result<Self> {
        if !e.is_real() || e.is_rationals() {
            return Err(Error::Precondition("regulator needs a real abelian field E ≠ ℚ".into()));
        }
        let e = e.canonical();
        let m = e.modulus();
        let fm = CyclotomicField::new(m);
        let ramified = e.ramified_primes();
        let mut us = Vec::new();
        for u in units {
            let u = if u.modulus() == m {
                u.clone()
            } else if m.is_multiple_of(u.modulus()) {
                u.lift(&fm)?
            } else {
                u.descend(&fm).ok_or_else(|| Error::Precondition(format!("{u} does not lie in ℚ(ζ_{m})")))?
            };
            if u.is_zero() || !e.contains_element(&u) {
                return Err(Error::Precondition(format!("{u} is not a nonzero element of {e:?}")));
            }
            let nrm = u.norm_q();
            for side in [nrm.numer(), nrm.denom()] {
                let side = side.abs();
                let mut rest = side.clone();
                for &p in &ramified {
                    while (&rest % BigInt::from(p)).is_zero() {
                        rest /= BigInt::from(p);
                    }
                }
                if !rest.is_one() {
                    return Err(Error::Precondition(format!("{u} is not an S(E)-unit (norm {nrm})")));
                }
            }
            us.push(u);
        }
        let group = Group::of_field(&e);
        let order = group.order();
        let emb = Embedding::new(n, m, 1);
        let mut arch = Vec::new();
        for u in &us {
            let mut lam = vec![Ball::zero(n.prec()); order];
            for (i, slot) in (0..order).map(|i| (i, group.inv(i))).collect::<Vec<_>>() {
                let l = emb.log_abs(n, &e.act(i, u)?)?;
                lam[slot] = l.neg();
            }
            arch.push(lam);
        }
        let mut finite = Vec::new();
        for &p in &ramified {
            let place = RamifiedPlace::new(&e, p)?;
            let decomposition = e.decomposition_group(Place::Finite(p));
            let fp = BigRational::from_integer(BigInt::from(place.residue_degree()));
            let gp = BigRational::from_integer(BigInt::from(decomposition.len()));
            let mut coeffs = Vec::new();
            for u in &us {
                let mut row = Vec::with_capacity(order);
                for s in 0..order {
                    let v = place.ord(&e.act(group.inv(s), u)?)?;
                    row.push(BigRational::from_integer(BigInt::from(v)) * &fp / &gp);
                }
                coeffs.push(row);
            }
            let mut coset_reps = Vec::new();
            let mut seen = vec![false; order];
            for s in 0..order {
                if seen[s] {
                    continue;
                }
                coset_reps.push(s);
                for &d in &decomposition {
                    seen[group.mul(s, d)] = true;
                }
            }
            let log_p = n.log_ratio(&BigRational::from_integer(BigInt::from(p)))?;
            finite.push(FiniteColumns { p, decomposition, coset_reps, coeffs, log_p });
        }
        let mut places: Vec<RegulatorPlace> = (0..order).map(|sigma| RegulatorPlace::Archimedean { sigma }).collect();
        for fc in &finite {
            places.extend(fc.coset_reps.iter().map(|&sigma| RegulatorPlace::Finite { p: fc.p, sigma }));
        }
        let mut entries = Vec::new();
        for (k, lam) in arch.iter().enumerate() {
            let mut row: Vec<Ball> = lam.clone();
            for fc in &finite {
                for &s in &fc.coset_reps {
                    // ord_{σw_0}(u)·f·log p, and L_p(u) averages over the coset
                    let c = &fc.coeffs[k][s] * BigRational::from_integer(BigInt::from(fc.decomposition.len()));
                    row.push(fc.log_p.mul_ratio(&c));
                }
            }
            entries.push(row);
        }
        Ok(RegulatorMatrix { field: e, group, units: us, places, entries, arch, finite, prec: n.prec() })
    }

    /// Upper bound on |Σ_w row| over all rows (zero by the product formula).
    pub fn row_sum_bound(&self) -> BigRational {
        self.entries
            .iter()
            .map(|row| row.iter().fold(Ball::zero(self.prec), |a, b| a.add(b)).abs_upper())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn archimedean(&self, unit: usize) -> &[Ball] {
        &self.arch[unit]
    }
}

/// Continued-fraction rounding: the last convergent of `x` with denominator at most `bound`.
pub fn rational_reconstruct(x: &BigRational, bound: u64) -> BigRational {
    let bound = BigInt::from(bound);
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut r = x.clone();
    loop {
        let a = r.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        r = frac.recip();
    }
    if q1.is_zero() {
        return BigRational::from_integer(x.round().to_integer());
    }
    BigRational::new(p1, q1)
}

#[derive(Clone, Debug)]
pub struct ThetaMapResult {
    /// one exponent per unit: the Θ-image is ∏ u_i^{x_i}
    pub exponents: Vec<RatGroupRing>,
    /// (character index, unit index) used for each character on e_(E)
    pub pivots: Vec<(usize, usize)>,
    /// upper bound on the residual over all places, after exact reconstruction
    pub residual: BigRational,
    pub e_field: RatGroupRing,
}

/// Solve λ_E(∏ u_i^{x_i}) = e_(E)·target·(w_j − w_0) for rational x_i ∈ e_(E)ℚ[G].
///
/// For each character on e_(E) the first unit whose archimedean χ-component is
/// certified nonzero carries that component.
pub fn theta_map(reg: &RegulatorMatrix, target: &GroupRingElt<CBall>, n: &Numerics) -> Result<ThetaMapResult> {
    let e = &reg.field;
    let group = &reg.group;
    let order = group.order();
    if target.coeffs().len() != order {
        return Err(Error::Precondition("target lives on a different group".into()));
    }
    let all_chars = field_characters(e);
    let e_chars: Vec<CharTable> = e_field_characters(e).into_iter().map(|c| c.1).collect();
    let ee = e_field(e, group)?;
    let tables: Vec<CharTable> = all_chars.iter().map(|c| c.1.clone()).collect();
    let target_c: Vec<CBall> = target.coeffs().to_vec();
    let mut comps: Vec<Vec<CBall>> = vec![vec![CBall::zero(n.prec()); tables.len()]; reg.units.len()];
    let mut pivots = Vec::new();
    for (ci, chi) in tables.iter().enumerate() {
        if !e_chars.contains(chi) {
            continue;
        }
        let t = eval_table(n, chi, &target_c);
        let mut found = None;
        for (ui, lam) in reg.arch.iter().enumerate() {
            let lam_c: Vec<CBall> = lam.iter().map(|b| CBall::real(b.clone())).collect();
            let l = eval_table(n, chi, &lam_c);
            if !l.contains_zero() && l.abs_lower() > BigRational::zero() {
                found = Some((ui, l));
                break;
            }
        }
        let (ui, l) = found.ok_or_else(|| Error::SingularRegulator(format!("no unit has a nonzero component at character {ci}")))?;
        comps[ui][ci] = t.div(&l)?;
        pivots.push((ci, ui));
    }
    let bound = 2 * order as u64;
    let tol = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), (n.prec() / 2) as usize));
    let mut exponents = Vec::new();
    for comp in &comps {
        let x = from_components(n, group, &tables, comp);
        let mut coeffs = Vec::with_capacity(order);
        for c in x.coeffs() {
            if !c.im.contains_zero() {
                return Err(Error::RationalReconstruction("exponent has a nonzero imaginary part".into()));
            }
            let r = rational_reconstruct(&c.re.mid_rational(), bound);
            if !c.re.within(&r, &tol) {
                return Err(Error::RationalReconstruction(format!(
                    "{} is not within 2^-{} of a fraction with denominator ≤ {bound}; raise the precision",
                    c.re,
                    n.prec() / 2
                )));
            }
            coeffs.push(r);
        }
        exponents.push(RatGroupRing::new(group, coeffs));
    }
    let residual = residual_bound(reg, &exponents, &ee, target, n);
    Ok(ThetaMapResult { exponents, pivots, residual, e_field: ee })
}

fn to_balls(x: &RatGroupRing, prec: u32) -> GroupRingElt<Ball> {
    x.map(|c| Ball::from_ratio(c, prec))
}

/// Upper bound on |λ_E(∏ u_i^{x_i}) − e_(E)·target·(w_j − w_0)| over all coordinates.
pub fn residual_bound(reg: &RegulatorMatrix, exponents: &[RatGroupRing], ee: &RatGroupRing, target: &GroupRingElt<CBall>, n: &Numerics) -> BigRational {
    let group = &reg.group;
    let prec = n.prec();
    let target_re: GroupRingElt<Ball> = target.map(|c| c.re.clone());
    let et = to_balls(ee, prec).mul(&target_re);
    let mut arch = et.neg();
    for (x, lam) in exponents.iter().zip(&reg.arch) {
        arch = arch.add(&to_balls(x, prec).mul(&GroupRingElt::new(group, lam.clone())));
    }
    let mut worst = arch.coeffs().iter().map(|b| b.abs_upper()).max().unwrap_or_else(BigRational::zero);
    // w_0 lies above the least ramified prime
    for (k, fc) in reg.finite.iter().enumerate() {
        let mut lam_p = GroupRingElt::zero_with(group, Ball::zero(prec));
        for (x, row) in exponents.iter().zip(&fc.coeffs) {
            let l = GroupRingElt::new(group, row.iter().map(|c| fc.log_p.mul_ratio(c)).collect());
            lam_p = lam_p.add(&to_balls(x, prec).mul(&l));
        }
        if k == 0 {
            lam_p = lam_p.add(&et);
        }
        for &s in &fc.coset_reps {
            let coset_sum = fc
                .decomposition
                .iter()
                .fold(Ball::zero(prec), |acc, &d| acc.add(lam_p.coeff(group.mul(s, d))));
            let b = coset_sum.abs_upper();
            if b > worst {
                worst = b;
            }
        }
    }
    worst
}

/// e_U: the sum of e_χ over characters with e_χ·u ≠ 0 in ℚ ⊗ E^×, decided
/// exactly per rational character class by a torsion test.
pub fn unit_support(e: &AbelianField, group: &Arc<Group>, u: &CycElt) -> Result<RatGroupRing> {
    let chars = field_characters(e);
    let exp = group.exponent();
    let mut done = vec![false; chars.len()];
    let mut support: Vec<CharTable> = Vec::new();
    for i in 0..chars.len() {
        if done[i] {
            continue;
        }
        let mut orbit = Vec::new();
        for t in 1..=exp.max(1) {
            if gcd(t as u64, exp as u64) != 1 {
                continue;
            }
            let c = chars[i].1.power(t);
            if let Some(j) = chars.iter().position(|x| x.1 == c) {
                if !done[j] {
                    done[j] = true;
                    orbit.push(c);
                }
            }
        }
        let refs: Vec<&CharTable> = orbit.iter().collect();
        let idem = rational_idempotent(group, &refs)?;
        let (ints, _) = crate::linalg::clear_denominators(idem.coeffs());
        let mut y = CycElt::one(u.field());
        for (s, c) in ints.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k: i64 = c.try_into().map_err(|_| Error::Budget("idempotent exponent overflow".into()))?;
            y = y.mul(&e.act(s, u)?.pow(k)?);
        }
        if y.torsion_test().is_none() {
            support.extend(orbit);
        }
    }
    if support.is_empty() {
        return Ok(RatGroupRing::zero(group));
    }
    let refs: Vec<&CharTable> = support.iter().collect();
    rational_idempotent(group, &refs)
}

/// The cyclotomic S-unit (1−ζ_m)(1−ζ_m^{-1}) of ℚ(m)^+.
pub fn cyclotomic_square(m: u64) -> CycElt {
    let fm = CyclotomicField::new(m);
    CycElt::from_zeta_sum(&fm, &[(0, 2), (1, -1), (m as i64 - 1, -1)])
}

#[derive(Clone, Debug)]
pub struct ThetaReport {
    pub m: u64,
    pub theta: ThetaStar,
    pub regulator: RegulatorMatrix,
    pub result: ThetaMapResult,
    pub support: RatGroupRing,
    /// x·e_U = ½·e_U, i.e. the image is (1−ζ_m)^{(1+τ)/2} in ℚ ⊗ O^×
    pub recovers_half: bool,
}

/// Reconstruct Θ(θ*) on E = ℚ(m)^+ from the single unit (1−ζ_m)^{1+τ}.
pub fn theta_cyclotomic(m: u64, engine: &mut LValueEngine) -> Result<ThetaReport> {
    if m <= 2 || m % 4 == 2 || m == 4 || m == 3 {
        return Err(Error::Precondition(format!("ℚ({m})^+ must be a nontrivial field with m ≢ 2 mod 4")));
    }
    let e = AbelianField::real_cyclotomic(m);
    let theta = theta_star(&e, engine)?;
    let u = cyclotomic_square(m);
    let regulator = RegulatorMatrix::new(&e, std::slice::from_ref(&u), engine.numerics())?;
    let result = theta_map(&regulator, &theta.element, engine.numerics())?;
    let support = unit_support(&regulator.field, &regulator.group, &regulator.units[0])?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let lhs = result.exponents[0].mul(&support);
    let rhs = support.scale(&half);
    Ok(ThetaReport { m, theta, regulator, result, support, recovers_half: lhs == rhs })
}

/// JSON-lines cache of certified L-values keyed by request hash.
#[derive(Debug)]
pub struct LValueCache {
    path: PathBuf,
    entries: BTreeMap<String, Value>,
}

pub const LVALUE_CACHE_VERSION: u32 = 1;

impl LValueCache {
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(format!("lvalues-v{LVALUE_CACHE_VERSION}.jsonl"));
        let mut entries = BTreeMap::new();
        if let Ok(file) = std::fs::File::open(&path) {
            for line in std::io::BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: Value = serde_json::from_str(&line)?;
                if let Some(h) = v.get("hash").and_then(|h| h.as_str()) {
                    entries.insert(h.to_string(), v);
                }
            }
        }
        Ok(LValueCache { path, entries })
    }

    pub fn get(&self, req: &LValueRequest) -> Result<Option<(usize, CBall)>> {
        let Some(v) = self.entries.get(&req.hash()) else {
            return Ok(None);
        };
        let ep = |k: &str, i: usize| -> Result<String> {
            v[k][i].as_str().map(str::to_string).ok_or_else(|| Error::Parse(format!("cache entry lacks {k}")))
        };
        let re = Ball::from_hex_endpoints(&ep("re", 0)?, &ep("re", 1)?)?;
        let im = Ball::from_hex_endpoints(&ep("im", 0)?, &ep("im", 1)?)?;
        let order = v["leading_order"].as_u64().ok_or_else(|| Error::Parse("cache entry lacks order".into()))? as usize;
        Ok(Some((order, CBall::new(re, im))))
    }

    pub fn put(&mut self, req: &LValueRequest, value: &LValue) -> Result<()> {
        let h = req.hash();
        if self.entries.contains_key(&h) {
            return Ok(());
        }
        let (rl, rh) = value.value.re.hex_endpoints();
        let (il, ih) = value.value.im.hex_endpoints();
        let v = json!({"hash": h, "leading_order": value.leading_order, "re": [rl, rh], "im": [il, ih]});
        if let Some(dir) = self.path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&v)?)?;
        self.entries.insert(h, v);
        Ok(())
    }
}

/// Finite primes dividing m together with ∞.
pub fn s_of_modulus(m: u64) -> Vec<Place> {
    let mut s = vec![Place::Infinite];
    s.extend(prime_divisors(m).into_iter().map(Place::Finite));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: &CBall, x: f64, tol: f64) -> bool {
        (b.re.to_f64() - x).abs() < tol && b.im.to_f64().abs() < tol
    }

    #[test]
    fn spot_values() {
        let mut eng = LValueEngine::new(128).unwrap();
        let q5 = DirichletChar::parse("5:quadratic").unwrap();
        let s = [Place::Infinite, Place::Finite(5)];
        let t = eng.leading_term(&q5, &s).unwrap();
        assert_eq!(t.order, 1);
        assert!(close(&t.value, 0.481_211_825_059_603_4, 1e-15));
        let q12 = DirichletChar::parse("12:quadratic").unwrap();
        let t = eng.leading_term(&q12, &[Place::Infinite, Place::Finite(2), Place::Finite(3)]).unwrap();
        assert!(close(&t.value, 1.316_957_896_924_816_7, 1e-15));
    }

    #[test]
    fn split_prime_raises_order() {
        let mut eng = LValueEngine::new(96).unwrap();
        let q5 = DirichletChar::parse("5:quadratic").unwrap();
        let s = [Place::Infinite, Place::Finite(5), Place::Finite(11)];
        let v = eng.evaluate(&LValueRequest::new(q5.clone(), &s, 1, 96)).unwrap();
        assert!(v.exact_zero);
        assert_eq!(v.leading_order, 2);
        let lead = eng.evaluate(&LValueRequest::new(q5.clone(), &s, 2, 96)).unwrap();
        // log φ · log 11
        assert!(close(&lead.value, 0.481_211_825_059_603_4 * 11f64.ln(), 1e-12));
        assert!(matches!(eng.evaluate(&LValueRequest::new(q5.clone(), &s, 3, 96)), Err(Error::Unsupported(_))));
        assert_eq!(l_order(&q5, &s).unwrap(), 2);
        assert_eq!(l_order(&q5, &s[..2]).unwrap(), 1);
        // an inert prime multiplies by 1 - χ(2) = 2
        let t = eng.leading_term(&q5, &[Place::Infinite, Place::Finite(2)]).unwrap();
        assert!(close(&t.value, 2.0 * 0.481_211_825_059_603_4, 1e-12));
    }

    #[test]
    fn odd_and_trivial() {
        let mut eng = LValueEngine::new(64).unwrap();
        // L(χ_{-4}, 0) = 1/2, L(χ_{-3}, 0) = 1/3
        let c4 = DirichletChar::parse("4:1").unwrap();
        assert!(close(&eng.leading_term(&c4, &[Place::Infinite]).unwrap().value, 0.5, 1e-15));
        let c3 = DirichletChar::parse("3:1").unwrap();
        assert!(close(&eng.leading_term(&c3, &[Place::Infinite]).unwrap().value, 1.0 / 3.0, 1e-15));
        let triv = DirichletChar::trivial(1);
        let t = eng.leading_term(&triv, &[Place::Infinite, Place::Finite(5)]).unwrap();
        assert!(t.reduced_confidence);
        assert_eq!(t.order, 1);
        assert!(close(&t.value, -0.5 * 5f64.ln(), 1e-14));
        assert_eq!(l_order(&triv, &[Place::Infinite, Place::Finite(5)]).unwrap(), 1);
        assert!(l_order(&triv, &[Place::Finite(5)]).is_err());
    }

    #[test]
    fn cyclotomic_sum_matches_for_imprimitive() {
        // at modulus 15 the quadratic character of conductor 5 picks up 1 - χ(3) = 2
        let mut eng = LValueEngine::new(96).unwrap();
        let q5 = DirichletChar::parse("5:quadratic").unwrap();
        let ext = q5.extend_to(15).unwrap();
        let sum = eng.cyclotomic_sum(&ext).unwrap();
        let lead = eng.leading_term(&ext, &s_of_modulus(15)).unwrap();
        assert_eq!(lead.order, 1);
        assert!(sum.sub(&lead.value).abs_upper() < BigRational::new(1.into(), BigInt::from(1u64 << 60)));
    }

    #[test]
    fn reconstruct() {
        let x = BigRational::new(BigInt::from(1_000_001), BigInt::from(4_000_000));
        assert_eq!(rational_reconstruct(&x, 8), BigRational::new(1.into(), 4.into()));
        let y = BigRational::new(BigInt::from(-3), BigInt::from(2));
        assert_eq!(rational_reconstruct(&y, 8), y);
    }

    #[test]
    fn theta_m5_and_m12() {
        let mut eng = LValueEngine::new(128).unwrap();
        for m in [5, 12] {
            let rep = theta_cyclotomic(m, &mut eng).unwrap();
            assert!(rep.recovers_half, "m = {m}: {:?}", rep.result.exponents);
            assert!(rep.result.residual < BigRational::new(1.into(), BigInt::from(10u64.pow(15))));
            assert!(rep.regulator.row_sum_bound() < BigRational::new(1.into(), BigInt::from(1u64 << 60)));
        }
        let rep = theta_cyclotomic(5, &mut eng).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(rep.result.exponents[0], RatGroupRing::one(&rep.regulator.group).scale(&half));
    }

    #[test]
    fn theta_equivariance() {
        let mut eng = LValueEngine::new(128).unwrap();
        let e = AbelianField::real_cyclotomic(13);
        let th = theta_star(&e, &mut eng).unwrap();
        let reg = RegulatorMatrix::new(&e, &[cyclotomic_square(13)], eng.numerics()).unwrap();
        let base = theta_map(&reg, &th.element, eng.numerics()).unwrap();
        let g = 1;
        let shifted = theta_map(&reg, &th.element.shift(g), eng.numerics()).unwrap();
        assert_eq!(shifted.exponents[0], base.exponents[0].shift(g));
    }
}
