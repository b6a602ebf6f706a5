//! Valuations of cyclotomic numbers at primes above q.
//!
//! For q ∤ m the completion of ℚ(ζ_m) at a prime 𝔔 | q is unramified over
//! ℚ_q; we work in `W_n = (ℤ/q^n)[y]/(G)` with `G` a lift of the residue
//! field modulus, send ζ_m to the Hensel lift Θ of a root θ of Φ_m in 𝔽_{q^F},
//! and read off the q-adic valuation of the image. The precision `n` is
//! bounded a priori by the q-valuation of the absolute norm.
//!
//! For p | m, the prime above p in ℚ(ζ_m) is totally ramified over ℚ(ζ_{m'})
//! (`m = p^k m'`), so its valuation equals that of the relative norm down to
//! ℚ(ζ_{m'}), where p is unramified again.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd, mult_order, valuation};
use crate::cyclo::{CycElt, CyclotomicField};
use crate::error::{Error, Result};
use crate::field::{self, AbelianField};
use crate::finite_field::{FfElt, FiniteField};

/// q-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, q: u64) -> u32 {
    let q = BigInt::from(q);
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() && (&n % &q).is_zero() {
        n /= &q;
        k += 1;
    }
    k
}

fn rat_valuation(num: &BigInt, den: &BigInt, q: u64) -> i64 {
    int_valuation(num, q) as i64 - int_valuation(den, q) as i64
}

/// `(ℤ/q^n)[y]/(G)` with `G` monic of degree `f`.
struct LocalRing {
    pn: BigInt,
    modulus: Vec<BigInt>,
}

impl LocalRing {
    fn new(q: u64, n: u32, residue_modulus: &[u64]) -> Self {
        let pn = num_traits::pow(BigInt::from(q), n as usize);
        LocalRing { pn, modulus: residue_modulus.iter().map(|&c| BigInt::from(c)).collect() }
    }

    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce_coeff(&self, c: &BigInt) -> BigInt {
        c.mod_floor(&self.pn)
    }

    fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[0] = BigInt::one();
        v
    }

    fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| self.reduce_coeff(&(x + y))).collect()
    }

    fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| self.reduce_coeff(&(x - y))).collect()
    }

    fn scale(&self, a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
        a.iter().map(|x| self.reduce_coeff(&(x * c))).collect()
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.degree();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..prod.len()).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                prod[k - n + i] -= &c * &self.modulus[i];
            }
        }
        prod.truncate(n);
        prod.iter().map(|c| self.reduce_coeff(c)).collect()
    }

    fn eval_int_poly(&self, coeffs: &[BigInt], x: &[BigInt]) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.degree()];
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc[0] = self.reduce_coeff(&(&acc[0] + c));
        }
        acc
    }
}

/// A prime 𝔔 of ℚ(ζ_m) above q ∤ m, fixed by the residue image θ of ζ_m.
#[derive(Clone, Debug)]
pub struct UnramifiedPrime {
    q: u64,
    m: u64,
    residue: FiniteField,
    theta: FfElt,
}

impl UnramifiedPrime {
    /// The default choice θ = g^{(q^F - 1)/m} for the least primitive element g.
    pub fn new(q: u64, m: u64) -> Result<Self> {
        if m.is_multiple_of(q) && m > 1 {
            return Err(Error::Ramified(q));
        }
        let f = mult_order(q % m.max(2), m.max(2)).unwrap_or(1) as u32;
        let f = if m <= 2 { 1 } else { f };
        let residue = FiniteField::new(q, f)?;
        let g = residue.primitive_element();
        let theta = residue.pow(&g, (residue.size() - 1) / m.max(1));
        Ok(UnramifiedPrime { q, m, residue, theta })
    }

    /// An explicit choice of θ, validated as a root of Φ_m.
    pub fn with_theta(q: u64, m: u64, theta_coords: &[u64]) -> Result<Self> {
        let base = Self::new(q, m)?;
        let theta = base.residue.from_coords(theta_coords)?;
        let phi: Vec<i64> = crate::arith::cyclotomic_poly(m)
            .iter()
            .map(|c| i64::try_from(c).map_err(|_| Error::Budget("cyclotomic coefficient overflow".into())))
            .collect::<Result<_>>()?;
        if !base.residue.is_zero(&base.residue.eval_poly(&phi, &theta)) {
            return Err(Error::Precondition(format!("θ = {theta_coords:?} is not a root of Φ_{m} mod {q}")));
        }
        Ok(UnramifiedPrime { theta, ..base })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.residue
    }

    pub fn theta(&self) -> &FfElt {
        &self.theta
    }

    /// The prime ζ_m ↦ θ^s, i.e. the prime σ_s^{-1}𝔔.
    pub fn conjugate(&self, s: u64) -> Result<Self> {
        if gcd(s, self.m) != 1 {
            return Err(Error::NotCoprime { s, m: self.m });
        }
        Ok(UnramifiedPrime { theta: self.residue.pow(&self.theta, s), ..self.clone() })
    }

    fn hensel_root(&self, ring: &LocalRing, n: u32) -> Vec<BigInt> {
        let phi = crate::arith::cyclotomic_poly(self.m.max(1));
        let dphi: Vec<BigInt> = phi.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        let mut x: Vec<BigInt> = self.theta.iter().map(|&c| BigInt::from(c)).collect();
        // Φ'(θ)^{-1} in the residue field, lifted; linear convergence in n steps
        let d = self.residue.eval_poly(
            &dphi.iter().map(|c| i64::try_from(c).expect("small coefficients")).collect::<Vec<_>>(),
            &self.theta,
        );
        let dinv: Vec<BigInt> = self.residue.inv(&d).expect("Φ_m separable mod q").into_iter().map(BigInt::from).collect();
        for _ in 0..n {
            let v = ring.eval_int_poly(&phi, &x);
            if v.iter().all(|c| c.is_zero()) {
                break;
            }
            x = ring.sub(&x, &ring.mul(&v, &dinv));
        }
        debug_assert!(ring.eval_int_poly(&phi, &x).iter().all(|c| c.is_zero()));
        x
    }

    fn image(&self, a: &CycElt, n: u32) -> Vec<BigInt> {
        let ring = LocalRing::new(self.q, n, self.residue.modulus());
        let theta = self.hensel_root(&ring, n);
        let mut acc = vec![BigInt::zero(); ring.degree()];
        let mut pw = ring.one();
        for c in a.numerators() {
            if !c.is_zero() {
                acc = ring.add(&acc, &ring.scale(&pw, c));
            }
            pw = ring.mul(&pw, &theta);
        }
        acc
    }

    fn check_modulus(&self, a: &CycElt) -> Result<CycElt> {
        if a.modulus() == self.m {
            return Ok(a.clone());
        }
        if self.m.is_multiple_of(a.modulus()) {
            return a.lift(&CyclotomicField::new(self.m));
        }
        a.descend(&CyclotomicField::new(self.m)).ok_or(Error::ModulusMismatch(a.modulus(), self.m))
    }

    /// ord_𝔔(a) for a ≠ 0.
    pub fn ord(&self, a: &CycElt) -> Result<i64> {
        let a = self.check_modulus(a)?;
        if a.is_zero() {
            return Err(Error::Precondition("valuation of zero".into()));
        }
        let c = CycElt::from_int_coeffs(a.field(), a.numerators().to_vec(), BigInt::one())?;
        let nc = c.norm_q();
        let bound = int_valuation(nc.numer(), self.q) + 1;
        let img = self.image(&c, bound);
        let v = img
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| int_valuation(x, self.q))
            .min()
            .expect("image of a nonzero element is nonzero at this precision");
        Ok(v as i64 - int_valuation(a.denominator(), self.q) as i64)
    }

    /// Residue of an element that is integral at 𝔔; `Ok(None)` if it is not.
    pub fn residue(&self, a: &CycElt) -> Result<Option<FfElt>> {
        let a = self.check_modulus(a)?;
        if a.is_zero() {
            return Ok(Some(self.residue.zero()));
        }
        let vd = int_valuation(a.denominator(), self.q);
        if vd == 0 {
            let d = a.denominator().mod_floor(&BigInt::from(self.q));
            let dinv = self.residue.inv(&self.residue.from_int(i64::try_from(&d).expect("small")))?;
            let img = self.image(&a, 1);
            let coords: FfElt = img.iter().map(|c| u64::try_from(c).expect("reduced")).collect();
            return Ok(Some(self.residue.mul(&coords, &dinv)));
        }
        let v = self.ord(&a)?;
        if v < 0 {
            return Ok(None);
        }
        if v > 0 {
            return Ok(Some(self.residue.zero()));
        }
        // numerator and denominator share the q-power vd
        let img = self.image(&CycElt::from_int_coeffs(a.field(), a.numerators().to_vec(), BigInt::one())?, vd + 1);
        let qv = num_traits::pow(BigInt::from(self.q), vd as usize);
        let q = BigInt::from(self.q);
        let coords: FfElt = img.iter().map(|c| u64::try_from(&(c / &qv).mod_floor(&q)).expect("reduced")).collect();
        let d = (a.denominator() / &qv).mod_floor(&q);
        let dinv = self.residue.inv(&self.residue.from_int(i64::try_from(&d).expect("small")))?;
        Ok(Some(self.residue.mul(&coords, &dinv)))
    }
}

/// The place w_0 of E above a ramified prime p: the one below the prime of
/// ℚ(ζ_m) whose image in ℚ(ζ_{m'}) is the default [`UnramifiedPrime`].
#[derive(Clone, Debug)]
pub struct RamifiedPlace {
    p: u64,
    field: AbelianField,
    full: Arc<CyclotomicField>,
    base: Arc<CyclotomicField>,
    below: UnramifiedPrime,
    inertia_index: AbelianField,
    /// e(𝔓 | w_0)
    upper_ramification: i64,
    /// residue degree of w_0 over p
    residue_degree: u32,
}

impl RamifiedPlace {
    pub fn new(e: &AbelianField, p: u64) -> Result<Self> {
        let m = e.modulus();
        if !m.is_multiple_of(p) {
            return Err(Error::Precondition(format!("{p} does not divide {m}")));
        }
        let k = valuation(m, p);
        let mp = m / p.pow(k);
        let below = UnramifiedPrime::new(p, mp)?;
        let h: Vec<u64> = crate::arith::units(m).into_iter().filter(|&u| u % mp == 1 % mp).collect();
        let inertia_index = AbelianField::new(m, &h)?;
        let inertia_e = e.inertia(p).len();
        let decomp_e = e.decomposition_group(crate::field::Place::Finite(p)).len();
        let full_e = (p - 1) * p.pow(k - 1);
        Ok(RamifiedPlace {
            p,
            field: e.clone(),
            full: CyclotomicField::new(m),
            base: CyclotomicField::new(mp),
            below,
            inertia_index,
            upper_ramification: (full_e as usize / inertia_e) as i64,
            residue_degree: (decomp_e / inertia_e) as u32,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn residue_degree(&self) -> u32 {
        self.residue_degree
    }

    /// ord_{w_0}(a) for a nonzero element of E.
    pub fn ord(&self, a: &CycElt) -> Result<i64> {
        let a = if a.modulus() == self.full.m() { a.clone() } else { a.lift(&self.full)? };
        let nrm = field::norm(&a, &AbelianField::cyclotomic(self.full.m()), &self.inertia_index)?;
        let down = nrm
            .descend(&self.base)
            .ok_or_else(|| Error::NotNested("relative norm did not descend".into()))?;
        let v = self.below.ord(&down)?;
        if v % self.upper_ramification != 0 {
            return Err(Error::Precondition(format!("element is not in {:?}", self.field)));
        }
        Ok(v / self.upper_ramification)
    }
}

/// ord at the prime of ℚ given by q, for rationals.
pub fn rational_ord(r: &num_rational::BigRational, q: u64) -> i64 {
    rat_valuation(r.numer(), r.denom(), q)
}
