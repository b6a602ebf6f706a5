//! Place modules `Y_{E,Σ}`, `X_{E,Σ}` and their character dimensions, the
//! idempotent `e_(E)`, Euler factors and the annihilator ideal `A_E` of μ_E.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{gcd, is_prime, lcm, primes_up_to};
use crate::characters::{field_characters, DirichletChar};
use crate::error::{Error, Result};
use crate::field::{AbelianField, Place};
use crate::group::{CharTable, Group};
use crate::group_ring::{rational_idempotent, IntGroupRing, RatGroupRing};
use crate::linalg::{self, IMat};

#[derive(Clone, Debug)]
pub struct PlaceModuleDims {
    pub places: Vec<Place>,
    /// one entry per character of G_E, in [`field_characters`] order
    pub chars: Vec<(DirichletChar, CharTable)>,
    pub dim_y: Vec<usize>,
    pub dim_x: Vec<usize>,
    /// number of places of E above Σ
    pub places_of_e: usize,
}

impl PlaceModuleDims {
    pub fn new(e: &AbelianField, places: &[Place]) -> Self {
        let mut places = places.to_vec();
        places.sort();
        places.dedup();
        let chars = field_characters(e);
        let decomp: Vec<Vec<usize>> = places.iter().map(|&v| e.decomposition_group(v)).collect();
        let mut dim_y = Vec::new();
        let mut dim_x = Vec::new();
        for (_, t) in &chars {
            let y = decomp.iter().filter(|d| t.trivial_on(d)).count();
            dim_y.push(y);
            dim_x.push(if t.is_trivial() { y.saturating_sub(1) } else { y });
        }
        let places_of_e = decomp.iter().map(|d| e.degree() / d.len()).sum();
        PlaceModuleDims { places, chars, dim_y, dim_x, places_of_e }
    }

    pub fn total_x(&self) -> usize {
        self.dim_x.iter().sum()
    }

    pub fn dim_x_of(&self, t: &CharTable) -> Option<usize> {
        self.chars.iter().position(|(_, c)| c == t).map(|i| self.dim_x[i])
    }
}

/// Finite primes ramified in E, as places.
pub fn ramified_places(e: &AbelianField) -> Vec<Place> {
    e.ramified_primes().into_iter().map(Place::Finite).collect()
}

/// S(E) = ramified primes together with the archimedean place.
pub fn s_of(e: &AbelianField) -> Vec<Place> {
    let mut s = vec![Place::Infinite];
    s.extend(ramified_places(e));
    s
}

/// Characters of G_E with `X^χ_{E,S_ram} = 0`.
pub fn e_field_characters(e: &AbelianField) -> Vec<(DirichletChar, CharTable)> {
    let dims = PlaceModuleDims::new(e, &ramified_places(e));
    dims.chars
        .iter()
        .zip(&dims.dim_x)
        .filter(|(_, &d)| d == 0)
        .map(|(c, _)| c.clone())
        .collect()
}

/// The idempotent e_(E) ∈ ℚ[G_E].
pub fn e_field(e: &AbelianField, group: &Arc<Group>) -> Result<RatGroupRing> {
    if e.is_rationals() {
        return Err(Error::Precondition("e_(E) needs E ≠ ℚ".into()));
    }
    let chars = e_field_characters(e);
    let tables: Vec<&CharTable> = chars.iter().map(|(_, t)| t).collect();
    if tables.is_empty() {
        return Ok(RatGroupRing::zero(group));
    }
    rational_idempotent(group, &tables)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerVariant {
    /// 1 − Fr_v^{-1}
    Plain,
    /// 1 − Nv·Fr_v^{-1}
    Norm,
}

pub fn euler_factor(e: &AbelianField, group: &Arc<Group>, v: u64, variant: EulerVariant) -> Result<IntGroupRing> {
    let fr = e.frobenius(v)?;
    let c = match variant {
        EulerVariant::Plain => BigInt::from(1),
        EulerVariant::Norm => BigInt::from(v),
    };
    let one = IntGroupRing::one(group);
    Ok(one.sub(&IntGroupRing::monomial(group, group.inv(fr), c)))
}

/// Lifts of the coset representatives to units mod lcm(m, 2) acting on μ_E.
fn torsion_action(e: &AbelianField) -> (u64, Vec<u64>) {
    let w = e.roots_of_unity_order();
    let m = e.modulus();
    let big = lcm(m, 2);
    let lifts = e
        .reps()
        .iter()
        .map(|&r| {
            let l = if big == m || r % 2 == 1 { r } else { r + m };
            l % w.max(1)
        })
        .collect();
    (w, lifts)
}

/// Does x ∈ ℤ[G_E] annihilate μ_E?
pub fn annihilates_mu(e: &AbelianField, x: &IntGroupRing) -> bool {
    let (w, lifts) = torsion_action(e);
    let w = BigInt::from(w);
    let s: BigInt = x.coeffs().iter().zip(&lifts).map(|(c, &l)| c * BigInt::from(l)).sum();
    (s % w).is_zero()
}

#[derive(Clone, Debug)]
pub struct AnnihilatorIdeal {
    pub generators: Vec<IntGroupRing>,
    /// HNF basis of the ℤ-span of the generators
    pub basis: IMat,
    pub primes_used: Vec<u64>,
    pub batches: usize,
}

pub const ANNIHILATOR_PRIME_BOUND: u64 = 1000;
const BATCH: usize = 8;
const STABLE_BATCHES: usize = 3;

impl AnnihilatorIdeal {
    /// ℤ-span of {1 − Nv·Fr_v^{-1} : v ∉ U, v < 1000}, grown in batches until
    /// the normal form is unchanged for three consecutive batches.
    pub fn new(e: &AbelianField, group: &Arc<Group>, u: &[u64]) -> Result<Self> {
        let w = e.roots_of_unity_order();
        let mut needed: Vec<u64> = e.ramified_primes();
        needed.extend(crate::arith::prime_divisors(w));
        for p in &needed {
            if !u.contains(p) {
                return Err(Error::Precondition(format!("U must contain {p} (ramified or dividing |μ_E| = {w})")));
            }
        }
        let cands: Vec<u64> = primes_up_to(ANNIHILATOR_PRIME_BOUND)
            .into_iter()
            .filter(|p| !u.contains(p) && gcd(*p, e.modulus()) == 1)
            .collect();
        let mut generators = Vec::new();
        let mut rows: IMat = Vec::new();
        let mut basis: IMat = Vec::new();
        let mut stable = 0;
        let mut batches = 0;
        let mut used = Vec::new();
        for chunk in cands.chunks(BATCH) {
            for &p in chunk {
                let g = euler_factor(e, group, p, EulerVariant::Norm)?;
                rows.push(g.coeffs().to_vec());
                generators.push(g);
                used.push(p);
            }
            batches += 1;
            let h = linalg::hnf(&rows);
            if h == basis {
                stable += 1;
            } else {
                stable = 0;
                basis = h;
            }
            rows = basis.clone();
            if stable >= STABLE_BATCHES {
                break;
            }
        }
        Ok(AnnihilatorIdeal { generators, basis, primes_used: used, batches })
    }

    pub fn contains(&self, x: &IntGroupRing) -> bool {
        linalg::in_lattice(&self.basis, x.coeffs())
    }

    /// Index of the span in ℤ[G] (None if not of full rank).
    pub fn index(&self) -> Option<BigInt> {
        let n = self.basis.first().map(|r| r.len())?;
        if self.basis.len() != n {
            return None;
        }
        let id: IMat = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        linalg::lattice_index(&id, &self.basis)
    }
}

/// Default U for A_E: ramified primes plus primes dividing |μ_E|.
pub fn default_u(e: &AbelianField) -> Vec<u64> {
    let mut u = e.ramified_primes();
    u.extend(crate::arith::prime_divisors(e.roots_of_unity_order()));
    u.sort_unstable();
    u.dedup();
    u
}

/// Is the prime q admissible (q ∉ U)?
pub fn admissible(q: u64, u: &[u64]) -> bool {
    is_prime(q) && !u.contains(&q)
}
