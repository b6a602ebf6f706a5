//! ℤ[G]-lattices, their duals Hom_{ℤ[G]}(X, ℤ[G]), exterior power biduals
//! ∩^r X = (∧^r X*)* and the map ξ^r : ∧^r X → ∩^r X.
//!
//! A lattice is a G-stable ℤ-submodule of ℚ[G]^d with the regular action on
//! each coordinate; coordinate (c, h) of ℚ[G]^d sits at index `c·|G| + h`.
//! Elements of ℚ ⊗ X are written in coordinates with respect to the ℤ-basis.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::group_ring::RatGroupRing;
use crate::linalg::{self, IMat, QMat};

/// Largest |G|·d accepted.
pub const SIZE_BOUND: usize = 24;
/// Largest number of rows or columns of the ξ pairing matrix.
pub const PAIRING_BOUND: usize = 400;

fn qi(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// r-subsets of 0..k in lexicographic order.
pub fn subsets(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    go(0, k, r, &mut cur, &mut out);
    out
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Determinant over the commutative ring ℚ[G], by cofactor expansion.
pub fn det(m: &[Vec<RatGroupRing>], group: &Arc<Group>) -> RatGroupRing {
    match m.len() {
        0 => RatGroupRing::one(group),
        1 => m[0][0].clone(),
        n => {
            let mut acc = RatGroupRing::zero(group);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<RatGroupRing>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
                let t = m[0][j].mul(&det(&minor, group));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

#[derive(Clone, Debug)]
pub struct GLattice {
    group: Arc<Group>,
    /// orders of the cyclic factors of the group
    orders: Vec<usize>,
    ambient: usize,
    basis: IMat,
    /// action[g] with g·b_i = Σ_j action[g][i][j] b_j
    action: Vec<IMat>,
    /// invariants of a finite torsion summand carried alongside the lattice
    torsion: Vec<u64>,
    /// columns where the basis is invertible, and that inverse
    pivots: Vec<usize>,
    pivot_inv: QMat,
}

impl PartialEq for GLattice {
    fn eq(&self, o: &Self) -> bool {
        self.orders == o.orders && self.ambient == o.ambient && linalg::same_lattice(&self.basis, &o.basis) && self.torsion == o.torsion
    }
}

/// g·v for v ∈ ℚ[G]^d.
fn act_vec<T: Clone + Zero>(group: &Group, d: usize, g: usize, v: &[T]) -> Vec<T> {
    let n = group.order();
    let mut out = vec![T::zero(); v.len()];
    for c in 0..d {
        for h in 0..n {
            out[c * n + group.mul(g, h)] = v[c * n + h].clone();
        }
    }
    out
}

fn check_size(group: &Group, d: usize) -> Result<()> {
    if group.order() * d > SIZE_BOUND {
        return Err(Error::DegreeTooLarge { degree: group.order() * d, bound: SIZE_BOUND });
    }
    Ok(())
}

impl GLattice {
    /// The lattice with the given ℤ-basis; checks G-stability and independence.
    pub fn from_basis(orders: &[usize], ambient: usize, basis: IMat) -> Result<Self> {
        check_size(&Group::cyclic_product(orders), ambient)?;
        Self::from_basis_unchecked(orders, ambient, basis)
    }

    fn from_basis_unchecked(orders: &[usize], ambient: usize, basis: IMat) -> Result<Self> {
        let group = Group::cyclic_product(orders);
        let n = group.order();
        if basis.iter().any(|r| r.len() != ambient * n) {
            return Err(Error::Precondition(format!("basis rows must have length {}", ambient * n)));
        }
        if linalg::rank_int(&basis) != basis.len() {
            return Err(Error::Precondition("basis rows are linearly dependent".into()));
        }
        let k = basis.len();
        let rows_q: QMat = basis.iter().map(|r| r.iter().map(qi).collect()).collect();
        let pivots = linalg::rref(&rows_q).1;
        // [S | I] -> [I | S^{-1}] for S the pivot columns of the basis
        let aug: QMat = (0..k)
            .map(|i| pivots.iter().map(|&c| rows_q[i][c].clone()).chain((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() })).collect())
            .collect();
        let pivot_inv: QMat = linalg::rref(&aug).0.into_iter().map(|r| r[k..].to_vec()).collect();
        let mut lat = GLattice { group: group.clone(), orders: orders.to_vec(), ambient, basis, action: Vec::new(), torsion: Vec::new(), pivots, pivot_inv };
        for g in 0..n {
            let mut a = Vec::with_capacity(k);
            for b in &lat.basis {
                let gb: Vec<BigRational> = act_vec(&group, ambient, g, b).iter().map(qi).collect();
                match lat.coords(&gb) {
                    Some(x) if x.iter().all(|c| c.is_integer()) => a.push(x.iter().map(|c| c.to_integer()).collect()),
                    _ => return Err(Error::Precondition(format!("basis span is not stable under {}", group.label(g)))),
                }
            }
            lat.action.push(a);
        }
        Ok(lat)
    }

    /// ℤ[G]-span of the given vectors of ℚ[G]^d with integer entries.
    pub fn span(orders: &[usize], ambient: usize, gens: &[Vec<BigInt>]) -> Result<Self> {
        let group = Group::cyclic_product(orders);
        check_size(&group, ambient)?;
        let mut rows = Vec::new();
        for v in gens {
            if v.len() != ambient * group.order() {
                return Err(Error::Precondition(format!("generators must have length {}", ambient * group.order())));
            }
            for g in 0..group.order() {
                rows.push(act_vec(&group, ambient, g, v));
            }
        }
        Self::from_basis(orders, ambient, linalg::hnf(&rows))
    }

    /// ℤ[G]^s.
    pub fn free(orders: &[usize], s: usize) -> Result<Self> {
        let n: usize = orders.iter().product();
        let gens: Vec<Vec<BigInt>> = (0..s).map(|i| (0..s * n).map(|j| BigInt::from((j == i * n) as i64)).collect()).collect();
        Self::span(orders, s, &gens)
    }

    pub fn with_torsion(mut self, invariants: &[u64]) -> Self {
        self.torsion = invariants.iter().copied().filter(|&t| t > 1).collect();
        self
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn action(&self, g: usize) -> &IMat {
        &self.action[g]
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// Coordinates of an ambient vector of ℚ ⊗ X, or None outside ℚ ⊗ X.
    pub fn coords(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let k = self.rank();
        let x: Vec<BigRational> = (0..k)
            .map(|j| self.pivots.iter().enumerate().fold(BigRational::zero(), |acc, (i, &c)| acc + &v[c] * &self.pivot_inv[i][j]))
            .collect();
        let back = (0..v.len()).all(|c| x.iter().zip(&self.basis).fold(BigRational::zero(), |acc, (xi, b)| acc + xi * qi(&b[c])) == v[c]);
        back.then_some(x)
    }

    /// g·x for x in basis coordinates.
    pub fn act_coords(&self, g: usize, x: &[BigRational]) -> Vec<BigRational> {
        let a = &self.action[g];
        (0..self.rank()).map(|j| x.iter().zip(a).fold(BigRational::zero(), |acc, (c, row)| acc + c * qi(&row[j]))).collect()
    }

    fn matrix_json(m: &IMat, cols: usize) -> Value {
        json!({"rows": m.len(), "cols": cols, "data": m.iter().flatten().map(|x| x.to_string()).collect::<Vec<_>>()})
    }

    pub fn to_json(&self) -> Value {
        let n = self.group.order();
        json!({
            "group": self.orders,
            "ambient": self.ambient,
            "basis": Self::matrix_json(&self.basis, self.ambient * n),
            "action": (0..n).map(|g| Self::matrix_json(&self.action[g], self.rank())).collect::<Vec<_>>(),
            "torsion": self.torsion,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let orders: Vec<usize> = serde_json::from_value(v["group"].clone()).map_err(|e| Error::Parse(format!("group: {e}")))?;
        let ambient = v["ambient"].as_u64().ok_or_else(|| Error::Parse("missing \"ambient\"".into()))? as usize;
        let basis = parse_matrix(&v["basis"])?;
        let torsion: Vec<u64> = match v.get("torsion") {
            Some(t) => serde_json::from_value(t.clone()).map_err(|e| Error::Parse(format!("torsion: {e}")))?,
            None => Vec::new(),
        };
        Ok(Self::from_basis(&orders, ambient, basis)?.with_torsion(&torsion))
    }
}

/// Row-major integer matrix {"rows","cols","data"}; entries may be numbers or strings.
pub fn parse_matrix(v: &Value) -> Result<IMat> {
    let rows = v["rows"].as_u64().ok_or_else(|| Error::Parse("matrix lacks \"rows\"".into()))? as usize;
    let cols = v["cols"].as_u64().ok_or_else(|| Error::Parse("matrix lacks \"cols\"".into()))? as usize;
    let data = v["data"].as_array().ok_or_else(|| Error::Parse("matrix lacks \"data\"".into()))?;
    if data.len() != rows * cols {
        return Err(Error::Parse(format!("matrix data has {} entries, expected {}", data.len(), rows * cols)));
    }
    let ents: Vec<BigInt> = data
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("bad entry {n}"))),
            Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad entry {s:?}"))),
            _ => Err(Error::Parse(format!("bad entry {x}"))),
        })
        .collect::<Result<_>>()?;
    Ok(ents.chunks(cols.max(1)).take(rows).map(|c| c.to_vec()).collect())
}

/// Hom_{ℤ[G]}(X, ℤ[G]) as the lattice of value tuples (Φ(b_1), …, Φ(b_k)) in
/// ℚ[G]^k; the regular action on the tuple is the module action on Φ.
pub fn dual_lattice(x: &GLattice) -> Result<GLattice> {
    let g = &x.group;
    let n = g.order();
    let k = x.rank();
    // Φ(g b_i) = g Φ(b_i): Σ_j A_g[i][j] M[j][h] − M[i][g^{-1}h] = 0
    let mut eqs: IMat = Vec::new();
    // generators of the cyclic factors suffice
    let mut gens = Vec::new();
    let mut stride = 1;
    for &o in &x.orders {
        if o > 1 {
            gens.push(stride);
        }
        stride *= o;
    }
    for a in gens {
        let ainv = g.inv(a);
        for i in 0..k {
            for h in 0..n {
                let mut row = vec![BigInt::zero(); k * n];
                for j in 0..k {
                    row[j * n + h] += &x.action[a][i][j];
                }
                row[i * n + g.mul(ainv, h)] -= 1;
                if row.iter().any(|c| !c.is_zero()) {
                    eqs.push(row);
                }
            }
        }
    }
    let ker = if eqs.is_empty() { linalg::right_kernel(&[], k * n) } else { linalg::right_kernel(&eqs, k * n) };
    let basis = linalg::hnf(&ker);
    if basis.len() != k {
        return Err(Error::Precondition(format!("dual has ℤ-rank {} but the lattice has rank {k}", basis.len())));
    }
    GLattice::from_basis_unchecked(&x.orders, k, basis)
}

/// Φ(x) for Φ a row of a dual basis and x in lattice coordinates.
fn apply_functional(phi: &[BigInt], x: &[BigRational], group: &Arc<Group>) -> RatGroupRing {
    let n = group.order();
    let mut c = vec![BigRational::zero(); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for h in 0..n {
            let v = &phi[i * n + h];
            if !v.is_zero() {
                c[h] += xi * qi(v);
            }
        }
    }
    RatGroupRing::new(group, c)
}

/// A finite sum of terms a·(x_1 ∧ … ∧ x_r), a ∈ ℚ[G], x_i in lattice coordinates.
#[derive(Clone, Debug)]
pub struct WedgeElt {
    pub degree: usize,
    pub terms: Vec<(RatGroupRing, Vec<Vec<BigRational>>)>,
}

impl WedgeElt {
    pub fn new(degree: usize) -> Self {
        WedgeElt { degree, terms: Vec::new() }
    }

    pub fn push(&mut self, coeff: RatGroupRing, vectors: Vec<Vec<BigRational>>) -> Result<()> {
        if vectors.len() != self.degree {
            return Err(Error::Precondition(format!("term has {} factors, degree is {}", vectors.len(), self.degree)));
        }
        self.terms.push((coeff, vectors));
        Ok(())
    }

    /// c·(b_{i_1} ∧ … ∧ b_{i_r}) for basis vectors of X.
    pub fn basis_wedge(x: &GLattice, idx: &[usize], c: BigRational) -> Result<Self> {
        let k = x.rank();
        if idx.iter().any(|&i| i >= k) {
            return Err(Error::Precondition(format!("basis index out of range 0..{k}")));
        }
        let mut w = WedgeElt::new(idx.len());
        let vecs = idx.iter().map(|&i| (0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
        w.push(RatGroupRing::monomial(x.group(), 0, c), vecs)?;
        Ok(w)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        WedgeElt { degree: self.degree, terms: self.terms.iter().map(|(a, v)| (a.scale(c), v.clone())).collect() }
    }

    /// Pairing with Φ_{j_1} ∧ … ∧ Φ_{j_r}: Σ a·det(Φ_{j_s}(x_t)).
    pub fn pair(&self, dual_rows: &[&[BigInt]], group: &Arc<Group>) -> RatGroupRing {
        let mut acc = RatGroupRing::zero(group);
        for (a, vecs) in &self.terms {
            let m: Vec<Vec<RatGroupRing>> = dual_rows.iter().map(|phi| vecs.iter().map(|x| apply_functional(phi, x, group)).collect()).collect();
            acc = acc.add(&a.mul(&det(&m, group)));
        }
        acc
    }

    /// Φ_j(x_{t,s}) for every dual row j, term t and factor s.
    pub fn functional_table(&self, dual: &[Vec<BigInt>], group: &Arc<Group>) -> Vec<Vec<Vec<RatGroupRing>>> {
        self.terms.iter().map(|(_, vecs)| dual.iter().map(|phi| vecs.iter().map(|x| apply_functional(phi, x, group)).collect()).collect()).collect()
    }

    /// Φ_J(x) from a precomputed functional table.
    pub fn pair_from_table(&self, table: &[Vec<Vec<RatGroupRing>>], j: &[usize], group: &Arc<Group>) -> RatGroupRing {
        let mut acc = RatGroupRing::zero(group);
        for ((a, _), tab) in self.terms.iter().zip(table) {
            let m: Vec<Vec<RatGroupRing>> = j.iter().map(|&i| tab[i].clone()).collect();
            acc = acc.add(&a.mul(&det(&m, group)));
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(a, v)| json!({"coeff": a.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(), "vectors": v.iter().map(|x| x.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()}))
            .collect();
        json!({"degree": self.degree, "terms": terms})
    }

    /// {"degree": r, "terms": [{"coeff": [..] (optional), "vectors": [[..],..]}]}; entries
    /// are integers or "p/q" strings. Without "coeff" the term has coefficient 1.
    pub fn from_json(v: &Value, x: &GLattice) -> Result<Self> {
        let degree = v["degree"].as_u64().ok_or_else(|| Error::Parse("element lacks \"degree\"".into()))? as usize;
        let terms = v["terms"].as_array().ok_or_else(|| Error::Parse("element lacks \"terms\"".into()))?;
        let mut w = WedgeElt::new(degree);
        let n = x.group().order();
        for (t, term) in terms.iter().enumerate() {
            let at = |m: String| Error::Parse(format!("terms[{t}]: {m}"));
            let coeff = match term.get("coeff") {
                Some(c) => {
                    let c = parse_rat_vec(c).map_err(|e| at(e.to_string()))?;
                    if c.len() != n {
                        return Err(at(format!("coeff needs {n} entries")));
                    }
                    RatGroupRing::new(x.group(), c)
                }
                None => RatGroupRing::one(x.group()),
            };
            let vecs = term["vectors"].as_array().ok_or_else(|| at("missing \"vectors\"".into()))?;
            let vecs: Vec<Vec<BigRational>> = vecs.iter().map(parse_rat_vec).collect::<Result<_>>().map_err(|e| at(e.to_string()))?;
            if vecs.iter().any(|u| u.len() != x.rank()) {
                return Err(at(format!("vectors need {} coordinates", x.rank())));
            }
            w.push(coeff, vecs).map_err(|e| at(e.to_string()))?;
        }
        Ok(w)
    }
}

fn parse_rat_vec(v: &Value) -> Result<Vec<BigRational>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array".into()))?
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(i.into())).ok_or_else(|| Error::Parse(format!("bad entry {n}"))),
            Value::String(s) => s.parse::<BigRational>().map_err(|_| Error::Parse(format!("bad rational {s:?}"))),
            _ => Err(Error::Parse(format!("bad entry {x}"))),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub member: bool,
    /// number of dual wedges Φ_J checked
    pub checked: usize,
    /// offending J and Φ_J(x)
    pub witness: Option<(Vec<usize>, RatGroupRing)>,
    /// Φ_J(x) vanishes for every J, i.e. x = 0 in ∧^r_{ℚ[G]}(ℚ ⊗ X)
    pub is_zero: bool,
}

impl MembershipReport {
    pub fn to_json(&self) -> Value {
        json!({
            "member": self.member,
            "checked": self.checked,
            "is_zero": self.is_zero,
            "witness": self.witness.as_ref().map(|(j, v)| json!({"dual_wedge": j, "value": v.to_json()})),
        })
    }
}

fn degree_guard(x: &GLattice, r: usize) -> Result<()> {
    if r > x.ambient() {
        return Err(Error::DegreeTooLarge { degree: r, bound: x.ambient() });
    }
    Ok(())
}

/// x ∈ ∩^r X, tested against Φ_J = Φ_{j_1} ∧ … ∧ Φ_{j_r} for all r-subsets J of
/// a ℤ-basis of X* (rows in the layout of [`dual_lattice`]); these generate
/// ∧^r X* over ℤ[G].
pub fn bidual_membership_with(x: &WedgeElt, lat: &GLattice, dual_basis: &IMat) -> Result<MembershipReport> {
    let r = x.degree;
    degree_guard(lat, r)?;
    if dual_basis.len() != lat.rank() {
        return Err(Error::Precondition("dual basis has the wrong rank".into()));
    }
    let group = lat.group();
    let mut is_zero = true;
    let subs = subsets(dual_basis.len(), r);
    let table = x.functional_table(dual_basis, group);
    for (checked, j) in subs.iter().enumerate() {
        let v = x.pair_from_table(&table, j, group);
        if !v.is_zero() {
            is_zero = false;
        }
        if v.to_integral().is_none() {
            return Ok(MembershipReport { member: false, checked: checked + 1, witness: Some((j.clone(), v)), is_zero: false });
        }
    }
    Ok(MembershipReport { member: true, checked: subs.len(), witness: None, is_zero })
}

pub fn bidual_membership(x: &WedgeElt, lat: &GLattice) -> Result<MembershipReport> {
    bidual_membership_with(x, lat, dual_lattice(lat)?.basis())
}

/// Independent membership test: X* is taken as Hom_ℤ(X, ℤ) with the dual
/// basis φ_i, Φ_i(x) = Σ_g φ_i(g^{-1}x)·g, and integrality of every
/// coefficient ε_1(g^{-1}·Φ_J(x)) is checked one group element at a time.
pub fn bidual_membership_oracle(x: &WedgeElt, lat: &GLattice) -> Result<bool> {
    let r = x.degree;
    degree_guard(lat, r)?;
    let group = lat.group();
    let n = group.order();
    let k = lat.rank();
    // Φ_i as value tuples on the lattice basis: Φ_i(b_j) = Σ_g (A_{g^{-1}})[j][i]·g
    let phis: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            let mut row = vec![BigInt::zero(); k * n];
            for j in 0..k {
                for g in 0..n {
                    row[j * n + g] = lat.action(group.inv(g))[j][i].clone();
                }
            }
            row
        })
        .collect();
    let table = x.functional_table(&phis, group);
    for j in subsets(k, r) {
        let v = x.pair_from_table(&table, &j, group);
        for g in 0..n {
            if !v.shift(group.inv(g)).coeff(0).is_integer() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Basis indices whose G-translates span the lattice over ℤ, chosen greedily.
pub fn module_generators(lat: &GLattice) -> Vec<usize> {
    let k = lat.rank();
    let mut chosen = Vec::new();
    let mut span: IMat = Vec::new();
    for i in 0..k {
        let e: Vec<BigInt> = (0..k).map(|j| BigInt::from((i == j) as i64)).collect();
        if !span.is_empty() && linalg::in_lattice(&span, &e) {
            continue;
        }
        chosen.push(i);
        let mut rows = span;
        rows.extend((0..lat.group().order()).map(|g| lat.action(g)[i].clone()));
        span = linalg::hnf(&rows);
    }
    chosen
}

/// The pairing matrix of ξ^r against ℤ-generators on both sides, and its Smith data.
#[derive(Clone, Debug)]
pub struct XiReport {
    pub degree: usize,
    /// rows: ℤ-generators of ∧^r X (the b_i for r = 1, g·x_I over module
    /// generators otherwise); columns: h·Φ_J over module generators of X*;
    /// entries ε_1(h·Φ_J(row))
    pub pairing: IMat,
    /// dim_ℚ ∧^r_{ℚ[G]}(ℚ ⊗ X)
    pub rank: usize,
    /// invariant factors > 1 of ∩^r X / ξ(∧^r X)
    pub cokernel: Vec<BigInt>,
    /// whether ξ^r is injective, when the rows are known to be a ℤ-basis of ∧^r X
    pub injective: Option<bool>,
}

impl XiReport {
    pub fn cokernel_order(&self) -> BigInt {
        self.cokernel.iter().product()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "rank": self.rank,
            "generators": self.pairing.len(),
            "injective": self.injective,
            "cokernel": self.cokernel.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "cokernel_order": self.cokernel_order().to_string(),
        })
    }
}

/// ξ^r on ℤ-generators of ∧^r X. ∩^r X ≅ Hom_ℤ(∧^r X*, ℤ) via ε_1, so ∩^r X is
/// the saturation of the row lattice of the pairing matrix and the cokernel of
/// ξ^r is read off its Smith form.
pub fn xi_analysis(lat: &GLattice, r: usize) -> Result<XiReport> {
    xi_analysis_with(lat, &dual_lattice(lat)?, r)
}

pub fn xi_analysis_with(lat: &GLattice, dual: &GLattice, r: usize) -> Result<XiReport> {
    degree_guard(lat, r)?;
    let group = lat.group();
    let n = group.order();
    // ∧^r over ℤ[G] is generated by the x_I with I running over r-subsets of
    // any ℤ[G]-generating set, so both sides only need module generators.
    let (row_subs, translates): (Vec<Vec<usize>>, Vec<usize>) = if r == 1 {
        (subsets(lat.rank(), 1), vec![0])
    } else {
        let gx = module_generators(lat);
        (subsets(gx.len(), r).into_iter().map(|i| i.iter().map(|&t| gx[t]).collect()).collect(), (0..n).collect())
    };
    let gd = module_generators(dual);
    let col_subs: Vec<Vec<usize>> = subsets(gd.len(), r).into_iter().map(|j| j.iter().map(|&t| gd[t]).collect()).collect();
    let (nrows, ncols) = (row_subs.len() * translates.len(), col_subs.len() * n);
    if nrows > PAIRING_BOUND || ncols > PAIRING_BOUND {
        return Err(Error::Budget(format!("{nrows} × {ncols} pairing exceeds {PAIRING_BOUND}")));
    }
    let mut rows = Vec::with_capacity(nrows);
    for i in &row_subs {
        let w = WedgeElt::basis_wedge(lat, i, BigRational::one())?;
        let vals: Vec<RatGroupRing> = col_subs
            .iter()
            .map(|j| {
                let drows: Vec<&[BigInt]> = j.iter().map(|&t| dual.basis()[t].as_slice()).collect();
                w.pair(&drows, group)
            })
            .collect();
        for &g in &translates {
            let mut row = Vec::with_capacity(ncols);
            for v in &vals {
                // ε_1(h·g·v) = coefficient of (hg)^{-1} in v
                for h in 0..n {
                    let c = v.coeff(group.inv(group.mul(h, g)));
                    if !c.is_integer() {
                        return Err(Error::Precondition("ξ image is not integral".into()));
                    }
                    row.push(c.to_integer());
                }
            }
            rows.push(row);
        }
    }
    let h = linalg::hnf(&rows);
    let rank = h.len();
    let cokernel = linalg::smith_invariants(&h).into_iter().filter(|c| !c.is_one()).collect();
    let injective = (r <= 1).then_some(rank == rows.len());
    Ok(XiReport { degree: r, pairing: rows, rank, cokernel, injective })
}

/// ξ^r of Σ c·g·(b_I) as a wedge element, together with its bidual coordinates
/// Φ_J(x) over the r-subsets J of the HNF dual basis.
pub fn xi_map(lat: &GLattice, r: usize, x: &[(BigInt, usize, Vec<usize>)]) -> Result<(WedgeElt, Vec<RatGroupRing>)> {
    xi_map_with(lat, dual_lattice(lat)?.basis(), r, x)
}

pub fn xi_map_with(lat: &GLattice, dual_basis: &IMat, r: usize, x: &[(BigInt, usize, Vec<usize>)]) -> Result<(WedgeElt, Vec<RatGroupRing>)> {
    degree_guard(lat, r)?;
    let group = lat.group();
    let mut w = WedgeElt::new(r);
    for (c, g, idx) in x {
        if idx.len() != r || *g >= group.order() {
            return Err(Error::Precondition("malformed ∧^r term".into()));
        }
        let b = WedgeElt::basis_wedge(lat, idx, qi(c))?;
        for (a, v) in b.terms {
            w.push(a.shift(*g), v)?;
        }
    }
    let table = w.functional_table(dual_basis, group);
    let coords = subsets(lat.rank(), r).iter().map(|j| w.pair_from_table(&table, j, group)).collect();
    Ok((w, coords))
}

/// A lattice together with its dual, for repeated queries.
#[derive(Clone, Debug)]
pub struct Bidual {
    pub lattice: GLattice,
    pub dual: GLattice,
}

impl Bidual {
    pub fn new(lattice: GLattice) -> Result<Self> {
        let dual = dual_lattice(&lattice)?;
        Ok(Bidual { lattice, dual })
    }

    pub fn membership(&self, x: &WedgeElt) -> Result<MembershipReport> {
        bidual_membership_with(x, &self.lattice, self.dual.basis())
    }

    pub fn xi_map(&self, r: usize, x: &[(BigInt, usize, Vec<usize>)]) -> Result<(WedgeElt, Vec<RatGroupRing>)> {
        xi_map_with(&self.lattice, self.dual.basis(), r, x)
    }

    pub fn xi_analysis(&self, r: usize) -> Result<XiReport> {
        xi_analysis_with(&self.lattice, &self.dual, r)
    }
}

/// ∩^1 of a lattice with torsion: the torsion-free part, after confirming that
/// ξ^1 is an isomorphism onto the double dual.
pub fn rank_one_bidual(lat: &GLattice) -> Result<GLattice> {
    let tf = GLattice { torsion: Vec::new(), ..lat.clone() };
    let xi = xi_analysis(&tf, 1)?;
    if xi.injective != Some(true) || !xi.cokernel.is_empty() {
        return Err(Error::Precondition(format!("ξ^1 is not an isomorphism: {}", xi.to_json())));
    }
    Ok(tf)
}

/// Multiplicity of each complex character in ℚ ⊗ X, from traces of the action.
pub fn character_multiplicities(lat: &GLattice) -> Vec<usize> {
    let group = lat.group();
    let n = group.order();
    let traces: Vec<i64> = (0..n)
        .map(|g| {
            let a = &lat.action[g];
            (0..lat.rank()).map(|i| i64::try_from(&a[i][i]).expect("small trace")).sum()
        })
        .collect();
    group
        .characters()
        .iter()
        .map(|chi| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for g in 0..n {
                let ang = -2.0 * std::f64::consts::PI * chi.values[g] as f64 / chi.exponent as f64;
                re += traces[g] as f64 * ang.cos();
                im += traces[g] as f64 * ang.sin();
            }
            debug_assert!(im.abs() < 1e-6);
            (re / n as f64).round() as usize
        })
        .collect()
}

/// dim_ℚ ∧^r_{ℚ[G]}(ℚ ⊗ X) = Σ_χ C(n_χ, r).
pub fn wedge_dimension(lat: &GLattice, r: usize) -> usize {
    character_multiplicities(lat).into_iter().map(|m| binomial(m, r)).sum()
}
