//! Arithmetic in 𝔽_{q^f}, deterministic primitive elements and discrete logs.
//!
//! Elements are coefficient vectors of length `f` in the basis `1, y, …, y^{f-1}`
//! modulo the least monic irreducible of degree `f`. Elements are totally
//! ordered by their index `Σ c_i q^i`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::arith::{factor, inv_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};

pub type FfElt = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    q: u64,
    f: u32,
    /// monic modulus, low degree first, length f + 1
    modulus: Vec<u64>,
    size: u64,
}

impl FiniteField {
    pub fn new(q: u64, f: u32) -> Result<Self> {
        if !crate::arith::is_prime(q) || f == 0 {
            return Err(Error::Precondition(format!("𝔽_{{{q}^{f}}} is not a field")));
        }
        let size = q
            .checked_pow(f)
            .filter(|s| *s < (1u64 << 40))
            .ok_or_else(|| Error::Budget(format!("𝔽_{{{q}^{f}}} is too large")))?;
        let modulus = least_irreducible(q, f);
        Ok(FiniteField { q, f, modulus, size })
    }

    pub fn characteristic(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FfElt {
        vec![0; self.f as usize]
    }

    pub fn one(&self) -> FfElt {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FfElt {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.q as i64) as u64;
        v
    }

    pub fn from_index(&self, mut k: u64) -> FfElt {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = k % self.q;
            k /= self.q;
        }
        v
    }

    pub fn index(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FfElt> {
        if coords.len() != self.f as usize || coords.iter().any(|&c| c >= self.q) {
            return Err(Error::Parse(format!("expected {} coordinates below {}", self.f, self.q)));
        }
        Ok(coords.to_vec())
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FfElt {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.q).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> FfElt {
        a.iter().zip(b).map(|(x, y)| (x + self.q - y) % self.q).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> FfElt {
        a.iter().map(|&x| mul_mod(x, c % self.q, self.q)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FfElt {
        let n = self.f as usize;
        let q = self.q;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, q)) % q;
            }
        }
        for k in (n..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..n {
                let t = mul_mod(c, self.modulus[i], q);
                prod[k - n + i] = (prod[k - n + i] + q - t) % q;
            }
        }
        prod.truncate(n);
        prod
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> FfElt {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &[u64]) -> Result<FfElt> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.size - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &[u64]) -> u64 {
        let mut n = self.size - 1;
        for (r, _) in factor(self.size - 1) {
            while n.is_multiple_of(r) && self.pow(a, n / r) == self.one() {
                n /= r;
            }
        }
        n
    }

    /// Least primitive element in the index order.
    pub fn primitive_element(&self) -> FfElt {
        let n = self.size - 1;
        let rs: Vec<u64> = factor(n).into_iter().map(|(r, _)| r).collect();
        let one = self.one();
        (1..self.size)
            .map(|k| self.from_index(k))
            .find(|g| rs.iter().all(|r| self.pow(g, n / r) != one))
            .expect("𝔽^× is cyclic")
    }

    /// Evaluate an integer polynomial (low degree first) at `x`.
    pub fn eval_poly(&self, coeffs: &[i64], x: &[u64]) -> FfElt {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_int(c));
        }
        acc
    }
}

fn poly_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // remainder of a by b over 𝔽_p, b with nonzero leading coefficient
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p).expect("nonzero");
    while r.len() > db {
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(c, bi, p)) % p;
        }
        r.pop();
    }
    trim_p(r)
}

fn trim_p(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_gcd_p(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let is_zero = |v: &[u64]| v.iter().all(|&c| c == 0);
    let (mut a, mut b) = (trim_p(a), trim_p(b));
    while !is_zero(&b) {
        let r = poly_mod_p(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^{p^k} mod g over 𝔽_p.
fn frobenius_power(g: &[u64], p: u64, k: u32) -> Vec<u64> {
    let n = g.len() - 1;
    let ff = FiniteField { q: p, f: n as u32, modulus: g.to_vec(), size: 0 };
    let mut x = vec![0u64; n];
    if n == 1 {
        x[0] = (p - g[0] % p) % p;
    } else {
        x[1] = 1;
    }
    for _ in 0..k {
        x = ff.pow(&x, p);
    }
    x
}

fn is_irreducible(g: &[u64], p: u64) -> bool {
    let n = (g.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    for k in 1..=n / 2 {
        let mut h = frobenius_power(g, p, k);
        // h - x
        h[1] = (h[1] + p - 1) % p;
        let gg = poly_gcd_p(g.to_vec(), h, p);
        if gg.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible polynomial of degree f over 𝔽_q (index order on
/// the non-leading coefficients).
pub fn least_irreducible(q: u64, f: u32) -> Vec<u64> {
    let n = f as usize;
    let mut k = 0u64;
    loop {
        let mut g = vec![0u64; n + 1];
        let mut t = k;
        for c in g.iter_mut().take(n) {
            *c = t % q;
            t /= q;
        }
        g[n] = 1;
        if (g[0] != 0 || n == 1)
            && is_irreducible(&g, q) {
                return g;
            }
        k += 1;
    }
}

/// Discrete logarithm by baby-step giant-step in a cyclic subgroup of 𝔽^×.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogTable {
    pub q: u64,
    pub f: u32,
    /// index of the base element
    pub base: u64,
    /// order of the base
    pub order: u64,
    /// sorted (element index, exponent) for exponents below `steps`
    baby: Vec<(u64, u64)>,
    steps: u64,
}

const DLOG_MAGIC: &[u8; 4] = b"EKDL";
pub const DLOG_FORMAT_VERSION: u32 = 1;

impl DlogTable {
    pub fn new(field: &FiniteField, base: &[u64], order: u64) -> Self {
        let steps = (order as f64).sqrt().ceil() as u64 + 1;
        let mut baby = Vec::with_capacity(steps as usize);
        let mut x = field.one();
        for j in 0..steps.min(order) {
            baby.push((field.index(&x), j));
            x = field.mul(&x, base);
        }
        baby.sort_unstable();
        DlogTable { q: field.q, f: field.f, base: field.index(base), order, baby, steps }
    }

    fn lookup(&self, key: u64) -> Option<u64> {
        self.baby.binary_search_by_key(&key, |e| e.0).ok().map(|i| self.baby[i].1)
    }

    /// `k` in `[0, order)` with base^k = a, or None if a is outside the subgroup.
    pub fn log(&self, field: &FiniteField, a: &[u64]) -> Option<u64> {
        if field.q != self.q || field.f != self.f || field.is_zero(a) {
            return None;
        }
        let base = field.from_index(self.base);
        let giant = field.inv(&field.pow(&base, self.steps)).ok()?;
        let mut y = a.to_vec();
        for i in 0..=self.order / self.steps {
            if let Some(j) = self.lookup(field.index(&y)) {
                let k = (i * self.steps + j) % self.order;
                if field.pow(&base, k) == a {
                    return Some(k);
                }
            }
            y = field.mul(&y, &giant);
        }
        None
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(DLOG_MAGIC)?;
        w.write_all(&DLOG_FORMAT_VERSION.to_le_bytes())?;
        for v in [self.q, self.f as u64, self.base, self.order, self.steps, self.baby.len() as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        for &(k, e) in &self.baby {
            w.write_all(&k.to_le_bytes())?;
            w.write_all(&e.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DLOG_MAGIC {
            return Err(Error::Parse("not a dlog table".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != DLOG_FORMAT_VERSION {
            return Err(Error::Parse(format!("dlog table version {version}, expected {DLOG_FORMAT_VERSION}")));
        }
        let mut next = || -> Result<u64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        };
        let (q, f, base, order, steps, len) = (next()?, next()?, next()?, next()?, next()?, next()?);
        let mut baby = Vec::with_capacity(len as usize);
        for _ in 0..len {
            baby.push((next()?, next()?));
        }
        if baby.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("dlog table entries out of order".into()));
        }
        Ok(DlogTable { q, f: f as u32, base, order, baby, steps })
    }

    /// Load from `dir` if a matching table is cached, else build and store it.
    pub fn cached(dir: &Path, field: &FiniteField, base: &[u64], order: u64) -> Result<Self> {
        let name = format!("dlog-v{}-{}-{}-{}-{}.bin", DLOG_FORMAT_VERSION, field.q, field.f, field.index(base), order);
        let path = dir.join(name);
        if let Ok(file) = std::fs::File::open(&path) {
            if let Ok(t) = Self::read_from(std::io::BufReader::new(file)) {
                return Ok(t);
            }
        }
        let t = Self::new(field, base, order);
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        {
            let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            t.write_to(&mut file)?;
            file.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(t)
    }
}

/// Brute-force discrete log, for tests and tiny fields.
pub fn dlog_naive(field: &FiniteField, base: &[u64], a: &[u64]) -> Option<u64> {
    let mut x = field.one();
    for k in 0..field.size() {
        if x == a {
            return Some(k);
        }
        x = field.mul(&x, base);
    }
    None
}

/// Least primitive root modulo a prime.
pub fn least_primitive_root(q: u64) -> u64 {
    let n = q - 1;
    let rs: Vec<u64> = factor(n).into_iter().map(|(r, _)| r).collect();
    (1..q).find(|&g| rs.iter().all(|r| pow_mod(g, n / r, q) != 1)).unwrap_or(1)
}

/// Cache of DLOG tables keyed by (q, f, base, order), built once per key.
#[derive(Default)]
pub struct DlogCache {
    tables: HashMap<(u64, u32, u64, u64), DlogTable>,
    dir: Option<std::path::PathBuf>,
}

impl DlogCache {
    pub fn new(dir: Option<std::path::PathBuf>) -> Self {
        DlogCache { tables: HashMap::new(), dir }
    }

    pub fn get(&mut self, field: &FiniteField, base: &[u64], order: u64) -> Result<&DlogTable> {
        let key = (field.q, field.f, field.index(base), order);
        if !self.tables.contains_key(&key) {
            let t = match &self.dir {
                Some(d) => DlogTable::cached(d, field, base, order)?,
                None => DlogTable::new(field, base, order),
            };
            self.tables.insert(key, t);
        }
        Ok(&self.tables[&key])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f11 = FiniteField::new(11, 1).unwrap();
        assert_eq!(f11.primitive_element(), vec![2]);
        assert_eq!(least_primitive_root(11), 2);
        let f9 = FiniteField::new(3, 2).unwrap();
        // x^2 + 1 is the least irreducible quadratic over 𝔽_3
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let g = f9.primitive_element();
        assert_eq!(f9.order(&g), 8);
        let a = f9.from_index(5);
        assert_eq!(f9.mul(&a, &f9.inv(&a).unwrap()), f9.one());
        let f8 = FiniteField::new(2, 3).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn bsgs_matches_naive() {
        for (q, f) in [(11, 1), (13, 2), (5, 3), (101, 1)] {
            let field = FiniteField::new(q, f).unwrap();
            let g = field.primitive_element();
            let t = DlogTable::new(&field, &g, field.size() - 1);
            for k in 1..field.size().min(200) {
                let a = field.from_index(k);
                assert_eq!(t.log(&field, &a), dlog_naive(&field, &g, &a), "q={q} f={f} k={k}");
            }
        }
    }

    #[test]
    fn table_round_trip() {
        let field = FiniteField::new(13, 2).unwrap();
        let g = field.primitive_element();
        let t = DlogTable::new(&field, &g, 168);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(DlogTable::read_from(&buf[..]).unwrap(), t);
        buf[4] = 9;
        assert!(DlogTable::read_from(&buf[..]).is_err());
    }
}
