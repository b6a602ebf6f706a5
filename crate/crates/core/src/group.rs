//! Finite abelian groups by multiplication table, and their character tables.

use std::fmt;
use std::sync::Arc;

use crate::arith::lcm;
use crate::field::AbelianField;

/// A finite abelian group with elements `0..n`, 0 the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    labels: Vec<String>,
    exponent: usize,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group(order={}, labels={:?})", self.order(), self.labels)
    }
}

impl Group {
    pub fn from_table(mul: Vec<Vec<usize>>, labels: Vec<String>) -> Arc<Self> {
        let n = mul.len();
        let inv = (0..n).map(|i| (0..n).find(|&j| mul[i][j] == 0).expect("group has inverses")).collect();
        let mut g = Group { mul, inv, labels, exponent: 1 };
        g.exponent = (0..n).fold(1, |acc, i| lcm(acc as u64, g.order_of(i) as u64) as usize);
        Arc::new(g)
    }

    /// Galois group of an abelian field, labelled by residue representatives.
    pub fn of_field(e: &AbelianField) -> Arc<Self> {
        let n = e.degree();
        let mul = (0..n).map(|i| (0..n).map(|j| e.mul_idx(i, j)).collect()).collect();
        let labels = e.reps().iter().map(|r| r.to_string()).collect();
        Self::from_table(mul, labels)
    }

    /// C_{n_1} × … × C_{n_k}, elements in mixed-radix order (first factor fastest).
    pub fn cyclic_product(orders: &[usize]) -> Arc<Self> {
        let n: usize = orders.iter().product();
        let digits = |mut x: usize| -> Vec<usize> {
            orders
                .iter()
                .map(|&o| {
                    let d = x % o;
                    x /= o;
                    d
                })
                .collect()
        };
        let undigits = |d: &[usize]| -> usize {
            let mut x = 0;
            for (i, &o) in orders.iter().enumerate().rev() {
                x = x * o + d[i];
            }
            x
        };
        let mul = (0..n)
            .map(|a| {
                let da = digits(a);
                (0..n)
                    .map(|b| {
                        let db = digits(b);
                        let s: Vec<usize> = da.iter().zip(db.iter()).zip(orders).map(|((x, y), o)| (x + y) % o).collect();
                        undigits(&s)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n).map(|a| format!("{:?}", digits(a))).collect();
        Self::from_table(mul, labels)
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv[a] } else { a };
        let mut acc = 0;
        for _ in 0..e.unsigned_abs() {
            acc = self.mul[acc][base];
        }
        acc
    }

    pub fn order_of(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Subgroup generated by `gens` (sorted).
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = std::collections::BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul[x][g];
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.order_of(a) == self.order())
    }

    /// All characters, as exponent tables `χ(a) = ζ_e^{t[a]}` with `e` the
    /// group exponent. Computed by brute force over homomorphisms from a
    /// greedy generating set; adequate for the small groups used here.
    pub fn characters(&self) -> Vec<CharTable> {
        let e = self.exponent;
        // greedy generating set with independent cyclic factors: pick
        // elements of maximal order not in the span so far
        let mut gens: Vec<usize> = Vec::new();
        let mut span = vec![0usize];
        while span.len() < self.order() {
            let g = (0..self.order())
                .filter(|a| !span.contains(a))
                .max_by_key(|&a| (self.order_of(a), std::cmp::Reverse(a)))
                .expect("nonempty");
            gens.push(g);
            let mut all = gens.clone();
            all.push(0);
            span = self.generated(&all);
        }
        // enumerate assignments of values to generators and keep the consistent ones
        let mut out = Vec::new();
        let choices: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let o = self.order_of(g);
                (0..o).map(|k| k * (e / o)).collect()
            })
            .collect();
        let mut idx = vec![0usize; gens.len()];
        loop {
            if let Some(t) = self.extend_character(&gens, &idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect::<Vec<_>>()) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
            // next index
            let mut k = 0;
            loop {
                if k == idx.len() {
                    out.sort_by(|a: &CharTable, b| a.values.cmp(&b.values));
                    return out;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn extend_character(&self, gens: &[usize], vals: &[usize]) -> Option<CharTable> {
        let e = self.exponent;
        let mut table: Vec<Option<usize>> = vec![None; self.order()];
        table[0] = Some(0);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            let vx = table[x].unwrap();
            for (&g, &v) in gens.iter().zip(vals) {
                let y = self.mul[x][g];
                let vy = (vx + v) % e;
                match table[y] {
                    None => {
                        table[y] = Some(vy);
                        frontier.push(y);
                    }
                    Some(w) if w != vy => return None,
                    _ => {}
                }
            }
        }
        Some(CharTable { exponent: e, values: table.into_iter().map(|v| v.unwrap()).collect() })
    }
}

/// A character given by its values `χ(a) = exp(2πi·values[a]/exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharTable {
    pub exponent: usize,
    pub values: Vec<usize>,
}

impl CharTable {
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn conj(&self) -> CharTable {
        CharTable {
            exponent: self.exponent,
            values: self.values.iter().map(|&v| (self.exponent - v) % self.exponent).collect(),
        }
    }

    pub fn order(&self) -> usize {
        let e = self.exponent as u64;
        self.values
            .iter()
            .fold(1u64, |acc, &v| lcm(acc, e / crate::arith::gcd(v as u64, e)))
            as usize
    }

    /// Trivial on the listed elements?
    pub fn trivial_on(&self, elems: &[usize]) -> bool {
        elems.iter().all(|&a| self.values[a] == 0)
    }

    /// Galois conjugate χ^t for t prime to the order.
    pub fn power(&self, t: usize) -> CharTable {
        CharTable { exponent: self.exponent, values: self.values.iter().map(|&v| v * t % self.exponent).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_characters() {
        let g = Group::cyclic_product(&[2, 3]);
        assert_eq!(g.order(), 6);
        assert!(g.is_cyclic());
        assert_eq!(g.characters().len(), 6);
        let k = Group::cyclic_product(&[2, 2]);
        assert!(!k.is_cyclic());
        let chars = k.characters();
        assert_eq!(chars.len(), 4);
        // orthogonality of rows
        for a in &chars {
            for b in &chars {
                let s: i64 = (0..4).map(|x| if (a.values[x] + b.conj().values[x]) % 2 == 0 { 1 } else { -1 }).sum();
                assert_eq!(s, if a == b { 4 } else { 0 });
            }
        }
    }

    #[test]
    fn field_group() {
        let e = AbelianField::cyclotomic(8);
        let g = Group::of_field(&e);
        assert_eq!(g.order(), 4);
        assert_eq!(g.exponent(), 2);
        assert_eq!(g.characters().len(), 4);
    }
}
