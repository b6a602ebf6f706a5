//! Dirichlet characters with a deterministic choice of generators.
//!
//! `(ℤ/f)^×` is generated by one element per odd prime power (its least
//! primitive root, lifted by CRT to be 1 at the other prime powers) and, at
//! `2^a`, by `-1` (a >= 2) and `5` (a >= 3). A character is the list of its
//! exponents on those generators, each modulo the generator order.

use std::fmt;

use num_rational::Ratio;
use serde_json::{json, Value};

use crate::arith::{self, crt, factor, gcd, lcm, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::field::AbelianField;
use crate::group::CharTable;

/// Deterministic generators of (ℤ/f)^× with their orders.
pub fn unit_generators(f: u64) -> Vec<(u64, u64)> {
    let fs = factor(f);
    let mut out = Vec::new();
    for (i, &(p, e)) in fs.iter().enumerate() {
        let pe = p.pow(e);
        let rest: u64 = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &(q, k))| q.pow(k)).product();
        let lift = |g: u64| -> u64 {
            if rest == 1 {
                g % pe
            } else {
                crt(&[(g % pe, pe), (1, rest)]).0
            }
        };
        if p == 2 {
            if e >= 2 {
                out.push((lift(pe - 1), 2));
            }
            if e >= 3 {
                out.push((lift(5), 1 << (e - 2)));
            }
        } else {
            let g = arith::primitive_root_prime_power(p, e);
            out.push((lift(g), (p - 1) * p.pow(e - 1)));
        }
    }
    out
}

/// Discrete logs of every unit mod f with respect to [`unit_generators`].
#[derive(Clone, Debug)]
pub struct UnitLog {
    f: u64,
    gens: Vec<(u64, u64)>,
    logs: Vec<Option<Vec<u64>>>,
}

impl UnitLog {
    pub fn new(f: u64) -> Self {
        let gens = unit_generators(f);
        let mut logs: Vec<Option<Vec<u64>>> = vec![None; f as usize];
        // walk all exponent vectors
        let total: u64 = gens.iter().map(|g| g.1).product();
        for mut code in 0..total {
            let mut v = Vec::with_capacity(gens.len());
            let mut x = 1 % f;
            for &(g, o) in &gens {
                let k = code % o;
                code /= o;
                v.push(k);
                x = mul_mod(x, pow_mod(g, k, f), f);
            }
            logs[x as usize] = Some(v);
        }
        UnitLog { f, gens, logs }
    }

    pub fn modulus(&self) -> u64 {
        self.f
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn log(&self, a: i64) -> Option<&[u64]> {
        self.logs[a.rem_euclid(self.f as i64) as usize].as_deref()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletChar {
    modulus: u64,
    /// (exponent, generator order) per generator
    gen_values: Vec<(u64, u64)>,
}

impl fmt::Debug for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}{:?}", self.modulus, self.gen_values.iter().map(|v| v.0).collect::<Vec<_>>())
    }
}

impl DirichletChar {
    pub fn new(modulus: u64, exponents: &[u64]) -> Result<Self> {
        let gens = unit_generators(modulus);
        if gens.len() != exponents.len() {
            return Err(Error::Parse(format!(
                "modulus {modulus} has {} generators, got {} exponents",
                gens.len(),
                exponents.len()
            )));
        }
        Ok(DirichletChar {
            modulus,
            gen_values: exponents.iter().zip(gens).map(|(&e, (_, o))| (e % o, o)).collect(),
        })
    }

    pub fn trivial(modulus: u64) -> Self {
        let n = unit_generators(modulus).len();
        Self::new(modulus, &vec![0; n]).expect("arity matches")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.gen_values.iter().map(|v| v.0).collect()
    }

    pub fn order(&self) -> u64 {
        self.gen_values.iter().fold(1, |acc, &(e, o)| lcm(acc, o / gcd(e, o)))
    }

    pub fn is_trivial(&self) -> bool {
        self.gen_values.iter().all(|v| v.0 == 0)
    }

    /// χ(a) as a fraction `t` in [0, 1) with χ(a) = exp(2πi t); `None` if
    /// `gcd(a, f) > 1`.
    pub fn value_frac(&self, log: &UnitLog, a: i64) -> Option<Ratio<u64>> {
        debug_assert_eq!(log.modulus(), self.modulus);
        let l = log.log(a)?;
        let den = self.gen_values.iter().fold(1u64, |acc, &(_, o)| lcm(acc, o));
        let mut num = 0u64;
        for (k, &(e, o)) in l.iter().zip(&self.gen_values) {
            num = (num + k * e % o * (den / o)) % den;
        }
        Some(Ratio::new(num, den))
    }

    /// χ(a) as an exponent modulo `n` (`ord χ | n`): χ(a) = ζ_n^k.
    pub fn value_exp(&self, log: &UnitLog, a: i64, n: u64) -> Option<u64> {
        let t = self.value_frac(log, a)?;
        debug_assert_eq!(n % t.denom(), 0, "n must be a multiple of the character order");
        Some(t.numer() * (n / t.denom()) % n)
    }

    pub fn is_even(&self, log: &UnitLog) -> bool {
        self.modulus <= 2 || self.value_frac(log, -1).map(|t| *t.numer() == 0).unwrap_or(true)
    }

    pub fn conj(&self) -> Self {
        DirichletChar {
            modulus: self.modulus,
            gen_values: self.gen_values.iter().map(|&(e, o)| ((o - e) % o, o)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.modulus != o.modulus {
            return Err(Error::ModulusMismatch(self.modulus, o.modulus));
        }
        Ok(DirichletChar {
            modulus: self.modulus,
            gen_values: self.gen_values.iter().zip(&o.gen_values).map(|(&(a, n), &(b, _))| ((a + b) % n, n)).collect(),
        })
    }

    pub fn pow(&self, k: u64) -> Self {
        DirichletChar { modulus: self.modulus, gen_values: self.gen_values.iter().map(|&(e, o)| (e * k % o, o)).collect() }
    }

    /// Is χ trivial on every unit ≡ 1 mod d (d | f)?
    fn factors_through(&self, log: &UnitLog, d: u64) -> bool {
        arith::units(self.modulus)
            .into_iter()
            .filter(|&u| u % d == 1 % d)
            .all(|u| self.value_frac(log, u as i64).map(|t| *t.numer() == 0).unwrap_or(false))
    }

    pub fn conductor(&self) -> u64 {
        let log = UnitLog::new(self.modulus);
        arith::divisors(self.modulus)
            .into_iter()
            .find(|&d| self.factors_through(&log, d))
            .unwrap_or(self.modulus)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing χ.
    pub fn primitive(&self) -> Self {
        let log = UnitLog::new(self.modulus);
        let d = arith::divisors(self.modulus)
            .into_iter()
            .find(|&d| self.factors_through(&log, d))
            .unwrap_or(self.modulus);
        self.reduce_to(&log, d)
    }

    /// Character mod `d` through which χ factors (caller guarantees it does).
    fn reduce_to(&self, log: &UnitLog, d: u64) -> Self {
        if d == self.modulus {
            return self.clone();
        }
        let gens = unit_generators(d);
        let exps = gens
            .iter()
            .map(|&(g, o)| {
                let mut a = g;
                while gcd(a, self.modulus) != 1 {
                    a += d;
                }
                let t = self.value_frac(log, a as i64).expect("unit");
                // χ(g) = exp(2πi t) with t·o integral
                t.numer() * o / t.denom() % o
            })
            .collect::<Vec<_>>();
        DirichletChar::new(d, &exps).expect("arity")
    }

    /// Character mod `f'` (a multiple of f) induced from χ.
    pub fn extend_to(&self, fp: u64) -> Result<Self> {
        if !fp.is_multiple_of(self.modulus) {
            return Err(Error::ModulusMismatch(self.modulus, fp));
        }
        let log = UnitLog::new(self.modulus);
        let gens = unit_generators(fp);
        let exps = gens
            .iter()
            .map(|&(g, o)| {
                let t = self.value_frac(&log, g as i64).expect("unit");
                t.numer() * o / t.denom() % o
            })
            .collect::<Vec<_>>();
        DirichletChar::new(fp, &exps)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.modulus,
            "gen_values": self.gen_values.iter().map(|&(e, o)| json!([e, o])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let f = v
            .get("modulus")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("character needs \"modulus\"".into()))?;
        let gv = v
            .get("gen_values")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("character needs \"gen_values\"".into()))?;
        let gens = unit_generators(f);
        if gv.len() != gens.len() {
            return Err(Error::Parse(format!("modulus {f} needs {} generator values", gens.len())));
        }
        let mut exps = Vec::new();
        for (item, &(_, o)) in gv.iter().zip(&gens) {
            let pair = item.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Parse("gen value must be [exponent, order]".into()))?;
            let e = pair[0].as_u64().ok_or_else(|| Error::Parse("bad exponent".into()))?;
            let k = pair[1].as_u64().ok_or_else(|| Error::Parse("bad order".into()))?;
            if k == 0 || o % k != 0 {
                return Err(Error::Parse(format!("order {k} does not divide generator order {o}")));
            }
            exps.push(e % k * (o / k));
        }
        DirichletChar::new(f, &exps)
    }

    /// Parse a compact spec: `"<f>:<e1>,<e2>,…"` or `"<f>:quadratic"` (the
    /// unique real primitive character of conductor f, when it exists).
    pub fn parse(spec: &str) -> Result<Self> {
        let (f, rest) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("character spec {spec:?} needs f:exponents")))?;
        let f: u64 = f.trim().parse().map_err(|_| Error::Parse(format!("bad modulus in {spec:?}")))?;
        if f == 0 {
            return Err(Error::Parse("modulus must be positive".into()));
        }
        let rest = rest.trim();
        if rest == "quadratic" {
            let cands: Vec<DirichletChar> = all_characters(f).into_iter().filter(|c| c.order() == 2 && c.is_primitive()).collect();
            return match cands.len() {
                1 => Ok(cands[0].clone()),
                0 => Err(Error::Parse(format!("no primitive quadratic character of conductor {f}"))),
                _ => Err(Error::Parse(format!("several primitive quadratic characters mod {f}; give exponents"))),
            };
        }
        let exps = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent in {spec:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        DirichletChar::new(f, &exps)
    }

    /// Value table on the Galois group of `e`, if χ factors through it.
    pub fn table_on(&self, e: &AbelianField, exponent: usize) -> Option<CharTable> {
        let m = e.modulus();
        let chi = if self.modulus == m {
            self.clone()
        } else if m.is_multiple_of(self.modulus) {
            self.extend_to(m).ok()?
        } else {
            return None;
        };
        let log = UnitLog::new(m);
        if !e.subgroup().iter().all(|&h| chi.value_frac(&log, h as i64).map(|t| *t.numer() == 0).unwrap_or(false)) {
            return None;
        }
        let values = e
            .reps()
            .iter()
            .map(|&r| chi.value_exp(&log, r as i64, exponent as u64).map(|v| v as usize))
            .collect::<Option<Vec<_>>>()?;
        Some(CharTable { exponent, values })
    }
}

/// All Dirichlet characters mod f in lexicographic exponent order.
pub fn all_characters(f: u64) -> Vec<DirichletChar> {
    let gens = unit_generators(f);
    let total: u64 = gens.iter().map(|g| g.1).product();
    (0..total)
        .map(|mut code| {
            let exps: Vec<u64> = gens
                .iter()
                .map(|&(_, o)| {
                    let k = code % o;
                    code /= o;
                    k
                })
                .collect();
            DirichletChar::new(f, &exps).expect("arity")
        })
        .collect()
}

/// The characters of Gal(E/ℚ), as Dirichlet characters mod the modulus of E,
/// paired with their value tables on the group indices of E.
pub fn field_characters(e: &AbelianField) -> Vec<(DirichletChar, CharTable)> {
    let exp = e.exponent();
    all_characters(e.modulus())
        .into_iter()
        .filter_map(|c| {
            let t = c.table_on(e, exp)?;
            Some((c, t))
        })
        .collect()
}
