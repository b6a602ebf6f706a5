//! Fixed-point ball arithmetic.
//!
//! A [`Ball`] at precision `p` is the closed interval
//! `[(mid - rad) 2^-p, (mid + rad) 2^-p]` with integer `mid` and `rad >= 0`.
//! Every operation returns a ball that contains the exact result for all
//! inputs inside the operand balls; rounding slack is always added to the
//! radius, never dropped. Two balls must share the same precision to be
//! combined.
//!
//! The transcendental functions needed by the rest of the crate live on
//! [`Numerics`], which caches π, log 2 and Bernoulli numbers for one working
//! precision.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Extra bits carried on top of the user-requested precision.
pub const GUARD_BITS: u32 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

/// floor(x / 2^s)
fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    x.div_floor(&pow2(s))
}

/// ceil(x / 2^s) for x >= 0
fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    let d = pow2(s);
    (x + &d - BigInt::one()).div_floor(&d)
}

/// nearest integer to n / d, d > 0
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball { mid: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Ball { mid: n.into() << prec as usize, rad: BigInt::zero(), prec }
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let n = r.numer() << prec as usize;
        let (q, rem) = n.div_mod_floor(r.denom());
        if rem.is_zero() {
            Ball { mid: q, rad: BigInt::zero(), prec }
        } else {
            Ball { mid: round_div(&n, r.denom()), rad: BigInt::one(), prec }
        }
    }

    pub fn from_i64_ratio(n: i64, d: i64, prec: u32) -> Self {
        Self::from_ratio(&BigRational::new(BigInt::from(n), BigInt::from(d)), prec)
    }

    /// Build from raw parts (`mid ± rad` in units of 2^-prec).
    pub fn from_parts(mid: BigInt, rad: BigInt, prec: u32) -> Self {
        assert!(!rad.is_negative());
        Ball { mid, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn mid_raw(&self) -> &BigInt {
        &self.mid
    }
    pub fn rad_raw(&self) -> &BigInt {
        &self.rad
    }

    pub fn with_extra_rad(mut self, extra: &BigInt) -> Self {
        self.rad += extra;
        self
    }

    /// Widen the radius by `r` (exact rational, >= 0), rounding up.
    pub fn widen(mut self, r: &BigRational) -> Self {
        let n = r.numer().abs() << self.prec as usize;
        self.rad += ceil_div(&n, r.denom());
        self
    }

    fn check(&self, other: &Ball) {
        assert_eq!(self.prec, other.prec, "ball precision mismatch");
    }

    pub fn add(&self, o: &Ball) -> Ball {
        self.check(o);
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        self.check(o);
        Ball { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        self.check(o);
        let p = self.prec;
        let prod = &self.mid * &o.mid;
        let exact_mid = prod.is_multiple_of(&pow2(p));
        let mid = shr_floor(&(prod + pow2(p) / 2), p);
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        let mut rad = shr_ceil(&err, p);
        if !exact_mid {
            rad += 1;
        }
        Ball { mid, rad, prec: p }
    }

    pub fn mul_int(&self, k: &BigInt) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn mul_ratio(&self, r: &BigRational) -> Ball {
        self.mul_int(r.numer()).div_int(r.denom())
    }

    pub fn div_int(&self, k: &BigInt) -> Ball {
        assert!(!k.is_zero());
        let ka = k.abs();
        let sign_mid = if k.is_negative() { -&self.mid } else { self.mid.clone() };
        let (q, r) = sign_mid.div_mod_floor(&ka);
        let (mid, slack) = if r.is_zero() { (q, 0) } else { (round_div(&sign_mid, &ka), 1) };
        let rad = ceil_div(&self.rad, &ka) + slack;
        Ball { mid, rad, prec: self.prec }
    }

    pub fn div(&self, o: &Ball) -> Result<Ball> {
        self.check(o);
        let b = o.mid.abs();
        if b <= o.rad {
            return Err(Error::Precision("division by a ball containing zero".into()));
        }
        let p = self.prec;
        let num = &self.mid << p as usize;
        let mid = if o.mid.is_negative() {
            round_div(&-num, &b)
        } else {
            round_div(&num, &b)
        };
        let err_num = (self.mid.abs() * &o.rad + &b * &self.rad) << p as usize;
        let err_den = &b * (&b - &o.rad);
        let rad = ceil_div(&err_num, &err_den) + 1;
        Ok(Ball { mid, rad, prec: p })
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Certified strictly positive.
    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, pow2(self.prec))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, pow2(self.prec))
    }

    pub fn mid_rational(&self) -> BigRational {
        BigRational::new(self.mid.clone(), pow2(self.prec))
    }

    pub fn rad_rational(&self) -> BigRational {
        BigRational::new(self.rad.clone(), pow2(self.prec))
    }

    /// Upper bound for |x|.
    pub fn abs_upper(&self) -> BigRational {
        BigRational::new(self.mid.abs() + &self.rad, pow2(self.prec))
    }

    /// Lower bound for |x| (zero if the ball contains zero).
    pub fn abs_lower(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else {
            BigRational::new(self.mid.abs() - &self.rad, pow2(self.prec))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad_rational().to_f64().unwrap_or(f64::INFINITY)
    }

    /// Does the ball certify `|x - r| <= tol`?
    pub fn within(&self, r: &BigRational, tol: &BigRational) -> bool {
        let lo = self.lower() - r;
        let hi = self.upper() - r;
        lo.abs() <= *tol && hi.abs() <= *tol
    }

    /// Relative error bound `rad / (|mid| - rad) <= 2^{1-bits}`.
    pub fn relative_error_within(&self, bits: u32) -> bool {
        if self.rad.is_zero() {
            return true;
        }
        let lo = self.mid.abs() - &self.rad;
        if !lo.is_positive() {
            return false;
        }
        (&self.rad << (bits as usize)) <= (lo << 1usize)
    }

    /// Round to a lower working precision (radius grows by rounding slack).
    pub fn round_to(&self, prec: u32) -> Ball {
        if prec >= self.prec {
            let s = (prec - self.prec) as usize;
            return Ball { mid: &self.mid << s, rad: &self.rad << s, prec };
        }
        let s = self.prec - prec;
        let mid = shr_floor(&(&self.mid + pow2(s) / 2), s);
        let rad = shr_ceil(&self.rad, s) + 1;
        Ball { mid, rad, prec }
    }

    /// Endpoints as exact hexadecimal floats (`-0x1fp-4` style).
    pub fn hex_endpoints(&self) -> (String, String) {
        (hex_dyadic(&(&self.mid - &self.rad), self.prec), hex_dyadic(&(&self.mid + &self.rad), self.prec))
    }

    pub fn from_hex_endpoints(lo: &str, hi: &str) -> Result<Ball> {
        let (l, pl) = parse_hex_dyadic(lo)?;
        let (h, ph) = parse_hex_dyadic(hi)?;
        if pl != ph {
            return Err(Error::Parse("hex endpoints use different exponents".into()));
        }
        if h < l {
            return Err(Error::Parse("hex endpoints out of order".into()));
        }
        // mid = (l + h)/2 may be a half-integer; widen by one unit then
        let sum = &l + &h;
        let mid = sum.div_floor(&BigInt::from(2));
        let rad = &h - &mid;
        Ok(Ball { mid, rad, prec: pl })
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.20e} ± {:.3e}", self.to_f64(), self.rad_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn hex_dyadic(n: &BigInt, prec: u32) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    format!("{sign}0x{}p-{prec}", n.abs().to_str_radix(16))
}

pub fn parse_hex_dyadic(s: &str) -> Result<(BigInt, u32)> {
    let err = || Error::Parse(format!("bad hex float {s:?}"));
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(err)?;
    let (digits, exp) = rest.split_once("p-").ok_or_else(err)?;
    let n = BigInt::parse_bytes(digits.as_bytes(), 16).ok_or_else(err)?;
    let p: u32 = exp.parse().map_err(|_| err())?;
    Ok((if neg { -n } else { n }, p))
}

/// Complex ball (rectangular).
#[derive(Clone, PartialEq, Eq)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl fmt::Debug for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + i({:?})", self.re, self.im)
    }
}

impl CBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        CBall { re, im }
    }
    pub fn real(re: Ball) -> Self {
        let p = re.prec;
        CBall { re, im: Ball::zero(p) }
    }
    pub fn zero(prec: u32) -> Self {
        CBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }
    pub fn one(prec: u32) -> Self {
        CBall::real(Ball::from_int(1, prec))
    }
    pub fn prec(&self) -> u32 {
        self.re.prec
    }
    pub fn add(&self, o: &CBall) -> CBall {
        CBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    pub fn sub(&self, o: &CBall) -> CBall {
        CBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    pub fn neg(&self) -> CBall {
        CBall { re: self.re.neg(), im: self.im.neg() }
    }
    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.neg() }
    }
    pub fn mul(&self, o: &CBall) -> CBall {
        CBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    pub fn scale(&self, b: &Ball) -> CBall {
        CBall { re: self.re.mul(b), im: self.im.mul(b) }
    }
    pub fn mul_int(&self, k: &BigInt) -> CBall {
        CBall { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }
    pub fn div_int(&self, k: &BigInt) -> CBall {
        CBall { re: self.re.div_int(k), im: self.im.div_int(k) }
    }
    pub fn div(&self, o: &CBall) -> Result<CBall> {
        let d = o.abs2();
        let n = self.mul(&o.conj());
        Ok(CBall { re: n.re.div(&d)?, im: n.im.div(&d)? })
    }
    /// |z|^2
    pub fn abs2(&self) -> Ball {
        self.re.sqr().add(&self.im.sqr())
    }
    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
    /// Lower bound of |z|.
    pub fn abs_lower(&self) -> BigRational {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        if a > b {
            a
        } else {
            b
        }
    }
    /// Upper bound of |z| (L1 bound, cheap and rigorous).
    pub fn abs_upper(&self) -> BigRational {
        self.re.abs_upper() + self.im.abs_upper()
    }
    pub fn relative_error_within(&self, bits: u32) -> bool {
        let err = self.re.rad_rational() + self.im.rad_rational();
        if err.is_zero() {
            return true;
        }
        let lo = self.abs_lower() - &err;
        if !lo.is_positive() {
            return false;
        }
        err * BigRational::from_integer(pow2(bits)) <= lo * BigRational::from_integer(BigInt::from(2))
    }
    pub fn round_to(&self, prec: u32) -> CBall {
        CBall { re: self.re.round_to(prec), im: self.im.round_to(prec) }
    }
}

/// Cached constants and elementary functions at one working precision.
pub struct Numerics {
    prec: u32,
    pi: Ball,
    ln2: Ball,
    half_log_2pi: Ball,
    bernoulli: Vec<BigRational>,
}

impl fmt::Debug for Numerics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Numerics").field("prec", &self.prec).finish()
    }
}

impl Numerics {
    /// Working precision is `user_bits + GUARD_BITS`.
    pub fn new(user_bits: u32) -> Self {
        Self::with_working_precision(user_bits + GUARD_BITS)
    }

    pub fn with_working_precision(prec: u32) -> Self {
        let pi = machin_pi(prec);
        let ln2 = atanh_inv(3, prec).mul_int(&BigInt::from(2));
        let mut n = Numerics { prec, pi, ln2, half_log_2pi: Ball::zero(prec), bernoulli: Vec::new() };
        let two_pi = n.pi.mul_int(&BigInt::from(2));
        n.half_log_2pi = n.log(&two_pi).expect("2π > 0").div_int(&BigInt::from(2));
        n
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn pi(&self) -> Ball {
        self.pi.clone()
    }

    pub fn ln2(&self) -> Ball {
        self.ln2.clone()
    }

    pub fn int(&self, n: i64) -> Ball {
        Ball::from_int(n, self.prec)
    }

    pub fn ratio(&self, r: &BigRational) -> Ball {
        Ball::from_ratio(r, self.prec)
    }

    /// Natural logarithm of an exact positive rational.
    pub fn log_ratio(&self, r: &BigRational) -> Result<Ball> {
        if !r.is_positive() {
            return Err(Error::Precision(format!("log of non-positive value {r}")));
        }
        if r.is_one() {
            return Ok(Ball::zero(self.prec));
        }
        // r = 2^k y with y in [2/3, 4/3)
        let num_bits = r.numer().bits() as i64;
        let den_bits = r.denom().bits() as i64;
        let mut k = num_bits - den_bits;
        let scale = |k: i64| -> BigRational {
            if k >= 0 {
                r / BigRational::from_integer(pow2(k as u32))
            } else {
                r * BigRational::from_integer(pow2((-k) as u32))
            }
        };
        let lo = BigRational::new(BigInt::from(2), BigInt::from(3));
        let hi = BigRational::new(BigInt::from(4), BigInt::from(3));
        let mut y = scale(k);
        while y >= hi {
            k += 1;
            y = scale(k);
        }
        while y < lo {
            k -= 1;
            y = scale(k);
        }
        let z = (&y - BigRational::one()) / (&y + BigRational::one());
        let s = atanh_series(&z, self.prec);
        Ok(self.ln2.mul_int(&BigInt::from(k)).add(&s.mul_int(&BigInt::from(2))))
    }

    /// Natural logarithm of a certified-positive ball.
    pub fn log(&self, x: &Ball) -> Result<Ball> {
        if !x.is_positive() {
            return Err(Error::Precision("log argument not certified positive".into()));
        }
        let mid = x.mid_rational();
        let base = self.log_ratio(&mid)?;
        if x.rad.is_zero() {
            return Ok(base);
        }
        // |log x - log mid| <= rad / (mid - rad)
        let bound = x.rad_rational() / x.lower();
        Ok(base.widen(&bound))
    }

    /// (cos, sin) of 2π·k/m.
    pub fn cos_sin_2pi(&self, k: i64, m: u64) -> (Ball, Ball) {
        let m = m as i64;
        let mut k = k.rem_euclid(m);
        // exact special angles keep embeddings of rationals exact
        if k == 0 {
            return (self.int(1), self.int(0));
        }
        if 2 * k == m {
            return (self.int(-1), self.int(0));
        }
        if 4 * k == m {
            return (self.int(0), self.int(1));
        }
        if 4 * k == 3 * m {
            return (self.int(0), self.int(-1));
        }
        // reduce to t = k/m in (-1/2, 1/2]
        if 2 * k > m {
            k -= m;
        }
        let theta = self.pi.mul_int(&BigInt::from(2 * k)).div_int(&BigInt::from(m));
        (cos_series(&theta), sin_series(&theta))
    }

    pub fn root_of_unity(&self, k: i64, m: u64) -> CBall {
        let (c, s) = self.cos_sin_2pi(k, m);
        CBall::new(c, s)
    }

    /// log Γ(x) for an exact rational x > 0.
    pub fn log_gamma(&mut self, x: &BigRational) -> Result<Ball> {
        if !x.is_positive() {
            return Err(Error::Precision("log-gamma needs a positive argument".into()));
        }
        let zmin = BigRational::from_integer(BigInt::from(self.prec / 4 + 10));
        // shift: Γ(x) = Γ(x + n) / ∏_{k<n} (x + k)
        let mut shift_prod = BigRational::one();
        let mut z = x.clone();
        while z < zmin {
            shift_prod *= &z;
            z += BigRational::one();
        }
        let stirling = self.stirling(&z)?;
        let corr = self.log_ratio(&shift_prod)?;
        Ok(stirling.sub(&corr))
    }

    fn stirling(&mut self, z: &BigRational) -> Result<Ball> {
        let p = self.prec;
        let tol = BigRational::new(BigInt::one(), pow2(p + 4));
        // (z - 1/2) log z - z + 1/2 log 2π
        let logz = self.log_ratio(z)?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut acc = logz.mul_ratio(&(z - &half)).sub(&self.ratio(z)).add(&self.half_log_2pi);
        let mut k = 1usize;
        loop {
            self.ensure_bernoulli(2 * k + 2);
            let term = stirling_term(&self.bernoulli[2 * k], k, z);
            acc = acc.add(&Ball::from_ratio(&term, p));
            let next = stirling_term(&self.bernoulli[2 * k + 2], k + 1, z).abs();
            if next < tol {
                // remainder bounded by the first omitted term for real z > 0
                acc = acc.widen(&next);
                return Ok(acc);
            }
            k += 1;
            if k > 4 * p as usize {
                return Err(Error::Precision("Stirling series did not converge".into()));
            }
        }
    }

    fn ensure_bernoulli(&mut self, n: usize) {
        if self.bernoulli.len() > n {
            return;
        }
        self.bernoulli = bernoulli_numbers(n.max(2 * self.bernoulli.len()).max(64));
    }
}

fn stirling_term(b2k: &BigRational, k: usize, z: &BigRational) -> BigRational {
    let denom = BigInt::from((2 * k) * (2 * k - 1));
    let zp = num_traits::pow(z.clone(), 2 * k - 1);
    b2k / (BigRational::from_integer(denom) * zp)
}

/// B_0..=B_n (with B_1 = -1/2).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    // binomial row C(m+1, k)
    for m in 1..=n {
        let mut s = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate().take(m) {
            s += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Σ z^{2j+1}/(2j+1) for |z| <= 1/5, with a rigorous tail bound.
/// Smallest multiple of 2^-bits that is >= x, for x >= 0.
fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.ceil().to_integer(), pow2(bits))
}

fn atanh_series(z: &BigRational, prec: u32) -> Ball {
    if z.is_zero() {
        return Ball::zero(prec);
    }
    let zb = Ball::from_ratio(z, prec);
    let z2 = zb.sqr();
    let mut pow = zb.clone();
    let mut acc = Ball::zero(prec);
    let za = round_up(&z.abs(), prec + 16);
    let z2r = round_up(&(&za * &za), prec + 16);
    let mut pow_r = za.clone(); // |z|^{2j+1}
    let tol = BigRational::new(BigInt::one(), pow2(prec + 4));
    let mut j: i64 = 0;
    loop {
        acc = acc.add(&pow.div_int(&BigInt::from(2 * j + 1)));
        pow = pow.mul(&z2);
        pow_r = round_up(&(&pow_r * &z2r), prec + 16);
        j += 1;
        if pow_r < tol {
            // tail <= |z|^{2j+1} / (1 - z^2)
            let tail = &pow_r / (BigRational::one() - &z2r);
            return acc.widen(&tail);
        }
    }
}

/// atanh(1/n) for integer n >= 2.
fn atanh_inv(n: i64, prec: u32) -> Ball {
    atanh_series_big(&BigRational::new(BigInt::one(), BigInt::from(n)), prec)
}

fn atanh_series_big(z: &BigRational, prec: u32) -> Ball {
    // same as atanh_series but allows |z| up to 1/2
    let zb = Ball::from_ratio(z, prec);
    let z2 = zb.sqr();
    let mut pow = zb;
    let mut acc = Ball::zero(prec);
    let za = round_up(&z.abs(), prec + 16);
    let z2r = round_up(&(&za * &za), prec + 16);
    let mut pow_r = za;
    let tol = BigRational::new(BigInt::one(), pow2(prec + 4));
    let mut j: i64 = 0;
    loop {
        acc = acc.add(&pow.div_int(&BigInt::from(2 * j + 1)));
        pow = pow.mul(&z2);
        pow_r = round_up(&(&pow_r * &z2r), prec + 16);
        j += 1;
        if pow_r < tol {
            let tail = &pow_r / (BigRational::one() - &z2r);
            return acc.widen(&tail);
        }
    }
}

/// atan(1/n) by its alternating series.
fn atan_inv(n: i64, prec: u32) -> Ball {
    let zb = Ball::from_i64_ratio(1, n, prec);
    let z2 = zb.sqr();
    let mut pow = zb;
    let mut acc = Ball::zero(prec);
    let nn = BigInt::from(n);
    let mut pow_r = BigRational::new(BigInt::one(), nn.clone());
    let z2r = BigRational::new(BigInt::one(), &nn * &nn);
    let tol = BigRational::new(BigInt::one(), pow2(prec + 4));
    let mut j: i64 = 0;
    loop {
        let term = pow.div_int(&BigInt::from(2 * j + 1));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        pow = pow.mul(&z2);
        pow_r = &pow_r * &z2r;
        j += 1;
        if pow_r < tol {
            return acc.widen(&pow_r);
        }
    }
}

fn machin_pi(prec: u32) -> Ball {
    let a = atan_inv(5, prec).mul_int(&BigInt::from(16));
    let b = atan_inv(239, prec).mul_int(&BigInt::from(4));
    a.sub(&b)
}

fn taylor_trig(theta: &Ball, start_with_one: bool) -> Ball {
    let p = theta.prec;
    let t2 = theta.sqr();
    let mut term = if start_with_one { Ball::from_int(1, p) } else { theta.clone() };
    let th_up = round_up(&theta.abs_upper(), p + 16);
    let th2_up = round_up(&(&th_up * &th_up), p + 16);
    // exact bound on |θ|^j / j! for the current term
    let mut bound = if start_with_one { BigRational::one() } else { th_up.clone() };
    let mut acc = Ball::zero(p);
    let mut j: i64 = if start_with_one { 0 } else { 1 };
    let tol = BigRational::new(BigInt::one(), pow2(p + 4));
    let mut sign_pos = true;
    loop {
        acc = if sign_pos { acc.add(&term) } else { acc.sub(&term) };
        sign_pos = !sign_pos;
        let d = BigInt::from((j + 1) * (j + 2));
        term = term.mul(&t2).div_int(&d);
        bound = round_up(&(&bound * &th2_up / BigRational::from_integer(d)), p + 16);
        j += 2;
        if j > 6 && bound < tol {
            // terms now decrease at least geometrically with ratio < 1/2
            let tail = bound * BigRational::from_integer(BigInt::from(2));
            return acc.widen(&tail);
        }
    }
}

fn cos_series(theta: &Ball) -> Ball {
    taylor_trig(theta, true)
}

fn sin_series(theta: &Ball) -> Ball {
    taylor_trig(theta, false)
}

/// Sign of a ball when certified.
pub fn certified_sign(b: &Ball) -> Option<Sign> {
    if b.is_positive() {
        Some(Sign::Plus)
    } else if b.is_negative() {
        Some(Sign::Minus)
    } else if b.is_exact() && b.mid.is_zero() {
        Some(Sign::NoSign)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: &Ball, v: f64, tol: f64) -> bool {
        (b.to_f64() - v).abs() < tol
    }

    #[test]
    fn constants() {
        let n = Numerics::new(128);
        assert!(close(&n.pi(), std::f64::consts::PI, 1e-15));
        assert!(close(&n.ln2(), std::f64::consts::LN_2, 1e-15));
        assert!(n.pi().rad_f64() < 1e-50);
        // π to 40 digits
        let pi40 = BigRational::new(
            BigInt::parse_bytes(b"31415926535897932384626433832795028841971", 10).unwrap(),
            BigInt::from(10).pow(40),
        );
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(39));
        assert!(n.pi().within(&pi40, &tol));
    }

    #[test]
    fn logs_and_trig() {
        let n = Numerics::new(128);
        let l10 = n.log_ratio(&BigRational::from_integer(BigInt::from(10))).unwrap();
        assert!(close(&l10, 10f64.ln(), 1e-14));
        let (c, s) = n.cos_sin_2pi(1, 5);
        assert!(close(&c, (2.0 * std::f64::consts::PI / 5.0).cos(), 1e-15));
        assert!(close(&s, (2.0 * std::f64::consts::PI / 5.0).sin(), 1e-15));
        // cos^2 + sin^2 = 1 certified
        let one = c.sqr().add(&s.sqr());
        let tol = BigRational::new(BigInt::one(), pow2(150));
        assert!(one.within(&BigRational::one(), &tol));
    }

    #[test]
    fn log_gamma_values() {
        let mut n = Numerics::new(128);
        // log Γ(1/2) = log √π
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let lg = n.log_gamma(&half).unwrap();
        let want = n.log(&n.pi()).unwrap().div_int(&BigInt::from(2));
        let diff = lg.sub(&want);
        assert!(diff.abs_upper() < BigRational::new(BigInt::one(), pow2(150)));
        // log Γ(1) = 0
        let z = n.log_gamma(&BigRational::one()).unwrap();
        assert!(z.abs_upper() < BigRational::new(BigInt::one(), pow2(150)));
        // log Γ(1/3) ≈ 0.98542064692776706918
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(close(&n.log_gamma(&third).unwrap(), 0.985_420_646_927_767, 1e-14));
    }

    #[test]
    fn hex_round_trip() {
        let n = Numerics::new(64);
        let (lo, hi) = n.pi().hex_endpoints();
        let b = Ball::from_hex_endpoints(&lo, &hi).unwrap();
        assert!(b.lower() <= n.pi().lower() && b.upper() >= n.pi().upper());
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(b[2], BigRational::new(BigInt::from(1), BigInt::from(6)));
        assert_eq!(b[4], BigRational::new(BigInt::from(-1), BigInt::from(30)));
        assert_eq!(b[8], BigRational::new(BigInt::from(-1), BigInt::from(30)));
        assert!(b[7].is_zero());
    }
}
