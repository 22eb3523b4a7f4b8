//! Exact arithmetic in the quadratic field `Q(β)`, `β = (1 + √5) / 2`.
//!
//! Every element is stored as `(a + b·β) / d` with integers `a`, `b` and
//! `d > 0` sharing no common factor, so equality and hashing are
//! structural. Ordering is decided with integer arithmetic only.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// An element `(a + b·β) / d` of `Q(β)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QBeta {
    a: BigInt,
    b: BigInt,
    d: BigInt,
}

impl QBeta {
    /// Brings `(a + bβ)/d` to lowest terms with `d > 0`. Panics if `d == 0`.
    fn reduced(mut a: BigInt, mut b: BigInt, mut d: BigInt) -> Self {
        assert!(!d.is_zero(), "QBeta with zero denominator");
        if d.is_negative() {
            a = -a;
            b = -b;
            d = -d;
        }
        if !d.is_one() {
            let g = a.gcd(&b).gcd(&d);
            if !g.is_one() {
                a /= &g;
                b /= &g;
                d /= &g;
            }
        }
        QBeta { a, b, d }
    }

    pub fn new(a: BigRational, b: BigRational) -> Self {
        let d = a.denom().lcm(b.denom());
        let an = a.numer() * (&d / a.denom());
        let bn = b.numer() * (&d / b.denom());
        QBeta::reduced(an, bn, d)
    }

    /// `a + b·β` from integer coefficients.
    pub fn from_ints(a: i64, b: i64) -> Self {
        QBeta {
            a: a.into(),
            b: b.into(),
            d: BigInt::one(),
        }
    }

    /// The rational `num / den`.
    ///
    /// Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        QBeta::reduced(num.into(), BigInt::zero(), den.into())
    }

    pub fn integer(n: i64) -> Self {
        Self::from_ints(n, 0)
    }

    pub fn rational(r: BigRational) -> Self {
        let (n, d) = r.into_raw();
        QBeta::reduced(n, BigInt::zero(), d)
    }

    /// The golden ratio itself.
    pub fn beta() -> Self {
        Self::from_ints(0, 1)
    }

    /// `β^k` for any integer `k`; negative powers use `1/β = β - 1`.
    pub fn beta_pow(k: i32) -> Self {
        static SMALL: OnceLock<Vec<QBeta>> = OnceLock::new();
        let table = SMALL.get_or_init(|| {
            (-POW_CACHE..=POW_CACHE)
                .map(QBeta::beta_pow_uncached)
                .collect()
        });
        if k.abs() <= POW_CACHE {
            return table[(k + POW_CACHE) as usize].clone();
        }
        QBeta::beta_pow_uncached(k)
    }

    fn beta_pow_uncached(k: i32) -> Self {
        // β^k = F(k-1) + F(k)·β, extended to negative k by F(-n) = (-1)^(n+1) F(n).
        let (f_prev, f_cur) = fibonacci_pair(k);
        QBeta {
            a: f_prev,
            b: f_cur,
            d: BigInt::one(),
        }
    }

    /// Rational part `a/d`.
    pub fn a(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.d.clone())
    }

    /// Coefficient `b/d` of `β`.
    pub fn b(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.d.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a + b·(1 - β)`.
    pub fn conjugate(&self) -> Self {
        QBeta {
            a: &self.a + &self.b,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    /// Field norm `x · conj(x)`.
    pub fn norm(&self) -> BigRational {
        let n = &self.a * &self.a + &self.a * &self.b - &self.b * &self.b;
        BigRational::new(n, &self.d * &self.d)
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        // 1/x = conj(x)·d / (a² + ab - b²)
        let n = &self.a * &self.a + &self.a * &self.b - &self.b * &self.b;
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QBeta::reduced(
            (&self.a + &self.b) * &self.d,
            -&self.b * &self.d,
            n,
        ))
    }

    pub fn checked_div(&self, rhs: &QBeta) -> Result<Self, Error> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, k: i32) -> Result<Self, Error> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = QBeta::one();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiply by `β` without a general product.
    pub fn mul_beta(&self) -> Self {
        // (a + bβ)β = b + (a + b)β
        QBeta {
            a: self.b.clone(),
            b: &self.a + &self.b,
            d: self.d.clone(),
        }
    }

    /// Divide by `β`.
    pub fn div_beta(&self) -> Self {
        // (a + bβ)(β - 1) = (b - a) + aβ
        QBeta {
            a: &self.b - &self.a,
            b: self.a.clone(),
            d: self.d.clone(),
        }
    }

    /// Sign of the real number.
    pub fn signum(&self) -> Ordering {
        sign_of_combination(&self.a, &self.b)
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Writes the value as `(u + v√5) / w` with integers `u, v` and `w > 0`.
    fn sqrt5_form(&self) -> (BigInt, BigInt, BigInt) {
        // (a + bβ)/d = (2a + b + b√5) / 2d
        (
            BigInt::from(2) * &self.a + &self.b,
            self.b.clone(),
            BigInt::from(2) * &self.d,
        )
    }

    /// `floor(x · 2^bits)`, exact up to one unit in the last place.
    pub fn to_fixed(&self, bits: u32) -> BigInt {
        let (u, v, w) = self.sqrt5_form();
        let scale = BigInt::one() << bits;
        scaled_floor(&u, &v, &w, &scale)
    }

    /// Nearest `f64` (within a couple of ulps), computed without cancellation.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if let (Some(a), Some(b), Some(d)) = (self.a.to_i32(), self.b.to_i32(), self.d.to_i32()) {
            let (a, b) = (f64::from(a), f64::from(b));
            let sum = a + b * BETA_F64;
            // a few ulps unless a and bβ nearly cancel
            if 4.0 * sum.abs() >= a.abs() + b.abs() * BETA_F64 {
                return sum / f64::from(d);
            }
        }
        // Rough magnitude to choose a scale that keeps ~80 significant bits.
        let rough = (self.a.to_f64().unwrap_or(0.0) + self.b.to_f64().unwrap_or(0.0) * BETA_F64)
            / self.d.to_f64().unwrap_or(f64::INFINITY);
        let mag = if rough.is_finite() && rough != 0.0 {
            rough.abs().log2().floor() as i64
        } else {
            0
        };
        let mut shift = (80 - mag).max(0) as u32;
        loop {
            let m = self.to_fixed(shift);
            if m.bits() >= 70 || shift > 1 << 16 {
                return ldexp(m.to_f64().unwrap_or(0.0), -(shift as i64));
            }
            shift += 64;
        }
    }

    /// Approximation with `precision` significant bits; the returned `f64`
    /// is the best binary64 rounding when `precision >= 53`.
    pub fn to_float(&self, precision: u32) -> f64 {
        debug_assert!(precision >= 53);
        self.to_f64()
    }

    /// Decimal rendering truncated toward negative infinity to `digits`
    /// fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let (u, v, w) = self.sqrt5_form();
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let m = scaled_floor(&u, &v, &w, &scale);
        let neg = m.is_negative();
        let mag = m.abs().to_string();
        let digits = digits as usize;
        let (int_part, frac_part) = if mag.len() > digits {
            let split = mag.len() - digits;
            (mag[..split].to_string(), mag[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", mag, width = digits))
        };
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    pub fn min(self, other: QBeta) -> QBeta {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: QBeta) -> QBeta {
        if other > self {
            other
        } else {
            self
        }
    }
}

pub const BETA_F64: f64 = 1.618_033_988_749_895;

/// Powers `β^k`, `|k| ≤ POW_CACHE`, are computed once.
const POW_CACHE: i32 = 96;

fn ldexp(x: f64, exp: i64) -> f64 {
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

fn sign(n: &BigInt) -> Ordering {
    n.sign().cmp(&num_bigint::Sign::NoSign)
}

/// Sign of `a + bβ = (p + q√5)/2` with `p = 2a + b`, `q = b`.
fn sign_of_combination(a: &BigInt, b: &BigInt) -> Ordering {
    if let (Some(a), Some(b)) = (a.to_i64(), b.to_i64()) {
        if let Some(s) = small_sign(a, b) {
            return s;
        }
    }
    let p = BigInt::from(2) * a + b;
    let q = b;
    match (sign(&p), sign(q)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (sp, sq) if sp == sq => sp,
        (sp, sq) => {
            // |p| against |q|√5; bit lengths settle most cases
            let (bp, bq) = (p.bits(), q.bits());
            let p_wins = if bp >= bq + 3 {
                true
            } else if bq >= bp {
                false
            } else {
                let five_q2 = BigInt::from(5) * q * q;
                match (&p * &p).cmp(&five_q2) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => unreachable!("√5 is irrational"),
                }
            };
            if p_wins {
                sp
            } else {
                sq
            }
        }
    }
}

fn small_sign(a: i64, b: i64) -> Option<Ordering> {
    let p = 2 * i128::from(a) + i128::from(b);
    let q = i128::from(b);
    Some(match (p.cmp(&0), q.cmp(&0)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (sp, sq) if sp == sq => sp,
        (sp, sq) => match p.checked_mul(p)?.cmp(&q.checked_mul(q)?.checked_mul(5)?) {
            Ordering::Greater => sp,
            _ => sq,
        },
    })
}

/// `floor((u + v√5)·scale / w)` up to one unit.
fn scaled_floor(u: &BigInt, v: &BigInt, w: &BigInt, scale: &BigInt) -> BigInt {
    let us = u * scale;
    let vs = v * scale;
    // floor(|vs|·√5) = isqrt(5·vs²)
    let root = (BigInt::from(5) * &vs * &vs).sqrt();
    let num = if vs.is_negative() {
        // -|vs|√5 lies in (-(root+1), -root]
        us - root - 1
    } else {
        us + root
    };
    num.div_floor(w)
}

/// `(F(k-1), F(k))` for the Fibonacci numbers extended to negative indices.
fn fibonacci_pair(k: i32) -> (BigInt, BigInt) {
    if k >= 0 {
        let (mut f0, mut f1) = (BigInt::one(), BigInt::zero()); // F(-1), F(0)
        for _ in 0..k {
            let next = &f0 + &f1;
            f0 = std::mem::replace(&mut f1, next);
        }
        (f0, f1)
    } else {
        // F(n-1) = F(n+1) - F(n), walking downward from (F(-1), F(0)).
        let (mut f_prev, mut f_cur) = (BigInt::one(), BigInt::zero());
        for _ in 0..(-k) {
            let lower = &f_cur - &f_prev;
            f_cur = std::mem::replace(&mut f_prev, lower);
        }
        (f_prev, f_cur)
    }
}

/// `f64` estimate of `(a + bβ)/d` with a bound on its error, when all
/// three integers are exactly representable.
fn estimate(x: &QBeta) -> Option<(f64, f64)> {
    const LIMIT: i64 = 1 << 52;
    let small = |n: &BigInt| n.to_i64().filter(|v| v.abs() < LIMIT);
    let (a, b, d) = (small(&x.a)? as f64, small(&x.b)? as f64, small(&x.d)? as f64);
    let v = (a + b * BETA_F64) / d;
    // β_f64 is within 1.2e-16 of β; three roundings of relative size 2^-53
    let err = (a.abs() + b.abs() * 2.0) * 8.0 * f64::EPSILON / d;
    Some((v, err))
}

impl Ord for QBeta {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Some((x, ex)), Some((y, ey))) = (estimate(self), estimate(other)) {
            if (x - y).abs() > ex + ey {
                return x.partial_cmp(&y).expect("finite estimates");
            }
        }
        if self.d == other.d {
            if self.a == other.a && self.b == other.b {
                return Ordering::Equal;
            }
            return sign_of_combination(&(&self.a - &other.a), &(&self.b - &other.b));
        }
        let a = &self.a * &other.d - &other.a * &self.d;
        let b = &self.b * &other.d - &other.b * &self.d;
        sign_of_combination(&a, &b)
    }
}

impl PartialOrd for QBeta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for QBeta {
    fn default() -> Self {
        QBeta::zero()
    }
}

impl Zero for QBeta {
    fn zero() -> Self {
        QBeta::integer(0)
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QBeta {
    fn one() -> Self {
        QBeta::integer(1)
    }
}

impl From<i64> for QBeta {
    fn from(n: i64) -> Self {
        QBeta::integer(n)
    }
}

impl From<BigRational> for QBeta {
    fn from(r: BigRational) -> Self {
        QBeta::rational(r)
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident, $body:expr) => {
        impl<'a> $imp<&'a QBeta> for &'a QBeta {
            type Output = QBeta;
            fn $method(self, rhs: &'a QBeta) -> QBeta {
                let f: fn(&QBeta, &QBeta) -> QBeta = $body;
                f(self, rhs)
            }
        }
        impl $imp<QBeta> for QBeta {
            type Output = QBeta;
            fn $method(self, rhs: QBeta) -> QBeta {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a QBeta> for QBeta {
            type Output = QBeta;
            fn $method(self, rhs: &'a QBeta) -> QBeta {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<QBeta> for &'a QBeta {
            type Output = QBeta;
            fn $method(self, rhs: QBeta) -> QBeta {
                self.$method(&rhs)
            }
        }
    };
}

fn add_scaled(x: &QBeta, y: &QBeta, sub: bool) -> QBeta {
    let (ya, yb) = if sub { (-&y.a, -&y.b) } else { (y.a.clone(), y.b.clone()) };
    if x.d == y.d {
        return QBeta::reduced(&x.a + ya, &x.b + yb, x.d.clone());
    }
    QBeta::reduced(
        &x.a * &y.d + ya * &x.d,
        &x.b * &y.d + yb * &x.d,
        &x.d * &y.d,
    )
}

forward_binop!(Add, add, |x, y| add_scaled(x, y, false));
forward_binop!(Sub, sub, |x, y| add_scaled(x, y, true));
// (a + bβ)(c + eβ) = ac + be + (ae + bc + be)β, using β² = β + 1
forward_binop!(Mul, mul, |x, y| {
    let be = &x.b * &y.b;
    QBeta::reduced(
        &x.a * &y.a + &be,
        &x.a * &y.b + &x.b * &y.a + be,
        &x.d * &y.d,
    )
});
// Panics on a zero divisor, like the rational types it is built on.
forward_binop!(Div, div, |x, y| x
    .checked_div(y)
    .expect("QBeta division by zero"));

impl Neg for QBeta {
    type Output = QBeta;
    fn neg(self) -> QBeta {
        QBeta {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Neg for &QBeta {
    type Output = QBeta;
    fn neg(self) -> QBeta {
        QBeta {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }
}

impl AddAssign<&QBeta> for QBeta {
    fn add_assign(&mut self, rhs: &QBeta) {
        *self = add_scaled(self, rhs, false);
    }
}

impl AddAssign for QBeta {
    fn add_assign(&mut self, rhs: QBeta) {
        *self += &rhs;
    }
}

impl SubAssign<&QBeta> for QBeta {
    fn sub_assign(&mut self, rhs: &QBeta) {
        *self = add_scaled(self, rhs, true);
    }
}

impl MulAssign<&QBeta> for QBeta {
    fn mul_assign(&mut self, rhs: &QBeta) {
        *self = &*self * rhs;
    }
}

impl Sum for QBeta {
    fn sum<I: Iterator<Item = QBeta>>(iter: I) -> Self {
        iter.fold(QBeta::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a QBeta> for QBeta {
    fn sum<I: Iterator<Item = &'a QBeta>>(iter: I) -> Self {
        iter.fold(QBeta::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl Product for QBeta {
    fn product<I: Iterator<Item = QBeta>>(iter: I) -> Self {
        iter.fold(QBeta::one(), |acc, x| acc * x)
    }
}

impl fmt::Display for QBeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.a(), self.b());
        match (a.is_zero(), b.is_zero()) {
            (_, true) => write!(f, "{a}"),
            (true, false) => write!(f, "{}β", coeff(&b)),
            (false, false) => {
                if b.is_negative() {
                    write!(f, "{a} - {}β", coeff(&-b))
                } else {
                    write!(f, "{a} + {}β", coeff(&b))
                }
            }
        }
    }
}

fn coeff(r: &BigRational) -> String {
    if r.is_one() {
        String::new()
    } else if (-r).is_one() {
        "-".to_string()
    } else if r.is_integer() {
        r.to_string()
    } else {
        format!("({r})")
    }
}

impl fmt::Debug for QBeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QBeta({self})")
    }
}

/// Parses sums of terms such as `3/2`, `2beta - 3`, `beta^-3`, `1/2 + (1/2)β`.
///
/// A term is an optional rational coefficient, possibly in parentheses,
/// optionally followed by `b`, `beta` or `β` (joined by `*`, or by `/` to
/// divide) and an optional integer exponent `^k`.
impl FromStr for QBeta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let chars: Vec<char> = compact.chars().collect();
        let mut depth = 0i32;
        for i in 1..chars.len() {
            match chars[i] {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (chars[i] == '+' || chars[i] == '-') && !"^(".contains(chars[i - 1]) {
                terms.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(chars[start..].iter().collect::<String>());
        let mut total = QBeta::zero();
        for t in terms {
            total += parse_term(&t).ok_or_else(|| Error::Parse(s.to_string()))?;
        }
        Ok(total)
    }
}

fn parse_term(t: &str) -> Option<QBeta> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let symbol_at = body
        .char_indices()
        .find(|&(_, c)| c == 'b' || c == 'β')
        .map(|(i, _)| i);
    let value = match symbol_at {
        None => QBeta::rational(parse_rational(body)?),
        Some(i) => {
            let mut coef_str = &body[..i];
            let divide = coef_str.ends_with('/');
            coef_str = coef_str.trim_end_matches(['*', '/']);
            if let Some(inner) = coef_str.strip_prefix('(') {
                coef_str = inner.strip_suffix(')')?;
            }
            let coef = if coef_str.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef_str)?
            };
            let rest = &body[i..];
            let rest = rest
                .strip_prefix("beta")
                .or_else(|| rest.strip_prefix('β'))
                .or_else(|| rest.strip_prefix('b'))?;
            let exp = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')?.parse::<i32>().ok()?
            };
            let exp = if divide { -exp } else { exp };
            QBeta::rational(coef) * QBeta::beta_pow(exp)
        }
    };
    Some(if neg { -value } else { value })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Integers in serialized records: native integers when they fit in 64
/// bits, decimal strings otherwise.
enum IntRepr {
    Int(i64),
    Str(String),
}

impl IntRepr {
    fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Int(v),
            None => IntRepr::Str(n.to_string()),
        }
    }

    fn into_big(self) -> Result<BigInt, String> {
        match self {
            IntRepr::Int(v) => Ok(v.into()),
            IntRepr::Str(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

impl Serialize for IntRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            IntRepr::Int(v) => serializer.serialize_i64(*v),
            IntRepr::Str(s) => serializer.serialize_str(s),
        }
    }
}

impl<'de> Deserialize<'de> for IntRepr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = IntRepr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E>(self, v: i64) -> Result<IntRepr, E> {
                Ok(IntRepr::Int(v))
            }
            fn visit_u64<E>(self, v: u64) -> Result<IntRepr, E> {
                Ok(match i64::try_from(v) {
                    Ok(v) => IntRepr::Int(v),
                    Err(_) => IntRepr::Str(v.to_string()),
                })
            }
            fn visit_str<E>(self, v: &str) -> Result<IntRepr, E> {
                Ok(IntRepr::Str(v.to_owned()))
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[derive(Serialize, Deserialize)]
struct QBetaRecord {
    a_num: IntRepr,
    a_den: IntRepr,
    b_num: IntRepr,
    b_den: IntRepr,
}

impl Serialize for QBeta {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (a, b) = (self.a(), self.b());
        QBetaRecord {
            a_num: IntRepr::from_big(a.numer()),
            a_den: IntRepr::from_big(a.denom()),
            b_num: IntRepr::from_big(b.numer()),
            b_den: IntRepr::from_big(b.denom()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QBeta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QBetaRecord::deserialize(deserializer)?;
        let a_num = r.a_num.into_big().map_err(D::Error::custom)?;
        let a_den = r.a_den.into_big().map_err(D::Error::custom)?;
        let b_num = r.b_num.into_big().map_err(D::Error::custom)?;
        let b_den = r.b_den.into_big().map_err(D::Error::custom)?;
        if a_den.is_zero() || b_den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(QBeta::new(
            BigRational::new(a_num, a_den),
            BigRational::new(b_num, b_den),
        ))
    }
}
