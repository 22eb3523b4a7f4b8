//! Greedy transformations and digit generation.
//!
//! The golden map `T x = βx - j` on `Δ(j)`, `j ∈ {0, 2, 3}`, runs in exact
//! arithmetic. General deleted-digit maps (and the classical map, which is
//! the special case `A = {0, 1, …, ⌊β⌋}`) run in `f64` with a fixed
//! membership tolerance at branch boundaries.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::qbeta::{QBeta, BETA_F64};
use crate::{Error, Result};

/// Slack used when deciding branch membership in floating point.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A digit of the golden system.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum GoldenDigit {
    Zero,
    Two,
    Three,
}

impl GoldenDigit {
    pub const ALL: [GoldenDigit; 3] = [GoldenDigit::Zero, GoldenDigit::Two, GoldenDigit::Three];

    pub fn value(self) -> u8 {
        match self {
            GoldenDigit::Zero => 0,
            GoldenDigit::Two => 2,
            GoldenDigit::Three => 3,
        }
    }

    pub fn as_qbeta(self) -> QBeta {
        QBeta::integer(self.value() as i64)
    }

    /// Next larger digit of the alphabet, if any.
    pub fn successor(self) -> Option<GoldenDigit> {
        match self {
            GoldenDigit::Zero => Some(GoldenDigit::Two),
            GoldenDigit::Two => Some(GoldenDigit::Three),
            GoldenDigit::Three => None,
        }
    }

    /// Branch interval `Δ(j)`.
    pub fn branch(self) -> Interval {
        let inv = QBeta::beta_pow(-1);
        match self {
            GoldenDigit::Zero => Interval::new(QBeta::zero(), &inv * QBeta::integer(2)),
            GoldenDigit::Two => Interval::new(&inv * QBeta::integer(2), &inv * QBeta::integer(3)),
            GoldenDigit::Three => Interval::new(inv * QBeta::integer(3), QBeta::integer(2)),
        }
    }
}

impl From<GoldenDigit> for u8 {
    fn from(d: GoldenDigit) -> u8 {
        d.value()
    }
}

impl TryFrom<u8> for GoldenDigit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(GoldenDigit::Zero),
            2 => Ok(GoldenDigit::Two),
            3 => Ok(GoldenDigit::Three),
            other => Err(Error::InvalidDigit(other)),
        }
    }
}

impl fmt::Display for GoldenDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Parses a digit string such as `"2000300"`.
pub fn parse_block(s: &str) -> Result<Vec<GoldenDigit>> {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(v) => GoldenDigit::try_from(v as u8),
            None => Err(Error::InvalidArgument(format!("not a digit: {c:?}"))),
        })
        .collect()
}

pub fn block_to_string(block: &[GoldenDigit]) -> String {
    block.iter().map(|d| char::from(b'0' + d.value())).collect()
}

/// The support `[0, 2)` of the golden map.
pub fn golden_domain() -> Interval {
    Interval::new(QBeta::zero(), QBeta::integer(2))
}

/// Digit `j` with `x ∈ Δ(j)`.
pub fn golden_digit(x: &QBeta) -> Result<GoldenDigit> {
    if x.is_negative() || *x >= QBeta::integer(2) {
        return Err(Error::Domain {
            point: x.to_string(),
            domain: "[0, 2)".into(),
        });
    }
    // 2/β = 2β - 2, 3/β = 3β - 3
    let d = if *x < QBeta::from_ints(-2, 2) {
        GoldenDigit::Zero
    } else if *x < QBeta::from_ints(-3, 3) {
        GoldenDigit::Two
    } else {
        GoldenDigit::Three
    };
    Ok(d)
}

/// One application of the golden map: `(j, βx - j)` for `x ∈ Δ(j)`.
pub fn golden_step(x: &QBeta) -> Result<(GoldenDigit, QBeta)> {
    let d = golden_digit(x)?;
    let next = x.mul_beta() - d.as_qbeta();
    debug_assert!(!next.is_negative() && next < QBeta::integer(2));
    Ok((d, next))
}

/// Start point, digits and iterates of a greedy orbit.
///
/// `iterates[k]` is `T^k(start)` and `digits[k]` is the digit used to go
/// from `iterates[k]` to `iterates[k + 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyOrbit<P, D> {
    pub start: P,
    pub digits: Vec<D>,
    pub iterates: Vec<P>,
}

pub fn golden_orbit(x: &QBeta, n: usize) -> Result<GreedyOrbit<QBeta, GoldenDigit>> {
    let mut digits = Vec::with_capacity(n);
    let mut iterates = Vec::with_capacity(n + 1);
    let mut cur = x.clone();
    golden_digit(&cur)?;
    for _ in 0..n {
        let (d, next) = golden_step(&cur)?;
        digits.push(d);
        iterates.push(std::mem::replace(&mut cur, next));
    }
    iterates.push(cur);
    Ok(GreedyOrbit {
        start: x.clone(),
        digits,
        iterates,
    })
}

/// First `n` greedy digits of `x ∈ [0, 2)`, exact.
pub fn expand_golden(x: &QBeta, n: usize) -> Result<Vec<GoldenDigit>> {
    let mut cur = x.clone();
    let mut out = Vec::with_capacity(n);
    golden_digit(&cur)?;
    for _ in 0..n {
        let (d, next) = golden_step(&cur)?;
        out.push(d);
        cur = next;
    }
    Ok(out)
}

/// `Σ_{i ≤ n} d_i / β^i`.
pub fn partial_sum(digits: &[GoldenDigit]) -> QBeta {
    // Horner from the right: ((d_n/β + d_{n-1})/β + …)/β
    digits
        .iter()
        .rev()
        .fold(QBeta::zero(), |acc, d| (acc + d.as_qbeta()).div_beta())
}

/// Float version of the golden map used by simulations.
///
/// Returns the digit and the next point, kept inside `[0, 2)`.
pub fn golden_step_f64(x: f64) -> (u8, f64) {
    const TWO_OVER_BETA: f64 = 2.0 / BETA_F64;
    const THREE_OVER_BETA: f64 = 3.0 / BETA_F64;
    let d = if x < TWO_OVER_BETA {
        0
    } else if x < THREE_OVER_BETA {
        2
    } else {
        3
    };
    let next = (BETA_F64 * x - d as f64).clamp(0.0, 2f64.next_down());
    (d, next)
}

/// Which of the digit-set conditions fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    /// The base must exceed one.
    BaseNotExpanding { base: f64 },
    /// The alphabet must be non-empty with at least two digits.
    TooFewDigits,
    /// Condition (i): the smallest digit is zero.
    FirstDigitNotZero { first: f64 },
    /// Condition (ii): digits strictly increase.
    NotIncreasing { index: usize },
    /// Condition (iii): the largest gap is at most `a_m / (β - 1)`.
    GapTooLarge { gap: f64, bound: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BaseNotExpanding { base } => write!(f, "base {base} is not > 1"),
            Violation::TooFewDigits => write!(f, "need at least two digits"),
            Violation::FirstDigitNotZero { first } => {
                write!(f, "condition (i): first digit is {first}, not 0")
            }
            Violation::NotIncreasing { index } => {
                write!(f, "condition (ii): digits not increasing at index {index}")
            }
            Violation::GapTooLarge { gap, bound } => {
                write!(f, "condition (iii): gap {gap} exceeds a_m/(beta-1) = {bound}")
            }
        }
    }
}

/// A deleted-digit alphabet `a_0 < a_1 < … < a_m` with its base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitSet {
    digits: Vec<f64>,
    base: f64,
    /// Whether `a_m / (β - 1)` itself belongs to the domain.
    closed_domain: bool,
}

impl DigitSet {
    /// Validated constructor.
    pub fn new(digits: Vec<f64>, base: f64) -> Result<Self> {
        let ds = DigitSet {
            digits,
            base,
            closed_domain: false,
        };
        ds.validate()
            .map_err(|v| Error::InvalidDigitSet(v.to_string()))?;
        Ok(ds)
    }

    /// A digit set that has not been validated; see [`DigitSet::validate`].
    pub fn unchecked(digits: Vec<f64>, base: f64) -> Self {
        DigitSet {
            digits,
            base,
            closed_domain: false,
        }
    }

    /// `{0, 1, …, ⌊β⌋}`; the resulting map is the classical greedy map on
    /// the closed interval `[0, ⌊β⌋/(β - 1)]`.
    pub fn classical(base: f64) -> Result<Self> {
        if !(base > 1.0) {
            return Err(Error::InvalidDigitSet(
                Violation::BaseNotExpanding { base }.to_string(),
            ));
        }
        let top = base.floor() as u64;
        let mut ds = DigitSet::new((0..=top).map(|d| d as f64).collect(), base)?;
        ds.closed_domain = true;
        Ok(ds)
    }

    /// `{0, 2, 3}` with the golden base, in floating point.
    pub fn golden() -> Self {
        DigitSet::new(vec![0.0, 2.0, 3.0], BETA_F64).expect("golden digit set is valid")
    }

    pub fn digits(&self) -> &[f64] {
        &self.digits
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Checks conditions (i)–(iii), reporting the first failure.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        if !(self.base > 1.0) {
            return Err(Violation::BaseNotExpanding { base: self.base });
        }
        if self.digits.len() < 2 {
            return Err(Violation::TooFewDigits);
        }
        if self.digits[0] != 0.0 {
            return Err(Violation::FirstDigitNotZero {
                first: self.digits[0],
            });
        }
        if let Some(i) = (1..self.digits.len()).find(|&i| self.digits[i] <= self.digits[i - 1]) {
            return Err(Violation::NotIncreasing { index: i });
        }
        let gap = self
            .digits
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        let bound = self.top() / (self.base - 1.0);
        if gap > bound {
            return Err(Violation::GapTooLarge { gap, bound });
        }
        Ok(())
    }

    fn top(&self) -> f64 {
        *self.digits.last().expect("non-empty digit set")
    }

    /// Right end `a_m / (β - 1)` of the domain.
    pub fn domain_end(&self) -> f64 {
        self.top() / (self.base - 1.0)
    }

    fn in_domain(&self, x: f64) -> bool {
        let end = self.domain_end();
        x >= 0.0 && (x < end || (self.closed_domain && x <= end))
    }

    /// Index `j` of the branch `[a_j/β, a_{j+1}/β)` containing `x`.
    pub fn branch_index(&self, x: f64) -> usize {
        self.digits
            .iter()
            .rposition(|&a| x + FLOAT_TOLERANCE >= a / self.base)
            .unwrap_or(0)
    }

    pub fn step(&self, x: f64) -> Result<(f64, f64)> {
        if !self.in_domain(x) {
            return Err(Error::Domain {
                point: x.to_string(),
                domain: format!(
                    "[0, {}{}",
                    self.domain_end(),
                    if self.closed_domain { "]" } else { ")" }
                ),
            });
        }
        let a = self.digits[self.branch_index(x)];
        let next = (self.base * x - a).max(0.0);
        Ok((a, next))
    }

    pub fn orbit(&self, x: f64, n: usize) -> Result<GreedyOrbit<f64, f64>> {
        let mut digits = Vec::with_capacity(n);
        let mut iterates = vec![x];
        let mut cur = x;
        if !self.in_domain(x) {
            self.step(x)?;
        }
        for _ in 0..n {
            let (d, next) = self.step(cur)?;
            digits.push(d);
            // Float drift can push the fixed right end slightly past the domain.
            cur = if self.closed_domain {
                next.min(self.domain_end())
            } else {
                next
            };
            iterates.push(cur);
        }
        Ok(GreedyOrbit {
            start: x,
            digits,
            iterates,
        })
    }

    pub fn expand(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        Ok(self.orbit(x, n)?.digits)
    }

    /// Smallest `j ≥ 1` whose interval `[0, a_j - a_{j-1})` is mapped into
    /// itself, together with that interval's right end.
    pub fn support_index(&self) -> (usize, f64) {
        let m = self.digits.len() - 1;
        for j in 1..=m {
            let g = self.digits[j] - self.digits[j - 1];
            if self.maps_into(g) {
                return (j, g);
            }
        }
        (m, self.digits[m] - self.digits[m - 1])
    }

    /// Whether every branch image of `[0, g)` stays inside `[0, g)`.
    fn maps_into(&self, g: f64) -> bool {
        let end = self.domain_end();
        self.digits.iter().enumerate().all(|(k, &a)| {
            let lo = a / self.base;
            if lo >= g {
                return true;
            }
            let hi = self.digits.get(k + 1).map_or(end, |&b| b / self.base);
            self.base * hi.min(g) - a <= g + FLOAT_TOLERANCE
        })
    }
}

/// Which greedy transformation to run.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    /// The golden map with digits `{0, 2, 3}`, exact.
    Golden,
    /// The classical map with digits `{0, …, ⌊β⌋}`.
    Classical(f64),
    /// A general deleted-digit map.
    Deleted(DigitSet),
}

/// Digits produced by [`System::expand`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Digits {
    Exact(Vec<GoldenDigit>),
    Float(Vec<f64>),
}

impl System {
    pub fn expand(&self, x: &QBeta, n: usize) -> Result<Digits> {
        match self {
            System::Golden => expand_golden(x, n).map(Digits::Exact),
            System::Classical(b) => DigitSet::classical(*b)?
                .expand(x.to_f64(), n)
                .map(Digits::Float),
            System::Deleted(ds) => ds.expand(x.to_f64(), n).map(Digits::Float),
        }
    }
}
