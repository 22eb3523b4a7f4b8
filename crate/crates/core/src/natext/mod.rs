//! The two natural-extension models of the golden map.
//!
//! The rectangle model lives on
//! `R = R_0 ∪ ⋃_n (R_(2,n) ∪ R_(3,n))` with
//! `R_0 = [0,2) × [0,2)` and
//! `R_(j,n) = [0, T^{n-1} x_j) × [0, 2/β^n)`, where `x_2 = 1` and
//! `x_3 = 1/β³`. The map [`step`] expands by `β` horizontally, contracts by
//! `β` vertically and climbs the two stacks until the orbit of the base
//! point becomes full again, at which time it drops back into `R_0`.
//!
//! The tower model ([`tower`]) stacks rescaled copies of the same
//! rectangles as horizontal strips of `[0,2) × [0,2β)`.

pub mod tower;

use std::fmt;
use std::sync::RwLock;

use num_traits::{One, Zero};
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cylinders::{cylinder, reference_block, reference_digit};
use crate::greedy::{golden_digit, partial_sum, GoldenDigit};
use crate::interval::Interval;
use crate::qbeta::QBeta;
use crate::{Error, Result};

pub use tower::TowerPoint;

/// The two stacks of rectangles, labelled by the digit that starts them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Row {
    Two,
    Three,
}

impl Row {
    pub const BOTH: [Row; 2] = [Row::Two, Row::Three];

    pub fn digit(self) -> GoldenDigit {
        match self {
            Row::Two => GoldenDigit::Two,
            Row::Three => GoldenDigit::Three,
        }
    }

    pub fn tag(self) -> u8 {
        self.digit().value()
    }

    /// `x_2 = 1`, `x_3 = 1/β³`.
    pub fn start(self) -> QBeta {
        match self {
            Row::Two => QBeta::one(),
            Row::Three => QBeta::beta_pow(-3),
        }
    }

    fn index(self) -> usize {
        match self {
            Row::Two => 0,
            Row::Three => 1,
        }
    }

    /// First level from which widths repeat with period three.
    fn periodic_from(self) -> u32 {
        match self {
            Row::Two => 1,
            Row::Three => 3,
        }
    }
}

/// Which rectangle of `R` a state lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rect {
    /// `R_0`, tag and level `(0, 0)`.
    Base,
    /// `R_(j,n)` with `n ≥ 1`.
    Stack { row: Row, level: u32 },
}

impl Rect {
    pub fn from_tag_level(tag: u8, level: u32) -> Result<Self> {
        match (tag, level) {
            (0, 0) => Ok(Rect::Base),
            (2, n) if n >= 1 => Ok(Rect::Stack {
                row: Row::Two,
                level: n,
            }),
            (3, n) if n >= 1 => Ok(Rect::Stack {
                row: Row::Three,
                level: n,
            }),
            _ => Err(Error::InvalidIndex { tag, level }),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Rect::Base => 0,
            Rect::Stack { row, .. } => row.tag(),
        }
    }

    pub fn level(self) -> u32 {
        match self {
            Rect::Base => 0,
            Rect::Stack { level, .. } => level,
        }
    }

    pub fn width(self) -> Interval {
        match self {
            Rect::Base => Interval::new(QBeta::zero(), QBeta::integer(2)),
            Rect::Stack { row, level } => Interval::new(QBeta::zero(), stack_width(row, level)),
        }
    }

    pub fn height(self) -> Interval {
        match self {
            Rect::Base => Interval::new(QBeta::zero(), QBeta::integer(2)),
            Rect::Stack { level, .. } => Interval::new(
                QBeta::zero(),
                QBeta::integer(2) * QBeta::beta_pow(-(level as i32)),
            ),
        }
    }

    pub fn geometry(self) -> RectGeometry {
        let width = self.width();
        let height = self.height();
        let area = width.length() * height.length();
        RectGeometry {
            width,
            height,
            area,
        }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rect::Base => write!(f, "R0"),
            Rect::Stack { row, level } => write!(f, "R({},{})", row.tag(), level),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectGeometry {
    pub width: Interval,
    pub height: Interval,
    pub area: QBeta,
}

pub fn rect_geometry(tag: u8, level: u32) -> Result<RectGeometry> {
    Ok(Rect::from_tag_level(tag, level)?.geometry())
}

/// `T^k x_j`, read off the eventually 3-periodic orbits
/// `1 → β → 1/β → 1` and `1/β³ → 1/β² → 1/β → 1 → β → 1/β`.
pub fn reference_point(row: Row, k: u32) -> QBeta {
    let cycle = |i: u32| match i % 3 {
        0 => QBeta::one(),
        1 => QBeta::beta(),
        _ => QBeta::beta_pow(-1),
    };
    match row {
        Row::Two => cycle(k),
        Row::Three => match k {
            0 => QBeta::beta_pow(-3),
            1 => QBeta::beta_pow(-2),
            k => cycle(k),
        },
    }
}

/// Right end `T^{n-1} x_j` of the width of `R_(j,n)`.
pub fn stack_width(row: Row, level: u32) -> QBeta {
    assert!(level >= 1);
    reference_point(row, level - 1)
}

/// A point `(x, y, j, n)` of `R`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RState {
    pub x: QBeta,
    pub y: QBeta,
    pub rect: Rect,
}

impl RState {
    pub fn new(x: QBeta, y: QBeta, rect: Rect) -> Self {
        RState { x, y, rect }
    }

    pub fn base(x: QBeta, y: QBeta) -> Self {
        RState::new(x, y, Rect::Base)
    }

    /// Checks that `(x, y)` lies in the rectangle named by the state.
    pub fn validate(&self) -> Result<()> {
        if !self.rect.width().contains(&self.x) || !self.rect.height().contains(&self.y) {
            return Err(Error::InvalidState(self.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for RState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.x,
            self.y,
            self.rect.tag(),
            self.rect.level()
        )
    }
}

impl fmt::Debug for RState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RState{self}")
    }
}

impl Serialize for RState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RState", 4)?;
        s.serialize_field("x", &self.x)?;
        s.serialize_field("y", &self.y)?;
        s.serialize_field("j", &self.rect.tag())?;
        s.serialize_field("n", &self.rect.level())?;
        s.end()
    }
}

static RETURN_TABLE: RwLock<Vec<[bool; 2]>> = RwLock::new(Vec::new());

/// Whether `Δ(j d_1 … d_{n-1} 0)` is a full cylinder, decided by building
/// the cylinder. Results are memoised per level.
pub fn returns_by_cylinder(row: Row, level: u32) -> bool {
    assert!(level >= 1);
    let idx = (level - 1) as usize;
    if let Some(entry) = RETURN_TABLE.read().expect("return table lock").get(idx) {
        return entry[row.index()];
    }
    let mut table = RETURN_TABLE.write().expect("return table lock");
    while table.len() <= idx {
        let n = table.len() + 1;
        let entry = [Row::Two, Row::Three].map(|r| return_block_is_full(r, n));
        table.push(entry);
    }
    table[idx][row.index()]
}

fn return_block_is_full(row: Row, n: usize) -> bool {
    let mut block = reference_block(row.digit(), n);
    block.push(GoldenDigit::Zero);
    cylinder(&block).full
}

/// The same condition from the congruence pattern: `n ≡ 2 (mod 3)` with
/// `n ≥ 2` on the row of `2` and `n ≥ 5` on the row of `3`.
pub fn returns_by_pattern(row: Row, level: u32) -> bool {
    let min = match row {
        Row::Two => 2,
        Row::Three => 5,
    };
    level >= min && level % 3 == 2
}

/// `j/β + d_1/β² + … + d_{n-1}/β^n`, the left end of the strip of `R_0`
/// that `R_(j,n)` returns into.
pub fn return_offset(row: Row, level: u32) -> QBeta {
    partial_sum(&reference_block(row.digit(), level as usize))
}

/// One application of the natural-extension map.
pub fn step(s: &RState) -> Result<RState> {
    s.validate()?;
    let d = golden_digit(&s.x)?;
    let x = s.x.mul_beta() - d.as_qbeta();
    let y_scaled = s.y.div_beta();
    let next = match s.rect {
        Rect::Base => match d {
            GoldenDigit::Zero => RState::base(x, y_scaled),
            GoldenDigit::Two => RState::new(x, y_scaled, Rect::Stack { row: Row::Two, level: 1 }),
            GoldenDigit::Three => RState::new(
                x,
                y_scaled,
                Rect::Stack {
                    row: Row::Three,
                    level: 1,
                },
            ),
        },
        Rect::Stack { row, level } => {
            let returns = returns_by_cylinder(row, level);
            debug_assert_eq!(returns, returns_by_pattern(row, level));
            if returns && d == GoldenDigit::Zero {
                RState::base(x, return_offset(row, level) + y_scaled)
            } else {
                RState::new(
                    x,
                    y_scaled,
                    Rect::Stack {
                        row,
                        level: level + 1,
                    },
                )
            }
        }
    };
    debug_assert!(next.validate().is_ok(), "{s} ↦ {next}");
    Ok(next)
}

/// The unique preimage of `s`.
pub fn step_inverse(s: &RState) -> Result<RState> {
    s.validate()?;
    let y_up = s.y.mul_beta();
    let prev = match s.rect {
        Rect::Stack { row, level: 1 } => {
            RState::base((&s.x + row.digit().as_qbeta()).div_beta(), y_up)
        }
        Rect::Stack { row, level } => {
            let d = reference_digit(row.digit(), (level - 1) as usize);
            RState::new(
                (&s.x + d.as_qbeta()).div_beta(),
                y_up,
                Rect::Stack {
                    row,
                    level: level - 1,
                },
            )
        }
        Rect::Base => match golden_digit(&s.y)? {
            GoldenDigit::Zero => RState::base(s.x.div_beta(), y_up),
            j => {
                let (row, level) = return_source(&s.y, j)?;
                let y = (&s.y - return_offset(row, level)).mul_beta();
                RState::new(s.x.div_beta(), y, Rect::Stack { row, level })
            }
        },
    };
    prev.validate()?;
    Ok(prev)
}

/// For `y ∈ [2/β, 2)`, the stack level whose return strip contains `y`.
///
/// The return strips `Δ(j d_1 … d_{n-1} 0)` tile `[2/β, 2)`; `y` lies in the
/// one where its greedy digits first leave the reference expansion.
fn return_source(y: &QBeta, first: GoldenDigit) -> Result<(Row, u32)> {
    let row = match first {
        GoldenDigit::Two => Row::Two,
        GoldenDigit::Three => Row::Three,
        GoldenDigit::Zero => unreachable!("caller handles Δ(0)"),
    };
    let mut cur = y.mul_beta() - first.as_qbeta();
    let mut i = 1usize;
    loop {
        let e = golden_digit(&cur)?;
        let d = reference_digit(row.digit(), i);
        if e != d {
            let level = i as u32;
            if e == GoldenDigit::Zero && returns_by_cylinder(row, level) {
                return Ok((row, level));
            }
            return Err(Error::InvalidState(format!(
                "y = {y} leaves the reference expansion at digit {i} with {e}"
            )));
        }
        cur = cur.mul_beta() - e.as_qbeta();
        i += 1;
    }
}

/// `Σ_{n ≥ 1} term(n)` over one stack, for terms with
/// `term(n + 3) = term(n)/β³` once the widths are periodic.
pub fn stack_series(row: Row, term: impl Fn(u32) -> QBeta) -> QBeta {
    let start = row.periodic_from();
    let prefix: QBeta = (1..start).map(&term).sum();
    let period: QBeta = (start..start + 3).map(&term).sum();
    debug_assert_eq!(term(start + 3), term(start) * QBeta::beta_pow(-3));
    let ratio = QBeta::one() - QBeta::beta_pow(-3);
    prefix + period / ratio
}

/// Total Lebesgue area of `R`, summed in closed form.
pub fn total_mass() -> QBeta {
    let stacks: QBeta = Row::BOTH
        .iter()
        .map(|&row| stack_series(row, |n| Rect::Stack { row, level: n }.geometry().area))
        .sum();
    QBeta::integer(4) + stacks
}

/// Area of `R_0` and the stack rectangles up to `max_level`.
pub fn total_mass_truncated(max_level: u32) -> QBeta {
    let mut acc = QBeta::integer(4);
    for row in Row::BOTH {
        for n in 1..=max_level {
            acc += Rect::Stack { row, level: n }.geometry().area;
        }
    }
    acc
}

/// A sub-rectangle `x × y` of one rectangle of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub x: Interval,
    pub y: Interval,
    pub rect: Rect,
}

impl Region {
    pub fn area(&self) -> QBeta {
        self.x.length() * self.y.length()
    }
}

/// Image of a region that lies in a single continuity piece of [`step`].
pub fn step_region(r: &Region) -> Result<Region> {
    if r.x.is_empty() || r.y.is_empty() {
        return Err(Error::InvalidArgument("empty region".into()));
    }
    if !r.rect.width().contains_interval(&r.x) || !r.rect.height().contains_interval(&r.y) {
        return Err(Error::InvalidState(format!("region outside {}", r.rect)));
    }
    let d = golden_digit(&r.x.left)?;
    if !d.branch().contains_interval(&r.x) {
        return Err(Error::InvalidArgument(format!(
            "x-interval {} straddles a branch boundary",
            r.x
        )));
    }
    let beta = QBeta::beta();
    let inv = QBeta::beta_pow(-1);
    let x = r.x.affine(&beta, &-d.as_qbeta());
    let shrink = |offset: QBeta| r.y.affine(&inv, &offset);
    let region = match (r.rect, d) {
        (Rect::Base, GoldenDigit::Zero) => Region {
            x,
            y: shrink(QBeta::zero()),
            rect: Rect::Base,
        },
        (Rect::Base, j) => Region {
            x,
            y: shrink(QBeta::zero()),
            rect: Rect::Stack {
                row: if j == GoldenDigit::Two { Row::Two } else { Row::Three },
                level: 1,
            },
        },
        (Rect::Stack { row, level }, d) => {
            if d == GoldenDigit::Zero && returns_by_cylinder(row, level) {
                Region {
                    x,
                    y: shrink(return_offset(row, level)),
                    rect: Rect::Base,
                }
            } else {
                Region {
                    x,
                    y: shrink(QBeta::zero()),
                    rect: Rect::Stack {
                        row,
                        level: level + 1,
                    },
                }
            }
        }
    };
    Ok(region)
}

/// Resolution used when drawing random dyadic coordinates.
const SAMPLE_BITS: u32 = 24;

/// A random point `left + (right - left)·k/2^24` of a non-empty interval.
pub fn sample_in<R: Rng + ?Sized>(rng: &mut R, iv: &Interval) -> QBeta {
    let k: i64 = rng.gen_range(0..(1i64 << SAMPLE_BITS));
    &iv.left + iv.length() * QBeta::ratio(k, 1i64 << SAMPLE_BITS)
}

/// A random state: rectangle chosen uniformly among `R_0` and
/// `R_(j,n)`, `n ≤ max_level`, then a random dyadic point inside it.
pub fn sample_state<R: Rng + ?Sized>(rng: &mut R, max_level: u32) -> RState {
    let choice = rng.gen_range(0..=2 * max_level);
    let rect = if choice == 0 {
        Rect::Base
    } else {
        let row = if choice % 2 == 0 { Row::Two } else { Row::Three };
        Rect::Stack {
            row,
            level: choice.div_ceil(2),
        }
    };
    RState::new(
        sample_in(rng, &rect.width()),
        sample_in(rng, &rect.height()),
        rect,
    )
}
