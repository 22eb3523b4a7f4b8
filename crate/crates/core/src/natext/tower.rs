//! The planar tower model.
//!
//! `I = ([0,2) × I_0) ∪ ⋃_n ([0, T^{n-1}1) × I_(2,n)) ∪ ([0, T^{n-1}β^{-3}) × I_(3,n))`
//! where the strips `I_0`, `I_(2,n)`, `I_(3,n)` partition `[0, 2β)`.
//! [`phi`] sends each strip onto the matching rectangle of `R` by removing
//! the strip's left end and scaling by `β²`.

use num_traits::Zero;
use serde::Serialize;

use super::{
    return_offset, returns_by_pattern, stack_series, step, step_inverse, RState, Rect, Row,
};
use crate::greedy::{golden_digit, GoldenDigit};
use crate::interval::Interval;
use crate::qbeta::QBeta;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TowerPoint {
    pub x: QBeta,
    pub y: QBeta,
}

impl TowerPoint {
    pub fn new(x: QBeta, y: QBeta) -> Self {
        TowerPoint { x, y }
    }
}

fn two_over_beta_sq() -> QBeta {
    QBeta::integer(2) * QBeta::beta_pow(-2)
}

/// `Σ_{i=1}^{k} β^{-i}`, empty sum zero.
fn geometric(k: u32) -> QBeta {
    let mut term = QBeta::beta_pow(-1);
    let mut acc = QBeta::zero();
    for _ in 0..k {
        acc += &term;
        term = term.div_beta();
    }
    acc
}

/// The strip of `[0, 2β)` carrying a rectangle.
pub fn strip(rect: Rect) -> Interval {
    match rect {
        Rect::Base => Interval::new(QBeta::zero(), two_over_beta_sq()),
        Rect::Stack { row, level } => {
            let base = match row {
                Row::Two => two_over_beta_sq(),
                Row::Three => QBeta::integer(2),
            };
            let c = two_over_beta_sq();
            Interval::new(
                &base + &c * geometric(level - 1),
                base + c * geometric(level),
            )
        }
    }
}

pub fn tower_strip(tag: u8, level: u32) -> Result<Interval> {
    Ok(strip(Rect::from_tag_level(tag, level)?))
}

/// The rectangle whose strip contains `y`.
pub fn locate_strip(y: &QBeta) -> Result<Rect> {
    let two = QBeta::integer(2);
    let top = two.mul_beta();
    if y.is_negative() || *y >= top {
        return Err(Error::Domain {
            point: y.to_string(),
            domain: "[0, 2β)".into(),
        });
    }
    if *y < two_over_beta_sq() {
        return Ok(Rect::Base);
    }
    // I_(2,n) = [2 - 2/β^n, 2 - 2/β^{n+1}) and I_(3,n) = I_(2,n) + 2/β.
    let (row, gap) = if *y < two {
        (Row::Two, &two - y)
    } else {
        (Row::Three, &top - y)
    };
    let mut level = 1;
    let mut lower = QBeta::integer(2) * QBeta::beta_pow(-2);
    while gap <= lower {
        level += 1;
        lower = lower.div_beta();
    }
    Ok(Rect::Stack { row, level })
}

/// The bijection `I → R`.
pub fn phi(p: &TowerPoint) -> Result<RState> {
    let rect = locate_strip(&p.y)?;
    if !rect.width().contains(&p.x) {
        return Err(Error::Domain {
            point: format!("({}, {})", p.x, p.y),
            domain: "the tower I".into(),
        });
    }
    let y = (&p.y - strip(rect).left).mul_beta().mul_beta();
    Ok(RState::new(p.x.clone(), y, rect))
}

pub fn phi_inverse(s: &RState) -> Result<TowerPoint> {
    s.validate()?;
    let y = strip(s.rect).left + s.y.div_beta().div_beta();
    Ok(TowerPoint::new(s.x.clone(), y))
}

/// The tower map, written directly on strips.
///
/// Climbing one level is the same affine map on every strip of a stack:
/// `y ↦ y/β + 2/β²` on the stack of `2` and `y ↦ y/β + 2/β` on the stack
/// of `3`. Compare [`tower_step_conjugated`].
pub fn tower_step(p: &TowerPoint) -> Result<TowerPoint> {
    let rect = locate_strip(&p.y)?;
    if !rect.width().contains(&p.x) {
        return Err(Error::Domain {
            point: format!("({}, {})", p.x, p.y),
            domain: "the tower I".into(),
        });
    }
    let d = golden_digit(&p.x)?;
    let x = p.x.mul_beta() - d.as_qbeta();
    let shrunk = p.y.div_beta();
    let y = match rect {
        Rect::Base => match d {
            GoldenDigit::Zero => shrunk,
            j => {
                let row = if j == GoldenDigit::Two { Row::Two } else { Row::Three };
                strip(Rect::Stack { row, level: 1 }).left + shrunk
            }
        },
        Rect::Stack { row, level } => {
            if d == GoldenDigit::Zero && returns_by_pattern(row, level) {
                let rel = (&p.y - strip(rect).left).div_beta();
                return_offset(row, level).div_beta().div_beta() + rel
            } else {
                let lift = match row {
                    Row::Two => two_over_beta_sq(),
                    Row::Three => QBeta::integer(2).div_beta(),
                };
                shrunk + lift
            }
        }
    };
    Ok(TowerPoint::new(x, y))
}

/// `φ⁻¹ ∘ 𝒯 ∘ φ`.
pub fn tower_step_conjugated(p: &TowerPoint) -> Result<TowerPoint> {
    phi_inverse(&step(&phi(p)?)?)
}

pub fn tower_step_inverse(p: &TowerPoint) -> Result<TowerPoint> {
    phi_inverse(&step_inverse(&phi(p)?)?)
}

/// Planar area of `I`, summed strip by strip.
pub fn tower_mass() -> QBeta {
    let base = QBeta::integer(2) * strip(Rect::Base).length();
    let stacks: QBeta = Row::BOTH
        .iter()
        .map(|&row| {
            stack_series(row, |n| {
                let rect = Rect::Stack { row, level: n };
                rect.width().length() * strip(rect).length()
            })
        })
        .sum();
    base + stacks
}

/// Length of the vertical slice `{y : (x, y) ∈ I}` for `x ∈ [0, 2)`.
pub fn slice_length(x: &QBeta) -> QBeta {
    let stacks: QBeta = Row::BOTH
        .iter()
        .map(|&row| {
            stack_series(row, |n| {
                let rect = Rect::Stack { row, level: n };
                if rect.width().contains(x) {
                    strip(rect).length()
                } else {
                    QBeta::zero()
                }
            })
        })
        .sum();
    strip(Rect::Base).length() + stacks
}

/// Outline of the first `max_level` strips of each stack, with `R_0`'s strip.
pub fn outline(max_level: u32) -> Vec<(Rect, Interval, Interval)> {
    let mut out = vec![(Rect::Base, Rect::Base.width(), strip(Rect::Base))];
    for row in Row::BOTH {
        for level in 1..=max_level {
            let rect = Rect::Stack { row, level };
            out.push((rect, rect.width(), strip(rect)));
        }
    }
    out
}
