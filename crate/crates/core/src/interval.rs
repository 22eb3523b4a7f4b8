//! Half-open intervals `[left, right)` with exact endpoints.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::qbeta::QBeta;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub left: QBeta,
    pub right: QBeta,
}

impl Interval {
    pub fn new(left: QBeta, right: QBeta) -> Self {
        Interval { left, right }
    }

    /// The canonical empty interval `[0, 0)`.
    pub fn empty() -> Self {
        Interval::new(QBeta::zero(), QBeta::zero())
    }

    pub fn is_empty(&self) -> bool {
        self.left >= self.right
    }

    /// Length, zero for empty intervals.
    pub fn length(&self) -> QBeta {
        if self.is_empty() {
            QBeta::zero()
        } else {
            &self.right - &self.left
        }
    }

    pub fn contains(&self, x: &QBeta) -> bool {
        &self.left <= x && x < &self.right
    }

    /// `other ⊆ self`; the empty interval is contained in everything.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.left <= other.left && other.right <= self.right)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let left = self.left.clone().max(other.left.clone());
        let right = self.right.clone().min(other.right.clone());
        if left >= right {
            Interval::empty()
        } else {
            Interval::new(left, right)
        }
    }

    /// Image under `t ↦ scale·t + shift` for `scale > 0`.
    pub fn affine(&self, scale: &QBeta, shift: &QBeta) -> Interval {
        Interval::new(scale * &self.left + shift, scale * &self.right + shift)
    }

    pub fn midpoint(&self) -> QBeta {
        (&self.left + &self.right) * QBeta::ratio(1, 2)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "[{}, {})", self.left, self.right)
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
