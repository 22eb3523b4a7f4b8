//! Fundamental intervals of the golden map.
//!
//! `Δ(b_0 … b_{n-1})` is the set of points whose first `n` greedy digits are
//! the block. It is computed exactly by pulling `[0, 2)` back through the
//! inverse branches from the right. A cylinder of rank `n` is *full* when
//! `T^n` maps it onto `[0, 2)`, which for this map is the same as having
//! length `2/β^n`.

use num_traits::Zero as _;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::greedy::{block_to_string, golden_domain, parse_block, GoldenDigit};
use crate::interval::Interval;
use crate::qbeta::QBeta;
use crate::{Error, Result};

use GoldenDigit::{Three, Two, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub block: Vec<GoldenDigit>,
    /// Possibly empty when the block is not realised by any point.
    pub interval: Interval,
    pub full: bool,
}

impl Cylinder {
    pub fn rank(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interval.is_empty()
    }

    pub fn block_string(&self) -> String {
        block_to_string(&self.block)
    }
}

impl Serialize for Cylinder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Cylinder", 5)?;
        s.serialize_field("block", &self.block_string())?;
        s.serialize_field("left", &self.interval.left)?;
        s.serialize_field("right", &self.interval.right)?;
        s.serialize_field("rank", &self.rank())?;
        s.serialize_field("full", &self.full)?;
        s.end()
    }
}

/// Length `2/β^n` of a full cylinder of rank `n`.
pub fn full_length(rank: usize) -> QBeta {
    QBeta::integer(2) * QBeta::beta_pow(-(rank as i32))
}

/// `Δ(b_0) ∩ T^{-1}Δ(b_1) ∩ … ∩ T^{-(n-1)}Δ(b_{n-1})`.
pub fn cylinder_interval(block: &[GoldenDigit]) -> Interval {
    let inv = QBeta::beta_pow(-1);
    let mut acc = golden_domain();
    for &d in block.iter().rev() {
        // preimage of acc under the branch x ↦ βx - d, restricted to Δ(d)
        let pre = acc.affine(&inv, &(&inv * d.as_qbeta()));
        acc = d.branch().intersect(&pre);
        if acc.is_empty() {
            return Interval::empty();
        }
    }
    acc
}

pub fn cylinder(block: &[GoldenDigit]) -> Cylinder {
    let interval = cylinder_interval(block);
    let full = !interval.is_empty() && interval.length() == full_length(block.len());
    Cylinder {
        block: block.to_vec(),
        interval,
        full,
    }
}

/// [`cylinder`] for a digit string like `"2000"`.
pub fn cylinder_str(block: &str) -> Result<Cylinder> {
    Ok(cylinder(&parse_block(block)?))
}

/// Image of `interval ⊆ Δ(digits[0]) ∩ …` under the branches named by
/// `digits`, intersecting with each branch before applying it.
pub fn push_forward(interval: &Interval, digits: &[GoldenDigit]) -> Interval {
    let beta = QBeta::beta();
    let mut acc = interval.clone();
    for &d in digits {
        acc = acc.intersect(&d.branch());
        if acc.is_empty() {
            return Interval::empty();
        }
        acc = acc.affine(&beta, &-d.as_qbeta());
    }
    acc
}

/// `T^n Δ(block)`.
pub fn image(block: &[GoldenDigit]) -> Result<Interval> {
    let c = cylinder_interval(block);
    if c.is_empty() {
        return Err(Error::EmptyCylinder(block_to_string(block)));
    }
    Ok(push_forward(&c, block))
}

/// Which collection of rank-`n` cylinders to list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Every non-empty cylinder of the rank.
    All,
    /// Full cylinders not contained in any full cylinder of lower rank.
    D,
    /// Non-full cylinders not contained in any full cylinder of lower rank.
    B,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "ALL" => Ok(Family::All),
            "D" | "d" => Ok(Family::D),
            "B" | "b" => Ok(Family::B),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

/// Lists a family using the closed forms for `D` and `B` and exhaustive
/// search for `All`. Results are in lexicographic block order.
pub fn enumerate(rank: usize, family: Family) -> Vec<Cylinder> {
    let blocks = match family {
        Family::All => return enumerate_exhaustive(rank, Family::All),
        Family::D => d_blocks(rank),
        Family::B => b_blocks(rank),
    };
    blocks.iter().map(|b| cylinder(b)).collect()
}

/// Depth-first search over digit strings, pruning empty cylinders.
///
/// For `D` and `B` the search also stops descending below full prefixes.
pub fn enumerate_exhaustive(rank: usize, family: Family) -> Vec<Cylinder> {
    let mut out = Vec::new();
    if rank == 0 {
        return out;
    }
    let mut prefix = Vec::with_capacity(rank);
    dfs(&golden_domain(), &mut prefix, rank, family, &mut out);
    out
}

fn dfs(
    image: &Interval,
    prefix: &mut Vec<GoldenDigit>,
    rank: usize,
    family: Family,
    out: &mut Vec<Cylinder>,
) {
    let beta = QBeta::beta();
    for d in GoldenDigit::ALL {
        let part = image.intersect(&d.branch());
        if part.is_empty() {
            continue;
        }
        let next = part.affine(&beta, &-d.as_qbeta());
        prefix.push(d);
        let full = next == golden_domain();
        if prefix.len() == rank {
            let keep = match family {
                Family::All => true,
                Family::D => full,
                Family::B => !full,
            };
            if keep {
                let c = cylinder(prefix);
                debug_assert_eq!(c.full, full);
                out.push(c);
            }
        } else if family == Family::All || !full {
            dfs(&next, prefix, rank, family, out);
        }
        prefix.pop();
    }
}

/// `j` followed by the first `n - 1` digits of the reference expansion
/// (of `1` for `j = 2`, of `1/β³` for `j = 3`).
pub fn reference_block(j: GoldenDigit, n: usize) -> Vec<GoldenDigit> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(j);
    out.extend((1..n).map(|i| reference_digit(j, i)));
    out
}

/// `d_i` of the greedy expansion of `1` (`j = 2`) or `1/β³` (`j = 3`), `i ≥ 1`.
///
/// `1 = 02(002)…` and `1/β³ = 00(002)…`.
pub fn reference_digit(j: GoldenDigit, i: usize) -> GoldenDigit {
    assert!(i >= 1);
    let two = match j {
        Two => i % 3 == 2,
        Three => i >= 5 && i % 3 == 2,
        Zero => panic!("reference digits exist only for rows 2 and 3"),
    };
    if two {
        Two
    } else {
        Zero
    }
}

fn d_blocks(n: usize) -> Vec<Vec<GoldenDigit>> {
    match n {
        1 => vec![vec![Zero]],
        3 => vec![vec![Two, Zero, Zero]],
        n if n >= 6 && n % 3 == 0 => [Two, Three]
            .into_iter()
            .map(|j| {
                let mut b = reference_block(j, n - 1);
                b.push(Zero);
                b
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn b_blocks(n: usize) -> Vec<Vec<GoldenDigit>> {
    if n == 0 {
        return Vec::new();
    }
    [Two, Three]
        .into_iter()
        .map(|j| reference_block(j, n))
        .collect()
}

/// `Σ_{n ≤ up_to} λ(D_n)`, exact.
pub fn mass_of_d(up_to: usize) -> QBeta {
    (1..=up_to)
        .flat_map(|n| enumerate(n, Family::D))
        .map(|c| c.interval.length())
        .sum()
}

/// Ranks at which the block's cylinder returns to a full state: the
/// successive ends of minimal full subblocks.
pub fn return_times(block: &[GoldenDigit]) -> Vec<usize> {
    let mut times = Vec::new();
    let mut start = 0;
    for end in 1..=block.len() {
        if cylinder(&block[start..end]).full {
            times.push(end);
            start = end;
        }
    }
    times
}

/// Subblocks `C_1 … C_κ` of a full block, cut at its return times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubblockDecomposition {
    pub blocks: Vec<Vec<GoldenDigit>>,
    pub return_times: Vec<usize>,
}

impl SubblockDecomposition {
    pub fn block_strings(&self) -> Vec<String> {
        self.blocks.iter().map(|b| block_to_string(b)).collect()
    }

    pub fn concatenated(&self) -> Vec<GoldenDigit> {
        self.blocks.concat()
    }
}

pub fn decompose(block: &[GoldenDigit]) -> Result<SubblockDecomposition> {
    let times = return_times(block);
    if block.is_empty() || times.last() != Some(&block.len()) {
        if cylinder_interval(block).is_empty() {
            return Err(Error::EmptyCylinder(block_to_string(block)));
        }
        return Err(Error::NotFull(block_to_string(block)));
    }
    let mut blocks = Vec::with_capacity(times.len());
    let mut prev = 0;
    for &t in &times {
        blocks.push(block[prev..t].to_vec());
        prev = t;
    }
    Ok(SubblockDecomposition {
        blocks,
        return_times: times,
    })
}

/// Sum of the lengths of the given cylinders.
pub fn total_length<'a>(cylinders: impl IntoIterator<Item = &'a Cylinder>) -> QBeta {
    cylinders
        .into_iter()
        .fold(QBeta::zero(), |acc, c| acc + c.interval.length())
}
