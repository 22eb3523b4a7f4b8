//! Invariant densities of the golden map and their independent checks.
//!
//! * [`golden_density`] is the closed form.
//! * [`fiber_oracle`] rebuilds it by projecting the rectangle measure of the
//!   natural extension onto the first coordinate.
//! * [`tower_density`] does the same from vertical slices of the tower.
//! * [`transfer_residual`] and [`transfer_integrals`] test invariance under
//!   the Perron–Frobenius operator `(Lf)(x) = β⁻¹ Σ_{Ty = x} f(y)`.

pub mod birkhoff;

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::greedy::{DigitSet, GoldenDigit};
use crate::interval::Interval;
use crate::natext::{stack_series, total_mass, tower, Rect, Row};
use crate::qbeta::QBeta;
use crate::{Error, Result};

/// Values usable as breakpoints and levels of a step function.
pub trait Scalar:
    Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl Scalar for QBeta {}
impl Scalar for f64 {}

/// A step function on `[b_0, b_k)` with constant value `v_i` on `[b_i, b_{i+1})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseDensity<T = QBeta> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> PiecewiseDensity<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidArgument(
                "need one more breakpoint than values".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("breakpoints must increase".into()));
        }
        if values.iter().any(|v| *v < T::zero()) {
            return Err(Error::InvalidArgument("negative density value".into()));
        }
        Ok(PiecewiseDensity {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(left, right, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&T, &T, &T)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    /// Value at `x`; zero outside the domain.
    pub fn value_at(&self, x: &T) -> T {
        self.pieces()
            .find(|(l, r, _)| *l <= x && x < *r)
            .map_or_else(T::zero, |(_, _, v)| v.clone())
    }

    pub fn integral(&self) -> T {
        self.pieces()
            .fold(T::zero(), |acc, (l, r, v)| acc + v.clone() * (r.clone() - l.clone()))
    }

    /// `∫_{[lo, hi)} f`.
    pub fn integral_over(&self, lo: &T, hi: &T) -> T {
        self.pieces().fold(T::zero(), |acc, (l, r, v)| {
            let a = if lo > l { lo } else { l };
            let b = if hi < r { hi } else { r };
            if a < b {
                acc + v.clone() * (b.clone() - a.clone())
            } else {
                acc
            }
        })
    }
}

impl PiecewiseDensity<QBeta> {
    pub fn to_f64(&self) -> PiecewiseDensity<f64> {
        PiecewiseDensity {
            breakpoints: self.breakpoints.iter().map(QBeta::to_f64).collect(),
            values: self.values.iter().map(QBeta::to_f64).collect(),
        }
    }

    pub fn piece_intervals(&self) -> Vec<Interval> {
        self.pieces()
            .map(|(l, r, _)| Interval::new(l.clone(), r.clone()))
            .collect()
    }
}

/// `16 - 7β`.
pub fn density_normalizer() -> QBeta {
    QBeta::from_ints(16, -7)
}

/// The invariant density of the golden map, in closed form.
pub fn golden_density() -> PiecewiseDensity {
    let b = QBeta::beta_pow;
    let breakpoints = vec![
        QBeta::zero(),
        b(-3),
        b(-2),
        b(-1),
        QBeta::one(),
        b(1),
        QBeta::integer(2),
    ];
    let norm = density_normalizer();
    let values = [
        QBeta::from_ints(1, 2),
        QBeta::from_ints(2, 1),
        QBeta::from_ints(0, 2),
        b(2),
        b(1),
        QBeta::one(),
    ]
    .into_iter()
    .map(|v| v / &norm)
    .collect();
    PiecewiseDensity::new(breakpoints, values).expect("closed form is well formed")
}

/// Sorted distinct right ends of the stack widths, with `0` and `2`.
fn stack_breakpoints() -> Vec<QBeta> {
    let mut pts = vec![QBeta::zero(), QBeta::integer(2)];
    for row in Row::BOTH {
        // all widths occur within the first six levels
        for level in 1..=6 {
            pts.push(Rect::Stack { row, level }.width().right);
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// The density rebuilt from the rectangle measure: over a piece of the
/// base, add the heights of every rectangle whose width covers it, then
/// normalise by the total area of `R`.
pub fn fiber_oracle() -> PiecewiseDensity {
    let breakpoints = stack_breakpoints();
    let mass = total_mass();
    let values = breakpoints
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) * QBeta::ratio(1, 2);
            fiber_height(&mid) / &mass
        })
        .collect();
    PiecewiseDensity::new(breakpoints, values).expect("oracle is well formed")
}

/// `2 + Σ_{(j,n) : x < T^{n-1}x_j} 2/β^n`.
pub fn fiber_height(x: &QBeta) -> QBeta {
    let stacks: QBeta = Row::BOTH
        .iter()
        .map(|&row| {
            stack_series(row, |n| {
                let rect = Rect::Stack { row, level: n };
                if rect.width().contains(x) {
                    rect.height().length()
                } else {
                    QBeta::zero()
                }
            })
        })
        .sum();
    QBeta::integer(2) + stacks
}

/// The density rebuilt from vertical slices of the tower.
pub fn tower_density() -> PiecewiseDensity {
    let mut breakpoints: Vec<QBeta> = tower::outline(6)
        .into_iter()
        .map(|(_, w, _)| w.right)
        .chain(std::iter::once(QBeta::zero()))
        .collect();
    breakpoints.sort();
    breakpoints.dedup();
    let mass = tower::tower_mass();
    let values = breakpoints
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) * QBeta::ratio(1, 2);
            tower::slice_length(&mid) / &mass
        })
        .collect();
    PiecewiseDensity::new(breakpoints, values).expect("slice density is well formed")
}

/// `(Ld)(x) - d(x)` with `(Ld)(x) = β⁻¹ Σ_{j} d((x + j)/β)` over the
/// preimages that fall in their branch.
pub fn transfer_residual(x: &QBeta, d: &PiecewiseDensity) -> Result<QBeta> {
    if x.is_negative() || *x >= QBeta::integer(2) {
        return Err(Error::Domain {
            point: x.to_string(),
            domain: "[0, 2)".into(),
        });
    }
    let collides = |p: &QBeta| d.breakpoints().contains(p);
    if collides(x) {
        return Err(Error::BreakpointCollision(x.to_string()));
    }
    let mut total = QBeta::zero();
    for j in GoldenDigit::ALL {
        let y = (x + j.as_qbeta()).div_beta();
        if j.branch().contains(&y) {
            if collides(&y) {
                return Err(Error::BreakpointCollision(x.to_string()));
            }
            total += d.value_at(&y);
        }
    }
    Ok(total.div_beta() - d.value_at(x))
}

/// One cell of the transfer-operator integral check.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCheck {
    pub cell: Interval,
    /// `∫_E d`.
    pub direct: QBeta,
    /// `Σ_j ∫_{ψ_j(E) ∩ Δ(j)} d` with `ψ_j(t) = (t + j)/β`.
    pub pulled_back: QBeta,
}

impl CellCheck {
    pub fn holds(&self) -> bool {
        self.direct == self.pulled_back
    }
}

/// Integrates `d` over every inverse-branch image of each cell of the
/// common refinement of `d`'s breakpoints and their forward images.
///
/// Both `d` and `Ld` are constant on every cell, so equality of the two
/// integrals on all cells is equality of the functions.
pub fn transfer_integrals(d: &PiecewiseDensity) -> Vec<CellCheck> {
    let two = QBeta::integer(2);
    let mut cuts: Vec<QBeta> = d.breakpoints().to_vec();
    let mut sources: Vec<QBeta> = d.breakpoints().to_vec();
    for j in GoldenDigit::ALL {
        let b = j.branch();
        sources.push(b.left);
        sources.push(b.right);
    }
    for s in &sources {
        for j in GoldenDigit::ALL {
            let t = s.mul_beta() - j.as_qbeta();
            if t.is_positive() && t < two {
                cuts.push(t);
            }
        }
    }
    cuts.push(QBeta::zero());
    cuts.push(two);
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let cell = Interval::new(w[0].clone(), w[1].clone());
            let direct = d.integral_over(&cell.left, &cell.right);
            let inv = QBeta::beta_pow(-1);
            let pulled_back = GoldenDigit::ALL
                .iter()
                .map(|j| {
                    let pre = cell.affine(&inv, &(&inv * j.as_qbeta())).intersect(&j.branch());
                    d.integral_over(&pre.left, &pre.right)
                })
                .sum();
            CellCheck {
                cell,
                direct,
                pulled_back,
            }
        })
        .collect()
}

/// Exact classical greedy map for the golden base: digits `{0, 1}` on
/// `[0, β]`.
fn classical_golden_step(x: &QBeta) -> QBeta {
    let inv = QBeta::beta_pow(-1);
    if *x < inv {
        x.mul_beta()
    } else {
        x.mul_beta() - QBeta::one()
    }
}

/// Truncated classical density `Σ_{n<N} β^{-n} 1_{[0, T_c^n 1)}` for the
/// golden base, normalised exactly. The orbit of `1` reaches `0` after two
/// steps, so every `N ≥ 3` gives the exact density.
pub fn classical_density_golden(truncation: usize) -> PiecewiseDensity {
    let mut orbit = Vec::with_capacity(truncation);
    let mut t = QBeta::one();
    for _ in 0..truncation.max(1) {
        orbit.push(t.clone());
        t = classical_golden_step(&t);
    }
    classical_from_orbit(&orbit, |n| QBeta::beta_pow(-(n as i32)))
}

/// Truncated classical density for a float base `β > 1`.
pub fn classical_density(beta: f64, truncation: usize) -> Result<PiecewiseDensity<f64>> {
    let ds = DigitSet::classical(beta)?;
    let orbit = ds.orbit(1.0, truncation.max(1) - 1)?.iterates;
    Ok(classical_from_orbit(&orbit, |n| beta.powi(-(n as i32))))
}

fn classical_from_orbit<T: Scalar + std::ops::Div<Output = T> + One>(
    orbit: &[T],
    weight: impl Fn(usize) -> T,
) -> PiecewiseDensity<T> {
    let one = T::one();
    let ends: Vec<T> = orbit
        .iter()
        .map(|t| if *t > one { one.clone() } else { t.clone() })
        .collect();
    let mut breakpoints: Vec<T> = ends
        .iter()
        .filter(|t| **t > T::zero())
        .cloned()
        .chain([T::zero(), one.clone()])
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    breakpoints.dedup();
    let norm = ends
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (n, t)| acc + weight(n) * t.clone());
    let values = breakpoints
        .windows(2)
        .map(|w| {
            let raw = ends
                .iter()
                .enumerate()
                .filter(|(_, t)| w[0] < **t)
                .fold(T::zero(), |acc, (n, _)| acc + weight(n));
            raw / norm.clone()
        })
        .collect();
    PiecewiseDensity::new(breakpoints, values).expect("classical density is well formed")
}

/// `μ(E) = ∫_E h` for each interval, using the closed-form density.
pub fn golden_masses(bins: &[Interval]) -> Vec<QBeta> {
    let h = golden_density();
    bins.iter()
        .map(|b| h.integral_over(&b.left, &b.right))
        .collect()
}
