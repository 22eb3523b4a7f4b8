//! The verification suite behind `betadd verify`.
//!
//! Every check has a stable id, the statement it exercises (or
//! `"plumbing"` for checks of the tooling itself), a pass/fail status and,
//! where meaningful, an exact residual or a float deviation.

use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cylinders::{decompose, enumerate, enumerate_exhaustive, mass_of_d, Family};
use crate::greedy::{block_to_string, expand_golden, golden_digit, golden_step, parse_block, GoldenDigit};
use crate::measure::birkhoff::{birkhoff, piece_bins, BirkhoffConfig};
use crate::measure::{
    classical_density, classical_density_golden, fiber_oracle, golden_density, tower_density,
    transfer_integrals, transfer_residual, PiecewiseDensity,
};
use crate::natext::tower::{phi, phi_inverse, tower_mass, tower_step};
use crate::natext::{
    returns_by_cylinder, returns_by_pattern, sample_state, step, step_inverse, total_mass,
    total_mass_truncated, Row,
};
use crate::qbeta::QBeta;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub anchor: &'static str,
    pub status: Status,
    /// Exact residual, rendered, for checks that compare exact values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    /// Largest float deviation, for checks with a tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Drops the runtimes, leaving output that depends only on the inputs.
    pub fn without_timing(mut self) -> Self {
        for c in &mut self.checks {
            c.runtime_ms = None;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random states for the commutation and bijectivity check.
    pub states: usize,
    pub tower_points: usize,
    pub transfer_points: usize,
    pub birkhoff_iters: u64,
    pub shards: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            states: 100_000,
            tower_points: 10_000,
            transfer_points: 1000,
            birkhoff_iters: 1_000_000,
            shards: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Expansion,
    Cylinders,
    Natext,
    Measure,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "expansion" => Ok(Suite::Expansion),
            "cylinders" => Ok(Suite::Cylinders),
            "natext" => Ok(Suite::Natext),
            "measure" => Ok(Suite::Measure),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite {other:?} (all, expansion, cylinders, natext, measure)"
            ))),
        }
    }
}

struct Outcome {
    pass: bool,
    residual: Option<QBeta>,
    delta: Option<f64>,
    detail: String,
}

impl Outcome {
    fn exact(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            residual: None,
            delta: None,
            detail: detail.into(),
        }
    }
}

type CheckFn = fn(&VerifyConfig) -> Outcome;

/// `(id, suite, anchor, check)`.
const CHECKS: &[(&str, Suite, &str, CheckFn)] = &[
    (
        "expansion-reference-points",
        Suite::Expansion,
        "greedy digits of 1 are 02(002)… and of 1/β³ are 00(002)…",
        reference_expansions,
    ),
    (
        "orbit-disjointness",
        Suite::Expansion,
        "the orbits of 1 and 1/β³ are finite and never enter Δ(3)",
        orbit_disjointness,
    ),
    (
        "full-interval-mass",
        Suite::Cylinders,
        "full cylinders D_n have total length 2; D_n and B_n have closed forms",
        full_interval_mass,
    ),
    (
        "subblock-example",
        Suite::Cylinders,
        "2000300002002000 splits into 200, 0, 300002002000",
        subblock_example,
    ),
    (
        "return-pattern",
        Suite::Natext,
        "R_(2,n) returns iff n ≡ 2 mod 3; R_(3,n) iff also n ≥ 5",
        return_pattern,
    ),
    (
        "natext-mass",
        Suite::Natext,
        "area of R is 32 - 14β; area of the tower is 78 - 46β",
        natext_mass,
    ),
    (
        "natext-commutation-bijectivity",
        Suite::Natext,
        "the projection intertwines the maps; the extension is invertible; φ conjugates the two models",
        natext_commutation,
    ),
    (
        "density-three-way",
        Suite::Measure,
        "the invariant density is the normalised fiber length of R",
        density_three_way,
    ),
    ("density-transfer", Suite::Measure, "plumbing", density_transfer),
    (
        "classical-parry",
        Suite::Measure,
        "the classical golden density is β/(3-β) on [0,1/β) and 1/(3-β) on [1/β,1)",
        classical_parry,
    ),
    ("birkhoff-pieces", Suite::Measure, "plumbing", birkhoff_pieces),
];

/// Ids of all checks, in report order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> VerificationReport {
    let checks = CHECKS
        .iter()
        .filter(|(_, s, _, _)| suite == Suite::All || *s == suite)
        .map(|&(id, _, anchor, f)| execute(id, anchor, f, cfg))
        .collect();
    VerificationReport { checks }
}

/// Runs the single check with the given id.
pub fn run_one(id: &str, cfg: &VerifyConfig) -> Result<Check> {
    let &(id, _, anchor, f) = CHECKS
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check {id:?}")))?;
    Ok(execute(id, anchor, f, cfg))
}

fn execute(id: &'static str, anchor: &'static str, f: CheckFn, cfg: &VerifyConfig) -> Check {
    let t0 = Instant::now();
    let out = f(cfg);
    Check {
        id,
        anchor,
        status: if out.pass { Status::Pass } else { Status::Fail },
        residual: out.residual.map(|r| r.to_string()),
        delta: out.delta,
        detail: out.detail,
        runtime_ms: Some(t0.elapsed().as_secs_f64() * 1e3),
    }
}

fn digits(v: &[u8]) -> Vec<GoldenDigit> {
    v.iter()
        .map(|&d| GoldenDigit::try_from(d).expect("literal digit"))
        .collect()
}

fn reference_expansions(_: &VerifyConfig) -> Outcome {
    let one = expand_golden(&QBeta::integer(1), 14);
    let third = expand_golden(&QBeta::beta_pow(-3), 14);
    let want_one = digits(&[0, 2, 0, 0, 2, 0, 0, 2, 0, 0, 2, 0, 0, 2]);
    let want_third = digits(&[0, 0, 0, 0, 2, 0, 0, 2, 0, 0, 2, 0, 0, 2]);
    match (one, third) {
        (Ok(a), Ok(b)) => Outcome::exact(
            a == want_one && b == want_third,
            format!("1: {}, 1/β³: {}", block_to_string(&a), block_to_string(&b)),
        ),
        (Err(e), _) | (_, Err(e)) => Outcome::exact(false, e.to_string()),
    }
}

/// Forward orbit until the first repeat.
fn finite_orbit(x: &QBeta, limit: usize) -> Result<Vec<QBeta>> {
    let mut seen = vec![x.clone()];
    let mut cur = x.clone();
    for _ in 0..limit {
        cur = golden_step(&cur)?.1;
        if seen.contains(&cur) {
            return Ok(seen);
        }
        seen.push(cur.clone());
    }
    Err(Error::InvalidArgument(format!("orbit of {x} did not close")))
}

fn orbit_disjointness(_: &VerifyConfig) -> Outcome {
    let b = QBeta::beta_pow;
    let check = || -> Result<(bool, String)> {
        let mut o1 = finite_orbit(&QBeta::integer(1), 50)?;
        let mut o3 = finite_orbit(&b(-3), 50)?;
        o1.sort();
        o3.sort();
        let mut want1 = vec![b(0), b(1), b(-1)];
        let mut want3 = vec![b(-3), b(-2), b(-1), b(0), b(1)];
        want1.sort();
        want3.sort();
        let mut avoids = true;
        for p in o1.iter().chain(&o3) {
            avoids &= golden_digit(p)? != GoldenDigit::Three;
        }
        let render = |o: &[QBeta]| o.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        Ok((
            o1 == want1 && o3 == want3 && avoids,
            format!("orbit(1) = {{{}}}, orbit(1/β³) = {{{}}}", render(&o1), render(&o3)),
        ))
    };
    match check() {
        Ok((pass, detail)) => Outcome::exact(pass, detail),
        Err(e) => Outcome::exact(false, e.to_string()),
    }
}

fn full_interval_mass(_: &VerifyConfig) -> Outcome {
    let two_over_beta = QBeta::integer(2) * QBeta::beta_pow(-1);
    let n1 = mass_of_d(1) == two_over_beta;
    let n3 = mass_of_d(3) == &two_over_beta + QBeta::integer(2) * QBeta::beta_pow(-3);
    let m60 = mass_of_d(60);
    let delta = (m60.to_f64() - 2.0).abs();
    let mut brute = true;
    for n in 1..=12 {
        for fam in [Family::D, Family::B] {
            brute &= enumerate(n, fam) == enumerate_exhaustive(n, fam);
        }
    }
    Outcome {
        pass: n1 && n3 && delta < 1e-6 && brute,
        residual: Some(QBeta::integer(2) - &m60),
        delta: Some(delta),
        detail: format!(
            "N=1 {}, N=3 {}, |Σ_{{n≤60}} - 2| = {delta:.3e}, closed forms vs enumeration (n ≤ 12) {}",
            ok(n1),
            ok(n3),
            ok(brute)
        ),
    }
}

fn subblock_example(_: &VerifyConfig) -> Outcome {
    let got = parse_block("2000300002002000").and_then(|b| decompose(&b));
    match got {
        Ok(d) => {
            let parts = d.block_strings();
            Outcome::exact(
                parts == ["200", "0", "300002002000"],
                parts.join(" | "),
            )
        }
        Err(e) => Outcome::exact(false, e.to_string()),
    }
}

fn return_pattern(_: &VerifyConfig) -> Outcome {
    let mut mismatches = Vec::new();
    for row in Row::BOTH {
        for n in 1..=200 {
            if returns_by_cylinder(row, n) != returns_by_pattern(row, n) {
                mismatches.push(format!("({}, {n})", row.tag()));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "cylinder test and congruence agree for n ≤ 200".to_string()
    } else {
        format!("mismatches at {}", mismatches.join(", "))
    };
    Outcome::exact(mismatches.is_empty(), detail)
}

fn natext_mass(_: &VerifyConfig) -> Outcome {
    let area = total_mass();
    let want = QBeta::from_ints(32, -14);
    let tower = tower_mass();
    let tower_want = QBeta::from_ints(78, -46);
    let scaled = &want * QBeta::beta_pow(-2) == tower_want;
    let delta = (total_mass_truncated(60).to_f64() - 9.347524).abs();
    Outcome {
        pass: area == want && tower == tower_want && scaled && delta < 1e-6,
        residual: Some(&area - &want),
        delta: Some(delta),
        detail: format!("area {area}, tower {tower}, |truncated(60) - 9.347524| = {delta:.3e}"),
    }
}

/// Splits `count` draws into chunks with their own generator stream.
fn sharded<T: Send>(
    seed: u64,
    stream_base: u64,
    count: usize,
    f: impl Fn(&mut ChaCha8Rng) -> T + Sync,
) -> Vec<T> {
    const CHUNK: usize = 1000;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_base + c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            (0..n).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

fn natext_commutation(cfg: &VerifyConfig) -> Outcome {
    let states = sharded(cfg.seed, 0, cfg.states, |rng| {
        let s = sample_state(rng, 30);
        let res = (|| -> Result<[bool; 3]> {
            let t = step(&s)?;
            let factor = t.x == golden_step(&s.x)?.1;
            let back = step_inverse(&t)? == s;
            let fwd = step(&step_inverse(&s)?)? == s;
            Ok([factor, back, fwd])
        })();
        res.unwrap_or([false; 3])
    });
    let tower = sharded(cfg.seed, 1 << 32, cfg.tower_points, |rng| {
        let s = sample_state(rng, 30);
        (|| -> Result<bool> {
            let p = phi_inverse(&s)?;
            Ok(phi(&tower_step(&p)?)? == step(&phi(&p)?)?)
        })()
        .unwrap_or(false)
    });
    let bad = |i: usize| states.iter().filter(|r| !r[i]).count();
    let (f, b, w) = (bad(0), bad(1), bad(2));
    let t = tower.iter().filter(|&&x| !x).count();
    Outcome::exact(
        f + b + w + t == 0,
        format!(
            "{} states: {f} factor, {b} inverse∘step, {w} step∘inverse failures; {} tower points: {t} conjugacy failures",
            cfg.states, cfg.tower_points
        ),
    )
}

fn same_density(a: &PiecewiseDensity, b: &PiecewiseDensity) -> bool {
    a.breakpoints() == b.breakpoints() && a.values() == b.values()
}

fn density_three_way(_: &VerifyConfig) -> Outcome {
    let h = golden_density();
    let fiber = same_density(&h, &fiber_oracle());
    let tower = same_density(&h, &tower_density());
    let integral = h.integral();
    let shape = h.breakpoints().len() == 7 && h.values().len() == 6;
    let one = QBeta::integer(1);
    Outcome {
        pass: fiber && tower && shape && integral == one,
        residual: Some(&integral - &one),
        delta: None,
        detail: format!(
            "closed form vs fiber oracle {}, vs tower slices {}, ∫h = {integral}",
            ok(fiber),
            ok(tower)
        ),
    }
}

/// A random rational in `[0, 2)` with denominator at most `2^20`.
fn random_rational(rng: &mut ChaCha8Rng) -> QBeta {
    let den: i64 = rng.gen_range(1..=1 << 20);
    let num: i64 = rng.gen_range(0..2 * den);
    QBeta::ratio(num, den)
}

fn density_transfer(cfg: &VerifyConfig) -> Outcome {
    let h = golden_density();
    let residuals = sharded(cfg.seed, 2 << 32, cfg.transfer_points, |rng| loop {
        match transfer_residual(&random_rational(rng), &h) {
            Err(Error::BreakpointCollision(_)) => continue,
            other => break other,
        }
    });
    let mut worst = QBeta::integer(0);
    let mut errors = 0;
    for r in &residuals {
        match r {
            Ok(r) if r.abs() > worst => worst = r.abs(),
            Ok(_) => {}
            Err(_) => errors += 1,
        }
    }
    let cells = transfer_integrals(&h);
    let cells_ok = cells.iter().all(|c| c.holds());
    Outcome {
        pass: errors == 0 && worst == QBeta::integer(0) && cells_ok,
        residual: Some(worst),
        delta: None,
        detail: format!(
            "{} points, {errors} errors; {} cells of the integral check {}",
            residuals.len(),
            cells.len(),
            ok(cells_ok)
        ),
    }
}

fn classical_parry(_: &VerifyConfig) -> Outcome {
    let h = classical_density_golden(10);
    let b = QBeta::beta();
    let three_minus = QBeta::integer(3) - &b;
    let low = &b / &three_minus;
    let high = QBeta::integer(1) / &three_minus;
    let exact = h.len() == 2 && h.values() == [low.clone(), high.clone()];
    let sqrt5 = 5f64.sqrt();
    let want = [(5.0 + 3.0 * sqrt5) / 10.0, (5.0 + sqrt5) / 10.0];
    let got = [low.to_f64(), high.to_f64()];
    let float = classical_density(crate::qbeta::BETA_F64, 60);
    let float_delta = float
        .as_ref()
        .map(|f| {
            // the float orbit of 1 misses 0, so compare values away from the tiny extra pieces
            [(0.3, want[0]), (0.8, want[1])]
                .iter()
                .map(|(x, v)| (f.value_at(x) - v).abs())
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    let delta = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: exact && delta < 1e-12 && float_delta < 1e-6,
        residual: None,
        delta: Some(delta),
        detail: format!(
            "values {} and {}; float-base density within {float_delta:.1e}",
            low.to_decimal(12),
            high.to_decimal(12)
        ),
    }
}

fn birkhoff_pieces(cfg: &VerifyConfig) -> Outcome {
    let run = birkhoff(
        &piece_bins(),
        &BirkhoffConfig {
            iters: cfg.birkhoff_iters,
            seed: cfg.seed,
            shards: cfg.shards,
            start: None,
        },
    );
    match run {
        Ok(r) => {
            let delta = r.max_deviation();
            Outcome {
                pass: r.rows.len() == 6 && delta < 0.01,
                residual: None,
                delta: Some(delta),
                detail: format!("{} iterations, max |observed - μ(piece)| = {delta:.2e}", r.iters),
            }
        }
        Err(e) => Outcome::exact(false, e.to_string()),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}
