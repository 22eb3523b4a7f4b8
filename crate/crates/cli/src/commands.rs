use std::io::Write;
use std::path::PathBuf;

use betadd::cylinders::{self, Cylinder, Family};
use betadd::greedy::{self, DigitSet};
use betadd::measure::birkhoff::{birkhoff, piece_bins, refined_piece_bins, uniform_bins, BirkhoffConfig};
use betadd::measure::{self, PiecewiseDensity};
use betadd::natext::tower::{self, TowerPoint};
use betadd::natext::{self, RState, Rect};
use betadd::plotdata;
use betadd::verify::{self, Status, Suite, VerifyConfig};
use betadd::{Interval, QBeta};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::output::{f, Format, Num, Output, Style};
use crate::{Command, Outcome};

#[derive(Debug)]
pub enum CliError {
    Core(betadd::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<betadd::Error> for CliError {
    fn from(e: betadd::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(betadd::Error::InvalidArgument(msg.into()))
}

fn parse_q(s: &str) -> Result<QBeta> {
    Ok(s.parse::<QBeta>()?)
}

/// A float given either as a decimal literal or as an element of `Q(β)`.
fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .or_else(|_| s.parse::<QBeta>().map(|q| q.to_f64()))
        .map_err(CliError::from)
}

pub fn run(
    cmd: &Command,
    style: Style,
    format: Format,
    seed: u64,
    out: &mut impl Write,
) -> Result<Outcome> {
    let (output, outcome) = match cmd {
        Command::Expand(a) => (expand(a, style)?, Outcome::Ok),
        Command::Cylinder(a) => (cylinder(a, style)?, Outcome::Ok),
        Command::Enumerate(a) => (enumerate(a, style)?, Outcome::Ok),
        Command::Density(a) => (density(a, style)?, Outcome::Ok),
        Command::Natext(a) => (natext(a, style)?, Outcome::Ok),
        Command::Birkhoff(a) => (birkhoff_cmd(a, seed)?, Outcome::Ok),
        Command::Verify(a) => verify_cmd(a, seed)?,
        Command::Plotdata(a) => return plot(a, seed, out),
    };
    output.write(format, out)?;
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    /// β the golden ratio, digits {0, 2, 3}, exact arithmetic.
    Golden,
    /// Digits {0, …, ⌊β⌋} for a float base.
    Classical,
    /// A float base with an explicit digit set.
    Deleted,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    /// The point, e.g. `1`, `3/2`, `b^-3`, `2b - 2` (a decimal for float systems).
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Number of digits.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SystemKind::Golden)]
    system: SystemKind,
    /// Base for the float systems.
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated digits for `--system deleted`, e.g. `0,2,3`.
    #[arg(long, value_delimiter = ',')]
    digits: Vec<f64>,
}

fn expand(a: &ExpandArgs, style: Style) -> Result<Output> {
    if a.system == SystemKind::Golden {
        let x = parse_q(&a.x)?;
        let orbit = greedy::golden_orbit(&x, a.n)?;
        let digits: Vec<u8> = orbit.digits.iter().map(|d| d.value()).collect();
        let rows = orbit
            .iterates
            .iter()
            .enumerate()
            .map(|(k, t)| {
                vec![
                    k.to_string(),
                    orbit.digits.get(k).map(|d| d.value().to_string()).unwrap_or_default(),
                    t.to_string(),
                    f(t.to_f64()),
                ]
            })
            .collect();
        let json = json!({
            "system": "golden",
            "x": style.num(&x),
            "n": a.n,
            "digits": digits,
            "block": greedy::block_to_string(&orbit.digits),
            "orbit": style.nums(&orbit.iterates),
        });
        return Ok(Output::new(json, vec!["k", "digit", "iterate", "iterate_float"], rows));
    }
    let beta = a
        .beta
        .ok_or_else(|| invalid("--beta is required for float systems"))?;
    let ds = match a.system {
        SystemKind::Classical => DigitSet::classical(beta)?,
        _ => {
            if a.digits.is_empty() {
                return Err(invalid("--digits is required for --system deleted"));
            }
            DigitSet::new(a.digits.clone(), beta)?
        }
    };
    let x = parse_float(&a.x)?;
    let orbit = ds.orbit(x, a.n)?;
    let rows = orbit
        .iterates
        .iter()
        .enumerate()
        .map(|(k, t)| {
            vec![
                k.to_string(),
                orbit.digits.get(k).map(|&d| f(d)).unwrap_or_default(),
                f(*t),
                f(*t),
            ]
        })
        .collect();
    let json = json!({
        "system": if a.system == SystemKind::Classical { "classical" } else { "deleted" },
        "beta": beta,
        "digit_set": ds.digits(),
        "x": x,
        "n": a.n,
        "digits": orbit.digits,
        "orbit": orbit.iterates,
    });
    Ok(Output::new(json, vec!["k", "digit", "iterate", "iterate_float"], rows))
}

#[derive(Serialize)]
struct CylinderRecord {
    block: String,
    left: Num,
    right: Num,
    rank: usize,
    full: bool,
    length: Num,
}

fn cylinder_record(c: &Cylinder, style: Style) -> CylinderRecord {
    CylinderRecord {
        block: c.block_string(),
        left: style.num(&c.interval.left),
        right: style.num(&c.interval.right),
        rank: c.rank(),
        full: c.full,
        length: style.num(&c.interval.length()),
    }
}

const CYLINDER_HEADER: [&str; 7] = ["block", "rank", "full", "left", "right", "left_float", "right_float"];

fn cylinder_row(c: &Cylinder) -> Vec<String> {
    vec![
        c.block_string(),
        c.rank().to_string(),
        c.full.to_string(),
        c.interval.left.to_string(),
        c.interval.right.to_string(),
        f(c.interval.left.to_f64()),
        f(c.interval.right.to_f64()),
    ]
}

#[derive(Args, Debug)]
pub struct CylinderArgs {
    /// Digit block over {0, 2, 3}, e.g. `200`.
    #[arg(long)]
    block: String,
    /// Also report the image Tⁿ of the cylinder.
    #[arg(long)]
    image: bool,
    /// Also split the (full) block at its return times.
    #[arg(long)]
    decompose: bool,
}

fn interval_json(iv: &Interval, style: Style) -> serde_json::Value {
    json!({ "left": style.num(&iv.left), "right": style.num(&iv.right) })
}

fn cylinder(a: &CylinderArgs, style: Style) -> Result<Output> {
    let c = cylinders::cylinder_str(&a.block)?;
    let mut json = serde_json::to_value(cylinder_record(&c, style)).expect("serializable");
    if a.image {
        let block = greedy::parse_block(&a.block)?;
        json["image"] = interval_json(&cylinders::image(&block)?, style);
    }
    if a.decompose {
        let block = greedy::parse_block(&a.block)?;
        let d = cylinders::decompose(&block)?;
        json["decomposition"] = json!({
            "blocks": d.block_strings(),
            "return_times": d.return_times,
        });
    }
    Ok(Output::new(json, CYLINDER_HEADER.to_vec(), vec![cylinder_row(&c)]))
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    rank: usize,
    /// `all`, `D` (first-full cylinders) or `B` (non-full, outside every full one).
    #[arg(long, default_value = "all")]
    family: String,
    /// Search the digit tree instead of using the closed forms.
    #[arg(long)]
    exhaustive: bool,
}

/// Above this rank the digit tree is too large to walk.
const MAX_EXHAUSTIVE_RANK: usize = 24;

fn enumerate(a: &EnumerateArgs, style: Style) -> Result<Output> {
    let family: Family = a.family.parse()?;
    if a.rank == 0 {
        return Err(invalid("--rank must be at least 1"));
    }
    let walks = a.exhaustive || family == Family::All;
    if walks && a.rank > MAX_EXHAUSTIVE_RANK {
        return Err(invalid(format!(
            "exhaustive enumeration is limited to rank {MAX_EXHAUSTIVE_RANK}"
        )));
    }
    let cs = if a.exhaustive {
        cylinders::enumerate_exhaustive(a.rank, family)
    } else {
        cylinders::enumerate(a.rank, family)
    };
    let records: Vec<CylinderRecord> = cs.iter().map(|c| cylinder_record(c, style)).collect();
    let json = json!({
        "rank": a.rank,
        "family": a.family,
        "count": cs.len(),
        "total_length": style.num(&cylinders::total_length(&cs)),
        "cylinders": records,
    });
    Ok(Output::new(
        json,
        CYLINDER_HEADER.to_vec(),
        cs.iter().map(cylinder_row).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensitySource {
    /// The closed form.
    Closed,
    /// Normalised fiber lengths of the rectangle model.
    Fiber,
    /// Normalised vertical slices of the tower.
    Tower,
    /// The classical Parry density.
    Classical,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value_t = DensitySource::Closed)]
    source: DensitySource,
    /// Terms of the classical series.
    #[arg(long, default_value_t = 60)]
    truncation: usize,
    /// Float base for `--source classical`; the golden base is exact.
    #[arg(long)]
    beta: Option<f64>,
    /// Also evaluate the density at this point.
    #[arg(long)]
    at: Option<String>,
}

fn density(a: &DensityArgs, style: Style) -> Result<Output> {
    if a.truncation == 0 {
        return Err(invalid("--truncation must be at least 1"));
    }
    if let (DensitySource::Classical, Some(beta)) = (a.source, a.beta) {
        let h = measure::classical_density(beta, a.truncation)?;
        let rows = h
            .pieces()
            .map(|(l, r, v)| vec![f(*l), f(*r), f(*v), f(*v)])
            .collect();
        let json = json!({
            "source": "classical",
            "beta": beta,
            "truncation": a.truncation,
            "breakpoints": h.breakpoints(),
            "values": h.values(),
            "integral": h.integral(),
        });
        return Ok(Output::new(json, vec!["left", "right", "value", "value_float"], rows));
    }
    let (name, h): (&str, PiecewiseDensity) = match a.source {
        DensitySource::Closed => ("closed", measure::golden_density()),
        DensitySource::Fiber => ("fiber", measure::fiber_oracle()),
        DensitySource::Tower => ("tower", measure::tower_density()),
        DensitySource::Classical => ("classical", measure::classical_density_golden(a.truncation)),
    };
    let rows = h
        .pieces()
        .map(|(l, r, v)| vec![l.to_string(), r.to_string(), v.to_string(), f(v.to_f64())])
        .collect();
    let mut json = json!({
        "source": name,
        "breakpoints": style.nums(h.breakpoints()),
        "values": style.nums(h.values()),
        "integral": style.num(&h.integral()),
    });
    if let Some(at) = &a.at {
        let x = parse_q(at)?;
        json["at"] = json!({ "x": style.num(&x), "value": style.num(&h.value_at(&x)) });
    }
    Ok(Output::new(json, vec!["left", "right", "value", "value_float"], rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Rectangles R_0, R_(j,n) with the map 𝒯.
    Rect,
    /// The planar tower with the conjugate map.
    Tower,
}

#[derive(Args, Debug)]
pub struct NatextArgs {
    #[arg(long, value_enum, default_value_t = Model::Rect)]
    model: Model,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    y: String,
    /// Stack tag of the start rectangle: 0 for R_0, else 2 or 3.
    #[arg(long, default_value_t = 0)]
    j: u8,
    /// Level of the start rectangle (0 for R_0).
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Step backwards with the inverse map.
    #[arg(long)]
    inverse: bool,
}

#[derive(Serialize)]
struct StateRecord {
    x: Num,
    y: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
}

fn natext_trajectory(a: &NatextArgs) -> Result<Vec<(QBeta, QBeta, Option<Rect>)>> {
    let x = parse_q(&a.x)?;
    let y = parse_q(&a.y)?;
    let mut path = Vec::with_capacity(a.steps + 1);
    match a.model {
        Model::Rect => {
            let mut s = RState::new(x, y, Rect::from_tag_level(a.j, a.n)?);
            s.validate()?;
            path.push((s.x.clone(), s.y.clone(), Some(s.rect)));
            for _ in 0..a.steps {
                s = if a.inverse {
                    natext::step_inverse(&s)?
                } else {
                    natext::step(&s)?
                };
                path.push((s.x.clone(), s.y.clone(), Some(s.rect)));
            }
        }
        Model::Tower => {
            let mut p = TowerPoint::new(x, y);
            tower::phi(&p)?;
            path.push((p.x.clone(), p.y.clone(), None));
            for _ in 0..a.steps {
                p = if a.inverse {
                    tower::tower_step_inverse(&p)?
                } else {
                    tower::tower_step(&p)?
                };
                path.push((p.x.clone(), p.y.clone(), None));
            }
        }
    }
    Ok(path)
}

fn natext(a: &NatextArgs, style: Style) -> Result<Output> {
    let path = natext_trajectory(a)?;
    let records: Vec<StateRecord> = path
        .iter()
        .map(|(x, y, r)| StateRecord {
            x: style.num(x),
            y: style.num(y),
            j: r.map(Rect::tag),
            n: r.map(Rect::level),
        })
        .collect();
    let rows = path
        .iter()
        .enumerate()
        .map(|(k, (x, y, r))| {
            vec![
                k.to_string(),
                x.to_string(),
                y.to_string(),
                r.map(|r| r.tag().to_string()).unwrap_or_default(),
                r.map(|r| r.level().to_string()).unwrap_or_default(),
                f(x.to_f64()),
                f(y.to_f64()),
            ]
        })
        .collect();
    let (model, mass) = match a.model {
        Model::Rect => ("rect", natext::total_mass()),
        Model::Tower => ("tower", tower::tower_mass()),
    };
    let json = json!({
        "model": model,
        "inverse": a.inverse,
        "mass": style.num(&mass),
        "trajectory": records,
    });
    Ok(Output::new(
        json,
        vec!["k", "x", "y", "j", "n", "x_float", "y_float"],
        rows,
    ))
}

#[derive(Args, Debug)]
pub struct BirkhoffArgs {
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    /// `pieces`, `uniform:K` or `refined:K`.
    #[arg(long, default_value = "pieces")]
    bins: String,
    /// Start point; forces a single stream.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    /// Independent seeded streams.
    #[arg(long, default_value_t = 8)]
    shards: usize,
}

fn parse_bins(spec: &str) -> Result<Vec<Interval>> {
    let count = |k: &str| {
        k.parse::<usize>()
            .map_err(|_| invalid(format!("bad bin count {k:?}")))
    };
    match spec.split_once(':') {
        None if spec == "pieces" => Ok(piece_bins()),
        Some(("uniform", k)) => Ok(uniform_bins(count(k)?)?),
        Some(("refined", k)) => Ok(refined_piece_bins(count(k)?)?),
        _ => Err(invalid(format!(
            "unknown bins {spec:?} (pieces, uniform:K, refined:K)"
        ))),
    }
}

fn birkhoff_cmd(a: &BirkhoffArgs, seed: u64) -> Result<Output> {
    let bins = parse_bins(&a.bins)?;
    let r = birkhoff(
        &bins,
        &BirkhoffConfig {
            iters: a.iters,
            seed,
            shards: a.shards,
            start: a.start,
        },
    )?;
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                f(row.bin_left),
                f(row.bin_right),
                f(row.observed),
                f(row.expected),
                f(row.deviation()),
            ]
        })
        .collect();
    let expected: Vec<String> = r.exact_expected.iter().map(|m| m.to_string()).collect();
    let json = json!({
        "iters": r.iters,
        "seed": seed,
        "shards": a.shards,
        "rows": r.rows,
        "expected_exact": expected,
        "max_deviation": r.max_deviation(),
    });
    Ok(Output::new(
        json,
        vec!["bin_left", "bin_right", "observed", "expected", "deviation"],
        rows,
    ))
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `all`, `expansion`, `cylinders`, `natext` or `measure`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Run a single check by id.
    #[arg(long)]
    check: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    states: usize,
    #[arg(long, default_value_t = 10_000)]
    tower_points: usize,
    #[arg(long, default_value_t = 1000)]
    transfer_points: usize,
    #[arg(long, default_value_t = 1_000_000)]
    iters: u64,
    /// Leave runtimes out so the output depends only on the flags.
    #[arg(long)]
    no_timing: bool,
}

fn verify_cmd(a: &VerifyArgs, seed: u64) -> Result<(Output, Outcome)> {
    let cfg = VerifyConfig {
        seed,
        states: a.states,
        tower_points: a.tower_points,
        transfer_points: a.transfer_points,
        birkhoff_iters: a.iters,
        ..VerifyConfig::default()
    };
    let mut report = match &a.check {
        Some(id) => verify::VerificationReport {
            checks: vec![verify::run_one(id, &cfg)?],
        },
        None => verify::run(a.suite.parse::<Suite>()?, &cfg),
    };
    if a.no_timing {
        report = report.without_timing();
    }
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.id.to_string(),
                c.anchor.to_string(),
                if c.status == Status::Pass { "pass" } else { "fail" }.to_string(),
                c.residual.clone().unwrap_or_default(),
                c.delta.map(f).unwrap_or_default(),
                c.runtime_ms.map(f).unwrap_or_default(),
                c.detail.clone(),
            ]
        })
        .collect();
    let outcome = if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Failed
    };
    let json = json!({ "passed": report.passed(), "checks": report.checks });
    Ok((
        Output::new(
            json,
            vec!["id", "anchor", "status", "residual", "delta", "runtime_ms", "detail"],
            rows,
        ),
        outcome,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Graph of the golden map with its branch breakpoints.
    Map,
    /// Step function of the invariant density.
    Density,
    /// Outlines of the tower strips.
    Tower,
    /// (x, y) points of a natural-extension trajectory.
    Orbit,
    /// Delay pairs (x_k, x_{k+1}) of a seeded float orbit of the map.
    Delay,
}

#[derive(Args, Debug)]
pub struct PlotdataArgs {
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stack levels drawn by `--kind tower`.
    #[arg(long, default_value_t = 12)]
    levels: u32,
    /// Start x for `--kind orbit` (rectangle R_0).
    #[arg(long, default_value = "1/3")]
    x: String,
    /// Start y for `--kind orbit`.
    #[arg(long, default_value = "1/5")]
    y: String,
    /// Points in an orbit.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

fn plot(a: &PlotdataArgs, seed: u64, out: &mut impl Write) -> Result<Outcome> {
    let table = match a.kind {
        PlotKind::Map => plotdata::map_graph(),
        PlotKind::Density => plotdata::density_steps(&measure::golden_density()),
        PlotKind::Tower => plotdata::tower_outline(a.levels),
        PlotKind::Orbit => {
            let path = natext_trajectory(&NatextArgs {
                model: Model::Rect,
                x: a.x.clone(),
                y: a.y.clone(),
                j: 0,
                n: 0,
                steps: a.steps.saturating_sub(1),
                inverse: false,
            })?;
            let pts: Vec<(f64, f64)> = if a.steps == 0 {
                Vec::new()
            } else {
                path.iter().map(|(x, y, _)| (x.to_f64(), y.to_f64())).collect()
            };
            plotdata::orbit_scatter("natural extension orbit in R", &pts)
        }
        PlotKind::Delay => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut x: f64 = rng.gen_range(0.0..2.0);
            let mut orbit = Vec::with_capacity(a.steps + 1);
            if a.steps > 0 {
                orbit.push(x);
                for _ in 0..a.steps {
                    x = greedy::golden_step_f64(x).1;
                    orbit.push(x);
                }
            }
            plotdata::orbit_scatter("delay pairs of a float orbit", &plotdata::delay_pairs(&orbit))
        }
    };
    let text = table.render();
    match &a.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Outcome::Ok)
}
