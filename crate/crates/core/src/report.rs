//! Report generation behind the command-line front end: deterministic CSV
//! and JSON output for every table and figure dataset.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::attack::{
    aggregate, spot_check, sweep, AttackSummary, ErrorProfile, MessageMode, OracleGuess, Reduction,
    SpotCheck, Strategy, SweepConfig, SweepGrid,
};
use crate::error::{Error, Result};
use crate::grover::{iteration_schedule, success_probability};
use crate::mub::PhaseLabel;
use crate::oracles::{half_error_fraction, pi_error_fraction, printed_half_error_fraction};
use crate::protocol::{chunk_message, honest_run, InitialState, OmegaChoice};

/// JSON schema description shipped with every release.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

/// Registers from this size up are written as difference classes unless
/// expansion is requested.
pub const COMPACT_FROM_PARTICIPANTS: usize = 5;

/// Largest class-value difference tolerated by the sweep spot check.
pub const SPOT_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Usage(format!(
                "unknown format `{s}`, expected csv or json"
            ))),
        }
    }
}

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// JSON number rounded to 9 significant digits.
pub fn num(x: f64) -> Value {
    let r = sig9(x);
    Value::from(if r == 0.0 { 0.0 } else { r })
}

/// A table with a declared column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), Value::from(command));
        Self {
            command: command.into(),
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.into(), value);
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_csv_line(&mut out, self.columns.iter().map(|c| c.as_str().into()));
        for row in &self.rows {
            write_csv_line(&mut out, row.iter().map(csv_cell));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(r.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        envelope(&self.meta, Value::Array(data))
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn envelope(meta: &Map<String, Value>, data: Value) -> String {
    let mut s =
        serde_json::to_string_pretty(&json!({ "meta": meta, "data": data })).expect("serializable");
    s.push('\n');
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv_line(out: &mut String, cells: impl Iterator<Item = String>) {
    let mut first = true;
    for cell in cells {
        if !first {
            out.push(',');
        }
        first = false;
        if cell.contains([',', '"', '\n']) {
            out.push('"');
            out.push_str(&cell.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(&cell);
        }
    }
    out.push('\n');
}

fn participants_of(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Optimal phase and success probabilities per register size.
pub fn cmd_grover_table(dims: &[usize]) -> Result<Report> {
    let mut report = Report::new(
        "grover-table",
        &["qubits", "d", "omega_star", "p_omega_star", "p_pi", "k"],
    );
    for &d in dims {
        let q = participants_of(d)?;
        let sched = iteration_schedule(q)?;
        report.push(vec![
            Value::from(q),
            Value::from(d),
            num(sched.omega_star),
            num(success_probability(d, sched.omega_star, sched.k)),
            num(success_probability(d, PI, sched.k)),
            Value::from(sched.k),
        ]);
    }
    Ok(report)
}

/// Success probability over `Ω ∈ [0, 2π]` at the schedule's iteration count.
pub fn cmd_omega_scan(dim: usize, steps: usize) -> Result<Report> {
    if steps < 2 {
        return Err(Error::Usage("an Ω scan needs at least 2 steps".into()));
    }
    let sched = iteration_schedule(participants_of(dim)?)?;
    let mut report = Report::new("omega-scan", &["omega", "probability"])
        .meta("d", Value::from(dim))
        .meta("k", Value::from(sched.k))
        .meta("omega_star", num(sched.omega_star));
    for i in 0..steps {
        let omega = TAU * i as f64 / (steps - 1) as f64;
        report.push(vec![
            num(omega),
            num(success_probability(dim, omega, sched.k)),
        ]);
    }
    Ok(report)
}

/// Everything `cmd_sweep` needs beyond the sweep itself.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub sweep: SweepConfig,
    pub omega_mode: OmegaChoice,
    pub expand: bool,
    pub seed: u64,
    pub spot_checks: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub grid: SweepGrid,
    pub summary: AttackSummary,
    pub spot_check: Option<SpotCheck>,
    /// Summary document as written to disk.
    pub summary_json: String,
    pub files: Vec<PathBuf>,
}

fn message_label(m: MessageMode) -> Value {
    match m {
        MessageMode::Fixed(v) => Value::from(v),
        MessageMode::Average => Value::from("avg"),
    }
}

fn oracle_label(o: OracleGuess) -> Value {
    match o {
        OracleGuess::Fixed(v) => Value::from(v),
        OracleGuess::Average => Value::from("avg"),
    }
}

fn reduction_label(r: Reduction) -> &'static str {
    match r {
        Reduction::Full => "full",
        Reduction::DiffClass => "diff",
    }
}

fn sweep_meta(req: &SweepRequest, grid: &SweepGrid, layout: &str) -> Map<String, Value> {
    let c = &req.sweep;
    let s = &grid.schedule;
    let mut m = Map::new();
    m.insert("command".into(), Value::from("sweep"));
    m.insert("participants".into(), Value::from(c.participants));
    m.insert("strategy".into(), Value::from(c.strategy.name()));
    m.insert("omega_mode".into(), Value::from(req.omega_mode.to_string()));
    m.insert("omega".into(), num(c.omega));
    m.insert("message".into(), message_label(c.message));
    if c.strategy == Strategy::WrongOracle {
        m.insert("oracle".into(), oracle_label(c.oracle_guess));
    }
    m.insert(
        "reduction".into(),
        Value::from(reduction_label(c.reduction)),
    );
    m.insert(
        "schedule".into(),
        json!({ "d": s.dim, "k": s.k, "k1": s.k1, "k2": s.k2, "omega_star": num(s.omega_star) }),
    );
    m.insert("seed".into(), Value::from(req.seed));
    m.insert("layout".into(), Value::from(layout));
    m
}

fn difference_string(q: usize, class: usize) -> String {
    let s = InitialState::from_index(q, class + 1).expect("class in range");
    s.labels()
        .iter()
        .map(|l| l.symbol())
        .collect::<Vec<_>>()
        .join(" ")
}

fn profile_of_class(q: usize, class: usize) -> ErrorProfile {
    let s = InitialState::from_index(q, class + 1).expect("class in range");
    crate::attack::error_profile(&InitialState::uniform(q, PhaseLabel::Plus), &s)
        .expect("same size")
}

/// Mean value per difference class, averaged over its members.
fn class_means(grid: &SweepGrid) -> Vec<f64> {
    match grid.reduction() {
        Reduction::DiffClass => grid.stored().to_vec(),
        Reduction::Full => {
            let n = grid.states;
            let mut sums = vec![0.0; n];
            for r in 0..n {
                for c in 0..n {
                    sums[grid.class_of(r, c)] += grid.get(r, c);
                }
            }
            sums.iter().map(|s| s / n as f64).collect()
        }
    }
}

fn grid_document(req: &SweepRequest, grid: &SweepGrid, matrix: bool) -> String {
    let q = grid.participants();
    let n = grid.states;
    let layout = if matrix { "matrix" } else { "classes" };
    let meta = sweep_meta(req, grid, layout);
    if matrix {
        match req.format {
            OutputFormat::Csv => {
                let mut out = String::new();
                write_csv_line(
                    &mut out,
                    std::iter::once("true_index".to_string()).chain((1..=n).map(|i| i.to_string())),
                );
                for r in 0..n {
                    write_csv_line(
                        &mut out,
                        std::iter::once((r + 1).to_string())
                            .chain(grid.row(r).into_iter().map(|v| csv_cell(&num(v)))),
                    );
                }
                out
            }
            OutputFormat::Json => {
                let data: Vec<Value> = (0..n)
                    .map(|r| json!({ "true_index": r + 1, "values": grid.row(r).into_iter().map(num).collect::<Vec<_>>() }))
                    .collect();
                envelope(&meta, Value::Array(data))
            }
        }
    } else {
        let mut report = Report::new(
            "sweep",
            &[
                "class_index",
                "difference",
                "n_half",
                "n_pi",
                "p_m",
                "pairs",
            ],
        );
        report.meta = meta;
        for (class, v) in class_means(grid).into_iter().enumerate() {
            let p = profile_of_class(q, class);
            report.push(vec![
                Value::from(class + 1),
                Value::from(difference_string(q, class)),
                Value::from(p.n_half),
                Value::from(p.n_pi),
                num(v),
                Value::from(n),
            ]);
        }
        report.render(req.format)
    }
}

fn summary_document(
    req: &SweepRequest,
    grid: &SweepGrid,
    summary: &AttackSummary,
    spot: Option<&SpotCheck>,
    layout: &str,
) -> String {
    let meta = sweep_meta(req, grid, layout);
    let histogram: Vec<Value> = summary
        .histogram
        .iter()
        .map(|b| json!({ "probability": num(b.probability), "count": b.count }))
        .collect();
    let spot = spot.map(|s| json!({ "samples": s.samples, "max_abs_diff": num(s.max_abs_diff) }));
    envelope(
        &meta,
        json!({ "p_s": num(summary.p_s), "p_g": num(summary.p_g), "histogram": histogram, "spot_check": spot }),
    )
}

/// `<stem>.summary.json` next to `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}.summary.json"))
}

/// Runs a sweep and writes the grid and its summary. Outputs do not depend
/// on the worker count.
pub fn cmd_sweep(req: &SweepRequest) -> Result<SweepOutcome> {
    let grid = sweep(&req.sweep)?;
    let summary = aggregate(&grid);
    let spot = if req.spot_checks > 0 && req.sweep.reduction == Reduction::DiffClass {
        Some(spot_check(&req.sweep, req.spot_checks, req.seed)?)
    } else {
        None
    };
    let matrix = req.expand || req.sweep.participants < COMPACT_FROM_PARTICIPANTS;
    let layout = if matrix { "matrix" } else { "classes" };
    let summary_json = summary_document(req, &grid, &summary, spot.as_ref(), layout);
    let mut files = Vec::new();
    if let Some(out) = &req.out {
        let grid_doc = grid_document(req, &grid, matrix);
        let sp = summary_path(out);
        fs::write(out, grid_doc)?;
        fs::write(&sp, &summary_json)?;
        files.push(out.clone());
        files.push(sp);
    }
    if let Some(s) = &spot {
        if s.max_abs_diff > SPOT_CHECK_TOLERANCE {
            return Err(Error::Verification(format!(
                "difference-class spot check deviates by {:e} over {} samples",
                s.max_abs_diff, s.samples
            )));
        }
    }
    Ok(SweepOutcome {
        grid,
        summary,
        spot_check: spot,
        summary_json,
        files,
    })
}

/// Row of a printed table: which error group and the printed cells.
struct PrintedRow {
    group: Group,
    cells: &'static [(f64, Option<u64>)],
}

/// Error group of a table row: `r` half errors, or at least one π error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Group {
    Half(usize),
    Pi,
}

impl Group {
    fn of(p: ErrorProfile) -> Self {
        if p.n_pi > 0 {
            Group::Pi
        } else {
            Group::Half(p.n_half)
        }
    }

    fn label(self, q: usize) -> String {
        match self {
            Group::Half(r) => r.to_string(),
            Group::Pi => (q + 1).to_string(),
        }
    }

    fn condition(self) -> String {
        match self {
            Group::Half(0) => "all phases equal".into(),
            Group::Half(1) => "one phase off by pi/2 and the rest equal".into(),
            Group::Half(r) => format!("{r} phases off by pi/2 and the rest equal"),
            Group::Pi => "some phase off by pi".into(),
        }
    }
}

/// Observed `(probability bin, pair count)` sub-classes per group.
fn observed_groups(grid: &SweepGrid) -> BTreeMap<Group, BTreeMap<i64, u64>> {
    let q = grid.participants();
    let mut out: BTreeMap<Group, BTreeMap<i64, u64>> = BTreeMap::new();
    for (class, v) in class_means(grid).into_iter().enumerate() {
        let g = Group::of(profile_of_class(q, class));
        *out.entry(g)
            .or_default()
            .entry((v * 1e6).round() as i64)
            .or_default() += grid.states as u64;
    }
    out
}

fn ratio_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A reproduced table plus the cells that failed the gate.
#[derive(Debug, Clone)]
pub struct TableOutcome {
    pub report: Report,
    pub deviations: Vec<String>,
}

const TABLE_COLUMNS: [&str; 9] = [
    "row",
    "condition",
    "omega",
    "p_m",
    "n_m",
    "fraction",
    "printed_p_m",
    "printed_n_m",
    "status",
];

const TABLE2_PI: [PrintedRow; 4] = [
    PrintedRow {
        group: Group::Half(0),
        cells: &[(1.0, Some(16))],
    },
    PrintedRow {
        group: Group::Half(1),
        cells: &[(0.5, Some(64))],
    },
    PrintedRow {
        group: Group::Half(2),
        cells: &[(0.25, Some(64))],
    },
    PrintedRow {
        group: Group::Pi,
        cells: &[(0.0, Some(112))],
    },
];

const TABLE4_PI: [PrintedRow; 5] = [
    PrintedRow {
        group: Group::Half(0),
        cells: &[(0.9453, Some(64))],
    },
    PrintedRow {
        group: Group::Half(1),
        cells: &[(0.4766, Some(384))],
    },
    PrintedRow {
        group: Group::Half(2),
        cells: &[(0.2891, Some(384)), (0.1953, Some(512))],
    },
    PrintedRow {
        group: Group::Half(3),
        cells: &[(0.1953, Some(384)), (0.1016, None)],
    },
    PrintedRow {
        group: Group::Pi,
        cells: &[(0.00781, Some(2368))],
    },
];

const TABLE4_OPT: [PrintedRow; 5] = [
    PrintedRow {
        group: Group::Half(0),
        cells: &[(1.0, Some(64))],
    },
    PrintedRow {
        group: Group::Half(1),
        cells: &[(0.5, Some(384))],
    },
    PrintedRow {
        group: Group::Half(2),
        cells: &[(0.25, Some(768))],
    },
    PrintedRow {
        group: Group::Half(3),
        cells: &[(0.125, Some(512))],
    },
    PrintedRow {
        group: Group::Pi,
        cells: &[(0.0, Some(2368))],
    },
];

/// Compares one column block of a printed table with a sweep. Printed
/// values are matched to observed sub-classes within `tol`; counts are gated
/// unless the printed row lists several sub-classes, whose partition the
/// table does not define.
fn compare_block(
    report: &mut Report,
    deviations: &mut Vec<String>,
    grid: &SweepGrid,
    omega_label: &str,
    printed: &[PrintedRow],
    tol: f64,
) {
    let q = grid.participants();
    let total = grid.states as u64 * grid.states as u64;
    let observed = observed_groups(grid);
    for row in printed {
        let obs = observed.get(&row.group).cloned().unwrap_or_default();
        let split = row.cells.len() > 1;
        let mut matched = vec![false; row.cells.len()];
        for (&bin, &count) in &obs {
            let p = bin as f64 / 1e6;
            let hit = row.cells.iter().position(|&(pp, _)| (p - pp).abs() <= tol);
            let (printed_p, printed_n, status) = match hit {
                Some(i) => {
                    matched[i] = true;
                    let (pp, pn) = row.cells[i];
                    let status = match pn {
                        Some(n) if n == count => "ok",
                        None => "count-not-printed",
                        Some(_) if split => "split-count-unverified",
                        Some(n) => {
                            deviations.push(format!(
                                "row {} at {omega_label}: {count} pairs with P = {p}, printed {n}",
                                row.group.label(q)
                            ));
                            "mismatch"
                        }
                    };
                    (
                        num(pp),
                        pn.map_or(Value::Null, |n| Value::from(n.to_string())),
                        status,
                    )
                }
                None if split => (Value::Null, Value::Null, "extra-sub-class"),
                None => {
                    deviations.push(format!(
                        "row {} at {omega_label}: observed P = {p} not printed",
                        row.group.label(q)
                    ));
                    (Value::Null, Value::Null, "mismatch")
                }
            };
            report.push(vec![
                Value::from(row.group.label(q)),
                Value::from(row.group.condition()),
                Value::from(omega_label),
                num(p),
                Value::from(count),
                Value::from(ratio_string(Ratio::new(count, total))),
                printed_p,
                printed_n,
                Value::from(status),
            ]);
        }
        for (i, &(pp, pn)) in row.cells.iter().enumerate() {
            if !matched[i] {
                deviations.push(format!(
                    "row {} at {omega_label}: printed P = {pp} not observed",
                    row.group.label(q)
                ));
                report.push(vec![
                    Value::from(row.group.label(q)),
                    Value::from(row.group.condition()),
                    Value::from(omega_label),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    num(pp),
                    pn.map_or(Value::Null, |n| Value::from(n.to_string())),
                    Value::from("mismatch"),
                ]);
            }
        }
    }
}

fn table_sweep(q: usize, omega: f64, message: MessageMode, workers: usize) -> Result<SweepGrid> {
    let mut cfg = SweepConfig::new(q, Strategy::Complete, omega);
    cfg.reduction = Reduction::DiffClass;
    cfg.message = message;
    cfg.workers = workers;
    sweep(&cfg)
}

/// Reproduces a printed attack table from simulation and exact counts.
/// `participants` only applies to the general table.
pub fn cmd_tables(which: u8, participants: usize, workers: usize) -> Result<TableOutcome> {
    let mut deviations = Vec::new();
    let report = match which {
        2 => {
            let mut r = Report::new("table", &TABLE_COLUMNS)
                .meta("table", Value::from(2))
                .meta("participants", Value::from(2));
            let grid = table_sweep(2, PI, MessageMode::Average, workers)?;
            compare_block(&mut r, &mut deviations, &grid, "pi", &TABLE2_PI, 1e-9);
            r
        }
        4 => {
            let star = iteration_schedule(3)?.omega_star;
            let mut r = Report::new("table", &TABLE_COLUMNS)
                .meta("table", Value::from(4))
                .meta("participants", Value::from(3))
                .meta("pi_message", Value::from(0));
            let pi = table_sweep(3, PI, MessageMode::Fixed(0), workers)?;
            compare_block(&mut r, &mut deviations, &pi, "pi", &TABLE4_PI, 1e-4);
            let opt = table_sweep(3, star, MessageMode::Average, workers)?;
            compare_block(&mut r, &mut deviations, &opt, "opt", &TABLE4_OPT, 1e-9);
            r
        }
        5 => general_table(participants, workers, &mut deviations)?,
        other => {
            return Err(Error::Usage(format!(
                "no table {other}; expected 2, 4 or 5"
            )))
        }
    };
    Ok(TableOutcome { report, deviations })
}

fn general_table(q: usize, workers: usize, deviations: &mut Vec<String>) -> Result<Report> {
    let star = iteration_schedule(q)?.omega_star;
    let grid = table_sweep(q, star, MessageMode::Average, workers)?;
    let total = grid.states as u64 * grid.states as u64;
    let observed = observed_groups(&grid);
    let mut r = Report::new("table", &TABLE_COLUMNS)
        .meta("table", Value::from(5))
        .meta("participants", Value::from(q));
    let groups = (0..=q).map(Group::Half).chain(std::iter::once(Group::Pi));
    for g in groups {
        let (printed_p, exact, printed_frac) = match g {
            Group::Half(0) => (
                1.0,
                half_error_fraction(q, 0)?,
                Ratio::new(1, 1u64 << (2 * q)),
            ),
            Group::Half(k) => (
                (0.5f64).powi(k as i32),
                half_error_fraction(q, k)?,
                printed_half_error_fraction(q, k)?,
            ),
            Group::Pi => (0.0, pi_error_fraction(q)?, pi_error_fraction(q)?),
        };
        let obs = observed.get(&g).cloned().unwrap_or_default();
        let observed_pairs: u64 = obs.values().sum();
        if Ratio::new(observed_pairs, total) != exact {
            deviations.push(format!(
                "row {}: {observed_pairs} pairs observed, expected {}",
                g.label(q),
                ratio_string(exact)
            ));
        }
        for (&bin, &count) in &obs {
            let p = bin as f64 / 1e6;
            let value_ok = (p - printed_p).abs() <= 1e-6;
            if !value_ok {
                deviations.push(format!(
                    "row {}: observed P = {p}, printed {printed_p}",
                    g.label(q)
                ));
            }
            let status = match (value_ok, printed_frac == exact) {
                (false, _) => "mismatch",
                (true, true) => "ok",
                (true, false) => "erratum-printed-fraction",
            };
            r.push(vec![
                Value::from(g.label(q)),
                Value::from(g.condition()),
                Value::from("opt"),
                num(p),
                Value::from(count),
                Value::from(ratio_string(Ratio::new(count, total))),
                num(printed_p),
                Value::from(ratio_string(printed_frac)),
                Value::from(status),
            ]);
        }
    }
    Ok(r)
}

/// Human-readable end-to-end run of the protocol.
pub fn cmd_demo(value: u64, participants: usize, omega: OmegaChoice, seed: u64) -> Result<String> {
    let run = honest_run(value, participants, omega, seed)?;
    let s = &run.schedule;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "secret {value} shared among {participants} participants"
    );
    let _ = writeln!(
        out,
        "register d = {}, k = {} iterations (dealer {}, padlock {}), omega = {:.9}",
        s.dim, s.k, s.k1, s.k2, run.omega
    );
    let chunks = chunk_message(value, participants)?;
    let groups: Vec<String> = chunks
        .iter()
        .map(|c| format!("{c:0participants$b}"))
        .collect();
    let _ = writeln!(out, "binary groups: {}", groups.join(" "));
    for (i, c) in run.chunks.iter().enumerate() {
        let _ = writeln!(
            out,
            "chunk {}: M = {} ({:0w$b})",
            i + 1,
            c.chunk,
            c.chunk,
            w = participants
        );
        let labels: Vec<&str> = c.initial_state.labels().iter().map(|l| l.ket()).collect();
        let _ = writeln!(
            out,
            "  initial state #{}: {}",
            c.initial_state.index(),
            labels.join(" ")
        );
        let amps: Vec<String> = c
            .encoded
            .iter()
            .map(|[re, im]| format!("{re:+.4}{im:+.4}i"))
            .collect();
        let _ = writeln!(out, "  encoded: [{}]", amps.join(", "));
        let _ = writeln!(
            out,
            "  padlock P(M) = {:.9}, measured {}",
            c.probability, c.measured
        );
    }
    let _ = writeln!(out, "decoded secret: {}", run.decoded);
    Ok(out)
}

/// `opt`, `pi` or an angle in radians.
pub fn parse_omega(s: &str) -> Result<OmegaChoice> {
    match s {
        "opt" => Ok(OmegaChoice::Optimal),
        "pi" => Ok(OmegaChoice::Pi),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("invalid omega `{s}`, expected opt, pi or radians")))
            .and_then(|w| OmegaChoice::Explicit(w).validate()),
    }
}

/// `avg` or a chunk value.
pub fn parse_message(s: &str) -> Result<MessageMode> {
    match s {
        "avg" => Ok(MessageMode::Average),
        _ => s
            .parse()
            .map(MessageMode::Fixed)
            .map_err(|_| Error::Usage(format!("invalid message `{s}`"))),
    }
}

/// `avg` or a guessed chunk value.
pub fn parse_oracle(s: &str) -> Result<OracleGuess> {
    match s {
        "avg" => Ok(OracleGuess::Average),
        _ => s
            .parse()
            .map(OracleGuess::Fixed)
            .map_err(|_| Error::Usage(format!("invalid oracle guess `{s}`"))),
    }
}

pub fn parse_reduction(s: &str) -> Result<Reduction> {
    match s {
        "full" => Ok(Reduction::Full),
        "diff" => Ok(Reduction::DiffClass),
        _ => Err(Error::Usage(format!(
            "invalid reduction `{s}`, expected full or diff"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    GroverTable { dims: Vec<usize> },
    OmegaScan { dim: usize, steps: usize },
    Sweep,
    Tables { which: u8 },
    Demo { value: u64 },
}

/// Complete description of one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub participants: usize,
    pub omega: OmegaChoice,
    pub strategy: Strategy,
    pub message: MessageMode,
    pub oracle_guess: OracleGuess,
    /// `None` picks full grids below the compact threshold and classes above.
    pub reduction: Option<Reduction>,
    pub k1: Option<usize>,
    pub allow_insecure: bool,
    pub allow_large_full: bool,
    pub expand: bool,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Zero uses every available core.
    pub workers: usize,
    pub spot_checks: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            participants: 3,
            omega: OmegaChoice::Optimal,
            strategy: Strategy::Complete,
            message: MessageMode::Average,
            oracle_guess: OracleGuess::Average,
            reduction: None,
            k1: None,
            allow_insecure: false,
            allow_large_full: false,
            expand: false,
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
            workers: 0,
            spot_checks: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.omega.validate()?;
        if self.k1.is_some() && !self.allow_insecure {
            return Err(Error::Usage(
                "--k1 changes the secure split and requires --allow-insecure".into(),
            ));
        }
        Ok(())
    }

    fn sweep_request(&self) -> Result<SweepRequest> {
        let q = self.participants;
        let reduction = self.reduction.unwrap_or(if q < COMPACT_FROM_PARTICIPANTS {
            Reduction::Full
        } else {
            Reduction::DiffClass
        });
        let sched = iteration_schedule(q)?;
        let mut sweep = SweepConfig::new(q, self.strategy, self.omega.resolve(&sched));
        sweep.message = self.message;
        sweep.oracle_guess = self.oracle_guess;
        sweep.reduction = reduction;
        sweep.k1 = self.k1;
        sweep.workers = self.workers;
        sweep.allow_large_full = self.allow_large_full;
        Ok(SweepRequest {
            sweep,
            omega_mode: self.omega,
            expand: self.expand,
            seed: self.seed,
            spot_checks: self.spot_checks,
            out: self.output.clone(),
            format: self.format,
        })
    }
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn std::io::Write) -> Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Executes a configuration, writing results to the output path or to
/// `stdout`. Output is written before a verification failure is returned.
pub fn run(cfg: &RunConfig, stdout: &mut dyn std::io::Write) -> Result<()> {
    cfg.validate()?;
    match &cfg.command {
        Command::GroverTable { dims } => {
            emit(cfg, &cmd_grover_table(dims)?.render(cfg.format), stdout)
        }
        Command::OmegaScan { dim, steps } => emit(
            cfg,
            &cmd_omega_scan(*dim, *steps)?.render(cfg.format),
            stdout,
        ),
        Command::Tables { which } => {
            let out = cmd_tables(*which, cfg.participants, cfg.workers)?;
            emit(cfg, &out.report.render(cfg.format), stdout)?;
            if out.deviations.is_empty() {
                Ok(())
            } else {
                Err(Error::Verification(out.deviations.join("; ")))
            }
        }
        Command::Sweep => {
            let req = cfg.sweep_request()?;
            let res = cmd_sweep(&req);
            match &res {
                Ok(o) if req.out.is_none() => stdout.write_all(o.summary_json.as_bytes())?,
                Ok(o) => {
                    for f in &o.files {
                        writeln!(stdout, "wrote {}", f.display())?;
                    }
                }
                Err(_) => {}
            }
            res.map(|_| ())
        }
        Command::Demo { value } => {
            let text = cmd_demo(*value, cfg.participants, cfg.omega, cfg.seed)?;
            emit(cfg, &text, stdout)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_omega("pi").unwrap(), OmegaChoice::Pi);
        assert_eq!(parse_omega("1.5").unwrap(), OmegaChoice::Explicit(1.5));
        assert!(parse_omega("7").is_err());
        assert!(parse_omega("0").is_err());
        assert!(parse_omega("x").is_err());
        assert_eq!(parse_message("avg").unwrap(), MessageMode::Average);
        assert_eq!(parse_message("5").unwrap(), MessageMode::Fixed(5));
        assert_eq!(parse_oracle("2").unwrap(), OracleGuess::Fixed(2));
        assert_eq!(parse_reduction("diff").unwrap(), Reduction::DiffClass);
        assert!(parse_reduction("half").is_err());
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn insecure_split_needs_acknowledgement() {
        let mut cfg = RunConfig::new(Command::Sweep);
        cfg.participants = 2;
        cfg.k1 = Some(0);
        let mut sink = Vec::new();
        assert!(matches!(run(&cfg, &mut sink), Err(Error::Usage(_))));
        cfg.allow_insecure = true;
        run(&cfg, &mut sink).unwrap();
        assert!(String::from_utf8(sink).unwrap().contains("\"k1\": 0"));
    }

    #[test]
    fn sweep_summary_to_stdout() {
        let mut cfg = RunConfig::new(Command::Sweep);
        cfg.participants = 2;
        cfg.omega = OmegaChoice::Pi;
        let mut sink = Vec::new();
        run(&cfg, &mut sink).unwrap();
        let v: Value = serde_json::from_slice(&sink).unwrap();
        assert_eq!(v["data"]["p_s"], num(0.25));
        assert_eq!(v["meta"]["reduction"], "full");
    }

    fn schema() -> Value {
        serde_json::from_str(REPORT_SCHEMA).unwrap()
    }

    fn type_ok(v: &Value, ty: &str) -> bool {
        ty.split('|').any(|t| match t {
            "integer" => v.is_u64() || v.is_i64(),
            "number" => v.is_number(),
            "string" => v.is_string(),
            "array" => v.is_array(),
            "object" => v.is_object(),
            "null" => v.is_null(),
            _ => false,
        })
    }

    /// Checks a document against the shipped schema description.
    fn validate(doc: &str, kind: &str) {
        let v: Value = serde_json::from_str(doc).unwrap();
        let schema = schema();
        for key in schema["required"].as_array().unwrap() {
            assert!(v.get(key.as_str().unwrap()).is_some(), "missing {key}");
        }
        assert!(v["meta"]["command"].is_string());
        let spec = &schema["x-commands"][kind];
        let columns = spec["columns"].as_object().unwrap();
        let records: Vec<&Value> = match spec["data"].as_str().unwrap() {
            "array" => v["data"].as_array().unwrap().iter().collect(),
            _ => vec![&v["data"]],
        };
        for rec in records {
            for (col, ty) in columns {
                assert!(
                    type_ok(&rec[col.as_str()], ty.as_str().unwrap()),
                    "{kind}: {col} = {}",
                    rec[col.as_str()]
                );
            }
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig9(0.945312500123), 0.9453125);
        assert_eq!(sig9(2.1268800323839296), 2.12688003);
        assert_eq!(num(0.25).to_string(), "0.25");
        assert_eq!(num(-0.0).to_string(), "0.0");
    }

    #[test]
    fn csv_quoting() {
        let mut r = Report::new("x", &["a", "b"]);
        r.push(vec![Value::from("p, q"), Value::from(1)]);
        assert_eq!(r.to_csv(), "a,b\n\"p, q\",1\n");
    }

    #[test]
    fn grover_table_rows() {
        let r = cmd_grover_table(&[4, 8]).unwrap();
        assert_eq!(r.rows[0][4], num(1.0));
        assert_eq!(r.rows[1][4], num(0.9453125));
        validate(&r.to_json(), "grover-table");
        assert!(matches!(
            cmd_grover_table(&[6]),
            Err(Error::NotPowerOfTwo(6))
        ));
        assert!(cmd_grover_table(&[2]).is_err());
    }

    #[test]
    fn omega_scan_endpoints() {
        let r = cmd_omega_scan(8, 5).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert_eq!(r.rows[0][1], num(0.125));
        validate(&r.to_json(), "omega-scan");
        assert!(cmd_omega_scan(8, 1).is_err());
    }

    #[test]
    fn tables_two_and_four_pass_the_gate() {
        for t in [2, 4] {
            let out = cmd_tables(t, 3, 1).unwrap();
            assert!(out.deviations.is_empty(), "{:?}", out.deviations);
            validate(&out.report.to_json(), "table");
        }
    }

    #[test]
    fn general_table_three_parties() {
        let out = cmd_tables(5, 3, 1).unwrap();
        assert!(out.deviations.is_empty(), "{:?}", out.deviations);
        let statuses: Vec<&str> = out
            .report
            .rows
            .iter()
            .map(|r| r[8].as_str().unwrap())
            .collect();
        assert!(statuses.contains(&"erratum-printed-fraction"));
        let last = out.report.rows.last().unwrap();
        assert_eq!(last[5], Value::from("37/64"));
        validate(&out.report.to_json(), "table");
        assert!(cmd_tables(3, 3, 1).is_err());
    }

    #[test]
    fn sweep_documents_validate() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = SweepConfig::new(2, Strategy::Complete, PI);
        cfg.workers = 1;
        for (expand, kind, format) in [
            (false, "sweep-grid-matrix", OutputFormat::Json),
            (true, "sweep-grid-matrix", OutputFormat::Csv),
        ] {
            let out = dir.path().join(format!("g{expand}.{}", format.extension()));
            let req = SweepRequest {
                sweep: cfg.clone(),
                omega_mode: OmegaChoice::Pi,
                expand,
                seed: 1,
                spot_checks: 0,
                out: Some(out.clone()),
                format,
            };
            let res = cmd_sweep(&req).unwrap();
            validate(&res.summary_json, "sweep-summary");
            if format == OutputFormat::Json {
                validate(&fs::read_to_string(&out).unwrap(), kind);
            } else {
                let text = fs::read_to_string(&out).unwrap();
                assert!(text.starts_with("true_index,1,2,"));
                assert_eq!(text.lines().count(), 17);
            }
        }
        let mut c5 = SweepConfig::new(5, Strategy::Complete, 2.0);
        c5.reduction = Reduction::DiffClass;
        c5.message = MessageMode::Fixed(3);
        let out = dir.path().join("c.json");
        let req = SweepRequest {
            sweep: c5,
            omega_mode: OmegaChoice::Explicit(2.0),
            expand: false,
            seed: 9,
            spot_checks: 50,
            out: Some(out.clone()),
            format: OutputFormat::Json,
        };
        let res = cmd_sweep(&req).unwrap();
        assert!(res.spot_check.unwrap().max_abs_diff < SPOT_CHECK_TOLERANCE);
        validate(&fs::read_to_string(&out).unwrap(), "sweep-grid-classes");
        assert_eq!(summary_path(&out), dir.path().join("c.summary.json"));
    }

    #[test]
    fn demo_transcript() {
        let t = cmd_demo(23, 2, OmegaChoice::Pi, 5).unwrap();
        assert!(t.contains("binary groups: 01 01 11"));
        assert!(t.ends_with("decoded secret: 23\n"));
        assert!(cmd_demo(0, 2, OmegaChoice::Pi, 5)
            .unwrap()
            .ends_with("decoded secret: 0\n"));
    }
}
