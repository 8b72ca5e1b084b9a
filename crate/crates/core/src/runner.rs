//! Sweep plans, artifact output and the named verification suites.
//!
//! CSV bodies depend only on the plan; wall-clock data goes to a sibling
//! `.meta.json`. Every file is written to a temporary name in the target
//! directory and renamed into place.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{all_char_sums, CharIndex, RingCtx, RingElem, DEFAULT_TRANSFORM_BUDGET};
use crate::cubic::{self, FormCase};
use crate::energy::{self, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, DEFAULT_DLOG_BUDGET};
use crate::rng::Lcg64;
use crate::sets::{self, ExponentRule, IntervalSpec};
use crate::sums::{self, ChiSelector, OmegaMode, SweepSpec};
use crate::weil::{self, WeilCheck, WlmReport};

/// Exit status for each error class.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        Error::Numerical(_) => 1,
        _ => 2,
    }
}

/// `{"error": kind, "message": text}`.
pub fn error_json(e: &Error) -> serde_json::Value {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    #[serde(default = "default_enumeration")]
    pub max_enumeration: u64,
    #[serde(default = "default_transform")]
    pub max_transform_len: u64,
}

fn default_enumeration() -> u64 {
    DEFAULT_ENUMERATION_BUDGET
}

fn default_transform() -> u64 {
    DEFAULT_TRANSFORM_BUDGET
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_enumeration: DEFAULT_ENUMERATION_BUDGET,
            max_transform_len: DEFAULT_TRANSFORM_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanKind {
    Sweep,
    WeilExhaust,
    Wlm,
}

impl PlanKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlanKind::Sweep => "sweep",
            PlanKind::WeilExhaust => "weil-exhaust",
            PlanKind::Wlm => "wlm",
        }
    }
}

fn default_d() -> usize {
    3
}

fn default_mode() -> OmegaMode {
    OmegaMode::All
}

/// A replayable experiment: one command kind over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub command: PlanKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub p_list: Vec<u64>,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub rho_list: Vec<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub chi: Vec<ChiSelector>,
    #[serde(default = "default_mode")]
    pub omega_mode: OmegaMode,
    /// `K` for the moment runs.
    #[serde(default)]
    pub k: Option<IntervalSpec>,
    #[serde(default)]
    pub r: Option<u32>,
    /// Largest polynomial degree in Weil runs.
    #[serde(default)]
    pub max_deg: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("plan: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn output_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.command.name().to_string())
    }

    /// Every cell fully specified and in range.
    pub fn validate(&self) -> Result<()> {
        for &p in &self.p_list {
            arith::check_prime(p)?;
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s < 11.0 / 16.0) {
                return Err(Error::Domain(format!("sigma = {s} outside (0, 11/16)")));
            }
        }
        for &rho in &self.rho_list {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::Domain(format!("rho = {rho} outside (0, 1)")));
            }
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(Error::Domain(format!("unusable output name {name:?}")));
            }
        }
        let cells = !self.p_list.is_empty();
        match self.command {
            PlanKind::Sweep => {
                if self.d != 3 {
                    return Err(Error::Domain("sweeps run over F_{p^3}".into()));
                }
                if cells && (self.rho_list.is_empty() || self.chi.is_empty()) {
                    return Err(Error::Domain("sweep needs rho_list and chi".into()));
                }
                for &p in &self.p_list {
                    if p < 3 {
                        return Err(Error::Domain("sweeps need odd p".into()));
                    }
                }
            }
            PlanKind::WeilExhaust => {}
            PlanKind::Wlm => {
                if cells && (self.k.is_none() || self.r.is_none() || self.chi.is_empty()) {
                    return Err(Error::Domain("moment runs need k, r and chi".into()));
                }
                if self.r == Some(0) {
                    return Err(Error::Domain("r must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// CSV row of a Weil run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilRow {
    pub q: u64,
    pub n: usize,
    pub chi: String,
    pub dd: u64,
    pub f: String,
    pub m: u64,
    pub sum_mag: f64,
    pub bound: f64,
    pub admissible: bool,
    pub pass: bool,
}

impl From<&WeilCheck> for WeilRow {
    fn from(c: &WeilCheck) -> Self {
        let f: Vec<String> = c.f.iter().map(u64::to_string).collect();
        Self {
            q: c.q,
            n: c.n,
            chi: c.chi.to_string(),
            dd: c.dd,
            f: f.join(" "),
            m: c.m,
            sum_mag: c.sum_mag,
            bound: c.bound,
            admissible: c.admissible,
            pass: c.pass,
        }
    }
}

/// CSV row of a moment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WlmRow {
    pub p: u64,
    pub chi: String,
    pub dd: u64,
    pub k_start: i64,
    pub k_len: u64,
    pub r: u32,
    pub seed: u64,
    pub moment: f64,
    pub root: f64,
    pub bound: f64,
    pub bad_tuples: String,
    pub bad_limit: String,
}

impl WlmRow {
    fn new(w: &WlmReport, seed: u64) -> Self {
        Self {
            p: w.p,
            chi: w.chi.to_string(),
            dd: w.dd,
            k_start: w.k.start,
            k_len: w.k.length,
            r: w.r,
            seed,
            moment: w.moment,
            root: w.root,
            bound: w.bound,
            bad_tuples: w.bad_tuples.to_string(),
            bad_limit: w.bad_limit.to_string(),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", file.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// CSV with a header row even when `rows` is empty.
pub fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Appends one JSON document per row to `path`.
pub fn append_jsonl<T: Serialize>(path: &Path, command: &str, seed: u64, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::new();
    for row in rows {
        let line = serde_json::json!({ "command": command, "seed": seed, "row": row });
        serde_json::to_writer(&mut buf, &line)?;
        buf.push(b'\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub const SWEEP_HEADER: &[&str] = &[
    "p",
    "d",
    "rho",
    "chi_class",
    "chi",
    "restriction_trivial",
    "omega_mode",
    "seed",
    "n_omega",
    "interval_len",
    "median_ratio",
    "max_ratio",
    "aligned",
];
pub const WEIL_HEADER: &[&str] = &[
    "q",
    "n",
    "chi",
    "dd",
    "f",
    "m",
    "sum_mag",
    "bound",
    "admissible",
    "pass",
];
pub const WLM_HEADER: &[&str] = &[
    "p",
    "chi",
    "dd",
    "k_start",
    "k_len",
    "r",
    "seed",
    "moment",
    "root",
    "bound",
    "bad_tuples",
    "bad_limit",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub store: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violations: Option<PathBuf>,
    pub rows: usize,
    /// Rows that fail a hard check (Weil violations).
    pub failures: usize,
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Executes `plan`, writing `<name>.csv`, `<name>.meta.json` and appending
/// to `<command>.jsonl` under `out_dir`.
pub fn run(plan: &SweepPlan, out_dir: &Path) -> Result<RunOutcome> {
    plan.validate()?;
    let started = unix_time();
    let name = plan.output_name();
    let csv_path = out_dir.join(format!("{name}.csv"));
    let store = out_dir.join(format!("{}.jsonl", plan.command.name()));
    let budget = plan.budgets.max_enumeration;
    let mut violations_path = None;
    let (body, rows, failures) = match plan.command {
        PlanKind::Sweep => {
            let rows = sums::cancellation_sweep(&SweepSpec {
                p_list: plan.p_list.clone(),
                rho_list: plan.rho_list.clone(),
                chi: plan.chi.clone(),
                omega_mode: plan.omega_mode,
                seed: plan.seed,
                budget,
            })?;
            append_jsonl(&store, plan.command.name(), plan.seed, &rows)?;
            (csv_bytes(SWEEP_HEADER, &rows)?, rows.len(), 0)
        }
        PlanKind::WeilExhaust => {
            let rep = weil::weil_exhaust(&plan.p_list, plan.max_deg.unwrap_or(3), budget)?;
            let rows: Vec<WeilRow> = rep.cells.iter().map(WeilRow::from).collect();
            let vpath = out_dir.join(format!("{name}.violations.jsonl"));
            let mut vbuf = Vec::new();
            for v in &rep.violations {
                serde_json::to_writer(&mut vbuf, v)?;
                vbuf.push(b'\n');
            }
            write_atomic(&vpath, &vbuf)?;
            violations_path = Some(vpath);
            let summary = serde_json::json!({
                "cells": rep.cells.len(),
                "admissible": rep.admissible,
                "violations": rep.violations.len(),
                "primes": plan.p_list,
            });
            append_jsonl(&store, plan.command.name(), plan.seed, &[summary])?;
            (csv_bytes(WEIL_HEADER, &rows)?, rows.len(), rep.violations.len())
        }
        PlanKind::Wlm => {
            let mut rows = Vec::new();
            if let (Some(k), Some(r)) = (plan.k, plan.r) {
                for &p in &plan.p_list {
                    let ctx = FieldCtx::new(p, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
                    for sel in &plan.chi {
                        let chi = sel.resolve(&ctx)?;
                        rows.push(WlmRow::new(&weil::wlm_moment(p, &chi, k, r, budget)?, plan.seed));
                    }
                }
            }
            append_jsonl(&store, plan.command.name(), plan.seed, &rows)?;
            (csv_bytes(WLM_HEADER, &rows)?, rows.len(), 0)
        }
    };
    write_atomic(&csv_path, &body)?;
    let meta_path = out_dir.join(format!("{name}.meta.json"));
    let meta = serde_json::json!({
        "plan": plan,
        "started_unix": started,
        "finished_unix": unix_time(),
        "rows": rows,
        "failures": failures,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_atomic(&meta_path, &serde_json::to_vec_pretty(&meta)?)?;
    Ok(RunOutcome {
        csv: csv_path,
        meta: meta_path,
        store,
        violations: violations_path,
        rows,
        failures,
    })
}

// ---- verification suites ------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EnergyIdentity,
    Weil,
    Parseval,
    Forms,
    Repcount,
    Thresholds,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Thresholds,
        Suite::EnergyIdentity,
        Suite::Weil,
        Suite::Parseval,
        Suite::Forms,
        Suite::Repcount,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::EnergyIdentity => "energy-identity",
            Suite::Weil => "weil",
            Suite::Parseval => "parseval",
            Suite::Forms => "forms",
            Suite::Repcount => "repcount",
            Suite::Thresholds => "thresholds",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checked: u64,
    /// One line per failing input, with the input spelled out.
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, checked: u64, failures: Vec<String>) -> Self {
        Self {
            suite: suite.name().into(),
            pass: failures.is_empty(),
            checked,
            failures,
        }
    }
}

/// Published threshold values for `d = 3..6`.
pub const THRESHOLD_TABLE: [(u32, f64); 4] = [(3, 0.375), (4, 0.417), (5, 0.438), (6, 0.447)];
pub const THRESHOLD_TOLERANCE: f64 = 1e-3;

/// Rings used by the randomized identity suites.
pub fn identity_rings() -> Result<Vec<RingCtx>> {
    let f = |p, d| -> Result<FieldCtx> { FieldCtx::new(p, d, 0)?.with_dlog(DEFAULT_DLOG_BUDGET) };
    let mut rings = Vec::new();
    for p in [2, 3, 5, 7, 11, 13] {
        rings.push(RingCtx::single(f(p, 1)?)?);
    }
    for p in [2, 3, 5] {
        rings.push(RingCtx::single(f(p, 2)?)?);
    }
    rings.push(RingCtx::new(vec![f(3, 1)?, f(5, 1)?])?);
    Ok(rings)
}

fn ring_label(ring: &RingCtx) -> String {
    let parts: Vec<String> = ring
        .components()
        .iter()
        .map(|c| format!("F_{}^{}", c.p(), c.d()))
        .collect();
    parts.join("x")
}

/// A random element of `ring`, zero coordinates allowed.
pub fn random_elem(ring: &RingCtx, rng: &mut Lcg64) -> RingElem {
    RingElem(ring.components().iter().map(|c| rng.below(c.size())).collect())
}

fn show_sets(sets: &[Vec<RingElem>]) -> String {
    let s: Vec<String> = sets
        .iter()
        .map(|a| {
            let e: Vec<String> = a.iter().map(|x| format!("{:?}", x.0)).collect();
            format!("{{{}}}", e.join(","))
        })
        .collect();
    s.join(" ")
}

fn suite_thresholds() -> Result<SuiteReport> {
    let mut failures = Vec::new();
    for (d, want) in THRESHOLD_TABLE {
        let got = sums::rho_threshold(d)?;
        if (got - want).abs() > THRESHOLD_TOLERANCE {
            failures.push(format!("d={d}: computed {got:.6}, table {want}"));
        }
    }
    Ok(SuiteReport::new(
        Suite::Thresholds,
        THRESHOLD_TABLE.len() as u64,
        failures,
    ))
}

fn suite_energy(budgets: &Budgets, seed: u64) -> Result<SuiteReport> {
    let rings = identity_rings()?;
    let mut rng = Lcg64::new(seed);
    let mut failures = Vec::new();
    let cases = 240u64;
    for case in 0..cases {
        let ring = &rings[(case as usize) % rings.len()];
        let n_sets = 1 + rng.below(3) as usize;
        let sets: Vec<Vec<RingElem>> = (0..n_sets)
            .map(|_| (0..rng.below(7)).map(|_| random_elem(ring, &mut rng)).collect())
            .collect();
        let brute = energy::energy_brute(&sets, ring, budgets.max_enumeration)?;
        match energy::energy_spectral(&sets, ring, budgets.max_transform_len) {
            Ok(spec) if spec.value == brute.value => {}
            Ok(spec) => failures.push(format!(
                "{} {}: brute {} spectral {}",
                ring_label(ring),
                show_sets(&sets),
                brute.value,
                spec.value
            )),
            Err(e) => failures.push(format!("{} {}: {e}", ring_label(ring), show_sets(&sets))),
        }
    }
    Ok(SuiteReport::new(Suite::EnergyIdentity, cases, failures))
}

fn suite_parseval(budgets: &Budgets, seed: u64) -> Result<SuiteReport> {
    let mut rng = Lcg64::new(seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    for ring in identity_rings()? {
        let n = ring.unit_group_size();
        let units: Vec<RingElem> = (0..ring.components().iter().map(FieldCtx::size).product::<u64>())
            .map(|key| ring.unpack(key))
            .filter(|a| ring.is_unit(a))
            .collect();
        let all = all_char_sums(&units, &ring, budgets.max_transform_len)?;
        for (chi, v) in all.iter() {
            if !chi.is_trivial() && v.norm() > 1e-9 {
                failures.push(format!("{}: chi {chi} sums to {v} over the units", ring_label(&ring)));
            }
        }
        for _ in 0..100 {
            let subset: Vec<RingElem> = units.iter().filter(|_| rng.below(2) == 1).cloned().collect();
            let sums = all_char_sums(&subset, &ring, budgets.max_transform_len)?;
            let lhs: f64 = sums.values().iter().map(|v| v.norm_sqr()).sum();
            let rhs = (n * subset.len() as u64) as f64;
            if (lhs - rhs).abs() > 1e-6 {
                failures.push(format!(
                    "{} {}: {lhs} != {rhs}",
                    ring_label(&ring),
                    show_sets(&[subset])
                ));
            }
            checked += 1;
        }
    }
    Ok(SuiteReport::new(Suite::Parseval, checked, failures))
}

fn suite_weil(budgets: &Budgets) -> Result<SuiteReport> {
    let budget = budgets.max_enumeration.max(1 << 30);
    let base = weil::weil_exhaust(&weil::primes_up_to(31), 3, budget)?;
    let ext = weil::weil_extension_suite(&[3, 5, 7], 2, 2)?;
    let failures = base
        .violations
        .iter()
        .chain(&ext.violations)
        .map(|v| {
            format!(
                "q={} n={} chi={} f={:?}: |S|={} > {}",
                v.q, v.n, v.chi, v.f, v.sum_mag, v.bound
            )
        })
        .collect();
    Ok(SuiteReport::new(
        Suite::Weil,
        (base.cells.len() + ext.cells.len()) as u64,
        failures,
    ))
}

fn suite_forms() -> Result<SuiteReport> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [5u64, 7, 11, 13] {
        let all = cubic::enumerate_nondegenerate(p)?;
        let mut counts: HashMap<FormCase, u64> = HashMap::new();
        for (f, class) in &all {
            *counts.entry(class.case).or_insert(0) += 1;
            if class.reconstruct(p) != Some(*f) {
                failures.push(format!("p={p} {f:?}: reconstruction mismatch"));
            }
            checked += 1;
        }
        let expect = [
            (FormCase::Irreducible, (p * p * p - p) / 3),
            (FormCase::LinearTimesQuadratic, p * p * (p - 1) / 2),
            (FormCase::Split, p * (p - 1) * (p - 2) / 6),
        ];
        for (case, want) in expect {
            let got = counts.get(&case).copied().unwrap_or(0);
            if got != want {
                failures.push(format!("p={p} case {}: {got} forms, expected {want}", case.number()));
            }
        }
        if all.len() as u64 != p * p * p - p * p {
            failures.push(format!("p={p}: {} non-degenerate forms", all.len()));
        }
    }
    Ok(SuiteReport::new(Suite::Forms, checked, failures))
}

fn suite_repcount(budgets: &Budgets) -> Result<SuiteReport> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [11u64, 13] {
        let ctx = FieldCtx::new(p, 3, 0)?;
        let ring = RingCtx::single(ctx.clone())?;
        for rule in [ExponentRule::SetDef, ExponentRule::ProofCard] {
            let q = sets::box_elements(&ctx, &sets::q_box(&ctx, 0.4)?)?;
            let q0 = sets::box_elements(&ctx, &sets::q0_box(&ctx, 0.4, rule)?)?;
            let wrap = |v: &[u64]| v.iter().map(|&e| RingElem(vec![e])).collect::<Vec<_>>();
            let got = energy::rep_count_max(&wrap(&q), &wrap(&q0), &ring, budgets.max_enumeration)?;
            // second route: field multiplication on encodings
            let mut hist: HashMap<u64, u64> = HashMap::new();
            for &a in &q {
                for &b in &q0 {
                    if a != 0 && b != 0 {
                        *hist.entry(ctx.mul_enc(a, b)).or_insert(0) += 1;
                    }
                }
            }
            let best = hist.iter().map(|(&k, &c)| (c, std::cmp::Reverse(k))).max();
            let want = best.map_or(0, |(c, _)| c);
            let want_arg = best.map(|(_, std::cmp::Reverse(k))| RingElem(vec![k]));
            let units = (q.iter().filter(|&&a| a != 0).count() * q0.iter().filter(|&&b| b != 0).count()) as u64;
            if got.max_count != want || got.argmax != want_arg || got.unit_pairs != units {
                failures.push(format!(
                    "p={p} rule={rule:?}: max {} at {:?} over {} pairs, second route {want} at {want_arg:?} over {units}",
                    got.max_count, got.argmax, got.unit_pairs
                ));
            }
            checked += 1;
        }
    }
    Ok(SuiteReport::new(Suite::Repcount, checked, failures))
}

/// Runs one named suite.
pub fn verify_suite(suite: Suite, budgets: &Budgets, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Thresholds => suite_thresholds(),
        Suite::EnergyIdentity => suite_energy(budgets, seed),
        Suite::Parseval => suite_parseval(budgets, seed),
        Suite::Weil => suite_weil(budgets),
        Suite::Forms => suite_forms(),
        Suite::Repcount => suite_repcount(budgets),
    }
}

/// Convenience for single-field character selectors given as strings.
pub fn resolve_chis(ctx: &FieldCtx, selectors: &[ChiSelector]) -> Result<Vec<CharIndex>> {
    selectors.iter().map(|s| s.resolve(ctx)).collect()
}

/// `start:len` or a bare length (start 1).
pub fn parse_interval(s: &str) -> Result<IntervalSpec> {
    let bad = |e: std::num::ParseIntError| Error::Parse(format!("interval {s:?}: {e}"));
    match s.split_once(':') {
        Some((a, b)) => Ok(IntervalSpec::new(
            a.trim().parse().map_err(bad)?,
            b.trim().parse().map_err(bad)?,
        )),
        None => Ok(IntervalSpec::new(1, s.trim().parse().map_err(bad)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn plan_parsing_and_validation() {
        let plan = SweepPlan::from_json(r#"{"command":"sweep","p_list":[],"seed":0}"#).unwrap();
        plan.validate().unwrap();
        let bad =
            SweepPlan::from_json(r#"{"command":"sweep","p_list":[9],"rho_list":[0.45],"chi":["order=2"]}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::NotPrime(9))));
        assert!(SweepPlan::from_json(r#"{"command":"bogus"}"#).is_err());
        let sig = SweepPlan::from_json(r#"{"command":"wlm","sigma":0.7}"#).unwrap();
        assert!(matches!(sig.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn intervals_parse() {
        assert_eq!(parse_interval("3:4").unwrap(), IntervalSpec::new(3, 4));
        assert_eq!(parse_interval("5").unwrap(), IntervalSpec::new(1, 5));
        assert!(parse_interval("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::capacity("x", 2, 1)), 3);
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
    }
}
