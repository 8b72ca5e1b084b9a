use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use charsum::character::{CharIndex, RingCtx, RingElem};
use charsum::cubic::CubicForm;
use charsum::energy::{self, EnergyReport, DEFAULT_ENUMERATION_BUDGET};
use charsum::runner::{self, Budgets, PlanKind, Suite, SweepPlan};
use charsum::sets::{self, ExponentRule, IntervalSpec};
use charsum::sums::{self, BurgessConfig, ChiSelector, OmegaMode};
use charsum::weil;
use charsum::{Error, FieldCtx, FieldElem};

#[derive(Parser)]
#[command(
    name = "charsum",
    version,
    about = "Character sums, multiplicative energy and Weil-bound checks over finite fields"
)]
struct Cli {
    /// Enumeration budget (steps).
    #[arg(long, global = true, env = "CHARSUM_BUDGET", default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    /// JSON file whose keys override flags (a full plan for `sweep`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field context: minimal polynomial, generator, sizes.
    #[command(args_override_self = true)]
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// sum chi(x + omega y) over I x J in F_{p^3}.
    #[command(args_override_self = true)]
    SumGrid {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        rho: Option<f64>,
        /// `start:len`; defaults to [1, p^rho].
        #[arg(long)]
        i: Option<String>,
        #[arg(long)]
        j: Option<String>,
        /// Hex coefficients of omega, constant first, comma separated.
        #[arg(long, default_value = "0,1")]
        omega: String,
        #[arg(long)]
        chi: String,
    },
    /// Sum over the codimension-one box x_0 + ... + x_{d-2} omega^{d-2}.
    #[command(args_override_self = true)]
    SumSublattice {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        rho: Option<f64>,
        /// Comma-separated `start:len` boxes; defaults to [1, p^rho] each.
        #[arg(long)]
        boxes: Option<String>,
        #[arg(long, default_value = "0,1")]
        omega: String,
        #[arg(long)]
        chi: String,
    },
    /// sum chi(f(x, y)) for a binary cubic form over F_p.
    #[command(args_override_self = true)]
    SumCubic {
        #[arg(long)]
        p: u64,
        /// `a,b,c` for x^3 + a x^2 y + b x y^2 + c y^3.
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        i: Option<String>,
        #[arg(long)]
        j: Option<String>,
        #[arg(long)]
        chi: String,
    },
    /// Grid-sum ratios over all (or sampled) omega in F_{p^3} \ F_p.
    #[command(args_override_self = true)]
    ScanOmega {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        i: Option<String>,
        #[arg(long)]
        j: Option<String>,
        /// Comma-separated selectors: index, order=k, restriction-trivial.
        #[arg(long)]
        chi: String,
        #[arg(long, default_value = "all")]
        omega: String,
    },
    /// E(F_p, Q) and E(Q, Q0), brute force and via characters.
    #[command(args_override_self = true)]
    Energy {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value = "set-def")]
        rule: String,
    },
    /// Largest representation count of products Q * Q0.
    #[command(args_override_self = true)]
    Repcount {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value = "set-def")]
        rule: String,
    },
    /// Amplification decomposition Phi, alpha, beta, gamma.
    #[command(args_override_self = true)]
    Burgess {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = "set-def")]
        rule: String,
        /// Side of every J box; defaults to floor(p^rho).
        #[arg(long)]
        box_len: Option<u64>,
    },
    /// Weil bound over every nontrivial chi and monic f, primes up to p.
    #[command(args_override_self = true)]
    WeilExhaust {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        deg: usize,
    },
    /// Averaged moment over (t + a)(t^2 + b t + c).
    #[command(args_override_self = true)]
    Wlm {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        chi: String,
        /// `start:len`.
        #[arg(long)]
        k: String,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Run a JSON plan (given with --config).
    Sweep,
    /// Run a named verification suite, or `all`.
    Verify { suite: String },
}

type Outcome = Result<(Value, i32), Error>;

fn field(p: u64, d: usize, seed: u64) -> Result<FieldCtx, Error> {
    FieldCtx::new(p, d, seed)?.with_dlog(charsum::field::DEFAULT_DLOG_BUDGET)
}

fn parse_omega(ctx: &FieldCtx, s: &str) -> Result<u64, Error> {
    let coeffs = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            u64::from_str_radix(t.trim_start_matches("0x"), 16)
                .map_err(|e| Error::Parse(format!("omega coefficient {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.len() > ctx.d() {
        return Err(Error::Shape(format!(
            "omega has {} coefficients, d = {}",
            coeffs.len(),
            ctx.d()
        )));
    }
    let mut padded = coeffs;
    padded.resize(ctx.d(), 0);
    ctx.encode(&FieldElem::new(padded))
}

fn interval(p: u64, explicit: &Option<String>, rho: Option<f64>) -> Result<IntervalSpec, Error> {
    match (explicit, rho) {
        (Some(s), _) => runner::parse_interval(s),
        (None, Some(r)) => Ok(IntervalSpec::from_exponent(p, r)),
        (None, None) => Err(Error::Parse("give either an explicit interval or --rho".into())),
    }
}

fn chi_for(ctx: &FieldCtx, s: &str) -> Result<CharIndex, Error> {
    s.parse::<ChiSelector>()?.resolve(ctx)
}

fn rule(s: &str) -> Result<ExponentRule, Error> {
    serde_json::from_value(json!(s)).map_err(|_| Error::Parse(format!("rule {s:?}: expected set-def or proof-card")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(v)?)
}

fn execute(cli: &Cli) -> Outcome {
    let budget = cli.budget;
    let budgets = Budgets {
        max_enumeration: budget,
        ..Budgets::default()
    };
    match &cli.cmd {
        Cmd::Field { p, d } => {
            let ctx = FieldCtx::new(*p, *d, cli.seed)?;
            Ok((
                json!({
                    "spec": ctx.spec(),
                    "size": ctx.size(),
                    "unit_order": ctx.unit_order(),
                    "generator_order": ctx.order_of(&ctx.generator())?,
                }),
                0,
            ))
        }
        Cmd::SumGrid {
            p,
            d,
            rho,
            i,
            j,
            omega,
            chi,
        } => {
            let ctx = field(*p, *d, 0)?;
            let w = parse_omega(&ctx, omega)?;
            let rec = sums::grid_sum(
                &ctx,
                w,
                interval(*p, i, *rho)?,
                interval(*p, j, *rho)?,
                &chi_for(&ctx, chi)?,
                budget,
            )?;
            Ok((to_json(&rec)?, 0))
        }
        Cmd::SumSublattice {
            p,
            d,
            rho,
            boxes,
            omega,
            chi,
        } => {
            let ctx = field(*p, *d, 0)?;
            let w = parse_omega(&ctx, omega)?;
            let boxes = match boxes {
                Some(s) => s
                    .split(',')
                    .map(runner::parse_interval)
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![interval(*p, &None, *rho)?; d.saturating_sub(1)],
            };
            let rec = sums::sublattice_sum(&ctx, w, &boxes, &chi_for(&ctx, chi)?, budget)?;
            Ok((to_json(&rec)?, 0))
        }
        Cmd::SumCubic {
            p,
            form,
            rho,
            i,
            j,
            chi,
        } => {
            let c: Vec<i64> = form
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|e| Error::Parse(format!("form coefficient {t:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if c.len() != 3 {
                return Err(Error::Parse("form needs three coefficients a,b,c".into()));
            }
            let f = CubicForm::new(c[0], c[1], c[2], *p);
            let ctx = field(*p, 1, 0)?;
            let rec = sums::cubic_form_sum(
                *p,
                &f,
                interval(*p, i, *rho)?,
                interval(*p, j, *rho)?,
                &chi_for(&ctx, chi)?,
                budget,
            )?;
            Ok((to_json(&rec)?, 0))
        }
        Cmd::ScanOmega {
            p,
            rho,
            i,
            j,
            chi,
            omega,
        } => {
            let ctx = field(*p, 3, 0)?;
            let sels = chi
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<ChiSelector>, _>>()?;
            let chis = runner::resolve_chis(&ctx, &sels)?;
            let mode: OmegaMode = omega.parse()?;
            let rep = sums::omega_uniformity_scan(
                &ctx,
                interval(*p, i, *rho)?,
                interval(*p, j, *rho)?,
                &chis,
                mode,
                cli.seed,
                budget,
            )?;
            if let Some(out) = &cli.out {
                #[derive(serde::Serialize)]
                struct Row {
                    chi: String,
                    omega: u64,
                    ratio: f64,
                }
                let rows: Vec<Row> = rep
                    .per_chi
                    .iter()
                    .flat_map(|c| {
                        c.omegas.iter().zip(&c.ratios).map(|(&omega, &ratio)| Row {
                            chi: c.chi.to_string(),
                            omega,
                            ratio,
                        })
                    })
                    .collect();
                runner::write_atomic(out, &runner::csv_bytes(&["chi", "omega", "ratio"], &rows)?)?;
            }
            let summary: Vec<Value> = rep
                .per_chi
                .iter()
                .map(|c| {
                    json!({
                        "chi": c.chi.to_string(),
                        "restriction_trivial": c.restriction_trivial,
                        "n_omega": c.omegas.len(),
                        "max_ratio": c.max_ratio,
                        "median_ratio": c.median_ratio,
                        "argmax_omega": c.argmax_omega,
                        "aligned": c.aligned,
                    })
                })
                .collect();
            Ok((
                json!({ "p": p, "intervals": rep.intervals, "mode": rep.mode, "seed": rep.seed, "per_chi": summary, "groups": rep.groups }),
                0,
            ))
        }
        Cmd::Energy { p, d, sigma, rule: r } => {
            let ctx = field(*p, *d, 0)?;
            let ring = RingCtx::single(ctx.clone())?;
            let q = sets::box_elements(&ctx, &sets::q_box(&ctx, *sigma)?)?;
            let q0 = sets::box_elements(&ctx, &sets::q0_box(&ctx, *sigma, rule(r)?)?)?;
            let (fp, bound) = energy::energy_fp_q(&ctx, *sigma, budget)?;
            let wrap = |v: &[u64]| v.iter().map(|&e| RingElem(vec![e])).collect::<Vec<_>>();
            let pair = [wrap(&q), wrap(&q0)];
            let brute = energy::energy_brute(&pair, &ring, budget)?;
            let spectral = energy::energy_spectral(&pair, &ring, budgets.max_transform_len)?;
            let labels = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
            let status = if brute.value == spectral.value { 0 } else { 1 };
            Ok((
                json!([
                    EnergyReport::new(labels("F_p", "Q"), &ring, &fp, Some(bound)),
                    EnergyReport::new(labels("Q", "Q0"), &ring, &brute, None),
                    EnergyReport::new(labels("Q", "Q0"), &ring, &spectral, None),
                ]),
                status,
            ))
        }
        Cmd::Repcount { p, d, sigma, rule: r } => {
            let ctx = FieldCtx::new(*p, *d, 0)?;
            let ring = RingCtx::single(ctx.clone())?;
            let q = sets::box_elements(&ctx, &sets::q_box(&ctx, *sigma)?)?;
            let q0 = sets::box_elements(&ctx, &sets::q0_box(&ctx, *sigma, rule(r)?)?)?;
            let wrap = |v: &[u64]| v.iter().map(|&e| RingElem(vec![e])).collect::<Vec<_>>();
            let res = energy::rep_count_max(&wrap(&q), &wrap(&q0), &ring, budget)?;
            if let Some(out) = &cli.out {
                let rows: Vec<(u64, u64)> = res.histogram.iter().map(|(e, c)| (e.0[0], *c)).collect();
                runner::write_atomic(out, &runner::csv_bytes(&["eta", "count"], &rows)?)?;
            }
            Ok((
                json!({
                    "p": p, "d": d, "sigma": sigma, "rule": r,
                    "q_size": q.len(), "q0_size": q0.len(),
                    "max_count": res.max_count,
                    "argmax": res.argmax.map(|e| ctx.decode(e.0[0]).coeffs),
                    "unit_pairs": res.unit_pairs,
                    "distinct_products": res.histogram.len(),
                }),
                0,
            ))
        }
        Cmd::Burgess {
            p,
            d,
            rho,
            eps,
            chi,
            k,
            rule: r,
            box_len,
        } => {
            let ctx = field(*p, *d, 0)?;
            let side = box_len.unwrap_or_else(|| IntervalSpec::from_exponent(*p, *rho).length);
            let cfg = BurgessConfig {
                rho: *rho,
                eps: *eps,
                boxes: vec![IntervalSpec::new(1, side); d.saturating_sub(1)],
                k: *k,
                rule: rule(r)?,
            };
            let dec = sums::burgess_decompose(&ctx, &cfg, &chi_for(&ctx, chi)?, budget)?;
            if let Some(out) = &cli.out {
                runner::write_atomic(out, &runner::csv_bytes(&["mu", "phi"], &dec.phi)?)?;
            }
            let mut v = to_json(&dec)?;
            if let Some(obj) = v.as_object_mut() {
                obj.remove("phi");
                obj.insert("phi_support".into(), json!(dec.phi.len()));
            }
            let status = if dec.amplified_average <= dec.holder_bound * (1.0 + 1e-12) {
                0
            } else {
                1
            };
            Ok((v, status))
        }
        Cmd::WeilExhaust { p, deg } => {
            let primes = weil::primes_up_to(*p);
            match &cli.out {
                Some(dir) => {
                    let plan = SweepPlan {
                        command: PlanKind::WeilExhaust,
                        name: None,
                        p_list: primes,
                        d: 1,
                        rho_list: vec![],
                        sigma: None,
                        chi: vec![],
                        omega_mode: OmegaMode::All,
                        k: None,
                        r: None,
                        max_deg: Some(*deg),
                        seed: cli.seed,
                        budgets,
                    };
                    let outcome = runner::run(&plan, dir)?;
                    let status = if outcome.failures == 0 { 0 } else { 1 };
                    Ok((to_json(&outcome)?, status))
                }
                None => {
                    let rep = weil::weil_exhaust(&primes, *deg, budget)?;
                    let status = if rep.violations.is_empty() { 0 } else { 1 };
                    Ok((
                        json!({
                            "primes": primes,
                            "cells": rep.cells.len(),
                            "admissible": rep.admissible,
                            "violations": rep.violations,
                        }),
                        status,
                    ))
                }
            }
        }
        Cmd::Wlm { p, chi, k, r } => {
            let ctx = field(*p, 1, 0)?;
            let rep = weil::wlm_moment(*p, &chi_for(&ctx, chi)?, runner::parse_interval(k)?, *r, budget)?;
            Ok((to_json(&rep)?, 0))
        }
        Cmd::Sweep => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| Error::Parse("sweep needs --config <plan.json>".into()))?;
            let mut plan = SweepPlan::from_file(path)?;
            if std::env::var_os("CHARSUM_BUDGET").is_some() || budget != DEFAULT_ENUMERATION_BUDGET {
                plan.budgets.max_enumeration = budget;
            }
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("charsum-out"));
            let outcome = runner::run(&plan, &dir)?;
            let status = if outcome.failures == 0 { 0 } else { 1 };
            Ok((to_json(&outcome)?, status))
        }
        Cmd::Verify { suite } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut reports = Vec::new();
            let mut status = 0;
            for s in suites {
                let rep = runner::verify_suite(s, &budgets, cli.seed)?;
                if !rep.pass {
                    status = 1;
                }
                reports.push(rep);
            }
            Ok((to_json(&reports)?, status))
        }
    }
}

/// Appends `--key value` for every config entry so that config values win
/// over flags given earlier on the command line.
fn overlay_config(mut args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let path = match pos.and_then(|i| args.get(i + 1)) {
        Some(p) => PathBuf::from(p),
        None => return Ok(args),
    };
    if args.iter().any(|a| a == "sweep") {
        return Ok(args);
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: serde_json::Map<String, Value> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for (key, value) in cfg {
        if key == "config" {
            continue;
        }
        let text = match value {
            Value::String(s) => s,
            Value::Array(items) => items
                .iter()
                .map(|v| v.as_str().map_or_else(|| v.to_string(), str::to_string))
                .collect::<Vec<_>>()
                .join(","),
            other => other.to_string(),
        };
        args.push(format!("--{}", key.replace('_', "-")).into());
        args.push(text.into());
    }
    Ok(args)
}

fn emit_error(e: &Error) -> ExitCode {
    eprintln!("{}", runner::error_json(e));
    ExitCode::from(runner::exit_code(e) as u8)
}

fn main() -> ExitCode {
    let args = match overlay_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return emit_error(&Error::Parse(format!("{e:#}"))),
    };
    let cli = Cli::parse_from(args);
    if let Some(out) = &cli.out {
        if out.as_os_str().is_empty() {
            return emit_error(&Error::Parse("--out is empty".into()));
        }
    }
    match execute(&cli) {
        Ok((value, status)) => {
            let text = serde_json::to_string_pretty(&value).unwrap_or_default();
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(status as u8)
        }
        Err(e) => emit_error(&e),
    }
}
