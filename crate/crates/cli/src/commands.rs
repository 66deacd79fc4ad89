use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use braidfan::lattice::{Interval, Subset, DEFAULT_MAX_DIM};
use braidfan::network::{self, build_max_network, certify, depth_bound, BoundRule, NetworkPlan};
use braidfan::rational::{self, Rational};
use braidfan::setfn::{conformity_violation, pointwise_max, SetFn};
use braidfan::transform::{
    change_fan, eval_direct, evaluate_setfn, parse_sigma_shorthand, phi, phi_inverse, FanChange,
    PwlExpr, RationalPoint,
};
use braidfan::verify::{self, Report};

use crate::args::{CheckKind, Cli, Command, Direction, Io, RuleArg, Target, VerifyKind};

const SUCCESS: u8 = 0;
const FALSE: u8 = 1;
const INCONCLUSIVE: u8 = 3;

fn read_source(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text).context("reading stdin")?;
        }
    }
    Ok(text)
}

fn emit(io: &Io, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &io.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn guard(cli: &Cli, d: usize) -> Result<()> {
    if d > DEFAULT_MAX_DIM {
        if !cli.allow_large {
            bail!("d = {d} exceeds the default limit of {DEFAULT_MAX_DIM}; pass --allow-large to proceed");
        }
        eprintln!("warning: d = {d} needs 2^{d} exact values in memory");
    }
    Ok(())
}

fn parse_subset(text: &str) -> Result<Subset> {
    Ok(Subset::parse_key(text.trim())?)
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("expected a comma-separated list of integers, got {text:?}"))
        })
        .collect()
}

/// Either a set function or an expression, told apart by their JSON keys.
enum Loaded {
    SetFn(SetFn),
    Expr(PwlExpr),
}

fn parse_loaded(text: &str) -> Result<Loaded> {
    let value: Value = serde_json::from_str(text).context("malformed JSON")?;
    if value.get("terms").is_some() {
        Ok(Loaded::Expr(serde_json::from_value(value).context("invalid expression")?))
    } else {
        Ok(Loaded::SetFn(serde_json::from_value(value).context("invalid set function")?))
    }
}

fn target_expr(target: &Target) -> Result<Option<PwlExpr>> {
    let Some(text) = &target.target else {
        return Ok(None);
    };
    let m = parse_sigma_shorthand(text)?;
    let d = target.d.unwrap_or(m.max_element());
    Ok(Some(PwlExpr::sigma(d, m)?))
}

fn load(cli: &Cli, io: &Io, target: Option<&Target>) -> Result<Loaded> {
    let loaded = match target.map(target_expr).transpose()?.flatten() {
        Some(expr) => Loaded::Expr(expr),
        None => parse_loaded(&read_source(io.input.first().map(|p| p.as_path()))?)?,
    };
    let d = match &loaded {
        Loaded::SetFn(f) => f.domain().upper().len(),
        Loaded::Expr(e) => e.d(),
    };
    guard(cli, d)?;
    Ok(loaded)
}

fn load_setfn(cli: &Cli, io: &Io, target: Option<&Target>) -> Result<SetFn> {
    Ok(match load(cli, io, target)? {
        Loaded::SetFn(f) => f,
        Loaded::Expr(e) => phi(&e),
    })
}

fn load_expr(cli: &Cli, io: &Io, target: Option<&Target>) -> Result<PwlExpr> {
    match load(cli, io, target)? {
        Loaded::Expr(e) => Ok(e),
        Loaded::SetFn(_) => bail!("expected an expression with \"d\", \"constant\" and \"terms\""),
    }
}

/// A tuple from several `-i` files, or from one file holding a JSON array.
fn load_tuple(cli: &Cli, io: &Io) -> Result<Vec<SetFn>> {
    let mut tuple = Vec::new();
    let paths: Vec<Option<&Path>> = if io.input.is_empty() {
        vec![None]
    } else {
        io.input.iter().map(|p| Some(p.as_path())).collect()
    };
    for path in paths {
        let text = read_source(path)?;
        let value: Value = serde_json::from_str(&text).context("malformed JSON")?;
        let items = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        for item in items {
            let f: SetFn = serde_json::from_value(item).context("invalid set function")?;
            guard(cli, f.domain().upper().len())?;
            tuple.push(f);
        }
    }
    if tuple.is_empty() {
        bail!("empty tuple");
    }
    Ok(tuple)
}

fn value_output(cli: &Cli, value: &Rational) -> Result<String> {
    if cli.json {
        let mut out = json!({ "value": rational::format(value) });
        if cli.approx {
            out["approx"] = json!(rational::approx(value));
            out["approx_note"] = json!("decimal rendering, not authoritative");
        }
        pretty(&out)
    } else {
        Ok(rational::format(value))
    }
}

fn rule(r: RuleArg) -> BoundRule {
    match r {
        RuleArg::Closed => BoundRule::Closed,
        RuleArg::Recursive => BoundRule::Recursive,
        RuleArg::Exact4 => BoundRule::Exact4,
    }
}

fn chain_text(chain: &[Subset]) -> String {
    chain.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" < ")
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Phi { io, target } => {
            let expr = load_expr(cli, io, Some(target))?;
            emit(io, &pretty(&phi(&expr))?)?;
            Ok(SUCCESS)
        }
        Command::PhiInv { io } => {
            let f = load_setfn(cli, io, None)?;
            emit(io, &pretty(&phi_inverse(&f)?)?)?;
            Ok(SUCCESS)
        }
        Command::Eval { io, target, point } => {
            let x = RationalPoint::parse(point)?;
            let value = match load(cli, io, Some(target))? {
                Loaded::SetFn(f) => evaluate_setfn(&f, &x)?,
                Loaded::Expr(e) => eval_direct(&e, &x)?,
            };
            emit(io, &value_output(cli, &value)?)?;
            Ok(SUCCESS)
        }
        Command::Level { io, target } => {
            let f = load_setfn(cli, io, Some(target))?;
            let report = f.min_level();
            if cli.json {
                let mut out = serde_json::to_value(&report)?;
                if let (true, Some(w)) = (cli.approx, &report.witness) {
                    out["witness"]["approx"] = json!(rational::approx(&w.value));
                }
                emit(io, &pretty(&out)?)?;
            } else {
                if let Some(w) = &report.witness {
                    eprintln!("witness: {w}");
                }
                emit(io, &report.k_min.to_string())?;
            }
            Ok(SUCCESS)
        }
        Command::Check { what: CheckKind::Hc, io } => {
            let f = load_setfn(cli, io, None)?;
            let violation = f.hc_violation();
            if cli.json {
                let witness = violation.map(|(s, t)| json!({ "S": s, "T": t }));
                emit(io, &pretty(&json!({ "in_hc": violation.is_none(), "witness": witness }))?)?;
            } else {
                emit(io, if violation.is_none() { "true" } else { "false" })?;
                if let Some((s, t)) = violation {
                    eprintln!(
                        "witness: F({s}) = {} and F({t}) = {} have opposite signs",
                        rational::format(&f[s]),
                        rational::format(&f[t])
                    );
                }
            }
            Ok(if violation.is_none() { SUCCESS } else { FALSE })
        }
        Command::Check { what: CheckKind::Conforming, io } => {
            let tuple = load_tuple(cli, io)?;
            let violation = conformity_violation(&tuple)?;
            if cli.json {
                emit(io, &pretty(&json!({ "conforming": violation.is_none(), "chain": violation }))?)?;
            } else {
                emit(io, if violation.is_none() { "true" } else { "false" })?;
                if let Some(chain) = &violation {
                    eprintln!("witness chain: {}", chain_text(chain));
                }
            }
            Ok(if violation.is_none() { SUCCESS } else { FALSE })
        }
        Command::Max { io, require_conforming } => {
            let tuple = load_tuple(cli, io)?;
            let max = pointwise_max(&tuple, *require_conforming)?;
            emit(io, &pretty(&max)?)?;
            Ok(SUCCESS)
        }
        Command::Restrict { io, lower, upper } => {
            let f = load_setfn(cli, io, None)?;
            let interval = Interval::new(parse_subset(lower)?, parse_subset(upper)?)?;
            emit(io, &pretty(&f.restrict(interval)?)?)?;
            Ok(SUCCESS)
        }
        Command::BuildMaxNet { io, d, m, ranks } => {
            guard(cli, *d)?;
            let m = Subset::from_elements(parse_list(m)?)?;
            let plan = build_max_network(*d, m, &parse_list(ranks)?)?;
            emit(io, &pretty(&plan)?)?;
            Ok(SUCCESS)
        }
        Command::RunNet { io, point, check } => {
            let text = read_source(io.input.first().map(|p| p.as_path()))?;
            let plan: NetworkPlan = serde_json::from_str(&text).context("invalid network plan")?;
            guard(cli, plan.d)?;
            let x = RationalPoint::parse(point)?;
            let value = network::run_network(&plan, &x)?;
            emit(io, &value_output(cli, &value)?)?;
            if *check {
                let symbolic = evaluate_setfn(&plan.compose()?, &x)?;
                if symbolic != value {
                    eprintln!(
                        "mismatch: forward pass {} but composed set function gives {}",
                        rational::format(&value),
                        rational::format(&symbolic)
                    );
                    return Ok(FALSE);
                }
                eprintln!("composed set function agrees");
            }
            Ok(SUCCESS)
        }
        Command::Certify { io, target, layers, rule: r } => {
            let f = load_setfn(cli, io, Some(target))?;
            let rule = rule(*r);
            let k = depth_bound(*layers, rule)?;
            let n = f.domain().rank();
            if k < n as u128 {
                eprintln!(
                    "scanning {} intervals of rank {} for a nonzero alternating sum",
                    f.domain().count_intervals_of_rank(k as usize + 1),
                    k + 1
                );
            }
            match certify(&f, *layers, rule)? {
                Some(cert) => {
                    debug_assert!(cert.verify(&f));
                    if cli.json {
                        let mut out = serde_json::to_value(&cert)?;
                        if cli.approx {
                            out["approx"] = json!(rational::approx(&cert.value));
                        }
                        emit(io, &pretty(&out)?)?;
                    } else {
                        emit(
                            io,
                            &format!(
                                "Certificate (({}, {}), {}, {}, {})",
                                cert.lower,
                                cert.upper,
                                rational::format(&cert.value),
                                cert.depth_bound,
                                cert.rule
                            ),
                        )?;
                    }
                    eprintln!(
                        "not computable by a conforming network with {layers} hidden layer(s): \
                         every such function lies in Sf({k})"
                    );
                    Ok(SUCCESS)
                }
                None => {
                    if cli.json {
                        emit(io, &pretty(&json!({ "certificate": null, "depth_bound": k, "rule": rule }))?)?;
                    } else {
                        emit(io, &format!("inconclusive: target lies in Sf({k})"))?;
                    }
                    Ok(INCONCLUSIVE)
                }
            }
        }
        Command::Bound { layers, rule: r } => {
            println!("{}", depth_bound(*layers, rule(*r))?);
            Ok(SUCCESS)
        }
        Command::ChangeFan { io, direction, slope } => {
            let expr = load_expr(cli, io, None)?;
            let change = match direction {
                Direction::Project => FanChange::Project,
                Direction::Embed => FanChange::Embed {
                    slope: rational::parse(slope)?,
                },
            };
            emit(io, &pretty(&change_fan(&expr, &change)?)?)?;
            Ok(SUCCESS)
        }
        Command::Verify {
            check,
            io,
            d,
            k,
            r,
            samples,
            seed,
            mutate,
        } => {
            let report = run_verify(*check, *d, *k, *r, *samples, *seed, *mutate)?;
            if cli.json {
                emit(io, &pretty(&report)?)?;
            } else {
                emit(io, &report.to_string())?;
            }
            Ok(report.status.exit_code() as u8)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    check: VerifyKind,
    d: Option<usize>,
    k: Option<usize>,
    r: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    mutate: bool,
) -> Result<Report> {
    let report = match check {
        VerifyKind::Prop51 => {
            if mutate {
                verify::verify_prop51_mutated()
            } else {
                verify::verify_prop51()
            }
        }
        VerifyKind::Base => {
            let (d, k) = (d.unwrap_or(4), k.unwrap_or(2));
            if mutate {
                verify::verify_base_and_identities_mutated(d, k)?
            } else {
                verify::verify_base_and_identities(d, k)?
            }
        }
        VerifyKind::Quadratic => {
            let (d, k, n, s) = (d.unwrap_or(7), k.unwrap_or(2), samples.unwrap_or(200), seed.unwrap_or(1));
            if mutate {
                verify::verify_quadratic_mutated(d, k, n, s)?
            } else {
                verify::verify_quadratic(d, k, n, s)?
            }
        }
        VerifyKind::Rank5 => {
            let (n, s) = (samples.unwrap_or(300), seed.unwrap_or(7));
            if mutate {
                verify::verify_rank5_mutated(n, s)?
            } else {
                verify::verify_rank5(n, s)?
            }
        }
        VerifyKind::Dims => {
            let d = d.unwrap_or(4);
            let kmax = k.unwrap_or(d);
            if mutate {
                verify::verify_dimensions_mutated(d, kmax)?
            } else {
                verify::verify_dimensions(d, kmax)?
            }
        }
        VerifyKind::Fan => {
            let (d, r, n, s) = (d.unwrap_or(3), r.unwrap_or(2), samples.unwrap_or(200), seed.unwrap_or(3));
            if mutate {
                verify::verify_fan_laws_mutated(d, r, n, s)?
            } else {
                verify::verify_fan_laws(d, r, n, s)?
            }
        }
    };
    Ok(report)
}
