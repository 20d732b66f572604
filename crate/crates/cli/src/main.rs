//! `eoa`: build codes and (Eulerian) orthogonal arrays, export decoupling
//! schedules and run averaging simulations.
//!
//! Exit codes: 0 success, 1 verification or tolerance failure, 2 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eoa_core::code::CodeReport;
use eoa_core::config::{Tolerances, DEFAULT_DELTA};
use eoa_core::decoupling::{convergence_sweep, Schedule};
use eoa_core::io::{field_of_order, parse_array, parse_code, read_file, write_array, write_code, ArrayHeader};
use eoa_core::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "eoa", version, about = "Eulerian orthogonal arrays and bounded-strength decoupling")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, env = "EOA_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear codes over GF(q).
    #[command(subcommand)]
    Code(CodeCmd),
    /// Orthogonal arrays from codes.
    #[command(subcommand)]
    Oa(OaCmd),
    /// Eulerian orthogonal arrays from codes and Euler cycles.
    #[command(subcommand)]
    Euler(EulerCmd),
    /// Decoupling schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// First-order averaging simulations.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Hamming code of redundancy m over GF(q), or its dual.
    Hamming {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        m: usize,
        /// Emit the dual (simplex) code instead.
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameters of a code file.
    Info {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum OaCmd {
    /// Array of all codewords of a code.
    Build {
        #[arg(long)]
        code: PathBuf,
        /// Dual distance to use when the dual code is too large to enumerate.
        #[arg(long)]
        dual_distance: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recount the strength of an array file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Strength to check (default: the header's claim).
        #[arg(long)]
        t: Option<usize>,
    },
}

#[derive(Subcommand)]
enum EulerCmd {
    /// Columns G·m_j along an Euler cycle of GF(q)^k.
    Build {
        #[arg(long, conflicts_with_all = ["q", "k"])]
        code: Option<PathBuf>,
        /// Field order for the identity code (with --k).
        #[arg(long, requires = "k")]
        q: Option<usize>,
        #[arg(long, requires = "q")]
        k: Option<usize>,
        /// Keep only the first R rows.
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        dual_distance: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recheck strength and the Euler property of an array file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bangbang,
    Eulerian,
}

#[derive(Subcommand)]
enum ScheduleCmd {
    /// Schedule JSON with per-segment labels and control Hamiltonians.
    Export {
        /// Array file (Eulerian for the default mode).
        #[arg(long = "oa", alias = "eoa")]
        array: PathBuf,
        #[arg(long, value_enum, default_value = "eulerian")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-import a schedule and check every control against its label.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Instantaneous Weyl pulses from an orthogonal array.
    Bangbang(SimArgs),
    /// Bounded-strength square pulses from an Eulerian array.
    Eulerian(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Quadrature,
}

#[derive(Args)]
struct SimArgs {
    /// Array file (default: the m = 2 family array built in memory).
    #[arg(long)]
    oa: Option<PathBuf>,
    /// Drift Hamiltonian JSON (default: seeded random drift).
    #[arg(long, conflicts_with_all = ["t", "seed", "denv"])]
    drift: Option<PathBuf>,
    /// Qudits to simulate; the first n rows of the array are used.
    #[arg(long)]
    n: Option<usize>,
    /// Arity of the random drift (default: the array strength).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Environment dimension of the random drift.
    #[arg(long)]
    denv: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Gauss–Legendre order for --method quadrature.
    #[arg(long, default_value_t = 24)]
    order: usize,
    /// Residual tolerance (default: 1e-10 bang-bang, 1e-9 Eulerian).
    #[arg(long)]
    tol: Option<f64>,
    /// Also run exact evolution at this many halvings of T_c and fit the slope.
    #[arg(long)]
    sweep_tc: Option<usize>,
    /// Segment duration of the first sweep point.
    #[arg(long, default_value_t = 2.5e-4)]
    sweep_delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A check that ran to completion but did not pass.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn fail<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(CheckFailed(msg.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let verification = e.downcast_ref::<CheckFailed>().is_some()
                || matches!(e.downcast_ref::<Error>(), Some(Error::Verification(_)));
            eprintln!("{}: {e:#}", if verification { "FAILED" } else { "error" });
            ExitCode::from(if verification { 1 } else { 2 })
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Code(c) => cmd_code(c),
        Command::Oa(c) => cmd_oa(c),
        Command::Euler(c) => cmd_euler(c),
        Command::Schedule(c) => cmd_schedule(c),
        Command::Sim(SimCmd::Bangbang(a)) => cmd_sim(ScheduleMode::BangBang, a),
        Command::Sim(SimCmd::Eulerian(a)) => cmd_sim(ScheduleMode::Eulerian, a),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_code(path: &Path) -> anyhow::Result<LinearCode> {
    parse_code(&read_file(path).with_context(|| format!("reading {}", path.display()))?).with_context(|| format!("parsing {}", path.display()))
}

fn load_array(path: &Path) -> anyhow::Result<(SymbolMatrix, ArrayHeader)> {
    parse_array(&read_file(path).with_context(|| format!("reading {}", path.display()))?).with_context(|| format!("parsing {}", path.display()))
}

fn show(d: Option<usize>) -> String {
    d.map_or_else(|| "?".into(), |d| d.to_string())
}

fn describe(r: &CodeReport) -> String {
    format!("[n, k, d_min, d_dual] = [{}, {}, {}, {}] over GF({})", r.n, r.k, show(r.d_min), show(r.d_dual), r.q)
}

fn cmd_code(cmd: CodeCmd) -> anyhow::Result<()> {
    match cmd {
        CodeCmd::Hamming { q, m, dual, out } => {
            let field = Arc::new(field_of_order(q)?);
            let mut code = hamming_code(field, m)?;
            if dual {
                code = code.dual();
            }
            emit(&out, &write_code(&code))?;
            eprintln!("{}", describe(&code.report()));
        }
        CodeCmd::Info { input } => {
            println!("{}", describe(&load_code(&input)?.report()));
        }
    }
    Ok(())
}

fn dual_distance_of(code: &LinearCode, given: Option<usize>) -> anyhow::Result<usize> {
    match given {
        Some(d) => Ok(d),
        None => code.dual_distance().context("dual distance cannot be enumerated; pass --dual-distance"),
    }
}

fn cmd_oa(cmd: OaCmd) -> anyhow::Result<()> {
    match cmd {
        OaCmd::Build { code, dual_distance, out } => {
            let code = load_code(&code)?;
            let oa = oa_from_code(&code, dual_distance_of(&code, dual_distance)?)?;
            let header = ArrayHeader {
                runs: oa.runs(),
                factors: oa.factors(),
                levels: oa.levels(),
                strength: oa.strength(),
                lambda: oa.lambda(),
                euler: None,
            };
            emit(&out, &write_array(oa.entries(), &header))?;
            eprintln!("OA({}, {}, {}, {}) with lambda = {}", oa.runs(), oa.factors(), oa.levels(), oa.strength(), oa.lambda());
        }
        OaCmd::Verify { input, t } => {
            let (entries, header) = load_array(&input)?;
            let t = t.unwrap_or(header.strength);
            check_levels(&entries, header.levels)?;
            match verify_strength(&entries, header.levels, t) {
                Ok(lambda) => println!("strength {t} verified: lambda = {lambda}"),
                Err(v) => return fail(format!("strength {t}: {v}")),
            }
        }
    }
    Ok(())
}

fn check_levels(entries: &SymbolMatrix, q: usize) -> anyhow::Result<()> {
    if field_of_order(q).is_err() {
        bail!("{q} levels is not a prime power");
    }
    if entries.max_symbol().is_some_and(|s| s as usize >= q) {
        bail!("array has symbols outside 0..{q}");
    }
    Ok(())
}

fn cmd_euler(cmd: EulerCmd) -> anyhow::Result<()> {
    match cmd {
        EulerCmd::Build { code, q, k, rows, dual_distance, out } => {
            let code = match (code, q, k) {
                (Some(path), _, _) => load_code(&path)?,
                (None, Some(q), Some(k)) => LinearCode::identity(Arc::new(field_of_order(q)?), k)?,
                _ => bail!("pass --code or both --q and --k"),
            };
            let t = dual_distance_of(&code, dual_distance)?.saturating_sub(1);
            if t == 0 {
                bail!("dual distance 1 gives strength 0");
            }
            let cycle = euler_cycle_full(code.q(), code.dim())?;
            let eoa = eulerian_oa_from_code(&code, &cycle, t)?;
            let eoa = match rows {
                None => eoa,
                Some(r) if r >= 1 && r <= eoa.entries().rows() => {
                    EulerianOA::new(eoa.entries().select_rows(&(0..r).collect::<Vec<_>>()), code.q(), t.min(r))?
                }
                Some(r) => bail!("--rows {r} out of range 1..={}", eoa.entries().rows()),
            };
            let oa = eoa.oa();
            let header = ArrayHeader {
                runs: oa.runs(),
                factors: oa.factors(),
                levels: oa.levels(),
                strength: oa.strength(),
                lambda: oa.lambda(),
                euler: Some((eoa.strength(), eoa.edge_multiplicity())),
            };
            emit(&out, &write_array(eoa.entries(), &header))?;
            eprintln!(
                "Eulerian OA({}, {}, {}, {}) with lambda = {}, edge multiplicity {}",
                oa.runs(),
                oa.factors(),
                oa.levels(),
                oa.strength(),
                oa.lambda(),
                eoa.edge_multiplicity()
            );
        }
        EulerCmd::Verify { input, t } => {
            let (entries, header) = load_array(&input)?;
            let t = t.or(header.euler.map(|e| e.0)).unwrap_or(header.strength);
            check_levels(&entries, header.levels)?;
            let lambda = match verify_strength(&entries, header.levels, t) {
                Ok(l) => l,
                Err(v) => return fail(format!("strength {t}: {v}")),
            };
            match verify_eulerian(&entries, header.levels, t) {
                Ok(cert) => {
                    let full = cert.gensets.iter().filter(|g| g.full_group).count();
                    println!(
                        "strength {t} verified: lambda = {lambda}; Eulerian with edge multiplicity {}, {full}/{} row sets use the full group",
                        cert.edge_multiplicity,
                        cert.gensets.len()
                    );
                }
                Err(v) => return fail(format!("not Eulerian at strength {t}: {v}")),
            }
        }
    }
    Ok(())
}

/// Loads an array file, re-verifying it; returns the plain array and, when
/// the Euler property holds, the Eulerian array.
fn load_verified(path: &Path, need_euler: bool) -> anyhow::Result<(OrthogonalArray, Option<EulerianOA>)> {
    let (entries, header) = load_array(path)?;
    check_levels(&entries, header.levels)?;
    let t = header.euler.map_or(header.strength, |e| e.0);
    if need_euler {
        let eoa = EulerianOA::new(entries, header.levels, t)?;
        Ok((eoa.oa().clone(), Some(eoa)))
    } else {
        Ok((OrthogonalArray::new(entries, header.levels, header.strength)?, None))
    }
}

fn cmd_schedule(cmd: ScheduleCmd) -> anyhow::Result<()> {
    match cmd {
        ScheduleCmd::Export { array, mode, delta, out } => {
            let sched = match mode {
                ModeArg::Eulerian => euler_schedule(load_verified(&array, true)?.1.as_ref().unwrap(), delta)?,
                ModeArg::Bangbang => bangbang_schedule(&load_verified(&array, false)?.0, delta)?,
            };
            emit(&out, &sched.to_json()?)?;
            eprintln!(
                "{} segments x {} qudits, T_c = {}, max control norm {:.6} (bound {:.6})",
                sched.segment_count,
                sched.n,
                sched.cycle_time(),
                sched.max_control_norm(),
                std::f64::consts::PI / sched.delta
            );
        }
        ScheduleCmd::Verify { input } => {
            let text = read_file(&input).with_context(|| format!("reading {}", input.display()))?;
            let sched = Schedule::from_json(&text).context("parsing schedule")?;
            sched.verify(Tolerances::default().mat)?;
            println!("schedule verified: {} segments x {} qudits", sched.segment_count, sched.n);
        }
    }
    Ok(())
}

fn default_eoa() -> anyhow::Result<EulerianOA> {
    let code = hamming_code(Arc::new(field_of_order(4)?), 2)?.dual();
    Ok(eulerian_oa_from_code(&code, &euler_cycle_full(4, 2)?, 2)?)
}

fn cmd_sim(mode: ScheduleMode, args: SimArgs) -> anyhow::Result<()> {
    let need_euler = mode == ScheduleMode::Eulerian;
    let (oa, eoa) = match &args.oa {
        Some(path) => load_verified(path, need_euler)?,
        None => {
            let eoa = default_eoa()?;
            if need_euler {
                (eoa.oa().clone(), Some(eoa))
            } else {
                let code = hamming_code(Arc::new(field_of_order(4)?), 2)?.dual();
                (oa_from_code(&code, 3)?, None)
            }
        }
    };
    let rows = oa.factors();
    let n = args.n.unwrap_or(rows);
    if n == 0 || n > rows {
        bail!("--n {n} out of range 1..={rows}");
    }
    let keep: Vec<usize> = (0..n).collect();
    let t_arr = oa.strength().min(n);
    let oa = OrthogonalArray::new(oa.entries().select_rows(&keep), oa.levels(), t_arr)?;
    let eoa = match eoa {
        Some(e) => Some(EulerianOA::new(e.entries().select_rows(&keep), e.oa().levels(), e.strength().min(n))?),
        None => None,
    };

    let d = field_of_order(oa.levels())?.qudit_dim()? as usize;
    let (drift, drift_meta) = match &args.drift {
        Some(path) => {
            let text = read_file(path).with_context(|| format!("reading {}", path.display()))?;
            let h: DriftHamiltonian = serde_json::from_str(&text).context("parsing drift")?;
            h.validate(1e-10)?;
            (h, json!({ "file": path.display().to_string() }))
        }
        None => {
            let t = args.t.unwrap_or(t_arr.max(1));
            let seed = args.seed.unwrap_or(0);
            let denv = args.denv.unwrap_or(1);
            (random_drift(n, d, t, denv, seed)?, json!({ "arity": t, "seed": seed, "d_env": denv }))
        }
    };
    if drift.n != n || drift.d != d {
        bail!("drift is for {} qudits of dimension {}, array gives {n} of dimension {d}", drift.n, drift.d);
    }

    let method = match args.method {
        MethodArg::Exact => AverageMethod::Exact,
        MethodArg::Quadrature => AverageMethod::Quadrature { order: args.order },
    };
    let defaults = Tolerances::default();
    let tol = args.tol.unwrap_or(match mode {
        ScheduleMode::BangBang => defaults.bangbang,
        ScheduleMode::Eulerian => defaults.eulerian,
    });
    let report = match mode {
        ScheduleMode::BangBang => bangbang_average(&oa, &drift)?,
        ScheduleMode::Eulerian => eulerian_average(eoa.as_ref().unwrap(), &drift, args.delta, method)?,
    };
    let mut failures = Vec::new();
    if report.residual_norm > tol {
        failures.push(format!("residual {:.3e} exceeds {tol:.1e}", report.residual_norm));
    }
    if report.env_passthrough_error > defaults.env {
        failures.push(format!("environment changed by {:.3e}", report.env_passthrough_error));
    }

    let sweep = match (args.sweep_tc, &eoa) {
        (None, _) => None,
        (Some(_), None) => bail!("--sweep-tc needs an Eulerian schedule"),
        (Some(points), Some(e)) => {
            let s = convergence_sweep(&drift, e, args.sweep_delta, points, 1)?;
            if (s.slope - 2.0).abs() > 0.3 {
                failures.push(format!("convergence slope {:.3} outside 2 +- 0.3", s.slope));
            }
            eprintln!("convergence slope {:.3}", s.slope);
            Some(s)
        }
    };

    if let Some(w) = &report.strength_warning {
        eprintln!("warning: {w}");
    }
    eprintln!("residual {:.3e} (tolerance {tol:.1e}), environment error {:.3e}", report.residual_norm, report.env_passthrough_error);
    let doc = json!({
        "report": report,
        "drift": drift_meta,
        "tolerances": { "residual": tol, "env": defaults.env, "mat": defaults.mat, "backend": defaults.backend },
        "sweep": sweep,
        "passed": failures.is_empty(),
    });
    emit(&args.out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    if failures.is_empty() {
        Ok(())
    } else {
        fail(failures.join("; "))
    }
}
