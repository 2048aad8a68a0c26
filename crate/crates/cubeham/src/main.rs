//! Command-line surface. Exit codes: 0 success, 2 expected negative
//! (avoidance condition violated / half-layer present / no extension),
//! 3 budget exhausted, 4 malformed input or usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubeham::certificate::check_cycle;
use cubeham::constructors::{extend_to_maximal, shorten_matching};
use cubeham::dot::{cycle_to_dot, forest_to_dot, matching_to_dot};
use cubeham::extender::{
    extend_avoiding, extend_to_cycle, long_cycle_kqd, long_cycle_qd, AvoidOutcome, Extension,
    LaceOutcome,
};
use cubeham::gen::{gen_instance, InstanceKind};
use cubeham::layers::{count_layer_directions, find_layers, LayerKind};
use cubeham::matching::{Matching, MatchingJson, Slot};
use cubeham::oracle::{extends, ExtensionCertificate, SearchConfig, SearchOutcome};
use cubeham::property_h::check_property_h;
use cubeham::suite::{run_suite, SuiteConfig, SUITES};
use cubeham::{Dimension, Error, Vertex};
use serde::Serialize;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_NEGATIVE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MALFORMED: u8 = 4;

#[derive(Parser)]
#[command(name = "cubeham", about = "Extend hypercube matchings to cycles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Input matching JSON; `-` reads stdin.
    #[arg(long = "in", value_name = "FILE")]
    input: String,
    /// Write the primary JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LongTarget {
    Qd,
    Kqd,
}

#[derive(Subcommand)]
enum Command {
    /// Extend a matching to a cycle, optionally avoiding a vertex.
    Extend {
        #[command(flatten)]
        io: IoArgs,
        /// Vertex the cycle must avoid.
        #[arg(long)]
        avoid: Option<Vertex>,
        /// Long-cycle mode: cube-edge inputs (qd) or general inputs (kqd).
        #[arg(long, value_enum)]
        long: Option<LongTarget>,
        /// Write the per-level case trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write a DOT rendering of the cycle here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Ask the exhaustive search whether any extension exists.
    Oracle {
        #[command(flatten)]
        io: IoArgs,
        /// Vertex the extension must avoid.
        #[arg(long)]
        avoid: Option<Vertex>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Check the avoidance condition for a forbidden vertex.
    CheckH {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 0)]
        avoid: Vertex,
    },
    /// Report (near) half-layers hosted by the matching.
    Layers {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Grow the matching until no cube edge can be added.
    Maximalize {
        #[command(flatten)]
        io: IoArgs,
        /// Also allow non-cube edges when pairing leftover vertices.
        #[arg(long)]
        long: bool,
    },
    /// Drop edges until the matching is half its size, keeping maximality.
    Shorten {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Cycle avoiding two vertices, or Hamilton path with prescribed ends.
    Hamlace {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        x: Vertex,
        #[arg(long)]
        y: Vertex,
        /// Build a Hamilton path from x to y (default: a cycle avoiding both).
        #[arg(long, conflicts_with = "cycle")]
        path: bool,
        #[arg(long)]
        cycle: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Generate a named instance family member.
    Gen {
        #[arg(long)]
        kind: InstanceKind,
        #[arg(long)]
        d: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a DOT rendering of the generated matching here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run a verification suite and emit its report.
    Suite {
        /// Suite name, or `all`.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap the per-part sample counts (development only).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_matching(input: &str) -> Result<Matching, Error> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(input)?
    };
    let json: MatchingJson = serde_json::from_str(&text)?;
    json.to_matching()
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            use std::io::Write as _;
            writeln!(std::io::stdout(), "{text}")?;
        }
    }
    Ok(())
}

fn write_opt(path: Option<&Path>, text: &str) -> Result<(), Error> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

/// Strip a label kind from the matching, returning the vertices that
/// carried it. Generated instances embed the avoid vertex / path ends as
/// labels; the extension entry points want plain matchings plus arguments.
fn take_labels(m: &mut Matching, slot: Slot) -> Result<Vec<Vertex>, Error> {
    let vs = m.vertices_with(slot);
    for &v in &vs {
        m.set_label(v, Slot::Uncovered)?;
    }
    Ok(vs)
}

#[derive(Serialize)]
struct CycleOut {
    d: u8,
    cycle: Vec<Vertex>,
    length: usize,
}

fn cycle_out(ext: &Extension) -> CycleOut {
    CycleOut {
        d: ext.certificate.d,
        cycle: ext.certificate.vertices.clone(),
        length: ext.certificate.len(),
    }
}

fn finish_extension(
    ext: &Extension,
    out: Option<&Path>,
    trace: Option<&Path>,
    dot: Option<&Path>,
) -> Result<(), Error> {
    if let Err(v) = check_cycle(&ext.certificate) {
        return Err(Error::Malformed(format!("produced certificate failed its check: {v}")));
    }
    emit(&cycle_out(ext), out)?;
    if let Some(p) = trace {
        emit(&ext.trace, Some(p))?;
    }
    write_opt(dot, &cycle_to_dot(&ext.certificate))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Extend { io, avoid, long, trace, dot } => {
            let mut m = read_matching(&io.input)?;
            let embedded = take_labels(&mut m, Slot::Forbidden)?;
            let avoid = match (avoid, embedded.as_slice()) {
                (Some(z), _) => Some(z),
                (None, [z]) => Some(*z),
                (None, []) => None,
                (None, _) => {
                    return Err(Error::Malformed(
                        "several forbidden vertices embedded; pass --avoid".into(),
                    ))
                }
            };
            let ext = match (avoid, long) {
                (Some(_), Some(_)) => {
                    return Err(Error::Malformed("--avoid and --long are exclusive".into()))
                }
                (Some(z), None) => match extend_avoiding(&m, z)? {
                    AvoidOutcome::Cycle(ext) => ext,
                    AvoidOutcome::HViolated(report) => {
                        emit(&report, io.out.as_deref())?;
                        return Ok(EXIT_NEGATIVE);
                    }
                },
                (None, Some(LongTarget::Qd)) => long_cycle_qd(&m)?,
                (None, Some(LongTarget::Kqd)) => long_cycle_kqd(&m)?,
                (None, None) => extend_to_cycle(&m)?,
            };
            finish_extension(&ext, io.out.as_deref(), trace.as_deref(), dot.as_deref())?;
            Ok(0)
        }
        Command::Oracle { io, avoid, budget } => {
            let mut m = read_matching(&io.input)?;
            if let Some(z) = avoid {
                m.set_label(z, Slot::Forbidden)?;
            }
            let cfg = SearchConfig { node_budget: budget, ..SearchConfig::default() };
            match extends(&m, &cfg)? {
                SearchOutcome::Yes(cert) => {
                    match cert {
                        Some(ExtensionCertificate::Cycle(c)) => {
                            emit(&c, io.out.as_deref())?;
                        }
                        Some(ExtensionCertificate::Forest(f)) => {
                            emit(&f, io.out.as_deref())?;
                        }
                        None => emit(&serde_json::json!({"extends": true}), io.out.as_deref())?,
                    }
                    Ok(0)
                }
                SearchOutcome::No => {
                    emit(&serde_json::json!({"extends": false}), io.out.as_deref())?;
                    Ok(EXIT_NEGATIVE)
                }
                SearchOutcome::BudgetExhausted => {
                    emit(&serde_json::json!({"budget_exhausted": true}), io.out.as_deref())?;
                    Ok(EXIT_BUDGET)
                }
            }
        }
        Command::CheckH { io, avoid } => {
            let m = read_matching(&io.input)?;
            let report = check_property_h(&m, avoid)?;
            let satisfied = report.satisfied;
            emit(&report, io.out.as_deref())?;
            Ok(if satisfied { 0 } else { EXIT_NEGATIVE })
        }
        Command::Layers { io } => {
            let m = read_matching(&io.input)?;
            let patterns = find_layers(
                &m,
                &[LayerKind::Half, LayerKind::NearHalf, LayerKind::TwoNearHalf],
            );
            let directions = count_layer_directions(&m);
            emit(
                &serde_json::json!({
                    "patterns": patterns,
                    "directions": directions,
                }),
                io.out.as_deref(),
            )?;
            Ok(0)
        }
        Command::Maximalize { io, long } => {
            let m = read_matching(&io.input)?;
            let grown = extend_to_maximal(&m, &m.vertices_with(Slot::Forbidden), long)?;
            emit(&MatchingJson::from_matching(&grown), io.out.as_deref())?;
            Ok(0)
        }
        Command::Shorten { io } => {
            let m = read_matching(&io.input)?;
            let short = shorten_matching(&m)?;
            emit(&MatchingJson::from_matching(&short), io.out.as_deref())?;
            Ok(0)
        }
        Command::Hamlace { io, x, y, path, cycle: _, dot } => {
            let mut m = read_matching(&io.input)?;
            take_labels(&mut m, Slot::Terminal)?;
            take_labels(&mut m, Slot::Forbidden)?;
            let outcome = if path {
                cubeham::extender::hamlace_path(&m, x, y)?
            } else {
                cubeham::extender::hamlace_cycle(&m, x, y)?
            };
            match outcome {
                LaceOutcome::Cycle(c) => {
                    if let Err(v) = check_cycle(&c) {
                        return Err(Error::Malformed(format!(
                            "produced certificate failed its check: {v}"
                        )));
                    }
                    write_opt(dot.as_deref(), &cycle_to_dot(&c))?;
                    emit(&c, io.out.as_deref())?;
                    Ok(0)
                }
                LaceOutcome::Path(f) => {
                    write_opt(dot.as_deref(), &forest_to_dot(&f))?;
                    emit(&f, io.out.as_deref())?;
                    Ok(0)
                }
                LaceOutcome::HalfLayerPresent(patterns) => {
                    emit(
                        &serde_json::json!({"half_layers": patterns}),
                        io.out.as_deref(),
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Gen { kind, d, seed, out, dot } => {
            let d = Dimension::new(d)?;
            let inst = gen_instance(kind, d, seed)?;
            let mut m = inst.matching.clone();
            if let Some(z) = inst.avoid {
                m.set_label(z, Slot::Forbidden)?;
            }
            if let Some((x, y)) = inst.ends {
                m.set_label(x, Slot::Terminal)?;
                m.set_label(y, Slot::Terminal)?;
            }
            write_opt(dot.as_deref(), &matching_to_dot(&m))?;
            emit(&MatchingJson::from_matching(&m), out.as_deref())?;
            Ok(0)
        }
        Command::Suite { name, seed, samples, budget, out } => {
            let cfg = SuiteConfig { seed, samples, budget, jobs: None };
            let names: Vec<&str> = if name == "all" {
                SUITES.to_vec()
            } else {
                vec![name.as_str()]
            };
            let mut reports = Vec::new();
            let mut ok = true;
            for n in names {
                let report = run_suite(n, &cfg)?;
                eprintln!("{}", report.summary());
                ok &= report.is_green();
                reports.push(report);
            }
            if reports.len() == 1 {
                emit(&reports[0], out.as_deref())?;
            } else {
                emit(&reports, out.as_deref())?;
            }
            Ok(if ok { 0 } else { EXIT_NEGATIVE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cubeham: {e}");
            let code = match e {
                Error::Io(_) => 1,
                _ => EXIT_MALFORMED,
            };
            ExitCode::from(code)
        }
    }
}
