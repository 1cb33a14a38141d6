mod cache;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use khcable::diagrams::{braid_closure, cable_diagram, metadata, torus_link, whitehead_double, BraidWord, Crossing, PlanarDiagram};
use khcable::exactla::{RankMode, RankOptions};
use khcable::homology::{betti_with, jones_from_table, thickness, BettiTable, ComputeOptions, Engine};
use khcable::lee::{lee_betti_with, lee_dims_predicted, s_invariant_details};
use khcable::skein::les_check_with;
use khcable::verify::{self, Outcome, VerifyOptions, DEFAULT_BUDGET, REGISTRY};

use cache::Cache;

#[derive(Parser)]
#[command(name = "khcable", version, about = "Rational Khovanov homology of links, torus links, cables and Whitehead doubles")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Out::Text)]
    out: Out,
    /// Directory for cached Betti tables
    #[arg(long, global = true, env = "KHCABLE_CACHE")]
    cache: Option<PathBuf>,
    /// Seed for the random primes of modular rank certification
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refuse computations whose generator count exceeds this (0 = no limit)
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// How Betti tables are computed: the cube of resolutions, crossing by
    /// crossing over tangles, or the cube unless it exceeds the budget
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Worker threads for block ranks
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Cube,
    Local,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Modular,
    Exact,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Braid word, whitespace-separated signed generators, e.g. "1 1 -2"
    #[arg(long, allow_hyphen_values = true)]
    braid: Option<String>,
    /// JSON file with a list of crossings {"edges":[a,b,c,d],"sign":1|-1}
    #[arg(long)]
    pd: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Normalized homological degrees A:B to compute
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Modular)]
    mode: Mode,
    /// Report H (unnormalized gradings) instead of KH
    #[arg(long)]
    unnormalized: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Khovanov homology of a braid closure or PD code
    Compute {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Khovanov homology of the torus link T(P, Q)
    Torus {
        p: i64,
        #[arg(allow_hyphen_values = true)]
        q: i64,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Khovanov homology of the (P, Q + P*writhe) cable diagram of a braid closure
    Cable {
        #[arg(long, allow_hyphen_values = true)]
        braid: String,
        #[arg(short)]
        p: usize,
        #[arg(short)]
        q: usize,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Khovanov homology of the Q-twisted Whitehead double of a braid closure
    Double {
        #[arg(long, allow_hyphen_values = true)]
        braid: String,
        #[arg(short, allow_hyphen_values = true)]
        q: i64,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Jones polynomial from the graded Euler characteristic
    Jones {
        #[command(flatten)]
        source: Source,
    },
    /// Rasmussen invariant of a knot
    S {
        #[command(flatten)]
        source: Source,
    },
    /// Lee homology dimensions, computed and predicted from linking numbers
    Lee {
        #[command(flatten)]
        source: Source,
    },
    /// Homological width and the dealternating bound
    Thickness {
        #[command(flatten)]
        source: Source,
    },
    /// Check the skein exact sequence at one crossing
    Les {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        crossing: usize,
    },
    /// Run a registered verification
    Verify {
        /// Registered id; omit with --list
        #[arg(required_unless_present = "list")]
        id: Option<String>,
        /// Parameter overrides, key=value
        #[arg(long, num_args = 1..)]
        param: Vec<String>,
        /// Use the larger parameter set
        #[arg(long)]
        slow: bool,
        /// List registered ids
        #[arg(long)]
        list: bool,
    },
}

/// Exit status of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed,
    Refused,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Ok(Status::Refused) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn compute_options(cli: &Cli, mode: Mode) -> ComputeOptions {
    let mut rank = RankOptions::default();
    if let Some(seed) = cli.seed {
        rank.seed = seed;
    }
    rank.mode = match mode {
        Mode::Modular => RankMode::Modular,
        Mode::Exact => RankMode::Exact,
    };
    let engine = match cli.engine {
        EngineArg::Cube => Engine::Cube,
        EngineArg::Local => Engine::Local,
        EngineArg::Auto => Engine::Auto,
    };
    ComputeOptions { rank, budget: (cli.budget > 0).then_some(cli.budget), engine }
}

fn load(source: &Source) -> Result<PlanarDiagram> {
    if let Some(w) = &source.braid {
        return Ok(braid_closure(&w.parse::<BraidWord>()?));
    }
    let path = source.pd.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pd(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_pd(text: &str) -> Result<PlanarDiagram> {
    let crossings: Vec<Crossing> = serde_json::from_str(text)?;
    if crossings.is_empty() {
        bail!("empty crossing list; use --braid \"\" for the unknot");
    }
    Ok(PlanarDiagram::new(crossings, 0)?)
}

fn knot_braid(w: &str) -> Result<BraidWord> {
    let b: BraidWord = w.parse()?;
    Ok(if b.is_empty() { BraidWord::trivial(1)? } else { b })
}

/// `A:B` in normalized degrees to an unnormalized window clipped to the cube.
fn parse_window(spec: &str, d: &PlanarDiagram) -> Result<(usize, usize)> {
    let (a, b) = spec.split_once(':').ok_or_else(|| anyhow!("window must look like A:B, got `{spec}`"))?;
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    let shift = d.negative_count() as i64;
    let n = d.crossing_count() as i64;
    let (lo, hi) = (a + shift, b + shift);
    if a > b || hi < 0 || lo > n {
        return Err(khcable::Error::WindowOutOfRange { lo: a, hi: b, n: d.crossing_count() }.into());
    }
    Ok((lo.max(0) as usize, hi.min(n) as usize))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn describe(d: &PlanarDiagram) -> String {
    format!(
        "{} crossings ({} positive, {} negative), {} component(s)",
        d.crossing_count(),
        d.positive_count(),
        d.negative_count(),
        d.component_count()
    )
}

fn table_command(cli: &Cli, d: &PlanarDiagram, args: &TableArgs) -> Result<Status> {
    let window = args.window.as_deref().map(|w| parse_window(w, d)).transpose()?;
    let opts = compute_options(cli, args.mode);
    let mode = match args.mode {
        Mode::Modular => "modular",
        Mode::Exact => "exact",
    };
    let window_key = window.map_or("full".to_string(), |(a, b)| format!("{a}:{b}"));
    let normalized = !args.unnormalized;
    let key = Cache::key(&["betti-v1", &d.canonical_key(), mode, &window_key, &normalized.to_string()]);
    let cache = cli.cache.as_deref().map(Cache::open).transpose()?;
    let cached = match &cache {
        Some(c) => c.get(&key)?,
        None => None,
    };
    let json = match cached {
        Some(s) => s,
        None => {
            let t = betti_with(d, window, normalized, &opts)?;
            let s = serde_json::to_string_pretty(&t)?;
            if let Some(c) = &cache {
                c.put(&key, &s)?;
            }
            s
        }
    };
    match cli.out {
        Out::Json => println!("{json}"),
        Out::Text => {
            let t: BettiTable = serde_json::from_str(&json)?;
            println!("{}", describe(d));
            print!("{t}");
        }
    }
    Ok(Status::Ok)
}

fn run(cli: &Cli) -> Result<Status> {
    let opts = compute_options(cli, Mode::Modular);
    match &cli.cmd {
        Cmd::Compute { source, table } => table_command(cli, &load(source)?, table),
        Cmd::Torus { p, q, table } => table_command(cli, &torus_link(*p, *q)?, table),
        Cmd::Cable { braid, p, q, table } => table_command(cli, &cable_diagram(&knot_braid(braid)?, *p, *q)?, table),
        Cmd::Double { braid, q, table } => table_command(cli, &whitehead_double(&knot_braid(braid)?, *q)?, table),
        Cmd::Jones { source } => {
            let d = load(source)?;
            let v = jones_from_table(&betti_with(&d, None, true, &opts)?)?;
            match cli.out {
                Out::Json => {
                    let coeffs: BTreeMap<String, String> =
                        v.terms().iter().map(|(e, c)| (e.to_string(), c.to_string())).collect();
                    print_json(&json!({ "jones": v.to_string(), "coefficients": coeffs }))?;
                }
                Out::Text => println!("V(q) = {v}"),
            }
            Ok(Status::Ok)
        }
        Cmd::S { source } => {
            let d = load(source)?;
            let s = s_invariant_details(&d)?;
            match cli.out {
                Out::Json => print_json(&s)?,
                Out::Text => println!("s = {} (filtration gradings {} and {})", s.s, s.g_min, s.g_max),
            }
            Ok(Status::Ok)
        }
        Cmd::Lee { source } => {
            let d = load(source)?;
            let computed = lee_betti_with(&d, &opts)?;
            let predicted = lee_dims_predicted(&metadata(&d))?;
            let matches = computed == predicted;
            match cli.out {
                Out::Json => print_json(&json!({ "computed": computed, "predicted": predicted, "matches": matches }))?,
                Out::Text => {
                    println!("{}", describe(&d));
                    println!("{:>5} {:>9} {:>10}", "i", "computed", "predicted");
                    let is: std::collections::BTreeSet<i64> = computed.keys().chain(predicted.keys()).copied().collect();
                    for i in is {
                        let (c, p) = (computed.get(&i).copied().unwrap_or(0), predicted.get(&i).copied().unwrap_or(0));
                        println!("{i:>5} {c:>9} {p:>10}");
                    }
                }
            }
            Ok(if matches { Status::Ok } else { Status::CheckFailed })
        }
        Cmd::Thickness { source } => {
            let d = load(source)?;
            let (hw, bound) = thickness(&betti_with(&d, None, true, &opts)?)?;
            match cli.out {
                Out::Json => print_json(&json!({ "homological_width": hw, "dealternating_bound": bound }))?,
                Out::Text => println!("homological width {hw}, dealternating bound {bound}"),
            }
            Ok(Status::Ok)
        }
        Cmd::Les { source, crossing } => {
            let d = load(source)?;
            let r = les_check_with(&d, *crossing, &opts)?;
            match cli.out {
                Out::Json => print_json(&r)?,
                Out::Text => {
                    let verdict = if r.passed() { "holds" } else { "FAILS" };
                    println!("exact sequence at crossing {} of {}: {verdict} ({} q-gradings)", r.crossing, r.crossings, r.q_checked);
                    for f in &r.failures {
                        println!("  {f}");
                    }
                }
            }
            Ok(if r.passed() { Status::Ok } else { Status::CheckFailed })
        }
        Cmd::Verify { id, param, slow, list } => {
            if *list {
                for t in REGISTRY {
                    println!("{:<18} {}", t.id, t.summary);
                }
                return Ok(Status::Ok);
            }
            let id = id.as_deref().expect("clap requires id without --list");
            let mut params = BTreeMap::new();
            for p in param {
                let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("parameter must look like key=value, got `{p}`"))?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
            let vopts = VerifyOptions { compute: opts, slow: *slow };
            let report = verify::run(id, &params, &vopts)?;
            match cli.out {
                Out::Json => print_json(&report)?,
                Out::Text => {
                    println!("{} {:?} ({} ms)", report.id, report.params, report.wall_ms);
                    for c in &report.checks {
                        let mark = if c.passed { "pass" } else { "FAIL" };
                        println!("  [{mark}] {}: computed {}, predicted {}", c.name, c.computed, c.predicted);
                    }
                    match &report.outcome {
                        Outcome::Pass => println!("PASS"),
                        Outcome::Fail => println!("FAIL"),
                        Outcome::Refused(why) => println!("REFUSED: {why}"),
                    }
                }
            }
            Ok(match report.outcome {
                Outcome::Pass => Status::Ok,
                Outcome::Fail => Status::CheckFailed,
                Outcome::Refused(_) => Status::Refused,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pd_parsing() {
        let d = parse_pd(r#"[{"edges":[0,2,1,3],"sign":1},{"edges":[2,0,3,1],"sign":1}]"#).unwrap();
        assert_eq!(d.component_count(), 2);
        assert!(parse_pd("[]").is_err());
        assert!(parse_pd(r#"[{"edges":[0,1,1,0],"sign":2}]"#).is_err());
    }

    #[test]
    fn windows_are_shifted_and_clipped() {
        let d = braid_closure(&"-1 -1 -1".parse().unwrap());
        assert_eq!(parse_window("-3:0", &d).unwrap(), (0, 3));
        assert_eq!(parse_window("-10:-2", &d).unwrap(), (0, 1));
        assert!(parse_window("1:5", &d).is_err());
        assert!(parse_window("2", &d).is_err());
    }
}
