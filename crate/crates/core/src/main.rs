use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use arity_lab::arity::{
    arity_witness_search, set_system_levels, verify_set_systems, AllTuples, SearchOutcome,
};
use arity_lab::config::{Caps, DEFAULT_SEED, SEED_ENV};
use arity_lab::distality::{
    build_nondistal_witness, check_nondistal_witness, random_strong_instances, verify_parity_identity,
};
use arity_lab::error::{Error, Result};
use arity_lab::generators::{gen_cherlin_lachlan, gen_hypergraph, gen_johnson, parity_reduct, HypergraphMode};
use arity_lab::johnson_homogeneity::{extend_to_injection, induction_failure, IsoInstance, LkIso};
use arity_lab::pseudoplane::{build_fragment, build_goode_witness, check_drop_one_agreement, eval_phi};
use arity_lab::reproduce::{reproduce, Item, TOOL};
use arity_lab::structures::{ProfileMode, Structure};

#[derive(Parser, Debug)]
#[command(name = "arity-lab", version, about = "Arity witnesses and finite checks for relational structures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Format of the report printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = Caps::default().max_universe)]
    max_universe: u64,
    #[arg(long, global = true, default_value_t = Caps::default().max_table_rows)]
    max_table_rows: u64,
    #[arg(long, global = true, default_value_t = Caps::default().orbit_budget)]
    orbit_budget: u64,
    #[arg(long, global = true, default_value_t = Caps::default().max_fragment_vertices)]
    max_fragment_vertices: u64,
}

impl Global {
    fn caps(&self) -> Result<Caps> {
        let caps = Caps {
            max_universe: self.max_universe,
            max_table_rows: self.max_table_rows,
            orbit_budget: self.orbit_budget,
            max_fragment_vertices: self.max_fragment_vertices,
        };
        if [caps.max_universe, caps.max_table_rows, caps.orbit_budget, caps.max_fragment_vertices].contains(&0) {
            return Err(Error::input("resource caps must be positive"));
        }
        Ok(caps)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate a structure and write it as JSON.
    Gen(GenArgs),
    /// Search a structure for an arity witness.
    Arity(ArityArgs),
    /// Build and verify the set systems for `l` sets.
    Setsys(SetsysArgs),
    /// Build the accepted and refuted tuples of phi and check drop-one agreement.
    Goode(GoodeArgs),
    /// Extend an intersection-preserving map of k-sets to an injection of points.
    JohnsonExtend(JohnsonExtendArgs),
    /// Kay-graph parity identity, non-distality witness and strong distality check.
    Distal(DistalArgs),
    /// Run the pinned checks for every construction.
    Reproduce(ReproduceArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Hypergraph,
    Kaygraph,
    Johnson,
    CherlinLachlan,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Edge size, set size, or (for cherlin-lachlan) ignored.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    /// Largest orbit relation arity for cherlin-lachlan.
    #[arg(long, default_value_t = 2)]
    max_arity: usize,
    /// Where to write the orbit table of a cherlin-lachlan structure.
    #[arg(long)]
    orbit_csv: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    DropOne,
    UpToK,
}

#[derive(Args, Debug, Serialize)]
struct ArityArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::DropOne)]
    mode: ModeArg,
    /// Profile bound for `--mode up-to-k`.
    #[arg(long)]
    bound: Option<usize>,
    /// Examine every tuple (the default).
    #[arg(long, conflicts_with = "budget")]
    exhaustive: bool,
    /// Stop after this many tuples.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SetsysArgs {
    #[arg(long)]
    l: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GoodeArgs {
    /// Witness level: the tuples are for phi_{n+1} in a fragment with n + 1 sorts.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    labels: usize,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct JohnsonExtendArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum DistalCheck {
    Parity,
    Witness,
    StrongCheck,
}

#[derive(Args, Debug, Serialize)]
struct DistalArgs {
    #[arg(value_enum)]
    check: DistalCheck,
    #[arg(long)]
    k: usize,
    /// Universe size of the random kay-graph for `parity`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    /// Samples for `parity` (exhaustive when omitted) or instances for
    /// `strong-check`.
    #[arg(long)]
    samples: Option<u64>,
    /// Length of each block of the non-distality witness.
    #[arg(long, default_value_t = 2)]
    len_each: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ReproduceArgs {
    #[arg(long, conflicts_with = "item")]
    all: bool,
    /// Run one registry item; repeatable.
    #[arg(long)]
    item: Vec<String>,
    /// List the registry and exit.
    #[arg(long)]
    list: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Everything a subcommand produces.
struct Outcome {
    exit: u8,
    /// Printed for `--format text`.
    lines: Vec<String>,
    result: Value,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'a str,
    version: &'a str,
    command: &'a Command,
    seed: u64,
    caps: Caps,
    exit_code: u8,
    result: &'a Value,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match cli.global.caps() {
        Ok(c) => c,
        Err(e) => return fail(&cli, &e),
    };
    let outcome = match run(&cli, &caps) {
        Ok(o) => o,
        Err(e) => return fail(&cli, &e),
    };
    let envelope = Envelope {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: &cli.command,
        seed: cli.global.seed,
        caps,
        exit_code: outcome.exit,
        result: &outcome.result,
    };
    let json = serde_json::to_string_pretty(&envelope).expect("reports serialize") + "\n";
    if let Some(path) = report_path(&cli.command) {
        if let Err(e) = write_file(path, &json) {
            return fail(&cli, &e);
        }
    }
    print_report(cli.global.format, &json, &outcome.lines);
    ExitCode::from(outcome.exit)
}

fn fail(cli: &Cli, e: &Error) -> ExitCode {
    let code = e.exit_code() as u8;
    eprintln!("arity-lab: {e}");
    let report = json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": &cli.command,
        "seed": cli.global.seed,
        "exit_code": code,
        "error": e.to_string(),
    });
    let json = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    print_report(cli.global.format, &json, &[format!("error: {e}")]);
    ExitCode::from(code)
}

/// Where the subcommand's JSON report goes; `gen` writes a structure
/// instead.
fn report_path(c: &Command) -> Option<&Path> {
    match c {
        Command::Gen(_) => None,
        Command::Arity(a) => a.output.as_deref(),
        Command::Setsys(a) => a.output.as_deref(),
        Command::Goode(a) => a.output.as_deref(),
        Command::JohnsonExtend(a) => a.output.as_deref(),
        Command::Distal(a) => a.output.as_deref(),
        Command::Reproduce(a) => a.output.as_deref(),
    }
}

fn print_report(format: Format, json: &str, lines: &[String]) {
    match format {
        Format::Json => print!("{json}"),
        Format::Text => {
            for l in lines {
                println!("{l}");
            }
        }
        Format::Csv => {
            let value: Value = serde_json::from_str(json).expect("report is JSON");
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let _ = w.write_record(["field", "value"]);
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            for (k, v) in rows {
                let _ = w.write_record([k, v]);
            }
            let _ = w.flush();
        }
    }
}

/// Leaf values keyed by dotted paths.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn run(cli: &Cli, caps: &Caps) -> Result<Outcome> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Gen(a) => gen(a, seed, caps),
        Command::Arity(a) => arity(a),
        Command::Setsys(a) => setsys(a, caps),
        Command::Goode(a) => goode(a, caps),
        Command::JohnsonExtend(a) => johnson_extend(a),
        Command::Distal(a) => distal(a, seed),
        Command::Reproduce(a) => run_reproduce(a, seed, caps),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn gen(a: &GenArgs, seed: u64, caps: &Caps) -> Result<Outcome> {
    if a.n as u64 > caps.max_universe {
        return Err(Error::resource(format!("ground set of {}", a.n), caps.max_universe));
    }
    let mut extra = json!({});
    let s: Structure = match a.family {
        Family::Hypergraph => gen_hypergraph(a.n, a.k, &HypergraphMode::Random { seed, edge_prob: a.edge_prob })?,
        Family::Kaygraph => {
            let h = gen_hypergraph(a.n, a.k, &HypergraphMode::Random { seed, edge_prob: a.edge_prob })?;
            parity_reduct(&h)?.reduct
        }
        Family::Johnson => gen_johnson(a.n, a.k, caps)?.to_structure(caps)?,
        Family::CherlinLachlan => {
            let cl = gen_cherlin_lachlan(a.n, a.max_arity, caps)?;
            if let Some(p) = &a.orbit_csv {
                write_file(p, &cl.orbit_csv()?)?;
            }
            extra = json!({ "orbit_counts": cl.orbit_counts() });
            cl.to_structure(caps)?
        }
    };
    write_file(&a.output, &s.to_json_string())?;
    let rows: usize = (0..s.signature().len()).map(|r| s.table(r).len()).sum();
    Ok(Outcome {
        exit: 0,
        lines: vec![format!(
            "wrote {} with {} elements, {} relations, {rows} rows",
            a.output.display(),
            s.universe(),
            s.signature().len()
        )],
        result: json!({
            "output": a.output,
            "universe": s.universe(),
            "relations": s.signature().len(),
            "rows": rows,
            "digest": arity_lab::structures::Relational::digest(&s),
            "extra": extra,
        }),
    })
}

fn arity(a: &ArityArgs) -> Result<Outcome> {
    let s = Structure::load(&a.structure)?;
    let mode = match (a.mode, a.bound) {
        (ModeArg::DropOne, None) => ProfileMode::DropOne,
        (ModeArg::DropOne, Some(_)) => return Err(Error::input("--bound only applies to --mode up-to-k")),
        (ModeArg::UpToK, Some(k)) => ProfileMode::UpToK(k),
        (ModeArg::UpToK, None) => return Err(Error::input("--mode up-to-k needs --bound")),
    };
    let source = AllTuples { universe: s.universe() };
    let o = arity_witness_search(&s, a.l, mode, &source, a.budget)?;
    let line = match &o {
        SearchOutcome::Witness { witness, tuples_examined, .. } => {
            format!("witness {:?} vs {:?} after {tuples_examined} tuples", witness.t1, witness.t2)
        }
        SearchOutcome::ExhaustedNoWitness { tuples_examined, .. } => {
            format!("exhausted {tuples_examined} tuples, no witness")
        }
        SearchOutcome::BudgetExhausted { tuples_examined, .. } => {
            format!("budget exhausted after {tuples_examined} tuples")
        }
    };
    Ok(Outcome {
        exit: o.exit_code() as u8,
        lines: vec![line],
        result: json!({ "structure_digest": arity_lab::structures::Relational::digest(&s), "outcome": o }),
    })
}

fn setsys(a: &SetsysArgs, caps: &Caps) -> Result<Outcome> {
    if a.l < 1 {
        return Err(Error::input("set systems need l >= 1"));
    }
    let levels = set_system_levels(a.l);
    let reports: Vec<_> = levels.iter().map(|p| verify_set_systems(p, caps)).collect();
    let pass = reports.iter().all(|r| r.pass);
    let last = reports.last().expect("at least one level");
    Ok(Outcome {
        exit: if pass { 0 } else { 5 },
        lines: vec![
            format!("{} levels, all verified: {pass}", reports.len()),
            format!(
                "final intersections {:?}, common size {:?}, J(k) witness {:?}",
                last.full_intersection_sizes, last.k, last.johnson_witness
            ),
        ],
        result: json!({ "pass": pass, "pair": levels.last(), "reports": reports }),
    })
}

fn goode(a: &GoodeArgs, caps: &Caps) -> Result<Outcome> {
    if a.n < 1 {
        return Err(Error::input("goode needs n >= 1"));
    }
    let radius = a.radius.unwrap_or(a.n);
    let depth = a.depth.unwrap_or(radius + 1);
    let f = Arc::new(build_fragment(a.n + 1, a.labels, depth, caps)?);
    let mut w = build_goode_witness(a.n, &f)?;
    let accepted = eval_phi(&f, a.n + 1, &w.b)?;
    let refuted = eval_phi(&f, a.n + 1, &w.b_prime)?;
    let agreement = check_drop_one_agreement(&w, &f, radius)?;
    w.radius = agreement.max_radius;
    let show = |t: &[u32]| t.iter().map(|&v| f.describe(v)).collect::<Vec<_>>();
    let pass = accepted.value && !refuted.value && agreement.success;
    Ok(Outcome {
        exit: if pass { 0 } else { 5 },
        lines: vec![
            format!("b  = {}", show(&w.b).join(" ")),
            format!("b' = {}", show(&w.b_prime).join(" ")),
            format!("phi_{}(b) = {}, phi_{}(b') = {}", a.n + 1, accepted.value, a.n + 1, refuted.value),
            format!(
                "drop-one agreement at radius {radius}: {} (largest radius reached {:?})",
                agreement.success, agreement.max_radius
            ),
        ],
        result: json!({
            "fragment": { "sorts": a.n + 1, "labels": a.labels, "depth": depth, "vertices": f.len() },
            "a": show(&w.a), "a_prime": show(&w.a_prime),
            "b": show(&w.b), "b_prime": show(&w.b_prime),
            "b_ids": w.b, "b_prime_ids": w.b_prime,
            "phi_b": accepted, "phi_b_prime": refuted,
            "radius": w.radius,
            "agreement": agreement,
        }),
    })
}

fn johnson_extend(a: &JohnsonExtendArgs) -> Result<Outcome> {
    let inst: IsoInstance = serde_json::from_str(&read_file(&a.instance)?)?;
    let c = LkIso::new(a.n, a.k, &inst)?;
    let inj = extend_to_injection(&c)?;
    if let Some(why) = induction_failure(&c, &inj) {
        return Err(Error::consistency(why));
    }
    Ok(Outcome {
        exit: 0,
        lines: vec![
            format!("sigma on {} points, {} classes", inj.sigma.len(), inj.classes.len()),
            inj.sigma.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" "),
        ],
        result: to_value(&inj),
    })
}

fn distal(a: &DistalArgs, seed: u64) -> Result<Outcome> {
    match a.check {
        DistalCheck::Parity => {
            let n = a.n.unwrap_or(if a.k == 2 { 6 } else { 12 });
            let h = gen_hypergraph(n, a.k, &HypergraphMode::Random { seed, edge_prob: a.edge_prob })?;
            let r = verify_parity_identity(&parity_reduct(&h)?, a.samples, seed)?;
            if r.violations > 0 {
                return Err(Error::consistency(format!(
                    "parity identity fails at {:?}",
                    r.first_violation.as_deref().unwrap_or_default()
                )));
            }
            Ok(Outcome {
                exit: 0,
                lines: vec![format!(
                    "k = {}, n = {n}, {} checked ({}), {} violations",
                    r.k,
                    r.checked,
                    if r.exhaustive { "exhaustive" } else { "sampled" },
                    r.violations
                )],
                result: to_value(&r),
            })
        }
        DistalCheck::Witness => {
            let w = build_nondistal_witness(a.k, a.len_each)?;
            let r = check_nondistal_witness(&w, a.len_each)?;
            Ok(Outcome {
                exit: if r.pass { 0 } else { 5 },
                lines: vec![
                    format!("sequence of {} points, v = {:?}", r.sequence_length, r.v),
                    format!("full sequence indiscernible: {}", r.full.is_yes()),
                    format!(
                        "drop-one sequences indiscernible: {:?}",
                        r.drop_one.iter().map(|d| d.is_yes()).collect::<Vec<_>>()
                    ),
                ],
                result: json!({ "report": r, "edges": arity_lab::generators::edge_sets(&w.kay.base) }),
            })
        }
        DistalCheck::StrongCheck => {
            let r = random_strong_instances(a.k..=a.k, a.samples.unwrap_or(10_000), seed)?;
            if r.violations > 0 {
                return Err(Error::consistency(format!("{} theorem violations", r.violations)));
            }
            Ok(Outcome {
                exit: 0,
                lines: vec![format!(
                    "{} instances, theorem applies to {}, hypotheses held there {} times, {} violations",
                    r.instances, r.theorem_applies, r.hypotheses_held_where_applies, r.violations
                )],
                result: to_value(&r),
            })
        }
    }
}

fn run_reproduce(a: &ReproduceArgs, seed: u64, caps: &Caps) -> Result<Outcome> {
    if a.list {
        return Ok(Outcome {
            exit: 0,
            lines: Item::ALL.iter().map(|i| i.name().to_string()).collect(),
            result: to_value(&Item::ALL.iter().map(|i| i.name()).collect::<Vec<_>>()),
        });
    }
    let items: Vec<Item> = if a.all {
        Item::ALL.to_vec()
    } else if a.item.is_empty() {
        return Err(Error::input("give --all, --list or at least one --item"));
    } else {
        a.item.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let report = reproduce(&items, seed, caps);
    let mut lines = Vec::new();
    for r in &report.items {
        lines.push(format!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.item));
        lines.extend(r.summary.iter().map(|s| format!("    {s}")));
        if let Some(e) = &r.error {
            lines.push(format!("    error: {e}"));
        }
    }
    Ok(Outcome {
        exit: if report.pass { 0 } else { 5 },
        lines,
        result: to_value(&report),
    })
}
