mod table;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use permdiff::bounds::{self, report_for, split_strength};
use permdiff::capacity::{capacity_profile, QuotientGraph};
use permdiff::constructions::{self, DEFAULT_MAX_MEMBERS};
use permdiff::solver::{
    build_conflict_graph, max_clique_with, SearchOptions, DEFAULT_MAX_VERTICES,
};
use permdiff::{
    verify_family, BigUint, Budget, DistanceSet, Error, PermFamily, Relation, VerifyMode,
    VerifyStatus,
};

use table::{Cell, Table};

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Families above this many pairs are verified by sampling unless told otherwise.
const EXHAUSTIVE_PAIR_LIMIT: u64 = 2_000_000_000;
const DEFAULT_SAMPLE_PAIRS: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "permdiff",
    version,
    about = "Graph-different permutation families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an explicit family, verify it and write it with a JSON sidecar.
    Construct(ConstructArgs),
    /// Check that a family file is pairwise different under its relation.
    Verify(VerifyArgs),
    /// Compute T(n, D) exactly with branch and bound.
    Solve(SolveArgs),
    /// Best known lower and upper bounds.
    Bounds(BoundsArgs),
    /// Split-strength intervals for a distance set and its complement.
    Split(SplitArgs),
    /// Typed clique profile of a quotient graph.
    Capacity(CapacityArgs),
    /// Summary of the closed forms, bounds and capacity profile.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(group(
    ArgGroup::new("kind")
        .required(true)
        .args(["thm1", "corollary", "even_positions", "hookup", "valuation", "residue_concat"])
))]
struct ConstructArgs {
    /// Coset-product family for complement({1}).
    #[arg(long)]
    thm1: bool,
    /// Residue-class family for complement({q}).
    #[arg(long)]
    corollary: bool,
    /// Even-position family for the odd differences.
    #[arg(long)]
    even_positions: bool,
    /// Hook-up family for the even differences.
    #[arg(long)]
    hookup: bool,
    /// Block family for valuation:p:q.
    #[arg(long)]
    valuation: bool,
    /// Residue-class concatenation of exact {1} families, for {q}.
    #[arg(long)]
    residue_concat: bool,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    /// Family file; the sidecar goes to `<out>.json`. Without it the family is
    /// printed and the sidecar goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report sizes without building the family.
    #[arg(long)]
    count_only: bool,
    /// Refuse to build families larger than this.
    #[arg(long, default_value_t = DEFAULT_MAX_MEMBERS)]
    cap: u64,
    /// Verify this many random pairs instead of all pairs.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Family file.
    file: PathBuf,
    /// Check against this relation instead of the one in the header.
    #[arg(long)]
    d: Option<String>,
    /// Verify this many random pairs instead of all pairs.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 300)]
    budget_secs: u64,
    #[arg(long, default_value_t = 100_000_000)]
    budget_nodes: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: Duration::from_secs(self.budget_secs),
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    /// Distance set, e.g. `finite:1` or `complement(residue:2:0)`.
    #[arg(long)]
    d: String,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the witness family here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Lengths: `7`, `1,2,5` or `1..10`.
    #[arg(long)]
    n: String,
    /// Distance sets; may be repeated.
    #[arg(long, required = true)]
    d: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "finite:1")]
    d: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// Quotient graph, e.g. `cycle:5` or `edges:4:0-1,1-2`.
    #[arg(long, default_value = "cycle:5")]
    m: String,
    #[arg(long, default_value = "1..5")]
    n: String,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Split(a) => split(a),
        Command::Capacity(a) => capacity(a),
        Command::Table(a) => summary(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_ns(s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::validation(format!("cannot parse length list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().map_err(|_| bad())?;
            let b: u64 = b.parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(Failure::validation("lengths must be positive"));
    }
    Ok(out)
}

fn parse_d(s: &str) -> Result<DistanceSet, Failure> {
    Ok(s.parse()?)
}

fn print_table(t: &Table, format: Format) {
    match format {
        Format::Csv => print!("{}", t.to_csv()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&t.to_json()).unwrap()),
    }
}

/// Result of checking a family, shared by the sidecar and `verify` so the two agree.
#[derive(Debug, Serialize)]
struct Check {
    verified: bool,
    verification: &'static str,
    pairs_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[String; 2]>,
}

fn check(family: &PermFamily, relation: &Relation, sample: Option<u64>, seed: u64) -> Check {
    let m = family.len() as u64;
    let pairs = m * m.saturating_sub(1) / 2;
    let mode = match sample {
        Some(k) => VerifyMode::Sampled { pairs: k, seed },
        None if pairs <= EXHAUSTIVE_PAIR_LIMIT => VerifyMode::Exhaustive,
        None => VerifyMode::Sampled {
            pairs: DEFAULT_SAMPLE_PAIRS,
            seed,
        },
    };
    let report = verify_family(family, relation, mode);
    Check {
        verified: report.passed(),
        verification: match report.status {
            VerifyStatus::AllPairsValid => "all_pairs_valid",
            VerifyStatus::Sampled => "sampled",
            VerifyStatus::FailureWitness => "failure_witness",
        },
        pairs_checked: report.pairs_checked,
        seed: matches!(mode, VerifyMode::Sampled { .. }).then_some(seed),
        witness: report.witness.map(|(a, b)| [a.to_string(), b.to_string()]),
    }
}

#[derive(Debug, Serialize)]
struct Sidecar {
    n: usize,
    #[serde(rename = "D")]
    d: String,
    provenance: String,
    claimed_size: String,
    formula_size: String,
    #[serde(flatten)]
    check: Option<Check>,
}

fn require(v: Option<u32>, flag: &str) -> Result<u32, Failure> {
    v.ok_or_else(|| Failure::validation(format!("this construction needs --{flag}")))
}

fn construct(a: ConstructArgs) -> Outcome {
    let n = a.n;
    if n == 0 {
        return Err(Failure::validation("--n must be at least 1"));
    }
    let (relation, label, formula): (Relation, &str, BigUint) = if a.thm1 {
        (
            DistanceSet::Finite(vec![1]).complement().into(),
            "theorem1",
            bounds::formula_theorem1(n as u64),
        )
    } else if a.corollary {
        let q = require(a.q, "q")?;
        (
            DistanceSet::single(q as u64)?.complement().into(),
            "corollary",
            bounds::formula_corollary(n as u64, q as u64),
        )
    } else if a.even_positions {
        (
            DistanceSet::evens().complement().into(),
            "even-positions",
            bounds::formula_binomial_middle(n as u64),
        )
    } else if a.hookup {
        (
            DistanceSet::evens().into(),
            "hookup",
            bounds::hookup_size(n as u64),
        )
    } else if a.valuation {
        let (p, q) = (require(a.p, "p")?, require(a.q, "q")?);
        (
            DistanceSet::valuation(p, q)?.into(),
            "valuation",
            bounds::valuation_lower(n as u64, p, q)?,
        )
    } else {
        let q = require(a.q, "q")?;
        if q == 0 {
            return Err(Failure::validation("--q must be at least 1"));
        }
        let budget = a.budget.budget();
        let formula = (0..q as usize)
            .map(|m| (1..=n).filter(|v| v % q as usize == m).count())
            .filter(|&size| size > 0)
            .map(|size| solve_colliding(size, budget).map(|f| BigUint::from(f.len())))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .product();
        (
            DistanceSet::single(q as u64)?.into(),
            "residue-concat",
            formula,
        )
    };

    if a.count_only {
        let sidecar = Sidecar {
            n,
            d: relation.to_string(),
            provenance: label.into(),
            claimed_size: formula.to_string(),
            formula_size: formula.to_string(),
            check: None,
        };
        println!("{}", serde_json::to_string_pretty(&sidecar).unwrap());
        return Ok(0);
    }

    let family = if a.thm1 {
        constructions::construct_theorem1_capped(n, a.cap)?
    } else if a.corollary {
        constructions::construct_corollary_capped(n, a.q.unwrap_or(1) as usize, a.cap)?
    } else if a.even_positions {
        cap_check(&formula, a.cap)?;
        constructions::construct_even_positions(n)?
    } else if a.hookup {
        constructions::construct_hookup_capped(n, a.cap)?
    } else if a.valuation {
        constructions::construct_valuation_capped(n, a.p.unwrap_or(0), a.q.unwrap_or(0), a.cap)?
    } else {
        cap_check(&formula, a.cap)?;
        let budget = a.budget.budget();
        constructions::construct_residue_concat(n, a.q.unwrap_or(1) as usize, |size| {
            solve_colliding(size, budget).map_err(|f| Error::Parameter(f.message))
        })?
    };

    let check = check(&family, &relation, a.sample, a.seed);
    let claimed = family.claimed_size();
    let sidecar = Sidecar {
        n,
        d: relation.to_string(),
        provenance: family.provenance().to_string(),
        claimed_size: claimed.to_string(),
        formula_size: formula.to_string(),
        check: Some(check),
    };
    let json = serde_json::to_string_pretty(&sidecar).unwrap();
    match &a.out {
        Some(path) => {
            let mut w = io::BufWriter::new(fs::File::create(path)?);
            family.write_to(&mut w)?;
            w.flush()?;
            fs::write(sidecar_path(path), format!("{json}\n"))?;
            println!("{json}");
        }
        None => {
            let stdout = io::stdout();
            family.write_to(io::BufWriter::new(stdout.lock()))?;
            eprintln!("{json}");
        }
    }
    let verified = sidecar.check.as_ref().is_some_and(|c| c.verified);
    if !verified || claimed != formula {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

fn cap_check(size: &BigUint, cap: u64) -> Result<(), Failure> {
    if *size > BigUint::from(cap) {
        return Err(Failure::validation(format!(
            "family would have {size} members, cap is {cap}"
        )));
    }
    Ok(())
}

/// Exact `{1}` family by search; budget exhaustion maps to its own exit code.
fn solve_colliding(size: usize, budget: Budget) -> Result<PermFamily, Failure> {
    let d = DistanceSet::Finite(vec![1]);
    let g = build_conflict_graph(size, &d.into(), DEFAULT_MAX_VERTICES)?;
    let r = max_clique_with(
        &g,
        SearchOptions {
            budget,
            ..SearchOptions::default()
        },
    );
    if !r.exact {
        return Err(Failure {
            code: EXIT_BUDGET,
            message: format!("search for T({size}, finite:1) did not finish within the budget"),
        });
    }
    Ok(r.witness_family(&g, "solver")?)
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    n: usize,
    #[serde(rename = "D")]
    d: String,
    provenance: String,
    size: usize,
    #[serde(flatten)]
    check: Check,
}

fn verify(a: VerifyArgs) -> Outcome {
    let file = fs::File::open(&a.file)?;
    let family = PermFamily::read_from(BufReader::new(file))?;
    let relation = match &a.d {
        Some(s) => s.parse::<Relation>()?,
        None => family.relation().clone(),
    };
    let check = check(&family, &relation, a.sample, a.seed);
    let ok = check.verified;
    let out = VerifyOutput {
        n: family.n(),
        d: relation.to_string(),
        provenance: family.provenance().to_string(),
        size: family.len(),
        check,
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(if ok { 0 } else { EXIT_VIOLATION })
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    n: usize,
    #[serde(rename = "D")]
    d: String,
    value: usize,
    exact: bool,
    bound: usize,
    bound_source: permdiff::solver::BoundSource,
    nodes: u64,
    witness_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conjecture_ref: Option<String>,
}

fn solve(a: SolveArgs) -> Outcome {
    if a.n == 0 {
        return Err(Failure::validation("--n must be at least 1"));
    }
    if a.workers == 0 {
        return Err(Failure::validation("--workers must be at least 1"));
    }
    let d = parse_d(&a.d)?;
    let relation: Relation = d.clone().into();
    let g = build_conflict_graph(a.n, &relation, DEFAULT_MAX_VERTICES)?;
    let r = max_clique_with(
        &g,
        SearchOptions {
            budget: a.budget.budget(),
            workers: a.workers,
            upper_bound: None,
        },
    );
    let witness_file = match &a.out {
        Some(path) => {
            let family = r.witness_family(&g, "solver")?;
            fs::write(path, family.to_file_string())?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let conjecture_ref = (d == DistanceSet::Finite(vec![1]))
        .then(|| permdiff::arith::binomial(a.n as u64, a.n as u64 / 2).to_string());
    let out = SolveOutput {
        n: a.n,
        d: d.to_string(),
        value: r.clique_size,
        exact: r.exact,
        bound: r.proof_bound,
        bound_source: r.bound_source,
        nodes: r.nodes,
        witness_file,
        conjecture_ref,
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(if r.exact { 0 } else { EXIT_BUDGET })
}

fn bounds_table(ns: &[u64], ds: &[DistanceSet]) -> Result<Table, Failure> {
    let mut t = Table::new(
        "bounds",
        &[
            "n",
            "D",
            "lower",
            "lower_source",
            "upper",
            "upper_source",
            "log2_lower",
            "log2_upper",
            "exact",
        ],
    );
    for d in ds {
        for &n in ns {
            let r = report_for(n, d)?;
            t.push(vec![
                n.into(),
                d.to_string().into(),
                (&r.lower.value).into(),
                r.lower.provenance.to_string().into(),
                (&r.upper.value).into(),
                r.upper.provenance.to_string().into(),
                r.lower.log2().into(),
                r.upper.log2().into(),
                r.is_exact().into(),
            ]);
        }
    }
    Ok(t)
}

fn bounds_cmd(a: BoundsArgs) -> Outcome {
    let ns = parse_ns(&a.n)?;
    let ds =
        a.d.iter()
            .map(|s| parse_d(s))
            .collect::<Result<Vec<_>, _>>()?;
    let t = bounds_table(&ns, &ds)?;
    for row in &t.rows {
        if let (Cell::Int(lo), Cell::Int(hi)) = (&row[2], &row[4]) {
            if lo.parse::<BigUint>().ok() > hi.parse::<BigUint>().ok() {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: format!("lower bound {lo} exceeds upper bound {hi}"),
                });
            }
        }
    }
    print_table(&t, a.format);
    Ok(0)
}

fn split_table(ns: &[u64], d: &DistanceSet) -> Result<Table, Failure> {
    let mut t = Table::new("split", &["n", "D", "lo", "hi", "width"]);
    let c = d.complement();
    for &n in ns {
        let s = split_strength(n, &report_for(n, d)?, &report_for(n, &c)?)?;
        t.push(vec![
            n.into(),
            d.to_string().into(),
            s.lo.into(),
            s.hi.into(),
            (s.hi - s.lo).into(),
        ]);
    }
    Ok(t)
}

fn split(a: SplitArgs) -> Outcome {
    let t = split_table(&parse_ns(&a.n)?, &parse_d(&a.d)?)?;
    print_table(&t, a.format);
    Ok(0)
}

fn capacity_table(m: &QuotientGraph, ns: &[u64], budget: Budget) -> Result<Table, Failure> {
    let ns: Vec<usize> = ns.iter().map(|&n| n as usize).collect();
    let rows = capacity_profile(m, &ns, budget)?;
    let mut t = Table::new(
        format!("capacity {m}"),
        &[
            "n",
            "omega",
            "exact",
            "proof_bound",
            "rate",
            "chromatic_ceiling",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.n.into(),
            r.omega.into(),
            r.exact.into(),
            r.proof_bound.into(),
            r.rate.into(),
            r.chromatic_ceiling.into(),
        ]);
    }
    if let Some(reference) = rows.first().and_then(|r| r.reference) {
        t.notes.push(("reference", reference.into()));
    }
    Ok(t)
}

fn capacity(a: CapacityArgs) -> Outcome {
    let m: QuotientGraph = a.m.parse()?;
    let t = capacity_table(&m, &parse_ns(&a.n)?, a.budget.budget())?;
    print_table(&t, a.format);
    let exact = t.rows.iter().all(|r| matches!(r[2], Cell::Bool(true)));
    Ok(if exact { 0 } else { EXIT_BUDGET })
}

fn summary(a: TableArgs) -> Outcome {
    let mut tables = Vec::new();

    let mut closed = Table::new("theorem1", &["n", "size"]);
    for n in 1..=10u64 {
        closed.push(vec![n.into(), (&bounds::formula_theorem1(n)).into()]);
    }
    tables.push(closed);

    let mut grid = Table::new("residue-class grid", &["n", "q=1", "q=2", "q=3", "q=4"]);
    for n in 1..=10u64 {
        let mut row = vec![n.into()];
        row.extend((1..=4).map(|q| (&bounds::formula_corollary(n, q)).into()));
        grid.push(row);
    }
    tables.push(grid);

    let mut even = bounds_table(&(2..=10).collect::<Vec<_>>(), &[DistanceSet::evens()])?;
    even.title = "even differences".into();
    tables.push(even);

    let v = DistanceSet::valuation(1, 2)?;
    let mut val = bounds_table(&[4, 16], &[v.clone(), v.complement()])?;
    val.title = "valuation bounds".into();
    tables.push(val);

    tables.push(split_table(&[4, 8, 12, 16], &DistanceSet::Finite(vec![1]))?);
    tables.push(capacity_table(
        &QuotientGraph::cycle(5)?,
        &[1, 2, 3, 4, 5],
        a.budget.budget(),
    )?);

    match a.format {
        Format::Csv => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("# {}", t.title);
                print!("{}", t.to_csv());
            }
        }
        Format::Json => {
            let all: Vec<_> = tables.iter().map(Table::to_json).collect();
            println!("{}", serde_json::to_string_pretty(&all).unwrap());
        }
    }
    Ok(0)
}
