use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use subop_core::{
    first_closure_difference, iterate_stages, oracle_relation, oracle_subtype, to_dot, to_json,
    Budget, BuildError, ClassTable, ClosureDifference, SubtypingRelation,
};

const EXAMPLE_ONE: &str = "class C<T> extends Object {}\n";
const EXAMPLE_TWO: &str = "class C<T> extends Object {}\nclass D<T> extends Object {}\n";

mod exit {
    pub const NEGATIVE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BUDGET: u8 = 3;
}

#[derive(Parser)]
#[command(
    name = "subop",
    version,
    about = "Build and check generic subtyping relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the relation up to rank N and export its Hasse diagram.
    Build {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Dot)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Decide LEFT <: RIGHT; exits 0 when it holds and 1 otherwise.
    Check {
        #[arg(short, long)]
        input: PathBuf,
        left: String,
        right: String,
    },
    /// Print carrier size, new types and Hasse edge count for every rank up to N.
    Stats {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Compare the construction with the containment oracle for every rank up to N.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        budget: Option<usize>,
        /// Remove the Hasse edge SUB -> SUPER from the rank-N result before comparing.
        #[arg(long, num_args = 2, value_names = ["SUB", "SUPER"], hide = true)]
        drop_edge: Option<Vec<String>>,
    },
    /// Reproduce one of the two built-in examples as DOT and JSON.
    Demo {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        /// Directory to write exampleK.dot and exampleK.json into.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failed command: message for stderr and the exit status.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            status: exit::USAGE,
            message: message.into(),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Budget(_) => Failure {
                status: exit::BUDGET,
                message: e.to_string(),
            },
            // the construction itself is broken; not a user error
            BuildError::Relation(_) => Failure {
                status: exit::NEGATIVE,
                message: format!("internal error: {e}"),
            },
        }
    }
}

type Outcome = Result<u8, Failure>;

fn load_table(path: &Path) -> Result<ClassTable, Failure> {
    let source =
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    ClassTable::parse(&source).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn budget(b: Option<usize>) -> Budget {
    b.map(Budget).unwrap_or_default()
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn build(
    input: &Path,
    n: u32,
    format: OutputFormat,
    output: Option<&Path>,
    b: Option<usize>,
) -> Outcome {
    let table = load_table(input)?;
    let relation = iterate_stages(&table, n, budget(b))?
        .pop()
        .expect("rank-0 stage");
    let text = match format {
        OutputFormat::Dot => to_dot(&relation),
        OutputFormat::Json => to_json(&relation),
    };
    emit(output, &text)?;
    Ok(0)
}

fn check(input: &Path, left: &str, right: &str) -> Outcome {
    let table = load_table(input)?;
    let parse = |s: &str| {
        table
            .parse_type(s)
            .map_err(|e| Failure::usage(format!("`{s}`: {e}")))
    };
    let (l, r) = (parse(left)?, parse(right)?);
    let holds = oracle_subtype(&table, &l, &r).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{holds}");
    Ok(if holds { 0 } else { exit::NEGATIVE })
}

fn stats(input: &Path, n: u32, as_json: bool, b: Option<usize>) -> Outcome {
    let table = load_table(input)?;
    let stages = iterate_stages(&table, n, budget(b))?;
    let rows: Vec<(usize, usize, usize, usize)> = stages
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let new = if k == 0 {
                r.len()
            } else {
                r.len() - stages[k - 1].len()
            };
            (k, r.len(), new, r.hasse_indices().len())
        })
        .collect();
    let mut out = String::new();
    if as_json {
        let doc: Vec<_> = rows
            .iter()
            .map(|&(k, size, new, edges)| json!({"n": k, "types": size, "new": new, "hasse_edges": edges}))
            .collect();
        out = serde_json::to_string_pretty(&doc).expect("serializable");
        out.push('\n');
    } else {
        out.push_str("n\ttypes\tnew\thasse_edges\n");
        for (k, size, new, edges) in rows {
            out.push_str(&format!("{k}\t{size}\t{new}\t{edges}\n"));
        }
    }
    emit(None, &out)?;
    Ok(0)
}

fn without_edge(
    r: &SubtypingRelation,
    pair: &[String],
    table: &ClassTable,
) -> Result<SubtypingRelation, Failure> {
    let parse = |s: &String| {
        table
            .parse_type(s)
            .map_err(|e| Failure::usage(format!("`{s}`: {e}")))
    };
    let (sub, sup) = (parse(&pair[0])?, parse(&pair[1])?);
    if !r.is_hasse_edge(&sub, &sup) {
        return Err(Failure::usage(format!(
            "{sub} -> {sup} is not a Hasse edge"
        )));
    }
    let edges = r
        .hasse_edges()
        .filter(|&(a, b)| !(*a == sub && *b == sup))
        .map(|(a, b)| (a.clone(), b.clone()));
    Ok(
        SubtypingRelation::from_edges(r.carrier().to_vec(), edges, r.iteration())
            .expect("subset of a Hasse diagram is acyclic"),
    )
}

fn verify(input: &Path, n: u32, b: Option<usize>, drop_edge: Option<&[String]>) -> Outcome {
    let table = load_table(input)?;
    let mut stages = iterate_stages(&table, n, budget(b))?;
    if let Some(pair) = drop_edge {
        let last = stages.pop().expect("rank-0 stage");
        stages.push(without_edge(&last, pair, &table)?);
    }
    for (k, built) in stages.iter().enumerate() {
        let reference = oracle_relation(&table, k as u32, budget(b))?;
        match first_closure_difference(built, &reference) {
            None => println!("n={k}: ok ({} types)", built.len()),
            Some(ClosureDifference::Pair {
                sub,
                sup,
                left,
                right,
            }) => {
                println!("n={k}: mismatch: {sub} <: {sup}: construction={left}, oracle={right}");
                return Ok(exit::NEGATIVE);
            }
            Some(ClosureDifference::Carrier { ty, in_left }) => {
                let side = if in_left { "construction" } else { "oracle" };
                println!("n={k}: mismatch: type {ty} only in the {side} carrier");
                return Ok(exit::NEGATIVE);
            }
        }
    }
    Ok(0)
}

fn demo(example: u8, output: Option<&Path>) -> Outcome {
    let (source, n) = match example {
        1 => (EXAMPLE_ONE, 2),
        2 => (EXAMPLE_TWO, 1),
        other => return Err(Failure::usage(format!("no example {other}"))),
    };
    let table = ClassTable::parse(source).expect("built-in example parses");
    let relation = iterate_stages(&table, n, Budget::default())?
        .pop()
        .expect("rank-0 stage");
    let (dot, json) = (to_dot(&relation), to_json(&relation));
    match output {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            for (ext, text) in [("dot", &dot), ("json", &json)] {
                let path = dir.join(format!("example{example}.{ext}"));
                emit(Some(&path), text)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            emit(None, &dot)?;
            emit(None, &json)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Build {
            input,
            n,
            format,
            output,
            budget,
        } => build(input, *n, *format, output.as_deref(), *budget),
        Command::Check { input, left, right } => check(input, left, right),
        Command::Stats {
            input,
            n,
            json,
            budget,
        } => stats(input, *n, *json, *budget),
        Command::Verify {
            input,
            n,
            budget,
            drop_edge,
        } => verify(input, *n, *budget, drop_edge.as_deref()),
        Command::Demo { example, output } => demo(*example, output.as_deref()),
    };
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
