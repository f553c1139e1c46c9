use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treeaug::bench::{default_worker_counts, run_bench, BenchConfig, BenchError, CsvSink};
use treeaug::format::{read_edge_set, read_tree, write_edge_set, LoadError, TreeFile};
use treeaug::generate::{shape_edges, Shape};
use treeaug::{
    brute_force_min_augmentation, check_result, default_workers, lower_bound, tree_augment, AugmentError,
    ParallelAugmenter, Tree, TreeError, VerifyError,
};

const WORKERS_ENV: &str = "ACCEPTED_WORKERS";

/// Minimum biconnectivity augmentation of trees.
#[derive(Parser, Debug)]
#[command(name = "treeaug", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a minimum augmentation set for a tree file.
    Augment {
        #[command(flatten)]
        io: InOut,
        /// Use the parallel engine.
        #[arg(long)]
        parallel: bool,
        /// Worker count for --parallel (default: min(max degree, cores)).
        #[arg(long, value_name = "K")]
        workers: Option<usize>,
    },
    /// Check an edge set against a tree.
    Verify {
        /// Tree file.
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
        /// Edge-set file, as written by `augment`.
        #[arg(short, long, value_name = "FILE")]
        edges: PathBuf,
        /// Also compare against the exhaustive optimum (small trees only).
        #[arg(long)]
        oracle: bool,
    },
    /// Write a generated tree file.
    Gen {
        /// Vertex count.
        n: usize,
        #[arg(long, default_value = "random")]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Time the sequential and parallel engines and emit CSV.
    Bench(BenchArgs),
    /// Exhaustive minimum augmentation size for a small tree.
    Oracle {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
struct InOut {
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 100_000])]
    sizes: Vec<usize>,
    #[arg(long = "shape", value_delimiter = ',', default_values_t = [Shape::Random, Shape::Caterpillar])]
    shapes: Vec<Shape>,
    /// Worker counts (default: powers of two up to the core count).
    #[arg(long, value_delimiter = ',')]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

/// A diagnostic plus the process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

const PARSE: u8 = 1;
const INVALID: u8 = 2;
const TOO_SMALL: u8 = 3;
const VERDICT_FAIL: u8 = 4;
const ENGINE_MISMATCH: u8 = 5;

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Format(_) => Failure::new(PARSE, e),
            _ => Failure::new(INVALID, e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(PARSE, e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("treeaug: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Augment { io, parallel, workers } => augment(&io, parallel, workers),
        Command::Verify { input, edges, oracle } => verify(&input, &edges, oracle),
        Command::Gen { n, shape, seed, output } => gen(n, shape, seed, output.as_deref()),
        Command::Bench(args) => bench(args),
        Command::Oracle { input } => oracle(&input),
    }
}

fn load_tree(path: &Path) -> Result<Tree, Failure> {
    let file = File::open(path).map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))?;
    Ok(read_tree(BufReader::new(file))?)
}

/// Trees below three vertices have no meaningful augmentation.
fn require_three(tree: &Tree) -> Result<usize, Failure> {
    lower_bound(tree).map_err(|e: TreeError| Failure::new(TOO_SMALL, e))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::new(PARSE, format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `ACCEPTED_WORKERS`, when set, takes precedence over the flag.
fn env_workers() -> Result<Option<Vec<usize>>, Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    raw.split(',')
        .map(|w| match w.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(Failure::new(
                PARSE,
                format!("{WORKERS_ENV}: `{w}` is not a positive worker count"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn augment_error(e: AugmentError) -> Failure {
    match e {
        AugmentError::TreeTooSmall(_) => Failure::new(TOO_SMALL, e),
        _ => Failure::new(INVALID, e),
    }
}

fn augment(io: &InOut, parallel: bool, workers: Option<usize>) -> Result<u8, Failure> {
    let tree = load_tree(&io.input)?;
    let bound = require_three(&tree)?;
    let set = if parallel {
        let workers = match env_workers()? {
            Some(list) => list[0],
            None => workers.unwrap_or_else(|| default_workers(&tree)),
        };
        if workers == 0 {
            return Err(Failure::new(PARSE, "--workers must be positive"));
        }
        ParallelAugmenter::new(workers).augment(&tree)
    } else {
        tree_augment(&tree)
    }
    .map_err(augment_error)?;

    let mut out = open_output(io.output.as_deref())?;
    write_edge_set(&mut out, &set, bound)?;
    out.flush()?;
    Ok(0)
}

fn verify(tree_path: &Path, edges_path: &Path, oracle: bool) -> Result<u8, Failure> {
    let tree = load_tree(tree_path)?;
    let file = File::open(edges_path).map_err(|e| Failure::new(PARSE, format!("{}: {e}", edges_path.display())))?;
    let set = read_edge_set(BufReader::new(file)).map_err(|e| Failure::new(PARSE, e))?;
    let report = check_result(&tree, &set, oracle).map_err(|e| match e {
        VerifyError::GraphTooSmall(_) => Failure::new(TOO_SMALL, e),
        _ => Failure::new(INVALID, e),
    })?;
    print!("{report}");
    Ok(if report.passed() { 0 } else { VERDICT_FAIL })
}

fn gen(n: usize, shape: Shape, seed: u64, output: Option<&Path>) -> Result<u8, Failure> {
    if n < 3 {
        return Err(Failure::new(
            TOO_SMALL,
            format!("n = {n}; at least 3 vertices are required"),
        ));
    }
    let file = TreeFile {
        declared_vertices: Some(n),
        edges: shape_edges(shape, n, seed),
    };
    let mut out = open_output(output)?;
    writeln!(out, "# shape={shape} n={n} seed={seed}")?;
    file.write(&mut out)?;
    out.flush()?;
    Ok(0)
}

fn bench(args: BenchArgs) -> Result<u8, Failure> {
    let workers = match env_workers()? {
        Some(list) => list,
        None if args.workers.is_empty() => default_worker_counts(),
        None => args.workers,
    };
    if workers.contains(&0) {
        return Err(Failure::new(PARSE, "--workers must be positive"));
    }
    let config = BenchConfig {
        sizes: args.sizes,
        shapes: args.shapes,
        workers,
        trials: args.trials,
        seed: args.seed,
    };

    let mut sink = CsvSink::new(open_output(args.output.as_deref())?);
    let mut write_err = None;
    let result = run_bench(&config, |rec| {
        if write_err.is_none() {
            write_err = sink.write(rec).err();
        }
    });
    if let Some(e) = write_err {
        return Err(Failure::new(PARSE, e));
    }
    match result {
        Ok(_) => Ok(0),
        Err(e @ BenchError::TooSmall(_)) => Err(Failure::new(TOO_SMALL, e)),
        Err(e @ (BenchError::EngineMismatch { .. } | BenchError::Augment(_))) => Err(Failure::new(ENGINE_MISMATCH, e)),
        Err(e) => Err(Failure::new(PARSE, e)),
    }
}

fn oracle(path: &Path) -> Result<u8, Failure> {
    let tree = load_tree(path)?;
    let bound = require_three(&tree)?;
    let best = brute_force_min_augmentation(&tree).map_err(|e| Failure::new(INVALID, e))?;
    println!("optimum={best}");
    println!("lower_bound={bound}");
    Ok(0)
}
