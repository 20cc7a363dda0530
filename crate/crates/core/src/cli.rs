//! Command-line front end: `cluster`, `bench` and the hidden `verify`.
//!
//! The commands take their streams as arguments so they can be driven from tests; the
//! binary only parses arguments and maps results to exit codes.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;

use crate::cost::{CostKind, SortedDataset, SumMode};
use crate::error::Error;
use crate::oracle;
use crate::solvers::{solve, solve_sorted, Algorithm, Clustering, SolverOptions, K_SWITCH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "microagg", version, about = "Optimal univariate microaggregation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cluster a column of numbers into groups of at least k
    Cluster(ClusterArgs),
    /// Time the solvers on seeded uniform data and print CSV
    Bench(BenchArgs),
    /// Replay the counterexample fixtures and a small brute-force sweep
    #[command(hide = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Minimum cluster size
    #[arg(short, long)]
    pub k: usize,

    /// Cost function: sse, sae, maxdist, roundup, rounddown
    #[arg(long, default_value = "sse")]
    pub cost: CostKind,

    /// auto, classic, simple, simple+, staggered or wilber
    #[arg(long, default_value = "auto")]
    pub algorithm: Algorithm,

    /// How window costs are computed: full, partial or alternative
    #[arg(long, default_value = "full")]
    pub sum_mode: SumMode,

    /// Periodically subtract the running minimum from stored totals
    #[arg(long)]
    pub rebase: bool,

    /// Smallest k for which auto picks the staggered solver
    #[arg(long, default_value_t = K_SWITCH)]
    pub k_switch: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            algorithm: self.algorithm,
            sum_mode: self.sum_mode,
            rebase: self.rebase,
            k_switch: self.k_switch,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    /// One cluster id per input row
    Labels,
    /// CSV of cluster,representative,size,cost
    Representatives,
    /// Labels, a blank line, then the representatives CSV
    Both,
    /// Every value replaced by its cluster representative
    AnonymizedColumn,
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    /// Input file; stdin when absent or "-"
    pub input: Option<PathBuf>,

    /// Read a CSV with a header row and take this column
    #[arg(long)]
    pub column: Option<String>,

    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_enum, default_value = "labels")]
    pub output: OutputMode,

    /// Write results here instead of stdout
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Data sizes, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1000000")]
    pub n: Vec<usize>,

    /// Minimum cluster sizes, comma separated
    #[arg(long, value_delimiter = ',', default_value = "2,10,100,1000")]
    pub k_list: Vec<usize>,

    /// Solvers, comma separated, or "all"
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub algorithms: Vec<String>,

    /// Sum modes, comma separated, or "all"
    #[arg(long, value_delimiter = ',', default_value = "full")]
    pub sum_modes: Vec<String>,

    #[arg(long, default_value = "sse")]
    pub cost: CostKind,

    /// Rebase stored totals in the size-restricted solvers
    #[arg(long)]
    pub rebase: bool,

    #[arg(long, default_value_t = 1)]
    pub repeats: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Run cells on separate threads; adds a `parallel` column
    #[arg(long)]
    pub parallel: bool,

    /// Write CSV here instead of stdout
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Random multisets in the brute-force sweep
    #[arg(long, default_value_t = 50)]
    pub instances: usize,

    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
}

/// Anything that stops a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },
    #[error("line {line}: non-finite value {token:?}")]
    NonFinite { line: usize, token: String },
    #[error("line {line}: row has no field {column}")]
    ShortRow { line: usize, column: usize },
    #[error("no column named {0:?} in the header")]
    MissingColumn(String),
    #[error("input contains no values")]
    Empty,
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(Error::Argument(_) | Error::Config(_)) => EXIT_USAGE,
            CliError::Solver(Error::Precondition(_)) => EXIT_INPUT,
            CliError::Solver(Error::Invariant(_)) | CliError::Write(_) => EXIT_FAILURE,
            _ => EXIT_INPUT,
        }
    }
}

/// Parsed input values, in row order.
#[derive(Clone, Debug, PartialEq)]
pub struct Values {
    pub values: Vec<f64>,
    pub rows: usize,
}

fn parse_number(token: &str, line: usize) -> Result<f64, CliError> {
    let v = f64::from_str(token).map_err(|_| CliError::Parse {
        line,
        token: token.to_string(),
    })?;
    if !v.is_finite() {
        return Err(CliError::NonFinite {
            line,
            token: token.to_string(),
        });
    }
    Ok(v)
}

fn split_csv(line: &str) -> Vec<&str> {
    line.split(',').map(|f| f.trim().trim_matches('"')).collect()
}

/// Reads whitespace-separated numbers, or the named column of a comma-separated file
/// with a header row. Blank lines are skipped; line numbers in errors are 1-based.
pub fn read_values(source: impl Read, column: Option<&str>) -> Result<Values, CliError> {
    let reader = BufReader::new(source);
    let mut values = Vec::new();
    let mut col_index: Option<usize> = None;
    for (t, line) in reader.lines().enumerate() {
        let lineno = t + 1;
        let line = line.map_err(|e| CliError::Read {
            path: format!("line {lineno}"),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match column {
            None => {
                for token in trimmed.split_whitespace() {
                    values.push(parse_number(token, lineno)?);
                }
            }
            Some(name) => {
                let fields = split_csv(trimmed);
                match col_index {
                    None => {
                        let idx = fields
                            .iter()
                            .position(|f| *f == name)
                            .ok_or_else(|| CliError::MissingColumn(name.to_string()))?;
                        col_index = Some(idx);
                    }
                    Some(idx) => {
                        let field = fields.get(idx).ok_or(CliError::ShortRow {
                            line: lineno,
                            column: idx + 1,
                        })?;
                        values.push(parse_number(field, lineno)?);
                    }
                }
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Empty);
    }
    let rows = values.len();
    Ok(Values { values, rows })
}

fn open_input(path: Option<&PathBuf>, stdin: &mut dyn Read, column: Option<&str>) -> Result<Values, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let file = File::open(p).map_err(|e| CliError::Read {
                path: p.display().to_string(),
                source: e,
            })?;
            read_values(file, column)
        }
        _ => read_values(stdin, column),
    }
}

fn open_output<'a>(path: Option<&PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

/// Writes the clustering in the requested form.
pub fn write_clustering(out: &mut dyn Write, values: &[f64], c: &Clustering, mode: OutputMode) -> io::Result<()> {
    let labels = |out: &mut dyn Write| -> io::Result<()> {
        for l in &c.labels {
            writeln!(out, "{l}")?;
        }
        Ok(())
    };
    let reps = |out: &mut dyn Write| -> io::Result<()> {
        // Cluster costs come from the sorted members, which `boundaries` index.
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        writeln!(out, "cluster,representative,size,cost")?;
        for (id, (&(a, b), rep)) in c.boundaries.iter().zip(&c.representatives).enumerate() {
            let cost = c.cost_kind.direct_cost(&sorted[a..b]);
            writeln!(out, "{id},{rep},{},{cost}", b - a)?;
        }
        Ok(())
    };
    match mode {
        OutputMode::Labels => labels(out),
        OutputMode::Representatives => reps(out),
        OutputMode::Both => {
            labels(out)?;
            writeln!(out)?;
            reps(out)
        }
        OutputMode::AnonymizedColumn => {
            for &l in &c.labels {
                writeln!(out, "{}", c.representatives[l])?;
            }
            Ok(())
        }
    }
}

/// The one-line run summary written to stderr.
pub struct Summary<'a> {
    pub clustering: &'a Clustering,
    pub elapsed: Duration,
}

impl fmt::Display for Summary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.clustering;
        write!(
            f,
            "cost={} clusters={} algorithm={} k={} elapsed={:.6}s",
            c.total_cost,
            c.num_clusters(),
            c.algorithm_used,
            c.k,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn cmd_cluster(
    args: &ClusterArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if args.solver.k < 1 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let input = open_input(args.input.as_ref(), stdin, args.column.as_deref())?;
    let start = Instant::now();
    let clustering = solve(&input.values, args.solver.k, args.solver.cost, &args.solver.options())?;
    let elapsed = start.elapsed();

    let mut out = open_output(args.out.as_ref(), stdout)?;
    write_clustering(&mut out, &input.values, &clustering, args.output)?;
    out.flush()?;
    if let Some(w) = clustering.warning {
        writeln!(stderr, "warning: {w}")?;
    }
    writeln!(
        stderr,
        "{}",
        Summary {
            clustering: &clustering,
            elapsed
        }
    )?;
    Ok(())
}

/// One timed cell of the benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub algorithm: String,
    pub sum_mode: String,
    pub n: usize,
    pub k: usize,
    pub repeat: usize,
    pub seconds: f64,
    pub total_cost: f64,
}

pub const BENCH_HEADER: &str = "algorithm,sum_mode,n,k,repeat,seconds,total_cost";

/// Uniform `[0, 1)` values from PCG-XSH-RR 64/32 seeded with `seed`.
pub fn bench_data(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Pcg32::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

fn parse_list<T: FromStr<Err = Error> + Copy>(items: &[String], all: &[T], what: &str) -> Result<Vec<T>, CliError> {
    if items.iter().any(|s| s.eq_ignore_ascii_case("all")) {
        return Ok(all.to_vec());
    }
    items
        .iter()
        .map(|s| s.parse::<T>().map_err(|e| CliError::Usage(format!("{what}: {e}"))))
        .collect()
}

#[derive(Clone, Copy)]
enum Cell {
    Sort { n: usize, repeat: usize },
    Solve {
        algorithm: Algorithm,
        mode: SumMode,
        n: usize,
        k: usize,
        repeat: usize,
    },
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64().max(1e-9)
}

fn run_cell(cell: Cell, data: &[f64], args: &BenchArgs) -> Result<BenchRecord, CliError> {
    match cell {
        Cell::Sort { n, repeat } => {
            let mut copy = data.to_vec();
            let start = Instant::now();
            copy.sort_by(f64::total_cmp);
            let secs = seconds(start.elapsed());
            Ok(BenchRecord {
                algorithm: "sort-only".into(),
                sum_mode: "-".into(),
                n,
                k: 0,
                repeat,
                seconds: secs,
                total_cost: 0.0,
            })
        }
        Cell::Solve {
            algorithm,
            mode,
            n,
            k,
            repeat,
        } => {
            let sorted = SortedDataset::from_unsorted(data)?;
            let opts = SolverOptions {
                algorithm,
                sum_mode: mode,
                rebase: args.rebase && algorithm.is_size_restricted(),
                k_switch: K_SWITCH,
            };
            let start = Instant::now();
            let c = solve_sorted(sorted, k, args.cost, &opts)?;
            let secs = seconds(start.elapsed());
            Ok(BenchRecord {
                algorithm: algorithm.name().into(),
                sum_mode: mode.name().into(),
                n,
                k,
                repeat,
                seconds: secs,
                total_cost: c.total_cost,
            })
        }
    }
}

/// Runs the benchmark grid and returns its records in grid order.
pub fn run_bench(args: &BenchArgs, stderr: &mut dyn Write) -> Result<Vec<BenchRecord>, CliError> {
    if args.repeats < 1 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    if args.n.is_empty() || args.k_list.is_empty() {
        return Err(CliError::Usage("--n and --k-list must not be empty".into()));
    }
    if args.k_list.contains(&0) {
        return Err(CliError::Usage("every k must be at least 1".into()));
    }
    let algorithms = parse_list(&args.algorithms, &Algorithm::CONCRETE, "--algorithms")?;
    let modes = parse_list(&args.sum_modes, &SumMode::ALL, "--sum-modes")?;
    let k_max = *args.k_list.iter().max().expect("non-empty");
    for &n in &args.n {
        if n < 2 * k_max {
            return Err(CliError::Usage(format!("n = {n} is below 2 * max(k) = {}", 2 * k_max)));
        }
    }

    let mut records = Vec::new();
    for &n in &args.n {
        let data = bench_data(n, args.seed);
        let mut cells = Vec::new();
        for repeat in 0..args.repeats {
            cells.push(Cell::Sort { n, repeat });
        }
        for &k in &args.k_list {
            for &algorithm in &algorithms {
                for &mode in &modes {
                    if !args.cost.supports(mode) {
                        writeln!(stderr, "skipping {}: {} has no {mode} mode", algorithm, args.cost)?;
                        continue;
                    }
                    if mode == SumMode::PartialPrefix && !algorithm.is_size_restricted() {
                        writeln!(stderr, "skipping {algorithm} with partial sums: windows wider than 2k-1")?;
                        continue;
                    }
                    for repeat in 0..args.repeats {
                        cells.push(Cell::Solve {
                            algorithm,
                            mode,
                            n,
                            k,
                            repeat,
                        });
                    }
                }
            }
        }
        if args.parallel {
            let results: Vec<Result<BenchRecord, CliError>> = std::thread::scope(|s| {
                let handles: Vec<_> = cells
                    .iter()
                    .map(|&cell| {
                        let data = &data;
                        s.spawn(move || run_cell(cell, data, args))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("bench thread panicked")).collect()
            });
            for r in results {
                records.push(r?);
            }
        } else {
            for cell in cells {
                records.push(run_cell(cell, &data, args)?);
            }
        }
    }
    Ok(records)
}

pub fn write_bench(out: &mut dyn Write, records: &[BenchRecord], parallel: bool) -> io::Result<()> {
    if parallel {
        writeln!(out, "{BENCH_HEADER},parallel")?;
    } else {
        writeln!(out, "{BENCH_HEADER}")?;
    }
    for r in records {
        write!(
            out,
            "{},{},{},{},{},{:.9},{}",
            r.algorithm, r.sum_mode, r.n, r.k, r.repeat, r.seconds, r.total_cost
        )?;
        if parallel {
            write!(out, ",true")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let records = run_bench(args, stderr)?;
    let mut out = open_output(args.out.as_ref(), stdout)?;
    write_bench(&mut out, &records, args.parallel)?;
    out.flush()?;
    Ok(())
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let mut ok = true;
    for r in oracle::verify_counterexamples() {
        let ordered: Vec<String> = r.ordered_costs.iter().map(|c| format!("{c:.6}")).collect();
        writeln!(
            stdout,
            "{} {}: unordered {:.6} vs ordered [{}]{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.unordered_optimum,
            ordered.join(", "),
            if r.passed { String::new() } else { format!(" ({})", r.detail) }
        )?;
        ok &= r.passed;
    }
    let sweep = oracle::equivalence_sweep(args.seed, args.instances, args.max_n)?;
    writeln!(
        stdout,
        "{} sweep: {} instances, {} checks, {} failures",
        if sweep.passed() { "PASS" } else { "FAIL" },
        sweep.instances,
        sweep.checks,
        sweep.failures.len()
    )?;
    for f in sweep.failures.iter().take(10) {
        writeln!(stdout, "  {f}")?;
    }
    Ok(ok && sweep.passed())
}

/// Runs a parsed command against the given streams and returns the exit code.
pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Cluster(args) => cmd_cluster(args, stdin, stdout, stderr).map(|_| EXIT_OK),
        Command::Bench(args) => cmd_bench(args, stdout, stderr).map(|_| EXIT_OK),
        Command::Verify(args) => cmd_verify(args, stdout).map(|ok| if ok { EXIT_OK } else { EXIT_FAILURE }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values() {
        let v = read_values("1\n2\n3\n".as_bytes(), None).unwrap();
        assert_eq!(v.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(v.rows, 3);
    }

    #[test]
    fn parse_error_line() {
        let err = read_values("a\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 1, .. }), "{err:?}");
        let err = read_values("1\n\n2 x\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err:?}");
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn rejects_non_finite() {
        for bad in ["NaN\n", "1\ninf\n", "-inf\n"] {
            let err = read_values(bad.as_bytes(), None).unwrap_err();
            assert!(matches!(err, CliError::NonFinite { .. }), "{bad:?}: {err:?}");
        }
    }

    #[test]
    fn csv_column() {
        let v = read_values("age,zip\n30,1\n41,2\n".as_bytes(), Some("age")).unwrap();
        assert_eq!(v.values, vec![30.0, 41.0]);
        let err = read_values("age,zip\n30,1\n".as_bytes(), Some("height")).unwrap_err();
        assert!(matches!(err, CliError::MissingColumn(_)));
        let err = read_values("age,zip\n30\n".as_bytes(), Some("zip")).unwrap_err();
        assert!(matches!(err, CliError::ShortRow { line: 2, .. }));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(read_values("\n \n".as_bytes(), None), Err(CliError::Empty)));
    }

    #[test]
    fn bench_data_is_seeded() {
        assert_eq!(bench_data(100, 3), bench_data(100, 3));
        assert_ne!(bench_data(100, 3), bench_data(100, 4));
        assert!(bench_data(1000, 9).iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn solver_config_errors_are_usage_errors() {
        let e = CliError::from(Error::Config("x".into()));
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }
}
