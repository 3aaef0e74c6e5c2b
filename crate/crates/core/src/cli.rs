//! The `condorcet` command line.
//!
//! Every subcommand builds one [`Table`]; the JSON record, the CSV rows and
//! the human listing are all rendered from it, so the three formats carry
//! the same numbers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::asymptotics::{
    estimate_c_k, impartial_asymptotic, min_prob_asymptotics, QuadratureConfig,
};
use crate::cultures::SAMPLER_VERSION;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::exact::{
    exact_cw_probability, exact_to_f64, min_prob, pk_lower_bound, ExactConfig, ExactProbability,
};
use crate::model::{format_rational, Culture};
use crate::monte_carlo::{
    estimate_cw_probability, sweep, CultureFamily, Estimate, SimulationConfig,
};
use crate::verification::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "condorcet",
    version,
    about = "Probability that a Condorcet winner exists"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact probability by enumerating voter multisets.
    Exact(ExactArgs),
    /// Closed-form minimum over all cultures.
    Minprob(MinprobArgs),
    /// Lower bound `Σ_j p_k(x_j)` from the top-choice marginals.
    Lowerbound(CultureArgs),
    /// Monte Carlo estimate for one culture.
    Simulate(SimulateArgs),
    /// Monte Carlo estimates over a list of `n`.
    Sweep(SweepArgs),
    /// The impartial-culture constant `C_k`.
    Ck(CkArgs),
    /// Large-`n` and large-`k` formulas.
    Asymptote(AsymptoteArgs),
    /// Run the inequality checkers.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VoterArgs {
    /// Number of voters `2k - 1` (odd).
    #[arg(long, conflicts_with = "k")]
    voters: Option<usize>,
    /// Half the number of voters, rounded up.
    #[arg(long)]
    k: Option<usize>,
}

impl VoterArgs {
    fn k(&self) -> Result<usize> {
        match (self.voters, self.k) {
            (Some(v), _) if v % 2 == 1 => Ok(v.div_ceil(2)),
            (Some(v), _) => Err(Error::VoterCount(v)),
            (None, Some(k)) if k >= 1 => Ok(k),
            (None, Some(_)) => Err(Error::InvalidArgument("k must be at least 1".into())),
            (None, None) => Err(Error::InvalidArgument(
                "one of --voters or --k is required".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct CultureArgs {
    /// `impartial`, `cyclic`, or the path of a culture file.
    #[arg(long)]
    culture: String,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    voters: VoterArgs,
    #[command(flatten)]
    output: OutputArgs,
}

impl CultureArgs {
    fn load(&self) -> Result<Culture> {
        let named = |n: Option<usize>| {
            n.ok_or_else(|| Error::InvalidArgument(format!("--culture {} needs --n", self.culture)))
        };
        let culture = match self.culture.as_str() {
            "impartial" => Culture::impartial(named(self.n)?)?,
            "cyclic" => Culture::cyclic(named(self.n)?)?,
            path => Culture::read_file(path)?,
        };
        if let Some(n) = self.n {
            if n != culture.n() {
                return Err(Error::InvalidArgument(format!(
                    "--n {n} does not match the culture's {} alternatives",
                    culture.n()
                )));
            }
        }
        Ok(culture)
    }

    fn parameters(&self, culture: &Culture, k: usize) -> BTreeMap<String, Value> {
        BTreeMap::from([
            ("culture".to_string(), json!(self.culture)),
            ("n".to_string(), json!(culture.n())),
            ("k".to_string(), json!(k)),
            ("voters".to_string(), json!(2 * k - 1)),
        ])
    }
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    culture: CultureArgs,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Use the all-pairs winner check instead of candidate elimination.
    #[arg(long)]
    naive: bool,
    #[arg(long, default_value_t = ExactConfig::default().max_winner_checks)]
    max_checks: u64,
    #[arg(long, default_value_t = ExactConfig::default().max_support)]
    max_support: usize,
}

#[derive(Args, Debug)]
struct MinprobArgs {
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    voters: VoterArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    culture: CultureArgs,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    naive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Impartial,
    Cyclic,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    culture: FamilyArg,
    /// Comma-separated numbers of alternatives.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[command(flatten)]
    voters: VoterArgs,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CkArgs {
    #[command(flatten)]
    voters: VoterArgs,
    #[arg(long, default_value_t = 0.1)]
    target_error: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().max_evaluations)]
    max_evaluations: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct AsymptoteArgs {
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    voters: VoterArgs,
    /// Value of `C_k` for the impartial-culture leading term.
    #[arg(long)]
    ck: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Rows of named cells: the single source for every output format.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn single(cells: Vec<(String, Value)>) -> Self {
        let (columns, row) = cells.into_iter().unzip();
        Self {
            columns,
            rows: vec![row],
        }
    }

    fn to_json(&self) -> Value {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        match <[Value; 1]>::try_from(objects) {
            Ok([one]) => one,
            Err(many) => Value::Array(many),
        }
    }
}

fn cell_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_csv(table: &Table) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.columns)
        .expect("in-memory write");
    for row in &table.rows {
        writer
            .write_record(row.iter().map(cell_text))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(name: &str, value: Value) -> (String, Value) {
    (name.to_string(), value)
}

#[derive(Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_ms: u64,
}

struct Outcome {
    table: Table,
    parameters: BTreeMap<String, Value>,
    seed: Option<u64>,
    violations: bool,
}

fn render(format: Format, record: &RunRecord, table: &Table) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(record).expect("serializable") + "\n",
        Format::Csv => to_csv(table),
        Format::Human => {
            let mut text = format!(
                "condorcet {} (version {})\n",
                record.command, record.version
            );
            if let Some(seed) = record.seed {
                text += &format!("seed: {seed}\n");
            }
            if table.rows.len() == 1 {
                let width = table.columns.iter().map(|c| c.len()).max().unwrap_or(0);
                for (c, v) in table.columns.iter().zip(&table.rows[0]) {
                    text += &format!("{c:<width$}  {}\n", cell_text(v));
                }
            } else {
                let cells: Vec<Vec<String>> = table
                    .rows
                    .iter()
                    .map(|r| r.iter().map(cell_text).collect())
                    .collect();
                let widths: Vec<usize> = (0..table.columns.len())
                    .map(|j| {
                        cells
                            .iter()
                            .map(|r| r[j].len())
                            .chain([table.columns[j].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                        + "\n"
                };
                text += &line(table.columns.iter().map(String::as_str).collect());
                for r in &cells {
                    text += &line(r.iter().map(String::as_str).collect());
                }
            }
            text
        }
    }
}

fn seed_or_generate(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        let _ = writeln!(err, "no --seed given; using seed {s}");
        s
    })
}

fn exact_cells(result: &ExactProbability, label: &str) -> Vec<(String, Value)> {
    let mut cells = vec![
        cell("value", json!(format_rational(&result.value))),
        cell("decimal", number(exact_to_f64(&result.value))),
        cell("method", json!(result.method.name())),
    ];
    if let Some(parts) = &result.per_alternative {
        for (j, p) in parts.iter().enumerate() {
            cells.push(cell(&format!("{label}_{j}"), json!(format_rational(p))));
        }
    }
    cells
}

fn estimate_cells(n: usize, k: usize, e: &Estimate) -> Vec<(String, Value)> {
    vec![
        cell("n", json!(n)),
        cell("k", json!(k)),
        cell("p_hat", number(e.p_hat)),
        cell("std_error", number(e.std_error)),
        cell("ci_low", number(e.ci95.0)),
        cell("ci_high", number(e.ci95.1)),
        cell("seed", json!(e.seed)),
    ]
}

fn engine(naive: bool) -> Engine {
    if naive {
        Engine::Naive
    } else {
        Engine::Elimination
    }
}

fn execute(command: &Command, err: &mut dyn Write) -> Result<Outcome> {
    let plain = |table: Table, parameters: BTreeMap<String, Value>| Outcome {
        table,
        parameters,
        seed: None,
        violations: false,
    };
    match command {
        Command::Exact(a) => {
            let culture = a.culture.load()?;
            let k = a.culture.voters.k()?;
            let config = ExactConfig {
                max_winner_checks: a.max_checks,
                max_support: a.max_support,
                workers: a.workers,
                engine: engine(a.naive),
            };
            let result = exact_cw_probability(&culture, k, &config)?;
            let mut parameters = a.culture.parameters(&culture, k);
            parameters.insert("workers".into(), json!(a.workers));
            parameters.insert("naive".into(), json!(a.naive));
            Ok(plain(
                Table::single(exact_cells(&result, "winner")),
                parameters,
            ))
        }
        Command::Minprob(a) => {
            let k = a.voters.k()?;
            let result = min_prob(a.n, k as u64)?;
            let parameters = BTreeMap::from([
                ("n".to_string(), json!(a.n)),
                ("k".to_string(), json!(k)),
                ("voters".to_string(), json!(2 * k - 1)),
            ]);
            Ok(plain(
                Table::single(exact_cells(&result, "term")),
                parameters,
            ))
        }
        Command::Lowerbound(a) => {
            let culture = a.load()?;
            let k = a.voters.k()?;
            let result = pk_lower_bound(&culture, k)?;
            let mut cells = exact_cells(&result, "pk");
            for (j, x) in culture.top_marginals().iter().enumerate() {
                cells.push(cell(&format!("top_{j}"), json!(format_rational(x))));
            }
            Ok(plain(Table::single(cells), a.parameters(&culture, k)))
        }
        Command::Simulate(a) => {
            let culture = a.culture.load()?;
            let k = a.culture.voters.k()?;
            let seed = seed_or_generate(a.seed, err);
            let config = SimulationConfig {
                samples: a.samples,
                seed,
                workers: a.workers,
                engine: engine(a.naive),
            };
            let e = estimate_cw_probability(&culture, k, &config)?;
            let mut cells = estimate_cells(culture.n(), k, &e);
            cells.insert(6, cell("samples", json!(e.samples)));
            cells.insert(7, cell("hits", json!(e.hits)));
            let mut parameters = a.culture.parameters(&culture, k);
            parameters.insert("samples".into(), json!(a.samples));
            parameters.insert("seed".into(), json!(seed));
            parameters.insert("workers".into(), json!(a.workers));
            parameters.insert("naive".into(), json!(a.naive));
            parameters.insert("sampler_version".into(), json!(SAMPLER_VERSION));
            Ok(Outcome {
                table: Table::single(cells),
                parameters,
                seed: Some(seed),
                violations: false,
            })
        }
        Command::Sweep(a) => {
            let k = a.voters.k()?;
            let seed = seed_or_generate(a.seed, err);
            let family = match a.culture {
                FamilyArg::Impartial => CultureFamily::Impartial,
                FamilyArg::Cyclic => CultureFamily::Cyclic,
            };
            let cells = sweep(family, k, &a.n, a.samples, seed, a.workers)?;
            let mut table = Table {
                columns: ["n", "k", "p_hat", "std_error", "ci_low", "ci_high", "seed"]
                    .map(String::from)
                    .to_vec(),
                rows: Vec::new(),
            };
            for (n, e) in &cells {
                table.rows.push(
                    estimate_cells(*n, k, e)
                        .into_iter()
                        .map(|(_, v)| v)
                        .collect(),
                );
            }
            let parameters = BTreeMap::from([
                ("culture".to_string(), json!(family.name())),
                ("n".to_string(), json!(a.n)),
                ("k".to_string(), json!(k)),
                ("voters".to_string(), json!(2 * k - 1)),
                ("samples".to_string(), json!(a.samples)),
                ("seed".to_string(), json!(seed)),
                ("workers".to_string(), json!(a.workers)),
                ("sampler_version".to_string(), json!(SAMPLER_VERSION)),
            ]);
            Ok(Outcome {
                table,
                parameters,
                seed: Some(seed),
                violations: false,
            })
        }
        Command::Ck(a) => {
            let k = a.voters.k()?;
            let cfg = QuadratureConfig {
                max_evaluations: a.max_evaluations,
                workers: a.workers,
                ..QuadratureConfig::default()
            };
            let e = estimate_c_k(k, a.target_error, &cfg)?;
            let table = Table::single(vec![
                cell("k", json!(e.k)),
                cell("value", number(e.value)),
                cell("quadrature_error", number(e.quadrature_error)),
                cell("truncation_bound", number(e.truncation_bound)),
                cell("total_error", number(e.total_error())),
                cell("truncation_a", number(e.truncation_a)),
                cell("cells", json!(e.cells)),
            ]);
            let parameters = BTreeMap::from([
                ("k".to_string(), json!(k)),
                ("target_error".to_string(), number(a.target_error)),
                ("max_evaluations".to_string(), number(a.max_evaluations)),
                ("workers".to_string(), json!(a.workers)),
            ]);
            Ok(plain(table, parameters))
        }
        Command::Asymptote(a) => {
            let k = a.voters.k()?;
            let forms = min_prob_asymptotics(a.n, k as u64)?;
            let exact = min_prob(a.n, k as u64)?;
            let mut cells = vec![
                cell("n", json!(a.n)),
                cell("k", json!(k)),
                cell("min_prob", number(exact_to_f64(&exact.value))),
                cell("large_n_leading", number(forms.large_n_leading)),
                cell(
                    "large_k_rate",
                    forms.large_k_rate.map_or(Value::Null, number),
                ),
            ];
            let ck = a.ck.or((k == 1).then_some(1.0));
            if let Some(ck) = ck {
                cells.push(cell("ck", number(ck)));
                cells.push(cell(
                    "impartial_leading",
                    number(impartial_asymptotic(a.n, k as u64, ck)?),
                ));
            }
            let mut parameters = BTreeMap::from([
                ("n".to_string(), json!(a.n)),
                ("k".to_string(), json!(k)),
                ("voters".to_string(), json!(2 * k - 1)),
            ]);
            if let Some(ck) = a.ck {
                parameters.insert("ck".into(), number(ck));
            }
            Ok(plain(Table::single(cells), parameters))
        }
        Command::Verify(a) => {
            let suite = Suite::parse(&a.suite)?;
            let seed = seed_or_generate(a.seed, err);
            let reports = run_suite(suite, seed)?;
            let mut table = Table {
                columns: [
                    "name",
                    "trials",
                    "violations",
                    "worst_margin",
                    "worst_input",
                ]
                .map(String::from)
                .to_vec(),
                rows: Vec::new(),
            };
            for r in &reports {
                let input = r.worst_witness.as_ref().map_or(String::new(), |w| {
                    w.input
                        .iter()
                        .map(|x| number(*x).to_string())
                        .collect::<Vec<_>>()
                        .join(";")
                });
                table.rows.push(vec![
                    json!(r.name),
                    json!(r.trials),
                    json!(r.violations),
                    number(r.worst_margin),
                    json!(input),
                ]);
            }
            let parameters = BTreeMap::from([
                ("suite".to_string(), json!(a.suite)),
                ("seed".to_string(), json!(seed)),
            ]);
            Ok(Outcome {
                table,
                parameters,
                seed: Some(seed),
                violations: reports.iter().any(|r| !r.passed()),
            })
        }
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Exact(a) => &a.culture.output,
        Command::Minprob(a) => &a.output,
        Command::Lowerbound(a) => &a.output,
        Command::Simulate(a) => &a.culture.output,
        Command::Sweep(a) => &a.output,
        Command::Ck(a) => &a.output,
        Command::Asymptote(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Exact(_) => "exact",
        Command::Minprob(_) => "minprob",
        Command::Lowerbound(_) => "lowerbound",
        Command::Simulate(_) => "simulate",
        Command::Sweep(_) => "sweep",
        Command::Ck(_) => "ck",
        Command::Asymptote(_) => "asymptote",
        Command::Verify(_) => "verify",
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::CapExceeded { .. } | Error::SupportTooLarge { .. } | Error::Unattainable { .. } => {
            EXIT_CAP
        }
        _ => EXIT_USAGE,
    }
}

/// Parse `argv` (program name first), execute, and write the report to
/// `out`. Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let started = Instant::now();
    let outcome = match execute(&cli.command, err) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let record = RunRecord {
        command: command_name(&cli.command).to_string(),
        parameters: outcome.parameters,
        results: outcome.table.to_json(),
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    let output = output_args(&cli.command);
    let text = render(output.format, &record, &outcome.table);
    if let Some(path) = &output.out {
        if let Err(e) = std::fs::write(path, &text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let _ = out.write_all(text.as_bytes());
    if outcome.violations {
        let _ = writeln!(err, "verification found violations");
        return EXIT_VIOLATIONS;
    }
    EXIT_OK
}
