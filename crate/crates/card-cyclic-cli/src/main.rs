//! `card-cyclic`: exact tables, marginals, limit-law tabulations, seeded
//! simulation, and the acceptance suite, as CSV/JSON.
//!
//! Exit codes: 0 success, 1 failed verification, 2 validation error,
//! 3 infeasible size guard.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use card_cyclic::exact::{
    self, first_pos_prob, last_pos_prob, separation_distance_exact, tv_to_uniform, MarginalProb,
};
use card_cyclic::limits;
use card_cyclic::sim;
use card_cyclic::verify;
use card_cyclic::Error;

#[derive(Parser)]
#[command(
    name = "card-cyclic",
    version,
    about = "Card-cyclic to random insertion shuffle: exact and asymptotic distributions"
)]
struct Cli {
    /// Cap the worker threads (results never depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    First,
    Last,
}

#[derive(Subcommand)]
enum Command {
    /// Full exact one-shuffle distribution table (n <= 8), with TV and
    /// separation distance footer.
    Exact {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form first/last-position marginals, exact or log-space.
    Marginal {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        which: Which,
        /// Single card number.
        #[arg(long, conflicts_with = "all")]
        j: Option<usize>,
        /// Tabulate every card number.
        #[arg(long)]
        all: bool,
        /// Add a rescaled n*p column for limit comparison.
        #[arg(long)]
        rescale: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate the limit laws: G, F, f, h, E, or the named constants.
    Limits {
        /// One of: G, F, f, h, E, constants.
        #[arg(long)]
        kind: String,
        /// Rescaled card number (required for G, F, f).
        #[arg(long)]
        b: Option<f64>,
        /// Rescaled position (required for h).
        #[arg(long)]
        x: Option<f64>,
        /// Grid "start:end:step" over the tabulation variable.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded Monte Carlo estimators.
    Simulate {
        #[command(subcommand)]
        what: SimulateCmd,
    },
    /// Run the acceptance checks and print one pass/fail line each.
    Verify {
        /// Comma-separated criterion ids (default: all).
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Histogram of the final position of one card.
    Position {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        card: u32,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Histogram of the first card's number.
    First {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Histogram of the last card's number.
    Last {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Joint positions of several cards, with an independence diagnostic.
    Joint {
        #[arg(long)]
        n: usize,
        /// Comma-separated card numbers, e.g. `600,1400`.
        #[arg(long)]
        cards: String,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate the probability that a card numbered <= M*sqrt(n) lands in
    /// the first L positions, against its exact uniform mass.
    Event {
        #[arg(long)]
        n: usize,
        #[arg(long = "M")]
        m: f64,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Repeated-shuffle walk: exact TV per step for n <= 5, otherwise a
    /// Monte Carlo TV lower bound.
    Walk {
        #[arg(long)]
        n: usize,
        /// Number of shuffle steps.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::TooLarge { .. } => ExitCode::from(3),
                Error::InvalidInput(_) => ExitCode::from(2),
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(k) = threads {
        // silently keep the default pool if one is already running
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) {}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Exact { n, output } => cmd_exact(n, &output),
        Command::Marginal {
            n,
            which,
            j,
            all,
            rescale,
            output,
        } => cmd_marginal(n, which, j, all, rescale, &output),
        Command::Limits {
            kind,
            b,
            x,
            grid,
            output,
        } => cmd_limits(&kind, b, x, grid.as_deref(), &output),
        Command::Simulate { what } => cmd_simulate(what),
        Command::Verify { only } => cmd_verify(only.as_deref()),
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<ExitCode, Error> {
    match &output.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
        }
        Some(path) => {
            std::fs::write(path, text).map_err(|e| {
                Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_exact(n: usize, output: &OutputArgs) -> Result<ExitCode, Error> {
    let table = exact::brute_force_dist(n)?;
    let tv = tv_to_uniform(n)?;
    let sep = separation_distance_exact(n)?;
    let text = match output.format {
        Format::Csv => {
            let mut text = table.to_csv();
            let _ = writeln!(
                text,
                "TV,{},{},{}",
                tv.exact.numer(),
                tv.exact.denom(),
                tv.float
            );
            let _ = writeln!(
                text,
                "SEPARATION,{},{},{}",
                sep.numer(),
                sep.denom(),
                sep.to_f64().unwrap_or(f64::NAN)
            );
            text
        }
        Format::Json => {
            let mut json = table.to_json();
            json["config"]["tv"] = serde_json::json!({
                "numerator": tv.exact.numer().to_string(),
                "denominator": tv.exact.denom().to_string(),
                "float": tv.float,
            });
            json["config"]["separation"] = serde_json::json!({
                "numerator": sep.numer().to_string(),
                "denominator": sep.denom().to_string(),
                "float": sep.to_f64().unwrap_or(f64::NAN),
            });
            pretty(&json)
        }
    };
    emit(output, &text)
}

fn marginal_row(
    n: usize,
    j: usize,
    p: &MarginalProb,
    rescale: bool,
    format: Format,
) -> serde_json::Value {
    let (num, den) = match p.exact() {
        Some(e) => (e.numerator.to_string(), e.denominator.to_string()),
        None => (String::new(), String::new()),
    };
    let mut row = serde_json::json!({
        "j": j,
        "numerator": num,
        "denominator": den,
        "float": p.prob(),
        "mode": p.mode(),
    });
    if rescale {
        row["rescaled"] = serde_json::json!(p.rescaled(n));
    }
    let _ = format;
    row
}

fn cmd_marginal(
    n: usize,
    which: Which,
    j: Option<usize>,
    all: bool,
    rescale: bool,
    output: &OutputArgs,
) -> Result<ExitCode, Error> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "deck size must be positive".to_string(),
        ));
    }
    if j.is_none() && !all {
        return Err(Error::InvalidInput("pass --j <card> or --all".to_string()));
    }
    let js: Vec<usize> = match j {
        Some(j) => vec![j],
        None => (1..=n).collect(),
    };
    let compute = |j: usize| match which {
        Which::First => first_pos_prob(n, j),
        Which::Last => last_pos_prob(n, j),
    };
    let rows: Result<Vec<_>, Error> = js
        .iter()
        .map(|&j| compute(j).map(|p| marginal_row(n, j, &p, rescale, output.format)))
        .collect();
    let rows = rows?;
    let which_name = match which {
        Which::First => "first",
        Which::Last => "last",
    };
    let text = match output.format {
        Format::Csv => {
            let mut text = String::from("j,numerator,denominator,float,mode");
            if rescale {
                text.push_str(",rescaled");
            }
            text.push('\n');
            for row in &rows {
                let _ = write!(
                    text,
                    "{},{},{},{},{}",
                    row["j"],
                    row["numerator"].as_str().unwrap(),
                    row["denominator"].as_str().unwrap(),
                    row["float"],
                    row["mode"].as_str().unwrap()
                );
                if rescale {
                    let _ = write!(text, ",{}", row["rescaled"]);
                }
                text.push('\n');
            }
            text
        }
        Format::Json => pretty(&serde_json::json!({
            "config": { "n": n, "which": which_name, "rescale": rescale },
            "rows": rows,
        })),
    };
    emit(output, &text)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "grid must be start:end:step, got {spec:?}"
        )));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("bad grid number {s:?}")))
    };
    let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !step.is_finite() || step <= 0.0 || end < start {
        return Err(Error::InvalidInput(format!("empty grid {spec:?}")));
    }
    let count = ((end - start) / step).round() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidInput(format!(
            "grid has {count} points; the cap is 10^6"
        )));
    }
    Ok((0..count)
        .map(|i| (start + i as f64 * step).min(end))
        .collect())
}

fn cmd_limits(
    kind: &str,
    b: Option<f64>,
    x: Option<f64>,
    grid: Option<&str>,
    output: &OutputArgs,
) -> Result<ExitCode, Error> {
    let check_unit = |name: &str, v: f64| {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("{name} = {v} outside [0, 1]")));
        }
        Ok(v)
    };
    let need_b = || {
        b.ok_or_else(|| Error::InvalidInput(format!("--kind {kind} needs --b")))
            .and_then(|v| check_unit("b", v))
    };
    let need_grid = || {
        grid.ok_or_else(|| Error::InvalidInput(format!("--kind {kind} needs --grid")))
            .and_then(parse_grid)
    };

    if kind == "constants" {
        let c = limits::constants();
        let twelve = |v: f64| {
            serde_json::Value::from(format!("{v:.12}").parse::<f64>().expect("formatted float"))
        };
        let json = serde_json::json!({
            "config": { "kind": "constants" },
            "rows": [
                { "name": "b_star", "value": twelve(c.b_star) },
                { "name": "b_bar", "value": twelve(c.b_bar) },
                { "name": "b_hat", "value": twelve(c.b_hat) },
                { "name": "b_tilde", "value": twelve(c.b_tilde) },
                { "name": "x_hat", "value": twelve(c.x_hat) },
            ],
        });
        return emit(output, &pretty(&json));
    }

    let (var, value): (&str, Box<dyn Fn(f64) -> f64>) = match kind {
        "G" => {
            let b = need_b()?;
            ("y", Box::new(move |y| limits::position_map(b, y)))
        }
        "F" => {
            let b = need_b()?;
            ("x", Box::new(move |x| limits::position_cdf(b, x)))
        }
        "f" => {
            let b = need_b()?;
            ("x", Box::new(move |x| limits::position_density(b, x)))
        }
        "h" => {
            let x = x
                .ok_or_else(|| Error::InvalidInput("--kind h needs --x".to_string()))
                .and_then(|v| check_unit("x", v))?;
            (
                "b",
                Box::new(move |b| limits::card_at_position_density(x, b)),
            )
        }
        "E" => ("b", Box::new(limits::expected_position)),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown kind {other:?}; use G, F, f, h, E, or constants"
            )))
        }
    };
    let points = need_grid()?;
    for &p in &points {
        check_unit(var, p)?;
    }
    let text = match output.format {
        Format::Csv => {
            let mut text = format!("{var},{kind}\n");
            for &p in &points {
                let _ = writeln!(text, "{p},{}", value(p));
            }
            text
        }
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|&p| serde_json::json!({ var: p, "value": value(p) }))
                .collect();
            pretty(&serde_json::json!({
                "config": { "kind": kind, "b": b, "x": x },
                "rows": rows,
            }))
        }
    };
    emit(output, &text)
}

fn cmd_simulate(what: SimulateCmd) -> Result<ExitCode, Error> {
    match what {
        SimulateCmd::Position {
            n,
            card,
            reps,
            seed,
            output,
        } => {
            let hist = sim::sample_position_hist(n, card, reps, seed)?;
            emit_hist(&hist, &output)
        }
        SimulateCmd::First {
            n,
            reps,
            seed,
            output,
        } => emit_hist(&sim::sample_first_card_hist(n, reps, seed)?, &output),
        SimulateCmd::Last {
            n,
            reps,
            seed,
            output,
        } => emit_hist(&sim::sample_last_card_hist(n, reps, seed)?, &output),
        SimulateCmd::Joint {
            n,
            cards,
            reps,
            seed,
            output,
        } => {
            let cards: Result<Vec<u32>, Error> = cards
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad card number {s:?}")))
                })
                .collect();
            let joint = sim::joint_position_sample(n, &cards?, reps, seed)?;
            emit_joint(&joint, &output)
        }
        SimulateCmd::Event {
            n,
            m,
            l,
            reps,
            seed,
            output,
        } => {
            let est = sim::estimate_event_a(n, m, l, reps, seed)?;
            emit_event(&est, &output)
        }
        SimulateCmd::Walk {
            n,
            m,
            reps,
            seed,
            output,
        } => {
            let config = sim::WalkConfig::new(n, m, reps, seed);
            let report = sim::convolution_walk(&config)?;
            emit_walk(&report, &output)
        }
    }
}

fn emit_hist(hist: &sim::Histogram, output: &OutputArgs) -> Result<ExitCode, Error> {
    let text = match output.format {
        Format::Csv => hist.to_csv(),
        Format::Json => pretty(&hist.to_json()),
    };
    emit(output, &text)
}

fn emit_joint(joint: &sim::JointPositions, output: &OutputArgs) -> Result<ExitCode, Error> {
    let m = joint.cards.len();
    let indep = joint.independence_sup_distance();
    let text = match output.format {
        Format::Csv => {
            // one histogram block per tracked card, then the diagnostics
            let mut text = String::from("card,outcome,count,fraction,stderr\n");
            for (idx, &card) in joint.cards.iter().enumerate() {
                let hist = joint.marginal_hist(idx);
                for k in 1..=hist.n {
                    let _ = writeln!(
                        text,
                        "{card},{k},{},{},{}",
                        hist.bins[k - 1],
                        hist.fraction(k),
                        hist.stderr(k)
                    );
                }
            }
            let _ = writeln!(text, "INDEPENDENCE_SUP_DISTANCE,,,{indep},");
            for i in 0..m {
                for j in i + 1..m {
                    let _ = writeln!(
                        text,
                        "ORDER_FRACTION_{}_{},,,{},",
                        joint.cards[i],
                        joint.cards[j],
                        joint.order_fraction(i, j)
                    );
                }
            }
            text
        }
        Format::Json => {
            let hists: Vec<_> = (0..m).map(|i| joint.marginal_hist(i).to_json()).collect();
            let mut pairs = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    pairs.push(serde_json::json!({
                        "cards": [joint.cards[i], joint.cards[j]],
                        "order_fraction": joint.order_fraction(i, j),
                    }));
                }
            }
            pretty(&serde_json::json!({
                "config": {
                    "n": joint.n,
                    "cards": joint.cards,
                    "reps": joint.reps,
                    "seed": joint.seed,
                },
                "rows": hists,
                "independence_sup_distance": indep,
                "pairs": pairs,
            }))
        }
    };
    emit(output, &text)
}

fn emit_event(est: &sim::EventEstimate, output: &OutputArgs) -> Result<ExitCode, Error> {
    let text = match output.format {
        Format::Csv => {
            let mut text = String::from("n,M,L,reps,seed,hits,fraction,stderr,uniform,gap\n");
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{},{},{},{}",
                est.n,
                est.spec.m,
                est.spec.l,
                est.reps,
                est.seed,
                est.hits,
                est.fraction(),
                est.stderr(),
                est.uniform,
                est.gap()
            );
            text
        }
        Format::Json => pretty(&serde_json::json!({
            "config": {
                "n": est.n, "M": est.spec.m, "L": est.spec.l,
                "reps": est.reps, "seed": est.seed,
            },
            "rows": [{
                "hits": est.hits,
                "fraction": est.fraction(),
                "stderr": est.stderr(),
                "uniform": est.uniform,
                "gap": est.gap(),
            }],
        })),
    };
    emit(output, &text)
}

fn emit_walk(report: &sim::WalkReport, output: &OutputArgs) -> Result<ExitCode, Error> {
    let text = match (report, output.format) {
        (sim::WalkReport::Exact(walk), Format::Csv) => {
            let mut text = String::from("m,tv_numerator,tv_denominator,tv_float\n");
            for (i, tv) in walk.tv.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    i + 1,
                    tv.exact.numer(),
                    tv.exact.denom(),
                    tv.float
                );
            }
            text
        }
        (sim::WalkReport::Exact(walk), Format::Json) => {
            let rows: Vec<_> = walk
                .tv
                .iter()
                .enumerate()
                .map(|(i, tv)| {
                    serde_json::json!({
                        "m": i + 1,
                        "tv_numerator": tv.exact.numer().to_string(),
                        "tv_denominator": tv.exact.denom().to_string(),
                        "tv_float": tv.float,
                    })
                })
                .collect();
            pretty(&serde_json::json!({
                "config": { "n": walk.n, "mode": "exact", "steps": walk.tv.len() },
                "rows": rows,
            }))
        }
        (sim::WalkReport::Bound(walk), Format::Csv) => {
            let mut text = String::from("m,tv_lower_bound,stderr,statistic\n");
            for row in &walk.rows {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    row.m, row.lower_bound, row.stderr, row.statistic
                );
            }
            text
        }
        (sim::WalkReport::Bound(walk), Format::Json) => {
            let rows: Vec<_> = walk
                .rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "m": row.m,
                        "tv_lower_bound": row.lower_bound,
                        "stderr": row.stderr,
                        "statistic": row.statistic,
                    })
                })
                .collect();
            pretty(&serde_json::json!({
                "config": {
                    "n": walk.n, "mode": "bound", "steps": walk.steps,
                    "reps": walk.reps, "seed": walk.seed,
                },
                "rows": rows,
            }))
        }
    };
    emit(output, &text)
}

fn cmd_verify(only: Option<&str>) -> Result<ExitCode, Error> {
    let reports = match only {
        None => {
            let mut out = Vec::new();
            for &id in verify::CRITERIA.iter() {
                let report = verify::run_one(id).expect("known id");
                println!("{}", report.line());
                std::io::stdout().flush().ok();
                out.push(report);
            }
            out
        }
        Some(list) => {
            let ids: Result<Vec<u32>, Error> = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad criterion id {s:?}")))
                })
                .collect();
            let mut out = Vec::new();
            for id in ids? {
                match verify::run_one(id) {
                    Some(report) => {
                        println!("{}", report.line());
                        std::io::stdout().flush().ok();
                        out.push(report);
                    }
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "unknown criterion id {id}; valid ids are 1..=14"
                        )))
                    }
                }
            }
            out
        }
    };
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} passed, {} failed out of {}",
        reports.len() - failed,
        failed,
        reports.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
