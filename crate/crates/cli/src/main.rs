//! `hypermatch`: command-line front end for the rounding algorithms.
//!
//! Exit codes: 0 success, 1 a verifier reported a failure, 2 usage, parse or
//! refused input.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypermatch::clocks::{self, marginal_report};
use hypermatch::distribution::distribution_to_json;
use hypermatch::generators::WeightDistribution;
use hypermatch::greedy::ChargingReport;
use hypermatch::hypergraph::check_fractional_b_matching;
use hypermatch::instance::point_from_json;
use hypermatch::rational;
use hypermatch::{
    build_distribution, estimate_marginals, gen_fano, gen_projective_plane, gen_random, greedy,
    guarantee_g, marginal_target_from, reduce_support, solve_fractional_bmatching, tight_vertices,
    verify_charging_chain, verify_distribution, verify_greedy_bound, Error, FractionalPoint,
    GeneratorConfig, Instance, RngSeed,
};
use serde_json::{json, Map};

use report::{put_rational, rationals, RunReport, Verdict};

#[derive(Parser)]
#[command(
    name = "hypermatch",
    version,
    about = "Exact rounding for hypergraph (b-)matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output format for the report.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Add decimal `*_approx` columns next to exact values.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct PointSource {
    /// Fractional point file (`{"x": [...]}`).
    #[arg(long = "x", value_name = "PATH", conflicts_with = "solve")]
    x: Option<PathBuf>,
    /// Use an optimal extreme point of the fractional LP (default without --x).
    #[arg(long)]
    solve: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the fractional b-matching LP and check sparsity.
    SolveLp {
        instance: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Exponential-clocks sampling with a marginal report (capacities must be 1).
    Sample {
        instance: PathBuf,
        #[command(flatten)]
        point: PointSource,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Weight-ordered greedy with guarantee and charging-chain checks.
    Greedy {
        instance: PathBuf,
        #[command(flatten)]
        point: PointSource,
        #[command(flatten)]
        output: Output,
    },
    /// Build, reduce and verify a distribution over b-matchings.
    Distribution {
        instance: PathBuf,
        #[command(flatten)]
        point: PointSource,
        /// Where to write the distribution file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Prime plane order for `--family pg`.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Edge size range `min:max`.
        #[arg(long, default_value = "2:3")]
        sizes: String,
        /// `unit` or an integer range `low:high`.
        #[arg(long, default_value = "unit")]
        weights: String,
        /// Capacities are drawn from `1..=bmax`.
        #[arg(long, default_value_t = 1)]
        bmax: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run solve-lp, greedy, distribution and sample on one instance.
    VerifyAll {
        instance: PathBuf,
        #[command(flatten)]
        point: PointSource,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Fano,
    Pg,
    Random,
}

/// Failure to run at all (exit 2), as opposed to a failed verdict (exit 1).
struct Refusal(String);

impl From<Error> for Refusal {
    fn from(e: Error) -> Self {
        Refusal(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Refusal> {
    fs::read_to_string(path).map_err(|e| Refusal(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Refusal> {
    fs::write(path, text).map_err(|e| Refusal(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Refusal> {
    Instance::from_json(&read(path)?).map_err(|e| Refusal(format!("{}: {e}", path.display())))
}

fn timed<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    eprintln!(
        "timing: {label} {:.3} ms",
        start.elapsed().as_secs_f64() * 1e3
    );
    out
}

/// The point to round, checked against the instance's capacities.
fn load_point(inst: &Instance, source: &PointSource) -> Result<FractionalPoint, Refusal> {
    let x = match &source.x {
        Some(path) => point_from_json(&read(path)?)
            .map_err(|e| Refusal(format!("{}: {e}", path.display())))?,
        None => {
            timed("solve-lp", || {
                solve_fractional_bmatching(&inst.hypergraph, &inst.weights, &inst.capacities)
            })?
            .x
        }
    };
    check_fractional_b_matching(&inst.hypergraph, &inst.capacities, &x)?;
    Ok(x)
}

fn emit(report: &RunReport, format: Format) {
    match format {
        Format::Json => print!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
}

fn edge_rows(
    inst: &Instance,
    x: &FractionalPoint,
    float: bool,
) -> Result<Vec<Map<String, serde_json::Value>>, Refusal> {
    let h = &inst.hypergraph;
    let target = marginal_target_from(x, h)?;
    (0..h.num_edges())
        .map(|e| {
            let mut row = Map::new();
            row.insert("edge".into(), json!(e));
            row.insert("size".into(), json!(h.edges()[e].len()));
            put_rational(&mut row, "weight", &inst.weights[e], float);
            put_rational(&mut row, "x", &x[e], float);
            put_rational(
                &mut row,
                "g",
                &guarantee_g(h.edges()[e].len(), &x[e])?,
                float,
            );
            put_rational(&mut row, "p", &target.as_slice()[e], float);
            Ok(row)
        })
        .collect()
}

fn solve_lp_section(inst: &Instance, report: &mut RunReport) -> Result<FractionalPoint, Refusal> {
    let (h, w, b) = (&inst.hypergraph, &inst.weights, &inst.capacities);
    let sol = timed("solve-lp", || solve_fractional_bmatching(h, w, b))?;
    let tight = tight_vertices(h, b, &sol.x)?;
    let support = sol.x.support();
    report.rational("value", &sol.value);
    report.set("x", rationals(sol.x.as_slice()));
    report.set("support", json!(support));
    report.set("tight_vertices", json!(tight));
    let sparsity = if b.first_non_unit().is_some() {
        Verdict::NotRun
    } else {
        Verdict::from_bool(support.len() <= tight.len())
    };
    report.verdict("sparsity", sparsity);
    Ok(sol.x)
}

fn greedy_section(
    inst: &Instance,
    x: &FractionalPoint,
    report: &mut RunReport,
) -> Result<(), Refusal> {
    let (h, w, b) = (&inst.hypergraph, &inst.weights, &inst.capacities);
    let (mset, trace) = timed("greedy", || greedy(h, w, b))?;
    let bound = verify_greedy_bound(h, w, b, x, &mset)?;
    let chain: ChargingReport = verify_charging_chain(h, w, b, x, &trace)?;
    report.set("matching", json!(mset.edges()));
    report.rational("matching_weight", &mset.weight(w));
    report.set(
        "trace",
        serde_json::to_value(&trace).expect("trace serializes"),
    );
    report.rational("bound_lhs", &bound.lhs);
    report.rational("bound_rhs", &bound.rhs);
    report.rational("bound_slack", &bound.slack);
    report.set(
        "charging_chain",
        serde_json::to_value(&chain).expect("chain serializes"),
    );
    report.verdict("greedy_bound", Verdict::from_bool(bound.holds));
    report.verdict("domination", Verdict::from_bool(chain.domination.holds));
    report.verdict("vertex_load", Verdict::from_bool(chain.vertex_load.holds));
    report.verdict("total_charge", Verdict::from_bool(chain.total_charge.holds));
    Ok(())
}

fn distribution_section(
    inst: &Instance,
    x: &FractionalPoint,
    out: Option<&Path>,
    report: &mut RunReport,
) -> Result<(), Refusal> {
    let (h, b) = (&inst.hypergraph, &inst.capacities);
    let built = timed("build-distribution", || build_distribution(h, b, x))?;
    let reduced = timed("reduce-support", || {
        reduce_support(&built.distribution, &built.target)
    })?;
    let check = verify_distribution(&reduced, &built.target, h, b);
    report.set("iterations", json!(built.iterations));
    report.set("family_size", json!(built.family.len()));
    report.set(
        "support_before_reduction",
        json!(built.distribution.atoms.len()),
    );
    report.set("support", json!(reduced.atoms.len()));
    report.set("marginals", rationals(&check.marginals));
    let file = distribution_to_json(&reduced, &built.target);
    match out {
        Some(path) => write(path, &(file + "\n"))?,
        None => report.set(
            "distribution",
            serde_json::from_str(&file).expect("distribution json is valid"),
        ),
    }
    report.verdict("distribution", Verdict::from_bool(check.passes()));
    report.verdict(
        "support_bound",
        Verdict::from_bool(reduced.atoms.len() <= h.num_edges() + 1),
    );
    Ok(())
}

fn require_unit_capacities(inst: &Instance) -> Result<(), Refusal> {
    match inst.capacities.first_non_unit() {
        Some((vertex, capacity)) => Err(Error::CapacityNotUnit { vertex, capacity }.into()),
        None => Ok(()),
    }
}

fn sample_section(
    inst: &Instance,
    x: &FractionalPoint,
    samples: u64,
    seed: u64,
    report: &mut RunReport,
) -> Result<Vec<clocks::MarginalRow>, Refusal> {
    let h = &inst.hypergraph;
    let est = timed("sample", || {
        estimate_marginals(h, x, samples, RngSeed::new(seed))
    })?;
    let rows = marginal_report(h, x, &est)?;
    let inside = rows
        .iter()
        .filter(|r| clocks::within_sigmas(r.frequency, &r.analytic_marginal, samples, 4.0))
        .count();
    let floors_ok = rows.iter().all(|r| r.analytic_marginal >= r.lower_bound);
    report.set("samples", json!(samples));
    report.set("edges_within_4_se", json!(inside));
    report.verdict("marginal_floor", Verdict::from_bool(floors_ok));
    report.verdict(
        "monte_carlo",
        Verdict::from_bool(rows.is_empty() || inside as f64 >= 0.99 * rows.len() as f64),
    );
    Ok(rows)
}

fn parse_range(text: &str, what: &str) -> Result<(u64, u64), Refusal> {
    let bad = || Refusal(format!("invalid {what} range {text:?}; expected min:max"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn run(command: Command) -> Result<bool, Refusal> {
    match command {
        Command::SolveLp { instance, output } => {
            let inst = load_instance(&instance)?;
            let mut report = RunReport::new("solve-lp", &inst, None, output.float);
            let x = solve_lp_section(&inst, &mut report)?;
            report.edges = edge_rows(&inst, &x, output.float)?;
            emit(&report, output.format.unwrap_or(Format::Json));
            Ok(report.all_pass())
        }
        Command::Sample {
            instance,
            point,
            samples,
            seed,
            output,
        } => {
            let inst = load_instance(&instance)?;
            require_unit_capacities(&inst)?;
            let x = load_point(&inst, &point)?;
            let mut report = RunReport::new("sample", &inst, Some(seed), output.float);
            let rows = sample_section(&inst, &x, samples, seed, &mut report)?;
            match output.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut text = clocks::MARGINAL_CSV_HEADER.to_string();
                    if output.float {
                        text.push_str(",x_approx,analytic_marginal_approx,lower_bound_approx");
                    }
                    text.push('\n');
                    for r in &rows {
                        text.push_str(&r.to_csv());
                        if output.float {
                            text.push_str(&format!(
                                ",{},{},{}",
                                rational::to_f64(&r.x),
                                rational::to_f64(&r.analytic_marginal),
                                rational::to_f64(&r.lower_bound)
                            ));
                        }
                        text.push('\n');
                    }
                    print!("{text}");
                }
                Format::Json => {
                    report.edges = rows
                        .iter()
                        .map(|r| {
                            let mut row = Map::new();
                            row.insert("edge".into(), json!(r.edge_index));
                            row.insert("size".into(), json!(r.edge_size));
                            put_rational(&mut row, "x", &r.x, output.float);
                            put_rational(
                                &mut row,
                                "analytic_marginal",
                                &r.analytic_marginal,
                                output.float,
                            );
                            put_rational(&mut row, "lower_bound", &r.lower_bound, output.float);
                            row.insert("frequency".into(), json!(r.frequency));
                            row.insert("std_error".into(), json!(r.std_error));
                            row
                        })
                        .collect();
                    emit(&report, Format::Json);
                }
            }
            Ok(report.all_pass())
        }
        Command::Greedy {
            instance,
            point,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let x = load_point(&inst, &point)?;
            let mut report = RunReport::new("greedy", &inst, None, output.float);
            greedy_section(&inst, &x, &mut report)?;
            report.edges = edge_rows(&inst, &x, output.float)?;
            emit(&report, output.format.unwrap_or(Format::Json));
            Ok(report.all_pass())
        }
        Command::Distribution {
            instance,
            point,
            out,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let x = load_point(&inst, &point)?;
            let mut report = RunReport::new("distribution", &inst, None, output.float);
            distribution_section(&inst, &x, out.as_deref(), &mut report)?;
            report.edges = edge_rows(&inst, &x, output.float)?;
            emit(&report, output.format.unwrap_or(Format::Json));
            Ok(report.all_pass())
        }
        Command::Gen {
            family,
            q,
            n,
            m,
            sizes,
            weights,
            bmax,
            seed,
            out,
        } => {
            let inst = match family {
                Family::Fano => gen_fano(),
                Family::Pg => gen_projective_plane(
                    q.ok_or_else(|| Refusal("--family pg requires --q".into()))?,
                )?,
                Family::Random => {
                    let (lo, hi) = parse_range(&sizes, "edge size")?;
                    let weights = if weights == "unit" {
                        WeightDistribution::Unit
                    } else {
                        let (low, high) = parse_range(&weights, "weight")?;
                        WeightDistribution::UniformInt { low, high }
                    };
                    gen_random(&GeneratorConfig {
                        weights,
                        max_capacity: bmax,
                        ..GeneratorConfig::new(
                            n.ok_or_else(|| Refusal("--family random requires --n".into()))?,
                            m.ok_or_else(|| Refusal("--family random requires --m".into()))?,
                            (lo as usize, hi as usize),
                            seed,
                        )
                    })?
                }
            };
            let text = inst.to_json() + "\n";
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::VerifyAll {
            instance,
            point,
            samples,
            seed,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let mut report = RunReport::new("verify-all", &inst, Some(seed), output.float);
            let lp_x = solve_lp_section(&inst, &mut report)?;
            let x = match &point.x {
                Some(_) => load_point(&inst, &point)?,
                None => lp_x,
            };
            greedy_section(&inst, &x, &mut report)?;
            distribution_section(&inst, &x, None, &mut report)?;
            let mut rows = edge_rows(&inst, &x, output.float)?;
            if inst.capacities.first_non_unit().is_none() {
                let marginals = sample_section(&inst, &x, samples, seed, &mut report)?;
                for (row, m) in rows.iter_mut().zip(&marginals) {
                    put_rational(row, "analytic_marginal", &m.analytic_marginal, output.float);
                    row.insert("frequency".into(), json!(m.frequency));
                }
            } else {
                report.verdict("marginal_floor", Verdict::NotRun);
                report.verdict("monte_carlo", Verdict::NotRun);
            }
            report.edges = rows;
            emit(&report, output.format.unwrap_or(Format::Json));
            Ok(report.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hypermatch: verification failed");
            ExitCode::from(1)
        }
        Err(Refusal(msg)) => {
            eprintln!("hypermatch: {msg}");
            ExitCode::from(2)
        }
    }
}
