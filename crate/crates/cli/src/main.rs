use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use slnet::generate::{gen_ndbd, gen_slst, gen_spanner, GraphParams};
use slnet::oracle::{exact_dslst, exact_ndbd, exact_spanner};
use slnet::pipeline::{
    ndbd_allowed_factor, solve_ndbd, solve_slst, solve_spanner, spanner_allowed_factor, verify_solution, PipelineOutput,
    Requirement, SolveParams,
};
use slnet::report::RunReport;
use slnet::rsp::{min_cost_path_relaxed, min_weight_path_hassin, rsp_exact};
use slnet::slst::SlstParams;
use slnet::suite::{rows_to_csv, rows_to_json, run_suite, SuiteConfig};
use slnet::thick::classify_pairs_diagnostic;
use slnet::thin_lp::{round_edges, rounding_gamma, satisfiable_pairs, solve_fractional, LpConfig, PairDemand};
use slnet::{parse_instance, write_instance, Instance, PathWitness, Ratio};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "slnet", version, about = "Directed network design with bounded distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ndbd,
    Slst,
    Spanner,
}

#[derive(Clone, Copy, ValueEnum)]
enum RspMode {
    Exact,
    Relaxed,
    Hassin,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        max_cost: u64,
        #[arg(long, default_value_t = 10)]
        max_length: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// NDBD bound; defaults to the generated graph's diameter.
        #[arg(long)]
        bound: Option<u64>,
        /// Spanner stretch as `a/b` or `a`.
        #[arg(long, default_value = "2")]
        stretch: Ratio,
        /// SLST terminal count.
        #[arg(long, default_value_t = 3)]
        terminals: usize,
        /// SLST bounds are `floor(slack * shortest length)`.
        #[arg(long, default_value = "3/2")]
        slack: Ratio,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Restricted shortest path between two nodes (1-based).
    Rsp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        bound: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: RspMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shallow-light Steiner tree for an slst instance.
    SolveSlst {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        level: usize,
        /// Terminals to cover; all by default.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Network design with a distance bound; exits 0 iff the output verifies.
    SolveNdbd(SolveArgs),
    /// Light-weight α-spanner; exits 0 iff the output verifies.
    SolveSpanner(SolveArgs),
    /// Fractional LP solution over all bounded pairs, optionally rounded.
    Lp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Also round with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thin/thick diagnostic for every ordered pair.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the bound of an ndbd instance.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by cost-ordered subset search (desk-scale only).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        problem: Kind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a report's edge set against an instance; exits 0 iff it passes.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Allowed factor over each pair's bound; defaults to the solver guarantee.
        #[arg(long)]
        factor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 2)]
    level: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled roots; defaults to ceil(3 sqrt(n) ln n) clamped to n.
    #[arg(long)]
    delta: Option<usize>,
    /// Record stage timings (makes the report irreproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn params(&self) -> SolveParams {
        SolveParams {
            delta: self.delta,
            timings: self.timings,
            ..SolveParams::new(self.eps, self.level, self.seed)
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn path_json(p: &PathWitness) -> serde_json::Value {
    json!({
        "edges": p.edges.iter().map(|e| e + 1).collect::<Vec<_>>(),
        "cost": p.cost,
        "length": p.length,
    })
}

fn node_arg(v: usize, n: usize) -> Result<usize> {
    if v == 0 || v > n {
        Err(format!("node {v} outside 1..={n}").into())
    } else {
        Ok(v - 1)
    }
}

fn verdict(out: PipelineOutput, dest: &Option<PathBuf>) -> Result<ExitCode> {
    emit(dest, &out.report.to_json())?;
    if out.verification.ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed: {} offending pair(s)", out.verification.offending.len());
        Ok(ExitCode::from(1))
    }
}

/// Demands implied by an instance: all pairs within `L`, within `α ℓ̄_G`,
/// or root-to-terminal within each terminal bound.
fn demands_of(inst: &Instance) -> Vec<PairDemand> {
    match inst {
        Instance::Ndbd(i) => satisfiable_pairs(&i.graph, |_| i.bound),
        Instance::Spanner(i) => satisfiable_pairs(&i.graph, |d| i.stretch.floor_mul(d)),
        Instance::Slst(i) => {
            let dist = i.graph.shortest_lengths_from(i.root);
            i.terminals
                .iter()
                .filter(|&(&t, &b)| t != i.root && dist[t].within(b))
                .map(|(&t, &b)| PairDemand {
                    from: i.root,
                    to: t,
                    bound: b,
                })
                .collect()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            m,
            max_cost,
            max_length,
            seed,
            bound,
            stretch,
            terminals,
            slack,
            out,
        } => {
            let gp = GraphParams {
                n,
                m,
                max_cost,
                max_length,
                seed,
            };
            let inst = match kind {
                Kind::Ndbd => Instance::Ndbd(gen_ndbd(&gp, bound)?),
                Kind::Slst => Instance::Slst(gen_slst(&gp, terminals, slack)?),
                Kind::Spanner => Instance::Spanner(gen_spanner(&gp, stretch)?),
            };
            emit(&out, &write_instance(&inst))?;
        }
        Command::Rsp {
            input,
            from,
            to,
            bound,
            eps,
            mode,
            out,
        } => {
            let inst = read_instance(&input)?;
            let g = inst.graph();
            let (u, v) = (node_arg(from, g.node_count())?, node_arg(to, g.node_count())?);
            let value = match mode {
                RspMode::Exact => {
                    if bound < 0.0 || bound.fract() != 0.0 {
                        return Err("exact mode needs a nonnegative integer bound".into());
                    }
                    path_json(&rsp_exact(g, u, v, bound as u64)?)
                }
                RspMode::Relaxed => path_json(&min_cost_path_relaxed(g, u, v, bound, eps)?),
                RspMode::Hassin => {
                    if bound < 0.0 || bound.fract() != 0.0 {
                        return Err("hassin mode needs a nonnegative integer bound".into());
                    }
                    let costs: Vec<f64> = g.edges().iter().map(|e| e.cost as f64).collect();
                    path_json(&min_weight_path_hassin(g, &costs, u, v, bound as u64, eps)?.path)
                }
            };
            emit(&out, &pretty(&value))?;
        }
        Command::SolveSlst {
            input,
            eps,
            level,
            k,
            timings,
            out,
        } => {
            let Instance::Slst(inst) = read_instance(&input)? else {
                return Err("solve-slst needs an slst instance".into());
            };
            let mut params = SlstParams::new(level, eps);
            params.k = k;
            let (_, report) = solve_slst(&inst, &params, timings)?;
            emit(&out, &report.to_json())?;
        }
        Command::SolveNdbd(args) => {
            let Instance::Ndbd(inst) = read_instance(&args.input)? else {
                return Err("solve-ndbd needs an ndbd instance".into());
            };
            return verdict(solve_ndbd(&inst, &args.params())?, &args.out);
        }
        Command::SolveSpanner(args) => {
            let Instance::Spanner(inst) = read_instance(&args.input)? else {
                return Err("solve-spanner needs a spanner instance".into());
            };
            return verdict(solve_spanner(&inst, &args.params())?, &args.out);
        }
        Command::Lp { input, eps, seed, out } => {
            let inst = read_instance(&input)?;
            let g = inst.graph();
            let demands = demands_of(&inst);
            let sol = solve_fractional(g, &demands, &LpConfig::new(eps))?;
            let x: Vec<_> = sol
                .x
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 1e-9)
                .map(|(e, &v)| json!({"edge": e + 1, "x": v}))
                .collect();
            let columns: Vec<_> = demands
                .iter()
                .zip(&sol.columns)
                .map(|(d, cols)| {
                    json!({
                        "from": d.from + 1,
                        "to": d.to + 1,
                        "bound": d.bound,
                        "paths": cols
                            .iter()
                            .filter(|c| c.flow > 1e-9)
                            .map(|c| json!({"flow": c.flow, "path": path_json(&c.path)}))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let mut value = json!({
                "objective": sol.objective,
                "rounds": sol.rounds,
                "demands": demands.len(),
                "x": x,
                "columns": columns,
            });
            if let Some(seed) = seed {
                let kept = round_edges(&sol.x, g.node_count(), seed);
                value["rounded"] = json!({
                    "seed": seed,
                    "gamma": rounding_gamma(g.node_count()),
                    "edges": kept.iter().map(|e| e + 1).collect::<Vec<_>>(),
                    "cost": g.cost_of(&kept),
                });
            }
            emit(&out, &pretty(&value))?;
        }
        Command::Classify { input, bound, out } => {
            let inst = read_instance(&input)?;
            let bound = match (bound, &inst) {
                (Some(b), _) => b,
                (None, Instance::Ndbd(i)) => i.bound,
                _ => return Err("--bound is required unless the input is an ndbd instance".into()),
            };
            let rows: Vec<_> = classify_pairs_diagnostic(inst.graph(), bound)
                .into_iter()
                .filter(|c| c.from != c.to)
                .map(|c| {
                    json!({
                        "from": c.from + 1,
                        "to": c.to + 1,
                        "class": c.class,
                        "candidates": c.candidates,
                        "confirmed": c.confirmed,
                    })
                })
                .collect();
            emit(&out, &pretty(&json!({"bound": bound, "pairs": rows})))?;
        }
        Command::Oracle { input, problem, k, out } => {
            let inst = read_instance(&input)?;
            let edges = match (problem, &inst) {
                (Kind::Ndbd, Instance::Ndbd(i)) => exact_ndbd(i)?,
                (Kind::Spanner, Instance::Spanner(i)) => exact_spanner(i)?,
                (Kind::Slst, Instance::Slst(i)) => exact_dslst(i, k.unwrap_or(i.terminals.len()))?.edges,
                _ => return Err(format!("--problem does not match the {} instance", inst.kind()).into()),
            };
            let g = inst.graph();
            emit(
                &out,
                &pretty(&json!({
                    "edges": edges.iter().map(|e| e + 1).collect::<Vec<_>>(),
                    "cost": g.cost_of(&edges),
                })),
            )?;
        }
        Command::Verify {
            input,
            solution,
            factor,
            out,
        } => {
            let inst = read_instance(&input)?;
            let text = fs::read_to_string(&solution).map_err(|e| format!("{}: {e}", solution.display()))?;
            let report: RunReport = serde_json::from_str(&text)?;
            let g = inst.graph();
            if let Some(&bad) = report.edges.iter().find(|&&e| e == 0 || e > g.edge_count()) {
                return Err(format!("edge {bad} outside 1..={}", g.edge_count()).into());
            }
            let edges = report.edge_ids();
            let (req, guarantee) = match &inst {
                Instance::Ndbd(i) => (Requirement::Distance(i.bound), ndbd_allowed_factor(report.params.eps)),
                Instance::Spanner(i) => (
                    Requirement::Stretch(i.stretch),
                    spanner_allowed_factor(i.stretch, report.params.eps),
                ),
                Instance::Slst(_) => return Err("verify checks ndbd and spanner solutions".into()),
            };
            let v = verify_solution(g, &edges, req, factor.unwrap_or(guarantee));
            emit(&out, &pretty(&v))?;
            return Ok(if v.ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Bench { config, csv, json } => {
            let text = fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let cfg: SuiteConfig = serde_json::from_str(&text)?;
            let rows = run_suite(&cfg);
            let table = rows_to_csv(&rows);
            match (&csv, &json) {
                (None, None) => print!("{table}"),
                _ => {
                    if csv.is_some() {
                        emit(&csv, &table)?;
                    }
                    if json.is_some() {
                        emit(&json, &rows_to_json(&rows))?;
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("SLNET_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => eprintln!("ignoring SLNET_THREADS={v:?}"),
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
