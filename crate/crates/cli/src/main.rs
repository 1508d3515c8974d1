use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fodtree::analysis::{analyze, extract_plan, report};
use fodtree::build::{build_basic, build_greedy, min_fill_dtree, GreedyReport};
use fodtree::fotree::{compute_properties, FoDtree, FoNodeKind};
use fodtree::io::{parse_model, tree_dot, write_model};
use fodtree::lve::{execute_plan, group_count, Execution};
use fodtree::model::{ground, Model};
use fodtree::propositional::{brute_force_z, dtree_properties, ve_over_dtree, DEFAULT_CAP};
use fodtree::{Error, Result};
use serde_json::{json, Value};

mod gen;

/// First-order decomposition trees: build, analyze and run lifted inference on parfactor models.
#[derive(Parser)]
#[command(name = "fodt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Model file (`.plm`), or `@name` for a bundled example.
    model: String,
    /// Resize every domain to this many objects (named constants are kept).
    #[arg(long)]
    size: Option<usize>,
    /// Write the command's JSON output to this file.
    #[arg(long, value_name = "PATH")]
    emit_json: Option<PathBuf>,
    /// Build with logvar alignment search.
    #[arg(long)]
    greedy: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and print it as JSON.
    Parse(Input),
    /// Build an FO-dtree and print it as DOT.
    Tree {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "PATH")]
        emit_dot: Option<PathBuf>,
    },
    /// Liftability, lifted width and cost bounds.
    Analyze(Input),
    /// Ordered lifted operations.
    Plan(Input),
    /// Run the lifted plan and print Z.
    Infer {
        #[command(flatten)]
        input: Input,
        /// Print the operation log.
        #[arg(long)]
        trace: bool,
    },
    /// Brute-force Z and ground variable elimination.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Lifted inference against the oracle.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Lifted work across domain sizes.
    Scale {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Print a random model.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(input: &Input) -> Result<Model> {
    let src = match input.model.strip_prefix('@') {
        Some(name) => fodtree::corpus::source(name)
            .ok_or_else(|| Error::Semantic(format!("no bundled model named {name}")))?
            .to_string(),
        None => fs::read_to_string(&input.model).map_err(|e| Error::Semantic(format!("{}: {e}", input.model)))?,
    };
    let model = parse_model(&src)?;
    match input.size {
        Some(n) => model.resized(n).ok_or_else(|| Error::Semantic(format!("a domain has more named objects than {n}"))),
        None => Ok(model),
    }
}

fn build(input: &Input, model: &Model) -> Result<(FoDtree, Option<GreedyReport>)> {
    if input.greedy {
        let (t, r) = build_greedy(model)?;
        Ok((t, Some(r)))
    } else {
        Ok((build_basic(model)?, None))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Semantic(format!("{}: {e}", path.display())))
}

fn emit(input: &Input, value: &Value) -> Result<()> {
    if let Some(p) = &input.emit_json {
        write_file(p, &(serde_json::to_string_pretty(value).unwrap() + "\n"))?;
    }
    Ok(())
}

fn lifted(model: &Model, input: &Input) -> Result<(FoDtree, Execution)> {
    let (t, _) = build(input, model)?;
    let a = analyze(&t);
    let plan = extract_plan(&t, &a)?;
    let run = execute_plan(&t, &a, &plan)?;
    Ok((t, run))
}

struct Oracle {
    randvars: usize,
    brute: f64,
    ve: f64,
    ve_work: u64,
}

fn oracle(model: &Model, cap: usize) -> Result<Oracle> {
    let g = ground(model);
    let brute = brute_force_z(&g.factors, &g.cards, cap)?;
    let dt = min_fill_dtree(&g.factors);
    let props = dtree_properties(&dt, &g.factors);
    let (ve, work) = ve_over_dtree(&dt, &props, &g.factors)?;
    Ok(Oracle { randvars: g.cards.len(), brute, ve, ve_work: work.0 })
}

fn groups(t: &FoDtree) -> Vec<Value> {
    t.preorder()
        .into_iter()
        .filter_map(|n| match &t.nodes[n].kind {
            FoNodeKind::Dpg(d) => Some(json!({
                "node": n,
                "dpg": d.to_string(),
                "groups": group_count(d, &t.model).to_string(),
            })),
            _ => None,
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse(input) => {
            let m = load(&input)?;
            let v = serde_json::to_value(&m).unwrap();
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
            emit(&input, &v)
        }
        Command::Tree { input, emit_dot } => {
            let m = load(&input)?;
            let (t, greedy) = build(&input, &m)?;
            let props = compute_properties(&t);
            let dot = tree_dot(&t, Some(&props));
            match &emit_dot {
                Some(p) => write_file(p, &dot)?,
                None => print!("{dot}"),
            }
            emit(&input, &json!({ "tree": t, "properties": props, "greedy": greedy }))
        }
        Command::Analyze(input) => {
            let m = load(&input)?;
            let (t, greedy) = build(&input, &m)?;
            let a = analyze(&t);
            let r = report(&t, &a);
            println!("liftable: {}", r.liftable);
            for o in &r.offending_nodes {
                println!("  offending entry at node {}: {}", o.node, o.entry);
            }
            println!("lifted width: w_g = {}, w_# = {}", r.w_g, r.w_count);
            println!("lifted bound: {}", r.cost.lifted_bound);
            println!("ground bound: {}", r.cost.ground_bound);
            if let Some(g) = &greedy {
                println!("builder: greedy ({}, {} candidates)", g.path, g.candidates);
            }
            for n in &r.per_node_clusters {
                println!("  node {:>3} {:<32} cluster {:?} context {:?}", n.node, n.label, n.cluster, n.context);
            }
            emit(&input, &json!({ "report": r, "greedy": greedy }))
        }
        Command::Plan(input) => {
            let m = load(&input)?;
            let (t, _) = build(&input, &m)?;
            let a = analyze(&t);
            let plan = extract_plan(&t, &a)?;
            let labels: Vec<&str> = plan.iter().map(|o| o.label.as_str()).collect();
            println!("{}", labels.join(" ≺ "));
            emit(&input, &serde_json::to_value(&plan).unwrap())
        }
        Command::Infer { input, trace } => {
            let m = load(&input)?;
            let (_, run) = lifted(&m, &input)?;
            println!("Z = {}", run.z_text);
            println!("work = {}", run.work);
            if trace {
                for r in &run.trace {
                    println!("  node {:>3} {:<28} {} entries", r.node, r.label, r.entries);
                }
            }
            emit(&input, &serde_json::to_value(&run).unwrap())
        }
        Command::Oracle { input, cap } => {
            let m = load(&input)?;
            let o = oracle(&m, cap)?;
            println!("randvars = {}", o.randvars);
            println!("Z (brute force) = {:e}", o.brute);
            println!("Z (ground VE)   = {:e}", o.ve);
            println!("ground VE work  = {}", o.ve_work);
            emit(
                &input,
                &json!({ "randvars": o.randvars, "brute_force_z": o.brute, "ve_z": o.ve, "ve_work": o.ve_work }),
            )
        }
        Command::Check { input, cap } => {
            let m = load(&input)?;
            let (t, run) = lifted(&m, &input)?;
            let o = oracle(&m, cap)?;
            let rel = (run.z - o.brute).abs() / o.brute.abs().max(f64::MIN_POSITIVE);
            let g = groups(&t);
            println!("lifted Z = {}", run.z_text);
            println!("oracle Z = {:e}", o.brute);
            println!("relative error = {rel:e}");
            for d in &g {
                println!(
                    "  DPG node {} {}: {} groups",
                    d["node"],
                    d["dpg"].as_str().unwrap(),
                    d["groups"].as_str().unwrap()
                );
            }
            emit(
                &input,
                &json!({ "lifted_z": run.z, "oracle_z": o.brute, "relative_error": rel, "lifted_work": run.work, "dpg": g }),
            )?;
            if rel > 1e-9 {
                return Err(Error::Plan(format!("lifted and oracle Z differ by {rel:e}")));
            }
            Ok(())
        }
        Command::Scale { input, sizes } => {
            let base = load(&Input { size: None, ..input.clone() })?;
            let rows = scale(&base, &input, &sizes)?;
            println!("{:>6} {:>12} {:>24} {:>24}", "n", "work", "lifted bound", "Z");
            for r in &rows {
                let col = |k: &str| r[k].as_str().map(str::to_string).unwrap_or_else(|| r[k].to_string());
                println!("{:>6} {:>12} {:>24} {:>24}", col("n"), col("work"), col("lifted_bound"), col("z"));
            }
            emit(&input, &Value::Array(rows))
        }
        Command::Gen { seed } => {
            print!("{}", write_model(&gen::random_model(seed)));
            Ok(())
        }
    }
}

fn scale_one(base: &Model, input: &Input, n: usize) -> Result<Value> {
    let m = base.resized(n).ok_or_else(|| Error::Semantic(format!("a domain has more named objects than {n}")))?;
    let (t, run) = lifted(&m, input)?;
    let cost = fodtree::analysis::estimate_cost(&t, &analyze(&t));
    Ok(
        json!({ "n": n, "work": run.work, "lifted_bound": cost.lifted_bound.to_string(), "z": run.z_text, "log10_z": run.log10_z }),
    )
}

#[cfg(feature = "parallel")]
fn scale(base: &Model, input: &Input, sizes: &[usize]) -> Result<Vec<Value>> {
    use rayon::prelude::*;
    sizes.par_iter().map(|&n| scale_one(base, input, n)).collect()
}

#[cfg(not(feature = "parallel"))]
fn scale(base: &Model, input: &Input, sizes: &[usize]) -> Result<Vec<Value>> {
    sizes.iter().map(|&n| scale_one(base, input, n)).collect()
}

fn main() -> ExitCode {
    // die quietly when piped into `head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
