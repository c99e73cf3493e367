use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use thickness_core::bounds::{
    product_lower_bound, thickness_product, upper_bound_via_containment, Provenance,
};
use thickness_core::constructions::{
    chain_decomposition, contract_chain, ChainSpec, EndBase, MidBase,
};
use thickness_core::decomposition::{Decomposition, VerificationReport};
use thickness_core::document::DecompositionDocument;
use thickness_core::graph::{
    complete_graph, complete_graph_minus_edge, complete_path_product, Edge, Graph, VertexId,
};
use thickness_core::pipeline::{
    construct_multi_layer, construct_product, construct_two_layer, MiddlePath, ProductConstruction,
};
use thickness_core::search::{
    exact_thickness, find_decomposition, SearchBudget, SearchConstraint, SearchOutcome,
};

const EXIT_INVALID: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "thickness-lab",
    version,
    about = "Planar decompositions of K_n x P_m"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the graph K_n x P_m.
    Product {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the graph K_n, or K_n minus one edge.
    Complete {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long)]
        minus_edge: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the known bounds on the thickness of K_n x P_m.
    Bounds {
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build and verify a decomposition of K_n x P_m.
    Construct(ConstructArgs),
    /// Check a decomposition document.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for a k-page decomposition, or the exact thickness.
    Search(SearchArgs),
    /// Convert a document to DOT, one cluster per page.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Time limit per search call; no limit when absent.
    #[arg(long, env = "THICKNESS_LAB_BUDGET_SECONDS")]
    budget_seconds: Option<f64>,
    /// Node limit per search call.
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Sequential search in a fixed order, for reproducible certificates.
    #[arg(long)]
    deterministic: bool,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget, String> {
        let max_duration = match self.budget_seconds {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                return Err(format!(
                    "budget must be a positive number of seconds, got {s}"
                ))
            }
            s => s.map(Duration::from_secs_f64),
        };
        Ok(SearchBudget {
            max_nodes: self.max_nodes,
            max_duration,
            deterministic_order: self.deterministic,
        })
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    /// Obtain base decompositions by search (the default when no base file is given).
    #[arg(long, conflicts_with_all = ["end_base", "last_base", "mid_base"])]
    search_bases: bool,
    /// Decomposition of K_{n+1} for the end blocks.
    #[arg(long)]
    end_base: Option<PathBuf>,
    /// Hub of the end base; defaults to its last vertex.
    #[arg(long, requires = "end_base")]
    end_hub: Option<String>,
    /// Decomposition of K_{n+1} for the last block, with the same hub rule.
    #[arg(long, requires = "end_base")]
    last_base: Option<PathBuf>,
    /// Decomposition of K_{n+2} - e for the middle blocks.
    #[arg(long)]
    mid_base: Option<PathBuf>,
    /// Hubs of the middle base; default to its two non-adjacent vertices.
    #[arg(long, num_args = 2, value_names = ["A", "B"], requires = "mid_base")]
    mid_hubs: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// Graph document to search; its pages, if any, are ignored.
    #[arg(long, conflicts_with_all = ["n", "m"], required_unless_present = "n")]
    graph: Option<PathBuf>,
    #[arg(short, requires = "m", value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    #[arg(short, requires = "n", value_parser = clap::value_parser!(u32).range(1..))]
    m: Option<u32>,
    /// Number of pages.
    #[arg(short, required_unless_present = "exact", conflicts_with = "exact")]
    k: Option<usize>,
    /// Find the least page count.
    #[arg(long)]
    exact: bool,
    /// Require x-A and x-B on the same page for every common neighbour x.
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with_all = ["pin", "exact"])]
    hub_symmetric: Option<Vec<String>>,
    /// Require edge A-B on page PAGE (0-based).
    #[arg(long, num_args = 3, value_names = ["A", "B", "PAGE"], conflicts_with = "exact")]
    pin: Option<Vec<String>>,
    /// Write the certificate here when one is found.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Product { n, m, out } => cmd_product(n as usize, m as usize, out.as_deref()),
        Command::Complete { n, minus_edge, out } => {
            cmd_complete(n as usize, minus_edge, out.as_deref())
        }
        Command::Bounds { n, m, json } => cmd_bounds(n as usize, m as usize, json),
        Command::Construct(args) => cmd_construct(&args),
        Command::Verify { file, json } => cmd_verify(&file, json),
        Command::Search(args) => cmd_search(&args),
        Command::ExportDot { file, out } => cmd_export_dot(&file, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<DecompositionDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    DecompositionDocument::parse(&text)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_decomposition(path: &Path) -> Result<Decomposition, Failure> {
    load(path)?
        .decomposition()
        .ok_or_else(|| Failure::invalid(format!("{} has no pages", path.display())))
}

fn label(s: &str) -> Result<VertexId, Failure> {
    s.parse().map_err(|e| Failure::usage(format!("{e}")))
}

fn cmd_product(n: usize, m: usize, out: Option<&Path>) -> CmdResult {
    let g = complete_path_product(n, m).map_err(|e| Failure::usage(e.to_string()))?;
    let doc = DecompositionDocument::from_graph(g)
        .with_metadata("generator", json!("thickness-lab product"))
        .with_metadata("parameters", json!({"n": n, "m": m}));
    emit(&doc.to_json_string(), out)?;
    Ok(0)
}

fn cmd_complete(n: usize, minus_edge: bool, out: Option<&Path>) -> CmdResult {
    let g = if minus_edge {
        complete_graph_minus_edge(n)
    } else {
        complete_graph(n)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let doc = DecompositionDocument::from_graph(g)
        .with_metadata("generator", json!("thickness-lab complete"))
        .with_metadata("parameters", json!({"n": n, "minus_edge": minus_edge}));
    emit(&doc.to_json_string(), out)?;
    Ok(0)
}

fn cmd_bounds(n: usize, m: usize, as_json: bool) -> CmdResult {
    let theta = thickness_product(n, m).map_err(|e| Failure::usage(e.to_string()))?;
    let (lower, upper) = if n >= 2 && m >= 2 {
        (
            (
                product_lower_bound(n, m).expect("n, m >= 2"),
                Provenance::ProductLower,
            ),
            (
                upper_bound_via_containment(n, m).expect("n, m >= 2"),
                Provenance::ConstructionUpper,
            ),
        )
    } else {
        ((theta.lo, theta.provenance), (theta.hi, theta.provenance))
    };
    if as_json {
        let report = json!({
            "n": n,
            "m": m,
            "lower_bound": {"value": lower.0, "provenance": lower.1},
            "upper_bound": {"value": upper.0, "provenance": upper.1},
            "thickness": {
                "status": if theta.is_settled() { "exact" } else { "open" },
                "lo": theta.lo,
                "hi": theta.hi,
                "provenance": theta.provenance,
            },
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        println!("K_{n} x P_{m}");
        println!("lower bound: {} ({})", lower.0, lower.1);
        println!("upper bound: {} ({})", upper.0, upper.1);
        println!("thickness: {theta}");
    }
    Ok(0)
}

fn last_vertex(d: &Decomposition) -> Result<VertexId, Failure> {
    d.host()
        .vertices()
        .iter()
        .next_back()
        .cloned()
        .ok_or_else(|| Failure::invalid("base has no vertices"))
}

fn end_base(path: &Path, hub: Option<&str>) -> Result<EndBase, Failure> {
    let d = load_decomposition(path)?;
    let hub = match hub {
        Some(h) => label(h)?,
        None => last_vertex(&d)?,
    };
    EndBase::new(d, hub).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn mid_base(path: &Path, hubs: Option<&[String]>) -> Result<MidBase, Failure> {
    let d = load_decomposition(path)?;
    let (a, b) = match hubs {
        Some([a, b]) => (label(a)?, label(b)?),
        _ => {
            let host = d.host();
            let vs: Vec<&VertexId> = host.vertices().iter().collect();
            let pair = vs
                .iter()
                .enumerate()
                .flat_map(|(i, a)| vs[i + 1..].iter().map(move |b| (*a, *b)))
                .find(|(a, b)| !host.has_edge(a, b))
                .ok_or_else(|| Failure::invalid("middle base has no missing edge"))?;
            (pair.0.clone(), pair.1.clone())
        }
    };
    MidBase::new(d, a, b).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn from_files(args: &ConstructArgs) -> Result<ProductConstruction, Failure> {
    let (n, m) = (args.n as usize, args.m as usize);
    let fail = |e: &dyn std::fmt::Display| Failure::invalid(e.to_string());
    let end = args
        .end_base
        .as_deref()
        .map(|p| end_base(p, args.end_hub.as_deref()))
        .transpose()?;
    let last = args
        .last_base
        .as_deref()
        .map(|p| end_base(p, args.end_hub.as_deref()))
        .transpose()?;
    let mid = args
        .mid_base
        .as_deref()
        .map(|p| mid_base(p, args.mid_hubs.as_deref()))
        .transpose()?;
    match (end, mid) {
        (Some(end), None) if m == 2 && last.is_none() => {
            construct_two_layer(&end).map_err(|e| fail(&e))
        }
        (None, Some(mid)) if m >= 3 => construct_multi_layer(&mid, m).map_err(|e| fail(&e)),
        (Some(end), mid) => {
            let spec = ChainSpec {
                n,
                m,
                end_base: end,
                last_base: last,
                mid_base: mid.clone(),
            };
            let chain = chain_decomposition(&spec).map_err(|e| fail(&e))?;
            let product = contract_chain(&chain.decomposition).map_err(|e| fail(&e))?;
            let middle = match mid {
                None => MiddlePath::NotNeeded,
                Some(mid) if mid.is_hub_symmetric() => MiddlePath::HubSymmetric,
                Some(_) => MiddlePath::Aligned,
            };
            Ok(ProductConstruction {
                n,
                m,
                chain: Some(chain.decomposition),
                product,
                middle,
            })
        }
        (None, _) => Err(Failure::usage(format!(
            "m = {m} needs {}",
            if m >= 3 { "--mid-base" } else { "--end-base" }
        ))),
    }
}

fn cmd_construct(args: &ConstructArgs) -> CmdResult {
    let (n, m) = (args.n as usize, args.m as usize);
    let from_search = args.end_base.is_none() && args.mid_base.is_none();
    let built = if from_search {
        let budget = args.budget.budget().map_err(Failure::usage)?;
        construct_product(n, m, &budget).map_err(|e| {
            let code = match e {
                thickness_core::pipeline::PipelineError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
                _ => EXIT_INVALID,
            };
            Failure {
                code,
                message: e.to_string(),
            }
        })?
    } else {
        from_files(args)?
    };
    if built.n != n || built.m != m {
        return Err(Failure::invalid(format!(
            "bases give K_{} x P_{}, not K_{n} x P_{m}",
            built.n, built.m
        )));
    }
    let report = built.product.verify();
    let doc = DecompositionDocument::from_decomposition(&built.product)
        .with_metadata("generator", json!("thickness-lab construct"))
        .with_metadata("parameters", json!({"n": n, "m": m}))
        .with_metadata("bases", json!(if from_search { "search" } else { "files" }))
        .with_metadata("middle_blocks", json!(built.middle.to_string()))
        .with_metadata("verification", verification_json(&report));
    emit(&doc.to_json_string(), args.out.as_deref())?;
    if report.is_valid() {
        let k = built.product.page_count();
        eprintln!(
            "K_{n} x P_{m}: verified, {k} page{}",
            if k == 1 { "" } else { "s" }
        );
        Ok(0)
    } else {
        Err(Failure::invalid(
            "constructed decomposition failed verification",
        ))
    }
}

fn edge_json(e: &Edge) -> Value {
    let (a, b) = e.endpoints();
    json!([a.to_string(), b.to_string()])
}

fn verification_json(r: &VerificationReport) -> Value {
    let pages: Vec<Value> = r
        .per_page_planar
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut page = json!({"page": i, "planar": v.planar});
            if let Some(w) = &v.kuratowski {
                page["kuratowski"] = json!({
                    "kind": format!("{:?}", w.kind),
                    "edges": w.edges.iter().map(edge_json).collect::<Vec<_>>(),
                });
            }
            page
        })
        .collect();
    json!({
        "valid": r.is_valid(),
        "partition_ok": r.partition_ok,
        "coverage_ok": r.coverage_ok,
        "pairing_ok": r.pairing_ok,
        "pages": pages,
        "duplicated": r.duplicated.iter().map(|(e, p)| json!({"edge": edge_json(e), "pages": p})).collect::<Vec<_>>(),
        "missing": r.missing.iter().map(edge_json).collect::<Vec<_>>(),
        "foreign": r.foreign.iter().map(|(p, e)| json!({"edge": edge_json(e), "page": p})).collect::<Vec<_>>(),
        "pairing_violations": r.pairing_violations.iter().map(|v| json!({
            "hub": v.hub.to_string(),
            "slot": v.slot,
            "pages": [v.pages.0, v.pages.1],
        })).collect::<Vec<_>>(),
    })
}

fn print_report(r: &VerificationReport) {
    for (e, pages) in &r.duplicated {
        println!("duplicated edge {e} on pages {pages:?}");
    }
    for e in &r.missing {
        println!("missing edge {e}");
    }
    for (p, e) in &r.foreign {
        println!("page {p}: edge {e} is not in the host");
    }
    for (i, v) in r.per_page_planar.iter().enumerate() {
        if v.planar {
            println!("page {i}: planar");
        } else {
            println!("page {i}: not planar");
            if let Some(w) = &v.kuratowski {
                let edges: Vec<String> = w.edges.iter().map(|e| e.to_string()).collect();
                println!("  {:?} subdivision: {}", w.kind, edges.join(" "));
            }
        }
    }
    for v in &r.pairing_violations {
        println!(
            "hub {} slot {}: hub edges on pages {:?} and {:?}",
            v.hub, v.slot, v.pages.0, v.pages.1
        );
    }
    println!("{}", if r.is_valid() { "valid" } else { "invalid" });
}

fn cmd_verify(path: &Path, as_json: bool) -> CmdResult {
    let doc = load(path)?;
    let d = doc
        .decomposition()
        .ok_or_else(|| Failure::invalid(format!("{} has no pages", path.display())))?;
    let report = d.verify();
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&verification_json(&report)).expect("json")
        );
    } else {
        print_report(&report);
    }
    Ok(if report.is_valid() { 0 } else { EXIT_INVALID })
}

fn search_graph(args: &SearchArgs) -> Result<(Graph, Value), Failure> {
    match (&args.graph, args.n, args.m) {
        (Some(path), _, _) => Ok((
            load(path)?.host,
            json!({"graph": path.display().to_string()}),
        )),
        (None, Some(n), Some(m)) => Ok((
            complete_path_product(n as usize, m as usize)
                .map_err(|e| Failure::usage(e.to_string()))?,
            json!({"n": n, "m": m}),
        )),
        _ => Err(Failure::usage("give --graph or both -n and -m")),
    }
}

fn search_constraint(args: &SearchArgs) -> Result<SearchConstraint, Failure> {
    if let Some([a, b]) = args.hub_symmetric.as_deref() {
        return Ok(SearchConstraint::HubSymmetric {
            a: label(a)?,
            b: label(b)?,
        });
    }
    if let Some([a, b, page]) = args.pin.as_deref() {
        let edge = Edge::new(label(a)?, label(b)?).map_err(|e| Failure::usage(e.to_string()))?;
        let page = page
            .parse()
            .map_err(|_| Failure::usage(format!("bad page index {page:?}")))?;
        return Ok(SearchConstraint::PinnedPage { edge, page });
    }
    Ok(SearchConstraint::None)
}

fn write_certificate(
    args: &SearchArgs,
    d: &Decomposition,
    parameters: &Value,
) -> Result<(), Failure> {
    if let Some(out) = &args.out {
        let doc = DecompositionDocument::from_decomposition(d)
            .with_metadata("generator", json!("thickness-lab search"))
            .with_metadata("parameters", parameters.clone())
            .with_metadata("verification", verification_json(&d.verify()));
        emit(&doc.to_json_string(), Some(out))?;
    }
    Ok(())
}

fn cmd_search(args: &SearchArgs) -> CmdResult {
    let (g, mut parameters) = search_graph(args)?;
    let budget = args.budget.budget().map_err(Failure::usage)?;
    if args.exact {
        let result = exact_thickness(&g, &budget);
        parameters["exact"] = json!(true);
        write_certificate(args, &result.certificate, &parameters)?;
        let b = result.bound;
        if args.json {
            let report = json!({
                "status": if b.is_settled() { "exact" } else { "open" },
                "lo": b.lo,
                "hi": b.hi,
                "provenance": b.provenance,
                "nodes": result.nodes,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        } else {
            println!("thickness: {b}");
            println!("nodes: {}", result.nodes);
        }
        return Ok(if b.is_settled() { 0 } else { EXIT_INCONCLUSIVE });
    }
    let k = args.k.expect("clap requires -k without --exact");
    let constraint = search_constraint(args)?;
    parameters["k"] = json!(k);
    let report = find_decomposition(&g, k, &constraint, &budget);
    let (status, code) = match &report.outcome {
        SearchOutcome::Found(d) => {
            write_certificate(args, d, &parameters)?;
            ("found", 0)
        }
        SearchOutcome::Exhausted => ("exhausted", EXIT_INVALID),
        SearchOutcome::Inconclusive => ("inconclusive", EXIT_INCONCLUSIVE),
    };
    if args.json {
        let mut out = json!({
            "status": status,
            "k": k,
            "nodes": report.nodes,
        });
        if let SearchOutcome::Found(d) = &report.outcome {
            out["page_sizes"] = json!(d.pages().iter().map(|p| p.len()).collect::<Vec<_>>());
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("{status} (k = {k}, {} nodes)", report.nodes);
        if let SearchOutcome::Found(d) = &report.outcome {
            for (i, page) in d.pages().iter().enumerate() {
                println!("page {i}: {} edges", page.len());
            }
        }
    }
    Ok(code)
}

fn cmd_export_dot(path: &Path, out: Option<&Path>) -> CmdResult {
    let doc = load(path)?;
    emit(&doc.to_dot(), out)?;
    Ok(0)
}
