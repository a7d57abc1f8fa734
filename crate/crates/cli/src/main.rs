use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use linsem_core::config::Config;
use linsem_core::constraints::{discover_constraints, emit_cas_script, CasTask, DiscoveryOptions, Dialect};
use linsem_core::decomposition::{decomposition_report, mixed_components};
use linsem_core::identifiability::{
    htc_identifiable, identify, identify_with_degree, fiber_degree_estimate, recover_params, IdentifiabilityReport, Status,
};
use linsem_core::numerics::{matrix_to_json, parse_matrix, FloatMatrix};
use linsem_core::parametrization::{list_treks, phi_symbolic, trek_monomial};
use linsem_core::separation::{ci_statements, d_separated, trek_separation_rank};
use linsem_core::{MixedGraph, NodeSet, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "linsem", version, about = "Analyses of linear structural equation models on mixed graphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 2 on a negative verdict.
    #[arg(long, global = true)]
    fail_on_negative: bool,
    /// JSON file with configuration overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph and report its basic properties.
    Validate { graph: PathBuf },
    /// Exact covariance entries in terms of edge parameters.
    Parametrize {
        graph: PathBuf,
        /// A single entry, as `i,j`.
        #[arg(long)]
        entry: Option<String>,
    },
    /// Treks between two nodes with their monomials.
    Treks {
        graph: PathBuf,
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
        /// Edge bound, required for cyclic graphs.
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// d-separation of two nodes, or all statements when no pair is given.
    Dsep {
        graph: PathBuf,
        #[arg(long, requires = "j")]
        i: Option<String>,
        #[arg(long, requires = "i")]
        j: Option<String>,
        #[arg(long, default_value = "")]
        given: String,
        /// Largest conditioning set when listing all statements.
        #[arg(long)]
        max_cond: Option<usize>,
    },
    /// Generic rank of a covariance submatrix with a separating pair.
    Treksep {
        graph: PathBuf,
        #[arg(long)]
        rows: String,
        #[arg(long)]
        cols: String,
    },
    /// Mixed components of the graph.
    Decompose { graph: PathBuf },
    /// Global and generic identifiability of the edge coefficients.
    Identify {
        graph: PathBuf,
        /// Also estimate the fiber size numerically.
        #[arg(long)]
        degree: bool,
    },
    /// Recover edge coefficients from a covariance matrix.
    Recover {
        graph: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Number of real parameter points in random fibers.
    Degree {
        graph: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Discover and certify polynomial relations among covariances.
    Constraints {
        graph: PathBuf,
        #[arg(long)]
        max_cond: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_minor_size: usize,
        #[arg(long, default_value_t = 1)]
        max_depth: usize,
        /// Skip relations obtained through decomposition.
        #[arg(long)]
        no_verma: bool,
    },
    /// Computer algebra script for identifiability or the vanishing ideal.
    EmitCas {
        graph: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long, value_enum, default_value = "a")]
        dialect: DialectArg,
        /// Write the script here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz rendering of the graph.
    ExportDot { graph: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Identifiability,
    VanishingIdeal,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    /// Singular.
    A,
    /// Macaulay2.
    B,
}

struct Outcome {
    command: &'static str,
    result: Value,
    text: String,
    negative: bool,
    /// Raw output such as DOT or a script, printed without a header.
    raw: bool,
}

impl Outcome {
    fn report<T: Serialize>(command: &'static str, result: &T, text: String) -> Result<Self> {
        Ok(Outcome { command, result: serde_json::to_value(result)?, text, negative: false, raw: false })
    }

    fn negative(mut self, flag: bool) -> Self {
        self.negative = flag;
        self
    }
}

fn load_config(opts: &GlobalOpts) -> Result<Config> {
    let mut cfg = match &opts.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => Config::default(),
    };
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn load_graph(path: &Path) -> Result<MixedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MixedGraph::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn node(g: &MixedGraph, label: &str) -> Result<usize> {
    Ok(g.index_of(label.trim())?)
}

fn nodes(g: &MixedGraph, list: &str) -> Result<NodeSet> {
    Ok(g.parse_node_list(list)?)
}

fn braces(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(","))
}

fn run(cli: &Cli, cfg: &Config) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { graph } => {
            let g = load_graph(graph)?;
            let p = g.properties();
            let result = json!({
                "nodes": g.labels(),
                "directed_edges": g.num_directed(),
                "bidirected_edges": g.num_bidirected(),
                "acyclic": p.acyclic,
                "simple": p.simple,
                "sinks": g.label_set(&p.sinks),
                "sources": g.label_set(&p.sources),
            });
            let text = format!(
                "nodes: {}\ndirected edges: {}\nbidirected edges: {}\nacyclic: {}\nsimple: {}\nsinks: {}\nsources: {}\n",
                g.labels().join(" "),
                g.num_directed(),
                g.num_bidirected(),
                p.acyclic,
                p.simple,
                braces(&g.label_set(&p.sinks)),
                braces(&g.label_set(&p.sources)),
            );
            Outcome::report("validate", &result, text)
        }
        Command::Parametrize { graph, entry } => {
            let g = load_graph(graph)?;
            let s = phi_symbolic(&g, cfg.symbolic_guard)?;
            match entry {
                Some(e) => {
                    let Some((a, b)) = e.split_once(',') else {
                        bail!("--entry expects `i,j`, got `{e}`");
                    };
                    let (i, j) = (node(&g, a)?, node(&g, b)?);
                    let value = s.entry_text(i, j);
                    let result = json!({"row": g.label(i), "col": g.label(j), "value": value});
                    Outcome::report("parametrize", &result, format!("{value}\n"))
                }
                None => Outcome::report("parametrize", &json!({"entries": s.upper_entries()}), s.to_table()),
            }
        }
        Command::Treks { graph, i, j, max_edges } => {
            let g = load_graph(graph)?;
            let (i, j) = (node(&g, i)?, node(&g, j)?);
            let treks = list_treks(&g, i, j, *max_edges)?;
            let names: Vec<String> = (0..g.n()).map(|v| g.label(v).to_string()).collect();
            let rows: Vec<Value> = treks
                .iter()
                .map(|t| json!({"trek": t.to_text(&g), "edges": t.num_edges(), "monomial": trek_monomial(t).to_text(&names)}))
                .collect();
            let mut text = String::new();
            for r in &rows {
                writeln!(text, "{}    {}", r["trek"].as_str().unwrap_or(""), r["monomial"].as_str().unwrap_or(""))?;
            }
            writeln!(text, "{} treks", rows.len())?;
            let result = json!({"i": g.label(i), "j": g.label(j), "max_edges": max_edges, "treks": rows});
            Outcome::report("treks", &result, text)
        }
        Command::Dsep { graph, i, j, given, max_cond } => {
            let g = load_graph(graph)?;
            match (i, j) {
                (Some(a), Some(b)) => {
                    let (a, b) = (node(&g, a)?, node(&g, b)?);
                    let s = nodes(&g, given)?;
                    let sep = d_separated(&g, a, b, &s)?;
                    let result = json!({"i": g.label(a), "j": g.label(b), "given": g.label_set(&s), "separated": sep});
                    let verdict = if sep { "d-separated" } else { "d-connected" };
                    let text = format!("{} and {} given {}: {verdict}\n", g.label(a), g.label(b), braces(&g.label_set(&s)));
                    Ok(Outcome::report("dsep", &result, text)?.negative(!sep))
                }
                _ => {
                    let stmts = ci_statements(&g, max_cond.unwrap_or(g.n()))?;
                    let lines: Vec<String> = stmts.iter().map(|s| s.to_text(&g)).collect();
                    let text = lines.iter().map(|l| format!("{l}\n")).collect();
                    Outcome::report("dsep", &json!({"statements": lines}), text)
                }
            }
        }
        Command::Treksep { graph, rows, cols } => {
            let g = load_graph(graph)?;
            let (a, c) = (nodes(&g, rows)?, nodes(&g, cols)?);
            let cert = trek_separation_rank(&g, &a, &c)?;
            let pair = |v: &[(usize, usize)]| -> Vec<String> {
                v.iter().map(|&(x, y)| format!("{}<->{}", g.label(x), g.label(y))).collect()
            };
            let full = cert.rank == a.len().min(c.len());
            let result = json!({
                "rows": g.label_set(&a),
                "cols": g.label_set(&c),
                "rank": cert.rank,
                "full_rank": full,
                "s_a": g.label_set(&cert.s_a),
                "s_c": g.label_set(&cert.s_c),
                "cut_edges_left": pair(&cert.cut_edges_left),
                "cut_edges_right": pair(&cert.cut_edges_right),
            });
            let mut text = format!(
                "rank {}\ncut ({},{})\n",
                cert.rank,
                braces(&g.label_set(&cert.s_a)),
                braces(&g.label_set(&cert.s_c))
            )
            .replace("{}", "∅");
            if !cert.cut_edges_left.is_empty() || !cert.cut_edges_right.is_empty() {
                let mut edges = pair(&cert.cut_edges_left);
                edges.extend(pair(&cert.cut_edges_right));
                writeln!(text, "bidirected edges in the cut: {}", edges.join(" "))?;
            }
            Ok(Outcome::report("treksep", &result, text)?.negative(full))
        }
        Command::Decompose { graph } => {
            let g = load_graph(graph)?;
            let r = decomposition_report(&g, &mixed_components(&g));
            let mut text = String::new();
            for c in &r.components {
                writeln!(text, "component {} on {}", braces(&c.block), braces(&c.vertex_set))?;
                for line in c.graph.lines().filter(|l| !l.starts_with("nodes:")) {
                    writeln!(text, "  {line}")?;
                }
            }
            writeln!(text, "edge partition ok: {}", r.edge_partition_ok)?;
            Outcome::report("decompose", &r, text)
        }
        Command::Identify { graph, degree } => {
            let g = load_graph(graph)?;
            let r = if *degree { identify_with_degree(&g, cfg)? } else { identify(&g, cfg) };
            let negative = !matches!(r.status, Status::GloballyIdentifiable | Status::GenericallyIdentifiable);
            Ok(Outcome::report("identify", &r, identify_text(&r))?.negative(negative))
        }
        Command::Recover { graph, sigma } => {
            let g = load_graph(graph)?;
            let text = fs::read_to_string(sigma).with_context(|| format!("reading {}", sigma.display()))?;
            let (m, labels) = parse_matrix(&text).with_context(|| format!("parsing {}", sigma.display()))?;
            let m = align(&g, m, labels)?;
            let analysis = htc_identifiable(&g, cfg.necessary_guard);
            let Some(cert) = analysis.certificate else {
                bail!("the half-trek criterion does not certify this graph; no recovery order available");
            };
            let r = recover_params(&g, &m, &cert)?;
            let labels = g.labels().to_vec();
            let ordering: Vec<&str> = cert.ordering.iter().map(|&v| g.label(v)).collect();
            let result = json!({
                "ordering": ordering,
                "lambda": matrix_to_json(&r.lambda, Some(&labels)),
                "omega": matrix_to_json(&r.omega, Some(&labels)),
                "residual": r.residual,
            });
            let mut text = String::new();
            for (t, h) in g.directed_edges() {
                writeln!(text, "l{}_{} = {:.12}", g.label(t), g.label(h), r.lambda[(t, h)])?;
            }
            for i in 0..g.n() {
                writeln!(text, "w{0}_{0} = {1:.12}", g.label(i), r.omega[(i, i)])?;
            }
            for (a, b) in g.bidirected_edges() {
                writeln!(text, "w{}_{} = {:.12}", g.label(a), g.label(b), r.omega[(a, b)])?;
            }
            writeln!(text, "residual = {:e}", r.residual)?;
            Outcome::report("recover", &result, text)
        }
        Command::Degree { graph, trials, starts } => {
            let g = load_graph(graph)?;
            let d = fiber_degree_estimate(
                &g,
                trials.unwrap_or(cfg.degree_trials),
                starts.unwrap_or(cfg.degree_starts),
                cfg.seed,
                cfg.sample_scale,
                &cfg.newton,
            )?;
            let dist: Vec<String> = d.distribution.iter().map(|(k, n)| format!("{k}:{n}")).collect();
            let text = format!(
                "modal count {}\ndistribution {}\ntrials {}, starts {}\n{}\n",
                d.modal,
                dist.join(" "),
                d.trials,
                d.starts,
                d.note
            );
            Ok(Outcome::report("degree", &d, text)?.negative(d.modal != 1))
        }
        Command::Constraints { graph, max_cond, max_minor_size, max_depth, no_verma } => {
            let g = load_graph(graph)?;
            let opts = DiscoveryOptions {
                max_cond: max_cond.unwrap_or(usize::MAX),
                max_minor_size: *max_minor_size,
                max_depth: *max_depth,
                verma: !no_verma,
            };
            let cs = discover_constraints(&g, &opts, cfg)?;
            let reports: Vec<_> = cs.iter().map(|c| c.report(&g)).collect();
            let uncertified = reports.iter().any(|r| !r.certification.as_ref().is_some_and(|c| c.certified));
            let mut text = String::new();
            for r in &reports {
                let ok = r.certification.as_ref().is_some_and(|c| c.certified);
                writeln!(text, "[{}] {}", if ok { "certified" } else { "uncertified" }, r.provenance)?;
                writeln!(text, "  {}", r.polynomial)?;
            }
            writeln!(text, "{} constraints", reports.len())?;
            let result = json!({"options": opts, "constraints": reports});
            Ok(Outcome::report("constraints", &result, text)?.negative(uncertified))
        }
        Command::EmitCas { graph, task, dialect, out } => {
            let g = load_graph(graph)?;
            let task = match task {
                TaskArg::Identifiability => CasTask::Identifiability,
                TaskArg::VanishingIdeal => CasTask::VanishingIdeal,
            };
            let dialect = match dialect {
                DialectArg::A => Dialect::A,
                DialectArg::B => Dialect::B,
            };
            let script = emit_cas_script(&g, task, dialect);
            let text = match out {
                Some(p) => {
                    fs::write(p, &script.text).with_context(|| format!("writing {}", p.display()))?;
                    format!("wrote {}\n", p.display())
                }
                None => script.text.clone(),
            };
            let mut o = Outcome::report("emit-cas", &script, text)?;
            o.raw = out.is_none();
            Ok(o)
        }
        Command::ExportDot { graph } => {
            let g = load_graph(graph)?;
            let dot = g.to_dot();
            let mut o = Outcome::report("export-dot", &json!({"dot": dot}), dot.clone())?;
            o.raw = true;
            Ok(o)
        }
    }
}

/// Reorders a labelled matrix into graph order.
fn align(g: &MixedGraph, m: FloatMatrix, labels: Option<Vec<String>>) -> Result<FloatMatrix> {
    let n = g.n();
    if m.nrows() != n || m.ncols() != n {
        bail!("covariance matrix is {}x{}, graph has {n} nodes", m.nrows(), m.ncols());
    }
    let Some(labels) = labels else { return Ok(m) };
    let pos: Vec<usize> = labels.iter().map(|l| g.index_of(l)).collect::<linsem_core::Result<_>>()?;
    let mut out = FloatMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(pos[a], pos[b])] = m[(a, b)];
        }
    }
    Ok(out)
}

fn identify_text(r: &IdentifiabilityReport) -> String {
    let mut s = String::new();
    let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let _ = writeln!(s, "status: {status}");
    let g = &r.global;
    if g.injective {
        let _ = writeln!(s, "global: injective");
    } else {
        let reason = g.reason.map(|x| format!("{x:?}")).unwrap_or_default();
        let w = g.witness.as_ref().map(|w| braces(w)).unwrap_or_default();
        let _ = writeln!(s, "global: not injective ({reason} {w})");
    }
    let h = &r.htc;
    let _ = writeln!(
        s,
        "htc: sufficient {}, necessary {}, solved {}",
        h.sufficient,
        h.necessary,
        braces(&h.solved)
    );
    if let Some(o) = &h.ordering {
        let _ = writeln!(s, "  ordering {}", o.join(" < "));
    }
    for y in &h.y_sets {
        let _ = writeln!(s, "  Y({}) = {}", y.node, braces(&y.y));
    }
    for c in &r.components {
        let _ = writeln!(
            s,
            "component {} on {}: injective {}, htc sufficient {}",
            braces(&c.block),
            braces(&c.vertex_set),
            c.global.injective,
            c.htc.sufficient
        );
    }
    if r.ancestral_sets_checked > 0 {
        let _ = writeln!(s, "ancestral sets checked: {}", r.ancestral_sets_checked);
    }
    for e in &r.edges {
        let via = e.via.map(|v| format!(" ({v:?})").to_lowercase()).unwrap_or_default();
        let state = if e.identified { "identified" } else { "not certified" };
        let _ = writeln!(s, "{} -> {}: {state}{via}", e.tail, e.head);
    }
    if let Some(d) = &r.degree {
        let _ = writeln!(s, "real fiber points: modal {} over {} trials", d.modal, d.trials);
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(negative) if negative && cli.global.fail_on_negative => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = load_config(&cli.global)?;
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring threads")?;
    }
    let out = run(cli, &cfg)?;
    if cli.global.json {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": out.command,
            "config": cfg,
            "negative": out.negative,
            "result": out.result,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else if out.raw {
        print!("{}", out.text);
    } else {
        println!("# linsem {} seed={} config={}", out.command, cfg.seed, serde_json::to_string(&cfg)?);
        print!("{}", out.text);
    }
    Ok(out.negative)
}
