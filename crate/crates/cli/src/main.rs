//! `mmphf-lab`: batch runner for the conflict-graph, distribution,
//! window-tree and MMPHF experiments.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mmphf_lab::Caps;
use output::{Format, Metadata};

#[derive(Parser, Debug)]
#[command(name = "mmphf-lab", version, about = "Exact experiments on conflict graphs, hard distributions and MMPHF sizes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = Caps::default().max_vertices)]
    max_vertices: u64,

    #[arg(long, global = true, default_value_t = Caps::default().max_label_functions)]
    max_label_functions: u64,

    #[arg(long, global = true, default_value_t = Caps::default().max_outcomes)]
    max_outcomes: u64,
}

impl Common {
    fn caps(&self) -> Caps {
        Caps {
            max_vertices: self.max_vertices,
            max_label_functions: self.max_label_functions,
            max_outcomes: self.max_outcomes,
            ..Caps::default()
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Build a graph and list its vertices and edges.
    #[command(after_help = "CSV columns: a,b (one edge per row, 1-based vertex ids in canonical order)")]
    Graph(GraphCmd),
    /// Exact chromatic number with a coloring and an optimality certificate.
    #[command(after_help = "CSV columns: vertex,label,color")]
    Chi(GraphArgs),
    /// Exact fractional chromatic number with primal and dual certificates.
    #[command(after_help = "CSV columns: kind,members,weight (kind is primal or dual; members 1-based, space separated)")]
    Chif(GraphArgs),
    /// Draw traces from the hard distribution and check each one.
    #[command(after_help = "CSV columns: trial,seed,ok,violations,z,s,x_bits (lists space separated)")]
    Sample(SampleCmd),
    /// Exact law of the sampled tuple at small parameters.
    #[command(after_help = "CSV columns: tuple,p (tuple space separated, p as p/q)")]
    Enumerate(SamplerArgs),
    /// Best label function by brute force, against the best independent-set mass.
    #[command(after_help = "CSV columns: max,functions_checked,max_independent_mass,chi_f,argmax")]
    Adversary(AdversaryCmd),
    /// Prune a window tree for one label and report per-level statistics.
    #[command(after_help = "CSV columns: level,total,directly_pruned,indirectly_pruned,p")]
    Prune(PruneCmd),
    /// Randomized checks of the pruning density bound.
    #[command(
        after_help = "CSV columns: instance,arity,depth,leaf_len,tau,delta,survival_product,kept_leaf_fraction,root_density,hypothesis,holds"
    )]
    Case1Sweep(SweepCmd),
    /// Build indexes and check member queries, or check coloring extraction on a conflict graph.
    #[command(after_help = "CSV columns: scheme,n,u,payload_bits,total_bits,members_ok,proper,monochromatic_edges,distinct")]
    MmphfVerify(VerifyCmd),
    /// Exact chi, chi_f and payload statistics for every scheme on a conflict graph.
    #[command(after_help = "CSV columns: scheme,chi,chi_f,lower_bound_bits,max_bits,mean_bits,distinct,proper,monochromatic_edges")]
    BoundReport(GraphArgs),
    /// Encode every bit string up to a length as a key set and decode it through each scheme.
    #[command(after_help = "CSV columns: d,scheme,strings,round_trips,distinct_payloads,max_bits")]
    SxRoundtrip(RoundTripCmd),
    /// Universe parameters for given n and u.
    #[command(
        after_help = "CSV columns: n,u,m,k,exponent,u_prime,u_prime_le_u,m_le_sqrt_n,below_upper_range,above_lower_range_approx"
    )]
    Parameterize(ParamCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GraphKind {
    Conflict,
    Shift,
    Complete,
    Cycle,
    Edgeless,
    Dimacs,
}

#[derive(Args, Debug, Serialize)]
struct GraphArgs {
    #[arg(long, value_enum, default_value_t = GraphKind::Conflict)]
    graph: GraphKind,
    /// Tuple length of a conflict graph.
    #[arg(long)]
    m: Option<usize>,
    /// Universe width of a conflict graph.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    big_m: Option<u64>,
    /// Universe offset of a conflict graph.
    #[arg(long)]
    offset: Option<String>,
    /// Tuple length of a shift graph, or the order of complete, cycle and edgeless graphs.
    #[arg(long)]
    n: Option<usize>,
    /// Universe of a shift graph.
    #[arg(long)]
    u: Option<u64>,
    /// DIMACS file for `--graph dimacs`.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Export {
    Dimacs,
}

#[derive(Args, Debug, Serialize)]
struct GraphCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Emit the edge list in DIMACS format instead of JSON or CSV.
    #[arg(long, value_enum)]
    export: Option<Export>,
}

#[derive(Args, Debug, Serialize)]
struct SamplerArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: Option<u64>,
    /// Initial exponent S0, in decimal.
    #[arg(long)]
    s0: Option<String>,
    /// Use k = m^m and S0 = k^(m+1).
    #[arg(long)]
    paper_defaults: bool,
}

#[derive(Args, Debug, Serialize)]
struct SampleCmd {
    #[command(flatten)]
    params: SamplerArgs,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Include the full decimal values of every X_i and Y_i.
    #[arg(long)]
    values: bool,
}

#[derive(Args, Debug, Serialize)]
struct AdversaryCmd {
    /// Distribution file: one `x1,...,xm,p/q` line per outcome.
    #[arg(long, conflicts_with_all = ["m", "k", "s0", "paper_defaults"])]
    dist: Option<PathBuf>,
    /// Universe for `--dist`; defaults to the largest element present.
    #[arg(long, requires = "dist")]
    universe: Option<u64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s0: Option<String>,
    #[arg(long)]
    paper_defaults: bool,
}

#[derive(Args, Debug, Serialize)]
struct TreeArgs {
    #[arg(long)]
    arity: u64,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    start: u64,
    /// Root window length; must be arity^depth times the leaf length.
    #[arg(long)]
    len: u64,
}

#[derive(Args, Debug, Serialize)]
struct PruneCmd {
    #[command(flatten)]
    tree: TreeArgs,
    /// Threshold as p/q in (0, 1).
    #[arg(long)]
    tau: String,
    /// The label whose density is measured.
    #[arg(long, default_value_t = 1)]
    index: usize,
    /// Comma-separated labels for the root window, left to right.
    #[arg(long, conflicts_with = "bias")]
    labels: Option<String>,
    /// Probability (p/q) that a random label equals `--index`; the other label is index+1.
    #[arg(long)]
    bias: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct SweepCmd {
    #[arg(long, default_value_t = 1000)]
    instances: u64,
}

#[derive(Args, Debug, Serialize)]
struct VerifyCmd {
    /// Key file: a `u=<u>` line, then one key per line.
    #[arg(long, conflicts_with_all = ["graph", "m", "big_m"])]
    keys: Option<PathBuf>,
    #[arg(long, value_enum)]
    graph: Option<GraphKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    big_m: Option<u64>,
    #[arg(long)]
    offset: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct RoundTripCmd {
    /// Longest bit string length.
    #[arg(long, default_value_t = 10)]
    d: usize,
}

#[derive(Args, Debug, Serialize)]
struct ParamCmd {
    #[arg(long)]
    n: u64,
    /// Universe size: a decimal integer or a tower such as `2^2^64`.
    #[arg(long)]
    u: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), String> {
    let caps = cli.common.caps();
    caps.validate().map_err(|e| e.to_string())?;
    let meta = Metadata {
        seed: cli.common.seed,
        config: serde_json::json!({
            "command": cli.command,
            "format": cli.common.format,
            "caps": caps,
        }),
    };
    let seed = cli.common.seed;
    let artifact = match &cli.command {
        Command::Graph(c) => {
            if c.export == Some(Export::Dimacs) {
                let text = commands::dimacs(&c.graph, &caps, &meta)?;
                return output::emit(&text, cli.common.output.as_deref());
            }
            commands::graph(&c.graph, &caps)
        }
        Command::Chi(g) => commands::chi(g, &caps),
        Command::Chif(g) => commands::chif(g, &caps),
        Command::Sample(c) => commands::sample(c, seed),
        Command::Enumerate(p) => commands::enumerate(p, &caps),
        Command::Adversary(c) => commands::adversary(c, &caps),
        Command::Prune(c) => commands::prune(c, seed, &caps),
        Command::Case1Sweep(c) => commands::case1_sweep(c, seed, &caps),
        Command::MmphfVerify(c) => commands::mmphf_verify(c, seed, &caps),
        Command::BoundReport(g) => commands::bound_report(g, seed, &caps),
        Command::SxRoundtrip(c) => commands::sx_roundtrip(c, seed),
        Command::Parameterize(c) => commands::parameterize(c),
    }?;
    let text = output::render(&artifact, &meta, cli.common.format)?;
    output::emit(&text, cli.common.output.as_deref())
}
