//! The `tcycle` command line.
//!
//! Exit codes: 0 free or verified, 10 cycle found, 20 verification failure,
//! 1 usage or input error, 2 budget refusal.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tcycle_core::adversarial::{generate_c4free_bipartite, generate_g6, generate_gk, verify_unique_cycle, GkInstance};
use tcycle_core::analysis::ReducedPalette;
use tcycle_core::coloring::{AbortMode, ThresholdTable};
use tcycle_core::detectors::{
    decide_c10_c12_freeness, decide_c12_c14_freeness, decide_c2k_freeness, decide_family_freeness,
    incremental_thresholds, ColoringMode, Family, LoopOrder, RunConfig, Verdict,
};
use tcycle_core::generators::{plant_cycle, random_gnp, random_regular, random_tree, Attachment, PlantSpec};
use tcycle_core::oracle::{self, OracleLimits};
use tcycle_core::sim::CostModel;
use tcycle_core::Graph;

use crate::experiment::{self, csv_string};
use crate::io::{self, Labels, TableFile, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CYCLE_FOUND: i32 = 10;
pub const EXIT_VERIFY_FAILED: i32 = 20;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

/// Default output directory for files without an absolute path.
pub const OUT_DIR_ENV: &str = "TCYCLE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "tcycle", version, about = "Threshold-based cycle detection on a simulated CONGEST network")]
pub struct Cli {
    /// JSON object whose keys replace the subcommand's flags (keys are the
    /// long flag names).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write an instance in the graph format plus a JSON label sidecar.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Run a detector and print its verdict as JSON.
    #[command(subcommand)]
    Detect(DetectCmd),
    /// Brute-force cycle counts.
    Oracle(OracleArgs),
    /// Check an instance against its claimed structure.
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Bad neighbor sets around a well-colored 14-cycle.
    BadSets(BadSetArgs),
    /// Identifier congestion at the probe node of an adversarial instance.
    Congestion(CongestionArgs),
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenerateCmd {
    /// `G_k` for `k >= 7`.
    Gk {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        size: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// The `k = 6` instance over the incidence graph of order `d`.
    G6 {
        #[arg(long)]
        d: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// The `d`-regular C4-free bipartite incidence graph, `d` prime.
    C4freeBipartite {
        #[arg(long)]
        d: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// A cycle `u_j = j` of length `L` inside a random host.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        #[serde(rename = "L")]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra leaves on `u_position`, making it heavy.
        #[arg(long, default_value_t = 0)]
        pendants: usize,
        #[arg(long, default_value_t = 0)]
        position: usize,
        #[arg(long, default_value_t = 0)]
        extra_edges: usize,
        /// Skip the oracle check that the planted cycle is the only one of
        /// its length and that no shorter even cycle exists.
        #[arg(long)]
        no_clean: bool,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Random benign graphs.
    Random {
        #[arg(long, value_enum, default_value_t = RandomModel::Gnp)]
        model: RandomModel,
        #[arg(long)]
        n: usize,
        /// Edge probability for `gnp`.
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Degree for `regular`.
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomModel {
    Gnp,
    Regular,
    Tree,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopArg {
    #[default]
    ColorsOuter,
    SourcesOuter,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortArg {
    #[default]
    Full,
    Truncate,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostArg {
    UnitStep,
    #[default]
    SerializedCongestion,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantArg {
    #[value(name = "4l")]
    #[serde(rename = "4l")]
    FourL,
    #[value(name = "4l+2")]
    #[serde(rename = "4l+2")]
    FourLPlusTwo,
}

/// Input graph and [`RunConfig`] flags shared by every detector.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Label sidecar; needed by `--force-witness-coloring`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplies both default repetition counts.
    #[arg(long, default_value_t = 1)]
    pub trials_scale: u64,
    /// Ceiling on the default color repetitions.
    #[arg(long, default_value_t = 100_000)]
    pub color_cap: u64,
    #[arg(long)]
    pub source_reps: Option<u64>,
    #[arg(long)]
    pub color_reps: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub loop_order: LoopArg,
    #[arg(long, value_enum, default_value_t)]
    pub abort_mode: AbortArg,
    #[arg(long, value_enum, default_value_t)]
    pub cost_model: CostArg,
    /// Refuse (exit 2) runs needing more phases than this.
    #[arg(long)]
    pub phase_budget: Option<u64>,
    /// Color the labeled cycle `u_j <- j` and the labeled sources -1.
    /// Not the algorithm: the output is marked non-algorithmic.
    #[arg(long)]
    pub force_witness_coloring: bool,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "detector", rename_all = "kebab-case")]
pub enum DetectCmd {
    /// `C_{2k}`-freeness; the default table is the incremental one.
    C2k {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// {C12, C14}-freeness.
    C12c14 {
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// {C10, C12}-freeness from a `k = 5` table.
    C10c12 {
        /// Defaults to a placeholder table (marked external in the output).
        #[arg(long)]
        t5: Option<PathBuf>,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// {C_{4l}} or {C_{4l+2}} for `l <= kmax`.
    Family {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        kmax: usize,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
}

impl DetectCmd {
    fn run_args(&self) -> &RunArgs {
        match self {
            DetectCmd::C2k { run, .. }
            | DetectCmd::C12c14 { run }
            | DetectCmd::C10c12 { run, .. }
            | DetectCmd::Family { run, .. } => run,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OracleArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Count cycles of this length (otherwise: the spectrum only).
    #[arg(long = "len")]
    pub len: Option<usize>,
    /// Only cycles through this node.
    #[arg(long)]
    pub through: Option<usize>,
    /// List the cycles of length `--len`.
    #[arg(long)]
    pub list: bool,
    /// Spectrum lengths `3..=max-len`.
    #[arg(long, default_value_t = 16)]
    pub max_len: usize,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_steps: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum VerifyCmd {
    /// Unique `2k`-cycle, heavy `u_0`, and the weighted spectrum.
    Gk {
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Defaults to the input's `.json` sidecar.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Compare spectra up to this length (default `min(16, 2k + 2)`).
        #[arg(long)]
        spectrum_len: Option<usize>,
        #[arg(long, default_value_t = 100_000_000)]
        max_steps: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Bipartite, regular and C4-free.
    Bipartite {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100_000_000)]
        max_steps: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentCmd {
    /// Detection rate of the heavy phase of `s in S` against a common cap.
    Sweep(SweepArgs),
    /// Replay an experiment spec file.
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Write the spec of an experiment without running it.
    Spec {
        #[arg(long)]
        spec: PathBuf,
        #[command(subcommand)]
        experiment: Box<SpecCmd>,
    },
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecCmd {
    #[command(subcommand)]
    Detect(DetectCmd),
    SweepThreshold(SweepArgs),
    Congestion(CongestionArgs),
    #[command(subcommand)]
    VerifyInstance(VerifyCmd),
    BadSets(BadSetArgs),
}

/// A fully serialized experiment: replaying it reproduces its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub experiment: SpecCmd,
}

/// An adversarial instance: generated from `--k/--N` or `--d`, or read
/// from `-i` with its label sidecar.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GkSource {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub size: Option<usize>,
    /// `k = 6` instance of order `d`.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(short = 'i', long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PaletteArgs {
    /// Reduced palette size for the probe paths.
    #[arg(long)]
    pub reduced_palette: Option<usize>,
    /// Number of randomized nodes per probe path in reduced mode.
    #[arg(long, default_value_t = 2)]
    pub reduced_len: usize,
}

impl PaletteArgs {
    fn get(&self) -> Option<ReducedPalette> {
        self.reduced_palette.map(|palette| ReducedPalette { palette, randomized: self.reduced_len })
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: GkSource,
    /// `a..b`, `a..=b` or a comma list; `inf` is unbounded.
    #[arg(long, default_value = "1..=20")]
    pub thresholds: String,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub palette: PaletteArgs,
    /// Stop once this many trials have run; remaining caps are skipped and
    /// the report is marked incomplete (exit 2).
    #[arg(long)]
    pub trial_budget: Option<u64>,
    /// Worker threads (0 = all cores); output order does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Per-threshold CSV; per-trial rows go to `<stem>.trials.csv` and the
    /// summary to `<stem>.json`.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CongestionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: GkSource,
    #[arg(long, default_value_t = 0)]
    pub threshold: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub palette: PaletteArgs,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Per-trial CSV; the summary goes to `<stem>.json`.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BadSetArgs {
    /// Graph with a labeled 14-cycle; otherwise random fan instances.
    #[arg(short = 'i', long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Random instances, or colorings of `-i`.
    #[arg(long, default_value_t = 100)]
    pub instances: u64,
    #[arg(long, default_value_t = 6)]
    pub max_arms: usize,
    #[arg(long, default_value_t = 12)]
    pub max_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_steps: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Per-instance CSV; the summary goes to `<stem>.json`.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

/// Parses and runs a command line, returning the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    let budget = e
        .chain()
        .any(|c| matches!(c.downcast_ref::<tcycle_core::Error>(), Some(tcycle_core::Error::BudgetExceeded { .. })));
    if budget {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let overrides = match &cli.config {
        Some(p) => Some(io::read_json::<Value>(p)?),
        None => None,
    };
    let ov = Overlay(overrides.as_ref());
    match &cli.command {
        Command::Generate(c) => generate(&ov.apply(c)?),
        Command::Detect(c) => detect(&ov.apply(c)?),
        Command::Oracle(a) => oracle_cmd(&ov.apply(a)?),
        Command::Verify(c) => verify(&ov.apply(c)?),
        Command::Experiment(ExperimentCmd::Sweep(a)) => sweep(&ov.apply(a)?),
        Command::Experiment(ExperimentCmd::Run { spec }) => {
            let spec: ExperimentSpec = io::read_json(spec)?;
            if spec.schema_version != SCHEMA_VERSION {
                bail!("spec schema_version {} is not {SCHEMA_VERSION}", spec.schema_version);
            }
            run_spec(&spec.experiment)
        }
        Command::Experiment(ExperimentCmd::Spec { spec, experiment }) => {
            let body = ExperimentSpec { schema_version: SCHEMA_VERSION, experiment: ov.apply(experiment.as_ref())? };
            io::write_json(&resolve(spec), &body)?;
            Ok(EXIT_OK)
        }
        Command::BadSets(a) => bad_sets(&ov.apply(a)?),
        Command::Congestion(a) => congestion(&ov.apply(a)?),
    }
}

fn run_spec(cmd: &SpecCmd) -> Result<i32> {
    match cmd {
        SpecCmd::Detect(c) => detect(c),
        SpecCmd::SweepThreshold(a) => sweep(a),
        SpecCmd::Congestion(a) => congestion(a),
        SpecCmd::VerifyInstance(c) => verify(c),
        SpecCmd::BadSets(a) => bad_sets(a),
    }
}

/// Keys of the `--config` object replace same-named fields of the parsed
/// arguments.
struct Overlay<'a>(Option<&'a Value>);

impl Overlay<'_> {
    fn apply<T: Serialize + serde::de::DeserializeOwned>(&self, args: &T) -> Result<T> {
        let Some(over) = self.0 else {
            return Ok(serde_json::from_value(serde_json::to_value(args)?)?);
        };
        let over = over.as_object().ok_or_else(|| anyhow!("--config must hold a JSON object"))?;
        let mut value = serde_json::to_value(args)?;
        let fields = value.as_object_mut().ok_or_else(|| anyhow!("subcommand takes no config"))?;
        for (key, v) in over {
            if !fields.contains_key(key) {
                bail!("--config key {key:?} is not an option of this subcommand");
            }
            fields.insert(key.clone(), v.clone());
        }
        serde_json::from_value(value).context("applying --config")
    }
}

/// Relative paths land in `$TCYCLE_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn output_or_default(output: &Option<PathBuf>, default: &str) -> Result<PathBuf> {
    match output {
        Some(p) => Ok(resolve(p)),
        None if std::env::var_os(OUT_DIR_ENV).is_some() => Ok(resolve(Path::new(default))),
        None => bail!("no output path: pass -o or set {OUT_DIR_ENV}"),
    }
}

/// Prints `value` and writes it to `output` if given.
fn emit(value: &Value, output: &Option<PathBuf>) -> Result<()> {
    let text = io::to_json(value)?;
    if let Some(p) = output {
        io::write_text(&resolve(p), &text)?;
    }
    print!("{text}");
    Ok(())
}

fn generate(cmd: &GenerateCmd) -> Result<i32> {
    let (graph, labels, name, output) = match cmd {
        GenerateCmd::Gk { k, size, output } => {
            let inst = generate_gk(*k, *size)?;
            let labels = Labels::of_instance("gk", &inst);
            (inst.graph, labels, format!("gk_k{k}_N{size}"), output)
        }
        GenerateCmd::G6 { d, output } => {
            let inst = generate_g6(*d)?;
            let labels = Labels::of_instance("g6", &inst).param("d", *d);
            (inst.graph, labels, format!("g6_d{d}"), output)
        }
        GenerateCmd::C4freeBipartite { d, output } => {
            let g = generate_c4free_bipartite(*d)?;
            let labels = Labels::new("c4free-bipartite", &g).param("d", *d).param("part", d * d);
            (g, labels, format!("c4free_d{d}"), output)
        }
        GenerateCmd::Planted { n, len, seed, pendants, position, extra_edges, no_clean, output } => {
            let attach = (*pendants > 0).then_some(Attachment { position: *position, pendants: *pendants });
            let spec = PlantSpec { n: *n, len: *len, attach, extra_edges: *extra_edges, clean: !no_clean, seed: *seed };
            let (g, cycle) = plant_cycle(&spec)?;
            let mut labels = Labels::new("planted", &g)
                .param("n", *n)
                .param("L", *len)
                .param("seed", *seed)
                .param("pendants", *pendants)
                .param("position", *position)
                .param("extra_edges", *extra_edges)
                .param("clean", !no_clean);
            labels.cycle = Some(cycle.nodes().to_vec());
            (g, labels, format!("planted_n{n}_L{len}_s{seed}"), output)
        }
        GenerateCmd::Random { model, n, p, d, seed, output } => {
            let (g, name) = match model {
                RandomModel::Gnp => (random_gnp(*n, *p, *seed)?, format!("gnp_n{n}_s{seed}")),
                RandomModel::Regular => (random_regular(*n, *d, *seed)?, format!("regular_n{n}_d{d}_s{seed}")),
                RandomModel::Tree => (random_tree(*n, *seed), format!("tree_n{n}_s{seed}")),
            };
            let mut labels = Labels::new("random", &g).param("n", *n).param("seed", *seed);
            labels = match model {
                RandomModel::Gnp => labels.param("model", "gnp").param("p", *p),
                RandomModel::Regular => labels.param("model", "regular").param("d", *d),
                RandomModel::Tree => labels.param("model", "tree"),
            };
            (g, labels, name, output)
        }
    };
    let path = match output {
        Some(p) => resolve(p),
        None => resolve(Path::new(&format!("{name}.txt"))),
    };
    let comment = format!("{} {}", labels.family, serde_json::to_string(&labels.params)?);
    io::write_text(&path, &io::format_graph(&graph, &[comment]))?;
    let sidecar = io::sidecar_path(&path);
    io::write_json(&sidecar, &labels)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "graph": path,
        "labels": sidecar,
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
    });
    print!("{}", io::to_json(&summary)?);
    Ok(EXIT_OK)
}

fn load_labels(input: &Path, labels: &Option<PathBuf>, g: &Graph) -> Result<Labels> {
    let path = labels.clone().unwrap_or_else(|| io::sidecar_path(input));
    let l: Labels = io::read_json(&path)?;
    l.check(g)?;
    Ok(l)
}

fn run_config(run: &RunArgs, g: &Graph) -> Result<RunConfig> {
    let coloring = if run.force_witness_coloring {
        let Some(labels) = &run.labels else { bail!("--force-witness-coloring needs --labels") };
        let l: Labels = io::read_json(labels)?;
        l.check(g)?;
        let cycle = l.cycle.clone().ok_or_else(|| anyhow!("labels carry no cycle to force"))?;
        ColoringMode::Forced { cycle, sources: l.sources.clone() }
    } else {
        ColoringMode::Random
    };
    Ok(RunConfig {
        seed: run.seed,
        source_scale: run.trials_scale,
        color_scale: run.trials_scale,
        color_cap: run.color_cap,
        source_repetitions: run.source_reps,
        color_repetitions: run.color_reps,
        loop_order: match run.loop_order {
            LoopArg::ColorsOuter => LoopOrder::ColorsOuter,
            LoopArg::SourcesOuter => LoopOrder::SourcesOuter,
        },
        abort_mode: match run.abort_mode {
            AbortArg::Full => AbortMode::Full,
            AbortArg::Truncate => AbortMode::Truncate,
        },
        cost_model: match run.cost_model {
            CostArg::UnitStep => CostModel::UnitStep,
            CostArg::SerializedCongestion => CostModel::SerializedCongestion,
        },
        coloring,
        phase_budget: run.phase_budget,
    })
}

/// Default `C_{2k}` table: the incremental one for the family containing `2k`.
pub fn default_c2k_table(k: usize) -> Result<ThresholdTable> {
    if k < 2 {
        bail!("k must be at least 2");
    }
    let t = if k.is_multiple_of(2) {
        incremental_thresholds(k / 2, Family::FourL)
    } else {
        incremental_thresholds(k / 2, Family::FourLPlusTwo)
    };
    Ok(t?)
}

fn detect(cmd: &DetectCmd) -> Result<i32> {
    let run = cmd.run_args();
    let g = io::read_graph(&run.input)?;
    let cfg = run_config(run, &g)?;
    let (name, tables, verdict): (String, Vec<ThresholdTable>, Verdict) = match cmd {
        DetectCmd::C2k { k, table, .. } => {
            let t = match table {
                Some(p) => io::read_table(p)?,
                None => default_c2k_table(*k)?,
            };
            let v = decide_c2k_freeness(&g, *k, &t, &cfg)?;
            (format!("c2k:{}", 2 * k), vec![t], v)
        }
        DetectCmd::C12c14 { .. } => {
            let v = decide_c12_c14_freeness(&g, &cfg)?;
            ("c12c14".into(), vec![ThresholdTable::c14_stage(), ThresholdTable::c12_stage_unit()], v)
        }
        DetectCmd::C10c12 { t5, .. } => {
            let t = match t5 {
                Some(p) => io::read_table(p)?,
                None => ThresholdTable::external_default(5)?,
            };
            let v = decide_c10_c12_freeness(&g, &cfg, &t)?;
            let t6 = ThresholdTable::c12_stage_from_c10(&t)?;
            ("c10c12".into(), vec![t, t6], v)
        }
        DetectCmd::Family { variant, kmax, .. } => {
            let family = match variant {
                VariantArg::FourL => Family::FourL,
                VariantArg::FourLPlusTwo => Family::FourLPlusTwo,
            };
            let v = decide_family_freeness(&g, family, *kmax, &cfg)?;
            let tables =
                (1..=*kmax).map(|l| incremental_thresholds(l, family)).collect::<tcycle_core::error::Result<_>>()?;
            let tag = if family == Family::FourL { "4l" } else { "4l+2" };
            (format!("family:{tag}"), tables, v)
        }
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "detector": name,
        "graph": { "path": run.input, "nodes": g.node_count(), "edges": g.edge_count() },
        "non_algorithmic": run.force_witness_coloring,
        "coloring": if run.force_witness_coloring { "forced-witness" } else { "random" },
        "config": cfg,
        "tables": tables.iter().map(TableFile::from_table).collect::<Vec<_>>(),
        "outcome": verdict.outcome,
        "witness": verdict.witness,
        "witness_length": verdict.witness.as_ref().map(|w| w.len()),
        "finding": verdict.finding,
        "aborts": verdict.stats.aborts,
        "simulated_rounds": verdict.stats.simulated_rounds,
        "stats": verdict.stats,
    });
    emit(&report, &run.output)?;
    Ok(if verdict.is_free() { EXIT_OK } else { EXIT_CYCLE_FOUND })
}

fn oracle_cmd(a: &OracleArgs) -> Result<i32> {
    let g = io::read_graph(&a.input)?;
    let limits = OracleLimits { max_len: a.max_len.max(a.len.unwrap_or(0)), max_steps: a.max_steps };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
    });
    let found = if let Some(len) = a.len {
        let cycles = oracle::enumerate_cycles(&g, len, &limits)?;
        let cycles: Vec<_> = match a.through {
            Some(v) => cycles.into_iter().filter(|c| c.contains(v)).collect(),
            None => cycles,
        };
        report["len"] = json!(len);
        report["through"] = json!(a.through);
        report["count"] = json!(cycles.len());
        if a.list {
            report["cycles"] = json!(cycles);
        }
        !cycles.is_empty()
    } else {
        let spectrum: BTreeMap<usize, usize> = oracle::cycle_length_spectrum(&g, a.max_len, &limits)?;
        let any = spectrum.values().any(|&c| c > 0);
        report["max_len"] = json!(a.max_len);
        report["spectrum"] = json!(spectrum);
        any
    };
    emit(&report, &a.output)?;
    Ok(if found { EXIT_CYCLE_FOUND } else { EXIT_OK })
}

fn verify(cmd: &VerifyCmd) -> Result<i32> {
    match cmd {
        VerifyCmd::Gk { input, labels, spectrum_len, max_steps, output } => {
            let g = io::read_graph(input)?;
            let l = load_labels(input, labels, &g)?;
            let inst = l.to_instance(g)?;
            let want = spectrum_len.unwrap_or((2 * inst.k + 2).min(16));
            let limits = OracleLimits { max_len: (2 * inst.k).max(want).max(16), max_steps: *max_steps };
            let r = verify_unique_cycle(&inst, Some(want), &limits)?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "k": inst.k,
                "N": inst.size,
                "cycle_length": 2 * inst.k,
                "cycles": r.cycles,
                "unique": r.unique,
                "matches_labeled": r.matches_labeled,
                "u0_heavy": r.u0_heavy,
                "spectrum_len": want,
                "spectrum_agrees": r.spectrum_agrees,
                "verified": r.verified(),
            });
            emit(&report, output)?;
            Ok(if r.verified() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        VerifyCmd::Bipartite { input, max_steps, output } => {
            let g = io::read_graph(input)?;
            let limits = OracleLimits { max_steps: *max_steps, ..OracleLimits::default() };
            let sides = bipartition(&g);
            let degrees: std::collections::BTreeSet<usize> = (0..g.node_count()).map(|v| g.degree(v)).collect();
            let regular = (degrees.len() == 1).then(|| *degrees.first().unwrap());
            let c4 = oracle::count_cycles(&g, 4, &limits)?;
            let verified = sides.is_some() && regular.is_some() && c4 == 0;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "bipartite": sides.is_some(),
                "parts": sides,
                "regular": regular,
                "four_cycles": c4,
                "c4free": c4 == 0,
                "verified": verified,
            });
            emit(&report, output)?;
            Ok(if verified { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

/// Sizes of the two sides of a proper 2-coloring, if one exists.
fn bipartition(g: &Graph) -> Option<[usize; 2]> {
    let n = g.node_count();
    let mut side = vec![u8::MAX; n];
    let mut sizes = [0usize; 2];
    for start in 0..n {
        if side[start] != u8::MAX {
            continue;
        }
        side[start] = 0;
        sizes[0] += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    sizes[side[w] as usize] += 1;
                    stack.push(w);
                } else if side[w] == side[v] {
                    return None;
                }
            }
        }
    }
    Some(sizes)
}

fn load_gk(src: &GkSource) -> Result<GkInstance> {
    match (src.k, src.size, src.d, &src.input) {
        (Some(k), Some(n), None, None) => Ok(generate_gk(k, n)?),
        (None, None, Some(d), None) => Ok(generate_g6(d)?),
        (None, None, None, Some(input)) => {
            let g = io::read_graph(input)?;
            let l = load_labels(input, &src.labels, &g)?;
            l.to_instance(g)
        }
        _ => bail!("give the instance as --k with --N, as --d, or as -i with labels"),
    }
}

/// Parses `a..b`, `a..=b` or `x,y,inf`.
pub fn parse_thresholds(text: &str) -> Result<Vec<Option<u64>>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let (b, inclusive) = match b.strip_prefix('=') {
            Some(b) => (b, true),
            None => (b, false),
        };
        let a: u64 = a.trim().parse().context("threshold range start")?;
        let b: u64 = b.trim().parse().context("threshold range end")?;
        let end = if inclusive { b } else { b.saturating_sub(1) };
        if a == 0 || end < a {
            bail!("empty or zero threshold range {text:?}");
        }
        return Ok((a..=end).map(Some).collect());
    }
    text.split(',')
        .map(|t| match t.trim() {
            "inf" | "none" => Ok(None),
            t => match t.parse::<u64>() {
                Ok(0) => bail!("caps must be at least 1"),
                Ok(v) => Ok(Some(v)),
                Err(e) => Err(anyhow!("bad threshold {t:?}: {e}")),
            },
        })
        .collect()
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn sweep(a: &SweepArgs) -> Result<i32> {
    let inst = load_gk(&a.instance)?;
    let mut grid = parse_thresholds(&a.thresholds)?;
    let mut incomplete = false;
    if let Some(budget) = a.trial_budget {
        let fit = budget.checked_div(a.trials).map_or(grid.len(), |f| f as usize);
        if fit < grid.len() {
            grid.truncate(fit);
            incomplete = true;
        }
    }
    let csv_path = output_or_default(&a.output, "sweep.csv")?;
    let jobs = experiment::resolve_jobs(a.jobs);
    let (trials, report) = experiment::sweep(&inst, &grid, a.trials, a.seed, a.palette.get(), jobs)?;
    io::write_text(&csv_path, &csv_string(&report.rows)?)?;
    io::write_text(&with_suffix(&csv_path, ".trials.csv"), &csv_string(&trials)?)?;
    let mut summary = serde_json::to_value(&report)?;
    summary["incomplete"] = json!(incomplete);
    summary["spec"] = serde_json::to_value(ExperimentSpec {
        schema_version: SCHEMA_VERSION,
        experiment: SpecCmd::SweepThreshold(a.clone()),
    })?;
    io::write_json(&io::sidecar_path(&csv_path), &summary)?;
    print!("{}", io::to_json(&summary)?);
    Ok(if incomplete { EXIT_BUDGET } else { EXIT_OK })
}

fn congestion(a: &CongestionArgs) -> Result<i32> {
    let inst = load_gk(&a.instance)?;
    let csv_path = output_or_default(&a.output, "congestion.csv")?;
    let jobs = experiment::resolve_jobs(a.jobs);
    let (rows, report) = experiment::congestion(&inst, a.threshold, a.trials, a.seed, a.palette.get(), jobs)?;
    io::write_text(&csv_path, &csv_string(&rows)?)?;
    let mut summary = serde_json::to_value(&report)?;
    summary["spec"] = serde_json::to_value(ExperimentSpec {
        schema_version: SCHEMA_VERSION,
        experiment: SpecCmd::Congestion(a.clone()),
    })?;
    io::write_json(&io::sidecar_path(&csv_path), &summary)?;
    print!("{}", io::to_json(&summary)?);
    Ok(EXIT_OK)
}

fn bad_sets(a: &BadSetArgs) -> Result<i32> {
    let limits = OracleLimits { max_steps: a.max_steps, ..OracleLimits::default() };
    let jobs = experiment::resolve_jobs(a.jobs);
    let rows = match &a.input {
        Some(input) => {
            let g = io::read_graph(input)?;
            let l = load_labels(input, &a.labels, &g)?;
            let cycle = l.labeled_cycle()?;
            experiment::bad_sets_on_graph(&g, &cycle, a.instances, a.seed, &limits, jobs)?
        }
        None => experiment::bad_sets_random(a.instances, a.seed, a.max_arms, a.max_paths, &limits, jobs)?,
    };
    let csv_path = output_or_default(&a.output, "bad_sets.csv")?;
    io::write_text(&csv_path, &csv_string(&rows)?)?;
    let checked = rows.iter().filter(|r| r.preconditions).count();
    let violations = rows.iter().filter(|r| r.preconditions && !r.bounds_hold).count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "instances": rows.len(),
        "preconditions_met": checked,
        "violations": violations,
        "nonempty": rows.iter().filter(|r| r.forward_union > 0 || r.good_neighbors < r.deg_u0).count(),
        "spec": ExperimentSpec { schema_version: SCHEMA_VERSION, experiment: SpecCmd::BadSets(a.clone()) },
    });
    io::write_json(&io::sidecar_path(&csv_path), &summary)?;
    print!("{}", io::to_json(&summary)?);
    Ok(if violations > 0 { EXIT_VERIFY_FAILED } else { EXIT_OK })
}
