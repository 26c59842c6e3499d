//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use dcm_core::estimators::{Curves, Engine, ExperimentSpec, InitialCondition, Rate};
use dcm_core::exact::{
    enumerate_configurations, exact_tau_profile, exact_walk_distributions, tv_from_uniform,
};
use dcm_core::seeding::{domain, stream_rng};
use dcm_core::topology::{
    isomorphic_path_event_check, random_self_avoiding_path, topology_diagnostics, SegmentedPath,
};
use dcm_core::{
    alpha_to_k, evolve, run_joint, sample_configuration, Configuration, DegreeSequence, HalfEdge,
};

use crate::error::{LabError, LabResult};
use crate::formats::{
    diagnostics_csv, pretty, read_json, read_pairing, read_text, result_csv, result_json,
    result_sidecar, sidecar_path, trace_jsonl, trajectory_jsonl, write_output, ConfigurationFile,
    IsomorphicExpected, IsomorphicFixture, OracleExpected, OracleFixture, Tolerance,
};
use crate::provenance::Provenance;
use crate::runner::run_repetitions;

#[derive(Debug, Parser)]
#[command(
    name = "dcm-lab",
    version,
    args_conflicts_with_subcommands = true,
    about = "Simulate random walks on dynamically rewired configuration-model graphs"
)]
pub struct Cli {
    /// Read the whole command from a JSON document
    /// (`{"command": "mixing", "regular": [1000, 3], "alpha": 0.1, ...}`).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a uniform configuration and write its pairing.
    Generate(GenerateArgs),
    /// Run the rewiring chain and write every rewired set.
    Dynamics(StepsArgs),
    /// Run one walker on the rewiring graph and write its trajectory.
    Walk(StepsArgs),
    /// Estimate the tail of the stopping time.
    Tau(ExperimentArgs),
    /// Estimate the distance to uniformity and the mixing time.
    Mixing(ExperimentArgs),
    /// Exact walk laws by enumerating every configuration (tiny graphs only).
    Oracle(OracleArgs),
    /// Neighbourhood diagnostics, good tuples and the isomorphic-path check.
    Topology(TopologyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// `N` vertices of degree `D`.
    #[arg(long, num_args = 2, value_names = ["N", "D"], conflicts_with = "degrees")]
    pub regular: Option<Vec<u64>>,
    /// Whitespace-separated degree file.
    #[arg(long, value_name = "FILE")]
    pub degrees: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    /// Fraction of edges rewired per step; `k = round(alpha * m)` clamped to `[2, m]`.
    #[arg(long, conflicts_with = "k")]
    pub alpha: Option<f64>,
    /// Number of edges rewired per step.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Record the wall-clock time in the provenance header.
    #[arg(long)]
    pub timestamp: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StepsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub rate: RateArgs,
    /// Number of steps.
    #[arg(long)]
    pub t: usize,
    /// Initial configuration (snapshot or bare pairing array); sampled when absent.
    #[arg(long, value_name = "FILE")]
    pub eta: Option<PathBuf>,
    /// Starting half-edge; sampled when absent.
    #[arg(long)]
    pub x0: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Lazy,
    Eager,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Largest time step; defaults to three times the predicted mixing time.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    /// Independent initial conditions, each with its own replicas.
    #[arg(long, default_value_t = 1)]
    pub repetitions: u64,
    #[arg(long, value_enum, default_value = "lazy")]
    pub engine: EngineArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub rate: RateArgs,
    /// Largest time step.
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_name = "FILE")]
    pub eta: Option<PathBuf>,
    #[arg(long)]
    pub x0: Option<u64>,
    /// Also write a fixture file for estimator tests.
    #[arg(long, value_name = "FILE")]
    pub emit_fixture: Option<PathBuf>,
    /// Replica count recorded in the fixture's tolerance.
    #[arg(long, default_value_t = 1_000_000)]
    pub replicas: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TopologyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Largest radius.
    #[arg(long, default_value_t = 8)]
    pub t: usize,
    /// Uniform (configuration, half-edge) samples per radius.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Run the isomorphic-path check stored in this fixture.
    #[arg(long, value_name = "FILE", conflicts_with = "emit_fixture")]
    pub isomorphic: Option<PathBuf>,
    /// Replicas for the isomorphic-path check (default: the fixture's count).
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Draw two vertex-disjoint segmented paths and write them as a fixture.
    #[arg(long, value_name = "FILE")]
    pub emit_fixture: Option<PathBuf>,
    /// Jump positions of the fixture paths.
    #[arg(long, value_delimiter = ',', default_value = "2,4")]
    pub jumps: Vec<usize>,
    #[command(flatten)]
    pub rate: RateArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Invalid(msg.into())
}

fn load_sequence(g: &GraphArgs) -> LabResult<DegreeSequence> {
    match (&g.regular, &g.degrees) {
        (Some(nd), None) => {
            let n = usize::try_from(nd[0]).map_err(|_| invalid("N does not fit in memory"))?;
            let d = u32::try_from(nd[1]).map_err(|_| invalid("D is too large"))?;
            Ok(DegreeSequence::make_regular(n, d)?)
        }
        (None, Some(path)) => {
            DegreeSequence::parse(&read_text(path)?).map_err(|e| LabError::parse(path, e))
        }
        _ => Err(invalid(
            "give exactly one of --regular N D and --degrees FILE",
        )),
    }
}

/// Range checks that must fail before anything is computed.
fn check_rate(rate: &RateArgs) -> LabResult<()> {
    match (rate.alpha, rate.k) {
        (Some(a), None) if !(a > 0.0 && a <= 1.0) => {
            Err(dcm_core::Error::AlphaOutOfRange(a).into())
        }
        (None, None) => Err(invalid("one of --alpha and --k is required")),
        _ => Ok(()),
    }
}

fn check_epsilon(epsilon: f64) -> LabResult<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(dcm_core::Error::EpsilonOutOfRange(epsilon).into())
    }
}

fn resolve_k(seq: &DegreeSequence, rate: &RateArgs) -> LabResult<(usize, f64)> {
    let k = match (rate.alpha, rate.k) {
        (Some(a), _) => {
            let choice = alpha_to_k(seq, a)?;
            if choice.adjusted {
                eprintln!(
                    "note: alpha = {a} gives k = {}, effective alpha = {}",
                    choice.k, choice.effective
                );
            }
            choice.k
        }
        (None, Some(k)) => {
            if k < 2 || k > seq.m() {
                return Err(dcm_core::Error::KOutOfRange { k, m: seq.m() }.into());
            }
            k
        }
        (None, None) => return Err(invalid("one of --alpha and --k is required")),
    };
    Ok((k, k as f64 / seq.m() as f64))
}

fn provenance(command: &str, seq: &DegreeSequence, out: &OutputArgs) -> Provenance {
    let p = Provenance::new(command, seq, out.seed);
    if out.timestamp {
        p.stamped()
    } else {
        p
    }
}

/// The initial condition: from files and flags when given, drawn from the seed otherwise.
fn initial_condition(
    seq: &DegreeSequence,
    eta: Option<&Path>,
    x0: Option<u64>,
    seed: u64,
) -> LabResult<InitialCondition> {
    let drawn = InitialCondition::draw(seq, seed, 0);
    let eta = match eta {
        Some(p) => read_pairing(p)?,
        None => drawn.eta,
    };
    let x0 = match x0 {
        Some(x) => {
            HalfEdge::try_from(x).map_err(|_| invalid(format!("--x0 {x} is out of range")))?
        }
        None => drawn.x0,
    };
    Ok(InitialCondition::new(seq, eta, x0)?)
}

fn emit(out: &OutputArgs, primary: &str, sidecar: Option<&Value>) -> LabResult<()> {
    write_output(out.out.as_deref(), primary)?;
    if let (Some(path), Some(side)) = (&out.out, sidecar) {
        let side_path = sidecar_path(path);
        if side_path != *path {
            write_output(Some(&side_path), &pretty(side))?;
        }
    }
    Ok(())
}

fn generate(a: &GenerateArgs) -> LabResult<()> {
    let seq = load_sequence(&a.graph)?;
    let mut rng = stream_rng(a.output.seed, domain::INITIAL_CONDITION, 0, 0);
    let c = sample_configuration(&seq, &mut rng);
    let prov = provenance("generate", &seq, &a.output);
    let text = match a.output.format {
        Format::Json => pretty(&ConfigurationFile::new(prov, &seq, &c)),
        Format::Csv => {
            let mut s = prov.comment_lines();
            s.push_str("half_edge,partner\n");
            for (x, y) in c.pairing().iter().enumerate() {
                s.push_str(&format!("{x},{y}\n"));
            }
            s
        }
    };
    emit(&a.output, &text, None)
}

fn dynamics(a: &StepsArgs) -> LabResult<()> {
    check_rate(&a.rate)?;
    let seq = load_sequence(&a.graph)?;
    let (k, alpha) = resolve_k(&seq, &a.rate)?;
    let init = initial_condition(&seq, a.eta.as_deref(), a.x0, a.output.seed)?;
    let mut rng = stream_rng(a.output.seed, domain::REPLICA, 0, 0);
    let (_, trace) = evolve(&init.eta, k, a.t, &mut rng)?;
    let prov = provenance("dynamics", &seq, &a.output).with_rate(k, alpha);
    let text = match a.output.format {
        Format::Json => trace_jsonl(&prov, &trace),
        Format::Csv => {
            let mut s = prov.comment_lines();
            s.push_str("t,R_t\n");
            for t in 1..=trace.steps() {
                let set: Vec<String> = trace.step(t).iter().map(|h| h.to_string()).collect();
                s.push_str(&format!("{t},{}\n", set.join(" ")));
            }
            s
        }
    };
    emit(&a.output, &text, None)
}

fn walk(a: &StepsArgs) -> LabResult<()> {
    check_rate(&a.rate)?;
    let seq = load_sequence(&a.graph)?;
    let (k, alpha) = resolve_k(&seq, &a.rate)?;
    let init = initial_condition(&seq, a.eta.as_deref(), a.x0, a.output.seed)?;
    let mut rng = stream_rng(a.output.seed, domain::REPLICA, 0, 0);
    let run = run_joint(&seq, &init.eta, init.x0, k, a.t, &mut rng)?;
    let prov = provenance("walk", &seq, &a.output).with_rate(k, alpha);
    let text = match a.output.format {
        Format::Json => trajectory_jsonl(&prov, &run.positions, run.tau),
        Format::Csv => {
            let mut s = prov.comment_lines();
            s.push_str("t,X_t,tau_if_hit\n");
            for (t, x) in run.positions.iter().enumerate() {
                let hit = run
                    .tau
                    .filter(|&tau| tau <= t)
                    .map_or(String::new(), |v| v.to_string());
                s.push_str(&format!("{t},{x},{hit}\n"));
            }
            s
        }
    };
    emit(&a.output, &text, None)
}

fn experiment(a: &ExperimentArgs, command: &str, curves: Curves) -> LabResult<()> {
    check_rate(&a.rate)?;
    check_epsilon(a.epsilon)?;
    if a.repetitions == 0 {
        return Err(invalid("--repetitions must be at least 1"));
    }
    let seq = load_sequence(&a.graph)?;
    let rate = match (a.rate.alpha, a.rate.k) {
        (Some(alpha), _) => Rate::Alpha(alpha),
        (None, Some(k)) => Rate::K(k),
        (None, None) => unreachable!("checked above"),
    };
    let engine = match a.engine {
        EngineArg::Lazy => Engine::Lazy,
        EngineArg::Eager => Engine::Eager,
    };
    let spec = ExperimentSpec::new(&seq, rate, a.epsilon, a.horizon, a.replicas, a.output.seed)?
        .with_engine(engine)
        .with_curves(curves);
    if spec.alpha_adjusted {
        eprintln!(
            "note: k = {}, effective alpha = {}",
            spec.k, spec.alpha_effective
        );
    }
    let tables = run_repetitions(&seq, &spec, a.repetitions, a.threads)?;
    for w in tables.iter().flat_map(|t| &t.scalars.warnings) {
        eprintln!("warning: {w}");
    }
    let prov = provenance(command, &seq, &a.output).with_rate(spec.k, spec.alpha_effective);
    match a.output.format {
        Format::Csv => emit(
            &a.output,
            &result_csv(&prov, &tables),
            Some(&result_sidecar(&prov, &tables)),
        ),
        Format::Json => emit(&a.output, &pretty(&result_json(&prov, &tables)), None),
    }
}

fn oracle(a: &OracleArgs) -> LabResult<()> {
    check_rate(&a.rate)?;
    let seq = load_sequence(&a.graph)?;
    let (k, alpha) = resolve_k(&seq, &a.rate)?;
    let init = initial_condition(&seq, a.eta.as_deref(), a.x0, a.output.seed)?;
    let space = enumerate_configurations(&seq)?;
    let laws = exact_walk_distributions(&space, &seq, &init.eta, init.x0, k, a.t)?;
    let tv: Vec<f64> = laws.iter().map(|p| tv_from_uniform(p)).collect();
    // the stopping-time enumeration is far more expensive; skip it when out of range
    let tau_tail = exact_tau_profile(&seq, &init.eta, init.x0, k, a.t)
        .ok()
        .map(|p| p.survival);
    let prov = provenance("oracle", &seq, &a.output).with_rate(k, alpha);
    let fixture = OracleFixture {
        provenance: prov.clone(),
        degrees: seq.degrees().to_vec(),
        eta: init.eta.pairing().to_vec(),
        x0: init.x0,
        k,
        t: a.t,
        expected: OracleExpected {
            tv: tv.clone(),
            distributions: laws,
            tau_tail: tau_tail.clone(),
        },
        tolerance: Tolerance {
            sigmas: 3.0,
            replicas: a.replicas,
        },
    };
    if let Some(path) = &a.emit_fixture {
        write_output(Some(path), &pretty(&fixture))?;
    }
    let text = match a.output.format {
        Format::Json => pretty(&fixture),
        Format::Csv => {
            let mut s = prov.comment_lines();
            s.push_str("t,exact_tv,exact_tau_tail\n");
            for (t, v) in tv.iter().enumerate() {
                let tail = tau_tail
                    .as_ref()
                    .map_or(String::new(), |p| p[t].to_string());
                s.push_str(&format!("{t},{v},{tail}\n"));
            }
            s
        }
    };
    emit(&a.output, &text, None)
}

/// Two vertex-disjoint self-avoiding segmented paths with the same jumps.
pub fn draw_isomorphic_pair<R: Rng + ?Sized>(
    eta: &Configuration,
    seq: &DegreeSequence,
    jumps: &[usize],
    t: usize,
    rng: &mut R,
) -> LabResult<(SegmentedPath, SegmentedPath)> {
    let none = Default::default();
    let a = random_self_avoiding_path(eta, seq, jumps, t, &none, 10_000, rng)
        .ok_or_else(|| invalid("could not draw a self-avoiding path; the graph is too small"))?;
    let used = a.half_edges.iter().map(|&x| seq.owner(x)).collect();
    let b = random_self_avoiding_path(eta, seq, jumps, t, &used, 10_000, rng)
        .ok_or_else(|| invalid("could not draw a second vertex-disjoint path"))?;
    Ok((a, b))
}

fn topology(a: &TopologyArgs) -> LabResult<()> {
    if let Some(path) = &a.isomorphic {
        let fx: IsomorphicFixture = read_json(path)?;
        let seq = DegreeSequence::new(fx.degrees.clone()).map_err(|e| LabError::parse(path, e))?;
        let eta =
            Configuration::from_pairing(fx.eta.clone()).map_err(|e| LabError::parse(path, e))?;
        let pa = SegmentedPath {
            half_edges: fx.path_a.clone(),
            jumps: fx.jumps.clone(),
        };
        let pb = SegmentedPath {
            half_edges: fx.path_b.clone(),
            jumps: fx.jumps.clone(),
        };
        let replicas = a.replicas.unwrap_or(fx.replicas);
        let check =
            isomorphic_path_event_check(&seq, &eta, &pa, &pb, fx.k, replicas, a.output.seed)?;
        let prov =
            provenance("topology", &seq, &a.output).with_rate(fx.k, fx.k as f64 / seq.m() as f64);
        let doc = json!({
            "provenance": prov,
            "replicas": check.replicas,
            "hits_a": check.hits_a,
            "hits_b": check.hits_b,
            "p_a": check.p_a,
            "p_b": check.p_b,
            "z": check.z,
            "max_abs_z": fx.expected.max_abs_z,
            "pass": check.z.abs() < fx.expected.max_abs_z,
        });
        return emit(&a.output, &pretty(&doc), None);
    }
    let seq = load_sequence(&a.graph)?;
    if let Some(path) = &a.emit_fixture {
        check_rate(&a.rate)?;
        let (k, alpha) = resolve_k(&seq, &a.rate)?;
        let mut rng = stream_rng(a.output.seed, domain::INITIAL_CONDITION, 0, 0);
        let eta = sample_configuration(&seq, &mut rng);
        let (pa, pb) = draw_isomorphic_pair(&eta, &seq, &a.jumps, a.t, &mut rng)?;
        let fx = IsomorphicFixture {
            provenance: provenance("topology", &seq, &a.output).with_rate(k, alpha),
            degrees: seq.degrees().to_vec(),
            eta: eta.pairing().to_vec(),
            k,
            t: a.t,
            jumps: a.jumps.clone(),
            path_a: pa.half_edges,
            path_b: pb.half_edges,
            expected: IsomorphicExpected { max_abs_z: 3.0 },
            replicas: a.replicas.unwrap_or(1_000_000),
        };
        return write_output(Some(path), &pretty(&fx));
    }
    let mut rng = stream_rng(a.output.seed, domain::DIAGNOSTIC, 0, 0);
    let rows = topology_diagnostics(&seq, a.t, a.samples, &mut rng)?;
    let prov = provenance("topology", &seq, &a.output);
    let text = match a.output.format {
        Format::Csv => diagnostics_csv(&prov, &rows),
        Format::Json => pretty(&json!({
            "provenance": prov,
            "rows": rows.iter().map(|r| json!({
                "t": r.t,
                "mean_ball_size": r.mean_ball_size,
                "nu_power_prediction": r.nu_power_prediction,
                "tree_fraction": r.tree_fraction,
                "good_density": r.good_density,
                "ball_size_se": r.ball_size_se,
                "tree_fraction_se": r.tree_fraction_se,
                "good_se": r.good_se,
            })).collect::<Vec<_>>(),
        })),
    };
    emit(&a.output, &text, None)
}

/// Executes a parsed command.
pub fn run(command: &Command) -> LabResult<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Dynamics(a) => dynamics(a),
        Command::Walk(a) => walk(a),
        Command::Tau(a) => experiment(
            a,
            "tau",
            Curves {
                tv: false,
                tau: true,
                conditional: false,
            },
        ),
        Command::Mixing(a) => experiment(a, "mixing", Curves::default()),
        Command::Oracle(a) => oracle(a),
        Command::Topology(a) => topology(a),
    }
}

/// Turns a JSON command document into an argument list.
pub fn config_to_args(doc: &Value) -> LabResult<Vec<String>> {
    let obj = doc
        .as_object()
        .ok_or_else(|| invalid("the config document must be a JSON object"))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("the config document needs a string `command` field"))?;
    let mut args = vec!["dcm-lab".to_string(), command.to_string()];
    for (key, value) in obj {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                args.push(flag);
                for v in items {
                    args.push(scalar(v)?);
                }
            }
            v => {
                args.push(flag);
                args.push(scalar(v)?);
            }
        }
    }
    Ok(args)
}

fn scalar(v: &Value) -> LabResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(invalid(format!("unsupported config value {other}"))),
    }
}

/// Parses and runs; returns the process exit status.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match (&cli.config, &cli.command) {
        (Some(path), _) => read_json::<Value>(path).and_then(|doc| {
            let args = config_to_args(&doc)?;
            let inner = Cli::try_parse_from(&args)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            match &inner.command {
                Some(c) => run(c),
                None => Err(invalid("the config document names no command")),
            }
        }),
        (None, Some(c)) => run(c),
        (None, None) => Err(invalid("no command given; see --help")),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
