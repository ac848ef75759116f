//! `csw`: command-line access to the graph, state, presentation and verification tools.

mod refs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csw_core::derivation::script::{bundled, generate, replay_within, ProofScript, StepStatus};
use csw_core::derivation::{DerivationError, Engine};
use csw_core::free_algebra::parse_free;
use csw_core::graph::{enumerate_paths, perron};
use csw_core::hom_verifier::{
    verify_action, verify_coproduct_compat, verify_filtration_preservation, verify_hom, verify_state_preservation, verify_two_way,
    ActionSpec, CheckStatus, GeneratorMap, HomError, VerificationReport,
};
use csw_core::path_algebra::AlgebraElement;
use csw_core::presentations::Presentation;
use csw_core::rep_finder::{check_representation, separate, SearchBudget};
use csw_core::states::{build_filtration, critical_kms, direct_sum_kms, f_gamma_matrix, tau, verify_filtration, StateFunctional};
use refs::{load_action, load_graph, load_map, load_presentation, parse_params};
use serde::Serialize;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "csw", version, about = "Graph C*-algebras, their linear quantum symmetries and bounded derivations")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Inspect a graph.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// KMS states at critical inverse temperature.
    #[command(subcommand)]
    Kms(KmsCmd),
    /// The τ functional.
    #[command(subcommand)]
    Tau(TauCmd),
    /// Orthogonal filtrations.
    #[command(subcommand)]
    Filtration(FiltrationCmd),
    /// Presentations.
    #[command(subcommand)]
    Presentation(PresentationCmd),
    /// Truncated ideal membership.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Bundled theorem scripts.
    #[command(subcommand)]
    Theorem(TheoremCmd),
    /// Homomorphism, action, state, filtration and coproduct checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Search for a representation separating two presentations.
    Separate(SeparateArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GraphCmd {
    Show { graph: String },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KmsCmd {
    Compute {
        graph: String,
        /// Direct sum of the component states instead of the critical state of the whole graph.
        #[arg(long)]
        oplus: bool,
        /// Longest path length to tabulate.
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TauCmd {
    Fmatrix { graph: String },
}

#[derive(Args, Debug, Serialize)]
struct FiltrationArgs {
    graph: String,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long)]
    oplus: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FiltrationCmd {
    Build(FiltrationArgs),
    Verify(FiltrationArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PresentationCmd {
    Emit {
        presentation: String,
        /// Also write the bare presentation JSON here.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DeriveCmd {
    Check {
        presentation: String,
        element: String,
        /// Degree bound; defaults to twice the largest relation degree plus two.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        no_certificate: bool,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TheoremCmd {
    Replay {
        /// thm31, thm33 or thm41.
        name: String,
        /// Parameters, e.g. `3,2`; the bundled script is used when omitted.
        #[arg(long)]
        params: Option<String>,
        /// Largest degree allowed; defaults to the script's degree.
        #[arg(long)]
        degree: Option<usize>,
        /// Replay this script file instead.
        #[arg(long)]
        script: Option<String>,
    },
}

#[derive(Args, Debug, Serialize)]
struct ActionArgs {
    /// Action file, `wreath(N,K)` or `block(n1,n2,...)`.
    action: String,
    /// Presentation of the acting algebra.
    coefficients: String,
    #[arg(long)]
    degree: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StateChoice {
    Tau,
    Kms,
    Oplus,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VerifyCmd {
    Action {
        #[command(flatten)]
        #[serde(flatten)]
        a: ActionArgs,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    Hom {
        source: String,
        target: String,
        map: String,
        /// Map back from the target; also checks both composites.
        #[arg(long)]
        inverse: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
    },
    State {
        #[command(flatten)]
        #[serde(flatten)]
        a: ActionArgs,
        #[arg(long, value_enum, default_value_t = StateChoice::Tau)]
        state: StateChoice,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    Filtration {
        #[command(flatten)]
        #[serde(flatten)]
        a: ActionArgs,
        #[arg(long, value_enum, default_value_t = StateChoice::Oplus)]
        state: StateChoice,
        /// Top filtration degree.
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    Coproduct {
        source: String,
        target: String,
        map: String,
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Args, Debug, Serialize)]
struct SeparateArgs {
    /// Presentation the witness must satisfy.
    a: String,
    /// Presentation the witness should violate.
    b: String,
    /// Map from the generators of `b` into `a`.
    #[arg(long, default_value = "identity")]
    map: String,
    #[arg(long, default_value_t = 2)]
    dim_budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2_000_000)]
    max_nodes: usize,
}

/// Outcome of a command: 0 success, 1 failed, 2 inconclusive.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Outcome {
    Success,
    Failed,
    Unknown,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Failed => 1,
            Outcome::Unknown => 2,
        }
    }
    fn of(status: CheckStatus) -> Outcome {
        match status {
            CheckStatus::Pass => Outcome::Success,
            CheckStatus::Fail => Outcome::Failed,
            CheckStatus::Unknown => Outcome::Unknown,
        }
    }
}

struct Run {
    outcome: Outcome,
    resolved: Value,
    result: Value,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Resource(String),
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Input(s)
    }
}

impl From<DerivationError> for CliError {
    fn from(e: DerivationError) -> Self {
        match e {
            DerivationError::Resource(r) => CliError::Resource(r.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<HomError> for CliError {
    fn from(e: HomError) -> Self {
        match e {
            HomError::Derivation(d) => d.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

fn default_degree(p: &Presentation) -> usize {
    2 * p.max_relation_degree() + 2
}

/// Level-`level` elements of the action carry products of `2·level` coefficients.
fn action_degree(spec: &ActionSpec, q: &Presentation, level: usize) -> usize {
    let top = spec.coefficients.iter().flatten().map(|x| x.degree()).max().unwrap_or(1);
    default_degree(q).max(2 * level * top)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn report_run(r: VerificationReport, resolved: Value) -> Run {
    Run { outcome: Outcome::of(r.overall), resolved, result: to_value(&r) }
}

fn state_for(choice: StateChoice, g: &std::sync::Arc<csw_core::graph::Graph>) -> Result<StateFunctional, CliError> {
    let s = match choice {
        StateChoice::Tau => tau(g),
        StateChoice::Kms => critical_kms(g),
        StateChoice::Oplus => direct_sum_kms(g),
    };
    s.map_err(|e| CliError::Input(e.to_string()))
}

fn run(cmd: &Command) -> Result<Run, CliError> {
    match cmd {
        Command::Graph(GraphCmd::Show { graph }) => {
            let g = load_graph(graph)?;
            let spectral = match perron(&g) {
                Ok(p) => to_value(&p),
                Err(e) => json!({ "error": e.to_string() }),
            };
            let edges: Vec<Value> =
                g.edges.iter().map(|e| json!({ "id": e.id, "source": g.vertices[e.src], "range": g.vertices[e.dst] })).collect();
            let result = json!({
                "vertices": g.vertices,
                "edges": edges,
                "adjacency": g.adjacency(),
                "components": g.components().len(),
                "sinks": g.sinks().iter().map(|&v| g.vertices[v].clone()).collect::<Vec<_>>(),
                "perron": spectral,
            });
            Ok(Run { outcome: Outcome::Success, resolved: Value::Null, result })
        }
        Command::Kms(KmsCmd::Compute { graph, oplus, level }) => {
            let g = load_graph(graph)?;
            let s = state_for(if *oplus { StateChoice::Oplus } else { StateChoice::Kms }, &g)?;
            let rho = if *oplus { Value::Null } else { perron(&g).map(|p| to_value(&p.rho)).map_err(|e| e.to_string())? };
            let mut values = vec![];
            for len in 0..=*level {
                for p in enumerate_paths(&g, len) {
                    let x = AlgebraElement::path_term(&g, &p, &p);
                    let v = s.evaluate(&x).map_err(|e| e.to_string())?;
                    values.push(json!({ "element": x.display(), "value": v }));
                }
            }
            let result = json!({
                "state": s.kind,
                "rho": rho,
                "vertex_rho": s.rho,
                "vertex_weight": s.weight,
                "faithful": s.faithful,
                "values": values,
            });
            Ok(Run { outcome: Outcome::Success, resolved: Value::Null, result })
        }
        Command::Tau(TauCmd::Fmatrix { graph }) => {
            let g = load_graph(graph)?;
            let f = f_gamma_matrix(&g).map_err(|e| e.to_string())?;
            let diagonal = f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let result = json!({ "edges": g.edges.iter().map(|e| e.id.clone()).collect::<Vec<_>>(), "diagonal": diagonal });
            Ok(Run { outcome: Outcome::Success, resolved: Value::Null, result })
        }
        Command::Filtration(FiltrationCmd::Build(a)) | Command::Filtration(FiltrationCmd::Verify(a)) => {
            let g = load_graph(&a.graph)?;
            let s = state_for(if a.oplus { StateChoice::Oplus } else { StateChoice::Kms }, &g)?;
            let f = build_filtration(&s, a.degree).map_err(|e| e.to_string())?;
            if matches!(cmd, Command::Filtration(FiltrationCmd::Build(_))) {
                let dims: Vec<Value> = f.subspaces().into_iter().map(|(l, b)| json!({ "subspace": l, "dimension": b.len() })).collect();
                Ok(Run { outcome: Outcome::Success, resolved: Value::Null, result: json!({ "subspaces": dims }) })
            } else {
                let r = verify_filtration(&f, a.degree).map_err(|e| e.to_string())?;
                let outcome = if r.passed() { Outcome::Success } else { Outcome::Failed };
                Ok(Run { outcome, resolved: Value::Null, result: to_value(&r) })
            }
        }
        Command::Presentation(PresentationCmd::Emit { presentation, out }) => {
            let p = load_presentation(presentation)?;
            if let Some(path) = out {
                std::fs::write(path, p.to_json() + "\n").map_err(|e| format!("{path}: {e}"))?;
            }
            Ok(Run { outcome: Outcome::Success, resolved: Value::Null, result: to_value(&p) })
        }
        Command::Derive(DeriveCmd::Check { presentation, element, degree, no_certificate }) => {
            let p = load_presentation(presentation)?;
            let x = parse_free(element).map_err(|e| format!("element: {e}"))?;
            let d = degree.unwrap_or_else(|| default_degree(&p).max(x.degree()));
            let v = Engine::new(&p, d)?.check_with(&x, !no_certificate)?;
            let outcome = if v.derivable() { Outcome::Success } else { Outcome::Unknown };
            Ok(Run { outcome, resolved: json!({ "degree": d }), result: to_value(&v) })
        }
        Command::Theorem(TheoremCmd::Replay { name, params, degree, script }) => {
            let s: ProofScript = match (script, params) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                    ProofScript::from_json(&text).map_err(|e| format!("{path}: {e}"))?
                }
                (None, Some(ps)) => generate(name, &parse_params(ps)?).map_err(|e| e.to_string())?,
                (None, None) => bundled(name).ok_or_else(|| format!("no bundled script `{name}`"))?,
            };
            let p = s.presentation().map_err(|e| e.to_string())?;
            let bound = degree.unwrap_or(s.degree);
            let r = replay_within(&s, &p, bound)?;
            let outcome = match r.failing_step.map(|i| r.steps[i].status) {
                None => Outcome::Success,
                Some(StepStatus::Rejected) => Outcome::Failed,
                Some(_) => Outcome::Unknown,
            };
            Ok(Run { outcome, resolved: json!({ "script": s.name, "bound": bound }), result: to_value(&r) })
        }
        Command::Verify(v) => run_verify(v),
        Command::Separate(a) => {
            let pa = load_presentation(&a.a)?;
            let pb = load_presentation(&a.b)?;
            let map: GeneratorMap = load_map(&a.map, &pb)?;
            map.validate(&pb, &pa).map_err(|e| e.to_string())?;
            let budget = SearchBudget { max_dim: a.dim_budget, max_nodes: a.max_nodes, seed: a.seed };
            match separate(&pa, &pb, &map, budget) {
                Some(w) => {
                    let check = check_representation(&pa, &w.representation).map_err(|e| e.to_string())?;
                    let result = json!({ "witness": w, "satisfies_first": check.passed });
                    let outcome = if check.passed { Outcome::Success } else { Outcome::Failed };
                    Ok(Run { outcome, resolved: Value::Null, result })
                }
                None => Ok(Run { outcome: Outcome::Unknown, resolved: Value::Null, result: json!({ "witness": null, "note": "none found within the budget" }) }),
            }
        }
    }
}

fn run_verify(v: &VerifyCmd) -> Result<Run, CliError> {
    match v {
        VerifyCmd::Action { a, level } => {
            let spec = load_action(&a.action)?;
            let q = load_presentation(&a.coefficients)?;
            let d = a.degree.unwrap_or_else(|| action_degree(&spec, &q, *level));
            Ok(report_run(verify_action(&spec, &q, d, *level)?, json!({ "degree": d })))
        }
        VerifyCmd::Hom { source, target, map, inverse, degree } => {
            let ps = load_presentation(source)?;
            let pt = load_presentation(target)?;
            let f = load_map(map, &ps)?;
            let d = degree.unwrap_or_else(|| default_degree(&ps).max(default_degree(&pt)));
            let r = match inverse {
                Some(g) => verify_two_way(&ps, &pt, &f, &load_map(g, &pt)?, d)?,
                None => verify_hom(&ps, &pt, &f, d)?,
            };
            Ok(report_run(r, json!({ "degree": d })))
        }
        VerifyCmd::State { a, state, level } => {
            let spec = load_action(&a.action)?;
            let q = load_presentation(&a.coefficients)?;
            let d = a.degree.unwrap_or_else(|| action_degree(&spec, &q, *level));
            let s = state_for(*state, &spec.graph)?;
            Ok(report_run(verify_state_preservation(&spec, &s, &q, *level, d)?, json!({ "degree": d })))
        }
        VerifyCmd::Filtration { a, state, levels } => {
            let spec = load_action(&a.action)?;
            let q = load_presentation(&a.coefficients)?;
            let d = a.degree.unwrap_or_else(|| action_degree(&spec, &q, *levels));
            let s = state_for(*state, &spec.graph)?;
            let f = build_filtration(&s, *levels).map_err(|e| e.to_string())?;
            Ok(report_run(verify_filtration_preservation(&spec, &f, &q, d)?, json!({ "degree": d })))
        }
        VerifyCmd::Coproduct { source, target, map, degree } => {
            let ps = load_presentation(source)?;
            let pt = load_presentation(target)?;
            let f = load_map(map, &ps)?;
            let d = degree.unwrap_or_else(|| default_degree(&pt));
            Ok(report_run(verify_coproduct_compat(&ps, &pt, &f, d, None)?, json!({ "degree": d })))
        }
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One line per check or step when the result has them, otherwise one line per field.
fn render_text(outcome: Outcome, result: &Value) -> String {
    let mut out = String::new();
    if let Some(checks) = result.get("checks").and_then(Value::as_array) {
        for c in checks {
            out.push_str(&format!("{:<8} {}", compact(&c["status"]), compact(&c["name"])));
            if let Some(w) = c.get("witness") {
                out.push_str(&format!("  [{}]", compact(w)));
            }
            out.push('\n');
        }
    } else if let Some(steps) = result.get("steps").and_then(Value::as_array) {
        for s in steps {
            out.push_str(&format!("{:<8} {:>4} {:<17} {}", compact(&s["status"]), s["index"], compact(&s["rule"]), compact(&s["label"])));
            if let Some(m) = s.get("message") {
                out.push_str(&format!("  [{}]", compact(m)));
            }
            out.push('\n');
        }
    } else if let Value::Object(m) = result {
        for (k, v) in m {
            out.push_str(&format!("{k}: {}\n", compact(v)));
        }
    } else {
        out.push_str(&format!("{}\n", compact(result)));
    }
    out.push_str(&format!("outcome: {}\n", compact(&to_value(&outcome))));
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let run = match run(&cli.command) {
        Ok(r) => r,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(3);
        }
        Err(CliError::Resource(m)) => {
            eprintln!("inconclusive: {m}");
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Json => {
            let report = json!({
                "config": { "command": to_value(&cli.command), "resolved": run.resolved },
                "outcome": run.outcome,
                "result": run.result,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Format::Text => print!("{}", render_text(run.outcome, &run.result)),
    }
    ExitCode::from(run.outcome.code())
}
