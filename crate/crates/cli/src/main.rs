//! `scar`: command-line front end of the workbench.
//!
//! Exit codes: 0 success, 2 invalid input, 3 state space over capacity,
//! 4 positional iteration did not converge (with `--no-fallback`),
//! 5 a checked claim failed.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use scar::analysis::{
    payoff_equivalence_check, reproduce_example, selfish_cop_number, sweep, theorem_suite, write_sweep_csv,
    AnalysisError, SweepGrid, Verdict,
};
use scar::cr::{cop_number, exact_capture_times, t_n_max};
use scar::equilibria::{
    build_capturing_threat_ne, build_noncapturing_ne, build_threat_profile, check_cr_optimal_ne, cr_optimal_profile,
    solve_positional_ne, verify_noncapturing_ne, verify_threat_ne, EquilibriumError, PursuitProfile, ThreatVerifier,
};
use scar::scenario::{GridSpec, Resolved, Scenario, ScenarioError};
use scar::simulate::{payoffs_of, render_turn_table, run, run_with_forced_deviation, Trace, DEFAULT_TURN_CAP};
use scar::{Graph, GraphError, ParamError, StateError, StateSpace, Strategy, Tolerances};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "scar",
    version,
    about = "Selfish cops and an active robber: solver, simulator and equilibrium checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positional equilibrium from s0 (threat equilibrium if the iteration fails).
    Solve {
        #[command(flatten)]
        game: GameArgs,
        /// Exit with code 4 instead of falling back to a threat equilibrium.
        #[arg(long)]
        no_fallback: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The delayed-capture example on its built-in 9-vertex graph.
    ReproduceExample {
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cop number, optionally the selfish cop number with sampled verification.
    Copnumber {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 3)]
        max_cops: usize,
        #[arg(long)]
        selfish: bool,
        /// Sample both directions of the selfish cop number.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// CSV classification of the optimal profile and threat play over a grid.
    Sweep {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Runs every equilibrium verifier on the scenario.
    Verify {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Plays a profile from s0 and prints the trace.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = ProfileKind::CrOptimal)]
        profile: ProfileKind,
        /// For `pursuit`: first move of one cop, "cop,vertex" (1-based).
        #[arg(long)]
        detour: Option<String>,
        /// Force moves of one player: "player:turn=vertex,turn=vertex" (1-based).
        #[arg(long)]
        deviate: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Checks the claims relating equilibria to the cop number over a grid.
    Theorems {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Split-equivalent payoff battery with random positional profiles.
    Equivalence {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ProfileKind {
    CrOptimal,
    Pursuit,
    Threat,
    CapturingThreat,
    Positional,
    NonCapturing,
}

#[derive(Args, Default, Clone)]
struct GameArgs {
    /// JSON scenario file; other flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Edge-list file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of players (cops plus the robber).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, conflicts_with = "split_equivalent")]
    epsilon: Option<f64>,
    /// Every cop receives 1/(N-1) at any capture.
    #[arg(long)]
    split_equivalent: bool,
    /// Initial state "x1,...,xN,p" (1-based).
    #[arg(long)]
    s0: Option<String>,
    /// Grid "g1,g2,...;e1,e2,..." (default: 5 x 5).
    #[arg(long)]
    grid: Option<String>,
    /// Value-iteration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    allow_extended_epsilon: bool,
    /// Seed for random batteries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct OutputArgs {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    table: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Table,
}

impl OutputArgs {
    fn format(self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else if self.table {
            Format::Table
        } else {
            default
        }
    }
}

/// An error together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    /// The reader went away (e.g. `| head`); not an error.
    fn closed_pipe() -> Self {
        Failure { code: 0, message: String::new() }
    }
}

impl From<StateError> for Failure {
    fn from(e: StateError) -> Self {
        let code = if matches!(e, StateError::Capacity { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::State(s) => s.into(),
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<EquilibriumError> for Failure {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::State(s) => s.into(),
            EquilibriumError::NonConvergence { .. } | EquilibriumError::NotAnEquilibrium { .. } => {
                Failure { code: 4, message: e.to_string() }
            }
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::State(s) => s.into(),
            AnalysisError::Scenario(s) => s.into(),
            AnalysisError::Equilibrium(s) => s.into(),
            AnalysisError::Io(e) => e.into(),
            AnalysisError::Csv(message) => Failure { code: 1, message },
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<scar::SimError> for Failure {
    fn from(e: scar::SimError) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::closed_pipe();
        }
        Failure { code: 1, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Solve { game, no_fallback, out } => cmd_solve(&game, no_fallback, out.format(Format::Json)),
        Command::ReproduceExample { gamma, epsilon, out } => cmd_reproduce(gamma, epsilon, out.format(Format::Table)),
        Command::Copnumber { game, max_cops, selfish, verify, out } => {
            cmd_copnumber(&game, max_cops, selfish, verify, out.format(Format::Json))
        }
        Command::Sweep { game, out } => cmd_sweep(&game, out.format(Format::Csv)),
        Command::Verify { game, out } => cmd_verify(&game, out.format(Format::Json)),
        Command::Simulate { game, profile, detour, deviate, out } => {
            cmd_simulate(&game, profile, detour.as_deref(), deviate.as_deref(), out.format(Format::Json))
        }
        Command::Theorems { game, out } => cmd_theorems(&game, out.format(Format::Json)),
        Command::Equivalence { game, trials, out } => cmd_equivalence(&game, trials, out.format(Format::Json)),
    }
}

// ---------------------------------------------------------------------------
// Input assembly

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// The scenario file (if any) with command-line overrides applied, and the
/// directory relative graph paths are resolved against.
fn assemble(game: &GameArgs) -> Result<(Scenario, Option<PathBuf>), Failure> {
    let (mut sc, base) = match &game.scenario {
        Some(path) => (read_scenario(path)?, path.parent().map(Path::to_path_buf)),
        None => (
            Scenario {
                graph: None,
                graph_file: None,
                players: 3,
                gamma: f64::NAN,
                epsilon: None,
                split_equivalent: false,
                allow_extended_epsilon: false,
                s0: None,
                tolerances: Tolerances::default(),
                grid: None,
            },
            None,
        ),
    };
    if let Some(g) = &game.graph {
        sc.graph = None;
        sc.graph_file = Some(g.clone());
    }
    if let Some(n) = game.n {
        sc.players = n;
    }
    if let Some(g) = game.gamma {
        sc.gamma = g;
    }
    if let Some(e) = game.epsilon {
        sc.epsilon = Some(e);
        sc.split_equivalent = false;
    }
    if game.split_equivalent {
        sc.split_equivalent = true;
        sc.epsilon = None;
    }
    if let Some(s0) = &game.s0 {
        sc.s0 = Some(s0.clone());
    }
    if let Some(tol) = game.tol {
        sc.tolerances.value = tol;
    }
    if game.allow_extended_epsilon {
        sc.allow_extended_epsilon = true;
    }
    if let Some(grid) = &game.grid {
        sc.grid = Some(parse_grid(grid)?);
    }
    if sc.graph.is_none() && sc.graph_file.is_none() {
        return Err(Failure::invalid("no graph given: use --graph FILE or --scenario FILE"));
    }
    // Relative graph paths from the command line are relative to the
    // working directory, not to the scenario file.
    let base = if game.graph.is_some() { None } else { base };
    Ok((sc, base))
}

fn resolve(game: &GameArgs) -> Result<Resolved, Failure> {
    let (sc, base) = assemble(game)?;
    if sc.gamma.is_nan() {
        return Err(Failure::invalid("no discount factor given: use --gamma"));
    }
    Ok(sc.resolve(base.as_deref())?)
}

/// Graph and player count only, for commands without fixed parameters.
fn graph_only(game: &GameArgs) -> Result<(Graph, Scenario), Failure> {
    let (mut sc, base) = assemble(game)?;
    let graph = sc.load_graph(base.as_deref())?;
    sc.graph = Some(graph.to_edge_list());
    sc.graph_file = None;
    Ok((graph, sc))
}

fn parse_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::invalid(format!("bad number {x:?} in --grid"))))
        .collect()
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    let (g, e) = text.split_once(';').ok_or_else(|| Failure::invalid("--grid must look like \"g1,g2;e1,e2\""))?;
    Ok(GridSpec { gammas: parse_list(g)?, epsilons: parse_list(e)? })
}

fn grid_for(sc: &Scenario) -> SweepGrid {
    let mut grid = match &sc.grid {
        Some(spec) => SweepGrid::new(spec.gammas.clone(), spec.epsilons.clone()),
        None => SweepGrid::default_for(sc.players),
    };
    grid.starts = sc.s0.clone().map(|s| vec![s]);
    grid
}

fn emit_json(command: &str, scenario: &Scenario, result: impl Serialize) -> io::Result<()> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "scenario": scenario,
        "result": result,
    });
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}

fn require_s0(r: &Resolved) -> Result<usize, Failure> {
    r.s0.ok_or_else(|| Failure::invalid("no initial state given: use --s0 \"x1,...,xN,p\""))
}

// ---------------------------------------------------------------------------
// Commands

fn trace_summary(r: &Resolved, trace: &Trace) -> Result<Value, Failure> {
    Ok(json!({
        "capture_time": trace.capture_time,
        "capturing_set": trace.capturing_set,
        "termination": trace.termination,
        "payoffs": payoffs_of(&r.params, trace)?,
        "steps": trace.steps,
    }))
}

fn cmd_solve(game: &GameArgs, no_fallback: bool, format: Format) -> Outcome {
    let r = resolve(game)?;
    let s0 = require_s0(&r)?;
    let space = &r.space;
    let result = match solve_positional_ne(space, &r.params) {
        Ok(ne) => {
            let trace = run(space, &ne.profile, s0, DEFAULT_TURN_CAP)?;
            let values: Vec<f64> = ne.values.iter().map(|u| u[s0]).collect();
            json!({
                "method": "positional",
                "values_at_s0": values,
                "sweeps": ne.sweeps,
                "iteration_residual": ne.iteration_residual,
                "equation_residual": ne.equation_residual,
                "verification": ne.verification,
                "gaps_at_s0": (0..space.players()).map(|n| ne.verification.gap_at(n, s0)).collect::<Vec<_>>(),
                "trace": trace_summary(&r, &trace)?,
            })
        }
        Err(e @ (EquilibriumError::NonConvergence { .. } | EquilibriumError::NotAnEquilibrium { .. })) => {
            if no_fallback {
                return Err(e.into());
            }
            let (kind, threat) = match build_capturing_threat_ne(space, &r.params) {
                Ok(c) => ("capturing_threat", c.profile_for(s0).clone()),
                Err(_) => ("threat", build_threat_profile(space, &r.params)),
            };
            let check = ThreatVerifier::new(space, &r.params, &threat.punishments).check(
                space,
                &r.params,
                &threat.cooperative,
                s0,
            );
            let trace = run(space, &threat, s0, DEFAULT_TURN_CAP)?;
            json!({
                "method": kind,
                "positional_failure": e.to_string(),
                "values_at_s0": check.payoffs,
                "gains_at_s0": check.gains,
                "is_ne_at_s0": check.max_gain() <= r.params.tol.ne_gap,
                "trace": trace_summary(&r, &trace)?,
            })
        }
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Table => {
            println!("method: {}", result["method"].as_str().unwrap_or(""));
            println!("values at s0: {}", result["values_at_s0"]);
            println!("capture time: {}", result["trace"]["capture_time"]);
        }
        _ => emit_json("solve", &r.echo, result)?,
    }
    Ok(0)
}

fn cmd_reproduce(gamma: f64, epsilon: f64, format: Format) -> Outcome {
    let report = reproduce_example(gamma, epsilon)?;
    match format {
        Format::Json => {
            let graph = Graph::delayed_capture_example();
            let params = scar::GameParams::new(3, gamma, epsilon)?;
            let scenario = Scenario::inline(&graph, &params, Some(report.s0.clone()));
            emit_json("reproduce-example", &scenario, &report)?;
        }
        _ => print!("{}", report.render()),
    }
    Ok(if report.consistent { 0 } else { 5 })
}

fn cmd_copnumber(game: &GameArgs, max_cops: usize, selfish: bool, verify: bool, format: Format) -> Outcome {
    let (graph, sc) = graph_only(game)?;
    if max_cops == 0 {
        return Err(Failure::invalid("--max-cops must be at least 1"));
    }
    let (value, doc) = if selfish || verify {
        let r = selfish_cop_number(&graph, max_cops, verify)?;
        (r.value, serde_json::to_value(&r).expect("serializable"))
    } else {
        let r = cop_number(&graph, max_cops)?;
        (r.value, serde_json::to_value(&r).expect("serializable"))
    };
    let contradiction = doc["verification"]["contradiction"].as_bool().unwrap_or(false);
    match format {
        Format::Json => emit_json("copnumber", &sc, &doc)?,
        _ => {
            match value {
                Some(c) => println!("{}: {c}", if selfish || verify { "selfish cop number" } else { "cop number" }),
                None => println!("cop number exceeds {max_cops}"),
            }
            for v in doc["cop_number"]["certificate"].as_array().or(doc["certificate"].as_array()).into_iter().flatten()
            {
                println!("  {} cop(s): max capture time {}", v["cops"], v["t_max"]);
            }
            if let Some(s) = doc["verification"]["scope"].as_str() {
                println!("  verification ({s}): {}", if contradiction { "CONTRADICTION" } else { "consistent" });
            }
        }
    }
    Ok(if contradiction { 5 } else { 0 })
}

fn cmd_sweep(game: &GameArgs, format: Format) -> Outcome {
    let (graph, sc) = graph_only(game)?;
    let grid = grid_for(&sc);
    let rows = sweep(&graph, sc.players, &grid)?;
    match format {
        Format::Json => emit_json("sweep", &sc, json!({ "grid": grid, "rows": rows }))?,
        _ => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    Ok(0)
}

fn cmd_verify(game: &GameArgs, format: Format) -> Outcome {
    let r = resolve(game)?;
    let space = &r.space;
    let params = &r.params;
    let tol = params.tol.ne_gap;
    let cop_win = t_n_max(space, &exact_capture_times(space)).is_finite();
    let threat = verify_threat_ne(space, params, &build_threat_profile(space, params), tol);
    let capturing =
        if cop_win { Some(build_capturing_threat_ne(space, params)?.verify(space, params, tol)) } else { None };
    let optimal = if cop_win { Some(check_cr_optimal_ne(space, params)?) } else { None };
    let positional = match solve_positional_ne(space, params) {
        Ok(ne) => json!({ "converged": true, "sweeps": ne.sweeps, "equation_residual": ne.equation_residual,
                          "verification": ne.verification }),
        Err(e) => json!({ "converged": false, "error": e.to_string() }),
    };
    let noncapturing = match build_noncapturing_ne(space, r.s0) {
        Ok(ne) => serde_json::to_value(verify_noncapturing_ne(space, params, &ne, tol)?).expect("serializable"),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let failed = !threat.is_ne || capturing.as_ref().is_some_and(|c| !c.is_ne);
    let result = json!({
        "standard_threat": threat,
        "capturing_threat": capturing,
        "cr_optimal": optimal,
        "positional": positional,
        "non_capturing": noncapturing,
    });
    match format {
        Format::Table => {
            println!("standard threat: is_ne = {}", result["standard_threat"]["is_ne"]);
            println!("capturing threat: is_ne = {}", result["capturing_threat"]["is_ne"]);
            println!("optimal profile: is_ne_everywhere = {}", result["cr_optimal"]["is_ne_everywhere"]);
            println!("positional: converged = {}", result["positional"]["converged"]);
            match result["non_capturing"]["error"].as_str() {
                Some(e) => println!("non-capturing: not applicable ({e})"),
                None => println!("non-capturing: is_ne = {}", result["non_capturing"]["is_ne"]),
            }
        }
        _ => emit_json("verify", &r.echo, result)?,
    }
    Ok(if failed { 5 } else { 0 })
}

fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::invalid(format!("bad {what} {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a - 1, b - 1))
}

/// "player:turn=vertex,turn=vertex", 1-based.
fn parse_deviation(text: &str) -> Result<(usize, BTreeMap<u32, usize>), Failure> {
    let bad = || Failure::invalid(format!("bad deviation plan {text:?}"));
    let (who, moves) = text.split_once(':').ok_or_else(bad)?;
    let who: usize = who.trim().parse().map_err(|_| bad())?;
    let mut plan = BTreeMap::new();
    for item in moves.split(',').filter(|s| !s.trim().is_empty()) {
        let (t, v) = item.split_once('=').ok_or_else(bad)?;
        let t: u32 = t.trim().parse().map_err(|_| bad())?;
        let v: usize = v.trim().parse().map_err(|_| bad())?;
        if t == 0 || v == 0 {
            return Err(bad());
        }
        plan.insert(t, v - 1);
    }
    if who == 0 {
        return Err(bad());
    }
    Ok((who - 1, plan))
}

fn play<S: Strategy>(
    space: &StateSpace,
    strategy: &S,
    s0: usize,
    deviate: &Option<(usize, BTreeMap<u32, usize>)>,
) -> Result<Trace, Failure> {
    Ok(match deviate {
        Some((who, plan)) => run_with_forced_deviation(space, strategy, *who, plan, s0, DEFAULT_TURN_CAP)?,
        None => run(space, strategy, s0, DEFAULT_TURN_CAP)?,
    })
}

fn cmd_simulate(
    game: &GameArgs,
    kind: ProfileKind,
    detour: Option<&str>,
    deviate: Option<&str>,
    format: Format,
) -> Outcome {
    let r = resolve(game)?;
    let space = &r.space;
    let params = &r.params;
    let deviate = deviate.map(parse_deviation).transpose()?;
    if let Some((who, _)) = &deviate {
        if *who >= space.players() {
            return Err(Failure::invalid(format!("no player {}", who + 1)));
        }
    }
    let trace = match kind {
        ProfileKind::NonCapturing => {
            let ne = build_noncapturing_ne(space, r.s0)?;
            play(space, &ne, ne.s0, &deviate)?
        }
        _ => {
            let s0 = require_s0(&r)?;
            match kind {
                ProfileKind::CrOptimal => play(space, &cr_optimal_profile(space), s0, &deviate)?,
                ProfileKind::Pursuit => {
                    let mut p = PursuitProfile::against_optimal_robber(space);
                    if let Some(d) = detour {
                        let (cop, v) = parse_pair(d, "detour")?;
                        if cop >= space.cops() {
                            return Err(Failure::invalid(format!("no cop {}", cop + 1)));
                        }
                        p = p.with_detour(cop, v);
                    }
                    play(space, &p, s0, &deviate)?
                }
                ProfileKind::Threat => play(space, &build_threat_profile(space, params), s0, &deviate)?,
                ProfileKind::CapturingThreat => {
                    let c = build_capturing_threat_ne(space, params)?;
                    play(space, c.profile_for(s0), s0, &deviate)?
                }
                ProfileKind::Positional => play(space, &solve_positional_ne(space, params)?.profile, s0, &deviate)?,
                ProfileKind::NonCapturing => unreachable!(),
            }
        }
    };
    match format {
        Format::Table => {
            print!("{}", render_turn_table(space, &trace));
            println!("T_C = {} ({:?})", trace.capture_time, trace.termination);
        }
        _ => emit_json("simulate", &r.echo, json!({ "trace": trace, "payoffs": payoffs_of(params, &trace)? }))?,
    }
    Ok(0)
}

fn cmd_theorems(game: &GameArgs, format: Format) -> Outcome {
    let (graph, sc) = graph_only(game)?;
    let mut grid = grid_for(&sc);
    grid.starts = None;
    let reports = theorem_suite(&graph, sc.players, &grid)?;
    let failed = reports.iter().any(|r| r.verdict == Verdict::Fail);
    match format {
        Format::Json => emit_json("theorems", &sc, &reports)?,
        _ => {
            for r in &reports {
                let verdict = match r.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::NotApplicable => "N/A ",
                };
                println!("{verdict} {}: {} [{}]", r.theorem, r.claim, r.scope);
                for c in &r.counterexamples {
                    println!(
                        "     counterexample at gamma={} eps={:?} s0={:?}: {}",
                        c.scenario.gamma, c.scenario.epsilon, c.scenario.s0, c.detail
                    );
                }
            }
        }
    }
    Ok(if failed { 5 } else { 0 })
}

fn cmd_equivalence(game: &GameArgs, trials: usize, format: Format) -> Outcome {
    let (graph, mut sc) = graph_only(game)?;
    let gamma = if sc.gamma.is_nan() { 0.9 } else { sc.gamma };
    sc.gamma = gamma;
    sc.split_equivalent = true;
    sc.epsilon = None;
    let report = payoff_equivalence_check(&graph, sc.players, trials, game.seed, gamma)?;
    match format {
        Format::Json => emit_json("equivalence", &sc, &report)?,
        _ => println!(
            "{}: {} trials ({} captured), path mismatches {}, payoff mismatches {}, optimal profile is NE: {:?}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.trials,
            report.captured_trials,
            report.path_mismatches,
            report.payoff_mismatches + report.robber_mismatches,
            report.cr_optimal_is_ne
        ),
    }
    Ok(if report.passed() { 0 } else { 5 })
}
