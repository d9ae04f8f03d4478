//! Subcommand implementations. Each returns the text for stdout.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use geograms_core::engine::{Engine, EngineConfig, EngineError, PathRecord, RunMode};
use geograms_core::geodesics::{
    project, projection_vertices, unlabeled_distances, Geodesics, Metric, MetricKind, MetricResult, NamespaceFilter,
};
use geograms_core::grammar::{validate_grammar, Grammar, GrammarError, Severity, Violation};
use geograms_core::path_encoding::{encode_all_pairs_with, p_encoded_metric, PathEncoder, StoreBuilder};
use geograms_core::triple_store::{Graph, PrefixMap, Resource, Subsumption};
use geograms_core::vocab;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, EncodeArgs, EngineArgs, MetricArgs, OracleArgs, OutputFormat, PathsArgs, ValidateArgs,
};
use crate::load::{self, GrammarLoadError};
use crate::{CliError, EXIT_DATA, EXIT_MISMATCH};

pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Paths(a) => paths(a, cli.output),
        Command::Metric(a) => metric(a, cli.output),
        Command::Encode(a) => encode(a, cli.output),
        Command::OracleCheck(a) => oracle_check(a, cli.output),
        Command::ValidateGrammar(a) => validate(a, cli.output),
    }
}

fn engine_error(e: EngineError) -> CliError {
    CliError::Data(e.to_string())
}

fn config(args: &EngineArgs) -> EngineConfig {
    EngineConfig::default()
        .with_max_steps(args.max_steps)
        .with_threads(args.threads)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn display(paths: &BTreeSet<PathRecord>, prefixes: &PrefixMap) -> Vec<String> {
    paths.iter().map(|p| p.display_with(prefixes)).collect()
}

/// Grammar with `from` / `to` substituted for its endpoints.
fn rebound(grammar: Grammar, from: &Option<String>, to: &Option<String>, prefixes: &PrefixMap) -> Result<Grammar, CliError> {
    if from.is_none() && to.is_none() {
        return Ok(grammar);
    }
    let i = match from {
        Some(t) => load::resource(t, prefixes)?,
        None => grammar.source().clone(),
    };
    let j = match to {
        Some(t) => load::resource(t, prefixes)?,
        None => grammar.sink().clone(),
    };
    Ok(grammar.rebind_endpoints(i, j))
}

fn paths(args: &PathsArgs, output: OutputFormat) -> Result<String, CliError> {
    let graph = load::graph(&args.graph)?;
    let (grammar, grammar_prefixes) = load::grammar(&args.grammar)?;
    let prefixes = load::display_prefixes(&graph, &grammar_prefixes);
    let grammar = rebound(grammar, &args.from, &args.to, &prefixes)?;
    let mode: RunMode = args.mode.into();
    let start = Instant::now();
    let engine = Engine::new(&graph, &grammar, config(&args.engine).with_mode(mode)).map_err(engine_error)?;
    let out = engine.run().map_err(engine_error)?;
    let wall = elapsed_ms(start);
    let lines = display(&out.records, &prefixes);
    Ok(match output {
        OutputFormat::Json => pretty(&json!({
            "mode": mode_name(mode),
            "count": lines.len(),
            "paths": lines,
            "generations": out.stats.generations,
            "wall_time_ms": wall,
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            for l in &lines {
                writeln!(s, "{l}").unwrap();
            }
            writeln!(s, "# {} paths in {} generations", lines.len(), out.stats.generations).unwrap();
            s
        }
    })
}

fn mode_name(mode: RunMode) -> &'static str {
    match mode {
        RunMode::ShortestOnly => "shortest-only",
        RunMode::AllPaths => "all-paths",
    }
}

fn grammar_id(text: &Option<String>, prefixes: &PrefixMap) -> Result<Resource, CliError> {
    match text {
        Some(t) => load::resource(t, prefixes),
        None => Ok(Resource::iri(format!("{}Grammar", vocab::RWRX))),
    }
}

fn universe(texts: &[String], graph: &Graph, grammar: &Grammar, prefixes: &PrefixMap) -> Result<BTreeSet<Resource>, CliError> {
    if texts.is_empty() {
        Ok(load::default_universe(graph, grammar))
    } else {
        load::resources(texts, prefixes)
    }
}

fn metric(args: &MetricArgs, output: OutputFormat) -> Result<String, CliError> {
    let graph = load::graph(&args.graph)?;
    let (grammar, grammar_prefixes) = load::grammar(&args.grammar)?;
    let prefixes = load::display_prefixes(&graph, &grammar_prefixes);
    let vertices = universe(&args.universe.vertices, &graph, &grammar, &prefixes)?;
    let subject = || -> Result<Resource, CliError> {
        match &args.vertex {
            Some(t) => load::resource(t, &prefixes),
            None => Ok(grammar.source().clone()),
        }
    };
    let kind: MetricKind = args.metric.into();
    let metric = match kind {
        MetricKind::ShortestPath => Metric::ShortestPath {
            from: match &args.from {
                Some(t) => load::resource(t, &prefixes)?,
                None => grammar.source().clone(),
            },
            to: match &args.to {
                Some(t) => load::resource(t, &prefixes)?,
                None => grammar.sink().clone(),
            },
        },
        MetricKind::Eccentricity => Metric::Eccentricity(subject()?),
        MetricKind::Radius => Metric::Radius,
        MetricKind::Diameter => Metric::Diameter,
        MetricKind::Closeness => Metric::Closeness(subject()?),
        MetricKind::Betweenness => Metric::Betweenness(subject()?),
    };
    let start = Instant::now();
    let result = match &args.encoded {
        Some(path) => {
            let store = load::graph_files(std::slice::from_ref(path), Subsumption::default())?;
            let id = grammar_id(&args.grammar_id, &prefixes)?;
            p_encoded_metric(&metric, &store, &id, &vertices).map_err(|e| CliError::Data(e.to_string()))?
        }
        None => {
            let geo = Geodesics::new(&graph, &grammar, config(&args.engine)).map_err(engine_error)?;
            match &metric {
                Metric::ShortestPath { from, to } if from == grammar.source() && to == grammar.sink() => {
                    geo.shortest_path()
                }
                Metric::ShortestPath { from, to } => geo.shortest_path_between(from, to),
                m => geo.compute(m, &vertices),
            }
            .map_err(engine_error)?
        }
    };
    Ok(render_metric(&result, &prefixes, elapsed_ms(start), output))
}

fn render_metric(result: &MetricResult, prefixes: &PrefixMap, wall: f64, output: OutputFormat) -> String {
    let witnesses = display(&result.witness_paths, prefixes);
    match output {
        OutputFormat::Json => pretty(&json!({
            "kind": result.kind,
            "value": result.value,
            "defined": result.value.is_defined(),
            "witness_paths": witnesses,
            "skipped_targets": result.skipped_targets,
            "wall_time_ms": wall,
        })),
        OutputFormat::Text => {
            let mut s = format!("{}: {}\n", result.kind.name(), result.value);
            if result.skipped_targets > 0 {
                writeln!(s, "skipped targets: {}", result.skipped_targets).unwrap();
            }
            for w in &witnesses {
                writeln!(s, "  {w}").unwrap();
            }
            s
        }
    }
}

fn encode(args: &EncodeArgs, output: OutputFormat) -> Result<String, CliError> {
    let graph = load::graph(&args.graph)?;
    let (grammar, grammar_prefixes) = load::grammar(&args.grammar)?;
    let prefixes = load::display_prefixes(&graph, &grammar_prefixes);
    let id = grammar_id(&args.grammar_id, &prefixes)?;
    let encoder = match &args.namespace {
        Some(ns) => PathEncoder::new(ns.clone()),
        None => PathEncoder::default(),
    };
    let start = Instant::now();
    let (store, pairs) = if args.all_pairs {
        let vertices = universe(&args.universe.vertices, &graph, &grammar, &prefixes)?;
        let engine = Engine::new(&graph, &grammar, config(&args.engine)).map_err(engine_error)?;
        let store =
            encode_all_pairs_with(&engine, encoder, &id, &vertices).map_err(|e| CliError::Data(e.to_string()))?;
        let n = vertices.len();
        (store, n * n.saturating_sub(1))
    } else {
        let engine =
            Engine::new(&graph, &grammar, config(&args.engine).with_mode(args.mode.into())).map_err(engine_error)?;
        let out = engine.run().map_err(engine_error)?;
        let mut b = StoreBuilder::with_encoder(encoder);
        b.add_own_run(&id, grammar.source(), grammar.sink(), &out.walkers);
        (b.build(), 1)
    };
    let wall = elapsed_ms(start);
    let text = store.to_ntriples();
    let Some(path) = &args.out else {
        return Ok(text);
    };
    std::fs::write(path, &text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(match output {
        OutputFormat::Json => pretty(&json!({
            "out": path.display().to_string(),
            "pairs": pairs,
            "triples": store.len(),
            "wall_time_ms": wall,
        })),
        OutputFormat::Text => format!("wrote {} triples for {pairs} pairs to {}\n", store.len(), path.display()),
    })
}

fn oracle_check(args: &OracleArgs, output: OutputFormat) -> Result<String, CliError> {
    let graph = load::graph(&args.graph)?;
    let filter = NamespaceFilter::default();
    let projected = project(&graph, &filter);
    let vertices = if args.vertices.is_empty() {
        projection_vertices(&graph, &filter)
    } else {
        load::resources(&args.vertices, graph.prefixes())?
    };
    let start = Instant::now();
    let any = Resource::iri(vocab::RDFS_RESOURCE);
    let grammar = Grammar::unconstrained(any.clone(), any);
    let geo = Geodesics::new(&projected, &grammar, config(&args.engine)).map_err(engine_error)?;
    let table = geo.table(&vertices).map_err(engine_error)?;
    let mut mismatches = Vec::new();
    let mut pairs = 0;
    for (i, row) in vertices.iter().zip(&table) {
        let oracle = unlabeled_distances(&graph, &filter, i);
        for (j, s) in vertices.iter().filter(|j| *j != i).zip(row) {
            pairs += 1;
            let (got, want) = (s.length(), oracle.get(j).copied());
            if got != want {
                mismatches.push((i.clone(), j.clone(), got, want));
            }
        }
    }
    let wall = elapsed_ms(start);
    let prefixes = graph.prefixes();
    let report = match output {
        OutputFormat::Json => pretty(&json!({
            "pairs": pairs,
            "mismatches": mismatches.iter().map(|(i, j, got, want)| json!({
                "from": i.compact(prefixes),
                "to": j.compact(prefixes),
                "grammar": got,
                "oracle": want,
            })).collect::<Vec<_>>(),
            "wall_time_ms": wall,
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            for (i, j, got, want) in &mismatches {
                let show = |d: &Option<usize>| d.map_or("undefined".to_string(), |d| d.to_string());
                writeln!(
                    s,
                    "mismatch {} -> {}: grammar {}, oracle {}",
                    i.compact(prefixes),
                    j.compact(prefixes),
                    show(got),
                    show(want)
                )
                .unwrap();
            }
            writeln!(s, "{pairs} pairs, {} mismatches", mismatches.len()).unwrap();
            s
        }
    };
    if mismatches.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Report {
            code: EXIT_MISMATCH,
            report,
            message: format!("{} oracle mismatches", mismatches.len()),
        })
    }
}

fn validate(args: &ValidateArgs, output: OutputFormat) -> Result<String, CliError> {
    let violations: Vec<Violation> = match load::grammar(&args.grammar) {
        Ok((grammar, _)) => validate_grammar(&grammar),
        Err(GrammarLoadError::Grammar(_, GrammarError::Invalid(v))) => v,
        Err(e) => return Err(e.into()),
    };
    let errors = violations.iter().filter(|v| v.severity == Severity::Error).count();
    let report = match output {
        OutputFormat::Json => pretty(&json!({
            "grammar": args.grammar.grammar.display().to_string(),
            "valid": errors == 0,
            "violations": violations.iter().map(|v| json!({
                "severity": v.severity,
                "context": v.context.as_str(),
                "kind": v.kind,
                "message": v.to_string(),
            })).collect::<Vec<_>>(),
        })),
        OutputFormat::Text => {
            let mut s = String::new();
            for v in &violations {
                writeln!(s, "{}: {v}", args.grammar.grammar.display()).unwrap();
            }
            if violations.is_empty() {
                writeln!(s, "{}: ok", args.grammar.grammar.display()).unwrap();
            }
            s
        }
    };
    if errors == 0 {
        Ok(report)
    } else {
        Err(CliError::Report {
            code: EXIT_DATA,
            report,
            message: format!("{errors} grammar errors"),
        })
    }
}
