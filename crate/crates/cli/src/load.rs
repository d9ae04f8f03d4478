//! Reading graphs, grammars and resource names from the command line.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use geograms_core::geodesics::{project, projection_vertices, NamespaceFilter};
use geograms_core::grammar::{load_grammar_from_triples, parse_grammar_dsl_with_prefixes, Grammar, GrammarError};
use geograms_core::triple_store::{parse_into, Graph, GraphBuilder, PrefixMap, Resource};

use crate::args::{GrammarArgs, GrammarFormat, GraphArgs};
use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn graph(args: &GraphArgs) -> Result<Graph, CliError> {
    let graph = graph_files(&args.graphs, args.subsumption.into())?;
    Ok(if args.project {
        project(&graph, &NamespaceFilter::default())
    } else {
        graph
    })
}

pub fn graph_files(paths: &[PathBuf], subsumption: geograms_core::triple_store::Subsumption) -> Result<Graph, CliError> {
    let mut builder = GraphBuilder::new();
    for path in paths {
        parse_into(&mut builder, &read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(builder.build_with(subsumption))
}

pub fn grammar_format(args: &GrammarArgs) -> GrammarFormat {
    args.grammar_format.unwrap_or_else(|| match args.grammar.extension().and_then(|e| e.to_str()) {
        Some("nt") => GrammarFormat::Triples,
        _ => GrammarFormat::Dsl,
    })
}

/// The grammar and the prefixes it declares.
pub fn grammar(args: &GrammarArgs) -> Result<(Grammar, PrefixMap), GrammarLoadError> {
    let path = &args.grammar;
    let text = read(path).map_err(GrammarLoadError::Cli)?;
    let located = |e: GrammarError| GrammarLoadError::Grammar(path.clone(), e);
    match grammar_format(args) {
        GrammarFormat::Dsl => parse_grammar_dsl_with_prefixes(&text).map_err(located),
        GrammarFormat::Triples => {
            let mut builder = GraphBuilder::new();
            parse_into(&mut builder, &text).map_err(|e| GrammarLoadError::Cli(CliError::Data(format!("{}: {e}", path.display()))))?;
            let graph = builder.build();
            let grammar = load_grammar_from_triples(&graph).map_err(located)?;
            Ok((grammar, graph.prefixes().clone()))
        }
    }
}

#[derive(Debug)]
pub enum GrammarLoadError {
    Cli(CliError),
    Grammar(PathBuf, GrammarError),
}

impl From<GrammarLoadError> for CliError {
    fn from(e: GrammarLoadError) -> Self {
        match e {
            GrammarLoadError::Cli(e) => e,
            GrammarLoadError::Grammar(path, e) => CliError::Data(format!("{}: {e}", path.display())),
        }
    }
}

/// `<iri>`, `prefix:local` under `prefixes`, or a bare absolute IRI.
pub fn resource(text: &str, prefixes: &PrefixMap) -> Result<Resource, CliError> {
    let bad = || CliError::Usage(format!("not a resource: {text}"));
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Resource::try_iri(inner).ok_or_else(bad);
    }
    if let Some((prefix, local)) = text.split_once(':') {
        if let Some(iri) = prefixes.expand(prefix, local) {
            return Resource::try_iri(iri).ok_or_else(bad);
        }
    }
    if text.contains("://") {
        return Resource::try_iri(text).ok_or_else(bad);
    }
    Err(bad())
}

pub fn resources(texts: &[String], prefixes: &PrefixMap) -> Result<BTreeSet<Resource>, CliError> {
    texts.iter().map(|t| resource(t, prefixes)).collect()
}

/// Instances sharing an `rdf:type` with the entry resource, plus the entry
/// resource itself. When the entry resource has no type, every vertex of the
/// projection.
pub fn default_universe(graph: &Graph, grammar: &Grammar) -> BTreeSet<Resource> {
    let source = grammar.source();
    let types = graph.types_of(source);
    let all = projection_vertices(graph, &NamespaceFilter::default());
    if types.is_empty() {
        return all;
    }
    let mut out: BTreeSet<Resource> = all
        .into_iter()
        .filter(|v| types.iter().any(|t| graph.has_type_or_equal(v, t) && v != t))
        .collect();
    out.insert(source.clone());
    out
}

/// Graph prefixes overlaid with the grammar's.
pub fn display_prefixes(graph: &Graph, grammar: &PrefixMap) -> PrefixMap {
    let mut p = graph.prefixes().clone();
    p.extend(grammar);
    p
}
