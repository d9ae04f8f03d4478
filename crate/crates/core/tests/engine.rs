mod common;

use std::collections::BTreeSet;

use common::{f_graph, g1, g2, lanl};
use geograms_core::engine::{
    run, Direction, Engine, EngineConfig, EngineError, PathRecord, PathStep, RunMode, Transition,
};
use geograms_core::grammar::{Attribute, ContextId, Grammar, Rule};
use geograms_core::triple_store::{load_ntriples, Resource, Triple};

fn hf() -> Resource {
    lanl("hasFriend")
}

fn hp() -> Resource {
    lanl("hasPosition")
}

fn fwd(v: &str, p: Resource) -> PathStep {
    PathStep::arrive(lanl(v), p, Direction::Forward)
}

fn bwd(v: &str, p: Resource) -> PathStep {
    PathStep::arrive(lanl(v), p, Direction::Backward)
}

fn start(v: &str) -> PathStep {
    PathStep::start(lanl(v))
}

fn traverse_edges(grammar: &Grammar, ctx: &str) -> Vec<geograms_core::grammar::EdgeSpec> {
    grammar
        .context(&ContextId::from(ctx))
        .unwrap()
        .traverse_edges()
        .cloned()
        .collect()
}

#[test]
fn g1_on_f_returns_both_paths() {
    let graph = f_graph();
    let q = run(&graph, &g1(), RunMode::AllPaths, 50).unwrap();
    let expected: BTreeSet<PathRecord> = [
        PathRecord::new(vec![start("johan"), fwd("marko", hf()), fwd("norman", hf())]),
        PathRecord::new(vec![
            start("johan"),
            fwd("marko", hf()),
            fwd("jhw", hf()),
            fwd("norman", hf()),
        ]),
    ]
    .into();
    assert_eq!(q, expected);
    let lengths: BTreeSet<usize> = q.iter().map(PathRecord::edge_length).collect();
    assert_eq!(lengths, [2, 3].into());
    let flat: BTreeSet<usize> = q.iter().map(PathRecord::flattened_len).collect();
    assert_eq!(flat, [7, 10].into());
}

#[test]
fn g2_on_f_shortest_uses_inverse_contacted() {
    let graph = f_graph();
    let q = run(&graph, &g2(), RunMode::ShortestOnly, 50).unwrap();
    let expected = PathRecord::new(vec![start("johan"), bwd("norman", lanl("contacted"))]);
    assert_eq!(q, [expected].into());
}

#[test]
fn reversed_g1_has_no_paths() {
    let graph = f_graph();
    let g = g1().rebind_endpoints(lanl("norman"), lanl("johan"));
    assert!(run(&graph, &g, RunMode::AllPaths, 50).unwrap().is_empty());
    let g = g1().rebind_endpoints(lanl("marko"), lanl("norman"));
    let q = run(&graph, &g, RunMode::ShortestOnly, 50).unwrap();
    assert_eq!(q.iter().map(PathRecord::edge_length).collect::<Vec<_>>(), [1]);
}

#[test]
fn unresolvable_entry() {
    let graph = f_graph();
    let g = g1().rebind_endpoints(lanl("nobody"), lanl("norman"));
    assert_eq!(
        run(&graph, &g, RunMode::AllPaths, 50).unwrap_err(),
        EngineError::UnresolvableEntry(lanl("nobody"))
    );
}

#[test]
fn attribute_sets() {
    let graph = f_graph();
    let grammar = g1();
    let engine = Engine::new(&graph, &grammar, EngineConfig::default()).unwrap();

    let w = engine.seed().unwrap();
    assert_eq!(engine.not_ever_set(&w), [lanl("johan")].into());
    assert!(engine.is_set(&w, &BTreeSet::new()).unwrap().is_empty());
    let one: BTreeSet<Attribute> = [Attribute::Is { step: 1 }].into();
    assert_eq!(engine.is_set(&w, &one).unwrap(), [lanl("johan")].into());
    let not_one: BTreeSet<Attribute> = [Attribute::Not { step: 1 }].into();
    assert_eq!(engine.not_set(&w, &not_one).unwrap(), [lanl("johan")].into());
    let two: BTreeSet<Attribute> = [Attribute::Is { step: 2 }].into();
    assert!(matches!(
        engine.is_set(&w, &two),
        Err(EngineError::StepOutOfRange { .. })
    ));

    let g = [
        start("johan"),
        fwd("marko", hf()),
        fwd("Researcher", hp()),
        bwd("marko", hp()),
    ];
    let w = engine.walker_at(&"Human_3".into(), &g, &[]).unwrap();
    assert_eq!(
        engine.not_ever_set(&w),
        [lanl("johan"), lanl("marko"), lanl("Researcher")].into()
    );

    // Resolving position 3 from Researcher_2: is 2 points at position 1.
    let w = engine.walker_at(&"Researcher_2".into(), &g[..3], &[]).unwrap();
    assert_eq!(engine.is_set(&w, &two).unwrap(), [lanl("marko")].into());
}

#[test]
fn legal_edges_follow_the_walkthrough() {
    let graph = f_graph();
    let grammar = g1();
    let engine = Engine::new(&graph, &grammar, EngineConfig::default()).unwrap();

    let seed = engine.seed().unwrap();
    let gamma = engine.legal_edges(&seed, &traverse_edges(&grammar, "johan_0")).unwrap();
    let expected = Transition {
        triple: Triple::new(lanl("johan"), hf(), lanl("marko")),
        direction: Direction::Forward,
        next_context: "Human_1".into(),
    };
    assert_eq!(gamma, [expected].into());

    let g = [
        start("johan"),
        fwd("marko", hf()),
        fwd("Researcher", hp()),
        bwd("marko", hp()),
    ];
    let at_marko = engine.walker_at(&"Human_3".into(), &g, &[]).unwrap();
    let gamma = engine.legal_edges(&at_marko, &traverse_edges(&grammar, "Human_3")).unwrap();
    let targets: BTreeSet<(Resource, ContextId)> = gamma
        .iter()
        .map(|t| (t.destination().clone(), t.next_context.clone()))
        .collect();
    assert_eq!(
        targets,
        [
            (lanl("jhw"), ContextId::from("Human_1")),
            (lanl("norman"), ContextId::from("norman_4")),
        ]
        .into()
    );
    assert!(gamma.iter().all(|t| t.destination() != &lanl("johan")));

    let at_researcher = engine.walker_at(&"Researcher_2".into(), &g[..3], &[]).unwrap();
    let gamma = engine
        .legal_edges(&at_researcher, &traverse_edges(&grammar, "Researcher_2"))
        .unwrap();
    let expected = Transition {
        triple: Triple::new(lanl("marko"), hp(), lanl("Researcher")),
        direction: Direction::Backward,
        next_context: "Human_3".into(),
    };
    assert_eq!(gamma, [expected].into());
}

#[test]
fn path_count_copies_earlier_steps() {
    let graph = f_graph();
    let grammar = g1();
    let engine = Engine::new(&graph, &grammar, EngineConfig::default()).unwrap();
    let seed = engine.seed().unwrap();
    let w = engine.apply_path_count(&seed, 0).unwrap();
    assert_eq!(engine.q_path(&w), [start("johan")]);
    assert!(matches!(
        engine.apply_path_count(&seed, 1),
        Err(EngineError::StepOutOfRange { .. })
    ));

    let g = [
        start("johan"),
        fwd("marko", hf()),
        fwd("Researcher", hp()),
        bwd("marko", hp()),
    ];
    let w = engine.walker_at(&"Human_3".into(), &g, &[start("johan")]).unwrap();
    let w = engine.apply_path_count(&w, 2).unwrap();
    assert_eq!(engine.q_path(&w), [start("johan"), fwd("marko", hf())]);
    assert_eq!(engine.g_path(&w), g);
}

#[test]
fn expansion_clones_at_marko() {
    let graph = f_graph();
    let grammar = g1();
    let engine = Engine::new(&graph, &grammar, EngineConfig::default())
        .unwrap()
        .without_pruning();
    let mut state = engine.start().unwrap();
    for _ in 0..3 {
        engine.expand(&mut state).unwrap();
        assert_eq!(state.frontier.len(), 1);
    }
    assert_eq!(engine.vertex_of(&state.frontier[0]), &lanl("marko"));
    let trace = engine.expand_traced(&mut state).unwrap();
    assert_eq!(trace.time, 3);
    let ids: Vec<u64> = trace.produced.iter().map(|w| w.id).collect();
    assert_eq!(ids, [0, 1]);
    assert_eq!(state.frontier.len(), 1);
    assert_eq!(state.finished.len(), 1);

    let mut empty = engine.start().unwrap();
    empty.frontier.clear();
    engine.expand(&mut empty).unwrap();
    assert!(empty.frontier.is_empty() && empty.finished.is_empty());
}

#[test]
fn halted_walker_leaves_nothing() {
    let graph = load_ntriples("<http://x/a> <http://x/p> <http://x/b> .").unwrap();
    let grammar = geograms_core::grammar::parse_grammar_dsl(
        "context a entry for <http://x/a> { pathcount 0 traverse out <http://x/q> -> b }\n\
         context b exit for <http://x/b> { pathcount 0 }",
    )
    .unwrap();
    let engine = Engine::new(&graph, &grammar, EngineConfig::default())
        .unwrap()
        .without_pruning();
    let mut state = engine.start().unwrap();
    engine.expand(&mut state).unwrap();
    assert!(state.frontier.is_empty() && state.finished.is_empty());
}

#[test]
fn cyclic_grammar_truncates() {
    let graph = load_ntriples(
        "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/b> <http://x/p> <http://x/c> .\n<http://x/c> <http://x/p> <http://x/a> .",
    )
    .unwrap();
    let grammar = geograms_core::grammar::parse_grammar_dsl(
        "context s entry for <http://x/a> { pathcount 0 traverse out <http://x/p> -> loop }\n\
         context loop for rdfs:Resource { pathcount 0 traverse out <http://x/p> -> loop, out <http://x/p> -> e }\n\
         context e exit for <http://x/c> { pathcount 0 }",
    )
    .unwrap();
    for engine in [
        Engine::new(&graph, &grammar, EngineConfig::default().with_max_steps(25)).unwrap(),
        Engine::new(&graph, &grammar, EngineConfig::default().with_max_steps(25))
            .unwrap()
            .without_pruning(),
    ] {
        match engine.run() {
            Err(EngineError::Truncated { max_steps, partial }) => {
                assert_eq!(max_steps, 25);
                assert!(!partial.is_empty());
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }
}

#[test]
fn exit_pathcount_order_and_multiple_traverse() {
    let graph = load_ntriples(
        "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/q> <http://x/c> .",
    )
    .unwrap();
    let grammar = Grammar::new([
        geograms_core::grammar::GrammarContext::new(
            "a",
            geograms_core::grammar::ContextKind::Entry,
            Resource::iri("http://x/a"),
        )
        .with_rule(Rule::path_count(0))
        .with_rule(Rule::traverse([geograms_core::grammar::EdgeSpec::out(
            Resource::iri("http://x/p"),
            "mid",
        )]))
        .with_rule(Rule::traverse([geograms_core::grammar::EdgeSpec::out(
            Resource::iri("http://x/q"),
            "mid",
        )])),
        geograms_core::grammar::GrammarContext::new(
            "mid",
            geograms_core::grammar::ContextKind::Exit,
            Resource::iri("http://www.w3.org/2000/01/rdf-schema#Resource"),
        )
        .with_rule(Rule::path_count(0)),
    ])
    .unwrap();
    let q = run(&graph, &grammar, RunMode::AllPaths, 10).unwrap();
    assert_eq!(q.len(), 2);
}

#[test]
fn parallel_runs_match_sequential() {
    let graph = f_graph();
    for grammar in [g1(), g2()] {
        let base = Engine::new(&graph, &grammar, EngineConfig::default()).unwrap().run().unwrap();
        for threads in [2, 4] {
            let par = Engine::new(&graph, &grammar, EngineConfig::default().with_threads(threads))
                .unwrap()
                .run()
                .unwrap();
            assert_eq!(par, base);
        }
    }
}
