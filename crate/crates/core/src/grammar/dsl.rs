//! Textual grammar syntax.
//!
//! ```text
//! @prefix lanl: <http://www.lanl.gov#>
//! context johan_0 entry for lanl:johan {
//!   pathcount 0
//!   traverse out lanl:hasFriend -> norman_1
//! }
//! context norman_1 exit for lanl:norman {
//!   pathcount 0
//! }
//! ```
//!
//! Rules run in the order written. `rdf`, `rdfs`, `xsd`, `rwr` and `rwrx` are
//! predeclared.

use std::fmt::Write as _;

use super::{Attribute, ContextId, ContextKind, EdgeDirection, EdgeSpec, Grammar, GrammarContext, GrammarError, Rule};
use crate::syntax::{Cursor, LexError};
use crate::triple_store::{PrefixMap, Resource};

pub fn parse_grammar_dsl(text: &str) -> Result<Grammar, GrammarError> {
    parse_grammar_dsl_with_prefixes(text).map(|(g, _)| g)
}

/// Like [`parse_grammar_dsl`], also returning the prefixes in scope at the
/// end of the document.
pub fn parse_grammar_dsl_with_prefixes(text: &str) -> Result<(Grammar, PrefixMap), GrammarError> {
    let mut parser = Parser {
        cur: Cursor::new(text, 1),
        prefixes: PrefixMap::with_defaults(),
        references: Vec::new(),
    };
    let contexts = parser.document().map_err(syntax)?;
    for (name, line, column) in parser.references {
        if !contexts.iter().any(|c| c.id.as_str() == name) {
            return Err(GrammarError::UndeclaredContext { name, line, column });
        }
    }
    Ok((Grammar::new(contexts)?, parser.prefixes))
}

fn syntax(e: LexError) -> GrammarError {
    GrammarError::Syntax {
        line: e.line,
        column: e.column,
        message: e.message,
    }
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
    references: Vec<(String, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn document(&mut self) -> Result<Vec<GrammarContext>, LexError> {
        let mut contexts = Vec::new();
        loop {
            self.cur.skip_trivia();
            if self.cur.is_eof() {
                return Ok(contexts);
            }
            if self.cur.eat("@prefix") {
                self.prefix()?;
                continue;
            }
            let (word, err) = self.word();
            match word {
                "context" => contexts.push(self.context()?),
                _ => return Err(err.with(format!("expected 'context' or '@prefix', found '{word}'"))),
            }
        }
    }

    fn prefix(&mut self) -> Result<(), LexError> {
        self.cur.skip_trivia();
        let name = self.cur.read_name().to_string();
        if !self.cur.eat(":") {
            return Err(self.cur.error("expected ':' after prefix name"));
        }
        self.cur.skip_trivia();
        let ns = self.cur.read_iri_ref()?;
        self.cur.skip_trivia();
        self.cur.eat(".");
        self.prefixes.insert(name, ns);
        Ok(())
    }

    /// Next bare word, plus an error positioned at its start.
    fn word(&mut self) -> (&'a str, LexError) {
        self.cur.skip_trivia();
        let at = self.cur.error("");
        (self.cur.read_name(), at)
    }

    fn expect(&mut self, token: &str) -> Result<(), LexError> {
        self.cur.skip_trivia();
        if self.cur.eat(token) {
            Ok(())
        } else {
            Err(self.cur.error(format!("expected '{token}'")))
        }
    }

    fn context(&mut self) -> Result<GrammarContext, LexError> {
        let (name, at) = self.word();
        if name.is_empty() {
            return Err(at.with("expected context name"));
        }
        let (mut word, mut at) = self.word();
        let kind = match word {
            "entry" => ContextKind::Entry,
            "exit" => ContextKind::Exit,
            _ => ContextKind::Intermediate,
        };
        if kind != ContextKind::Intermediate {
            (word, at) = self.word();
        }
        if word != "for" {
            return Err(at.with(format!("expected 'for', found '{word}'")));
        }
        self.cur.skip_trivia();
        let for_resource = self.cur.read_term(&self.prefixes)?;
        self.expect("{")?;
        let mut ctx = GrammarContext::new(name, kind, for_resource);
        loop {
            self.cur.skip_trivia();
            if self.cur.eat("}") {
                return Ok(ctx);
            }
            let (word, at) = self.word();
            match word {
                "pathcount" => {
                    let step = self.number()?;
                    ctx.rules.push(Rule::PathCount { step });
                }
                "traverse" => {
                    let mut edges = vec![self.edge()?];
                    loop {
                        self.cur.skip_trivia();
                        if !self.cur.eat(",") {
                            break;
                        }
                        edges.push(self.edge()?);
                    }
                    ctx.rules.push(Rule::traverse(edges));
                }
                "notever" => {
                    ctx.attributes.insert(Attribute::NotEver);
                }
                "is" => {
                    let step = self.number()?;
                    ctx.attributes.insert(Attribute::Is { step });
                }
                "not" => {
                    let step = self.number()?;
                    ctx.attributes.insert(Attribute::Not { step });
                }
                "" if self.cur.is_eof() => return Err(at.with("unterminated context body")),
                _ => return Err(at.with(format!("unknown rule or attribute '{word}'"))),
            }
        }
    }

    fn number(&mut self) -> Result<u32, LexError> {
        self.cur.skip_trivia();
        let at = self.cur.error("");
        let digits = self.cur.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .map_err(|_| at.with("expected a non-negative integer"))
    }

    fn edge(&mut self) -> Result<EdgeSpec, LexError> {
        let (word, at) = self.word();
        let direction = match word {
            "out" => EdgeDirection::Out,
            "in" => EdgeDirection::In,
            _ => return Err(at.with(format!("expected 'out' or 'in', found '{word}'"))),
        };
        self.cur.skip_trivia();
        let at = self.cur.error("");
        let predicate = self.cur.read_term(&self.prefixes)?;
        if !predicate.is_iri() {
            return Err(at.with("edge predicate must be an IRI"));
        }
        self.expect("->")?;
        let (name, at) = self.word();
        if name.is_empty() {
            return Err(at.with("expected context name"));
        }
        self.references.push((name.to_string(), at.line, at.column));
        Ok(EdgeSpec {
            direction,
            predicate,
            far_context: ContextId::new(name),
        })
    }
}

impl LexError {
    fn with(mut self, message: impl Into<String>) -> Self {
        self.message = message.into();
        self
    }
}

/// Renders `grammar` in the DSL with full IRIs, one context per block.
pub fn serialize_dsl(grammar: &Grammar) -> String {
    let mut out = String::new();
    for ctx in grammar.contexts() {
        let kind = match ctx.kind {
            ContextKind::Entry => " entry",
            ContextKind::Exit => " exit",
            ContextKind::Intermediate => "",
        };
        let _ = writeln!(out, "context {}{kind} for {} {{", ctx.id, term(&ctx.for_resource));
        for attr in &ctx.attributes {
            let _ = match attr {
                Attribute::NotEver => writeln!(out, "  notever"),
                Attribute::Is { step } => writeln!(out, "  is {step}"),
                Attribute::Not { step } => writeln!(out, "  not {step}"),
            };
        }
        for rule in &ctx.rules {
            let _ = match rule {
                Rule::PathCount { step } => writeln!(out, "  pathcount {step}"),
                Rule::Traverse { edges } => {
                    let list: Vec<String> = edges
                        .iter()
                        .map(|e| {
                            let dir = match e.direction {
                                EdgeDirection::Out => "out",
                                EdgeDirection::In => "in",
                            };
                            format!("{dir} {} -> {}", term(&e.predicate), e.far_context)
                        })
                        .collect();
                    writeln!(out, "  traverse {}", list.join(", "))
                }
            };
        }
        out.push_str("}\n");
    }
    out
}

fn term(r: &Resource) -> String {
    r.to_ntriples()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::validate_grammar;

    const G1: &str = include_str!("../../fixtures/G1.pg");

    fn lanl(local: &str) -> Resource {
        Resource::iri(format!("http://www.lanl.gov#{local}"))
    }

    #[test]
    fn parses_g1() {
        let g = parse_grammar_dsl(G1).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.entry_id().as_str(), "johan_0");
        assert_eq!(g.exit_id().as_str(), "norman_4");
        assert_eq!(g.source(), &lanl("johan"));
        assert_eq!(g.sink(), &lanl("norman"));
        let h3 = g.context(&"Human_3".into()).unwrap();
        assert_eq!(h3.rules[0], Rule::PathCount { step: 2 });
        assert!(h3.attributes.contains(&Attribute::Is { step: 2 }));
        assert_eq!(h3.traverse_edges().count(), 2);
        assert!(validate_grammar(&g).is_empty());
    }

    #[test]
    fn minimal_grammar() {
        let g = parse_grammar_dsl(
            "context a entry for <http://x/a> { pathcount 0 traverse out <http://x/p> -> b }\n\
             context b exit for <http://x/b> { pathcount 0 }",
        )
        .unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn entry_with_notever_is_rejected() {
        let err = parse_grammar_dsl(
            "context a entry for <http://x/a> {\n notever\n pathcount 0\n traverse out <http://x/p> -> b\n}\n\
             context b exit for <http://x/b> { pathcount 0 }",
        )
        .unwrap_err();
        assert!(matches!(err, GrammarError::Invalid(_)), "{err:?}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_grammar_dsl("context a entry for <http://x/a> {\n  pathcount x\n}").unwrap_err();
        assert_eq!(
            err,
            GrammarError::Syntax {
                line: 2,
                column: 13,
                message: "expected a non-negative integer".into()
            }
        );
        let err = parse_grammar_dsl("context a entry for <http://x/a> {\n  jump 1\n}").unwrap_err();
        assert!(matches!(err, GrammarError::Syntax { line: 2, column: 3, .. }));
        let err = parse_grammar_dsl("context a entry for nope:a { }").unwrap_err();
        assert!(matches!(err, GrammarError::Syntax { line: 1, column: 21, .. }));
    }

    #[test]
    fn undeclared_context_reference() {
        let err = parse_grammar_dsl(
            "context a entry for <http://x/a> { pathcount 0\n traverse out <http://x/p> -> ghost }\n\
             context b exit for <http://x/b> { pathcount 0 }",
        )
        .unwrap_err();
        assert_eq!(
            err,
            GrammarError::UndeclaredContext {
                name: "ghost".into(),
                line: 2,
                column: 31
            }
        );
    }

    #[test]
    fn round_trip_g1() {
        let g = parse_grammar_dsl(G1).unwrap();
        assert_eq!(parse_grammar_dsl(&serialize_dsl(&g)).unwrap(), g);
    }
}
