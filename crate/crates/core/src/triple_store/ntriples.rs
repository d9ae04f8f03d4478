//! Line-oriented N-Triples reader with `@prefix` declarations and `#`
//! comments. Prefixed names are expanded while parsing.

use super::{Graph, GraphBuilder, StoreError, Subsumption, Triple};
use crate::syntax::{Cursor, LexError};

pub fn load_ntriples(text: &str) -> Result<Graph, StoreError> {
    load_ntriples_with(text, Subsumption::default())
}

pub fn load_ntriples_with(text: &str, subsumption: Subsumption) -> Result<Graph, StoreError> {
    let mut builder = GraphBuilder::new();
    parse_into(&mut builder, text)?;
    Ok(builder.build_with(subsumption))
}

/// Appends the parsed triples of `text` to `builder`. Returns how many lines
/// carried a triple.
pub fn parse_into(builder: &mut GraphBuilder, text: &str) -> Result<usize, StoreError> {
    let mut count = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cur = Cursor::new(raw, line_no);
        cur.skip_trivia();
        if cur.eat("@prefix") {
            let (prefix, ns) = parse_prefix(&mut cur).map_err(parse_error)?;
            builder.prefixes_mut().insert(prefix, ns);
            continue;
        }
        let triple = parse_triple(&mut cur, builder).map_err(parse_error)?;
        triple.validate().map_err(|reason| StoreError::Validation {
            line: Some(line_no),
            reason,
        })?;
        builder.insert(triple)?;
        count += 1;
    }
    Ok(count)
}

fn parse_error(e: LexError) -> StoreError {
    StoreError::Parse {
        line: e.line,
        column: e.column,
        message: e.message,
    }
}

fn parse_prefix(cur: &mut Cursor<'_>) -> Result<(String, String), LexError> {
    cur.skip_trivia();
    let prefix = cur.read_name().to_string();
    if !cur.eat(":") {
        return Err(cur.error("expected ':' after prefix name"));
    }
    cur.skip_trivia();
    let ns = cur.read_iri_ref()?;
    cur.skip_trivia();
    cur.eat(".");
    cur.skip_trivia();
    if !cur.is_eof() {
        return Err(cur.error("trailing characters after prefix declaration"));
    }
    Ok((prefix, ns))
}

fn parse_triple(cur: &mut Cursor<'_>, builder: &GraphBuilder) -> Result<Triple, LexError> {
    let prefixes = builder.prefixes();
    let subject = cur.read_term(prefixes)?;
    require_space(cur)?;
    let predicate = cur.read_term(prefixes)?;
    require_space(cur)?;
    let object = cur.read_term(prefixes)?;
    cur.skip_trivia();
    if !cur.eat(".") {
        return Err(cur.error("expected '.' at end of triple"));
    }
    cur.skip_trivia();
    if !cur.is_eof() {
        return Err(cur.error("trailing characters after '.'"));
    }
    Ok(Triple::new(subject, predicate, object))
}

fn require_space(cur: &mut Cursor<'_>) -> Result<(), LexError> {
    match cur.peek() {
        Some(c) if c.is_whitespace() => {
            cur.skip_trivia();
            Ok(())
        }
        Some(_) => Err(cur.error("expected whitespace between terms")),
        None => Err(cur.error("unexpected end of line")),
    }
}
