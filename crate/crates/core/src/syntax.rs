//! Term-level lexing shared by the N-Triples reader and the grammar DSL.

use crate::triple_store::{PrefixMap, Resource};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, line: usize) -> Self {
        Self {
            src,
            pos: 0,
            line,
            col: 1,
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments, crossing newlines.
    pub fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    pub fn take_while(&mut self, mut f: impl FnMut(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// `<...>` with the angle brackets consumed.
    pub fn read_iri_ref(&mut self) -> Result<String, LexError> {
        if !self.eat("<") {
            return Err(self.error("expected '<'"));
        }
        let body = self.take_while(|c| c != '>' && c != '\n' && !c.is_whitespace());
        if !self.eat(">") {
            return Err(self.error("unterminated IRI"));
        }
        if body.is_empty() {
            return Err(self.error("empty IRI"));
        }
        Ok(body.to_string())
    }

    pub fn read_name(&mut self) -> &'a str {
        self.take_while(is_name_char)
    }

    /// Any term: `<iri>`, `prefix:local`, `_:id` or a literal.
    pub fn read_term(&mut self, prefixes: &PrefixMap) -> Result<Resource, LexError> {
        match self.peek() {
            Some('<') => {
                let iri = self.read_iri_ref()?;
                Ok(Resource::Iri(expand_declared(&iri, prefixes).unwrap_or(iri)))
            }
            Some('"') => self.read_literal(prefixes),
            Some('_') if self.rest().starts_with("_:") => {
                self.eat("_:");
                let id = self.read_name();
                if id.is_empty() {
                    return Err(self.error("empty blank node label"));
                }
                Ok(Resource::Blank(id.to_string()))
            }
            Some(c) if is_name_start(c) => self.read_prefixed(prefixes).map(Resource::Iri),
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    pub fn read_prefixed(&mut self, prefixes: &PrefixMap) -> Result<String, LexError> {
        let (line, column) = (self.line, self.col);
        let prefix = self.take_while(|c| c != ':' && is_name_char(c));
        if !self.eat(":") {
            return Err(LexError {
                line,
                column,
                message: format!("expected prefixed name, found '{prefix}'"),
            });
        }
        let local = self.read_name();
        prefixes.expand(prefix, local).ok_or(LexError {
            line,
            column,
            message: format!("unknown prefix '{prefix}'"),
        })
    }

    fn read_literal(&mut self, prefixes: &PrefixMap) -> Result<Resource, LexError> {
        self.eat("\"");
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error("unterminated literal")),
                Some('"') => break,
                Some('\\') => {
                    let escaped = match self.bump() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('t') => '\t',
                        Some('u') => self.read_unicode_escape(4)?,
                        Some('U') => self.read_unicode_escape(8)?,
                        _ => return Err(self.error("invalid escape sequence")),
                    };
                    lexical.push(escaped);
                }
                Some(c) => lexical.push(c),
            }
        }
        let datatype = if self.eat("^^") {
            match self.peek() {
                Some('<') => self.read_iri_ref()?,
                _ => self.read_prefixed(prefixes)?,
            }
        } else if self.peek() == Some('@') {
            return Err(self.error("language-tagged literals are not supported"));
        } else {
            vocab::XSD_STRING.to_string()
        };
        Ok(Resource::literal(lexical, datatype))
    }

    fn read_unicode_escape(&mut self, digits: usize) -> Result<char, LexError> {
        let mut hex = String::new();
        for _ in 0..digits {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.error("invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error("invalid unicode scalar"))
    }
}

/// `<p:local>` where `p` is a declared prefix expands like `p:local`.
fn expand_declared(iri: &str, prefixes: &PrefixMap) -> Option<String> {
    let (prefix, local) = iri.split_once(':')?;
    if local.starts_with("//") || !prefix.chars().all(is_name_char) {
        return None;
    }
    prefixes.expand(prefix, local)
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-')
}
